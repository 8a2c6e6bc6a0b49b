import sys

from colanet.cli import main

sys.exit(main())
