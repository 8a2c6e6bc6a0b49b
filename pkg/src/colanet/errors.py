"""Exception hierarchy shared by both engines and the experiment harness."""


class ColanetError(Exception):
    """Base class for all package errors."""


class ConfigurationError(ColanetError, ValueError):
    """Invalid hyperparameters or network construction arguments."""


class InputError(ColanetError, ValueError):
    """An input vector or example violates its contract."""


class EncodingError(InputError):
    """A raw image encodes to a count vector the classifiers cannot accept."""


class IngestionError(ColanetError, IOError):
    """A dataset file is malformed.

    ``offset`` is the byte position at which the problem was detected, when
    it is known.
    """

    def __init__(self, message, path=None, offset=None):
        where = []
        if path is not None:
            where.append(str(path))
        if offset is not None:
            where.append(f"byte offset {offset}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.path = path
        self.offset = offset


class StatisticsError(ColanetError, ValueError):
    """Not enough data for the requested statistic."""
