"""Exception types raised across the package."""


class JpcemError(Exception):
    """Base class for all package errors."""


class DimensionError(JpcemError, ValueError):
    pass


class DegenerateSampleError(JpcemError, ValueError):
    pass


class EmptyDictionaryError(JpcemError, ValueError):
    pass


class InvalidClassError(JpcemError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class InvalidParameterError(JpcemError, ValueError):
    pass


class InvalidInputError(JpcemError, ValueError):
    pass


class SizeLimitError(JpcemError, ValueError):
    pass


class InvalidConfigError(JpcemError, ValueError):
    pass


class IngestionError(JpcemError, OSError):
    """Raised when a manifest or image cannot be read; message names the path."""


class CountError(JpcemError, ValueError):
    pass
