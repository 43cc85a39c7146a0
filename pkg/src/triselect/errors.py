class TriselectError(Exception):
    pass


class InputError(TriselectError, ValueError):
    """The instance (points, triangles, flags) is malformed or degenerate."""


class GeneralPositionError(InputError):
    pass


class SelectionError(TriselectError):
    """The selection pipeline could not complete on a valid instance."""
