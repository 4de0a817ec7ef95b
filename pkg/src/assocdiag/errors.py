"""Exception types raised by the library."""


class NotationError(ValueError):
    """Malformed permutation, partition or tree notation."""


class SizeMismatchError(ValueError):
    """Two objects that must live on the same n do not."""


class RejectedMoveError(ValueError):
    """A shift move violates its admissibility condition."""


class PathNotFoundError(ValueError):
    """No admissible shift sequence connects two cells."""


class NotMatchingPairError(ValueError):
    """Input to ``mp_to_cp`` is not a matching pair."""
