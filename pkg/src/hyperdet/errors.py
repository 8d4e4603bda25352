"""Exception hierarchy shared by every hyperdet module."""


class HyperdetError(Exception):
    """Base class for all library errors."""


class ShapeError(HyperdetError, ValueError):
    """Operands have incompatible orders or extents."""


class IndexOutOfRange(HyperdetError, IndexError):
    """A 1-based multi-index component lies outside its axis extent."""

    def __init__(self, index, shape, axis):
        self.index = tuple(index)
        self.shape = tuple(shape)
        self.axis = axis
        super().__init__(
            f"index {self.index} out of range on axis {axis} "
            f"(valid 1..{self.shape[axis - 1]})"
        )


class BackendError(HyperdetError, TypeError):
    """Mixed or unsupported scalar backends."""


class SymmetryError(HyperdetError, ValueError):
    """A hypermatrix required to be symmetric is not."""

    def __init__(self, index, other, difference):
        self.index = tuple(index)
        self.other = tuple(other)
        self.difference = difference
        super().__init__(
            f"not symmetric: entry {self.index} and entry {self.other} "
            f"differ by {difference!r}"
        )


class ResourceError(HyperdetError, RuntimeError):
    """A construction would exceed its configured size budget."""

    def __init__(self, message, required, budget):
        self.required = required
        self.budget = budget
        super().__init__(f"{message}: requires {required} > budget {budget}")


class NormalizationError(HyperdetError, ValueError):
    """A quantum state does not have unit norm."""

    def __init__(self, norm):
        self.norm = norm
        super().__init__(f"state is not normalized: norm = {norm!r}")


class OddOrderError(HyperdetError, ValueError):
    """Concurrence requested for an odd number of particles."""


class StorageError(HyperdetError, OSError):
    """The cache directory could not be written."""


class CorruptionError(HyperdetError):
    """A cache file failed its checksum or structural checks."""


class VersionError(HyperdetError):
    """A cache file was written by an unsupported format version."""
