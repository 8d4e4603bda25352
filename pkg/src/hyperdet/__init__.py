"""Cayley's first hyperdeterminant with a polynomial-time path for symmetric input.

The entry point is :func:`hdet`; :func:`evaluate` also reports which engine
ran.  Indices are 1-based and flat data is ordered with the first axis
varying fastest.
"""

from .cache import ContractorStore, ensure_contractor
from .core import Hypermatrix, is_symmetric, kron, multilinear_multiply, transpose
from .errors import (
    BackendError,
    CorruptionError,
    HyperdetError,
    IndexOutOfRange,
    NormalizationError,
    OddOrderError,
    ResourceError,
    ShapeError,
    StorageError,
    SymmetryError,
    VersionError,
)
from .hdet import (
    Contractor,
    build_contractor,
    complexity_ratio,
    evaluate,
    hdet,
    hdet_levicivita,
    hdet_naive,
    hdet_symmetric,
)
from .levicivita import epsilon_kron_power, levi_civita
from .quantum import QuditState, concurrence, is_boson
from .vectorize import (
    SparseTensor,
    duplication_matrix,
    elimination_matrix,
    hvec,
    hvec_1N,
    placement,
)

__version__ = "0.1.0"
