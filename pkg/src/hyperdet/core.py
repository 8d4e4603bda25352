"""Dense hypermatrices and the basic multilinear operations on them.

Indices exposed by this module are 1-based, matching the usual mathematical
notation ``a_{i_1...i_N}``.  Entries are stored in a numpy array laid out with
the first axis varying fastest (Fortran order), so the flat buffer is exactly
the reflected lexicographic ordering used by :func:`psi`.

Three scalar backends are supported and never mixed implicitly:

``"rational"``
    exact :class:`fractions.Fraction` values in an ``object`` array;
``"float64"``
    finite IEEE doubles;
``"complex128"``
    finite complex doubles (used by the quantum layer).
"""

from __future__ import annotations

import functools
import itertools
import math
import numbers
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .errors import BackendError, IndexOutOfRange, ShapeError

RATIONAL = "rational"
FLOAT64 = "float64"
COMPLEX128 = "complex128"
BACKENDS = (RATIONAL, FLOAT64, COMPLEX128)

#: default absolute per-entry tolerance for inexact symmetry checks
SYMMETRY_TOL = 1e-9


def _check_backend(backend: str) -> str:
    if backend not in BACKENDS:
        raise BackendError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    return backend


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (bool, np.bool_)):
        raise BackendError(f"boolean entry {x!r} is not a rational scalar")
    if isinstance(x, numbers.Integral):
        return Fraction(int(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise BackendError(f"cannot parse {x!r} as a rational") from exc
    raise BackendError(
        f"entry {x!r} of type {type(x).__name__} is not exact; "
        "the rational backend accepts only integers, Fractions and 'p/q' strings"
    )


def infer_backend(values) -> str:
    """Pick the narrowest backend able to hold ``values`` without loss."""
    arr = np.asarray(values, dtype=object if _has_fraction(values) else None)
    kind = arr.dtype.kind
    if kind in "iubU":
        # integers and "p/q" strings are exact
        return RATIONAL
    if kind == "f":
        return FLOAT64
    if kind == "c":
        return COMPLEX128
    if kind == "O":
        flat = arr.ravel()
        if all(isinstance(x, (numbers.Integral, Fraction, str)) for x in flat):
            return RATIONAL
        if all(isinstance(x, numbers.Real) for x in flat):
            return FLOAT64
        if all(isinstance(x, numbers.Complex) for x in flat):
            return COMPLEX128
    raise BackendError(f"cannot infer a scalar backend for dtype {arr.dtype}")


def _has_fraction(values) -> bool:
    if isinstance(values, np.ndarray):
        return values.dtype == object
    if isinstance(values, Fraction):
        return True
    if isinstance(values, (list, tuple)):
        return any(_has_fraction(v) for v in values)
    return False


def as_backend_array(values, backend: str) -> np.ndarray:
    """Convert ``values`` to a numpy array of the given backend.

    Conversions that could lose information (floats into the rational
    backend, complex into float64, Fractions into a float backend) raise
    :class:`BackendError` rather than rounding silently.
    """
    _check_backend(backend)
    if backend == RATIONAL:
        arr = np.asarray(values, dtype=object)
        out = np.empty(arr.shape, dtype=object)
        for idx, x in np.ndenumerate(arr):
            out[idx] = _to_fraction(x)
        return out

    arr = np.asarray(values, dtype=object if _has_fraction(values) else None)
    if arr.dtype == object:
        for x in arr.ravel():
            if isinstance(x, Fraction) and x.denominator != 1:
                raise BackendError(
                    f"Fraction {x} cannot enter the {backend} backend implicitly"
                )
            if not isinstance(x, numbers.Complex):
                raise BackendError(f"non-numeric entry {x!r}")
            if backend == FLOAT64 and not isinstance(x, numbers.Real):
                raise BackendError(f"complex entry {x!r} in float64 backend")
        arr = arr.astype(complex if backend == COMPLEX128 else float)
    elif arr.dtype.kind == "c" and backend == FLOAT64:
        raise BackendError("complex entries cannot enter the float64 backend")
    elif arr.dtype.kind not in "iufcb":
        raise BackendError(f"unsupported dtype {arr.dtype}")
    out = arr.astype(np.complex128 if backend == COMPLEX128 else np.float64)
    if not np.all(np.isfinite(out)):
        raise BackendError("NaN or infinite entries are not accepted")
    return out


def zero(backend: str):
    """The additive identity of a backend as a Python scalar."""
    return {RATIONAL: Fraction(0), FLOAT64: 0.0, COMPLEX128: 0j}[_check_backend(backend)]


def to_python_scalar(x, backend: str):
    if backend == RATIONAL:
        return _to_fraction(x)
    if backend == FLOAT64:
        return float(x)
    return complex(x)


# ---------------------------------------------------------------------------
# index arithmetic


def _check_shape(shape: Iterable[int]) -> tuple[int, ...]:
    shape = tuple(int(n) for n in shape)
    if not shape:
        raise ShapeError("a hypermatrix needs order N >= 1")
    if any(n < 1 for n in shape):
        raise ShapeError(f"every extent must be >= 1, got {shape}")
    return shape


def psi(index: Sequence[int], shape: Sequence[int]) -> int:
    """1-based position of ``index`` in the reflected lexicographic order.

    ``psi(i, n) = i_1 + n_1 (i_2 - 1) + ... + n_1...n_{N-1} (i_N - 1)``.

    >>> psi((2, 1), (3, 4))
    2
    >>> psi((3, 4), (3, 4))
    12
    """
    shape = _check_shape(shape)
    if len(index) != len(shape):
        raise ShapeError(
            f"index {tuple(index)} has length {len(index)}, shape has order {len(shape)}"
        )
    pos, stride = 1, 1
    for axis, (i, n) in enumerate(zip(index, shape), start=1):
        if not 1 <= i <= n:
            raise IndexOutOfRange(index, shape, axis)
        pos += stride * (i - 1)
        stride *= n
    return pos


def psi_inverse(position: int, shape: Sequence[int]) -> tuple[int, ...]:
    """Inverse of :func:`psi`: the 1-based multi-index at a 1-based position."""
    shape = _check_shape(shape)
    total = math.prod(shape)
    if not 1 <= position <= total:
        raise IndexError(f"position {position} outside 1..{total}")
    rest = position - 1
    index = []
    for n in shape:
        rest, r = divmod(rest, n)
        index.append(r + 1)
    return tuple(index)


def multi_indices(shape: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """All 1-based multi-indices of ``shape``, first axis fastest."""
    shape = _check_shape(shape)
    for rev in itertools.product(*(range(1, n + 1) for n in reversed(shape))):
        yield rev[::-1]


# ---------------------------------------------------------------------------
# permutations (1-based image tuples)


def check_permutation(perm: Sequence[int], n: int | None = None) -> tuple[int, ...]:
    perm = tuple(int(p) for p in perm)
    if n is not None and len(perm) != n:
        raise ValueError(f"permutation {perm} has length {len(perm)}, expected {n}")
    if sorted(perm) != list(range(1, len(perm) + 1)):
        raise ValueError(f"{perm} is not a permutation of 1..{len(perm)}")
    return perm


def compose(pi: Sequence[int], rho: Sequence[int]) -> tuple[int, ...]:
    """``pi o rho``: apply ``rho`` first, then ``pi``."""
    pi, rho = check_permutation(pi), check_permutation(rho, len(pi))
    return tuple(pi[r - 1] for r in rho)


def inverse(pi: Sequence[int]) -> tuple[int, ...]:
    pi = check_permutation(pi)
    inv = [0] * len(pi)
    for k, p in enumerate(pi, start=1):
        inv[p - 1] = k
    return tuple(inv)


# ---------------------------------------------------------------------------
# the hypermatrix type


class Hypermatrix:
    """Immutable dense hypermatrix over one scalar backend.

    ``array`` is indexed 0-based like any numpy array; entry access through
    :meth:`entry` (or ``A[i]``) is 1-based.
    """

    __slots__ = ("_array", "_backend")

    def __init__(self, array, backend: str | None = None):
        if backend is None:
            backend = infer_backend(array)
        arr = as_backend_array(array, backend)
        if arr.ndim == 0:
            raise ShapeError("a hypermatrix needs order N >= 1")
        _check_shape(arr.shape)
        arr = np.asfortranarray(arr)
        arr.flags.writeable = False
        self._array = arr
        self._backend = backend

    @classmethod
    def _wrap(cls, arr: np.ndarray, backend: str) -> "Hypermatrix":
        # trusted constructor: arr already holds backend-valid scalars
        self = cls.__new__(cls)
        arr = np.asfortranarray(arr)
        arr.flags.writeable = False
        self._array = arr
        self._backend = backend
        return self

    @classmethod
    def from_flat(cls, shape: Sequence[int], data, backend: str | None = None):
        """Build from a flat sequence given in psi (first-axis-fastest) order."""
        shape = _check_shape(shape)
        data = list(data) if not isinstance(data, np.ndarray) else data
        if len(data) != math.prod(shape):
            raise ShapeError(
                f"data has {len(data)} entries, shape {shape} needs {math.prod(shape)}"
            )
        if backend is None:
            backend = infer_backend(data)
        flat = as_backend_array(data, backend)
        return cls._wrap(flat.reshape(shape, order="F"), backend)

    @classmethod
    def from_function(
        cls, shape: Sequence[int], fn: Callable[[tuple[int, ...]], object], backend=None
    ):
        """Entry at each 1-based multi-index ``i`` is ``fn(i)``."""
        shape = _check_shape(shape)
        return cls.from_flat(shape, [fn(i) for i in multi_indices(shape)], backend)

    @classmethod
    def zeros(cls, shape: Sequence[int], backend: str = RATIONAL):
        shape = _check_shape(shape)
        return cls.from_flat(shape, [0] * math.prod(shape), backend)

    # -- basic properties -------------------------------------------------

    @property
    def array(self) -> np.ndarray:
        return self._array

    @property
    def backend(self) -> str:
        return self._backend

    @property
    def shape(self) -> tuple[int, ...]:
        return self._array.shape

    @property
    def order(self) -> int:
        return self._array.ndim

    @property
    def size(self) -> int:
        return self._array.size

    @property
    def data(self) -> np.ndarray:
        """Flat read-only view of the entries in psi order."""
        return self._array.ravel(order="F")

    @property
    def is_cubical(self) -> bool:
        shape = self._array.shape
        return shape.count(shape[0]) == len(shape)

    @property
    def side(self) -> int:
        if not self.is_cubical:
            raise ShapeError(f"shape {self.shape} is not cubical")
        return self.shape[0]

    def entry(self, index: Sequence[int]):
        psi(index, self.shape)  # validates the index
        return to_python_scalar(
            self._array[tuple(i - 1 for i in index)], self._backend
        )

    __getitem__ = entry

    def astype(self, backend: str) -> "Hypermatrix":
        """Explicit backend conversion (rational -> float is allowed here)."""
        _check_backend(backend)
        if backend == self._backend:
            return self
        if self._backend == RATIONAL:
            conv = float if backend == FLOAT64 else complex
            return Hypermatrix._wrap(
                np.vectorize(conv, otypes=[backend])(self._array), backend
            )
        if backend == COMPLEX128:
            return Hypermatrix._wrap(self._array.astype(np.complex128), backend)
        raise BackendError(f"refusing lossy conversion {self._backend} -> {backend}")

    def tolist(self) -> list:
        return [to_python_scalar(x, self._backend) for x in self.data]

    # -- arithmetic used by the algebraic property tests ----------------

    def _same(self, other: "Hypermatrix") -> None:
        if not isinstance(other, Hypermatrix):
            raise TypeError(f"expected Hypermatrix, got {type(other).__name__}")
        if other.backend != self.backend:
            raise BackendError(f"mixed backends {self.backend} and {other.backend}")
        if other.shape != self.shape:
            raise ShapeError(f"shape {self.shape} vs {other.shape}")

    def __add__(self, other):
        self._same(other)
        return Hypermatrix._wrap(self._array + other._array, self._backend)

    def __sub__(self, other):
        self._same(other)
        return Hypermatrix._wrap(self._array - other._array, self._backend)

    def __neg__(self):
        return Hypermatrix._wrap(-self._array, self._backend)

    def __mul__(self, scalar):
        c = as_backend_array(scalar, self._backend)[()]
        return Hypermatrix._wrap(self._array * c, self._backend)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Hypermatrix):
            return NotImplemented
        return (
            self.backend == other.backend
            and self.shape == other.shape
            and bool(np.all(self._array == other._array))
        )

    def __hash__(self):
        return hash((self.shape, self.backend, tuple(self.data.tolist())))

    def __repr__(self):
        return f"Hypermatrix(shape={self.shape}, backend={self.backend!r})"


def basis_hypermatrix(index: Sequence[int], shape: Sequence[int], backend=RATIONAL):
    """The unit hypermatrix with a single 1 at the 1-based ``index``."""
    pos = psi(index, shape)
    data = [0] * math.prod(shape)
    data[pos - 1] = 1
    return Hypermatrix.from_flat(shape, data, backend)


# ---------------------------------------------------------------------------
# multilinear operations


def multilinear_multiply(A: Hypermatrix, factors: Sequence) -> Hypermatrix:
    """Right multilinear product ``A * (X1, ..., XN)``.

    Factor ``k`` must have ``A.shape[k]`` rows.  One-dimensional factors are
    treated as column vectors, so contracting every axis with a vector gives
    a ``(1, ..., 1)`` hypermatrix (see :func:`multilinear_form`).
    """
    if len(factors) != A.order:
        raise ShapeError(f"expected {A.order} factors, got {len(factors)}")
    mats = []
    for k, X in enumerate(factors):
        if isinstance(X, Hypermatrix):
            if X.backend != A.backend:
                raise BackendError(f"mixed backends {A.backend} and {X.backend}")
            X = X.array
        else:
            X = as_backend_array(X, A.backend)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2:
            raise ShapeError(f"factor {k + 1} must be a matrix, has ndim {X.ndim}")
        if X.shape[0] != A.shape[k]:
            raise ShapeError(
                f"factor {k + 1} has {X.shape[0]} rows, expected {A.shape[k]} "
                f"(A.shape = {A.shape})"
            )
        mats.append(X)
    out = A.array
    for X in mats:
        # contracting axis 0 each time cycles the new axes round to their slots
        out = np.tensordot(out, X, axes=(0, 0))
    return Hypermatrix(out, A.backend) if A.backend == RATIONAL else Hypermatrix._wrap(
        out, A.backend
    )


def multilinear_form(A: Hypermatrix, vectors: Sequence):
    """Scalar ``A * (x1, ..., xN)`` for column vectors ``x_k``."""
    res = multilinear_multiply(A, vectors)
    return to_python_scalar(res.array.reshape(-1)[0], A.backend)


def kron(A: Hypermatrix, B: Hypermatrix) -> Hypermatrix:
    """Tensor Kronecker product: the block hypermatrix whose ``i``-block is ``a_i B``."""
    if A.order != B.order:
        raise ShapeError(f"kron needs equal orders, got {A.order} and {B.order}")
    if A.backend != B.backend:
        raise BackendError(f"mixed backends {A.backend} and {B.backend}")
    N = A.order
    outer = np.multiply.outer(A.array, B.array)
    interleave = [ax for k in range(N) for ax in (k, N + k)]
    shape = tuple(m * n for m, n in zip(A.shape, B.shape))
    return Hypermatrix._wrap(outer.transpose(interleave).reshape(shape), A.backend)


def transpose(A: Hypermatrix, perm: Sequence[int]) -> Hypermatrix:
    """The ``perm``-transpose: result entry ``i`` is ``a_{i_perm(1) ... i_perm(N)}``.

    ``perm`` is given as the tuple of 1-based images ``(perm(1), ..., perm(N))``.
    With this convention ``transpose(transpose(A, p), r) == transpose(A, compose(r, p))``.
    """
    perm = check_permutation(perm, A.order)
    axes = [p - 1 for p in inverse(perm)]
    return Hypermatrix._wrap(np.transpose(A.array, axes), A.backend)


def generalized_transpose(A: Hypermatrix) -> Hypermatrix:
    """Reverse the axis order, i.e. the product of transpositions (1 N)(2 N-1)..."""
    return Hypermatrix._wrap(np.transpose(A.array), A.backend)


def default_tolerance(backend: str) -> float:
    return 0.0 if backend == RATIONAL else SYMMETRY_TOL


@functools.lru_cache(maxsize=64)
def _canonical_offsets(d: int, N: int) -> np.ndarray:
    # psi offset of each index's weakly decreasing rearrangement
    idx = np.indices((d,) * N).reshape(N, -1, order="F")
    idx = -np.sort(-idx, axis=0)
    out = (d ** np.arange(N, dtype=np.int64)) @ idx
    out.flags.writeable = False
    return out


@functools.lru_cache(maxsize=64)
def _adjacent_swaps(d: int, N: int) -> np.ndarray:
    # row k: psi offset of the index with components k, k+1 exchanged
    pos = np.arange(d**N, dtype=np.int64).reshape((d,) * N, order="F")
    rows = [np.swapaxes(pos, k, k + 1).ravel(order="F") for k in range(N - 1)]
    out = np.array(rows, dtype=np.int64).reshape(N - 1, d**N)
    out.flags.writeable = False
    return out


def symmetry_witness(A: Hypermatrix, tol: float | None = None):
    """First violation of symmetry, or ``None`` if ``A`` is symmetric.

    Symmetry means invariance within ``tol`` under each adjacent
    transposition ``(k, k+1)``; these generate the full symmetric group.  An
    exactly symmetric input is recognized by one gather that compares every
    entry with its weakly decreasing rearrangement.  A violation is reported
    as ``(index, swapped_index, difference)`` with 1-based indices.
    """
    if not A.is_cubical:
        raise ShapeError(f"symmetry needs a cubical hypermatrix, got shape {A.shape}")
    if tol is None:
        tol = default_tolerance(A.backend)
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    if A.backend == RATIONAL and tol != 0:
        raise ValueError("the rational backend only supports tol = 0")
    if A.order == 1:
        return None
    d, N = A.shape[0], A.order
    flat = A.data
    if (flat[_canonical_offsets(d, N)] == flat).all():
        return None
    diff = flat[None, :] - flat[_adjacent_swaps(d, N)]
    bad = (diff != 0) if tol == 0 else (np.abs(diff) > tol)
    if not bad.any():
        return None
    k, pos = np.argwhere(bad)[0]
    index = psi_inverse(int(pos) + 1, A.shape)
    other = list(index)
    other[k], other[k + 1] = other[k + 1], other[k]
    return index, tuple(other), to_python_scalar(diff[k, pos], A.backend)


def is_symmetric(A: Hypermatrix, tol: float | None = None) -> bool:
    return symmetry_witness(A, tol) is None
