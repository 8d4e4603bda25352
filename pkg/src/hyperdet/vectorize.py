"""Vectorizations of hypermatrices and generalized elimination/duplication matrices.

A symmetric cubical hypermatrix of order ``N`` and side ``d`` is determined by
its entries at weakly decreasing indices ``d >= i_1 >= ... >= i_N >= 1``.
Listing those entries in reflected lexicographic order gives the compressed
vector :func:`hvec_1N`; :func:`placement` is the closed-form position of a
tuple in that list.  The elimination matrix ``L`` and duplication matrix ``D``
translate between the compressed and full (:func:`hvec`) vectorizations.
"""

from __future__ import annotations

import functools
import itertools
import math
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from . import core
from .core import Hypermatrix
from .errors import IndexOutOfRange, ResourceError, ShapeError, SymmetryError

#: refuse to build L or D with more stored nonzeros than this
MATRIX_BUDGET = 10**8


class SparseTensor:
    """Coordinate-form tensor with canonically ordered, unique, nonzero entries.

    ``indices`` holds 0-based coordinates, one row per nonzero, sorted by
    psi-linearized position (first axis fastest).  Public iteration through
    :meth:`entries` reports 1-based multi-indices.
    """

    __slots__ = ("shape", "indices", "values")

    def __init__(self, shape, indices, values, *, check: bool = True):
        self.shape = tuple(int(n) for n in shape)
        indices = np.asarray(indices, dtype=np.int64).reshape(-1, len(self.shape))
        values = np.asarray(values)
        if check:
            if len(indices) != len(values):
                raise ShapeError("indices and values differ in length")
            if len(indices) and (
                (indices < 0).any() or (indices >= np.array(self.shape)).any()
            ):
                raise ShapeError(f"coordinates out of range for shape {self.shape}")
            if len(indices):
                order = np.lexsort(indices.T)
                indices, values = indices[order], values[order]
                if (np.diff(indices, axis=0) == 0).all(axis=1).any():
                    raise ValueError("duplicate coordinates in sparse tensor")
                keep = values != 0
                indices, values = indices[keep], values[keep]
        indices.flags.writeable = False
        values.flags.writeable = False
        self.indices = indices
        self.values = values

    @classmethod
    def from_dict(cls, shape, mapping: dict) -> "SparseTensor":
        """Build from ``{1-based multi-index: value}``."""
        shape = tuple(shape)
        idx = [tuple(i - 1 for i in k) for k in mapping]
        for k in mapping:
            core.psi(k, shape)
        vals = list(mapping.values())
        dtype = object if any(isinstance(v, Fraction) for v in vals) else None
        return cls(shape, np.array(idx, dtype=np.int64).reshape(-1, len(shape)),
                   np.array(vals, dtype=dtype))

    @property
    def order(self) -> int:
        return len(self.shape)

    @property
    def nnz(self) -> int:
        return len(self.values)

    def entries(self) -> Iterator[tuple[tuple[int, ...], object]]:
        for idx, v in zip(self.indices.tolist(), self.values.tolist()):
            yield tuple(i + 1 for i in idx), v

    def to_dict(self) -> dict:
        return dict(self.entries())

    def linear_indices(self) -> list[int]:
        """0-based psi positions of the nonzeros (exact Python integers)."""
        strides = [math.prod(self.shape[:k]) for k in range(self.order)]
        return [sum(i * s for i, s in zip(row, strides)) for row in self.indices.tolist()]

    def densify(self, backend: str = core.RATIONAL, limit: int = 10**7) -> Hypermatrix:
        size = math.prod(self.shape)
        if size > limit:
            raise ResourceError("dense materialization", size, limit)
        arr = np.zeros(self.shape, dtype=object if backend == core.RATIONAL else None)
        arr = core.as_backend_array(arr, backend)
        if self.nnz:
            arr[tuple(self.indices.T)] = core.as_backend_array(self.values, backend)
        return Hypermatrix._wrap(arr, backend)

    def matvec(self, vector) -> np.ndarray:
        """``M @ v`` for an order-2 tensor ``M``; the vector's dtype is kept."""
        if self.order != 2:
            raise ShapeError("matvec needs an order-2 sparse tensor")
        v = np.asarray(vector)
        if v.shape != (self.shape[1],):
            raise ShapeError(f"vector of length {v.shape} for matrix {self.shape}")
        out = np.zeros(self.shape[0], dtype=v.dtype)
        if v.dtype == object:
            out[:] = 0
        for (r, c), val in zip(self.indices.tolist(), self.values.tolist()):
            out[r] = out[r] + val * v[c]
        return out

    def __matmul__(self, other: "SparseTensor") -> "SparseTensor":
        if not isinstance(other, SparseTensor):
            return NotImplemented
        if self.order != 2 or other.order != 2 or self.shape[1] != other.shape[0]:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        by_row: dict[int, list] = {}
        for (r, c), v in zip(other.indices.tolist(), other.values.tolist()):
            by_row.setdefault(r, []).append((c, v))
        acc: dict[tuple[int, int], object] = {}
        for (r, k), v in zip(self.indices.tolist(), self.values.tolist()):
            for c, w in by_row.get(k, ()):
                acc[(r, c)] = acc.get((r, c), 0) + v * w
        acc = {k: v for k, v in acc.items() if v != 0}
        idx = np.array(list(acc), dtype=np.int64).reshape(-1, 2)
        return SparseTensor((self.shape[0], other.shape[1]), idx,
                            np.array(list(acc.values())))

    def __eq__(self, other):
        if not isinstance(other, SparseTensor):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.indices, other.indices)
            and bool(np.all(self.values == other.values))
        )

    def __repr__(self):
        return f"SparseTensor(shape={self.shape}, nnz={self.nnz})"


# ---------------------------------------------------------------------------
# canonical vectorization


def hvec(A):
    """Entries in psi order.  A read-only view for dense input; a sparse
    ``(|n|,)`` tensor for :class:`SparseTensor` input."""
    if isinstance(A, SparseTensor):
        lin = A.linear_indices()
        return SparseTensor((math.prod(A.shape),), np.array(lin).reshape(-1, 1),
                            A.values)
    return A.data


# ---------------------------------------------------------------------------
# weakly decreasing tuples


def count_monotone(d: int, N: int, lower: int = 1) -> int:
    """Number of tuples with ``d >= i_1 >= ... >= i_N >= lower``: ``C(d+N-lower, N)``."""
    if d < 1 or N < 1:
        raise ValueError(f"need d, N >= 1, got d={d}, N={N}")
    return math.comb(d + N - lower, N)


def _binom(a: int, b: int) -> int:
    # zero below the diagonal; happens whenever a component equals d
    return math.comb(a, b) if a >= b >= 0 else 0


def check_monotone(index: Sequence[int], d: int) -> tuple[int, ...]:
    index = tuple(int(i) for i in index)
    if not index:
        raise ValueError("empty index")
    for axis, i in enumerate(index, start=1):
        if not 1 <= i <= d:
            raise IndexOutOfRange(index, (d,) * len(index), axis)
    if any(a < b for a, b in zip(index, index[1:])):
        raise ValueError(f"{index} is not weakly decreasing")
    return index


def placement(index: Sequence[int], d: int) -> int:
    """1-based position of a weakly decreasing tuple within the reflected
    lexicographic listing of all such tuples.

    >>> placement((2, 2, 1), 3)
    4
    """
    index = check_monotone(index, d)
    N = len(index)
    return math.comb(d + N - 1, N) - sum(
        _binom(d + k - (i + 1), k) for k, i in enumerate(index, start=1)
    )


def monotone_indices(d: int, N: int) -> list[tuple[int, ...]]:
    """All weakly decreasing ``N``-tuples over ``1..d`` in reflected lexicographic order."""
    return [c[::-1] for c in itertools.combinations_with_replacement(range(1, d + 1), N)]


@functools.lru_cache(maxsize=64)
def _representative_positions(d: int, N: int) -> np.ndarray:
    # 0-based psi offsets of the monotone tuples, indexed by placement - 1
    pos = np.empty(count_monotone(d, N), dtype=np.int64)
    shape = (d,) * N
    for t in monotone_indices(d, N):
        pos[placement(t, d) - 1] = core.psi(t, shape) - 1
    pos.flags.writeable = False
    return pos


@functools.lru_cache(maxsize=64)
def duplication_columns(d: int, N: int) -> np.ndarray:
    """For each psi row of ``D_d^(N)`` the 0-based column holding its single 1."""
    total = d**N
    if total > MATRIX_BUDGET:
        raise ResourceError(f"duplication matrix rows for d={d}, N={N}", total, MATRIX_BUDGET)
    slot = {t: placement(t, d) - 1 for t in monotone_indices(d, N)}
    cols = np.empty(total, dtype=np.int64)
    for pos, idx in enumerate(core.multi_indices((d,) * N)):
        cols[pos] = slot[tuple(sorted(idx, reverse=True))]
    cols.flags.writeable = False
    return cols


def unit_u(index: Sequence[int], d: int) -> SparseTensor:
    """Unit vector of length ``C(d+N-1, N)`` with its 1 at ``placement(index)``."""
    index = check_monotone(index, d)
    length = count_monotone(d, len(index))
    return SparseTensor((length,), [[placement(index, d) - 1]], np.array([1]))


def hvec_1N(A: Hypermatrix, tol: float | None = None) -> np.ndarray:
    """Compressed vectorization of a symmetric cubical hypermatrix.

    Raises :class:`SymmetryError` (with a witness pair) if ``A`` is not
    symmetric within ``tol``.  Values are read from the representative slot,
    never averaged.
    """
    witness = core.symmetry_witness(A, tol)
    if witness is not None:
        raise SymmetryError(*witness)
    return hvec_1N_unchecked(A)


def hvec_1N_unchecked(A: Hypermatrix) -> np.ndarray:
    return A.data[_representative_positions(A.side, A.order)]


# ---------------------------------------------------------------------------
# unit hypermatrices and symmetrizers


def basis_E(index: Sequence[int], d: int, N: int | None = None) -> SparseTensor:
    """The hypermatrix ``e_{i_1} o ... o e_{i_N}`` in sparse form."""
    index = tuple(index)
    N = len(index) if N is None else N
    if len(index) != N:
        raise ShapeError(f"index {index} does not have order {N}")
    shape = (d,) * N
    core.psi(index, shape)
    return SparseTensor(shape, [[i - 1 for i in index]], np.array([1]))


def distinct_permutations(items: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Each distinct rearrangement of ``items`` once, in lexicographic order."""
    a = sorted(items)
    n = len(a)
    while True:
        yield tuple(a)
        k = n - 2
        while k >= 0 and a[k] >= a[k + 1]:
            k -= 1
        if k < 0:
            return
        j = n - 1
        while a[j] <= a[k]:
            j -= 1
        a[k], a[j] = a[j], a[k]
        a[k + 1:] = reversed(a[k + 1:])


def sym_T(index: Sequence[int], d: int) -> SparseTensor:
    """Sum of the unit hypermatrices at every distinct rearrangement of ``index``."""
    index = check_monotone(index, d)
    coords = [[i - 1 for i in p] for p in distinct_permutations(index)]
    return SparseTensor((d,) * len(index), coords, np.ones(len(coords), dtype=np.int64))


# ---------------------------------------------------------------------------
# elimination and duplication matrices


def elimination_matrix(d: int, N: int, budget: int = MATRIX_BUDGET) -> SparseTensor:
    """``L_d^(N)``: sends ``hvec(A)`` to ``hvec_1N(A)`` for symmetric ``A``."""
    rows, cols = count_monotone(d, N), d**N
    if rows > budget:
        raise ResourceError(f"elimination matrix {rows}x{cols}", rows, budget)
    shape = (d,) * N
    idx = [(placement(t, d) - 1, core.psi(t, shape) - 1) for t in monotone_indices(d, N)]
    return SparseTensor((rows, cols), idx, np.ones(rows, dtype=np.int64))


def duplication_matrix(d: int, N: int, budget: int = MATRIX_BUDGET) -> SparseTensor:
    """``D_d^(N)``: sends ``hvec_1N(A)`` to ``hvec(A)`` for symmetric ``A``."""
    rows, cols = d**N, count_monotone(d, N)
    if rows > budget:
        raise ResourceError(f"duplication matrix {rows}x{cols}", rows, budget)
    col = duplication_columns(d, N)
    idx = np.stack([np.arange(rows, dtype=np.int64), col], axis=1)
    return SparseTensor((rows, cols), idx, np.ones(rows, dtype=np.int64))


def dump_matrix(kind: str, d: int, N: int, M: SparseTensor) -> str:
    """Sparse triplet text: ``kind d N rows cols nnz`` then ``row col value`` lines.

    Coordinates are 1-based and sorted row-major.
    """
    if M.order != 2:
        raise ShapeError("only order-2 tensors can be dumped")
    lines = [f"{kind} {d} {N} {M.shape[0]} {M.shape[1]} {M.nnz}"]
    triples = sorted(
        (r + 1, c + 1, v) for (r, c), v in zip(M.indices.tolist(), M.values.tolist())
    )
    lines += [f"{r} {c} {v}" for r, c, v in triples]
    return "\n".join(lines) + "\n"


def parse_dump(text: str) -> tuple[str, int, int, SparseTensor]:
    head, *body = text.strip().splitlines()
    kind, d, N, rows, cols, nnz = head.split()
    if len(body) != int(nnz):
        raise ValueError(f"header announces {nnz} nonzeros, found {len(body)}")
    idx, vals = [], []
    for line in body:
        r, c, v = line.split()
        idx.append((int(r) - 1, int(c) - 1))
        vals.append(Fraction(v))
    vals = [int(v) if v.denominator == 1 else v for v in vals]
    M = SparseTensor((int(rows), int(cols)), np.array(idx, dtype=np.int64).reshape(-1, 2),
                     np.array(vals, dtype=object if any(isinstance(v, Fraction) for v in vals) else None))
    return kind, int(d), int(N), M
