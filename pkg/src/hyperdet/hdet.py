"""Cayley's first hyperdeterminant: three engines and a dispatcher.

``hdet_naive``
    direct signed sum over permutation tuples (the reference oracle);
``hdet_levicivita``
    contraction of ``d`` copies of ``hvec(A)`` against the sparse
    Kronecker power of the Levi-Civita symbol, normalized by ``1/d!``;
``hdet_symmetric``
    for symmetric input only: contraction of ``d`` copies of the compressed
    vector ``hvec_1N(A)`` against a precomputed :class:`Contractor`, at a
    cost polynomial in the order for fixed side.

All engines are exact on the rational backend.  Floating-point sums run in
a fixed canonical order so repeated runs are bit-identical.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import core, vectorize
from .core import Hypermatrix
from .errors import BackendError, ResourceError, ShapeError, SymmetryError
from .levicivita import NNZ_BUDGET, epsilon_kron_power, signed_permutations

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
#: refuse to build dense contractors with more entries than this
CONTRACTOR_BUDGET = 10**8
#: relative tolerance when comparing float results across engines
CROSS_ENGINE_RTOL = 1e-10

ENGINES = ("auto", "naive", "levicivita", "symmetric")
ODD_ORDER = "odd-order short-circuit"
SYMMETRIC_FAST = "symmetric-fast"


def _require_cubical(A: Hypermatrix) -> tuple[int, int]:
    if not A.is_cubical:
        raise ShapeError(f"hyperdeterminant needs a cubical hypermatrix, got shape {A.shape}")
    return A.side, A.order


def _inversion_sign(perm) -> int:
    inversions = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
    return -1 if inversions % 2 else 1


def _finish(total, backend: str, divisor: int = 1):
    if backend == core.RATIONAL:
        return Fraction(total) / divisor
    if backend == core.FLOAT64:
        return float(total) / divisor
    return complex(total) / divisor


# ---------------------------------------------------------------------------
# naive permutation expansion


def hdet_naive(A: Hypermatrix):
    """Reference value by permutation expansion.

    Odd orders return zero immediately.  For even orders the first
    permutation is fixed to the identity, which removes the ``1/d!`` factor
    and leaves ``(d!)^(N-1)`` terms.
    """
    d, N = _require_cubical(A)
    if N % 2:
        return core.zero(A.backend)
    data = A.data.tolist()
    perms = list(itertools.permutations(range(d)))
    signs = [_inversion_sign(p) for p in perms]
    # flat offset contributed by axis k when its index is p[i]
    offsets = [[[p[i] * d**k for i in range(d)] for p in perms] for k in range(N)]
    total = 0
    for choice in itertools.product(range(len(perms)), repeat=N - 1):
        sign = 1
        for c in choice:
            sign *= signs[c]
        term = 1
        for i in range(d):
            pos = i
            for k, c in enumerate(choice, start=1):
                pos += offsets[k][c][i]
            term = term * data[pos]
        total = total + sign * term
    return _finish(total, A.backend)


def hdet_naive_full(A: Hypermatrix):
    """The unreduced definition: all ``(d!)^N`` tuples, divided by ``d!``."""
    d, N = _require_cubical(A)
    data = A.data.tolist()
    perms = list(itertools.permutations(range(d)))
    total = 0
    for sigmas in itertools.product(perms, repeat=N):
        sign = 1
        for s in sigmas:
            sign *= _inversion_sign(s)
        term = 1
        for i in range(d):
            term = term * data[sum(s[i] * d**k for k, s in enumerate(sigmas))]
        total = total + sign * term
    return _finish(total, A.backend, math.factorial(d))


# ---------------------------------------------------------------------------
# Levi-Civita contraction


def hdet_levicivita(A: Hypermatrix, eps=None, budget: int = NNZ_BUDGET):
    """``(1/d!) (eps (x) ... (x) eps) * (hvec A, ..., hvec A)`` over sparse nonzeros.

    ``eps`` may be a precomputed :func:`~hyperdet.levicivita.epsilon_kron_power`.
    """
    d, N = _require_cubical(A)
    if eps is None:
        eps = epsilon_kron_power(d, N, budget=budget)
    elif eps.shape != (d**N,) * d:
        raise ShapeError(f"Kronecker power of shape {eps.shape} does not match d={d}, N={N}")
    h = A.data
    factors = h[eps.indices]  # (nnz, d)
    terms = np.prod(factors, axis=1) * eps.values
    total = terms.sum() if len(terms) else 0
    return _finish(total, A.backend, math.factorial(d))


# ---------------------------------------------------------------------------
# symmetric fast path


@dataclass(frozen=True, eq=False)
class Contractor:
    """Precomputed order-``d`` tensor of side ``C(d+N-1, N)`` for the symmetric path."""

    d: int
    N: int
    tensor: Hypermatrix
    backend: str
    version: int = FORMAT_VERSION

    def __post_init__(self):
        side = vectorize.count_monotone(self.d, self.N)
        if self.tensor.shape != (side,) * self.d:
            raise ShapeError(
                f"contractor tensor has shape {self.tensor.shape}, expected {(side,) * self.d}"
            )
        if self.backend != self.tensor.backend:
            raise BackendError("contractor backend tag disagrees with its tensor")

    @property
    def side(self) -> int:
        return self.tensor.shape[0]

    @property
    def entries(self) -> int:
        return self.tensor.size

    def __eq__(self, other):
        if not isinstance(other, Contractor):
            return NotImplemented
        return (self.d, self.N, self.backend, self.version) == (
            other.d, other.N, other.backend, other.version
        ) and self.tensor == other.tensor


def contractor_entries(d: int, N: int) -> int:
    return vectorize.count_monotone(d, N) ** d


def check_contractor_budget(d: int, N: int, budget: int = CONTRACTOR_BUDGET) -> int:
    side = vectorize.count_monotone(d, N)
    entries = side**d
    if entries > budget:
        raise ResourceError(
            f"contractor for d={d}, N={N} has C({d + N - 1},{N})^{d} = {side}^{d} = {entries} entries",
            entries,
            budget,
        )
    return entries


def _count_dtype(d: int, N: int):
    return np.int64 if math.factorial(d) ** N < 2**62 else object


def _multiset_successors(d: int, k: int) -> np.ndarray:
    """``table[p, v]``: 0-based slot of (tuple at slot p of length k-1) + value v+1."""
    if k == 1:
        return np.arange(d, dtype=np.int64).reshape(1, d)
    prev = vectorize.monotone_indices(d, k - 1)
    table = np.empty((len(prev), d), dtype=np.int64)
    for t in prev:
        p = vectorize.placement(t, d) - 1
        for v in range(1, d + 1):
            table[p, v - 1] = vectorize.placement(tuple(sorted(t + (v,), reverse=True)), d) - 1
    return table


def _signed_counts_multiset(d: int, N: int) -> np.ndarray:
    # Each nonzero of the Kronecker power assigns to axis l the multiset
    # {sigma_1(l), ..., sigma_N(l)}; D only sees that multiset, so factors
    # can be absorbed one at a time keeping only multiset slots.
    perms, signs = signed_permutations(d)
    dtype = _count_dtype(d, N)
    counts = np.ones((1,) * d, dtype=dtype)
    for k in range(1, N + 1):
        table = _multiset_successors(d, k)
        side = vectorize.count_monotone(d, k)
        nxt = np.zeros((side,) * d, dtype=dtype)
        for perm, sign in zip(perms.tolist(), signs.tolist()):
            target = np.ix_(*(table[:, perm[l]] for l in range(d)))
            nxt[target] += sign * counts
        counts = nxt
    return counts


def _signed_counts_scatter(d: int, N: int, budget: int) -> np.ndarray:
    eps = epsilon_kron_power(d, N, budget=budget)
    cols = vectorize.duplication_columns(d, N)
    side = vectorize.count_monotone(d, N)
    counts = np.zeros((side,) * d, dtype=_count_dtype(d, N))
    np.add.at(counts, tuple(cols[eps.indices].T), eps.values.astype(counts.dtype))
    return counts


def build_contractor(
    d: int,
    N: int,
    backend: str = core.RATIONAL,
    budget: int = CONTRACTOR_BUDGET,
    method: str = "multiset",
    eps_budget: int = NNZ_BUDGET,
) -> Contractor:
    """Precompute ``(1/d!) (eps (x) ... (x) eps) * (D, ..., D)``.

    Every nonzero of the Kronecker power contributes ``+-1/d!`` to exactly one
    cell, namely the tuple of duplication-matrix columns of its coordinates.
    ``method="scatter"`` walks all ``(d!)^N`` nonzeros explicitly;
    ``method="multiset"`` (default) accumulates the same signed counts one
    factor at a time over multiset slots, in ``O(N d! C(d+N-1,N)^d)``.
    """
    if backend not in (core.RATIONAL, core.FLOAT64):
        raise BackendError(f"contractors are stored as rational or float64, not {backend}")
    entries = check_contractor_budget(d, N, budget)
    log.info("building contractor d=%d N=%d: %d dense entries", d, N, entries)
    if method == "multiset":
        counts = _signed_counts_multiset(d, N)
    elif method == "scatter":
        counts = _signed_counts_scatter(d, N, eps_budget)
    else:
        raise ValueError(f"unknown build method {method!r}")
    fact = math.factorial(d)
    if backend == core.RATIONAL:
        tensor = np.empty(counts.shape, dtype=object)
        for idx, c in np.ndenumerate(counts):
            tensor[idx] = Fraction(int(c), fact)
    else:
        tensor = counts.astype(np.float64) / float(fact)
    return Contractor(d, N, Hypermatrix._wrap(tensor, backend), backend)


def _contract(tensor: np.ndarray, v: np.ndarray):
    out = tensor
    for _ in range(tensor.ndim):
        out = out @ v
    return out


def hdet_symmetric(A: Hypermatrix, E: Contractor, tol: float | None = None, check: bool = True):
    """``E * (hvec_1N A, ..., hvec_1N A)`` for symmetric ``A``."""
    d, N = _require_cubical(A)
    if (E.d, E.N) != (d, N):
        raise ValueError(f"contractor is for d={E.d}, N={E.N}; input has d={d}, N={N}")
    allowed = {core.RATIONAL: core.RATIONAL, core.FLOAT64: core.FLOAT64,
               core.COMPLEX128: core.FLOAT64}
    if allowed[A.backend] != E.backend:
        raise BackendError(f"{E.backend} contractor cannot evaluate {A.backend} input")
    if check:
        witness = core.symmetry_witness(A, tol)
        if witness is not None:
            raise SymmetryError(*witness)
    v = vectorize.hvec_1N_unchecked(A)
    return _finish(_contract(E.tensor.array, v), A.backend)


# ---------------------------------------------------------------------------
# dispatcher


@dataclass(frozen=True)
class HdetResult:
    value: object
    engine: str


def contractor_backend(backend: str) -> str:
    return core.RATIONAL if backend == core.RATIONAL else core.FLOAT64


def evaluate(
    A: Hypermatrix,
    engine: str = "auto",
    store=None,
    tol: float | None = None,
    levicivita_budget: int = NNZ_BUDGET,
    contractor_budget: int = CONTRACTOR_BUDGET,
) -> HdetResult:
    """Compute ``hdet(A)`` with the requested engine and report which one ran.

    ``store`` supplies contractors through ``store.contractor(d, N, backend)``
    (see :class:`hyperdet.cache.ContractorStore`); without one a shared
    in-memory store is used.  The ``auto`` policy: odd order gives zero at
    once; symmetric input takes the fast path when its contractor fits the
    budget; otherwise the Levi-Civita engine if its nonzeros fit; otherwise
    the naive engine.
    """
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; choose from {ENGINES}")
    d, N = _require_cubical(A)
    if store is None:
        from .cache import default_store

        store = default_store()

    if engine == "naive":
        return HdetResult(hdet_naive(A), "naive")
    if engine == "levicivita":
        eps = store.epsilon_power(d, N, budget=levicivita_budget)
        return HdetResult(hdet_levicivita(A, eps=eps), "levicivita")
    if engine == "symmetric":
        witness = core.symmetry_witness(A, tol)
        if witness is not None:
            raise SymmetryError(*witness)
        E = store.contractor(d, N, contractor_backend(A.backend), budget=contractor_budget)
        return HdetResult(hdet_symmetric(A, E, check=False), SYMMETRIC_FAST)

    if N % 2:
        return HdetResult(core.zero(A.backend), ODD_ORDER)
    if contractor_entries(d, N) <= contractor_budget and core.is_symmetric(A, tol):
        E = store.contractor(d, N, contractor_backend(A.backend), budget=contractor_budget)
        return HdetResult(hdet_symmetric(A, E, check=False), SYMMETRIC_FAST)
    if math.factorial(d) ** N <= levicivita_budget:
        eps = store.epsilon_power(d, N, budget=levicivita_budget)
        return HdetResult(hdet_levicivita(A, eps=eps), "levicivita")
    return HdetResult(hdet_naive(A), "naive")


def hdet(A: Hypermatrix, engine: str = "auto", store=None, **kwargs):
    """Value of Cayley's first hyperdeterminant; see :func:`evaluate`."""
    return evaluate(A, engine, store, **kwargs).value


def complexity_ratio(d: int, N: int) -> float:
    """Log of the cost ratio between the precomputed Levi-Civita pipeline,
    ``d^(Nd)``, and the ``2^(d(N-1)) d^(N-1)`` prior method.

    Positive means the Levi-Civita pipeline is asymptotically slower.
    """
    if d < 2 or N < 2:
        raise ValueError(f"need d, N >= 2, got d={d}, N={N}")
    return ((N * d - (N - 1)) * math.log2(d) - (N * d - d)) * math.log(2)
