"""The Levi-Civita symbol and its tensor Kronecker powers, in coordinate form."""

from __future__ import annotations

import functools
import itertools
import math

import numpy as np

from .errors import ResourceError
from .vectorize import SparseTensor

#: refuse to generate Kronecker powers with more nonzeros than this
NNZ_BUDGET = 10**8


def parity(perm) -> int:
    """Sign of a permutation of ``0..n-1`` (or ``1..n``) by cycle decomposition."""
    p = [int(x) for x in perm]
    base = min(p) if p else 0
    p = [x - base for x in p]
    seen = [False] * len(p)
    sign = 1
    for start in range(len(p)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@functools.lru_cache(maxsize=16)
def signed_permutations(d: int) -> tuple[np.ndarray, np.ndarray]:
    """All ``d!`` permutations (0-based rows) with their signs, in psi order."""
    if d < 1:
        raise ValueError(f"side must be >= 1, got {d}")
    perms = np.array(list(itertools.permutations(range(d))), dtype=np.int64)
    perms = perms[np.lexsort(perms.T)]
    signs = np.array([parity(p) for p in perms], dtype=np.int64)
    perms.flags.writeable = False
    signs.flags.writeable = False
    return perms, signs


def levi_civita(d: int) -> SparseTensor:
    """The order-``d``, side-``d`` totally antisymmetric symbol."""
    perms, signs = signed_permutations(d)
    return SparseTensor((d,) * d, perms, signs, check=False)


def epsilon_kron_power(d: int, N: int, budget: int = NNZ_BUDGET) -> SparseTensor:
    """``eps (x) eps (x) ... (x) eps`` with ``N`` factors.

    Nonzeros are generated directly as ``N``-tuples of base permutations: the
    coordinate on axis ``l`` is ``sum_k sigma_k(l) d^(N-k)`` (0-based) and the
    value is the product of the signs.  Output is sorted canonically.
    """
    if N < 1:
        raise ValueError(f"order must be >= 1, got {N}")
    nnz = math.factorial(d) ** N
    if nnz > budget:
        raise ResourceError(
            f"Kronecker power of the Levi-Civita symbol (d={d}, N={N}); "
            "use the symmetric path or the naive engine",
            nnz,
            budget,
        )
    perms, signs = signed_permutations(d)
    coords, vals = perms, signs
    for _ in range(N - 1):
        coords = (coords[:, None, :] * d + perms[None, :, :]).reshape(-1, d)
        vals = (vals[:, None] * signs[None, :]).reshape(-1)
    order = np.lexsort(coords.T)
    return SparseTensor((d**N,) * d, coords[order], vals[order], check=False)
