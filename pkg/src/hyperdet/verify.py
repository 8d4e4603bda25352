"""Seeded cross-engine property suite behind ``hyperdet verify``."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import core, vectorize
from .cache import ContractorStore
from .core import Hypermatrix
from .documents import tensor_document
from .hdet import evaluate, hdet, hdet_naive

DEFAULT_SIZES = ((2, 2), (2, 4), (3, 2), (2, 6))
ODD_SIZES = ((2, 3), (3, 3), (2, 5))
MATRIX_SIZES = ((2, 2), (2, 3), (2, 4), (3, 2), (3, 3))


def random_hypermatrix(rng: random.Random, d: int, N: int, lo: int = -5, hi: int = 5) -> Hypermatrix:
    return Hypermatrix.from_flat((d,) * N, [rng.randint(lo, hi) for _ in range(d**N)])


def random_symmetric(rng: random.Random, d: int, N: int, lo: int = -5, hi: int = 5) -> Hypermatrix:
    reps = {t: rng.randint(lo, hi) for t in vectorize.monotone_indices(d, N)}
    return Hypermatrix.from_function((d,) * N, lambda i: reps[tuple(sorted(i, reverse=True))])


def random_rational_matrix(rng: random.Random, d: int) -> Hypermatrix:
    return Hypermatrix.from_flat(
        (d, d), [Fraction(rng.randint(-9, 9), rng.randint(1, 6)) for _ in range(d * d)]
    )


def gauss_det(A: Hypermatrix) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    n = A.shape[0]
    m = [[A.entry((i, j)) for j in range(1, n + 1)] for i in range(1, n + 1)]
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            for k in range(c, n):
                m[r][k] -= f * m[c][k]
    return det


@dataclass
class CheckResult:
    name: str
    passed: bool
    cases: int = 0
    detail: str = ""
    counterexample: dict | None = field(default=None)


class _Failure(Exception):
    def __init__(self, detail, A=None):
        super().__init__(detail)
        self.detail = detail
        self.A = A


def default_engines(store: ContractorStore) -> dict[str, Callable]:
    return {
        "naive": hdet_naive,
        "levicivita": lambda A: evaluate(A, "levicivita", store).value,
        "symmetric": lambda A: evaluate(A, "symmetric", store).value,
    }


def run_suite(
    seed: int = 0,
    sizes=DEFAULT_SIZES,
    trials: int = 10,
    engines: dict[str, Callable] | None = None,
    store: ContractorStore | None = None,
) -> list[CheckResult]:
    """Run every property with a private RNG per check; deterministic in ``seed``."""
    store = store or ContractorStore()
    eng = default_engines(store)
    eng.update(engines or {})
    naive, levi, sym = eng["naive"], eng["levicivita"], eng["symmetric"]

    def agree(name_a, fa, name_b, fb, A):
        a, b = fa(A), fb(A)
        if a != b:
            raise _Failure(f"{name_a} = {a} but {name_b} = {b}", A)

    def check_levicivita(rng):
        n = 0
        for d, N in sizes:
            for _ in range(trials):
                agree("levicivita", levi, "naive", naive, random_hypermatrix(rng, d, N))
                n += 1
        return n

    def check_symmetric(rng):
        n = 0
        for d, N in sizes:
            for _ in range(trials):
                agree("symmetric", sym, "naive", naive, random_symmetric(rng, d, N))
                n += 1
        return n

    def check_odd(rng):
        n = 0
        for d, N in ODD_SIZES:
            for _ in range(trials):
                A = random_symmetric(rng, d, N)
                for name, f in (("naive", naive), ("levicivita", levi), ("symmetric", sym)):
                    if f(A) != 0:
                        raise _Failure(f"{name} gave {f(A)} on odd order {N}", A)
                n += 1
        return n

    def check_determinant(rng):
        for _ in range(trials):
            A = random_rational_matrix(rng, rng.randint(1, 4))
            agree("hdet", lambda X: hdet(X, store=store), "det", gauss_det, A)
        return trials

    def check_homogeneity(rng):
        n = 0
        for d, N in sizes:
            for _ in range(trials):
                A = random_hypermatrix(rng, d, N)
                c = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
                lhs, rhs = levi(A * c), c**d * naive(A)
                if lhs != rhs:
                    raise _Failure(f"hdet(cA) = {lhs} but c^d hdet(A) = {rhs} for c = {c}", A)
                n += 1
        return n

    def check_transpose(rng):
        n = 0
        for d, N in sizes:
            for _ in range(trials):
                A = random_hypermatrix(rng, d, N)
                perm = list(range(1, N + 1))
                rng.shuffle(perm)
                lhs, rhs = levi(core.transpose(A, perm)), naive(A)
                if lhs != rhs:
                    raise _Failure(f"hdet(A^pi) = {lhs} != hdet(A) = {rhs} for pi = {perm}", A)
                n += 1
        return n

    def check_matrices(rng):
        n = 0
        for d, N in MATRIX_SIZES:
            L, D = vectorize.elimination_matrix(d, N), vectorize.duplication_matrix(d, N)
            m = vectorize.count_monotone(d, N)
            eye = vectorize.SparseTensor((m, m), [(i, i) for i in range(m)], np.ones(m, dtype=np.int64))
            if L @ D != eye:
                raise _Failure(f"L D != I for d={d}, N={N}")
            for _ in range(trials):
                A = random_symmetric(rng, d, N)
                h, h1 = vectorize.hvec(A), vectorize.hvec_1N(A)
                if not np.array_equal(L.matvec(h), h1):
                    raise _Failure(f"L hvec(A) != hvec_1N(A) for d={d}, N={N}", A)
                if not np.array_equal(D.matvec(h1), h):
                    raise _Failure(f"D hvec_1N(A) != hvec(A) for d={d}, N={N}", A)
                n += 1
        return n

    def check_fact3(rng):
        n = 0
        for d in range(1, 5):
            for N in range(1, 5):
                total = np.zeros((d,) * N, dtype=np.int64)
                for t in vectorize.monotone_indices(d, N):
                    T = vectorize.sym_T(t, d)
                    total[tuple(T.indices.T)] += T.values
                if not (total == 1).all():
                    raise _Failure(f"sum of symmetrizers is not all-ones for d={d}, N={N}")
                n += 1
        return n

    checks = [
        ("levicivita matches naive", check_levicivita),
        ("symmetric matches naive", check_symmetric),
        ("odd order vanishes", check_odd),
        ("order 2 equals determinant", check_determinant),
        ("degree-d homogeneity", check_homogeneity),
        ("transpose invariance", check_transpose),
        ("elimination/duplication identities", check_matrices),
        ("symmetrizers partition the index set", check_fact3),
    ]
    results = []
    for k, (name, fn) in enumerate(checks):
        rng = random.Random(f"{seed}:{k}")
        try:
            results.append(CheckResult(name, True, fn(rng)))
        except _Failure as exc:
            doc = tensor_document(exc.A) if exc.A is not None else None
            results.append(CheckResult(name, False, detail=exc.detail, counterexample=doc))
    return results
