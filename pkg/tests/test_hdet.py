import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from conftest import cubical
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperdet import core, vectorize
from hyperdet.cache import ContractorStore
from hyperdet.core import Hypermatrix
from hyperdet.errors import BackendError, ResourceError, ShapeError, SymmetryError
from hyperdet.hdet import (
    ODD_ORDER,
    SYMMETRIC_FAST,
    build_contractor,
    complexity_ratio,
    evaluate,
    hdet,
    hdet_levicivita,
    hdet_naive,
    hdet_naive_full,
    hdet_symmetric,
)
from hyperdet.levicivita import epsilon_kron_power
from hyperdet.verify import gauss_det, random_hypermatrix, random_symmetric

M22 = Hypermatrix([[1, 2], [3, 4]])
GHZ4 = Hypermatrix.from_function((2,) * 4, lambda i: int(len(set(i)) == 1))


def brute_force(A):
    """Full definition straight from the sum over N-tuples of permutations."""
    d, N = A.side, A.order
    total = Fraction(0)
    for sigmas in itertools.product(itertools.permutations(range(1, d + 1)), repeat=N):
        sign = 1
        for s in sigmas:
            sign *= (-1) ** sum(a > b for a, b in itertools.combinations(s, 2))
        term = Fraction(1)
        for i in range(d):
            term *= A[tuple(s[i] for s in sigmas)]
        total += sign * term
    return total / math.factorial(d)


# -- naive --------------------------------------------------------------------


def test_naive_determinant():
    assert hdet_naive(M22) == -2


def test_naive_odd_order_is_zero():
    A = Hypermatrix.from_flat((2, 2, 2), [1, 5, -2, 3, 7, 1, 4, 9])
    assert hdet_naive(A) == 0
    assert brute_force(A) == 0


def test_naive_ghz_pattern():
    assert hdet_naive(GHZ4) == 1
    assert brute_force(GHZ4) == 1


@pytest.mark.parametrize("d, N", [(2, 2), (2, 4), (3, 2), (2, 3)])
def test_reduced_formula_matches_full_sum(d, N):
    rng = random.Random(d * 10 + N)
    for _ in range(5):
        A = random_hypermatrix(rng, d, N)
        assert hdet_naive(A) == hdet_naive_full(A) == brute_force(A)


def test_naive_needs_cubical():
    with pytest.raises(ShapeError):
        hdet_naive(Hypermatrix.from_flat((2, 3), range(6)))


# -- Levi-Civita --------------------------------------------------------------


def test_levicivita_examples():
    assert hdet_levicivita(M22) == -2
    assert hdet_levicivita(GHZ4) == 1
    assert hdet_levicivita(random_hypermatrix(random.Random(5), 2, 3)) == 0


@pytest.mark.parametrize("d", [1, 2, 3])
def test_levicivita_on_basis_matrices(d):
    for i in core.multi_indices((d, d)):
        E = core.basis_hypermatrix(i, (d, d))
        assert hdet_levicivita(E) == hdet_naive(E)


@pytest.mark.parametrize("d, N", [(2, 2), (2, 4), (3, 2), (2, 6), (3, 4)])
def test_levicivita_matches_naive(d, N):
    rng = random.Random(f"lc{d}{N}")
    for _ in range(5):
        A = random_hypermatrix(rng, d, N)
        assert hdet_levicivita(A) == hdet_naive(A)


def test_levicivita_budget_suggests_alternatives():
    with pytest.raises(ResourceError, match="symmetric path or the naive engine"):
        hdet_levicivita(random_hypermatrix(random.Random(0), 3, 4), budget=100)


def test_levicivita_rejects_mismatched_power():
    with pytest.raises(ShapeError):
        hdet_levicivita(M22, eps=epsilon_kron_power(2, 3))


# -- contractor ---------------------------------------------------------------


def test_contractor_2_2_gives_ac_minus_b_squared():
    E = build_contractor(2, 2)
    assert E.tensor.shape == (3, 3)
    for a, b, c in [(1, 2, 3), (4, -1, 5), (0, 7, 2)]:
        v = [a, b, c]
        assert core.multilinear_form(E.tensor, [v, v]) == a * c - b * b


@pytest.mark.parametrize("d, N", [(2, 3), (2, 5), (3, 3)])
def test_odd_order_contractor_is_antisymmetric(d, N):
    # an axis swap negates every Levi-Civita factor, so an odd count of them
    # makes the contractor alternate and its d-fold form vanish
    T = build_contractor(d, N).tensor
    for a, b in itertools.combinations(range(1, d + 1), 2):
        perm = list(range(1, d + 1))
        perm[a - 1], perm[b - 1] = b, a
        assert core.transpose(T, perm) == -T
    rng = random.Random(N)
    for _ in range(5):
        v = [rng.randint(-5, 5) for _ in range(T.shape[0])]
        assert core.multilinear_form(T, [v] * d) == 0


def test_contractor_2_4_on_ghz():
    E = build_contractor(2, 4)
    assert E.side == 5 and E.entries == 25
    assert core.multilinear_form(E.tensor, [[1, 0, 0, 0, 1]] * 2) == 1


@pytest.mark.parametrize("d, N", [(2, 2), (2, 3), (3, 2)])
def test_contractor_matches_dense_definition(d, N):
    eps = epsilon_kron_power(d, N).densify()
    D = vectorize.duplication_matrix(d, N).densify()
    dense = core.multilinear_multiply(eps, [D] * d) * Fraction(1, math.factorial(d))
    assert build_contractor(d, N).tensor == dense


@pytest.mark.parametrize("d, N", [(2, 2), (2, 4), (2, 5), (3, 2), (3, 3), (3, 4), (4, 2)])
def test_contractor_build_methods_agree(d, N):
    assert build_contractor(d, N, method="multiset") == build_contractor(d, N, method="scatter")


@pytest.mark.parametrize("d, N", [(2, 2), (2, 4), (3, 2)])
def test_contractor_is_symmetric(d, N):
    assert core.is_symmetric(build_contractor(d, N).tensor)


def test_contractor_budget_names_size():
    with pytest.raises(ResourceError) as info:
        build_contractor(3, 20, budget=10**6)
    assert info.value.required == 231**3
    assert "231^3" in str(info.value)


def test_contractor_float_backend():
    exact, approx = build_contractor(3, 4), build_contractor(3, 4, "float64")
    assert np.allclose(approx.tensor.array, exact.tensor.astype("float64").array, rtol=0, atol=0)
    with pytest.raises(BackendError):
        build_contractor(2, 2, "complex128")


# -- symmetric path -----------------------------------------------------------


def test_symmetric_examples():
    assert hdet_symmetric(Hypermatrix([[2, 3], [3, 7]]), build_contractor(2, 2)) == 14 - 9
    assert hdet_symmetric(GHZ4, build_contractor(2, 4)) == 1


@pytest.mark.parametrize("d, N", [(2, 2), (2, 4), (2, 6), (2, 8), (3, 2), (3, 4)])
def test_symmetric_matches_naive(d, N):
    rng = random.Random(f"sym{d}{N}")
    E = build_contractor(d, N)
    for _ in range(5):
        A = random_symmetric(rng, d, N)
        assert hdet_symmetric(A, E) == hdet_naive(A)


def test_symmetric_rejects_asymmetric_input():
    with pytest.raises(SymmetryError):
        hdet_symmetric(M22, build_contractor(2, 2))


def test_symmetric_rejects_wrong_contractor():
    with pytest.raises(ValueError):
        hdet_symmetric(GHZ4, build_contractor(2, 2))
    with pytest.raises(BackendError):
        hdet_symmetric(GHZ4, build_contractor(2, 4, "float64"))


def test_symmetric_complex_input():
    rng = np.random.default_rng(0)
    A = random_symmetric(random.Random(1), 2, 4).astype("complex128") * complex(rng.normal(), rng.normal())
    expected = hdet_naive(A)
    got = hdet_symmetric(A, build_contractor(2, 4, "float64"))
    assert abs(got - expected) <= 1e-10 * abs(expected)


# -- dispatcher ---------------------------------------------------------------


def test_auto_odd_order(store):
    res = evaluate(Hypermatrix.from_flat((2, 2, 2), range(8)), store=store)
    assert res.value == 0 and res.engine == ODD_ORDER


def test_auto_symmetric(store):
    assert evaluate(GHZ4, store=store).engine == SYMMETRIC_FAST


def test_auto_general(store):
    A = random_hypermatrix(random.Random(2), 2, 4)
    assert not core.is_symmetric(A)
    assert evaluate(A, store=store).engine == "levicivita"


def test_auto_falls_back_to_naive_when_over_budget():
    res = evaluate(random_hypermatrix(random.Random(2), 2, 4), store=ContractorStore(),
                   levicivita_budget=4)
    assert res.engine == "naive"
    res = evaluate(GHZ4, store=ContractorStore(), contractor_budget=3, levicivita_budget=4)
    assert res.engine == "naive" and res.value == 1


def test_explicit_engines_agree(store):
    A = random_symmetric(random.Random(8), 3, 4)
    values = {e: hdet(A, e, store) for e in ("naive", "levicivita", "symmetric", "auto")}
    assert len(set(values.values())) == 1


def test_explicit_symmetric_on_asymmetric_input(store):
    with pytest.raises(SymmetryError):
        evaluate(M22, "symmetric", store)


def test_unknown_engine(store):
    with pytest.raises(ValueError):
        evaluate(M22, "fast", store)


def test_float_engines_agree_within_tolerance(store):
    rng = random.Random(11)
    for d, N in [(2, 4), (3, 4), (2, 8)]:
        A = random_symmetric(rng, d, N)
        exact = float(hdet_naive(A))
        F = A.astype("float64")
        for engine in ("naive", "levicivita", "symmetric"):
            assert abs(hdet(F, engine, store) - exact) <= 1e-10 * max(abs(exact), 1)


def test_float_results_are_repeatable(store):
    A = random_symmetric(random.Random(4), 2, 8).astype("float64") * 0.1
    for engine in ("naive", "levicivita", "symmetric"):
        first = hdet(A, engine, store)
        assert all(hdet(A, engine, store) == first for _ in range(5))


def test_order_two_is_determinant(store):
    rng = random.Random(12)
    for _ in range(20):
        d = rng.randint(1, 4)
        A = Hypermatrix.from_flat((d, d), [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(d * d)])
        assert hdet(A, store=store) == gauss_det(A)


# -- algebraic properties -----------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(cubical(), st.fractions(min_value=-3, max_value=3, max_denominator=4))
def test_homogeneity(A, c):
    assert hdet_levicivita(A * c) == c**A.side * hdet_naive(A)


@settings(max_examples=40, deadline=None)
@given(cubical(), st.data())
def test_transpose_invariance(A, data):
    perm = data.draw(st.permutations(range(1, A.order + 1)))
    assert hdet_levicivita(core.transpose(A, perm)) == hdet_naive(A)


@settings(max_examples=40, deadline=None)
@given(cubical(sides=(2, 3), orders=(3, 5)))
def test_odd_order_vanishes(A):
    assert hdet_naive(A) == hdet_levicivita(A) == 0


# -- cost ratio ---------------------------------------------------------------


def test_complexity_ratio_values():
    assert complexity_ratio(2, 3) == 0.0
    assert complexity_ratio(2, 2) == pytest.approx(math.log(2))
    assert complexity_ratio(3, 2) > 0
    for N in range(2, 11):
        assert complexity_ratio(2, N) == pytest.approx((3 - N) * math.log(2))


def test_complexity_ratio_positive_for_larger_sides():
    assert all(complexity_ratio(d, N) > 0 for d in range(3, 7) for N in range(2, 11))


def test_complexity_ratio_domain():
    with pytest.raises(ValueError):
        complexity_ratio(1, 4)
