import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperdet import core, vectorize
from hyperdet.core import Hypermatrix
from hyperdet.errors import IndexOutOfRange, ResourceError, SymmetryError
from hyperdet.vectorize import SparseTensor
from hyperdet.verify import random_symmetric


def eye(n):
    return SparseTensor((n, n), [(i, i) for i in range(n)], np.ones(n, dtype=np.int64))


# -- hvec ---------------------------------------------------------------------


def test_hvec_of_matrix_lists_columns():
    A = Hypermatrix([[1, 2], [3, 4]])
    assert list(vectorize.hvec(A)) == [1, 3, 2, 4]


def test_hvec_of_basis_hypermatrix_is_unit_vector():
    for i in core.multi_indices((2, 3, 2)):
        h = vectorize.hvec(core.basis_hypermatrix(i, (2, 3, 2)))
        assert list(np.flatnonzero(h)) == [core.psi(i, (2, 3, 2)) - 1]


def test_hvec_of_zero():
    assert not vectorize.hvec(Hypermatrix.zeros((2, 2, 2))).any()


def test_hvec_of_sparse_basis():
    h = vectorize.hvec(vectorize.basis_E((3, 2, 1), 3))
    assert h.to_dict() == {(6,): 1}


def test_fact1_reversed_kronecker_of_units():
    rng = random.Random(1)
    shape = (3, 2, 4)
    for _ in range(10):
        i = tuple(rng.randint(1, n) for n in shape)
        vecs = [Hypermatrix.from_flat((n,), [int(k == ik) for k in range(1, n + 1)])
                for ik, n in zip(i, shape)]
        prod = vecs[-1]
        for v in reversed(vecs[:-1]):
            prod = core.kron(prod, v)
        assert list(np.flatnonzero(prod.data)) == [core.psi(i, shape) - 1]


# -- counting and placement ---------------------------------------------------


@pytest.mark.parametrize("d, N, expected", [(3, 3, 10), (5, 1, 5), (2, 4, 5), (3, 20, 231)])
def test_count_monotone(d, N, expected):
    assert vectorize.count_monotone(d, N) == expected


def test_count_monotone_is_exact_for_large_arguments():
    assert vectorize.count_monotone(40, 60) == math.comb(99, 60)


def test_count_monotone_with_lower_bound():
    for d in range(1, 5):
        for N in range(1, 5):
            for k in range(1, d + 1):
                brute = sum(1 for t in vectorize.monotone_indices(d, N) if min(t) >= k)
                assert vectorize.count_monotone(d, N, lower=k) == brute


@pytest.mark.parametrize("index, d, expected", [((1, 1, 1), 3, 1), ((2, 2, 1), 3, 4), ((3, 3, 3), 3, 10)])
def test_placement_examples(index, d, expected):
    assert vectorize.placement(index, d) == expected


@settings(max_examples=25)
@given(st.integers(1, 5), st.integers(1, 5))
def test_placement_enumerates_in_order(d, N):
    tuples = vectorize.monotone_indices(d, N)
    assert [vectorize.placement(t, d) for t in tuples] == list(range(1, len(tuples) + 1))
    flat = [core.psi(t, (d,) * N) for t in tuples]
    assert flat == sorted(flat)


def test_placement_rejects_increasing_tuple():
    with pytest.raises(ValueError):
        vectorize.placement((1, 2), 3)
    with pytest.raises(IndexOutOfRange):
        vectorize.placement((4, 1), 3)


def test_unit_u():
    assert vectorize.unit_u((1, 1, 1), 3).to_dict() == {(1,): 1}
    assert vectorize.unit_u((2, 2), 3).to_dict() == {(4,): 1}
    # i_1 + d(i_2 - 1) - i_2(i_2 - 1)/2 for N = 2
    for i1 in range(1, 5):
        for i2 in range(1, i1 + 1):
            assert vectorize.placement((i1, i2), 4) == i1 + 4 * (i2 - 1) - i2 * (i2 - 1) // 2
    assert vectorize.unit_u((3, 3, 3, 3), 3).to_dict() == {(15,): 1}


# -- hvec_1N ------------------------------------------------------------------


def order3_example():
    labels = ["111", "211", "311", "221", "321", "331", "222", "322", "332", "333"]
    free = {tuple(int(c) for c in s): k for k, s in enumerate(labels, start=1)}
    return Hypermatrix.from_function((3, 3, 3), lambda i: free[tuple(sorted(i, reverse=True))])


def test_hvec_1N_order3_listing():
    assert list(vectorize.hvec_1N(order3_example())) == list(range(1, 11))


def test_hvec_1N_is_vech():
    assert list(vectorize.hvec_1N(Hypermatrix([[5, 7], [7, 9]]))) == [5, 7, 9]


def test_hvec_1N_of_delta_tensor():
    delta = Hypermatrix.from_function((2,) * 4, lambda i: int(len(set(i)) == 1))
    assert list(vectorize.hvec_1N(delta)) == [1, 0, 0, 0, 1]


def test_hvec_1N_reports_witness():
    A = Hypermatrix([[1, 2], [3, 4]])
    with pytest.raises(SymmetryError) as info:
        vectorize.hvec_1N(A)
    err = info.value
    assert {err.index, err.other} == {(1, 2), (2, 1)}
    assert abs(err.difference) == 1


def test_hvec_1N_equals_sum_of_units():
    rng = random.Random(3)
    for d, N in [(2, 3), (3, 3), (3, 2), (2, 5)]:
        A = random_symmetric(rng, d, N)
        acc = np.zeros(vectorize.count_monotone(d, N), dtype=object)
        for t in vectorize.monotone_indices(d, N):
            acc = acc + A[t] * vectorize.unit_u(t, d).densify().data
        assert list(acc) == list(vectorize.hvec_1N(A))


@pytest.mark.parametrize("d, N", [(1, 3), (2, 2), (3, 4), (4, 4), (2, 7)])
def test_hvec_1N_length(d, N):
    A = random_symmetric(random.Random(0), d, N)
    assert len(vectorize.hvec_1N(A)) == math.comb(d + N - 1, N)


# -- E and T ------------------------------------------------------------------


def test_basis_E():
    assert vectorize.basis_E((1, 1), 2).to_dict() == {(1, 1): 1}
    with pytest.raises(IndexOutOfRange):
        vectorize.basis_E((0, 1), 2)


@pytest.mark.parametrize("index, count", [((1, 1, 1), 1), ((3, 2, 1), 6), ((2, 1, 1), 3), ((2, 2, 1, 1), 6)])
def test_sym_T_counts(index, count):
    assert vectorize.sym_T(index, 3).nnz == count


def test_sym_T_members():
    assert set(vectorize.sym_T((2, 1, 1), 3).to_dict()) == {(2, 1, 1), (1, 2, 1), (1, 1, 2)}
    assert set(vectorize.sym_T((3, 2, 1), 3).to_dict()) == {
        (3, 2, 1), (2, 1, 3), (1, 3, 2), (2, 3, 1), (1, 2, 3), (3, 1, 2)
    }


def test_distinct_permutations_are_distinct():
    perms = list(vectorize.distinct_permutations([1, 1, 2, 3]))
    assert len(perms) == len(set(perms)) == 12


@pytest.mark.parametrize("d, N", [(d, N) for d in range(1, 5) for N in range(1, 5)])
def test_symmetrizers_sum_to_all_ones(d, N):
    total = np.zeros((d,) * N, dtype=np.int64)
    for t in vectorize.monotone_indices(d, N):
        T = vectorize.sym_T(t, d)
        total[tuple(T.indices.T)] += T.values
    assert (total == 1).all()


# -- L and D ------------------------------------------------------------------


def test_elimination_matrix_2x2():
    L = vectorize.elimination_matrix(2, 2)
    assert L.shape == (3, 4)
    assert L.to_dict() == {(1, 1): 1, (2, 2): 1, (3, 4): 1}


def test_duplication_matrix_2x2():
    D = vectorize.duplication_matrix(2, 2)
    assert D.shape == (4, 3)
    assert D.to_dict() == {(1, 1): 1, (2, 2): 1, (3, 2): 1, (4, 3): 1}


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_order_one_matrices_are_identity(d):
    assert vectorize.elimination_matrix(d, 1) == eye(d)
    assert vectorize.duplication_matrix(d, 1) == eye(d)


@pytest.mark.parametrize("d, N", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (4, 3)])
def test_elimination_duplication_structure(d, N):
    L, D = vectorize.elimination_matrix(d, N), vectorize.duplication_matrix(d, N)
    m = math.comb(d + N - 1, N)
    assert L.nnz == m and D.nnz == d**N
    assert set(L.values.tolist()) == set(D.values.tolist()) == {1}
    assert sorted(L.indices[:, 0].tolist()) == list(range(m))
    assert sorted(D.indices[:, 0].tolist()) == list(range(d**N))
    assert L @ D == eye(m)


def test_duplication_matches_symmetrizer_definition():
    d, N = 3, 3
    D = vectorize.duplication_matrix(d, N)
    expected = {}
    for t in vectorize.monotone_indices(d, N):
        col = vectorize.placement(t, d)
        for (row,), _ in vectorize.hvec(vectorize.sym_T(t, d)).entries():
            expected[(row, col)] = 1
    assert D.to_dict() == expected


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([(2, 2), (2, 3), (2, 4), (3, 2), (3, 3)]), st.integers(0, 10**6))
def test_round_trips_on_symmetric_input(dn, seed):
    d, N = dn
    A = random_symmetric(random.Random(seed), d, N)
    L, D = vectorize.elimination_matrix(d, N), vectorize.duplication_matrix(d, N)
    h = vectorize.hvec(A)
    assert np.array_equal(L.matvec(h), vectorize.hvec_1N(A))
    assert np.array_equal(D.matvec(vectorize.hvec_1N(A)), h)
    assert np.array_equal(D.matvec(L.matvec(h)), h)


def test_matrix_budget():
    with pytest.raises(ResourceError, match="requires"):
        vectorize.duplication_matrix(3, 6, budget=100)


def test_dump_round_trip():
    D = vectorize.duplication_matrix(2, 3)
    text = vectorize.dump_matrix("D", 2, 3, D)
    assert text.splitlines()[0] == "D 2 3 8 4 8"
    assert text.splitlines()[1] == "1 1 1"
    kind, d, N, M = vectorize.parse_dump(text)
    assert (kind, d, N) == ("D", 2, 3) and M == D


# -- sparse tensors -----------------------------------------------------------


def test_sparse_tensor_canonical_form():
    T = SparseTensor((2, 2), [(1, 0), (0, 1), (0, 0)], np.array([3, 0, 5]))
    assert T.indices.tolist() == [[0, 0], [1, 0]]
    assert T.values.tolist() == [5, 3]
    with pytest.raises(ValueError):
        SparseTensor((2, 2), [(0, 0), (0, 0)], np.array([1, 2]))


def test_sparse_densify_round_trip():
    T = SparseTensor.from_dict((2, 3), {(2, 3): 4, (1, 1): -1})
    dense = T.densify()
    assert dense[2, 3] == 4 and dense[1, 1] == -1 and dense[1, 2] == 0
    with pytest.raises(ResourceError):
        T.densify(limit=5)
