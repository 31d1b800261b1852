from fractions import Fraction

import pytest

from tvbkit.core import exact


def test_rank_examples():
    assert exact.rank([[0, 0, 0]] * 3) == 0
    assert exact.rank([[1 if i == j else 0 for j in range(4)] for i in range(4)]) == 4
    assert exact.rank([[1, 1, 1]]) == 1
    assert exact.rank([]) == 0


def test_kernel_basis_of_hyperplane():
    assert exact.kernel_basis([[1, 1, 1]]) == [(-1, 1, 0), (-1, 0, 1)]
    identity = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert exact.kernel_basis(identity) == []


def test_kernel_vectors_are_in_kernel():
    A = [[1, 2, 3, 4], [0, 1, -1, 2]]
    for v in exact.kernel_basis(A):
        assert exact.matvec(A, v) == (0, 0)


def test_rref_pivots():
    rows, pivots = exact.rref([[0, 2, 4], [0, 1, 2], [1, 0, 1]])
    assert pivots == (0, 1)
    assert rows == [(1, 0, 1), (0, 1, 2)]


def test_solve_exact():
    assert exact.solve_exact([[1, 0], [0, 2]], [1, 1]) == (1, Fraction(1, 2))
    assert exact.solve_exact([[1, 1], [1, 1]], [1, 2]) is None
    with pytest.raises(ValueError):
        exact.solve_exact([[1, 1]], [1])


def test_det_and_inverse():
    A = [[1, 0], [-1, -1]]
    assert exact.det(A) == -1
    assert exact.matmul(exact.inverse(A), A) == [(1, 0), (0, 1)]
    with pytest.raises(ValueError):
        exact.inverse([[1, 2], [2, 4]])


def test_primitive():
    assert exact.primitive([2, 4, -6]) == (1, 2, -3)
    assert exact.primitive([Fraction(1, 2), Fraction(1, 3)]) == (3, 2)
    assert exact.primitive([0, 0]) == (0, 0)


def test_as_int_vector_rejects_fractions():
    with pytest.raises(ValueError):
        exact.as_int_vector([1, Fraction(1, 2)])


def test_smith_invariants():
    assert exact.smith_invariants([[2, 0], [0, 3]]) == [1, 6]
    assert exact.smith_invariants([[2, 0]]) == [2]


def test_hermite_extends_to_lattice_basis():
    assert exact.hermite_extends_to_lattice_basis([[1, 0], [0, 1]])
    assert exact.hermite_extends_to_lattice_basis([[1, 1]])
    assert not exact.hermite_extends_to_lattice_basis([[2, 0]])
    with pytest.raises(ValueError):
        exact.hermite_extends_to_lattice_basis([[1, 1], [2, 2]])


def test_hermite_columns_keeps_the_lattice():
    W = exact.hermite_columns([[2, 1], [0, 3]])
    assert abs(exact.det(W)) == 6


def test_ragged_matrix_is_rejected():
    with pytest.raises(ValueError):
        exact.shape([[1, 2], [3]])
