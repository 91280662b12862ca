import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from derivedfunctors.errors import ShapeError
from derivedfunctors.exact_linalg import (
    IntMatrix,
    hermite_rows,
    kernel_basis,
    lattice_basis,
    preimage,
    smith_normal_form,
    solve,
    solve_matrix,
)
from oracles import determinantal_gcds, rational_rank


def M(rows, cols=None):
    return IntMatrix.from_rows(rows, cols)


@st.composite
def matrices(draw, max_dim=8, bound=50):
    m = draw(st.integers(0, max_dim))
    n = draw(st.integers(0, max_dim))
    rows = draw(st.lists(st.lists(st.integers(-bound, bound), min_size=n, max_size=n), min_size=m, max_size=m))
    return IntMatrix.from_rows(rows, n)


def check_smith(A):
    s = smith_normal_form(A)
    assert s.U @ A @ s.V == s.D
    assert abs(s.U.det()) == 1 and abs(s.V.det()) == 1
    d = s.diagonal
    assert all(x >= 0 for x in d)
    for a, b in zip(d, d[1:]):
        assert (b % a == 0) if a else b == 0
    for i in range(A.rows):
        for j in range(A.cols):
            if i != j:
                assert s.D[i, j] == 0
    return s


class TestIntMatrix:
    def test_entries_row_major(self):
        A = M([[1, 2, 3], [4, 5, 6]])
        assert A.entries == (1, 2, 3, 4, 5, 6)
        assert IntMatrix.from_entries(2, 3, A.entries) == A

    def test_empty_shapes(self):
        Z = IntMatrix.zeros(0, 3)
        assert Z.shape == (0, 3)
        assert (IntMatrix.zeros(2, 0) @ Z).shape == (2, 3)
        assert (IntMatrix.zeros(2, 0) @ Z).is_zero()

    def test_shape_errors(self):
        with pytest.raises(ShapeError):
            M([[1, 2]]) @ M([[1, 2]])
        with pytest.raises(ShapeError):
            IntMatrix.from_entries(2, 2, [1, 2, 3])

    def test_transpose_and_kron(self):
        A = M([[1, 2], [3, 4]])
        assert A.T.to_rows() == [[1, 3], [2, 4]]
        assert IntMatrix.identity(2).kron(M([[5]])) == M([[5, 0], [0, 5]])

    def test_determinant_against_cofactor_expansion(self):
        A = M([[2, -1, 0], [1, 3, 4], [0, 5, -2]])
        assert A.det() == 2 * (3 * -2 - 4 * 5) - (-1) * (1 * -2 - 4 * 0)


class TestSmith:
    def test_example_2x2(self):
        A = M([[2, 4], [6, 8]])
        s = check_smith(A)
        assert s.diagonal == (2, 4)
        # independent: d1 = gcd of entries, d1 d2 = |det|
        assert determinantal_gcds(A.to_rows()) == [2, 8]

    def test_identity(self):
        s = check_smith(IntMatrix.identity(2))
        assert s.diagonal == (1, 1)

    def test_zero(self):
        s = check_smith(IntMatrix.zeros(2, 3))
        assert s.diagonal == (0, 0)

    @pytest.mark.parametrize("shape", [(0, 0), (0, 3), (3, 0)])
    def test_empty(self, shape):
        s = check_smith(IntMatrix.zeros(*shape))
        assert s.diagonal == ()

    @settings(max_examples=150, deadline=None)
    @given(matrices())
    def test_invariants(self, A):
        check_smith(A)

    @settings(max_examples=60, deadline=None)
    @given(matrices(max_dim=4, bound=20))
    def test_diagonal_matches_determinantal_divisors(self, A):
        d = smith_normal_form(A).diagonal
        prods = []
        acc = 1
        for x in d:
            acc *= x
            prods.append(acc)
        assert prods == determinantal_gcds(A.to_rows())[:len(d)]

    def test_deterministic(self):
        A = M([[3, 7, -2], [0, 5, 9], [4, 4, 4]])
        smith_normal_form.cache_clear()
        first = smith_normal_form(A)
        smith_normal_form.cache_clear()
        assert smith_normal_form(A) == first

    def test_large_entries_stay_exact(self):
        big = 2 ** 70
        A = M([[big, 3], [7, big + 1]])
        s = check_smith(A)
        assert s.diagonal[0] * s.diagonal[1] == abs(A.det())


class TestKernel:
    def test_row_example(self):
        K = kernel_basis(M([[2, 3]]))
        assert K.cols == 1
        assert K.column(0) in ((3, -2), (-3, 2))

    def test_identity_has_trivial_kernel(self):
        assert kernel_basis(IntMatrix.identity(3)).cols == 0

    def test_zero_row_spans_everything(self):
        K = kernel_basis(IntMatrix.zeros(1, 2))
        assert K.cols == 2
        assert abs(K.det()) == 1

    @settings(max_examples=80, deadline=None)
    @given(matrices(max_dim=5, bound=9))
    def test_annihilates_and_has_right_rank(self, A):
        K = kernel_basis(A)
        assert (A @ K).is_zero()
        assert K.cols == A.cols - rational_rank(A.to_rows()) if A.rows else K.cols == A.cols

    @settings(max_examples=40, deadline=None)
    @given(matrices(max_dim=3, bound=6))
    def test_saturated(self, A):
        # every small integer solution is an integer combination of the basis
        K = kernel_basis(A)
        for x in itertools.product(range(-3, 4), repeat=A.cols):
            if not any(A.apply(x)):
                assert solve(K, x) is not None


class TestSolve:
    def test_examples(self):
        assert solve(M([[2]]), [4]) == (2,)
        assert solve(M([[2]]), [3]) is None
        x = solve(M([[2, 3]]), [1])
        assert 2 * x[0] + 3 * x[1] == 1

    def test_rhs_length_checked(self):
        with pytest.raises(ShapeError):
            solve(M([[1, 2]]), [1, 2])

    @settings(max_examples=100, deadline=None)
    @given(matrices(max_dim=5, bound=12), st.data())
    def test_solutions_are_exact(self, A, data):
        if A.cols == 0:
            return
        x0 = data.draw(st.lists(st.integers(-5, 5), min_size=A.cols, max_size=A.cols))
        b = A.apply(x0)
        x = solve(A, b)
        assert x is not None
        assert A.apply(x) == b

    def test_solve_matrix(self):
        A = M([[1, 1], [0, 2]])
        X = solve_matrix(A, M([[3, 1], [4, 2]]))
        assert A @ X == M([[3, 1], [4, 2]])
        assert solve_matrix(A, M([[0], [1]])) is None


class TestLattices:
    def test_hermite_is_canonical(self):
        a = hermite_rows([[2, 4], [0, 6]], 2)
        b = hermite_rows([[2, 10], [2, 4], [0, 12]], 2)
        assert a == b == [(2, 4), (0, 6)]

    def test_lattice_basis_of_columns(self):
        G = M([[2, 4, 6]])
        assert lattice_basis(G) == M([[2]])

    def test_preimage(self):
        # x with 3 x in 6 Z  <=>  x even
        assert preimage(M([[3]]), M([[6]])) == M([[2]])
