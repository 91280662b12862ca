import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from derivedfunctors.complexes import (
    apply_functor,
    are_homotopic,
    compose_chain,
    homology,
    identity_chain_map,
    induced_map_on_homology,
    make_chain_map,
    make_complex,
)
from derivedfunctors.derived import TensorFunctor
from derivedfunctors.errors import NotAComplex
from derivedfunctors.exact_linalg import IntMatrix
from derivedfunctors.fp_modules import (
    canonical_form,
    compose,
    cyclic,
    free_module,
    identity_map,
    is_injective,
    make_map,
    make_module,
    maps_equal,
    zero_map,
    zero_module,
)
from derivedfunctors.resolutions import canonical_resolution, lift_map
from oracles import FiniteGroup, homology_order

Z = free_module(1)


def form(M):
    f = canonical_form(M)
    return f.torsion, f.free_rank


def zero_chain_map(C, D):
    return make_chain_map(C, D, [zero_map(C.obj(n), D.obj(n)) for n in range(max(C.length, D.length) + 1)])


class TestMakeComplex:
    def test_multiplication_by_four(self):
        C = make_complex([Z, Z], [[[4]]])
        assert C.length == 1 and C.is_valid()

    def test_square_of_doubling_is_rejected(self):
        with pytest.raises(NotAComplex):
            make_complex([Z, Z, Z], [[[2]], [[2]]])

    def test_zero_differentials(self):
        C = make_complex([Z, free_module(2), Z], [[[0, 0]], [[0], [0]]])
        assert C.is_valid()
        for n in range(3):
            assert form(homology(C, n).group) == form(C.obj(n))

    def test_doubling_squares_to_zero_mod_four(self):
        Z4 = cyclic(4)
        make_complex([Z4, Z4, Z4], [[[2]], [[2]]])


class TestHomology:
    def test_multiplication_by_four(self):
        C = make_complex([Z, Z], [[[4]]])
        assert form(homology(C, 0).group) == ((4,), 0)
        assert canonical_form(homology(C, 1).group).is_trivial

    def test_identity_is_exact(self):
        C = make_complex([Z, Z], [[[1]]])
        assert canonical_form(homology(C, 0).group).is_trivial
        assert canonical_form(homology(C, 1).group).is_trivial

    def test_outside_range(self):
        C = make_complex([Z, Z], [[[4]]])
        assert canonical_form(homology(C, 5).group).is_trivial

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 6), st.integers(1, 2), st.integers(1, 2), st.integers(1, 2), st.integers(0, 10 ** 6))
    def test_against_enumeration(self, m, a0, a1, a2, s):
        rng = random.Random(s)
        objs = [make_module(a, [[m if i == j else 0 for j in range(a)] for i in range(a)]) for a in (a0, a1, a2)]
        groups = [FiniteGroup(M.relations.to_rows(), M.generators) for M in objs]
        d1 = [[rng.randrange(m) for _ in range(a1)] for _ in range(a0)]
        zero = groups[0].cls((0,) * a0)
        ker = [x for x in groups[1].elements() if groups[0].cls([sum(r[j] * x[j] for j in range(a1)) for r in d1]) == zero]
        cols = [rng.choice(ker) for _ in range(a2)]
        d2 = [[cols[j][i] for j in range(a2)] for i in range(a1)]
        C = make_complex(objs, [d1, d2])
        for n in range(3):
            assert canonical_form(homology(C, n).group).order == homology_order(groups, [d1, d2], n)

    def test_apply_tensor(self):
        C = make_complex([Z, Z], [[[4]]])
        FC = apply_functor(TensorFunctor(cyclic(6)), C)
        assert all(form(M) == ((6,), 0) for M in FC.objects)
        assert FC.d(1).matrix == IntMatrix.from_rows([[4]])
        assert form(homology(FC, 1).group) == ((2,), 0)

    def test_apply_unit_and_zero(self):
        C = make_complex([Z, Z], [[[4]]])
        FC = apply_functor(TensorFunctor(Z), C)
        assert [form(M) for M in FC.objects] == [form(M) for M in C.objects]
        Zc = make_complex([zero_module()], [])
        assert apply_functor(TensorFunctor(cyclic(6)), Zc).objects[0].generators == 0


class TestInducedMaps:
    def test_identity_and_zero(self):
        C = make_complex([Z, Z], [[[4]]])
        H = homology(C, 0).group
        assert maps_equal(induced_map_on_homology(identity_chain_map(C), 0), identity_map(H))
        assert maps_equal(induced_map_on_homology(zero_chain_map(C, C), 0), zero_map(H, H))

    def test_lift_of_doubling(self):
        f = make_map(cyclic(2), cyclic(4), [[2]])
        P, Q = canonical_resolution(f.source), canonical_resolution(f.target)
        phi = lift_map(f, P, Q)
        assert [c.matrix.to_rows() for c in phi.components] == [[[2]], [[1]]]
        F = TensorFunctor(cyclic(4))
        h = induced_map_on_homology(apply_functor(F, phi), 1)
        assert form(h.source) == ((2,), 0) and form(h.target) == ((4,), 0)
        assert is_injective(h)

    def test_composition(self):
        C = make_complex([Z, Z], [[[6]]])
        D = make_complex([Z, Z], [[[3]]])
        phi = make_chain_map(C, D, [[[1]], [[2]]])
        psi = make_chain_map(D, D, [[[2]], [[2]]])
        lhs = induced_map_on_homology(compose_chain(psi, phi), 0)
        rhs = compose(induced_map_on_homology(psi, 0), induced_map_on_homology(phi, 0))
        assert maps_equal(lhs, rhs)


class TestHomotopy:
    def test_reflexive(self):
        C = make_complex([Z, Z], [[[4]]])
        assert are_homotopic(identity_chain_map(C), identity_chain_map(C))

    def test_contractible(self):
        C = make_complex([Z, Z], [[[1]]])
        assert are_homotopic(identity_chain_map(C), zero_chain_map(C, C))

    def test_identity_not_null_when_homology_survives(self):
        C = make_complex([Z, Z], [[[4]]])
        assert not are_homotopic(identity_chain_map(C), zero_chain_map(C, C))

    def test_perturbed_lifts(self):
        f = make_map(cyclic(2), cyclic(4), [[2]])
        P, Q = canonical_resolution(f.source), canonical_resolution(f.target)
        a = lift_map(f, P, Q)
        for s in range(5):
            b = lift_map(f, P, Q, perturb=random.Random(s))
            assert are_homotopic(a, b)
