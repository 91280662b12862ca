import random
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from derivedfunctors.corpus import random_map, random_module
from derivedfunctors.errors import NotWellDefined, ShapeError
from derivedfunctors.fp_modules import (
    canonical_form,
    cokernel,
    compose,
    cyclic,
    direct_sum,
    elements,
    free_module,
    identity_map,
    inverse,
    is_injective,
    is_isomorphism,
    is_surjective,
    kernel,
    make_map,
    make_module,
    maps_equal,
    tensor,
    tensor_map,
    to_canonical,
    transport,
    zero_module,
)
from oracles import FiniteGroup, kernel_of_mult_on_cyclic


def form(M):
    f = canonical_form(M)
    return f.torsion, f.free_rank


@st.composite
def finite_modules(draw, max_g=2, bound=6):
    g = draw(st.integers(1, max_g))
    extra = draw(st.integers(0, 1))
    rows = draw(st.lists(st.lists(st.integers(-bound, bound), min_size=g, max_size=g),
                         min_size=g + extra, max_size=g + extra))
    M = make_module(g, rows)
    if canonical_form(M).order is None or canonical_form(M).order > 64:
        return make_module(g, [[2 if i == j else 0 for j in range(g)] for i in range(g)])
    return M


class TestCanonicalForm:
    def test_two_cyclics_combine(self):
        M = make_module(2, [[4, 0], [0, 6]])
        assert form(M) == ((2, 12), 0)
        assert str(canonical_form(M)) == "Z/2 + Z/12"

    def test_free_and_trivial(self):
        assert form(free_module(2)) == ((), 2)
        assert canonical_form(cyclic(1)).is_trivial
        assert canonical_form(zero_module()).is_trivial
        assert form(make_module(2, [[2, 0]])) == ((2,), 1)

    @settings(max_examples=60, deadline=None)
    @given(finite_modules())
    def test_order_matches_enumeration(self, M):
        G = FiniteGroup(M.relations.to_rows(), M.generators)
        assert canonical_form(M).order == G.order
        assert len(list(elements(M))) == G.order

    @settings(max_examples=40, deadline=None)
    @given(finite_modules())
    def test_to_canonical_is_isomorphism(self, M):
        assert is_isomorphism(to_canonical(M))


class TestMaps:
    def test_doubling_is_well_defined(self):
        f = make_map(cyclic(2), cyclic(4), [[2]])
        assert f((1,)) == (2,)

    def test_identity_on_generator_is_not(self):
        with pytest.raises(NotWellDefined):
            make_map(cyclic(2), cyclic(4), [[1]])

    def test_wrong_shape(self):
        with pytest.raises(ShapeError):
            make_map(cyclic(2), cyclic(4), [[1, 2]])

    def test_equality_is_modulo_relations(self):
        Z4 = cyclic(4)
        one = make_map(Z4, Z4, [[1]])
        assert maps_equal(one, make_map(Z4, Z4, [[5]]))
        assert not maps_equal(one, make_map(Z4, Z4, [[2]]))

    def test_maps_equal_needs_same_ends(self):
        with pytest.raises(ShapeError):
            maps_equal(identity_map(cyclic(2)), identity_map(cyclic(4)))

    def test_kernel_and_cokernel_of_multiplication(self):
        f = make_map(cyclic(12), cyclic(12), [[4]])
        K, inc = kernel(f)
        assert canonical_form(K).order == kernel_of_mult_on_cyclic(4, 12)
        C, _ = cokernel(f)
        assert form(C) == ((4,), 0)
        assert not is_injective(f) and not is_surjective(f)

    def test_inverse(self):
        Z7 = cyclic(7)
        f = make_map(Z7, Z7, [[3]])
        g = inverse(f)
        assert maps_equal(compose(g, f), identity_map(Z7))
        assert maps_equal(compose(f, g), identity_map(Z7))

    @settings(max_examples=40, deadline=None)
    @given(finite_modules(), st.integers(0, 10 ** 6))
    def test_isomorphism_against_enumeration(self, M, s):
        f = random_map(random.Random(s), M, M, coeff=3)
        G = FiniteGroup(M.relations.to_rows(), M.generators)
        images = {G.cls(f.matrix.apply(x)) for x in G.elements()}
        assert is_isomorphism(f) == (len(images) == G.order)
        assert is_surjective(f) == (len(images) == G.order)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10 ** 6))
    def test_random_maps_are_well_defined(self, s):
        rng = random.Random(s)
        M, N = random_module(rng, 2, 8), random_module(rng, 2, 8)
        f = random_map(rng, M, N)
        make_map(M, N, f.matrix)


class TestTensor:
    @pytest.mark.parametrize("a,b", [(4, 6), (2, 3), (8, 12), (9, 9), (5, 1)])
    def test_cyclic_tensor_is_gcd(self, a, b):
        assert canonical_form(tensor(cyclic(a), cyclic(b))).order == gcd(a, b)

    def test_integers_are_the_unit(self):
        M = make_module(2, [[4, 2], [0, 6]])
        assert form(tensor(free_module(1), M)) == form(M)
        assert form(tensor(M, free_module(1))) == form(M)

    def test_free_rank_two_with_cyclic(self):
        assert form(tensor(free_module(2), cyclic(3))) == ((3, 3), 0)

    def test_distributes_over_sums(self):
        A = cyclic(6)
        lhs = tensor(direct_sum(cyclic(4), free_module(1)), A)
        assert form(lhs) == ((2, 6), 0)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10 ** 6))
    def test_functor_laws(self, s):
        rng = random.Random(s)
        M, N, O = (random_module(rng, 2, 8) for _ in range(3))
        A = random_module(rng, 2, 8)
        f = random_map(rng, M, N)
        g = random_map(rng, N, O)
        assert maps_equal(tensor_map(compose(g, f), A), compose(tensor_map(g, A), tensor_map(f, A)))
        assert maps_equal(tensor_map(identity_map(M), A), identity_map(tensor(M, A)))
        make_map(tensor(M, A), tensor(N, A), tensor_map(f, A).matrix)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10 ** 6))
    def test_right_exact_on_surjections(self, s):
        rng = random.Random(s)
        M = random_module(rng, 2, 8)
        C, q = cokernel(random_map(rng, M, M))
        A = random_module(rng, 2, 8)
        assert is_surjective(q)
        assert is_surjective(tensor_map(q, A))


def test_transport_of_doubling():
    f = make_map(cyclic(2), cyclic(4), [[2]])
    assert transport(f).matrix.to_rows() == [[2]]
