"""Seeded random presentations, maps and diagrams for the verification suites."""

from __future__ import annotations

import random
from typing import Optional

from derivedfunctors.exact_linalg import IntMatrix
from derivedfunctors.fp_modules import (
    FpModule,
    ModuleMap,
    canonical_form,
    compose,
    cyclic,
    hom_basis,
    identity_map,
    inverse,
    is_isomorphism,
    make_map,
    make_module,
)
from derivedfunctors.limits import IsoDiagram, make_iso_diagram


def random_module(rng: random.Random, max_generators: int = 3, bound: int = 12) -> FpModule:
    g = rng.randint(1, max_generators)
    r = rng.randint(0, g + 1)
    rows = [[rng.randint(-bound, bound) for _ in range(g)] for _ in range(r)]
    return make_module(g, IntMatrix.from_rows(rows, g))


def random_coefficients(rng: random.Random, bound: int = 12) -> FpModule:
    """Coefficient module for the tensor functor: cyclic or a two-generator presentation."""
    if rng.random() < 0.6:
        return cyclic(rng.randint(2, bound))
    return random_module(rng, 2, bound)


def random_map(rng: random.Random, M: FpModule, N: FpModule, coeff: int = 2) -> ModuleMap:
    basis = hom_basis(M, N)
    A = IntMatrix.zeros(N.generators, M.generators)
    for B in basis:
        c = rng.randint(-coeff, coeff)
        if c:
            A = A + B.scale(c)
    return make_map(M, N, A)


def module_corpus(seed: int, cases: int, bound: int = 12) -> list[tuple[FpModule, FpModule]]:
    """``(M, A)`` pairs: module and tensor coefficients.

    The first entry is always ``(Z/4, Z/6)`` so every corpus contains a
    case with nontrivial first derived group.
    """
    rng = random.Random(seed)
    out = [(cyclic(4), cyclic(6))]
    while len(out) < cases:
        out.append((random_module(rng, 3, bound), random_coefficients(rng, bound)))
    return out[:cases]


def random_automorphism(rng: random.Random, G: FpModule, tries: int = 200) -> Optional[ModuleMap]:
    for _ in range(tries):
        f = random_map(rng, G, G, coeff=3)
        if is_isomorphism(f):
            return f
    return None


def random_iso_diagram(rng: random.Random, G: FpModule, nodes: int) -> IsoDiagram:
    """``nodes`` copies of ``G`` glued by random automorphisms.

    ``arrow(0, i) = a_i`` and ``arrow(i, j) = a_j o a_i^{-1}``, which satisfies
    the identity, inverse and cocycle laws by construction.
    """
    autos = [identity_map(G)]
    for _ in range(nodes - 1):
        a = random_automorphism(rng, G)
        autos.append(a if a is not None else identity_map(G))
    invs = [inverse(a) for a in autos]
    arrows = {}
    for i in range(nodes):
        for j in range(nodes):
            arrows[(i, j)] = identity_map(G) if i == j else compose(autos[j], invs[i])
    return make_iso_diagram([G] * nodes, arrows)


def finite_group_corpus(seed: int, cases: int, max_order: int = 16) -> list[FpModule]:
    rng = random.Random(seed)
    out = []
    while len(out) < cases:
        g = rng.randint(1, 2)
        rows = [[rng.randint(-8, 8) for _ in range(g)] for _ in range(g + rng.randint(0, 1))]
        M = make_module(g, IntMatrix.from_rows(rows, g))
        order = canonical_form(M).order
        if order is not None and 1 <= order <= max_order:
            out.append(M)
    return out
