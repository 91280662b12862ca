"""Limits of finite diagrams of f.p. abelian groups, built as compatible tuples.

The limit of a diagram ``D`` is the subgroup of the product of its nodes
cut out by ``arrow(i, j)(x_i) = x_j``.  It is computed by one fixed
construction (a Hermite-reduced kernel lattice inside the direct sum), so
the same diagram always yields the identical presentation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

from derivedfunctors.errors import IncompatibleComponents, InfiniteNode, InvalidDiagram
from derivedfunctors.exact_linalg import (
    IntMatrix,
    block_diagonal,
    hermite_rows,
    hstack,
    preimage,
    solve,
    solve_matrix,
    vstack,
)
from derivedfunctors.fp_modules import (
    FpModule,
    ModuleMap,
    canonical_form,
    compose,
    direct_sum,
    elements,
    identity_map,
    is_isomorphism,
    maps_equal,
    reduce_element,
    reduction_basis,
)


@dataclass(frozen=True)
class IsoDiagram:
    """Indiscrete groupoid diagram: one isomorphism for every ordered pair of nodes."""

    nodes: tuple[FpModule, ...]
    arrows: Mapping[tuple[int, int], ModuleMap]

    def __hash__(self):
        return hash((self.nodes, tuple(sorted((k, v.matrix) for k, v in self.arrows.items()))))

    def arrow(self, i: int, j: int) -> ModuleMap:
        return self.arrows[(i, j)]

    def __len__(self):
        return len(self.nodes)


def diagram_violations(nodes: Sequence[FpModule], arrows: Mapping[tuple[int, int], ModuleMap]) -> list[str]:
    out = []
    k = len(nodes)
    if k < 1:
        return ["diagram has no nodes"]
    for i in range(k):
        for j in range(k):
            a = arrows.get((i, j))
            if a is None:
                out.append(f"missing arrow ({i},{j})")
                continue
            if a.source != nodes[i] or a.target != nodes[j]:
                out.append(f"arrow ({i},{j}) has the wrong ends")
    if out:
        return out
    for i in range(k):
        if not maps_equal(arrows[(i, i)], identity_map(nodes[i])):
            out.append(f"arrow ({i},{i}) is not the identity")
    for i in range(k):
        for j in range(k):
            if not is_isomorphism(arrows[(i, j)]):
                out.append(f"arrow ({i},{j}) is not an isomorphism")
            elif not maps_equal(compose(arrows[(j, i)], arrows[(i, j)]), identity_map(nodes[i])):
                out.append(f"arrow ({j},{i}) is not inverse to ({i},{j})")
            for l in range(k):
                if not maps_equal(compose(arrows[(j, l)], arrows[(i, j)]), arrows[(i, l)]):
                    out.append(f"cocycle fails for ({i},{j},{l})")
    return out


def make_iso_diagram(nodes: Sequence[FpModule], arrows: Mapping[tuple[int, int], ModuleMap]) -> IsoDiagram:
    problems = diagram_violations(nodes, arrows)
    if problems:
        raise InvalidDiagram("; ".join(problems))
    return IsoDiagram(tuple(nodes), dict(arrows))


@dataclass(frozen=True)
class LimitObject:
    diagram: IsoDiagram
    group: FpModule
    product: FpModule
    inclusion: ModuleMap
    projections: tuple[ModuleMap, ...]

    def __hash__(self):
        return hash((self.group, self.inclusion.matrix))


def _offsets(nodes):
    out = [0]
    for M in nodes:
        out.append(out[-1] + M.generators)
    return out


def limit(D: IsoDiagram) -> LimitObject:
    """Compatible tuples ``<x_i>`` with ``arrow(i, j)(x_i) = x_j`` for every pair.

    Pairs ``(i, i)`` are vacuous because those arrows are identities.
    """
    nodes = D.nodes
    off = _offsets(nodes)
    total = off[-1]
    blocks = []
    slack = []
    for i in range(len(nodes)):
        for j in range(len(nodes)):
            if i == j:
                continue
            A = D.arrow(i, j).matrix
            gj = nodes[j].generators
            row = [[0] * total for _ in range(gj)]
            for a in range(gj):
                for b in range(nodes[i].generators):
                    row[a][off[i] + b] += A[a, b]
                row[a][off[j] + a] -= 1
            blocks.append(IntMatrix.from_rows(row, total))
            slack.append(nodes[j].relation_lattice)
    product = direct_sum(*nodes)
    if blocks:
        cond = vstack(blocks, cols=total)
        L = preimage(cond, block_diagonal(slack) if slack else IntMatrix.zeros(cond.rows, 0))
    else:
        L = IntMatrix.identity(total)
    X = solve_matrix(L, product.relation_lattice)
    assert X is not None, "relations of the product must be compatible tuples"
    rels = hermite_rows(X.columns(), L.cols)
    group = FpModule(L.cols, IntMatrix.from_rows(rels, L.cols))
    inclusion = ModuleMap(group, product, L, checked=False)
    projections = tuple(
        ModuleMap(group, nodes[i], L.select_rows(range(off[i], off[i + 1])), checked=False)
        for i in range(len(nodes)))
    out = LimitObject(D, group, product, inclusion, projections)
    for i in range(len(nodes)):
        for j in range(len(nodes)):
            assert maps_equal(compose(D.arrow(i, j), projections[i]), projections[j])
    return out


def map_into_limit(target: LimitObject, components: Sequence[ModuleMap]) -> ModuleMap:
    """The unique map ``S -> limit`` whose projections are ``components``."""
    D = target.diagram
    if len(components) != len(D.nodes):
        raise IncompatibleComponents("one component per node is required")
    S = components[0].source
    for i, c in enumerate(components):
        if c.source != S or c.target != D.nodes[i]:
            raise IncompatibleComponents(f"component {i} has the wrong ends")
    for i in range(len(D.nodes)):
        for j in range(len(D.nodes)):
            if not maps_equal(compose(D.arrow(i, j), components[i]), components[j]):
                raise IncompatibleComponents(f"arrow ({i},{j}) does not carry component {i} to component {j}")
    stacked = vstack([c.matrix for c in components], cols=S.generators)
    Y = solve_matrix(target.inclusion.matrix, stacked)
    if Y is None:
        raise IncompatibleComponents("tuple of components is not a compatible tuple")
    h = ModuleMap(S, target.group, Y)
    for i, c in enumerate(components):
        assert maps_equal(compose(target.projections[i], h), c)
    return h


def limit_elements(L: LimitObject) -> set[tuple[tuple[int, ...], ...]]:
    """Every element of a finite limit, as a tuple of canonical node representatives."""
    nodes = L.diagram.nodes
    bases = [reduction_basis(M) for M in nodes]
    off = _offsets(nodes)
    out = set()
    for y in elements(L.group):
        x = L.inclusion.matrix.apply(y)
        out.add(tuple(reduce_element(bases[i], x[off[i]:off[i + 1]]) for i in range(len(nodes))))
    return out


def brute_force_limit(D: IsoDiagram) -> set[tuple[tuple[int, ...], ...]]:
    """Enumerate the whole product and keep the compatible tuples."""
    nodes = D.nodes
    for i, M in enumerate(nodes):
        if canonical_form(M).free_rank:
            raise InfiniteNode(f"node {i} is infinite")
    bases = [reduction_basis(M) for M in nodes]
    elems = [list(elements(M)) for M in nodes]
    index = [{e: t for t, e in enumerate(es)} for es in elems]
    # action of every arrow as a lookup table on element indices
    table = {}
    for (i, j), a in D.arrows.items():
        table[(i, j)] = [index[j][reduce_element(bases[j], a.matrix.apply(e))] for e in elems[i]]
    pairs = [(i, j) for i in range(len(nodes)) for j in range(len(nodes))]
    out = set()
    for combo in itertools.product(*(range(len(es)) for es in elems)):
        if all(table[(i, j)][combo[i]] == combo[j] for i, j in pairs):
            out.add(tuple(elems[i][combo[i]] for i in range(len(nodes))))
    return out
