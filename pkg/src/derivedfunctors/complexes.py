"""Bounded chain complexes of f.p. modules, chain maps and homology.

Indexing is homological: ``C_0 <- C_1 <- ... <- C_l`` with ``d_n: C_n -> C_{n-1}``.
Degrees outside ``0..l`` hold the zero module and all differentials into or
out of them are zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

from derivedfunctors.errors import NotAComplex, ShapeError
from derivedfunctors.exact_linalg import IntMatrix, hermite_rows, hstack, lattice_basis, preimage, solve, solve_matrix
from derivedfunctors.fp_modules import (
    FpModule,
    ModuleMap,
    compose,
    is_zero_map,
    make_map,
    maps_equal,
    sub_maps,
    zero_map,
    zero_module,
)


@dataclass(frozen=True)
class ChainComplex:
    objects: tuple[FpModule, ...]
    differentials: tuple[ModuleMap, ...]

    @property
    def length(self) -> int:
        return len(self.objects) - 1

    def obj(self, n: int) -> FpModule:
        if 0 <= n < len(self.objects):
            return self.objects[n]
        return zero_module()

    def d(self, n: int) -> ModuleMap:
        """``d_n: C_n -> C_{n-1}`` (zero outside ``1..length``)."""
        if 1 <= n <= self.length:
            return self.differentials[n - 1]
        return zero_map(self.obj(n), self.obj(n - 1))

    def is_valid(self) -> bool:
        return all(is_zero_map(compose(self.d(n), self.d(n + 1))) for n in range(1, self.length))


def make_complex(objects: Sequence[FpModule], differentials: Sequence, check: bool = True) -> ChainComplex:
    """Build ``C`` from ``objects[0..l]`` and ``differentials[0..l-1]`` (``d_1..d_l``).

    Differentials may be given as :class:`ModuleMap` or as bare matrices.
    """
    objects = tuple(objects)
    if not objects:
        raise ShapeError("a complex needs at least one object")
    if len(differentials) != len(objects) - 1:
        raise ShapeError(f"{len(objects)} objects need {len(objects) - 1} differentials")
    ds = []
    for n, d in enumerate(differentials, start=1):
        if isinstance(d, ModuleMap):
            if d.source != objects[n] or d.target != objects[n - 1]:
                raise ShapeError(f"d_{n} does not go from C_{n} to C_{n - 1}")
        else:
            d = make_map(objects[n], objects[n - 1], d)
        ds.append(d)
    C = ChainComplex(objects, tuple(ds))
    if check and not C.is_valid():
        raise NotAComplex("d o d is not zero")
    return C


@dataclass(frozen=True)
class ChainMap:
    source: ChainComplex
    target: ChainComplex
    components: tuple[ModuleMap, ...]

    @property
    def top(self) -> int:
        return max(self.source.length, self.target.length)

    def at(self, n: int) -> ModuleMap:
        if 0 <= n < len(self.components):
            return self.components[n]
        return zero_map(self.source.obj(n), self.target.obj(n))

    def commutes(self) -> bool:
        for n in range(1, self.top + 1):
            lhs = compose(self.target.d(n), self.at(n))
            rhs = compose(self.at(n - 1), self.source.d(n))
            if not maps_equal(lhs, rhs):
                return False
        return True


def make_chain_map(source: ChainComplex, target: ChainComplex, components: Sequence, check: bool = True) -> ChainMap:
    comps = []
    for n, f in enumerate(components):
        if not isinstance(f, ModuleMap):
            f = make_map(source.obj(n), target.obj(n), f)
        elif f.source != source.obj(n) or f.target != target.obj(n):
            raise ShapeError(f"component {n} has the wrong ends")
        comps.append(f)
    phi = ChainMap(source, target, tuple(comps))
    if check and not phi.commutes():
        raise ValueError("components do not commute with the differentials")
    return phi


def identity_chain_map(C: ChainComplex) -> ChainMap:
    from derivedfunctors.fp_modules import identity_map
    return ChainMap(C, C, tuple(identity_map(M) for M in C.objects))


def compose_chain(psi: ChainMap, phi: ChainMap) -> ChainMap:
    if phi.target != psi.source:
        raise ShapeError("chain maps are not composable")
    top = max(phi.top, psi.top)
    return ChainMap(phi.source, psi.target, tuple(compose(psi.at(n), phi.at(n)) for n in range(top + 1)))


def apply_functor(F, C):
    """Apply an additive functor objectwise, to a complex or to a chain map.

    ``F`` needs ``on_module`` and ``on_map``.
    """
    if isinstance(C, ChainMap):
        src = apply_functor(F, C.source)
        tgt = apply_functor(F, C.target)
        return ChainMap(src, tgt, tuple(F.on_map(f) for f in C.components))
    objects = tuple(F.on_module(M) for M in C.objects)
    ds = tuple(F.on_map(d) for d in C.differentials)
    return make_complex(objects, ds)


@dataclass(frozen=True)
class HomologyObject:
    """``H_n = Z_n / B_n`` with ``Z_n`` given by an explicit lattice basis.

    ``group`` is presented on the columns of ``cycles_basis`` (vectors in
    ``C_n`` coordinates); its relations express ``im d_{n+1}`` plus the
    relations of ``C_n`` in that basis.
    """

    complex: ChainComplex
    degree: int
    group: FpModule
    cycles_basis: IntMatrix

    def project(self, cycle: Sequence[int]) -> tuple[int, ...]:
        """Coordinates of a cycle in the generators of ``group``."""
        c = solve(self.cycles_basis, cycle)
        if c is None:
            raise ValueError("vector is not a cycle")
        return c

    def representative(self, j: int) -> tuple[int, ...]:
        return self.cycles_basis.column(j)


@lru_cache(maxsize=4096)
def homology(C: ChainComplex, n: int) -> HomologyObject:
    Cn = C.obj(n)
    g = Cn.generators
    if n == 0 or n > C.length:
        Z = IntMatrix.identity(g)
    else:
        Z = preimage(C.d(n).matrix, C.obj(n - 1).relation_lattice)
        Z = lattice_basis(Z)
    B = hstack([C.d(n + 1).matrix, Cn.relation_lattice], rows=g)
    X = solve_matrix(Z, B)
    assert X is not None, "boundaries must be cycles"
    rels = hermite_rows(X.columns(), Z.cols)
    group = FpModule(Z.cols, IntMatrix.from_rows(rels, Z.cols))
    return HomologyObject(C, n, group, Z)


def induced_map_on_homology(phi: ChainMap, n: int) -> ModuleMap:
    Hs = homology(phi.source, n)
    Ht = homology(phi.target, n)
    fn = phi.at(n).matrix
    cols = []
    for j in range(Hs.cycles_basis.cols):
        w = fn.apply(Hs.representative(j))
        c = solve(Ht.cycles_basis, w)
        assert c is not None, "chain map sent a cycle to a non-cycle"
        cols.append(c)
    A = IntMatrix.from_columns(cols, Ht.group.generators)
    # well-definedness is checked by the constructor
    return ModuleMap(Hs.group, Ht.group, A)


def are_homotopic(f: ChainMap, g: ChainMap) -> bool:
    """Decide whether ``f - g = d's + sd`` for some module maps ``s_n: C_n -> C'_{n+1}``.

    All unknowns (entries of every ``s_n``, plus slack coefficients that
    absorb relations of the targets and certify well-definedness of each
    ``s_n``) go into one integer linear system.
    """
    if f.source != g.source or f.target != g.target:
        raise ShapeError("chain maps do not share source and target")
    C, D = f.source, f.target
    top = max(C.length, D.length)
    variables: dict = {}

    def var(key):
        if key not in variables:
            variables[key] = len(variables)
        return variables[key]

    equations = []  # (dict var -> coeff, rhs)
    for n in range(top + 1):
        Cn, Dn, Dn1 = C.obj(n), D.obj(n), D.obj(n + 1)
        diff = sub_maps(f.at(n), g.at(n)).matrix
        dD = D.d(n + 1).matrix   # D_n <- D_{n+1}
        dC = C.d(n).matrix       # C_{n-1} <- C_n
        RD = Dn.relation_lattice
        for a in range(Dn.generators):
            for b in range(Cn.generators):
                eq: dict = {}
                for c in range(Dn1.generators):
                    if dD[a, c]:
                        k = var(("s", n, c, b))
                        eq[k] = eq.get(k, 0) + dD[a, c]
                if n >= 1:
                    for c in range(C.obj(n - 1).generators):
                        if dC[c, b]:
                            k = var(("s", n - 1, a, c))
                            eq[k] = eq.get(k, 0) + dC[c, b]
                for c in range(RD.cols):
                    if RD[a, c]:
                        k = var(("y", n, c, b))
                        eq[k] = eq.get(k, 0) + RD[a, c]
                equations.append((eq, diff[a, b]))
        # s_n must respect the relations of C_n
        RC = Cn.relation_lattice
        RD1 = Dn1.relation_lattice
        for a in range(Dn1.generators):
            for rel in range(RC.cols):
                eq = {}
                for b in range(Cn.generators):
                    if RC[b, rel]:
                        k = var(("s", n, a, b))
                        eq[k] = eq.get(k, 0) + RC[b, rel]
                for c in range(RD1.cols):
                    if RD1[a, c]:
                        k = var(("w", n, c, rel))
                        eq[k] = eq.get(k, 0) - RD1[a, c]
                equations.append((eq, 0))
    if not equations:
        return True
    nv = len(variables)
    if nv == 0:
        return all(rhs == 0 for _, rhs in equations)
    rows = [[eq.get(k, 0) for k in range(nv)] for eq, _ in equations]
    A = IntMatrix.from_rows(rows, nv)
    return solve(A, [rhs for _, rhs in equations]) is not None
