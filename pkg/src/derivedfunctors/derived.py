"""Left derived functors as canonical limits over a family of resolutions.

For a module ``M`` the value ``L_n F(M)`` is the limit of the groups
``H_n(F(P^i))`` over the resolution family of ``M``, glued by the canonical
comparison isomorphisms ``phi_ij``.  Maps ``f: M -> N`` act through
``theta_n(f; P, Q)``, the map on homology induced by any lift of ``f``.

Orientation conventions used throughout:

* ``phi(P, Q): H_n(F P) -> H_n(F Q)`` is ``theta`` of the identity.
* Change of resolutions: ``theta(f; P1, P2) = phi_N(Q2, P2) o theta(f; Q1, Q2) o phi_M(P1, Q1)``.
* For the induced map on limits, ``rho_bar_j o phi_ij = rho_bar_i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

from derivedfunctors.complexes import apply_functor, homology, induced_map_on_homology
from derivedfunctors.errors import CocycleViolation, IncompatibleComponents, NotAResolution
from derivedfunctors.exact_linalg import IntMatrix, solve
from derivedfunctors.fp_modules import (
    FpModule,
    ModuleMap,
    compose,
    identity_map,
    is_isomorphism,
    maps_equal,
    tensor,
    tensor_map,
)
from derivedfunctors.limits import IsoDiagram, LimitObject, limit, map_into_limit
from derivedfunctors.resolutions import (
    FreeResolution,
    ResolutionFamily,
    is_resolution,
    lift_map,
    resolution_family,
)


@dataclass(frozen=True)
class TensorFunctor:
    """``- (x) A`` for a fixed coefficient module ``A``."""

    coefficients: FpModule

    def on_module(self, M: FpModule) -> FpModule:
        return tensor(M, self.coefficients)

    def on_map(self, f: ModuleMap) -> ModuleMap:
        return tensor_map(f, self.coefficients)

    def __str__(self):
        return f"- (x) {self.coefficients!r}"


FunctorSpec = TensorFunctor


@lru_cache(maxsize=4096)
def functor_homology(F, P: FreeResolution, n: int):
    return homology(apply_functor(F, P.complex), n)


@lru_cache(maxsize=16384)
def theta(F, f: ModuleMap, P: FreeResolution, Q: FreeResolution, n: int) -> ModuleMap:
    """Map ``H_n(F P) -> H_n(F Q)`` induced by the lift of ``f`` to ``P -> Q``."""
    phi = lift_map(f, P, Q)
    Fphi = apply_functor(F, phi)
    # keep the homology objects of the cached complexes so presentations agree
    src = functor_homology(F, P, n)
    tgt = functor_homology(F, Q, n)
    out = induced_map_on_homology(Fphi, n)
    assert out.source == src.group and out.target == tgt.group
    return out


def theta_from_lift(F, phi, n: int) -> ModuleMap:
    """``theta`` computed from an explicitly given lift (used to check lift independence)."""
    return induced_map_on_homology(apply_functor(F, phi), n)


@dataclass(frozen=True)
class IsoSystem:
    family: ResolutionFamily
    functor: object
    degree: int
    homologies: tuple[FpModule, ...]
    phi: dict = field(compare=False, hash=False)

    def __hash__(self):
        return hash((self.family, self.functor, self.degree))

    def diagram(self) -> IsoDiagram:
        return IsoDiagram(self.homologies, dict(self.phi))


def cocycle_violations(system: IsoSystem) -> list[str]:
    out = []
    k = len(system.homologies)
    phi = system.phi
    for i in range(k):
        if not maps_equal(phi[(i, i)], identity_map(system.homologies[i])):
            out.append(f"phi_{i}{i} != id")
    for i in range(k):
        for j in range(k):
            if not maps_equal(compose(phi[(j, i)], phi[(i, j)]), identity_map(system.homologies[i])):
                out.append(f"phi_{j}{i} is not inverse to phi_{i}{j}")
            for l in range(k):
                if not maps_equal(compose(phi[(j, l)], phi[(i, j)]), phi[(i, l)]):
                    out.append(f"phi_{j}{l} o phi_{i}{j} != phi_{i}{l}")
    return out


def check_cocycle(system: IsoSystem) -> None:
    problems = cocycle_violations(system)
    if problems:
        raise CocycleViolation("; ".join(problems))


@lru_cache(maxsize=1024)
def canonical_iso_system(F, fam: ResolutionFamily, n: int) -> IsoSystem:
    M = fam.module
    idM = identity_map(M)
    groups = tuple(functor_homology(F, P, n).group for P in fam.members)
    phi = {(i, j): theta(F, idM, P, Q, n)
           for i, P in enumerate(fam.members) for j, Q in enumerate(fam.members)}
    system = IsoSystem(fam, F, n, groups, phi)
    check_cocycle(system)
    return system


@dataclass(frozen=True)
class DerivedValue:
    module: FpModule
    functor: object
    degree: int
    family: ResolutionFamily
    system: IsoSystem
    limit: LimitObject

    @property
    def group(self) -> FpModule:
        return self.limit.group

    def projection(self, i: int) -> ModuleMap:
        return self.limit.projections[i]


@lru_cache(maxsize=1024)
def derived_object(F, M: FpModule, n: int, k: int = 3, seed: int = 0, pad: int = 0) -> DerivedValue:
    """``L_n F(M)`` as the limit over the size-``k`` resolution family of ``M``."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    fam = resolution_family(M, k, seed, pad=pad)
    system = canonical_iso_system(F, fam, n)
    lim = limit(system.diagram())
    for p in lim.projections:
        assert is_isomorphism(p), "limit projection is not an isomorphism"
    return DerivedValue(M, F, n, fam, system, lim)


@dataclass(frozen=True)
class DerivedMap:
    source: DerivedValue
    target: DerivedValue
    map: ModuleMap
    f: ModuleMap


def _rho_bar(F, f, P, target: DerivedValue, n) -> ModuleMap:
    comps = [theta(F, f, P, Q, target.degree) for Q in target.family.members]
    return map_into_limit(target.limit, comps)


@lru_cache(maxsize=4096)
def derived_map(F, f: ModuleMap, n: int, k: int = 3, seed: int = 0, pad: int = 0) -> DerivedMap:
    """``L_n F(f)`` between the limit groups of the source and target."""
    DM = derived_object(F, f.source, n, k, seed, pad)
    DN = derived_object(F, f.target, n, k, seed, pad)
    rho = []
    for P in DM.family.members:
        try:
            rho.append(_rho_bar(F, f, P, DN, n))
        except IncompatibleComponents as exc:
            raise IncompatibleComponents(f"theta components are not coherent: {exc}") from exc
    phi = DM.system.phi
    for i in range(len(rho)):
        for j in range(len(rho)):
            if not maps_equal(compose(rho[j], phi[(i, j)]), rho[i]):
                raise IncompatibleComponents(f"rho_bar depends on the member: ({i},{j})")
    out = compose(rho[0], DM.projection(0))
    for i in range(1, len(rho)):
        if not maps_equal(compose(rho[i], DM.projection(i)), out):
            raise IncompatibleComponents(f"induced map depends on member {i}")
    # projections of the result agree with theta for every pair of members
    for i, P in enumerate(DM.family.members):
        for j, Q in enumerate(DN.family.members):
            lhs = compose(DN.projection(j), out)
            rhs = compose(theta(F, f, P, Q, n), DM.projection(i))
            if not maps_equal(lhs, rhs):
                raise IncompatibleComponents(f"projection square ({i},{j}) does not commute")
    return DerivedMap(DM, DN, out, f)


def compose_check(F, f: ModuleMap, g: ModuleMap, n: int, k: int = 3, seed: int = 0) -> bool:
    """``L_n F(g o f) == L_n F(g) o L_n F(f)`` and the theta-level law on the canonical members."""
    gf = compose(g, f)
    Lf = derived_map(F, f, n, k, seed)
    Lg = derived_map(F, g, n, k, seed)
    Lgf = derived_map(F, gf, n, k, seed)
    ok = maps_equal(Lgf.map, compose(Lg.map, Lf.map))
    P1 = Lf.source.family[0]
    P2 = Lf.target.family[0]
    P3 = Lg.target.family[0]
    ok = ok and maps_equal(compose(theta(F, g, P2, P3, n), theta(F, f, P1, P2, n)), theta(F, gf, P1, P3, n))
    return ok


def identity_check(F, M: FpModule, n: int, k: int = 3, seed: int = 0) -> bool:
    D = derived_map(F, identity_map(M), n, k, seed)
    return maps_equal(D.map, identity_map(D.source.group))


def change_of_resolution_holds(F, f: ModuleMap, P1, P2, Q1, Q2, n: int) -> bool:
    """``theta(f; P1, P2) == phi_N(Q2, P2) o theta(f; Q1, Q2) o phi_M(P1, Q1)``."""
    idM = identity_map(f.source)
    idN = identity_map(f.target)
    rhs = compose(theta(F, idN, Q2, P2, n), compose(theta(F, f, Q1, Q2, n), theta(F, idM, P1, Q1, n)))
    return maps_equal(theta(F, f, P1, P2, n), rhs)


def compare_external(F, M: FpModule, n: int, k: int, seed: int, Q: FreeResolution) -> ModuleMap:
    """Canonical isomorphism ``H_n(F Q) -> L_n F(M)`` for an arbitrary resolution ``Q``."""
    if not is_resolution(Q, M):
        raise NotAResolution("Q is not a free resolution of M")
    D = derived_object(F, M, n, k, seed)
    idM = identity_map(M)
    comps = [theta(F, idM, Q, P, n) for P in D.family.members]
    h = map_into_limit(D.limit, comps)
    assert is_isomorphism(h), "comparison map is not an isomorphism"
    return h


def augmentation_comparison(F, M: FpModule, k: int = 3, seed: int = 0) -> ModuleMap:
    """``L_0 F(M) -> F(M)`` induced by the augmentations of the family members.

    Each ``H_0(F P^i) = F(P^i_0) / im F(d_1)`` maps to ``F(M)`` by ``F(eps_i)``;
    the maps agree after projection from the limit, and the result is
    checked to be an isomorphism by the caller.
    """
    D = derived_object(F, M, 0, k, seed)
    FM = F.on_module(M)
    out = None
    for i, P in enumerate(D.family.members):
        H = functor_homology(F, P, 0)
        Feps = F.on_map(P.augmentation).matrix
        A = Feps @ H.cycles_basis
        ei = compose(ModuleMap(H.group, FM, A), D.projection(i))
        if out is None:
            out = ei
        elif not maps_equal(out, ei):
            raise IncompatibleComponents(f"augmentation maps disagree at member {i}")
    return out
