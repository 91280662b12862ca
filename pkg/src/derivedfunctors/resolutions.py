"""Free resolutions, the canonical finite family of them, and lifting maps.

A resolution of ``M`` is a complex of free modules ``P`` with an
augmentation ``eps: P_0 -> M`` such that ``... -> P_1 -> P_0 -> M -> 0`` is
exact.  Over the integers every f.p. group has one of length at most one,
read straight off its presentation.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from typing import Optional, Sequence

from derivedfunctors.complexes import ChainComplex, ChainMap, make_chain_map, make_complex
from derivedfunctors.exact_linalg import (
    IntMatrix,
    hermite_rows,
    hstack,
    kernel_basis,
    same_lattice,
    solve,
    solve_matrix,
)
from derivedfunctors.fp_modules import (
    FpModule,
    ModuleMap,
    compose,
    free_module,
    is_surjective,
    is_zero_map,
    kernel_lattice,
    maps_equal,
)


@dataclass(frozen=True)
class FreeResolution:
    complex: ChainComplex
    augmentation: ModuleMap

    @property
    def module(self) -> FpModule:
        return self.augmentation.target

    @property
    def length(self) -> int:
        return self.complex.length

    @property
    def rank(self) -> tuple[int, int]:
        """Size measure ``(length, total free rank)``, compared lexicographically."""
        return (self.length, sum(P.generators for P in self.complex.objects))

    def key(self) -> tuple:
        return (tuple(d.matrix for d in self.complex.differentials), self.augmentation.matrix)


@dataclass(frozen=True)
class ResolutionFamily:
    module: FpModule
    members: tuple[FreeResolution, ...]
    requested: int
    seed: int

    @property
    def rank(self) -> tuple[int, int]:
        return self.members[0].rank

    def __len__(self) -> int:
        return len(self.members)

    def __getitem__(self, i: int) -> FreeResolution:
        return self.members[i]


def _free_complex(ranks: Sequence[int], matrices: Sequence[IntMatrix]) -> ChainComplex:
    objects = [free_module(r) for r in ranks]
    return make_complex(objects, [ModuleMap(objects[n + 1], objects[n], A, checked=False)
                                  for n, A in enumerate(matrices)], check=False)


def canonical_resolution(M: FpModule) -> FreeResolution:
    """``0 -> Z^r -> Z^g -> M`` with the relations replaced by their Hermite basis."""
    g = M.generators
    rows = hermite_rows(M.relations.to_rows(), g)
    P0 = free_module(g)
    eps = ModuleMap(P0, M, IntMatrix.identity(g), checked=False)
    if not rows:
        return FreeResolution(_free_complex([g], []), eps)
    d1 = IntMatrix.from_rows(rows, g).T
    C = _free_complex([g, len(rows)], [d1])
    return FreeResolution(C, ModuleMap(C.objects[0], M, IntMatrix.identity(g), checked=False))


def pad_resolution(P: FreeResolution, times: int = 1) -> FreeResolution:
    """Append ``times`` exact tails ``Z --id--> Z --0--> P_top``.

    Homology of any additive functor applied to the padded complex agrees
    with the original, but degrees above the old top become nontrivial
    complexes.
    """
    ranks = [Q.generators for Q in P.complex.objects]
    mats = [d.matrix for d in P.complex.differentials]
    for _ in range(times):
        mats.append(IntMatrix.zeros(ranks[-1], 1))
        mats.append(IntMatrix.identity(1))
        ranks.extend([1, 1])
    C = _free_complex(ranks, mats)
    return FreeResolution(C, ModuleMap(C.objects[0], P.module, P.augmentation.matrix, checked=False))


def unimodular_inverse(U: IntMatrix) -> IntMatrix:
    X = solve_matrix(U, IntMatrix.identity(U.rows))
    if X is None:
        raise ValueError("matrix is not unimodular")
    return X


def twist_resolution(P: FreeResolution, transforms: Sequence[IntMatrix]) -> FreeResolution:
    """Change basis in each degree: ``d'_n = U_{n-1}^{-1} d_n U_n``, ``eps' = eps U_0``.

    ``U_n`` is then a chain isomorphism from the twisted resolution to ``P``.
    """
    if len(transforms) != len(P.complex.objects):
        raise ValueError("one transform per degree is required")
    inv = [unimodular_inverse(U) for U in transforms]
    mats = [inv[n - 1] @ d.matrix @ transforms[n] for n, d in enumerate(P.complex.differentials, start=1)]
    C = _free_complex([Q.generators for Q in P.complex.objects], mats)
    return FreeResolution(C, ModuleMap(C.objects[0], P.module, P.augmentation.matrix @ transforms[0], checked=False))


def random_unimodular(n: int, rng: random.Random, bound: int = 3) -> IntMatrix:
    """``Perm * Signs * L * R`` with unit-triangular ``L``, ``R`` over ``{-1, 0, 1}``.

    Draws are repeated until every entry is within ``bound``.
    """
    while True:
        perm = list(range(n))
        rng.shuffle(perm)
        signs = [rng.choice((1, -1)) for _ in range(n)]
        L = [[1 if i == j else (rng.randint(-1, 1) if j < i else 0) for j in range(n)] for i in range(n)]
        R = [[1 if i == j else (rng.randint(-1, 1) if j > i else 0) for j in range(n)] for i in range(n)]
        P = IntMatrix.from_rows([[signs[i] if perm[i] == j else 0 for j in range(n)] for i in range(n)], n)
        U = P @ IntMatrix.from_rows(L, n) @ IntMatrix.from_rows(R, n)
        if U.max_abs() <= bound:
            return U


def family_rng(M: FpModule, seed: int, salt: str = "") -> random.Random:
    h = hashlib.sha256(f"family:{seed}:{M.digest()}:{salt}".encode()).digest()
    return random.Random(int.from_bytes(h[:8], "big"))


def resolution_family(M: FpModule, k: int, seed: int = 0, pad: int = 0,
                      max_attempts: Optional[int] = None) -> ResolutionFamily:
    """The canonical resolution plus up to ``k - 1`` distinct seeded twists of it.

    All members share the canonical resolution's size measure.  Small
    presentations have few distinct twists (``Z`` has only two); when the
    orbit is exhausted within ``max_attempts`` draws the family is shorter
    than ``k``.
    """
    if k < 1:
        raise ValueError("family size must be at least 1")
    base = canonical_resolution(M)
    if pad:
        base = pad_resolution(base, pad)
    members = [base]
    seen = {base.key()}
    rng = family_rng(M, seed, f"pad{pad}")
    ranks = [P.generators for P in base.complex.objects]
    attempts = 0
    limit = max_attempts if max_attempts is not None else 64 * k
    while len(members) < k and attempts < limit:
        attempts += 1
        Us = [random_unimodular(r, rng) for r in ranks]
        Q = twist_resolution(base, Us)
        if Q.key() in seen:
            continue
        seen.add(Q.key())
        members.append(Q)
    for Q in members:
        assert is_resolution(Q, M), "twisted member failed exactness"
    return ResolutionFamily(M, tuple(members), k, seed)


def is_resolution(P: FreeResolution, M: FpModule) -> bool:
    C = P.complex
    eps = P.augmentation
    if eps.target != M or eps.source != C.obj(0):
        return False
    if not all(Q.is_free for Q in C.objects):
        return False
    if not C.is_valid():
        return False
    if C.length >= 1 and not is_zero_map(compose(eps, C.d(1))):
        return False
    if not is_surjective(eps):
        return False
    if not same_lattice(kernel_lattice(eps), C.d(1).matrix if C.length >= 1 else IntMatrix.zeros(C.obj(0).generators, 0)):
        return False
    for n in range(1, C.length + 1):
        Z = kernel_basis(C.d(n).matrix)
        B = C.d(n + 1).matrix
        if not same_lattice(Z, B):
            return False
    return True


def lift_map(f: ModuleMap, P: FreeResolution, Q: FreeResolution,
             perturb: Optional[random.Random] = None, bound: int = 2) -> ChainMap:
    """A chain map ``P -> Q`` over ``f``, built degree by degree.

    Each component is the deterministic solution of its lifting equation.
    With ``perturb`` set, a random combination (coefficients in
    ``[-bound, bound]``) of the solution-space kernel is added in every
    degree, which yields another member of the same homotopy class.
    """
    if f.source != P.module or f.target != Q.module:
        raise ValueError("resolutions do not resolve the ends of the map")
    N = f.target
    CP, CQ = P.complex, Q.complex
    comps = []
    # degree 0: eps_Q F_0 = f eps_P  modulo the relations of N
    system = hstack([Q.augmentation.matrix, N.relation_lattice])
    rhs = f.matrix @ P.augmentation.matrix
    g0 = CQ.obj(0).generators
    K = kernel_basis(system) if perturb is not None else None
    cols = []
    for j in range(rhs.cols):
        x = solve(system, rhs.column(j))
        assert x is not None, "augmentation of Q is not surjective"
        x = list(x[:g0])
        if K is not None:
            x = _perturb(x, [K.column(t)[:g0] for t in range(K.cols)], perturb, bound)
        cols.append(x)
    comps.append(IntMatrix.from_columns(cols, g0))
    for n in range(1, CP.length + 1):
        rhs = comps[n - 1] @ CP.d(n).matrix
        gn = CQ.obj(n).generators
        if n > CQ.length:
            assert rhs.is_zero(), "lifting obstruction: Q is not exact"
            comps.append(IntMatrix.zeros(0, CP.obj(n).generators))
            continue
        D = CQ.d(n).matrix
        X = solve_matrix(D, rhs)
        assert X is not None, "lifting obstruction: Q is not exact"
        if perturb is not None:
            Kn = kernel_basis(D)
            X = IntMatrix.from_columns(
                [_perturb(list(X.column(j)), Kn.columns(), perturb, bound) for j in range(X.cols)], gn)
        comps.append(X)
    phi = make_chain_map(CP, CQ, [ModuleMap(CP.obj(n), CQ.obj(n), A, checked=False) for n, A in enumerate(comps)])
    lhs = compose(Q.augmentation, phi.at(0))
    rhs_map = compose(f, P.augmentation)
    assert maps_equal(lhs, rhs_map), "degree-0 square does not commute"
    return phi


def _perturb(x, kernel_vectors, rng, bound):
    for k in kernel_vectors:
        c = rng.randint(-bound, bound)
        if c:
            x = [a + c * b for a, b in zip(x, k)]
    return x
