"""Invariant suites run by ``derivedfunctors verify``.

Each suite walks a seeded corpus and stops at its first counterexample,
which is returned fully serialized (inputs plus the matrices involved).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from derivedfunctors.complexes import are_homotopic
from derivedfunctors.corpus import finite_group_corpus, module_corpus, random_iso_diagram, random_map
from derivedfunctors.derived import (
    IsoSystem,
    TensorFunctor,
    augmentation_comparison,
    canonical_iso_system,
    check_cocycle,
    compose_check,
    identity_check,
    theta_from_lift,
)
from derivedfunctors.errors import CocycleViolation, IncompatibleComponents
from derivedfunctors.fp_modules import (
    FpModule,
    ModuleMap,
    canonical_form,
    is_isomorphism,
    maps_equal,
    zero_map,
)
from derivedfunctors.limits import brute_force_limit, limit, limit_elements
from derivedfunctors.resolutions import lift_map, resolution_family


def module_json(M: FpModule) -> dict:
    return {"generators": M.generators, "relations": M.relations.to_rows()}


def map_json(f: ModuleMap) -> dict:
    return {"source": module_json(f.source), "target": module_json(f.target), "matrix": f.matrix.to_rows()}


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    counterexample: Optional[dict] = None
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.counterexample is None

    def to_json(self) -> dict:
        out = {"suite": self.name, "cases": self.cases, "passed": self.passed}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


def _system_json(system: IsoSystem) -> dict:
    return {
        "degree": system.degree,
        "homologies": [module_json(H) for H in system.homologies],
        "phi": {f"{i},{j}": m.matrix.to_rows() for (i, j), m in sorted(system.phi.items())},
    }


def inject_fault(system: IsoSystem) -> Optional[IsoSystem]:
    """Replace ``phi_01`` by the zero map when that breaks the inverse law."""
    if len(system.homologies) < 2 or canonical_form(system.homologies[0]).is_trivial:
        return None
    phi = dict(system.phi)
    phi[(0, 1)] = zero_map(system.homologies[0], system.homologies[1])
    return IsoSystem(system.family, system.functor, system.degree, system.homologies, phi)


def suite_cocycle(corpus, seed: int, sizes=(1, 2, 3), degrees=(0, 1), fault: bool = False) -> SuiteResult:
    res = SuiteResult("cocycle")
    injected = False
    for M, A in corpus:
        F = TensorFunctor(A)
        for k in sizes:
            fam = resolution_family(M, k, seed)
            for n in degrees:
                res.cases += 1
                system = None
                try:
                    system = canonical_iso_system(F, fam, n)
                    if fault and not injected:
                        bad = inject_fault(system)
                        if bad is not None:
                            injected = True
                            system = bad
                            check_cocycle(system)
                except CocycleViolation as exc:
                    res.counterexample = {
                        "error": "CocycleViolation", "message": str(exc),
                        "module": module_json(M), "coefficients": module_json(A), "family_size": k,
                        "seed": seed, "system": _system_json(system) if system else None,
                    }
                    return res
    return res


def suite_homotopy(corpus, seed: int, cases: int = 20) -> SuiteResult:
    res = SuiteResult("homotopy-independence")
    rng = random.Random(seed ^ 0x5EED)
    for t in range(min(cases, len(corpus))):
        M, A = corpus[t]
        N = corpus[(t + 1) % len(corpus)][0]
        F = TensorFunctor(A)
        f = random_map(rng, M, N)
        famM = resolution_family(M, 3, seed)
        famN = resolution_family(N, 3, seed)
        P = famM[rng.randrange(len(famM))]
        Q = famN[rng.randrange(len(famN))]
        first = lift_map(f, P, Q)
        second = lift_map(f, P, Q, perturb=random.Random(rng.getrandbits(32)))
        res.cases += 1
        ok = are_homotopic(first, second)
        detail = "lifts are not homotopic"
        if ok:
            for n in (0, 1):
                if not maps_equal(theta_from_lift(F, first, n), theta_from_lift(F, second, n)):
                    ok, detail = False, f"theta differs in degree {n}"
                    break
        if not ok:
            res.counterexample = {
                "error": detail, "map": map_json(f), "coefficients": module_json(A),
                "lift_a": [c.matrix.to_rows() for c in first.components],
                "lift_b": [c.matrix.to_rows() for c in second.components],
            }
            return res
    return res


def suite_functoriality(corpus, seed: int, cases: int = 30, k: int = 3) -> SuiteResult:
    res = SuiteResult("functoriality")
    rng = random.Random(seed ^ 0xF00D)
    for t in range(cases):
        M, A = corpus[t % len(corpus)]
        N = corpus[(t + 1) % len(corpus)][0]
        O = corpus[(t + 2) % len(corpus)][0]
        F = TensorFunctor(A)
        f = random_map(rng, M, N)
        g = random_map(rng, N, O)
        for n in (0, 1):
            res.cases += 1
            try:
                ok = compose_check(F, f, g, n, k, seed) and identity_check(F, M, n, k, seed)
                error = "composition law fails"
            except IncompatibleComponents as exc:
                ok, error = False, f"IncompatibleComponents: {exc}"
            if not ok:
                res.counterexample = {"error": error, "degree": n, "f": map_json(f), "g": map_json(g),
                                      "coefficients": module_json(A), "family_size": k, "seed": seed}
                return res
    return res


def suite_limit_oracle(seed: int, cases: int = 12) -> SuiteResult:
    res = SuiteResult("limit-oracle")
    rng = random.Random(seed ^ 0x11A1)
    for G in finite_group_corpus(seed, cases):
        D = random_iso_diagram(rng, G, rng.randint(1, 4))
        res.cases += 1
        L = limit(D)
        got = limit_elements(L)
        want = brute_force_limit(D)
        if got != want:
            res.counterexample = {
                "error": "limit differs from brute force", "group": module_json(G),
                "arrows": {f"{i},{j}": a.matrix.to_rows() for (i, j), a in sorted(D.arrows.items())},
                "limit": module_json(L.group), "inclusion": L.inclusion.matrix.to_rows(),
                "missing": sorted(map(list, want - got)), "extra": sorted(map(list, got - want)),
            }
            return res
    return res


def suite_l0(corpus, seed: int, k: int = 3) -> SuiteResult:
    res = SuiteResult("L0-vs-F")
    for M, A in corpus:
        F = TensorFunctor(A)
        res.cases += 1
        e = augmentation_comparison(F, M, k, seed)
        if not is_isomorphism(e):
            res.counterexample = {"error": "augmentation comparison is not an isomorphism",
                                  "module": module_json(M), "coefficients": module_json(A),
                                  "map": e.matrix.to_rows()}
            return res
    return res


def run_all(seed: int, cases: int = 12, bound: int = 12, fault: bool = False) -> list[SuiteResult]:
    corpus = module_corpus(seed, cases, bound)
    return [
        suite_cocycle(corpus, seed, fault=fault),
        suite_homotopy(corpus, seed, cases),
        suite_functoriality(corpus, seed, cases),
        suite_limit_oracle(seed, cases),
        suite_l0(corpus, seed),
    ]
