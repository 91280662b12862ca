"""Finitely presented abelian groups and the maps between them.

A module ``M`` is ``Z^g / R`` where ``R`` is the row lattice of its
relations matrix.  Elements are integer vectors of length ``g`` and a map
``M -> N`` is a matrix acting on generator columns.  Two modules are equal
only when their presentations are identical; isomorphism is a separate,
certified relation (:func:`is_isomorphism`).
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from derivedfunctors.errors import NotWellDefined, ShapeError
from derivedfunctors.exact_linalg import (
    IntMatrix,
    hermite_rows,
    hstack,
    kernel_basis,
    preimage,
    smith_normal_form,
    solve,
    solve_matrix,
)


@dataclass(frozen=True)
class FpModule:
    generators: int
    relations: IntMatrix

    def __post_init__(self):
        if self.relations.cols != self.generators:
            raise ShapeError(
                f"relations have {self.relations.cols} columns for {self.generators} generators")

    @property
    def relation_lattice(self) -> IntMatrix:
        """Relations as columns: the lattice ``Z^g`` is divided by."""
        return self.relations.T

    @property
    def is_free(self) -> bool:
        return self.relations.rows == 0

    def digest(self) -> str:
        h = hashlib.sha256(f"{self.generators}:{self.relations.to_rows()}".encode())
        return h.hexdigest()

    def __repr__(self) -> str:
        return f"FpModule({self.generators}, {self.relations.to_rows()})"


@dataclass(frozen=True)
class CanonicalForm:
    torsion: tuple[int, ...]
    free_rank: int

    @property
    def is_trivial(self) -> bool:
        return not self.torsion and self.free_rank == 0

    @property
    def order(self) -> Optional[int]:
        """Group order, or ``None`` for an infinite group."""
        if self.free_rank:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.torsion] + ["Z"] * self.free_rank
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class ModuleMap:
    source: FpModule
    target: FpModule
    matrix: IntMatrix
    checked: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if self.matrix.shape != (self.target.generators, self.source.generators):
            raise ShapeError(
                f"map matrix has shape {self.matrix.shape}, expected "
                f"{(self.target.generators, self.source.generators)}")
        if self.checked and not _well_defined(self.source, self.target, self.matrix):
            raise NotWellDefined("matrix does not send relations of the source into relations of the target")

    def __call__(self, x: Sequence[int]) -> tuple[int, ...]:
        return self.matrix.apply(x)


def make_module(generators: int, relations) -> FpModule:
    if not isinstance(relations, IntMatrix):
        relations = IntMatrix.from_rows(relations, generators)
    return FpModule(generators, relations)


def free_module(rank: int) -> FpModule:
    return FpModule(rank, IntMatrix.zeros(0, rank))


def cyclic(n: int) -> FpModule:
    """``Z/n`` on one generator (``n = 0`` gives ``Z``)."""
    return FpModule(1, IntMatrix.from_rows([[n]]) if n else IntMatrix.zeros(0, 1))


def zero_module() -> FpModule:
    return FpModule(0, IntMatrix.zeros(0, 0))


def direct_sum(*modules: FpModule) -> FpModule:
    from derivedfunctors.exact_linalg import block_diagonal
    g = sum(m.generators for m in modules)
    rels = block_diagonal([m.relations for m in modules])
    return FpModule(g, rels if rels.rows else IntMatrix.zeros(0, g))


def canonical_form(M: FpModule) -> CanonicalForm:
    diag = smith_normal_form(M.relations).diagonal
    nonzero = [d for d in diag if d]
    return CanonicalForm(tuple(d for d in nonzero if d > 1), M.generators - len(nonzero))


def in_relations(M: FpModule, vectors: IntMatrix) -> bool:
    """Whether every column of ``vectors`` lies in the relation lattice of ``M``."""
    if vectors.cols == 0 or vectors.is_zero():
        return True
    return solve_matrix(M.relation_lattice, vectors) is not None


def _well_defined(M: FpModule, N: FpModule, A: IntMatrix) -> bool:
    if M.relations.rows == 0:
        return True
    return in_relations(N, A @ M.relation_lattice)


def make_map(M: FpModule, N: FpModule, A) -> ModuleMap:
    if not isinstance(A, IntMatrix):
        A = IntMatrix.from_rows(A, M.generators)
    return ModuleMap(M, N, A)


def identity_map(M: FpModule) -> ModuleMap:
    return ModuleMap(M, M, IntMatrix.identity(M.generators), checked=False)


def zero_map(M: FpModule, N: FpModule) -> ModuleMap:
    return ModuleMap(M, N, IntMatrix.zeros(N.generators, M.generators), checked=False)


def _same_ends(f: ModuleMap, g: ModuleMap):
    if f.source != g.source or f.target != g.target:
        raise ShapeError("maps do not share source and target")


def maps_equal(f: ModuleMap, g: ModuleMap) -> bool:
    _same_ends(f, g)
    if f.matrix == g.matrix:
        return True
    return in_relations(f.target, f.matrix - g.matrix)


def is_zero_map(f: ModuleMap) -> bool:
    return in_relations(f.target, f.matrix)


def compose(g: ModuleMap, f: ModuleMap) -> ModuleMap:
    """``g after f``."""
    if f.target != g.source:
        raise ShapeError("compose: target of f is not the source of g")
    return ModuleMap(f.source, g.target, g.matrix @ f.matrix, checked=False)


def add_maps(f: ModuleMap, g: ModuleMap) -> ModuleMap:
    _same_ends(f, g)
    return ModuleMap(f.source, f.target, f.matrix + g.matrix, checked=False)


def sub_maps(f: ModuleMap, g: ModuleMap) -> ModuleMap:
    _same_ends(f, g)
    return ModuleMap(f.source, f.target, f.matrix - g.matrix, checked=False)


def kernel_lattice(f: ModuleMap) -> IntMatrix:
    """Columns spanning ``{x in Z^g : f(x) in relations of the target}``."""
    return preimage(f.matrix, f.target.relation_lattice)


def kernel(f: ModuleMap) -> tuple[FpModule, ModuleMap]:
    """Presentation of ``ker f`` together with its inclusion into the source."""
    K = kernel_lattice(f)
    rels = solve_matrix(K, f.source.relation_lattice)
    assert rels is not None, "source relations must lie in the kernel lattice"
    rows = hermite_rows(rels.columns(), K.cols)
    Km = FpModule(K.cols, IntMatrix.from_rows(rows, K.cols))
    return Km, ModuleMap(Km, f.source, K, checked=False)


def cokernel(f: ModuleMap) -> tuple[FpModule, ModuleMap]:
    """Presentation of ``coker f`` and the quotient map from the target."""
    N = f.target
    rows = list(N.relations.to_rows()) + [list(c) for c in f.matrix.columns()]
    C = FpModule(N.generators, IntMatrix.from_rows(rows, N.generators))
    return C, ModuleMap(N, C, IntMatrix.identity(N.generators), checked=False)


def is_injective(f: ModuleMap) -> bool:
    K = kernel_lattice(f)
    return in_relations(f.source, K)


def is_surjective(f: ModuleMap) -> bool:
    return canonical_form(cokernel(f)[0]).is_trivial


def is_isomorphism(f: ModuleMap) -> bool:
    return is_surjective(f) and is_injective(f)


def lift_through(f: ModuleMap, g: ModuleMap) -> Optional[ModuleMap]:
    """Some ``h`` with ``f after h == g``, or ``None``.

    ``f: M -> N`` and ``g: S -> N``.  Each generator image of ``g`` is
    pulled back modulo the relations of ``N``; the result is only checked
    for well-definedness, so ``h`` is unique only when ``f`` is injective.
    """
    if f.target != g.target:
        raise ShapeError("lift_through: maps must share a target")
    N = f.target
    system = hstack([f.matrix, N.relation_lattice])
    cols = []
    for j in range(g.matrix.cols):
        x = solve(system, g.matrix.column(j))
        if x is None:
            return None
        cols.append(x[:f.matrix.cols])
    H = IntMatrix.from_columns(cols, f.source.generators)
    try:
        return ModuleMap(g.source, f.source, H)
    except NotWellDefined:
        return None


def inverse(f: ModuleMap) -> ModuleMap:
    if not is_isomorphism(f):
        raise ValueError("map is not an isomorphism")
    h = lift_through(f, identity_map(f.target))
    assert h is not None
    return h


# hom groups -------------------------------------------------------------

def hom_basis(M: FpModule, N: FpModule) -> list[IntMatrix]:
    """Matrices spanning the lattice of well-defined matrices ``M -> N``.

    Unknowns are the entries of ``A`` (row-major); the condition is that
    ``A`` applied to each relation of ``M`` lies in the relations of ``N``.
    """
    gM, gN = M.generators, N.generators
    nvars = gM * gN
    if M.relations.rows == 0:
        return [IntMatrix.from_entries(gN, gM, [1 if k == v else 0 for k in range(nvars)]) for v in range(nvars)]
    RM = M.relation_lattice
    rows = []
    for rel in range(RM.cols):
        for a in range(gN):
            row = [0] * nvars
            for b in range(gM):
                row[a * gM + b] = RM[b, rel]
            rows.append(row)
    coeff = IntMatrix.from_rows(rows, nvars)
    slack = IntMatrix.identity(RM.cols).kron(N.relation_lattice) if N.relations.rows else None
    if slack is None:
        K = kernel_basis(coeff)
    else:
        K = preimage(coeff, slack)
    return [IntMatrix.from_entries(gN, gM, K.column(j)) for j in range(K.cols)]


# finite enumeration -----------------------------------------------------

def reduction_basis(M: FpModule) -> list[tuple[int, ...]]:
    """Hermite basis of the relation lattice; square upper triangular when finite."""
    return hermite_rows(M.relations.to_rows(), M.generators)


def reduce_element(H: Sequence[Sequence[int]], x: Sequence[int]) -> tuple[int, ...]:
    """Canonical representative of ``x`` modulo the lattice with Hermite basis ``H``."""
    x = list(x)
    for row in H:
        col = next(c for c, v in enumerate(row) if v)
        q = x[col] // row[col]
        if q:
            for c in range(col, len(x)):
                x[c] -= q * row[c]
    return tuple(x)


def elements(M: FpModule) -> Iterator[tuple[int, ...]]:
    """Enumerate canonical representatives of every element of a finite ``M``."""
    H = reduction_basis(M)
    if len(H) != M.generators:
        raise ValueError("module is infinite")
    ranges = [range(H[i][i]) for i in range(M.generators)]
    return itertools.product(*ranges)


# tensor -------------------------------------------------------------------

def tensor(M: FpModule, A: FpModule) -> FpModule:
    """Presentation of ``M (x) A``.

    Generator ``(i, a)`` sits at index ``i * A.generators + a``.  Relations are
    the relations of ``M`` against each generator of ``A``, then each
    generator of ``M`` against the relations of ``A``.
    """
    gM, gA = M.generators, A.generators
    left = M.relations.kron(IntMatrix.identity(gA))
    right = IntMatrix.identity(gM).kron(A.relations)
    rows = list(left.to_rows()) + list(right.to_rows())
    return FpModule(gM * gA, IntMatrix.from_rows(rows, gM * gA))


def tensor_map(f: ModuleMap, A: FpModule) -> ModuleMap:
    return ModuleMap(tensor(f.source, A), tensor(f.target, A), f.matrix.kron(IntMatrix.identity(A.generators)),
                     checked=False)


# canonical presentation ------------------------------------------------------

def canonical_module(form: CanonicalForm) -> FpModule:
    """``Z/d_1 + ... + Z/d_t + Z^r`` on ``t + r`` generators."""
    t = len(form.torsion)
    rows = [[d if j == i else 0 for j in range(t + form.free_rank)] for i, d in enumerate(form.torsion)]
    return FpModule(t + form.free_rank, IntMatrix.from_rows(rows, t + form.free_rank))


def to_canonical(M: FpModule) -> ModuleMap:
    """Isomorphism from ``M`` onto the presentation :func:`canonical_module` builds.

    With ``U R V = D`` the relation lattice is spanned by the columns of
    ``R^T = V^{-T} D^T U^{-T}``, so ``x -> V^T x`` carries it onto the
    diagonal lattice; coordinates with ``d_i = 1`` are dropped.
    """
    snf = smith_normal_form(M.relations)
    g = M.generators
    keep = [i for i in range(g) if i >= len(snf.diagonal) or snf.diagonal[i] != 1]
    form = canonical_form(M)
    return ModuleMap(M, canonical_module(form), snf.V.T.select_rows(keep), checked=False)


def transport(f: ModuleMap) -> ModuleMap:
    """``f`` rewritten between canonical presentations, entries reduced mod the target orders."""
    a = to_canonical(f.source)
    b = to_canonical(f.target)
    ainv = inverse(a)
    g = compose(b, compose(f, ainv))
    tgt = g.target
    t = tgt.relations.rows
    rows = []
    for i, row in enumerate(g.matrix.to_rows()):
        if i < t:
            d = tgt.relations[i, i]
            row = [x % d for x in row]
        rows.append(row)
    return ModuleMap(g.source, tgt, IntMatrix.from_rows(rows, g.source.generators), checked=False)
