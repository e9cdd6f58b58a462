"""The relation lattice of an instance and its dual-quotient structure.

The relation lattice L collects integer exponent vectors z with
prod a_i^{z_i} = 1 mod N; the sign sublattice L0 additionally forces
prod b_i^{z_i} into {+-1}.  A vector of L outside L0 exhibits a nontrivial
square root of unity, and gcd then yields a factor.  L is built exactly by
BFS over the Cayley graph of the subgroup generated by the a_i, and the
quotient L*/Z^d is made samplable through a Smith decomposition.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, prod

from . import intmat
from .arith import (
    FactoringInstance,
    ParameterError,
    ResourceLimitError,
    base_product,
    hom_image,
)

GROUP_CAP = 1 << 22
ENUM_CAP = 1 << 22


class DomainError(ValueError):
    """A vector fails a membership precondition."""


@dataclass(frozen=True)
class RelationLattice:
    """Full-rank lattice of exponent relations for one instance.

    `basis` holds d generating vectors in row-echelon (Hermite) form; `det`
    equals the index [Z^d : L], i.e. the order of the subgroup the a_i
    generate.
    """

    inst: FactoringInstance
    basis: tuple[tuple[int, ...], ...]
    det: int

    @property
    def d(self) -> int:
        return self.inst.d

    def contains(self, z) -> bool:
        """Membership via exact lattice algebra (not the homomorphism)."""
        return intmat.lattice_contains([list(r) for r in self.basis], list(z))


def build_relation_lattice(inst: FactoringInstance, group_cap: int = GROUP_CAP) -> RelationLattice:
    """BFS the subgroup <a_1..a_d> of Z_N^*, harvesting one relation per
    cycle-closing edge, and return the Hermite basis of the harvest.

    The BFS-discovered group order is the lattice determinant; it is
    cross-checked against the basis determinant and any mismatch is a hard
    internal error.
    """
    N, d = inst.N, inst.d
    exps: dict[int, tuple[int, ...]] = {1: (0,) * d}
    frontier = [1]
    relations: set[tuple[int, ...]] = set()
    while frontier:
        nxt = []
        for g in frontier:
            eg = exps[g]
            for i, ai in enumerate(inst.a):
                h = g * ai % N
                cand = tuple(x + (1 if j == i else 0) for j, x in enumerate(eg))
                known = exps.get(h)
                if known is None:
                    if len(exps) >= group_cap:
                        raise ResourceLimitError(
                            f"subgroup exceeds cap {group_cap}; shrink N or d"
                        )
                    exps[h] = cand
                    nxt.append(h)
                else:
                    rel = tuple(x - y for x, y in zip(cand, known))
                    if any(rel):
                        relations.add(rel)
        frontier = nxt
    group_order = len(exps)
    rows = intmat.hermite_basis(sorted(relations), d)
    if len(rows) != d:
        raise AssertionError("relation harvest is rank-deficient")
    det = abs(intmat.determinant(rows))
    if det != group_order:
        raise AssertionError(
            f"basis determinant {det} != BFS group order {group_order}"
        )
    return RelationLattice(inst=inst, basis=tuple(tuple(r) for r in rows), det=det)


def in_L0(rel: RelationLattice, z) -> bool:
    """True iff prod b_i^{z_i} mod N lies in {1, N-1}.  Requires z in L."""
    if hom_image(rel.inst, z) != 1:
        raise DomainError("vector is not in the relation lattice")
    bp = base_product(rel.inst, z)
    return bp == 1 or bp == rel.inst.N - 1


def extract_factor(rel: RelationLattice, z) -> int:
    """Nontrivial factor of N from a vector of L \\ L0.

    b = prod b_i^{z_i} is a square root of unity distinct from +-1, so
    gcd(b-1, N) is guaranteed to be proper.  Negative exponents go through
    modular inverses.
    """
    inst = rel.inst
    if hom_image(inst, z) != 1:
        raise DomainError("vector is not in the relation lattice")
    bp = base_product(inst, z)
    if bp == 1 or bp == inst.N - 1:
        raise DomainError("vector lies in the sign sublattice")
    g = gcd(bp - 1, inst.N)
    if not 1 < g < inst.N:
        raise AssertionError("square root of unity failed to split N")
    return g


@dataclass(frozen=True)
class DualStructure:
    """Exact uniform sampling of the finite quotient L*/Z^d.

    Built from a Smith decomposition U B V = diag(s) of a basis matrix B of
    L: mapping x in Z_{s_1} x ... x Z_{s_d} through U^T diag(1/s_i) hits
    every dual coset exactly once, so uniform x gives uniform cosets.
    """

    snf_diag: tuple[int, ...]
    u_transpose: tuple[tuple[int, ...], ...]
    u_inverse: tuple[tuple[int, ...], ...]
    det: int

    @property
    def d(self) -> int:
        return len(self.snf_diag)

    def coset(self, x) -> tuple[Fraction, ...]:
        """Dual coset representative in [0,1)^d for quotient coordinates x."""
        frac = [Fraction(int(xi), si) for xi, si in zip(x, self.snf_diag, strict=True)]
        v = [sum(row[j] * frac[j] for j in range(self.d)) for row in self.u_transpose]
        return tuple(c % 1 for c in v)

    def sample(self, rng) -> tuple[Fraction, ...]:
        x = [int(rng.integers(s)) for s in self.snf_diag]
        return self.coset(x)

    def all_cosets(self):
        for x in itertools.product(*(range(s) for s in self.snf_diag)):
            yield self.coset(x)

    def scaled_coset(self, x) -> tuple[int, ...]:
        """The coset for x, scaled by det into an integer vector mod det."""
        return tuple(
            sum(row[j] * x[j] * (self.det // self.snf_diag[j]) for j in range(self.d))
            % self.det
            for row in self.u_transpose
        )

    def scaled_cosets(self) -> list[tuple[int, ...]]:
        """All cosets scaled by det (integer vectors), for exact mod-det work."""
        return [
            self.scaled_coset(x)
            for x in itertools.product(*(range(s) for s in self.snf_diag))
        ]

    def quotient_reps(self) -> list[tuple[int, ...]]:
        """Coset representatives of the primal quotient Z^d / L."""
        reps = []
        for y in itertools.product(*(range(s) for s in self.snf_diag)):
            u = intmat.mat_vec([list(r) for r in self.u_inverse], list(y))
            reps.append(tuple(u))
        return reps


def dual_structure_from_basis(basis_vectors) -> DualStructure:
    """DualStructure for the lattice generated by the given integer vectors
    (full-rank, square count)."""
    vecs = [list(v) for v in basis_vectors]
    d = len(vecs[0])
    if len(vecs) != d:
        raise ParameterError("need exactly d basis vectors")
    cols = intmat.transpose(vecs)  # columns of the matrix are the vectors
    u, diag, _v = intmat.smith_normal_form(cols)
    if any(s == 0 for s in diag):
        raise ParameterError("basis is rank-deficient")
    det = prod(diag)
    return DualStructure(
        snf_diag=tuple(diag),
        u_transpose=tuple(tuple(r) for r in intmat.transpose(u)),
        u_inverse=tuple(tuple(r) for r in intmat.unimodular_inverse(u)),
        det=det,
    )


def dual_cosets(rel: RelationLattice) -> DualStructure:
    dual = dual_structure_from_basis(rel.basis)
    if dual.det != rel.det:
        raise AssertionError("dual quotient size disagrees with lattice determinant")
    return dual


def shortest_nontrivial_witness(
    rel: RelationLattice, bound, enum_cap: int = ENUM_CAP
):
    """Exhaustive search for a shortest vector of L \\ L0 with norm <= bound.

    Returns the witness as a tuple, or None.  Membership is decided by the
    homomorphism itself, never by lattice algebra.
    """
    d = rel.d
    r = int(bound)
    if r < 0:
        raise ParameterError("bound must be nonnegative")
    volume = (2 * r + 1) ** d
    if volume > enum_cap:
        raise ResourceLimitError(
            f"enumeration volume {volume} exceeds cap {enum_cap}"
        )
    bound_sq = Fraction(bound) ** 2
    inst = rel.inst
    best = None
    best_sq = None
    for z in itertools.product(range(-r, r + 1), repeat=d):
        if not any(z):
            continue
        sq = sum(x * x for x in z)
        if sq > bound_sq:
            continue
        if best_sq is not None and sq >= best_sq:
            continue
        if hom_image(inst, z) != 1:
            continue
        bp = base_product(inst, z)
        if bp == 1 or bp == inst.N - 1:
            continue
        best, best_sq = tuple(z), sq
    return best
