"""Exact-rational LLL reduction, short-generator extraction, and the
extended lattice that embeds noisy dual samples.

All arithmetic is over Python ints and Fractions: at desk-scale dimensions
exactness is affordable and removes every floating-point soundness question
from the downstream guarantees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import intmat
from .arith import ParameterError


class LatticeError(ValueError):
    """Rank-deficient or otherwise unusable basis input."""


@dataclass(frozen=True)
class LatticeBasis:
    """Integer basis vectors of a full-rank lattice.

    `denominator` scales the whole lattice by 1/denominator for rational
    lattices; nothing in this package needs it after the integral embedding
    choice, but callers may carry it.
    """

    vectors: tuple[tuple[int, ...], ...]
    denominator: int = 1

    def __post_init__(self):
        if not self.vectors:
            raise LatticeError("empty basis")
        k = len(self.vectors[0])
        if any(len(v) != k for v in self.vectors):
            raise LatticeError("ragged basis")
        if self.denominator < 1:
            raise ParameterError("denominator must be positive")

    @property
    def rank(self) -> int:
        return len(self.vectors)


def _as_basis(basis) -> LatticeBasis:
    if isinstance(basis, LatticeBasis):
        return basis
    return LatticeBasis(vectors=tuple(tuple(int(x) for x in v) for v in basis))


def gram_schmidt(vectors):
    """Exact Gram-Schmidt data: (mu, b_star, sq_norms) over Fractions."""
    n = len(vectors)
    mu = [[Fraction(0)] * n for _ in range(n)]
    b_star: list[list[Fraction]] = []
    sq: list[Fraction] = []
    for i in range(n):
        v = [Fraction(x) for x in vectors[i]]
        for j in range(i):
            if sq[j] == 0:
                raise LatticeError("rank-deficient basis")
            mu_ij = sum(Fraction(vectors[i][t]) * b_star[j][t] for t in range(len(v))) / sq[j]
            mu[i][j] = mu_ij
            v = [a - mu_ij * b for a, b in zip(v, b_star[j])]
        b_star.append(v)
        sq.append(sum(x * x for x in v))
    if any(s == 0 for s in sq):
        raise LatticeError("rank-deficient basis")
    return mu, b_star, sq


def gram_schmidt_sq_norms(vectors) -> list[Fraction]:
    return gram_schmidt(vectors)[2]


def _nearest_int(x: Fraction) -> int:
    # round half away from the lattice point is fine; ties pick the floor side
    return (2 * x.numerator + x.denominator) // (2 * x.denominator)


@dataclass(frozen=True)
class LLLResult:
    basis: LatticeBasis
    transform: tuple[tuple[int, ...], ...]  # output rows = transform @ input rows
    gs_sq_norms: tuple[Fraction, ...]
    delta: Fraction


def lll_reduce(basis, delta=Fraction(3, 4)) -> LLLResult:
    """LLL-reduce a full-rank integer basis with exact rational arithmetic.

    Output spans the same lattice (the unimodular transform is returned),
    is size-reduced (|mu_ij| <= 1/2), and satisfies the Lovasz condition
    with the given delta; at the default delta = 3/4 consecutive
    Gram-Schmidt norms decay by at most sqrt(2).
    """
    delta = Fraction(delta)
    if not Fraction(1, 4) < delta <= 1:
        raise ParameterError("delta must lie in (1/4, 1]")
    b = _as_basis(basis)
    vecs = [list(v) for v in b.vectors]
    n = len(vecs)
    trans = intmat.identity(n)
    mu, _bs, sq = gram_schmidt(vecs)

    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = _nearest_int(mu[k][j])
            if q:
                vecs[k] = [a - q * c for a, c in zip(vecs[k], vecs[j])]
                trans[k] = [a - q * c for a, c in zip(trans[k], trans[j])]
                for t in range(j):
                    mu[k][t] -= q * mu[j][t]
                mu[k][j] -= q
        if n > 1 and sq[k] < (delta - mu[k][k - 1] ** 2) * sq[k - 1]:
            vecs[k - 1], vecs[k] = vecs[k], vecs[k - 1]
            trans[k - 1], trans[k] = trans[k], trans[k - 1]
            mu, _bs, sq = gram_schmidt(vecs)
            k = max(k - 1, 1)
        else:
            k += 1
    return LLLResult(
        basis=LatticeBasis(
            vectors=tuple(tuple(v) for v in vecs), denominator=b.denominator
        ),
        transform=tuple(tuple(r) for r in trans),
        gs_sq_norms=tuple(gram_schmidt(vecs)[2]),
        delta=delta,
    )


def extract_short_generators(basis, T=None, norm_bound_sq=None) -> list[tuple[int, ...]]:
    """Generators covering every lattice vector of norm <= T.

    LLL-reduce, then keep the prefix z_1..z_l where l is the first index
    whose Gram-Schmidt norm reaches 2^{k/2} T (all k vectors if none does).
    Every returned vector has norm at most sqrt(k) 2^{k/2} T, and any
    lattice vector of norm <= T is an integer combination of the output.

    Pass either T (any real; exact if int/Fraction) or norm_bound_sq = T^2.
    """
    if (T is None) == (norm_bound_sq is None):
        raise ParameterError("pass exactly one of T, norm_bound_sq")
    t_sq = Fraction(norm_bound_sq) if norm_bound_sq is not None else Fraction(T) ** 2
    if t_sq <= 0:
        raise ParameterError("norm bound must be positive")
    reduced = lll_reduce(basis)
    k = reduced.basis.rank
    threshold = (1 << k) * t_sq  # (2^{k/2} T)^2, compared exactly
    ell = k
    for i, g in enumerate(reduced.gs_sq_norms):
        if g >= threshold:
            ell = i
            break
    return [tuple(v) for v in reduced.basis.vectors[:ell]]


def enumerate_lattice_vectors(basis, norm_bound=None, norm_bound_sq=None) -> list[tuple[int, ...]]:
    """All nonzero lattice vectors of norm <= the bound, exactly.

    Fincke-Pohst enumeration over exact Gram-Schmidt data; float square
    roots are only used to bracket coefficient ranges, every candidate is
    admitted or rejected by an exact rational comparison.
    """
    if (norm_bound is None) == (norm_bound_sq is None):
        raise ParameterError("pass exactly one of norm_bound, norm_bound_sq")
    t_sq = (
        Fraction(norm_bound_sq)
        if norm_bound_sq is not None
        else Fraction(norm_bound) ** 2
    )
    b = _as_basis(basis)
    vecs = [list(v) for v in b.vectors]
    n = len(vecs)
    mu, _bs, sq = gram_schmidt(vecs)
    out: list[tuple[int, ...]] = []
    coeffs = [0] * n

    def descend(i: int, remaining: Fraction):
        shift = sum(coeffs[t] * mu[t][i] for t in range(i + 1, n))
        # |x + shift| <= sqrt(remaining / sq[i]); bracket with slack, verify exactly
        radius = math.sqrt(float(remaining / sq[i])) + 1.0
        center = float(-shift)
        for x in range(math.floor(center - radius), math.ceil(center + radius) + 1):
            used = (x + shift) ** 2 * sq[i]
            if used > remaining:
                continue
            coeffs[i] = x
            if i == 0:
                if any(coeffs):
                    vec = [0] * len(vecs[0])
                    for c, bv in zip(coeffs, vecs):
                        if c:
                            vec = [a + c * e for a, e in zip(vec, bv)]
                    out.append(tuple(vec))
            else:
                descend(i - 1, remaining - used)
        coeffs[i] = 0

    descend(n - 1, t_sq)
    return out


@dataclass(frozen=True)
class ExtendedLattice:
    """The (d+m)-dimensional integral embedding of m noisy dual samples.

    With scale S a multiple of the grid denominator D and samples w_i on
    the 1/D grid, the block matrix [[I_d, 0], [S W, S I_m]] is integral;
    its columns are stored as basis vectors.  Short vectors of this lattice
    project (first d coordinates) onto relation-lattice candidates.
    """

    d: int
    m: int
    S: int
    D: int
    w_list: tuple[tuple[Fraction, ...], ...]
    basis: LatticeBasis


class DomainGridError(ParameterError):
    def __init__(self, x, D):
        super().__init__(f"sample coordinate {x} is not on the 1/{D} grid in [0,1)")


def build_extended_lattice(d: int, w_list, S: int, D: int) -> ExtendedLattice:
    """Assemble the embedding matrix for m >= d+4 grid samples."""
    samples = tuple(tuple(Fraction(x) for x in w) for w in w_list)
    m = len(samples)
    if m < d + 4:
        raise ParameterError("need at least d+4 samples")
    if S < 1 or D < 1 or S % D:
        raise ParameterError("S must be a positive multiple of D")
    for w in samples:
        if len(w) != d:
            raise ParameterError("sample dimension mismatch")
        for x in w:
            if not 0 <= x < 1 or (x * D).denominator != 1:
                raise DomainGridError(x, D)
    dim = d + m
    vectors = []
    for j in range(d):
        col = [0] * dim
        col[j] = 1
        for i, w in enumerate(samples):
            col[d + i] = int(S * w[j])
        vectors.append(tuple(col))
    for i in range(m):
        col = [0] * dim
        col[d + i] = S
        vectors.append(tuple(col))
    return ExtendedLattice(
        d=d, m=m, S=S, D=D, w_list=samples, basis=LatticeBasis(vectors=tuple(vectors))
    )


def recover_relation_vectors(ext: ExtendedLattice, T, delta_sq) -> list[tuple[int, ...]]:
    """Candidate relation vectors from the extended lattice.

    A relation vector u of norm <= T lifts into the extended lattice with
    norm at most T (1 + m S^2 delta^2)^{1/2} when every sample is within
    delta of its coset, so the short-generator extraction runs at that
    bound; candidates are the nonzero first-d-coordinate projections.
    Membership of candidates in the relation lattice is the caller's check.
    """
    t_sq = Fraction(T) ** 2
    lift_sq = t_sq * (1 + ext.m * ext.S ** 2 * Fraction(delta_sq))
    gens = extract_short_generators(ext.basis, norm_bound_sq=lift_sq)
    seen = set()
    candidates = []
    for g in gens:
        head = tuple(g[: ext.d])
        if any(head) and head not in seen:
            seen.add(head)
            candidates.append(head)
    return candidates
