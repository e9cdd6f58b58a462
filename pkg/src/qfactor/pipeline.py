"""End-to-end factoring driver and the gate-cost estimator.

The driver certifies the short-witness assumption by enumeration, picks the
Gaussian radius from the certified witness norm so that the recovery
inequality holds with margin, acquires dual samples (classical oracle or
exact statevector), embeds them in the extended lattice, extracts short
generators, and turns any candidate outside the sign sublattice into a
factor.  Every intermediate object lands in a JSON-friendly transcript.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

import numpy as np

from .arith import (
    FactoringInstance,
    FactorFound,
    ParameterError,
    ResourceLimitError,
    precheck,
)
from .gauss import GaussParams, sample_Q
from .latred import build_extended_lattice, recover_relation_vectors
from .qsim import (
    STATEVECTOR_GUARD,
    apply_exponentiation,
    build_gaussian_state,
    qft_measure_distribution,
    sample_measurement,
)
from .relattice import (
    ENUM_CAP,
    GROUP_CAP,
    RelationLattice,
    build_relation_lattice,
    dual_cosets,
    shortest_nontrivial_witness,
)
from .arith import base_product, hom_image

FACTORED = "factored"
ASSUMPTION_VIOLATED = "assumption_violated"
ATTEMPTS_EXHAUSTED = "attempts_exhausted"
REJECTED_PRIME = "rejected_prime"

MODES = ("oracle", "statevector")


@dataclass
class PipelineConfig:
    """Knobs of one factoring run.

    d defaults to ceil(sqrt(n)); m to d+4.  The radius is derived from the
    certified witness norm (see select_radius); radius_override pins it for
    experiments.  All randomness flows from `seed`.
    """

    N: int
    d: int | None = None
    m: int | None = None
    mode: str = "oracle"
    seed: int = 0
    max_attempts: int = 50
    safety: int = 4
    witness_bound: int | None = None
    radius_override: int | None = None
    group_cap: int = GROUP_CAP
    enum_cap: int = ENUM_CAP
    sim_guard: int = STATEVECTOR_GUARD

    def __post_init__(self):
        if self.mode not in MODES:
            raise ParameterError(f"mode must be one of {MODES}")
        if self.max_attempts < 0:
            raise ParameterError("max_attempts must be nonnegative")


@dataclass(frozen=True)
class WitnessReport:
    """Outcome of the exhaustive short-witness certification."""

    found: bool
    vector: tuple[int, ...] | None
    norm_sq: int | None
    bound: int
    lattice_vectors: int  # nonzero lattice vectors in the ball
    outside_sign: int  # of those, how many sit outside the sign sublattice
    fraction_outside: float | None


def certify_assumption(
    inst: FactoringInstance, T_bound, rel: RelationLattice | None = None, enum_cap: int = ENUM_CAP
) -> WitnessReport:
    """Certify (by enumeration) that some short vector escapes the sign
    sublattice, and measure what fraction of short relation vectors do."""
    if rel is None:
        rel = build_relation_lattice(inst)
    witness = shortest_nontrivial_witness(rel, T_bound, enum_cap=enum_cap)
    r = int(T_bound)
    bound_sq = Fraction(T_bound) ** 2
    members = 0
    outside = 0
    for z in itertools.product(range(-r, r + 1), repeat=inst.d):
        if not any(z):
            continue
        if sum(x * x for x in z) > bound_sq:
            continue
        if hom_image(inst, z) != 1:
            continue
        members += 1
        bp = base_product(inst, z)
        if bp != 1 and bp != inst.N - 1:
            outside += 1
    return WitnessReport(
        found=witness is not None,
        vector=witness,
        norm_sq=sum(x * x for x in witness) if witness else None,
        bound=r,
        lattice_vectors=members,
        outside_sign=outside,
        fraction_outside=(outside / members) if members else None,
    )


def _ceil_sqrt(n: int) -> int:
    r = isqrt(n)
    return r if r * r == n else r + 1


def default_dimension(N: int) -> int:
    return max(1, _ceil_sqrt(N.bit_length()))


def default_witness_bound(inst: FactoringInstance, enum_cap: int = ENUM_CAP) -> int:
    """Pigeonhole-scale radius sqrt(d) 2^{n/d}, clamped to the enumeration cap."""
    d = inst.d
    want = int(math.ceil(math.sqrt(d) * 2 ** (inst.n / d))) + 1
    r_cap = (int(round(enum_cap ** (1.0 / d))) - 1) // 2
    return max(1, min(want, r_cap))


def select_radius(inst: FactoringInstance, rel: RelationLattice, T: int, m: int, safety: int) -> int:
    """Smallest power-of-two radius R satisfying both requirements.

    (a) the scaling relation R > 2^{d + n/d} T, with a 2^safety margin; and
    (b) twice the exact recovery inequality
        sqrt(k) 2^{k/2} T sqrt(1 + 8 m d^2) < (sqrt(2) R / sqrt(d)) (4 det)^{-1/m} / 6
    where k = d+m and sqrt(1 + 8 m d^2) is the worst-case lift factor of the
    S = D embedding over the whole selection window.
    """
    d, n = inst.d, inst.n
    k = d + m
    base = 2.0 ** (d + n / d) * T * 2 ** safety
    lift = math.sqrt(1 + 8 * m * d * d)
    need = (
        6.0
        * math.sqrt(k)
        * 2.0 ** (k / 2)
        * lift
        * T
        * math.sqrt(d / 2.0)
        * (4 * rel.det) ** (1.0 / m)
    )
    target = max(base, 2.0 * need, 2.0)
    return 1 << max(1, math.ceil(math.log2(target) - 1e-9))


def recovery_recheck(rel: RelationLattice, params: GaussParams, T: int, m: int) -> dict:
    """Numeric check of the norm inequality actually used this run."""
    d = rel.d
    S = params.D
    delta = math.sqrt(d) * params.s
    lift = math.sqrt(1 + m * (S * delta) ** 2)
    k = d + m
    lhs = math.sqrt(k) * 2.0 ** (k / 2) * T * lift
    rhs = (1.0 / delta) * (4 * rel.det) ** (-1.0 / m) / 6.0
    return {"lhs": lhs, "rhs": rhs, "holds": lhs < rhs, "delta": delta, "lift": lift}


@dataclass
class FactoringOutcome:
    status: str
    factor: int | None
    attempts_used: int
    transcript: dict = field(repr=False)


def _instance_dict(inst: FactoringInstance) -> dict:
    return {"N": inst.N, "n": inst.n, "d": inst.d, "b": list(inst.b), "a": list(inst.a)}


def run_factoring(config: PipelineConfig) -> FactoringOutcome:
    """The full procedure; see the module docstring for the shape."""
    N = config.N
    transcript: dict = {"config": {
        "N": N, "d": config.d, "m": config.m, "mode": config.mode,
        "seed": config.seed, "max_attempts": config.max_attempts,
        "safety": config.safety, "radius_override": config.radius_override,
    }}

    def finish(status, factor=None, attempts=0):
        if factor is not None:
            if not (1 < factor < N and N % factor == 0):
                raise AssertionError(f"claimed factor {factor} does not divide {N}")
        transcript["outcome"] = {"status": status, "factor": factor, "attempts_used": attempts}
        return FactoringOutcome(status=status, factor=factor, attempts_used=attempts, transcript=transcript)

    pre = precheck(N)
    transcript["precheck"] = {"status": pre.status, "factor": pre.factor, "reason": pre.reason}
    if pre.status == "prime":
        return finish(REJECTED_PRIME)
    if pre.status == "factor":
        return finish(FACTORED, pre.factor)

    d = config.d if config.d is not None else default_dimension(N)
    try:
        inst = FactoringInstance.build(N, d)
    except FactorFound as hit:
        transcript["instance"] = {"short_circuit_factor": hit.factor, "where": hit.where}
        return finish(FACTORED, hit.factor)
    transcript["instance"] = _instance_dict(inst)

    rel = build_relation_lattice(inst, group_cap=config.group_cap)
    transcript["lattice"] = {"basis": [list(v) for v in rel.basis], "det": rel.det}

    bound = config.witness_bound if config.witness_bound is not None else default_witness_bound(inst, config.enum_cap)
    witness = certify_assumption(inst, bound, rel=rel, enum_cap=config.enum_cap)
    transcript["witness"] = {
        "found": witness.found,
        "vector": list(witness.vector) if witness.vector else None,
        "norm_sq": witness.norm_sq,
        "bound": witness.bound,
        "lattice_vectors": witness.lattice_vectors,
        "outside_sign": witness.outside_sign,
        "fraction_outside": witness.fraction_outside,
    }
    if not witness.found:
        return finish(ASSUMPTION_VIOLATED)

    m = config.m if config.m is not None else d + 4
    if m < d + 4:
        raise ParameterError("m must be at least d + 4")
    T = _ceil_sqrt(witness.norm_sq)
    R = config.radius_override or select_radius(inst, rel, T, m, config.safety)
    params = GaussParams.choose(d, float(R))
    D = params.D
    delta_sq = Fraction(d, 2 * R * R)
    recheck = recovery_recheck(rel, params, T, m)
    transcript["parameters"] = {
        "T": T, "R": R, "D": D, "S": D, "m": m,
        "noise_width": params.s, "recheck": recheck,
    }

    dual = dual_cosets(rel)
    P = None
    if config.mode == "statevector":
        if D ** d > config.sim_guard:
            raise ResourceLimitError(
                f"statevector mode needs D^d <= {config.sim_guard}, got {D}^{d}"
            )
        state = build_gaussian_state(params, guard=config.sim_guard)
        joint = apply_exponentiation(state, rel, guard=config.sim_guard)
        P = qft_measure_distribution(joint)

    attempts = []
    transcript["attempts"] = attempts
    for attempt in range(config.max_attempts):
        record: dict = {"samples": [], "candidates": [], "factor": None}
        attempts.append(record)
        w_list = []
        for i in range(m):
            rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(attempt, i)))
            if config.mode == "oracle":
                v, samp = sample_Q(dual, params, rng)
                record["samples"].append(
                    {"v": [str(x) for x in v], "w_indices": list(samp.indices)}
                )
                w_list.append(samp.fractions())
            else:
                idx = sample_measurement(P, rng)
                record["samples"].append({"v": None, "w_indices": list(idx)})
                w_list.append(tuple(Fraction(j, D) for j in idx))
        ext = build_extended_lattice(d, w_list, S=D, D=D)
        candidates = recover_relation_vectors(ext, T, delta_sq)
        factor = None
        for cand in candidates:
            in_lat = hom_image(inst, cand) == 1
            entry = {"vector": list(cand), "in_lattice": in_lat, "in_sign": None, "gcd": None}
            record["candidates"].append(entry)
            if not in_lat:
                continue
            bp = base_product(inst, cand)
            in_sign = bp == 1 or bp == N - 1
            entry["in_sign"] = in_sign
            if in_sign:
                continue
            g = math.gcd(bp - 1, N)
            entry["gcd"] = g
            if 1 < g < N and factor is None:
                factor = g
        if factor is not None:
            record["factor"] = factor
            return finish(FACTORED, factor, attempts=attempt + 1)
    return finish(ATTEMPTS_EXHAUSTED, attempts=config.max_attempts)


# ---------------------------------------------------------------------------
# Gate-cost model


@dataclass(frozen=True)
class CostConstants:
    """Multipliers for the four cost terms (all 1 by default)."""

    tree: float = 1.0
    qft: float = 1.0
    square: float = 1.0
    prep: float = 1.0
    prep_log_exponent: int = 3  # the poly(log d) degree of the state prep


@dataclass(frozen=True)
class GateCostReport:
    n: int
    d: int
    log2_D: float
    epsilon: float | None
    terms: dict
    total: float
    shor_reference: float  # ~ n^2 log n, the labeled comparison point


def default_log2_D(n: int, d: int, C: float = 1.0, epsilon: float = 0.0) -> float:
    """log2 of the grid size for radius exp(C n^{1/2-eps}) at dimension d."""
    return 1.0 + 0.5 * math.log2(max(d, 1)) + C * n ** (0.5 - epsilon) * math.log2(math.e)


def estimate_gate_cost(
    n: int,
    d: int,
    D: int | None = None,
    log2_D: float | None = None,
    constants: CostConstants | None = None,
    epsilon_qft: float | None = None,
    C: float = 1.0,
) -> GateCostReport:
    """Evaluate the circuit-size model term by term.

    Terms: subset product trees log2D * d * log2(d)^3; transform
    log2D * d * log2(log2 D) (or log2D * d * log2(log2 D / eps) when an
    explicit transform accuracy eps is supplied); accumulator squarings
    log2D * n * log2 n; state preparation d * log2(d)^prep_exponent.
    """
    if n < 2 or d < 1:
        raise ParameterError("need n >= 2 and d >= 1")
    cc = constants or CostConstants()
    if log2_D is None:
        log2_D = math.log2(D) if D is not None else default_log2_D(n, d, C)
    if log2_D < 1:
        raise ParameterError("log2 of D must be at least 1")
    log_d = math.log2(d) if d > 1 else 0.0
    loglog_D = math.log2(max(log2_D, 1.0))
    if epsilon_qft is not None:
        if not 0 < epsilon_qft < 1:
            raise ParameterError("epsilon_qft must lie in (0, 1)")
        qft_inner = math.log2(max(log2_D / epsilon_qft, 2.0))
    else:
        qft_inner = loglog_D
    terms = {
        "tree": cc.tree * log2_D * d * log_d ** 3,
        "qft": cc.qft * log2_D * d * qft_inner,
        "square": cc.square * log2_D * n * math.log2(n),
        "prep": cc.prep * d * log_d ** cc.prep_log_exponent,
    }
    return GateCostReport(
        n=n,
        d=d,
        log2_D=log2_D,
        epsilon=None,
        terms=terms,
        total=sum(terms.values()),
        shor_reference=float(n) ** 2 * math.log2(n),
    )


def tradeoff_rows(
    n: int, epsilons, constants: CostConstants | None = None, C: float = 1.0
) -> list[GateCostReport]:
    """Cost rows along the dimension/radius tradeoff d = n^{1/2+eps}."""
    rows = []
    for eps in epsilons:
        if not 0 <= eps <= 0.5:
            raise ParameterError("epsilon must lie in [0, 1/2]")
        d = max(1, round(n ** (0.5 + eps)))
        row = estimate_gate_cost(
            n, d, log2_D=max(1.0, default_log2_D(n, d, C, epsilon=eps)), constants=constants
        )
        rows.append(
            GateCostReport(
                n=row.n,
                d=row.d,
                log2_D=row.log2_D,
                epsilon=eps,
                terms=row.terms,
                total=row.total,
                shor_reference=row.shor_reference,
            )
        )
    return rows
