"""Discrete Gaussian mathematics on the measurement grid.

The measurement procedure's output distribution is a uniform dual coset v
perturbed by Gaussian noise of width s = 1/(sqrt(2) R) and snapped to the
grid {0, 1/D, ..., (D-1)/D}^d.  Everything here evaluates those masses by
explicit wrap-around (theta) sums whose neglected tails stay below 2^-64,
and samples them by inverse CDF over the explicit per-coordinate tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import ParameterError, ResourceLimitError

TAIL_LOG2 = 64  # neglected wrap-around mass per table stays below 2^-64
TABLE_CAP = 1 << 22


def theta_cutoff_for(s: float) -> int:
    """Shift radius K so dropping |k| > K terms loses < 2^-64 of the mass.

    A dropped term with |k| = K+1 sits at distance > K from the center, and
    exp(-pi t^2 / s^2) < 2^-64 once t > s sqrt(64 ln2 / pi); the +2 covers
    the within-cell offset and the geometric tail.
    """
    return int(math.ceil(s * math.sqrt(TAIL_LOG2 * math.log(2) / math.pi))) + 2


@dataclass(frozen=True)
class GaussParams:
    """Radius R, grid size D (a power of two), and dimension d.

    The tail regime (R >= sqrt(2d) and D >= 2 sqrt(d) R) is where the
    Gaussian tail bounds hold; the parameter-selection window additionally
    keeps D < 4 sqrt(d) R.  Both are queryable; only basic sanity is
    enforced at construction so that off-regime diagnostics stay possible.
    """

    R: float
    D: int
    d: int
    theta_cutoff: int = 0

    def __post_init__(self):
        if self.R <= 0:
            raise ParameterError("R must be positive")
        if self.d < 1:
            raise ParameterError("d must be positive")
        if self.D < 2 or self.D & (self.D - 1):
            raise ParameterError("D must be a power of two >= 2")
        if self.theta_cutoff == 0:
            object.__setattr__(self, "theta_cutoff", theta_cutoff_for(self.s))

    @property
    def s(self) -> float:
        """Noise width of the output distribution."""
        return 1.0 / (math.sqrt(2.0) * self.R)

    @property
    def in_tail_regime(self) -> bool:
        return (
            self.R >= math.sqrt(2 * self.d) - 1e-12
            and self.D >= 2 * math.sqrt(self.d) * self.R - 1e-9
        )

    @property
    def in_selection_window(self) -> bool:
        return self.in_tail_regime and self.D < 4 * math.sqrt(self.d) * self.R

    def require_tail_regime(self):
        if not self.in_tail_regime:
            raise ParameterError(
                f"parameters outside the tail regime: R={self.R}, D={self.D}, d={self.d}"
            )

    @classmethod
    def choose(cls, d: int, R: float) -> "GaussParams":
        """Smallest power-of-two D with 2 sqrt(d) R <= D (< 4 sqrt(d) R)."""
        lo = 2 * math.sqrt(d) * R
        D = 1 << max(1, math.ceil(math.log2(lo) - 1e-9))
        while D < lo:
            D <<= 1
        return cls(R=R, D=D, d=d)


@dataclass(frozen=True)
class DualSample:
    """One grid point w in {0, 1/D, ..., (D-1)/D}^d, stored by indices."""

    indices: tuple[int, ...]
    params: GaussParams

    def fractions(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(k, self.params.D) for k in self.indices)

    def floats(self) -> tuple[float, ...]:
        return tuple(k / self.params.D for k in self.indices)


def rho(s: float, x) -> float:
    """The Gaussian weight exp(-pi ||x||^2 / s^2)."""
    if s <= 0:
        raise ParameterError("s must be positive")
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    return float(np.exp(-math.pi * float(np.dot(arr, arr)) / (s * s)))


def coordinate_masses(v_j: float, params: GaussParams) -> np.ndarray:
    """Normalized masses at k/D, k = 0..D-1, of the width-s wrap-around
    Gaussian centered at v_j (taken mod 1)."""
    D, s, K = params.D, params.s, params.theta_cutoff
    diff = (float(v_j) % 1.0) - np.arange(D) / D
    total = np.zeros(D)
    for t in range(-K, K + 1):
        total += np.exp(-math.pi * ((diff + t) / s) ** 2)
    return total / total.sum()


def qv_coordinate_tables(v, params: GaussParams) -> list[np.ndarray]:
    vv = tuple(v)
    if len(vv) != params.d:
        raise ParameterError("coset representative has wrong dimension")
    return [coordinate_masses(float(x), params) for x in vv]


def qv_table(v, params: GaussParams, table_cap: int = TABLE_CAP) -> np.ndarray:
    """Full d-dimensional mass table of the single-coset distribution.

    The product structure of the Gaussian makes this the outer product of
    the per-coordinate tables.
    """
    if params.D ** params.d > table_cap:
        raise ResourceLimitError("full mass table would exceed the cap")
    tables = qv_coordinate_tables(v, params)
    out = tables[0]
    for t in tables[1:]:
        out = np.multiply.outer(out, t)
    return out


def q_table(dual, params: GaussParams, table_cap: int = TABLE_CAP) -> np.ndarray:
    """Brute-force mixture table: average of the single-coset tables over
    every dual coset.  Only viable for tiny determinants and grids."""
    if dual.det * params.D ** params.d > table_cap:
        raise ResourceLimitError("mixture table would exceed the cap")
    out = np.zeros((params.D,) * params.d)
    count = 0
    for v in dual.all_cosets():
        out += qv_table(v, params, table_cap)
        count += 1
    return out / count


def sample_Qv(v, params: GaussParams, rng) -> DualSample:
    """Draw one grid point from the single-coset distribution around v.

    Per coordinate: inverse CDF over the explicit D-entry mass table.
    Reproducible given the generator state.
    """
    indices = []
    for table in qv_coordinate_tables(v, params):
        cdf = np.cumsum(table)
        cdf[-1] = 1.0
        indices.append(int(np.searchsorted(cdf, rng.random(), side="right")))
    return DualSample(indices=tuple(indices), params=params)


def sample_Q(dual, params: GaussParams, rng):
    """One output sample: a uniform dual coset v, then a draw around it.

    This is the classical oracle standing in for the measurement procedure.
    Returns (v, DualSample) with v as exact Fractions.
    """
    v = dual.sample(rng)
    return v, sample_Qv(v, params, rng)


def torus_distance(w, v) -> float:
    """Euclidean distance on the torus R^d / Z^d."""
    total = 0.0
    for a, b in zip(w, v, strict=True):
        delta = (float(a) - float(b)) % 1.0
        delta = min(delta, 1.0 - delta)
        total += delta * delta
    return math.sqrt(total)


@dataclass(frozen=True)
class ConcentrationReport:
    trials: int
    failures: int
    failure_rate: float
    threshold: float  # sqrt(d) / (sqrt(2) R)
    reference_rate: float  # the 2^-d scale the tail bound talks about


def concentration_check(
    params: GaussParams, trials: int, rng, v=None
) -> ConcentrationReport:
    """Measure how often a draw lands farther than sqrt(d)*s from its center.

    v fixed if given, else a fresh uniform torus point per trial.  The rate
    is reported next to the 2^-d reference scale, never asserted against an
    invented constant.
    """
    if trials < 1:
        raise ParameterError("trials must be positive")
    threshold = math.sqrt(params.d) * params.s
    failures = 0
    for _ in range(trials):
        center = tuple(rng.random(params.d)) if v is None else tuple(v)
        w = sample_Qv(center, params, rng)
        if torus_distance(w.floats(), center) > threshold:
            failures += 1
    return ConcentrationReport(
        trials=trials,
        failures=failures,
        failure_rate=failures / trials,
        threshold=threshold,
        reference_rate=2.0 ** (-params.d),
    )
