"""Seeded property suites shared by the CLI `check` command and the tests.

Each suite returns a JSON-friendly dict with a top-level `passed` flag.
Frequency guarantees are accepted by an exact one-sided binomial test: a
suite fails only when the observed rate is below the guaranteed rate at
99% confidence.
"""

from __future__ import annotations

import math

import numpy as np

from . import intmat
from .latred import (
    LatticeBasis,
    enumerate_lattice_vectors,
    extract_short_generators,
    lll_reduce,
)
from .relattice import dual_structure_from_basis

CONFIDENCE_ALPHA = 0.01


def binomial_lower_pvalue(successes: int, trials: int, p: float) -> float:
    """P[Bin(trials, p) <= successes], computed exactly in log space."""
    if successes >= trials:
        return 1.0
    lp, lq = math.log(p), math.log1p(-p)
    lgn = math.lgamma(trials + 1)
    logs = [
        lgn - math.lgamma(i + 1) - math.lgamma(trials - i + 1) + i * lp + (trials - i) * lq
        for i in range(successes + 1)
    ]
    peak = max(logs)
    return min(1.0, math.exp(peak) * sum(math.exp(x - peak) for x in logs))


def frequency_verdict(successes: int, trials: int, guaranteed: float) -> dict:
    pvalue = binomial_lower_pvalue(successes, trials, guaranteed)
    return {
        "successes": successes,
        "trials": trials,
        "frequency": successes / trials,
        "guaranteed": guaranteed,
        "pvalue_below": pvalue,
        "passed": pvalue >= CONFIDENCE_ALPHA,
    }


def _random_tiny_lattice(rng, d: int, det_cap: int) -> list[list[int]]:
    while True:
        m = [[int(rng.integers(-4, 5)) for _ in range(d)] for _ in range(d)]
        det = abs(intmat.determinant(m))
        if 0 < det <= det_cap:
            return m


def separation_suite(trials: int = 2000, seed: int = 0, det_cap: int = 64) -> dict:
    """Uniform dual cosets separate every nonzero primal coset.

    For each tiny lattice, draw m = d+4 uniform cosets of L*/Z^d and check
    exhaustively that every nonzero element of Z^d/L has some inner product
    at least eps = (4 det)^{-1/m}/3 away from the integers.  Guaranteed
    frequency of the event: 1/4.
    """
    rng = np.random.default_rng(seed)
    lattices = [[[2]], [[12]], [[64]]]
    lattices += [_random_tiny_lattice(rng, 2, det_cap) for _ in range(2)]
    lattices += [_random_tiny_lattice(rng, 3, det_cap) for _ in range(2)]
    per_lattice = []
    all_passed = True
    for basis in lattices:
        d = len(basis)
        m = d + 4
        dual = dual_structure_from_basis(basis)
        det = dual.det
        eps_scaled = (4 * det) ** (-1.0 / m) / 3.0 * det  # compare against min(r, det-r)
        reps = np.array(
            [r for r in dual.quotient_reps() if any(r)], dtype=np.int64
        ).reshape(det - 1, d) if det > 1 else None
        successes = 0
        for _ in range(trials):
            cosets = np.array(
                [dual.scaled_coset([int(rng.integers(s)) for s in dual.snf_diag]) for _ in range(m)],
                dtype=np.int64,
            ).T  # d x m
            if reps is None:
                successes += 1  # no nonzero cosets to separate
                continue
            r = reps @ cosets % det
            dist = np.minimum(r, det - r)
            if bool(np.all(np.any(dist > eps_scaled, axis=1))):
                successes += 1
        verdict = frequency_verdict(successes, trials, 0.25)
        verdict["basis"] = basis
        verdict["det"] = det
        per_lattice.append(verdict)
        all_passed &= verdict["passed"]
    return {"name": "separation", "passed": all_passed, "cases": per_lattice}


def _rank_mod_p(rows: list[list[int]], p: int) -> int:
    a = [[x % p for x in row] for row in rows]
    rank = 0
    ncols = len(a[0]) if a else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(a)) if a[r][col] % p), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = pow(a[rank][col], -1, p)
        a[rank] = [x * inv % p for x in a[rank]]
        for r in range(len(a)):
            if r != rank and a[r][col]:
                f = a[r][col]
                a[r] = [(x - f * y) % p for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank


def _prime_factors(t: int) -> list[int]:
    out = []
    x = t
    p = 2
    while p * p <= x:
        if x % p == 0:
            out.append(p)
            while x % p == 0:
                x //= p
        p += 1
    if x > 1:
        out.append(x)
    return out


def generation_suite(trials: int = 2000, seed: int = 0, ranks=(1, 2, 3, 4), moduli=(2, 3, 4)) -> dict:
    """r+4 uniform elements generate (Z_t)^r with guaranteed frequency 1/2.

    Generation is decided exactly: for each prime p | t the elements must
    have full rank r modulo p.
    """
    rng = np.random.default_rng(seed)
    cases = []
    all_passed = True
    for r in ranks:
        for t in moduli:
            primes = _prime_factors(t)
            successes = 0
            for _ in range(trials):
                vecs = rng.integers(0, t, size=(r + 4, r))
                rows = [[int(x) for x in row] for row in vecs]
                if all(_rank_mod_p(rows, p) == r for p in primes):
                    successes += 1
            verdict = frequency_verdict(successes, trials, 0.5)
            verdict["rank"] = r
            verdict["modulus"] = t
            cases.append(verdict)
            all_passed &= verdict["passed"]
    return {"name": "generation", "passed": all_passed, "cases": cases}


def short_cover_suite(n_lattices: int = 100, seed: int = 0, k_max: int = 5, entry_bound: int = 20) -> dict:
    """Short-generator extraction covers every short lattice vector.

    Random integer lattices; for each, every enumerated vector of norm <= T
    must lie in the integer span of the extracted generators, and each
    generator must respect the sqrt(k) 2^{k/2} T norm bound.  Hard pass/fail.
    """
    rng = np.random.default_rng(seed)
    failures = []
    checked_vectors = 0
    for case in range(n_lattices):
        k = int(rng.integers(2, k_max + 1))
        while True:
            m = [[int(rng.integers(-entry_bound, entry_bound + 1)) for _ in range(k)] for _ in range(k)]
            if intmat.determinant(m):
                break
        basis = LatticeBasis(vectors=tuple(tuple(r) for r in m))
        first = lll_reduce(basis).basis.vectors[0]
        T = math.isqrt(sum(x * x for x in first)) + 1
        gens = extract_short_generators(basis, T=T)
        short = enumerate_lattice_vectors(basis, norm_bound=T)
        checked_vectors += len(short)
        norm_cap = k * (1 << k) * T * T
        for g in gens:
            if sum(x * x for x in g) > norm_cap:
                failures.append({"case": case, "kind": "norm", "vector": list(g)})
        if gens:
            rows = intmat.hermite_basis([list(g) for g in gens], k)
            for v in short:
                if not intmat.lattice_contains(rows, list(v)):
                    failures.append({"case": case, "kind": "cover", "vector": list(v)})
        elif short:
            failures.append({"case": case, "kind": "cover-empty", "count": len(short)})
    return {
        "name": "short-cover",
        "passed": not failures,
        "lattices": n_lattices,
        "vectors_checked": checked_vectors,
        "failures": failures[:10],
    }


def _theta_counts(d: int, max_sq: int) -> np.ndarray:
    """Number of integer vectors of each squared norm up to max_sq, in Z^d."""
    one = np.zeros(max_sq + 1)
    one[0] = 1.0
    k = 1
    while k * k <= max_sq:
        one[k * k] = 2.0
        k += 1
    out = np.zeros(max_sq + 1)
    out[0] = 1.0
    for _ in range(d):
        out = np.convolve(out, one)[: max_sq + 1]
    return out


def tail_suite(d_max: int = 6, s_values=(0.75, 1.0, 1.5, 2.0)) -> dict:
    """Gaussian mass of Z^d beyond radius sqrt(d) s is below 2^-d of the total.

    Also: when the shortest nonzero vector exceeds sqrt(d) s, the mass away
    from the origin is at most 2 * 2^-d.
    """
    cases = []
    all_passed = True
    for d in range(1, d_max + 1):
        for s in s_values:
            max_sq = int(math.ceil(s * s * (d + 60)))
            counts = _theta_counts(d, max_sq)
            weights = counts * np.exp(-math.pi * np.arange(max_sq + 1) / (s * s))
            total = float(weights.sum())
            tail = float(weights[np.arange(max_sq + 1) > d * s * s].sum())
            ok = tail < 2.0 ** (-d) * total
            cases.append({"d": d, "s": s, "tail": tail, "total": total, "passed": ok})
            all_passed &= ok
        s_small = 0.9 / math.sqrt(d)
        max_sq = int(math.ceil(s_small * s_small * (d + 60))) + 2
        counts = _theta_counts(d, max_sq)
        weights = counts * np.exp(-math.pi * np.arange(max_sq + 1) / (s_small * s_small))
        away = float(weights[1:].sum())
        ok = away <= 2.0 * 2.0 ** (-d)
        cases.append({"d": d, "s": s_small, "mass_off_origin": away, "passed": ok})
        all_passed &= ok
    return {"name": "tail", "passed": all_passed, "cases": cases}


def poisson_suite(scales=(0.5, 1.0, 2.0, 3.0), widths=(0.5, 1.0, math.sqrt(2), 3.0)) -> dict:
    """Summation identity for one-dimensional lattices cZ and Gaussians:
    sum rho_s(c k) = (s/c) sum exp(-pi s^2 k^2 / c^2), within 2^-40."""
    tol = 2.0 ** -40
    cases = []
    all_passed = True
    for c in scales:
        for s in widths:
            k1 = int(math.ceil(6 * s / c)) + 2
            lhs = sum(math.exp(-math.pi * (c * k) ** 2 / (s * s)) for k in range(-k1, k1 + 1))
            k2 = int(math.ceil(6 * c / s)) + 2
            rhs = (s / c) * sum(
                math.exp(-math.pi * (s * k) ** 2 / (c * c)) for k in range(-k2, k2 + 1)
            )
            err = abs(lhs - rhs)
            ok = err <= tol * max(1.0, abs(lhs))
            cases.append({"c": c, "s": s, "lhs": lhs, "rhs": rhs, "error": err, "passed": ok})
            all_passed &= ok
    return {"name": "poisson", "passed": all_passed, "cases": cases, "tolerance": tol}


SUITES = {
    "separation": lambda trials, seed: separation_suite(trials=trials, seed=seed),
    "generation": lambda trials, seed: generation_suite(trials=trials, seed=seed),
    "short-cover": lambda trials, seed: short_cover_suite(n_lattices=max(trials // 20, 10), seed=seed),
    "tail": lambda trials, seed: tail_suite(),
    "poisson": lambda trials, seed: poisson_suite(),
}


def run_suites(names, trials: int = 2000, seed: int = 0) -> dict:
    results = []
    for name in names:
        if name not in SUITES:
            raise KeyError(f"unknown suite {name!r}; options: {sorted(SUITES)}")
        results.append(SUITES[name](trials, seed))
    return {"suites": results, "passed": all(r["passed"] for r in results)}
