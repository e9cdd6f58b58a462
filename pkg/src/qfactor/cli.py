"""Command-line front end and JSON report emitter.

Subcommands: factor, simulate, sample, estimate, check.  Exit codes are a
stable contract: 0 success, 2 assumption or guard violation, 3 attempts
exhausted, 64 usage.  Identical flags and seed produce byte-identical JSON
up to the timings block.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, is_dataclass
from fractions import Fraction
from importlib import resources

import numpy as np

from . import checks, gauss, qsim
from .arith import FactoringInstance, FactorFound, ParameterError, ResourceLimitError
from .pipeline import (
    ASSUMPTION_VIOLATED,
    ATTEMPTS_EXHAUSTED,
    FACTORED,
    REJECTED_PRIME,
    PipelineConfig,
    certify_assumption,
    default_dimension,
    default_witness_bound,
    estimate_gate_cost,
    run_factoring,
    select_radius,
    tradeoff_rows,
)
from .relattice import build_relation_lattice, dual_cosets

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_VIOLATION = 2
EXIT_EXHAUSTED = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _plain(obj):
    """Recursively convert to JSON-serializable plain types."""
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_plain(x) for x in obj.tolist()]
    if is_dataclass(obj) and not isinstance(obj, type):
        return _plain(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    return obj


def make_report(command: str, seed, config: dict, results: dict, started: float) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "seed": seed,
        "config": _plain(config),
        "results": _plain(results),
        "timings": {"total_s": time.perf_counter() - started},
    }


def load_schema() -> dict:
    with resources.files("qfactor").joinpath("report_schema.json").open() as fh:
        return json.load(fh)


def validate_report(report: dict) -> None:
    """Structural validation against the published schema."""
    schema = load_schema()
    required = schema["required"]
    for key in required:
        if key not in report:
            raise ValueError(f"report is missing required key {key!r}")
    extra = set(report) - set(schema["properties"])
    if extra:
        raise ValueError(f"report has unknown keys {sorted(extra)}")
    if report["schema_version"] != SCHEMA_VERSION:
        raise ValueError("schema_version mismatch")
    if report["command"] not in schema["properties"]["command"]["enum"]:
        raise ValueError("unknown command")
    if not isinstance(report["config"], dict) or not isinstance(report["results"], dict):
        raise ValueError("config and results must be objects")
    if "total_s" not in report["timings"]:
        raise ValueError("timings must carry total_s")


def emit(report: dict, args) -> None:
    text = json.dumps(report, sort_keys=True, indent=2)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    if getattr(args, "json", False):
        print(text)


def _load_config_file(path: str) -> dict:
    values: dict = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"bad config line: {raw.rstrip()}")
            key, val = (part.strip() for part in line.split("=", 1))
            key = key.replace("-", "_")
            for cast in (int, float):
                try:
                    values[key] = cast(val)
                    break
                except ValueError:
                    continue
            else:
                values[key] = {"true": True, "false": False}.get(val.lower(), val)
    return values


def _resolve(args, key: str, default):
    """Flag > config file > default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    cfg = getattr(args, "_config_values", {})
    return cfg.get(key, default)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="64-bit master seed")
    p.add_argument("--out", type=str, default=None, help="write the JSON report here")
    p.add_argument("--config", type=str, default=None, help="key=value file, lower precedence than flags")
    p.add_argument("--json", action="store_true", help="print the JSON report to stdout")


def build_parser() -> _Parser:
    parser = _Parser(prog="qfactor", description=__doc__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    f = sub.add_parser("factor", parents=[], help="factor N end to end")
    f.add_argument("--n", type=int, required=True, help="odd composite modulus (decimal)")
    f.add_argument("--d", type=int, default=None)
    f.add_argument("--m", type=int, default=None)
    f.add_argument("--mode", choices=["oracle", "statevector"], default=None)
    f.add_argument("--max-attempts", type=int, default=None, dest="max_attempts")
    f.add_argument("--safety", type=int, default=None)
    f.add_argument("--radius", type=int, default=None, help="override the selected radius")
    _add_common(f)

    s = sub.add_parser("simulate", help="statevector sweep with all distribution checks")
    s.add_argument("--n", type=int, default=77)
    s.add_argument("--sweep", type=str, default="1:16:4", help="semicolon-separated d:D:R triples; empty for none")
    s.add_argument("--trials", type=int, default=2000, help="concentration trials per config")
    _add_common(s)

    sa = sub.add_parser("sample", help="emit oracle samples of the output distribution")
    sa.add_argument("--n", type=int, required=True)
    sa.add_argument("--d", type=int, default=None)
    sa.add_argument("--m", type=int, default=None, help="number of samples (default d+4)")
    sa.add_argument("--safety", type=int, default=None)
    _add_common(sa)

    e = sub.add_parser("estimate", help="evaluate the circuit-size model")
    e.add_argument("--n-values", type=str, default="256", dest="n_values")
    e.add_argument("--d", type=int, default=None)
    e.add_argument("--log2d", type=float, default=None, help="explicit log2 of the grid size")
    e.add_argument("--eps-values", type=str, default=None, dest="eps_values")
    e.add_argument("--c", type=float, default=1.0, help="radius constant")
    _add_common(e)

    c = sub.add_parser("check", help="run the property suites")
    c.add_argument("--suite", type=str, default="all", help="all, none, or one of: " + ", ".join(sorted(checks.SUITES)))
    c.add_argument("--trials", type=int, default=2000)
    _add_common(c)
    return parser


def cmd_factor(args) -> int:
    started = time.perf_counter()
    seed = _resolve(args, "seed", 0)
    config = PipelineConfig(
        N=args.n,
        d=_resolve(args, "d", None),
        m=_resolve(args, "m", None),
        mode=_resolve(args, "mode", "oracle"),
        seed=seed,
        max_attempts=_resolve(args, "max_attempts", 50),
        safety=_resolve(args, "safety", 4),
        radius_override=_resolve(args, "radius", None),
    )
    try:
        outcome = run_factoring(config)
    except (ResourceLimitError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    results = {
        "outcome": outcome.status,
        "factor": outcome.factor,
        "attempts_used": outcome.attempts_used,
        "transcript": outcome.transcript,
    }
    report = make_report("factor", seed, vars(config) | {}, results, started)
    emit(report, args)
    if outcome.status == FACTORED:
        if not args.json:
            print(outcome.factor)
        return EXIT_OK
    if outcome.status == ATTEMPTS_EXHAUSTED:
        return EXIT_EXHAUSTED
    if outcome.status in (ASSUMPTION_VIOLATED, REJECTED_PRIME):
        return EXIT_VIOLATION
    return EXIT_VIOLATION


def _parse_sweep(spec: str) -> list[tuple[int, int, float]]:
    entries = []
    for chunk in spec.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(":")
        if len(parts) != 3:
            raise ParameterError(f"bad sweep entry {chunk!r}, want d:D:R")
        entries.append((int(parts[0]), int(parts[1]), float(parts[2])))
    return entries


def cmd_simulate(args) -> int:
    started = time.perf_counter()
    seed = _resolve(args, "seed", 0)
    try:
        sweep = _parse_sweep(args.sweep)
        results = {"configs": []}
        for d, D, R in sweep:
            inst = FactoringInstance.build(args.n, d)
            rel = build_relation_lattice(inst)
            params = gauss.GaussParams(R=R, D=D, d=d)
            entry: dict = {"d": d, "D": D, "R": R, "det": rel.det,
                           "tail_regime": params.in_tail_regime}
            state = qsim.build_gaussian_state(params)
            z1_sq = state.z1_squared
            ref = (R / math.sqrt(2)) ** d
            slack = 2.0 * 2.0 ** -d
            entry["z1_squared"] = z1_sq
            entry["z1_bounds_pass"] = (
                (1 - slack) * ref <= z1_sq <= (1 + slack) * ref
                if params.in_tail_regime
                else None
            )
            gap = qsim.phi1_phi2_gap(rel, params)
            entry["state_gap"] = gap.gap
            entry["z_ratio"] = gap.ratio
            entry["gap_pass"] = (
                gap.gap <= slack and abs(gap.ratio - 1) <= 2.0 ** -d
                if params.in_tail_regime
                else None
            )
            joint = qsim.apply_exponentiation(state, rel)
            P = qsim.qft_measure_distribution(joint)
            Q = gauss.q_table(dual_cosets(rel), params)
            entry["l1_distance"] = float(np.abs(P - Q).sum())
            rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(d, D)))
            conc = gauss.concentration_check(params, args.trials, rng)
            entry["concentration_failure_rate"] = conc.failure_rate
            entry["concentration_reference"] = conc.reference_rate
            results["configs"].append(entry)
    except (ResourceLimitError, FactorFound, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    report = make_report("simulate", seed, {"n": args.n, "sweep": args.sweep, "trials": args.trials}, results, started)
    emit(report, args)
    if not args.json:
        for entry in results["configs"]:
            print(
                f"d={entry['d']} D={entry['D']} R={entry['R']}: "
                f"l1={entry['l1_distance']:.3e} gap={entry['state_gap']:.3e}"
            )
    return EXIT_OK


def cmd_sample(args) -> int:
    started = time.perf_counter()
    seed = _resolve(args, "seed", 0)
    try:
        d = _resolve(args, "d", None) or default_dimension(args.n)
        inst = FactoringInstance.build(args.n, d)
        rel = build_relation_lattice(inst)
        witness = certify_assumption(inst, default_witness_bound(inst), rel=rel)
        if not witness.found:
            print("error: no short witness; cannot pick a radius", file=sys.stderr)
            return EXIT_VIOLATION
        m = _resolve(args, "m", None) or d + 4
        T = math.isqrt(witness.norm_sq)
        T += 0 if T * T == witness.norm_sq else 1
        R = select_radius(inst, rel, T, m, _resolve(args, "safety", 4))
        params = gauss.GaussParams.choose(d, float(R))
        dual = dual_cosets(rel)
        samples = []
        for i in range(m):
            rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0, i)))
            v, samp = gauss.sample_Q(dual, params, rng)
            samples.append({"v": [str(x) for x in v], "w_indices": list(samp.indices)})
        results = {"R": R, "D": params.D, "m": m, "det": rel.det, "samples": samples}
    except (ResourceLimitError, FactorFound, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    report = make_report("sample", seed, {"n": args.n, "d": d, "m": m}, results, started)
    emit(report, args)
    if not args.json:
        for s in samples:
            print(s["w_indices"])
    return EXIT_OK


def cmd_estimate(args) -> int:
    started = time.perf_counter()
    n_values = [int(x) for x in args.n_values.split(",") if x.strip()]
    eps_values = (
        [float(x) for x in args.eps_values.split(",") if x.strip()] if args.eps_values else None
    )
    rows = []
    prev_total = None
    for n in n_values:
        if eps_values is not None:
            for row in tradeoff_rows(n, eps_values, C=args.c):
                rows.append(row)
        else:
            d = args.d if args.d is not None else max(1, math.isqrt(n - 1) + 1)
            row = estimate_gate_cost(n, d, log2_D=args.log2d, C=args.c)
            rows.append(row)
    table = []
    for row in rows:
        ratio = row.total / prev_total if prev_total else None
        prev_total = row.total
        table.append(
            {
                "n": row.n,
                "d": row.d,
                "log2_D": row.log2_D,
                "epsilon": row.epsilon,
                "terms": row.terms,
                "total": row.total,
                "ratio_to_previous": ratio,
                "shor_reference": row.shor_reference,
            }
        )
    results = {"rows": table}
    report = make_report(
        "estimate",
        _resolve(args, "seed", 0),
        {"n_values": args.n_values, "d": args.d, "log2d": args.log2d, "eps_values": args.eps_values, "c": args.c},
        results,
        started,
    )
    emit(report, args)
    if not args.json:
        for row in table:
            eps = f" eps={row['epsilon']}" if row["epsilon"] is not None else ""
            print(f"n={row['n']} d={row['d']}{eps}: total={row['total']:.4g}")
    return EXIT_OK


def cmd_check(args) -> int:
    started = time.perf_counter()
    seed = _resolve(args, "seed", 0)
    if args.suite == "none":
        results = {"suites": [], "passed": True}
    else:
        names = sorted(checks.SUITES) if args.suite == "all" else [args.suite]
        try:
            results = checks.run_suites(names, trials=args.trials, seed=seed)
        except KeyError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
    report = make_report("check", seed, {"suite": args.suite, "trials": args.trials}, results, started)
    emit(report, args)
    if not args.json:
        for suite in results["suites"]:
            print(f"{suite['name']}: {'pass' if suite['passed'] else 'FAIL'}")
    return EXIT_OK if results["passed"] else EXIT_VIOLATION


_HANDLERS = {
    "factor": cmd_factor,
    "simulate": cmd_simulate,
    "sample": cmd_sample,
    "estimate": cmd_estimate,
    "check": cmd_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "config", None):
        try:
            args._config_values = _load_config_file(args.config)
        except (OSError, ParameterError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
    else:
        args._config_values = {}
    return _HANDLERS[args.cmd](args)


if __name__ == "__main__":
    raise SystemExit(main())
