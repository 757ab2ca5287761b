"""Command-line front end.

Subcommands: gen-pointset, constants, run-ld, run-clt, verify-norms,
verify-laplace. Each run writes report.json plus command-specific CSVs and
a rendered PNG figure into the output directory. Exit status: 0 when all
verdicts pass, 1 on any verdict failure, 2 on configuration or runtime
errors (in which case no output files are produced).

Reports are byte-reproducible for identical (config, seed) when
--no-timestamp is given: that canonical mode drops the timestamp, the
runtime, and the execution block from report.json.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import battery, norms
from .experiments import (
    ExperimentReport,
    clt_experiment,
    verify_laplace_gap,
    verify_ld_bound,
)
from .observables import gaussian
from .pointset import PointSet, fibonacci_chain, hardcore_random, lattice, verify_min_distance, write_csv
from .rates import RateParams, expansion_error_terms, recompute_constants
from .scatterers import spec_from_json

__all__ = ["main", "dispatch", "RunConfig", "ConfigError"]

COMMANDS = ("gen-pointset", "constants", "run-ld", "run-clt", "verify-norms", "verify-laplace")


class ConfigError(ValueError):
    """Configuration document is malformed."""


@dataclass
class RunConfig:
    command: str
    parameters: dict
    seed: int
    output_dir: Path
    threads: int = 1
    canonical: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")


def _check_keys(doc: dict, where: str, required: set[str], optional: set[str] = frozenset()):
    if not isinstance(doc, dict):
        raise ConfigError(f"{where}: expected an object")
    missing = required - set(doc)
    if missing:
        raise ConfigError(f"{where}: missing keys {sorted(missing)}")
    unknown = set(doc) - required - set(optional)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")


def _build_pointset(doc: dict, default_seed: int) -> PointSet:
    _check_keys(doc, "pointset", {"generator"},
                {"dim", "spacing", "radius", "n_points", "short_len", "min_dist",
                 "seed", "points", "label"})
    gen = doc["generator"]
    if gen == "lattice":
        _check_keys(doc, "pointset(lattice)", {"generator", "dim", "spacing", "radius"})
        return lattice(int(doc["dim"]), float(doc["spacing"]), float(doc["radius"]))
    if gen == "fibonacci":
        _check_keys(doc, "pointset(fibonacci)", {"generator", "n_points", "short_len"})
        return fibonacci_chain(int(doc["n_points"]), float(doc["short_len"]))
    if gen == "hardcore":
        _check_keys(doc, "pointset(hardcore)", {"generator", "dim", "min_dist", "radius"}, {"seed"})
        return hardcore_random(
            int(doc["dim"]), float(doc["min_dist"]), float(doc["radius"]),
            seed=int(doc.get("seed", default_seed)),
        )
    if gen == "explicit":
        _check_keys(doc, "pointset(explicit)", {"generator", "dim", "points", "min_dist"}, {"label"})
        return PointSet(
            dim=int(doc["dim"]),
            points=np.asarray(doc["points"], dtype=float),
            min_dist=float(doc["min_dist"]),
            label=str(doc.get("label", "explicit")),
        )
    raise ConfigError(f"unknown point-set generator {gen!r}")


def _build_observable(doc: dict):
    _check_keys(doc, "observable", {"type"}, {"sigma", "dim"})
    if doc["type"] != "gaussian":
        raise ConfigError(f"unknown observable type {doc['type']!r}")
    return lambda dim: gaussian(int(doc.get("dim", dim)), float(doc["sigma"]))


def _build_spec(doc: dict):
    try:
        return spec_from_json(doc)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"scatterers: {exc}") from exc


def _rate_params(doc: dict) -> RateParams:
    if doc.get("rate_params", "paper") == "precise":
        return RateParams.precise()
    return RateParams.paper()


def _json_bytes(doc: dict) -> bytes:
    return (json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n").encode()


def _write_report(report: ExperimentReport, run: RunConfig) -> None:
    doc = report.to_dict(canonical=run.canonical)
    if not run.canonical:
        doc["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
        doc["execution"] = {"threads": run.threads}
    (run.output_dir / "report.json").write_bytes(_json_bytes(doc))


def _write_samples_csv(path: Path, values: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("index,value\n")
        for i, v in enumerate(np.asarray(values).ravel()):
            fh.write(f"{i},{v:.17g}\n")


def _cmd_gen_pointset(run: RunConfig) -> ExperimentReport:
    params = dict(run.parameters)
    _check_keys(params, "config", {"pointset"}, {"seed"})
    ps = _build_pointset(params["pointset"], run.seed)
    actual = verify_min_distance(ps)
    report = ExperimentReport(
        config={"experiment": "gen-pointset", **params, "resolved_label": ps.label},
        empirical={"min_distance": {"verified": actual if math.isfinite(actual) else None,
                                    "n_points": len(ps)}},
        theoretical={"min_distance": {"declared": ps.min_dist}},
        verdicts={"min_distance": (not math.isfinite(actual)) or actual >= ps.min_dist},
        seed=run.seed,
        runtime_seconds=0.0,
        arrays={"pointset": ps},
    )
    return report


def _cmd_constants(run: RunConfig) -> ExperimentReport:
    t0 = time.perf_counter()
    params = dict(run.parameters)
    _check_keys(params, "config", set(), {"rate_params", "seed"})
    base = _rate_params(params)
    precise = recompute_constants(base)

    def table_at(d: float) -> dict:
        comp_a = expansion_error_terms(2 * d, d, base)
        comp_b = expansion_error_terms(2 * d, 0.0, base)
        return {
            "d": d,
            "D": comp_a["total"] / d**3,
            "D_tilde": comp_b["total"] / d**3,
            "budget_A": {k: comp_a[k] / d**3 for k in ("leading", "middle", "last")},
            "budget_B": {k: comp_b[k] / d**3 for k in ("leading", "middle", "last")},
        }

    rounded = table_at(0.0525)
    derived = table_at(precise.scale_cap)
    empirical = {
        "d": {"derived": precise.scale_cap},
        "D": {"recomputed_rounded_d": rounded["D"], "recomputed_derived_d": derived["D"]},
        "D_tilde": {
            "recomputed_rounded_d": rounded["D_tilde"],
            "recomputed_derived_d": derived["D_tilde"],
        },
        "leading_term": {"value": derived["budget_A"]["leading"]},
        "budgets": {"rounded_d": rounded, "derived_d": derived},
    }
    theoretical = {
        "d": {"band": [0.05257, 0.05259]},
        "D": {"published": 4.54e3},
        "D_tilde": {"published": 4.38e3},
        "leading_term": {"band": [4340.0, 4360.0]},
        "budgets": {"published_split_A": [4352, 63, 124], "published_split_B": [4352, 10, 12]},
    }
    verdicts = {
        "d": 0.05257 <= precise.scale_cap <= 0.05259,
        "D": max(rounded["D"], derived["D"]) <= 4.54e3,
        "D_tilde": max(rounded["D_tilde"], derived["D_tilde"]) <= 4.38e3,
        "leading_term": 4340.0 <= derived["budget_A"]["leading"] <= 4360.0,
    }
    lines = [
        "constant            value",
        f"lambda*             {base.lambda_star:.6f}",
        f"a*                  {base.a_star:.3f}",
        f"d (published)       0.0525",
        f"d (derived)         {precise.scale_cap:.8f}",
        f"D  (published)      4540",
        f"D  (recomputed)     {derived['D']:.2f}  [rounded d: {rounded['D']:.2f}]",
        f"D~ (published)      4380",
        f"D~ (recomputed)     {derived['D_tilde']:.2f}  [rounded d: {rounded['D_tilde']:.2f}]",
        "budget A (leading/middle/last per d^3): "
        f"{derived['budget_A']['leading']:.1f} / {derived['budget_A']['middle']:.1f} / "
        f"{derived['budget_A']['last']:.1f}",
        "budget B (leading/middle/last per d^3): "
        f"{derived['budget_B']['leading']:.1f} / {derived['budget_B']['middle']:.1f} / "
        f"{derived['budget_B']['last']:.1f}",
    ]
    print("\n".join(lines))
    return ExperimentReport(
        config={"experiment": "constants", **params},
        empirical=empirical,
        theoretical=theoretical,
        verdicts=verdicts,
        seed=run.seed,
        runtime_seconds=time.perf_counter() - t0,
    )


def _cmd_run_ld(run: RunConfig) -> ExperimentReport:
    params = dict(run.parameters)
    _check_keys(
        params, "config",
        {"pointset", "scatterers", "observable", "which"},
        {"epsilons", "n_samples", "mode", "seed", "rate_params"},
    )
    ps = _build_pointset(params["pointset"], run.seed)
    spec = _build_spec(params["scatterers"])
    obs = _build_observable(params["observable"])(ps.dim)
    return verify_ld_bound(
        ps,
        spec,
        obs,
        epsilons=params.get("epsilons"),
        n_samples=int(params.get("n_samples", 10000)),
        which=params["which"],
        seed=run.seed,
        params=_rate_params(params),
        mode=params.get("mode", "auto"),
        threads=run.threads,
    )


def _cmd_run_clt(run: RunConfig) -> ExperimentReport:
    params = dict(run.parameters)
    _check_keys(
        params, "config",
        {"pointset", "scatterers", "observable", "n_samples"},
        {"thresholds", "seed"},
    )
    thresholds = params.get("thresholds", {})
    _check_keys(thresholds, "thresholds", set(), {"ks", "skewness", "kurtosis"})
    ps = _build_pointset(params["pointset"], run.seed)
    spec = _build_spec(params["scatterers"])
    obs = _build_observable(params["observable"])(ps.dim)
    return clt_experiment(
        ps,
        spec,
        obs,
        n_samples=int(params["n_samples"]),
        seed=run.seed,
        ks_threshold=float(thresholds.get("ks", 0.02)),
        skew_threshold=float(thresholds.get("skewness", 0.1)),
        kurtosis_threshold=float(thresholds.get("kurtosis", 0.3)),
        threads=run.threads,
    )


def _cmd_verify_norms(run: RunConfig) -> ExperimentReport:
    t0 = time.perf_counter()
    params = dict(run.parameters)
    _check_keys(params, "config", set(), {"instances", "seed"})
    if "instances" in params:
        instances = []
        for i, doc in enumerate(params["instances"]):
            _check_keys(doc, f"instances[{i}]", {"pointset", "sigma"}, {"delta"})
            instances.append(
                {
                    "pointset": _build_pointset(doc["pointset"], run.seed),
                    "sigma": float(doc["sigma"]),
                    "delta": None if doc.get("delta") is None else float(doc["delta"]),
                }
            )
    else:
        instances = battery.norm_battery()
    shared = battery.observables_for(instances)
    rows = []
    empirical, theoretical, verdicts = {}, {}, {}
    for inst in instances:
        ps = inst["pointset"]
        obs = shared[(ps.dim, inst["sigma"])]
        if inst["delta"] is None:
            rep = norms.check_norm_domination(obs, ps)
        else:
            rep = norms.check_seminorm_domination(obs, ps, inst["delta"])
        row = {
            "pointset": ps.label,
            "sigma": inst["sigma"],
            "delta": inst["delta"],
            **rep,
        }
        rows.append(row)
        key = f"{rep['check']}|{ps.label}|sigma={inst['sigma']:g}" + (
            f"|delta={inst['delta']:.6g}" if inst["delta"] is not None else ""
        )
        empirical[key] = {"lhs": rep["lhs"]}
        theoretical[key] = {"rhs": rep["rhs"], "tolerance": rep["tolerance"]}
        verdicts[key] = rep["pass"]
    return ExperimentReport(
        config={"experiment": "verify-norms", "n_instances": len(rows),
                "battery": "custom" if "instances" in params else "default"},
        empirical=empirical,
        theoretical=theoretical,
        verdicts=verdicts,
        seed=run.seed,
        runtime_seconds=time.perf_counter() - t0,
        arrays={"rows": rows},
    )


def _cmd_verify_laplace(run: RunConfig) -> ExperimentReport:
    params = dict(run.parameters)
    _check_keys(
        params, "config",
        {"pointset", "scatterers", "observable"},
        {"target_scales", "seed", "rate_params"},
    )
    ps = _build_pointset(params["pointset"], run.seed)
    spec = _build_spec(params["scatterers"])
    obs = _build_observable(params["observable"])(ps.dim)
    targets = params.get("target_scales")
    return verify_laplace_gap(
        ps, spec, obs,
        target_scales=None if targets is None else [float(t) for t in targets],
        params=_rate_params(params),
    )


_HANDLERS = {
    "gen-pointset": _cmd_gen_pointset,
    "constants": _cmd_constants,
    "run-ld": _cmd_run_ld,
    "run-clt": _cmd_run_clt,
    "verify-norms": _cmd_verify_norms,
    "verify-laplace": _cmd_verify_laplace,
}


def _write_outputs(report: ExperimentReport, run: RunConfig) -> None:
    from . import plots  # deferred: matplotlib import is slow

    run.output_dir.mkdir(parents=True, exist_ok=True)
    _write_report(report, run)
    cmd = run.command
    if cmd == "gen-pointset":
        ps = report.arrays["pointset"]
        write_csv(ps, run.output_dir / "points.csv")
        fig = plots.plot_pointset(ps)
        fig.savefig(run.output_dir / "pointset.png")
    elif cmd == "run-ld":
        if "samples" in report.arrays:
            _write_samples_csv(run.output_dir / "samples.csv", report.arrays["samples"])
        else:
            with open(run.output_dir / "exact_distribution.csv", "w", encoding="utf-8") as fh:
                fh.write("probability,value\n")
                for p, v in zip(report.arrays["exact_probs"], report.arrays["exact_values"]):
                    fh.write(f"{p:.17g},{v:.17g}\n")
        fig = plots.plot_tail_bounds(report)
        fig.savefig(run.output_dir / "tail_bounds.png")
    elif cmd == "run-clt":
        _write_samples_csv(run.output_dir / "samples.csv", report.arrays["samples"])
        fig = plots.plot_clt(report)
        fig.savefig(run.output_dir / "clt.png")
    elif cmd == "verify-norms":
        rows = report.arrays["rows"]
        with open(run.output_dir / "norm_battery.csv", "w", encoding="utf-8") as fh:
            fh.write("check,pointset,sigma,delta,a,lhs,rhs,pass\n")
            for r in rows:
                fh.write(
                    f"{r['check']},{r['pointset']},{r['sigma']:g},"
                    f"{'' if r['delta'] is None else format(r['delta'], '.10g')},"
                    f"{r.get('a', '')},{r['lhs']:.17g},"
                    f"{'' if r['rhs'] is None else format(r['rhs'], '.17g')},{int(r['pass'])}\n"
                )
        fig = plots.plot_norm_battery(rows)
        fig.savefig(run.output_dir / "norm_battery.png")
    elif cmd == "verify-laplace":
        with open(run.output_dir / "gap_scaling.csv", "w", encoding="utf-8") as fh:
            fh.write("scale,gap\n")
            for s, g in zip(report.arrays["slope_scales"], report.arrays["slope_gaps"]):
                fh.write(f"{s:.17g},{g:.17g}\n")
        fig = plots.plot_gap_scaling(report)
        fig.savefig(run.output_dir / "gap_scaling.png")
    # constants: report.json only
    import matplotlib.pyplot as plt

    plt.close("all")


def dispatch(run: RunConfig) -> int:
    """Run one command; returns the process exit status."""
    try:
        report = _HANDLERS[run.command](run)
    except ConfigError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    report.config = {
        "invocation": {
            "command": run.command,
            "parameters": run.parameters,
            "seed": run.seed,
        },
        **report.config,
    }
    _write_outputs(report, run)
    failed = [k for k, v in report.verdicts.items() if not v]
    if failed:
        print(f"FAILED verdicts: {failed}", file=sys.stderr)
        return 1
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="diffbounds",
        description="simulate random scatterers and verify self-averaging bounds",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, default=None, help="JSON config document")
        p.add_argument("--seed", type=int, default=None, help="seed override (u64)")
        p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--no-timestamp", action="store_true",
                       help="canonical reports: drop timestamp/runtime/execution")
    args = parser.parse_args(argv)

    try:
        if args.config is not None:
            try:
                params = json.loads(Path(args.config).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read config: {exc}") from exc
            if not isinstance(params, dict):
                raise ConfigError("config root must be a JSON object")
        else:
            params = {}
        seed = args.seed if args.seed is not None else int(params.get("seed", 0))
        run = RunConfig(
            command=args.command,
            parameters=params,
            seed=seed,
            output_dir=args.out,
            threads=args.threads,
            canonical=args.no_timestamp,
        )
        return dispatch(run)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failures also map to status 2
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
