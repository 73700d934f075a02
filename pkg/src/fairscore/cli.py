"""Batch pipeline: CSV in, fair scores and reports out.

Subcommands: transform, audit, sweep, barycenter, synth, verify.
Configuration comes from a JSON file; command-line flags override it.
Exit codes: 0 success, 1 runtime/verification failure, 2 validation error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .empirical import DEFAULT_GRID_SIZE, empirical_from_samples
from .errors import FairscoreError, OracleGuardError, ValidationError
from .interpolation import FairScores, ThetaPolicy, interpolate_scores
from .metrics import SelectionRule, build_report
from .oracle import (
    BRUTEFORCE_MAX_N,
    COORDINATE_MAX_M,
    LP_MAX_SUPPORT,
    barycenter_coordinate_oracle,
    lp_transport_exact,
    ot_cost_bruteforce,
)
from .population import GroupKey, ScoredPopulation, ScoreRecord, build_population, validate_population
from .synth import Beta, Gaussian, GroupSpec, Uniform, generate_synthetic
from .transport1d import Barycenter1D, barycenter_1d, w2_distance_squared
from .transportnd import (
    compute_barycenter_nd,
    group_measures,
    interpolate_scores_nd,
    sinkhorn_plan,
)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass
class RunConfig:
    input: str | None = None
    score_columns: list[str] = field(default_factory=lambda: ["score"])
    group_columns: list[str] = field(default_factory=lambda: ["group"])
    id_column: str | None = None
    theta: float = 1.0
    theta_overrides: dict[GroupKey, float] = field(default_factory=dict)
    weight_mode: str = "size"  # size | uniform | explicit
    explicit_weights: dict[GroupKey, float] = field(default_factory=dict)
    grid_size: int = DEFAULT_GRID_SIZE
    epsilon: float = 0.01
    tol: float = 1e-6
    max_iter: int = 10000
    min_group_size: int = 100
    output: str | None = None
    report: str | None = None
    seed: int = 0
    selection_threshold: float | None = None
    selection_top_k: int | None = None
    synth: list[GroupSpec] | None = None
    synth_seed: int = 0

    def validate(self) -> None:
        if not 0.0 <= self.theta <= 1.0:
            raise ValidationError(f"theta {self.theta} outside [0, 1]")
        for key, theta in self.theta_overrides.items():
            if not 0.0 <= theta <= 1.0:
                raise ValidationError(f"theta override {theta} for group {key} outside [0, 1]")
        if self.grid_size < 2:
            raise ValidationError("grid_size must be at least 2")
        if self.weight_mode not in ("size", "uniform", "explicit"):
            raise ValidationError(f"unknown weight_mode {self.weight_mode!r}")
        if self.weight_mode == "explicit" and not self.explicit_weights:
            raise ValidationError("weight_mode 'explicit' requires explicit_weights")
        if self.selection_threshold is not None and self.selection_top_k is not None:
            raise ValidationError("configure at most one of selection threshold and top-k")

    def selection_rule(self) -> SelectionRule | None:
        if self.selection_threshold is not None:
            return SelectionRule(threshold=self.selection_threshold)
        if self.selection_top_k is not None:
            return SelectionRule(top_k=self.selection_top_k)
        return None

    def theta_policy(self) -> ThetaPolicy:
        return ThetaPolicy(default_theta=self.theta, overrides=dict(self.theta_overrides))


_DIST_PARSERS = {
    "gaussian": lambda d: Gaussian(float(d["mean"]), float(d["sd"])),
    "beta": lambda d: Beta(float(d["a"]), float(d["b"])),
    "uniform": lambda d: Uniform(float(d["lo"]), float(d["hi"])),
}


def _parse_group_entries(entries, value_field: str) -> dict[GroupKey, float]:
    out = {}
    for entry in entries:
        key = GroupKey(tuple(str(v) for v in entry["group"]))
        out[key] = float(entry[value_field])
    return out


def _parse_synth(raw: dict) -> tuple[list[GroupSpec], int]:
    specs = []
    for g in raw.get("groups", []):
        dims = []
        for d in g["dims"]:
            kind = d.get("type")
            if kind not in _DIST_PARSERS:
                raise ValidationError(f"unknown synthetic distribution type {kind!r}")
            dims.append(_DIST_PARSERS[kind](d))
        specs.append(
            GroupSpec(
                key=GroupKey(tuple(str(v) for v in g["key"])),
                size=int(g["size"]),
                dims=tuple(dims),
            )
        )
    return specs, int(raw.get("seed", 0))


def load_config(path: str) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValidationError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config file {path} is not valid JSON: {exc}") from exc

    cfg = RunConfig()
    simple = {
        "input": str,
        "id_column": str,
        "theta": float,
        "weight_mode": str,
        "grid_size": int,
        "epsilon": float,
        "tol": float,
        "max_iter": int,
        "min_group_size": int,
        "output": str,
        "report": str,
        "seed": int,
        "selection_threshold": float,
        "selection_top_k": int,
    }
    for name, cast in simple.items():
        if raw.get(name) is not None:
            setattr(cfg, name, cast(raw[name]))
    if "score_columns" in raw:
        cfg.score_columns = [str(c) for c in raw["score_columns"]]
    if "group_columns" in raw:
        cfg.group_columns = [str(c) for c in raw["group_columns"]]
    if "theta_overrides" in raw:
        cfg.theta_overrides = _parse_group_entries(raw["theta_overrides"], "theta")
    if "explicit_weights" in raw:
        cfg.explicit_weights = _parse_group_entries(raw["explicit_weights"], "weight")
    if "synth" in raw:
        cfg.synth, cfg.synth_seed = _parse_synth(raw["synth"])
    return cfg


def _apply_flag_overrides(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    updates = {}
    for flag, attr in [
        ("input", "input"),
        ("output", "output"),
        ("report", "report"),
        ("theta", "theta"),
        ("grid_size", "grid_size"),
        ("epsilon", "epsilon"),
        ("tol", "tol"),
        ("max_iter", "max_iter"),
        ("min_group_size", "min_group_size"),
        ("seed", "seed"),
        ("weight_mode", "weight_mode"),
        ("threshold", "selection_threshold"),
        ("top_k", "selection_top_k"),
        ("id_column", "id_column"),
    ]:
        value = getattr(args, flag, None)
        if value is not None:
            updates[attr] = value
    if getattr(args, "score_columns", None):
        updates["score_columns"] = [c.strip() for c in args.score_columns.split(",")]
    if getattr(args, "group_columns", None):
        updates["group_columns"] = [c.strip() for c in args.group_columns.split(",")]
    return replace(cfg, **updates)


# ---------------------------------------------------------------------------
# CSV ingestion / emission


def load_csv(cfg: RunConfig) -> tuple[list[str], list[list[str]], ScoredPopulation]:
    if cfg.input is None:
        raise ValidationError("no input file configured")
    try:
        with open(cfg.input, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ValidationError(f"input file {cfg.input} is empty") from None
            rows = [row for row in reader]
    except OSError as exc:
        raise ValidationError(f"cannot read input file {cfg.input}: {exc}") from exc

    col_index = {name: i for i, name in enumerate(header)}
    for name in cfg.score_columns + cfg.group_columns + ([cfg.id_column] if cfg.id_column else []):
        if name not in col_index:
            raise ValidationError(f"column {name!r} not found in input header")

    records = []
    for rownum, row in enumerate(rows, start=2):  # header is row 1
        if len(row) != len(header):
            raise ValidationError(f"row {rownum}: expected {len(header)} fields, got {len(row)}")
        group_values = []
        for name in cfg.group_columns:
            value = row[col_index[name]]
            if value == "":
                raise ValidationError(f"row {rownum}: missing value in group column {name!r}")
            group_values.append(value)
        score_values = []
        for name in cfg.score_columns:
            raw_value = row[col_index[name]]
            if raw_value == "":
                raise ValidationError(f"row {rownum}: missing value in score column {name!r}")
            try:
                value = float(raw_value)
            except ValueError:
                raise ValidationError(
                    f"row {rownum}: score column {name!r} value {raw_value!r} is not a number"
                ) from None
            if not math.isfinite(value):
                raise ValidationError(f"row {rownum}: score column {name!r} is not finite")
            score_values.append(value)
        rec_id = row[col_index[cfg.id_column]] if cfg.id_column else str(rownum)
        score = score_values[0] if len(score_values) == 1 else tuple(score_values)
        records.append(ScoreRecord(id=rec_id, group_values=tuple(group_values), score=score))

    pop = build_population(records, attribute_count=len(cfg.group_columns))
    return header, rows, pop


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _emit_warnings(pop: ScoredPopulation, cfg: RunConfig) -> None:
    for warning in validate_population(pop, cfg.min_group_size):
        print(f"warning: {warning.message}", file=sys.stderr)


# ---------------------------------------------------------------------------
# Pipeline pieces


def barycenter_weights(pop: ScoredPopulation, cfg: RunConfig) -> list[float]:
    keys = pop.group_keys()
    if cfg.weight_mode == "size":
        return [len(pop.groups[k]) / len(pop) for k in keys]
    if cfg.weight_mode == "uniform":
        return [1.0 / len(keys)] * len(keys)
    missing = [k for k in keys if k not in cfg.explicit_weights]
    if missing:
        raise ValidationError(f"explicit_weights missing groups: {missing}")
    return [cfg.explicit_weights[k] for k in keys]


def compute_barycenter_1d(pop: ScoredPopulation, cfg: RunConfig) -> Barycenter1D:
    keys = pop.group_keys()
    dists = [empirical_from_samples(pop.group_scores(k)) for k in keys]
    return barycenter_1d(dists, barycenter_weights(pop, cfg), cfg.grid_size, keys=keys)


def transform_population(pop: ScoredPopulation, cfg: RunConfig) -> FairScores:
    policy = cfg.theta_policy()
    if pop.dimension == 1:
        return interpolate_scores(pop, compute_barycenter_1d(pop, cfg), policy)
    bary = compute_barycenter_nd(
        pop,
        weights=barycenter_weights(pop, cfg),
        epsilon=cfg.epsilon,
        tol=cfg.tol,
        max_iter=cfg.max_iter,
        seed=cfg.seed,
    )
    return interpolate_scores_nd(
        pop, bary, policy, epsilon=cfg.epsilon, tol=cfg.tol, max_iter=cfg.max_iter
    )


def _write_report(report, path: str | None) -> None:
    text = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# Commands


def run_transform(cfg: RunConfig) -> int:
    cfg.validate()
    if cfg.output is None:
        raise ValidationError("transform requires an output path")
    header, rows, pop = load_csv(cfg)
    _emit_warnings(pop, cfg)
    fair = transform_population(pop, cfg)

    if pop.dimension == 1:
        out_header = header + ["fair_score"]
        fair_cols = [[_fmt(v)] for v in fair.values]
    else:
        out_header = header + [f"fair_score_{k + 1}" for k in range(pop.dimension)]
        fair_cols = [[_fmt(v) for v in row] for row in fair.values]
    _write_csv(cfg.output, out_header, (row + extra for row, extra in zip(rows, fair_cols)))

    report = build_report(pop, fair, m=cfg.grid_size, rule=cfg.selection_rule())
    _write_report(report, cfg.report)
    return 0


def run_audit(cfg: RunConfig) -> int:
    """Metrics only: compute fair scores under the configured theta, emit the report."""
    cfg.validate()
    _, _, pop = load_csv(cfg)
    _emit_warnings(pop, cfg)
    fair = transform_population(pop, cfg)
    report = build_report(pop, fair, m=cfg.grid_size, rule=cfg.selection_rule())
    _write_report(report, cfg.report)
    return 0


def run_sweep(cfg: RunConfig, thetas: list[float]) -> int:
    cfg.validate()
    if not thetas:
        raise ValidationError("sweep requires a non-empty theta list")
    for theta in thetas:
        if not 0.0 <= theta <= 1.0:
            raise ValidationError(f"sweep theta {theta} outside [0, 1]")
    if cfg.output is None:
        raise ValidationError("sweep requires an output path")
    _, _, pop = load_csv(cfg)
    if pop.dimension != 1:
        raise ValidationError("sweep metrics are defined for 1-D scores")
    _emit_warnings(pop, cfg)

    bary = compute_barycenter_1d(pop, cfg)
    rule = cfg.selection_rule()
    header = [
        "theta",
        "individual_fairness_error",
        "group_fairness_w2",
        "group_fairness_ks",
        "utility_loss_mean_abs",
        "utility_loss_w2",
    ]
    if rule is not None:
        header.append("selection_ratio")
    out_rows = []
    for theta in thetas:
        fair = interpolate_scores(pop, bary, ThetaPolicy(default_theta=theta))
        report = build_report(pop, fair, m=cfg.grid_size, rule=rule)
        row = [
            _fmt(theta),
            _fmt(report.individual_fairness_error),
            _fmt(report.group_fairness_w2) if report.group_fairness_w2 is not None else "",
            _fmt(report.group_fairness_ks) if report.group_fairness_ks is not None else "",
            _fmt(report.utility_loss_mean_abs),
            _fmt(report.utility_loss_w2),
        ]
        if rule is not None:
            row.append(_fmt(report.selection.ratio))
        out_rows.append(row)
    _write_csv(cfg.output, header, out_rows)
    return 0


def run_barycenter(cfg: RunConfig) -> int:
    cfg.validate()
    if cfg.output is None:
        raise ValidationError("barycenter requires an output path")
    _, _, pop = load_csv(cfg)
    _emit_warnings(pop, cfg)
    if pop.dimension == 1:
        bary = compute_barycenter_1d(pop, cfg)
        rows = [
            [_fmt(p), _fmt(q)]
            for p, q in zip(bary.grid.ranks, bary.grid.quantiles)
        ]
        _write_csv(cfg.output, ["rank", "quantile"], rows)
    else:
        bary = compute_barycenter_nd(
            pop,
            weights=barycenter_weights(pop, cfg),
            epsilon=cfg.epsilon,
            tol=cfg.tol,
            max_iter=cfg.max_iter,
            seed=cfg.seed,
        )
        header = [f"support_{k + 1}" for k in range(bary.dimension)] + ["mass"]
        rows = [
            [_fmt(c) for c in point] + [_fmt(mass)]
            for point, mass in zip(bary.support, bary.masses)
        ]
        _write_csv(cfg.output, header, rows)
    return 0


def run_synth(cfg: RunConfig) -> int:
    cfg.validate()
    if cfg.synth is None:
        raise ValidationError("config has no 'synth' section")
    if cfg.output is None:
        raise ValidationError("synth requires an output path")
    records = generate_synthetic(cfg.synth, cfg.synth_seed)
    dim = len(records[0].score_vector())
    attr_count = len(records[0].group_values)
    group_cols = (
        cfg.group_columns
        if len(cfg.group_columns) == attr_count
        else [f"group_{k + 1}" for k in range(attr_count)]
    )
    score_cols = (
        cfg.score_columns
        if len(cfg.score_columns) == dim
        else (["score"] if dim == 1 else [f"score_{k + 1}" for k in range(dim)])
    )
    header = ["id"] + group_cols + score_cols
    rows = [
        [rec.id, *rec.group_values, *(_fmt(v) for v in rec.score_vector())]
        for rec in records
    ]
    _write_csv(cfg.output, header, rows)
    return 0


def run_verify(cfg: RunConfig, corrupt: bool = False) -> int:
    """Re-check the configured instance against the brute-force oracles.

    ``corrupt`` is a test hook that perturbs the barycenter before comparison
    so the failure path can be exercised.
    """
    cfg.validate()
    _, _, pop = load_csv(cfg)
    failures = 0

    def check(name: str, ok: bool, detail: str) -> None:
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        if not ok:
            failures += 1

    if pop.dimension == 1:
        for key in pop.group_keys():
            if len(pop.groups[key]) > BRUTEFORCE_MAX_N:
                raise OracleGuardError(
                    f"verify refuses groups larger than {BRUTEFORCE_MAX_N} "
                    f"(group {key} has {len(pop.groups[key])})"
                )
        if cfg.grid_size > COORDINATE_MAX_M:
            raise OracleGuardError(
                f"verify refuses grid sizes larger than {COORDINATE_MAX_M}"
            )
        keys = pop.group_keys()
        dists = {k: empirical_from_samples(pop.group_scores(k)) for k in keys}

        for i, a in enumerate(keys):
            for b in keys[i + 1 :]:
                if len(pop.groups[a]) != len(pop.groups[b]):
                    continue
                n = len(pop.groups[a])
                if n < 2:
                    continue
                fast = w2_distance_squared(dists[a], dists[b], n)
                brute = ot_cost_bruteforce(pop.group_scores(a), pop.group_scores(b))
                check(
                    f"w2({a},{b}) vs permutation brute force",
                    abs(fast - brute) <= 1e-9,
                    f"grid {fast:.12g} vs exact {brute:.12g}",
                )

        bary = compute_barycenter_1d(pop, cfg)
        quantiles = bary.grid.quantiles + (0.1 if corrupt else 0.0)
        reference = barycenter_coordinate_oracle(
            [dists[k] for k in keys],
            barycenter_weights(pop, cfg),
            cfg.grid_size,
            grid_resolution=1e-4,
        )
        gap = float(np.max(np.abs(quantiles - reference.quantiles)))
        check(
            "barycenter vs coordinate search",
            gap <= 1e-4,
            f"max coordinate gap {gap:.3e}",
        )
    else:
        measures = group_measures(pop)
        for key in pop.group_keys():
            if len(measures[key]) > LP_MAX_SUPPORT:
                raise OracleGuardError(
                    f"verify refuses supports larger than {LP_MAX_SUPPORT} (group {key})"
                )
        keys = pop.group_keys()
        for i, a in enumerate(keys):
            for b in keys[i + 1 :]:
                plan = sinkhorn_plan(
                    measures[a], measures[b], epsilon=cfg.epsilon, tol=cfg.tol,
                    max_iter=cfg.max_iter,
                )
                from .transportnd import squared_cost_matrix

                cost = plan.cost(squared_cost_matrix(measures[a].support, measures[b].support))
                lp_cost, _ = lp_transport_exact(measures[a], measures[b])
                slack = cfg.epsilon * np.log(len(measures[a]) * len(measures[b]) + 1.0)
                offset = 0.1 if corrupt else 0.0
                ok = lp_cost - 1e-9 <= cost + offset <= lp_cost + slack + 1e-9
                check(
                    f"sinkhorn({a},{b}) vs exact LP",
                    ok,
                    f"entropic {cost:.12g} in [{lp_cost:.12g}, {lp_cost + slack:.12g}]",
                )

    if failures:
        print(f"{failures} check(s) failed", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# Argument parsing


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--input", help="input CSV path")
    parser.add_argument("--output", help="output path")
    parser.add_argument("--report", help="JSON report path (default: stdout)")
    parser.add_argument("--score-columns", dest="score_columns", help="comma-separated score columns")
    parser.add_argument("--group-columns", dest="group_columns", help="comma-separated group columns")
    parser.add_argument("--id-column", dest="id_column", help="column holding unique record ids")
    parser.add_argument("--theta", type=float, help="default theta in [0, 1]")
    parser.add_argument("--grid-size", dest="grid_size", type=int, help="quantile grid size m")
    parser.add_argument("--weight-mode", dest="weight_mode", choices=["size", "uniform", "explicit"])
    parser.add_argument("--epsilon", type=float, help="entropic regularization (n-D)")
    parser.add_argument("--tol", type=float, help="solver tolerance (n-D)")
    parser.add_argument("--max-iter", dest="max_iter", type=int, help="solver iteration cap (n-D)")
    parser.add_argument("--min-group-size", dest="min_group_size", type=int)
    parser.add_argument("--seed", type=int, help="seed for support subsampling")
    parser.add_argument("--threshold", type=float, help="selection threshold")
    parser.add_argument("--top-k", dest="top_k", type=int, help="selection top-k")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairscore",
        description="Fair score post-processing via barycentric optimal transport",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("transform", "rewrite scores and emit a fairness report"),
        ("audit", "compute metrics only, no score rewrite"),
        ("sweep", "emit a theta/metrics trade-off table"),
        ("barycenter", "emit the barycenter as CSV"),
        ("synth", "generate a synthetic population CSV"),
        ("verify", "re-check the instance against brute-force oracles"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _add_common_flags(p)
        if name == "sweep":
            p.add_argument("--thetas", required=True, help="comma-separated theta values")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        cfg = _apply_flag_overrides(cfg, args)
        if args.command == "transform":
            return run_transform(cfg)
        if args.command == "audit":
            return run_audit(cfg)
        if args.command == "sweep":
            thetas = [float(t) for t in args.thetas.split(",") if t.strip() != ""]
            return run_sweep(cfg, thetas)
        if args.command == "barycenter":
            return run_barycenter(cfg)
        if args.command == "synth":
            return run_synth(cfg)
        if args.command == "verify":
            return run_verify(cfg)
        raise ValidationError(f"unknown command {args.command!r}")
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FairscoreError as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
