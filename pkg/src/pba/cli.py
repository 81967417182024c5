"""Configuration-driven command line entry point.

``pba run <config>`` executes one analysis described by a JSON document and
writes plot-ready CSV curves plus a schema-versioned JSON summary.
``pba pbox`` renders a single p-box curve straight from statistics given on
the command line.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from . import models
from .decision import Dominance, Hurwicz, INDETERMINATE, Optimist, Pessimist, UtilityInterval, choose, expected_interval
from .distributions import DistributionSpec
from .errors import ConfigParseError, PbaError
from .minimal_data import MinimalData, validate_minimal_data
from .models import REGISTRY, CohortCeaSpec, RegisteredModel, build_transition_matrix, discounted_outcomes, cohort_trace
from .pbox import PBox, build_pbox
from .propagate import EmpiricalPBox, OptimizerSettings, ParameterSet, propagate_mixed, propagate_pboxes, psa_propagate

CONFIG_SCHEMA = "pba-analysis/1"
SUMMARY_SCHEMA = "pba-summary/1"

PIPELINES = ("pbox-curve", "propagate", "propagate-mixed", "psa", "decide")

_RULES = {
    "dominance": lambda alpha: Dominance(),
    "pessimist": lambda alpha: Pessimist(),
    "optimist": lambda alpha: Optimist(),
    "hurwicz": lambda alpha: Hurwicz(alpha if alpha is not None else 0.5),
}


# ---------------------------------------------------------------------------
# Config parsing
# ---------------------------------------------------------------------------


def _need(mapping: Mapping, key: str, location: str):
    if key not in mapping:
        raise ConfigParseError(f"missing required key {key!r}", location=location)
    return mapping[key]


def _minimal_data_from(cfg: Mapping, location: str) -> MinimalData:
    try:
        d = MinimalData(
            minimum=float(_need(cfg, "min", location)),
            maximum=float(_need(cfg, "max", location)),
            median=None if cfg.get("median") is None else float(cfg["median"]),
            mean=None if cfg.get("mean") is None else float(cfg["mean"]),
            std=None if cfg.get("std") is None else float(cfg["std"]),
        )
        return validate_minimal_data(d)
    except PbaError as exc:
        if isinstance(exc, ConfigParseError):
            raise
        raise ConfigParseError(str(exc), location=location) from exc


def _distribution_from(cfg: Mapping, location: str) -> DistributionSpec:
    family = _need(cfg, "family", location)
    try:
        if family == "gamma":
            if "shape" in cfg:
                return DistributionSpec.gamma(float(cfg["shape"]), float(cfg["rate"]))
            data = MinimalData(-float("inf"), float("inf"), mean=float(cfg["mean"]), std=float(cfg["std"]))
            return DistributionSpec.from_moments("gamma", data)
        if family == "beta":
            if "alpha" in cfg:
                return DistributionSpec.beta(float(cfg["alpha"]), float(cfg["beta"]))
            data = MinimalData(-float("inf"), float("inf"), mean=float(cfg["mean"]), std=float(cfg["std"]))
            return DistributionSpec.from_moments("beta", data)
        if family == "uniform":
            return DistributionSpec.uniform(float(_need(cfg, "min", location)), float(_need(cfg, "max", location)))
        if family == "tabulated":
            return DistributionSpec.tabulated(_need(cfg, "values", location), _need(cfg, "cum_probs", location))
    except (PbaError, KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigParseError):
            raise
        raise ConfigParseError(f"bad distribution: {exc}", location=location) from exc
    raise ConfigParseError(f"unknown distribution family {family!r}", location=location)


def _inline_cea_model(cfg: Mapping, location: str) -> RegisteredModel:
    states = tuple(s["name"] for s in _need(cfg, "states", location))
    absorbing = tuple(bool(s.get("absorbing", False)) for s in cfg["states"])
    costs = tuple(float(s.get("cost", 0.0)) for s in cfg["states"])
    utilities = tuple(float(s.get("utility", 0.0)) for s in cfg["states"])
    transitions = tuple(_need(cfg, "transitions", location))
    initial = tuple(float(x) for x in _need(cfg, "initial", location))
    wtp = float(cfg.get("wtp", models.WTP_PER_QALY))
    outcome = cfg.get("outcome", "nmb")
    if outcome not in ("nmb", "cost", "qaly"):
        raise ConfigParseError(f"unknown outcome {outcome!r}", location=location)

    def builder(params: Mapping[str, float]):
        return build_transition_matrix(states, absorbing, transitions, params)

    try:
        spec = CohortCeaSpec(
            states=states,
            absorbing=absorbing,
            transition_builder=builder,
            costs=costs,
            utilities=utilities,
            cycle_length_years=float(_need(cfg, "cycle_length_years", location)),
            horizon_cycles=int(_need(cfg, "horizon_cycles", location)),
            discount_rate_annual=float(_need(cfg, "discount_rate_annual", location)),
            initial=initial,
        )
    except ValueError as exc:
        raise ConfigParseError(str(exc), location=location) from exc

    declared: set[str] = set()
    for entry in transitions:
        if "param" in entry:
            declared.add(entry["param"])
        for factor in entry.get("product", ()):
            if isinstance(factor, str):
                declared.add(factor)

    def model(params: Mapping[str, float]) -> float:
        cost, qaly = discounted_outcomes(cohort_trace(spec, params), spec)
        if outcome == "cost":
            return cost
        if outcome == "qaly":
            return qaly
        return wtp * qaly - cost

    return RegisteredModel(model, frozenset(declared))


@dataclass(frozen=True)
class ActionSpec:
    id: str
    overrides: Mapping[str, float]


@dataclass(frozen=True)
class AnalysisConfig:
    pipeline: str
    model_name: str
    model: RegisteredModel
    parameters: ParameterSet
    n: int = 50
    samples: int = 50
    seed: int = 0
    optimizer: OptimizerSettings = OptimizerSettings()
    threads: int = 1
    actions: tuple[ActionSpec, ...] = ()
    rule_name: str = "dominance"
    alpha: float | None = None
    curve_grid: int = 201
    psa_baseline: Mapping | None = None
    outputs: Mapping[str, str] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, cfg: Mapping) -> "AnalysisConfig":
        schema = cfg.get("schema")
        if schema != CONFIG_SCHEMA:
            raise ConfigParseError(
                f"unsupported schema {schema!r}, expected {CONFIG_SCHEMA!r}", location="schema"
            )
        pipeline = _need(cfg, "pipeline", "pipeline")
        if pipeline not in PIPELINES:
            raise ConfigParseError(f"unknown pipeline {pipeline!r}", location="pipeline")

        model_cfg = _need(cfg, "model", "model")
        if isinstance(model_cfg, str):
            if model_cfg not in REGISTRY:
                raise ConfigParseError(f"unknown model {model_cfg!r}", location="model")
            model_name, model = model_cfg, REGISTRY[model_cfg]
        elif isinstance(model_cfg, Mapping) and "cea" in model_cfg:
            model_name, model = "inline-cea", _inline_cea_model(model_cfg["cea"], "model.cea")
        else:
            raise ConfigParseError("model must be a registry name or {'cea': ...}", location="model")

        pcfg = _need(cfg, "parameters", "parameters")
        fixed = {str(k): float(v) for k, v in pcfg.get("fixed", {}).items()}
        precise = {
            str(k): _distribution_from(v, f"parameters.precise.{k}")
            for k, v in pcfg.get("precise", {}).items()
        }
        boxed = {
            str(k): _minimal_data_from(v, f"parameters.boxed.{k}")
            for k, v in pcfg.get("boxed", {}).items()
        }
        try:
            parameters = ParameterSet(fixed=fixed, precise=precise, boxed=boxed)
        except ValueError as exc:
            raise ConfigParseError(str(exc), location="parameters") from exc

        actions = tuple(
            ActionSpec(str(_need(a, "id", f"actions[{i}]")), dict(a.get("overrides", {})))
            for i, a in enumerate(cfg.get("actions", ()))
        )
        decision_cfg = cfg.get("decision", {})
        rule_name = decision_cfg.get("rule", "dominance")
        if rule_name not in _RULES:
            raise ConfigParseError(f"unknown decision rule {rule_name!r}", location="decision.rule")

        opt_cfg = cfg.get("optimizer", {})
        config = cls(
            pipeline=pipeline,
            model_name=model_name,
            model=model,
            parameters=parameters,
            n=int(cfg.get("n", 50)),
            samples=int(cfg.get("samples", 50)),
            seed=int(cfg.get("seed", 0)),
            optimizer=OptimizerSettings(
                budget=int(opt_cfg.get("budget", 2000)), tol=float(opt_cfg.get("tol", 1e-6))
            ),
            threads=int(cfg.get("threads", 1)),
            actions=actions,
            rule_name=rule_name,
            alpha=None if decision_cfg.get("alpha") is None else float(decision_cfg["alpha"]),
            curve_grid=int(cfg.get("curve_grid", 201)),
            psa_baseline=cfg.get("psa_baseline"),
            outputs=dict(cfg.get("output", {})),
        )
        config._validate_names()
        return config

    def _validate_names(self):
        declared = self.model.param_names
        given = self.parameters.names
        unknown = sorted(given - declared)
        if unknown:
            raise ConfigParseError(
                f"parameters {unknown} are not inputs of model {self.model_name!r}",
                location="parameters",
            )
        override_names = {name for a in self.actions for name in a.overrides}
        if unknown_overrides := sorted(override_names - declared):
            raise ConfigParseError(
                f"action overrides {unknown_overrides} are not inputs of model {self.model_name!r}",
                location="actions",
            )
        missing = sorted(declared - given - override_names)
        if missing:
            raise ConfigParseError(
                f"model {self.model_name!r} inputs {missing} are not configured",
                location="parameters",
            )

    def replace(self, **kwargs) -> "AnalysisConfig":
        from dataclasses import replace as dc_replace

        return dc_replace(self, **kwargs)


def load_config(path: str | Path) -> AnalysisConfig:
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise ConfigParseError(f"cannot read config: {exc}", location=str(path)) from exc
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(
            f"invalid JSON: {exc.msg}", location=f"{path}:{exc.lineno}:{exc.colno}"
        ) from exc
    return AnalysisConfig.from_dict(doc)


# ---------------------------------------------------------------------------
# Curve export
# ---------------------------------------------------------------------------


def export_curve(p: PBox | EmpiricalPBox, gridsize: int, path: str | Path) -> Path:
    """Write a theta,lbf,ubf CSV over the support padded 5% each side.

    Numbers are written with shortest round-trip precision.
    """
    if gridsize < 2:
        raise ValueError(f"gridsize must be at least 2, got {gridsize}")
    if isinstance(p, PBox):
        lo, hi = p.support.lo, p.support.hi
        lower, upper = p.lower, p.upper
    else:
        support = p.support()
        lo, hi = support.lo, support.hi
        lower, upper = p.lower, p.upper
    pad = 0.05 * (hi - lo)
    start, stop = lo - pad, hi + pad
    path = Path(path)
    lines = ["theta,lbf,ubf"]
    for k in range(gridsize):
        theta = start + (stop - start) * k / (gridsize - 1) if gridsize > 1 else start
        lines.append(f"{theta!r},{lower(theta)!r},{upper(theta)!r}")
    path.write_text("\n".join(lines) + "\n")
    return path


# ---------------------------------------------------------------------------
# Pipelines
# ---------------------------------------------------------------------------


def _baseline_psa(config: AnalysisConfig, out_dir: Path, outputs: dict) -> None:
    """Optional PSA companion run with each boxed parameter made precise."""
    cfg = config.psa_baseline
    families = cfg.get("families", {})
    samples = int(cfg.get("samples", 500))
    precise = dict(config.parameters.precise)
    for name, data in config.parameters.boxed.items():
        family = families.get(name, "uniform")
        precise[name] = DistributionSpec.from_moments(family, data)
    params = ParameterSet(fixed=config.parameters.fixed, precise=precise)
    ecdf = psa_propagate(config.model.fn, params, N=samples, seed=config.seed)
    target = out_dir / cfg.get("file", "baseline.csv")
    export_curve(ecdf, config.curve_grid, target)
    outputs["baseline"] = str(target)


def _propagate_for(config: AnalysisConfig, params: ParameterSet) -> EmpiricalPBox:
    if params.boxed and params.precise:
        return propagate_mixed(
            config.model.fn, params, n=config.n, N=config.samples, seed=config.seed,
            opt=config.optimizer, threads=config.threads,
        )
    if params.boxed:
        return propagate_pboxes(
            config.model.fn, params, n=config.n, opt=config.optimizer, threads=config.threads
        )
    if params.precise:
        return psa_propagate(config.model.fn, params, N=config.samples, seed=config.seed)
    y = float(config.model.fn(dict(params.fixed)))
    return EmpiricalPBox([(y, y, 1.0)], model_evaluations=1)


def run_analysis(config: AnalysisConfig, out_dir: str | Path = ".") -> dict:
    """Execute the configured pipeline; write outputs; return the summary."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    outputs: dict[str, str] = {}
    summary: dict = {
        "schema": SUMMARY_SCHEMA,
        "pipeline": config.pipeline,
        "model": config.model_name,
        "seed": config.seed,
        "n": config.n,
        "samples": config.samples,
    }
    curve_name = config.outputs.get("curve", "curve.csv")

    if config.pipeline == "pbox-curve":
        if not config.parameters.boxed:
            raise ConfigParseError("pbox-curve needs boxed parameters", location="parameters.boxed")
        multiple = len(config.parameters.boxed) > 1
        for name, data in sorted(config.parameters.boxed.items()):
            box = build_pbox(data)
            target = out_dir / (f"curve-{name}.csv" if multiple else curve_name)
            export_curve(box, config.curve_grid, target)
            outputs[f"curve:{name}"] = str(target)
    elif config.pipeline in ("propagate", "propagate-mixed", "psa"):
        params = config.parameters
        if config.pipeline == "propagate" and params.precise:
            raise ConfigParseError(
                "pipeline 'propagate' forbids precise parameters; use propagate-mixed",
                location="parameters.precise",
            )
        if config.pipeline == "psa" and params.boxed:
            raise ConfigParseError(
                "pipeline 'psa' forbids boxed parameters", location="parameters.boxed"
            )
        result = _propagate_for(config, params)
        target = out_dir / curve_name
        export_curve(result, config.curve_grid, target)
        outputs["curve"] = str(target)
        interval = expected_interval(result).interval
        summary["expected_interval"] = [interval.lo, interval.hi]
        summary["outcome_support"] = list(result.support())
        summary["model_evaluations"] = result.model_evaluations
        summary["unconverged_boxes"] = result.unconverged_boxes
        if config.psa_baseline:
            _baseline_psa(config, out_dir, outputs)
    elif config.pipeline == "decide":
        if len(config.actions) < 2:
            raise ConfigParseError("decide needs at least two actions", location="actions")
        intervals: list[UtilityInterval] = []
        evals = 0
        action_rows = []
        for action in config.actions:
            # An override pins the parameter for this action, displacing any
            # boxed or precise uncertainty it carried.
            fixed = dict(config.parameters.fixed)
            fixed.update(action.overrides)
            precise = {
                k: v for k, v in config.parameters.precise.items() if k not in action.overrides
            }
            boxed = {
                k: v for k, v in config.parameters.boxed.items() if k not in action.overrides
            }
            params = ParameterSet(fixed=fixed, precise=precise, boxed=boxed)
            result = _propagate_for(config, params)
            ui = expected_interval(result, action=action.id)
            intervals.append(ui)
            evals += result.model_evaluations
            target = out_dir / f"curve-{action.id}.csv"
            export_curve(result, config.curve_grid, target)
            outputs[f"curve:{action.id}"] = str(target)
            action_rows.append({"id": action.id, "expected_interval": [ui.lo, ui.hi]})
        rule = _RULES[config.rule_name](config.alpha)
        chosen = choose(intervals, rule)
        summary["actions"] = action_rows
        summary["rule"] = config.rule_name
        if config.alpha is not None:
            summary["alpha"] = config.alpha
        summary["chosen"] = "indeterminate" if chosen is INDETERMINATE else sorted(chosen)
        summary["model_evaluations"] = evals

    summary["runtime_seconds"] = time.perf_counter() - started
    summary["outputs"] = outputs
    summary_path = out_dir / config.outputs.get("summary", "summary.json")
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    summary["summary_path"] = str(summary_path)
    return summary


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pba", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an analysis config")
    run.add_argument("config", help="path to a JSON analysis config")
    run.add_argument("--seed", type=int, default=None, help="override the random seed")
    run.add_argument("--threads", type=int, default=None, help="worker threads (0 = all cores)")
    run.add_argument("--out", default=".", help="output directory")

    pbox = sub.add_parser("pbox", help="render one p-box curve from statistics")
    pbox.add_argument("--min", type=float, required=True, dest="minimum")
    pbox.add_argument("--max", type=float, required=True, dest="maximum")
    pbox.add_argument("--median", type=float, default=None)
    pbox.add_argument("--mean", type=float, default=None)
    pbox.add_argument("--std", type=float, default=None)
    pbox.add_argument("--grid", type=int, default=201)
    pbox.add_argument("--out", required=True, help="output CSV path")
    return parser


def _resolve_seed(flag_seed: int | None, config_seed: int) -> int:
    if flag_seed is not None:
        return flag_seed
    env = os.environ.get("PBA_SEED")
    if env is not None:
        return int(env)
    return config_seed


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            config = load_config(args.config)
            config = config.replace(seed=_resolve_seed(args.seed, config.seed))
            if args.threads is not None:
                config = config.replace(threads=args.threads)
            run_analysis(config, args.out)
            return 0
        if args.command == "pbox":
            data = MinimalData(
                minimum=args.minimum,
                maximum=args.maximum,
                median=args.median,
                mean=args.mean,
                std=args.std,
            )
            export_curve(build_pbox(validate_minimal_data(data)), args.grid, args.out)
            return 0
        raise ConfigParseError(f"unknown command {args.command!r}")
    except (PbaError, OSError, ValueError) as exc:
        record = {
            "error": {
                "type": type(exc).__name__,
                "message": str(exc),
                "location": getattr(exc, "location", None),
            }
        }
        print(json.dumps(record), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
