"""Command-line front end.

Four subcommands, all driven by a JSON config file:

  mzsloppy eval     --config cfg.json [--out path] [--format json]
  mzsloppy scan     --config cfg.json [--out path] [--format json|csv]
  mzsloppy optimize --config cfg.json [--out path] [--format json]
  mzsloppy compare  --config cfg.json [--out path] [--format json]

Data goes to stdout (or --out), diagnostics to stderr. Exit code 0 means
success, 1 a usage or config error, 2 a detected degenerate condition
(eval: the model is sloppy at the requested threshold). Output is
deterministic: keys are sorted and floats are written with full precision,
so identical inputs give byte-identical output. The csv format is only
available for scan, whose rows form a rectangular table.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import closed_forms, metrology, optimize
from .exceptions import SloppyModelError
from .model import ModelConfig, evaluate_state, jacobian_analytic
from .gaussian import physicality_check

MODEL_FIELDS = ("r", "q", "beta", "theta", "phi", "x", "alpha", "lam1", "lam2")

THREADS_ENV_VAR = "MZSLOPPY_THREADS"

_SCHEMAS = {
    "eval": "mzsloppy.eval/1",
    "scan": "mzsloppy.scan/1",
    "optimize": "mzsloppy.optimize/1",
    "compare": "mzsloppy.compare/1",
}

DEFAULT_COMPARE_R = 0.5
DEFAULT_COMPARE_Q = (0.0, 0.5, 1.0)
DEFAULT_COMPARE_PHI = (0.0, math.pi / 8, math.pi / 4)
DEFAULT_COMPARE_X = (0.0, 0.5, 1.0)

COMPARE_NOTES = (
    "Constant offset: at zero displacement the reference expressions exceed "
    "the engine values by a single configuration-dependent constant, shared "
    "by Q11, Q22 and Q12.",
    "On the fully transmissive slice (phi = 0) that shared offset equals "
    "exactly 2.",
    "The displacement-free part of the curvature entry U12 in the reference "
    "layer is exactly 4 times the engine value.",
    "The displacement term of U12: at beta = lam2 = 0 the engine gives "
    "4 q^2 sinh(2x) sin(gamma) while the reference displacement term "
    "vanishes there.",
    "These gaps are reported, not reconciled: the engine is first-principles "
    "and the reference layer is transcribed verbatim, and no single "
    "convention choice tried so far removes all of them at once.",
)


class ConfigError(Exception):
    """Bad usage or bad config content; maps to exit code 1."""


def _require_number(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"config field {name!r} must be a number")
    return float(value)


def _parse_model(obj) -> ModelConfig:
    if not isinstance(obj, dict):
        raise ConfigError("config field 'model' must be an object")
    for key in obj:
        if key not in MODEL_FIELDS:
            raise ConfigError(f"unknown model field {key!r}")
    fields = {}
    for name in MODEL_FIELDS:
        if name not in obj:
            raise ConfigError(f"missing model field {name!r}")
        fields[name] = _require_number(obj[name], f"model.{name}")
    try:
        return ModelConfig(**fields)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _check_keys(obj: dict, allowed: tuple[str, ...], where: str) -> None:
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"unknown {where} field {key!r}")


def _model_dict(config: ModelConfig) -> dict:
    return {name: getattr(config, name) for name in MODEL_FIELDS}


def _matrix_list(m: np.ndarray) -> list:
    return [[float(v) for v in row] for row in np.asarray(m)]


def _parse_weight(obj) -> np.ndarray:
    if (
        not isinstance(obj, list)
        or len(obj) != 2
        or any(not isinstance(row, list) or len(row) != 2 for row in obj)
    ):
        raise ConfigError("config field 'weight' must be a 2x2 array of numbers")
    return np.array(
        [[_require_number(v, "weight") for v in row] for row in obj], dtype=float
    )


def _parse_repetitions(obj) -> int:
    if isinstance(obj, bool) or not isinstance(obj, int) or obj < 1:
        raise ConfigError("config field 'repetitions' must be a positive integer")
    return obj


# -- eval ----------------------------------------------------------------


def run_eval(config_obj: dict) -> tuple[dict, int]:
    _check_keys(config_obj, ("model", "weight", "repetitions", "threshold"), "eval")
    if "model" not in config_obj:
        raise ConfigError("missing model field 'model'")
    config = _parse_model(config_obj["model"])

    state = evaluate_state(config)
    phys = physicality_check(state)
    jet = jacobian_analytic(config)
    q = metrology.qfi_matrix(jet)
    u = metrology.uhlmann_matrix(jet)

    try:
        quantumness = {
            "general": metrology.quantumness_general(q, u),
            "two_parameter": metrology.quantumness_two_param(q, u),
        }
    except SloppyModelError as exc:
        quantumness = {"error": str(exc)}

    threshold = None
    if "threshold" in config_obj:
        threshold = _require_number(config_obj["threshold"], "threshold")
    try:
        report = metrology.sloppiness_report(q, threshold=threshold)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    payload = {
        "schema": _SCHEMAS["eval"],
        "model": _model_dict(config),
        "physicality": {
            "classification": phys.classification,
            "symplectic_eigenvalues": [float(v) for v in phys.symplectic_eigenvalues],
        },
        "information_matrix": _matrix_list(q),
        "information_determinant": float(np.linalg.det(q)),
        "curvature_matrix": _matrix_list(u),
        "quantumness": quantumness,
        "sloppiness": {
            "eigenvalues": [float(v) for v in report.eigenvalues],
            "threshold": float(report.threshold),
            "sloppy": bool(report.sloppy),
            "null_directions": [
                [float(v) for v in d] for d in report.null_directions
            ],
        },
    }
    if "weight" in config_obj:
        weight = _parse_weight(config_obj["weight"])
        reps = _parse_repetitions(config_obj.get("repetitions", 1))
        try:
            bounds = metrology.scalar_crb(q, u, weight, repetitions=reps)
            payload["scalar_bounds"] = {
                "weight": _matrix_list(weight),
                "repetitions": reps,
                "c_q": float(bounds.c_q),
                "bracket_upper": float(bounds.bracket_upper),
            }
        except SloppyModelError as exc:
            payload["scalar_bounds"] = {"error": str(exc)}
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    elif "repetitions" in config_obj:
        raise ConfigError("config field 'repetitions' requires 'weight'")

    exit_code = 2 if payload["sloppiness"]["sloppy"] else 0
    return payload, exit_code


# -- scan ----------------------------------------------------------------


def _parse_objective(obj) -> optimize.Objective:
    if not isinstance(obj, dict):
        raise ConfigError("config field 'objective' must be an object")
    _check_keys(obj, ("kind", "layer", "weight", "repetitions"), "objective")
    if "kind" not in obj or not isinstance(obj["kind"], str):
        raise ConfigError("config field 'objective.kind' must be a string")
    layer = obj.get("layer", "closed_form")
    if not isinstance(layer, str):
        raise ConfigError("config field 'objective.layer' must be a string")
    weight = None
    if "weight" in obj:
        weight = tuple(tuple(row) for row in _parse_weight(obj["weight"]).tolist())
    reps = _parse_repetitions(obj.get("repetitions", 1))
    try:
        return optimize.Objective(
            kind=obj["kind"], layer=layer, weight=weight, repetitions=reps
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _parse_axes(obj) -> tuple[optimize.Axis, ...]:
    if not isinstance(obj, list) or not obj:
        raise ConfigError("config field 'axes' must be a non-empty array")
    axes = []
    for item in obj:
        if not isinstance(item, dict):
            raise ConfigError("each axis must be an object")
        _check_keys(item, ("name", "values"), "axis")
        if "name" not in item or not isinstance(item["name"], str):
            raise ConfigError("config field 'axis.name' must be a string")
        if "values" not in item or not isinstance(item["values"], list):
            raise ConfigError("config field 'axis.values' must be an array")
        values = tuple(_require_number(v, "axis.values") for v in item["values"])
        try:
            axes.append(optimize.Axis(name=item["name"], values=values))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    return tuple(axes)


def _resolve_workers(config_obj: dict) -> int:
    env = os.environ.get(THREADS_ENV_VAR)
    if env is not None:
        try:
            workers = int(env)
        except ValueError:
            workers = 0
        if workers < 1:
            raise ConfigError(
                f"{THREADS_ENV_VAR} must be a positive integer, got {env!r}"
            )
        return workers
    if "workers" in config_obj:
        workers = config_obj["workers"]
        if isinstance(workers, bool) or not isinstance(workers, int) or workers < 1:
            raise ConfigError("config field 'workers' must be a positive integer")
        return workers
    return 1


def run_scan(config_obj: dict) -> tuple[dict, int]:
    _check_keys(config_obj, ("model", "objective", "axes", "workers"), "scan")
    for required in ("model", "objective", "axes"):
        if required not in config_obj:
            raise ConfigError(f"missing scan field {required!r}")
    base = _parse_model(config_obj["model"])
    objective = _parse_objective(config_obj["objective"])
    axes = _parse_axes(config_obj["axes"])
    workers = _resolve_workers(config_obj)
    try:
        spec = optimize.SearchSpec(base=base, axes=axes)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    result = optimize.grid_scan(spec, objective, workers=workers)

    def row_dict(row: optimize.ScanRow) -> dict:
        return {
            "point": {k: float(v) for k, v in row.point.items()},
            "value": None if row.value is None else float(row.value),
            "error": row.error,
        }

    payload = {
        "schema": _SCHEMAS["scan"],
        "model": _model_dict(base),
        "objective": {
            "kind": objective.kind,
            "layer": objective.layer,
            "repetitions": objective.repetitions,
            "weight": None
            if objective.weight is None
            else [list(row) for row in objective.weight],
        },
        "axes": [{"name": a.name, "values": list(a.values)} for a in axes],
        "workers": workers,
        "rows": [row_dict(r) for r in result.rows],
        "best": None if result.best is None else row_dict(result.best),
    }
    return payload, 0


def _scan_csv(payload: dict) -> str:
    names = [axis["name"] for axis in payload["axes"]]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(names + ["value", "error"])
    for row in payload["rows"]:
        cells = [f"{row['point'][n]:.17g}" for n in names]
        cells.append("" if row["value"] is None else f"{row['value']:.17g}")
        cells.append(row["error"] or "")
        writer.writerow(cells)
    return buf.getvalue()


# -- optimize ------------------------------------------------------------


def run_optimize(config_obj: dict) -> tuple[dict, int]:
    """Recover the reference settings, or polish a custom objective.

    Config with "model"/"objective"/"axes" runs a grid scan plus local
    refinement; config with "r"/"x" (optional "q") runs the full
    find_known_configurations recovery with landmark labels.
    """
    if "model" in config_obj or "objective" in config_obj or "axes" in config_obj:
        _check_keys(config_obj, ("model", "objective", "axes", "workers"), "optimize")
        for required in ("model", "objective", "axes"):
            if required not in config_obj:
                raise ConfigError(f"missing optimize field {required!r}")
        base = _parse_model(config_obj["model"])
        objective = _parse_objective(config_obj["objective"])
        axes = _parse_axes(config_obj["axes"])
        workers = _resolve_workers(config_obj)
        try:
            spec = optimize.SearchSpec(base=base, axes=axes)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        scan = optimize.grid_scan(spec, objective, workers=workers)
        if scan.best is None:
            raise SloppyModelError("objective failed at every grid point")
        refined = optimize.refine_local(spec, objective, scan.best.point)
        payload = {
            "schema": _SCHEMAS["optimize"],
            "mode": "custom",
            "model": _model_dict(base),
            "objective": {
                "kind": objective.kind,
                "layer": objective.layer,
                "repetitions": objective.repetitions,
            },
            "point": optimize.fold_angles(
                {k: float(v) for k, v in refined.point.items()}
            ),
            "value": float(refined.value),
            "scan_best_value": float(scan.best.value),
            "refine_iterations": refined.iterations,
            "refine_capped": refined.capped,
        }
        return payload, 0

    _check_keys(config_obj, ("r", "x", "q"), "optimize")
    for required in ("r", "x"):
        if required not in config_obj:
            raise ConfigError(f"missing optimize field {required!r}")
    r = _require_number(config_obj["r"], "r")
    x = _require_number(config_obj["x"], "x")
    q = _require_number(config_obj.get("q", 0.0), "q")
    try:
        found = optimize.find_known_configurations(r, x, q)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    payload = {
        "schema": _SCHEMAS["optimize"],
        "mode": "find_known",
        "inputs": {"r": r, "x": x, "q": q},
        "maximum": found["maximum"],
        "optimal": found["optimal"],
        "landmarks": found["landmarks"],
    }
    return payload, 0


# -- compare -------------------------------------------------------------


def run_compare(
    r: float = DEFAULT_COMPARE_R,
    q_values: tuple[float, ...] = DEFAULT_COMPARE_Q,
    phi_values: tuple[float, ...] = DEFAULT_COMPARE_PHI,
    x_values: tuple[float, ...] = DEFAULT_COMPARE_X,
) -> dict:
    """Closed-form vs engine comparison over a displacement/mixer/squeezer grid.

    Returns the full payload: one record per config and matrix entry, plus a
    summary with the calibration residuals (the q-dependent part of Q11 on
    the phi = 0 slice, where the two layers genuinely agree) and the
    standing discrepancy notes.
    """
    records = []
    offsets_q0 = {}
    for q in q_values:
        for phi in phi_values:
            for x in x_values:
                config = ModelConfig(r=r, q=q, phi=phi, x=x)
                report = closed_forms.compare(config)
                for rec in report.records:
                    records.append(
                        {
                            "model": _model_dict(config),
                            "entry": rec.entry,
                            "closed_form": rec.closed_form,
                            "numeric": rec.numeric,
                            "abs_difference": rec.abs_difference,
                            "rel_difference": rec.rel_difference,
                        }
                    )
                    if rec.entry == "Q11" and q == 0.0:
                        offsets_q0[(phi, x)] = rec.closed_form - rec.numeric

    calibration = []
    for record in records:
        model = record["model"]
        key = (model["phi"], model["x"])
        if (
            record["entry"] == "Q11"
            and model["q"] > 0.0
            and model["phi"] == 0.0
            and key in offsets_q0
        ):
            offset = record["closed_form"] - record["numeric"]
            calibration.append(
                {
                    "q": model["q"],
                    "x": model["x"],
                    "entry": "Q11",
                    "residual": abs(offset - offsets_q0[key]),
                }
            )

    summary = {
        "record_count": len(records),
        "max_abs_difference": max(r_["abs_difference"] for r_ in records),
        "calibration": calibration,
        "calibration_max_residual": max(
            (c["residual"] for c in calibration), default=None
        ),
        "notes": list(COMPARE_NOTES),
    }
    return {
        "schema": _SCHEMAS["compare"],
        "grid": {
            "r": r,
            "q_values": list(q_values),
            "phi_values": list(phi_values),
            "x_values": list(x_values),
        },
        "records": records,
        "summary": summary,
    }


def _parse_value_list(obj, name: str) -> tuple[float, ...]:
    if not isinstance(obj, list) or not obj:
        raise ConfigError(f"config field {name!r} must be a non-empty array")
    return tuple(_require_number(v, name) for v in obj)


def run_compare_command(config_obj: dict) -> tuple[dict, int]:
    _check_keys(config_obj, ("r", "q_values", "phi_values", "x_values"), "compare")
    kwargs = {}
    if "r" in config_obj:
        kwargs["r"] = _require_number(config_obj["r"], "r")
    for name in ("q_values", "phi_values", "x_values"):
        if name in config_obj:
            kwargs[name] = _parse_value_list(config_obj[name], name)
    try:
        payload = run_compare(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return payload, 0


# -- driver --------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    # route argparse usage errors through the config-error path (exit 1)
    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="mzsloppy", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for command in ("eval", "scan", "optimize", "compare"):
        p = sub.add_parser(command)
        p.add_argument("--config", required=True, help="path to a JSON config file")
        p.add_argument("--out", default=None, help="write output here, not stdout")
        p.add_argument("--format", default="json", choices=("csv", "json"))
    return parser


_RUNNERS = {
    "eval": run_eval,
    "scan": run_scan,
    "optimize": run_optimize,
    "compare": run_compare_command,
}


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        if args.format == "csv" and args.command != "scan":
            raise ConfigError(
                f"format 'csv' is only available for scan, not {args.command!r}"
            )
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                config_obj = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(config_obj, dict):
            raise ConfigError("config file must hold a JSON object")
        payload, exit_code = _RUNNERS[args.command](config_obj)
    except ConfigError as exc:
        print(f"mzsloppy: error: {exc}", file=sys.stderr)
        return 1
    except SloppyModelError as exc:
        print(f"mzsloppy: degenerate model: {exc}", file=sys.stderr)
        return 2

    if args.format == "csv":
        text = _scan_csv(payload)
    else:
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"mzsloppy: error: cannot write output file: {exc}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text)
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
