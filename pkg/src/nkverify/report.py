"""Campaign configuration, runners and canonical JSON reports."""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from nkverify import __version__
from nkverify.chart import DEFAULT_FD_STEP, SphereChart, random_tangent_frame
from nkverify.errors import ConfigError, NKVerifyError
from nkverify.integrability import (
    DEFAULT_THRESHOLDS,
    NIJENHUIS_BASELINE,
    NIJENHUIS_FLOOR_FRACTION,
    NON_INTEGRABLE,
    build_k_field,
    certify_point,
    nijenhuis_baseline,
)
from nkverify.nk import (
    NK_TOLERANCES,
    NKStructure,
    random_rotation,
    rotate_structure,
    verify_nk_conditions,
)

__all__ = [
    "SCHEMA_VERSION",
    "REPORT_SCHEMA",
    "CampaignConfig",
    "load_config",
    "run_verify_nk",
    "run_certify_tamed",
    "run_nijenhuis_baseline",
    "canonical_json",
    "emit_report",
    "validate_report",
    "summary_from_records",
]

SCHEMA_VERSION = "1.0"
POINT_RADIUS = 0.4
BASELINE_REGRESSION = 0.2

KNOWN_TOLERANCES = set(NK_TOLERANCES) | set(DEFAULT_THRESHOLDS)

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema_version", "toolkit_version", "command", "config", "records", "summary", "verdicts"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "toolkit_version": {"type": "string"},
        "command": {"enum": ["verify-nk", "certify-tamed", "nijenhuis-baseline"]},
        "config": {
            "type": "object",
            "required": ["seed", "samples", "points", "rho", "fd_step", "tolerances"],
        },
        "records": {"type": "array", "items": {"type": "object"}},
        "errors": {
            "type": "array",
            "items": {"type": "object", "required": ["index", "error", "message"]},
        },
        "summary": {"type": "object"},
        "verdicts": {
            "type": "object",
            "required": ["passed", "checks"],
            "properties": {
                "passed": {"type": "boolean"},
                "checks": {"type": "object", "additionalProperties": {"type": "boolean"}},
            },
        },
    },
}


@dataclass
class CampaignConfig:
    seed: int = 0
    samples: int = 10
    points: int = 20
    rho: float = 0.5
    fd_step: float = DEFAULT_FD_STEP
    tolerances: dict = field(default_factory=dict)
    rotation: object = None
    chart_base: list | None = None
    output_path: str | None = None
    workers: int = 1

    def validate(self) -> "CampaignConfig":
        problems = []
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or not 0 <= self.seed < 2**64:
            problems.append("seed: must be an unsigned 64-bit integer")
        for name in ("samples", "points"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                problems.append(f"{name}: must be a non-negative integer")
        if not isinstance(self.workers, int) or self.workers < 1:
            problems.append("workers: must be a positive integer")
        if not isinstance(self.rho, (int, float)) or not 0.0 <= self.rho < 1.0:
            problems.append("rho: must lie in [0, 1)")
        if not isinstance(self.fd_step, (int, float)) or not self.fd_step > 0:
            problems.append("fd_step: must be positive")
        for k, v in self.tolerances.items():
            if k not in KNOWN_TOLERANCES:
                problems.append(f"tolerances.{k}: unknown tolerance (known: {', '.join(sorted(KNOWN_TOLERANCES))})")
            elif not isinstance(v, (int, float)) or not v > 0:
                problems.append(f"tolerances.{k}: must be positive")
        rot = self.rotation
        if rot not in (None, "identity", "random"):
            try:
                rotate_structure(np.asarray(rot, dtype=float))
            except (NKVerifyError, ValueError, TypeError) as exc:
                problems.append(f"rotation: {exc}")
        if self.chart_base is not None:
            p = np.asarray(self.chart_base, dtype=float)
            if p.shape != (7,) or abs(np.linalg.norm(p) - 1.0) > 1e-9:
                problems.append("chart_base: must be a unit 7-vector")
        if problems:
            raise ConfigError("; ".join(problems))
        return self

    def echo(self) -> dict:
        """Effective configuration; worker count and output path are omitted
        because they do not affect results."""
        d = asdict(self)
        d.pop("workers")
        d.pop("output_path")
        d["tolerances"] = dict(sorted(self.tolerances.items()))
        if isinstance(self.rotation, np.ndarray):
            d["rotation"] = self.rotation.tolist()
        return d


def load_config(path: str | Path | None = None, **overrides) -> CampaignConfig:
    """Merge a JSON config file with explicit overrides (overrides win)."""
    data: dict = {}
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be an object")
    known = set(CampaignConfig.__dataclass_fields__)
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"{path}: unknown field(s) {', '.join(unknown)}")
    tol = dict(data.pop("tolerances", {}) or {})
    tol.update(overrides.pop("tolerances", {}) or {})
    data.update({k: v for k, v in overrides.items() if v is not None})
    data["tolerances"] = tol
    return CampaignConfig(**data).validate()


def _rng(config: CampaignConfig, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=key))


def _structure(config: CampaignConfig, index: int = 0) -> NKStructure:
    rot = config.rotation
    if rot is None or rot == "identity":
        return NKStructure()
    if rot == "random":
        return NKStructure(random_rotation(_rng(config, 1_000_000, index)))
    return rotate_structure(np.asarray(rot, dtype=float))


def _chart(config: CampaignConfig, rng: np.random.Generator) -> SphereChart:
    if config.chart_base is not None:
        p0 = np.asarray(config.chart_base, dtype=float)
        p0 = p0 / np.linalg.norm(p0)
    else:
        p0 = rng.normal(size=7)
        p0 /= np.linalg.norm(p0)
    return SphereChart(p0, random_tangent_frame(p0, rng), fd_step=config.fd_step)


def _points(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.normal(size=(n, 6))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * POINT_RADIUS * rng.uniform(0.0, 1.0, size=(n, 1)) ** (1.0 / 6.0)


def _complex(z) -> list | None:
    return None if z is None else [float(np.real(z)), float(np.imag(z))]


def _guarded(func, arg):
    try:
        return func(arg), None
    except NKVerifyError as exc:
        return [], {"index": arg[1], "error": type(exc).__name__, "message": str(exc)}


def _map(config: CampaignConfig, func, n: int) -> tuple[list[dict], list[dict]]:
    """Run ``func`` per sample index; results are concatenated in index order.

    A sample raising a toolkit error contributes an entry to the error list
    instead of aborting the campaign, so completed samples are still reported.
    """
    args = [(asdict(config), i) for i in range(n)]
    if config.workers == 1 or n <= 1:
        results = [_guarded(func, a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_guarded, [func] * n, args))
    records = [r for chunk, _ in results for r in chunk]
    errors = [e for _, e in results if e is not None]
    return records, errors


def _config_from(d: dict) -> CampaignConfig:
    return CampaignConfig(**d)


# verify-nk ------------------------------------------------------------------


def _verify_one(arg) -> list[dict]:
    config, index = _config_from(arg[0]), arg[1]
    rng = _rng(config, 1, index)
    structure = _structure(config, index)
    chart = _chart(config, rng)
    pts = _points(rng, config.points)
    rep = verify_nk_conditions(structure, chart, pts)
    records = []
    for j in range(len(pts)):
        records.append(
            {
                "structure": index,
                "point": j,
                "x": rep.points[j].tolist(),
                "skew_residual": float(rep.skew_residual[j]),
                "nabla_j_min_norm": float(rep.nabla_j_min_norm[j]),
                "nabla_omega_residual": float(rep.nabla_omega_residual[j]),
                "domega_type_residual": float(rep.domega_type_residual[j]),
                "dim_omega_residual": float(rep.dim_omega_residual[j]),
                "acs_square_residual": float(rep.acs_square_residual[j]),
                "orthogonality_residual": float(rep.orthogonality_residual[j]),
                "lambda": float(rep.lambdas[j]),
            }
        )
    return records


def run_verify_nk(config: CampaignConfig) -> tuple[dict, int]:
    n_struct = max(config.samples, 1) if config.rotation == "random" else 1
    records, errors = _map(config, _verify_one, n_struct)
    tol = dict(NK_TOLERANCES, **{k: v for k, v in config.tolerances.items() if k in NK_TOLERANCES})
    summary = summary_from_records("verify-nk", records)
    checks = {
        "skew": summary["max_skew_residual"] < tol["skew"],
        "strict": summary["min_nabla_j_norm"] > tol["nabla_j_floor"],
        "nabla_omega": summary["max_nabla_omega_residual"] < tol["nabla_omega"],
        "domega_type": summary["max_domega_type_residual"] < tol["domega_type"],
        "dim_omega": summary["max_dim_omega_residual"] < tol["dim_omega"],
        "lambda_constant": all(s < tol["lambda_rel"] for s in summary["lambda_spread"].values()),
    }
    return _finish("verify-nk", config, records, summary, checks, errors)


# certify-tamed --------------------------------------------------------------


def _certify_one(arg) -> list[dict]:
    config, index = _config_from(arg[0]), arg[1]
    rng = _rng(config, 2, index)
    structure = _structure(config, 0)
    chart = _chart(config, rng)
    _, field_ = build_k_field(structure, chart, rng, config.rho)
    thresholds = {k: v for k, v in config.tolerances.items() if k in DEFAULT_THRESHOLDS}
    records = []
    for j, x in enumerate(_points(rng, config.points)):
        c = certify_point(field_, chart, x, structure=structure, thresholds=thresholds)
        records.append(
            {
                "sample": index,
                "point": j,
                "x": c.point.tolist(),
                "verdict": c.verdict,
                "nijenhuis_norm": c.nijenhuis_norm,
                "domega30_coefficient": _complex(c.domega30_coefficient),
                "abs_domega30_coefficient": abs(c.domega30_coefficient),
                "omega_11_residual": c.omega_11_residual,
                "domega_mixed_residual": c.domega_mixed_residual,
                "domega_pure_norm": c.domega_pure_norm,
                "det_j_plus_i": c.det_j_plus_i,
                "predicted_extended": _complex(c.predicted_extended),
                "predicted_short": _complex(c.predicted_short),
                "lower_bound": c.lower_bound,
                "abs_det_v": c.abs_det_v,
                "lam_product": c.lam_product,
            }
        )
    return records


def run_certify_tamed(config: CampaignConfig) -> tuple[dict, int]:
    records, errors = _map(config, _certify_one, config.samples)
    summary = summary_from_records("certify-tamed", records)
    checks = {"all_non_integrable": all(r["verdict"] == NON_INTEGRABLE for r in records)}
    return _finish("certify-tamed", config, records, summary, checks, errors)


# nijenhuis-baseline ---------------------------------------------------------


def _baseline_one(arg) -> list[dict]:
    config, index = _config_from(arg[0]), arg[1]
    rng = _rng(config, 3, index)
    structure = _structure(config, index)
    chart = _chart(config, rng)
    pts = _points(rng, config.points)
    values = nijenhuis_baseline(structure, [(chart, x) for x in pts])
    return [
        {"structure": index, "point": j, "x": pts[j].tolist(), "nijenhuis_norm": float(v)}
        for j, v in enumerate(values)
    ]


def run_nijenhuis_baseline(config: CampaignConfig) -> tuple[dict, int]:
    n_struct = max(config.samples, 1) if config.rotation == "random" else 1
    records, errors = _map(config, _baseline_one, n_struct)
    summary = summary_from_records("nijenhuis-baseline", records)
    if records:
        summary["calibrated_floor"] = NIJENHUIS_FLOOR_FRACTION * summary["min_nijenhuis_norm"]
    summary["frozen_baseline"] = NIJENHUIS_BASELINE
    summary["floor_fraction"] = NIJENHUIS_FLOOR_FRACTION
    checks = {
        "within_regression_band": all(
            abs(r["nijenhuis_norm"] / NIJENHUIS_BASELINE - 1.0) <= BASELINE_REGRESSION for r in records
        )
    }
    return _finish("nijenhuis-baseline", config, records, summary, checks, errors)


# report assembly ------------------------------------------------------------


def summary_from_records(command: str, records: list[dict]) -> dict:
    """Extrema over the records; recomputable from the emitted file."""

    def ext(fn, key):
        vals = [r[key] for r in records if r.get(key) is not None]
        return fn(vals) if vals else None

    summary: dict = {"n_records": len(records)}
    if command == "verify-nk":
        summary.update(
            max_skew_residual=ext(max, "skew_residual") or 0.0,
            min_nabla_j_norm=ext(min, "nabla_j_min_norm") if records else math.inf,
            max_nabla_omega_residual=ext(max, "nabla_omega_residual") or 0.0,
            max_domega_type_residual=ext(max, "domega_type_residual") or 0.0,
            max_dim_omega_residual=ext(max, "dim_omega_residual") or 0.0,
            max_acs_square_residual=ext(max, "acs_square_residual") or 0.0,
            max_orthogonality_residual=ext(max, "orthogonality_residual") or 0.0,
            min_lambda=ext(min, "lambda"),
            max_lambda=ext(max, "lambda"),
        )
        spread = {}
        for s in sorted({r["structure"] for r in records}):
            lam = [r["lambda"] for r in records if r["structure"] == s]
            spread[str(s)] = (max(lam) - min(lam)) / (sum(lam) / len(lam))
        summary["lambda_spread"] = spread
    elif command == "certify-tamed":
        counts: dict[str, int] = {}
        for r in records:
            counts[r["verdict"]] = counts.get(r["verdict"], 0) + 1
        dets = [abs(r["det_j_plus_i"]) for r in records if r["det_j_plus_i"] is not None]
        summary.update(
            verdict_counts=dict(sorted(counts.items())),
            min_abs_det_j_plus_i=min(dets) if dets else None,
            min_abs_domega30_coefficient=ext(min, "abs_domega30_coefficient"),
            min_nijenhuis_norm=ext(min, "nijenhuis_norm"),
            max_omega_11_residual=ext(max, "omega_11_residual"),
            max_domega_mixed_residual=ext(max, "domega_mixed_residual"),
        )
    else:
        summary.update(
            min_nijenhuis_norm=ext(min, "nijenhuis_norm"),
            max_nijenhuis_norm=ext(max, "nijenhuis_norm"),
        )
    return summary


def _finish(command, config, records, summary, checks, errors) -> tuple[dict, int]:
    report = _assemble(command, config, records, summary, checks, errors)
    if errors:
        return report, 1
    return report, 0 if report["verdicts"]["passed"] else 2


def _assemble(command, config, records, summary, checks, errors=()) -> dict:
    if errors:
        checks = dict(checks, completed=False)
    return {
        "errors": list(errors),
        "schema_version": SCHEMA_VERSION,
        "toolkit_version": __version__,
        "command": command,
        "config": config.echo(),
        "records": records,
        "summary": summary,
        "verdicts": {"passed": all(checks.values()), "checks": checks},
    }


def _encode(obj, level: int) -> str:
    pad = "  " * (level + 1)
    end = "  " * level
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if not math.isfinite(f):
            return "null"
        s = format(f, ".17g")
        return s if any(c in s for c in ".en") else s + ".0"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_encode(obj[k], level + 1)}" for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_encode(v, level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, level + 1) for v in seq) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def canonical_json(report: dict) -> str:
    """Sorted keys, two-space indent, floats with 17 significant digits."""
    return _encode(report, 0) + "\n"


def validate_report(report: dict) -> None:
    import jsonschema

    jsonschema.validate(report, REPORT_SCHEMA)


def emit_report(report: dict, path: str | Path) -> None:
    Path(path).write_text(canonical_json(report), encoding="utf-8")
