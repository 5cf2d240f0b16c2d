"""Scenario-driven verification runs with machine-readable reports.

A scenario is a JSON document selecting a model, an operator, a set of
eigenmodes, and a list of checks (bound ids and identity ids).  Running it
produces a :class:`RunReport` whose numeric fields are deterministic for a
fixed seed; only the timing field varies between runs.

Exit-code contract (used by the CLI): 0 = all checks pass, 1 = at least one
failed check (a soundness violation of the artifact), 2 = configuration
error.  ``boundary`` and ``not_applicable`` statuses never fail a run.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__ as _version
from .bounds import THEOREMS, evaluate_bound, sign_diagnostics
from .conformal import (
    conformal_covariance_residual,
    flat_metric_curvature_oracle,
    optimize_u,
    parse_factor,
    q_scaling_residual,
    transform_geometry,
    wem_equality_check,
    zero_factor,
)
from .connections import integral_identity_residual, pq_thm1, qformula_residual
from .energy_momentum import compute_q, em_spinor_residual, qtr_identity_residual, trace_identity_residual
from .errors import ConfigError
from .geometry import NotApplicable, gauss_formula_residual, make_model
from .operators import (
    assemble_dirac_schrodinger,
    assemble_hypersurface_dirac,
    assemble_intrinsic_dirac,
    eigensolve,
    lichnerowicz_residual,
    resolve_potential,
    witten_identity_residual,
)

IDENTITY_CHECKS = {
    "lichnerowicz": "Schroedinger-Lichnerowicz operator identity",
    "witten": "square identity of the ambient-connection operator",
    "gauss_formula": "frame-derivative consistency of the embedding",
    "trace_identity": "pointwise trace identity of the tensor",
    "em_spinor": "energy-momentum field equation residual",
    "qtr": "trace/norm identity for certified sections",
    "qformula": "pointwise norm identity for random shifts",
    "integral_identity": "integrated identity for eigen-sections",
    "conformal_covariance": "conformal covariance of the operator",
    "q_scaling": "tensor scaling under conformal rescaling",
    "wem": "conformal equality-case field equations",
    "r_bar_oracle": "transformed curvature vs brute-force metric curvature",
}

DEFAULT_TOLERANCES = {
    "lichnerowicz": 1e-8,
    "witten": 1e-8,
    "gauss_formula": 1e-2,
    "trace_identity": 1e-10,
    "em_spinor": 1e-6,
    "qtr": 1e-8,
    "qformula": 1e-9,
    "integral_identity": 1e-6,
    "conformal_covariance": 1e-8,
    "q_scaling": 1e-8,
    "wem": 1e-6,
    "r_bar_oracle": 1e-6,
    "soundness": 1e-7,
    "equality": 1e-6,
}


@dataclass
class CheckRecord:
    check: str
    status: str  # "pass" | "fail" | "boundary" | "not_applicable"
    mode_index: int | None = None
    lam: float | None = None
    value: float | None = None
    tolerance: float | None = None
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "check": self.check,
            "status": self.status,
            "mode_index": self.mode_index,
            "lambda": self.lam,
            "value": _json_num(self.value),
            "tolerance": self.tolerance,
            "details": self.details,
        }


def _json_num(x):
    if x is None:
        return None
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else "-inf"
    return x


@dataclass
class RunReport:
    scenario: dict
    checks: list[CheckRecord]
    verdict: str
    timing_s: float

    def counts(self) -> dict:
        out = {"pass": 0, "fail": 0, "boundary": 0, "not_applicable": 0}
        for rec in self.checks:
            out[rec.status] = out.get(rec.status, 0) + 1
        return out

    def as_dict(self) -> dict:
        return {
            "artifact_version": _version,
            "scenario": self.scenario,
            "checks": [rec.as_dict() for rec in self.checks],
            "summary": {"counts": self.counts(), "verdict": self.verdict},
            "timing_s": self.timing_s,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=False)


def _load_scenario(source) -> dict:
    if isinstance(source, dict):
        return source
    with open(source, "r", encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"scenario is not valid JSON: {exc}") from exc


def _build_operator(model, op_spec: dict):
    kind = op_spec.get("kind", "D")
    if kind == "D":
        return assemble_intrinsic_dirac(model), None
    if kind == "D_H":
        return assemble_hypersurface_dirac(model), None
    if kind == "D_f":
        f_spec = op_spec.get("f", {"type": "constant", "value": 0.0})
        if isinstance(f_spec, dict):
            ftype = f_spec.get("type", "constant")
            if ftype == "constant":
                f_values = resolve_potential(model, float(f_spec.get("value", 0.0)))
            elif ftype == "mean_curvature":
                f_values = model.H_values()
            else:
                raise ConfigError(f"unknown potential type {ftype!r}")
        else:
            f_values = resolve_potential(model, f_spec)
        return assemble_dirac_schrodinger(model, f_values), f_values
    raise ConfigError(f"unknown operator kind {kind!r} (expected D, D_H, or D_f)")


def _select_modes(spectrum, modes_spec: dict) -> list[int]:
    if "select" in modes_spec:
        return [spectrum.closest(float(v)) for v in modes_spec["select"]]
    count = int(modes_spec.get("count", 6))
    return list(range(min(count, len(spectrum.eigenvalues))))


def run_scenario(source, output_path: str | None = None) -> RunReport:
    """Execute one scenario; optionally write the JSON report to disk."""
    t0 = time.time()
    spec = _load_scenario(source)
    tol = dict(DEFAULT_TOLERANCES)
    for key, value in (spec.get("tolerances") or {}).items():
        if key not in tol:
            raise ConfigError(f"unknown tolerance key {key!r}")
        value = float(value)
        if value < 2.3e-16:
            raise ConfigError(f"tolerance {key!r} below machine epsilon")
        tol[key] = value
    seed = int(spec.get("seed", 0))

    model_spec = spec.get("model")
    if not isinstance(model_spec, dict) or "kind" not in model_spec:
        raise ConfigError("scenario needs model.kind")
    model = make_model(
        model_spec["kind"], model_spec.get("params"), spec.get("resolution")
    )
    operator, f_values = _build_operator(model, spec.get("operator", {"kind": "D"}))
    n_modes_needed = spec.get("modes", {"count": 6})
    count = int(n_modes_needed.get("count", 6)) if "select" not in n_modes_needed else 24
    spectrum = eigensolve(operator, count)
    mode_ids = _select_modes(spectrum, n_modes_needed)

    conformal_spec = spec.get("conformal") or {}
    if conformal_spec.get("u") == "optimize":
        opt = optimize_u(
            model,
            spectrum,
            mode_ids[0],
            background=f_values,
            budget=int(conformal_spec.get("budget", 400)),
            band=int(conformal_spec.get("band", 2)),
            seed=seed,
        )
        factor = opt.factor
    elif "u" in conformal_spec:
        factor = parse_factor(model, conformal_spec["u"])
    else:
        factor = zero_factor(model)

    checks = spec.get("checks")
    if not checks:
        raise ConfigError("scenario needs a nonempty checks list")
    records: list[CheckRecord] = []
    for check in checks:
        if check in THEOREMS:
            records.extend(
                _run_bound_check(check, spectrum, mode_ids, factor, f_values, tol)
            )
        elif check in IDENTITY_CHECKS:
            records.extend(
                _run_identity_check(
                    check, model, operator, spectrum, mode_ids, factor, f_values, tol, seed
                )
            )
        else:
            known = sorted(list(THEOREMS) + list(IDENTITY_CHECKS))
            raise ConfigError(f"unknown check id {check!r}; known: {', '.join(known)}")

    verdict = "fail" if any(r.status == "fail" for r in records) else "pass"
    report = RunReport(spec, records, verdict, round(time.time() - t0, 3))
    if output_path is None:
        output_path = spec.get("output")
    if output_path:
        with open(output_path, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
    return report


def _run_bound_check(theorem, spectrum, mode_ids, factor, f_values, tol) -> list[CheckRecord]:
    records = []
    use_u = factor if THEOREMS[theorem].conformal else None
    for i in mode_ids:
        try:
            rep = evaluate_bound(
                theorem, spectrum, i, u=use_u, f_values=f_values, equality_tol=tol["equality"]
            )
        except NotApplicable as exc:
            records.append(CheckRecord(theorem, "not_applicable", i, details={"reason": str(exc)}))
            continue
        if rep.status in ("violated", "not_applicable"):
            records.append(
                CheckRecord(theorem, "not_applicable", i, rep.lam, details={"hypothesis": rep.status})
            )
            continue
        status = "pass" if rep.sound else "fail"
        if rep.status == "boundary" and status == "pass":
            status = "boundary"
        residual_ok = True
        if rep.residual is not None:
            eq_from_residual = rep.residual < tol["equality"]
            residual_ok = eq_from_residual == rep.equality
        if not residual_ok:
            status = "fail"
        records.append(
            CheckRecord(
                theorem,
                status,
                i,
                rep.lam,
                rep.margin,
                tol["soundness"],
                details={
                    "rhs": rep.rhs,
                    "equality": rep.equality,
                    "residual": _json_num(rep.residual),
                    "sign_check": sign_diagnostics(rep),
                    "hypothesis": rep.status,
                    "mask_fraction": rep.mask_fraction,
                    "notes": rep.notes,
                },
            )
        )
    return records


def _run_identity_check(
    check, model, operator, spectrum, mode_ids, factor, f_values, tol, seed
) -> list[CheckRecord]:
    records: list[CheckRecord] = []

    def model_level(value_fn):
        try:
            value = value_fn()
        except NotApplicable as exc:
            records.append(CheckRecord(check, "not_applicable", details={"reason": str(exc)}))
            return
        status = "pass" if value < tol[check] else "fail"
        records.append(CheckRecord(check, status, value=float(value), tolerance=tol[check]))

    if check == "lichnerowicz":
        model_level(lambda: lichnerowicz_residual(model))
        return records
    if check == "witten":
        model_level(lambda: witten_identity_residual(model))
        return records
    if check == "gauss_formula":
        model_level(lambda: gauss_formula_residual(model))
        return records
    if check == "conformal_covariance":
        model_level(lambda: conformal_covariance_residual(model, factor))
        return records
    if check == "r_bar_oracle":

        def _oracle_gap():
            geo = transform_geometry(model, factor)
            oracle = flat_metric_curvature_oracle(model, factor)
            return float(np.max(np.abs(geo.r_bar - oracle)))

        model_level(_oracle_gap)
        return records

    rng = np.random.default_rng(seed)
    for i in mode_ids:
        lam, phi = spectrum.pair(i)
        try:
            if check == "trace_identity":
                value = trace_identity_residual(phi)
            elif check == "em_spinor":
                value = em_spinor_residual(phi).residual
            elif check == "qtr":
                value = qtr_identity_residual(phi)
            elif check == "qformula":
                shift = rng.normal(0.0, 1.0)
                value = qformula_residual(phi, shift)
            elif check == "integral_identity":
                qfield = compute_q(phi)
                background = f_values if operator.label == "D_f" else None
                params = pq_thm1(qfield, lam, background=background)
                if not params.usable:
                    records.append(
                        CheckRecord(check, "not_applicable", i, lam, details={"hypothesis": params.status})
                    )
                    continue
                value = integral_identity_residual(phi, lam, params, qfield)
            elif check == "q_scaling":
                value = q_scaling_residual(model, factor, phi)
            elif check == "wem":
                rep = wem_equality_check(phi, factor)
                value = max(rep.du_residual, rep.field_residual)
            else:
                raise ConfigError(f"unhandled identity check {check!r}")
        except NotApplicable as exc:
            records.append(CheckRecord(check, "not_applicable", i, lam, details={"reason": str(exc)}))
            continue
        status = "pass" if value < tol[check] else "fail"
        records.append(CheckRecord(check, status, i, lam, float(value), tol[check]))
    return records


# ----------------------------------------------------------------------
# tables
# ----------------------------------------------------------------------

TABLE_COLUMNS = [
    "model",
    "operator",
    "mode_index",
    "lambda",
    "lambda_sq",
    "theorem",
    "status",
    "rhs",
    "margin",
    "equality",
    "residual",
    "sign_check",
]


def emit_table(report: RunReport | dict, path: str, fmt: str = "csv") -> None:
    """Render the bound records of a report as CSV or Markdown.

    One row per (mode, theorem); column order is fixed and documented in the
    README so downstream tooling can rely on it.
    """
    data = report.as_dict() if isinstance(report, RunReport) else report
    model_kind = data["scenario"].get("model", {}).get("kind", "?")
    op_kind = data["scenario"].get("operator", {}).get("kind", "D")
    rows = []
    for rec in data["checks"]:
        if rec["check"] not in THEOREMS:
            continue
        det = rec.get("details", {})
        lam = rec.get("lambda")
        rows.append(
            [
                model_kind,
                op_kind,
                rec.get("mode_index"),
                lam,
                None if lam is None else lam * lam,
                rec["check"],
                det.get("hypothesis", rec["status"]),
                det.get("rhs"),
                rec.get("value"),
                det.get("equality"),
                det.get("residual"),
                det.get("sign_check"),
            ]
        )
    if fmt == "csv":
        lines = [",".join(TABLE_COLUMNS)]
        for row in rows:
            lines.append(",".join("" if v is None else str(v) for v in row))
    elif fmt == "md":
        lines = ["| " + " | ".join(TABLE_COLUMNS) + " |"]
        lines.append("|" + "---|" * len(TABLE_COLUMNS))
        for row in rows:
            lines.append("| " + " | ".join("" if v is None else str(v) for v in row) + " |")
    else:
        raise ConfigError(f"unknown table format {fmt!r} (expected csv or md)")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
