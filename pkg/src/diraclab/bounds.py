"""Evaluation of the eigenvalue lower bounds and their equality diagnostics.

Each theorem id maps to: the operator it constrains, the curvature quantity
``A`` entering its right-hand side, and the modified connection whose
vanishing characterizes equality.  Hypotheses are classified pointwise over
the unmasked grid and aggregated (any violation -> ``violated``; any
near-equality -> ``boundary``; otherwise ``strict``).  A boundary hypothesis
still evaluates the bound (the inequality is closed and the flagship round
sphere sits exactly there); only ``violated`` suppresses evaluation.

Where the hypothesis is on its boundary the finite parameter recipe
degenerates; equality is then possible only for kernel modes, for which the
limiting shift (0 for the energy-momentum recipe, B/(2n) for the curvature
recipe) is used in the diagnostic.  Non-kernel modes at a boundary get an
infinite diagnostic residual, which keeps the equality <-> parallelism
equivalence exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .connections import ConnectionParams, modified_connection_residual, pq_thm1, pq_zhang
from .energy_momentum import compute_q
from .errors import ConfigError
from .geometry import HypersurfaceModel
from .operators import SpectrumResult, SpinorField

EQUALITY_TOL = 1e-6
SOUNDNESS_TOL = 1e-7
HYPOTHESIS_TOL = 1e-8
KERNEL_TOL = 1e-7


@dataclass
class TheoremSpec:
    operator: str  # which operator's eigenvalues it constrains
    family: str  # "em" | "curv" | "friedrich" | "hijazi_em"
    conformal: bool = False
    min_n: int = 1
    description: str = ""


THEOREMS: dict[str, TheoremSpec] = {
    "thm1_1": TheoremSpec("D_H", "em", False, 1, "energy-momentum bound for the curvature-shifted operator"),
    "thm1_2": TheoremSpec("D_H", "em", True, 1, "conformal energy-momentum bound"),
    "zhang4_1": TheoremSpec("D_H", "curv", False, 2, "scalar-curvature bound for the curvature-shifted operator"),
    "hijazi_zhang6_1": TheoremSpec("D_H", "curv", True, 2, "conformal scalar-curvature bound"),
    "friedrich": TheoremSpec("D", "friedrich", False, 2, "classical curvature bound for the intrinsic operator"),
    "hijazi_em": TheoremSpec("D", "hijazi_em", False, 1, "energy-momentum bound for the intrinsic operator"),
    "df_prop1": TheoremSpec("D_f", "curv", False, 2, "scalar-curvature bound with a potential"),
    "df_prop2": TheoremSpec("D_f", "em", False, 1, "energy-momentum bound with a potential"),
    "df_prop3": TheoremSpec("D_f", "em", True, 1, "conformal energy-momentum bound with a potential"),
}


@dataclass
class BoundReport:
    theorem: str
    model_kind: str
    operator: str
    lam: float
    lam_sq: float
    status: str  # "strict" | "boundary" | "violated" | "not_applicable"
    rhs: float | None
    margin: float | None
    equality: bool
    residual: float | None  # modified-connection diagnostic (inf = equality impossible)
    background_sign: int  # sign of B when constant-sign, else 0
    background_constant: bool
    mask_fraction: float
    sound: bool
    notes: list[str] = dc_field(default_factory=list)

    def as_dict(self) -> dict:
        out = {
            "theorem": self.theorem,
            "model": self.model_kind,
            "operator": self.operator,
            "lambda": self.lam,
            "lambda_sq": self.lam_sq,
            "status": self.status,
            "rhs": self.rhs,
            "margin": self.margin,
            "equality": self.equality,
            "residual": None if self.residual is None else (self.residual if math.isfinite(self.residual) else "inf"),
            "sign_check": sign_diagnostics(self),
            "background_constant": self.background_constant,
            "mask_fraction": self.mask_fraction,
            "sound": self.sound,
            "notes": self.notes,
        }
        return out


def _na_report(theorem: str, model_kind: str, operator: str, lam: float, note: str) -> BoundReport:
    return BoundReport(
        theorem, model_kind, operator, lam, lam * lam, "not_applicable",
        None, None, False, None, 0, False, 0.0, True, [note],
    )


def evaluate_bound(
    theorem: str,
    spectrum: SpectrumResult,
    index: int,
    u=None,
    f_values: np.ndarray | None = None,
    equality_tol: float = EQUALITY_TOL,
) -> BoundReport:
    """Evaluate one theorem for one certified eigenpair."""
    if theorem not in THEOREMS:
        raise ConfigError(f"unknown theorem id {theorem!r}; known: {', '.join(sorted(THEOREMS))}")
    spec = THEOREMS[theorem]
    op = spectrum.operator
    if op.label != spec.operator:
        raise ConfigError(
            f"theorem {theorem} constrains {spec.operator}, got eigenpairs of {op.label}"
        )
    disc = op.disc
    model: HypersurfaceModel = disc.model
    lam, phi = spectrum.pair(index)
    n = disc.n

    if n < spec.min_n:
        return _na_report(theorem, model.kind, op.label, lam, f"stated for n >= {spec.min_n}")

    # background scalar B
    if spec.operator == "D_H":
        b = disc.H_values
    elif spec.operator == "D_f":
        if f_values is None:
            raise ConfigError("potential values required for Dirac-Schroedinger bounds")
        b = np.asarray(f_values, dtype=float)
    else:
        b = np.zeros(disc.npoints)

    # effective curvature (conformal representative when u is given)
    du = None
    if spec.conformal:
        from .conformal import transform_geometry, zero_factor

        factor = u if u is not None else zero_factor(model)
        geo = transform_geometry(model, factor)
        r_eff = geo.r_eff
        du = factor.du
    else:
        r_eff = disc.R_values

    qfield = None
    if spec.family in ("em", "hijazi_em"):
        qfield = compute_q(phi)
        keep = qfield.unmasked()
        mask_fraction = qfield.mask_fraction
    else:
        keep = np.ones(disc.npoints, dtype=bool)
        mask_fraction = 0.0

    notes: list[str] = []
    if theorem == "thm1_1" and n == 1:
        notes.append("n = 1: outside the paper's explicit range for curvature-bound comparisons")

    lam_sq = lam * lam
    lam_scale = max(1.0, lam_sq)

    # ---- per-family A field, hypothesis, rhs -------------------------
    if spec.family == "em":
        a = r_eff + 4.0 * qfield.norm2
        status, rhs = _em_hypothesis_and_rhs(a, b, keep)
    elif spec.family == "curv":
        a = n * r_eff / (n - 1.0)
        status, rhs = _curv_hypothesis_and_rhs(a, b, keep)
    elif spec.family == "friedrich":
        inf_r = float(np.min(r_eff[keep]))
        scale = max(1.0, float(np.max(np.abs(r_eff[keep]))))
        if inf_r > HYPOTHESIS_TOL * scale:
            status = "strict"
        elif inf_r > -HYPOTHESIS_TOL * scale:
            status = "boundary"
        else:
            status = "not_applicable"
        rhs = n / (4.0 * (n - 1.0)) * inf_r if status != "not_applicable" else None
    else:  # hijazi_em
        a = r_eff + 4.0 * qfield.norm2
        inf_a = float(np.min(a[keep]))
        scale = max(1.0, float(np.max(np.abs(a[keep]))))
        if inf_a > HYPOTHESIS_TOL * scale:
            status = "strict"
        elif inf_a > -HYPOTHESIS_TOL * scale:
            status = "boundary"
        else:
            status = "not_applicable"
        rhs = 0.25 * inf_a if status != "not_applicable" else None

    bconst = float(np.max(b[keep]) - np.min(b[keep])) < 1e-10 * max(1.0, float(np.max(np.abs(b[keep])))) if np.any(keep) else False
    bsign = 0
    if np.any(keep):
        if np.all(b[keep] > 0):
            bsign = 1
        elif np.all(b[keep] < 0):
            bsign = -1

    if status in ("violated", "not_applicable"):
        report = BoundReport(
            theorem, model.kind, op.label, lam, lam_sq, status,
            None, None, False, None, bsign, bconst, mask_fraction, True, notes,
        )
        return report

    margin = lam_sq - rhs
    equality = abs(margin) < equality_tol * lam_scale
    sound = margin >= -SOUNDNESS_TOL * lam_scale
    if not sound:
        notes.append(f"SOUNDNESS VIOLATION: margin {margin:.3e}")

    residual = _equality_residual(spec, disc, phi, lam, b, qfield, r_eff, du, status)

    return BoundReport(
        theorem, model.kind, op.label, lam, lam_sq, status,
        float(rhs), float(margin), equality, residual,
        bsign, bconst, mask_fraction, sound, notes,
    )


def _em_hypothesis_and_rhs(a, b, keep):
    gap = a - b**2
    scale = max(1.0, float(np.max(np.abs(a[keep]))), float(np.max(b[keep] ** 2)))
    gmin = float(np.min(gap[keep]))
    if gmin < -HYPOTHESIS_TOL * scale:
        return "violated", None
    if gmin < HYPOTHESIS_TOL * scale:
        # a touching point drives the inf to zero; the closed bound stays valid
        return "boundary", 0.0
    expr = np.sqrt(np.maximum(a, 0.0)) - np.abs(b)
    return "strict", 0.25 * float(np.min(expr[keep])) ** 2


def _curv_hypothesis_and_rhs(a, b, keep):
    b2 = b**2
    bscale = max(1.0, float(np.max(b2[keep])))
    if float(np.min(b2[keep])) <= HYPOTHESIS_TOL * bscale:
        return "violated", None
    gap = a - b2
    scale = max(1.0, float(np.max(np.abs(a[keep]))), bscale)
    gmin = float(np.min(gap[keep]))
    if gmin < -HYPOTHESIS_TOL * scale:
        return "violated", None
    if gmin < HYPOTHESIS_TOL * scale:
        return "boundary", 0.0
    expr = np.sqrt(np.maximum(a, 0.0)) - np.abs(b)
    return "strict", 0.25 * float(np.min(expr[keep] ** 2))


def _equality_residual(spec, disc, phi, lam, b, qfield, r_eff, du, status) -> float:
    """Modified-connection residual matching the theorem's equality case."""
    n = disc.n
    if spec.family == "friedrich":
        return modified_connection_residual(phi, lam / n)
    if spec.family == "hijazi_em":
        return modified_connection_residual(phi, 0.0, qfield=qfield, mask=qfield.mask)
    if spec.family == "em":
        params = pq_thm1(qfield, lam, background=b, r_eff=r_eff)
        if params.usable:
            return modified_connection_residual(
                phi, params, qfield=qfield, du=du, mask=qfield.mask
            )
        if status == "boundary":
            if abs(lam) < KERNEL_TOL:
                return modified_connection_residual(
                    phi, params.boundary_shift, qfield=qfield, du=du, mask=qfield.mask
                )
            return math.inf
        return math.inf
    # curvature family
    mask = qfield.mask if qfield is not None else None
    params = pq_zhang(disc, lam, background=b, r_eff=r_eff, mask=mask)
    if params.usable:
        return modified_connection_residual(phi, params, du=du)
    if params.status == "boundary":
        if abs(lam) < KERNEL_TOL:
            return modified_connection_residual(phi, params.boundary_shift, du=du)
        return math.inf
    return math.inf


def sign_diagnostics(report: BoundReport) -> str:
    """Equality-case sign law: sign(lambda) must match the background sign.

    Applies only when the equality flag is on, the bound is nontrivial
    (rhs > 0, so lambda != 0), and the background has constant sign.
    """
    if report.status in ("violated", "not_applicable"):
        return "not_applicable"
    if not report.equality or report.rhs is None or report.rhs <= HYPOTHESIS_TOL:
        return "not_applicable"
    if report.background_sign == 0:
        return "not_applicable"
    lam_sign = 1 if report.lam > 0 else (-1 if report.lam < 0 else 0)
    return "pass" if lam_sign == report.background_sign else "fail"


@dataclass
class ImprovementRecord:
    rhs_em: float | None
    rhs_curv: float | None
    killing_identity_residual: float


def improvement_comparison(spectrum: SpectrumResult, index: int) -> ImprovementRecord:
    """Both right-hand sides plus the umbilic-tensor identity residual.

    For a certified parallel-type (Killing) eigen-section the two right-hand
    sides agree; the identity ``4 |Q|^2 = n R/(n-1) - R`` quantifies how far
    the computed tensor is from that regime.
    """
    op = spectrum.operator
    disc = op.disc
    lam, phi = spectrum.pair(index)
    n = disc.n
    qfield = compute_q(phi)
    keep = qfield.unmasked()
    b = disc.H_values
    a_em = disc.R_values + 4.0 * qfield.norm2
    status_em, rhs_em = _em_hypothesis_and_rhs(a_em, b, keep)
    rhs_curv = None
    if n >= 2:
        a_c = n * disc.R_values / (n - 1.0)
        status_c, rhs_curv = _curv_hypothesis_and_rhs(a_c, b, keep)
    target = n * disc.R_values / (n - 1.0) - disc.R_values if n >= 2 else None
    if target is not None:
        killing = float(np.max(np.abs(4.0 * qfield.norm2 - target)[keep]))
    else:
        killing = math.nan
    return ImprovementRecord(rhs_em, rhs_curv, killing)
