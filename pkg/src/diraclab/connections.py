"""Modified spinor connections and the identities behind the eigenvalue bounds.

Two parameter recipes are implemented:

* the energy-momentum recipe: pointwise ``n q^2 = |B| / (sqrt(A) - |B|)`` with
  ``A = R + 4|Q|^2`` and ``p = -1/(nq)`` (the curvature background B is the
  mean curvature or the potential of the Dirac-Schroedinger operator);
* the curvature-only recipe: ``(1 - nq)^2 = (n-1)|B| / (sqrt(n R/(n-1)) - |B|)``
  with ``p = (1-q)/(1-nq)``.

Both produce a scalar shift field ``s = p B/2 + q lambda``; the modified
derivative is ``grad_i + s g_i + sum_j Q_ij g_j`` (the Q term only for the
first recipe).  Where the hypothesis sits exactly on its boundary the finite
recipe degenerates; the limiting shift (0 for the first recipe, B/(2n) for
the second) is recorded so equality diagnostics remain evaluable for kernel
modes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .energy_momentum import EMTensorField, _clifford_apply
from .errors import ConfigError
from .operators import SpinorField, covariant_derivative

HYPOTHESIS_TOL = 1e-8


@dataclass
class ConnectionParams:
    status: str  # "ok" | "boundary" | "violated" | "not_applicable"
    n: int
    lam: float
    background: np.ndarray | None = None
    p: np.ndarray | None = None
    q: np.ndarray | None = None
    shift: np.ndarray | None = None
    boundary_shift: np.ndarray | None = None  # limiting shift where the recipe degenerates
    predicted_shift: float | None = None
    hypothesis_gap: float = math.nan  # min over grid of A - B^2
    detail: str = ""

    @property
    def usable(self) -> bool:
        return self.status == "ok"


def _classify(a: np.ndarray, b2: np.ndarray, keep: np.ndarray) -> tuple[str, float]:
    gap = a - b2
    if not np.any(keep):
        return "not_applicable", math.nan
    gmin = float(np.min(gap[keep]))
    scale = max(1.0, float(np.max(np.abs(a[keep]))), float(np.max(b2[keep])))
    if gmin < -HYPOTHESIS_TOL * scale:
        return "violated", gmin
    if gmin < HYPOTHESIS_TOL * scale:
        return "boundary", gmin
    return "ok", gmin


def pq_thm1(
    qfield: EMTensorField,
    lam: float,
    background: np.ndarray | None = None,
    r_eff: np.ndarray | None = None,
) -> ConnectionParams:
    """Energy-momentum parameter fields for an eigenvalue ``lam``.

    ``background`` defaults to the model's mean curvature; ``r_eff`` replaces
    the scalar curvature when a conformal representative is in play.
    """
    disc = qfield.disc
    n = disc.n
    r = disc.R_values if r_eff is None else r_eff
    b = disc.H_values if background is None else background
    if b is None:
        raise ConfigError("no background field: model has no mean curvature and no potential given")
    a = r + 4.0 * qfield.norm2
    keep = qfield.unmasked()
    status, gap = _classify(a, b**2, keep)
    boundary_shift = np.zeros(disc.npoints)
    if status != "ok":
        return ConnectionParams(
            status, n, lam, background=b, boundary_shift=boundary_shift, hypothesis_gap=gap
        )
    root = np.sqrt(np.maximum(a, 0.0))
    absb = np.abs(b)
    flat = absb < 1e-10  # minimal background: the q == 0 branch
    q = np.where(flat, 0.0, np.sqrt(np.where(flat, 0.0, absb / (n * np.maximum(root - absb, 1e-300)))))
    p = np.where(q > 0.0, -1.0 / (n * np.where(q > 0.0, q, 1.0)), 0.0)
    shift = np.where(q > 0.0, p * b / 2.0 + q * lam, 0.0)
    return ConnectionParams(
        "ok",
        n,
        lam,
        background=b,
        p=p,
        q=q,
        shift=shift,
        boundary_shift=boundary_shift,
        hypothesis_gap=gap,
    )


def pq_zhang(
    disc,
    lam: float,
    background: np.ndarray | None = None,
    r_eff: np.ndarray | None = None,
    mask: np.ndarray | None = None,
) -> ConnectionParams:
    """Curvature-only parameter fields (requires n >= 2 and positive |B|)."""
    n = disc.n
    if n < 2:
        return ConnectionParams("not_applicable", n, lam, detail="stated for n >= 2 only")
    r = disc.R_values if r_eff is None else r_eff
    b = disc.H_values if background is None else background
    if b is None:
        raise ConfigError("no background field for the curvature recipe")
    keep = np.ones(disc.npoints, dtype=bool) if mask is None else ~mask
    a = n * r / (n - 1.0)
    b2 = b**2
    bscale = max(1.0, float(np.max(b2[keep])) if np.any(keep) else 0.0)
    if not np.any(keep) or float(np.min(b2[keep])) <= HYPOTHESIS_TOL * bscale:
        return ConnectionParams("violated", n, lam, background=b, detail="background vanishes")
    status, gap = _classify(a, b2, keep)
    boundary_shift = b / (2.0 * n)
    if status != "ok":
        return ConnectionParams(
            status, n, lam, background=b, boundary_shift=boundary_shift, hypothesis_gap=gap
        )
    root = np.sqrt(a)
    absb = np.abs(b)
    q = (1.0 - np.sqrt((n - 1.0) * absb / (root - absb))) / n
    p = (1.0 - q) / (1.0 - n * q)
    shift = p * b / 2.0 + q * lam
    predicted = math.copysign(1.0, lam) * float(np.max(root)) / (2.0 * n) if lam != 0 else None
    return ConnectionParams(
        "ok",
        n,
        lam,
        background=b,
        p=p,
        q=q,
        shift=shift,
        boundary_shift=boundary_shift,
        predicted_shift=predicted,
        hypothesis_gap=gap,
    )


# ----------------------------------------------------------------------
# applying modified connections
# ----------------------------------------------------------------------


def _shift_field(params, npoints: int) -> np.ndarray:
    if isinstance(params, ConnectionParams):
        if params.shift is None:
            raise ConfigError(f"connection parameters unusable (status {params.status!r})")
        return params.shift
    if np.isscalar(params):
        return np.full(npoints, float(params))
    return np.asarray(params, dtype=float)


def modified_connection_residual(
    phi: SpinorField,
    shift,
    qfield: EMTensorField | None = None,
    du: np.ndarray | None = None,
    mask: np.ndarray | None = None,
    return_fields: bool = False,
):
    """L2 norm of the modified derivative of a unit-normalized section.

    ``shift`` is the scalar field s in ``grad_i + s g_i (+ Q-term)``; passing
    ``du`` adds the conformal terms ``-(1/2) e_i.du. - (n/2) du(e_i)`` that
    appear in the equality case of the conformal bounds.
    """
    disc = phi.disc
    phi = phi.normalized()
    s = _shift_field(shift, disc.npoints)
    grads = covariant_derivative(phi)
    vals = phi.values()
    gvals = np.array([_clifford_apply(g, vals) for g in disc.gamma])
    keep = np.ones(disc.npoints, dtype=bool)
    if qfield is not None:
        keep &= qfield.unmasked()
    if mask is not None:
        keep &= ~mask
    w = disc.weights * keep
    fields = []
    total = 0.0
    for i in range(disc.n):
        res = grads[i] + s[:, None] * gvals[i]
        if qfield is not None:
            res = res + np.einsum("pj,pjc->pc", qfield.q[:, i, :], np.transpose(gvals, (1, 0, 2)))
        if du is not None:
            # - (1/2) e_i . du . phi - (n/2) du(e_i) phi
            for j in range(disc.n):
                gij = _clifford_apply(disc.gamma[i] @ disc.gamma[j], vals)
                res = res - 0.5 * du[j][:, None] * gij
            res = res - 0.5 * disc.n * du[i][:, None] * vals
        fields.append(res)
        total += float(np.sum(w * np.sum(np.abs(res) ** 2, axis=1)))
    residual = math.sqrt(max(total, 0.0))
    if return_fields:
        return residual, np.array(fields)
    return residual


def nabla_q_apply(phi: SpinorField, params, qfield: EMTensorField):
    """Modified derivative with the Q-term; returns (fields, L2 norm)."""
    residual, fields = modified_connection_residual(
        phi, params, qfield=qfield, mask=qfield.mask, return_fields=True
    )
    return fields, residual


def nabla_lambda_apply(phi: SpinorField, params):
    """Modified derivative without the Q-term; returns (fields, L2 norm)."""
    residual, fields = modified_connection_residual(phi, params, return_fields=True)
    return fields, residual


# ----------------------------------------------------------------------
# identities
# ----------------------------------------------------------------------


def qformula_residual(phi: SpinorField, shift, qfield: EMTensorField | None = None) -> float:
    """Pointwise defect of the norm identity

        |grad^Q phi|^2 = |grad phi|^2 + n s^2 |phi|^2 - |Q|^2 |phi|^2,

    which must hold for arbitrary sections and arbitrary shift fields.
    Returned value is relative: |lhs - rhs| / (1 + |lhs| + |rhs|), maximized
    over unmasked points.
    """
    from .energy_momentum import compute_q

    disc = phi.disc
    phi = phi.normalized()
    if qfield is None:
        qfield = compute_q(phi)
    s = _shift_field(shift, disc.npoints)
    _, fields = modified_connection_residual(
        phi, s, qfield=qfield, mask=qfield.mask, return_fields=True
    )
    grads = covariant_derivative(phi)
    dens = phi.density()
    lhs = np.sum(np.abs(fields) ** 2, axis=(0, 2))
    rhs = (
        np.sum(np.abs(grads) ** 2, axis=(0, 2))
        + disc.n * s**2 * dens
        - qfield.norm2 * dens
    )
    keep = qfield.unmasked()
    rel = np.abs(lhs - rhs) / (1.0 + np.abs(lhs) + np.abs(rhs))
    return float(np.max(rel[keep]))


def integral_identity_residual(
    phi: SpinorField,
    lam: float,
    params: ConnectionParams,
    qfield: EMTensorField,
    r_eff: np.ndarray | None = None,
) -> float:
    """Defect of the integrated identity

        int |grad^Q phi|^2 = int (1 + n q^2) [lam^2 - (sqrt(A) - |B|)^2 / 4] |phi|^2

    for an eigen-section of the curvature-shifted operator with the
    energy-momentum parameter recipe.  Relative to the size of both sides.
    """
    disc = phi.disc
    if not params.usable:
        raise ConfigError(f"parameters unusable (status {params.status!r})")
    phi = phi.normalized()
    _, fields = modified_connection_residual(
        phi, params, qfield=qfield, mask=qfield.mask, return_fields=True
    )
    keep = qfield.unmasked()
    w = disc.weights * keep
    lhs = float(np.sum(w * np.sum(np.abs(fields) ** 2, axis=(0, 2))))
    r = disc.R_values if r_eff is None else r_eff
    a = r + 4.0 * qfield.norm2
    root = np.sqrt(np.maximum(a, 0.0))
    b = params.background
    dens = phi.density()
    integrand = (1.0 + disc.n * params.q**2) * (lam**2 - 0.25 * (root - np.abs(b)) ** 2) * dens
    rhs = float(np.sum(w * integrand))
    return abs(lhs - rhs) / (1.0 + abs(lhs) + abs(rhs))
