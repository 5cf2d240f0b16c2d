"""Spinor energy-momentum tensor and its pointwise identities.

The tensor of a section phi is

    Q_ij = Re< g_i grad_j phi + g_j grad_i phi , phi > / (2 |phi|^2)

with g_i the tangent Clifford action, defined away from the zero set of phi.
Grid points with |phi|^2 below ``eps_zero`` are masked and excluded from all
inf/sup computations; the mask fraction travels with the tensor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .geometry import NotApplicable
from .operators import DiscreteOperator, SpinorField, covariant_derivative

ZERO_SET_RELATIVE = 1e-8
EM_CERTIFY_TOL = 1e-6


@dataclass
class EMTensorField:
    disc: object
    q: np.ndarray  # (npoints, n, n), symmetric by construction
    mask: np.ndarray  # True where |phi|^2 is too small to divide
    trace: np.ndarray
    norm2: np.ndarray  # squared Frobenius norm per point
    eps_zero: float
    status: str  # "ok" or "warn_mask"

    @property
    def mask_fraction(self) -> float:
        return float(np.mean(self.mask))

    def unmasked(self) -> np.ndarray:
        return ~self.mask


def _clifford_apply(gamma: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Pointwise fiber action: values (npoints, fiber) -> gamma . values."""
    return values @ gamma.T


def _re_inner(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pointwise real part of the Hermitian fiber product <a, b>."""
    return np.sum(a * b.conj(), axis=1).real


def compute_q(phi: SpinorField) -> EMTensorField:
    disc = phi.disc
    vals = phi.values()
    dens = np.sum(np.abs(vals) ** 2, axis=1)
    top = float(np.max(dens))
    if top == 0.0:
        raise ConfigError("energy-momentum tensor of the zero section")
    eps = ZERO_SET_RELATIVE * top
    mask = dens < eps
    grads = covariant_derivative(phi)
    n = disc.n
    raw = np.empty((disc.npoints, n, n))
    for i in range(n):
        for j in range(i, n):
            a = _re_inner(_clifford_apply(disc.gamma[i], grads[j]), vals)
            if i == j:
                raw[:, i, i] = a
            else:
                b = _re_inner(_clifford_apply(disc.gamma[j], grads[i]), vals)
                raw[:, i, j] = raw[:, j, i] = 0.5 * (a + b)
    safe = np.where(mask, 1.0, dens)
    q = raw / safe[:, None, None]
    q[mask] = 0.0
    trace = np.trace(q, axis1=1, axis2=2)
    norm2 = np.sum(q**2, axis=(1, 2))
    status = "warn_mask" if np.mean(mask) > 0.5 else "ok"
    return EMTensorField(disc, q, mask, trace, norm2, eps, status)


def trace_identity_residual(phi: SpinorField, dirac: DiscreteOperator | None = None) -> float:
    """Pointwise defect of  tr(Q) |phi|^2 = Re<D phi, phi>.

    Using the assembled operator for D (rather than re-summing the frame
    derivatives) makes this a cross-check between the operator assembly and
    the pointwise tensor."""
    disc = phi.disc
    if dirac is None:
        dmat = disc.dirac_matrix
    else:
        if dirac.label != "D":
            raise ConfigError("trace identity is stated for the intrinsic Dirac operator")
        dmat = dirac.matrix
    qfield = compute_q(phi)
    vals = phi.values()
    dens = np.sum(np.abs(vals) ** 2, axis=1)
    dvals = disc.to_values(dmat @ phi.dof)
    lhs = qfield.trace * dens
    rhs = _re_inner(dvals, vals)
    keep = qfield.unmasked()
    return float(np.max(np.abs(lhs[keep] - rhs[keep])))


@dataclass
class EMSpinorReport:
    residual: float
    trace_is_constant: bool
    trace_spread: float

    @property
    def is_em_spinor(self) -> bool:
        return self.residual < EM_CERTIFY_TOL

    @property
    def is_t_killing(self) -> bool:
        return self.is_em_spinor and self.trace_is_constant


def em_spinor_residual(phi: SpinorField, qfield: EMTensorField | None = None) -> EMSpinorReport:
    """L2 residual of the field equation grad_i phi = -sum_j Q_ij g_j phi.

    Also reports whether tr Q is constant, which upgrades an energy-momentum
    section to the eigen-section case."""
    disc = phi.disc
    phi = phi.normalized()
    if qfield is None:
        qfield = compute_q(phi)
    grads = covariant_derivative(phi)
    vals = phi.values()
    gvals = np.array([_clifford_apply(g, vals) for g in disc.gamma])
    keep = qfield.unmasked()
    w = disc.weights * keep
    total = 0.0
    for i in range(disc.n):
        res = grads[i] + np.einsum("pj,pjc->pc", qfield.q[:, i, :], np.transpose(gvals, (1, 0, 2)))
        total += float(np.sum(w * np.sum(np.abs(res) ** 2, axis=1)))
    residual = float(np.sqrt(total))
    tr = qfield.trace[keep]
    spread = float(np.max(tr) - np.min(tr)) if tr.size else 0.0
    scale = max(1.0, float(np.max(np.abs(tr))) if tr.size else 0.0)
    return EMSpinorReport(residual, spread < 1e-6 * scale, spread)


def qtr_identity_residual(phi: SpinorField, qfield: EMTensorField | None = None) -> float:
    """Pointwise defect of (tr Q)^2 = R/4 + |Q|^2, certified EM sections only."""
    disc = phi.disc
    if qfield is None:
        qfield = compute_q(phi)
    report = em_spinor_residual(phi, qfield)
    if not report.is_em_spinor:
        raise NotApplicable(
            f"not an energy-momentum section (residual {report.residual:.3e}); identity not asserted"
        )
    keep = qfield.unmasked()
    lhs = qfield.trace**2
    rhs = disc.R_values / 4.0 + qfield.norm2
    return float(np.max(np.abs(lhs[keep] - rhs[keep])))
