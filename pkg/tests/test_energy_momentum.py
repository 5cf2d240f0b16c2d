import math

import numpy as np
import pytest

from diraclab.energy_momentum import (
    compute_q,
    em_spinor_residual,
    qtr_identity_residual,
    trace_identity_residual,
)
from diraclab.errors import ConfigError
from diraclab.geometry import NotApplicable
from diraclab.operators import SpinorField


def test_circle_eigenmode_tensor(circle_dirac):
    # one-dimensional closed form: Q11 = Re<D phi, phi>/|phi|^2 = mu
    for mu in (0.5, 1.5, -2.5):
        i = circle_dirac.closest(mu)
        _, phi = circle_dirac.pair(i)
        q = compute_q(phi)
        assert np.max(np.abs(q.q[:, 0, 0] - mu)) < 1e-10
        assert q.mask_fraction == 0.0


def test_sphere_killing_tensor(sphere_dirac):
    for lam1 in (1.0, -1.0):
        i = sphere_dirac.closest(lam1)
        _, phi = sphere_dirac.pair(i)
        q = compute_q(phi)
        target = (lam1 / 2.0) * np.eye(2)
        assert np.max(np.abs(q.q - target)) < 1e-6


def test_torus_plane_wave_tensor(torus_dirac):
    # brute-force from grad phi = i k phi: Q = (mu/|k|^2) k (x) k
    disc = torus_dirac.operator.disc
    i = torus_dirac.closest(1.0)
    lam, phi = torus_dirac.pair(i)
    q = compute_q(phi)
    coeffs = phi.coefficients().reshape(disc.npoints, 2)
    flat = int(np.argmax(np.sum(np.abs(coeffs) ** 2, axis=1)))
    ix, iy = divmod(flat, disc.nside)
    kvec = np.array([disc.qx[ix], disc.qy[iy]])
    target = np.outer(kvec, kvec) * (lam / np.dot(kvec, kvec))
    assert np.max(np.abs(q.q - target)) < 1e-10
    assert np.max(np.abs(q.norm2 - lam**2)) < 1e-10


def test_zero_section_rejected(circle_dirac):
    disc = circle_dirac.operator.disc
    with pytest.raises(ConfigError):
        compute_q(SpinorField(disc, np.zeros(disc.ndof, dtype=complex)))


def test_gauge_invariance(sphere_dirac):
    i = sphere_dirac.closest(2.0)
    _, phi = sphere_dirac.pair(i)
    q0 = compute_q(phi)
    for c in (np.exp(0.7j), 3.2, -2j):
        scaled = SpinorField(phi.disc, c * phi.dof)
        q1 = compute_q(scaled)
        keep = q0.unmasked() & q1.unmasked()
        assert np.max(np.abs(q1.q[keep] - q0.q[keep])) < 1e-12


def test_frobenius_trace_inequality(sphere_dirac, torus_dirac):
    for spec, n in ((sphere_dirac, 2), (torus_dirac, 2)):
        for i in range(4):
            _, phi = spec.pair(i)
            q = compute_q(phi)
            keep = q.unmasked()
            assert np.all(q.norm2[keep] >= q.trace[keep] ** 2 / n - 1e-12)


def test_trace_identity_eigenmodes(circle_dirac, sphere_dirac):
    for spec in (circle_dirac, sphere_dirac):
        for i in range(len(spec.eigenvalues)):
            _, phi = spec.pair(i)
            assert trace_identity_residual(phi) < 1e-8


def test_trace_identity_random_sections(torus):
    # the identity holds for arbitrary sections, not only eigenmodes
    disc = torus.discretization()
    rng = np.random.default_rng(9)
    for _ in range(5):
        dof = rng.normal(size=disc.ndof) + 1j * rng.normal(size=disc.ndof)
        phi = SpinorField(disc, dof)
        assert trace_identity_residual(phi) < 1e-8


def test_em_sections(sphere_dirac, torus_dirac):
    # parallel-type modes and plane waves satisfy the field equation
    _, killing = sphere_dirac.pair(sphere_dirac.closest(1.0))
    rep = em_spinor_residual(killing)
    assert rep.residual < 1e-7
    assert rep.trace_is_constant  # upgraded to the eigen-section case
    _, wave = torus_dirac.pair(torus_dirac.closest(1.0))
    rep_w = em_spinor_residual(wave)
    assert rep_w.residual < 1e-10
    assert rep_w.trace_is_constant


def test_non_em_section(sphere_dirac):
    _, phi = sphere_dirac.pair(sphere_dirac.closest(2.0))
    rep = em_spinor_residual(phi)
    assert rep.residual > 0.1


def test_qtr_identity(circle_dirac, sphere_dirac, torus_dirac):
    # killing: 1 = 2/4 + 1/2 ; circle: mu^2 = mu^2 ; plane wave: mu^2 = mu^2
    _, killing = sphere_dirac.pair(sphere_dirac.closest(1.0))
    assert qtr_identity_residual(killing) < 1e-8
    _, mode = circle_dirac.pair(circle_dirac.closest(1.5))
    assert qtr_identity_residual(mode) < 1e-10
    _, wave = torus_dirac.pair(torus_dirac.closest(1.0))
    assert qtr_identity_residual(wave) < 1e-10


def test_qtr_not_applicable_for_non_em(sphere_dirac):
    _, phi = sphere_dirac.pair(sphere_dirac.closest(2.0))
    with pytest.raises(NotApplicable):
        qtr_identity_residual(phi)
