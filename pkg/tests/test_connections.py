import math

import numpy as np
import pytest

from diraclab import make_model
from diraclab.connections import (
    integral_identity_residual,
    modified_connection_residual,
    nabla_lambda_apply,
    nabla_q_apply,
    pq_thm1,
    pq_zhang,
    qformula_residual,
)
from diraclab.energy_momentum import compute_q
from diraclab.operators import SpinorField, assemble_hypersurface_dirac, eigensolve


def test_circle_parameters_closed_form(circle_shifted):
    # mu = 3/2 mode: q^2 = 1/2, p = -sqrt(2), shift vanishes
    i = circle_shifted.closest(1.0)
    lam, phi = circle_shifted.pair(i)
    q = compute_q(phi)
    params = pq_thm1(q, lam)
    assert params.status == "ok"
    assert np.max(np.abs(params.q**2 - 0.5)) < 1e-12
    assert np.max(np.abs(params.p + math.sqrt(2.0))) < 1e-12
    assert np.max(np.abs(params.shift)) < 1e-12
    assert np.all(params.q > 0)


def test_sphere_killing_is_boundary(sphere_shifted):
    i = sphere_shifted.closest(0.0)
    lam, phi = sphere_shifted.pair(i)
    q = compute_q(phi)
    params = pq_thm1(q, lam)
    assert params.status == "boundary"
    assert params.p is None


def test_ellipse_pointwise_fields():
    ellipse = make_model("ellipse", {"a": 2.0, "b": 1.0}, 128)
    spec = eigensolve(assemble_hypersurface_dirac(ellipse), 6)
    lam = 2 * math.pi / ellipse.volume()
    i = spec.closest(lam, tol=1e-8)
    lam, phi = spec.pair(i)
    q = compute_q(phi)
    params = pq_thm1(q, lam)
    assert params.status == "ok"
    assert np.all(np.isfinite(params.p))
    assert np.all(np.isfinite(params.q))
    # positive mode over positive curvature: the shift field vanishes
    assert np.max(np.abs(params.shift)) < 1e-10


def test_zhang_parameters_geodesic(geodesic_pi3):
    spec = eigensolve(assemble_hypersurface_dirac(geodesic_pi3), 6)
    i = spec.closest(math.tan(math.pi / 6))
    lam, phi = spec.pair(i)
    params = pq_zhang(spec.operator.disc, lam)
    assert params.status == "ok"
    # the closed-form root: (1 - nq)^2 = 1 here, so q = 0 and p = 1
    assert np.max(np.abs(params.q)) < 1e-12
    assert np.max(np.abs(params.p - 1.0)) < 1e-12
    lam1 = 1.0 / math.sin(math.pi / 3)
    assert np.max(np.abs(params.shift - lam1 / 2.0)) < 1e-12


def test_zhang_boundary_and_small_n(sphere_shifted, circle_shifted):
    lam, _ = sphere_shifted.pair(sphere_shifted.closest(0.0))
    params = pq_zhang(sphere_shifted.operator.disc, lam)
    assert params.status == "boundary"
    lam_c, _ = circle_shifted.pair(circle_shifted.closest(1.0))
    params_c = pq_zhang(circle_shifted.operator.disc, lam_c)
    assert params_c.status == "not_applicable"


def test_equality_case_chain_circle(circle_shifted):
    # parallel section for the modified connection <=> shift zero + field eq
    i = circle_shifted.closest(1.0)
    lam, phi = circle_shifted.pair(i)
    q = compute_q(phi)
    params = pq_thm1(q, lam)
    _, res = nabla_q_apply(phi, params, q)
    assert res < 1e-8
    # |phi| constant in the equality case
    dens = phi.normalized().density()
    assert np.max(dens) - np.min(dens) < 1e-10


def test_equality_case_chain_geodesic(geodesic_pi3):
    spec = eigensolve(assemble_hypersurface_dirac(geodesic_pi3), 6)
    i = spec.closest(math.tan(math.pi / 6))
    lam, phi = spec.pair(i)
    params = pq_zhang(spec.operator.disc, lam)
    _, res = nabla_lambda_apply(phi, params)
    assert res < 1e-7
    dens = phi.normalized().density()
    assert np.max(dens) - np.min(dens) < 1e-8


def test_non_equality_modes_have_positive_residual(sphere_shifted):
    i = sphere_shifted.closest(1.0)
    lam, phi = sphere_shifted.pair(i)
    q = compute_q(phi)
    res = modified_connection_residual(phi, 0.3, qfield=q, mask=q.mask)
    assert res > 0.1


def test_qformula_random_sections(circle, sphere, torus):
    rng = np.random.default_rng(12)
    for model in (circle, sphere, torus):
        disc = model.discretization()
        for _ in range(25):
            dof = rng.normal(size=disc.ndof) + 1j * rng.normal(size=disc.ndof)
            phi = SpinorField(disc, dof)
            shift = rng.normal()
            assert qformula_residual(phi, shift) < 1e-9


def test_qformula_zero_shift_special_case(sphere_dirac):
    # s = 0 reduces to |grad phi|^2 - |Q|^2 |phi|^2
    _, phi = sphere_dirac.pair(sphere_dirac.closest(1.0))
    assert qformula_residual(phi, 0.0) < 1e-12


def test_integral_identity_circle(circle_shifted):
    for target, small in ((1.0, 1e-9), (-2.0, 1e-8)):
        i = circle_shifted.closest(target)
        lam, phi = circle_shifted.pair(i)
        q = compute_q(phi)
        params = pq_thm1(q, lam)
        assert params.status == "ok"
        assert integral_identity_residual(phi, lam, params, q) < small


def test_integral_identity_both_sides_positive(circle_shifted):
    # non-equality mode: both sides agree and are strictly positive
    i = circle_shifted.closest(-2.0)
    lam, phi = circle_shifted.pair(i)
    q = compute_q(phi)
    params = pq_thm1(q, lam)
    phi_n = phi.normalized()
    _, fields = nabla_q_apply(phi_n, params, q)
    disc = phi.disc
    lhs = float(np.sum(disc.weights * np.sum(np.abs(fields) ** 2, axis=(0, 2))))
    assert lhs > 0.1


def test_integral_identity_ellipse():
    ellipse = make_model("ellipse", {"a": 2.0, "b": 1.0}, 256)
    spec = eigensolve(assemble_hypersurface_dirac(ellipse), 6)
    lam_target = 2 * math.pi / ellipse.volume()
    i = spec.closest(lam_target, tol=1e-8)
    lam, phi = spec.pair(i)
    q = compute_q(phi)
    params = pq_thm1(q, lam)
    assert integral_identity_residual(phi, lam, params, q) < 1e-6
