import math

import numpy as np
import pytest

from diraclab import make_model
from diraclab.errors import HermiticityError
from diraclab.geometry import NotApplicable
from diraclab.operators import (
    DiscreteOperator,
    SpinorField,
    assemble_dirac_schrodinger,
    assemble_hypersurface_dirac,
    assemble_intrinsic_dirac,
    covariant_derivative,
    eigensolve,
    lichnerowicz_residual,
    witten_identity_residual,
)


def test_circle_spectrum_exact(circle_dirac):
    expected = np.array([-3.5, -2.5, -1.5, -0.5, 0.5, 1.5, 2.5, 3.5])
    assert np.max(np.abs(np.sort(circle_dirac.eigenvalues) - expected)) < 1e-10
    assert all(r < 1e-9 for r in circle_dirac.residuals)


def test_circle_shift_property(circle_dirac, circle_shifted):
    # constant curvature: the shifted spectrum is a rigid translation
    d_sorted = np.sort(circle_dirac.eigenvalues)
    h_sorted = np.sort(circle_shifted.eigenvalues)[1:9]
    assert np.max(np.abs(h_sorted - (d_sorted - 0.5))) < 1e-10


def test_circle_eigensolve_deterministic(circle):
    a = eigensolve(assemble_intrinsic_dirac(circle), 6)
    b = eigensolve(assemble_intrinsic_dirac(circle), 6)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    for fa, fb in zip(a.fields, b.fields):
        assert np.array_equal(fa.dof, fb.dof)


def test_identity_operator_eigenvalues(circle):
    disc = circle.discretization()
    op = DiscreteOperator(disc, np.eye(disc.ndof, dtype=complex), "D")
    spec = eigensolve(op, 5)
    assert np.allclose(spec.eigenvalues, 1.0, atol=1e-14)


def test_non_hermitian_input_rejected(circle):
    disc = circle.discretization()
    bad = np.zeros((disc.ndof, disc.ndof), dtype=complex)
    bad[0, 1] = 1.0
    with pytest.raises(HermiticityError):
        eigensolve(DiscreteOperator(disc, bad, "D"), 3)


def test_sphere_spectrum_ladder(sphere_dirac):
    for k in range(2):
        for sign in (1, -1):
            target = sign * (k + 1)
            hits = np.sum(np.abs(sphere_dirac.eigenvalues - target) < 1e-8)
            assert hits == 2 * (k + 1)
    assert np.max(sphere_dirac.residuals) < 1e-9


def test_sphere_shifted_kernel(sphere_shifted):
    zeros = np.sum(np.abs(sphere_shifted.eigenvalues) < 1e-9)
    assert zeros == 2  # restricted parallel sections


def test_geodesic_sphere_lowest_mode(geodesic_pi3):
    spec = eigensolve(assemble_hypersurface_dirac(geodesic_pi3), 6)
    lam1 = math.tan(math.pi / 6)
    assert abs(np.min(np.abs(spec.eigenvalues)) - lam1) < 1e-10


def test_torus_plane_wave_oracle(torus, torus_dirac):
    # independent oracle: apply the assembled operator to hand-built plane waves
    disc = torus.discretization()
    rng = np.random.default_rng(2)
    d = assemble_intrinsic_dirac(torus)
    for kx, ky in ((1, 0), (1, 1), (2, -1)):
        kvec = np.array([kx * 2 * math.pi / disc.L1, ky * 2 * math.pi / disc.L2])
        kn = np.linalg.norm(kvec)
        kmat = sum(kvec[i] * disc.gamma[i] for i in range(2))
        evals, evecs = np.linalg.eigh(1j * kmat)
        for which in range(2):
            chi = evecs[:, which]
            wave = np.exp(1j * (kvec[0] * disc.x + kvec[1] * disc.y))
            vals = wave[:, None] * chi[None, :]
            dof = disc.from_values(vals)
            out = d.apply(dof)
            assert np.max(np.abs(out - evals[which] * dof)) < 1e-10 * max(1.0, kn)
            assert abs(abs(evals[which]) - kn) < 1e-12


def test_torus_spectrum_multiplicities(torus_dirac):
    lam = np.sort(torus_dirac.eigenvalues)
    expected = np.array([-math.sqrt(2)] * 2 + [-1.0] * 4 + [0.0] * 2 + [1.0] * 4)
    assert np.max(np.abs(lam - expected)) < 1e-10


def test_dirac_schrodinger_reductions(circle, torus):
    d = assemble_intrinsic_dirac(circle)
    f0 = assemble_dirac_schrodinger(circle, 0.0)
    assert np.max(np.abs(d.matrix - f0.matrix)) == 0.0
    fh = assemble_dirac_schrodinger(circle, circle.H_values())
    dh = assemble_hypersurface_dirac(circle)
    assert np.max(np.abs(fh.matrix - dh.matrix)) < 1e-14
    # constant shift of the plane-wave spectrum
    spec = eigensolve(assemble_dirac_schrodinger(torus, 1.0), 10)
    base = eigensolve(assemble_intrinsic_dirac(torus), 16)
    shifted = base.eigenvalues - 0.5
    for lam in spec.eigenvalues:
        assert np.min(np.abs(shifted - lam)) < 1e-10


def test_hypersurface_operator_needs_h(torus):
    with pytest.raises(NotApplicable):
        assemble_hypersurface_dirac(torus)


def test_covariant_derivative_eigenmode_relation(circle, circle_dirac):
    # 1d: the covariant derivative of a mode is i*mu*phi in arclength
    i = circle_dirac.closest(1.5)
    lam, phi = circle_dirac.pair(i)
    grads = covariant_derivative(phi)
    vals = phi.values()
    assert np.max(np.abs(grads[0] - 1j * lam * vals)) < 1e-10


def test_sphere_killing_equation(sphere_dirac):
    # lowest modes solve grad_X phi = -(lam/2) X . phi exactly
    disc = sphere_dirac.operator.disc
    for lam_target in (1.0, -1.0):
        i = sphere_dirac.closest(lam_target)
        lam, phi = sphere_dirac.pair(i)
        grads = covariant_derivative(phi)
        vals = phi.values()
        worst = 0.0
        for k in range(2):
            gv = vals @ disc.gamma[k].T
            worst = max(worst, float(np.max(np.abs(grads[k] + 0.5 * lam * gv))))
        assert worst < 1e-8


def test_rayleigh_quotient_consistency(sphere_shifted):
    op = sphere_shifted.operator
    for i in range(len(sphere_shifted.eigenvalues)):
        lam, phi = sphere_shifted.pair(i)
        ray = op.inner(op.apply(phi.dof), phi.dof).real / op.inner(phi.dof, phi.dof).real
        assert abs(ray - lam) < 1e-10


def test_spectral_symmetry_and_asymmetry(circle_dirac, circle_shifted):
    lam = np.sort(circle_dirac.eigenvalues)
    assert np.max(np.abs(lam + lam[::-1])) < 1e-10
    lam_h = np.sort(circle_shifted.eigenvalues)
    assert np.max(np.abs(lam_h + lam_h[::-1])) > 0.5


@pytest.mark.parametrize("kind,res", [("circle", 64), ("sphere2", 12), ("flat_torus2", 16)])
def test_lichnerowicz_identity(kind, res):
    model = make_model(kind, {}, res)
    assert lichnerowicz_residual(model) < 1e-8


@pytest.mark.parametrize(
    "kind,params,res",
    [
        ("circle", {"radius": 1.0}, 64),
        ("sphere2", {"radius": 1.0}, 12),
        ("geodesic_sphere_s3", {"rho": math.pi / 4}, 8),
        ("geodesic_sphere_s3", {"rho": math.pi / 3}, 8),
    ],
)
def test_witten_identity(kind, params, res):
    model = make_model(kind, params, res)
    assert witten_identity_residual(model) < 1e-8


def test_witten_identity_not_applicable_for_torus(torus):
    with pytest.raises(NotApplicable):
        witten_identity_residual(torus)


def test_spinor_field_round_trip(sphere, torus):
    rng = np.random.default_rng(4)
    for model in (sphere, torus):
        disc = model.discretization()
        dof = rng.normal(size=disc.ndof) + 1j * rng.normal(size=disc.ndof)
        phi = SpinorField(disc, dof)
        back = disc.from_values(phi.values())
        assert np.max(np.abs(back - dof)) < 1e-10
        coeffs = phi.coefficients()
        again = disc.from_coefficients(coeffs)
        assert np.max(np.abs(again - dof)) < 1e-10


def test_cluster_rotation_gives_pure_plane_waves(torus_dirac):
    # inside the |lambda| = 1 cluster every reported mode is a single wave
    disc = torus_dirac.operator.disc
    for i in range(len(torus_dirac.eigenvalues)):
        lam, phi = torus_dirac.pair(i)
        if abs(abs(lam) - 1.0) > 1e-9:
            continue
        coeffs = phi.coefficients().reshape(disc.npoints, 2)
        occupied = np.sum(np.abs(coeffs) ** 2, axis=1) > 1e-16
        assert np.sum(occupied) == 1
