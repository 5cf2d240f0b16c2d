import math

import numpy as np
import pytest

from diraclab import make_model, ellipse_curvature, gauss_formula_residual
from diraclab.errors import ConfigError
from diraclab.geometry import NotApplicable


def test_unknown_kind_rejected():
    with pytest.raises(ConfigError):
        make_model("klein_bottle")


@pytest.mark.parametrize(
    "kind,params",
    [
        ("circle", {"radius": -1.0}),
        ("ellipse", {"a": 0.0, "b": 1.0}),
        ("sphere2", {"radius": -2.0}),
        ("geodesic_sphere_s3", {"rho": 3.5}),
        ("flat_torus2", {"L1": -1.0}),
    ],
)
def test_bad_parameters_rejected(kind, params):
    with pytest.raises(ConfigError):
        make_model(kind, params)


def test_circle_curvatures(circle):
    assert np.allclose(circle.H_values(), 1.0, atol=1e-14)
    assert np.allclose(circle.R_values(), 0.0, atol=1e-14)
    h = circle.h_values()
    assert np.allclose(np.trace(h, axis1=1, axis2=2), circle.H_values(), atol=1e-14)


def test_sphere_curvatures_and_gauss_equation(sphere):
    H = sphere.H_values()
    R = sphere.R_values()
    h = sphere.h_values()
    assert np.allclose(H, 2.0, atol=1e-14)
    assert np.allclose(R, 2.0, atol=1e-14)
    h2 = np.sum(h**2, axis=(1, 2))
    assert np.max(np.abs(R - (H**2 - h2))) < 1e-12  # flat ambient: R = H^2 - |h|^2
    # umbilic within tolerance
    assert np.max(np.abs(h - (H[:, None, None] / 2.0) * np.eye(2))) < 1e-10


def test_geodesic_sphere_closed_forms(geodesic_pi3):
    rho = math.pi / 3
    assert np.allclose(geodesic_pi3.H_values(), 2.0 / math.tan(rho), atol=1e-13)
    assert np.allclose(geodesic_pi3.R_values(), 2.0 / math.sin(rho) ** 2, atol=1e-13)
    h = geodesic_pi3.h_values()
    assert np.max(np.abs(h - (1.0 / math.tan(rho)) * np.eye(2))) < 1e-10


def test_ellipse_curvature_closed_form():
    assert abs(ellipse_curvature(1.5, 1.5, 0.7) - 1.0 / 1.5) < 1e-14  # circle limit
    assert abs(ellipse_curvature(2.0, 1.0, 0.0) - 2.0) < 1e-14
    assert abs(ellipse_curvature(2.0, 1.0, math.pi / 2) - 0.25) < 1e-14
    # cross-check against finite differences of the tangent angle
    a, b = 2.0, 1.0
    t0, h = 0.9, 1e-5
    def tangent_angle(t):
        return math.atan2(b * math.cos(t), -a * math.sin(t))
    sigma = math.sqrt((a * math.sin(t0)) ** 2 + (b * math.cos(t0)) ** 2)
    kappa_fd = (tangent_angle(t0 + h) - tangent_angle(t0 - h)) / (2 * h) / sigma
    assert abs(ellipse_curvature(a, b, t0) - abs(kappa_fd)) < 1e-8


def test_gauss_formula_residual_converges(ellipse):
    coarse = gauss_formula_residual(ellipse, 128)
    fine = gauss_formula_residual(ellipse, 256)
    assert coarse / fine >= 3.5  # second-order finite differences


def test_gauss_formula_residual_small_on_spheres(sphere, geodesic_pi3):
    assert gauss_formula_residual(sphere) < 1e-5
    assert gauss_formula_residual(geodesic_pi3) < 1e-5


def test_gauss_formula_not_applicable_for_torus(torus):
    with pytest.raises(NotApplicable):
        gauss_formula_residual(torus)


def test_conformal_torus_curvature_field(conformal_torus):
    r = conformal_torus.R_values()
    disc = conformal_torus.discretization()
    # mean-zero single-harmonic factor: curvature integrates to zero
    assert abs(np.sum(r * conformal_torus.weights())) < 1e-10
    assert np.max(np.abs(r)) > 0.1
    # matches -2 e^{-2w} lap w for the stored factor
    target = np.exp(-2 * disc.w) * (-2.0 * disc.lap_w)
    assert np.max(np.abs(r - target)) < 1e-12


def test_volume_quadrature(circle, sphere):
    assert abs(circle.volume() - 2 * math.pi) < 1e-12
    assert abs(sphere.volume() - 4 * math.pi) < 1e-10
    ell = make_model("ellipse", {"a": 2.0, "b": 1.0}, 256)
    # perimeter via complete elliptic integral of the second kind
    from scipy.special import ellipe

    e2 = 1 - 1.0 / 4.0
    perimeter = 4 * 2.0 * ellipe(e2)
    assert abs(ell.volume() - perimeter) < 1e-10
