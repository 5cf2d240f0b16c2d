"""Oracle tests for the spin-weighted basis: everything downstream leans on
these ladder relations, so they are checked against plain finite differences
and closed forms, independently of the operator assembly."""

import math

import numpy as np
import pytest

from diraclab import swsh


def test_wigner_small_entries_closed_forms():
    beta = np.array([0.3, 1.1, 2.4])
    half = beta / 2
    # doubled indices: d^{1/2}, d^1 entries
    assert np.allclose(swsh.wigner_d(1, 1, 1, beta), np.cos(half), atol=1e-14)
    assert np.allclose(swsh.wigner_d(1, 1, -1, beta), -np.sin(half), atol=1e-14)
    assert np.allclose(swsh.wigner_d(1, -1, 1, beta), np.sin(half), atol=1e-14)
    assert np.allclose(swsh.wigner_d(2, 0, 0, beta), np.cos(beta), atol=1e-14)
    assert np.allclose(swsh.wigner_d(2, 2, 0, beta), -np.sin(beta) / math.sqrt(2), atol=1e-14)
    assert np.allclose(swsh.wigner_d(2, 0, 2, beta), np.sin(beta) / math.sqrt(2), atol=1e-14)


def test_zero_weight_matches_spherical_harmonics():
    theta = np.array([0.4, 1.0, 2.2])
    phi = np.array([0.0, 1.3, 4.0])
    y10 = swsh.sylm(0, 2, 0, theta, phi)
    assert np.allclose(y10, math.sqrt(3 / (4 * math.pi)) * np.cos(theta), atol=1e-14)
    y11 = swsh.sylm(0, 2, 2, theta, phi)
    target = -math.sqrt(3 / (8 * math.pi)) * np.sin(theta) * np.exp(1j * phi)
    assert np.allclose(y11, target, atol=1e-14)


def test_orthonormality_on_quadrature_grid():
    grid = swsh.SphereGrid(20, 36)
    for s2 in (-3, -1, 0, 1, 3):
        lmax2 = 13 if s2 % 2 else 12
        tab = swsh.HarmonicTable(s2, lmax2, grid)
        gram = (tab.matrix * grid.weights) @ tab.matrix.conj().T
        assert np.max(np.abs(gram - np.eye(len(tab.index)))) < 1e-13


def _eth_fd(s2, l2, m2, theta, phi, h=1e-6):
    s = s2 / 2

    def f(th, ph):
        return swsh.sylm(s2, l2, m2, th, ph)

    dth = (f(theta + h, phi) - f(theta - h, phi)) / (2 * h)
    dph = (f(theta, phi + h) - f(theta, phi - h)) / (2 * h)
    return -(dth + 1j / np.sin(theta) * dph - s / np.tan(theta) * f(theta, phi))


def _ethbar_fd(s2, l2, m2, theta, phi, h=1e-6):
    s = s2 / 2

    def f(th, ph):
        return swsh.sylm(s2, l2, m2, th, ph)

    dth = (f(theta + h, phi) - f(theta - h, phi)) / (2 * h)
    dph = (f(theta, phi + h) - f(theta, phi - h)) / (2 * h)
    return -(dth - 1j / np.sin(theta) * dph + s / np.tan(theta) * f(theta, phi))


@pytest.mark.parametrize(
    "s2,l2,m2",
    [(-1, 1, 1), (-1, 3, -1), (1, 3, 3), (1, 5, -3), (-3, 5, 1), (0, 4, 2), (1, 7, 5), (-1, 9, 7)],
)
def test_ladder_relations_against_finite_differences(s2, l2, m2):
    rng = np.random.default_rng(3)
    theta = rng.uniform(0.4, 2.6, 10)
    phi = rng.uniform(0.0, 2 * math.pi, 10)
    up = _eth_fd(s2, l2, m2, theta, phi)
    up_pred = swsh.raise_coeff(s2, l2) * swsh.sylm(s2 + 2, l2, m2, theta, phi)
    assert np.max(np.abs(up - up_pred)) < 5e-9
    dn = _ethbar_fd(s2, l2, m2, theta, phi)
    dn_pred = -swsh.lower_coeff(s2, l2) * swsh.sylm(s2 - 2, l2, m2, theta, phi)
    assert np.max(np.abs(dn - dn_pred)) < 5e-9


def test_ladder_matrix_index_alignment():
    grid = swsh.SphereGrid(12, 20)
    src = swsh.HarmonicTable(-1, 9, grid)
    dst = swsh.HarmonicTable(-3, 9, grid)
    mat = swsh.ladder_matrix(src, dst, -1)
    # lowering from l = 1/2 at weight -1/2 has nowhere to go: column is zero
    col = src.position[(1, 1)]
    assert np.all(mat[:, col] == 0.0)
    # a representative surviving entry carries the closed-form factor
    row = dst.position[(3, 1)]
    col = src.position[(3, 1)]
    expected = -math.sqrt((3 / 2 - 1 / 2) * (3 / 2 + 1 / 2 + 1))
    assert abs(mat[row, col] - expected) < 1e-14


def test_synthesis_analysis_round_trip():
    grid = swsh.SphereGrid(16, 28)
    tab = swsh.HarmonicTable(1, 11, grid)
    rng = np.random.default_rng(5)
    coeffs = rng.normal(size=len(tab.index)) + 1j * rng.normal(size=len(tab.index))
    values = tab.synth(coeffs)
    back = tab.analyze(values, grid.weights)
    assert np.max(np.abs(back - coeffs)) < 1e-12
