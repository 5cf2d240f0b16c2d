"""Spin-weighted spherical harmonics with half-integer support.

All spins, degrees and orders are passed as *doubled integers* (``l2 = 2l``
etc.) so that half-integer bookkeeping stays exact.  The basis functions are

    Y[s, l, m](theta, phi) = (-1)^m sqrt((2l+1)/4pi) d^l_{-m, s}(theta) e^{i m phi}

with the Wigner little-d evaluated through Jacobi polynomials (numerically
stable for the moderate bands used here, unlike the alternating factorial
sum).  Under this normalization the raising/lowering operators act as

    raise:  Y[s] -> +sqrt((l-s)(l+s+1)) Y[s+1]
    lower:  Y[s] -> -sqrt((l+s)(l-s+1)) Y[s-1]

which is what the frame expressions for the spinor covariant derivative on
the round sphere consume.  Products of two basis functions at equal azimuthal
order are polynomials in cos(theta), so Gauss-Legendre quadrature in
cos(theta) integrates every inner product appearing in the package exactly.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import eval_jacobi, roots_legendre


def wigner_d(l2: int, a2: int, b2: int, theta: np.ndarray) -> np.ndarray:
    """Wigner d^l_{a,b}(theta) for doubled indices (l2=2l, a2=2a, b2=2b)."""
    if (l2 - a2) % 2 or (l2 - b2) % 2:
        raise ValueError("a and b must have the same integrality as l")
    if abs(a2) > l2 or abs(b2) > l2:
        return np.zeros_like(np.asarray(theta, dtype=float))
    mu2 = abs(a2 - b2)
    nu2 = abs(a2 + b2)
    mu, nu = mu2 // 2, nu2 // 2
    # k = l - (mu + nu)/2 = l - max(|a|, |b|), an integer
    k = (2 * l2 - mu2 - nu2) // 4
    if k < 0:
        return np.zeros_like(np.asarray(theta, dtype=float))
    log_coef = 0.5 * (
        math.lgamma(k + 1)
        + math.lgamma(k + mu + nu + 1)
        - math.lgamma(k + mu + 1)
        - math.lgamma(k + nu + 1)
    )
    coef = math.exp(log_coef)
    sign = (-1.0) ** ((a2 - b2) // 2) if a2 >= b2 else 1.0
    theta = np.asarray(theta, dtype=float)
    half = 0.5 * theta
    return (
        sign
        * coef
        * np.sin(half) ** mu
        * np.cos(half) ** nu
        * eval_jacobi(k, mu, nu, np.cos(theta))
    )


def sylm(s2: int, l2: int, m2: int, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """One spin-weighted harmonic on arrays of angles (broadcast together)."""
    if (l2 - m2) % 2 or (l2 - s2) % 2:
        raise ValueError("m and s must have the same integrality as l")
    amp = math.sqrt((l2 + 1) / (4.0 * math.pi))
    # (-1)^m is a bona fide complex phase once m is half-integer
    phase = np.exp(0.5j * m2 * np.asarray(phi, dtype=float))
    d = wigner_d(l2, -m2, s2, theta)
    return ((-1.0 + 0j) ** (m2 / 2.0)) * amp * d * phase


def lm_list(s2: int, lmax2: int) -> list[tuple[int, int]]:
    """Deterministic (l2, m2) ordering for one spin weight: l ascending, m ascending."""
    out = []
    # l runs over the integrality class of s, starting at |s|
    for l2 in range(abs(s2), lmax2 + 1, 2):
        for m2 in range(-l2, l2 + 1, 2):
            out.append((l2, m2))
    return out


def raise_coeff(s2: int, l2: int) -> float:
    """Ladder factor for weight s -> s+1: sqrt((l-s)(l+s+1))."""
    val = (l2 - s2) * (l2 + s2 + 2) / 4.0
    return math.sqrt(max(val, 0.0))


def lower_coeff(s2: int, l2: int) -> float:
    """Ladder factor magnitude for weight s -> s-1 (enters with a minus sign)."""
    val = (l2 + s2) * (l2 - s2 + 2) / 4.0
    return math.sqrt(max(val, 0.0))


class SphereGrid:
    """Gauss-Legendre x uniform-phi product grid on the unit sphere."""

    def __init__(self, n_theta: int, n_phi: int):
        x, w = roots_legendre(n_theta)
        order = np.argsort(-x)  # theta ascending
        self.cos_theta = x[order]
        self.theta = np.arccos(self.cos_theta)
        self.w_theta = w[order]
        self.n_theta = n_theta
        self.n_phi = n_phi
        self.phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
        tt, pp = np.meshgrid(self.theta, self.phi, indexing="ij")
        self.theta_flat = tt.ravel()
        self.phi_flat = pp.ravel()
        ww = np.repeat(self.w_theta, n_phi) * (2.0 * math.pi / n_phi)
        self.weights = ww  # integrates f(theta, phi) over the unit sphere
        self.npoints = n_theta * n_phi


class HarmonicTable:
    """Sampled harmonics of one spin weight on a :class:`SphereGrid`.

    ``matrix[k, p]`` holds Y[(l2, m2) = index[k]] at grid point p.
    """

    def __init__(self, s2: int, lmax2: int, grid: SphereGrid):
        self.s2 = s2
        self.index = lm_list(s2, lmax2)
        self.position = {lm: i for i, lm in enumerate(self.index)}
        rows = []
        phase_cache: dict[int, np.ndarray] = {}
        for l2, m2 in self.index:
            if m2 not in phase_cache:
                phase_cache[m2] = np.exp(0.5j * m2 * grid.phi_flat) * ((-1.0 + 0j) ** (m2 / 2.0))
            amp = math.sqrt((l2 + 1) / (4.0 * math.pi))
            d_theta = wigner_d(l2, -m2, s2, grid.theta)
            d_flat = np.repeat(d_theta, grid.n_phi)
            rows.append(amp * d_flat * phase_cache[m2])
        self.matrix = np.array(rows) if rows else np.zeros((0, grid.npoints), dtype=complex)

    def synth(self, coeffs: np.ndarray) -> np.ndarray:
        return coeffs @ self.matrix

    def analyze(self, values: np.ndarray, weights: np.ndarray) -> np.ndarray:
        return self.matrix.conj() @ (weights * values)


def ladder_matrix(src: HarmonicTable, dst: HarmonicTable, direction: int) -> np.ndarray:
    """Rectangular matrix of the raising (+1) or lowering (-1) operator.

    Maps coefficients at weight ``src.s2/2`` to coefficients at
    ``dst.s2/2 = src.s2/2 + direction``; entries vanish where the target
    weight exceeds l.
    """
    if dst.s2 != src.s2 + 2 * direction:
        raise ValueError("tables do not differ by one unit of spin weight")
    out = np.zeros((len(dst.index), len(src.index)))
    for col, (l2, m2) in enumerate(src.index):
        row = dst.position.get((l2, m2))
        if row is None:
            continue
        if direction == +1:
            out[row, col] = raise_coeff(src.s2, l2)
        else:
            out[row, col] = -lower_coeff(src.s2, l2)
    return out
