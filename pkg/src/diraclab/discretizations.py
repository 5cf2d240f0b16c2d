"""Spectral discretizations of the spinor bundles over the model library.

Three families:

* curves (circle/ellipse): antiperiodic half-integer Fourier modes, degrees of
  freedom are grid values, quadrature is the trapezoid rule in arclength
  (spectrally accurate on periodic data);
* tori (flat/conformal): periodic plane waves, two spinor components, grid
  values as degrees of freedom;
* sphere family: spin-weighted harmonic coefficients as degrees of freedom
  (the basis is orthonormal, so the discrete inner product is the identity).

Layout convention for grid-valued degrees of freedom: point-major, i.e. the
flattened vector is ``values[point, component]`` in C order.  All operators
returned here are plain dense matrices acting on the DOF vector.
"""

from __future__ import annotations

import math
from functools import cached_property

import numpy as np

from . import geometry, swsh
from .clifford import SIGMA1, SIGMA2, SIGMA3
from .errors import ConfigError
from .geometry import HypersurfaceModel, NotApplicable


def build(model: HypersurfaceModel):
    if model.kind in ("circle", "ellipse"):
        return CurveDiscretization(model)
    if model.kind in ("sphere2", "geodesic_sphere_s3"):
        return SphereDiscretization(model)
    if model.kind in ("flat_torus2", "conformal_torus2"):
        return TorusDiscretization(model)
    raise ConfigError(f"no discretization for model kind {model.kind!r}")


def _fiber_expand(mat: np.ndarray, fiber: int) -> np.ndarray:
    """Spatial operator acting identically on each fiber component."""
    return np.kron(mat, np.eye(fiber))


def _pointwise_scalar(values: np.ndarray, fiber: int) -> np.ndarray:
    return np.diag(np.repeat(values, fiber))


def _pointwise_fiber(matrix: np.ndarray, npoints: int) -> np.ndarray:
    return np.kron(np.eye(npoints), matrix)


class CurveDiscretization:
    """Closed plane curve, antiperiodic spin structure, one-component fiber.

    ``u_values`` rescales the metric conformally: the rescaled curve is again
    a curve, with speed ``sigma e^u`` and curvature ``e^{-u} H``.
    """

    basis_id = "fourier-antiperiodic"

    def __init__(self, model: HypersurfaceModel, u_values: np.ndarray | None = None):
        self.model = model
        n = model.resolution
        self.n = 1
        self.fiber = 1
        self.npoints = n
        self.ndof = n
        self.t = 2.0 * math.pi * np.arange(n) / n
        self.sigma = geometry.curve_speed(model, self.t)
        self.H_values = geometry.curve_curvature(model, self.t)
        if u_values is not None:
            eu = np.exp(np.asarray(u_values, dtype=float))
            self.sigma = self.sigma * eu
            self.H_values = self.H_values / eu
        self.weights = self.sigma * (2.0 * math.pi / n)
        self.dof_weights = self.weights.copy()
        self.modes = np.arange(-n // 2, n // 2) + 0.5
        self.synth = np.exp(1j * np.outer(self.t, self.modes))
        # d/dt on grid values, exact on the antiperiodic band
        self.ddt = (self.synth * (1j * self.modes)) @ self.synth.conj().T / n
        self.gamma = np.array([[[-1j]]])
        self.ambient_gamma = np.array([1j * SIGMA1, 1j * SIGMA2])
        self.nu_matrix = 1j * SIGMA2
        self.R_values = np.zeros(n)
        self.h_values = self.H_values[:, None, None]

    # --- value/coefficient plumbing ---------------------------------
    def to_values(self, dof: np.ndarray) -> np.ndarray:
        return dof.reshape(self.npoints, 1)

    def from_values(self, values: np.ndarray) -> np.ndarray:
        return values.reshape(self.npoints)

    def to_coefficients(self, dof: np.ndarray) -> np.ndarray:
        return self.synth.conj().T @ dof / self.npoints

    def from_coefficients(self, coeffs: np.ndarray) -> np.ndarray:
        return self.synth @ coeffs

    # --- differential operators --------------------------------------
    @cached_property
    def grad_matrices(self) -> np.ndarray:
        return np.array([self.ddt / self.sigma[:, None]])

    def grad_values(self, dof: np.ndarray) -> np.ndarray:
        return (self.grad_matrices[0] @ dof).reshape(1, self.npoints, 1)

    @cached_property
    def dirac_matrix(self) -> np.ndarray:
        return -1j * self.grad_matrices[0]

    def mult_matrix(self, values: np.ndarray) -> np.ndarray:
        return np.diag(values)

    def witten_map(self) -> np.ndarray:
        """Matrix of the ambient-connection operator, landing in the opposite
        half-spinor component (one function per grid point)."""
        return 1j * (self.grad_matrices[0] - 0.5j * np.diag(self.H_values))

    @property
    def witten_weights(self) -> np.ndarray:
        return self.weights

    def low_band_columns(self, fraction: float = 0.5) -> np.ndarray:
        keep = np.abs(self.modes) <= fraction * (self.npoints // 2)
        cols = self.synth[:, keep]
        norms = np.sqrt(np.einsum("jk,j,jk->k", cols.conj(), self.dof_weights, cols).real)
        return cols / norms

    # --- scalar calculus ---------------------------------------------
    def frame_gradient(self, values: np.ndarray) -> np.ndarray:
        return np.array([(self.ddt @ values) / self.sigma])

    def laplacian(self, values: np.ndarray) -> np.ndarray:
        g = (self.ddt @ values) / self.sigma
        return (self.ddt @ g) / self.sigma

    # --- inner products ----------------------------------------------
    def inner(self, a: np.ndarray, b: np.ndarray) -> complex:
        return complex(np.sum(np.conj(b) * self.dof_weights * a))

    def norm(self, a: np.ndarray) -> float:
        return math.sqrt(max(self.inner(a, a).real, 0.0))


class TorusDiscretization:
    """Square-periodic chart with the trivial spin structure, fiber dimension 2.

    Covers the flat torus and the conformally flat torus ``e^{2w} delta``; in
    the conformal case the covariant derivative picks up the derived
    grad-w terms and the quadrature weight carries ``e^{2w}``.
    """

    def __init__(self, model: HypersurfaceModel, w_override=None):
        self.model = model
        n = model.resolution
        self.n = 2
        self.fiber = 2
        self.npoints = n * n
        self.ndof = 2 * n * n
        self.nside = n
        self.L1 = float(model.params["L1"])
        self.L2 = float(model.params["L2"])
        x = self.L1 * np.arange(n) / n
        y = self.L2 * np.arange(n) / n
        xx, yy = np.meshgrid(x, y, indexing="ij")
        self.x = xx.ravel()
        self.y = yy.ravel()
        self.kx = np.arange(-n // 2, n // 2)
        self.ky = np.arange(-n // 2, n // 2)
        self.qx = 2.0 * math.pi * self.kx / self.L1
        self.qy = 2.0 * math.pi * self.ky / self.L2
        s1x = np.exp(1j * np.outer(x, self.qx))
        s1y = np.exp(1j * np.outer(y, self.qy))
        self._s1x, self._s1y = s1x, s1y
        d1x = (s1x * (1j * self.qx)) @ s1x.conj().T / n
        d1y = (s1y * (1j * self.qy)) @ s1y.conj().T / n
        eye = np.eye(n)
        self.dx = np.kron(d1x, eye)
        self.dy = np.kron(eye, d1y)

        if w_override is not None:
            raw = w_override
        elif model.kind == "conformal_torus2":
            raw = model.params.get("w_terms", [])
        else:
            raw = None
        if raw is None:
            zero = np.zeros(self.npoints)
            self.w, self.wx, self.wy, self.lap_w = zero, zero.copy(), zero.copy(), zero.copy()
        elif isinstance(raw, np.ndarray):
            self.w = raw.astype(float)
            self.wx = (self.dx @ self.w).real
            self.wy = (self.dy @ self.w).real
            self.lap_w = (self.dx @ (self.dx @ self.w) + self.dy @ (self.dy @ self.w)).real
        else:
            self.w, self.wx, self.wy, self.lap_w = self._eval_terms(raw)
        self.gamma = np.array([1j * SIGMA1, 1j * SIGMA2])
        self.ambient_gamma = None
        self.nu_matrix = None
        self.basis_id = "fourier-periodic"
        cell = self.L1 * self.L2 / self.npoints
        self.weights = cell * np.exp(2.0 * self.w)
        self.dof_weights = np.repeat(self.weights, 2)
        self.H_values = None
        self.h_values = None
        self.R_values = np.exp(-2.0 * self.w) * (-2.0 * self.lap_w)
        self.hermiticity_defect = 0.0

    def _eval_terms(self, terms):
        w = np.zeros(self.npoints)
        wx = np.zeros(self.npoints)
        wy = np.zeros(self.npoints)
        lap = np.zeros(self.npoints)
        for term in terms:
            qx = 2.0 * math.pi * term.kx / self.L1
            qy = 2.0 * math.pi * term.ky / self.L2
            arg = qx * self.x + qy * self.y
            c, s = np.cos(arg), np.sin(arg)
            w += term.amp_cos * c + term.amp_sin * s
            wx += -term.amp_cos * qx * s + term.amp_sin * qx * c
            wy += -term.amp_cos * qy * s + term.amp_sin * qy * c
            lap += -(qx**2 + qy**2) * (term.amp_cos * c + term.amp_sin * s)
        return w, wx, wy, lap

    # --- value/coefficient plumbing ----------------------------------
    def to_values(self, dof: np.ndarray) -> np.ndarray:
        return dof.reshape(self.npoints, 2)

    def from_values(self, values: np.ndarray) -> np.ndarray:
        return values.reshape(self.ndof)

    @cached_property
    def _synth2d(self) -> np.ndarray:
        return np.kron(np.kron(self._s1x, self._s1y), np.eye(2))

    def to_coefficients(self, dof: np.ndarray) -> np.ndarray:
        return self._synth2d.conj().T @ dof / self.npoints

    def from_coefficients(self, coeffs: np.ndarray) -> np.ndarray:
        return self._synth2d @ coeffs

    # --- differential operators ---------------------------------------
    @cached_property
    def grad_matrices(self) -> np.ndarray:
        gx = _fiber_expand(self.dx, 2)
        gy = _fiber_expand(self.dy, 2)
        if not np.any(self.w):
            return np.array([gx, gy])
        chi = self.gamma[0] @ self.gamma[1]
        spin = _pointwise_fiber(chi, self.npoints)
        scale = _pointwise_scalar(np.exp(-self.w), 2)
        g1 = scale @ (gx - 0.5 * _pointwise_scalar(self.wy, 2) @ spin)
        g2 = scale @ (gy + 0.5 * _pointwise_scalar(self.wx, 2) @ spin)
        return np.array([g1, g2])

    def grad_values(self, dof: np.ndarray) -> np.ndarray:
        return np.array([(g @ dof).reshape(self.npoints, 2) for g in self.grad_matrices])

    @cached_property
    def dirac_matrix(self) -> np.ndarray:
        grads = self.grad_matrices
        mats = [_pointwise_fiber(self.gamma[i], self.npoints) @ grads[i] for i in range(2)]
        d = mats[0] + mats[1]
        # pseudospectral products break exact self-adjointness only through
        # the (exponentially small) aliasing tail of e^w; record and symmetrize
        winv = 1.0 / self.dof_weights
        adj = (winv[:, None] * d.conj().T) * self.dof_weights[None, :]
        self.hermiticity_defect = float(np.max(np.abs(d - adj)))
        return 0.5 * (d + adj)

    def mult_matrix(self, values: np.ndarray) -> np.ndarray:
        return _pointwise_scalar(values, 2)

    def witten_map(self) -> np.ndarray:
        raise NotApplicable("torus models are intrinsic; no ambient connection")

    def low_band_columns(self, fraction: float = 0.25) -> np.ndarray:
        kmax = fraction * (self.nside // 2)
        sel = []
        for i, kx in enumerate(self.kx):
            for j, ky in enumerate(self.ky):
                if abs(kx) <= kmax and abs(ky) <= kmax:
                    base = (i * self.nside + j) * 2
                    sel.extend([base, base + 1])
        cols = self._synth2d[:, sel]
        norms = np.sqrt(np.einsum("jk,j,jk->k", cols.conj(), self.dof_weights, cols).real)
        return cols / norms

    # --- scalar calculus ----------------------------------------------
    def frame_gradient(self, values: np.ndarray) -> np.ndarray:
        gx = self.dx @ values
        gy = self.dy @ values
        if np.any(self.w):
            scale = np.exp(-self.w)
            return np.array([scale * gx, scale * gy])
        return np.array([gx, gy])

    def laplacian(self, values: np.ndarray) -> np.ndarray:
        """Laplace-Beltrami of the model metric (analyst's sign)."""
        flat = self.dx @ (self.dx @ values) + self.dy @ (self.dy @ values)
        if np.any(self.w):
            return np.exp(-2.0 * self.w) * flat
        return flat

    def inner(self, a: np.ndarray, b: np.ndarray) -> complex:
        return complex(np.sum(np.conj(b) * self.dof_weights * a))

    def norm(self, a: np.ndarray) -> float:
        return math.sqrt(max(self.inner(a, a).real, 0.0))


class SphereDiscretization:
    """Round sphere of radius r (intrinsic data of both sphere models).

    Degrees of freedom are coefficients in the orthonormalized spin-weight
    -1/2 and +1/2 harmonic basis (components 0 and 1 respectively).  The
    covariant derivative leaves the truncated basis only through its
    weight -3/2 and +3/2 parts, which are synthesized exactly on the grid,
    so no truncation error enters any operator identity.
    """

    basis_id = "spin-weighted"

    def __init__(self, model: HypersurfaceModel):
        self.model = model
        band = model.resolution
        if band < 2:
            raise ConfigError("sphere band must be >= 2")
        self.band = band
        self.radius = geometry.intrinsic_radius(model)
        self.n = 2
        self.fiber = 2
        self.lmax2 = 2 * band - 1
        n_theta = 2 * band + 6
        n_phi = 4 * band + 8
        self.grid = swsh.SphereGrid(n_theta, n_phi)
        self.npoints = self.grid.npoints
        self.tables = {
            s2: swsh.HarmonicTable(s2, self.lmax2 + 2, self.grid) for s2 in (-3, -1, 1, 3)
        }
        self.index = [lm for lm in self.tables[-1].index if lm[0] <= self.lmax2]
        self.nlm = len(self.index)
        self.ndof = 2 * self.nlm
        self.weights = self.radius**2 * self.grid.weights
        self.dof_weights = np.ones(self.ndof)
        self.gamma = np.array([1j * SIGMA1, 1j * SIGMA2])
        # ambient action consistent with gamma_i = g_i nu and volume = +Id
        self.nu_matrix = -1j * SIGMA3
        self.ambient_gamma = np.array([1j * SIGMA2, -1j * SIGMA1])
        self.comp_s2 = (-1, 1)
        self._synth_mats = {s2: self.tables[s2].matrix / self.radius for s2 in (-3, -1, 1, 3)}
        self.H_values = np.full(self.npoints, 2.0 * geometry.sphere_h_coefficient(model))
        self.R_values = np.full(self.npoints, 2.0 / self.radius**2)
        hc = geometry.sphere_h_coefficient(model)
        self.h_values = np.tile(hc * np.eye(2), (self.npoints, 1, 1))
        self._scalar_tables = None

    # --- index helpers -------------------------------------------------
    def _restrict(self, s2: int) -> np.ndarray:
        """Rows of table(s2) corresponding to the truncated index set l <= lmax."""
        tab = self.tables[s2]
        rows = [tab.position[lm] for lm in self.index if lm in tab.position]
        return np.array(rows, dtype=int)

    @cached_property
    def _half_rows(self) -> dict:
        return {s2: self._restrict(s2) for s2 in (-1, 1)}

    def split(self, dof: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return dof[: self.nlm], dof[self.nlm :]

    # --- value/coefficient plumbing -------------------------------------
    def to_values(self, dof: np.ndarray) -> np.ndarray:
        out = np.empty((self.npoints, 2), dtype=complex)
        for c, s2 in enumerate(self.comp_s2):
            rows = self._half_rows[s2]
            coeffs = dof[c * self.nlm : (c + 1) * self.nlm]
            out[:, c] = coeffs @ self._synth_mats[s2][rows]
        return out

    def from_values(self, values: np.ndarray) -> np.ndarray:
        dof = np.empty(self.ndof, dtype=complex)
        for c, s2 in enumerate(self.comp_s2):
            rows = self._half_rows[s2]
            mat = self._synth_mats[s2][rows]
            dof[c * self.nlm : (c + 1) * self.nlm] = mat.conj() @ (self.weights * values[:, c])
        return dof

    def to_coefficients(self, dof: np.ndarray) -> np.ndarray:
        return dof.copy()

    def from_coefficients(self, coeffs: np.ndarray) -> np.ndarray:
        return coeffs.copy()

    # --- differential operators ------------------------------------------
    @cached_property
    def _ladders(self) -> dict:
        out = {}
        for s2 in (-1, 1):
            src = self.tables[s2]
            out[(s2, +1)] = swsh.ladder_matrix(src, self.tables[s2 + 2], +1)
            out[(s2, -1)] = swsh.ladder_matrix(src, self.tables[s2 - 2], -1)
        return out

    @cached_property
    def grad_matrices(self) -> np.ndarray:
        mats = np.zeros((2, self.npoints * 2, self.ndof), dtype=complex)
        for c, s2 in enumerate(self.comp_s2):
            rows = self._half_rows[s2]
            cols = slice(c * self.nlm, (c + 1) * self.nlm)
            up = self._synth_mats[s2 + 2].T @ self._ladders[(s2, +1)][:, rows]
            dn = self._synth_mats[s2 - 2].T @ self._ladders[(s2, -1)][:, rows]
            g1 = -(up + dn) / (2.0 * self.radius)
            g2 = 1j * (up - dn) / (2.0 * self.radius)
            mats[0, c :: 2, cols] = g1
            mats[1, c :: 2, cols] = g2
        return mats

    def grad_values(self, dof: np.ndarray) -> np.ndarray:
        return np.array([(g @ dof).reshape(self.npoints, 2) for g in self.grad_matrices])

    @cached_property
    def dirac_matrix(self) -> np.ndarray:
        d = np.zeros((self.ndof, self.ndof), dtype=complex)
        for k, (l2, _m2) in enumerate(self.index):
            lam = (l2 + 1) / (2.0 * self.radius)
            d[k, self.nlm + k] = 1j * lam
            d[self.nlm + k, k] = -1j * lam
        return d

    @cached_property
    def _value_matrix(self) -> np.ndarray:
        """Synthesis as a matrix dof -> flattened grid values."""
        out = np.zeros((self.npoints * 2, self.ndof), dtype=complex)
        for c, s2 in enumerate(self.comp_s2):
            rows = self._half_rows[s2]
            out[c :: 2, c * self.nlm : (c + 1) * self.nlm] = self._synth_mats[s2][rows].T
        return out

    @cached_property
    def _analysis_matrix(self) -> np.ndarray:
        """Adjoint of synthesis: flattened grid values -> dof (exact in band)."""
        return self._value_matrix.conj().T * np.repeat(self.weights, 2)[None, :]

    def mult_matrix(self, values: np.ndarray) -> np.ndarray:
        return self._analysis_matrix @ (np.repeat(values, 2)[:, None] * self._value_matrix)

    def witten_map(self) -> np.ndarray:
        """Ambient-connection operator as a map dof -> flattened grid values."""
        hc = geometry.sphere_h_coefficient(self.model)
        out = np.zeros((self.npoints * 2, self.ndof), dtype=complex)
        for i in range(2):
            field = self.grad_matrices[i] + 0.5 * hc * _tensor_rows(self.gamma[i], self._value_matrix)
            out += _tensor_rows(self.ambient_gamma[i], field)
        return out

    @property
    def witten_weights(self) -> np.ndarray:
        return self.weights

    def low_band_columns(self, fraction: float = 1.0) -> np.ndarray:
        lcut = fraction * self.lmax2
        sel = [k for k, (l2, _) in enumerate(self.index) if l2 <= lcut]
        sel = sel + [self.nlm + k for k in sel]
        cols = np.zeros((self.ndof, len(sel)))
        for j, k in enumerate(sel):
            cols[k, j] = 1.0
        return cols

    # --- scalar calculus (integer weights, used by conformal machinery) ---
    def _scalars(self):
        if self._scalar_tables is None:
            lmax2 = self.lmax2 + 3  # even band for integer-spin fields
            self._scalar_tables = {
                s2: swsh.HarmonicTable(s2, lmax2, self.grid) for s2 in (-2, 0, 2)
            }
        return self._scalar_tables

    def scalar_analyze(self, values: np.ndarray) -> np.ndarray:
        tab = self._scalars()[0]
        return tab.analyze(values, self.grid.weights)

    def scalar_synth(self, coeffs: np.ndarray) -> np.ndarray:
        return self._scalars()[0].synth(coeffs)

    def frame_gradient(self, values: np.ndarray) -> np.ndarray:
        tabs = self._scalars()
        c = tabs[0].analyze(values, self.grid.weights)
        up = tabs[2].synth(swsh.ladder_matrix(tabs[0], tabs[2], +1) @ c)
        dn = tabs[-2].synth(swsh.ladder_matrix(tabs[0], tabs[-2], -1) @ c)
        g1 = -(up + dn) / (2.0 * self.radius)
        g2 = 1j * (up - dn) / (2.0 * self.radius)
        return np.array([g1, g2])

    def laplacian(self, values: np.ndarray) -> np.ndarray:
        tabs = self._scalars()
        c = tabs[0].analyze(values, self.grid.weights)
        ll = np.array([l2 * (l2 + 2) / 4.0 for (l2, _m2) in tabs[0].index])
        return tabs[0].synth(-ll * c) / self.radius**2

    def inner(self, a: np.ndarray, b: np.ndarray) -> complex:
        return complex(np.sum(np.conj(b) * self.dof_weights * a))

    def norm(self, a: np.ndarray) -> float:
        return math.sqrt(max(self.inner(a, a).real, 0.0))


def _tensor_rows(fiber_matrix: np.ndarray, value_map: np.ndarray) -> np.ndarray:
    """Compose a dof->grid-values map with a constant fiber matrix."""
    npoints2, ndof = value_map.shape
    reshaped = value_map.reshape(npoints2 // 2, 2, ndof)
    return np.einsum("ab,pbd->pad", fiber_matrix, reshaped).reshape(npoints2, ndof)
