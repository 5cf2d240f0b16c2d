"""Model hypersurfaces and intrinsic surfaces with exactly known geometry.

Every model carries its dimension, chart grid, metric data, second
fundamental form ``h`` (when an ambient embedding exists), mean curvature
``H`` and scalar curvature ``R`` sampled on the grid.

Conventions (fixed once, used everywhere):

* ``H`` is the TRACE of ``h`` (sum of principal curvatures), not the average.
* The unit normal is oriented so that ``H >= 0`` on the convex models
  (inward normal for the plane curves and the round sphere, the
  pole-pointing normal for geodesic spheres).
* Curvature-sign check: the analyst's Laplacian (negative spectrum) is used
  wherever a Laplacian appears.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError


class NotApplicable(ConfigError):
    """Raised when an operation does not apply to the given model kind."""


MODEL_KINDS = (
    "circle",
    "ellipse",
    "sphere2",
    "geodesic_sphere_s3",
    "flat_torus2",
    "conformal_torus2",
)

DEFAULT_RESOLUTION = {
    "circle": 64,
    "ellipse": 128,
    "sphere2": 12,
    "geodesic_sphere_s3": 10,
    "flat_torus2": 16,
    "conformal_torus2": 24,
}


@dataclass
class HarmonicTerm:
    """One Fourier term of a scalar field on a torus or circle chart."""

    kx: int = 0
    ky: int = 0
    amp_cos: float = 0.0
    amp_sin: float = 0.0


@dataclass
class HypersurfaceModel:
    kind: str
    n: int
    params: dict
    resolution: int
    intrinsic_only: bool
    normal_orientation: str
    _disc: object = field(default=None, repr=False)

    # ------------------------------------------------------------------
    # discretization plumbing
    # ------------------------------------------------------------------
    def discretization(self):
        if self._disc is None:
            from . import discretizations

            self._disc = discretizations.build(self)
        return self._disc

    @property
    def has_h(self) -> bool:
        return not self.intrinsic_only

    # sampled geometric fields, all on the discretization grid ----------
    def H_values(self) -> np.ndarray:
        if self.intrinsic_only:
            raise NotApplicable(f"{self.kind} stores no second fundamental form")
        return self.discretization().H_values

    def R_values(self) -> np.ndarray:
        return self.discretization().R_values

    def h_values(self) -> np.ndarray:
        if self.intrinsic_only:
            raise NotApplicable(f"{self.kind} stores no second fundamental form")
        return self.discretization().h_values

    def weights(self) -> np.ndarray:
        return self.discretization().weights

    def volume(self) -> float:
        return float(np.sum(self.weights()))


def _positive(params: dict, key: str) -> float:
    value = float(params[key])
    if not value > 0:
        raise ConfigError(f"parameter {key!r} must be positive, got {value}")
    return value


def _parse_terms(raw) -> list[HarmonicTerm]:
    terms = []
    for entry in raw:
        if isinstance(entry, HarmonicTerm):
            terms.append(entry)
        else:
            terms.append(
                HarmonicTerm(
                    kx=int(entry.get("kx", 0)),
                    ky=int(entry.get("ky", 0)),
                    amp_cos=float(entry.get("amp_cos", 0.0)),
                    amp_sin=float(entry.get("amp_sin", 0.0)),
                )
            )
    return terms


def make_model(kind: str, params: dict | None = None, resolution: int | None = None) -> HypersurfaceModel:
    """Construct one of the shipped models.

    ``resolution`` is the number of grid points for curve/torus charts and the
    spectral band for the sphere family.
    """
    params = dict(params or {})
    if kind not in MODEL_KINDS:
        raise ConfigError(f"unknown model kind {kind!r}; known: {', '.join(MODEL_KINDS)}")
    resolution = int(resolution or DEFAULT_RESOLUTION[kind])
    if resolution < 4:
        raise ConfigError(f"resolution {resolution} too small")

    if kind == "circle":
        params.setdefault("radius", 1.0)
        _positive(params, "radius")
        if resolution % 2:
            raise ConfigError("circle resolution must be even")
        return HypersurfaceModel(kind, 1, params, resolution, False, "inward")

    if kind == "ellipse":
        params.setdefault("a", 2.0)
        params.setdefault("b", 1.0)
        _positive(params, "a")
        _positive(params, "b")
        if resolution % 2:
            raise ConfigError("ellipse resolution must be even")
        return HypersurfaceModel(kind, 1, params, resolution, False, "inward")

    if kind == "sphere2":
        params.setdefault("radius", 1.0)
        _positive(params, "radius")
        return HypersurfaceModel(kind, 2, params, resolution, False, "inward")

    if kind == "geodesic_sphere_s3":
        rho = float(params.get("rho", math.pi / 4))
        params["rho"] = rho
        if not 0 < rho < math.pi:
            raise ConfigError(f"geodesic sphere latitude must lie in (0, pi), got {rho}")
        return HypersurfaceModel(kind, 2, params, resolution, False, "pole")

    if kind == "flat_torus2":
        params.setdefault("L1", 2 * math.pi)
        params.setdefault("L2", 2 * math.pi)
        _positive(params, "L1")
        _positive(params, "L2")
        return HypersurfaceModel(kind, 2, params, resolution, True, "n/a")

    # conformal_torus2
    params.setdefault("L1", 2 * math.pi)
    params.setdefault("L2", 2 * math.pi)
    _positive(params, "L1")
    _positive(params, "L2")
    params["w_terms"] = _parse_terms(params.get("w_terms", [{"kx": 1, "amp_cos": 0.2}]))
    return HypersurfaceModel(kind, 2, params, resolution, True, "n/a")


def ellipse_curvature(a: float, b: float, t) -> np.ndarray | float:
    """Curvature of the ellipse (a cos t, b sin t) with inward normal."""
    if a <= 0 or b <= 0:
        raise ConfigError("ellipse semi-axes must be positive")
    speed2 = (a * np.sin(t)) ** 2 + (b * np.cos(t)) ** 2
    return a * b / speed2**1.5


# ----------------------------------------------------------------------
# analytic chart data used by the discretizations and the FD oracle
# ----------------------------------------------------------------------


def curve_embedding(model: HypersurfaceModel) -> Callable[[np.ndarray], np.ndarray]:
    if model.kind == "circle":
        r = model.params["radius"]
        return lambda t: np.stack([r * np.cos(t), r * np.sin(t)], axis=-1)
    if model.kind == "ellipse":
        a, b = model.params["a"], model.params["b"]
        return lambda t: np.stack([a * np.cos(t), b * np.sin(t)], axis=-1)
    raise NotApplicable(f"{model.kind} is not a plane curve")


def curve_speed(model: HypersurfaceModel, t: np.ndarray) -> np.ndarray:
    if model.kind == "circle":
        return np.full_like(np.asarray(t, dtype=float), model.params["radius"])
    if model.kind == "ellipse":
        a, b = model.params["a"], model.params["b"]
        return np.sqrt((a * np.sin(t)) ** 2 + (b * np.cos(t)) ** 2)
    raise NotApplicable(f"{model.kind} is not a plane curve")


def curve_curvature(model: HypersurfaceModel, t: np.ndarray) -> np.ndarray:
    if model.kind == "circle":
        return np.full_like(np.asarray(t, dtype=float), 1.0 / model.params["radius"])
    if model.kind == "ellipse":
        return ellipse_curvature(model.params["a"], model.params["b"], t)
    raise NotApplicable(f"{model.kind} is not a plane curve")


def curve_inward_normal(model: HypersurfaceModel, t: np.ndarray) -> np.ndarray:
    """Unit normal pointing into the bounded region (makes H > 0)."""
    if model.kind == "circle":
        return -np.stack([np.cos(t), np.sin(t)], axis=-1)
    if model.kind == "ellipse":
        a, b = model.params["a"], model.params["b"]
        sigma = curve_speed(model, t)
        # inward = rotate unit tangent (-a sin, b cos)/sigma by -90 degrees
        return np.stack([-b * np.cos(t) / sigma, -a * np.sin(t) / sigma], axis=-1)
    raise NotApplicable(f"{model.kind} is not a plane curve")


def sphere_chart_embedding(model: HypersurfaceModel, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Ambient coordinates of the (theta, phi) chart point."""
    nhat = np.stack(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=-1
    )
    if model.kind == "sphere2":
        return model.params["radius"] * nhat
    if model.kind == "geodesic_sphere_s3":
        rho = model.params["rho"]
        return np.concatenate([math.sin(rho) * nhat, np.full(nhat.shape[:-1] + (1,), math.cos(rho))], axis=-1)
    raise NotApplicable(f"{model.kind} is not a sphere chart")


def sphere_normal(model: HypersurfaceModel, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    nhat = np.stack(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=-1
    )
    if model.kind == "sphere2":
        return -nhat
    if model.kind == "geodesic_sphere_s3":
        rho = model.params["rho"]
        return np.concatenate([-math.cos(rho) * nhat, np.full(nhat.shape[:-1] + (1,), math.sin(rho))], axis=-1)
    raise NotApplicable(f"{model.kind} is not a sphere chart")


def intrinsic_radius(model: HypersurfaceModel) -> float:
    """Radius of the round metric carried by a sphere-family model."""
    if model.kind == "sphere2":
        return float(model.params["radius"])
    if model.kind == "geodesic_sphere_s3":
        return math.sin(model.params["rho"])
    raise NotApplicable(f"{model.kind} is not in the sphere family")


def sphere_h_coefficient(model: HypersurfaceModel) -> float:
    """Umbilic factor: h = coeff * identity."""
    if model.kind == "sphere2":
        return 1.0 / model.params["radius"]
    if model.kind == "geodesic_sphere_s3":
        return 1.0 / math.tan(model.params["rho"])
    raise NotApplicable(f"{model.kind} is not in the sphere family")


# ----------------------------------------------------------------------
# Gauss-formula residual: finite differences of the embedding
# ----------------------------------------------------------------------


def gauss_formula_residual(model: HypersurfaceModel, resolution: int | None = None) -> float:
    """Max-norm residual of the ambient/intrinsic frame-derivative relation.

    The ambient covariant derivative of the frame is computed by second-order
    centered finite differences of the stored embedding and compared against
    the intrinsic connection plus ``h_ij nu``.  Intrinsic-only models raise
    :class:`NotApplicable`.
    """
    if model.intrinsic_only:
        raise NotApplicable(f"{model.kind} has no ambient embedding")
    if model.kind in ("circle", "ellipse"):
        return _gauss_residual_curve(model, resolution or 128)
    if model.kind == "sphere2":
        return _gauss_residual_sphere2(model, resolution or 96)
    if model.kind == "geodesic_sphere_s3":
        return _gauss_residual_geodesic(model, resolution or 96)
    raise NotApplicable(f"{model.kind} has no Gauss-formula oracle")


def _gauss_residual_curve(model: HypersurfaceModel, n: int) -> float:
    t = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
    dt = t[1] - t[0]
    emb = curve_embedding(model)
    sigma = curve_speed(model, t)
    x = emb(t)
    gamma_prime = (np.roll(x, -1, axis=0) - np.roll(x, 1, axis=0)) / (2 * dt)
    e1 = gamma_prime / np.linalg.norm(gamma_prime, axis=1, keepdims=True)
    de1 = (np.roll(e1, -1, axis=0) - np.roll(e1, 1, axis=0)) / (2 * dt)
    ambient = de1 / sigma[:, None]
    rhs = curve_curvature(model, t)[:, None] * curve_inward_normal(model, t)
    return float(np.max(np.linalg.norm(ambient - rhs, axis=1)))


def _sphere_frames(model: HypersurfaceModel, theta, phi, dt):
    """Frame fields e1, e2 on a (theta, phi) mesh by FD of the embedding."""
    x_tp = sphere_chart_embedding(model, theta + dt, phi)
    x_tm = sphere_chart_embedding(model, theta - dt, phi)
    x_pp = sphere_chart_embedding(model, theta, phi + dt)
    x_pm = sphere_chart_embedding(model, theta, phi - dt)
    r = intrinsic_radius(model)
    e1 = (x_tp - x_tm) / (2 * dt) / r
    e2 = (x_pp - x_pm) / (2 * dt) / (r * np.sin(theta)[..., None])
    return e1, e2


def _gauss_residual_sphere_family(model: HypersurfaceModel, n: int, project_s3: bool) -> float:
    # interior patch; poles excluded because the chart frame degenerates there
    theta = np.linspace(0.5, math.pi - 0.5, n)
    phi = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    dt = 1e-4
    r = intrinsic_radius(model)
    cot = np.cos(tt) / np.sin(tt)

    def frames(th, ph):
        return _sphere_frames(model, th, ph, dt)

    e1, e2 = frames(tt, pp)
    # ambient derivatives of the frame along e1, e2 directions
    out = 0.0
    nu = sphere_normal(model, tt, pp)
    hcoef = sphere_h_coefficient(model)
    x = sphere_chart_embedding(model, tt, pp)
    for i, (dth, dph, scale) in enumerate(
        [(dt, 0.0, 1.0 / r), (0.0, dt, None)]
    ):
        ep1, ep2 = frames(tt + dth, pp + dph)
        em1, em2 = frames(tt - dth, pp - dph)
        if scale is None:
            scale_arr = 1.0 / (r * np.sin(tt))[..., None]
        else:
            scale_arr = scale
        for j, (fp, fm) in enumerate([(ep1, em1), (ep2, em2)]):
            amb = (fp - fm) / (2 * dt) * scale_arr
            if project_s3:
                amb = amb - np.sum(amb * x, axis=-1, keepdims=True) * x
            # intrinsic connection of the round chart frame
            if i == 1 and j == 0:
                intr = (cot / r)[..., None] * e2
            elif i == 1 and j == 1:
                intr = -(cot / r)[..., None] * e1
            else:
                intr = 0.0
            resid = amb - intr - (hcoef if i == j else 0.0) * nu
            out = max(out, float(np.max(np.linalg.norm(resid, axis=-1))))
    return out


def _gauss_residual_sphere2(model: HypersurfaceModel, n: int) -> float:
    return _gauss_residual_sphere_family(model, n, project_s3=False)


def _gauss_residual_geodesic(model: HypersurfaceModel, n: int) -> float:
    return _gauss_residual_sphere_family(model, n, project_s3=True)
