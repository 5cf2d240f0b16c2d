"""Named verification suites: the release gates behind ``diraclab verify``.

Each suite runs a fixed battery of invariant checks at pinned tolerances and
returns a table of named pass/fail rows.  ``soundness_sweep`` is the central
gate: every shipped model, the first modes of each applicable operator, and
every applicable bound, with the equality <-> parallelism equivalence checked
both ways.

The ``mutation`` argument injects a deliberate defect (currently a sign flip
in the curvature term of the shifted operator) so the harness itself can be
tested: a correct build passes everything, a mutated build must fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import clifford
from .bounds import evaluate_bound, THEOREMS, sign_diagnostics, improvement_comparison
from .conformal import (
    assemble_conformal_dirac,
    conformal_covariance_residual,
    factor_from_values,
    flat_metric_curvature_oracle,
    optimize_u,
    parse_factor,
    q_scaling_residual,
    transform_geometry,
    zero_factor,
)
from .connections import integral_identity_residual, pq_thm1, pq_zhang, qformula_residual
from .energy_momentum import compute_q, em_spinor_residual, qtr_identity_residual, trace_identity_residual
from .errors import ConfigError
from .geometry import NotApplicable, ellipse_curvature, gauss_formula_residual, make_model
from .operators import (
    assemble_dirac_schrodinger,
    assemble_hypersurface_dirac,
    assemble_intrinsic_dirac,
    eigensolve,
    lichnerowicz_residual,
    witten_identity_residual,
)

SUITES = ("algebra", "geometry", "operators", "bounds", "conformal", "all")


@dataclass
class CheckRow:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteResult:
    suite: str
    rows: list[CheckRow] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def add(self, name: str, passed, detail: str = "") -> None:
        self.rows.append(CheckRow(name, bool(passed), detail))

    def check_value(self, name: str, value: float, tol: float) -> None:
        self.add(name, value < tol, f"{value:.3e} < {tol:.1e}")


def _shipped_models():
    return [
        make_model("circle", {"radius": 1.0}, 64),
        make_model("ellipse", {"a": 2.0, "b": 1.0}, 128),
        make_model("sphere2", {"radius": 1.0}, 12),
        make_model("geodesic_sphere_s3", {"rho": math.pi / 4}, 10),
        make_model("geodesic_sphere_s3", {"rho": math.pi / 3}, 10),
        make_model("flat_torus2", {}, 16),
        make_model("conformal_torus2", {}, 24),
    ]


def _model_tag(model) -> str:
    bits = [model.kind]
    for key in ("radius", "a", "b", "rho"):
        if key in model.params:
            bits.append(f"{key}={model.params[key]:.4g}")
    return ",".join(bits)


# ----------------------------------------------------------------------
# algebra
# ----------------------------------------------------------------------


def algebra_suite(result: SuiteResult, rng: np.random.Generator) -> None:
    for n in range(1, 6):
        g = clifford.build_gamma(n)
        defect = max(g.anticommutation_defect(), g.unitarity_defect(), g.skew_hermitian_defect())
        result.check_value(f"clifford relations n={n}", defect, 1e-12)
        omega = clifford.volume_element(g)
        sq = float(np.max(np.abs(omega @ omega - np.eye(g.dim_spinor))))
        result.check_value(f"volume element squares to identity n={n}", sq, 1e-12)
        if n % 2:
            norm = float(np.max(np.abs(omega - np.eye(g.dim_spinor))))
            result.check_value(f"odd volume normalization n={n}", norm, 1e-12)

    # embedding compatibility of volume elements (odd inside even)
    for m in (0, 1):
        amb = clifford.build_gamma(2 * m + 2)
        emb = clifford.alpha_embed(amb)
        w_emb = clifford.volume_element(emb)
        w_amb = clifford.volume_element(amb)
        result.check_value(
            f"embedded volume element matches ambient m={m}",
            float(np.max(np.abs(w_emb - w_amb))),
            1e-12,
        )

    # identification of the tangent action with the intrinsic representation
    even = clifford.find_intertwiner(clifford.build_gamma(2), clifford.alpha_embed(clifford.build_gamma(3)))
    result.add("even-dimension identification n=2", even.equivalent and even.residual < 1e-10,
               f"residual {even.residual:.3e}")
    _, restricted = clifford.chirality_block(clifford.build_gamma(4), +1)
    odd = clifford.find_intertwiner(clifford.build_gamma(3), restricted)
    result.add("odd-dimension identification n=3 (positive block)", odd.equivalent and odd.residual < 1e-10,
               f"residual {odd.residual:.3e}")

    g3 = clifford.build_gamma(3)
    flipped = clifford.GammaSet(3, 2, tuple(-g for g in g3.generators))
    negative = clifford.find_intertwiner(g3, flipped)
    result.add("inequivalent representation detected", not negative.equivalent,
               f"residual {negative.residual:.3e}")

    # chirality projectors
    for n_amb in (3, 4):
        split = clifford.chirality_split(clifford.build_gamma(n_amb))
        result.check_value(f"chirality projectors ambient n={n_amb}", split.defect(), 1e-12)

    # Hermitian-metric compatibility of the Clifford action
    worst_vec, worst_skew, worst_two = 0.0, 0.0, 0.0
    for n in (2, 3, 4):
        g = clifford.build_gamma(n)
        dim = g.dim_spinor
        for _ in range(200 // 3 + 1):
            x = rng.normal(size=n)
            y = rng.normal(size=n)
            phi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
            gx = sum(xi * gi for xi, gi in zip(x, g.generators))
            gy = sum(yi * gi for yi, gi in zip(y, g.generators))
            lhs = np.vdot(gy @ phi, gx @ phi).real
            rhs = float(np.dot(x, y)) * np.vdot(phi, phi).real
            worst_vec = max(worst_vec, abs(lhs - rhs) / max(1.0, abs(rhs)))
            worst_skew = max(worst_skew, abs(np.vdot(phi, gx @ phi).real) / max(1.0, np.vdot(phi, phi).real))
            if n >= 2:
                two = g.generators[0] @ g.generators[1]
                psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
                sym = np.vdot(psi, two @ phi) + np.vdot(two @ psi, phi)
                worst_two = max(worst_two, abs(sym))
    result.check_value("vector action is an isometry (random draws)", worst_vec, 1e-12)
    result.check_value("vector action is infinitesimally skew (random draws)", worst_skew, 1e-12)
    result.check_value("two-form action is skew-adjoint (random draws)", worst_two, 1e-10)


# ----------------------------------------------------------------------
# geometry
# ----------------------------------------------------------------------


def geometry_suite(result: SuiteResult, rng: np.random.Generator) -> None:
    circle = make_model("circle", {"radius": 1.0}, 64)
    result.check_value("circle H = 1", float(np.max(np.abs(circle.H_values() - 1.0))), 1e-14)
    result.check_value("circle R = 0", float(np.max(np.abs(circle.R_values()))), 1e-14)

    sphere = make_model("sphere2", {"radius": 1.0}, 8)
    h = sphere.h_values()
    big_h = sphere.H_values()
    result.check_value("sphere H equals trace of h",
                       float(np.max(np.abs(big_h - np.trace(h, axis1=1, axis2=2)))), 1e-12)
    norm_h2 = np.sum(h**2, axis=(1, 2))
    result.check_value("sphere Gauss equation R = H^2 - |h|^2",
                       float(np.max(np.abs(sphere.R_values() - (big_h**2 - norm_h2)))), 1e-12)
    result.check_value("sphere umbilic defect",
                       float(np.max(np.abs(h - 0.5 * big_h[:, None, None] * np.eye(2)))), 1e-10)

    geo = make_model("geodesic_sphere_s3", {"rho": math.pi / 3}, 8)
    result.check_value("geodesic sphere H = 2 cot(rho)",
                       float(np.max(np.abs(geo.H_values() - 2.0 / math.tan(math.pi / 3)))), 1e-12)
    result.check_value("geodesic sphere R = 2/sin^2(rho)",
                       float(np.max(np.abs(geo.R_values() - 2.0 / math.sin(math.pi / 3) ** 2))), 1e-12)
    result.check_value("geodesic sphere umbilic defect",
                       float(np.max(np.abs(geo.h_values() - (1.0 / math.tan(math.pi / 3)) * np.eye(2)))), 1e-10)

    result.check_value("ellipse closed-form curvature at t=0",
                       abs(ellipse_curvature(2.0, 1.0, 0.0) - 2.0), 1e-14)
    result.check_value("ellipse closed-form curvature at t=pi/2",
                       abs(ellipse_curvature(2.0, 1.0, math.pi / 2) - 0.25), 1e-14)

    ellipse = make_model("ellipse", {"a": 2.0, "b": 1.0})
    r_coarse = gauss_formula_residual(ellipse, 128)
    r_fine = gauss_formula_residual(ellipse, 256)
    ratio = r_coarse / r_fine
    result.add("frame-derivative residual decays at 2nd order (ellipse)", ratio >= 3.5,
               f"ratio {ratio:.2f} (coarse {r_coarse:.2e}, fine {r_fine:.2e})")
    result.check_value("frame-derivative residual, circle", gauss_formula_residual(circle, 256), 1e-3)
    result.check_value("frame-derivative residual, sphere", gauss_formula_residual(sphere), 1e-5)
    result.check_value("frame-derivative residual, geodesic sphere", gauss_formula_residual(geo), 1e-5)
    torus = make_model("flat_torus2", {}, 8)
    try:
        gauss_formula_residual(torus)
        result.add("intrinsic torus rejects the embedding residual", False)
    except NotApplicable:
        result.add("intrinsic torus rejects the embedding residual", True)

    # hypothesis classifier consistent with the flat-ambient identity
    for model in (circle, make_model("sphere2", {"radius": 1.0}, 8)):
        op = assemble_hypersurface_dirac(model)
        spec = eigensolve(op, 4)
        lam, phi = spec.pair(spec.closest(float(spec.eigenvalues[-1])))
        q = compute_q(phi)
        keep = q.unmasked()
        h2 = np.sum(model.h_values() ** 2, axis=(1, 2))
        pred = 4.0 * q.norm2 - h2  # equals A - H^2 via R = H^2 - |h|^2
        a_gap = model.R_values() + 4.0 * q.norm2 - model.H_values() ** 2
        result.check_value(f"classifier gap matches flat-ambient identity ({model.kind})",
                           float(np.max(np.abs(pred - a_gap)[keep])), 1e-10)


# ----------------------------------------------------------------------
# operators
# ----------------------------------------------------------------------


def operators_suite(result: SuiteResult, rng: np.random.Generator, mutation: str | None = None) -> None:
    circle = make_model("circle", {"radius": 1.0}, 64)
    d_op = assemble_intrinsic_dirac(circle)
    spec = eigensolve(d_op, 8)
    expected = np.array([-3.5, -2.5, -1.5, -0.5, 0.5, 1.5, 2.5, 3.5])
    result.check_value("circle spectrum is half-integer",
                       float(np.max(np.abs(np.sort(spec.eigenvalues) - expected))), 1e-10)
    sym = float(np.max(np.abs(np.sort(spec.eigenvalues) + np.sort(spec.eigenvalues)[::-1])))
    result.check_value("circle spectrum symmetric about zero", sym, 1e-10)

    dh_op = assemble_hypersurface_dirac(circle, mutation=mutation)
    spec_h = eigensolve(dh_op, 8)
    shifted = np.sort(spec.eigenvalues - 0.5)
    result.check_value("curvature shift of the circle spectrum",
                       float(np.max(np.abs(np.sort(spec_h.eigenvalues) - shifted))), 1e-10)
    asym = float(np.max(np.abs(np.sort(spec_h.eigenvalues) + np.sort(spec_h.eigenvalues)[::-1])))
    result.add("shifted circle spectrum is asymmetric", asym > 0.1, f"asymmetry {asym:.3f}")

    sphere = make_model("sphere2", {"radius": 1.0}, 12)
    d_s = assemble_intrinsic_dirac(sphere)
    spec_s = eigensolve(d_s, 84)
    ok = True
    for k in range(6):
        target = float(k + 1)
        for sign in (+1, -1):
            hits = np.sum(np.abs(spec_s.eigenvalues - sign * target) < 1e-8)
            if hits != 2 * (k + 1):
                ok = False
    result.add("sphere eigenvalue ladder with multiplicities", ok)
    result.check_value("sphere eigenpair residuals", float(np.max(spec_s.residuals)), 1e-9)

    torus = make_model("flat_torus2", {}, 16)
    d_t = assemble_intrinsic_dirac(torus)
    spec_t = eigensolve(d_t, 12)
    # each lattice vector contributes one +|k| and one -|k| eigenvalue
    lattice = sorted(
        math.sqrt(kx * kx + ky * ky)
        for kx in range(-3, 4)
        for ky in range(-3, 4)
        for _ in (0, 1)
    )
    pos = np.sort(np.abs(spec_t.eigenvalues))
    result.check_value("torus plane-wave spectrum",
                       float(np.max(np.abs(pos - np.array(lattice)[: len(pos)]))), 1e-10)

    # Rayleigh consistency on a mixed bag of modes
    worst = 0.0
    for spectrum in (spec, spec_h, spec_t):
        op = spectrum.operator
        for lam, phi in (spectrum.pair(i) for i in range(len(spectrum.eigenvalues))):
            ray = op.inner(op.apply(phi.dof), phi.dof).real / op.inner(phi.dof, phi.dof).real
            worst = max(worst, abs(ray - lam))
    result.check_value("Rayleigh-quotient consistency", worst, 1e-10)

    for model in (circle, sphere, torus):
        result.check_value(f"operator square identity ({_model_tag(model)})",
                           lichnerowicz_residual(model), 1e-8)
    for model in (circle, sphere,
                  make_model("geodesic_sphere_s3", {"rho": math.pi / 4}, 8),
                  make_model("geodesic_sphere_s3", {"rho": math.pi / 3}, 8)):
        if mutation and model.kind == "circle":
            # mutated assembly must break the square identity too
            disc = model.discretization()
            dh = assemble_hypersurface_dirac(model, mutation=mutation).matrix
            a = disc.witten_map()
            w_amb = disc.witten_weights
            gram = a.conj().T @ (w_amb[:, None] * a)
            delta = dh @ dh - gram / disc.dof_weights[:, None]
            cols = disc.low_band_columns(0.25)
            image = delta @ cols
            norms = np.sqrt(np.einsum("jk,j,jk->k", image.conj(), disc.dof_weights, image).real)
            result.check_value("square identity with mutated assembly", float(np.max(norms)), 1e-8)
        else:
            result.check_value(f"ambient square identity ({_model_tag(model)})",
                               witten_identity_residual(model), 1e-8)

    # Dirac-Schroedinger consistency: f = 0 and f = H reductions
    d_back = assemble_dirac_schrodinger(circle, 0.0)
    result.check_value("zero potential reduces to the intrinsic operator",
                       float(np.max(np.abs(d_back.matrix - d_op.matrix))), 1e-14)
    d_fh = assemble_dirac_schrodinger(circle, circle.H_values())
    dh_plain = assemble_hypersurface_dirac(circle)
    result.check_value("curvature potential reduces to the shifted operator",
                       float(np.max(np.abs(d_fh.matrix - dh_plain.matrix))), 1e-14)

    # constant spinors on the torus are parallel
    from .operators import SpinorField, covariant_derivative

    disc_t = torus.discretization()
    const_vals = np.zeros((disc_t.npoints, 2), dtype=complex)
    const_vals[:, 0] = 1.0
    zero_mode = SpinorField(disc_t, disc_t.from_values(const_vals))
    result.check_value("constant section is parallel on the flat torus",
                       float(np.max(np.abs(covariant_derivative(zero_mode)))), 1e-12)


# ----------------------------------------------------------------------
# bounds
# ----------------------------------------------------------------------


def _applicable_theorems(op_label: str) -> list[str]:
    return [tid for tid, spec in THEOREMS.items() if spec.operator == op_label]


def soundness_sweep(
    mutation: str | None = None,
    n_modes: int = 12,
    equality_tol: float = 1e-6,
    soundness_tol: float = 1e-7,
):
    """The release gate: margins and equality equivalence over all models."""
    rows: list[CheckRow] = []
    reports = []
    for model in _shipped_models():
        operators = []
        if model.has_h:
            operators.append(assemble_hypersurface_dirac(model, mutation=mutation))
            operators.append(assemble_intrinsic_dirac(model))
        else:
            operators.append(assemble_intrinsic_dirac(model))
            operators.append((assemble_dirac_schrodinger(model, 1.0), np.full(model.discretization().npoints, 1.0)))
        for entry in operators:
            if isinstance(entry, tuple):
                op, f_values = entry
            else:
                op, f_values = entry, None
            spectrum = eigensolve(op, n_modes)
            for theorem in _applicable_theorems(op.label):
                for i in range(len(spectrum.eigenvalues)):
                    rep = evaluate_bound(theorem, spectrum, i, f_values=f_values, equality_tol=equality_tol)
                    reports.append(rep)
                    tag = f"{_model_tag(model)} {op.label} mode {i} {theorem}"
                    if rep.status in ("violated", "not_applicable"):
                        continue
                    lam_scale = max(1.0, rep.lam_sq)
                    sound = rep.margin >= -soundness_tol * lam_scale
                    rows.append(CheckRow(f"margin {tag}", sound,
                                         f"margin {rep.margin:.3e} status {rep.status}"))
                    if rep.residual is not None:
                        eq_resid = rep.residual < equality_tol
                        rows.append(CheckRow(
                            f"equality equivalence {tag}", eq_resid == rep.equality,
                            f"equality={rep.equality} residual={rep.residual:.3e}"
                            if math.isfinite(rep.residual) else f"equality={rep.equality} residual=inf",
                        ))
                    sign = sign_diagnostics(rep)
                    if sign != "not_applicable":
                        rows.append(CheckRow(f"sign law {tag}", sign == "pass", sign))
    return rows, reports


def bounds_suite(result: SuiteResult, rng: np.random.Generator, mutation: str | None = None) -> None:
    # closed-form equality chain on the circle
    circle = make_model("circle", {"radius": 1.0}, 64)
    dh = assemble_hypersurface_dirac(circle, mutation=mutation)
    spectrum = eigensolve(dh, 10)
    for mu in (1.5, 2.5, 3.5):
        lam_target = mu - 0.5
        try:
            i = spectrum.closest(lam_target, tol=1e-6)
        except ConfigError:
            result.add(f"circle equality chain mu={mu}", False, "expected eigenvalue missing")
            continue
        rep = evaluate_bound("thm1_1", spectrum, i)
        rhs_expected = 0.25 * (2.0 * mu - 1.0) ** 2
        ok = (
            rep.status == "strict"
            and abs(rep.lam_sq - rhs_expected) < 1e-8
            and rep.equality
            and rep.residual < 1e-8
            and sign_diagnostics(rep) == "pass"
        )
        result.add(f"circle equality chain mu={mu}", ok,
                   f"margin {rep.margin:.2e} residual "
                   + (f"{rep.residual:.2e}" if rep.residual is not None and math.isfinite(rep.residual) else "inf"))
        lam, phi = spectrum.pair(i)
        q = compute_q(phi)
        params = pq_thm1(q, lam)
        if params.usable:
            result.check_value(f"circle shift vanishes mu={mu}",
                               float(np.max(np.abs(params.shift))), 1e-8)
        else:
            result.add(f"circle shift vanishes mu={mu}", False, f"parameters {params.status}")

    # negative-branch mode: strict, no equality
    i = spectrum.closest(-2.0)
    rep = evaluate_bound("thm1_1", spectrum, i)
    result.add("circle strict mode lam=-2", rep.status == "strict" and not rep.equality
               and rep.margin > 1.0, f"margin {rep.margin:.3f}")

    # boundary handling on the round sphere
    sphere = make_model("sphere2", {"radius": 1.0}, 12)
    dh_s = assemble_hypersurface_dirac(sphere, mutation=mutation)
    spec_s = eigensolve(dh_s, 12)
    kernel = spec_s.closest(0.0)
    for theorem in ("thm1_1", "zhang4_1"):
        rep = evaluate_bound(theorem, spec_s, kernel)
        ok = rep.status == "boundary" and rep.rhs == 0.0 and abs(rep.lam_sq) < 1e-12 and rep.equality
        result.add(f"sphere boundary handling {theorem}", ok,
                   f"status {rep.status} rhs {rep.rhs} lam^2 {rep.lam_sq:.2e}")

    # curvature-recipe equality off the boundary
    for rho in (math.pi / 4, math.pi / 3):
        geo = make_model("geodesic_sphere_s3", {"rho": rho}, 10)
        dh_g = assemble_hypersurface_dirac(geo, mutation=mutation)
        spec_g = eigensolve(dh_g, 8)
        lam1 = math.tan(rho / 2.0)
        i = spec_g.closest(lam1, tol=1e-6)
        result.check_value(f"geodesic sphere lowest eigenvalue rho={rho:.3f}",
                           abs(spec_g.eigenvalues[i] - lam1), 1e-8)
        rep_z = evaluate_bound("zhang4_1", spec_g, i)
        rep_e = evaluate_bound("thm1_1", spec_g, i)
        result.add(f"curvature bound equality rho={rho:.3f}",
                   rep_z.equality and rep_z.residual < 1e-7,
                   f"margin {rep_z.margin:.2e} residual {rep_z.residual:.2e}")
        result.check_value(f"both right-hand sides agree rho={rho:.3f}",
                           abs(rep_z.rhs - rep_e.rhs), 1e-7)
        result.check_value(f"both equal tan^2(rho/2) rho={rho:.3f}",
                           abs(rep_z.rhs - lam1**2), 1e-7)
        lam, phi = spec_g.pair(i)
        pz = pq_zhang(dh_g.disc, lam)
        result.check_value(f"shift equals lam1/n rho={rho:.3f}",
                           float(np.max(np.abs(pz.shift - (1.0 / math.sin(rho)) / 2.0))), 1e-8)
        comp = improvement_comparison(spec_g, i)
        result.check_value(f"umbilic tensor identity rho={rho:.3f}",
                           comp.killing_identity_residual, 1e-7)

    # Dirac-Schroedinger equalities on the flat torus
    torus = make_model("flat_torus2", {}, 16)
    df = assemble_dirac_schrodinger(torus, 1.0)
    spec_f = eigensolve(df, 24)
    fvals = np.ones(torus.discretization().npoints)
    for mu in (1.0, math.sqrt(2.0), 2.0):
        i = spec_f.closest(mu - 0.5, tol=1e-6)
        rep = evaluate_bound("df_prop2", spec_f, i, f_values=fvals)
        ok = rep.equality and abs(rep.lam_sq - 0.25 * (2 * mu - 1) ** 2) < 1e-8
        result.add(f"potential-shifted equality mu={mu:.4g}", ok, f"margin {rep.margin:.2e}")
        lam, phi = spec_f.pair(i)
        em = em_spinor_residual(phi)
        result.check_value(f"plane-wave field equation mu={mu:.4g}", em.residual, 1e-10)
    # zero-potential reduction: same rhs as the intrinsic energy-momentum bound
    d_t = assemble_intrinsic_dirac(torus)
    spec_t = eigensolve(d_t, 12)
    i = spec_t.closest(1.0)
    rep_em = evaluate_bound("hijazi_em", spec_t, i)
    df0 = assemble_dirac_schrodinger(torus, 0.0)
    spec_f0 = eigensolve(df0, 12)
    rep_f0 = evaluate_bound("df_prop2", spec_f0, spec_f0.closest(1.0),
                            f_values=np.zeros(torus.discretization().npoints))
    result.check_value("zero-potential reduction matches intrinsic bound",
                       abs(rep_em.rhs - rep_f0.rhs), 1e-12)
    result.add("intrinsic bound equality at mu=1",
               rep_em.equality and abs(rep_em.rhs - 1.0) < 1e-10, f"rhs {rep_em.rhs:.6f}")

    rows, _ = soundness_sweep(mutation=mutation)
    bad = [r for r in rows if not r.passed]
    result.add(f"global soundness sweep ({len(rows)} checks)", not bad,
               bad[0].name + ": " + bad[0].detail if bad else "all margins and equivalences hold")


# ----------------------------------------------------------------------
# conformal
# ----------------------------------------------------------------------


def conformal_suite(result: SuiteResult, rng: np.random.Generator) -> None:
    circle = make_model("circle", {"radius": 1.0}, 128)
    u_sin = parse_factor(circle, {"type": "circle_fourier", "terms": [{"k": 1, "amp_sin": 0.2}]})
    result.check_value("covariance of the operator (circle, u = 0.2 sin)",
                       conformal_covariance_residual(circle, u_sin), 1e-8)

    # spectrum depends only on the total rescaled length
    base_spec = eigensolve(assemble_intrinsic_dirac(circle), 6)
    worst = 0.0
    for trial in range(5):
        amps = rng.normal(0.0, 0.15, size=2)
        u = parse_factor(circle, {"type": "circle_fourier",
                                  "terms": [{"k": 1, "amp_cos": amps[0]}, {"k": 2, "amp_sin": amps[1]}]})
        dbar = assemble_conformal_dirac(circle, u)
        spec_bar = eigensolve(dbar, 6)
        length = float(np.sum(circle.weights() * np.exp(u.values)))
        expected = np.array([-2.5, -1.5, -0.5, 0.5, 1.5, 2.5]) * (2 * math.pi / length)
        worst = max(worst, float(np.max(np.abs(np.sort(spec_bar.eigenvalues) - expected))))
    result.check_value("rescaled circle spectrum set by total length (5 draws)", worst, 1e-8)

    torus = make_model("flat_torus2", {}, 24)
    u_t = parse_factor(torus, {"type": "torus_fourier", "terms": [{"kx": 1, "amp_cos": 0.3}]})
    result.check_value("covariance of the operator (torus, u = 0.3 cos x)",
                       conformal_covariance_residual(torus, u_t), 1e-8)
    geo = transform_geometry(torus, u_t)
    oracle = flat_metric_curvature_oracle(torus, u_t)
    result.check_value("transformed curvature vs brute-force oracle (torus)",
                       float(np.max(np.abs(geo.r_bar - oracle))), 1e-6)

    ctorus = make_model("conformal_torus2", {}, 24)
    z = zero_factor(ctorus)
    geo_c = transform_geometry(ctorus, z)
    oracle_c = flat_metric_curvature_oracle(ctorus, z)
    result.check_value("model curvature vs brute-force oracle (conformal torus)",
                       float(np.max(np.abs(geo_c.r_bar - oracle_c))), 1e-6)
    d_c = assemble_intrinsic_dirac(ctorus)
    spec_c = eigensolve(d_c, d_c.disc.ndof)  # full spectrum: symmetry is a global statement
    sym = float(np.max(np.abs(np.sort(spec_c.eigenvalues) + np.sort(spec_c.eigenvalues)[::-1])))
    result.check_value("rescaled torus spectrum symmetric about zero", sym, 1e-8)
    result.check_value("operator square identity with transformed curvature",
                       lichnerowicz_residual(ctorus, band_fraction=0.25), 1e-6)

    # tensor scaling under rescaling
    d_t = assemble_intrinsic_dirac(torus)
    spec_t = eigensolve(d_t, 10)
    i = spec_t.closest(1.0)
    _, phi = spec_t.pair(i)
    result.check_value("tensor scaling law (torus)", q_scaling_residual(torus, u_t, phi), 1e-8)
    dh_circle = assemble_hypersurface_dirac(make_model("circle", {"radius": 1.0}, 64))
    spec_circle = eigensolve(dh_circle, 8)
    _, phi_c = spec_circle.pair(spec_circle.closest(1.0))
    u_c = parse_factor(dh_circle.disc.model, {"type": "circle_fourier", "terms": [{"k": 1, "amp_sin": 0.2}]})
    result.check_value("tensor scaling law (circle)",
                       q_scaling_residual(dh_circle.disc.model, u_c, phi_c), 1e-8)

    # conformal bound reduces bit-for-bit at u = 0
    sphere = make_model("sphere2", {"radius": 1.0}, 10)
    dh_s = assemble_hypersurface_dirac(sphere)
    spec_s = eigensolve(dh_s, 6)
    i = spec_s.closest(1.0)
    rep_plain = evaluate_bound("thm1_1", spec_s, i)
    rep_conf = evaluate_bound("thm1_2", spec_s, i, u=zero_factor(sphere))
    result.add("conformal bound reduces exactly at u = 0",
               rep_conf.rhs == rep_plain.rhs and rep_conf.status == rep_plain.status,
               f"rhs {rep_conf.rhs!r} vs {rep_plain.rhs!r}")

    # homothety invariance of statuses
    c_factor = parse_factor(sphere, {"type": "constant", "value": 0.3})
    rep_const = evaluate_bound("thm1_2", spec_s, i, u=c_factor)
    result.add("homothety preserves the hypothesis status",
               rep_const.status == rep_plain.status,
               f"{rep_const.status} vs {rep_plain.status}")

    # equality-case machinery
    from .conformal import wem_equality_check

    kernel = spec_s.closest(0.0)
    _, killing = spec_s.pair(kernel)
    dens = killing.normalized().density()
    u_kill = factor_from_values(sphere, np.log(dens) / (sphere.n - 1.0))
    wem = wem_equality_check(killing, u_kill)
    result.check_value("equality-case gradient relation (parallel-type mode)", wem.du_residual, 1e-7)
    result.check_value("equality-case field equation (parallel-type mode)", wem.field_residual, 1e-7)
    hi = spec_s.closest(1.0)
    _, nonem = spec_s.pair(hi)
    wem_bad = wem_equality_check(nonem, zero_factor(sphere))
    result.add("negative control: non-parallel mode fails the field equation",
               wem_bad.field_residual > 0.1, f"residual {wem_bad.field_residual:.3f}")

    # optimizer behavior
    opt_sphere = optimize_u(sphere, eigensolve(assemble_hypersurface_dirac(sphere), 4), 0, band=1, budget=60)
    result.add("optimizer keeps u = 0 on the round sphere",
               float(np.max(np.abs(opt_sphere.factor.values))) == 0.0 and opt_sphere.value >= opt_sphere.value_at_zero - 1e-9,
               f"value {opt_sphere.value:.3e} evals {opt_sphere.evaluations}")
    circle_small = make_model("circle", {"radius": 1.0}, 32)
    opt_circle = optimize_u(circle_small, eigensolve(assemble_hypersurface_dirac(circle_small), 4), 0, budget=20)
    result.add("optimizer recognizes the invariant curve case",
               opt_circle.status == "invariant" and not np.any(opt_circle.factor.values), opt_circle.status)
    df_t = assemble_dirac_schrodinger(torus, 1.0)
    spec_df = eigensolve(df_t, 8)
    j = spec_df.closest(math.sqrt(2.0) - 0.5)
    opt_t = optimize_u(torus, spec_df, j, background=1.0, band=1, budget=120)
    result.add("optimizer never loses ground on the torus",
               opt_t.value >= opt_t.value_at_zero - 1e-9,
               f"rhs {opt_t.value_at_zero:.6f} -> {opt_t.value:.6f} ({opt_t.evaluations} evals)")


# ----------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------


def verify_suite(name: str, mutation: str | None = None, seed: int = 0) -> SuiteResult:
    """Run one named suite (or ``all``); returns the row table."""
    if name not in SUITES:
        raise ConfigError(f"unknown suite {name!r}; known: {', '.join(SUITES)}")
    rng = np.random.default_rng(seed)
    result = SuiteResult(name)
    if name in ("algebra", "all"):
        algebra_suite(result, rng)
    if name in ("geometry", "all"):
        geometry_suite(result, rng)
    if name in ("operators", "all"):
        operators_suite(result, rng, mutation=mutation)
    if name in ("bounds", "all"):
        bounds_suite(result, rng, mutation=mutation)
    if name in ("conformal", "all"):
        conformal_suite(result, rng)
    return result
