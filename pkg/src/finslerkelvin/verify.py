"""Residual verification suites for the inversion-map calculus.

Everything here turns a mathematical statement into a table of pointwise
residuals over a deterministic sample plan:

* the first-order norm identities (Euler relation, homogeneity, gradient
  dualities, equivalence bounds, biduality);
* the inversion map being an involution-like diffeomorphism (round trips);
* the constant-determinant property H^(2N) |det DT| = det M of
  quadratic-form norms, and the quartic counterexample where the same
  scalar swings by a factor of two over the unit circle;
* the two transform theorems: for quadratic-form H and the weighted
  pullback u_hat = H^(2-N) u(T), the dual-norm divergence-form operator
  satisfies  -div(H°(grad u_hat) gradH°(grad u_hat)) = (f o T) / H^(N+2);
  and for the plain pullback u* = u(T), the dimension-tied quasilinear
  operator satisfies  -div(H°^(N-1)(grad u*) gradH°(grad u*))
  = (g o T) / H^(2N);
* the harmonicity of H^(2-N) for the dual operator, and the two matrix
  transport identities the theorem proofs pivot on.

Manufactured problems make the theorems checkable: pick a smooth u with an
analytic jet, define the source as minus the operator value of that jet,
and every identity above becomes a computable residual with no unknowns.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .fields import (
    ScalarField,
    constant_field,
    cubic_axis_field,
    gaussian_field,
    linear_field,
    norm_power_field,
    quadratic_field,
)
from .kelvin import (
    KelvinContext,
    det_invariant,
    hat_transform,
    jacobian_matrix,
    kelvin_inverse,
    kelvin_map,
    reflection_determinant,
    star_transform,
)
from .norms import (
    EuclideanNorm,
    NormSpec,
    QuarticNorm,
    RiemannianNorm,
    SpdMatrix,
    dual_norm,
    dual_spec,
    equivalence_constants,
    eval_norm,
)
from .operators import (
    JetRequest,
    anisotropic_laplacian,
    finsler_n_laplacian,
    numeric_jet,
)
from .report import PointResidual, ResidualReport, residual_rows
from .sampling import cube_directions, halton

__all__ = [
    "SamplePlan",
    "ManufacturedProblem",
    "random_spd_matrix",
    "manufacture_semilinear",
    "manufacture_nlaplace",
    "check_theorem_semilinear",
    "check_theorem_nlaplace",
    "check_fundamental_solution",
    "check_proof_identities",
    "run_identity_suite",
    "run_kelvin_suite",
    "run_counterexample_scan",
    "run_semilinear_suite",
    "run_nlaplace_suite",
    "weak_form_crosscheck",
    "QUARTIC_SPREAD_MIN",
]

# Closed-form derivative paths (quadratic-form norms) vs paths that go
# through the Newton dual; the split mirrors the conditioning of the two.
TOL_CLOSED_FORM = 1e-8
TOL_NUMERIC_DUAL = 1e-6
TOL_LEMMA_DET = 1e-8
TOL_REFLECTION_DET = 1e-12
TOL_SPREAD_CONTROL = 1e-8
TOL_SCALE_INVARIANCE = 1e-10
TOL_SEMILINEAR = 1e-5
TOL_NLAPLACE = 1e-4
TOL_FUNDAMENTAL = 1e-6
TOL_PROOF_IDENTITY = 1e-8
TOL_QUADRATURE = 1e-2
MIN_FD_ORDER = 1.8
DEGENERATE_GRADIENT_TOL = 1e-8

# Regression floor for the quartic-norm determinant-invariant spread over a
# 64-direction sweep.  Measured before the build with an independent
# finite-difference Jacobian oracle (scripts/measure_quartic_spread.py):
# the invariant runs from 3/4 on the diagonals to 3/2 on the axes, i.e. a
# relative spread of 1.0; 0.999 leaves room for stencil noise only.
QUARTIC_SPREAD_MIN = 0.999

_HOMOG_SCALES = (-3.5, -1.25, -0.5, 0.75, 2.0, 7.5)


def _is_quadratic_form(spec: NormSpec) -> bool:
    return isinstance(spec, (RiemannianNorm, EuclideanNorm))


def _matrix_of(spec: NormSpec) -> np.ndarray:
    if isinstance(spec, EuclideanNorm):
        return np.eye(spec.dim)
    return spec.matrix.entries


def _pmap(fn, items, threads: int = 1) -> list:
    """Order-preserving map; results do not depend on the thread count."""
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _path_tolerance(spec: NormSpec) -> float:
    dual = dual_spec(spec)
    closed = spec.closed_form_dual and dual.closed_form_dual
    return TOL_CLOSED_FORM if closed else TOL_NUMERIC_DUAL


@dataclass(frozen=True)
class SamplePlan:
    """Deterministic annulus sample: identical plans give identical points.

    The annulus bounds are in units of the norm being sampled.  Points come
    from an unscrambled Halton sequence (radius plus cube direction), so the
    set is reproducible bit for bit across runs, platforms, and thread
    counts; the seed selects a disjoint subsequence.
    """

    annulus: tuple[float, float] = (0.5, 2.0)
    count: int = 100
    seed: int = 0

    def __post_init__(self):
        lo, hi = self.annulus
        if not (0.0 < lo < hi):
            raise ValueError(f"bad annulus {self.annulus}")
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    def points(self, spec: NormSpec) -> np.ndarray:
        lo, hi = self.annulus
        u = halton(self.count, spec.dim + 1, skip=1 + self.seed * self.count)
        radii = lo + (hi - lo) * u[:, 0]
        dirs = 2.0 * u[:, 1:] - 1.0
        h = np.asarray(spec.value(dirs))
        return dirs * (radii / h)[:, None]


def random_spd_matrix(dim: int, seed: int | None = None,
                      rng: np.random.Generator | None = None) -> SpdMatrix:
    """Seed-pinned SPD matrix with eigenvalues in [0.5, 4]."""
    if rng is None:
        rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    eigs = np.exp(rng.uniform(np.log(0.5), np.log(4.0), size=dim))
    return SpdMatrix((q * eigs) @ q.T)


# ---------------------------------------------------------------------------
# manufactured problems


@dataclass(frozen=True)
class ManufacturedProblem:
    """Smooth u with analytic jets and its exactly matching source term."""

    u: ScalarField
    f: ScalarField
    spec: NormSpec
    family: str


def _default_center(dim: int) -> np.ndarray:
    return np.array([0.3, -0.2, 0.15, -0.1][:dim])


def manufacture_semilinear(spec: NormSpec, family: str = "quadratic",
                           **params) -> ManufacturedProblem:
    """Pick u from a fixed family and derive f = -div(H gradH)(grad u).

    For quadratic-form norms the source is assembled in closed form (with
    analytic jets); for other norms it falls back to pointwise evaluation
    of the operator on u's jet.
    """
    dim = spec.dim
    if family == "quadratic":
        a = np.asarray(params.get("matrix", np.eye(dim)), dtype=float)
        b = np.asarray(params.get("linear", np.zeros(dim)), dtype=float)
        c = float(params.get("offset", 0.0))
        u = quadratic_field(a, b, c, name="u-quadratic")
        sym = 0.5 * (a + a.T)
        if _is_quadratic_form(spec):
            m = _matrix_of(spec)
            f = constant_field(dim, -2.0 * float(np.tensordot(m, sym)),
                               name="f-quadratic")
            return ManufacturedProblem(u, f, spec, family)
    elif family == "gaussian-bump":
        center = np.asarray(params.get("center", _default_center(dim)), float)
        width = float(params.get("width", 1.2))
        amplitude = float(params.get("amplitude", 1.0))
        u = gaussian_field(center, width, amplitude, name="u-gaussian")
        if _is_quadratic_form(spec):
            m = _matrix_of(spec)
            w2 = width**2
            # -trace(M D^2 u) = u * (2 tr M / w^2 - 4 (x-c)^T M (x-c) / w^4)
            poly = quadratic_field(
                -4.0 * m / w2**2,
                8.0 * (m @ center) / w2**2,
                2.0 * float(np.trace(m)) / w2
                - 4.0 * float(center @ m @ center) / w2**2,
            )
            f = u * poly
            f.name = "f-gaussian"
            return ManufacturedProblem(u, f, spec, family)
    elif family == "poly3":
        a = np.asarray(params.get("cubic", 1.0 / (1.0 + np.arange(dim))), float)
        b = np.asarray(params.get("matrix", 0.4 * np.eye(dim)), dtype=float)
        cv = np.asarray(params.get("linear", np.zeros(dim)), dtype=float)
        u = cubic_axis_field(a, b, cv, name="u-poly3")
        if _is_quadratic_form(spec):
            m = _matrix_of(spec)
            bsym = 0.5 * (b + b.T)
            f = linear_field(-6.0 * a * np.diag(m),
                             -2.0 * float(np.tensordot(m, bsym)),
                             name="f-poly3")
            return ManufacturedProblem(u, f, spec, family)
    elif family == "affine":
        a = np.asarray(params.get("linear", np.arange(1.0, dim + 1.0)), float)
        u = linear_field(a, float(params.get("offset", 0.0)), name="u-affine")
        f = constant_field(dim, 0.0, name="f-zero")
        return ManufacturedProblem(u, f, spec, family)
    else:
        raise ValueError(f"unknown manufactured family {family!r}")

    def evaluate(pts):
        flat = np.atleast_2d(np.asarray(pts, dtype=float).reshape(-1, dim))
        out = np.array([-anisotropic_laplacian(spec, u.jet(p)) for p in flat])
        return out.reshape(np.asarray(pts).shape[:-1])

    f = ScalarField(dim, evaluate, name=f"f-{family}-pointwise")
    return ManufacturedProblem(u, f, spec, family)


def manufacture_nlaplace(spec: NormSpec, family: str = "quadratic",
                         **params) -> tuple[ScalarField, ScalarField]:
    """u and g = -(quasilinear operator of u) for the dimension-tied case.

    `g` is evaluated pointwise from u's analytic jet; the affine family has
    an exactly zero source.
    """
    dim = spec.dim
    if family == "affine":
        a = np.asarray(params.get("linear", np.arange(1.0, dim + 1.0)), float)
        u = linear_field(a, float(params.get("offset", 0.0)), name="u-affine")
        return u, constant_field(dim, 0.0, name="g-zero")
    if family == "quadratic":
        a = np.asarray(params.get("matrix", 0.5 * np.eye(dim)), dtype=float)
        b = np.asarray(params.get("linear", np.zeros(dim)), dtype=float)
        u = quadratic_field(a, b, float(params.get("offset", 0.0)),
                            name="u-quadratic")
    elif family == "gaussian-bump":
        u = gaussian_field(
            np.asarray(params.get("center", _default_center(dim)), float),
            float(params.get("width", 1.2)),
            float(params.get("amplitude", 1.0)),
            name="u-gaussian",
        )
    else:
        raise ValueError(f"unknown manufactured family {family!r}")

    def evaluate(pts):
        flat = np.atleast_2d(np.asarray(pts, dtype=float).reshape(-1, dim))
        out = np.array(
            [-finsler_n_laplacian(spec, u.jet(p), dim).value for p in flat]
        )
        return out.reshape(np.asarray(pts).shape[:-1])

    return u, ScalarField(dim, evaluate, name=f"g-{family}-pointwise")


# ---------------------------------------------------------------------------
# theorem residual checks


def _require_quadratic_form(spec: NormSpec, what: str) -> None:
    if not _is_quadratic_form(spec):
        raise ValueError(f"{what} assumes a quadratic-form (riemannian or "
                         f"euclidean) norm, got {spec.canonical()}")


def _fit_order(steps, residuals) -> float:
    logs = np.log(np.asarray(steps, dtype=float))
    logr = np.log(np.maximum(np.asarray(residuals, dtype=float), 1e-300))
    return float(np.polyfit(logs, logr, 1)[0])


def _convergence_study(field: ScalarField, lhs_of_jet, rhs_values, points,
                       steps=(0.08, 0.04, 0.02)) -> dict:
    """Residual vs plain central-difference step, with a fitted order.

    Uses refinement=1 so the truncation term is visible (the Richardson
    default would sit on the extrapolation floor immediately).
    """
    maxres = []
    for h in steps:
        worst = 0.0
        for y, rhs in zip(points, rhs_values):
            jet = numeric_jet(JetRequest(field, y, step=h, refinement=1))
            worst = max(worst, abs(lhs_of_jet(jet, y) - rhs))
        maxres.append(worst)
    return {
        "steps": list(steps),
        "max_residuals": maxres,
        "order": _fit_order(steps, maxres),
    }


def check_theorem_semilinear(ctx: KelvinContext, prob: ManufacturedProblem,
                             plan: SamplePlan, jet_mode: str = "auto",
                             convergence: bool = False, threads: int = 1,
                             tolerance: float = TOL_SEMILINEAR) -> ResidualReport:
    """Residuals of the weighted-pullback transform theorem.

    At each plan point y, the left side applies the dual-norm divergence
    operator to the jet of u_hat = H^(2-N) u(T) and the right side evaluates
    (f o T)(y) / H(y)^(N+2).  Jets are analytic chain-rule jets unless
    `jet_mode="numeric"` forces the finite-difference builder.
    """
    _require_quadratic_form(ctx.spec, "the semilinear transform theorem")
    uhat = hat_transform(ctx, prob.u)
    pts = plan.points(ctx.spec)
    n = ctx.dim
    h = np.asarray(ctx.spec.value(pts))
    rhs_vals = np.asarray(prob.f(kelvin_map(ctx, pts))) / h ** (n + 2)

    def lhs_at(y):
        if jet_mode == "numeric":
            jet = numeric_jet(JetRequest(uhat, y))
        else:
            jet = uhat.jet(y)
        return -anisotropic_laplacian(ctx.dual, jet)

    lhs_vals = _pmap(lhs_at, list(pts), threads)
    rows = residual_rows(pts, lhs_vals, rhs_vals)
    report = ResidualReport(suite="theorem-semilinear", tolerance=tolerance,
                            rows=rows,
                            details={"family": prob.family,
                                     "jet_mode": jet_mode})
    if convergence:
        sel = np.argsort([-float(p @ p) for p in pts])[:5]
        report.convergence = _convergence_study(
            uhat,
            lambda jet, y: -anisotropic_laplacian(ctx.dual, jet),
            rhs_vals[sel],
            pts[sel],
        )
    report.passed = report.max_rel_residual() <= tolerance and (
        report.convergence is None
        or report.convergence["order"] >= MIN_FD_ORDER
    )
    return report


def check_theorem_nlaplace(ctx: KelvinContext, u: ScalarField, g: ScalarField,
                           plan: SamplePlan, jet_mode: str = "auto",
                           threads: int = 1,
                           tolerance: float = TOL_NLAPLACE) -> ResidualReport:
    """Residuals of the plain-pullback quasilinear transform theorem.

    Points whose pullback gradient is numerically degenerate (below
    ``DEGENERATE_GRADIENT_TOL``) are flagged and excluded from aggregates;
    the quasilinear coefficient loses meaning there.
    """
    _require_quadratic_form(ctx.spec, "the quasilinear transform theorem")
    n = ctx.dim
    if n < 3:
        raise ValueError("the quasilinear transform theorem needs dimension >= 3")
    ustar = star_transform(ctx, u)
    pts = plan.points(ctx.spec)
    h = np.asarray(ctx.spec.value(pts))
    rhs_vals = np.asarray(g(kelvin_map(ctx, pts))) / h ** (2 * n)

    def lhs_at(y):
        if jet_mode == "numeric":
            jet = numeric_jet(JetRequest(ustar, y))
        else:
            jet = ustar.jet(y)
        gnorm = float(np.sqrt(jet.gradient @ jet.gradient))
        value = finsler_n_laplacian(ctx.dual, jet, n)
        flag = value.degenerate or gnorm < DEGENERATE_GRADIENT_TOL
        return -value.value, flag

    results = _pmap(lhs_at, list(pts), threads)
    rows = residual_rows(pts, [v for v, _ in results], rhs_vals,
                         flags=[fl for _, fl in results])
    report = ResidualReport(suite="theorem-nlaplace", tolerance=tolerance,
                            rows=rows, details={"jet_mode": jet_mode})
    report.passed = report.max_rel_residual() <= tolerance
    return report


def check_fundamental_solution(spec: NormSpec, plan: SamplePlan,
                               tolerance: float = TOL_FUNDAMENTAL) -> ResidualReport:
    """H^(2-N) is annihilated by the dual-norm divergence operator."""
    _require_quadratic_form(spec, "the fundamental-solution check")
    dual = dual_spec(spec)
    w = norm_power_field(spec, 2.0 - spec.dim)
    pts = plan.points(spec)
    lhs = [anisotropic_laplacian(dual, w.jet(p)) for p in pts]
    rows = residual_rows(pts, lhs, np.zeros(len(pts)))
    report = ResidualReport(suite="fundamental-solution", tolerance=tolerance,
                            rows=rows)
    report.passed = report.max_rel_residual() <= tolerance
    return report


def check_proof_identities(spec: NormSpec, plan: SamplePlan,
                           tolerance: float = TOL_PROOF_IDENTITY) -> ResidualReport:
    """The two matrix transport identities behind the transform theorems.

    For quadratic-form norms and every y, xi, p (p standing in for a field
    gradient at T(y)):

      (a)  H°(DT(y) xi) = H(xi) / H(y)^2
      (b)  H(p) DT_dual(T(y)) gradH(p)
              = H(y)^4 H°(q) gradH°(q),  q = DT(y) p.
    """
    _require_quadratic_form(spec, "the proof transport identities")
    ctx = KelvinContext(spec)
    dual_ctx = KelvinContext(ctx.dual)
    pts = plan.points(spec)
    count, dim = pts.shape
    xis = cube_directions(count, dim, skip=41) * 1.7
    ps = cube_directions(count, dim, skip=57) * 2.3

    rows = []
    worst_a = worst_b = 0.0
    for y, xi, p in zip(pts, xis, ps):
        hy = eval_norm(spec, y)
        dt = jacobian_matrix(ctx, y)
        lhs_a = dual_norm(spec, dt @ xi) * hy**2
        rhs_a = eval_norm(spec, xi)
        rel_a = abs(lhs_a - rhs_a) / max(abs(lhs_a), abs(rhs_a), 1.0)
        worst_a = max(worst_a, rel_a)

        t = kelvin_map(ctx, y)
        jp = spec.jet(p)
        left = jp.value * (jacobian_matrix(dual_ctx, t) @ jp.gradient)
        q = dt @ p
        jq = ctx.dual.jet(q)
        right = hy**4 * jq.value * jq.gradient
        k = int(np.argmax(np.abs(left - right)))
        rel_b = abs(left[k] - right[k]) / max(
            float(np.max(np.abs(left))), float(np.max(np.abs(right))), 1.0
        )
        worst_b = max(worst_b, rel_b)
        if rel_b >= rel_a:
            rows.append(PointResidual(tuple(y), float(left[k]), float(right[k]),
                                      float(abs(left[k] - right[k])), rel_b))
        else:
            rows.append(PointResidual(tuple(y), float(lhs_a), float(rhs_a),
                                      float(abs(lhs_a - rhs_a)), rel_a))
    report = ResidualReport(
        suite="proof-identities", tolerance=tolerance, rows=rows,
        details={"norm_transport": worst_a, "gradient_transport": worst_b},
    )
    report.passed = max(worst_a, worst_b) <= tolerance
    return report


# ---------------------------------------------------------------------------
# identity suite


def run_identity_suite(spec: NormSpec, plan: SamplePlan,
                       tolerance: float | None = None) -> ResidualReport:
    """Worst-case residuals of the first-order norm identities.

    Per point: Euler relation, absolute homogeneity, gradient
    zero-homogeneity, the unit dualities H(gradH°) = H°(gradH) = 1, the
    inversion dualities H(x) gradH°(gradH(x)) = x (and its mirror), the
    Euclidean equivalence bounds, and biduality.  The report keeps the worst
    identity per point as its row and the per-identity worst cases in
    `details`.
    """
    tol = _path_tolerance(spec) if tolerance is None else tolerance
    dual = dual_spec(spec)
    c1, c2 = equivalence_constants(spec)
    pts = plan.points(spec)
    worst: dict[str, float] = {}
    rows = []
    for idx, x in enumerate(pts):
        j = spec.jet(x)
        jd = dual.jet(x)
        h = j.value
        entries = []

        entries.append(("euler", float(j.gradient @ x), h))

        s = _HOMOG_SCALES[idx % len(_HOMOG_SCALES)]
        entries.append(("homogeneity", eval_norm(spec, s * x), abs(s) * h))

        t = _HOMOG_SCALES[(idx + 3) % len(_HOMOG_SCALES)]
        gt = spec.jet(t * x).gradient
        expected = math.copysign(1.0, t) * j.gradient
        k = int(np.argmax(np.abs(gt - expected)))
        entries.append(("gradient_zero_homogeneity", float(gt[k]),
                        float(expected[k])))

        entries.append(("unit_duality", eval_norm(spec, jd.gradient), 1.0))
        entries.append(("unit_duality", dual_norm(spec, j.gradient), 1.0))

        v1 = h * dual.jet(j.gradient).gradient
        k = int(np.argmax(np.abs(v1 - x)))
        entries.append(("inverse_duality", float(v1[k]), float(x[k])))
        v2 = jd.value * spec.jet(jd.gradient).gradient
        k = int(np.argmax(np.abs(v2 - x)))
        entries.append(("inverse_duality", float(v2[k]), float(x[k])))

        ratio = h / float(np.sqrt(x @ x))
        entries.append(("equivalence", ratio, float(np.clip(ratio, c1, c2))))

        entries.append(("bidual", dual_norm(dual, x), h))

        best = None
        for name, lhs, rhs in entries:
            rel = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1.0)
            worst[name] = max(worst.get(name, 0.0), rel)
            if best is None or rel > best[0]:
                best = (rel, lhs, rhs)
        rows.append(PointResidual(tuple(x), float(best[1]), float(best[2]),
                                  float(abs(best[1] - best[2])), float(best[0])))
    report = ResidualReport(suite="identities", tolerance=tol, rows=rows,
                            details=dict(sorted(worst.items())))
    report.details["equivalence_constants"] = [c1, c2]
    report.passed = max(worst.values()) <= tol
    return report


# ---------------------------------------------------------------------------
# inversion-map suite


def run_kelvin_suite(spec: NormSpec, plan: SamplePlan,
                     threads: int = 1) -> ResidualReport:
    """Round trips, determinant lemma, and transport identities in one go."""
    tol = _path_tolerance(spec)
    ctx = KelvinContext(spec)
    pts = plan.points(spec)
    details: dict[str, float] = {}
    gates: list[bool] = []

    fwd = kelvin_inverse(ctx, kelvin_map(ctx, pts))
    bwd = kelvin_map(ctx, kelvin_inverse(ctx, pts))
    scale = np.maximum(np.max(np.abs(pts), axis=1), 1.0)
    e_fwd = np.max(np.abs(fwd - pts), axis=1) / scale
    e_bwd = np.max(np.abs(bwd - pts), axis=1) / scale
    rows = []
    for y, err in zip(pts, np.maximum(e_fwd, e_bwd)):
        rows.append(PointResidual(tuple(y), 0.0, 0.0, float(err), float(err)))
    details["roundtrip"] = float(np.max(np.maximum(e_fwd, e_bwd)))
    gates.append(details["roundtrip"] <= tol)

    refl = max(abs(abs(reflection_determinant(y)) - 1.0) for y in pts)
    details["reflection_determinant"] = refl
    gates.append(refl <= TOL_REFLECTION_DET)

    # pullback involution: transforming twice with the dual context
    # restores the original field values
    probe = quadratic_field(0.5 * np.eye(ctx.dim),
                            0.1 * np.arange(1.0, ctx.dim + 1.0), 1.0)
    dual_ctx = KelvinContext(ctx.dual)
    double = hat_transform(dual_ctx, hat_transform(ctx, probe))
    e_inv = np.max(np.abs(np.asarray(double(pts)) - np.asarray(probe(pts)))
                   / np.maximum(np.abs(np.asarray(probe(pts))), 1.0))
    details["pullback_involution"] = float(e_inv)
    gates.append(e_inv <= tol)

    if _is_quadratic_form(spec):
        detm = (1.0 if isinstance(spec, EuclideanNorm)
                else spec.matrix.det)
        inv = np.array([det_invariant(ctx, y) for y in pts])
        details["det_invariant"] = float(np.max(np.abs(inv - detm) / detm))
        gates.append(details["det_invariant"] <= TOL_LEMMA_DET)

        jac_scale = 0.0
        for y in pts[:20]:
            d1 = jacobian_matrix(ctx, y)
            d2 = jacobian_matrix(ctx, 2.0 * y)
            jac_scale = max(jac_scale, float(np.max(np.abs(d2 - d1 / 4.0))
                                             / np.max(np.abs(d1))))
        details["jacobian_scaling"] = jac_scale
        gates.append(jac_scale <= tol)

        proof = check_proof_identities(spec, plan)
        details["norm_transport"] = proof.details["norm_transport"]
        details["gradient_transport"] = proof.details["gradient_transport"]
        gates.append(proof.passed)

        if ctx.dim >= 3:
            fund = check_fundamental_solution(spec, plan)
            details["fundamental_solution"] = fund.max_rel_residual()
            gates.append(fund.passed)

    report = ResidualReport(suite="kelvin", tolerance=tol, rows=rows,
                            details=details)
    report.passed = all(gates)
    return report


# ---------------------------------------------------------------------------
# counterexample scan


def run_counterexample_scan(spec: NormSpec | None = None,
                            directions: int = 64) -> ResidualReport:
    """Sweep of the determinant invariant H^(2N) |det DT| over directions.

    For the quartic norm the invariant must swing by at least the frozen
    regression spread ``QUARTIC_SPREAD_MIN`` while a seed-pinned Riemannian
    control stays constant to ``TOL_SPREAD_CONTROL``.  Running the scan on a
    quadratic-form norm fails by design: constancy is the whole point there.
    """
    if spec is None:
        spec = QuarticNorm()
    ctx = KelvinContext(spec)
    if spec.dim == 2:
        theta = 2.0 * np.pi * np.arange(directions) / directions
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    else:
        dirs = cube_directions(directions, spec.dim, skip=7)
        dirs /= np.sqrt(np.sum(dirs * dirs, axis=-1))[:, None]
    vals = np.array([det_invariant(ctx, d) for d in dirs])
    spread = float((vals.max() - vals.min()) / vals.min())
    scale_defect = max(
        abs(det_invariant(ctx, 2.0 * d) - v) / v for d, v in zip(dirs, vals)
    )
    mean = float(vals.mean())
    rows = residual_rows(dirs, vals, np.full(directions, mean))
    details = {
        "invariant_min": float(vals.min()),
        "invariant_max": float(vals.max()),
        "spread": spread,
        "spread_floor": QUARTIC_SPREAD_MIN,
        "scale_invariance_defect": float(scale_defect),
    }
    gates = [spread >= QUARTIC_SPREAD_MIN,
             scale_defect <= TOL_SCALE_INVARIANCE]
    if isinstance(spec, QuarticNorm):
        control = RiemannianNorm(random_spd_matrix(2, seed=0))
        cctx = KelvinContext(control)
        cvals = np.array([det_invariant(cctx, d) for d in dirs])
        cspread = float((cvals.max() - cvals.min()) / cvals.min())
        details["control_spread"] = cspread
        gates.append(cspread <= TOL_SPREAD_CONTROL)
    elif spread < QUARTIC_SPREAD_MIN:
        details["message"] = "spread below threshold: norm is Riemannian"
    report = ResidualReport(suite="counterexample",
                            tolerance=QUARTIC_SPREAD_MIN, rows=rows,
                            details=details)
    report.passed = all(gates)
    return report


# ---------------------------------------------------------------------------
# brute-force weak-form cross-check


def _bump(points: np.ndarray, center: np.ndarray, radius: float):
    """C^2 compactly supported bump (1 - |y-c|^2/r^2)^3 and its gradient."""
    d = points - center
    s = np.sum(d * d, axis=-1) / radius**2
    inside = s < 1.0
    base = np.where(inside, 1.0 - s, 0.0)
    psi = base**3
    dpsi = (-6.0 / radius**2) * base[:, None] ** 2 * d
    dpsi[~inside] = 0.0
    return psi, dpsi


def weak_form_crosscheck(ctx: KelvinContext, prob: ManufacturedProblem,
                         boxes: int = 5, grid: int | None = None,
                         radius: float = 0.22,
                         fd_step: float = 1e-5) -> dict:
    """Midpoint-quadrature check of the transformed weak identity.

    Integrates  H^(4-2N) H°(p) <gradH°(p), grad psi>  against
    H^(-2N) (f o T) psi  over small boxes, with p = grad(u o T) obtained by
    plain finite differences of composed *values*.  Nothing here touches the
    chain-rule jets, so it is an independent route to the same theorem;
    accuracy is quadrature-limited.
    """
    _require_quadratic_form(ctx.spec, "the weak-form cross-check")
    n = ctx.dim
    if grid is None:
        grid = 24 if n <= 3 else 10
    centers = cube_directions(boxes, n, skip=29)
    centers = centers * (1.3 / np.asarray(ctx.spec.value(centers)))[:, None]

    offsets = (np.arange(grid) + 0.5) / grid * 2.0 * radius - radius
    mesh = np.stack(np.meshgrid(*([offsets] * n), indexing="ij"), axis=-1)
    mesh = mesh.reshape(-1, n)
    cell = (2.0 * radius / grid) ** n

    def ustar(points):
        return np.asarray(prob.u(kelvin_map(ctx, points)))

    errors = []
    for c in centers:
        pts = mesh + c
        psi, dpsi = _bump(pts, c, radius)
        p = np.empty_like(pts)
        for i in range(n):
            e = np.zeros(n)
            e[i] = fd_step
            p[:, i] = (ustar(pts + e) - ustar(pts - e)) / (2.0 * fd_step)
        hy = np.asarray(ctx.spec.value(pts))
        hdual = np.asarray(ctx.dual.value(p))
        gdual = ctx.dual.gradient(p)
        lhs = float(np.sum(hy ** (4 - 2 * n) * hdual
                           * np.sum(gdual * dpsi, axis=-1)) * cell)
        rhs = float(np.sum(hy ** (-2 * n)
                           * np.asarray(prob.f(kelvin_map(ctx, pts)))
                           * psi) * cell)
        errors.append(abs(lhs - rhs) / max(abs(lhs), abs(rhs)))
    return {
        "box_errors": errors,
        "worst": max(errors),
        "boxes": boxes,
        "grid": grid,
    }


# ---------------------------------------------------------------------------
# CLI-facing composite suites


def run_semilinear_suite(spec: NormSpec, plan: SamplePlan,
                         threads: int = 1) -> ResidualReport:
    """Semilinear transform theorem: analytic residuals on two manufactured
    families, a numeric-jet convergence fit, the weak-form quadrature
    cross-check, and the transformed-source round trip."""
    _require_quadratic_form(spec, "the semilinear suite")
    ctx = KelvinContext(spec)
    rows = []
    details: dict = {}
    gates = []
    convergence = None
    for family in ("quadratic", "gaussian-bump"):
        prob = manufacture_semilinear(spec, family)
        rep = check_theorem_semilinear(ctx, prob, plan, threads=threads,
                                       convergence=(family == "quadratic"))
        rows.extend(rep.rows)
        details[f"max_rel[{family}]"] = rep.max_rel_residual()
        gates.append(rep.max_rel_residual() <= TOL_SEMILINEAR)
        if rep.convergence is not None:
            convergence = rep.convergence
            gates.append(rep.convergence["order"] >= MIN_FD_ORDER)

    prob = manufacture_semilinear(spec, "gaussian-bump")
    quad = weak_form_crosscheck(ctx, prob)
    details["weak_form_worst"] = quad["worst"]
    gates.append(quad["worst"] <= TOL_QUADRATURE)

    # transformed source pulled back through the dual map must restore f
    n = ctx.dim

    def fhat(points):
        pts = np.asarray(points, dtype=float)
        return (np.asarray(prob.f(kelvin_map(ctx, pts)))
                / np.asarray(ctx.spec.value(pts)) ** (n + 2))

    dual_ctx = KelvinContext(ctx.dual)
    pts = plan.points(spec)
    back = (np.asarray(fhat(kelvin_map(dual_ctx, pts)))
            / np.asarray(ctx.dual.value(pts)) ** (n + 2))
    f_vals = np.asarray(prob.f(pts))
    details["source_roundtrip"] = float(
        np.max(np.abs(back - f_vals)
               / np.maximum(np.maximum(np.abs(back), np.abs(f_vals)), 1.0))
    )
    gates.append(details["source_roundtrip"] <= TOL_SEMILINEAR)

    report = ResidualReport(suite="semilinear", tolerance=TOL_SEMILINEAR,
                            rows=rows, details=details,
                            convergence=convergence)
    report.passed = all(gates)
    return report


def run_nlaplace_suite(spec: NormSpec, plan: SamplePlan,
                       threads: int = 1) -> ResidualReport:
    """Quasilinear transform theorem: exact zero case plus quadratic case
    with both analytic and numeric jets."""
    _require_quadratic_form(spec, "the quasilinear suite")
    if spec.dim < 3:
        raise ValueError("the quasilinear suite needs dimension >= 3")
    ctx = KelvinContext(spec)
    rows = []
    details: dict = {}
    gates = []

    u0, g0 = manufacture_nlaplace(spec, "affine")
    rep0 = check_theorem_nlaplace(ctx, u0, g0, plan, threads=threads,
                                  tolerance=TOL_SEMILINEAR)
    rows.extend(rep0.rows)
    details["max_rel[affine]"] = rep0.max_rel_residual()
    gates.append(rep0.passed)

    u1, g1 = manufacture_nlaplace(spec, "quadratic")
    for mode in ("auto", "numeric"):
        rep = check_theorem_nlaplace(ctx, u1, g1, plan, jet_mode=mode,
                                     threads=threads)
        details[f"max_rel[quadratic,{mode}]"] = rep.max_rel_residual()
        details[f"flagged[quadratic,{mode}]"] = rep.flagged_count()
        gates.append(rep.passed)
        if mode == "numeric":
            rows.extend(rep.rows)

    report = ResidualReport(suite="nlaplace", tolerance=TOL_NLAPLACE,
                            rows=rows, details=details)
    report.passed = all(gates)
    return report
