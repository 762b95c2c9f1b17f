"""The anisotropic inversion map T(x) = gradH(x)/H(x) and its calculus.

For the Euclidean norm T is the classical inversion x / |x|^2.  For any
uniformly elliptic norm T is a diffeomorphism of R^N minus the origin onto
itself whose inverse is the inversion map of the dual norm.  Its Jacobian
is

    DT = (H D^2 H - gradH (x) gradH) / H^2,

which for a quadratic-form norm H = sqrt(<Mx, x>) collapses to

    DT(x) = (M - 2 M x (x) M x / H^2) / H^2.

For quadratic-form norms the scalar H(x)^(2N) |det DT(x)| is the constant
det M at every point; that constancy is exactly what makes the weighted
pullbacks below intertwine the divergence-form operators of H and its dual
(see `verify`).  For the quartic norm the same scalar varies with
direction, which `verify.run_counterexample_scan` demonstrates.

Transforms of scalar fields:

* ``hat_transform``:  u  ->  H(y)^(2-N) * u(T(y))   (weighted pullback)
* ``star_transform``: u  ->  u(T(y))                (plain pullback)

Both return fields with analytic chain-rule jets when the context norm is
quadratic-form and `u` has a jet; otherwise the transformed field falls
back to finite-difference jets.
"""

from __future__ import annotations

import numpy as np

from .fields import ScalarField, norm_power_field
from .norms import (
    EuclideanNorm,
    Jet2,
    NormSpec,
    RiemannianNorm,
    dual_spec,
    eval_norm,
)
from .operators import JetRequest, numeric_jet
from .sampling import cube_directions

__all__ = [
    "KelvinContext",
    "kelvin_map",
    "kelvin_inverse",
    "jacobian_matrix",
    "jacobian_det",
    "det_invariant",
    "map_second_derivative",
    "reflection_determinant",
    "hat_transform",
    "star_transform",
]

_SELF_CHECK_POINTS = 8


def _is_quadratic_form(spec: NormSpec) -> bool:
    return isinstance(spec, (RiemannianNorm, EuclideanNorm))


class KelvinContext:
    """A norm, its dual, and the dimension, validated together.

    Construction evaluates the gradient dualities H(gradH°(x)) = 1 =
    H°(gradH(x)) on a small fixed sample and refuses to build a context
    whose dual is inconsistent with the primal norm.  Contexts are immutable
    and safe to share.
    """

    def __init__(self, spec: NormSpec):
        self.spec = spec
        self.dual = dual_spec(spec)
        self.dim = spec.dim
        tol = 1e-8 if (spec.closed_form_dual and self.dual.closed_form_dual) else 1e-6
        worst = 0.0
        for x in cube_directions(_SELF_CHECK_POINTS, self.dim, skip=11) * 1.3:
            gp = self.spec.jet(x).gradient
            gd = self.dual.jet(x).gradient
            worst = max(
                worst,
                abs(float(self.dual.value(gp)) - 1.0),
                abs(float(self.spec.value(gd)) - 1.0),
            )
        if worst > tol:
            raise RuntimeError(
                f"dual norm inconsistent with primal (duality defect {worst:.3e})"
            )

    def __repr__(self):
        return f"<KelvinContext {self.spec.canonical()} dim={self.dim}>"


def kelvin_map(ctx: KelvinContext, x):
    """T(x) = gradH(x) / H(x); vectorised over leading axes."""
    pts = np.asarray(x, dtype=float)
    h = np.asarray(ctx.spec.value(pts))
    if np.any(h == 0.0):
        raise ValueError("inversion map is undefined at the origin")
    out = ctx.spec.gradient(pts) / h[..., None]
    return out


def kelvin_inverse(ctx: KelvinContext, y):
    """Inverse of the inversion map: the dual norm's own inversion map."""
    pts = np.asarray(y, dtype=float)
    h = np.asarray(ctx.dual.value(pts))
    if np.any(h == 0.0):
        raise ValueError("inversion map is undefined at the origin")
    return ctx.dual.gradient(pts) / h[..., None]


def jacobian_matrix(ctx: KelvinContext, x) -> np.ndarray:
    """DT(x), closed form for quadratic-form norms, jet-based otherwise."""
    pt = np.asarray(x, dtype=float)
    if pt.shape != (ctx.dim,):
        raise ValueError("jacobian_matrix expects a single point")
    if isinstance(ctx.spec, (RiemannianNorm, EuclideanNorm)):
        m = (np.eye(ctx.dim) if isinstance(ctx.spec, EuclideanNorm)
             else ctx.spec.matrix.entries)
        mx = m @ pt
        h2 = float(pt @ mx)
        if h2 == 0.0:
            raise ValueError("inversion map is undefined at the origin")
        return (m - 2.0 * np.outer(mx, mx) / h2) / h2
    j = ctx.spec.jet(pt)
    return (j.value * j.hessian - np.outer(j.gradient, j.gradient)) / j.value**2


def jacobian_det(ctx: KelvinContext, x, signed: bool = False) -> float:
    """|det DT(x)| (or the signed determinant for diagnostics).

    The map is orientation-reversing along radial directions, so the signed
    determinant alternates sign with dimension; the absolute value is what
    enters every change-of-variables formula here.
    """
    d = float(np.linalg.det(jacobian_matrix(ctx, x)))
    return d if signed else abs(d)


def det_invariant(ctx: KelvinContext, x) -> float:
    """H(x)^(2N) * |det DT(x)|.

    Equal to det M at every point for quadratic-form norms; direction-
    dependent in general (the quartic norm is the stock counterexample).
    """
    h = eval_norm(ctx.spec, x)
    if h == 0.0:
        raise ValueError("inversion map is undefined at the origin")
    return h ** (2 * ctx.dim) * jacobian_det(ctx, x)


def reflection_determinant(y) -> float:
    """Signed determinant of I - 2 yhat (x) yhat.

    The matrix is the reflection across the hyperplane orthogonal to y, so
    the determinant is exactly -1; its absolute value 1 is the scalar fact
    behind the constant-determinant property of quadratic-form norms.
    """
    v = np.asarray(y, dtype=float)
    n2 = float(v @ v)
    if n2 == 0.0:
        raise ValueError("direction must be nonzero")
    return float(np.linalg.det(np.eye(v.shape[0]) - 2.0 * np.outer(v, v) / n2))


def map_second_derivative(ctx: KelvinContext, x) -> np.ndarray:
    """Hessians of the components of T as a (dim, dim, dim) tensor.

    Closed form for quadratic-form norms: with s = 1/H^2,

        d_i d_j T_k = -2 s^2 (M_kj (Mx)_i + M_ki (Mx)_j + M_ij (Mx)_k)
                      + 8 s^3 (Mx)_k (Mx)_i (Mx)_j.

    Other norms have no closed form here; use numeric jets instead.
    """
    if not _is_quadratic_form(ctx.spec):
        raise ValueError(
            "closed-form second derivatives exist only for quadratic-form norms"
        )
    pt = np.asarray(x, dtype=float)
    m = (np.eye(ctx.dim) if isinstance(ctx.spec, EuclideanNorm)
         else ctx.spec.matrix.entries)
    mx = m @ pt
    h2 = float(pt @ mx)
    if h2 == 0.0:
        raise ValueError("inversion map is undefined at the origin")
    s = 1.0 / h2
    t1 = np.einsum("kj,i->kij", m, mx)
    t2 = np.einsum("ki,j->kij", m, mx)
    t3 = np.einsum("ij,k->kij", m, mx)
    t4 = np.einsum("k,i,j->kij", mx, mx, mx)
    return -2.0 * s**2 * (t1 + t2 + t3) + 8.0 * s**3 * t4


def _pullback_jet(ctx: KelvinContext, u: ScalarField, y: np.ndarray):
    """Chain-rule jet of u(T(y)) for quadratic-form contexts."""
    t = kelvin_map(ctx, y)
    dt = jacobian_matrix(ctx, y)
    d2t = map_second_derivative(ctx, y)
    uj = u.jet(t)
    grad = dt.T @ uj.gradient
    hess = dt.T @ uj.hessian @ dt + np.einsum("k,kij->ij", uj.gradient, d2t)
    return uj.value, grad, 0.5 * (hess + hess.T)


def star_transform(ctx: KelvinContext, u: ScalarField) -> ScalarField:
    """Plain pullback y -> u(T(y))."""
    if u.dim != ctx.dim:
        raise ValueError("field dimension does not match the context")

    def evaluate(pts):
        return u(kelvin_map(ctx, pts))

    field = ScalarField(ctx.dim, evaluate, name=f"star({u.name})",
                        smoothness="C^2 off origin")
    if u.has_jet and _is_quadratic_form(ctx.spec):
        def jet(y):
            value, grad, hess = _pullback_jet(ctx, u, y)
            return Jet2(value, grad, hess)
        field._jet = jet
    else:
        field._jet = _numeric_jet_contract(field)
    return field


def hat_transform(ctx: KelvinContext, u: ScalarField) -> ScalarField:
    """Weighted pullback y -> H(y)^(2-N) u(T(y)).

    In the plane the weight is 1 and hat and star coincide.  The jet is the
    exact product rule applied to the weight's norm-power jet and the
    pullback's chain-rule jet whenever both are analytic.
    """
    if u.dim != ctx.dim:
        raise ValueError("field dimension does not match the context")
    weight = norm_power_field(ctx.spec, 2.0 - ctx.dim)
    pulled = star_transform(ctx, u)
    if u.has_jet and _is_quadratic_form(ctx.spec):
        out = weight * pulled
        out.name = f"hat({u.name})"
        return out

    def evaluate(pts):
        pts = np.asarray(pts, dtype=float)
        return np.asarray(ctx.spec.value(pts)) ** (2.0 - ctx.dim) * u(
            kelvin_map(ctx, pts)
        )

    field = ScalarField(ctx.dim, evaluate, name=f"hat({u.name})",
                        smoothness="C^2 off origin")
    field._jet = _numeric_jet_contract(field)
    return field


def _numeric_jet_contract(field: ScalarField):
    """Finite-difference fallback jet for transformed fields."""

    def jet(y):
        return numeric_jet(JetRequest(field=field, point=y))

    return jet
