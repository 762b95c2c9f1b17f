"""Pointwise anisotropic elliptic operators and numeric jet extraction.

The operators act on second-order jets rather than on fields: the caller
chooses whether the jet comes from an analytic contract or from the finite
difference builder below, and both routes share one algebraic code path.

For a norm H, the divergence-form operator div(H(grad u) gradH(grad u))
evaluates pointwise as trace(A(grad u) D^2 u) with
A(xi) = H(xi) D^2 H(xi) + gradH(xi) (x) gradH(xi), i.e. half the Hessian of
H^2.  For quadratic-form norms A is the constant matrix M.  The
dimension-tied quasilinear variant div(H^(N-1)(grad u) gradH(grad u))
evaluates as trace(B(grad u) D^2 u) with
B(xi) = H^(N-1) D^2 H + (N-1) H^(N-2) gradH (x) gradH.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .fields import ScalarField
from .norms import EuclideanNorm, Jet2, NormSpec, RiemannianNorm

__all__ = [
    "JetRequest",
    "NumericJet",
    "NLaplaceValue",
    "auto_step",
    "numeric_jet",
    "anisotropic_laplacian",
    "finsler_n_laplacian",
]

_EPS = float(np.finfo(float).eps)
# Baseline central-difference steps: eps^(1/3) balances truncation against
# roundoff for first differences.  Second differences divide by h^2, so their
# roundoff floor forces a coarser step, eps^(1/4); Richardson levels then
# remove the extra truncation error.
_GRAD_STEP = _EPS ** (1.0 / 3.0)
_HESS_STEP = _EPS ** 0.25


def auto_step(point) -> float:
    """Default first-difference step at `point`."""
    pt = np.asarray(point, dtype=float)
    return _GRAD_STEP * max(1.0, float(np.sqrt(pt @ pt)))


@dataclass(frozen=True)
class JetRequest:
    """What to differentiate, where, and how hard to refine.

    `step` is either "auto" or an explicit base step used for every stencil.
    `refinement` >= 1 is the number of Richardson levels; level k uses step
    base * 2^k and the levels are extrapolated together.
    """

    field: ScalarField
    point: np.ndarray
    step: float | str = "auto"
    refinement: int = 3


@dataclass(frozen=True)
class NumericJet(Jet2):
    """Jet with the extrapolation-difference error estimates attached."""

    gradient_error: float = float("nan")
    hessian_error: float = float("nan")


class NLaplaceValue(NamedTuple):
    """Quasilinear operator value plus a degenerate-gradient flag."""

    value: float
    degenerate: bool


def _stencil(field: ScalarField, x: np.ndarray, f0: float, h: float):
    """One vectorised central-difference pass at step h.

    Returns (gradient, hessian); the off-diagonal stencil is symmetric in
    (i, j) so the Hessian is symmetric by construction.
    """
    n = x.shape[0]
    pts = [x + h * e for e in np.eye(n)] + [x - h * e for e in np.eye(n)]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for i, j in pairs:
        ei, ej = np.zeros(n), np.zeros(n)
        ei[i], ej[j] = h, h
        pts += [x + ei + ej, x + ei - ej, x - ei + ej, x - ei - ej]
    vals = np.asarray(field(np.array(pts)), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ValueError(f"non-finite field value near {x.tolist()}")
    fp, fm = vals[:n], vals[n : 2 * n]
    grad = (fp - fm) / (2.0 * h)
    hess = np.zeros((n, n))
    np.fill_diagonal(hess, (fp - 2.0 * f0 + fm) / h**2)
    for k, (i, j) in enumerate(pairs):
        q = vals[2 * n + 4 * k : 2 * n + 4 * k + 4]
        hess[i, j] = hess[j, i] = (q[0] - q[1] - q[2] + q[3]) / (4.0 * h**2)
    return grad, hess


def _richardson(values):
    """Extrapolate a coarse-to-fine list of O(h^2) approximations.

    Returns (best, error_estimate); with a single level the estimate is NaN.
    """
    r = [np.asarray(v, dtype=float) for v in values]
    L = len(r)
    for j in range(1, L):
        factor = 4.0**j
        for i in range(L - 1, j - 1, -1):
            r[i] = (factor * r[i] - r[i - 1]) / (factor - 1.0)
    if L < 2:
        return r[-1], float("nan")
    return r[-1], float(np.max(np.abs(r[-1] - r[-2])))


def numeric_jet(req: JetRequest) -> NumericJet:
    """Central-difference jet with Richardson extrapolation.

    The stencil at the largest level must not reach the origin (fields here
    are typically singular there); that raises instead of returning noise.
    """
    x = np.asarray(req.point, dtype=float)
    if x.shape != (req.field.dim,):
        raise ValueError("point dimension does not match the field")
    levels = int(req.refinement)
    if levels < 1:
        raise ValueError("refinement must be >= 1")
    if req.step == "auto":
        hg = auto_step(x)
        hh = _HESS_STEP * max(1.0, float(np.sqrt(x @ x)))
    else:
        hg = hh = float(req.step)
        if hg <= 0.0:
            raise ValueError("step must be positive")
    reach = max(hg, hh) * 2.0 ** (levels - 1) * np.sqrt(2.0) * 1.000001
    if float(np.sqrt(x @ x)) <= reach:
        raise ValueError(
            f"stencil of reach {reach:.3g} would cross the origin at {x.tolist()}"
        )
    f0 = float(req.field(x))
    if not np.isfinite(f0):
        raise ValueError(f"non-finite field value at {x.tolist()}")

    grad_levels, hess_levels = [], []
    for k in reversed(range(levels)):  # coarse -> fine
        g, hmat = _stencil(req.field, x, f0, hg * 2.0**k)
        grad_levels.append(g)
        if hh != hg:
            _, hmat = _stencil(req.field, x, f0, hh * 2.0**k)
        hess_levels.append(hmat)
    grad, gerr = _richardson(grad_levels)
    hess, herr = _richardson(hess_levels)
    return NumericJet(f0, grad, 0.5 * (hess + hess.T), gerr, herr)


def _is_quadratic_form(spec: NormSpec) -> bool:
    return isinstance(spec, (RiemannianNorm, EuclideanNorm))


def _coefficient_matrix(spec: NormSpec, grad: np.ndarray) -> np.ndarray:
    """A(grad) = H D^2 H + gradH (x) gradH evaluated at the field gradient."""
    j = spec.jet(grad)
    return j.value * j.hessian + np.outer(j.gradient, j.gradient)


def anisotropic_laplacian(spec: NormSpec, jet: Jet2) -> float:
    """trace(A(grad u) D^2 u) for A = half the Hessian of H^2.

    Quadratic-form norms have A = M identically, so a vanishing gradient is
    harmless there; for other norms A is undefined at 0 and a zero gradient
    is an error.
    """
    hess = np.asarray(jet.hessian, dtype=float)
    if isinstance(spec, EuclideanNorm):
        return float(np.trace(hess))
    if isinstance(spec, RiemannianNorm):
        return float(np.tensordot(spec.matrix.entries, hess))
    grad = np.asarray(jet.gradient, dtype=float)
    if not np.any(grad != 0.0):
        raise ValueError("operator coefficient undefined at a zero gradient "
                         "for non-quadratic norms")
    return float(np.tensordot(_coefficient_matrix(spec, grad), hess))


# Below this gradient size the quasilinear coefficient is treated as fully
# degenerate; far larger than underflow, far smaller than any sane jet.
_DEGENERATE_GRADIENT = 1e-140


def finsler_n_laplacian(spec: NormSpec, jet: Jet2, n: int) -> NLaplaceValue:
    """trace(B(grad u) D^2 u) for the dimension-tied quasilinear operator.

    `n` must equal the spec dimension.  For n > 2 the coefficient B(xi)
    vanishes continuously as xi -> 0, so a (numerically) zero gradient
    returns 0 with the degenerate flag set instead of raising.
    """
    n = int(n)
    if n != spec.dim:
        raise ValueError(f"operator is dimension-tied: n={n} but spec.dim={spec.dim}")
    grad = np.asarray(jet.gradient, dtype=float)
    hess = np.asarray(jet.hessian, dtype=float)
    gnorm = float(np.sqrt(grad @ grad))
    if gnorm < _DEGENERATE_GRADIENT:
        if n == 2 and _is_quadratic_form(spec):
            return NLaplaceValue(anisotropic_laplacian(spec, jet), False)
        if n == 2:
            raise ValueError("operator coefficient undefined at a zero gradient "
                             "for non-quadratic norms")
        return NLaplaceValue(0.0, True)
    if _is_quadratic_form(spec):
        m = (np.eye(n) if isinstance(spec, EuclideanNorm)
             else spec.matrix.entries)
        mg = m @ grad
        q = float(grad @ mg)
        core = m + (n - 2.0) * np.outer(mg, mg) / q
        return NLaplaceValue(float(q ** ((n - 2.0) / 2.0)
                                   * np.tensordot(core, hess)), False)
    j = spec.jet(grad)
    b = (j.value ** (n - 1.0) * j.hessian
         + (n - 1.0) * j.value ** (n - 2.0) * np.outer(j.gradient, j.gradient))
    return NLaplaceValue(float(np.tensordot(b, hess)), False)
