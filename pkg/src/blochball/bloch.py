"""Bloch semi-norm estimation, evaluation-functional bounds, and the
constructive Lipschitz constant for gradients on a sub-ball.

Semi-norm values are reported as lower bounds: the best value found by
stratified radial sampling (radii 1 - 2^-j) plus a derivative-free polish.
Inequality checks against these estimates are arranged pointwise wherever
possible so they inherit exactness sample by sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import holo
from .ball import MobiusAutomorphism, as_coords, pseudo_hyperbolic_pairs
from .errors import EvaluationError
from .sampling import RMAX, SearchBudget, polish_max, stratified_points, suite_rng

SEMINORM_KINDS = ("derivative", "invariant", "radial", "metric_ratio")

#: semi-norm equivalence factor between the derivative and invariant sups
EQUIV_FACTOR = 1.0 + math.sqrt(31.0) / 2.0


@dataclass(frozen=True)
class SeminormEstimate:
    """A lower-bound estimate of one of the four semi-norm expressions."""

    kind: str
    value: float
    argmax: object
    search_budget: SearchBudget

    def reevaluate(self, f):
        """Recompute the objective at the recorded argmax."""
        if self.kind == "metric_ratio":
            x, y = self.argmax
            return _ratio_value(f, x[None, :], y[None, :])[0]
        return pointwise_values(f, np.asarray(self.argmax)[None, :], self.kind)[0]


@dataclass(frozen=True)
class EvalBound:
    """Norm bound for the evaluation functional at x."""

    x: np.ndarray
    L_x: float


def invariant_gradient_rows(zs, gs):
    """Row-wise invariant gradients from points ``zs`` and gradients ``gs``."""
    zs = np.asarray(zs, dtype=np.complex128)
    gs = np.asarray(gs, dtype=np.complex128)
    nz2 = np.sum(np.abs(zs) ** 2, axis=1)
    s = np.sqrt(np.maximum(1.0 - nz2, 0.0))
    out = -s[:, None] * gs
    mask = nz2 > 0.0
    if np.any(mask):
        coef = np.einsum("ij,ij->i", zs[mask], gs[mask]) / nz2[mask]
        out[mask] += (s[mask] * (1.0 - s[mask]) * coef)[:, None] * np.conj(zs[mask])
    return out


def pointwise_values(f, zs, kind):
    """The pointwise semi-norm expression of ``kind`` on a batch of points."""
    zs = np.asarray(zs, dtype=np.complex128)
    gs = f.gradient_batch(zs) if f.has_gradient else np.stack(
        [holo.gradient(f, z) for z in zs]
    )
    weight = 1.0 - np.sum(np.abs(zs) ** 2, axis=1)
    with np.errstate(invalid="ignore", over="ignore"):
        if kind == "derivative":
            vals = weight * np.linalg.norm(gs, axis=1)
        elif kind == "radial":
            vals = weight * np.abs(np.einsum("ij,ij->i", zs, gs))
        elif kind == "invariant":
            vals = np.linalg.norm(invariant_gradient_rows(zs, gs), axis=1)
        else:
            raise ValueError(f"unknown pointwise kind {kind!r}")
    if not np.all(np.isfinite(vals)):
        bad = zs[~np.isfinite(vals)][0]
        raise EvaluationError(f"{f.label} produced a non-finite value", point=bad)
    return vals


def _rho_accurate(xs, ys, threshold=1e-4):
    """Pairwise rho with the closed form replaced by the direct automorphism
    image for nearly coincident pairs, where the closed form cancels to
    sqrt-of-eps noise."""
    rho = np.asarray(pseudo_hyperbolic_pairs(xs, ys)).copy()
    for i in np.flatnonzero(rho < threshold):
        rho[i] = np.linalg.norm(MobiusAutomorphism(xs[i])(ys[i]))
    return rho


def _ratio_value(f, xs, ys):
    rho = _rho_accurate(xs, ys)
    beta = np.arctanh(np.minimum(rho, 1.0 - 1e-15))
    diff = np.abs(f.value_batch(xs) - f.value_batch(ys))
    if not np.all(np.isfinite(diff)):
        bad = xs[~np.isfinite(diff)][0]
        raise EvaluationError(f"{f.label} produced a non-finite value", point=bad)
    out = np.zeros_like(beta)
    mask = beta > 1e-14
    out[mask] = diff[mask] / beta[mask]
    return out


def _estimate_pointwise(f, kind, budget, n, rng, extra_starts):
    cloud = stratified_points(rng, budget.samples, budget.depth, n)
    if extra_starts:
        cloud = np.concatenate([cloud, np.stack([as_coords(p, n) for p in extra_starts])])
    vals = pointwise_values(f, cloud, kind)
    order = np.argsort(vals)[::-1]
    best_val = float(vals[order[0]])
    best_arg = cloud[order[0]]

    def objective(z):
        return pointwise_values(f, z[None, :], kind)[0]

    for idx in order[: min(3, len(order))]:
        val, arg = polish_max(objective, cloud[idx], budget.polish_iters)
        if val > best_val:
            best_val, best_arg = val, arg
    return best_val, best_arg


def _estimate_ratio(f, budget, n, rng, extra_starts):
    m = budget.samples * (budget.depth + 1)
    xs = stratified_points(rng, budget.samples, budget.depth, n)
    ys = xs[rng.permutation(m)]
    # near-coincident pairs capture the ratio's coincidence limit
    offs = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    offs *= 1e-3 / np.linalg.norm(offs, axis=1, keepdims=True)
    ys_near = xs + offs
    keep = np.linalg.norm(ys_near, axis=1) < RMAX
    xs = np.concatenate([xs, xs[keep]])
    ys = np.concatenate([ys, ys_near[keep]])
    if extra_starts:
        pts = np.stack([as_coords(p, n) for p in extra_starts])
        xs = np.concatenate([xs, pts])
        ys = np.concatenate([ys, pts * (1.0 - 1e-3)])

    vals = _ratio_value(f, xs, ys)
    i = int(np.argmax(vals))
    best_val = float(vals[i])
    best_pair = (xs[i], ys[i])

    def project_halves(v):
        x_p, y_p = v[:n], v[n:]
        nx, ny = np.linalg.norm(x_p), np.linalg.norm(y_p)
        if nx > RMAX:
            x_p = x_p * (RMAX / nx)
        if ny > RMAX:
            y_p = y_p * (RMAX / ny)
        return x_p, y_p

    def objective(v):
        x_p, y_p = project_halves(v)
        return _ratio_value(f, x_p[None, :], y_p[None, :])[0]

    stacked = np.concatenate([xs[i], ys[i]])
    val, arg = polish_max(objective, stacked, budget.polish_iters, rmax=2.0)
    x_p, y_p = project_halves(arg)
    if val > best_val:
        best_val, best_pair = val, (x_p, y_p)
    return best_val, best_pair


def estimate_seminorm(f, kind, budget=None, n=None, seed=0, rng=None, extra_starts=()):
    """Lower-bound estimate of the chosen semi-norm of ``f``.

    ``extra_starts`` lets callers seed the search with points found by other
    estimates so that cross-estimate orderings hold by construction.
    """
    if kind not in SEMINORM_KINDS:
        raise ValueError(f"kind must be one of {SEMINORM_KINDS}, got {kind!r}")
    budget = budget or SearchBudget()
    if n is None:
        n = getattr(f, "dim", None)
        if n is None:
            raise ValueError("pass n explicitly for functions without a dim attribute")
    rng = rng or suite_rng(seed, f"seminorm:{kind}:{f.label}")
    if kind == "metric_ratio":
        value, argmax = _estimate_ratio(f, budget, n, rng, extra_starts)
    else:
        value, argmax = _estimate_pointwise(f, kind, budget, n, rng, extra_starts)
    return SeminormEstimate(kind=kind, value=value, argmax=argmax, search_budget=budget)


def eval_bound(x):
    """L_x = max{atanh-type growth factor at x, 1}; bounds the evaluation functional."""
    coords = as_coords(x)
    r = float(np.linalg.norm(coords))
    if r >= 1.0:
        raise EvaluationError("eval_bound requires an interior point", point=coords)
    log_term = 0.5 * math.log((1.0 + r) / (1.0 - r))
    return EvalBound(x=coords, L_x=max(log_term, 1.0))


#: past this radius the constructive Lipschitz constant is reported at the
#: capped argument instead of diverging.
LIPSCHITZ_DELTA_CAP = 0.999


def lipschitz_constant(delta):
    """Constructive constant C_delta for the gradient Lipschitz estimate.

    With eps = (1-delta)/2 the pseudo-hyperbolic distance between probe
    circles stays below r_delta = 4(1+delta)/(4+(1+delta)^2) < 1, giving the
    chain C_delta = (1/eps) * (1 + sqrt(31)/2) / (1 - r_delta).  Arguments
    above LIPSCHITZ_DELTA_CAP are capped there (the constant diverges as
    delta -> 1), so the return value is always finite.
    """
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"delta must lie in [0, 1), got {delta}")
    capped = min(delta, LIPSCHITZ_DELTA_CAP)
    eps = (1.0 - capped) / 2.0
    r = 4.0 * (1.0 + capped) / (4.0 + (1.0 + capped) ** 2)
    c_prime = 1.0 / (1.0 - r)
    return (1.0 / eps) * EQUIV_FACTOR * c_prime


@dataclass(frozen=True)
class KnownFunction:
    """A test function with analytically known semi-norm values."""

    f: holo.AnalyticFunction
    bloch_seminorm: float
    radial_seminorm: float | None = None
    inv_seminorm: float | None = None
    sup_norm: float | None = None


#: max of t(1-t^2) over (0,1); the radial semi-norm of a unit linear functional
RADIAL_LINEAR = 2.0 / (3.0 * math.sqrt(3.0))


def known_families(n, rng=None):
    """Built-in functions whose semi-norms have closed forms.

    Unit linear functionals have derivative and invariant semi-norm exactly 1
    (both attained at the origin); the monomial values follow from one-variable
    calculus on t (1 - t^2)-type profiles.
    """
    fams = [
        KnownFunction(
            f=holo.coordinate(0, n),
            bloch_seminorm=1.0,
            radial_seminorm=RADIAL_LINEAR,
            inv_seminorm=1.0,
            sup_norm=1.0,
        ),
        KnownFunction(
            f=holo.monomial({0: 2}, n),
            bloch_seminorm=2.0 * RADIAL_LINEAR,
            radial_seminorm=0.5,
            sup_norm=1.0,
        ),
    ]
    if n >= 2:
        fams.append(
            KnownFunction(
                f=holo.monomial({0: 1, 1: 1}, n),
                bloch_seminorm=RADIAL_LINEAR,
                radial_seminorm=0.25,
                sup_norm=0.5,
            )
        )
        if rng is not None:
            u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            u /= np.linalg.norm(u)
            fams.append(
                KnownFunction(
                    f=holo.linear_functional(u),
                    bloch_seminorm=1.0,
                    radial_seminorm=RADIAL_LINEAR,
                    inv_seminorm=1.0,
                    sup_norm=1.0,
                )
            )
    return fams
