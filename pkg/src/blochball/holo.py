"""Derivatives of analytic functions on the ball via circle quadrature.

Derivatives are taken with the Cauchy integral on a small circle around
the evaluation point (trapezoidal rule, spectrally accurate for analytic
integrands) instead of finite differences.  Gradients are stored as the
conjugation-free coefficient vector g with f'(x)(y) = sum y_k g_k; the
conjugated pairings of the underlying formulas are applied where needed.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .ball import MobiusAutomorphism, as_coords, require_interior
from .errors import DomainError, EvaluationError

DEBUG_VALIDATE = os.environ.get("BLOCHBALL_DEBUG", "") not in ("", "0")


@dataclass(frozen=True)
class QuadratureConfig:
    """Node count and probe radius for circle quadrature.

    ``radius=None`` selects 0.25 * (1 - |x|) at each evaluation point, which
    keeps probes inside the ball with margin for unit directions.
    """

    nodes: int = 64
    radius: float | None = None

    def __post_init__(self):
        if self.nodes < 8:
            raise ValueError("quadrature needs at least 8 nodes")
        if self.radius is not None and self.radius <= 0.0:
            raise ValueError("quadrature radius must be positive")

    def radius_at(self, x_norm):
        if self.radius is not None:
            return self.radius
        return 0.25 * (1.0 - x_norm)


DEFAULT_QUAD = QuadratureConfig()


class AnalyticFunction:
    """Scalar analytic function handle: evaluator plus optional extras.

    ``func`` maps a coordinate vector to a complex value.  ``gradient``,
    when given, returns the coefficient vector g with f'(x)(y) = sum y_k g_k
    and must match quadrature differentiation (checked on samples when
    BLOCHBALL_DEBUG is set).  ``batch``/``gradient_batch`` accept (m, n)
    stacks for the sampling sweeps; the fallback is a row loop.
    """

    def __init__(self, func, label="f", gradient=None, batch=None, gradient_batch=None, dim=None):
        self._func = func
        self.label = label
        self._gradient = gradient
        self._batch = batch
        self._gradient_batch = gradient_batch
        self.dim = dim

    def __call__(self, z):
        return complex(self._func(as_coords(z)))

    def __repr__(self):
        return f"AnalyticFunction({self.label!r})"

    @property
    def has_gradient(self):
        return self._gradient is not None

    def analytic_gradient(self, z):
        if self._gradient is None:
            raise ValueError(f"{self.label} has no analytic gradient")
        return np.asarray(self._gradient(as_coords(z)), dtype=np.complex128)

    def value_batch(self, zs):
        zs = np.asarray(zs, dtype=np.complex128)
        if self._batch is not None:
            return np.asarray(self._batch(zs), dtype=np.complex128)
        return np.array([self._func(z) for z in zs], dtype=np.complex128)

    def gradient_batch(self, zs):
        zs = np.asarray(zs, dtype=np.complex128)
        if self._gradient_batch is not None:
            return np.asarray(self._gradient_batch(zs), dtype=np.complex128)
        return np.stack([self.analytic_gradient(z) for z in zs])


def _circle_nodes(nodes):
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    return np.exp(1j * theta)


def directional_derivative(f, x, u, q=DEFAULT_QUAD):
    """f'(x)(u) by the Cauchy integral on the circle |lambda| = q.radius."""
    x = as_coords(x)
    u = as_coords(u, x.shape[0])
    xn = float(np.linalg.norm(x))
    r = q.radius_at(xn)
    if xn + r * float(np.linalg.norm(u)) >= 1.0:
        raise DomainError("probe circle exits the ball; shrink the quadrature radius")
    lam = r * _circle_nodes(q.nodes)
    pts = x[None, :] + lam[:, None] * u[None, :]
    vals = f.value_batch(pts)
    if not np.all(np.isfinite(vals)):
        raise EvaluationError(f"{f.label} returned a non-finite value", point=x)
    return complex(np.sum(vals / lam) / q.nodes)


def gradient(f, x, q=DEFAULT_QUAD):
    """Coefficient vector g with f'(x)(y) = sum y_k g_k.

    Uses the handle's analytic gradient when present, otherwise one circle
    quadrature per coordinate direction.
    """
    x = as_coords(x)
    if f.has_gradient:
        return f.analytic_gradient(x)
    n = x.shape[0]
    g = np.empty(n, dtype=np.complex128)
    basis = np.eye(n, dtype=np.complex128)
    for k in range(n):
        g[k] = directional_derivative(f, x, basis[k], q)
    return g


def radial_derivative(f, x, q=DEFAULT_QUAD):
    """Rf(x) = f'(x)(x); zero at the origin."""
    x = as_coords(x)
    if np.linalg.norm(x) == 0.0:
        return 0.0 + 0.0j
    return complex(np.sum(x * gradient(f, x, q)))


def invariant_gradient(f, x, q=DEFAULT_QUAD):
    """Gradient at 0 of f composed with the automorphism swapping 0 and x.

    Computed as the plain-transpose of the automorphism derivative at the
    origin applied to the gradient at x.
    """
    x = require_interior(x, "x")
    g = gradient(f, x, q)
    return MobiusAutomorphism(x).derivative_origin_transpose(g)


def invariant_gradient_direct(f, x, q=DEFAULT_QUAD):
    """Same quantity by direct quadrature of the composed function at 0."""
    x = require_interior(x, "x")
    auto = MobiusAutomorphism(x)
    composed = AnalyticFunction(
        lambda z: f(auto(z)),
        label=f"{f.label}∘auto",
        batch=lambda zs: f.value_batch(auto.apply_batch(zs)),
    )
    return gradient(composed, np.zeros_like(x), q)


def invariant_gradient_norm(f, x, q=DEFAULT_QUAD, grid=64, polish=True):
    """The closed-form supremum expression for |invariant gradient|.

    sup over w != 0 of |<g, conj(w)>| (1-|x|^2) / sqrt((1-|x|^2)|w|^2 +
    |<w,x>|^2).  The supremum is attained inside the complex span of
    {conj(g), x}, so the search runs on that 2-D slice: a phase/mixture grid
    followed by a Nelder-Mead polish.
    """
    x = require_interior(x, "x")
    g = gradient(f, x, q)
    gn = float(np.linalg.norm(g))
    if gn == 0.0:
        return 0.0
    nx2 = float(np.sum(np.abs(x) ** 2))
    one = 1.0 - nx2

    b1 = np.conj(g) / gn
    v = x - np.vdot(b1, x) * b1
    vn = float(np.linalg.norm(v))
    b2 = v / vn if vn > 1e-14 else None

    def value(t, psi):
        w = np.cos(t) * b1
        if b2 is not None:
            w = w + np.sin(t) * np.exp(1j * psi) * b2
        num = abs(np.sum(g * w)) * one
        den = np.sqrt(one * float(np.sum(np.abs(w) ** 2)) + abs(np.vdot(x, w)) ** 2)
        return num / den if den > 0.0 else 0.0

    if b2 is None:
        best = value(0.0, 0.0)
        ts = np.linspace(0.0, np.pi / 2, grid, endpoint=False)
        best = max(best, max(value(t, 0.0) for t in ts))
        start = (0.0, 0.0)
    else:
        ts = np.linspace(0.0, np.pi / 2, grid, endpoint=False)
        psis = np.linspace(0.0, 2.0 * np.pi, grid, endpoint=False)
        best, start = 0.0, (0.0, 0.0)
        for t in ts:
            for psi in psis:
                val = value(t, psi)
                if val > best:
                    best, start = val, (t, psi)
    if polish:
        res = minimize(
            lambda p: -value(p[0], p[1]),
            np.asarray(start),
            method="Nelder-Mead",
            options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 400},
        )
        best = max(best, -float(res.fun))
    return best


def radial_boundary_integral(f, x, nodes=64):
    """Circle integral equal to (1 - |x|^2) Rf(x); returns 0 at x = 0.

    Approximates -(1/2 pi i) * integral over |xi| = 1 of
    f(phi_x(xi x)) dxi / xi^2 with the trapezoidal rule.
    """
    x = require_interior(x, "x")
    if np.linalg.norm(x) == 0.0:
        return 0.0 + 0.0j
    auto = MobiusAutomorphism(x)
    xi = _circle_nodes(nodes)
    pts = auto.apply_batch(xi[:, None] * x[None, :])
    vals = f.value_batch(pts)
    return complex(-np.sum(vals / xi) / nodes)


# ---------------------------------------------------------------------------
# built-in analytic families (all carry analytic gradients and batch paths)


def _maybe_validate(f, n):
    if not DEBUG_VALIDATE:
        return f
    rng = np.random.default_rng(0)
    for _ in range(3):
        z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        z *= 0.4 / max(np.linalg.norm(z), 1e-12)
        gq = np.array(
            [directional_derivative(f, z, e) for e in np.eye(n, dtype=np.complex128)]
        )
        if np.max(np.abs(gq - f.analytic_gradient(z))) > 1e-8:
            raise EvaluationError(f"analytic gradient of {f.label} disagrees with quadrature", point=z)
    return f


def linear_functional(u):
    """f(z) = <z, u> = sum z_k conj(u_k)."""
    u = np.asarray(u, dtype=np.complex128)
    cu = np.conj(u)
    return _maybe_validate(
        AnalyticFunction(
            lambda z: np.sum(z * cu),
            label="<z,u>",
            gradient=lambda z: cu.copy(),
            batch=lambda zs: zs @ cu,
            gradient_batch=lambda zs: np.broadcast_to(cu, zs.shape).copy(),
            dim=u.shape[0],
        ),
        u.shape[0],
    )


def coordinate(k, n):
    """f(z) = z_k (0-based index)."""
    e = np.zeros(n, dtype=np.complex128)
    e[k] = 1.0
    f = linear_functional(e)
    f.label = f"z_{k}"
    return f


def monomial(exponents, n):
    """f(z) = prod z_k^{p_k} for the {index: power} mapping ``exponents``."""
    idx = np.array(sorted(exponents), dtype=np.int64)
    pow_ = np.array([exponents[k] for k in idx], dtype=np.float64)
    if np.any(idx >= n) or np.any(pow_ < 1):
        raise ValueError("monomial exponents out of range")

    def val(z):
        return np.prod(z[idx] ** pow_)

    def val_batch(zs):
        return np.prod(zs[:, idx] ** pow_[None, :], axis=1)

    def grad(z):
        g = np.zeros(n, dtype=np.complex128)
        for j, k in enumerate(idx):
            rest = np.prod(np.delete(z[idx], j) ** np.delete(pow_, j))
            g[k] = pow_[j] * z[k] ** (pow_[j] - 1) * rest
        return g

    def grad_batch(zs):
        m = zs.shape[0]
        g = np.zeros((m, n), dtype=np.complex128)
        cols = zs[:, idx] ** pow_[None, :]
        for j, k in enumerate(idx):
            rest = np.prod(np.delete(cols, j, axis=1), axis=1)
            g[:, k] = pow_[j] * zs[:, k] ** (pow_[j] - 1) * rest
        return g

    label = "*".join(f"z_{k}^{int(p)}" for k, p in zip(idx, pow_))
    return _maybe_validate(
        AnalyticFunction(val, label=label, gradient=grad, batch=val_batch, gradient_batch=grad_batch, dim=n),
        n,
    )


def log_kernel(xi):
    """f(z) = log(1 / (1 - <z, xi>)); Bloch but unbounded when |xi| = 1."""
    xi = np.asarray(xi, dtype=np.complex128)
    cxi = np.conj(xi)

    return _maybe_validate(
        AnalyticFunction(
            lambda z: -np.log(1.0 - np.sum(z * cxi)),
            label="log-kernel",
            gradient=lambda z: cxi / (1.0 - np.sum(z * cxi)),
            batch=lambda zs: -np.log(1.0 - zs @ cxi),
            gradient_batch=lambda zs: cxi[None, :] / (1.0 - zs @ cxi)[:, None],
            dim=xi.shape[0],
        ),
        xi.shape[0],
    )


def constant_fn(c, n):
    """f(z) = c."""
    c = complex(c)
    zero = np.zeros(n, dtype=np.complex128)
    return AnalyticFunction(
        lambda z: c,
        label=f"const({c})",
        gradient=lambda z: zero.copy(),
        batch=lambda zs: np.full(zs.shape[0], c, dtype=np.complex128),
        gradient_batch=lambda zs: np.zeros((zs.shape[0], n), dtype=np.complex128),
        dim=n,
    )
