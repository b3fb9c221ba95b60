"""Complex vector arithmetic, ball automorphisms, and the two ball metrics.

Conventions used throughout the package:

* points are complex coordinate vectors of a fixed truncation dimension n;
* the inner product ``inner(x, y)`` is linear in the first slot and
  conjugates the second, ``sum(x_k * conj(y_k))``;
* interior points have Euclidean norm strictly below 1.

The automorphism swapping 0 and a is ``phi_a = (s_a Q_a + P_a) o m_a`` with
``s_a = sqrt(1 - |a|^2)``, ``m_a(x) = (a - x)/(1 - <x, a>)``, ``P_a`` the
projection onto span{a} and ``Q_a = I - P_a``.  It is an involution.  For
a = 0 the projection is degenerate and the map is taken to be x -> -x (the
continuous limit as a -> 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .kernels import mobius_apply_batch, rho_pairs

#: past this pseudo-hyperbolic distance the hyperbolic metric is reported
#: as the capped value BETA_CAP instead of overflowing.
RHO_CAP = 1.0 - 1e-15
BETA_CAP = math.atanh(RHO_CAP)


def as_coords(x, n=None):
    """Coerce a Point, sequence, or array to a complex coordinate vector."""
    if isinstance(x, Point):
        coords = x.coords
    else:
        coords = np.atleast_1d(np.asarray(x, dtype=np.complex128))
    if coords.ndim != 1:
        raise DomainError(f"expected a coordinate vector, got shape {coords.shape}")
    if n is not None and coords.shape[0] != n:
        raise DomainError(f"expected dimension {n}, got {coords.shape[0]}")
    if not np.all(np.isfinite(coords)):
        raise DomainError("coordinates must be finite")
    return coords


def norm(x):
    """Euclidean norm sqrt(sum |x_k|^2)."""
    return float(np.linalg.norm(as_coords(x)))


def inner(x, y):
    """Inner product, linear in the first slot: sum x_k conj(y_k)."""
    x = as_coords(x)
    y = as_coords(y, x.shape[0])
    return complex(np.vdot(y, x))


def bilinear(x, y):
    """Conjugation-free pairing sum x_k y_k."""
    x = as_coords(x)
    y = as_coords(y, x.shape[0])
    return complex(np.sum(x * y))


def require_interior(x, name="point"):
    """Return coords of ``x`` after checking it lies strictly inside the ball."""
    coords = as_coords(x)
    if np.linalg.norm(coords) >= 1.0:
        raise DomainError(f"{name} must satisfy norm < 1, got {np.linalg.norm(coords)}")
    return coords


@dataclass(frozen=True)
class Point:
    """A complex coordinate vector of truncation dimension n."""

    coords: np.ndarray

    def __post_init__(self):
        coords = np.atleast_1d(np.asarray(self.coords, dtype=np.complex128))
        if coords.ndim != 1:
            raise DomainError(f"coordinates must be a vector, got shape {coords.shape}")
        if not np.all(np.isfinite(coords)):
            raise DomainError("coordinates must be finite")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def interior(cls, coords):
        """Construct a point, rejecting norm >= 1."""
        p = cls(coords)
        if p.norm() >= 1.0:
            raise DomainError(f"interior point must have norm < 1, got {p.norm()}")
        return p

    @property
    def n(self):
        return self.coords.shape[0]

    def norm(self):
        return float(np.linalg.norm(self.coords))


@dataclass(frozen=True)
class MetricValue:
    """Paired pseudo-hyperbolic and hyperbolic distances, beta = atanh(rho)."""

    rho: float
    beta: float

    @classmethod
    def from_rho(cls, rho):
        rho = float(rho)
        if rho >= RHO_CAP:
            return cls(rho=rho, beta=BETA_CAP)
        return cls(rho=rho, beta=math.atanh(rho))


class MobiusAutomorphism:
    """The involutive automorphism of the ball swapping 0 and ``a``.

    Caches s_a and the rank-one projection data; exposes the map, its
    derivative at 0 and at a, and batched application.
    """

    def __init__(self, a):
        coords = require_interior(a, "automorphism parameter")
        self.a = coords
        self.norm_a_sq = float(np.sum(np.abs(coords) ** 2))
        self.s_a = math.sqrt(1.0 - self.norm_a_sq)

    @property
    def n(self):
        return self.a.shape[0]

    def project(self, y):
        """P_a(y); zero map when a = 0."""
        y = as_coords(y, self.n)
        if self.norm_a_sq == 0.0:
            return np.zeros_like(y)
        return (np.vdot(self.a, y) / self.norm_a_sq) * self.a

    def __call__(self, x):
        return self.apply_batch(as_coords(x, self.n)[None, :])[0]

    def apply_batch(self, xs):
        xs = np.asarray(xs, dtype=np.complex128)
        if np.any(np.sum(np.abs(xs) ** 2, axis=-1) >= 1.0):
            raise DomainError("automorphism argument must have norm < 1")
        return mobius_apply_batch(self.a, xs)

    def derivative_origin(self, y):
        """phi_a'(0) y = -s^2 P_a y - s Q_a y."""
        y = as_coords(y, self.n)
        p = self.project(y)
        return -(self.s_a**2) * p - self.s_a * (y - p)

    def derivative_fixed(self, y):
        """phi_a'(a) y = -(1/s^2) P_a y - (1/s) Q_a y; inverse of the origin map."""
        y = as_coords(y, self.n)
        p = self.project(y)
        return -p / self.s_a**2 - (y - p) / self.s_a

    def derivative_origin_transpose(self, g):
        """Plain-transpose action of phi_a'(0) on a bilinear coefficient vector."""
        g = as_coords(g, self.n)
        if self.norm_a_sq == 0.0:
            return -g
        pt = (np.sum(self.a * g) / self.norm_a_sq) * np.conj(self.a)
        return -self.s_a * g + self.s_a * (1.0 - self.s_a) * pt


def mobius_apply(a, x):
    """phi_a(x) for interior a and x."""
    return MobiusAutomorphism(a)(x)


def mobius_derivative(a, at="origin"):
    """The linear map phi_a'(0) or phi_a'(a) as a callable on vectors."""
    auto = MobiusAutomorphism(a)
    if at == "origin":
        return auto.derivative_origin
    if at == "fixed_a":
        return auto.derivative_fixed
    raise ValueError(f"'at' must be 'origin' or 'fixed_a', got {at!r}")


def pseudo_hyperbolic(x, y):
    """rho(x, y) = |phi_x(y)| via the closed form, clamped into [0, 1).

    Nearly coincident pairs are recomputed from the automorphism image
    directly: the closed form cancels to sqrt-of-eps noise there.
    """
    x = require_interior(x, "x")
    y = require_interior(y, "y")
    if x.shape != y.shape:
        raise DomainError("points must share a dimension")
    rho = float(rho_pairs(x[None, :], y[None, :])[0])
    if rho < 1e-4:
        rho = float(np.linalg.norm(MobiusAutomorphism(x)(y)))
    return rho


def hyperbolic(x, y):
    """beta(x, y) = atanh(rho(x, y)), capped at BETA_CAP near the boundary."""
    return MetricValue.from_rho(pseudo_hyperbolic(x, y)).beta


def pseudo_hyperbolic_pairs(xs, ys):
    """Row-wise rho for batches of interior points."""
    xs = np.asarray(xs, dtype=np.complex128)
    ys = np.asarray(ys, dtype=np.complex128)
    return rho_pairs(xs, ys)


def hyperbolic_pairs(xs, ys):
    rho = pseudo_hyperbolic_pairs(xs, ys)
    return np.arctanh(np.minimum(rho, RHO_CAP))
