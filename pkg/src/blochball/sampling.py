"""Seeded sampling utilities shared by the semi-norm and sweep estimators."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

#: sampled interior points stay inside this radius so that inverse-boundary
#: factors keep ~6 significant digits of slack at double precision.
RMAX = 1.0 - 1e-4


def suite_rng(seed, name=""):
    """Independent generator derived from (seed, name); stable across runs."""
    digest = hashlib.blake2b(name.encode("utf-8"), digest_size=8).digest()
    return np.random.default_rng(np.random.SeedSequence([int(seed), int.from_bytes(digest, "big")]))


def unit_directions(rng, m, n):
    """m random directions on the unit sphere of C^n."""
    z = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    nrm = np.linalg.norm(z, axis=1, keepdims=True)
    nrm[nrm == 0.0] = 1.0
    return z / nrm


def interior_points(rng, m, n, rmax=RMAX):
    """m random interior points with radii uniform in (0, rmax)."""
    d = unit_directions(rng, m, n)
    r = rng.uniform(0.0, rmax, size=(m, 1))
    return r * d


def stratified_radii(depth, rmax=RMAX):
    """The boundary-refining schedule 1 - 2^-j, j = 0..depth, capped at rmax."""
    return np.minimum(1.0 - 0.5 ** np.arange(depth + 1), rmax)


def stratified_points(rng, samples, depth, n, rmax=RMAX):
    """Stratified cloud: ``samples`` random directions per radius stratum."""
    radii = stratified_radii(depth, rmax)
    blocks = [r * unit_directions(rng, samples, n) for r in radii]
    return np.concatenate(blocks, axis=0)


@dataclass(frozen=True)
class SearchBudget:
    """Sampling and polish effort for supremum estimation.

    samples: directions per radius stratum; depth: strata 1 - 2^-j for
    j = 0..depth; polish_iters: direction-set cycles of the derivative-free
    polish (0 disables it).
    """

    samples: int = 200
    depth: int = 10
    polish_iters: int = 8

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("budget.samples must be >= 1")
        if self.depth < 0:
            raise ValueError("budget.depth must be >= 0")


def _project_ball(coords, rmax):
    nrm = np.linalg.norm(coords)
    if nrm > rmax:
        return coords * (rmax / nrm)
    return coords


def polish_max(objective, start, iters, rmax=RMAX):
    """Derivative-free ascent of ``objective`` from ``start`` inside the ball.

    Runs Powell on the real/imaginary parts with arguments projected back
    into the ball of radius ``rmax``.  Returns (value, argmax); never worse
    than the starting point.
    """
    start = np.asarray(start, dtype=np.complex128)
    n = start.shape[0]
    start = _project_ball(start, rmax)
    best_val = float(objective(start))
    best_arg = start
    if iters <= 0:
        return best_val, best_arg

    def neg(v):
        z = _project_ball(v[:n] + 1j * v[n:], rmax)
        return -float(objective(z))

    v0 = np.concatenate([start.real, start.imag])
    res = minimize(neg, v0, method="Powell", options={"maxiter": iters, "xtol": 1e-10, "ftol": 1e-12})
    cand = _project_ball(res.x[:n] + 1j * res.x[n:], rmax)
    val = float(objective(cand))
    if val > best_val:
        best_val, best_arg = val, cand
    return best_val, best_arg


def radial_rescan(objective, direction, grid=512, rmax=RMAX):
    """Dense 1-D scan of ``objective`` along t * direction, t in (0, rmax]."""
    direction = np.asarray(direction, dtype=np.complex128)
    nrm = np.linalg.norm(direction)
    if nrm == 0.0:
        return float(objective(direction)), direction
    direction = direction / nrm
    ts = np.linspace(rmax / grid, rmax, grid)
    vals = np.array([float(objective(t * direction)) for t in ts])
    i = int(np.argmax(vals))
    return float(vals[i]), ts[i] * direction
