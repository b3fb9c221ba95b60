"""Numerical compactness criteria for composition-operator symbols.

The boundary conditions are true limits; here they are estimated by
geometric bin sweeps (bins [1 - 2^-j, 1 - 2^-j-1) in the relevant norm)
fed by probe rays, a stratified random cloud, and per-bin zoom refinement.
Each criterion reports a three-valued trend instead of a boolean: the last
two schedule bins decide ``to_zero`` / ``bounded_away`` /  ``inconclusive``,
and bins that are empty because the symbol's certified sup norm keeps them
unreachable mark the estimate ``vacuous``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .kernels import greedy_cover_count
from .sampling import suite_rng, unit_directions
from .symbols import restrict_component

TREND_ZERO_TOL = 0.02
TREND_AWAY_TOL = 0.2

_TINY = 1e-300


@dataclass(frozen=True)
class SweepBudget:
    """Effort knobs for a boundary sweep."""

    samples: int = 2048
    depth: int = 16
    ray_grid: int = 512
    refine: int = 2
    extra_depth: int = 8  # rays overshoot the bin ladder to fill image bins

    @classmethod
    def coerce(cls, budget):
        if budget is None:
            return cls()
        if isinstance(budget, cls):
            return budget
        if isinstance(budget, int):
            return cls(samples=budget)
        raise TypeError(f"cannot interpret {budget!r} as a sweep budget")


@dataclass(frozen=True)
class BinStat:
    low: float
    high: float
    sup: float
    count: int
    witness: np.ndarray | None
    witness_phi_norm: float | None = None


@dataclass(frozen=True)
class CriterionEstimate:
    """Binned sup estimates of a boundary quantity plus the fitted trend."""

    name: str
    per_bin: tuple
    trend: str
    witness: np.ndarray | None
    vacuous: bool = False
    warnings: tuple = ()

    def last_nonempty(self, count=2):
        stats = [b for b in self.per_bin if b.count > 0]
        return stats[-count:]


@dataclass(frozen=True)
class CompactnessProxy:
    """Covering-number and tail-energy shadows of a relative-compactness set."""

    covering_numbers: dict
    tail_energy: dict
    radial_covering: dict
    sample_count: int
    saturated: bool
    consistent: bool
    warnings: tuple = ()


@dataclass(frozen=True)
class CompactnessVerdict:
    verdict: str
    reasons: tuple
    config_echo: dict


@dataclass(frozen=True)
class DiagnosticsConfig:
    seed: int = 42
    sweep: SweepBudget = field(default_factory=SweepBudget)
    c4_offdiag: int = 32
    delta: float = 0.9
    trend_zero_tol: float = TREND_ZERO_TOL
    trend_away_tol: float = TREND_AWAY_TOL


# ---------------------------------------------------------------------------
# pointwise quantities


def _guarded_ratio(num, denom):
    return num / np.maximum(denom, _TINY)


def q1(phi, z):
    """(1 - |z|^2) |R phi(z)| / sqrt(1 - |phi(z)|^2)."""
    z = np.asarray(z, dtype=np.complex128)
    v = phi(z)
    r = phi.radial(z)
    nz2 = float(np.sum(np.abs(z) ** 2))
    nv2 = float(np.sum(np.abs(v) ** 2))
    nr = float(np.linalg.norm(r))
    if nv2 >= 1.0:
        raise DomainError("phi(z) left the ball")
    gap = 1.0 - nv2
    if gap < 1e-12:
        # log-space guard near the boundary
        return math.exp(math.log(max(1.0 - nz2, _TINY)) + math.log(max(nr, _TINY)) - 0.5 * math.log(gap))
    return (1.0 - nz2) * nr / math.sqrt(gap)


def q2(phi, z):
    """(1 - |z|^2) |<phi(z), R phi(z)>| / (1 - |phi(z)|^2)."""
    z = np.asarray(z, dtype=np.complex128)
    v = phi(z)
    r = phi.radial(z)
    nz2 = float(np.sum(np.abs(z) ** 2))
    nv2 = float(np.sum(np.abs(v) ** 2))
    ip = abs(complex(np.vdot(r, v)))
    if nv2 >= 1.0:
        raise DomainError("phi(z) left the ball")
    gap = 1.0 - nv2
    if gap < 1e-12:
        return math.exp(math.log(max(1.0 - nz2, _TINY)) + math.log(max(ip, _TINY)) - math.log(gap))
    return (1.0 - nz2) * ip / gap


def _quantity_batch(phi, zs, quantity):
    """values plus the two binning keys (|phi(z)| and |z|) for a batch."""
    zs = np.asarray(zs, dtype=np.complex128)
    v = phi.value_batch(zs)
    nz2 = np.sum(np.abs(zs) ** 2, axis=1)
    nv2 = np.sum(np.abs(v) ** 2, axis=1)
    if quantity == "b0":
        r = phi.radial_batch(zs)
        vals = (1.0 - nz2) * np.linalg.norm(r, axis=1)
    elif quantity == "q1":
        r = phi.radial_batch(zs)
        vals = _guarded_ratio(
            (1.0 - nz2) * np.linalg.norm(r, axis=1), np.sqrt(np.maximum(1.0 - nv2, _TINY))
        )
    elif quantity == "q2":
        r = phi.radial_batch(zs)
        ip = np.abs(np.einsum("ij,ij->i", v, np.conj(r)))
        vals = _guarded_ratio((1.0 - nz2) * ip, 1.0 - nv2)
    else:
        raise ValueError(f"unknown sweep quantity {quantity!r}")
    return vals, np.sqrt(np.minimum(nv2, 1.0)), np.sqrt(nz2)


# ---------------------------------------------------------------------------
# binned sweeps


class _BinAccumulator:
    def __init__(self, depth):
        self.depth = depth
        # past this key the gap 1 - |.|^2 cancels below ~1e-9 relative
        # accuracy, so those samples are not resolvable by the schedule
        self.key_cap = 1.0 - 0.5 ** (depth + 2)
        self.sups = np.full(depth, -np.inf)
        self.counts = np.zeros(depth, dtype=np.int64)
        self.witnesses = [None] * depth
        self.phi_norms = [None] * depth

    def add(self, keys, vals, points, phi_norms=None):
        keep = keys <= self.key_cap
        if not np.all(keep):
            keys, vals, points = keys[keep], vals[keep], points[keep]
            if phi_norms is not None:
                phi_norms = phi_norms[keep]
        if keys.size == 0:
            return
        gap = np.maximum(1.0 - keys, 1e-300)
        idx = np.clip(np.floor(-np.log2(gap)).astype(np.int64), 0, self.depth - 1)
        for j in np.unique(idx):
            sel = idx == j
            self.counts[j] += int(np.sum(sel))
            local = np.argmax(vals[sel])
            if vals[sel][local] > self.sups[j]:
                self.sups[j] = vals[sel][local]
                self.witnesses[j] = np.array(points[sel][local])
                if phi_norms is not None:
                    self.phi_norms[j] = float(phi_norms[sel][local])

    def stats(self):
        lows = 1.0 - 0.5 ** np.arange(self.depth)
        highs = 1.0 - 0.5 ** (np.arange(self.depth) + 1.0)
        out = []
        for j in range(self.depth):
            out.append(
                BinStat(
                    low=float(lows[j]),
                    high=float(highs[j]),
                    sup=float(self.sups[j]) if self.counts[j] else 0.0,
                    count=int(self.counts[j]),
                    witness=self.witnesses[j],
                    witness_phi_norm=self.phi_norms[j],
                )
            )
        return tuple(out)


def _decide_trend(stats, vacuous_cutoff, zero_tol, away_tol):
    """Trend from the last two schedule bins; unreachable bins count as zero."""
    warnings = []
    tail = stats[-2:]
    sups = []
    for b in tail:
        if b.count == 0:
            if vacuous_cutoff is not None and b.low >= vacuous_cutoff - 1e-12:
                sups.append(0.0)
            else:
                sups.append(None)
        else:
            sups.append(b.sup)
    empty = [b.low for b in stats if b.count == 0]
    if empty:
        warnings.append(f"{len(empty)} empty bins (first at {empty[0]:.6g})")
    if any(s is None for s in sups):
        return "inconclusive", tuple(warnings)
    if all(s <= zero_tol for s in sups):
        return "to_zero", tuple(warnings)
    if all(s >= away_tol for s in sups):
        return "bounded_away", tuple(warnings)
    return "inconclusive", tuple(warnings)


def _sweep(phi, quantity, mode, budget, rng, name, zero_tol=TREND_ZERO_TOL, away_tol=TREND_AWAY_TOL):
    budget = SweepBudget.coerce(budget)
    n = phi.n
    acc = _BinAccumulator(budget.depth)
    key_index = 0 if mode == "phi" else 1

    def feed(points):
        vals, key_phi, key_z = _quantity_batch(phi, points, quantity)
        keys = key_phi if key_index == 0 else key_z
        acc.add(keys, vals, points, phi_norms=key_phi)

    # probe rays with a log-refined radius ladder
    u_max = budget.depth + budget.extra_depth
    us = np.linspace(0.0, u_max, budget.ray_grid)
    ts = 1.0 - 0.5**us
    ts = ts[ts > 0.0]
    rays = [d / np.linalg.norm(d) for d in phi.probe_directions]
    extra = unit_directions(rng, 4, n)
    rays.extend(extra)
    for d in rays:
        feed(ts[:, None] * d[None, :])

    # stratified random cloud
    per = max(1, budget.samples // budget.depth)
    for j in range(budget.depth):
        r = 1.0 - 0.5 ** (j + 0.5)
        feed(r * unit_directions(rng, per, n))

    # zoom refinement around each populated bin's witness direction
    for _ in range(budget.refine):
        stats = acc.stats()
        for j, b in enumerate(stats):
            if b.count == 0 or b.witness is None:
                continue
            w = b.witness
            t_w = float(np.linalg.norm(w))
            if t_w == 0.0 or t_w >= 1.0:
                continue
            d = w / t_w
            u_w = -math.log2(max(1.0 - t_w, 1e-300))
            span = 0.35
            u_zoom = np.linspace(u_w - span, min(u_w + span, u_max), 64)
            t_zoom = 1.0 - 0.5 ** np.maximum(u_zoom, 0.0)
            t_zoom = t_zoom[t_zoom > 0.0]
            feed(t_zoom[:, None] * d[None, :])

    stats = acc.stats()
    cutoff = None
    vacuous = False
    if mode == "phi" and phi.sup_norm_bound is not None and phi.sup_norm_bound < 1.0:
        cutoff = phi.sup_norm_bound
        vacuous = any(b.count == 0 and b.low >= cutoff - 1e-12 for b in stats)
    trend, warnings = _decide_trend(stats, cutoff, zero_tol, away_tol)
    nonempty = [b for b in stats if b.count > 0]
    witness = nonempty[-1].witness if nonempty else None
    return CriterionEstimate(
        name=name, per_bin=stats, trend=trend, witness=witness, vacuous=vacuous, warnings=warnings
    )


def boundary_sweep(phi, quantity, mode, budget=None, seed=0, rng=None):
    """Binned sup estimates of q1/q2 with the bins keyed by |phi(z)| or |z|.

    ``mode`` is ``"phi"`` for the |phi(z)| -> 1 limits and ``"z"`` for the
    |z| -> 1 variants.
    """
    if quantity not in ("q1", "q2"):
        raise ValueError("quantity must be 'q1' or 'q2'")
    if mode not in ("phi", "z"):
        raise ValueError("mode must be 'phi' or 'z'")
    rng = rng or suite_rng(seed, f"sweep:{phi.label}:{quantity}:{mode}")
    name = {"q1": {"phi": "c1", "z": "c1_prime"}, "q2": {"phi": "c2", "z": "c11"}}[quantity][mode]
    return _sweep(phi, quantity, mode, budget, rng, name)


def b0_membership(phi, budget=None, seed=0, rng=None):
    """Sweep of (1 - |z|^2) |R phi(z)| in |z|; to_zero means the map is in
    the vanishing-radial-derivative class."""
    rng = rng or suite_rng(seed, f"b0:{phi.label}")
    return _sweep(phi, "b0", "z", budget, rng, "b0_membership")


# ---------------------------------------------------------------------------
# Schwarz-Pick residuals


@dataclass(frozen=True)
class SchwarzPickSlacks:
    sch2: float
    sl2: float
    sch3: float
    sch1: float | None
    skipped: tuple = ()


def schwarz_pick_residuals(phi, z):
    """Signed slacks (RHS - LHS) of the four Schwarz-Pick style inequalities.

    All four must be >= -1e-9 for any analytic self-map; degenerate points
    (phi(z) = 0 or R phi(z) = 0 or z = 0) skip the affected entries with
    slack 0.
    """
    z = np.asarray(z, dtype=np.complex128)
    v = phi(z)
    r = phi.radial(z)
    nz = float(np.linalg.norm(z))
    nv = float(np.linalg.norm(v))
    nr = float(np.linalg.norm(r))
    skipped = []

    if nv < 1e-14 or nz < 1e-14:
        sch2 = 0.0
        skipped.append("sch2")
    else:
        sch2 = nz * nv * (1.0 - nv**2) / (1.0 - nz**2) - abs(complex(np.vdot(v, r)))

    if nv < 1e-14 or nr < 1e-14 or nz < 1e-14:
        sl2 = 0.0
        skipped.append("sl2")
    else:
        align = abs(complex(np.vdot(v, r))) / (nr * nv)
        sl2 = 1.0 - ((1.0 - nz**2) / nz * nr + nv**2 * align**2)

    sch3 = 2.0 * math.sqrt(max(1.0 - nv**2, 0.0)) / (1.0 - nz**2) - nr

    sch1 = None
    if phi.fixes_origin:
        sch1 = nz - nv
    else:
        skipped.append("sch1")
    return SchwarzPickSlacks(sch2=sch2, sl2=sl2, sch3=sch3, sch1=sch1, skipped=tuple(skipped))


def schwarz_pick_batch(phi, zs):
    """Vectorized slacks over a batch; returns dict of arrays (nan = skipped)."""
    zs = np.asarray(zs, dtype=np.complex128)
    v = phi.value_batch(zs)
    r = phi.radial_batch(zs)
    nz = np.linalg.norm(zs, axis=1)
    nv = np.linalg.norm(v, axis=1)
    nr = np.linalg.norm(r, axis=1)
    ip = np.abs(np.einsum("ij,ij->i", v, np.conj(r)))

    out = {}
    with np.errstate(divide="ignore", invalid="ignore"):
        sch2 = nz * nv * (1.0 - nv**2) / (1.0 - nz**2) - ip
        sch2[(nv < 1e-14) | (nz < 1e-14)] = np.nan
        out["sch2"] = sch2

        align = ip / np.maximum(nr * nv, _TINY)
        sl2 = 1.0 - ((1.0 - nz**2) / np.maximum(nz, _TINY) * nr + nv**2 * align**2)
        sl2[(nv < 1e-14) | (nz < 1e-14) | (nr < 1e-14)] = np.nan
        out["sl2"] = sl2

        out["sch3"] = 2.0 * np.sqrt(np.maximum(1.0 - nv**2, 0.0)) / (1.0 - nz**2) - nr

        if phi.fixes_origin:
            out["sch1"] = nz - nv
        else:
            out["sch1"] = np.full_like(nz, np.nan)
    return out


# ---------------------------------------------------------------------------
# componentwise criteria


def component_criterion(phi, k, budget=None, seed=0, rng=None):
    """Sup estimate of (1 - |z|^2) |R phi_k(z)| / (1 - |phi_k(z)|^2).

    Searches every basis ray (the component may involve any coordinate),
    the family probes, and a random cloud; returns (value, witness).
    """
    budget = SweepBudget.coerce(budget)
    rng = rng or suite_rng(seed, f"component:{phi.label}:{k}")
    n = phi.n

    def values(zs):
        v = phi.value_batch(zs)[:, k]
        r = phi.radial_batch(zs)[:, k]
        nz2 = np.sum(np.abs(zs) ** 2, axis=1)
        return _guarded_ratio((1.0 - nz2) * np.abs(r), 1.0 - np.abs(v) ** 2)

    us = np.linspace(0.0, budget.depth + budget.extra_depth, budget.ray_grid)
    ts = 1.0 - 0.5**us
    ts = ts[ts > 0.0]
    best_val, best_arg = 0.0, np.zeros(n, dtype=np.complex128)
    rays = list(np.eye(n, dtype=np.complex128))
    rays.extend(d / np.linalg.norm(d) for d in phi.probe_directions)
    rays.extend(unit_directions(rng, 4, n))
    for d in rays:
        pts = ts[:, None] * d[None, :]
        vals = values(pts)
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val, best_arg = float(vals[i]), pts[i]
    cloud = unit_directions(rng, budget.samples, n) * (
        1.0 - 0.5 ** rng.uniform(0.0, budget.depth, size=(budget.samples, 1))
    )
    vals = values(cloud)
    i = int(np.argmax(vals))
    if vals[i] > best_val:
        best_val, best_arg = float(vals[i]), cloud[i]
    return best_val, best_arg


def component_trend(phi, budget=None, seed=0, zero_tol=TREND_ZERO_TOL, away_tol=TREND_AWAY_TOL):
    """The index-limit criterion: per-component sups A_k with a trend in k.

    One pass over the search points updates every component at once.
    """
    budget = SweepBudget.coerce(budget)
    rng = suite_rng(seed, f"c3:{phi.label}")
    n = phi.n
    best = np.zeros(n)
    wits = [None] * n

    def feed(zs):
        v = phi.value_batch(zs)
        r = phi.radial_batch(zs)
        nz2 = np.sum(np.abs(zs) ** 2, axis=1)
        vals = _guarded_ratio((1.0 - nz2)[:, None] * np.abs(r), 1.0 - np.abs(v) ** 2)
        for k in range(n):
            i = int(np.argmax(vals[:, k]))
            if vals[i, k] > best[k]:
                best[k] = vals[i, k]
                wits[k] = np.array(zs[i])

    us = np.linspace(0.0, budget.depth + budget.extra_depth, budget.ray_grid)
    ts = 1.0 - 0.5**us
    ts = ts[ts > 0.0]
    rays = list(np.eye(n, dtype=np.complex128))
    rays.extend(d / np.linalg.norm(d) for d in phi.probe_directions)
    rays.extend(unit_directions(rng, 4, n))
    for d in rays:
        feed(ts[:, None] * d[None, :])
    cloud = unit_directions(rng, budget.samples, n) * (
        1.0 - 0.5 ** rng.uniform(0.0, budget.depth, size=(budget.samples, 1))
    )
    feed(cloud)

    vals = [
        BinStat(low=float(k), high=float(k + 1), sup=float(best[k]), count=1, witness=wits[k])
        for k in range(n)
    ]
    tail = [b.sup for b in vals[-2:]]
    if all(v <= zero_tol for v in tail):
        trend = "to_zero"
    elif all(v >= away_tol for v in tail):
        trend = "bounded_away"
    else:
        trend = "inconclusive"
    return CriterionEstimate(
        name="c3", per_bin=tuple(vals), trend=trend, witness=vals[-1].witness
    )


def component_boundary_sweep(phi, k, budget=None, seed=0, rng=None):
    """Per-component boundary limit: the same ratio binned by |phi_k(z)|."""
    budget = SweepBudget.coerce(budget)
    rng = rng or suite_rng(seed, f"c3p:{phi.label}:{k}")
    n = phi.n
    acc = _BinAccumulator(budget.depth)

    def feed(zs):
        v = phi.value_batch(zs)[:, k]
        r = phi.radial_batch(zs)[:, k]
        nz2 = np.sum(np.abs(zs) ** 2, axis=1)
        vals = _guarded_ratio((1.0 - nz2) * np.abs(r), 1.0 - np.abs(v) ** 2)
        key = np.minimum(np.abs(v), 1.0)
        acc.add(key, vals, zs, phi_norms=key)

    us = np.linspace(0.0, budget.depth + budget.extra_depth, budget.ray_grid)
    ts = 1.0 - 0.5**us
    ts = ts[ts > 0.0]
    for d in list(np.eye(n, dtype=np.complex128)) + list(unit_directions(rng, 4, n)):
        feed(ts[:, None] * d[None, :])
    stats = acc.stats()
    cutoff = phi.sup_norm_bound if (phi.sup_norm_bound is not None and phi.sup_norm_bound < 1.0) else None
    vacuous = cutoff is not None and any(b.count == 0 and b.low >= cutoff - 1e-12 for b in stats)
    trend, warnings = _decide_trend(stats, cutoff, TREND_ZERO_TOL, TREND_AWAY_TOL)
    nonempty = [b for b in stats if b.count > 0]
    return CriterionEstimate(
        name="c3_prime",
        per_bin=stats,
        trend=trend,
        witness=nonempty[-1].witness if nonempty else None,
        vacuous=vacuous,
        warnings=warnings,
    )


def scalar_criterion(F, budget=None, zero_tol=TREND_ZERO_TOL, away_tol=TREND_AWAY_TOL):
    """Disk sweep of (1 - |l|^2) |F'(l)| / (1 - |F(l)|^2) binned by |F(l)|.

    The scalar composition operator is compact exactly when this tends to 0
    as |F(l)| -> 1, and the condition holds vacuously when the range of F
    stays inside a strictly smaller disk.
    """
    budget = SweepBudget.coerce(budget)
    acc = _BinAccumulator(budget.depth)
    us = np.linspace(0.0, budget.depth + budget.extra_depth, budget.ray_grid)
    ts = 1.0 - 0.5**us
    ts = ts[ts > 0.0]
    phases = np.exp(2j * np.pi * np.arange(16) / 16)
    lams = (ts[:, None] * phases[None, :]).ravel()
    coarse = lams[:: max(1, len(lams) // 256)]
    observed = float(np.max(np.abs(F.value_batch(coarse))))
    if observed < 1e-12:
        # empirically null component: confirm the derivative on the coarse
        # grid instead of sweeping the full one
        dvals = F.derivative_batch(coarse)
        vals = _guarded_ratio(
            (1.0 - np.abs(coarse) ** 2) * np.abs(dvals), np.ones(len(coarse))
        )
        acc.add(np.zeros(len(coarse)), vals, coarse[:, None], phi_norms=np.abs(F.value_batch(coarse)))
    else:
        fvals = F.value_batch(lams)
        dvals = F.derivative_batch(lams)
        vals = _guarded_ratio((1.0 - np.abs(lams) ** 2) * np.abs(dvals), 1.0 - np.abs(fvals) ** 2)
        key = np.minimum(np.abs(fvals), 1.0)
        acc.add(key, vals, lams[:, None], phi_norms=key)
        observed = float(np.max(np.abs(fvals)))
    stats = acc.stats()

    cutoff = F.sup_norm_bound if (F.sup_norm_bound is not None and F.sup_norm_bound < 1.0) else None
    warnings = ()
    if cutoff is None and observed < 0.5:
        cutoff = observed + 1e-9
        warnings = ("sup-norm cutoff is empirical, not certified",)
    vacuous = cutoff is not None and any(b.count == 0 and b.low >= cutoff - 1e-12 for b in stats)
    trend, trend_warnings = _decide_trend(stats, cutoff, zero_tol, away_tol)
    nonempty = [b for b in stats if b.count > 0]
    return CriterionEstimate(
        name="c4",
        per_bin=stats,
        trend=trend,
        witness=nonempty[-1].witness if nonempty else None,
        vacuous=vacuous,
        warnings=warnings + trend_warnings,
    )


# ---------------------------------------------------------------------------
# the distinguished boundary direction and its pairing lower bound


def xi_direction(phi, z):
    """Unit vector xi = phi(z) + sqrt(1 - |phi(z)|^2) eta(z) and the slack of
    the lower bound on |<R phi(z), xi>|.

    eta is the normalized component of R phi(z) orthogonal to phi(z); when
    that component vanishes eta falls back to the lowest-index basis vector
    orthogonalized against phi(z).
    """
    z = np.asarray(z, dtype=np.complex128)
    v = phi(z)
    r = phi.radial(z)
    nv = float(np.linalg.norm(v))
    nr = float(np.linalg.norm(r))
    if nv < 1e-14 or nr < 1e-14:
        raise DomainError("xi direction needs phi(z) != 0 and R phi(z) != 0")
    if phi.n == 1:
        raise DomainError("no direction orthogonal to phi(z) exists when n = 1")
    u = r - (np.vdot(v, r) / nv**2) * v
    nu = float(np.linalg.norm(u))
    if nu > 1e-12:
        eta = u / nu
    else:
        eta = None
        for j in range(phi.n):
            e = np.zeros(phi.n, dtype=np.complex128)
            e[j] = 1.0
            cand = e - (np.vdot(v, e) / nv**2) * v
            nc = float(np.linalg.norm(cand))
            if nc > 1e-9:
                eta = cand / nc
                break
        if eta is None:
            raise DomainError("could not orthogonalize against phi(z)")
    s = math.sqrt(max(1.0 - nv**2, 0.0))
    xi = v + s * eta
    ip_vr = abs(complex(np.vdot(v, r)))
    bound = s * nr - (1.0 + s / nv) * ip_vr
    slack = abs(complex(np.vdot(xi, r))) - bound
    return xi, slack


# ---------------------------------------------------------------------------
# relative-compactness proxies


def _cover_profile(points, delta, fractions=(0.5, 0.3, 0.15)):
    pts = np.concatenate([points.real, points.imag], axis=1)
    half = pts[: len(pts) // 2]
    profile = {}
    for frac in fractions:
        eps = frac * delta
        profile[round(eps, 12)] = (
            greedy_cover_count(half, eps),
            greedy_cover_count(pts, eps),
        )
    return profile


def compactness_proxy_c0(phi, delta, budget=None, mode="z_ball", seed=0, rng=None):
    """Finite-dimensional shadow of the relative-compactness conditions.

    ``mode="z_ball"`` samples |z| <= delta (the necessary condition on
    images of sub-balls); ``mode="phi_ball"`` keeps samples with
    |phi(z)| <= delta and also profiles {(1-|z|^2) R phi(z)} (the
    sufficiency hypothesis).  Covering numbers that keep growing when the
    sample doubles flag the set as non-compact-consistent.
    """
    if not 0.0 < delta < 1.0:
        raise DomainError("delta must lie in (0, 1)")
    budget = SweepBudget.coerce(budget)
    rng = rng or suite_rng(seed, f"c0:{phi.label}:{mode}")
    n = phi.n
    m = max(budget.samples, 512)
    if mode == "z_ball":
        zs = unit_directions(rng, m, n) * (delta * rng.uniform(size=(m, 1)) ** (1.0 / (2 * n)))
        images = phi.value_batch(zs)
        radial_pts = np.zeros((0, n), dtype=np.complex128)
        kept = m
    elif mode == "phi_ball":
        zs = unit_directions(rng, 2 * m, n) * (
            1.0 - 0.5 ** rng.uniform(0.0, budget.depth, size=(2 * m, 1))
        )
        images = phi.value_batch(zs)
        keep = np.linalg.norm(images, axis=1) <= delta
        zs, images = zs[keep], images[keep]
        kept = int(np.sum(keep))
        w = 1.0 - np.sum(np.abs(zs) ** 2, axis=1)
        radial_pts = w[:, None] * phi.radial_batch(zs)
    else:
        raise ValueError("mode must be 'z_ball' or 'phi_ball'")

    warnings = []
    if kept < 100:
        warnings.append(f"only {kept} samples in the {mode} region; proxy unstable")

    covering = _cover_profile(images, delta) if kept else {}
    radial_cover = _cover_profile(radial_pts, delta) if len(radial_pts) else {}

    tail = {}
    energy = np.abs(images) ** 2
    for kfrac in (0.25, 0.5, 0.75):
        cut = max(1, int(kfrac * n))
        tail[cut] = float(np.max(np.sum(energy[:, cut:], axis=1))) if kept else 0.0

    def saturated_at(profile):
        if not profile:
            return True
        eps = sorted(profile)[len(profile) // 2]
        half, full = profile[eps]
        return full <= math.ceil(1.1 * half)

    saturated = saturated_at(covering) and saturated_at(radial_cover)
    consistent = saturated and tail.get(max(1, n // 2), 0.0) <= 0.05
    return CompactnessProxy(
        covering_numbers=covering,
        tail_energy=tail,
        radial_covering=radial_cover,
        sample_count=kept,
        saturated=saturated,
        consistent=consistent,
        warnings=tuple(warnings),
    )


# ---------------------------------------------------------------------------
# combined verdict


def _outcome_of(estimate, passing="to_zero"):
    if estimate.vacuous:
        return "vacuous"
    if estimate.trend == passing:
        return "pass"
    if estimate.trend == "bounded_away":
        return "fail"
    return "inconclusive"


def compactness_report(phi, config=None):
    """Run the full criteria battery and assemble the three-valued verdict.

    Necessary-side failures (a boundary quantity bounded away from zero, a
    component criterion stuck above tolerance, a non-compact scalar
    component, growing covering numbers) are decisive for noncompactness.
    The sufficient side passes through one of the three routes: certified
    sup norm < 1 with a compact-consistent range, the two boundary limits
    plus the sub-level compactness hypothesis, or the vanishing-radial class
    with origin fixed and the |z| -> 1 limits.  Anything else is
    inconclusive.
    """
    config = config or DiagnosticsConfig()
    rng = suite_rng(config.seed, f"report:{phi.label}")
    budget = config.sweep
    reasons = []

    c1 = boundary_sweep(phi, "q1", "phi", budget, rng=rng)
    c2 = boundary_sweep(phi, "q2", "phi", budget, rng=rng)
    c1p = boundary_sweep(phi, "q1", "z", budget, rng=rng)
    c11 = boundary_sweep(phi, "q2", "z", budget, rng=rng)
    c3 = component_trend(phi, budget, seed=config.seed)
    b0 = b0_membership(phi, budget, rng=rng)

    reasons.append(("c1", "necessary", _outcome_of(c1)))
    reasons.append(("c2", "necessary", _outcome_of(c2)))
    reasons.append(("c3", "necessary", _outcome_of(c3)))

    # c4: diagonal components plus a sample of off-diagonal pairs
    n = phi.n
    pairs = [(k, k) for k in range(n)]
    if n > 1 and config.c4_offdiag > 0:
        ks = rng.integers(0, n, size=config.c4_offdiag)
        ls = rng.integers(0, n, size=config.c4_offdiag)
        pairs.extend((int(k), int(l)) for k, l in zip(ks, ls) if k != l)
    c4_fail = None
    c4_all_decided = True
    for k, l in pairs:
        est = scalar_criterion(restrict_component(phi, k, l), budget)
        if est.trend == "bounded_away" and not est.vacuous:
            c4_fail = (k, l, est)
            break
        if est.trend == "inconclusive" and not est.vacuous:
            c4_all_decided = False
    if c4_fail is not None:
        reasons.append(("c4", "necessary", "fail"))
    else:
        reasons.append(("c4", "necessary", "pass" if c4_all_decided else "inconclusive"))

    proxy_c0 = compactness_proxy_c0(phi, config.delta, budget, mode="z_ball", rng=rng)
    # decisive only when the covering keeps growing AND the tail carries mass;
    # growth alone can be a sampling artifact on a compact set of moderate
    # effective dimension
    tail_mid = proxy_c0.tail_energy.get(max(1, phi.n // 2), 0.0)
    if not proxy_c0.saturated and tail_mid > 0.05:
        c0_outcome = "fail"
    elif proxy_c0.consistent:
        c0_outcome = "pass"
    else:
        c0_outcome = "inconclusive"
    reasons.append(("c0_proxy", "necessary", c0_outcome))
    proxy_suff = compactness_proxy_c0(phi, config.delta, budget, mode="phi_ball", rng=rng)
    reasons.append(
        ("sufficiency_range_proxy", "sufficient", "pass" if proxy_suff.consistent else "inconclusive")
    )
    full_proxy = compactness_proxy_c0(phi, 0.999, budget, mode="z_ball", rng=rng)
    reasons.append(("b0_membership", "diagnostic", _outcome_of(b0)))

    necessary_failed = any(r[2] == "fail" and r[1] == "necessary" for r in reasons)

    path_supnorm = (
        phi.sup_norm_bound is not None
        and phi.sup_norm_bound < 1.0
        and full_proxy.consistent
    )
    path_main = (
        proxy_suff.consistent
        and _outcome_of(c1) in ("pass", "vacuous")
        and _outcome_of(c2) in ("pass", "vacuous")
    )
    path_b0 = (
        phi.fixes_origin
        and _outcome_of(b0) == "pass"
        and proxy_c0.consistent
        and _outcome_of(c1p) in ("pass", "vacuous")
        and _outcome_of(c11) in ("pass", "vacuous")
    )
    reasons.append(("sup_norm_inside_path", "sufficient", "pass" if path_supnorm else "inconclusive"))
    reasons.append(("boundary_limits_path", "sufficient", "pass" if path_main else "inconclusive"))
    reasons.append(("b0_iff_path", "sufficient", "pass" if path_b0 else "inconclusive"))

    if necessary_failed:
        verdict = "noncompact_necessary_violated"
    elif path_supnorm or path_main or path_b0:
        verdict = "compact_sufficient"
    else:
        verdict = "inconclusive"

    echo = {
        "seed": config.seed,
        "delta": config.delta,
        "samples": budget.samples,
        "depth": budget.depth,
        "c4_offdiag": config.c4_offdiag,
    }
    return CompactnessVerdict(verdict=verdict, reasons=tuple(reasons), config_echo=echo), {
        "c1": c1,
        "c2": c2,
        "c1_prime": c1p,
        "c11": c11,
        "c3": c3,
        "b0": b0,
        "c0_proxy": proxy_c0,
        "sufficiency_proxy": proxy_suff,
        "full_range_proxy": full_proxy,
    }
