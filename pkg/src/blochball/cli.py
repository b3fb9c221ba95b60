"""Batch front-end: seeded verification suites, symbol diagnostics, and
boundary sweeps, with text/json/csv reports.

Every check records a signed slack (nonnegative means the property held at
its tolerance), an anchor string describing the mathematical statement being
exercised, and the worst witness found.  JSON output is byte-stable for a
fixed (config, seed); wall times appear only in the text report.  The
process exits nonzero exactly when some non-vacuous check fails.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__, bloch, diagnostics as dg, holo
from .ball import MobiusAutomorphism, hyperbolic_pairs, pseudo_hyperbolic_pairs
from .errors import SpecValidationError
from .holo import QuadratureConfig
from .sampling import SearchBudget, interior_points, suite_rng, unit_directions
from .symbols import SymbolSpec, build_symbol, pullback, restrict_component

SUITE_NAMES = (
    "mobius",
    "metrics",
    "gradients",
    "seminorms",
    "schwarz_pick",
    "boundedness",
    "necessity",
    "sufficiency",
    "examples",
)

#: property checks sample inside this radius; the 1e-4 boundary margin keeps
#: inverse-boundary factors ~1e5 above roundoff, matching 1e-9 tolerances
PROP_RMAX = 1.0 - 1e-4

EQUIV = bloch.EQUIV_FACTOR
SQRT5 = math.sqrt(5.0)


@dataclass(frozen=True)
class RunConfig:
    dimension: int = 16
    seed: int = 42
    suites: tuple = SUITE_NAMES
    symbols: tuple = ()
    search: SearchBudget = field(default_factory=SearchBudget)
    sweep: dg.SweepBudget = field(default_factory=dg.SweepBudget)
    property_samples: int = 10_000
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    tolerances: dict = field(default_factory=dict)
    out: str | None = None
    format: str = "text"


@dataclass
class CheckResult:
    id: str
    anchor: str
    status: str  # pass | fail | skip | vacuous
    slack: float | None = None
    witness: list | None = None
    detail: str = ""
    sweep: object = None
    sweep_meta: tuple | None = None


@dataclass
class ReportRecord:
    suite: str
    checks: list
    wall_time: float


def parse_config(text) -> RunConfig:
    """Parse and validate the JSON run configuration, filling defaults."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise SpecValidationError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SpecValidationError("config must be a JSON object")

    known = {
        "dimension",
        "seed",
        "suites",
        "symbols",
        "budgets",
        "tolerances",
        "output",
        "property_samples",
    }
    unknown = set(doc) - known
    if unknown:
        raise SpecValidationError(f"unknown config fields: {sorted(unknown)}")

    suites = tuple(doc.get("suites", SUITE_NAMES))
    bad = [s for s in suites if s not in SUITE_NAMES]
    if bad:
        raise SpecValidationError(f"unknown suite names: {bad}; expected from {list(SUITE_NAMES)}")

    symbols = tuple(SymbolSpec.from_json(s) for s in doc.get("symbols", []))

    budgets = doc.get("budgets", {})
    search = SearchBudget(**budgets.get("search", {}))
    sweep = dg.SweepBudget(**budgets.get("sweep", {}))

    tolerances = {str(k): float(v) for k, v in doc.get("tolerances", {}).items()}

    output = doc.get("output", {})
    fmt = output.get("format", "text")
    if fmt not in ("text", "json", "csv"):
        raise SpecValidationError(f"output.format must be text, json, or csv, got {fmt!r}")

    return RunConfig(
        dimension=int(doc.get("dimension", 16)),
        seed=int(doc.get("seed", 42)),
        suites=suites,
        symbols=symbols,
        search=search,
        sweep=sweep,
        property_samples=int(doc.get("property_samples", 10_000)),
        tolerances=tolerances,
        out=output.get("path"),
        format=fmt,
    )


# ---------------------------------------------------------------------------
# suite context and check plumbing


class _Ctx:
    def __init__(self, cfg: RunConfig, suite: str):
        self.cfg = cfg
        self.n = cfg.dimension
        self.rng = suite_rng(cfg.seed, suite)
        self.search = cfg.search
        self.sweep = cfg.sweep
        self.m = cfg.property_samples

    def points(self, m=None, rmax=PROP_RMAX):
        return interior_points(self.rng, m or self.m, self.n, rmax=rmax)

    def tol(self, check_id, default):
        return self.cfg.tolerances.get(check_id, default)

    def builtin_symbols(self):
        n = self.n
        syms = [
            build_symbol(SymbolSpec("identity"), n),
            build_symbol(SymbolSpec("power"), n),
            build_symbol(SymbolSpec("block_power"), n),
            build_symbol(SymbolSpec("product_com1"), n) if n >= 2 else None,
            build_symbol(SymbolSpec("constant", {"c": 0.3 * np.eye(n)[0]}), n),
        ]
        a = np.zeros(n, dtype=np.complex128)
        a[0] = 0.4
        if n > 1:
            a[1] = 0.2j
        syms.append(build_symbol(SymbolSpec("automorphism", {"a": a}), n))
        if n >= 2:
            xi = [0.6 * e for e in np.eye(n)[: max(1, n // 2)]]
            syms.append(build_symbol(SymbolSpec("linear", {"xi": xi}), n))
        return [s for s in syms if s is not None]


def _witness(point):
    if point is None:
        return None
    arr = np.asarray(point).ravel()
    return [[float(z.real), float(z.imag)] for z in arr.astype(np.complex128)]


def _residual_check(residual, tol, witness=None, detail=""):
    """Pass when residual <= tol; slack is tol - residual."""
    slack = tol - residual
    return CheckResult(
        id="", anchor="", status="pass" if slack >= 0.0 else "fail",
        slack=float(slack), witness=_witness(witness), detail=detail,
    )


def _slack_check(slack, witness=None, detail=""):
    """Pass when a signed margin is nonnegative."""
    return CheckResult(
        id="", anchor="", status="pass" if slack >= 0.0 else "fail",
        slack=float(slack), witness=_witness(witness), detail=detail,
    )


def _trend_check(estimate, expected, symbol, quantity, detail=""):
    ok = estimate.trend == expected
    status = "vacuous" if (ok and estimate.vacuous) else ("pass" if ok else "fail")
    return CheckResult(
        id="", anchor="", status=status, slack=None,
        witness=_witness(estimate.witness),
        detail=detail or f"trend={estimate.trend} expected={expected}",
        sweep=estimate, sweep_meta=(symbol, quantity),
    )


def _worst(residuals, points):
    i = int(np.argmax(residuals))
    return float(residuals[i]), points[i]


# ---------------------------------------------------------------------------
# suites


def _suite_mobius(ctx):
    out = []
    n, rng = ctx.n, ctx.rng
    groups = max(1, ctx.m // 100)
    res_o = res_a = res_inv = res_cf = 0.0
    wit_o = wit_a = wit_inv = wit_cf = None
    for _ in range(groups):
        a = interior_points(rng, 1, n, rmax=PROP_RMAX)[0]
        auto = MobiusAutomorphism(a)
        xs = interior_points(rng, 100, n, rmax=PROP_RMAX)
        r = float(np.linalg.norm(auto(np.zeros(n)) - a))
        if r > res_o:
            res_o, wit_o = r, a
        r = float(np.linalg.norm(auto(a)))
        if r > res_a:
            res_a, wit_a = r, a
        back = auto.apply_batch(auto.apply_batch(xs))
        r, w = _worst(np.linalg.norm(back - xs, axis=1), xs)
        if r > res_inv:
            res_inv, wit_inv = r, w
        rho = pseudo_hyperbolic_pairs(np.broadcast_to(a, xs.shape), xs)
        direct = np.linalg.norm(auto.apply_batch(xs), axis=1)
        r, w = _worst(np.abs(rho - direct), xs)
        if r > res_cf:
            res_cf, wit_cf = r, w

    out.append(("mobius.maps_origin_to_parameter",
                "the automorphism sends the origin to its parameter",
                _residual_check(res_o, ctx.tol("mobius.maps_origin_to_parameter", 1e-9), wit_o)))
    out.append(("mobius.maps_parameter_to_origin",
                "the automorphism sends its parameter to the origin",
                _residual_check(res_a, ctx.tol("mobius.maps_parameter_to_origin", 1e-9), wit_a)))
    out.append(("mobius.involution",
                "applying the automorphism twice returns the input",
                _residual_check(res_inv, ctx.tol("mobius.involution", 1e-9), wit_inv)))
    out.append(("mobius.closed_form_consistency",
                "norm of the automorphism image equals the closed-form distance",
                _residual_check(res_cf, ctx.tol("mobius.closed_form_consistency", 1e-9), wit_cf)))

    # derivative identities against an independent quadrature oracle
    res_q = 0.0
    res_pair = 0.0
    for _ in range(10):
        a = interior_points(rng, 1, n, rmax=0.9)[0]
        auto = MobiusAutomorphism(a)
        y = unit_directions(rng, 1, n)[0]
        # d/dlam phi_a(lam * y) at 0, componentwise circle quadrature
        nodes = 64
        lam = 0.3 * np.exp(2j * np.pi * np.arange(nodes) / nodes)
        vals = auto.apply_batch(lam[:, None] * y[None, :])
        quad = np.sum(vals / lam[:, None], axis=0) / nodes
        res_q = max(res_q, float(np.linalg.norm(quad - auto.derivative_origin(y))))
        res_pair = max(
            res_pair,
            float(np.linalg.norm(auto.derivative_fixed(auto.derivative_origin(y)) - y)),
        )
    out.append(("mobius.derivative_origin_quadrature",
                "derivative at the origin matches circle-quadrature differentiation",
                _residual_check(res_q, ctx.tol("mobius.derivative_origin_quadrature", 1e-10))))
    out.append(("mobius.derivative_inverse_pair",
                "derivatives at the origin and at the fixed parameter are mutually inverse",
                _residual_check(res_pair, ctx.tol("mobius.derivative_inverse_pair", 1e-10))))
    return out


def _suite_metrics(ctx):
    out = []
    n, rng = ctx.n, ctx.rng
    xs = ctx.points()
    ys = ctx.points()
    us = ctx.points()

    fwd = pseudo_hyperbolic_pairs(xs, ys)
    bwd = pseudo_hyperbolic_pairs(ys, xs)
    r, w = _worst(np.abs(fwd - bwd), xs)
    out.append(("metrics.symmetry", "pseudo-hyperbolic distance is symmetric",
                _residual_check(r, ctx.tol("metrics.symmetry", 1e-12), w)))

    xu = pseudo_hyperbolic_pairs(xs, us)
    uy = pseudo_hyperbolic_pairs(us, ys)
    viol = fwd - (xu + uy) / (1.0 + xu * uy)
    r, w = _worst(viol, xs)
    out.append(("metrics.sharpened_triangle",
                "sharpened triangle inequality for the pseudo-hyperbolic distance",
                _residual_check(r, ctx.tol("metrics.sharpened_triangle", 1e-9), w)))

    quot = np.linalg.norm(xs - ys, axis=1) / np.abs(
        1.0 - np.einsum("ij,ij->i", xs, np.conj(ys))
    )
    r, w = _worst(fwd - quot, xs)
    out.append(("metrics.quotient_bound",
                "distance bounded by the difference-over-pairing quotient",
                _residual_check(r, ctx.tol("metrics.quotient_bound", 1e-9), w)))

    beta = hyperbolic_pairs(xs, ys)
    r, w = _worst(np.abs(beta - np.arctanh(np.minimum(fwd, 1.0 - 1e-15))), xs)
    out.append(("metrics.beta_atanh",
                "hyperbolic distance is atanh of the pseudo-hyperbolic distance",
                _residual_check(r, ctx.tol("metrics.beta_atanh", 1e-12), w)))

    zs = interior_points(rng, ctx.m, 1, rmax=PROP_RMAX)
    ws = interior_points(rng, ctx.m, 1, rmax=PROP_RMAX)
    disk = np.abs((zs[:, 0] - ws[:, 0]) / (1.0 - np.conj(zs[:, 0]) * ws[:, 0]))
    r, wv = _worst(np.abs(pseudo_hyperbolic_pairs(zs, ws) - disk), zs)
    out.append(("metrics.scalar_disk_oracle",
                "one-dimensional case matches the disk formula",
                _residual_check(r, ctx.tol("metrics.scalar_disk_oracle", 1e-10), wv)))

    worst = -np.inf
    wit = None
    fam = None
    for sym in ctx.builtin_symbols():
        fx = sym.value_batch(xs)
        fy = sym.value_batch(ys)
        viol = pseudo_hyperbolic_pairs(fx, fy) - fwd
        r, w = _worst(viol, xs)
        if r > worst:
            worst, wit, fam = r, w, sym.label
    out.append(("metrics.contractivity",
                "analytic self-maps contract the pseudo-hyperbolic distance",
                _residual_check(worst, ctx.tol("metrics.contractivity", 1e-9), wit,
                                detail=f"worst family: {fam}")))
    return out


def _gradient_test_functions(ctx):
    n, rng = ctx.n, ctx.rng
    fams = [
        holo.coordinate(0, n),
        holo.monomial({0: 2}, n),
        holo.log_kernel(interior_points(rng, 1, n, rmax=0.9)[0]),
    ]
    if n >= 2:
        fams.append(holo.monomial({0: 1, 1: 1}, n))
    return fams


def _suite_gradients(ctx):
    out = []
    n, rng = ctx.n, ctx.rng
    fams = _gradient_test_functions(ctx)

    poly = holo.monomial({0: 3, min(1, n - 1): 1}, n)
    res = 0.0
    for _ in range(10):
        x = interior_points(rng, 1, n, rmax=0.7)[0]
        u = unit_directions(rng, 1, n)[0]
        d32 = holo.directional_derivative(poly, x, u, QuadratureConfig(nodes=32))
        d64 = holo.directional_derivative(poly, x, u, QuadratureConfig(nodes=64))
        res = max(res, abs(d32 - d64))
    out.append(("gradients.node_doubling",
                "circle quadrature is spectrally accurate on polynomials",
                _residual_check(res, ctx.tol("gradients.node_doubling", 1e-12))))

    res, wit = 0.0, None
    for _ in range(25):
        x = interior_points(rng, 1, n, rmax=0.85)[0]
        for f in fams:
            d = np.linalg.norm(
                holo.invariant_gradient(f, x) - holo.invariant_gradient_direct(f, x)
            )
            if d > res:
                res, wit = float(d), x
    out.append(("gradients.transpose_vs_direct",
                "invariant gradient via transposed derivative matches direct quadrature",
                _residual_check(res, ctx.tol("gradients.transpose_vs_direct", 1e-7), wit)))

    res, wit = 0.0, None
    for _ in range(8):
        x = interior_points(rng, 1, n, rmax=0.85)[0]
        for f in fams:
            d = abs(
                holo.invariant_gradient_norm(f, x)
                - np.linalg.norm(holo.invariant_gradient(f, x))
            )
            if d > res:
                res, wit = float(d), x
    out.append(("gradients.norm_closed_form",
                "closed-form invariant gradient norm matches the direct norm",
                _residual_check(res, ctx.tol("gradients.norm_closed_form", 1e-6), wit)))

    res, wit = 0.0, None
    for _ in range(20):
        x = interior_points(rng, 1, n, rmax=0.9)[0]
        nx2 = float(np.sum(np.abs(x) ** 2))
        if nx2 < 1e-8:
            continue
        s = math.sqrt(1.0 - nx2)
        for f in fams:
            g = holo.gradient(f, x)
            ig = holo.invariant_gradient(f, x)
            lhs = s**2 * g + s * ig
            rhs = (s - 1.0) * (np.sum(x * ig) / nx2) * np.conj(x)
            d = float(np.abs(lhs - rhs).max())
            if d > res:
                res, wit = d, x
    out.append(("gradients.exchange_identity",
                "gradient and invariant gradient satisfy the rank-one exchange identity",
                _residual_check(res, ctx.tol("gradients.exchange_identity", 1e-8), wit)))

    # the composed integrand has a pole at radius 1/|x|^2, so 64 nodes are
    # spectrally clean only with |x| away from the sphere
    polys = [holo.monomial({0: 1}, n), holo.monomial({0: 2}, n), holo.monomial({0: 2, min(1, n - 1): 2}, n)]
    res, wit = 0.0, None
    for _ in range(20):
        x = interior_points(rng, 1, n, rmax=0.8)[0]
        if np.linalg.norm(x) < 1e-6:
            continue
        wgt = 1.0 - float(np.sum(np.abs(x) ** 2))
        for f in polys:
            d = abs(
                holo.radial_boundary_integral(f, x, nodes=64)
                - wgt * holo.radial_derivative(f, x)
            )
            if d > res:
                res, wit = float(d), x
    out.append(("gradients.boundary_integral",
                "weighted radial derivative equals the boundary circle integral",
                _residual_check(res, ctx.tol("gradients.boundary_integral", 1e-8), wit)))

    zs = ctx.points(2000, rmax=0.99)
    worst = -np.inf
    wit = None
    for f in fams:
        der = bloch.pointwise_values(f, zs, "derivative")
        inv = bloch.pointwise_values(f, zs, "invariant")
        r, w = _worst(der - inv, zs)
        if r > worst:
            worst, wit = r, w
    out.append(("gradients.pointwise_order",
                "weighted gradient norm is dominated by the invariant gradient norm",
                _residual_check(worst, ctx.tol("gradients.pointwise_order", 1e-9), wit)))
    return out


def _suite_seminorms(ctx):
    out = []
    n, rng = ctx.n, ctx.rng
    budget = ctx.search
    lin = holo.coordinate(0, n)

    est_der = bloch.estimate_seminorm(lin, "derivative", budget, seed=ctx.cfg.seed)
    slack = min(est_der.value - 0.999, 1.0 + 1e-9 - est_der.value)
    out.append(("seminorms.linear_derivative_unit",
                "unit linear functionals have derivative semi-norm one",
                _slack_check(slack - ctx.tol("seminorms.linear_derivative_unit", 0.0),
                             est_der.argmax, detail=f"estimate={est_der.value:.9f}")))

    target = bloch.RADIAL_LINEAR
    est_rad = bloch.estimate_seminorm(lin, "radial", budget, seed=ctx.cfg.seed)
    rel = abs(est_rad.value - target) / target
    out.append(("seminorms.linear_radial_value",
                "unit linear functionals have the one-variable radial semi-norm maximum",
                _residual_check(rel, ctx.tol("seminorms.linear_radial_value", 0.01),
                                est_rad.argmax, detail=f"estimate={est_rad.value:.9f}")))

    knowns = bloch.known_families(n, rng)
    worst_ord, worst_eq = -np.inf, -np.inf
    for known in knowns:
        der = bloch.estimate_seminorm(known.f, "derivative", budget, seed=ctx.cfg.seed)
        inv = bloch.estimate_seminorm(
            known.f, "invariant", budget, seed=ctx.cfg.seed, extra_starts=[der.argmax]
        )
        worst_ord = max(worst_ord, der.value - inv.value * (1.0 + 1e-6))
        worst_eq = max(worst_eq, inv.value - (EQUIV * known.bloch_seminorm + 1e-6))
    out.append(("seminorms.ordering",
                "derivative semi-norm estimate never exceeds the invariant estimate",
                _residual_check(worst_ord, ctx.tol("seminorms.ordering", 0.0))))
    out.append(("seminorms.equivalence_upper",
                "invariant estimate stays inside the equivalence band of the derivative semi-norm",
                _residual_check(worst_eq, ctx.tol("seminorms.equivalence_upper", 0.0))))

    one_d = holo.coordinate(0, 1)
    inv1 = bloch.estimate_seminorm(one_d, "invariant", budget, n=1, seed=ctx.cfg.seed)
    ratio1 = bloch.estimate_seminorm(one_d, "metric_ratio", budget, n=1, seed=ctx.cfg.seed)
    rel = abs(ratio1.value - inv1.value) / max(inv1.value, 1e-12)
    out.append(("seminorms.metric_ratio_one_dim",
                "difference-quotient semi-norm matches the invariant semi-norm in one variable",
                _residual_check(rel, ctx.tol("seminorms.metric_ratio_one_dim", 0.05),
                                detail=f"ratio={ratio1.value:.6f} invariant={inv1.value:.6f}")))

    xs = ctx.points(2000, rmax=0.97)
    worst, wit = -np.inf, None
    for known in knowns:
        if known.inv_seminorm is None:
            continue
        f0 = abs(known.f(np.zeros(n)))
        lx = np.maximum(
            0.5 * np.log((1.0 + np.linalg.norm(xs, axis=1)) / (1.0 - np.linalg.norm(xs, axis=1))),
            1.0,
        )
        viol = np.abs(known.f.value_batch(xs)) - lx * (known.inv_seminorm + f0)
        r, w = _worst(viol, xs)
        if r > worst:
            worst, wit = r, w
    out.append(("seminorms.eval_bound",
                "point evaluations are bounded by the growth factor times the norm",
                _residual_check(worst, ctx.tol("seminorms.eval_bound", 1e-9), wit)))

    worst, wit = -np.inf, None
    for known in knowns:
        f0 = known.f(np.zeros(n))
        r_ = np.linalg.norm(xs, axis=1)
        bound = 0.5 * known.bloch_seminorm * np.log((1.0 + r_) / (1.0 - r_))
        viol = np.abs(known.f.value_batch(xs) - f0) - bound
        r, w = _worst(viol, xs)
        if r > worst:
            worst, wit = r, w
    out.append(("seminorms.growth_bound",
                "function growth is controlled by the derivative semi-norm and the log factor",
                _residual_check(worst, ctx.tol("seminorms.growth_bound", 1e-9), wit)))

    worst = -np.inf
    for known in knowns:
        if known.sup_norm is None or known.bloch_seminorm >= known.sup_norm:
            continue
        est = bloch.estimate_seminorm(known.f, "derivative", budget, seed=ctx.cfg.seed)
        worst = max(worst, est.value - (known.sup_norm + 1e-6))
    out.append(("seminorms.hinf_bound",
                "bounded functions have derivative semi-norm at most their sup norm",
                _residual_check(worst, ctx.tol("seminorms.hinf_bound", 0.0))))

    delta = 0.5
    c_delta = bloch.lipschitz_constant(delta)
    worst, wit = -np.inf, None
    for known in knowns:
        for _ in range(50):
            x, xp = interior_points(rng, 2, n, rmax=delta)
            y, yp = unit_directions(rng, 2, n)
            lhs = abs(
                np.sum(y * holo.gradient(known.f, x)) - np.sum(yp * holo.gradient(known.f, xp))
            )
            rhs = c_delta * known.bloch_seminorm * (
                np.linalg.norm(x - xp) + (1.0 - delta) / 2.0 * np.linalg.norm(y - yp)
            )
            if lhs - rhs > worst:
                worst, wit = lhs - rhs, x
    out.append(("seminorms.gradient_lipschitz",
                "gradients are Lipschitz on sub-balls with the constructive constant",
                _residual_check(worst, ctx.tol("seminorms.gradient_lipschitz", 1e-9), wit)))
    return out


def _suite_schwarz_pick(ctx):
    out = []
    per_family = max(200, ctx.m // 4)
    worst = {"sch2": (np.inf, None, ""), "sl2": (np.inf, None, ""), "sch3": (np.inf, None, ""), "sch1": (np.inf, None, "")}
    for sym in ctx.builtin_symbols():
        zs = interior_points(ctx.rng, per_family, ctx.n, rmax=0.995)
        slacks = dg.schwarz_pick_batch(sym, zs)
        for name, arr in slacks.items():
            valid = ~np.isnan(arr)
            if not np.any(valid):
                continue
            i = int(np.argmin(np.where(valid, arr, np.inf)))
            if arr[i] < worst[name][0]:
                worst[name] = (float(arr[i]), zs[i], sym.label)
    anchors = {
        "sch2": "pairing of the radial derivative with the image is boundary-bounded",
        "sl2": "weighted radial derivative plus squared alignment stays below one",
        "sch3": "radial derivative norm obeys the square-root boundary bound",
        "sch1": "origin-fixing maps do not increase the norm",
    }
    for name in ("sch2", "sl2", "sch3", "sch1"):
        val, wit, fam = worst[name]
        if not math.isfinite(val):
            out.append((f"schwarz_pick.{name}", anchors[name],
                        CheckResult(id="", anchor="", status="skip", detail="no applicable samples")))
            continue
        tol = ctx.tol(f"schwarz_pick.{name}", -1e-9)
        res = _slack_check(val - tol, wit, detail=f"worst family: {fam}, slack {val:.3e}")
        out.append((f"schwarz_pick.{name}", anchors[name], res))
    return out


def _suite_boundedness(ctx):
    out = []
    n, rng = ctx.n, ctx.rng
    u = np.zeros(n)
    u[0] = 1.0
    f = holo.linear_functional(u)  # invariant semi-norm exactly one

    worst_sqrt5, wit5, fam5 = -np.inf, None, ""
    worst_contr, witc, famc = -np.inf, None, ""
    for sym in ctx.builtin_symbols():
        g = pullback(sym, f)
        zs = interior_points(rng, max(1000, ctx.m // 4), n, rmax=0.999)
        grads = g.gradient_batch(zs)
        wgt = 1.0 - np.sum(np.abs(zs) ** 2, axis=1)
        rad = np.abs(np.einsum("ij,ij->i", zs, grads))
        r, w = _worst(wgt * rad - SQRT5, zs)
        if r > worst_sqrt5:
            worst_sqrt5, wit5, fam5 = r, w, sym.label
        if sym.fixes_origin:
            inv = bloch.pointwise_values(g, zs, "invariant")
            r, w = _worst(inv - 1.0, zs)
            if r > worst_contr:
                worst_contr, witc, famc = r, w, sym.label
    out.append(("boundedness.sqrt5_bound",
                "weighted radial derivative of a composed unit-norm function stays below sqrt(5)",
                _residual_check(worst_sqrt5, ctx.tol("boundedness.sqrt5_bound", 1e-9), wit5,
                                detail=f"worst family: {fam5}")))
    out.append(("boundedness.invariant_contraction",
                "composition with an origin-fixing symbol does not increase the invariant semi-norm",
                _residual_check(worst_contr, ctx.tol("boundedness.invariant_contraction", 1e-6), witc,
                                detail=f"worst family: {famc}")))

    res, wit = 0.0, None
    fams = _gradient_test_functions(ctx)
    for sym in ctx.builtin_symbols()[:4]:
        for _ in range(5):
            z = interior_points(rng, 1, n, rmax=0.8)[0]
            for ff in fams:
                g = pullback(sym, ff)
                quad = holo.radial_derivative(
                    holo.AnalyticFunction(g._func, batch=g._batch), z
                )
                pairing = np.sum(holo.gradient(ff, sym(z)) * sym.radial(z))
                d = abs(quad - pairing)
                if d > res:
                    res, wit = float(d), z
    out.append(("boundedness.chain_rule",
                "radial derivative of a composition matches the gradient pairing",
                _residual_check(res, ctx.tol("boundedness.chain_rule", 1e-7), wit)))
    return out


def _suite_necessity(ctx):
    out = []
    n = ctx.n
    budget = ctx.sweep
    ident = build_symbol(SymbolSpec("identity"), n)

    est = dg.boundary_sweep(ident, "q2", "phi", budget, seed=ctx.cfg.seed)
    profile_ok = all(
        b.count == 0 or abs(b.sup - b.high**2) <= 0.02 * b.high**2 for b in est.per_bin
    )
    chk = _trend_check(est, "bounded_away", "identity", "q2")
    if chk.status == "pass" and not profile_ok:
        chk.status = "fail"
        chk.detail += "; bin sups deviate from the squared-radius profile"
    out.append(("necessity.identity_q2",
                "the identity symbol fails the pairing limit with unit boundary value",
                chk))
    out.append(("necessity.identity_q1",
                "the identity symbol passes the radial-derivative limit",
                _trend_check(dg.boundary_sweep(ident, "q1", "phi", budget, seed=ctx.cfg.seed),
                             "to_zero", "identity", "q1")))

    n_pow = max(n, 20)
    power = build_symbol(SymbolSpec("power"), n_pow)
    trend = dg.component_trend(power, budget, seed=ctx.cfg.seed)
    lb_ok = all(
        trend.per_bin[k].sup >= (1.0 - 1.0 / (k + 1)) ** ((k + 1) / 2.0) - 1e-9
        for k in range(1, min(20, n_pow))
    )
    chk = _trend_check(trend, "bounded_away", "power", "component")
    if chk.status == "pass" and not lb_ok:
        chk.status = "fail"
        chk.detail += "; componentwise lower bound violated"
    out.append(("necessity.power_component_criterion",
                "componentwise criterion of the coordinate-power symbol stays above its lower bound",
                chk))

    ok = True
    detail = []
    for variant in ("sum", "pow"):
        sym = build_symbol(SymbolSpec("block_power", {"variant": variant}), n)
        blocks = sym.family["block_sizes"]
        k = len(blocks) - 2  # a mid block index
        l = blocks[k]
        est = dg.scalar_criterion(restrict_component(sym, k, l), budget)
        last = est.last_nonempty(1)
        sup = last[0].sup if last else 0.0
        if est.trend != "bounded_away" or not (0.9 <= sup <= 1.0 + 1e-9):
            ok = False
        detail.append(f"{variant}: sup={sup:.4f} trend={est.trend}")
        verdict, _ = dg.compactness_report(sym, dg.DiagnosticsConfig(seed=ctx.cfg.seed, sweep=budget))
        if verdict.verdict != "noncompact_necessary_violated":
            ok = False
            detail.append(f"{variant}: verdict={verdict.verdict}")
    out.append(("necessity.block_power_scalar_limit",
                "even-power scalar restrictions have boundary limit one and force noncompactness",
                CheckResult(id="", anchor="", status="pass" if ok else "fail",
                            detail="; ".join(detail))))

    xi = list(np.eye(n))
    lin = build_symbol(SymbolSpec("linear", {"xi": xi}), n)
    est = dg.boundary_sweep(lin, "q2", "phi", budget, seed=ctx.cfg.seed)
    out.append(("necessity.unit_linear_q2",
                "an orthonormal coefficient system forces unit pairing limit along its rays",
                _trend_check(est, "bounded_away", "linear", "q2")))

    worst, wit = np.inf, None
    count = 0
    for sym in ctx.builtin_symbols():
        zs = interior_points(ctx.rng, 500, n, rmax=0.95)
        vv = sym.value_batch(zs)
        rr = sym.radial_batch(zs)
        okmask = (np.linalg.norm(vv, axis=1) > 1e-6) & (np.linalg.norm(rr, axis=1) > 1e-6)
        for z in zs[okmask][:200]:
            if n == 1:
                continue
            _, slack = dg.xi_direction(sym, z)
            count += 1
            if slack < worst:
                worst, wit = slack, z
    if count == 0:
        out.append(("necessity.xi_direction",
                    "the distinguished boundary direction satisfies its pairing lower bound",
                    CheckResult(id="", anchor="", status="skip", detail="no applicable samples")))
    else:
        out.append(("necessity.xi_direction",
                    "the distinguished boundary direction satisfies its pairing lower bound",
                    _slack_check(worst - ctx.tol("necessity.xi_direction", -1e-9), wit,
                                 detail=f"{count} samples")))
    return out


def _suite_sufficiency(ctx):
    out = []
    n = ctx.n      # product family needs n >= 2
    budget = ctx.sweep
    if n >= 2:
        prod = build_symbol(SymbolSpec("product_com1"), n)
        bound_sq = prod.sup_norm_bound**2
        zs = interior_points(ctx.rng, 4000, n, rmax=0.999)
        emp = float(np.max(np.sum(np.abs(prod.value_batch(zs)) ** 2, axis=1)))
        slack = min(0.2913 + 1e-6 - bound_sq, bound_sq - emp)
        out.append(("sufficiency.product_supnorm",
                    "partial products certify a squared sup norm below the series bound",
                    _slack_check(slack - ctx.tol("sufficiency.product_supnorm", 0.0),
                                 detail=f"certified={bound_sq:.6f} empirical={emp:.6f}")))

        verdict, est = dg.compactness_report(
            prod, dg.DiagnosticsConfig(seed=ctx.cfg.seed, sweep=budget)
        )
        ok = verdict.verdict == "compact_sufficient"
        proxy = est["full_range_proxy"]
        out.append(("sufficiency.product_verdict",
                    "the truncated product symbol is certified compact through its range",
                    CheckResult(id="", anchor="", status="pass" if ok else "fail",
                                detail=f"verdict={verdict.verdict} tail={proxy.tail_energy}")))

        half = build_symbol(SymbolSpec("product_com1"), max(2, n // 2))
        proxy_half = dg.compactness_proxy_c0(half, 0.9, budget, seed=ctx.cfg.seed)
        proxy_full = dg.compactness_proxy_c0(prod, 0.9, budget, seed=ctx.cfg.seed)
        stable = proxy_half.consistent and proxy_full.consistent
        out.append(("sufficiency.product_proxies_stable",
                    "covering and tail proxies of the product symbol are stable across truncations",
                    CheckResult(id="", anchor="", status="pass" if stable else "fail",
                                detail=f"tails: {proxy_half.tail_energy} / {proxy_full.tail_energy}")))

    xi_sub = [0.5 * e for e in np.eye(n)[: max(1, n // 2)]]
    fams = [build_symbol(SymbolSpec("linear", {"xi": xi_sub}), n)]
    if n >= 2:
        fams.append(build_symbol(SymbolSpec("linear", {"xi": list(np.eye(n))}), n))
        fams.append(build_symbol(SymbolSpec("product_com1"), n))

    b0_ok = all(dg.b0_membership(sym, budget, seed=ctx.cfg.seed).trend == "to_zero" for sym in fams[:1])
    out.append(("sufficiency.b0_linear",
                "linear-coefficient symbols have vanishing weighted radial derivative",
                CheckResult(id="", anchor="", status="pass" if b0_ok else "fail")))

    agree = True
    detail = []
    for sym in fams:
        if dg.b0_membership(sym, budget, seed=ctx.cfg.seed).trend != "to_zero" or not sym.fixes_origin:
            continue
        for quantity in ("q1", "q2"):
            a = dg.boundary_sweep(sym, quantity, "phi", budget, seed=ctx.cfg.seed)
            b = dg.boundary_sweep(sym, quantity, "z", budget, seed=ctx.cfg.seed)
            if a.trend != b.trend:
                agree = False
                detail.append(f"{sym.label}/{quantity}: {a.trend} vs {b.trend}")
    out.append(("sufficiency.mode_agreement",
                "for vanishing-radial origin-fixing symbols the two sweep modes agree",
                CheckResult(id="", anchor="", status="pass" if agree else "fail",
                            detail="; ".join(detail))))

    if n >= 2:
        xi_dec = [np.eye(n)[k] / (k + 2.0) for k in range(n)]
        sym = build_symbol(SymbolSpec("linear", {"xi": xi_dec}), n)
        proxy = dg.compactness_proxy_c0(sym, 0.9, budget, seed=ctx.cfg.seed)
        worst = -np.inf
        for cut, energy in proxy.tail_energy.items():
            bound = sum(1.0 / (k + 2.0) ** 2 for k in range(cut, n)) * 0.81
            worst = max(worst, energy - bound)
        out.append(("sufficiency.linear_tail_bound",
                    "tail energy of a square-summable linear symbol obeys the coefficient bound",
                    _residual_check(worst, ctx.tol("sufficiency.linear_tail_bound", 1e-12))))

        ortho = build_symbol(SymbolSpec("linear", {"xi": list(np.eye(n))}), n)
        proxy = dg.compactness_proxy_c0(ortho, 0.9, budget, seed=ctx.cfg.seed)
        out.append(("sufficiency.orthonormal_growth_flag",
                    "an orthonormal-image symbol is flagged non-compact-consistent",
                    CheckResult(id="", anchor="", status="pass" if not proxy.saturated else "fail",
                                detail=f"covering={proxy.covering_numbers}")))
    return out


def _suite_examples(ctx):
    out = []
    n = ctx.n
    cfg = dg.DiagnosticsConfig(seed=ctx.cfg.seed, sweep=ctx.sweep)
    table = [
        ("identity", SymbolSpec("identity"), "noncompact_necessary_violated"),
        ("power", SymbolSpec("power"), "noncompact_necessary_violated"),
        ("block_power_sum", SymbolSpec("block_power"), "noncompact_necessary_violated"),
        ("block_power_pow", SymbolSpec("block_power", {"variant": "pow"}), "noncompact_necessary_violated"),
    ]
    if n >= 2:
        table.extend(
            [
                ("product_com1", SymbolSpec("product_com1"), "compact_sufficient"),
                ("linear_unit_norm", SymbolSpec("linear", {"xi": list(np.eye(n))}), "noncompact_necessary_violated"),
            ]
        )
    if n >= 4:
        # geometric coefficient decay keeps the tail-energy proxy resolvable
        # at every truncation; the compact-range route then certifies it
        table.append(
            (
                "linear_square_summable",
                SymbolSpec("linear", {"xi": [np.eye(n)[k] * 0.5 ** (k + 1) for k in range(n)]}),
                "compact_sufficient",
            )
        )
    for name, spec, expected in table:
        sym = build_symbol(spec, n)
        verdict, _ = dg.compactness_report(sym, cfg)
        ok = verdict.verdict == expected
        fails = [r[0] for r in verdict.reasons if r[2] == "fail"]
        out.append((f"examples.{name}",
                    f"the {name.replace('_', ' ')} symbol reproduces its published verdict",
                    CheckResult(id="", anchor="", status="pass" if ok else "fail",
                                detail=f"verdict={verdict.verdict} expected={expected} fails={fails}")))
    return out


_SUITES = {
    "mobius": _suite_mobius,
    "metrics": _suite_metrics,
    "gradients": _suite_gradients,
    "seminorms": _suite_seminorms,
    "schwarz_pick": _suite_schwarz_pick,
    "boundedness": _suite_boundedness,
    "necessity": _suite_necessity,
    "sufficiency": _suite_sufficiency,
    "examples": _suite_examples,
}


def run_suite(cfg: RunConfig, suite: str) -> ReportRecord:
    """Run one suite; check crashes are captured as failures, never raised."""
    if suite not in _SUITES:
        raise SpecValidationError(f"unknown suite {suite!r}")
    ctx = _Ctx(cfg, suite)
    start = time.perf_counter()
    checks = []
    try:
        raw = _SUITES[suite](ctx)
    except Exception as exc:  # suite-level crash: one failing record
        raw = [(f"{suite}.crashed", "suite execution", CheckResult(
            id="", anchor="", status="fail", detail=f"{type(exc).__name__}: {exc}"))]
    for check_id, anchor, result in raw:
        result.id = check_id
        result.anchor = anchor
        checks.append(result)
    return ReportRecord(suite=suite, checks=checks, wall_time=time.perf_counter() - start)


def _summary(records):
    counts = {"pass": 0, "fail": 0, "skip": 0, "vacuous": 0}
    for rec in records:
        for c in rec.checks:
            counts[c.status] = counts.get(c.status, 0) + 1
    return counts


def emit_report(records, fmt, out_path=None, config_echo=None):
    """Serialize the report; json is byte-stable, text carries wall times."""
    records = sorted(records, key=lambda r: r.suite)
    if fmt == "json":
        doc = {
            "version": __version__,
            "config": config_echo or {},
            "summary": _summary(records),
            "suites": [
                {
                    "suite": rec.suite,
                    "checks": [
                        {
                            "id": c.id,
                            "anchor": c.anchor,
                            "status": c.status,
                            "slack": c.slack,
                            "witness": c.witness,
                            "detail": c.detail,
                        }
                        for c in rec.checks
                    ],
                }
                for rec in records
            ],
        }
        return (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode("utf-8")
    if fmt == "csv":
        buf = io.StringIO()
        buf.write("suite,check,status,slack,detail,anchor\n")
        for rec in records:
            for c in rec.checks:
                slack = "" if c.slack is None else f"{c.slack:.12g}"
                detail = c.detail.replace(",", ";")
                buf.write(f"{rec.suite},{c.id},{c.status},{slack},{detail},{c.anchor}\n")
        data = buf.getvalue().encode("utf-8")
        if out_path is not None:
            _write_sweep_companions(records, out_path)
        return data
    if fmt == "text":
        buf = io.StringIO()
        width = max((len(c.id) for rec in records for c in rec.checks), default=20)
        for rec in records:
            buf.write(f"suite {rec.suite} ({rec.wall_time:.2f}s)\n")
            for c in rec.checks:
                slack = "" if c.slack is None else f"slack={c.slack:+.3e}"
                extra = f"  {c.detail}" if c.detail else ""
                buf.write(f"  {c.id:<{width}}  {c.status:<8} {slack}{extra}\n")
        counts = _summary(records)
        total = sum(counts.values())
        buf.write(
            f"summary: {counts['pass']} pass, {counts['fail']} fail, "
            f"{counts['skip']} skip, {counts['vacuous']} vacuous ({total} checks)\n"
        )
        return buf.getvalue().encode("utf-8")
    raise SpecValidationError(f"unknown report format {fmt!r}")


def _sweep_csv_bytes(estimate):
    buf = io.StringIO()
    buf.write("bin_low,bin_high,sup,witness_norm,witness_phi_norm\n")
    for b in estimate.per_bin:
        if b.count == 0:
            continue
        wn = f"{np.linalg.norm(b.witness):.12g}" if b.witness is not None else ""
        pn = f"{b.witness_phi_norm:.12g}" if b.witness_phi_norm is not None else ""
        buf.write(f"{b.low:.12g},{b.high:.12g},{b.sup:.12g},{wn},{pn}\n")
    return buf.getvalue().encode("utf-8")


def _write_sweep_companions(records, out_path):
    base = os.path.dirname(os.path.abspath(out_path))
    for rec in records:
        for c in rec.checks:
            if c.sweep is None or c.sweep_meta is None:
                continue
            symbol, quantity = c.sweep_meta
            name = os.path.join(base, f"{rec.suite}_{symbol}_{quantity}.csv")
            with open(name, "wb") as fh:
                fh.write(_sweep_csv_bytes(c.sweep))


def exit_code(records):
    """Nonzero exactly when a non-vacuous check failed."""
    for rec in records:
        for c in rec.checks:
            if c.status == "fail":
                return 1
    return 0


# ---------------------------------------------------------------------------
# entry points


def _cmd_verify(args):
    if args.config:
        with open(args.config, "rb") as fh:
            cfg = parse_config(fh.read())
    else:
        cfg = parse_config("{}")
    overrides = {}
    if args.suite:
        bad = [s for s in args.suite if s not in SUITE_NAMES]
        if bad:
            raise SpecValidationError(f"unknown suite names: {bad}")
        overrides["suites"] = tuple(args.suite)
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.dim is not None:
        overrides["dimension"] = args.dim
    if args.format:
        overrides["format"] = args.format
    if args.out:
        overrides["out"] = args.out
    if overrides:
        cfg = replace(cfg, **overrides)

    records = [run_suite(cfg, s) for s in cfg.suites]
    echo = {"dimension": cfg.dimension, "seed": cfg.seed, "suites": list(cfg.suites)}
    payload = emit_report(records, cfg.format, out_path=cfg.out, config_echo=echo)
    if cfg.out:
        with open(cfg.out, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.buffer.write(payload)
    return exit_code(records)


def _load_symbol(path, dim):
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    spec = SymbolSpec.from_json(doc)
    return build_symbol(spec, dim)


def _cmd_diagnose(args):
    sym = _load_symbol(args.symbol, args.dim)
    budget = dg.SweepBudget(samples=args.budget) if args.budget else dg.SweepBudget()
    config = dg.DiagnosticsConfig(seed=args.seed, sweep=budget)
    verdict, estimates = dg.compactness_report(sym, config)
    print(f"symbol: {sym.label} (n={sym.n})")
    print(f"verdict: {verdict.verdict}")
    for name, role, outcome in verdict.reasons:
        print(f"  {name:28s} {role:10s} {outcome}")
    for key in ("c1", "c2", "c3", "b0"):
        est = estimates[key]
        tail = ", ".join(f"{b.sup:.4f}" for b in est.last_nonempty(3))
        print(f"  {key}: trend={est.trend}{' (vacuous)' if est.vacuous else ''} last sups [{tail}]")
    return 0


def _cmd_sweep(args):
    sym = _load_symbol(args.symbol, args.dim)
    budget = dg.SweepBudget(samples=args.budget) if args.budget else dg.SweepBudget()
    mode = {"phi": "phi", "z": "z"}[args.mode]
    est = dg.boundary_sweep(sym, args.quantity, mode, budget, seed=args.seed)
    data = _sweep_csv_bytes(est)
    with open(args.out, "wb") as fh:
        fh.write(data)
    print(f"{est.name}: trend={est.trend}{' (vacuous)' if est.vacuous else ''} -> {args.out}")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="blochball",
        description="verification suites and compactness diagnostics on the complex Hilbert ball",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run verification suites against a config")
    p_verify.add_argument("--config", help="JSON config path")
    p_verify.add_argument("--suite", action="append", help="suite name (repeatable)")
    p_verify.add_argument("--format", choices=["text", "json", "csv"])
    p_verify.add_argument("--out", help="write the report here instead of stdout")
    p_verify.add_argument("--seed", type=int)
    p_verify.add_argument("--dim", type=int)

    p_diag = sub.add_parser("diagnose", help="compactness report for one symbol")
    p_diag.add_argument("--symbol", required=True, help="JSON symbol spec path")
    p_diag.add_argument("--budget", type=int)
    p_diag.add_argument("--dim", type=int, default=16)
    p_diag.add_argument("--seed", type=int, default=42)

    p_sweep = sub.add_parser("sweep", help="boundary sweep of q1/q2 to CSV")
    p_sweep.add_argument("--symbol", required=True)
    p_sweep.add_argument("--quantity", choices=["q1", "q2"], required=True)
    p_sweep.add_argument("--mode", choices=["phi", "z"], required=True)
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--budget", type=int)
    p_sweep.add_argument("--dim", type=int, default=16)
    p_sweep.add_argument("--seed", type=int, default=42)

    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "diagnose":
            return _cmd_diagnose(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
    except SpecValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
