"""Ball-to-ball symbol maps: the built-in example families, component
restrictions, radial derivatives, and composition pullbacks.

Families certify what they can at construction time (ball preservation on
samples, origin fixing, an exact sup-norm bound where one is available) and
carry analytic radial derivatives and Jacobian-transpose actions so the
diagnostic sweeps stay cheap.  The generic quadrature path is kept alongside
as the cross-check.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from . import holo
from .ball import MobiusAutomorphism, as_coords
from .errors import DomainError, SpecValidationError
from .holo import AnalyticFunction

_VALIDATION_SAMPLES = 256


class ScalarDiskMap:
    """Analytic self-map of the unit disk with an optional analytic derivative."""

    def __init__(self, func, deriv=None, label="F", sup_norm_bound=None, batch=None, deriv_batch=None):
        self._func = func
        self._deriv = deriv
        self._batch = batch
        self._deriv_batch = deriv_batch
        self.label = label
        self.sup_norm_bound = sup_norm_bound

    def __call__(self, lam):
        return complex(self._func(complex(lam)))

    def value_batch(self, lams):
        lams = np.asarray(lams, dtype=np.complex128)
        if self._batch is not None:
            return np.asarray(self._batch(lams), dtype=np.complex128)
        return np.array([self._func(l) for l in lams], dtype=np.complex128)

    def derivative(self, lam, nodes=64):
        lam = complex(lam)
        if self._deriv is not None:
            return complex(self._deriv(lam))
        if abs(lam) >= 1.0:
            raise DomainError("scalar derivative needs an interior point")
        r = 0.25 * (1.0 - abs(lam))
        mu = r * np.exp(2j * np.pi * np.arange(nodes) / nodes)
        return complex(np.sum(self.value_batch(lam + mu) / mu) / nodes)

    def derivative_batch(self, lams, nodes=64):
        lams = np.asarray(lams, dtype=np.complex128)
        if self._deriv_batch is not None:
            return np.asarray(self._deriv_batch(lams), dtype=np.complex128)
        if self._deriv is not None:
            return np.array([self._deriv(l) for l in lams], dtype=np.complex128)
        return np.array([self.derivative(l, nodes) for l in lams], dtype=np.complex128)


def scalar_power(m):
    """F(lambda) = lambda^m."""
    if m < 1:
        raise SpecValidationError("scalar power needs exponent >= 1")
    return ScalarDiskMap(
        lambda l: l**m,
        deriv=lambda l: m * l ** (m - 1),
        label=f"lambda^{m}",
        sup_norm_bound=1.0,
        batch=lambda ls: ls**m,
        deriv_batch=lambda ls: m * ls ** (m - 1),
    )


def scalar_scaled_power(c, m=1):
    """F(lambda) = c lambda^m with |c| <= 1."""
    if abs(c) > 1.0:
        raise SpecValidationError("scaled power must keep the disk: |c| <= 1")
    if m < 1:
        raise SpecValidationError("scalar power needs exponent >= 1")
    return ScalarDiskMap(
        lambda l: c * l**m,
        deriv=lambda l: c * m * l ** (m - 1),
        label=f"{c}*lambda^{m}",
        sup_norm_bound=abs(c),
        batch=lambda ls: c * ls**m,
        deriv_batch=lambda ls: c * m * ls ** (m - 1),
    )


@dataclass(frozen=True)
class SymbolSpec:
    """Serializable description of a symbol family and its parameters."""

    family: str
    params: dict = field(default_factory=dict)

    def to_json(self):
        return {"family": self.family, **_params_to_json(self.params)}

    @classmethod
    def from_json(cls, doc):
        doc = dict(doc)
        family = doc.pop("family", None)
        if family is None:
            raise SpecValidationError("symbol spec needs a 'family' field")
        return cls(family=family, params=_params_from_json(family, doc))


def _cvec_to_json(vec):
    return [[float(z.real), float(z.imag)] for z in np.asarray(vec, dtype=np.complex128)]


def _cvec_from_json(pairs):
    arr = np.asarray(pairs, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise SpecValidationError("complex vectors serialize as [re, im] pairs")
    return arr[:, 0] + 1j * arr[:, 1]


def _params_to_json(params):
    out = {}
    for key, val in params.items():
        if key in ("a", "c"):
            out[key] = _cvec_to_json(val)
        elif key == "xi":
            out[key] = [_cvec_to_json(v) for v in val]
        elif key == "maps":
            out[key] = [
                {"kind": "power", "m": m} if c is None else {"kind": "scaled_power", "c": [c.real, c.imag], "m": m}
                for (c, m) in val
            ]
        else:
            out[key] = val
    return out


def _params_from_json(family, doc):
    params = {}
    for key, val in doc.items():
        if key in ("a", "c"):
            params[key] = _cvec_from_json(val)
        elif key == "xi":
            params[key] = [_cvec_from_json(v) for v in val]
        elif key == "maps":
            maps = []
            for entry in val:
                kind = entry.get("kind")
                if kind == "power":
                    maps.append((None, int(entry["m"])))
                elif kind == "scaled_power":
                    c = entry["c"]
                    maps.append((complex(c[0], c[1]), int(entry["m"])))
                else:
                    raise SpecValidationError(f"unknown scalar map kind {kind!r}")
            params[key] = maps
        else:
            params[key] = val
    return params


class SymbolMap:
    """Analytic self-map of the ball with batched evaluation hooks."""

    def __init__(
        self,
        n,
        func,
        batch=None,
        radial=None,
        radial_batch=None,
        jac_t=None,
        jac_t_batch=None,
        family=None,
        fixes_origin=False,
        sup_norm_bound=None,
        probe_directions=None,
        label="phi",
    ):
        self.n = n
        self._func = func
        self._batch = batch
        self._radial = radial
        self._radial_batch = radial_batch
        self._jac_t = jac_t
        self._jac_t_batch = jac_t_batch
        self.family = family or {"family": "custom"}
        self.fixes_origin = fixes_origin
        self.sup_norm_bound = sup_norm_bound
        self.label = label
        if probe_directions is None:
            probe_directions = np.eye(min(n, 8), n, dtype=np.complex128)
        self.probe_directions = np.asarray(probe_directions, dtype=np.complex128)
        self._radial_cache = {}
        self._cache_lock = threading.Lock()

    def __repr__(self):
        return f"SymbolMap({self.label!r}, n={self.n})"

    def __call__(self, z):
        return np.asarray(self._func(as_coords(z, self.n)), dtype=np.complex128)

    def value_batch(self, zs):
        zs = np.asarray(zs, dtype=np.complex128)
        if self._batch is not None:
            return np.asarray(self._batch(zs), dtype=np.complex128)
        return np.stack([self(z) for z in zs])

    @property
    def has_analytic_radial(self):
        return self._radial is not None

    @property
    def has_jacobian(self):
        return self._jac_t is not None

    def radial(self, z, nodes=64):
        """R phi(z) = phi'(z)(z); analytic when the family provides it."""
        z = as_coords(z, self.n)
        if self._radial is not None:
            return np.asarray(self._radial(z), dtype=np.complex128)
        return self._radial_quadrature(z, nodes)

    def radial_batch(self, zs, nodes=64):
        zs = np.asarray(zs, dtype=np.complex128)
        if self._radial_batch is not None:
            return np.asarray(self._radial_batch(zs), dtype=np.complex128)
        if self._radial is not None:
            return np.stack([np.asarray(self._radial(z)) for z in zs])
        return np.stack([self._radial_quadrature(z, nodes) for z in zs])

    def _radial_quadrature(self, z, nodes):
        zn = float(np.linalg.norm(z))
        if zn == 0.0:
            return np.zeros(self.n, dtype=np.complex128)
        if zn >= 1.0:
            raise DomainError("radial derivative needs an interior point")
        key = (z.tobytes(), nodes)
        with self._cache_lock:
            hit = self._radial_cache.get(key)
        if hit is not None:
            return hit.copy()
        r = 0.25 * (1.0 - zn)
        lam = r * np.exp(2j * np.pi * np.arange(nodes) / nodes)
        vals = self.value_batch((1.0 + lam)[:, None] * z[None, :])
        out = np.sum(vals / lam[:, None], axis=0) / nodes
        with self._cache_lock:
            self._radial_cache.setdefault(key, out.copy())
        return out

    def jac_t(self, z, g):
        """Plain-transpose Jacobian action phi'(z)^T g on coefficient vectors."""
        if self._jac_t is None:
            raise ValueError(f"{self.label} has no analytic jacobian")
        return np.asarray(self._jac_t(as_coords(z, self.n), as_coords(g, self.n)), dtype=np.complex128)

    def jac_t_batch(self, zs, gs):
        zs = np.asarray(zs, dtype=np.complex128)
        gs = np.asarray(gs, dtype=np.complex128)
        if self._jac_t_batch is not None:
            return np.asarray(self._jac_t_batch(zs, gs), dtype=np.complex128)
        return np.stack([self.jac_t(z, g) for z, g in zip(zs, gs)])

    def component(self, k):
        """phi_k as an analytic function handle."""
        if not 0 <= k < self.n:
            raise DomainError(f"component index {k} out of range for n={self.n}")
        e_k = np.zeros(self.n, dtype=np.complex128)
        e_k[k] = 1.0
        gradient = None
        gradient_batch = None
        if self._jac_t is not None:
            gradient = lambda z: self.jac_t(z, e_k)
            gradient_batch = lambda zs: self.jac_t_batch(zs, np.broadcast_to(e_k, zs.shape))
        return AnalyticFunction(
            lambda z: self(z)[k],
            label=f"{self.label}_{k}",
            gradient=gradient,
            batch=lambda zs: self.value_batch(zs)[:, k],
            gradient_batch=gradient_batch,
            dim=self.n,
        )


def radial_of_symbol(phi, z, nodes=64):
    """R phi(z) from the analytic formula when present, else quadrature."""
    return phi.radial(z, nodes=nodes)


def restrict_component(phi, k, l):
    """The scalar disk map lambda -> phi_k(lambda e_l)."""
    if not (0 <= k < phi.n and 0 <= l < phi.n):
        raise DomainError(f"component indices ({k}, {l}) out of range for n={phi.n}")
    e_l = np.zeros(phi.n, dtype=np.complex128)
    e_l[l] = 1.0
    e_k = np.zeros(phi.n, dtype=np.complex128)
    e_k[k] = 1.0
    deriv = None
    deriv_batch = None
    if phi.has_jacobian:
        deriv = lambda lam: phi.jac_t(lam * e_l, e_k)[l]
        deriv_batch = lambda lams: phi.jac_t_batch(
            lams[:, None] * e_l[None, :], np.broadcast_to(e_k, (lams.shape[0], phi.n))
        )[:, l]
    return ScalarDiskMap(
        lambda lam: phi(lam * e_l)[k],
        deriv=deriv,
        deriv_batch=deriv_batch,
        label=f"{phi.label}_{{{k},{l}}}",
        sup_norm_bound=phi.sup_norm_bound,
        batch=lambda lams: phi.value_batch(lams[:, None] * e_l[None, :])[:, k],
    )


def pullback(phi, f):
    """The composition f o phi with gradients chained when both sides allow."""
    gradient = None
    gradient_batch = None
    if f.has_gradient and phi.has_jacobian:
        gradient = lambda z: phi.jac_t(z, f.analytic_gradient(phi(z)))
        gradient_batch = lambda zs: phi.jac_t_batch(zs, f.gradient_batch(phi.value_batch(zs)))
    return AnalyticFunction(
        lambda z: f(phi(z)),
        label=f"{f.label}∘{phi.label}",
        gradient=gradient,
        batch=lambda zs: f.value_batch(phi.value_batch(zs)),
        gradient_batch=gradient_batch,
        dim=phi.n,
    )


# ---------------------------------------------------------------------------
# family builders


def _validate_ball_preservation(sym, rmax=0.999, seed=0):
    rng = np.random.default_rng(seed)
    zs = rng.standard_normal((_VALIDATION_SAMPLES, sym.n)) + 1j * rng.standard_normal(
        (_VALIDATION_SAMPLES, sym.n)
    )
    zs *= (rmax * rng.uniform(size=(_VALIDATION_SAMPLES, 1)) ** 0.25) / np.linalg.norm(
        zs, axis=1, keepdims=True
    )
    norms = np.linalg.norm(sym.value_batch(zs), axis=1)
    if not np.all(norms < 1.0):
        raise SpecValidationError(
            f"{sym.label}: image leaves the ball (max sampled norm {norms.max():.6f})"
        )
    if sym.fixes_origin:
        if np.linalg.norm(sym(np.zeros(sym.n))) > 1e-12:
            raise SpecValidationError(f"{sym.label}: declared origin-fixing but phi(0) != 0")
        zn = np.linalg.norm(zs, axis=1)
        if not np.all(norms <= zn + 1e-10):
            raise SpecValidationError(f"{sym.label}: Schwarz bound |phi(z)| <= |z| fails on samples")
    return sym


def _basis_probes(n, count=None):
    count = n if count is None else min(count, n)
    return np.eye(count, n, dtype=np.complex128)


def _build_identity(n, params):
    return SymbolMap(
        n,
        lambda z: z.copy(),
        batch=lambda zs: zs.copy(),
        radial=lambda z: z.copy(),
        radial_batch=lambda zs: zs.copy(),
        jac_t=lambda z, g: g.copy(),
        jac_t_batch=lambda zs, gs: gs.copy(),
        family={"family": "identity"},
        fixes_origin=True,
        label="identity",
        probe_directions=_basis_probes(n, 4),
    )


def _build_constant(n, params):
    c = as_coords(params.get("c", np.zeros(n)), n)
    if np.linalg.norm(c) >= 1.0:
        raise SpecValidationError("constant symbol must lie inside the ball")
    zero = np.zeros(n, dtype=np.complex128)
    return SymbolMap(
        n,
        lambda z: c.copy(),
        batch=lambda zs: np.broadcast_to(c, zs.shape).copy(),
        radial=lambda z: zero.copy(),
        radial_batch=lambda zs: np.zeros_like(zs),
        jac_t=lambda z, g: zero.copy(),
        jac_t_batch=lambda zs, gs: np.zeros_like(gs),
        family={"family": "constant", "c": c},
        fixes_origin=bool(np.linalg.norm(c) == 0.0),
        sup_norm_bound=float(np.linalg.norm(c)),
        label="constant",
        probe_directions=_basis_probes(n, 2),
    )


def _build_automorphism(n, params):
    a = as_coords(params["a"], n)
    auto = MobiusAutomorphism(a)
    na2 = auto.norm_a_sq
    s = auto.s_a
    ca = np.conj(a)

    def t_a_rows(vs):
        if na2 == 0.0:
            return vs
        coef = (vs @ ca) / na2
        return s * vs + (1.0 - s) * coef[:, None] * a[None, :]

    def radial_batch(zs):
        if na2 == 0.0:
            return -zs
        ip = zs @ ca
        v = (a[None, :] * ip[:, None] - zs) / ((1.0 - ip) ** 2)[:, None]
        return t_a_rows(v)

    def jac_t_batch(zs, gs):
        if na2 == 0.0:
            return -gs
        coef = (gs @ a) / na2
        hs = s * gs + (1.0 - s) * coef[:, None] * ca[None, :]
        d = 1.0 - zs @ ca
        bil = (a[None, :] - zs) * hs
        bil = np.sum(bil, axis=1)
        return -hs / d[:, None] + ca[None, :] * (bil / d**2)[:, None]

    probes = [a / np.linalg.norm(a)] if na2 > 0 else []
    probes.extend(_basis_probes(n, 4))
    return SymbolMap(
        n,
        lambda z: auto(z),
        batch=lambda zs: auto.apply_batch(zs),
        radial=lambda z: radial_batch(z[None, :])[0],
        radial_batch=radial_batch,
        jac_t=lambda z, g: jac_t_batch(z[None, :], g[None, :])[0],
        jac_t_batch=jac_t_batch,
        family={"family": "automorphism", "a": a},
        fixes_origin=bool(na2 == 0.0),
        label="automorphism",
        probe_directions=np.stack(probes) if probes else None,
    )


def _build_linear(n, params):
    xi = [as_coords(v, n) for v in params["xi"]]
    if len(xi) > n:
        raise SpecValidationError("linear family needs at most n coefficient vectors")
    weight = np.zeros((n, n), dtype=np.complex128)
    for i, v in enumerate(xi):
        weight[i] = np.conj(v)
    opnorm = float(np.linalg.svd(weight, compute_uv=False)[0])
    if opnorm > 1.0 + 1e-12:
        raise SpecValidationError(
            f"linear family violates the summability constraint: operator norm {opnorm:.6f} > 1"
        )

    probes = np.stack(
        [v / max(np.linalg.norm(v), 1e-15) for v in xi] + list(_basis_probes(n, 2))
    )
    return SymbolMap(
        n,
        lambda z: weight @ z,
        batch=lambda zs: zs @ weight.T,
        radial=lambda z: weight @ z,
        radial_batch=lambda zs: zs @ weight.T,
        jac_t=lambda z, g: weight.T @ g,
        jac_t_batch=lambda zs, gs: gs @ weight,
        family={"family": "linear", "xi": xi},
        fixes_origin=True,
        sup_norm_bound=opnorm if opnorm < 1.0 else None,
        label="linear",
        probe_directions=probes,
    )


def _build_diagonal(n, params):
    raw = params["maps"]
    maps = []
    for entry in raw:
        if isinstance(entry, ScalarDiskMap):
            maps.append(entry)
        else:
            c, m = entry
            maps.append(scalar_power(m) if c is None else scalar_scaled_power(c, m))
    if len(maps) > n:
        raise SpecValidationError("diagonal family needs at most n scalar maps")
    for F in maps:
        if abs(F(0.0)) > 1e-14:
            raise SpecValidationError(f"diagonal map {F.label} must fix 0")
        ring = 0.999 * np.exp(2j * np.pi * np.arange(64) / 64)
        if not np.all(np.abs(F.value_batch(ring)) < 1.0):
            raise SpecValidationError(f"diagonal map {F.label} leaves the disk")
    k = len(maps)

    def batch(zs):
        out = np.zeros_like(zs)
        for i, F in enumerate(maps):
            out[:, i] = F.value_batch(zs[:, i])
        return out

    def radial_batch(zs):
        out = np.zeros_like(zs)
        for i, F in enumerate(maps):
            out[:, i] = F.derivative_batch(zs[:, i]) * zs[:, i]
        return out

    def jac_t_batch(zs, gs):
        out = np.zeros_like(gs)
        for i, F in enumerate(maps):
            out[:, i] = F.derivative_batch(zs[:, i]) * gs[:, i]
        return out

    sups = [F.sup_norm_bound for F in maps]
    sup_bound = max(sups) if all(s is not None for s in sups) and sups else None
    return SymbolMap(
        n,
        lambda z: batch(z[None, :])[0],
        batch=batch,
        radial=lambda z: radial_batch(z[None, :])[0],
        radial_batch=radial_batch,
        jac_t=lambda z, g: jac_t_batch(z[None, :], g[None, :])[0],
        jac_t_batch=jac_t_batch,
        family={"family": "diagonal", "maps": [F.label for F in maps]},
        fixes_origin=True,
        sup_norm_bound=sup_bound if (sup_bound is not None and sup_bound < 1.0) else None,
        label="diagonal",
        probe_directions=_basis_probes(n, len(maps)),
    )


def _build_power(n, params):
    exps = np.arange(1, n + 1, dtype=np.float64)

    def batch(zs):
        return zs ** exps[None, :]

    def radial_batch(zs):
        return exps[None, :] * zs ** exps[None, :]

    def jac_t_batch(zs, gs):
        return exps[None, :] * zs ** (exps[None, :] - 1.0) * gs

    return SymbolMap(
        n,
        lambda z: batch(z[None, :])[0],
        batch=batch,
        radial=lambda z: radial_batch(z[None, :])[0],
        radial_batch=radial_batch,
        jac_t=lambda z, g: jac_t_batch(z[None, :], g[None, :])[0],
        jac_t_batch=jac_t_batch,
        family={"family": "power"},
        fixes_origin=True,
        label="power",
        probe_directions=_basis_probes(n),
    )


def _default_blocks(n):
    edges = [0]
    k = 1
    while edges[-1] < n:
        edges.append(min(2**k, n))
        k += 1
    return edges


def _build_block_power(n, params):
    variant = params.get("variant", "sum")
    if variant not in ("sum", "pow"):
        raise SpecValidationError(f"block_power variant must be 'sum' or 'pow', got {variant!r}")
    edges = params.get("block_sizes") or _default_blocks(n)
    edges = [int(e) for e in edges]
    if edges[0] != 0 or any(b <= a for a, b in zip(edges, edges[1:])) or edges[-1] > n:
        raise SpecValidationError(
            "block_sizes must be a strictly increasing sequence starting at 0 and capped by n"
        )
    blocks = [(a, b) for a, b in zip(edges, edges[1:])]
    kk = np.arange(1, len(blocks) + 1, dtype=np.float64)

    def batch(zs):
        out = np.zeros_like(zs)
        for i, (a, b) in enumerate(blocks):
            k = i + 1
            if variant == "sum":
                out[:, i] = np.sum(zs[:, a:b] ** (2 * k), axis=1)
            else:
                out[:, i] = np.sum(zs[:, a:b] ** 2, axis=1) ** k
        return out

    def radial_batch(zs):
        out = batch(zs)
        out[:, : len(blocks)] *= 2.0 * kk[None, :]
        return out

    def jac_t_batch(zs, gs):
        out = np.zeros_like(gs)
        for i, (a, b) in enumerate(blocks):
            k = i + 1
            if variant == "sum":
                out[:, a:b] = 2.0 * k * zs[:, a:b] ** (2 * k - 1) * gs[:, i][:, None]
            else:
                s = np.sum(zs[:, a:b] ** 2, axis=1) ** (k - 1)
                out[:, a:b] = 2.0 * k * s[:, None] * zs[:, a:b] * gs[:, i][:, None]
        return out

    probes = []
    for a, b in blocks:
        d = np.zeros(n, dtype=np.complex128)
        d[a:b] = 1.0 / np.sqrt(b - a)
        probes.append(d)
        e = np.zeros(n, dtype=np.complex128)
        e[a] = 1.0
        probes.append(e)
    return SymbolMap(
        n,
        lambda z: batch(z[None, :])[0],
        batch=batch,
        radial=lambda z: radial_batch(z[None, :])[0],
        radial_batch=radial_batch,
        jac_t=lambda z, g: jac_t_batch(z[None, :], g[None, :])[0],
        jac_t_batch=jac_t_batch,
        family={"family": "block_power", "variant": variant, "block_sizes": edges},
        fixes_origin=True,
        label=f"block_power[{variant}]",
        probe_directions=np.stack(probes),
    )


def _build_product_com1(n, params):
    if n < 2:
        raise SpecValidationError("product family needs dimension >= 2")
    count = n // 2
    # component i (1-indexed) multiplies coordinates i..2i
    windows = [(i - 1, 2 * i) for i in range(1, count + 1)]

    def batch(zs):
        out = np.zeros_like(zs)
        for i, (a, b) in enumerate(windows):
            out[:, i] = np.prod(zs[:, a:b], axis=1)
        return out

    def radial_batch(zs):
        out = batch(zs)
        for i, (a, b) in enumerate(windows):
            out[:, i] *= b - a
        return out

    def jac_t_batch(zs, gs):
        out = np.zeros_like(gs)
        for i, (a, b) in enumerate(windows):
            cols = zs[:, a:b]
            w = b - a
            pre = np.ones_like(cols)
            suf = np.ones_like(cols)
            for j in range(1, w):
                pre[:, j] = pre[:, j - 1] * cols[:, j - 1]
                suf[:, w - 1 - j] = suf[:, w - j] * cols[:, w - j]
            out[:, a:b] += pre * suf * gs[:, i][:, None]
        return out

    probes = []
    for a, b in windows:
        d = np.zeros(n, dtype=np.complex128)
        d[a:b] = 1.0 / np.sqrt(b - a)
        probes.append(d)
    sup_sq = sum(float(b - a) ** -(b - a) for a, b in windows)
    return SymbolMap(
        n,
        lambda z: batch(z[None, :])[0],
        batch=batch,
        radial=lambda z: radial_batch(z[None, :])[0],
        radial_batch=radial_batch,
        jac_t=lambda z, g: jac_t_batch(z[None, :], g[None, :])[0],
        jac_t_batch=jac_t_batch,
        family={"family": "product_com1"},
        fixes_origin=True,
        sup_norm_bound=float(np.sqrt(sup_sq)),
        label="product_com1",
        probe_directions=np.stack(probes),
    )


def _build_custom(n, params):
    func = params["func"]
    return SymbolMap(
        n,
        func,
        batch=params.get("batch"),
        radial=params.get("radial"),
        jac_t=params.get("jac_t"),
        family={"family": "custom"},
        fixes_origin=bool(params.get("fixes_origin", False)),
        label=params.get("label", "custom"),
    )


_BUILDERS = {
    "identity": _build_identity,
    "constant": _build_constant,
    "automorphism": _build_automorphism,
    "linear": _build_linear,
    "diagonal": _build_diagonal,
    "power": _build_power,
    "block_power": _build_block_power,
    "product_com1": _build_product_com1,
    "custom": _build_custom,
}


def build_symbol(spec, n):
    """Construct and validate the symbol described by ``spec`` at dimension n."""
    if isinstance(spec, dict):
        spec = SymbolSpec.from_json(spec)
    builder = _BUILDERS.get(spec.family)
    if builder is None:
        raise SpecValidationError(
            f"unknown symbol family {spec.family!r}; expected one of {sorted(_BUILDERS)}"
        )
    n = int(spec.params.get("n", n))
    if n < 1:
        raise SpecValidationError("dimension must be positive")
    sym = builder(n, spec.params)
    return _validate_ball_preservation(sym)
