"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The sampling sweeps push 1e4-point batches through the ball automorphism
and the pseudo-hyperbolic closed form, and the compactness proxies run a
greedy epsilon-net over the same batches; these three loops dominate
runtime.  Set ``BLOCHBALL_BACKEND=numpy`` to force the fallback (the
default is the jitted path whenever numba imports).  ``BLOCHBALL_THREADS``
caps numba's thread pool.  ``benchmarks/bench_kernels.py`` compares the
two paths.
"""

import os

import numpy as np

_BACKEND_ENV = "BLOCHBALL_BACKEND"
_THREADS_ENV = "BLOCHBALL_THREADS"


# ---------------------------------------------------------------------------
# pure-numpy implementations (reference semantics for both backends)

def mobius_apply_batch_np(a, xs):
    """Apply the ball automorphism with parameter ``a`` to each row of ``xs``.

    ``a``: (n,) complex, norm < 1.  ``xs``: (m, n) complex, rows norm < 1.
    For a = 0 the map is x -> -x.
    """
    a = np.ascontiguousarray(a, dtype=np.complex128)
    xs = np.ascontiguousarray(xs, dtype=np.complex128)
    na2 = float(np.sum(np.abs(a) ** 2))
    if na2 == 0.0:
        return -xs
    s = np.sqrt(1.0 - na2)
    denom = 1.0 - xs @ np.conj(a)
    mid = (a[None, :] - xs) / denom[:, None]
    coef = (mid @ np.conj(a)) / na2
    proj = coef[:, None] * a[None, :]
    return s * (mid - proj) + proj


def rho_pairs_np(xs, ys):
    """Pseudo-hyperbolic distance between paired rows of ``xs`` and ``ys``.

    Uses the closed form rho^2 = 1 - (1-|x|^2)(1-|y|^2)/|1-<x,y>|^2 with the
    radicand clamped at 0 against rounding.
    """
    xs = np.ascontiguousarray(xs, dtype=np.complex128)
    ys = np.ascontiguousarray(ys, dtype=np.complex128)
    nx2 = np.sum(np.abs(xs) ** 2, axis=1)
    ny2 = np.sum(np.abs(ys) ** 2, axis=1)
    ip = np.einsum("ij,ij->i", xs, np.conj(ys))
    rad = 1.0 - (1.0 - nx2) * (1.0 - ny2) / np.abs(1.0 - ip) ** 2
    return np.sqrt(np.maximum(rad, 0.0))


def greedy_cover_count_np(points, eps):
    """Greedy epsilon-net size of a real point cloud, in sample order.

    ``points``: (m, d) real.  Returns the number of centers the greedy pass
    keeps; a point becomes a center when it is farther than ``eps`` from all
    existing centers.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    m = points.shape[0]
    if m == 0:
        return 0
    centers = np.empty_like(points)
    centers[0] = points[0]
    count = 1
    eps2 = eps * eps
    for i in range(1, m):
        d2 = np.sum((centers[:count] - points[i]) ** 2, axis=1)
        if np.min(d2) > eps2:
            centers[count] = points[i]
            count += 1
    return count


# ---------------------------------------------------------------------------
# backend selection

def _build_numba_kernels():
    from numba import njit

    threads = os.environ.get(_THREADS_ENV)
    if threads:
        from numba import set_num_threads

        set_num_threads(max(1, int(threads)))

    @njit(cache=True)
    def _mobius(a, xs):
        m, n = xs.shape
        out = np.empty((m, n), dtype=np.complex128)
        na2 = 0.0
        for k in range(n):
            na2 += a[k].real ** 2 + a[k].imag ** 2
        if na2 == 0.0:
            for i in range(m):
                for k in range(n):
                    out[i, k] = -xs[i, k]
            return out
        s = np.sqrt(1.0 - na2)
        for i in range(m):
            denom = 1.0 + 0.0j
            for k in range(n):
                denom -= xs[i, k] * np.conj(a[k])
            coef = 0.0 + 0.0j
            for k in range(n):
                mid = (a[k] - xs[i, k]) / denom
                out[i, k] = mid
                coef += mid * np.conj(a[k])
            coef /= na2
            for k in range(n):
                p = coef * a[k]
                out[i, k] = s * (out[i, k] - p) + p
        return out

    @njit(cache=True)
    def _rho(xs, ys):
        m, n = xs.shape
        out = np.empty(m, dtype=np.float64)
        for i in range(m):
            nx2 = 0.0
            ny2 = 0.0
            ip = 0.0 + 0.0j
            for k in range(n):
                nx2 += xs[i, k].real ** 2 + xs[i, k].imag ** 2
                ny2 += ys[i, k].real ** 2 + ys[i, k].imag ** 2
                ip += xs[i, k] * np.conj(ys[i, k])
            d = 1.0 - ip
            rad = 1.0 - (1.0 - nx2) * (1.0 - ny2) / (d.real ** 2 + d.imag ** 2)
            out[i] = np.sqrt(rad) if rad > 0.0 else 0.0
        return out

    @njit(cache=True)
    def _cover(points, eps):
        m, d = points.shape
        if m == 0:
            return 0
        centers = np.empty((m, d), dtype=np.float64)
        centers[0] = points[0]
        count = 1
        eps2 = eps * eps
        for i in range(1, m):
            keep = True
            for c in range(count):
                d2 = 0.0
                for k in range(d):
                    diff = centers[c, k] - points[i, k]
                    d2 += diff * diff
                if d2 <= eps2:
                    keep = False
                    break
            if keep:
                centers[count] = points[i]
                count += 1
        return count

    def mobius(a, xs):
        return _mobius(
            np.ascontiguousarray(a, dtype=np.complex128),
            np.ascontiguousarray(xs, dtype=np.complex128),
        )

    def rho(xs, ys):
        return _rho(
            np.ascontiguousarray(xs, dtype=np.complex128),
            np.ascontiguousarray(ys, dtype=np.complex128),
        )

    def cover(points, eps):
        return int(_cover(np.ascontiguousarray(points, dtype=np.float64), float(eps)))

    return mobius, rho, cover


def _select_backend():
    requested = os.environ.get(_BACKEND_ENV, "numba").strip().lower()
    if requested not in ("numba", "numpy"):
        raise ValueError(
            f"{_BACKEND_ENV} must be 'numba' or 'numpy', got {requested!r}"
        )
    if requested == "numba":
        try:
            return "numba", _build_numba_kernels()
        except ImportError:
            pass
    return "numpy", (mobius_apply_batch_np, rho_pairs_np, greedy_cover_count_np)


_ACTIVE, (mobius_apply_batch, rho_pairs, greedy_cover_count) = _select_backend()


def active_backend():
    """Name of the kernel backend selected at import time."""
    return _ACTIVE
