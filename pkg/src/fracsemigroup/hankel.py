"""Regularized inverse Fourier transforms of radial symbols.

For a radial symbol ``m(|xi|)`` on ``R^n`` (``nu = n/2``)

    F^{-1}[m](x) = (2 pi)^{-nu} r^{1-nu} int_0^inf m(t) t^nu J_{nu-1}(r t) dt,   r = |x|.

The integral is only conditionally convergent for the symbols of interest, so
``m`` is damped by ``e^{-eps t}`` and the result is Richardson-extrapolated to
``eps -> 0`` along ``eps = eps0 2^{-j}``.

Quadrature: the symbol (and, for lifted forms, its derivatives) is sampled on
coarse Legendre panels sized to the symbol's own oscillation, then
interpolated to fine Gauss-Legendre nodes that resolve ``J(r t)``.  The
expensive symbol samples are cached and shared across ``r``.

For larger ``r`` the integral is first rewritten by ``m`` integrations by parts

    int f t^nu J_{nu-1}(rt) dt = (-1)^m r^{-m} sum_k c_{k,m} int f^{(k)} t^{nu+k-m} J_{nu+m-1}(rt) dt,

with ``c_{k,m}`` from :func:`fracsemigroup.special.radial_derivative_coeffs`,
applied to the damped symbol ``e^{-eps t} m(t)`` so no boundary term at
infinity survives.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, NumericalError
from .special import radial_derivative_coeffs

__all__ = [
    "radial_inverse_fourier",
    "hankel_integral",
    "hankel_tail_lift",
    "SymbolSamples",
]

NODES = 16
DECAY = 40.0  # integrate the damped symbol until e^{-eps t} < e^{-40}


def _bary_matrix(x_from, x_to):
    wts = np.array([1.0 / np.prod(xj - np.delete(x_from, j)) for j, xj in enumerate(x_from)])
    diff = x_to[:, None] - x_from[None, :]
    exact = np.isclose(diff, 0.0, atol=1e-15)
    diff[exact] = 1.0
    terms = wts / diff
    M = terms / terms.sum(axis=1, keepdims=True)
    rows = exact.any(axis=1)
    M[rows] = exact[rows].astype(float)
    return M


_GL = np.polynomial.legendre.leggauss(NODES)


def _fine_rule(sub):
    """Composite rule on [-1, 1] with ``sub`` Gauss-Legendre sub-panels."""
    x, w = _GL
    edges = np.linspace(-1.0, 1.0, sub + 1)
    xs = (0.5 * (edges[1:, None] - edges[:-1, None]) * x + 0.5 * (edges[1:, None] + edges[:-1, None])).ravel()
    ws = np.tile(w / sub, sub)
    return xs, ws


class SymbolSamples:
    """Jets of a symbol on coarse Legendre panels ``[t_min + i*width, ...]``.

    Grows on demand; reused by every ``r`` evaluated with the same symbol.
    """

    def __init__(self, jet_fn, order, t_min=0.0, width=0.25):
        self.jet_fn = jet_fn
        self.order = order
        self.t_min = float(t_min)
        self.width = float(width)
        self.panels = 0
        self.values = np.empty((order + 1, 0, NODES))

    def ensure(self, t_max):
        need = int(math.ceil((t_max - self.t_min) / self.width))
        if need <= self.panels:
            return
        i = np.arange(self.panels, need)
        a = self.t_min + i * self.width
        t = a[:, None] + 0.5 * self.width * (_GL[0] + 1.0)
        new = np.asarray(self.jet_fn(t, self.order), dtype=float)
        if not np.all(np.isfinite(new)):
            raise NumericalError("non-finite symbol samples", t_range=(float(a[0]), float(a[-1] + self.width)))
        self.values = np.concatenate([self.values, new], axis=1)
        self.panels = need


def _damped_integrals(samples, order, nu_j, power_shifts, r, eps_list, bandwidth, chunk=1024):
    """``G[e, j, s] = int e^{-eps_e t} f^{(j)}(t) t^{power_shifts[s]} J_{nu_j}(r t) dt``."""
    t_max = DECAY / min(eps_list)
    samples.ensure(t_max)
    P = int(math.ceil((t_max - samples.t_min) / samples.width))
    sub = max(1, int(math.ceil((r + bandwidth) * samples.width / 3.0)))
    xf, wf = _fine_rule(sub)
    M = _bary_matrix(_GL[0], xf)
    eps = np.asarray(eps_list)[:, None, None]
    out = np.zeros((len(eps_list), order + 1, len(power_shifts)))
    half = 0.5 * samples.width
    scale = 0.0
    for start in range(0, P, chunk):
        stop = min(P, start + chunk)
        a = samples.t_min + np.arange(start, stop) * samples.width
        size = np.max(np.abs(samples.values[: order + 1, start:stop])) * (1.0 + a[-1]) ** max(power_shifts)
        scale = max(scale, size)
        if size * math.exp(-min(eps_list) * a[0]) < 1e-18 * scale:
            continue
        t = a[:, None] + half * (xf + 1.0)
        J = _kernels.jv(nu_j, r * t)
        damp = np.exp(-eps * t[None])  # (E, p, F)
        for j in range(order + 1):
            fj = samples.values[j, start:stop] @ M.T
            for s, p in enumerate(power_shifts):
                g = (fj * J * t ** p) * wf
                out[:, j, s] += half * np.tensordot(damp, g, axes=([1, 2], [0, 1]))
    return out


def _richardson(values, ratio=2.0):
    """Richardson table for values at eps, eps/ratio, ... assuming an expansion in eps."""
    table = [list(values)]
    for col in range(1, len(values)):
        fac = ratio ** col
        prev = table[-1]
        table.append([(fac * prev[i + 1] - prev[i]) / (fac - 1.0) for i in range(len(prev) - 1)])
    return table


@dataclass
class _Result:
    value: float
    error: float
    eps: list
    converged: bool


def _transform_one(samples, nu, r, m, eps0, eps_min, tol, bandwidth, strict):
    coeffs = radial_derivative_coeffs(m) if m else [(0, 1)]
    eps_all = []
    e = eps0
    while e >= eps_min * 0.999:
        eps_all.append(e)
        e /= 2.0
    # powers needed: t^{nu + k - m}
    shifts = sorted({nu + k - m for k, _ in coeffs})
    est, best, err = [], None, float("inf")
    for idx, ep in enumerate(eps_all):
        G = _damped_integrals(samples, m, nu + m - 1.0, shifts, r, [ep], bandwidth)[0]
        val = 0.0
        for k, c in coeffs:
            s = shifts.index(nu + k - m)
            # (e^{-eps t} f)^{(k)} = e^{-eps t} sum_j binom(k, j) (-eps)^{k-j} f^{(j)}
            val += c * sum(math.comb(k, j) * (-ep) ** (k - j) * G[j, s] for j in range(k + 1))
        est.append((-1) ** m * r ** (-m) * val)
        if len(est) >= 4:
            best = _richardson(est)[-1][0]
            prev = _richardson(est[:-1])[-1][0]
            err = abs(best - prev)
            if err <= tol * max(1.0, abs(best)):
                return _Result(best, err, eps_all[: idx + 1], True)
    if strict:
        raise NumericalError(f"eps-extrapolation did not converge at r={r}",
                             eps_tail=eps_all[-4:], estimates_tail=est[-4:])
    return _Result(best, err, eps_all, False)


def radial_inverse_fourier(symbol, n, r, eps0=0.08, levels=6, tol=1e-7, t_min=0.0,
                           lift_m=None, lift_from=4.0, bandwidth=8.0, width=0.25,
                           frequencies=(), min_gap=0.05, strict=True, samples=None, return_info=False):
    """``(2 pi)^{-nu} r^{1-nu} int_0^inf m(t) t^nu J_{nu-1}(rt) dt`` with ``eps``-regularization.

    ``symbol`` is a :class:`~fracsemigroup.symbols.RadialSymbol` (or anything
    with ``jet(t, K)``) vanishing on ``[0, t_min)``; the caller subtracts any
    nonzero limit at infinity.  Radii ``r >= lift_from`` use the ``lift_m``-fold
    (default 2) integrated-by-parts form.

    The damped integral is analytic in ``eps`` only within roughly
    ``min(r, |r - f|)`` for oscillation frequencies ``f`` of the symbol, so the
    ladder starts at ``min(eps0, that / 2)`` and halves ``levels - 1`` times;
    ``|r - f|`` is floored at ``min_gap`` (at ``r = f`` the transform is singular).
    """
    nu = n / 2.0
    rr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(rr <= 0):
        raise DomainError("r must be positive")
    lim = getattr(symbol, "limit_at_infinity", None)
    if lim is not None and abs(lim) > 1e-12:
        raise DomainError(f"symbol tends to {lim} at infinity; subtract it first")
    m_big = 2 if lift_m is None else lift_m
    if samples is None:
        samples = SymbolSamples(symbol.jet, m_big, t_min, width)
    values, infos = [], []
    for ri in rr:
        m = m_big if ri >= lift_from else 0
        gap = min([ri] + [max(abs(ri - f), min_gap) for f in frequencies])
        e0 = min(eps0, 0.5 * gap)
        res = _transform_one(samples, nu, ri, m, e0, e0 / 2 ** (levels - 1), tol, bandwidth, strict)
        values.append((2.0 * math.pi) ** (-nu) * ri ** (1.0 - nu) * res.value)
        infos.append(res)
    out = np.array(values)
    if np.ndim(r) == 0:
        out = out[0]
        infos = infos[0]
    return (out, infos) if return_info else out


# ---------------------------------------------------------------------------
# plain and lifted integrals for compactly supported f
# ---------------------------------------------------------------------------

def _panel_integral(fn, a, b, r, bandwidth=8.0):
    width = min(0.25, b - a)
    P = int(math.ceil((b - a) / width))
    edges = np.linspace(a, b, P + 1)
    # at least 4 sub-panels: lifted integrands carry high derivatives of f
    sub = max(4, int(math.ceil((r + bandwidth) * (edges[1] - edges[0]) / 1.5)))
    xf, wf = _fine_rule(sub)
    t = edges[:-1, None] + 0.5 * (edges[1:] - edges[:-1])[:, None] * (xf + 1.0)
    vals = fn(t)
    return float(np.sum(0.5 * (edges[1:] - edges[:-1]) * (vals @ wf)))


def hankel_integral(f, nu, r, support):
    """``int f(t) t^nu J_{nu-1}(rt) dt`` over ``support = (a, b)``; ``f`` is a RadialSymbol."""
    a, b = support
    return _panel_integral(lambda t: f.jet(t, 0)[0] * t ** nu * _kernels.jv(nu - 1.0, r * t), a, b, r)


def _boundary_terms(f, nu, m, r, t):
    """Boundary terms ``g_j(t) t^{nu+j+1} J_{nu+j}(rt) / r`` with ``g_j = (t^{-1} d/dt)^j f``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    jet = f.jet(t, m)
    out = []
    for j in range(m):
        g = sum(c * jet[k] * t ** (k - 2.0 * j) for k, c in (radial_derivative_coeffs(j) if j else [(0, 1)]))
        out.append(g * t ** (nu + j + 1.0) * _kernels.jv(nu + j, r * t) / r)
    return np.array(out)


def hankel_tail_lift(f, nu, m, r, support, boundary_tol=1e-10):
    """Right-hand side of the lifting identity for ``f`` supported in ``support``.

    ``(-1)^m r^{-m} sum_k c_{k,m} int f^{(k)}(t) t^{nu+k-m} J_{nu+m-1}(rt) dt``;
    equals :func:`hankel_integral` when the ``m`` boundary terms vanish at
    both ends of ``support`` (checked; a failure names the offending end).
    """
    a, b = support
    if m < 0:
        raise DomainError("m must be >= 0")
    if m == 0:
        return hankel_integral(f, nu, r, support)
    for name, t in (("t -> a (lower limit)", a), ("t -> b (upper limit)", b)):
        bt = _boundary_terms(f, nu, m, r, [t])
        if np.any(np.abs(bt) > boundary_tol):
            j = int(np.argmax(np.abs(bt[:, 0])))
            raise DomainError(f"boundary term {j} does not vanish at {name}: {float(bt[j, 0]):.3e}")
    coeffs = radial_derivative_coeffs(m)

    def integrand(t):
        jet = f.jet(t, m)
        J = _kernels.jv(nu + m - 1.0, r * t)
        return sum(c * jet[k] * t ** (nu + k - m) for k, c in coeffs) * J

    return (-1) ** m * r ** (-m) * _panel_integral(integrand, a, b, r)
