"""Radial multipliers built on ``V``: w, A, B, partition of unity, Mikhlin audit.

Notation.  ``W(r) = int_r^inf V(rho) rho^{-1-alpha} d rho`` and ``W0 = W(0)``.
Then ``d_{n,ell}(alpha) = (2i)^ell W0``, ``w = W / W0``,
``B(r) = r^alpha w(r) / (1 - e^{-r})^alpha`` and ``A = 1 / B``.

``W`` is split at ``rho = 1`` and ``rho = 10``:

* ``[r, 1]``: termwise integration of the power series of ``V``;
* ``[1, 10]``: Gauss-Legendre panels on the Bessel form of ``V``;
* ``[10, inf)``: ``lam r^{-alpha} / alpha`` plus one oscillatory Bessel tail
  per cosine frequency, from :func:`fracsemigroup._kernels.oscillatory_tail`.

An independent evaluation of the oscillatory tails (two integrations by parts,
then quadrature of the absolutely convergent remainder) is available through
:func:`bessel_tail_byparts` and is what the test-suite compares against.
"""
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy import special as sps

from . import _kernels, hankel, jets
from .hankel import hankel_integral, hankel_tail_lift, radial_inverse_fourier
from .errors import DomainError, InvariantViolation, NumericalError
from .special import _check_even_ell, sphere_area, spherical_sine_integral

__all__ = [
    "RieszSymbols",
    "riesz_symbols",
    "hypersingular_constant",
    "w_eval",
    "A_eval",
    "B_eval",
    "B_asymptotic",
    "bessel_tail_byparts",
    "RadialSymbol",
    "MikhlinAudit",
    "mikhlin_audit",
    "partition_unity",
    "symbol_by_name",
    "radial_inverse_fourier",
    "hankel_integral",
    "hankel_tail_lift",
    "A3Probe",
    "a3_decay_probe",
]

TAIL_START = 10.0
HEAD_END = 1.0


@lru_cache(maxsize=None)
def _leggauss(m):
    return np.polynomial.legendre.leggauss(m)


def _q_jet(r, order):
    """Jet of ``q(r) = (1 - e^{-r}) / r``; Taylor series below ``r = 1``."""
    r = np.asarray(r, dtype=float)
    out = np.empty((order + 1,) + r.shape)
    small = r < 1.0
    if small.any():
        rs = r[small]
        acc = np.zeros((order + 1,) + rs.shape)
        # q = sum_k (-1)^k r^k / (k+1)!
        for k in range(40, -1, -1):
            c = (-1) ** k / math.factorial(k + 1)
            for j in range(min(order, k) + 1):
                acc[j] += c * math.perm(k, j) * rs ** (k - j)
        out[:, small] = acc
    if (~small).any():
        rl = r[~small]
        e = np.exp(-rl)
        num = np.empty((order + 1,) + rl.shape)
        num[0] = -np.expm1(-rl)
        for j in range(1, order + 1):
            num[j] = -((-1) ** j) * e
        out[:, ~small] = jets.mul(num, jets.monomial(rl, -1.0, order))
    return out


# ---------------------------------------------------------------------------
# W, w, A, B for one parameter triple
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RieszSymbols:
    """All radial symbols tied to ``(n, ell, alpha)``; build via :func:`riesz_symbols`."""

    n: int
    ell: int
    alpha: float
    resolution: int = 1
    V: object = field(init=False, repr=False)
    W0: float = field(init=False)
    _edges: np.ndarray = field(init=False, repr=False)
    _cum: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        ell = _check_even_ell(self.ell)
        if not 0.0 < self.alpha < ell:
            raise DomainError(f"need 0 < alpha < ell, got alpha={self.alpha}, ell={ell}")
        object.__setattr__(self, "V", spherical_sine_integral(self.n, ell))
        width = 0.25 / self.resolution
        edges = np.linspace(HEAD_END, TAIL_START, int(round((TAIL_START - HEAD_END) / width)) + 1)
        x, wts = _leggauss(20 * self.resolution)
        a, b = edges[:-1, None], edges[1:, None]
        nodes = 0.5 * (b - a) * x + 0.5 * (a + b)
        vals = self.V.eval(nodes) * nodes ** (-1.0 - self.alpha)
        panel = 0.5 * (edges[1:] - edges[:-1]) * (vals @ wts)
        cum = np.concatenate([np.cumsum(panel[::-1])[::-1], [0.0]])  # int_{edge_k}^{10}
        object.__setattr__(self, "_edges", edges)
        object.__setattr__(self, "_cum", cum)
        w0 = self._head(np.array([0.0]))[0] + cum[0] + self._tail(np.array([TAIL_START]))[0]
        if not np.isfinite(w0) or w0 <= 0.0:
            raise NumericalError(f"W0 = {w0} is not a positive finite number", n=self.n, ell=ell, alpha=self.alpha)
        object.__setattr__(self, "W0", float(w0))

    # -- constants -----------------------------------------------------------
    @property
    def nu(self):
        return self.n / 2.0

    @property
    def lam(self):
        return self.V.lam

    @property
    def d(self):
        """``d_{n,ell}(alpha) = (2i)^ell W0`` (real, ``ell`` even)."""
        return (-1) ** (self.ell // 2) * 2.0 ** self.ell * self.W0

    @property
    def B_infinity(self):
        return self.lam / (self.alpha * self.W0)

    @property
    def A_infinity(self):
        return 1.0 / self.B_infinity

    # -- pieces of W ---------------------------------------------------------
    def _head(self, r):
        # int_r^1 V rho^{-1-alpha}, r <= 1
        out = np.zeros_like(r)
        v = self.V.series_coeffs
        for m in range(len(v)):
            if v[m] == 0.0:
                continue
            p = 2 * m - self.alpha
            out += v[m] * (1.0 - r ** p) / p
        return out

    def _middle(self, r):
        # int_r^10 V rho^{-1-alpha}, 1 <= r <= 10
        edges = self._edges
        k = np.clip(np.searchsorted(edges, r, side="right") - 1, 0, len(edges) - 2)
        a, b = r[:, None], edges[k + 1][:, None]
        x, wts = _leggauss(20 * self.resolution)
        nodes = 0.5 * (b - a) * x + 0.5 * (a + b)
        vals = self.V.eval(nodes) * nodes ** (-1.0 - self.alpha)
        return 0.5 * (b[:, 0] - a[:, 0]) * (vals @ wts) + self._cum[k + 1]

    def _tail(self, r):
        # int_r^inf V rho^{-1-alpha}, r >= 10
        V, a, nu = self.V, self.alpha, self.nu
        out = V.lam * r ** (-a) / a
        for ci, li in zip(V.C, V.ell_i):
            out = out + ci * li ** a * _kernels.oscillatory_tail(nu - 1.0, nu + a, li * r)
        return out

    def W(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise DomainError("r must be >= 0")
        flat = r.ravel()
        out = np.empty_like(flat)
        head = flat < HEAD_END
        tail = flat >= TAIL_START
        mid = ~head & ~tail
        if head.any():
            out[head] = (self._head(flat[head]) + self._cum[0]
                         + self._tail(np.array([TAIL_START]))[0])
        if mid.any():
            out[mid] = self._middle(flat[mid]) + self._tail(np.array([TAIL_START]))[0]
        if tail.any():
            out[tail] = self._tail(flat[tail])
        return out.reshape(r.shape)

    # -- symbols -------------------------------------------------------------
    def w(self, r):
        return self.W(r) / self.W0

    def w_jet(self, r, order):
        r = np.asarray(r, dtype=float)
        out = np.empty((order + 1,) + r.shape)
        out[0] = self.w(r)
        if order:
            g = jets.mul(self.V.jet(r, order - 1), jets.monomial(r, -1.0 - self.alpha, order - 1))
            out[1:] = -g / self.W0
        return out

    def _check_w(self, w0):
        if np.any(w0 <= 0.0):
            raise InvariantViolation("w(r) crossed zero; B and A are undefined there")

    def B(self, r):
        r = np.asarray(r, dtype=float)
        w = self.w(r)
        self._check_w(w)
        return w * _q_jet(r, 0)[0] ** (-self.alpha)

    def A(self, r):
        return 1.0 / self.B(r)

    def A_jet(self, r, order):
        """Analytic jet of ``A = q^alpha / w`` through the quotient recurrence."""
        wj = self.w_jet(r, order)
        self._check_w(wj[0])
        return jets.div(jets.power(_q_jet(r, order), self.alpha), wj)

    def B_jet(self, r, order):
        """Jet of ``B`` as the reciprocal of the ``A`` jet."""
        return jets.recip(self.A_jet(r, order))

    # -- large-r structure ---------------------------------------------------
    def B_asymptotic(self, r, with_bessel_term=True):
        """Leading large-``r`` form of ``B`` and a bound for the dropped remainder.

        ``B ~ B_inf + r^{-nu} sum_i C_i ell_i^{-nu} J_{nu-2}(ell_i r) / W0`` with
        the remainder ``<= K r^{-nu-3/2}``; returns ``(value, remainder_bound)``.
        """
        r = np.asarray(r, dtype=float)
        if np.any(r < TAIL_START):
            raise DomainError(f"asymptotic form documented for r >= {TAIL_START}")
        nu, V = self.nu, self.V
        val = np.full(r.shape, self.B_infinity)
        if with_bessel_term:
            for ci, li in zip(V.C, V.ell_i):
                val = val + ci * li ** (-nu) * r ** (-nu) * _kernels.jv(nu - 2.0, li * r) / self.W0
        K = (2.0 + self.alpha) * math.sqrt(2.0 / math.pi) * 1.1 * sum(
            abs(ci) * li ** (-nu - 1.5) for ci, li in zip(V.C, V.ell_i)) / self.W0
        bound = K * r ** (-nu - 1.5)
        if not with_bessel_term:
            bound = bound + math.sqrt(2.0 / math.pi) * 1.1 * sum(
                abs(ci) * li ** (-nu - 0.5) for ci, li in zip(V.C, V.ell_i)) / self.W0 * r ** (-nu - 0.5)
        return val, bound

    def W_tail_byparts(self, r):
        """``W(r)`` for ``r >= 10`` via :func:`bessel_tail_byparts` (cross-check path)."""
        a, nu, V = self.alpha, self.nu, self.V
        out = V.lam * r ** (-a) / a
        for i, (ci, li) in enumerate(zip(V.C, V.ell_i)):
            out += ci * li ** a * bessel_tail_byparts(nu - 1.0, nu + a, li * r, term_index=i)
        return out

    def A_expansion(self, s_max=8.0):
        """Small-``t`` expansion of ``A`` as ``{exponent: coefficient}`` up to ``t^{s_max}``.

        ``q^alpha = exp(alpha log q)`` with ``log q = -t/2 + log(sinh(t/2)/(t/2))``
        and ``1/w = sum_k X^k`` with ``X = sum_m v_m t^{2m-alpha} / ((2m-alpha) W0)``.
        """
        a = self.alpha
        logq = {1.0: -0.5}
        for k in range(1, int(s_max // 2) + 1):
            b2k = float(sps.bernoulli(2 * k)[2 * k])
            logq[_ekey(2 * k)] = 4.0 ** k * b2k / (2 * k * math.factorial(2 * k)) / 4.0 ** k
        qa = _gs_power_sum({e: a * c for e, c in logq.items()}, s_max, lambda k: 1.0 / math.factorial(k))
        v = self.V.series_coeffs
        X = {}
        for m in range(self.ell // 2, len(v)):
            e = 2 * m - a
            if e > s_max:
                break
            X[_ekey(e)] = v[m] / (e * self.W0)
        return _gs_mul(qa, _gs_power_sum(X, s_max, lambda k: 1.0), s_max)

    def kernel_far_field(self, r, s_max=8.0):
        """Large-``|x|`` asymptotics of ``F^{-1}[A - A(inf)]`` from the non-smooth terms of :meth:`A_expansion`.

        ``F^{-1}[|xi|^s](x) = 2^s pi^{-n/2} Gamma((n+s)/2) / Gamma(-s/2) |x|^{-n-s}``;
        even integer powers are smooth and contribute nothing.
        """
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for s, c in _nonsmooth_terms(self.A_expansion(s_max)).items():
            out += c * power_transform_constant(self.n, s) * r ** (-self.n - s)
        return out

    def kernel_tail_mass(self, R, s_max=8.0):
        """``int_{|x| > R}`` of :meth:`kernel_far_field`."""
        tot = 0.0
        for s, c in _nonsmooth_terms(self.A_expansion(s_max)).items():
            tot += c * power_transform_constant(self.n, s) * R ** (-s) / s
        return sphere_area(self.n) * tot


def _ekey(e):
    return round(float(e), 10)


def _gs_mul(a, b, s_max):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = _ekey(ea + eb)
            if e <= s_max:
                out[e] = out.get(e, 0.0) + ca * cb
    return out


def _gs_power_sum(X, s_max, coef):
    # sum_k coef(k) X^k for a generalized power series X without constant term
    out = {0.0: coef(0)}
    P = {0.0: 1.0}
    emin = min(X)
    k = 0
    while (k + 1) * emin <= s_max:
        k += 1
        P = _gs_mul(P, X, s_max)
        for e, c in P.items():
            out[e] = out.get(e, 0.0) + c * coef(k)
    return out


def _nonsmooth_terms(expansion):
    return {s: c for s, c in expansion.items() if abs(s / 2.0 - round(s / 2.0)) > 1e-9}


def power_transform_constant(n, s):
    """``F^{-1}[|xi|^s] = C |x|^{-n-s}`` away from the origin (``C = 0`` for even ``s``)."""
    return 2.0 ** s * math.pi ** (-n / 2.0) * math.gamma((n + s) / 2.0) * sps.rgamma(-s / 2.0)


@lru_cache(maxsize=64)
def riesz_symbols(n, ell, alpha, resolution=1):
    return RieszSymbols(int(n), int(ell), float(alpha), int(resolution))


def bessel_tail_byparts(mu, beta, x, term_index=None, span=4000.0):
    """``int_x^inf J_mu(s) s^{-beta} ds`` by two integrations by parts plus quadrature.

    ``int_x^inf J_mu s^{-b} = x^{-b} J_{mu-1}(x) + (mu-1-b) int_x^inf J_{mu-1} s^{-b-1}``
    applied twice; the remaining integrand decays like ``s^{-beta-5/2}`` and is
    integrated over ``[x, x + span]`` period by period.  The cut-off tail is
    below ``span^{-beta-3/2}``.
    """
    b1 = beta + 1.0
    lead = x ** (-beta) * sps.jv(mu - 1.0, x)
    second = x ** (-b1) * sps.jv(mu - 2.0, x)
    c1 = mu - 1.0 - beta
    c2 = mu - 2.0 - b1

    def integrand(s):
        return sps.jv(mu - 2.0, s) * s ** (-b1 - 1.0)

    edges = np.arange(x, x + span + math.pi, math.pi)
    gx, gw = _leggauss(16)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (b - a) * gx + 0.5 * (a + b)
    rem = float(np.sum(0.5 * (b - a)[:, 0] * (integrand(nodes) @ gw)))
    if not np.isfinite(rem):
        raise NumericalError("by-parts remainder quadrature failed", term_index=term_index, x=x)
    return lead + c1 * (second + c2 * rem)


def hypersingular_constant(n, ell, alpha, resolution=1):
    """``d_{n,ell}(alpha) = (2i)^ell int_0^inf V(rho) rho^{-1-alpha} d rho``."""
    if alpha >= ell:
        raise DomainError(f"alpha >= ell ({alpha} >= {ell}): the integral diverges at 0")
    return riesz_symbols(n, ell, alpha, resolution).d


def w_eval(n, ell, alpha, r):
    return riesz_symbols(n, ell, alpha).w(r)


def A_eval(n, ell, alpha, r):
    return riesz_symbols(n, ell, alpha).A(r)


def B_eval(n, ell, alpha, r):
    return riesz_symbols(n, ell, alpha).B(r)


def B_asymptotic(n, ell, alpha, r, with_bessel_term=True):
    return riesz_symbols(n, ell, alpha).B_asymptotic(r, with_bessel_term)


# ---------------------------------------------------------------------------
# RadialSymbol
# ---------------------------------------------------------------------------

def _richardson_derivative(f, r, k, rel_step=0.04, levels=3):
    """k-th derivative by central differences with step ``h = rel_step * min(r, 1)``,
    Richardson-extrapolated over ``h, h/2, h/4``."""
    r = np.asarray(r, dtype=float)
    table = []
    for lev in range(levels):
        h = rel_step * np.minimum(r, 1.0) / 2 ** lev
        acc = np.zeros_like(r)
        for j in range(k + 1):
            acc += (-1) ** j * math.comb(k, j) * f(r + (k / 2.0 - j) * h)
        table.append(acc / h ** k)
    for m in range(1, levels):
        fac = 4.0 ** m
        table = [(fac * table[i + 1] - table[i]) / (fac - 1.0) for i in range(len(table) - 1)]
    return table[0]


@dataclass(frozen=True)
class RadialSymbol:
    """A function of ``r >= 0`` with derivative access.

    ``jet_fn(r, K)`` returns derivatives ``0..K``; without it, derivatives come
    from Richardson finite differences.
    """

    name: str
    fn: Callable
    jet_fn: Optional[Callable] = None
    singular_at_zero: bool = False
    limit_at_infinity: Optional[float] = None

    def eval(self, r):
        r = np.asarray(r, dtype=float)
        if self.jet_fn is not None:
            return self.jet_fn(r, 0)[0]
        return self.fn(r)

    __call__ = eval

    def jet(self, r, order):
        r = np.asarray(r, dtype=float)
        if self.jet_fn is not None:
            return self.jet_fn(r, order)
        out = np.empty((order + 1,) + r.shape)
        out[0] = self.fn(r)
        for k in range(1, order + 1):
            out[k] = self.fd_deriv(k, r)
        return out

    def deriv(self, k, r):
        if k == 0:
            return self.eval(r)
        return self.jet(r, k)[k]

    def fd_deriv(self, k, r, rel_step=0.04):
        return _richardson_derivative(self.fn, r, k, rel_step=rel_step)

    def dilate(self, eps):
        """``r -> M(eps r)``."""
        jet_fn = None
        if self.jet_fn is not None:
            def jet_fn(r, K, _j=self.jet_fn):
                return jets.scale_argument(_j(eps * np.asarray(r, dtype=float), K), eps)
        return RadialSymbol(f"{self.name}(eps={eps:g})", lambda r, _f=self.fn: _f(eps * np.asarray(r)),
                            jet_fn, self.singular_at_zero, self.limit_at_infinity)

    def __mul__(self, other):
        if not isinstance(other, RadialSymbol):
            return NotImplemented
        jet_fn = None
        if self.jet_fn is not None and other.jet_fn is not None:
            def jet_fn(r, K, a=self.jet_fn, b=other.jet_fn):
                return jets.mul(a(r, K), b(r, K))
        lim = None
        if self.limit_at_infinity is not None and other.limit_at_infinity is not None:
            lim = self.limit_at_infinity * other.limit_at_infinity
        return RadialSymbol(f"{self.name}*{other.name}", lambda r: self.fn(r) * other.fn(r), jet_fn,
                            self.singular_at_zero or other.singular_at_zero, lim)

    def __sub__(self, c):
        if not isinstance(c, (int, float)):
            return NotImplemented

        def jet_fn(r, K, j=self.jet):
            out = j(r, K)
            out[0] = out[0] - c
            return out

        lim = None if self.limit_at_infinity is None else self.limit_at_infinity - c
        return RadialSymbol(f"({self.name}-{c:g})", lambda r: self.fn(r) - c, jet_fn,
                            self.singular_at_zero, lim)


def constant_symbol(value=1.0):
    return RadialSymbol("const", lambda r: np.full(np.shape(r), float(value)),
                        lambda r, K: jets.constant(float(value), K, np.shape(r)),
                        limit_at_infinity=float(value))


def sin_symbol():
    def jet_fn(r, K):
        r = np.asarray(r, dtype=float)
        return np.array([np.sin(r + j * math.pi / 2) for j in range(K + 1)])
    return RadialSymbol("sin", np.sin, jet_fn)


def bump_symbol(a=1.0, b=2.0):
    """``exp(-1/((t-a)(b-t)))`` on ``(a, b)``, zero elsewhere, with analytic jets."""
    def jet_fn(t, K):
        t = np.asarray(t, dtype=float)
        out = np.zeros((K + 1,) + t.shape)
        u = (t - a) * (b - t)
        live = u > _PSI_CUT * (b - a) ** 2
        if live.any():
            tl = t[live]
            uj = np.zeros((K + 1,) + tl.shape)
            uj[0] = u[live]
            if K >= 1:
                uj[1] = a + b - 2.0 * tl
            if K >= 2:
                uj[2] = -2.0
            out[:, live] = jets.exp(-jets.recip(uj))
        return out

    return RadialSymbol(f"bump[{a:g},{b:g}]", lambda t: jet_fn(t, 0)[0], jet_fn, limit_at_infinity=0.0)


def A_symbol(n, ell, alpha):
    s = riesz_symbols(n, ell, alpha)
    return RadialSymbol(f"A[n={n},ell={ell},alpha={alpha:g}]", s.A, s.A_jet,
                        limit_at_infinity=s.A_infinity)


def B_symbol(n, ell, alpha):
    s = riesz_symbols(n, ell, alpha)
    return RadialSymbol(f"B[n={n},ell={ell},alpha={alpha:g}]", s.B, s.B_jet,
                        limit_at_infinity=s.B_infinity)


def w_symbol(n, ell, alpha):
    s = riesz_symbols(n, ell, alpha)
    return RadialSymbol(f"w[n={n},ell={ell},alpha={alpha:g}]", s.w, s.w_jet, limit_at_infinity=0.0)


# ---------------------------------------------------------------------------
# partition of unity
# ---------------------------------------------------------------------------

_PSI_CUT = 2e-3  # exp(-1/x) and its first derivatives are below 1e-200 there


def _psi_jet(x, order):
    """Jet of ``psi(x) = exp(-1/x)`` (0 for ``x <= 0``) in ``x``."""
    x = np.asarray(x, dtype=float)
    out = np.zeros((order + 1,) + x.shape)
    live = x > _PSI_CUT
    if live.any():
        xl = x[live]
        g = np.array([(-1) ** (j + 1) * math.factorial(j) * xl ** (-1.0 - j) for j in range(order + 1)])
        out[:, live] = jets.exp(g)
    return out


def _smoothstep_jet(x, order):
    """Jet of ``S(x) = psi(x) / (psi(x) + psi(1-x))``: 0 for x <= 0, 1 for x >= 1."""
    x = np.asarray(x, dtype=float)
    a = _psi_jet(x, order)
    b = jets.scale_argument(_psi_jet(1.0 - x, order), -1.0)
    return jets.div(a, a + b)


def partition_unity(eps=1.0, delta=1.0, N=10.0):
    """Smooth ``mu1 + mu2 + mu3 = 1``; ``mu1 = 1`` on ``[0, eps]``, ``mu3 = 1`` on ``[N, inf)``."""
    if not (0.0 < eps and eps + delta < N - delta and delta > 0.0):
        raise DomainError(f"supports overlap: need 0 < eps < eps+delta < N-delta (eps={eps}, delta={delta}, N={N})")

    def mu1_jet(r, K):
        return jets.scale_argument(_smoothstep_jet((eps + delta - np.asarray(r, dtype=float)) / delta, K), -1.0 / delta)

    def mu3_jet(r, K):
        return jets.scale_argument(_smoothstep_jet((np.asarray(r, dtype=float) - (N - delta)) / delta, K), 1.0 / delta)

    def mu2_jet(r, K):
        out = -mu1_jet(r, K) - mu3_jet(r, K)
        out[0] += 1.0
        return out

    mk = lambda name, j, lim: RadialSymbol(name, lambda r, _j=j: _j(r, 0)[0], j, limit_at_infinity=lim)
    return mk("mu1", mu1_jet, 0.0), mk("mu2", mu2_jet, 0.0), mk("mu3", mu3_jet, 1.0)


# ---------------------------------------------------------------------------
# Mikhlin audit
# ---------------------------------------------------------------------------

DILATIONS = tuple(10.0 ** e for e in range(-3, 4))


@dataclass
class MikhlinAudit:
    symbol: str
    k_max: int
    sup_bounds: list
    refinement_delta: list
    extension_growth: list
    dilation_spread: list
    divergent: list
    grid: dict

    @property
    def finite(self):
        return all(np.isfinite(b) for b in self.sup_bounds) and not any(self.divergent)

    def records(self):
        return [{"k": k, "sup_bound": float(self.sup_bounds[k]),
                 "refinement_delta": float(self.refinement_delta[k]),
                 "extension_growth": float(self.extension_growth[k]),
                 "dilation_spread": float(self.dilation_spread[k]),
                 "divergent": bool(self.divergent[k]),
                 "grid": self.grid} for k in range(self.k_max + 1)]


def audit_grid(r_min, r_max, per_decade, max_step):
    """Log-spaced points merged with a uniform grid of step ``max_step``."""
    log_pts = np.geomspace(r_min, r_max, int(per_decade * math.log10(r_max / r_min)) + 1)
    lin_hi = min(r_max, 1e3)
    lin_pts = np.arange(r_min, lin_hi, max_step) if lin_hi > r_min else np.empty(0)
    return np.unique(np.concatenate([log_pts, lin_pts]))


def _sup_profile(symbol, r, k_max):
    jet = symbol.jet(r, k_max)
    return np.array([np.max(np.abs(r ** k * jet[k])) for k in range(k_max + 1)])


def mikhlin_audit(symbol, k_max, r_min=1e-4, r_max=1e4, per_decade=400, max_step=0.02,
                  dilations=DILATIONS, growth_tol=0.05):
    """Numerical Mikhlin bounds ``sup_r |r^k M^{(k)}(r)|``, ``k = 0..k_max``.

    ``refinement_delta``: relative change of each bound when the grid density
    doubles.  ``extension_growth``: relative change when ``r_max`` grows by 10x
    (``r_min`` shrinks by 10x); above ``growth_tol`` the bound is flagged
    divergent.  ``dilation_spread``: max over ``eps`` of the relative deviation
    of the bound for ``M(eps r)`` from the ``eps = 1`` bound.
    """
    if k_max < 0:
        raise DomainError("k_max must be >= 0")
    grid = audit_grid(r_min, r_max, per_decade, max_step)
    fine = audit_grid(r_min, r_max, 2 * per_decade, max_step / 2)
    wide = audit_grid(r_min / 10, r_max * 10, per_decade, max_step)
    try:
        base = _sup_profile(symbol, grid, k_max)
        ref = _sup_profile(symbol, fine, k_max)
        ext = _sup_profile(symbol, wide, k_max)
        dil = np.array([_sup_profile(symbol.dilate(e), grid, k_max) for e in dilations])
    except (FloatingPointError, ZeroDivisionError) as exc:
        raise NumericalError(f"derivative estimation failed for {symbol.name}: {exc}") from exc
    if not np.all(np.isfinite(base)):
        raise NumericalError(f"non-finite derivative samples for {symbol.name}", sup_bounds=base.tolist())
    scale = np.maximum(np.abs(base), 1e-300)
    refine = np.abs(ref - base) / scale
    growth = np.abs(ext - base) / scale
    spread = np.max(np.abs(dil - base) / scale, axis=0)
    # all-zero bounds (e.g. derivatives of a constant) are stable by definition
    zero = np.abs(base) < 1e-13
    refine[zero & (np.abs(ref) < 1e-13)] = 0.0
    growth[zero & (np.abs(ext) < 1e-13)] = 0.0
    spread[zero & (np.max(np.abs(dil), axis=0) < 1e-13)] = 0.0
    divergent = [bool(g > growth_tol) for g in growth]
    return MikhlinAudit(symbol.name, k_max, base.tolist(), refine.tolist(), growth.tolist(),
                        spread.tolist(), divergent,
                        {"r_min": r_min, "r_max": r_max, "per_decade": per_decade,
                         "max_step": max_step, "points": int(grid.size)})


def symbol_by_name(name, n=2, ell=2, alpha=0.5):
    """Lookup used by the CLI audit command."""
    mu1, mu2, mu3 = partition_unity()
    table = {
        "A": lambda: A_symbol(n, ell, alpha),
        "B": lambda: B_symbol(n, ell, alpha),
        "w": lambda: w_symbol(n, ell, alpha),
        "mu1": lambda: mu1,
        "mu2": lambda: mu2,
        "mu3": lambda: mu3,
        "B_mu3": lambda: mu3 * (B_symbol(n, ell, alpha) - riesz_symbols(n, ell, alpha).B_infinity),
        "const": constant_symbol,
        "sin": sin_symbol,
    }
    if name not in table:
        raise KeyError(name)
    return table[name]()


# ---------------------------------------------------------------------------
# kernel a_3 = F^{-1}[mu_3 (B - B_inf)]
# ---------------------------------------------------------------------------

@dataclass
class A3Probe:
    r: np.ndarray
    values: np.ndarray
    converged: np.ndarray
    small_r_exponent: float
    small_r_bound: float
    slope_near: float
    slope_far: float
    windows: tuple
    mass_by_extent: dict

    @property
    def steepening(self):
        return self.slope_far < self.slope_near

    @property
    def integrable(self):
        m = list(self.mass_by_extent.values())
        return all(np.isfinite(m)) and abs(m[-1] - m[-2]) <= 0.01 * abs(m[-1]) + 1e-12


def _envelope_slope(r, v, lo, hi, pieces=4):
    sel = (r >= lo) & (r <= hi)
    edges = np.geomspace(lo, hi, pieces + 1)
    xs, ys = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        k = sel & (r >= a) & (r <= b)
        if k.any():
            i = np.argmax(np.abs(v[k]))
            xs.append(r[k][i])
            ys.append(abs(v[k][i]))
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def a3_decay_probe(n, ell, alpha, r_list=None, eps=1.0, delta=1.0, N=10.0,
                   near=(3.0, 8.0), far=(30.0, 60.0)):
    """Decay report for the kernel of ``mu_3 (B - B_inf)``.

    ``r_list`` defaults to a log grid on ``[0.01, 100]`` merged with uniform
    points on the two slope windows.  The small-``r`` exponent is a log-log fit
    of ``|a_3|`` on ``r <= 0.1``; window slopes fit the local maxima envelope.
    """
    if n != 2:
        raise DomainError("the a_3 probe is calibrated for n = 2")
    s = riesz_symbols(n, ell, alpha)
    _, _, mu3 = partition_unity(eps, delta, N)
    f = mu3 * (B_symbol(n, ell, alpha) - s.B_infinity)
    if r_list is None:
        r_list = np.unique(np.concatenate([np.geomspace(0.01, 100.0, 33),
                                           np.linspace(*near, 25), np.linspace(*far, 25)]))
    r = np.asarray(r_list, dtype=float)
    samples = hankel.SymbolSamples(f.jet, 3, N - delta)
    vals, conv = [], []
    for ri in r:
        v, info = radial_inverse_fourier(f, n, ri, t_min=N - delta, frequencies=tuple(s.V.ell_i),
                                         lift_m=3, samples=samples, strict=False, return_info=True)
        vals.append(v)
        conv.append(info.converged)
    vals = np.array(vals)
    small = r <= 0.1
    expo = float(np.polyfit(np.log(r[small]), np.log(np.abs(vals[small])), 1)[0]) if small.sum() >= 2 else float("nan")
    # integral of |a_3| r^{n-1} over growing ranges (trapezoid on the sample grid)
    mass = {}
    for R in (25.0, 50.0, 100.0):
        k = r <= R
        mass[R] = float(np.trapezoid(np.abs(vals[k]) * r[k] ** (n - 1), r[k])) * sphere_area(n)
    return A3Probe(r, vals, np.array(conv), expo, -(n / 2.0 - 0.5),
                   _envelope_slope(r, vals, *near), _envelope_slope(r, vals, *far), (near, far), mass)

