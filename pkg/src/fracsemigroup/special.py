"""Special functions and combinatorial kernels.

Fractional binomials, Bessel ``J_nu``, the Fourier expansion of ``sin^ell``,
the spherical integral ``V(rho) = int_{S^{n-1}} sin^ell(rho sigma_1) dsigma``
(closed Bessel form plus a brute-force quadrature), and derivative recurrences
for quotients and for ``(t^{-1} d/dt)^m``.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import integrate

from . import _kernels
from .errors import DomainError, NumericalError

__all__ = [
    "sphere_area",
    "frac_binomial",
    "frac_binomial_tail",
    "binomial_abs_sum",
    "bessel_j",
    "SinPowerExpansion",
    "sin_power_expansion",
    "catalan_quadrature",
    "SphericalSineIntegral",
    "spherical_sine_integral",
    "quotient_derivative",
    "reciprocal_derivative",
    "radial_derivative_coeffs",
    "bessel_derivative_coeffs",
]


def sphere_area(n):
    """Surface measure ``|S^{n-1}|`` of the unit sphere in ``R^n`` (``|S^0| = 2``)."""
    if n < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


# ---------------------------------------------------------------------------
# fractional binomials
# ---------------------------------------------------------------------------

def frac_binomial(alpha, k):
    """``binom(alpha, k)`` for real ``alpha`` by the multiplicative recurrence."""
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    c = 1.0
    for j in range(1, k + 1):
        c *= (alpha - j + 1.0) / j
    return c


def frac_binomial_tail(alpha, K):
    """Upper bound on ``sum_{k > K} |binom(alpha, k)|``.

    For ``k > alpha`` the ratio ``|b_{k+1} / b_k| = 1 - (1 + alpha)/(k + 1)``
    gives ``|b_k| <= |b_{K+1}| ((K+2)/(k+1))^(1+alpha)``; summing against the
    integral of ``u^(-1-alpha)`` yields ``|b_{K+1}| (1 + (K+2)/alpha)``.
    """
    if alpha <= 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if K < math.ceil(alpha) + 1:
        raise DomainError(f"K must be >= ceil(alpha)+1 = {math.ceil(alpha) + 1}, got {K}")
    b = abs(frac_binomial(alpha, K + 1))
    return b * (1.0 + (K + 2.0) / alpha)


def binomial_abs_sum(alpha, tol=1e-12, kmax=10**7):
    """``c(alpha) = sum_k |binom(alpha, k)|``, summed until the tail bound < ``tol``."""
    total = 0.0
    c = 1.0
    k = 0
    while True:
        total += abs(c)
        k += 1
        c *= (alpha - k + 1.0) / k
        if c == 0.0:
            return total
        if k >= math.ceil(alpha) + 1 and abs(c) * (1.0 + (k + 1.0) / alpha) < tol:
            return total + abs(c) * (1.0 + (k + 1.0) / alpha)
        if k > kmax:
            raise NumericalError(f"binomial sum not converged after {kmax} terms")


# ---------------------------------------------------------------------------
# Bessel
# ---------------------------------------------------------------------------

def bessel_j(nu, x):
    """Bessel function of the first kind ``J_nu(x)``, ``x >= 0``.

    Absolute error below ``1e-10`` for ``nu`` in ``[-1/2, 8]`` and ``x`` in
    ``[0, 1e3]``.  See :mod:`fracsemigroup._kernels` for the branch layout;
    the series/asymptotic switchover sits at ``x = 14``.
    """
    scalar = np.ndim(x) == 0
    out = _kernels.jv(nu, np.asarray(x, dtype=float))
    return float(out) if scalar else out


def bessel_derivative_coeffs(j):
    """Coefficients of ``(d/dx)^j = sum c_{p,q} x^p D^q`` with ``D = x^{-1} d/dx``.

    Returned as a list of ``(p, q, c)``.  Used with
    ``D^q [x^{-mu} J_mu(x)] = (-1)^q x^{-mu-q} J_{mu+q}(x)``.
    """
    ops = {(0, 0): 1}
    for _ in range(j):
        nxt = {}
        for (p, q), c in ops.items():
            if p:
                nxt[(p - 1, q)] = nxt.get((p - 1, q), 0) + p * c
            nxt[(p + 1, q + 1)] = nxt.get((p + 1, q + 1), 0) + c
        ops = {key: c for key, c in nxt.items() if c}
    return sorted((p, q, c) for (p, q), c in ops.items())


# ---------------------------------------------------------------------------
# sin^ell
# ---------------------------------------------------------------------------

def _check_even_ell(ell):
    if int(ell) != ell or ell < 2 or ell % 2:
        raise DomainError(f"ell must be an even integer >= 2, got {ell}")
    return int(ell)


@dataclass(frozen=True)
class SinPowerExpansion:
    """``sin^ell(t) = constant_term + sum_i coeff_i cos(freq_i t)``."""

    ell: int
    constant_term: float
    cosine_coeffs: tuple  # ((frequency, coefficient), ...)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, self.constant_term)
        for freq, coeff in self.cosine_coeffs:
            out = out + coeff * np.cos(freq * t)
        return out


def sin_power_expansion(ell):
    ell = _check_even_ell(ell)
    half = ell // 2
    const = math.comb(ell, half) / 2.0 ** ell
    coeffs = tuple(
        (ell - 2 * i, (-1) ** (half - i) * math.comb(ell, i) * 2.0 ** (1 - ell))
        for i in range(half)
    )
    return SinPowerExpansion(ell, const, coeffs)


# ---------------------------------------------------------------------------
# V(rho): spherical integral of sin^ell
# ---------------------------------------------------------------------------

def catalan_quadrature(n, ell, rho, epsabs=1e-14, epsrel=1e-13):
    """Brute-force ``V(rho)`` through the one-dimensional reduction.

    ``V(rho) = |S^{n-2}| int_{-1}^{1} sin^ell(rho t) (1 - t^2)^{(n-3)/2} dt``,
    evaluated after ``t = cos(theta)`` so the ``n = 2`` endpoint singularity
    disappears.  ``n = 1`` is the two-point sum over ``S^0``.
    """
    ell = _check_even_ell(ell)
    if n == 1:
        return 2.0 * math.sin(rho) ** ell
    if n < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    if rho == 0.0:
        return 0.0

    def integrand(theta):
        return math.sin(rho * math.cos(theta)) ** ell * math.sin(theta) ** (n - 2)

    limit = max(200, int(8 * rho * ell))
    val, err = integrate.quad(integrand, 0.0, math.pi, epsabs=epsabs, epsrel=epsrel, limit=limit)
    if not np.isfinite(val) or err > 1e-9 * max(1.0, abs(val)):
        raise NumericalError(f"Catalan quadrature not converged at rho={rho}: est. error {err}")
    return sphere_area(n - 1) * val


@lru_cache(maxsize=None)
def _sin_power_taylor(ell, mmax):
    # sin^ell t = sum_m s_{2m} t^{2m}, exact rationals
    half = ell // 2
    out = []
    for m in range(mmax + 1):
        if m == 0:
            out.append(Fraction(0) if ell else Fraction(1))
            continue
        acc = Fraction(0)
        for i in range(half):
            acc += (-1) ** (half - i) * math.comb(ell, i) * Fraction((ell - 2 * i) ** (2 * m))
        acc *= Fraction(2) ** (1 - ell) * (-1) ** m / math.factorial(2 * m)
        out.append(acc)
    return tuple(out)


def _sphere_moment(n, m):
    # int_{S^{n-1}} sigma_1^{2m} dsigma
    return sphere_area(n) * math.exp(
        math.lgamma(m + 0.5) + math.lgamma(n / 2.0) - 0.5 * math.log(math.pi) - math.lgamma(m + n / 2.0)
    )


@dataclass(frozen=True)
class SphericalSineIntegral:
    """``V(rho) = lam + sum_i C_i J_{nu-1}(ell_i rho) / (ell_i rho)^{nu-1}``.

    ``lam`` is the mean of ``sin^ell`` times ``|S^{n-1}|``; ``lam_competing`` keeps
    the competing closed form ``4 pi^{n/2} Gamma((ell+1)/2) / (ell Gamma(ell/2)
    Gamma(n/2))`` so the two can be compared (their ratio is ``sqrt(pi)``).
    """

    n: int
    ell: int
    lam: float
    C: tuple
    ell_i: tuple
    nu: float
    lam_competing: float
    series_coeffs: np.ndarray = field(repr=False, compare=False)

    SERIES_MAX = 1.0

    @property
    def lam_discrepancy(self):
        return self.lam_competing / self.lam

    def __call__(self, rho):
        return self.eval(rho)

    def eval(self, rho, method="auto"):
        return self.jet(rho, 0, method=method)[0]

    def jet(self, rho, order, method="auto"):
        """Derivatives ``V^{(j)}(rho)``, ``j = 0..order``, shape ``(order+1,) + rho.shape``."""
        rho = np.asarray(rho, dtype=float)
        out = np.empty((order + 1,) + rho.shape)
        if method == "series":
            small = np.ones(rho.shape, dtype=bool)
        elif method == "bessel":
            small = np.zeros(rho.shape, dtype=bool)
        elif method == "auto":
            small = rho <= self.SERIES_MAX
        else:
            raise ValueError(f"unknown method {method!r}")
        if small.any():
            out[:, small] = self._series_jet(rho[small], order)
        if (~small).any():
            out[:, ~small] = self._bessel_jet(rho[~small], order)
        return out

    def _series_jet(self, rho, order):
        v = self.series_coeffs
        out = np.zeros((order + 1,) + rho.shape)
        for m in range(len(v) - 1, -1, -1):
            if v[m] == 0.0:
                continue
            p = 2 * m
            for j in range(order + 1):
                if j > p:
                    break
                fall = math.perm(p, j)
                out[j] += v[m] * fall * rho ** (p - j)
        return out

    def _bessel_jet(self, rho, order):
        mu = self.nu - 1.0
        out = np.zeros((order + 1,) + rho.shape)
        out[0] += self.lam
        for ci, li in zip(self.C, self.ell_i):
            x = li * rho
            cache = {}
            for j in range(order + 1):
                acc = np.zeros_like(x)
                for p, q, c in bessel_derivative_coeffs(j):
                    if q not in cache:
                        cache[q] = _kernels.jv(mu + q, x)
                    acc += c * (-1) ** q * x ** (p - mu - q) * cache[q]
                out[j] += ci * li ** j * acc
        return out


@lru_cache(maxsize=None)
def spherical_sine_integral(n, ell):
    """Build the closed-form ``V`` for dimension ``n`` and even ``ell``."""
    ell = _check_even_ell(ell)
    if n < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    half = ell // 2
    nu = n / 2.0
    lam = sphere_area(n) * math.comb(ell, half) / 2.0 ** ell
    lam_competing = (4.0 * math.pi ** (n / 2.0) * math.gamma((ell + 1) / 2.0)
                 / (ell * math.gamma(ell / 2.0) * math.gamma(n / 2.0)))
    C = tuple((-1) ** (half - i) * (2.0 * math.pi) ** (n / 2.0) * 2.0 ** (1 - ell) * math.comb(ell, i)
              for i in range(half))
    ell_i = tuple(ell - 2 * i for i in range(half))
    mmax = 60
    taylor = _sin_power_taylor(ell, mmax)
    series = np.array([float(taylor[m]) * _sphere_moment(n, m) for m in range(mmax + 1)])
    return SphericalSineIntegral(n, ell, lam, C, ell_i, nu, lam_competing, series)


# ---------------------------------------------------------------------------
# derivative recurrences
# ---------------------------------------------------------------------------

def quotient_derivative(u_derivs, v_derivs, k=None):
    """k-th derivative of ``u/v`` from the derivative jets of ``u`` and ``v``.

    Uses ``(u/v)^{(k)} = (u^{(k)} - k! sum_{j=1}^{k} v^{(k+1-j)}/(k+1-j)!
    (u/v)^{(j-1)}/(j-1)!) / v``.  Entries may be scalars or arrays (broadcast
    pointwise).  With ``k=None`` the whole jet ``[(u/v)^{(0)}, ..]`` is returned.
    """
    u = [np.asarray(a, dtype=float) for a in u_derivs]
    v = [np.asarray(a, dtype=float) for a in v_derivs]
    kk = len(u) - 1 if k is None else k
    if len(u) <= kk or len(v) <= kk:
        raise DomainError(f"need derivatives up to order {kk}")
    if np.any(v[0] == 0.0):
        raise DomainError("denominator vanishes at the evaluation point")
    q = []
    for m in range(kk + 1):
        acc = u[m].copy() if u[m].ndim else u[m] * 1.0
        for j in range(1, m + 1):
            i = m + 1 - j
            acc = acc - math.comb(m, i) * v[i] * q[j - 1]
        q.append(acc / v[0])
    if k is None:
        return q
    out = q[kk]
    return float(out) if np.ndim(out) == 0 else out


def reciprocal_derivative(v_derivs, k=None):
    """k-th derivative of ``1/v``; the quotient recurrence with ``u = 1``."""
    v = [np.asarray(a, dtype=float) for a in v_derivs]
    kk = len(v) - 1 if k is None else k
    if len(v) <= kk:
        raise DomainError(f"need derivatives up to order {kk}")
    if np.any(v[0] == 0.0):
        raise DomainError("v vanishes at the evaluation point")
    r = [1.0 / v[0]]
    for m in range(1, kk + 1):
        acc = 0.0
        for i in range(1, m + 1):
            acc = acc + math.comb(m, i) * v[i] * r[m - i]
        r.append(-acc / v[0])
    if k is None:
        return r
    out = r[kk]
    return float(out) if np.ndim(out) == 0 else out


def radial_derivative_coeffs(m):
    """``(t^{-1} d/dt)^m f = sum_k c_{k,m} f^{(k)} / t^{2m-k}`` as ``[(k, c_{k,m}), ...]``."""
    if m < 0:
        raise DomainError(f"m must be >= 0, got {m}")
    ops = {(0, 0): 1}  # (power of t, derivative order) -> coefficient
    for _ in range(m):
        nxt = {}
        for (p, k), c in ops.items():
            if p:
                nxt[(p - 2, k)] = nxt.get((p - 2, k), 0) + p * c
            nxt[(p - 1, k + 1)] = nxt.get((p - 1, k + 1), 0) + c
        ops = {key: c for key, c in nxt.items() if c}
    for (p, k) in ops:
        assert p == k - 2 * m
    return sorted((k, c) for (p, k), c in ops.items())
