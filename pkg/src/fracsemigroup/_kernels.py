"""Hot numeric kernels, each with a compiled and a pure-numpy implementation.

Public callers go through the dispatch functions at the bottom of the module
(``jv``, ``oscillatory_tail``, ``modular_sum``, ``binomial_semigroup_symbol``,
``periodic_cubic_shift``); they route to ``_nb_*`` when numba is active and to
``_np_*`` otherwise.  Both routes implement the same algorithm and are tested
against each other.

Bessel J branches (order ``nu`` real, argument ``x >= 0``):

* ``x <= SERIES_MAX``: ascending power series.
* ``x > SERIES_MAX``: Hankel asymptotic expansion for the two orders
  ``frac(nu)`` and ``frac(nu) + 1`` followed by three-term recurrence to
  ``nu``; upward when ``nu < x``, Miller backward recurrence otherwise.
  For ``nu + 1/2`` integral the Hankel series terminates after the first
  term, i.e. the half-integer closed forms.
* negative integer orders use ``J_{-m} = (-1)^m J_m``.
"""
import cmath
import math

import numpy as np

from ._accel import USING_NUMBA, jit

SERIES_MAX = 14.0
_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
_EPS = 1e-17


# ---------------------------------------------------------------------------
# compiled scalar kernels
# ---------------------------------------------------------------------------

@jit
def _jv_series(nu, x):
    half = 0.5 * x
    q = -half * half
    term = math.exp(nu * math.log(half) - math.lgamma(nu + 1.0))
    g = math.gamma(nu + 1.0)
    if g < 0.0:
        term = -term
    total = term
    k = 0
    while k < 400:
        k += 1
        term *= q / (k * (k + nu))
        total += term
        if abs(term) <= _EPS * abs(total) and k > 2:
            break
    return total


@jit
def _jv_hankel(mu, x):
    four_mu2 = 4.0 * mu * mu
    p = 1.0
    qsum = 0.0
    a = 1.0
    last = 1.0
    k = 0
    while k < 200:
        k += 1
        a *= (four_mu2 - (2.0 * k - 1.0) ** 2) / (8.0 * k * x)
        mag = abs(a)
        if mag == 0.0:
            break
        if mag > last and k > 2.0 * abs(mu) + 2.0:
            break
        last = mag
        r = k % 4
        if r == 0:
            p += a
        elif r == 1:
            qsum += a
        elif r == 2:
            p -= a
        else:
            qsum -= a
        if mag < _EPS:
            break
    omega = x - (0.5 * mu + 0.25) * math.pi
    return _SQRT_2_OVER_PI / math.sqrt(x) * (p * math.cos(omega) - qsum * math.sin(omega))


@jit
def _jv_large(nu, x):
    base = math.floor(nu)
    mu = nu - base
    m = int(base)
    j0 = _jv_hankel(mu, x)
    if m == 0:
        return j0
    j1 = _jv_hankel(mu + 1.0, x)
    if m == 1:
        return j1
    if m < 0:
        # downward: J_{s-1} = 2 s / x J_s - J_{s+1}
        hi = j1
        lo = j0
        s = mu
        for _ in range(-m):
            nxt = 2.0 * s / x * lo - hi
            hi = lo
            lo = nxt
            s -= 1.0
        return lo
    if nu < 0.8 * x:
        lo = j0
        hi = j1
        s = mu + 1.0
        for _ in range(m - 1):
            nxt = 2.0 * s / x * hi - lo
            lo = hi
            hi = nxt
            s += 1.0
        return hi
    # Miller: backward from a high order, normalised against J_mu
    top = m + 40 + int(x)
    jp = 0.0
    jc = 1e-300
    target = 0.0
    s = mu + top
    for i in range(top, 0, -1):
        jm = 2.0 * s / x * jc - jp
        jp = jc
        jc = jm
        s -= 1.0
        if i - 1 == m:
            target = jc
        if abs(jc) > 1e250:
            jc *= 1e-250
            jp *= 1e-250
            target *= 1e-250
    return target * (j0 / jc)


@jit
def _jv_scalar(nu, x):
    if x < 0.0 or x != x:
        return math.nan
    if nu < 0.0 and nu == math.floor(nu):
        m = int(-nu)
        v = _jv_scalar(-nu, x)
        return -v if m % 2 == 1 else v
    if x == 0.0:
        if nu == 0.0:
            return 1.0
        if nu > 0.0:
            return 0.0
        return math.inf
    if x <= SERIES_MAX:
        return _jv_series(nu, x)
    return _jv_large(nu, x)


@jit
def _nb_jv(nu, x):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        out[i] = _jv_scalar(nu, x[i])
    return out


@jit
def _expint_cf(p, zr, zi):
    # E_p(z) = int_1^inf exp(-z u) u^{-p} du by modified Lentz; |z| >~ 1.
    tiny = 1e-300
    b = complex(zr + p, zi)
    c = complex(1.0 / tiny, 0.0)
    d = 1.0 / b
    h = d
    for i in range(1, 2000):
        an = -i * (p - 1.0 + i)
        b = b + 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        de = c * d
        h = h * de
        if abs(de - 1.0) < 1e-16:
            break
    z = complex(zr, zi)
    return h * cmath.exp(-z)


@jit
def _nb_expint_imag(p, x):
    out = np.empty(x.shape[0], dtype=np.complex128)
    for i in range(x.shape[0]):
        out[i] = _expint_cf(p, 0.0, -x[i])
    return out


@jit
def _nb_oscillatory_tail(mu, beta, x):
    # int_x^inf J_mu(s) s^{-beta} ds for x >~ 20 via Hankel + E_p
    out = np.empty(x.shape[0])
    four_mu2 = 4.0 * mu * mu
    phase = complex(math.cos((0.5 * mu + 0.25) * math.pi),
                    -math.sin((0.5 * mu + 0.25) * math.pi))
    for i in range(x.shape[0]):
        xi = x[i]
        acc = complex(0.0, 0.0)
        a = 1.0
        ik = complex(1.0, 0.0)
        last = 1.0
        for k in range(0, 120):
            if k > 0:
                a *= (four_mu2 - (2.0 * k - 1.0) ** 2) / (8.0 * k)
                ik = ik * 1j
            if a == 0.0:
                break
            mag = abs(a) / xi ** k
            if k > 2.0 * abs(mu) + 2.0 and mag > last:
                break
            last = mag
            gam = beta + 0.5 + k
            e = _expint_cf(gam, 0.0, -xi)
            acc += ik * a * xi ** (1.0 - gam) * e
            if mag < 1e-18:
                break
        out[i] = (_SQRT_2_OVER_PI * phase * acc).real
    return out


@jit
def _nb_modular_sum(values, exponents, weight):
    total = 0.0
    for i in range(values.shape[0]):
        v = abs(values[i])
        if v > 0.0:
            total += v ** exponents[i]
    return total * weight


@jit
def _nb_binomial_semigroup_symbol(alpha, t, xi, kmax, tol):
    # sum_{k=0}^K (-1)^k binom(alpha, k) exp(-k t xi), stopped once the
    # remaining geometric tail bound drops below tol
    out = np.zeros(xi.shape[0])
    for i in range(xi.shape[0]):
        q = math.exp(-t * xi[i])
        c = 1.0
        z = 1.0
        s = 1.0
        for k in range(1, kmax + 1):
            c *= -(alpha - k + 1.0) / k
            z *= q
            s += c * z
            if k > alpha and q < 1.0 and abs(c) * z * q / (1.0 - q) < tol:
                break
        out[i] = s
    return out


@jit
def _nb_periodic_cubic_shift(values, shift_cells):
    # Catmull-Rom (cubic Hermite) interpolation of a periodic 1-D signal at
    # positions i - shift_cells
    n = values.shape[0]
    out = np.empty(n)
    base = math.floor(shift_cells)
    frac = shift_cells - base
    s = 1.0 - frac  # position inside cell [i - base - 1, i - base]
    for i in range(n):
        i1 = (i - int(base) - 1) % n
        i0 = (i1 - 1) % n
        i2 = (i1 + 1) % n
        i3 = (i1 + 2) % n
        p0 = values[i0]
        p1 = values[i1]
        p2 = values[i2]
        p3 = values[i3]
        out[i] = p1 + 0.5 * s * (p2 - p0 + s * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3
                                                + s * (3.0 * (p1 - p2) + p3 - p0)))
    return out


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def _np_jv_series(nu, x):
    half = 0.5 * x
    q = -half * half
    with np.errstate(divide="ignore"):
        term = np.exp(nu * np.log(half) - math.lgamma(nu + 1.0))
    if math.gamma(nu + 1.0) < 0.0:
        term = -term
    total = term.copy()
    for k in range(1, 400):
        term = term * q / (k * (k + nu))
        total = total + term
        if np.all(np.abs(term) <= _EPS * np.abs(total)) and k > 2:
            break
    return total


def _np_jv_hankel(mu, x):
    four_mu2 = 4.0 * mu * mu
    p = np.ones_like(x)
    qs = np.zeros_like(x)
    a = np.ones_like(x)
    last = np.ones_like(x)
    live = np.ones(x.shape, dtype=bool)
    for k in range(1, 200):
        a = a * (four_mu2 - (2.0 * k - 1.0) ** 2) / (8.0 * k * x)
        mag = np.abs(a)
        if k > 2.0 * abs(mu) + 2.0:
            live &= mag <= last
        live &= mag > 0.0
        add = np.where(live, a, 0.0)
        r = k % 4
        if r == 0:
            p = p + add
        elif r == 1:
            qs = qs + add
        elif r == 2:
            p = p - add
        else:
            qs = qs - add
        live &= mag >= _EPS
        last = mag
        if not live.any():
            break
    omega = x - (0.5 * mu + 0.25) * math.pi
    return _SQRT_2_OVER_PI / np.sqrt(x) * (p * np.cos(omega) - qs * np.sin(omega))


def _np_jv_large(nu, x):
    base = math.floor(nu)
    mu = nu - base
    m = int(base)
    j0 = _np_jv_hankel(mu, x)
    if m == 0:
        return j0
    j1 = _np_jv_hankel(mu + 1.0, x)
    if m == 1:
        return j1
    if m < 0:
        hi, lo, s = j1, j0, mu
        for _ in range(-m):
            hi, lo = lo, 2.0 * s / x * lo - hi
            s -= 1.0
        return lo
    out = np.empty_like(x)
    up = nu < 0.8 * x
    if up.any():
        xs = x[up]
        lo, hi, s = j0[up], j1[up], mu + 1.0
        for _ in range(m - 1):
            lo, hi = hi, 2.0 * s / xs * hi - lo
            s += 1.0
        out[up] = hi
    if (~up).any():
        out[~up] = np.array([_jv_large_py(nu, xi) for xi in x[~up]])
    return out


def _jv_large_py(nu, x):
    return float(_jv_large(nu, float(x)))


def _np_jv(nu, x):
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    if nu < 0.0 and nu == math.floor(nu):
        v = _np_jv(-nu, x)
        return -v if int(-nu) % 2 == 1 else v
    bad = ~(x >= 0.0)
    zero = x == 0.0
    small = (x > 0.0) & (x <= SERIES_MAX)
    large = x > SERIES_MAX
    out[bad] = np.nan
    out[zero] = 1.0 if nu == 0.0 else (0.0 if nu > 0.0 else np.inf)
    if small.any():
        out[small] = _np_jv_series(nu, x[small])
    if large.any():
        out[large] = _np_jv_large(nu, x[large])
    return out


def _np_expint_cf(p, z):
    tiny = 1e-300
    b = z + p
    c = np.full(z.shape, 1.0 / tiny, dtype=complex)
    d = 1.0 / b
    h = d
    for i in range(1, 2000):
        an = -i * (p - 1.0 + i)
        b = b + 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        de = c * d
        h = h * de
        if np.all(np.abs(de - 1.0) < 1e-16):
            break
    return h * np.exp(-z)


def _np_oscillatory_tail(mu, beta, x):
    four_mu2 = 4.0 * mu * mu
    phase = np.exp(-1j * (0.5 * mu + 0.25) * math.pi)
    acc = np.zeros(x.shape, dtype=complex)
    a = 1.0
    ik = 1.0 + 0.0j
    last = np.ones_like(x)
    live = np.ones(x.shape, dtype=bool)
    for k in range(0, 120):
        if k > 0:
            a *= (four_mu2 - (2.0 * k - 1.0) ** 2) / (8.0 * k)
            ik *= 1j
        if a == 0.0:
            break
        mag = abs(a) / x ** k
        if k > 2.0 * abs(mu) + 2.0:
            live &= mag <= last
        if not live.any():
            break
        gam = beta + 0.5 + k
        idx = np.nonzero(live)[0]
        e = _np_expint_cf(gam, -1j * x[idx])
        acc[idx] += ik * a * x[idx] ** (1.0 - gam) * e
        live &= mag >= 1e-18
        last = mag
    return (_SQRT_2_OVER_PI * phase * acc).real


def _np_modular_sum(values, exponents, weight):
    v = np.abs(values)
    with np.errstate(divide="ignore"):
        terms = np.where(v > 0.0, v ** exponents, 0.0)
    return float(terms.sum() * weight)


def _np_binomial_semigroup_symbol(alpha, t, xi, kmax, tol):
    q = np.exp(-t * xi)
    s = np.ones_like(xi)
    z = np.ones_like(xi)
    c = 1.0
    live = np.ones(xi.shape, dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        for k in range(1, kmax + 1):
            c *= -(alpha - k + 1.0) / k
            z = z * q
            s = np.where(live, s + c * z, s)
            bound = np.where(q < 1.0, abs(c) * z * q / (1.0 - q), np.inf)
            if k > alpha:
                live &= ~(bound < tol)
            if not live.any():
                break
    return s


def _np_periodic_cubic_shift(values, shift_cells):
    base = math.floor(shift_cells)
    s = 1.0 - (shift_cells - base)
    p1 = np.roll(values, int(base) + 1)
    p0 = np.roll(p1, 1)
    p2 = np.roll(p1, -1)
    p3 = np.roll(p1, -2)
    return p1 + 0.5 * s * (p2 - p0 + s * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3
                                          + s * (3.0 * (p1 - p2) + p3 - p0)))


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def jv(nu, x):
    """Bessel function of the first kind ``J_nu(x)`` for real ``nu`` and ``x >= 0``."""
    x = np.asarray(x, dtype=float)
    flat = np.ascontiguousarray(x.ravel())
    if USING_NUMBA:
        out = _nb_jv(float(nu), flat)
    else:
        out = _np_jv(float(nu), flat)
    return out.reshape(x.shape)


def oscillatory_tail(mu, beta, x):
    """``int_x^inf J_mu(s) s^(-beta) ds``, valid for ``x >= 20``."""
    x = np.asarray(x, dtype=float)
    flat = np.ascontiguousarray(x.ravel())
    if USING_NUMBA:
        out = _nb_oscillatory_tail(float(mu), float(beta), flat)
    else:
        out = _np_oscillatory_tail(float(mu), float(beta), flat)
    return out.reshape(x.shape)


def expint_imag(p, x):
    """``E_p(-i x) = int_1^inf e^{i x u} u^{-p} du`` for ``|x| >~ 0.5``."""
    x = np.asarray(x, dtype=float)
    flat = np.ascontiguousarray(x.ravel())
    if USING_NUMBA:
        out = _nb_expint_imag(float(p), flat)
    else:
        out = _np_expint_cf(float(p), -1j * flat)
    return out.reshape(x.shape)


def modular_sum(values, exponents, weight):
    v = np.ascontiguousarray(np.asarray(values, dtype=float).ravel())
    p = np.ascontiguousarray(np.asarray(exponents, dtype=float).ravel())
    if USING_NUMBA:
        return float(_nb_modular_sum(v, p, float(weight)))
    return _np_modular_sum(v, p, float(weight))


def binomial_semigroup_symbol(alpha, t, xi, kmax, tol):
    xi = np.asarray(xi, dtype=float)
    flat = np.ascontiguousarray(xi.ravel())
    if USING_NUMBA:
        out = _nb_binomial_semigroup_symbol(float(alpha), float(t), flat, int(kmax), float(tol))
    else:
        out = _np_binomial_semigroup_symbol(float(alpha), float(t), flat, int(kmax), float(tol))
    return out.reshape(xi.shape)


def periodic_cubic_shift(values, shift_cells):
    v = np.ascontiguousarray(np.asarray(values, dtype=float))
    if USING_NUMBA:
        return _nb_periodic_cubic_shift(v, float(shift_cells))
    return _np_periodic_cubic_shift(v, float(shift_cells))
