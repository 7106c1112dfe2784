"""Variable-exponent Lebesgue spaces on the grid.

The modular is ``rho_p(f) = int |f(x)|^{p(x)} dx`` by the periodic trapezoid
rule and the Luxemburg norm is ``inf{lam > 0 : rho_p(f/lam) <= 1}``.  The
condition checkers are empirical: they report the largest quotient found over
the sampled pairs, not a proof.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, InvariantViolation, NumericalError, StructuralError
from .fields import Field, Grid

__all__ = [
    "ExponentField",
    "ConditionCertificate",
    "exponent_field",
    "exponent_family",
    "modular",
    "luxemburg_norm",
    "check_log_condition",
    "check_decay_condition",
    "log_condition_refinement",
    "conjugate_exponent",
]


@dataclass(frozen=True)
class ExponentField:
    grid: Grid
    samples: np.ndarray
    p_minus: float
    p_plus: float
    p_infinity: float = None
    name: str = "custom"

    def __post_init__(self):
        s = self.samples
        if s.shape != self.grid.shape:
            raise StructuralError(f"exponent samples shape {s.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(s)):
            raise StructuralError("exponent has non-finite samples")
        if self.p_minus != float(s.min()) or self.p_plus != float(s.max()):
            raise InvariantViolation("stored p_minus/p_plus differ from the samples")
        if self.p_minus < 1.0:
            raise DomainError(f"exponent must be >= 1, found {self.p_minus}")

    def __call__(self, x):
        raise TypeError("ExponentField is sampled; use .samples")


def exponent_field(grid, samples, p_infinity=None, name="custom"):
    try:
        s = np.broadcast_to(np.asarray(samples, dtype=float), grid.shape).copy()
    except ValueError as exc:
        raise StructuralError(f"exponent samples do not fit grid shape {grid.shape}") from exc
    s.setflags(write=False)
    return ExponentField(grid, s, float(s.min()), float(s.max()), p_infinity, name)


def exponent_family(name, grid, **params):
    """Exponent from the configuration families.

    ``constant(p)``, ``rational_decay(p_inf, a)`` = ``p_inf + a/(1+|x|^2)``,
    ``log_decay(p_inf, a)`` = ``p_inf + a/ln(2+|x|)``.
    """
    r = grid.radius
    if name == "constant":
        p = float(params["p"])
        return exponent_field(grid, p, p, name)
    p_inf = float(params.get("p_inf", 2.0))
    a = float(params.get("a", 1.0))
    if name == "rational_decay":
        return exponent_field(grid, p_inf + a / (1.0 + r * r), p_inf, name)
    if name == "log_decay":
        return exponent_field(grid, p_inf + a / np.log(2.0 + r), p_inf, name)
    raise DomainError(f"unknown exponent family {name!r}")


@dataclass(frozen=True)
class ConditionCertificate:
    kind: str
    constant: float
    witness_pair: tuple
    pairs_checked: int = 0

    def reevaluate(self, p):
        return _log_quotient(p, *self.witness_pair) if self.kind == "log" else _decay_quotient(p, self.witness_pair[0])


def _same_grid(f, p):
    if f.grid != p.grid:
        raise StructuralError("field and exponent live on different grids")


def modular(f, p):
    _same_grid(f, p)
    a = np.abs(f.values).ravel()
    return _kernels.modular_sum(a, p.samples.ravel(), f.grid.cell)


def _modular_scaled(a, e, cell, lam):
    return _kernels.modular_sum(a / lam, e, cell)


def luxemburg_norm(f, p, tol=1e-12, max_iter=400):
    _same_grid(f, p)
    if not tol > 0:
        raise DomainError("tol must be positive")
    a = np.abs(f.values).ravel()
    if not np.any(a):
        return 0.0
    e = p.samples.ravel()
    cell = f.grid.cell
    # initial guess: the norm of a constant-exponent problem
    lam = float(a.max()) * f.grid.measure ** (1.0 / p.p_minus)
    lo = hi = lam
    while _modular_scaled(a, e, cell, lo) <= 1.0:
        lo *= 0.5
        if lo < 1e-300:
            raise NumericalError("could not bracket the norm from below", bracket=(lo, hi))
    while _modular_scaled(a, e, cell, hi) > 1.0:
        hi *= 2.0
        if hi > 1e300:
            raise NumericalError("could not bracket the norm from above", bracket=(lo, hi))
    for _ in range(max_iter):
        mid = math.sqrt(lo * hi)
        rho = _modular_scaled(a, e, cell, mid)
        if abs(rho - 1.0) <= tol:
            return mid
        if rho > 1.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4 * np.finfo(float).eps * hi:
            # bracket collapsed: rho jumps across 1 within one ulp of lam
            rho_lo = _modular_scaled(a, e, cell, lo)
            rho_hi = _modular_scaled(a, e, cell, hi)
            best = lo if abs(rho_lo - 1) < abs(rho_hi - 1) else hi
            if min(abs(rho_lo - 1), abs(rho_hi - 1)) <= tol:
                return best
            raise NumericalError("modular cannot reach 1 within tol at double precision",
                                 bracket=(lo, hi), modular=(rho_lo, rho_hi))
    raise NumericalError("bisection did not converge", bracket=(lo, hi), iterations=max_iter)


# ---------------------------------------------------------------------------
# condition certificates
# ---------------------------------------------------------------------------

def _point(grid, idx):
    return np.array([grid.axis[i] for i in idx])


def _log_quotient(p, i, j):
    g = p.grid
    d = np.linalg.norm(_point(g, i) - _point(g, j))
    return abs(p.samples[i] - p.samples[j]) * -math.log(d)


def _decay_quotient(p, i):
    x = _point(p.grid, i)
    return abs(p.samples[i] - p.p_infinity) * math.log(2.0 + np.linalg.norm(x))


def check_log_condition(p, pair_budget=100_000, seed=0):
    """Largest ``|p(x) - p(y)| (-ln|x - y|)`` over sampled pairs with ``0 < |x - y| <= 1/2``.

    All nearest-neighbour pairs are always included (they expose jumps),
    ``pair_budget`` further pairs are drawn at random and the best pair is
    then improved by coordinate hill-climbing.
    """
    if pair_budget < 1:
        raise DomainError("pair_budget must be >= 1")
    g = p.grid
    s = p.samples
    h = g.h
    kmax = int(math.floor(0.5 / h + 1e-12))
    if kmax < 1:
        raise DomainError(f"grid spacing {h} exceeds 1/2; no admissible pairs")
    N, n = g.points, g.n
    rng = np.random.default_rng(seed)

    best = (0.0, None)
    # nearest neighbours along each axis (no wrap-around: distances are in R^n)
    lnh = -math.log(h)
    for ax in range(n):
        diff = np.abs(np.diff(s, axis=ax)) * lnh
        k = int(np.argmax(diff))
        if diff.flat[k] > best[0]:
            i = np.unravel_index(k, diff.shape)
            j = tuple(c + (1 if a == ax else 0) for a, c in enumerate(i))
            best = (float(diff.flat[k]), (tuple(map(int, i)), tuple(map(int, j))))

    i = rng.integers(0, N, size=(pair_budget, n))
    off = rng.integers(-kmax, kmax + 1, size=(pair_budget, n))
    j = i + off
    dist = h * np.sqrt((off.astype(float) ** 2).sum(axis=1))
    ok = (dist > 0) & (dist <= 0.5) & np.all((j >= 0) & (j < N), axis=1)
    i, j, dist = i[ok], j[ok], dist[ok]
    q = np.abs(s[tuple(i.T)] - s[tuple(j.T)]) * -np.log(dist)
    if q.size and q.max() > best[0]:
        k = int(np.argmax(q))
        best = (float(q[k]), (tuple(map(int, i[k])), tuple(map(int, j[k]))))

    if best[1] is not None:
        best = _hill_climb(p, best, kmax)
    if best[1] is None:
        zero = (0,) * n
        best = (0.0, (zero, zero))
    return ConditionCertificate("log", best[0], best[1], int(ok.sum()) + n * N ** n)


def _hill_climb(p, best, kmax):
    g = p.grid
    N, n = g.points, g.n
    q, (i, j) = best
    moves = [(a, d) for a in range(2 * n) for d in (-1, 1)]
    improved = True
    while improved:
        improved = False
        for a, d in moves:
            ii, jj = list(i), list(j)
            (ii if a < n else jj)[a % n] += d
            if not all(0 <= c < N for c in ii + jj):
                continue
            dist = g.h * math.sqrt(sum((x - y) ** 2 for x, y in zip(ii, jj)))
            if dist == 0 or dist > 0.5:
                continue
            cand = abs(p.samples[tuple(ii)] - p.samples[tuple(jj)]) * -math.log(dist)
            if cand > q:
                q, i, j = cand, tuple(ii), tuple(jj)
                improved = True
    return float(q), (i, j)


def check_decay_condition(p):
    """Largest ``|p(x) - p(inf)| ln(2 + |x|)`` over the grid."""
    if p.p_infinity is None:
        raise DomainError("p_infinity is not set")
    q = np.abs(p.samples - p.p_infinity) * np.log(2.0 + p.grid.radius)
    k = int(np.argmax(q))
    idx = tuple(map(int, np.unravel_index(k, q.shape)))
    return ConditionCertificate("decay", float(q.flat[k]), (idx, idx), q.size)


def log_condition_refinement(make_exponent, grids, pair_budget=100_000, seed=0):
    """Log-condition constants over a sequence of refining grids.

    Returns ``(constants, growing)`` where ``growing`` flags strictly monotone
    growth by more than 5% per refinement, the signature of a discontinuity.
    """
    consts = [check_log_condition(make_exponent(g), pair_budget, seed).constant for g in grids]
    growing = all(b > 1.05 * a for a, b in zip(consts, consts[1:]))
    return consts, growing


def conjugate_exponent(p):
    if p.p_minus <= 1.0:
        raise DomainError("p_minus = 1: conjugate exponent is unbounded")
    s = p.samples
    pc = s / (s - 1.0)
    pinf = None if p.p_infinity is None else p.p_infinity / (p.p_infinity - 1.0)
    return exponent_field(p.grid, pc, pinf, f"conjugate({p.name})")


def as_field(grid, values):
    return Field(grid, values)
