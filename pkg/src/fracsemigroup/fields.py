"""Periodic-box discretization.

A :class:`Grid` is the box ``[-L, L)^n`` with ``N`` points per axis.  Spectral
coefficients approximate the continuous transform ``F f(xi) = int f(x)
e^{-i x.xi} dx`` on the discrete frequencies ``pi k / L``:

    F f(xi_k) ~ h^n sum_j f(x_j) e^{-i x_j.xi_k},   x_j = -L + j h,

so a decaying ``f`` has coefficients that match its Fourier transform and
``from_spectral(to_spectral(f)) == f``.  Radial multipliers act by pointwise
multiplication of these coefficients.
"""
import io
import math
import struct
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels
from .errors import DomainError, StructuralError

__all__ = [
    "Grid",
    "Field",
    "SpectralField",
    "to_spectral",
    "from_spectral",
    "apply_radial_multiplier",
    "apply_multiplier_values",
    "shift_evaluate",
    "test_field",
    "periodic_poisson_kernel",
    "periodic_bessel_kernel_1d",
    "convolve",
    "write_field",
    "read_field",
    "write_field_csv",
]


@dataclass(frozen=True)
class Grid:
    n: int
    L: float
    points: int

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise StructuralError(f"dimension must be 1, 2 or 3, got {self.n}")
        if self.points < 16 or self.points & (self.points - 1):
            raise StructuralError(f"points per axis must be a power of two >= 16, got {self.points}")
        if not self.L > 0:
            raise StructuralError(f"half-width must be positive, got {self.L}")

    @property
    def h(self):
        return 2.0 * self.L / self.points

    @property
    def shape(self):
        return (self.points,) * self.n

    @property
    def cell(self):
        return self.h ** self.n

    @property
    def measure(self):
        return (2.0 * self.L) ** self.n

    @cached_property
    def axis(self):
        return -self.L + self.h * np.arange(self.points)

    @cached_property
    def freq_axis(self):
        return 2.0 * math.pi * np.fft.fftfreq(self.points, d=self.h)

    @cached_property
    def coords(self):
        return np.meshgrid(*([self.axis] * self.n), indexing="ij")

    @cached_property
    def radius(self):
        return np.sqrt(sum(c * c for c in self.coords))

    @cached_property
    def freqs(self):
        return np.meshgrid(*([self.freq_axis] * self.n), indexing="ij")

    @cached_property
    def xi_abs(self):
        return np.sqrt(sum(k * k for k in self.freqs))

    @cached_property
    def _phase(self):
        # e^{i L xi} per axis, from x_0 = -L
        ph = np.exp(1j * self.L * self.freq_axis)
        out = ph
        for _ in range(self.n - 1):
            out = np.multiply.outer(out, ph)
        return out

    @property
    def nyquist(self):
        return math.pi * self.points / (2.0 * self.L)


@dataclass
class Field:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise StructuralError(f"values shape {self.values.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise StructuralError("field contains non-finite values")

    def _check(self, other):
        if isinstance(other, Field) and other.grid != self.grid:
            raise StructuralError("fields live on different grids")

    def __add__(self, other):
        self._check(other)
        return Field(self.grid, self.values + (other.values if isinstance(other, Field) else other))

    def __sub__(self, other):
        self._check(other)
        return Field(self.grid, self.values - (other.values if isinstance(other, Field) else other))

    def __mul__(self, c):
        return Field(self.grid, self.values * c)

    __rmul__ = __mul__

    def __neg__(self):
        return Field(self.grid, -self.values)

    def integral(self):
        """Periodic trapezoid rule, i.e. ``h^n sum``."""
        return float(self.values.sum() * self.grid.cell)

    def mean(self):
        return float(self.values.mean())

    def l2_norm(self):
        return math.sqrt(float(np.sum(self.values ** 2)) * self.grid.cell)

    def sup_norm(self):
        return float(np.max(np.abs(self.values)))


@dataclass
class SpectralField:
    grid: Grid
    coefficients: np.ndarray = field(repr=False)

    def l2_norm(self):
        return math.sqrt(float(np.sum(np.abs(self.coefficients) ** 2)) / self.grid.measure)


def to_spectral(f):
    if not np.all(np.isfinite(f.values)):
        raise StructuralError("field contains non-finite values")
    g = f.grid
    return SpectralField(g, g.cell * np.fft.fftn(f.values) * g._phase)


def from_spectral(F, real=True):
    g = F.grid
    vals = np.fft.ifftn(F.coefficients / g._phase) / g.cell
    if not np.all(np.isfinite(vals)):
        raise StructuralError("non-finite values after inverse transform")
    return Field(g, vals.real if real else vals)


def _symbol_values(m, xi):
    if hasattr(m, "eval"):
        return np.asarray(m.eval(xi), dtype=float)
    return np.asarray(m(xi))


def apply_multiplier_values(f, values):
    """Multiply the coefficients of ``f`` by ``values`` (array over the frequency grid)."""
    values = np.asarray(values)
    if not np.all(np.isfinite(values)):
        raise DomainError("multiplier is unbounded on the frequency range of the grid")
    F = to_spectral(f)
    return from_spectral(SpectralField(f.grid, F.coefficients * values))


def apply_radial_multiplier(f, m):
    """``T_m f = F^{-1}[m(|xi|) F f]`` for a radial symbol ``m`` (RadialSymbol or callable)."""
    return apply_multiplier_values(f, _symbol_values(m, f.grid.xi_abs))


def shift_evaluate(f, offset, method="spectral"):
    """``(tau_h f)(x) = f(x - h)`` for ``h = offset``.

    ``method="spectral"`` multiplies by ``e^{-i h.xi}`` (exact for band-limited
    fields); ``"cubic"`` is periodic Catmull-Rom interpolation along each axis.
    """
    g = f.grid
    off = np.atleast_1d(np.asarray(offset, dtype=float))
    if off.size == 1 and g.n > 1:
        off = np.concatenate([off, np.zeros(g.n - 1)])
    if off.size != g.n:
        raise StructuralError(f"offset has {off.size} components, grid has dimension {g.n}")
    if np.linalg.norm(off) >= g.L:
        raise DomainError(f"|offset| = {np.linalg.norm(off):.4g} must be below L = {g.L}")
    if method == "spectral":
        phase = sum(o * k for o, k in zip(off, g.freqs))
        F = to_spectral(f)
        return from_spectral(SpectralField(g, F.coefficients * np.exp(-1j * phase)))
    if method == "cubic":
        vals = f.values
        for axis, o in enumerate(off):
            if o == 0.0:
                continue
            moved = np.moveaxis(vals, axis, -1)
            flat = moved.reshape(-1, g.points)
            out = np.stack([_kernels.periodic_cubic_shift(row, o / g.h) for row in flat])
            vals = np.moveaxis(out.reshape(moved.shape), -1, axis)
        return Field(g, vals)
    raise ValueError(f"unknown shift method {method!r}")


# ---------------------------------------------------------------------------
# kernels on the torus
# ---------------------------------------------------------------------------

def poisson_constant(n):
    """``c_n = Gamma((n+1)/2) / pi^{(n+1)/2}``."""
    return math.gamma((n + 1) / 2.0) / math.pi ** ((n + 1) / 2.0)


# kappa_n = int_{S^{n-1}} max_i |u_i| dsigma(u)
_CUBE_MOMENT = {1: 2.0, 2: 4.0 * math.sqrt(2.0), 3: 12.0 * math.sqrt(2.0) * math.atan(1.0 / math.sqrt(2.0))}


def periodic_poisson_kernel(grid, t, images=8):
    """The Poisson kernel ``c_n t / (|x|^2 + t^2)^{(n+1)/2}`` summed over the period lattice.

    ``n = 1`` uses the closed form ``sinh(a) / (2L (cosh(a) - cos(pi x / L)))``
    with ``a = pi t / L``.  ``n >= 2`` sums ``(2 images + 1)^n`` copies and adds
    the continuum estimate of the remaining lattice tail.
    """
    if t <= 0:
        raise DomainError(f"t must be positive, got {t}")
    L, n = grid.L, grid.n
    if n == 1:
        a = math.pi * t / L
        x = grid.axis
        return Field(grid, np.sinh(a) / (2.0 * L * (np.cosh(a) - np.cos(math.pi * x / L))))
    cn = poisson_constant(n)
    acc = np.zeros(grid.shape)
    rng = range(-images, images + 1)
    for shift in np.array(np.meshgrid(*([list(rng)] * n), indexing="ij")).reshape(n, -1).T:
        r2 = sum((c + 2.0 * L * s) ** 2 for c, s in zip(grid.coords, shift))
        acc += cn * t / (r2 + t * t) ** ((n + 1) / 2.0)
    # images beyond the cube of half-width S: int_{outside cube} c_n t |y|^{-n-1} dy
    # = c_n t kappa_n / S, spread uniformly over the period cell
    S = (2 * images + 1) * L
    acc += cn * t * _CUBE_MOMENT[n] / S / grid.measure
    return Field(grid, acc)


def periodic_bessel_kernel_1d(grid):
    """``e^{-|x|}/2`` (kernel of ``(1 + xi^2)^{-1}`` in 1-D) periodized: ``cosh(L - |x|) / (2 sinh L)``."""
    if grid.n != 1:
        raise DomainError("closed-form Bessel kernel is one-dimensional")
    x = np.abs(grid.axis)
    return Field(grid, np.cosh(grid.L - x) / (2.0 * np.sinh(grid.L)))


def convolve(f, kernel):
    """Periodic convolution ``h^n sum_y f(y) k(x - y)`` with a kernel centred at ``x = 0``."""
    if f.grid != kernel.grid:
        raise StructuralError("fields live on different grids")
    g = f.grid
    # kernel sample k(x_j) sits at index j; the origin is index N/2 along each axis
    k0 = np.roll(kernel.values, shift=[-(g.points // 2)] * g.n, axis=tuple(range(g.n)))
    vals = np.fft.ifftn(np.fft.fftn(f.values) * np.fft.fftn(k0)).real * g.cell
    return Field(g, vals)


# ---------------------------------------------------------------------------
# catalogue
# ---------------------------------------------------------------------------

def test_field(kind, grid, **params):
    """Catalogue of test fields.

    ``gaussian(sigma=1, center=0)``, ``hermite_gauss(sigma=1)`` (zero mean,
    ``(1 - |x|^2/sigma^2 ...)e^{-|x|^2/2sigma^2}`` in 1-D), ``poisson_kernel(t)``
    (periodized), ``band_limited(cutoff, seed, zero_dc=True, amplitude=1)``,
    ``white_noise(seed)`` (flat spectrum up to Nyquist, zero DC),
    ``bump(radius=1)``, ``sine(k=1)``.
    """
    x = grid.coords
    r = grid.radius
    if kind == "gaussian":
        sigma = float(params.get("sigma", 1.0))
        center = np.broadcast_to(np.asarray(params.get("center", 0.0), dtype=float), (grid.n,))
        if sigma < 2 * grid.h or 8 * sigma > grid.L:
            raise DomainError(f"sigma={sigma} incompatible with grid (h={grid.h:.3g}, L={grid.L})")
        r2 = sum((c - c0) ** 2 for c, c0 in zip(x, center))
        return Field(grid, np.exp(-r2 / (2.0 * sigma ** 2)))
    if kind == "hermite_gauss":
        sigma = float(params.get("sigma", 1.0))
        if sigma < 2 * grid.h or 8 * sigma > grid.L:
            raise DomainError(f"sigma={sigma} incompatible with grid")
        s2 = r * r / sigma ** 2
        # minus the Laplacian of the Gaussian (scaled): zero mean in every dimension
        return Field(grid, (grid.n - s2) * np.exp(-s2 / 2.0))
    if kind == "poisson_kernel":
        t = float(params.get("t", 1.0))
        if t < grid.h:
            raise DomainError(f"t={t} below grid spacing {grid.h:.3g}")
        return periodic_poisson_kernel(grid, t)
    if kind in ("band_limited", "white_noise"):
        seed = int(params.get("seed", 0))
        cutoff = float(params.get("cutoff", grid.nyquist if kind == "white_noise" else 4.0))
        if cutoff > grid.nyquist:
            raise DomainError(f"cutoff {cutoff} above Nyquist {grid.nyquist:.4g}")
        rng = np.random.default_rng(seed)
        coef = np.fft.fftn(rng.standard_normal(grid.shape))
        keep = grid.xi_abs <= cutoff
        if kind == "band_limited":
            # drop the Nyquist planes too, so real-valuedness survives any multiplier
            nyq = np.zeros(grid.shape, dtype=bool)
            for k in grid.freqs:
                nyq |= np.isclose(np.abs(k), grid.nyquist)
            keep &= ~nyq
        coef[~keep] = 0.0
        if params.get("zero_dc", True):
            coef.flat[0] = 0.0
        vals = np.fft.ifftn(coef).real
        amp = float(params.get("amplitude", 1.0))
        vals *= amp / max(np.max(np.abs(vals)), 1e-300)
        return Field(grid, vals)
    if kind == "bump":
        rad = float(params.get("radius", 1.0))
        if rad >= grid.L or rad < 4 * grid.h:
            raise DomainError(f"bump radius {rad} incompatible with grid")
        u = 1.0 - (r / rad) ** 2
        vals = np.zeros(grid.shape)
        inside = u > 0
        vals[inside] = np.exp(-1.0 / u[inside])
        return Field(grid, vals)
    if kind == "sine":
        k = float(params.get("k", 1.0))
        if abs(k * grid.L / math.pi - round(k * grid.L / math.pi)) > 1e-12:
            raise DomainError(f"sin({k} x) is not periodic on [-L, L) with L={grid.L}")
        return Field(grid, np.sin(k * x[0]))
    raise DomainError(f"unknown test field kind {kind!r}")


# ---------------------------------------------------------------------------
# import / export
# ---------------------------------------------------------------------------
#
# Binary layout (little endian): int64 n, int64 points, float64 L, then
# points**n float64 values in row-major (C) order.

def write_field(f, path):
    g = f.grid
    with open(path, "wb") as fh:
        fh.write(struct.pack("<qqd", g.n, g.points, g.L))
        fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def read_field(path):
    with open(path, "rb") as fh:
        head = fh.read(24)
        if len(head) != 24:
            raise StructuralError("truncated field header")
        n, points, L = struct.unpack("<qqd", head)
        grid = Grid(int(n), float(L), int(points))
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != points ** n:
        raise StructuralError(f"expected {points ** n} values, found {data.size}")
    return Field(grid, data.reshape(grid.shape).astype(float))


def write_field_csv(f, path):
    if f.grid.n != 1:
        raise StructuralError("CSV export is for 1-D fields")
    buf = io.StringIO()
    buf.write("x,value\n")
    for xv, v in zip(f.grid.axis, f.values):
        buf.write(f"{xv!r},{v!r}\n")
    with open(path, "w") as fh:
        fh.write(buf.getvalue())


def zero_dc(F, what="multiplier"):
    """Zero the ``xi = 0`` coefficient, warning when it was not already negligible."""
    c0 = F.coefficients.flat[0]
    scale = np.max(np.abs(F.coefficients))
    if abs(c0) > 1e-12 * max(scale, 1e-300):
        warnings.warn(f"{what} is singular at xi = 0; mean of the field ({c0 / F.grid.measure:.3e}) removed",
                      RuntimeWarning, stacklevel=3)
    F.coefficients.flat[0] = 0.0
    return F
