import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fracsemigroup import fields as F
from fracsemigroup.errors import DomainError, StructuralError


def test_grid_validation():
    with pytest.raises(StructuralError):
        F.Grid(4, 10.0, 64)
    with pytest.raises(StructuralError):
        F.Grid(1, 10.0, 100)
    with pytest.raises(StructuralError):
        F.Grid(1, -1.0, 64)


def test_field_rejects_nonfinite_and_wrong_shape():
    g = F.Grid(1, 10.0, 64)
    with pytest.raises(StructuralError):
        F.Field(g, np.full(64, np.nan))
    with pytest.raises(StructuralError):
        F.Field(g, np.zeros(32))
    with pytest.raises(StructuralError):
        F.Field(g, np.zeros(64)) + F.Field(F.Grid(1, 5.0, 64), np.zeros(64))


@pytest.mark.parametrize("n, points", [(1, 512), (2, 64), (3, 64)])
def test_gaussian_transform_is_continuous_transform(n, points):
    g = F.Grid(n, 12.0, points)
    f = F.test_field("gaussian", g, sigma=1.0)
    coef = F.to_spectral(f).coefficients
    ref = (2 * math.pi) ** (n / 2) * np.exp(-g.xi_abs ** 2 / 2)
    assert np.max(np.abs(coef - ref)) < 1e-10


@given(st.integers(0, 2 ** 31 - 1))
def test_transform_round_trip(seed):
    g = F.Grid(2, 5.0, 32)
    f = F.Field(g, np.random.default_rng(seed).standard_normal(g.shape))
    back = F.from_spectral(F.to_spectral(f))
    assert np.allclose(back.values, f.values, atol=1e-12)


@given(st.integers(0, 1000), st.floats(1.0, 6.0))
def test_parseval(seed, cutoff):
    g = F.Grid(1, 8.0, 256)
    f = F.test_field("band_limited", g, cutoff=cutoff, seed=seed)
    assert F.to_spectral(f).l2_norm() == pytest.approx(f.l2_norm(), rel=1e-12)


def test_integral_and_norms_of_gaussian():
    g = F.Grid(1, 20.0, 1024)
    f = F.test_field("gaussian", g, sigma=1.0)
    assert f.integral() == pytest.approx(math.sqrt(2 * math.pi), rel=1e-12)
    assert f.l2_norm() == pytest.approx(math.pi ** 0.25, rel=1e-12)
    assert f.sup_norm() == pytest.approx(1.0)


@pytest.mark.parametrize("method, tol", [("spectral", 1e-12), ("cubic", 1e-4)])
def test_shift_evaluate(method, tol):
    g = F.Grid(1, 20.0, 1024)
    f = F.test_field("gaussian", g, sigma=1.0)
    moved = F.shift_evaluate(f, 0.731, method=method)
    assert np.max(np.abs(moved.values - np.exp(-(g.axis - 0.731) ** 2 / 2))) < tol


def test_shift_evaluate_rejects_large_offset():
    g = F.Grid(1, 5.0, 64)
    with pytest.raises(DomainError):
        F.shift_evaluate(F.Field(g, np.zeros(64)), 5.0)


def test_shift_two_dimensions_both_axes():
    g = F.Grid(2, 10.0, 64)
    f = F.test_field("gaussian", g, sigma=1.0)
    x, y = g.coords
    ref = np.exp(-((x - 0.5) ** 2 + (y + 0.25) ** 2) / 2)
    assert np.max(np.abs(F.shift_evaluate(f, [0.5, -0.25]).values - ref)) < 1e-10
    assert np.max(np.abs(F.shift_evaluate(f, [0.5, -0.25], method="cubic").values - ref)) < 5e-3


@pytest.mark.parametrize("n, points", [(1, 1024), (2, 128), (3, 32)])
def test_periodic_poisson_kernel_has_unit_mass(n, points):
    g = F.Grid(n, 6.0, points)
    k = F.periodic_poisson_kernel(g, 1.0)
    assert k.integral() == pytest.approx(1.0, abs=1e-6)


def test_periodic_poisson_kernel_matches_multiplier():
    g = F.Grid(1, 10.0, 512)
    k = F.periodic_poisson_kernel(g, 0.8)
    coef = F.to_spectral(k).coefficients
    assert np.max(np.abs(coef - np.exp(-0.8 * g.xi_abs))) < 1e-12


def test_periodic_bessel_kernel():
    g = F.Grid(1, 10.0, 4096)
    coef = F.to_spectral(F.periodic_bessel_kernel_1d(g)).coefficients
    assert np.max(np.abs(coef - 1 / (1 + g.xi_abs ** 2))) < 1e-5


def test_catalogue_domain_errors():
    g = F.Grid(1, 5.0, 64)
    with pytest.raises(DomainError):
        F.test_field("gaussian", g, sigma=1.0)  # 8 sigma > L
    with pytest.raises(DomainError):
        F.test_field("band_limited", g, cutoff=1e3)
    with pytest.raises(DomainError):
        F.test_field("sine", g, k=1.0)
    with pytest.raises(DomainError):
        F.test_field("nope", g)


def test_band_limited_spectrum_and_zero_mean():
    g = F.Grid(2, 8.0, 64)
    f = F.test_field("band_limited", g, cutoff=2.5, seed=4)
    coef = F.to_spectral(f).coefficients
    assert np.max(np.abs(coef[g.xi_abs > 2.5])) < 1e-12
    assert abs(f.mean()) < 1e-14


def test_hermite_gauss_zero_mean():
    for g in (F.Grid(1, 20.0, 512), F.Grid(2, 12.0, 128)):
        assert abs(F.test_field("hermite_gauss", g, sigma=1.0).integral()) < 1e-10


def test_binary_round_trip(tmp_path):
    g = F.Grid(2, 3.5, 16)
    f = F.Field(g, np.random.default_rng(0).standard_normal(g.shape))
    F.write_field(f, tmp_path / "f.bin")
    back = F.read_field(tmp_path / "f.bin")
    assert back.grid == g and np.array_equal(back.values, f.values)


def test_binary_truncated_file(tmp_path):
    p = tmp_path / "bad.bin"
    p.write_bytes(b"\x01\x00")
    with pytest.raises(StructuralError):
        F.read_field(p)


def test_csv_export(tmp_path):
    g = F.Grid(1, 2.0, 16)
    F.write_field_csv(F.Field(g, np.arange(16.0)), tmp_path / "f.csv")
    lines = (tmp_path / "f.csv").read_text().splitlines()
    assert lines[0] == "x,value" and len(lines) == 17
    with pytest.raises(StructuralError):
        F.write_field_csv(F.Field(F.Grid(2, 2.0, 16), np.zeros((16, 16))), tmp_path / "g.csv")


def test_zero_dc_warns_only_when_relevant():
    g = F.Grid(1, 5.0, 64)
    with pytest.warns(RuntimeWarning):
        F.zero_dc(F.to_spectral(F.Field(g, np.ones(64))))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        F.zero_dc(F.to_spectral(F.test_field("band_limited", g, cutoff=2.0)))


def test_unbounded_multiplier_rejected():
    g = F.Grid(1, 5.0, 64)
    with pytest.raises(DomainError):
        F.apply_multiplier_values(F.Field(g, np.ones(64)), np.full(g.shape, np.inf))
