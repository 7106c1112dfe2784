import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fracsemigroup import fields as F
from fracsemigroup import operators as op
from fracsemigroup.errors import DomainError, NumericalError

G1 = F.Grid(1, 20.0, 2048)
GAUSS = F.test_field("gaussian", G1, sigma=1.0)


def test_operator_spec_validation():
    with pytest.raises(DomainError):
        op.OperatorSpec(2.0, 2, 0.1)
    with pytest.raises(DomainError):
        op.OperatorSpec(0.5, 3, 0.1)
    with pytest.raises(DomainError):
        op.OperatorSpec(0.5, 2, 0.0)


@given(st.floats(0.05, 3.0), st.floats(0.05, 3.0))
def test_poisson_semigroup_property(t, s):
    f = F.test_field("band_limited", G1, cutoff=4.0, seed=1, zero_dc=False)
    lhs = op.poisson_apply(op.poisson_apply(f, t), s)
    assert np.max(np.abs((lhs - op.poisson_apply(f, t + s)).values)) < 1e-12


def test_poisson_kernel_path_two_dimensions():
    g = F.Grid(2, 10.0, 128)
    f = F.test_field("gaussian", g, sigma=1.0)
    a = op.poisson_apply(f, 0.7, path="kernel")
    b = op.poisson_apply(f, 0.7)
    assert (a - b).sup_norm() < 1e-6


def test_poisson_preserves_mass_and_positivity():
    out = op.poisson_apply(GAUSS, 1.3)
    assert out.integral() == pytest.approx(GAUSS.integral(), rel=1e-12)
    assert out.values.min() > 0


def test_finite_difference_of_sine():
    g = F.Grid(1, math.pi, 256)
    f = F.test_field("sine", g, k=1.0)
    h = 0.3
    d = op.finite_difference(f, h, 2)
    ref = np.sin(g.axis) - 2 * np.sin(g.axis - h) + np.sin(g.axis - 2 * h)
    assert np.allclose(d.values, ref, atol=1e-12)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 1.0, 1.7])
def test_series_path_matches_spectral(alpha):
    f = GAUSS - GAUSS.mean()
    a, info = op.frac_poisson_difference(f, 0.2, alpha, path="series", return_info=True)
    b = op.frac_poisson_difference(f, 0.2, alpha)
    assert (a - b).l2_norm() < 1e-9
    assert info.tail_bound <= 1e-10


def test_series_annihilates_constants():
    c = F.Field(G1, np.full(G1.shape, 4.0))
    assert op.frac_poisson_difference(c, 0.5, 0.5, path="series").sup_norm() < 1e-13
    assert op.frac_poisson_difference(c, 0.5, 0.5).sup_norm() < 1e-13


def test_series_term_cap_reports_bound():
    with pytest.raises(NumericalError) as exc:
        op.frac_poisson_difference(GAUSS, 0.01, 0.5, path="series", kmax=100)
    assert "achieved_tail_bound" in exc.value.diagnostics


def test_integer_alpha_is_finite_difference_in_t():
    f = GAUSS
    a = op.frac_poisson_difference(f, 0.4, 2.0)
    b = f - op.poisson_apply(f, 0.4) * 2.0 + op.poisson_apply(f, 0.8)
    assert (a - b).sup_norm() < 1e-12


@given(st.floats(0.1, 0.9), st.floats(0.1, 0.9))
def test_fractional_powers_compose(a, b):
    # (I - P_t)^a (I - P_t)^b = (I - P_t)^{a+b}
    f = F.test_field("band_limited", G1, cutoff=3.0, seed=2)
    lhs = op.frac_poisson_difference(op.frac_poisson_difference(f, 0.3, a), 0.3, b)
    assert (lhs - op.frac_poisson_difference(f, 0.3, a + b)).sup_norm() < 1e-12


def test_riesz_constant_values():
    # gamma_1(1/2) = 2^{1/2} sqrt(pi) Gamma(1/4) / Gamma(1/4)
    assert op.riesz_constant(1, 0.5) == pytest.approx(math.sqrt(2 * math.pi))
    with pytest.raises(DomainError):
        op.riesz_constant(1, 1.0)


def test_riesz_kernel_path_matches_spectral():
    g = F.Grid(1, 80.0, 2 ** 14)
    f = F.test_field("hermite_gauss", g, sigma=1.0)
    a = op.riesz_potential(f, 0.5, path="kernel")
    b = op.riesz_potential(f, 0.5)
    near = np.abs(g.axis) < 10
    assert np.max(np.abs(a.values[near] - b.values[near])) < 1e-4


def test_riesz_potential_warns_on_nonzero_mean():
    with pytest.warns(RuntimeWarning):
        op.riesz_potential(GAUSS, 0.5)


@given(st.floats(0.1, 0.9))
def test_riesz_inversion_property(alpha):
    phi = F.test_field("band_limited", G1, cutoff=5.0, seed=9)
    back = op.riesz_multiplier(op.riesz_potential(phi, alpha), alpha)
    assert (back - phi).l2_norm() < 1e-10 * phi.l2_norm()


def test_bessel_kernel_path():
    g = F.Grid(1, 20.0, 2 ** 14)
    f = F.test_field("gaussian", g)
    a = op.bessel_potential(f, 2.0, path="kernel")
    b = op.bessel_potential(f, 2.0)
    assert (a - b).sup_norm() < 1e-6
    with pytest.raises(DomainError):
        op.bessel_potential(GAUSS, 1.0, path="kernel")


def test_hypersingular_symbol_small_eps_tends_to_power():
    xi = G1.xi_abs
    sym = op.hypersingular_symbol(G1, 0.5, 2, 1e-3)
    low = xi < 5
    assert np.allclose(sym[low], xi[low] ** 0.5, rtol=5e-3)


@pytest.mark.parametrize("shift_method, tol", [("spectral", 1e-10), ("cubic", 1e-6)])
def test_hypersingular_quadrature_one_dimension(shift_method, tol):
    spec = op.OperatorSpec(0.5, 2, 0.1)
    a, info = op.hypersingular_truncated(GAUSS, spec, path="quadrature", shift_method=shift_method,
                                         return_info=True)
    b = op.hypersingular_truncated(GAUSS, spec)
    assert (a - b).l2_norm() / b.l2_norm() < tol
    assert info.nodes > 0 and info.y_max == pytest.approx(20.0 / 3)


def test_hypersingular_quadrature_two_dimensions():
    g = F.Grid(2, 10.0, 128)
    f = F.test_field("gaussian", g, sigma=1.0)
    spec = op.OperatorSpec(0.5, 2, 0.3)
    a, info = op.hypersingular_truncated(f, spec, path="quadrature", return_info=True)
    b = op.hypersingular_truncated(f, spec)
    assert (a - b).l2_norm() / b.l2_norm() < 0.03
    assert info.tail_budget >= 0


def test_hypersingular_rejects_eps_below_grid():
    with pytest.raises(DomainError):
        op.hypersingular_truncated(GAUSS, op.OperatorSpec(0.5, 2, G1.h / 2))


def test_riesz_derivative_converges_to_multiplier():
    f = F.test_field("band_limited", G1, cutoff=3.0, seed=3)
    out, rep = op.riesz_derivative(f, 0.5, 2, [0.4, 0.2, 0.1, 0.05], tol=1e-2)
    assert rep.checks["non_increasing_differences"]
    ref = op.riesz_multiplier(f, 0.5)
    errs = [(op.hypersingular_truncated(f, op.OperatorSpec(0.5, 2, e)) - ref).l2_norm() for e in (0.4, 0.05)]
    assert errs[1] < errs[0]
    with pytest.raises(DomainError):
        op.riesz_derivative(f, 0.5, 2, [0.1, 0.2])


def test_normalized_difference_scaling():
    a = op.normalized_difference(GAUSS, 0.1, 0.5)
    b = op.frac_poisson_difference(GAUSS, 0.1, 0.5) * 0.1 ** -0.5
    assert (a - b).sup_norm() < 1e-13
