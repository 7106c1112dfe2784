import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fracsemigroup import varlp
from fracsemigroup.errors import DomainError, InvariantViolation, StructuralError
from fracsemigroup.fields import Field, Grid, test_field as make_field

G = Grid(1, 20.0, 1024)
P_VAR = varlp.exponent_family("rational_decay", G, p_inf=2.0, a=1.0)


def test_gaussian_modular_and_norm_closed_forms():
    f = make_field("gaussian", G, sigma=1.0)
    p2 = varlp.exponent_family("constant", G, p=2.0)
    assert varlp.modular(f, p2) == pytest.approx(math.sqrt(math.pi), rel=1e-13)
    assert varlp.luxemburg_norm(f, p2) == pytest.approx(math.pi ** 0.25, rel=1e-11)


def test_norm_of_indicator_like_constant():
    # constant c on the box: ||c||_p = c (2L)^{1/p}
    f = Field(G, np.full(G.shape, 3.0))
    p = varlp.exponent_family("constant", G, p=1.5)
    assert varlp.luxemburg_norm(f, p) == pytest.approx(3.0 * 40.0 ** (1 / 1.5), rel=1e-11)


@given(st.integers(0, 10_000), st.floats(0.05, 20.0))
def test_unit_ball_and_homogeneity(seed, c):
    f = make_field("band_limited", G, cutoff=3.0, seed=seed)
    n = varlp.luxemburg_norm(f, P_VAR)
    assert varlp.modular(f * (1.0 / n), P_VAR) == pytest.approx(1.0, abs=1e-11)
    assert varlp.luxemburg_norm(f * c, P_VAR) == pytest.approx(c * n, rel=1e-10)


@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_triangle_inequality(s1, s2):
    f = make_field("band_limited", G, cutoff=2.0, seed=s1)
    g = make_field("band_limited", G, cutoff=5.0, seed=s2, amplitude=3.0)
    lhs = varlp.luxemburg_norm(f + g, P_VAR)
    assert lhs <= varlp.luxemburg_norm(f, P_VAR) + varlp.luxemburg_norm(g, P_VAR) + 1e-10


def test_norm_monotone_under_pointwise_order():
    f = make_field("gaussian", G, sigma=1.0)
    assert varlp.luxemburg_norm(f * 0.5, P_VAR) < varlp.luxemburg_norm(f, P_VAR)


def test_zero_field_norm():
    assert varlp.luxemburg_norm(Field(G, np.zeros(G.shape)), P_VAR) == 0.0


def test_exponent_validation():
    with pytest.raises(DomainError):
        varlp.exponent_family("constant", G, p=0.5)
    with pytest.raises(InvariantViolation):
        varlp.ExponentField(G, np.full(G.shape, 2.0), 1.5, 2.0)
    with pytest.raises(StructuralError):
        varlp.exponent_field(G, np.ones(10) * 2)
    with pytest.raises(DomainError):
        varlp.exponent_family("bogus", G)


def test_grid_mismatch():
    other = Grid(1, 20.0, 512)
    with pytest.raises(StructuralError):
        varlp.luxemburg_norm(make_field("gaussian", other), P_VAR)


def test_log_condition_constant_exponent_is_zero():
    c = varlp.check_log_condition(varlp.exponent_family("constant", G, p=2.0), 1000)
    assert c.constant == 0.0


def test_log_condition_certificate_reevaluates():
    cert = varlp.check_log_condition(P_VAR, 20_000)
    assert cert.reevaluate(P_VAR) == pytest.approx(cert.constant)
    # smooth exponent: constant bounded by Lip(p) * max_{d<=1/2} d ln(1/d)
    assert 0 < cert.constant <= (3 * math.sqrt(3) / 8) * 0.5 * math.log(2) * 1.01 + 0.2


def test_log_condition_detects_jump():
    make = lambda g: varlp.exponent_field(g, np.where(g.coords[0] < 0.013, 2.0, 3.0), 2.5)
    consts, growing = varlp.log_condition_refinement(make, [Grid(1, 20.0, N) for N in (512, 1024, 2048, 4096)],
                                                     pair_budget=5000)
    assert growing
    smooth, grow2 = varlp.log_condition_refinement(
        lambda g: varlp.exponent_family("rational_decay", g, p_inf=2.0, a=1.0),
        [Grid(1, 20.0, N) for N in (512, 1024, 2048)], pair_budget=5000)
    assert not grow2


def test_decay_condition():
    c = varlp.check_decay_condition(P_VAR)
    x = G.axis
    ref = np.max(np.abs(1 / (1 + x ** 2)) * np.log(2 + np.abs(x)))
    assert c.constant == pytest.approx(ref)
    log_dec = varlp.exponent_family("log_decay", G, p_inf=2.0, a=1.0)
    assert varlp.check_decay_condition(log_dec).constant == pytest.approx(1.0)
    with pytest.raises(DomainError):
        varlp.check_decay_condition(varlp.exponent_field(G, 2.0))


def test_conjugate_exponent():
    q = varlp.conjugate_exponent(P_VAR)
    assert np.allclose(1 / P_VAR.samples + 1 / q.samples, 1.0)
    assert q.p_infinity == pytest.approx(2.0)
    with pytest.raises(DomainError):
        varlp.conjugate_exponent(varlp.exponent_family("constant", G, p=1.0))


@given(st.integers(0, 1000))
def test_hoelder_inequality(seed):
    # int |f g| <= 2 ||f||_p ||g||_p'
    f = make_field("band_limited", G, cutoff=3.0, seed=seed)
    g = make_field("band_limited", G, cutoff=3.0, seed=seed + 1)
    q = varlp.conjugate_exponent(P_VAR)
    lhs = float(np.sum(np.abs(f.values * g.values))) * G.cell
    assert lhs <= 2 * varlp.luxemburg_norm(f, P_VAR) * varlp.luxemburg_norm(g, q)
