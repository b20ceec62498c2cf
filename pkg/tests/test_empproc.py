import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from seqemp.empproc import (
    Constant,
    Identity,
    Indicator,
    Interval,
    ProcessPath,
    ThresholdFamily,
    d_metric,
    eval_process,
    floor_ns,
    jump_grid,
    rho_norm,
)
from seqemp.laws import Law
from seqemp.seriesgen import RegressionSample

finite = st.floats(-1e3, 1e3, allow_nan=False)


def test_floor_ns_is_robust_on_fraction_grids():
    n = 49
    s = np.arange(n + 1) / n
    assert np.array_equal(floor_ns(n, s), np.arange(n + 1))
    assert floor_ns(10, 0.35).item() == 3


def test_jump_grid_sentinels():
    g = jump_grid([3.0, 1.0, 2.0, 2.0])
    assert g.tolist() == [-1.0, 1.0, 2.0, 3.0, 5.0]


# ---------------------------------------------------------------- eval_process


def test_hand_example_exact_centering():
    fam = ThresholdFamily("indicator", np.array([2.0]), centering=np.array([2.0 / 3.0]))
    path = eval_process(np.array([1.0, 2.0, 3.0]), fam, [0.0, 1 / 3, 1.0])
    assert path.values[-1, 0] == pytest.approx(0.0, abs=1e-15)
    assert path.values[0, 0] == 0.0
    assert path.values[1, 0] == pytest.approx((1 - 2 / 3) / math.sqrt(3))
    assert path.centering == "exact"


def test_centered_constant_is_zero():
    x = np.random.default_rng(0).random(30)
    fam = ThresholdFamily("response-indicator", np.array([2.0]), centering=np.array([4.0]))
    # y == 4 everywhere and z saturates every regressor: phi == 4 == E[phi]
    path = eval_process((np.full(30, 4.0), x), fam, np.linspace(0, 1, 11))
    assert np.all(path.values == 0.0)


@given(arrays(float, st.integers(2, 40), elements=finite))
@settings(max_examples=50, deadline=None)
def test_s_zero_row_and_telescoping(y):
    fam = ThresholdFamily("indicator", jump_grid(y))
    n = y.size
    s = np.arange(n + 1) / n
    path = eval_process(y, fam, s)
    assert np.all(path.values[0] == 0.0)
    increments = np.diff(path.values, axis=0).sum(axis=0)
    assert np.allclose(increments, path.values[-1], atol=1e-12)


@given(arrays(float, st.integers(2, 40), elements=finite))
@settings(max_examples=50, deadline=None)
def test_empirical_centering_saturates(y):
    g = jump_grid(y)
    path = eval_process(y, ThresholdFamily("indicator", g), [1.0])
    # below the minimum and at/above the maximum the column is constant
    assert abs(path.values[0, 0]) < 1e-12
    assert abs(path.values[0, -1]) < 1e-12
    assert abs(path.values[0, -2]) < 1e-12


def test_scale_equivariance():
    rng = np.random.default_rng(3)
    y, x = rng.standard_normal(25), rng.random(25)
    z = np.linspace(0.1, 0.9, 5)
    c = -2.5
    center = rng.standard_normal(5)
    p1 = eval_process((y, x), ThresholdFamily("response-indicator", z, centering=center), [0.2, 0.6, 1.0])
    p2 = eval_process((c * y, x), ThresholdFamily("response-indicator", z, centering=c * center), [0.2, 0.6, 1.0])
    assert np.allclose(p2.values, c * p1.values, rtol=0, atol=1e-13)


def test_residual_indicator_family():
    e = np.array([1.0, -1.0, 2.0])
    y = np.array([0.0, 1.0, 2.0])
    fam = ThresholdFamily("residual-indicator", np.array([0.5]))
    m = fam.evaluate((e, y))
    # F(0.5) = 1/3 empirically
    assert np.allclose(m[:, 0], e * (np.array([1, 0, 0]) - 1 / 3))
    fam2 = ThresholdFamily("residual-indicator", np.array([0.5]), cdf=np.array([0.5]))
    assert np.allclose(fam2.evaluate((e, y))[:, 0], e * (np.array([1, 0, 0]) - 0.5))


def test_response_indicator_componentwise():
    s = RegressionSample([1.0, 2.0, 3.0], [[0.1, 0.9], [0.5, 0.5], [0.9, 0.1]])
    z = np.array([[0.5, 0.5], [0.9, 0.9]])
    m = ThresholdFamily("response-indicator", z).evaluate(s)
    assert m[:, 0].tolist() == [0.0, 2.0, 0.0]
    assert m[:, 1].tolist() == [1.0, 2.0, 3.0]


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(kind="indicator", z_grid=np.array([1.0, 1.0])),
        dict(kind="indicator", z_grid=np.array([])),
        dict(kind="indicator", z_grid=np.array([0.0, 1.0]), centering=np.array([0.5])),
        dict(kind="indicator", z_grid=np.array([0.0]), centering="population"),
        dict(kind="indicator", z_grid=np.array([[0.0, 1.0]])),
        dict(kind="response-indicator", z_grid=np.array([[1.0, 0.0], [0.0, 1.0]])),
        dict(kind="kernel", z_grid=np.array([0.0])),
    ],
)
def test_family_rejects(kwargs):
    with pytest.raises(ValueError):
        ThresholdFamily(**kwargs)


def test_eval_process_rejects_bad_s():
    fam = ThresholdFamily("indicator", np.array([0.0]))
    with pytest.raises(ValueError):
        eval_process(np.array([1.0, 2.0]), fam, [])
    with pytest.raises(ValueError):
        eval_process(np.array([1.0, 2.0]), fam, [1.5])


def test_process_path_csv(tmp_path):
    p = ProcessPath([0.0, 1.0], np.array([[0.0, 1.0], [1.0, 0.0]]), [[0.0, 0.0], [0.5, -0.5]], 2)
    p.to_csv(tmp_path / "p.csv")
    lines = (tmp_path / "p.csv").read_text().splitlines()
    assert lines[0] == "s,z1,z2,value"
    assert lines[-1] == "1.0,1.0,0.0,-0.5"
    assert p.sup_abs() == (0.5, 1.0, [0.0, 1.0])


# ---------------------------------------------------------------- rho and d


def test_rho_examples():
    u, g = Law.uniform(0, 1), Law.gaussian()
    assert rho_norm(Constant(0.0), u) == 0.0
    assert rho_norm(Indicator(0.25), u) == pytest.approx(0.5, abs=1e-15)
    assert rho_norm(Identity(), g) == pytest.approx(1.0, abs=1e-12)
    # plug-in under a sample
    assert rho_norm(Identity(), np.array([1.0, -1.0, 1.0, -1.0])) == 1.0


def test_rho_plug_in_divergence():
    with pytest.raises(ValueError):
        rho_norm(Identity(), np.array([1e200, 1.0]))


def test_d_metric_hand_value():
    u = Law.uniform(0, 1)
    d = d_metric(Indicator(0.2), Indicator(0.5), u, 4, 2.0)
    assert d == pytest.approx(0.3 ** (1 / 8), rel=1e-14)
    assert d == pytest.approx(0.8603, abs=1e-4)
    assert d_metric(Indicator(0.5), Indicator(0.2), u, 4, 2.0) == d
    assert d_metric(Indicator(0.5), Indicator(0.5), u, 4, 2.0) == 0.0


def test_d_metric_plug_in_matches_analytic():
    y = np.random.default_rng(1).random(200_000)
    a = d_metric(Indicator(0.2), Indicator(0.5), Law.uniform(0, 1), 2, 2.0)
    b = d_metric(Indicator(0.2), Indicator(0.5), y, 2, 2.0)
    assert abs(a - b) < 0.005


@given(st.lists(st.floats(-3, 3), min_size=3, max_size=3), st.sampled_from([2, 4, 6]), st.floats(0.1, 4))
@settings(max_examples=60, deadline=None)
def test_d_metric_nested_monotone(zs, Q, gamma):
    z1, z2, z3 = sorted(zs)
    g = Law.gaussian()
    assert d_metric(Indicator(z1), Indicator(z2), g, Q, gamma) <= d_metric(Indicator(z1), Indicator(z3), g, Q, gamma)


@pytest.mark.parametrize("Q, gamma", [(3, 1.0), (0, 1.0), (4, 0.0), (True, 1.0)])
def test_d_metric_rejects(Q, gamma):
    with pytest.raises(ValueError):
        d_metric(Indicator(0.0), Indicator(1.0), Law.uniform(), Q, gamma)


def test_interval_moment_is_probability():
    g = Law.gaussian()
    assert Interval(-1.0, 1.0).abs_moment(g, 7.0) == pytest.approx(0.6826894921370859, rel=1e-12)
    assert Interval(1.0, -1.0).abs_moment(g, 2.0) == 0.0
