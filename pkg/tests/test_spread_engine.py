import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from statarb.errors import (
    DegenerateSpread,
    NotWarm,
    SingularDesign,
    WindowTooShort,
)
from statarb.spread_engine import (
    SpreadEngine,
    SpreadModel,
    Thresholds,
    Zone,
    classify_zone,
    fit_spread,
    rolling_spread,
    zones_for,
    zscore,
)
from conftest import sinusoid_z_formula


# --- fit_spread -----------------------------------------------------------------


def test_fit_exact_relation():
    p_j = np.linspace(50, 60, 40)
    model = fit_spread(2.0 * p_j, p_j)
    assert model.beta1 == pytest.approx(2.0, abs=1e-12)
    assert model.beta0 == pytest.approx(0.0, abs=1e-9)
    assert model.spread_std == pytest.approx(0.0, abs=1e-12)


def test_fit_singular_checked_before_window_length():
    # a too-short window with a constant hedge leg reports the singularity
    with pytest.raises(SingularDesign):
        fit_spread(np.arange(10.0), np.full(10, 7.0))
    with pytest.raises(WindowTooShort):
        fit_spread(np.arange(10.0), np.arange(10.0) * 2 + 1)


def test_fit_matches_normal_equation_oracle():
    rng = np.random.default_rng(77)
    p_j = 100 + np.cumsum(rng.normal(0, 0.2, 64))
    p_i = 3.0 + 1.7 * p_j + rng.normal(0, 0.1, 64)
    model = fit_spread(p_i, p_j)
    slope, intercept = np.polyfit(p_j, p_i, 1)
    assert model.beta1 == pytest.approx(slope, abs=1e-9)
    assert model.beta0 == pytest.approx(intercept, abs=1e-7)
    resid = p_i - intercept - slope * p_j
    assert model.latest_spread == pytest.approx(resid[-1], abs=1e-9)
    assert model.spread_std == pytest.approx(np.std(resid), abs=1e-9)


# --- zscore ------------------------------------------------------------------------


def _model(mean, std):
    return SpreadModel(0.0, 1.0, 30, mean, std, mean)


def test_zscore_values():
    assert zscore(_model(0.5, 0.25), 0.5) == 0.0
    assert zscore(_model(0.5, 0.25), 0.75) == pytest.approx(1.0)
    assert zscore(_model(0.5, 0.25), 1.25) == pytest.approx(3.0)


def test_zscore_degenerate():
    with pytest.raises(DegenerateSpread):
        zscore(_model(0.0, 0.0), 1.0)


def test_zscore_affine_equivariant():
    # shifting every residual by a constant moves the mean, not the z
    for shift in (-3.0, 0.7, 12.5):
        base = zscore(_model(0.5, 0.25), 1.25)
        shifted = zscore(_model(0.5 + shift, 0.25), 1.25 + shift)
        assert shifted == pytest.approx(base, abs=1e-12)


# --- zones ----------------------------------------------------------------------


BEST = Thresholds(1.8, 0.4)


def test_zone_reference_case():
    assert classify_zone(2.0, BEST) == Zone.SHORT


@pytest.mark.parametrize(
    "z,expected",
    [
        (0.0, Zone.CLOSE),
        (-1.0, Zone.NEUTRAL_LONG),
        (1.0, Zone.NEUTRAL_SHORT),
        (-2.5, Zone.LONG),
        # boundaries: extreme side on opens, neutral side on closes
        (1.8, Zone.SHORT),
        (-1.8, Zone.LONG),
        (0.4, Zone.NEUTRAL_SHORT),
        (-0.4, Zone.NEUTRAL_LONG),
    ],
)
def test_zone_partition(z, expected):
    assert classify_zone(z, BEST) == expected


def test_thresholds_must_be_ordered():
    with pytest.raises(ValueError):
        Thresholds(0.4, 1.8)
    with pytest.raises(ValueError):
        Thresholds(1.0, 0.0)


@given(st.floats(-6, 6), st.floats(0.5, 3), st.floats(0.05, 0.45))
@settings(max_examples=200, deadline=None)
def test_zone_mirror_antisymmetry(z, ot, ct):
    t = Thresholds(ot, ct)
    if abs(z) in (ot, ct):
        return
    mirror = {
        Zone.SHORT: Zone.LONG,
        Zone.NEUTRAL_SHORT: Zone.NEUTRAL_LONG,
        Zone.CLOSE: Zone.CLOSE,
        Zone.NEUTRAL_LONG: Zone.NEUTRAL_SHORT,
        Zone.LONG: Zone.SHORT,
    }
    assert classify_zone(-z, t) == mirror[classify_zone(z, t)]


def test_zones_for_matches_scalar():
    rng = np.random.default_rng(3)
    z = rng.uniform(-4, 4, 500)
    batch = zones_for(z, BEST)
    assert [Zone(int(v)) for v in batch] == [classify_zone(v, BEST) for v in z]


# --- streaming engine ---------------------------------------------------------------


def _streams(n, seed=1):
    rng = np.random.default_rng(seed)
    p_j = 100 + np.cumsum(rng.normal(0, 0.1, n))
    p_i = 5 + 2 * p_j + rng.normal(0, 0.2, n)
    return p_i, p_j


def test_engine_warmup_boundary():
    p_i, p_j = _streams(30)
    engine = SpreadEngine(30, BEST)
    observations = [
        engine.push(k, p_i[k], p_j[k]) for k in range(30)
    ]
    assert observations[:-1] == [None] * 29
    assert observations[-1] is not None


def test_engine_emits_k_plus_one():
    k = 17
    p_i, p_j = _streams(30 + k)
    engine = SpreadEngine(30, BEST)
    emitted = [engine.push(t, p_i[t], p_j[t]) for t in range(30 + k)]
    assert sum(o is not None for o in emitted) == k + 1


def test_engine_not_warm():
    engine = SpreadEngine(30, BEST)
    engine.push(0, 100.0, 50.0)
    with pytest.raises(NotWarm):
        engine.current()
    with pytest.raises(NotWarm):
        engine.model()


def test_engine_matches_batch_computation():
    n, window = 800, 60
    p_i, p_j = _streams(n, seed=9)
    engine = SpreadEngine(window, BEST)
    streamed = []
    for t in range(n):
        obs = engine.push(t, p_i[t], p_j[t])
        if obs is not None:
            streamed.append(obs)
    spread, z = rolling_spread(p_i, p_j, window)
    zones = zones_for(z, BEST)
    assert len(streamed) == len(z)
    np.testing.assert_allclose([o.z for o in streamed], z, atol=1e-9)
    assert [int(o.zone) for o in streamed] == list(zones)


def test_rolling_spread_chunking_is_invisible():
    p_i, p_j = _streams(500, seed=4)
    s1, z1 = rolling_spread(p_i, p_j, 40, chunk=64)
    s2, z2 = rolling_spread(p_i, p_j, 40, chunk=10_000)
    np.testing.assert_array_equal(z1, z2)
    np.testing.assert_array_equal(s1, s2)


def test_sinusoid_z_matches_closed_form(sinusoid_series):
    _, z = rolling_spread(sinusoid_series.prices_i, sinusoid_series.prices_j, 64)
    _, z_formula = sinusoid_z_formula(sinusoid_series)
    np.testing.assert_allclose(z, z_formula, atol=1e-9)


def test_sinusoid_threshold_crossings_are_analytic(sinusoid_series):
    thresholds = Thresholds(1.2, 0.3)
    _, z = rolling_spread(sinusoid_series.prices_i, sinusoid_series.prices_j, 64)
    t_idx, z_formula = sinusoid_z_formula(sinusoid_series)
    ours = zones_for(z, thresholds)
    expected = zones_for(z_formula, thresholds)
    assert list(ours) == list(expected)
