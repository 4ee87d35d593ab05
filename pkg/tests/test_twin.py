"""Sensor twin: responsivities, lux mapping, references, scenarios, timelines."""

import numpy as np
import pytest

from luxharvest.classes import BASE_TAXONOMY, CANONICAL_ORDER, LightClass
from luxharvest.errors import InputError
from luxharvest.features import normalized_difference
from luxharvest.spectral import illuminance, integrate
from luxharvest.twin import (
    CHANNEL_NAMES,
    ChannelResponsivity,
    NaturalBias,
    Scenario,
    SensorTwin,
    Source,
    SourceProfile,
    Timeline,
    default_twin,
    reference_spd,
    scenario_from_json,
    scenario_to_json,
    sense,
    simulate_day,
)

LIT_BASE = tuple(c for c in BASE_TAXONOMY if c is not LightClass.DARK)


def _noiseless():
    twin = default_twin(0.01)
    return SensorTwin(
        channels=twin.channels,
        lux_breakpoints=twin.lux_breakpoints,
        lux_segments=twin.lux_segments,
        class_bias=twin.class_bias,
        noise_frac=0.0,
        b_floor=twin.b_floor,
    )


# ---------------------------------------------------------------------------
# responsivities

def test_channel_names_order():
    assert CHANNEL_NAMES == ("bb", "ir", "r", "g", "b", "lux")


def test_responsivity_validation():
    grid = np.arange(400.0, 700.5, 1.0)
    flat = np.full(grid.size, 0.5)
    ChannelResponsivity("ok", grid, flat, gain=10.0)
    with pytest.raises((ValueError, InputError)):
        ChannelResponsivity("bad", grid, flat, gain=0.0)
    with pytest.raises((ValueError, InputError)):
        ChannelResponsivity("bad", grid, flat * 3.0, gain=1.0)  # response > 1
    with pytest.raises((ValueError, InputError)):
        ChannelResponsivity("bad", np.arange(200.0, 500.0, 1.0), np.full(300, 0.5), gain=1.0)


def test_counts_are_nonnegative_for_references():
    twin = _noiseless()
    for cls in LIT_BASE:
        counts = twin.counts(reference_spd(cls))
        assert counts.shape == (5,)  # lux is derived, not a photodiode
        assert np.all(counts >= 0.0)


# ---------------------------------------------------------------------------
# lux reading

def test_reference_lux_reads_true_after_bias():
    # the twin's piecewise counts-to-lux map must reproduce the biased
    # illuminance of every reference class at any intensity
    twin = _noiseless()
    for cls in CANONICAL_ORDER:
        if cls is LightClass.DARK:
            continue
        for lux in (10.0, 400.0, 1000.0, 5000.0):
            ps = sense(reference_spd(cls, lux), twin, truth_class=cls, true_lux=lux)
            expected = twin.bias_at(cls, lux) * lux
            assert ps.lux == pytest.approx(expected, rel=1e-9), cls.id


def test_dark_reads_zero_lux():
    twin = _noiseless()
    ps = sense(reference_spd(LightClass.DARK), twin, truth_class=LightClass.DARK, true_lux=0.0)
    assert ps.lux == 0.0
    assert ps.bb == ps.ir == ps.r == ps.g == 0.0
    # the blue channel carries a small dark-count floor
    assert ps.b == twin.b_floor


def test_blue_floor_pins_dark_feature():
    twin = _noiseless()
    ps = sense(reference_spd(LightClass.DARK), twin, truth_class=LightClass.DARK, true_lux=0.0)
    assert normalized_difference(ps.ir, ps.b) == -1.0


def test_natural_bias_shape():
    bias = NaturalBias(1.0, 400.0)
    assert bias.at(0.0) == pytest.approx(2.0)
    assert bias.at(-5.0) == pytest.approx(2.0)
    assert bias.at(400.0) == pytest.approx(1.0 + np.exp(-1.0))
    assert bias.at(1e9) == pytest.approx(1.0)
    # decays monotonically toward 1
    lux = np.linspace(0.0, 5000.0, 200)
    vals = np.array([bias.at(v) for v in lux])
    assert np.all(np.diff(vals) <= 0.0)


def test_noise_is_seed_deterministic():
    twin = default_twin(0.01)
    spd = reference_spd(LightClass.LED_4000K, 300.0)
    a = sense(spd, twin, rng=7, truth_class=LightClass.LED_4000K, true_lux=300.0)
    b = sense(spd, twin, rng=7, truth_class=LightClass.LED_4000K, true_lux=300.0)
    c = sense(spd, twin, rng=8, truth_class=LightClass.LED_4000K, true_lux=300.0)
    assert a.as_array().tolist() == b.as_array().tolist()
    assert a.as_array().tolist() != c.as_array().tolist()


# ---------------------------------------------------------------------------
# reference spectra

def test_reference_spd_hits_target_lux():
    for cls in LIT_BASE:
        for lux in (50.0, 1000.0):
            assert illuminance(reference_spd(cls, lux)) == pytest.approx(lux, rel=1e-9)


def test_dark_reference_is_zero():
    spd = reference_spd(LightClass.DARK, 1000.0)
    assert integrate(spd) == 0.0


def test_class_separability_in_nd_space():
    # every lit base-class pair differs by >= 0.05 in at least one
    # normalized-difference channel pair, so classes cannot collapse
    twin = _noiseless()
    nd_vectors = {}
    for cls in LIT_BASE:
        counts = twin.counts(reference_spd(cls))
        pairs = {}
        for i in range(5):
            for j in range(5):
                if i != j:
                    pairs[(i, j)] = normalized_difference(counts[i], counts[j])
        nd_vectors[cls] = pairs
    for a_pos, a in enumerate(LIT_BASE):
        for b in LIT_BASE[a_pos + 1 :]:
            best = max(
                abs(nd_vectors[a][key] - nd_vectors[b][key]) for key in nd_vectors[a]
            )
            assert best >= 0.05, f"{a.id} vs {b.id} separated by only {best:.3f}"


# ---------------------------------------------------------------------------
# scenarios and timelines

def _small_scenario(noise=0.0):
    twin = _noiseless() if noise == 0.0 else default_twin(noise)
    led = Source(
        LightClass.LED_3000K,
        SourceProfile("constant", {"lux": 200.0, "start_s": 3600.0, "end_s": 18000.0}),
    )
    day = Source(
        LightClass.DAYLIGHT,
        SourceProfile(
            "bell",
            {
                "peak_lux": 500.0,
                "center_s": 10800.0,
                "sigma_s": 3600.0,
                "start_s": 5400.0,
                "end_s": 16200.0,
            },
        ),
    )
    return Scenario(duration_s=21600.0, step_s=300.0, sources=(led, day), twin=twin)


def test_simulate_day_step_count():
    tl = simulate_day(_small_scenario(), seed=0)
    assert len(tl.t_s) == int(21600.0 / 300.0) + 1
    assert tl.channels.shape == (len(tl.t_s), 6)


def test_simulate_day_deterministic():
    sc = _small_scenario(noise=0.01)
    a = simulate_day(sc, seed=4)
    b = simulate_day(sc, seed=4)
    c = simulate_day(sc, seed=5)
    assert np.array_equal(a.channels, b.channels)
    assert not np.array_equal(a.channels, c.channels)


def test_truth_lux_is_sum_of_weights():
    tl = simulate_day(_small_scenario(), seed=0)
    i = len(tl.t_s) // 2  # mid-run, both sources lit
    assert tl.true_lux(i) == pytest.approx(float(tl.weights[i].sum()) * 1000.0, rel=1e-12)


def test_fractions_are_irradiance_shares():
    tl = simulate_day(_small_scenario(), seed=0)
    lit = tl.fractions.sum(axis=1) > 0.0
    assert np.allclose(tl.fractions[lit].sum(axis=1), 1.0, rtol=1e-9)
    assert np.all(tl.fractions >= 0.0)


def test_dark_steps_are_floored_only_in_blue():
    tl = simulate_day(_small_scenario(), seed=0)
    dark = tl.truth_class == 0
    assert dark.any()
    rows = tl.channels[dark]
    assert np.all(rows[:, [0, 1, 2, 3, 5]] == 0.0)
    assert np.all(rows[:, 4] == _noiseless().b_floor)


def test_truth_spd_matches_scenario_weights():
    tl = simulate_day(_small_scenario(), seed=0)
    i = len(tl.t_s) // 2
    # the truth spectrum integrates to the weighted reference irradiance
    expected = sum(
        float(w) * integrate(reference_spd(cls))
        for w, cls in zip(tl.weights[i], tl.source_classes)
    )
    assert integrate(tl.truth_spd(i)) == pytest.approx(expected, rel=1e-9)


def test_timeline_csv_round_trip(tmp_path):
    tl = simulate_day(_small_scenario(noise=0.01), seed=9)
    path = tmp_path / "tl.csv"
    tl.to_csv(path)
    back = Timeline.from_csv(path)
    assert np.allclose(back.t_s, tl.t_s, rtol=1e-9)
    assert np.allclose(back.channels, tl.channels, rtol=1e-9)
    assert np.array_equal(back.truth_class, tl.truth_class)
    assert np.allclose(back.fractions, tl.fractions, rtol=1e-9, atol=1e-12)


def test_scenario_json_round_trip(tmp_path):
    sc = _small_scenario(noise=0.02)
    path = tmp_path / "scenario.json"
    scenario_to_json(sc, path)
    back = scenario_from_json(path)
    assert back.duration_s == sc.duration_s
    assert back.step_s == sc.step_s
    assert back.twin.noise_frac == sc.twin.noise_frac
    assert back.twin.b_floor == sc.twin.b_floor
    assert [s.light_class for s in back.sources] == [s.light_class for s in sc.sources]
    assert [s.profile.kind for s in back.sources] == ["constant", "bell"]
    # round-tripped twin senses identically
    spd = reference_spd(LightClass.LED_3000K, 500.0)
    a = sense(spd, sc.twin, truth_class=LightClass.LED_3000K, true_lux=500.0)
    b = sense(spd, back.twin, truth_class=LightClass.LED_3000K, true_lux=500.0)
    assert a.as_array().tolist() == pytest.approx(b.as_array().tolist(), rel=1e-12)


def test_scenario_validation():
    twin = _noiseless()
    with pytest.raises((ValueError, InputError)):
        Scenario(duration_s=0.0, step_s=60.0, sources=(), twin=twin)
    with pytest.raises((ValueError, InputError)):
        Scenario(duration_s=3600.0, step_s=0.0, sources=(), twin=twin)
    with pytest.raises((ValueError, InputError)):
        SourceProfile("strobe", {"lux": 1.0})


def test_b_floor_must_be_nonnegative():
    twin = default_twin(0.0)
    with pytest.raises(ValueError):
        SensorTwin(
            channels=twin.channels,
            lux_breakpoints=twin.lux_breakpoints,
            lux_segments=twin.lux_segments,
            class_bias=twin.class_bias,
            noise_frac=0.0,
            b_floor=-0.1,
        )
