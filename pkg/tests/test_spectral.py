"""Spectral math: integration, photometry, mixing, CSV round-trips."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from luxharvest.errors import DegenerateSpectrum, InvalidGrid, ShapeMismatch
from luxharvest.spectral import (
    LUMINOUS_EFFICACY_LM_PER_W,
    SPD,
    illuminance,
    integrate,
    mix,
    photopic_curve,
    read_spd_csv,
    resample,
    scale_to_lux,
    write_spd_csv,
)


def _gaussian_spd(center, sigma, grid=None):
    if grid is None:
        grid = np.arange(380.0, 780.5, 0.5)
    vals = np.exp(-0.5 * ((grid - center) / sigma) ** 2)
    return SPD(grid, vals)


# ---------------------------------------------------------------------------
# integrate

def test_triangle_integral_matches_hand_value():
    # triangle of base 100 nm and height 1: area 50, exact under trapezoid
    spd = SPD(np.array([400.0, 450.0, 500.0]), np.array([0.0, 1.0, 0.0]))
    assert integrate(spd) == pytest.approx(50.0, rel=1e-12)


def test_flat_band_integral():
    grid = np.arange(400.0, 700.5, 1.0)
    assert integrate(SPD(grid, np.ones_like(grid))) == pytest.approx(300.0, rel=1e-12)


def test_integrate_additive_in_values():
    grid = np.arange(400.0, 700.5, 1.0)
    a = np.random.default_rng(0).uniform(0.0, 2.0, grid.size)
    b = np.random.default_rng(1).uniform(0.0, 2.0, grid.size)
    total = integrate(SPD(grid, a + b))
    assert total == pytest.approx(integrate(SPD(grid, a)) + integrate(SPD(grid, b)), rel=1e-12)


def test_spd_grid_must_increase():
    with pytest.raises(InvalidGrid):
        SPD(np.array([500.0, 400.0, 600.0]), np.zeros(3))


def test_spd_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        SPD(np.array([400.0, 500.0]), np.zeros(3))


# ---------------------------------------------------------------------------
# photometry

def test_efficacy_constant():
    assert LUMINOUS_EFFICACY_LM_PER_W == 683.002


def test_photopic_peaks_at_555():
    curve = photopic_curve()
    at_555 = curve.values[curve.wavelengths_nm == 555.0]
    assert at_555.shape == (1,)
    assert at_555[0] == pytest.approx(1.0, abs=1e-9)
    assert np.argmax(curve.values) == np.flatnonzero(curve.wavelengths_nm == 555.0)[0]


def test_monochromatic_555_gives_683_lux_per_watt():
    spd = _gaussian_spd(555.0, 1.0)
    spd = SPD(spd.wavelengths_nm, spd.irradiance / integrate(spd))  # exactly 1 W/m^2
    assert illuminance(spd) == pytest.approx(683.0, rel=5e-3)


def test_illuminance_linearity():
    base = _gaussian_spd(555.0, 40.0)
    ref = illuminance(base)
    for k in (1e-6, 0.3, 7.0, 1e4):
        scaled = SPD(base.wavelengths_nm, base.irradiance * k)
        assert illuminance(scaled) == pytest.approx(k * ref, rel=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=1e-6, max_value=1e6, allow_nan=False))
def test_illuminance_linearity_property(k):
    base = _gaussian_spd(580.0, 55.0)
    scaled = SPD(base.wavelengths_nm, base.irradiance * k)
    assert illuminance(scaled) == pytest.approx(k * illuminance(base), rel=1e-9)


def test_off_visible_light_has_no_illuminance():
    grid = np.arange(900.0, 1100.5, 1.0)
    spd = SPD(grid, np.ones_like(grid))
    assert illuminance(spd) == pytest.approx(0.0, abs=1e-9)


# ---------------------------------------------------------------------------
# mix / scale / resample

def test_mix_is_additive_in_illuminance():
    a = _gaussian_spd(450.0, 20.0)
    b = _gaussian_spd(620.0, 30.0)
    mixed = mix([a, b], [1.0, 1.0])
    assert illuminance(mixed) == pytest.approx(illuminance(a) + illuminance(b), rel=1e-9)


def test_mix_weights_scale_contributions():
    # 1 nm grid so the union grid is the same grid and weights act exactly
    a = _gaussian_spd(500.0, 25.0, np.arange(380.0, 781.0, 1.0))
    mixed = mix([a, a], [2.0, 3.0])
    assert integrate(mixed) == pytest.approx(5.0 * integrate(a), rel=1e-12)


def test_mix_handles_disjoint_grids():
    # gaussians decay to ~0 at their domain edges, so resampling the pair
    # onto the union grid keeps the integrals additive
    a = _gaussian_spd(430.0, 8.0, np.arange(400.0, 501.0, 1.0))
    b = _gaussian_spd(670.0, 8.0, np.arange(600.0, 701.0, 1.0))
    mixed = mix([a, b], [1.0, 1.0])
    assert integrate(mixed) == pytest.approx(integrate(a) + integrate(b), rel=1e-6)


def test_mix_rejects_bad_weights():
    a = _gaussian_spd(500.0, 25.0)
    with pytest.raises(ShapeMismatch):
        mix([a], [1.0, 2.0])
    with pytest.raises(ValueError):
        mix([a], [-1.0])


def test_scale_to_lux_hits_target():
    spd = _gaussian_spd(555.0, 60.0)
    for target in (10.0, 1000.0, 80000.0):
        scaled = scale_to_lux(spd, target)
        assert illuminance(scaled) == pytest.approx(target, rel=1e-9)


def test_scale_to_lux_rejects_dark_spectrum():
    grid = np.arange(400.0, 500.5, 1.0)
    with pytest.raises(DegenerateSpectrum):
        scale_to_lux(SPD(grid, np.zeros_like(grid)), 100.0)


def test_resample_exact_at_shared_nodes():
    spd = _gaussian_spd(520.0, 25.0)
    fine = resample(spd, np.arange(400.0, 700.25, 0.25))
    mask = np.isin(fine.wavelengths_nm, spd.wavelengths_nm)
    keep = np.isin(spd.wavelengths_nm, fine.wavelengths_nm)
    assert np.array_equal(fine.irradiance[mask], spd.irradiance[keep])


def test_resample_extends_with_zeros():
    spd = SPD(np.array([500.0, 510.0]), np.array([1.0, 1.0]))
    wide = resample(spd, np.arange(400.0, 600.5, 1.0))
    assert wide.irradiance[0] == 0.0
    assert wide.irradiance[-1] == 0.0


def test_resample_rejects_bad_grid():
    spd = _gaussian_spd(520.0, 25.0)
    with pytest.raises(InvalidGrid):
        resample(spd, np.array([500.0, 500.0, 510.0]))


# ---------------------------------------------------------------------------
# CSV

def test_spd_csv_round_trip(tmp_path):
    spd = _gaussian_spd(600.0, 35.0, np.arange(380.0, 780.5, 5.0))
    path = tmp_path / "spd.csv"
    write_spd_csv(spd, path)
    back = read_spd_csv(path)
    assert np.allclose(back.wavelengths_nm, spd.wavelengths_nm, rtol=1e-9)
    assert np.allclose(back.irradiance, spd.irradiance, rtol=1e-9)
