from __future__ import annotations

import numpy as np
import pytest
from scipy import fft

from biqme.errors import ConfigError
from biqme.features import build_bank, pc_entropy, pc_map
from biqme.imaging import to_gray
from biqme.settings import PhaseCongruencySettings

from .synthetic import checkerboard, constant, noisy, step_edge


def _bank():
    return build_bank(PhaseCongruencySettings())


def test_default_bank_has_sixteen_filters():
    bank = _bank()
    assert bank.filter_count == 16
    radial, angular = bank.filters((64, 64))
    assert radial.shape == (4, 64, 64)
    assert angular.shape == (4, 64, 64)


def test_filters_have_no_dc_and_are_nonnegative():
    bank = _bank()
    for n in range(bank.scales):
        for k in range(bank.orientations):
            g = bank.filter((32, 48), n, k)
            assert g[0, 0] == 0.0
            assert np.all(g >= 0.0)


def test_radial_profile_matches_scalar_formula():
    bank = _bank()
    radial, _ = bank.filters((64, 64))
    freqs = fft.fftfreq(64)
    for n in range(bank.scales):
        for j in (1, 3, 5, 11, 20):
            assert radial[n, 0, j] == pytest.approx(bank.radial_response(abs(freqs[j]), n), rel=1e-12)


def test_degenerate_bank_rejected():
    with pytest.raises(ConfigError):
        build_bank(scales=1)
    with pytest.raises(ConfigError):
        build_bank(min_wavelength=2.0)


def test_constant_plane_has_zero_pc():
    pc = pc_map(to_gray(constant(90, size=48)), _bank())
    assert np.all(pc.plane == 0.0)


def test_pc_stays_in_unit_interval_on_random_images():
    bank = _bank()
    for seed in range(5):
        pc = pc_map(to_gray(noisy(seed=seed, size=48)), bank)
        assert pc.plane.min() >= 0.0
        assert pc.plane.max() <= 1.0


def test_step_edge_peaks_at_the_edge():
    gray = to_gray(step_edge(size=64))
    pc = pc_map(gray, _bank())
    profile = pc.plane.mean(axis=0)
    # the periodic transform also sees the wrap-around edge at the border
    assert int(np.argmax(profile)) in {30, 31, 32, 33, 0, 1, 62, 63}


def test_pc_ignores_additive_shift():
    gray = to_gray(noisy(seed=2, size=48, mean=110, std=25))
    gray = np.clip(gray, 0, 200)
    bank = _bank()
    base = pc_map(gray, bank).plane
    shifted = pc_map(gray + 20.0, bank).plane
    assert np.max(np.abs(base - shifted)) <= 1e-6


def test_pc_entropy_bounds_and_constant():
    bank = _bank()
    flat = to_gray(constant(77, size=48))
    assert pc_entropy(flat, pc_map(flat, bank)) == 0.0
    gray = to_gray(noisy(seed=4, size=48))
    assert 0.0 <= pc_entropy(gray, pc_map(gray, bank)) <= 8.0


def test_pc_entropy_on_checkerboard_is_one_bit():
    gray = to_gray(checkerboard(size=64, cell=8, low=40, high=210))
    assert pc_entropy(gray, pc_map(gray, _bank())) == pytest.approx(1.0, abs=0.05)


def test_pc_entropy_is_deterministic():
    gray = to_gray(noisy(seed=9, size=40))
    bank = _bank()
    assert pc_entropy(gray, pc_map(gray, bank)) == pc_entropy(gray, pc_map(gray, bank))
