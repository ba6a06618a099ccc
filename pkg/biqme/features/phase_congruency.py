from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from pydantic import ValidationError
from scipy import fft

from biqme.errors import ConfigError
from biqme.imaging import PlaneF, entropy, histogram
from biqme.settings import PhaseCongruencySettings


# Rayleigh median -> scale factor: median = tau * sqrt(ln 4).
_RAYLEIGH_MEDIAN = math.sqrt(math.log(4.0))
_RAYLEIGH_MEAN = math.sqrt(math.pi / 2.0)
_RAYLEIGH_STD = math.sqrt((4.0 - math.pi) / 2.0)


@dataclass(frozen=True)
class LogGaborBank:
    """Immutable log-Gabor filter bank description.

    Frequency-domain filters are materialized per padded image shape and
    cached; the radial and angular factors are stored separately and
    multiplied on use.
    """

    scales: int = 4
    orientations: int = 4
    min_wavelength: float = 6.0
    multiplier: float = 2.0
    sigma_on_f: float = 0.55
    angular_ratio: float = 0.55
    k_noise: float = 2.0
    cutoff: float = 0.5
    gain: float = 10.0
    epsilon: float = 1e-4

    @property
    def filter_count(self) -> int:
        return self.scales * self.orientations

    @property
    def sigma_r(self) -> float:
        return abs(math.log(self.sigma_on_f))

    @property
    def sigma_o(self) -> float:
        return self.angular_ratio * math.pi / self.orientations

    def center_frequency(self, scale: int) -> float:
        return 1.0 / (self.min_wavelength * self.multiplier**scale)

    def orientation_angle(self, index: int) -> float:
        return index * math.pi / self.orientations

    def radial_response(self, frequency: float, scale: int) -> float:
        """Scalar radial log-Gabor term exp(-(log(w/w0))^2 / (2 sigma_r^2))."""
        if frequency <= 0:
            return 0.0
        ratio = math.log(frequency / self.center_frequency(scale))
        return math.exp(-(ratio**2) / (2.0 * self.sigma_r**2))

    def filters(self, shape: Tuple[int, int]) -> Tuple[np.ndarray, np.ndarray]:
        """(radial[N, H, W], angular[K, H, W]) in unshifted FFT layout."""
        return _materialize(self, shape)

    def filter(self, shape: Tuple[int, int], scale: int, orientation: int) -> np.ndarray:
        radial, angular = self.filters(shape)
        return radial[scale] * angular[orientation]


@lru_cache(maxsize=4)
def _materialize(bank: LogGaborBank, shape: Tuple[int, int]) -> Tuple[np.ndarray, np.ndarray]:
    rows, cols = shape
    fy = fft.fftfreq(rows)[:, np.newaxis]
    fx = fft.fftfreq(cols)[np.newaxis, :]
    radius = np.sqrt(fx**2 + fy**2)
    radius[0, 0] = 1.0
    theta = np.arctan2(-fy, fx)

    radial = np.empty((bank.scales, rows, cols))
    for n in range(bank.scales):
        log_ratio = np.log(radius / bank.center_frequency(n))
        radial[n] = np.exp(-(log_ratio**2) / (2.0 * bank.sigma_r**2))
        radial[n, 0, 0] = 0.0

    angular = np.empty((bank.orientations, rows, cols))
    for k in range(bank.orientations):
        angle = bank.orientation_angle(k)
        d_theta = np.abs(np.arctan2(np.sin(theta - angle), np.cos(theta - angle)))
        spread = np.exp(-(d_theta**2) / (2.0 * bank.sigma_o**2))
        # One-sided in frequency so the inverse transform yields an even/odd quadrature pair.
        spread[d_theta >= math.pi / 2.0] = 0.0
        angular[k] = spread

    radial.setflags(write=False)
    angular.setflags(write=False)
    return radial, angular


def build_bank(settings: Optional[PhaseCongruencySettings] = None, **overrides: float) -> LogGaborBank:
    """Validate bank parameters and return an immutable bank."""
    values = (settings or PhaseCongruencySettings()).model_dump()
    values.update(overrides)
    try:
        cfg = PhaseCongruencySettings(**values)
    except ValidationError as exc:
        raise ConfigError(f"Degenerate log-Gabor bank configuration: {exc}") from exc
    return LogGaborBank(
        scales=cfg.scales,
        orientations=cfg.orientations,
        min_wavelength=cfg.min_wavelength,
        multiplier=cfg.multiplier,
        sigma_on_f=cfg.sigma_on_f,
        angular_ratio=cfg.angular_ratio,
        k_noise=cfg.k_noise,
        cutoff=cfg.cutoff,
        gain=cfg.gain,
        epsilon=cfg.epsilon,
    )


@dataclass(frozen=True, eq=False)
class PcMap:
    """Phase congruency on [0, 1] plus the summed filter amplitude per pixel."""

    plane: PlaneF
    amplitude: PlaneF


def pc_map(gray: PlaneF, bank: LogGaborBank) -> PcMap:
    """Per-pixel phase congruency averaged over the bank's orientations."""
    gray = np.asarray(gray, dtype=np.float64)
    height, width = gray.shape
    padded_shape = (height + height % 2, width + width % 2)
    padded = np.zeros(padded_shape)
    padded[:height, :width] = gray - gray.mean()
    spectrum = fft.fft2(padded)
    radial, angular = bank.filters(padded_shape)

    eps = bank.epsilon
    pc_total = np.zeros((height, width))
    amplitude_total = np.zeros((height, width))
    for k in range(bank.orientations):
        even, odd = [], []
        sum_a = np.zeros((height, width))
        max_a = np.zeros((height, width))
        tau = 0.0
        for n in range(bank.scales):
            response = fft.ifft2(spectrum * (radial[n] * angular[k]))[:height, :width]
            e, o = response.real, response.imag
            a = np.hypot(e, o)
            even.append(e)
            odd.append(o)
            sum_a += a
            np.maximum(max_a, a, out=max_a)
            if n == 0:
                tau = float(np.median(a)) / _RAYLEIGH_MEDIAN

        sum_e = np.sum(even, axis=0)
        sum_o = np.sum(odd, axis=0)
        norm = np.hypot(sum_e, sum_o) + eps
        mean_e = sum_e / norm
        mean_o = sum_o / norm

        energy = np.zeros((height, width))
        for n in range(bank.scales):
            # A_n * (cos(dphi) - |sin(dphi)|) via dot and cross products.
            deviation = even[n] * mean_e + odd[n] * mean_o - np.abs(even[n] * mean_o - odd[n] * mean_e)
            tau_n = tau / bank.multiplier**n
            threshold = tau_n * (_RAYLEIGH_MEAN + bank.k_noise * _RAYLEIGH_STD)
            energy += np.maximum(deviation - threshold, 0.0)

        spread = sum_a / (bank.scales * (max_a + eps))
        weight = 1.0 / (1.0 + np.exp((bank.cutoff - spread) * bank.gain))
        pc_total += weight * energy / (eps + sum_a)
        amplitude_total += sum_a

    plane = np.clip(pc_total / bank.orientations, 0.0, 1.0)
    return PcMap(plane=plane, amplitude=amplitude_total)


def pc_entropy(gray: PlaneF, pc: PcMap, top_fraction: float = 0.4) -> float:
    """Entropy of the gray values at the pixels holding the largest PC values.

    The cut is the (1 - top_fraction) quantile; ties at the cut are kept, so
    the selection may slightly exceed `top_fraction`.
    """
    cut = float(np.quantile(pc.plane, 1.0 - top_fraction))
    selected = np.asarray(gray)[pc.plane >= cut]
    return entropy(histogram(selected))


__all__ = ["LogGaborBank", "PcMap", "build_bank", "pc_map", "pc_entropy"]
