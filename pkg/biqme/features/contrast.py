from __future__ import annotations

from typing import Tuple

import numpy as np

from biqme.imaging import PlaneF, RasterImage, convolve_2d, gaussian_second_derivatives, opponent_channels, to_gray
from biqme.settings import ContrastEnergySettings

CeParams = ContrastEnergySettings

_FLAT_RESPONSE = 1e-12


def _channel_energy(plane: PlaneF, kernels: Tuple[np.ndarray, np.ndarray], theta: float, phi: float) -> float:
    f_h, f_v = kernels
    response = np.hypot(convolve_2d(plane, f_h), convolve_2d(plane, f_v))
    alpha = float(response.max())
    if alpha <= _FLAT_RESPONSE:
        return 0.0
    gain = alpha * response / (response + alpha * theta)
    return float(np.mean(np.maximum(gain - phi, 0.0)))


def contrast_energy(img: RasterImage, params: CeParams = CeParams()) -> Tuple[float, float, float]:
    """(CE_gr, CE_yb, CE_rg) on channels scaled by 1/255; gray images give CE_yb = CE_rg = 0."""
    kernels = gaussian_second_derivatives(params.gauss_sigma, params.radius_factor)
    ce_gr = _channel_energy(to_gray(img) / 255.0, kernels, params.theta, params.phi_gr)
    if not img.is_color:
        return ce_gr, 0.0, 0.0
    yb, rg = opponent_channels(img)
    ce_yb = _channel_energy(yb / 255.0, kernels, params.theta, params.phi_yb)
    ce_rg = _channel_energy(rg / 255.0, kernels, params.theta, params.phi_rg)
    return ce_gr, ce_yb, ce_rg


__all__ = ["CeParams", "contrast_energy"]
