"""
Image substrate shared by every feature: decoding/encoding, color transforms,
histograms, entropy and boundary-aware convolution.
"""

from .color import (
    hsv_to_rgb,
    opponent_channels,
    replace_value,
    rgb_to_hsv,
    saturation_plane,
    to_gray,
    value_channel,
)
from .filters import convolve_2d, gaussian_kernel, gaussian_second_derivatives
from .histogram import Histogram256, entropy, histogram, quantize
from .raster import PlaneF, RasterImage, apply_lut, load_image, save_image

__all__ = [
    "PlaneF",
    "RasterImage",
    "load_image",
    "save_image",
    "apply_lut",
    "to_gray",
    "opponent_channels",
    "saturation_plane",
    "rgb_to_hsv",
    "hsv_to_rgb",
    "value_channel",
    "replace_value",
    "Histogram256",
    "histogram",
    "entropy",
    "quantize",
    "convolve_2d",
    "gaussian_kernel",
    "gaussian_second_derivatives",
]
