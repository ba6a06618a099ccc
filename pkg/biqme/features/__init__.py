"""
Feature extraction: phase congruency, contrast energy, wavelet sharpness,
brightness entropies, colorfulness and naturalness, assembled into the
17-dimension vector.
"""

from .contrast import CeParams, contrast_energy
from .global_stats import (
    BrightnessConfig,
    GgdFit,
    MscnConfig,
    brightness_entropies,
    colorfulness_pair,
    dark_channel_mean,
    ggd_fit,
    ggd_ratio,
    invert_ggd_ratio,
    mscn,
)
from .phase_congruency import LogGaborBank, PcMap, build_bank, pc_entropy, pc_map
from .pipeline import (
    FAMILY_COLUMNS,
    FEATURE_NAMES,
    FeatureExtractor,
    FeatureFamily,
    FeatureRow,
    FeatureVector,
    extract_features,
    read_feature_csv,
    write_feature_csv,
    write_feature_rows,
)
from .wavelet import DwtPyramid, dwt97, dwt97_3level, idwt97, level_log_energy, log_energy, subband_log_energy

__all__ = [
    "CeParams",
    "contrast_energy",
    "BrightnessConfig",
    "MscnConfig",
    "GgdFit",
    "brightness_entropies",
    "colorfulness_pair",
    "dark_channel_mean",
    "ggd_fit",
    "ggd_ratio",
    "invert_ggd_ratio",
    "mscn",
    "LogGaborBank",
    "PcMap",
    "build_bank",
    "pc_map",
    "pc_entropy",
    "DwtPyramid",
    "dwt97",
    "dwt97_3level",
    "idwt97",
    "log_energy",
    "level_log_energy",
    "subband_log_energy",
    "FeatureFamily",
    "FeatureVector",
    "FeatureRow",
    "FeatureExtractor",
    "FEATURE_NAMES",
    "FAMILY_COLUMNS",
    "extract_features",
    "write_feature_csv",
    "write_feature_rows",
    "read_feature_csv",
]
