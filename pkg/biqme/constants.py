"""Toolkit-wide constants shared by every module."""

ENCODING = "utf-8"
RECORD_DELIMITER = b"\n"

FEATURE_COUNT = 17
FEATURE_COLUMNS = tuple(f"f{i:02d}" for i in range(1, FEATURE_COUNT + 1))
LABEL_COLUMN = "label"
PATH_COLUMN = "path"
GROUP_COLUMN = "group"
CSV_SIGNIFICANT_DIGITS = 9

MIN_IMAGE_SIDE = 32
GRAY_LEVELS = 256

MODEL_MAGIC = "BIQME-SVR"
MODEL_VERSION = 1

IMAGE_SUFFIXES = (".png", ".bmp", ".jpg", ".jpeg")

__all__ = [
    "ENCODING",
    "RECORD_DELIMITER",
    "FEATURE_COUNT",
    "FEATURE_COLUMNS",
    "LABEL_COLUMN",
    "PATH_COLUMN",
    "GROUP_COLUMN",
    "CSV_SIGNIFICANT_DIGITS",
    "MIN_IMAGE_SIDE",
    "GRAY_LEVELS",
    "MODEL_MAGIC",
    "MODEL_VERSION",
    "IMAGE_SUFFIXES",
]
