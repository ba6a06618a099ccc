from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import numpy.typing as npt
from PIL import Image, UnidentifiedImageError

from biqme.constants import MIN_IMAGE_SIDE
from biqme.errors import ChannelError, ImageFormatError, ImageSizeError, MissingFileError
from biqme.utils.common import sha256_hex

logger = logging.getLogger(__name__)

PlaneF = npt.NDArray[np.float64]
"""Real-valued row-major plane, shape (height, width)."""

_LOSSLESS_FORMATS = {".png": "PNG", ".bmp": "BMP"}


@dataclass(frozen=True, eq=False)
class RasterImage:
    """Decoded 8-bit image: (h, w) gray or (h, w, 3) interleaved RGB, read-only."""

    data: npt.NDArray[np.uint8]

    def __post_init__(self) -> None:
        data = np.asarray(self.data)
        if data.dtype != np.uint8:
            raise ImageFormatError(f"Expected 8-bit samples, got {data.dtype}")
        if data.ndim == 3 and data.shape[2] == 1:
            data = data[:, :, 0]
        if not (data.ndim == 2 or (data.ndim == 3 and data.shape[2] == 3)):
            raise ChannelError(f"Unsupported image shape {data.shape}")
        data = np.array(data, copy=True, order="C")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @classmethod
    def from_float(cls, values: np.ndarray) -> "RasterImage":
        """Round and clip real samples to 8 bits."""
        return cls(np.clip(np.rint(values), 0, 255).astype(np.uint8))

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def channels(self) -> int:
        return 1 if self.data.ndim == 2 else 3

    @property
    def is_color(self) -> bool:
        return self.channels == 3

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.data.shape)

    def as_float(self) -> np.ndarray:
        return self.data.astype(np.float64)

    def content_hash(self) -> str:
        """Hash of the decoded samples and geometry (container independent)."""
        header = f"{self.height}x{self.width}x{self.channels};".encode("ascii")
        return sha256_hex(header + self.data.tobytes())

    def require_min_size(self, min_side: int = MIN_IMAGE_SIDE) -> "RasterImage":
        if self.width < min_side or self.height < min_side:
            raise ImageSizeError(f"Image {self.width}x{self.height} is below the {min_side}x{min_side} minimum")
        return self

    def require_color(self) -> "RasterImage":
        if not self.is_color:
            raise ChannelError("Operation needs a 3-channel RGB image")
        return self

    def same_geometry(self, other: "RasterImage") -> bool:
        """Same width and height; channel counts may differ."""
        return self.shape[:2] == other.shape[:2]


def load_image(path: str | Path) -> RasterImage:
    """Decode PNG, BMP or baseline JPEG; alpha is dropped, palettes expanded."""
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"Image not found: {path}")
    try:
        with Image.open(path) as handle:
            mode = handle.mode
            if mode in ("I", "I;16", "I;16B", "I;16L", "F"):
                raise ImageFormatError(f"{path}: only 8-bit images are supported (mode {mode})")
            if mode in ("L", "1", "LA"):
                converted = handle.convert("L")
            else:
                converted = handle.convert("RGB")
            data = np.asarray(converted, dtype=np.uint8)
    except (UnidentifiedImageError, OSError) as exc:
        raise ImageFormatError(f"Cannot decode {path}: {exc}") from exc
    logger.debug("Loaded %s (%s, %dx%d)", path, mode, data.shape[1], data.shape[0])
    return RasterImage(data)


def save_image(img: RasterImage, path: str | Path) -> None:
    """Encode losslessly (PNG/BMP); JPEG encoding is not supported."""
    path = Path(path)
    fmt = _LOSSLESS_FORMATS.get(path.suffix.lower())
    if fmt is None:
        raise ImageFormatError(f"Unsupported output format {path.suffix!r}; use .png or .bmp")
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(img.data).save(path, format=fmt)


def apply_lut(img: RasterImage, lut: np.ndarray) -> RasterImage:
    """Map every sample (all channels alike) through a 256-entry table."""
    table = np.clip(np.rint(np.asarray(lut, dtype=np.float64)), 0, 255).astype(np.uint8)
    if table.shape != (256,):
        raise ImageFormatError(f"LUT must have 256 entries, got {table.shape}")
    return RasterImage(table[img.data])


__all__ = ["PlaneF", "RasterImage", "load_image", "save_image", "apply_lut"]
