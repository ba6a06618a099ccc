from .common import expand_image_paths, format_float, make_rng, sha256_hex

__all__ = ["expand_image_paths", "format_float", "make_rng", "sha256_hex"]
