"""Full-reference colorfulness-aware patch quality index used to label training images."""

from .cpcqi import PatchGrid, cpcqi_score, cpcqi_terms, saturation_similarity

__all__ = ["PatchGrid", "cpcqi_score", "cpcqi_terms", "saturation_similarity"]
