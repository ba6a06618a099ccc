from __future__ import annotations

from pathlib import Path
from typing import Optional

from biqme.features import FeatureExtractor, FeatureVector
from biqme.imaging import RasterImage
from biqme.settings import DEFAULT_CONFIG, ToolkitConfig

from .model_io import load_model
from .svr import SvrModel


class BiqmeScorer:
    """Blind quality score: feature extraction followed by the trained regression."""

    def __init__(self, model: SvrModel, config: ToolkitConfig = DEFAULT_CONFIG, extractor: Optional[FeatureExtractor] = None):
        self.model = model
        self.extractor = extractor or FeatureExtractor(config)

    @classmethod
    def from_file(cls, path: str | Path, config: ToolkitConfig = DEFAULT_CONFIG) -> "BiqmeScorer":
        return cls(load_model(path), config)

    def score_features(self, features: FeatureVector) -> float:
        return float(self.model.predict(features.as_array())[0])

    def score(self, img: RasterImage) -> float:
        return self.score_features(self.extractor.extract(img))

    __call__ = score


__all__ = ["BiqmeScorer"]
