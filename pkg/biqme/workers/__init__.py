from .batch import BatchRunner

__all__ = ["BatchRunner"]
