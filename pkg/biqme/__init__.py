"""Blind image quality measurement and quality-optimized contrast enhancement."""

__version__ = "0.1.0"
