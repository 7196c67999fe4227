"""Ontology-backed Vietnamese question answering."""

__version__ = "0.1.0"

from .config import Config, load_config
from .pipeline import QAEngine

__all__ = ["Config", "QAEngine", "load_config", "__version__"]
