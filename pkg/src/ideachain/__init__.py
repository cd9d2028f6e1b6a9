"""Research-ideation pipeline over literature chains, with a pairwise
tournament engine for evaluating the generated ideas and experiment plans."""

from .config import EloConfig, PipelineConfig

__version__ = "0.1.0"

__all__ = ["EloConfig", "PipelineConfig", "__version__"]
