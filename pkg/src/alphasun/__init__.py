"""Numerical toolkit for the alpha-Sun law, its Weibull-case counterpart, and
perpetuities of subordinators."""

from .params import DistParams, MomentSequence, SampleBatch

__version__ = "0.1.0"

__all__ = ["DistParams", "MomentSequence", "SampleBatch", "__version__"]
