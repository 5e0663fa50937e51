"""Dyadic operator-valued BMO at finite resolution."""

from .dyadic import DyadicIndex, TreeConfig, enumerate_intervals, haar_step
from .symbol import HaarSymbol, StepSymbol, gaussian_symbol, to_haar, to_step

__version__ = "0.1.0"
