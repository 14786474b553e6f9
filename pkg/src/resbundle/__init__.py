"""Rigorous enclosures of resonant stable bundles for Swift-Hohenberg pulses."""

from .interval import ComplexInterval, Interval, IntervalMatrix
from .series import MultiSeries, cauchy, cauchy_hat
from .spectrum import SHParams, Spectrum, compute_spectrum

__all__ = ["ComplexInterval", "Interval", "IntervalMatrix", "MultiSeries", "cauchy", "cauchy_hat",
           "SHParams", "Spectrum", "compute_spectrum"]
