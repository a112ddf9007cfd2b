"""Tent-tiles of special Pisot units, their Rauzy fractal models, boundary graphs and tilings."""

__version__ = "0.1.0"
