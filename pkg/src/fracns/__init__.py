"""Pseudo-spectral Navier-Stokes on the periodic box with fractional-derivative
regularity monitoring and turbulence statistics."""

__version__ = "0.1.0"
