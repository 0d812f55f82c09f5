"""Reversed boundary-layer toolkit: Airy Green's functions, fractional
interface solves, the mixed-type toy solver and the free-boundary iteration."""

__version__ = "0.1.0"
