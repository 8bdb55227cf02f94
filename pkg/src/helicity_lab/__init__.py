"""Numerical checks for lowest-weight Moebius representations, chiral currents,
SO(3) tensor branching, helicity-h time-axis decompositions and finite
standard subspaces."""

__version__ = "0.1.0"
