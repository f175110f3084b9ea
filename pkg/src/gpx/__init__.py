"""Scattering, conserved energies and dynamics for the Gross-Pitaevskii equation on the unit background."""

from .grid import Grid, GridField
from .profiles import Profile, sample

__all__ = ["Grid", "GridField", "Profile", "sample"]
__version__ = "0.1.0"
