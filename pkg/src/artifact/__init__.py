"""Numerical toolkit for singular symplectic reduction and lattice gauge-Higgs models."""

__version__ = "0.1.0"

from .lattice import Cochain, Lattice, NumericalError
from .liealg import Couplings, ValidationError
