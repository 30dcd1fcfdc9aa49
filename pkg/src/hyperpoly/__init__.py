"""Polyhedral abstract interpretation of While programs with an infinitesimal time step."""

from .dtfield import DT, DtScalar
from .polyhedra import Constraint, LinearExpr, Polyhedron

__version__ = "0.1.0"

__all__ = ["DT", "DtScalar", "Constraint", "LinearExpr", "Polyhedron"]
