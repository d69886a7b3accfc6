"""Textile K-theory - C*-textile dynamical systems, tilings and K-groups."""

__version__ = "1.0.0"
__author__ = "Textile K-theory Team"
__email__ = "support@example.com"
__description__ = "Symbolic matrices, C*-textile dynamical systems and their K-groups"

from .core import Workbench
from .models import FgAbelianGroup, IntMatrix, Specification, SymbolicMatrix

__all__ = ["Workbench", "FgAbelianGroup", "IntMatrix", "Specification", "SymbolicMatrix"]
