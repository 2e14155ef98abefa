"""Exact separated-variable solutions of the steady 2-D Navier-Stokes equations on cones."""
from .families import (FAMILIES, Constant, FlowSolution, Linear, PowerMode, Quadratic, RotLog,
                       ShearX, ShearY, admissible, make_quadratic, quadratic_from_c1c2)
from .geometry import ConeDomain, PolarPoint

__all__ = ["FAMILIES", "Constant", "FlowSolution", "Linear", "PowerMode", "Quadratic", "RotLog",
           "ShearX", "ShearY", "admissible", "make_quadratic", "quadratic_from_c1c2",
           "ConeDomain", "PolarPoint"]
__version__ = "0.1.0"
