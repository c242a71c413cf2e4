"""Spectral sequences of exact couples of dg operad algebras, computed exactly."""
from . import convergence, couple, graded, linalg, operads, spectral
from .convergence import colimit, gamma_map
from .couple import AlgebraTower, build_tower, check_tower
from .spectral import SpectralSequence, cross_check, detect_stabilization, e_infinity, page_via_cycles, page_via_derivation

__all__ = ["AlgebraTower", "SpectralSequence", "build_tower", "check_tower", "colimit", "convergence", "couple",
           "cross_check", "detect_stabilization", "e_infinity", "gamma_map", "graded", "linalg", "operads",
           "page_via_cycles", "page_via_derivation", "spectral"]
