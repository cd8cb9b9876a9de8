"""Polynomial tables from a four-term contiguous relation, their zeros and zero loci."""

from .analysis import MU, OMEGA, DensityModel, ks_distance, legendre, nonreal_sweep
from .locus import BBox, CurvePolyline, LocusFunction, Membership, on_curve, phi, trace_curve
from .polycore import Poly
from .rootfind import RootConfig, RootSet, find_roots, polish_root
from .tablegen import (
    H_TRIPLE,
    WORKED_EXAMPLE,
    CoefficientTriple,
    NumeratorSpec,
    PolyTable,
    build_H_table,
    build_R_table,
    build_table,
    collapse_sequences,
)

__version__ = "0.1.0"

__all__ = [
    "MU", "OMEGA", "DensityModel", "ks_distance", "legendre", "nonreal_sweep",
    "BBox", "CurvePolyline", "LocusFunction", "Membership", "on_curve", "phi", "trace_curve",
    "Poly", "RootConfig", "RootSet", "find_roots", "polish_root",
    "H_TRIPLE", "WORKED_EXAMPLE", "CoefficientTriple", "NumeratorSpec", "PolyTable",
    "build_H_table", "build_R_table", "build_table", "collapse_sequences",
]
