"""Construct and verify BCL triples ``(E, U, P)`` with a prescribed defect ``P-perp - U P-perp U*``."""

from .bclbuild import BCLTriple, ImpossibilityWitness, construct
from .hardy import realize
from .matcore import DEFAULT_TOL, Tolerances
from .spectrum import DefectSpectrum, SpectrumRule, canonical_matrix, classify, feasibility
from .verify import commutant_dim, defect_residual

__all__ = [
    "BCLTriple",
    "ImpossibilityWitness",
    "construct",
    "realize",
    "DEFAULT_TOL",
    "Tolerances",
    "DefectSpectrum",
    "SpectrumRule",
    "canonical_matrix",
    "classify",
    "feasibility",
    "commutant_dim",
    "defect_residual",
]
