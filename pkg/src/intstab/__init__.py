"""Interval-based proofs of stability for discrete-time nonlinear systems."""

from .centred import CentredProblem, CentredTrace, centre, centred_eval, iterate_centred
from .expr import VectorFunc, compose, parse
from .interval import Box, Interval, IntervalMatrix
from .paving import PavingResult, export_paving, pave
from .stability import (
    Disturbance,
    StabilityReport,
    Verdict,
    bisect_and_prove,
    check_invariance,
    check_stability,
    exponential_certificate,
    extract_rate,
)

__all__ = [
    "Box",
    "CentredProblem",
    "CentredTrace",
    "Disturbance",
    "Interval",
    "IntervalMatrix",
    "PavingResult",
    "StabilityReport",
    "VectorFunc",
    "Verdict",
    "bisect_and_prove",
    "centre",
    "centred_eval",
    "check_invariance",
    "check_stability",
    "compose",
    "export_paving",
    "exponential_certificate",
    "extract_rate",
    "iterate_centred",
    "pave",
    "parse",
]
