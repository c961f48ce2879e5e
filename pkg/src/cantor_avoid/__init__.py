"""Exact-rational Cantor avoidance: interval sets, symmetric Cantor sets,
the random null-set construction and its face-enumeration certificate."""

from .intervals import Interval, IntervalSet, Rational, as_rational, format_rational
from .cantor import (
    RECIPROCAL_EXAMPLE,
    TERNARY,
    CantorSpec,
    SpecError,
    d,
    delta,
    ell,
    endpoints,
    generation,
    newhouse_thickness,
    theorem12_diagnostic,
    theorem13_diagnostic,
    theorem15_diagnostic,
)
from .arrangement import CutLine, FaceSample, ParamRect, cut_lines, face_samples
from .verifier import (
    Verdict,
    bad_probability,
    brute_force_check,
    property_a_at,
    verify_all,
    worst_case_K,
)
from .construction import (
    ConstructionFailure,
    ConstructionParams,
    ConstructionTrace,
    PhiSchedule,
    QSchedule,
    next_subdivision,
    phi,
    recertify_trace,
    run,
)

__version__ = "0.1.0"
