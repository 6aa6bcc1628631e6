"""
Exception hierarchy for poisson-deform
Every error carries a stable code and the CLI exit code it maps to
"""
from typing import Any, Dict, Optional


class PoissonDeformError(Exception):
    """Base class for all library errors"""

    code = "internal_error"
    exit_code = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}


class PolySyntaxError(PoissonDeformError):
    """Polynomial text does not follow the grammar"""
    code = "poly_syntax"
    exit_code = 10

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}", {"position": position})
        self.position = position


class ArityMismatch(PoissonDeformError):
    code = "arity_mismatch"
    exit_code = 11


class ExponentOverflow(PoissonDeformError):
    code = "exponent_overflow"
    exit_code = 12


class InvalidWeights(PoissonDeformError):
    code = "invalid_weights"
    exit_code = 13


class NotHomogeneous(PoissonDeformError):
    code = "not_homogeneous"
    exit_code = 14


class SchoutenDegreeError(PoissonDeformError):
    """Result degree of a Schouten bracket falls outside 0..3"""
    code = "schouten_degree"
    exit_code = 15


class NotIsolatedSingularity(PoissonDeformError):
    code = "not_isolated_singularity"
    exit_code = 20


class SmoothAtOrigin(PoissonDeformError):
    """Jacobian ideal is the unit ideal (Milnor number zero)"""
    code = "smooth_at_origin"
    exit_code = 21


class InfiniteQuotient(PoissonDeformError):
    code = "infinite_quotient"
    exit_code = 22


class NotSquareFree(PoissonDeformError):
    code = "not_square_free"
    exit_code = 23


class NotACocycle(PoissonDeformError):
    code = "not_a_cocycle"
    exit_code = 30


class NotInSpan(PoissonDeformError):
    """Cocycle class needs basis elements beyond the current phi-power window"""
    code = "not_in_span"
    exit_code = 31


class NotADeformation(PoissonDeformError):
    code = "not_a_deformation"
    exit_code = 32


class IndexOutOfRange(PoissonDeformError):
    code = "index_out_of_range"
    exit_code = 33


class WrongWeightClass(PoissonDeformError):
    code = "wrong_weight_class"
    exit_code = 34


class H1Obstruction(PoissonDeformError):
    code = "h1_obstruction"
    exit_code = 35


class DegreeCapExceeded(PoissonDeformError):
    code = "degree_cap_exceeded"
    exit_code = 36


class SurfaceNormalizeUnsupported(PoissonDeformError):
    code = "surface_normalize_unsupported"
    exit_code = 37


class InconsistentBracket(PoissonDeformError):
    """Two independent evaluations of the same bracket disagree; always a bug"""
    code = "inconsistent_bracket"
    exit_code = 38


class SpecValidationError(PoissonDeformError):
    code = "spec_validation"
    exit_code = 40


class SpecIOError(PoissonDeformError):
    code = "spec_io"
    exit_code = 41


class ConfigError(PoissonDeformError):
    """An environment variable holds a value the settings cannot use"""
    code = "config_error"
    exit_code = 42

    def __init__(self, variable: str, value: str):
        super().__init__(f"{variable} must be an integer, got {value!r}", {"variable": variable, "value": value})
        self.variable = variable
