# """Error hierarchy shared by the library and the command line."""
from typing import Optional


class DefektError(Exception):
    """Base class for every error the library raises on purpose.

    ``code`` is the stable machine-readable tag written into error reports.
    """

    code = "defekt_error"

    def __init__(self, message: str = "", detail: Optional[dict] = None):
        super().__init__(message or self.code)
        self.message = message or self.code
        self.detail = detail or {}


# Fields
class NonPrimeModulus(DefektError):
    code = "non_prime_modulus"


class FieldSpecError(DefektError):
    code = "field_spec_error"


class InfiniteField(DefektError):
    code = "infinite_field"


class EvenCharacteristic(DefektError):
    code = "even_characteristic"


class CharacteristicTwo(DefektError):
    code = "characteristic_two"


class RequiresCharacteristicZero(DefektError):
    code = "requires_characteristic_zero"


# Polynomials
class PolySyntaxError(DefektError):
    code = "syntax_error"


class UnknownVariable(DefektError):
    code = "unknown_variable"


class CoefficientNotInField(DefektError):
    code = "coefficient_not_in_field"


class IndexOutOfRange(DefektError):
    code = "index_out_of_range"


class NotHomogeneous(DefektError):
    code = "not_homogeneous"


class DimensionMismatch(DefektError):
    code = "dimension_mismatch"


class RationalsNotSamplable(DefektError):
    code = "rationals_not_samplable"


class InvalidParameter(DefektError):
    code = "invalid_parameter"


# Groebner engine
class BudgetExceeded(DefektError):
    code = "budget_exceeded"


class RingMismatch(DefektError):
    code = "ring_mismatch"


class NotZeroDimensional(DefektError):
    code = "not_zero_dimensional"


# Singularities
class PositiveDimensionalLocus(DefektError):
    code = "positive_dimensional_locus"


class NoChartFound(DefektError):
    code = "no_chart_found"


class PointNotOnHypersurface(DefektError):
    code = "point_not_on_hypersurface"


class SmoothPoint(DefektError):
    code = "smooth_point"


class NonIsolatedSingularity(DefektError):
    code = "non_isolated_singularity"


class UnresolvedPoints(DefektError):
    code = "unresolved_points"


# Defect
class BaseNotSmooth(DefektError):
    code = "base_not_smooth"


class NotNodal(DefektError):
    code = "not_nodal"


class OddAmbientDimension(DefektError):
    code = "odd_ambient_dimension"


class WrongAmbientDimension(DefektError):
    code = "wrong_ambient_dimension"


class UnclassifiedSingularity(DefektError):
    code = "unclassified_singularity"


# Command line
class UsageError(DefektError):
    code = "usage_error"
