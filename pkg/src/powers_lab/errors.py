"""Exception types shared across the package."""


class PowersLabError(Exception):
    """Base class for all package errors."""


class ParseError(PowersLabError):
    """Malformed element string."""


class InvalidParams(PowersLabError):
    """Parameters outside 2 <= |m| <= n."""


class ParamsMismatch(PowersLabError):
    """Operands built over different (m, n)."""


class EllipticInput(PowersLabError):
    """A hyperbolic element was required."""


class BasePointShadow(PowersLabError):
    """shadow(v0) is undefined; pick a vertex other than the base point."""


class OrbitBudgetExceeded(PowersLabError):
    """An a-orbit enumeration exceeded its safety cap."""


class FIntersectsK(PowersLabError):
    """A member of F lies in the compact open subgroup K = Stab(v0)."""


class BudgetExceeded(PowersLabError):
    """A bounded search (separating depth / power boost) hit its cap."""


class InvalidN(PowersLabError):
    """The number of averaging elements must be a positive integer."""


class ConditionStarFailed(PowersLabError):
    """type_label requires a passing condition-(*) report."""


class EmptyInterior(PowersLabError):
    """The truncation radius is too small to contain any fully interior orbit."""
