"""Exception hierarchy.

Every failure raised by the library derives from :class:`PosGeomError`.
Errors that describe bad input data (as opposed to a failed verification)
derive from :class:`DomainError`; the CLI maps the two families to distinct
exit codes.
"""


class PosGeomError(Exception):
    """Base class for all library errors."""


class ParseError(PosGeomError, ValueError):
    """Malformed polynomial, form or JSON input."""


class DomainError(PosGeomError, ValueError):
    """Input is well formed but violates a mathematical precondition."""


# algebra
class ZeroPolynomial(DomainError):
    pass


class DimensionMismatch(DomainError):
    pass


# forms
class ConstantDivisor(DomainError):
    pass


class HigherOrderPole(DomainError):
    pass


class LinearFormConstant(DomainError):
    pass


class DegenerateParametrization(DomainError):
    pass


class ChartMismatch(DomainError):
    pass


# polytope
class Unbounded(DomainError):
    pass


class EmptyPolytope(DomainError):
    pass


class NotFullRank(DomainError):
    pass


class NotFullDimensional(DomainError):
    pass


class RedundantInequality(DomainError):
    pass


class OriginNotInterior(DomainError):
    pass


# canonical
class NotSimple(DomainError):
    pass


class ArrangementNotSimple(DomainError):
    pass


class KernelDimensionNot1(DomainError):
    def __init__(self, message, dimension=None):
        super().__init__(message)
        self.dimension = dimension


class DivisionByY0Fails(PosGeomError, ArithmeticError):
    """Raised when Adj_P(U y + z y0) is not divisible by y0; indicates a bug."""


# polypol
class VertexNotOnCurves(DomainError):
    pass


class VertexOnThirdCurve(DomainError):
    pass


class VertexSingular(DomainError):
    pass


class NotTransversal(DomainError):
    pass


class ParamInconsistent(DomainError):
    pass


class NotNodal(DomainError):
    pass


class IrrationalIntersection(DomainError):
    def __init__(self, message, unresolved=0):
        super().__init__(message)
        self.unresolved = unresolved


class AdjointContainsBoundary(DomainError):
    pass


class AdjointContainsVertex(DomainError):
    pass


class ChartDegenerate(DomainError):
    pass


class GammaMismatch(DomainError):
    pass


class ResidueNotLogSegmentForm(DomainError):
    pass


class VerificationFailed(PosGeomError):
    """A positive-geometry axiom failed on some boundary stratum.

    ``report`` carries the full per-stratum report; ``stratum`` names the first
    offending stratum.
    """

    def __init__(self, message, report=None, stratum=None):
        super().__init__(message)
        self.report = report
        self.stratum = stratum
