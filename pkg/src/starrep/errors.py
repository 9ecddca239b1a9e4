"""Exception hierarchy.

Every error carries a module-qualified ``code`` (``"scalars.NonInvertible"``)
so the CLI can report failures uniformly.
"""


class StarRepError(Exception):
    module = "starrep"

    @property
    def code(self):
        return f"{self.module}.{type(self).__name__}"


# scalars
class ScalarError(StarRepError):
    module = "scalars"


class OrderMismatch(ScalarError):
    pass


class NonInvertible(ScalarError):
    pass


class NonRealSeries(ScalarError):
    pass


class NoExactRoot(ScalarError):
    pass


class NotPositive(ScalarError):
    pass


class NotDivisible(ScalarError):
    pass


# staralg
class AlgebraError(StarRepError):
    module = "staralg"


class DegreeOverflow(AlgebraError):
    pass


class NonInvertibleClassicalPart(AlgebraError):
    pass


class NonNilpotentInput(AlgebraError):
    pass


class DomainRestriction(AlgebraError):
    pass


class NotStarCompatible(AlgebraError):
    pass


class AlgebraMismatch(AlgebraError):
    pass


# positivity
class PositivityError(StarRepError):
    module = "positivity"


class UncertifiedFunctional(PositivityError):
    pass


class NonPositiveCoefficient(PositivityError):
    pass


# prehilbert
class PreHilbertError(StarRepError):
    module = "prehilbert"


class NotAdjointable(PreHilbertError):
    pass


class SingularSystem(PreHilbertError):
    pass


# gns
class GNSError(StarRepError):
    module = "gns"


class DegenerateGrading(GNSError):
    pass


# morita
class MoritaError(StarRepError):
    module = "morita"


class ClassicalMismatch(MoritaError):
    pass


class NotClassicalProjection(MoritaError):
    pass


class PositivityFailure(MoritaError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class SolveFailure(MoritaError):
    pass


# cover
class CoverError(StarRepError):
    module = "cover"


class DegenerateFrame(CoverError):
    pass


class ClassicalNotOrthonormal(CoverError):
    pass


class CocycleViolation(CoverError):
    pass


class NonUnitaryTransitions(CoverError):
    pass


class PartitionRepairFailure(CoverError):
    pass


class NotCentral(CoverError):
    def __init__(self, message, triple=None):
        super().__init__(message)
        self.triple = triple


class NotConstant(CoverError):
    def __init__(self, message, triple=None):
        super().__init__(message)
        self.triple = triple


class NotIntegral(CoverError):
    def __init__(self, message, triple=None):
        super().__init__(message)
        self.triple = triple


class NerveMismatch(CoverError):
    pass


# cli
class CLIError(StarRepError):
    module = "cli"


class ParseError(CLIError):
    pass


class UnknownCommand(CLIError):
    pass
