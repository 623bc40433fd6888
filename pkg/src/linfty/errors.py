"""Exception taxonomy shared across the package.

InputError subclasses signal malformed documents or arguments and map to
CLI exit code 2; everything else is a computational precondition failure
surfaced by the library (checkers report failures as data, not errors).
"""


class LinftyError(Exception):
    pass


class InputError(LinftyError):
    pass


class SchemaError(InputError):
    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


class NonCanonicalWord(InputError):
    pass


class DegreeRuleViolation(InputError):
    pass


class UnknownVariable(InputError):
    pass


class UnknownCommand(InputError):
    pass


class PolynomialEntries(LinftyError):
    pass


class NotAComplex(LinftyError):
    pass


class NotSurjective(LinftyError):
    def __init__(self, degree, deficit):
        super().__init__(f"not surjective in degree {degree} (rank deficit {deficit})")
        self.degree = degree
        self.deficit = deficit


class NotInjective(LinftyError):
    def __init__(self, degree):
        super().__init__(f"not injective in degree {degree}")
        self.degree = degree


class SpaceMismatch(LinftyError):
    pass


class NotClassical(LinftyError):
    pass


class NotInvertible(LinftyError):
    pass


class NoConvergence(LinftyError):
    pass


class ContractionViolation(LinftyError):
    pass


class HypothesisFailed(LinftyError):
    pass


class NotSurjectiveOnKernel(LinftyError):
    pass


class NonConstantKernel(LinftyError):
    pass


class RegularityFails(LinftyError):
    def __init__(self, point):
        super().__init__(f"regularity fails at point {point}")
        self.point = point


class NotVanishingOnY(LinftyError):
    pass


class ChartBase(LinftyError):
    pass


class NotAMorphism(LinftyError):
    pass


class MissingEtaTilde(LinftyError):
    pass


class NotEulerForm(LinftyError):
    pass
