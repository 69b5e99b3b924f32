"""Exception types shared across gammaforge."""


class GammaForgeError(Exception):
    """Base class for all library errors."""


class FieldMismatch(GammaForgeError):
    pass


class EvenRootOverReal(GammaForgeError):
    pass


class UnsupportedField(GammaForgeError):
    pass


class SingularInput(GammaForgeError):
    pass


class ZeroArgument(GammaForgeError):
    pass


class PoleError(GammaForgeError):
    pass


class UnsupportedCase(GammaForgeError):
    pass


class NotConstant(GammaForgeError):
    pass


class BadTower(GammaForgeError):
    pass


class WindowTooSmall(GammaForgeError):
    pass


class TypeMismatch(GammaForgeError):
    pass


class EvenModulusOverReal(GammaForgeError):
    pass


class DegenerateHessian(GammaForgeError):
    pass


class DegreeMismatch(GammaForgeError):
    pass


class SingularHessian(GammaForgeError):
    pass


class UnknownName(GammaForgeError):
    pass


class AssumptionViolated(GammaForgeError):
    pass


class NonMonomialFactor(GammaForgeError):
    pass


class ToleranceNotMet(GammaForgeError):
    pass


class LevelTooCoarse(GammaForgeError):
    pass


class PrecisionTooLow(GammaForgeError):
    pass
