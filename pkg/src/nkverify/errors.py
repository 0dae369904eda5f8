"""Exception hierarchy."""


class NKVerifyError(Exception):
    """Base class for all toolkit errors."""


class DomainError(NKVerifyError, ValueError):
    """Chart coordinates outside the admissible region."""


class NormalizationError(NKVerifyError, ValueError):
    """A point expected on the unit sphere is not unit length."""


class NotOrthogonalError(NKVerifyError, ValueError):
    pass


class DegenerateFrameError(NKVerifyError, ArithmeticError):
    pass


class ZeroFormError(NKVerifyError, ArithmeticError):
    """The (3,0) part of d(omega) vanishes, contradicting strictness."""


class SingularOperatorError(NKVerifyError, ArithmeticError):
    pass


class ClusterError(NKVerifyError, ArithmeticError):
    """The operator 1 - K^2 admits no J-adapted eigenbasis."""


class RejectionExhaustedError(NKVerifyError, RuntimeError):
    pass


class DegreeMismatchError(NKVerifyError, ValueError):
    pass


class NotTopTypeError(NKVerifyError, ValueError):
    pass


class ConfigError(NKVerifyError, ValueError):
    pass
