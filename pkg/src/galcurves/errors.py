"""Exception hierarchy.

Input problems derive from ``ValueError`` and mathematical domain failures from
``ArithmeticError``; the CLI maps the two families to exit codes 2 and 3.
"""


class InputError(ValueError):
    """Malformed input: bad syntax, bad table, bad flag combination."""


class ExpressionSyntaxError(InputError):
    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownIdentifierError(ExpressionSyntaxError):
    pass


class ArityError(ExpressionSyntaxError):
    pass


class IngestError(InputError):
    pass


class GeometryDomainError(ArithmeticError):
    """A quantity is undefined at some parameter value."""


class JetDomainError(GeometryDomainError):
    """Raised by jet primitives; ``index`` locates the first bad batch entry."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.reason = message
        self.index = index


class ExpressionDomainError(GeometryDomainError):
    def __init__(self, reason, node, s0):
        super().__init__(f"{reason} in `{node}` at s={s0!r}")
        self.reason = reason
        self.node = node
        self.s0 = s0


class DegenerateFrameError(GeometryDomainError):
    def __init__(self, message, s=None):
        if s is not None:
            message = f"{message} at s={float(s)!r}"
        super().__init__(message)
        self.s = s


class VanishingCurvatureError(DegenerateFrameError):
    pass


class LightlikeAccelerationError(DegenerateFrameError):
    pass


class PhiDegenerateError(DegenerateFrameError):
    pass


class DegenerateVectorError(GeometryDomainError):
    pass
