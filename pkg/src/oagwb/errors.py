"""Exception hierarchy shared by every module of the workbench."""


class OAGError(Exception):
    """Base class for all workbench errors."""


class InvalidSpec(OAGError):
    pass


class GroupMismatch(OAGError):
    pass


class NotDivisible(OAGError):
    pass


class ConstraintViolation(OAGError):
    pass


class ParseError(OAGError):
    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class UnknownConvex(OAGError):
    pass


class OracleBoundExceeded(OAGError):
    pass


class NotNested(OAGError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotElementaryAbelian(OAGError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class StreamExhausted(OAGError):
    pass


class AmbientTooLarge(OAGError):
    pass


class InadmissibleTarget(OAGError):
    pass


class CapExceeded(OAGError):
    pass


class MultiplicityExceeded(OAGError):
    pass


class WrongFamily(OAGError):
    pass


class UnknownLemma(OAGError):
    pass


class IncompatibleFamily(OAGError):
    pass
