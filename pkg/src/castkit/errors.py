"""Exception types shared across the package."""


class CastkitError(Exception):
    pass


class ContractViolation(CastkitError):
    """A caller broke an operation's precondition."""


class Unsupported(CastkitError):
    """The discipline does not provide this interface member."""


class GradualTypeError(CastkitError):
    def __init__(self, message, path=()):
        self.path = tuple(path)
        where = "/".join(self.path)
        super().__init__(f"{message} at {where}" if where else message)
        self.message = message


class InvariantViolation(CastkitError):
    """A runtime assertion of a metatheorem failed; signals a bug."""


class ParseError(CastkitError):
    pass
