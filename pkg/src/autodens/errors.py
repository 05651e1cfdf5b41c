"""Exception hierarchy. Messages carry a short module prefix."""


class AutodensError(Exception):
    prefix = "autodens"

    def __str__(self):
        return f"{self.prefix}: {super().__str__()}"


class InputError(AutodensError):
    """Malformed input: bad files, bad flags, unparseable automata."""


class ParseError(InputError):
    prefix = "dfao"

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DomainError(AutodensError):
    """Well-formed input outside the supported mathematical scope."""


class DfaoError(DomainError):
    prefix = "dfao"


class StructureError(DomainError):
    prefix = "structure"


class DensityError(DomainError):
    prefix = "density"


class MullnerError(DomainError):
    prefix = "mullner"


class UnsupportedError(DomainError):
    prefix = "subseq"


class ExtremalError(DomainError):
    prefix = "extremal"


class VerifyError(DomainError):
    prefix = "verify"
