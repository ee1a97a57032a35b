class PtwError(Exception):
    """Base class for all workbench errors."""


class ParseError(PtwError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class ScopeError(PtwError):
    pass


class StateSpaceTooLarge(PtwError):
    pass


class SpaceMismatch(PtwError):
    pass


class CertificateError(PtwError):
    pass
