"""Exception types shared across the package."""


class ParseError(ValueError):
    """Malformed FCIDUMP input; carries a 1-based line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NumericalError(RuntimeError):
    """A numerical routine failed (non-finite cost, non-convergence, stagnation).

    The CLI maps this to exit code 3.  `payload` may carry the last iterate
    or residual for diagnosis.
    """

    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload
