"""Exception types; the CLI maps each family to an exit code."""


class InputError(ValueError):
    """Malformed or inconsistent input document or argument."""


class PreconditionError(RuntimeError):
    """A mathematical precondition of an operation does not hold."""


class EllipticityError(PreconditionError):
    def __init__(self, message, witness=None, min_singular_value=None):
        super().__init__(message)
        self.witness = None if witness is None else [float(v) for v in witness]
        self.min_singular_value = min_singular_value


class NumericalError(RuntimeError):
    """A numerical self-check failed (residual above its bound)."""
