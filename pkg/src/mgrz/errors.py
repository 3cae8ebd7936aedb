"""Exception hierarchy.

Input problems (bad syntax, bad files, exhausted budgets) are ``InputError``;
the CLI maps them to exit code 2.  ``InvariantViolation`` means a computation
contradicted something that is guaranteed to hold and is a bug certificate
(exit code 3).
"""


class MgrzError(Exception):
    pass


class InputError(MgrzError):
    pass


class FormulaSyntaxError(InputError):
    def __init__(self, message: str, offset: int, expected: frozenset[str] = frozenset()):
        self.offset = offset
        self.expected = expected
        detail = f"{message} at offset {offset}"
        if expected:
            detail += f" (expected one of: {', '.join(sorted(expected))})"
        super().__init__(detail)


class SchemaError(InputError):
    """A JSON document does not match the expected schema; ``pointer`` locates it."""

    def __init__(self, pointer: str, message: str):
        self.pointer = pointer
        super().__init__(f"{pointer or '/'}: {message}")


class BudgetExceeded(InputError):
    pass


class NotMKFrame(InputError):
    pass


class FrameClassError(InputError):
    """The input frame is not in the class an operation requires."""


class InvalidBundle(InputError):
    pass


class NotRefuted(InputError):
    """The formula to refute holds everywhere in the given model."""


class AxiomFailure(InputError):
    """An algebra lacks an axiom an operation depends on; ``axiom`` names it."""

    def __init__(self, axiom: str, message: str):
        self.axiom = axiom
        super().__init__(message)


class InvariantViolation(MgrzError):
    pass


class BoundViolation(InvariantViolation):
    pass
