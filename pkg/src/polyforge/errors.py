"""Exception hierarchy shared by the engines and the CLI."""


class PolyforgeError(Exception):
    """Base class for every error raised by polyforge."""


class DegreeMismatchError(PolyforgeError, ValueError):
    def __init__(self, left, right):
        super().__init__(f"degree mismatch: {left} != {right}")
        self.left = left
        self.right = right


class ResourceLimitError(PolyforgeError):
    """A configured cap (elements, cosets, chain storage) was exceeded."""

    def __init__(self, message, cap=None, **diagnostics):
        super().__init__(message)
        self.cap = cap
        self.diagnostics = diagnostics


class CapExceededError(ResourceLimitError):
    pass


class CosetLimitError(ResourceLimitError):
    pass


class MembershipError(PolyforgeError, ValueError):
    pass


class NotNormalError(PolyforgeError, ValueError):
    pass


class PresentationSyntaxError(PolyforgeError, ValueError):
    def __init__(self, message, text="", position=0):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.text = text
        self.position = position


class UnknownGeneratorError(PresentationSyntaxError):
    pass


class IncompleteTableError(PolyforgeError, ValueError):
    pass


class ConstraintViolation(PolyforgeError, ValueError):
    """Family parameters violate a hypothesis; ``hypothesis`` names it."""

    def __init__(self, family, hypothesis, params=None):
        super().__init__(f"{family}: parameters {params} violate {hypothesis}")
        self.family = family
        self.hypothesis = hypothesis
        self.params = params


class SggiError(PolyforgeError, ValueError):
    """Generators are not involutions or break the string property."""


class PreconditionError(PolyforgeError, ValueError):
    pass


class NotAHomomorphismError(PolyforgeError, ValueError):
    pass


class UnsupportedFamilyError(PolyforgeError, ValueError):
    pass
