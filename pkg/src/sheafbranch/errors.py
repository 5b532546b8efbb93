"""Exception hierarchy shared by all modules.

The CLI maps each family to its own exit status, so new errors should
subclass ``ParseError`` or ``ValidationError`` rather than the root.
"""


class SheafBranchError(Exception):
    """Root of every error raised by this package."""


class ParseError(SheafBranchError):
    """Malformed input file: bad header, bad token, wrong pixel count."""


class ValidationError(SheafBranchError):
    """Well-formed input that violates a structural precondition."""


class NestednessViolation(ValidationError):
    def __init__(self, level: int, missing):
        self.level = level
        self.missing = missing
        super().__init__(
            f"level {level} is not contained in level {level + 1}: pixel {missing} disappears"
        )


class InclusionViolation(ValidationError):
    def __init__(self, cell):
        self.cell = cell
        super().__init__(f"cell {cell} of the source complex is missing from the target")


class NotInSpan(SheafBranchError):
    """A vector expected to lie in a span does not. Indicates a bug, not bad input."""


class FunctorialityViolation(ValidationError):
    def __init__(self, p, q, r):
        self.witness = (p, q, r)
        super().__init__(f"restriction maps do not compose along {p} <= {q} <= {r}")


class NotUpClosed(ValidationError):
    def __init__(self, p, q):
        self.witness = (p, q)
        super().__init__(f"open set contains {p} but not {q} although {p} <= {q}")


class PatchMismatch(ValidationError):
    """Patch pixels are not black pixels of the image it is evaluated against."""


class HypothesisViolation(ValidationError):
    """The closures of the two patch pieces intersect."""
