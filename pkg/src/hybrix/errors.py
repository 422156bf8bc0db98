"""Exception hierarchy shared by every hybrix module."""


class HybrixError(Exception):
    """Base class for all errors raised by hybrix."""


class FormulaSyntaxError(HybrixError):
    """Malformed formula text.  ``position`` is a 0-based character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class LanguageError(HybrixError):
    """A connective is used outside the language that admits it."""


class UnboundSymbol(HybrixError):
    def __init__(self, name: str):
        super().__init__(f"unbound symbol {name!r}")
        self.name = name


class AlgebraMismatch(HybrixError):
    """An element does not belong to the algebra it is used with."""


class KindError(HybrixError):
    """Operation not defined for this kind of hybrid structure."""


class NotDesignated(HybrixError):
    """The first argument of @ is not a designated atom."""


class NotAtom(HybrixError):
    pass


class StructureError(HybrixError):
    """A structure violates its defining invariants."""


class FrameError(StructureError):
    pass


class NotClosed(FrameError):
    """Admissible sets are not closed under the Boolean operations and <R>."""


class BudgetExceeded(HybrixError):
    """An exhaustive enumeration would exceed the configured budget."""


class BoxDViolation(HybrixError):
    """Relativization requested for an element D with D not below box D."""


class SchemaUnchecked(HybrixError):
    """The base neither satisfies the Nom schema nor the @ axioms."""


class InternalInvariantBreach(HybrixError):
    """A property guaranteed by construction failed; indicates a bug or a bad input."""


class NotRefuted(HybrixError):
    pass


class NoConstantAvailable(HybrixError):
    pass
