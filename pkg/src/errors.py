"""Exception types shared across the library.

Every error derives from ValueError so callers can handle the whole
family with a single ``except ValueError`` clause.
"""
from typing import Any, Optional


class GraphStructureError(ValueError):
    """A graph, fat structure or coloring is malformed."""


class ArityError(ValueError):
    """Inputs and outputs of a composition or evaluation do not match."""


class ShapeError(ValueError):
    """Matrices or maps passed to a verification have incompatible shapes."""


class UsageError(ValueError):
    """A name, file or identifier given on the command line cannot be used."""


class AssemblyError(ValueError):
    """A complex or cosimplicial set failed a structural identity.

    Attributes:
        witness: The basis key (or level element) where the failure shows up
        column: The nonzero composite, as a mapping key -> coefficient
    """

    def __init__(self, message: str, witness: Any = None,
                 column: Optional[dict] = None):
        super().__init__(message)
        self.witness = witness
        self.column = column or {}


class AlgebraAxiomError(ValueError):
    """A Frobenius algebra specification violates an axiom.

    Attributes:
        axiom: Name of the failing axiom
        witness: Basis indices where it fails
    """

    def __init__(self, axiom: str, witness: tuple = ()):
        super().__init__(f"Frobenius axiom '{axiom}' fails at {witness}")
        self.axiom = axiom
        self.witness = witness
