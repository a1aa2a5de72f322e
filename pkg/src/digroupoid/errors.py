"""Exception types shared across the package."""


class DigroupoidError(Exception):
    """Base class for every error raised by this package."""


class GraphError(DigroupoidError, ValueError):
    pass


class LoopEdge(GraphError):
    def __init__(self, u):
        super().__init__(f"loop edge at vertex {u}")
        self.u = u


class DegreeMismatch(GraphError):
    def __init__(self, vertex, indeg, outdeg, expected=None):
        msg = f"vertex {vertex}: in-degree {indeg}, out-degree {outdeg}"
        if expected is not None:
            msg += f" (expected {expected})"
        super().__init__(msg)
        self.vertex = vertex
        self.indeg = indeg
        self.outdeg = outdeg
        self.expected = expected


class NotStronglyConnected(GraphError):
    def __init__(self, source, target):
        super().__init__(f"no directed path from {source} to {target}")
        self.witness = (source, target)


class ParseError(DigroupoidError, ValueError):
    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


class SearchBudgetExceeded(DigroupoidError):
    """A bounded search ran out of nodes before finishing.

    ``partial`` holds whatever results were collected before the cut-off.
    """

    def __init__(self, message="search budget exceeded", partial=None, stats=None):
        super().__init__(message)
        self.partial = partial if partial is not None else []
        self.stats = stats or {}


class InvariantViolation(DigroupoidError, AssertionError):
    """An internal guarantee failed; always a defect, never bad input."""


class NotGenerated(DigroupoidError, ValueError):
    def __init__(self, element):
        super().__init__(f"element {element} is not reachable from e by generator products")
        self.element = element


class ClosureBudgetExceeded(DigroupoidError):
    pass


class ConditionViolated(DigroupoidError, ValueError):
    def __init__(self, condition, witness=None, message=""):
        text = f"coset condition ({condition}) violated"
        if message:
            text += f": {message}"
        super().__init__(text)
        self.condition = condition
        self.witness = witness


class NotIrreducible(DigroupoidError, ValueError):
    pass


class RepresentativeCollision(DigroupoidError, ValueError):
    """Two distinct cosets sent to the same head by one connection element."""

    def __init__(self, u, v, head, label=None):
        super().__init__(f"vertices {u} and {v} both map to {head}")
        self.u = u
        self.v = v
        self.head = head
        self.label = label


class FixedPointProduced(DigroupoidError, ValueError):
    def __init__(self, vertex):
        super().__init__(f"difference-set factor fixes vertex {vertex}")
        self.vertex = vertex


class NonPrimeModulus(DigroupoidError, ValueError):
    def __init__(self, p):
        super().__init__(f"{p} is not prime")
        self.p = p
