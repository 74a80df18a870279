"""Exception types shared across the package."""


class DegenerateInput(ValueError):
    """Geometric input that does not define the requested object
    (coincident points, zero or reflex sector angle, ...)."""


class InvalidRect(ValueError):
    """Rectangle with inverted bounds, or outside the domain a
    predicate requires (e.g. theta outside [0, pi] in polar space)."""


class InvalidConfig(ValueError):
    """Structural configuration error (e.g. branching factor < 2)."""


class EmptyTree(ValueError):
    """Operation that needs at least one entry was called on an empty tree."""


class ParseError(ValueError):
    """Malformed row in a sector file. Carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class RangeError(ValueError):
    """Numeric field outside its legal range (NaN, infinity, bad angle)."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no
