"""Exception types shared across the package."""


class BudgetExceeded(RuntimeError):
    """A search or enumeration would exceed a configured cap."""

    def __init__(self, what, cap):
        super().__init__(f"{what} exceeds budget (cap={cap})")
        self.what = what
        self.cap = cap


class GroupTooLarge(BudgetExceeded):
    def __init__(self, cap):
        super().__init__("group too large for element enumeration", cap)


class InvalidPartialIso(ValueError):
    """Raised for maps that are not partial isomorphisms.

    ``kind`` is ``"vertex-color"``, ``"edge-color"`` or ``"shape"``; ``pair``
    holds the offending vertex (or vertex pair) of the domain.
    """

    def __init__(self, kind, pair, message):
        super().__init__(message)
        self.kind = kind
        self.pair = pair


class ClassificationViolation(RuntimeError):
    """An ultrahomogeneous input that matches no classified form.

    This is an alarm, not a bug: it would falsify the classification.
    ``canonical`` holds the JSON of the offending graph.
    """

    def __init__(self, message, canonical=None):
        super().__init__(message)
        self.canonical = canonical
