"""Shared exception types.

Most validation failures are ValueErrors so callers can catch broadly;
the distinct classes exist because the CLI report needs to tell a
malformed input apart from a blown resource budget or a sequencing bug.
"""


class MemberError(ValueError):
    """A string was expected to belong to a tree and does not."""


class ConsistencyError(ValueError):
    """Two axioms of one table disagree on comparable oracles."""

    def __init__(self, message, first=None, second=None):
        super().__init__(message)
        self.first = first
        self.second = second


class ShapeError(ValueError):
    """Structural precondition violated (levels, branching, domains)."""


class BudgetError(RuntimeError):
    """A combinatorial enumeration would exceed the allowed budget."""


class ProtocolError(RuntimeError):
    """A stage-construction module was driven out of sequence."""


class ScenarioError(ValueError):
    """Scenario text failed to parse; carries a line number."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line
