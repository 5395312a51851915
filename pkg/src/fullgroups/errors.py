"""Exception hierarchy shared by all modules.

CLI exit codes: ParseError maps to 2, every other ToolkitError to 1.
"""


class ToolkitError(Exception):
    """Base class for domain errors raised by this package."""

    code = "domain-error"


class GraphError(ToolkitError):
    """Invalid graph structure (duplicate ids, dangling references, ...)."""

    code = "bad-graph"


class PathError(ToolkitError):
    """Non-composable path, bad edge reference, or bad boundary point."""

    code = "bad-path"


class AtomError(ToolkitError):
    """Cylinder atom violates its invariants (empty atom, F off-vertex, ...)."""

    code = "bad-atom"


class TableError(ToolkitError):
    """Prefix-exchange table violates the bisection invariants."""

    code = "bad-table"


class GermError(ToolkitError):
    """Germ calculus requested over a graph that is not effective."""

    code = "not-effective"


class AdmissibilityError(ToolkitError):
    """Graph fails the embedding hypotheses (sink, semi-tail, or no exit)."""

    code = "not-admissible"


class UnsupportedConditionError(ToolkitError):
    """Condition is undecidable in the given graph presentation."""

    code = "unsupported-condition"


class ArrowError(ToolkitError):
    """Groupoid arrow is inconsistent or not supported by a constructor."""

    code = "bad-arrow"


class ParseError(ToolkitError):
    """Input file or literal does not parse."""

    code = "parse-error"
