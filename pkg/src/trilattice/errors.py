"""Exception hierarchy shared by all trilattice modules."""

from dataclasses import dataclass


class TrilatticeError(Exception):
    """Base class for every error raised by this package."""


class ArgumentError(TrilatticeError, ValueError):
    """An argument is outside its admissible range."""


class InvalidPolygonError(TrilatticeError, ValueError):
    """A domain polygon is degenerate, self-intersecting or unreadable."""


class EmptyDomainError(TrilatticeError):
    """The domain is too small to contain a single lattice triangle."""


class NotCompatibleError(TrilatticeError):
    """A triangle carries a nonzero circulation, so no strain matrix exists."""

    def __init__(self, triangle, circulation):
        self.triangle = triangle
        self.circulation = circulation
        super().__init__(
            f"triangle {triangle} is not compatible: circulation "
            f"({circulation[0]:.3e}, {circulation[1]:.3e}) is nonzero"
        )


class SingularityError(TrilatticeError, ValueError):
    """A singular field was evaluated at its singularity."""


class SeparationViolation(TrilatticeError):
    """Dislocations are closer to each other or to the boundary than allowed.

    Attributes:
        pairs: offending (n1, n2, distance) triples
        boundary: offending (n, distance) pairs
    """

    def __init__(
        self,
        pairs: list[tuple[int, int, float]] | None = None,
        boundary: list[tuple[int, float]] | None = None,
        min_pair: float = 0.0,
        min_boundary: float = 0.0,
    ):
        self.pairs = pairs or []
        self.boundary = boundary or []
        parts = [
            f"dislocations {a} and {b} at distance {d:.6g} < {min_pair:.6g}"
            for a, b, d in self.pairs
        ]
        parts += [
            f"dislocation {n} at distance {d:.6g} from the boundary < {min_boundary:.6g}"
            for n, d in self.boundary
        ]
        super().__init__("; ".join(parts) or "separation violated")


class PreconditionViolation(TrilatticeError):
    """A geometric precondition of a construction does not hold."""


class BoundTooSmallError(TrilatticeError):
    """The candidate search bound cannot certify the optimum."""


class NumericalError(TrilatticeError):
    """A linear system or numerical procedure failed."""


@dataclass(frozen=True)
class ConfigIssue:
    """A single configuration problem."""
    field: str
    message: str
    line: int | None = None
    kind: str = "ValidationError"

    def __str__(self) -> str:
        where = f"line {self.line}, " if self.line is not None else ""
        return f"{where}{self.field}: {self.message} [{self.kind}]"


class ConfigError(TrilatticeError):
    """The run configuration is invalid; carries every issue found."""

    def __init__(self, issues: list[ConfigIssue]):
        self.issues = list(issues)
        lines = "\n".join(f"  - {issue}" for issue in self.issues)
        super().__init__(f"{len(self.issues)} configuration issue(s):\n{lines}")
