"""Exception types shared across the toolkit."""


class ArxidError(Exception):
    """Base class for all toolkit errors."""


class ZeroPolynomial(ArxidError, ValueError):
    """Operation requested on the zero polynomial."""


class RootOnUnitCircle(ArxidError, ValueError):
    """A root lies inside the unit-circle tolerance band, so its
    stable/anti-stable classification is ambiguous."""

    def __init__(self, root, message=None):
        self.root = complex(root)
        super().__init__(message or f"root {self.root} is within tolerance of the unit circle")


class NotAntiStable(ArxidError, ValueError):
    """Polynomial expected to have only anti-stable roots does not."""


class AlgebraicLoop(ArxidError, ValueError):
    """Feedback interconnection has no delay-free solution (the closed-loop
    denominator has zero constant term before normalization)."""


class PoleOnGrid(ArxidError, ValueError):
    """A transfer-function denominator vanishes at a requested frequency."""


class UnstableClosedLoop(ArxidError, RuntimeError):
    """The regulator does not stabilize the loop."""

    def __init__(self, path_name, message=None):
        self.path_name = path_name
        super().__init__(message or f"closed-loop transfer function {path_name} is not stable")


class RankDeficient(ArxidError, RuntimeError):
    """Least-squares regressor matrix is numerically singular
    (insufficient excitation for the requested orders)."""


class InverselyUnstableH(ArxidError, ValueError):
    """Noise-model numerator has anti-stable roots; only the minimum-phase
    case is supported."""


class UnstableZ(ArxidError, ValueError):
    """Weight function must be stable and inversely stable."""


class UnstableExpansion(ArxidError, ValueError):
    """Power-series expansion requested for a transfer function whose
    denominator has roots on or outside the unit circle."""
