"""Problem parameters (N, s, t) and the exponents derived from them.

The triple gates every computation: N is the ambient dimension, s the
fractional order of the operator, and t the strength of the singular
weight |x|^{-t}.
"""

from dataclasses import dataclass

from .errors import InvalidArgumentError


@dataclass(frozen=True)
class Params:
    """Dimension N, fractional order s in (0,1), weight exponent t in (0,2s)."""

    N: int
    s: float
    t: float

    def __post_init__(self):
        if not (isinstance(self.N, int) and self.N >= 1):
            raise InvalidArgumentError(f"N must be a positive integer, got {self.N!r}")
        if not (0.0 < self.s < 1.0):
            raise InvalidArgumentError(f"s must lie in (0, 1), got {self.s!r}")
        # t = 0 is accepted as a validation mode: without the singular
        # weight, the extremal profile has a closed form against which the
        # solver can be checked.
        if not (0.0 <= self.t < 2.0 * self.s):
            raise InvalidArgumentError(
                f"t must lie in (0, 2s) = (0, {2 * self.s}), got {self.t!r}"
            )
        if not (self.N > 2.0 * self.s):
            raise InvalidArgumentError(
                f"need N > 2s for a finite critical exponent, got N={self.N}, s={self.s}"
            )

    @property
    def crit(self) -> float:
        """Critical exponent 2(N - t)/(N - 2s)."""
        return 2.0 * (self.N - self.t) / (self.N - 2.0 * self.s)

    @property
    def p(self) -> float:
        """Nonlinearity power p = crit - 1."""
        return self.crit - 1.0

    @property
    def q(self) -> float:
        """Conjugate exponent q = 2 crit/(crit - 2), so 2/q = 1 - 2/crit."""
        return 2.0 * self.crit / (self.crit - 2.0)

    @property
    def low_dim(self) -> bool:
        """True in the low-dimensional regime N < 6s - 2t, equivalently p > 2."""
        return self.N < 6.0 * self.s - 2.0 * self.t
