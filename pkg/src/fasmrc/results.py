"""Common result container shared by all outage estimators."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

#: Recognised estimator tags: Monte Carlo, Gauss-Chebyshev series,
#: closed-form lower bound, high-SNR asymptotic.
METHOD_TAGS = ("mc", "gc", "lb", "asy")


@dataclass
class OutageEstimate:
    """An outage probability with its uncertainty and provenance.

    value             estimated probability in [0, 1]
    ci_low, ci_high   95% interval; for the deterministic methods both
                      coincide with value
    method            one of METHOD_TAGS
    samples_or_nodes  MC sample count / quadrature node count / term count
    diagnostics       method-specific extras (truncation tails, cancellation
                      ratios, log10 of underflowed values, ...)
    """

    value: float
    ci_low: float
    ci_high: float
    method: str
    samples_or_nodes: int
    diagnostics: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHOD_TAGS:
            raise ValueError(f"unknown method tag {self.method!r}")
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"outage value {self.value} outside [0, 1]")
        if not (0.0 <= self.ci_low <= self.value <= self.ci_high <= 1.0):
            raise ValueError(
                f"confidence interval [{self.ci_low}, {self.ci_high}] does "
                f"not bracket value {self.value}")

    @property
    def half_width(self) -> float:
        """Half of the 95% interval (0 for deterministic methods)."""
        return 0.5 * (self.ci_high - self.ci_low)
