from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerance:
    """Rank and residual thresholds.

    A quantity is treated as zero when it is at most
    ``max(abs, rel * scale)`` where ``scale`` is the size of the data
    it was computed from (largest singular value, largest entry, ...).
    """

    rel: float = 1e-9
    abs: float = 1e-12

    def __post_init__(self):
        if not (0.0 < self.abs <= self.rel < 1.0):
            raise ValueError(
                f"tolerance needs 0 < abs <= rel < 1, got rel={self.rel!r}, abs={self.abs!r}"
            )

    def threshold(self, scale: float = 1.0) -> float:
        return max(self.abs, self.rel * float(scale))


DEFAULT_TOL = Tolerance()


def as_tol(tol) -> Tolerance:
    return DEFAULT_TOL if tol is None else tol
