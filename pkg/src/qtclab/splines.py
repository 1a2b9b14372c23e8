"""Clamped B-spline basis for learnable activations.

The basis lives on a uniform grid over a closed interval with repeated
(end-clamped) boundary knots, so the `n_cells + degree` basis functions form
a partition of unity everywhere on the interval and each one is supported on
at most degree+1 consecutive knot spans. Inputs outside the interval are
clamped to its ends before evaluation; callers may count those events.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BSplineBasis:
    """Cox-de Boor evaluated B-spline basis on [lo, hi] with n_cells spans."""

    lo: float
    hi: float
    n_cells: int = 5
    degree: int = 3

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError("need hi > lo")
        if self.n_cells < 1 or self.degree < 1:
            raise ValueError("need n_cells >= 1 and degree >= 1")
        interior = np.linspace(self.lo, self.hi, self.n_cells + 1)
        knots = np.concatenate([
            np.full(self.degree, self.lo), interior, np.full(self.degree, self.hi)])
        object.__setattr__(self, "_knots", knots)

    @property
    def n_basis(self) -> int:
        return self.n_cells + self.degree

    @property
    def knots(self) -> np.ndarray:
        return self._knots

    def design_matrix(self, x) -> np.ndarray:
        """Evaluate all basis functions at (clamped) points x; shape (len(x), n_basis)."""
        x = np.clip(np.atleast_1d(np.asarray(x, dtype=float)), self.lo, self.hi)
        t = self.knots
        # degree-0 indicators on half-open spans, except the last span closes
        # at hi so the right endpoint is representable
        b = ((x[:, None] >= t[:-1]) & (x[:, None] < t[1:])).astype(float)
        last = self.degree + self.n_cells - 1  # index of the final nonempty span
        b[x >= self.hi, last] = 1.0
        for k in range(1, self.degree + 1):
            den_l = t[k:-1] - t[:-k - 1]
            den_r = t[k + 1:] - t[1:-k]
            # zero-width spans (repeated boundary knots) contribute nothing
            ratio_l = np.where(den_l > 0, (x[:, None] - t[:-k - 1])
                               / np.where(den_l > 0, den_l, 1.0), 0.0)
            ratio_r = np.where(den_r > 0, (t[k + 1:] - x[:, None])
                               / np.where(den_r > 0, den_r, 1.0), 0.0)
            b = ratio_l * b[:, :-1] + ratio_r * b[:, 1:]
        return b

    def evaluate(self, coefficients, x) -> np.ndarray:
        """Spline value sum_l c_l B_l(x) at (clamped) points x."""
        coefficients = np.asarray(coefficients, dtype=float)
        if coefficients.shape != (self.n_basis,):
            raise ValueError(
                f"expected {self.n_basis} coefficients, got {coefficients.shape}")
        return self.design_matrix(x) @ coefficients

    def clamp_count(self, x) -> int:
        """How many entries of x fall outside [lo, hi]."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return int(np.sum((x < self.lo) | (x > self.hi)))
