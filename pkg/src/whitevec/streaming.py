"""Incremental mean/covariance over a vector stream in O(d^2) space.

State holds (count, mean, scatter) where scatter is the *unscaled* sum of
centered outer products, so scatter/count reproduces the biased batch
covariance. Updates use the exact pairwise form

    scatter += outer(x - mean_old, x - mean_new)

(the multivariate Welford update) rather than the covariance-form
recurrence "cov_{n+1} = n/(n+1) cov_n + 1/(n+1) (x-mean)^T(x-mean)":
read literally with either the old or the new mean, that recurrence does
not reproduce the batch covariance exactly, while the pairwise form does
up to round-off. Storing the unscaled sum also makes merging two partial
states a plain Chan combination without catastrophic cancellation.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, EmptyInput, NonFinite


class MomentState:
    """Mergeable accumulator for streaming mean and covariance."""

    def __init__(self, dim: int | None = None):
        self.count = 0
        if dim is None:
            self.mean = None
            self.scatter = None
        else:
            self._allocate(dim)

    def _allocate(self, dim: int) -> None:
        if dim < 1:
            raise DimensionMismatch(f"dimension must be >= 1, got {dim}")
        self.mean = np.zeros(dim)
        self.scatter = np.zeros((dim, dim))

    @property
    def dim(self) -> int | None:
        return None if self.mean is None else self.mean.shape[0]

    def update(self, x: np.ndarray) -> None:
        """Fold one vector into the state (mutates in place)."""
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 1:
            raise DimensionMismatch(f"expected a vector, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise NonFinite("input vector contains NaN or Inf")
        if self.mean is None:
            self._allocate(x.shape[0])
        elif x.shape[0] != self.dim:
            raise DimensionMismatch(
                f"vector has dim {x.shape[0]}, state has dim {self.dim}"
            )
        self.count += 1
        delta_old = x - self.mean
        self.mean += delta_old / self.count
        delta_new = x - self.mean
        # Symmetrized so the stored scatter stays exactly symmetric.
        cross = np.outer(delta_old, delta_new)
        self.scatter += (cross + cross.T) / 2.0

    def copy(self) -> MomentState:
        out = MomentState()
        out.count = self.count
        if self.mean is not None:
            out.mean = self.mean.copy()
            out.scatter = self.scatter.copy()
        return out


def merge(a: MomentState, b: MomentState) -> MomentState:
    """Combine two partial states as if their streams were concatenated."""
    if a.count == 0:
        return b.copy()
    if b.count == 0:
        return a.copy()
    if a.dim != b.dim:
        raise DimensionMismatch(f"state dims differ: {a.dim} vs {b.dim}")
    out = MomentState(a.dim)
    out.count = a.count + b.count
    delta = b.mean - a.mean
    out.mean = a.mean + delta * (b.count / out.count)
    out.scatter = (
        a.scatter + b.scatter + np.outer(delta, delta) * (a.count * b.count / out.count)
    )
    return out


def finalize(state: MomentState) -> tuple[np.ndarray, np.ndarray]:
    """Return (mean, biased covariance). Requires at least one point."""
    if state.count == 0:
        raise EmptyInput("no points have been accumulated")
    return state.mean.copy(), state.scatter / state.count
