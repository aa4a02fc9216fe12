"""Exponentially weighted time calculus on a uniform grid.

This module is the discrete stand-in for the space of square-integrable
signals weighted by exp(-2*rho*t) on a finite horizon [0, T].  Signals carry
an implicit zero history for t < 0, so the backward-difference operator
``d0`` has a built-in zero condition at t = 0 and is exactly causal.  Its
inverse ``d0_inverse`` is the causal cumulative sum; the two compose to the
identity at machine precision.  Inner products with a shift index k apply
``d0`` (k = 1) or ``d0_inverse`` (k < 0) before the weighted quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "WeightedTimeGrid",
    "TimeSignal",
    "weighted_inner",
    "weighted_norm",
    "d0",
    "d0_inverse",
    "truncate",
]

SUPPORTED_SHIFTS = (-2, -1, 0, 1)


@dataclass(frozen=True)
class WeightedTimeGrid:
    """Uniform grid t_n = n*dt, n = 0..steps, with exponential weight rho.

    The constraint dt <= 1/rho keeps the backward-difference operator
    accretive in the weighted inner product and keeps every certified
    per-step matrix invertible, so it is enforced at construction.
    """

    horizon: float
    steps: int
    rho: float

    def __post_init__(self):
        if self.horizon <= 0.0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.rho <= 0.0:
            raise ValueError(f"rho must be positive, got {self.rho}")
        if self.dt > 1.0 / self.rho + 1e-15:
            raise ValueError(
                f"dt = {self.dt:g} exceeds 1/rho = {1.0 / self.rho:g}; "
                "refine the grid or lower rho"
            )

    @property
    def dt(self) -> float:
        return self.horizon / self.steps

    @property
    def num_nodes(self) -> int:
        return self.steps + 1

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.num_nodes)

    @property
    def weights(self) -> np.ndarray:
        """Quadrature weights exp(-2*rho*t_n) of the left-endpoint rule."""
        return np.exp(-2.0 * self.rho * self.times)


@dataclass(frozen=True)
class TimeSignal:
    """A state-vector-valued signal sampled at the grid nodes.

    ``values`` has shape (num_nodes, d); the value at t < 0 is implicitly
    zero.  Signals are immutable; all operations return new instances.
    """

    grid: WeightedTimeGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.shape[0] != self.grid.num_nodes:
            raise ValueError(
                f"signal has {values.shape[0]} samples, grid has "
                f"{self.grid.num_nodes} nodes"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("signal contains non-finite values")
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @classmethod
    def zeros(cls, grid: WeightedTimeGrid, dim: int) -> "TimeSignal":
        return cls(grid, np.zeros((grid.num_nodes, dim)))

    @classmethod
    def from_profile(cls, grid, profile, vector) -> "TimeSignal":
        """Separable signal s(t_n) * vector for a scalar callable s."""
        scale = np.asarray([profile(t) for t in grid.times], dtype=float)
        return cls(grid, np.outer(scale, np.asarray(vector, dtype=float)))

    def __add__(self, other: "TimeSignal") -> "TimeSignal":
        _check_compatible(self, other)
        return TimeSignal(self.grid, self.values + other.values)

    def __sub__(self, other: "TimeSignal") -> "TimeSignal":
        _check_compatible(self, other)
        return TimeSignal(self.grid, self.values - other.values)

    def __rmul__(self, scalar: float) -> "TimeSignal":
        return TimeSignal(self.grid, float(scalar) * self.values)


def _check_compatible(f: TimeSignal, g: TimeSignal) -> None:
    if f.grid != g.grid:
        raise ValueError("signals live on different grids")
    if f.dim != g.dim:
        raise ValueError(f"dimension mismatch: {f.dim} vs {g.dim}")


def d0(f: TimeSignal) -> TimeSignal:
    """Backward difference (u_n - u_{n-1}) / dt with zero history.

    Causal: the output at node n depends on f_0..f_n only.
    """
    shifted = np.vstack([np.zeros((1, f.dim)), f.values[:-1]])
    return TimeSignal(f.grid, (f.values - shifted) / f.grid.dt)


def d0_inverse(f: TimeSignal) -> TimeSignal:
    """Causal cumulative sum u_n = dt * sum_{k<=n} f_k.

    Exact two-sided inverse of :func:`d0` on grid signals.
    """
    return TimeSignal(f.grid, f.grid.dt * np.cumsum(f.values, axis=0))


def truncate(f: TimeSignal, a: float) -> TimeSignal:
    """Zero out all samples at nodes t_n > a.  Idempotent."""
    mask = (f.grid.times <= a).astype(float)
    return TimeSignal(f.grid, f.values * mask[:, None])


def _apply_shift(f: TimeSignal, k: int) -> TimeSignal:
    if k not in SUPPORTED_SHIFTS:
        raise ValueError(f"unsupported shift index k = {k}; supported: {SUPPORTED_SHIFTS}")
    out = f
    if k == 1:
        out = d0(out)
    else:
        for _ in range(-k):
            out = d0_inverse(out)
    return out


def weighted_inner(f: TimeSignal, g: TimeSignal, k: int = 0) -> float:
    """Weighted inner product dt * sum <(d0^k f)_n | (d0^k g)_n> e^{-2 rho t_n}.

    Negative k applies ``d0_inverse`` |k| times; k = 1 applies ``d0`` once.
    Symmetric and bilinear by construction.  Because the difference operator
    is invertible here, the negative-shift norms serve as the surrogate for
    dual-space norms of antiderivative order |k|.
    """
    _check_compatible(f, g)
    fk = _apply_shift(f, k)
    gk = _apply_shift(g, k)
    w = f.grid.weights
    return float(f.grid.dt * np.sum(w * np.einsum("nd,nd->n", fk.values, gk.values)))


def weighted_norm(f: TimeSignal, k: int = 0) -> float:
    return float(np.sqrt(max(weighted_inner(f, f, k), 0.0)))
