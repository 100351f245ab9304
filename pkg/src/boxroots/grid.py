"""Box domain discretization and multi-index arithmetic for node tensors.

The search box [a_1,b_1] x ... x [a_n,b_n] is discretized per axis into
N_k equally spaced nodes with spacing (b_k - a_k)/(N_k - 1).  Each node
coordinate is computed as a_k + i_k * spacing_k (never by cumulative
addition) so the error per node stays bounded by one rounding step; the
top node may differ from b_k by one ulp.

Cells with lower vertex p = (i_1..i_n), 0 <= i_k <= N_k - 2, tile the box;
there are prod(N_k - 1) of them and the detection stage probes each cell's
vertex set {p, p + e_1, ..., p + e_n}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "AxisSpec",
    "DomainGrid",
    "ValueTensor",
    "linear_to_multi",
    "multi_to_linear",
]


@dataclass(frozen=True)
class AxisSpec:
    """One axis of the box: bounds [lower, upper] and node count."""

    lower: float
    upper: float
    points: int

    def __post_init__(self):
        if not (np.isfinite(self.lower) and np.isfinite(self.upper)):
            raise ValueError(f"axis bounds must be finite, got [{self.lower}, {self.upper}]")
        if not self.lower < self.upper:
            raise ValueError(f"axis requires lower < upper, got [{self.lower}, {self.upper}]")
        if not isinstance(self.points, int) or isinstance(self.points, bool):
            raise ValueError(f"axis point count must be an integer, got {self.points!r}")
        if self.points < 3:
            raise ValueError(f"axis needs at least 3 points, got {self.points}")
        if not np.isfinite(self.spacing) or self.spacing <= 0.0:
            raise ValueError(f"axis spacing is degenerate for [{self.lower}, {self.upper}] with {self.points} points")

    @property
    def spacing(self) -> float:
        return (self.upper - self.lower) / (self.points - 1)

    def nodes(self) -> np.ndarray:
        """All node coordinates, lower + i * spacing."""
        return self.lower + np.arange(self.points, dtype=np.float64) * self.spacing


@dataclass(frozen=True)
class DomainGrid:
    """Ordered axes plus row-major strides for the full node tensor."""

    axes: tuple[AxisSpec, ...]
    strides: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        if not self.axes:
            raise ValueError("grid needs at least one axis")
        object.__setattr__(self, "axes", tuple(self.axes))
        strides = _row_major_strides(self.dims)
        object.__setattr__(self, "strides", strides)

    @classmethod
    def uniform(cls, lower: float, upper: float, points: int, ndim: int) -> DomainGrid:
        """Same [lower, upper] and point count on every axis."""
        return cls(tuple(AxisSpec(lower, upper, points) for _ in range(ndim)))

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(ax.points for ax in self.axes)

    @property
    def cell_dims(self) -> tuple[int, ...]:
        """Cell-grid shape: the final node per axis has no cell."""
        return tuple(ax.points - 1 for ax in self.axes)

    @property
    def node_count(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64))

    @property
    def cell_count(self) -> int:
        return int(np.prod(self.cell_dims, dtype=np.int64))

    def node_coordinates(self, idx) -> np.ndarray:
        """Coordinates of the node at a multi-index, a_k + i_k * spacing_k."""
        idx = tuple(int(i) for i in idx)
        if len(idx) != self.ndim:
            raise IndexError(f"index has {len(idx)} components, grid has {self.ndim} axes")
        out = np.empty(self.ndim, dtype=np.float64)
        for k, (i, ax) in enumerate(zip(idx, self.axes)):
            if not 0 <= i < ax.points:
                raise IndexError(f"index {i} out of range [0, {ax.points}) on axis {k}")
            out[k] = ax.lower + i * ax.spacing
        return out

    def axis_nodes(self) -> list[np.ndarray]:
        return [ax.nodes() for ax in self.axes]


def _row_major_strides(dims: tuple[int, ...]) -> tuple[int, ...]:
    strides = [1] * len(dims)
    for k in range(len(dims) - 2, -1, -1):
        strides[k] = strides[k + 1] * dims[k + 1]
    return tuple(strides)


def multi_to_linear(idx, dims) -> int:
    """Row-major linear index of a multi-index."""
    if len(idx) != len(dims):
        raise IndexError(f"index rank {len(idx)} != dims rank {len(dims)}")
    lin = 0
    for i, d in zip(idx, dims):
        i, d = int(i), int(d)
        if not 0 <= i < d:
            raise IndexError(f"index {i} out of range [0, {d})")
        lin = lin * d + i
    return lin


def linear_to_multi(lin: int, dims) -> tuple[int, ...]:
    """Inverse of multi_to_linear."""
    lin = int(lin)
    total = 1
    for d in dims:
        total *= int(d)
    if not 0 <= lin < total:
        raise IndexError(f"linear index {lin} out of range [0, {total})")
    out = [0] * len(dims)
    for k in range(len(dims) - 1, -1, -1):
        d = int(dims[k])
        out[k] = lin % d
        lin //= d
    return tuple(out)


@dataclass(frozen=True)
class ValueTensor:
    """One function's values over the full node grid, row-major."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", arr)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def data(self) -> np.ndarray:
        """Linearized row-major view."""
        return self.values.reshape(-1)

    def at(self, idx) -> float:
        """Bounds-checked element access by multi-index."""
        idx = tuple(int(i) for i in idx)
        if len(idx) != self.values.ndim:
            raise IndexError(f"index rank {len(idx)} != tensor rank {self.values.ndim}")
        for k, (i, d) in enumerate(zip(idx, self.values.shape)):
            if not 0 <= i < d:
                raise IndexError(f"index {i} out of range [0, {d}) on axis {k}")
        return float(self.values[idx])
