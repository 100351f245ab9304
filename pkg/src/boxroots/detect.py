"""Sign-change detection over the grid: find cells that may contain roots.

For each function f_i the full node tensor is evaluated once; because the
perturbation step along each axis equals the grid spacing, the perturbed
value f_i(x + spacing_k * e_k) is simply the neighboring node's value, so
no displaced copies of the grid are materialized.

Two detection modes are supported:

* ``STRICT_PAPER`` flags a cell when the product of the lower-vertex value
  with its n axis-neighbor values is negative. A product of n+1 factors
  misses cells where an even number of factors flip sign (for
  f(x,y) = 0.1 - x - y at the origin cell the two flipped neighbors cancel).
* ``PAIRWISE`` (default) flags a cell when any single vertex/axis-neighbor
  pair changes sign, which detects exactly the cells the product rule is
  meant to reveal without the parity artifact.

In both modes an exact zero at a probed vertex flags the cell (a node that
*is* a root must not be dropped).  Non-finite values never flag: strict
mode skips the whole cell, pairwise mode skips only the pairs touched.

A cell is a candidate when it is flagged for all n functions; its lower
vertex is the initial guess handed to Newton refinement.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .grid import DomainGrid, ValueTensor

__all__ = [
    "CandidateSet",
    "DetectionMode",
    "SignChangeMask",
    "evaluate_grid",
    "intersect_masks",
    "sign_change_mask",
]


class DetectionMode(enum.Enum):
    STRICT_PAPER = "strict_paper"
    PAIRWISE = "pairwise"


@dataclass(frozen=True)
class SignChangeMask:
    """Boolean flag per cell for one function; shape = cell grid dims."""

    flags: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "flags", np.asarray(self.flags, dtype=bool))

    @property
    def dims(self) -> tuple[int, ...]:
        return self.flags.shape


@dataclass(frozen=True)
class CandidateSet:
    """Cells flagged by every function, with lower-vertex coordinates."""

    indices: np.ndarray      # (m, n) int, lexicographically ordered
    coordinates: np.ndarray  # (m, n) float

    def __len__(self) -> int:
        return self.indices.shape[0]

    @property
    def entries(self) -> list[tuple[tuple[int, ...], np.ndarray]]:
        return [
            (tuple(int(i) for i in self.indices[r]), self.coordinates[r])
            for r in range(len(self))
        ]


def evaluate_grid(problem, g: DomainGrid) -> list[ValueTensor]:
    """Evaluate each function of `problem` at every grid node.

    Returns one ValueTensor per function, shaped like the full node grid.
    Expressions are evaluated vectorized over open (broadcast) axis arrays,
    which keeps separable subexpressions cheap; non-finite values are
    stored as-is.
    """
    if len(problem.functions) != g.ndim:
        raise ValueError(
            f"problem has {len(problem.functions)} functions but grid has {g.ndim} axes"
        )
    dims = g.dims
    axis_arrays = []
    for k, nodes in enumerate(g.axis_nodes()):
        shape = [1] * g.ndim
        shape[k] = dims[k]
        axis_arrays.append(nodes.reshape(shape))
    tensors = []
    for f in problem.functions:
        values = f.evaluate_array(axis_arrays)
        values = np.ascontiguousarray(np.broadcast_to(values, dims))
        tensors.append(ValueTensor(values))
    return tensors


def _cell_views(arr: np.ndarray):
    """Lower-vertex view and the n axis-neighbor views, all cell-shaped."""
    dims = arr.shape
    base = arr[tuple(slice(0, d - 1) for d in dims)]
    neighbors = []
    for k in range(arr.ndim):
        idx = tuple(
            slice(1, dims[j]) if j == k else slice(0, dims[j] - 1)
            for j in range(arr.ndim)
        )
        neighbors.append(arr[idx])
    return base, neighbors


def sign_change_mask(t: ValueTensor, mode: DetectionMode = DetectionMode.PAIRWISE) -> SignChangeMask:
    """Flag the cells where one function changes sign (or hits an exact 0)."""
    arr = t.values
    if any(d < 2 for d in arr.shape):
        raise ValueError(f"tensor dims {arr.shape} leave no cells")
    base, neighbors = _cell_views(arr)

    with np.errstate(all="ignore"):
        any_zero = base == 0.0
        for nbr in neighbors:
            any_zero |= nbr == 0.0

        if mode is DetectionMode.STRICT_PAPER:
            finite = np.isfinite(base)
            product = base.copy()
            for nbr in neighbors:
                finite &= np.isfinite(nbr)
                product *= nbr
            flags = finite & ((product < 0.0) | any_zero)
        elif mode is DetectionMode.PAIRWISE:
            base_finite = np.isfinite(base)
            flags = np.zeros(base.shape, dtype=bool)
            for nbr in neighbors:
                flags |= base_finite & np.isfinite(nbr) & (base * nbr < 0.0)
            flags |= any_zero
        else:
            raise ValueError(f"unknown detection mode {mode!r}")

    return SignChangeMask(flags)


def intersect_masks(masks: list[SignChangeMask], g: DomainGrid) -> CandidateSet:
    """Cells flagged by all n masks, in deterministic lexicographic order."""
    if not masks:
        raise ValueError("need at least one mask")
    dims = masks[0].dims
    for m in masks[1:]:
        if m.dims != dims:
            raise ValueError(f"mask dims disagree: {m.dims} vs {dims}")
    if dims != g.cell_dims:
        raise ValueError(f"mask dims {dims} do not match grid cell dims {g.cell_dims}")

    combined = masks[0].flags.copy()
    for m in masks[1:]:
        combined &= m.flags

    indices = np.argwhere(combined)  # C-order scan -> lexicographic
    spacings = np.array([ax.spacing for ax in g.axes])
    lowers = np.array([ax.lower for ax in g.axes])
    coordinates = lowers + indices * spacings
    return CandidateSet(indices=indices, coordinates=coordinates)
