"""Deterministic generators of test functions and weights.

Each generator is a pure function of its parameters and seed.  The
half-space example carries the closed-form whole-space maximal field so
that verifications needing genuine unbounded-domain semantics do not
depend on any boundary proxy.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridError, GridFunction, is_power_of_two
from .operators import RESTRICTED, maximal


@dataclass(frozen=True)
class AnalyticExample:
    """A grid function paired with its closed-form maximal field."""

    func: GridFunction
    analytic_maximal: GridFunction
    tag: str
    manifest: dict


def _cell_centers(n: int) -> np.ndarray:
    return (np.arange(n) + 0.5) / n


def _center_distance(n: int, dim: int, center: tuple[float, ...]) -> np.ndarray:
    c = _cell_centers(n)
    if dim == 1:
        return np.abs(c - center[0])
    dx = c[:, None] - center[0]
    dy = c[None, :] - center[1]
    return np.hypot(dx, dy)


def half_space_example(
    n: int,
    dim: int = 1,
    axis: int = 0,
    boundary_cell: int | None = None,
) -> AnalyticExample:
    """f = 2 on the half-space below a cell-aligned hyperplane, 0 above.

    The whole-space maximal function is 2 on the half-space and exactly 1 on
    its complement, supplied in closed form.
    """
    if boundary_cell is None:
        boundary_cell = n // 2
    if not 1 <= boundary_cell <= n - 1:
        raise GridError(f"boundary cell must lie strictly inside, got {boundary_cell}")
    if not 0 <= axis < dim:
        raise GridError(f"axis {axis} out of range for dim {dim}")
    idx = np.arange(n) < boundary_cell
    if dim == 1:
        mask = idx
    elif axis == 0:
        mask = np.broadcast_to(idx[:, None], (n, n))
    else:
        mask = np.broadcast_to(idx[None, :], (n, n))
    f = GridFunction(dim, n, np.where(mask, 2.0, 0.0))
    mf = GridFunction(dim, n, np.where(mask, 2.0, 1.0))
    manifest = {
        "generator": "half-space",
        "n": n,
        "dim": dim,
        "axis": axis,
        "boundary_cell": boundary_cell,
    }
    return AnalyticExample(func=f, analytic_maximal=mf, tag="half_space", manifest=manifest)


def log_abs_demo(n: int, dim: int = 1, center: float | tuple[float, float] = 0.5) -> GridFunction:
    """log of the distance to an interior point, clamped at the cell scale.

    Demonstration input only: its maximal function grows without bound as
    the zero-extension side cap is raised, which a finite grid can show but
    never fully verify.
    """
    center = (center,) * dim if np.isscalar(center) else tuple(center)
    if any(not 0.0 < c < 1.0 for c in center):
        raise GridError(f"center must be strictly inside the domain, got {center}")
    dist = np.maximum(_center_distance(n, dim, center), 0.5 / n)
    return GridFunction(dim, n, np.log(dist))


def power_weight(
    n: int,
    dim: int = 1,
    exponent: float = 1.0,
    center: float | tuple[float, float] = 0.5,
) -> GridFunction:
    """|x - center|^a evaluated at cell centers, floored as a weight."""
    if exponent <= -dim:
        raise GridError(f"exponent must exceed {-dim} for local integrability")
    center = (center,) * dim if np.isscalar(center) else tuple(center)
    dist = np.maximum(_center_distance(n, dim, center), 0.5 / n)
    return GridFunction(dim, n, dist ** exponent).as_weight(floor=True)


def two_valued_weight(n: int, dim: int = 1, ratio: float = 8.0, axis: int = 0) -> GridFunction:
    """1 on the lower half of the axis, ``ratio`` on the upper half."""
    if ratio <= 0:
        raise GridError(f"ratio must be positive, got {ratio}")
    idx = np.arange(n) < n // 2
    if dim == 1:
        vals = np.where(idx, 1.0, ratio)
    elif axis == 0:
        vals = np.where(idx[:, None], 1.0, ratio) * np.ones((n, n))
    else:
        vals = np.where(idx[None, :], 1.0, ratio) * np.ones((n, n))
    return GridFunction(dim, n, vals).as_weight(floor=True)


def random_dyadic_bmo(
    n: int,
    dim: int = 1,
    depth: int = 4,
    amplitude: float = 1.0,
    seed: int = 0,
) -> GridFunction:
    """Sum of +-amplitude signs on nested dyadic blocks; oscillation grows
    with depth while staying uniformly bounded in mean oscillation."""
    if not is_power_of_two(n):
        raise GridError(f"resolution must be a power of two, got {n}")
    if depth > int(np.log2(n)):
        raise GridError(f"depth {depth} exceeds log2({n})")
    rng = np.random.default_rng(seed)
    vals = np.zeros((n,) * dim)
    for level in range(1, depth + 1):
        blocks = 2 ** level
        side = n // blocks
        signs = rng.choice([-1.0, 1.0], size=(blocks,) * dim)
        expanded = np.repeat(signs, side, axis=0)
        if dim == 2:
            expanded = np.repeat(expanded, side, axis=1)
        vals += amplitude * expanded
    return GridFunction(dim, n, vals)


def spike(n: int, dim: int = 1, cell: tuple[int, ...] | None = None) -> GridFunction:
    """Unit-mass indicator of a single cell."""
    if cell is None:
        cell = (n // 2,) * dim
    vals = np.zeros((n,) * dim)
    vals[tuple(cell)] = float(n ** dim)
    return GridFunction(dim, n, vals)


def a1_family(n: int, dim: int = 1, delta: float = 0.5, seed: int = 0) -> GridFunction:
    """Power of the maximal function of a random spike: a weight with a
    finite cell-ratio constant for every 0 < delta < 1."""
    if not 0.0 < delta < 1.0:
        raise GridError(f"delta must lie in (0, 1), got {delta}")
    rng = np.random.default_rng(seed)
    cell = tuple(int(c) for c in rng.integers(0, n, size=dim))
    base = maximal(spike(n, dim, cell), RESTRICTED).values
    return GridFunction(dim, n, base ** delta).as_weight(floor=True)
