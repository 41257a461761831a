"""Oscillation seminorms and Muckenhoupt-type weight constants.

All suprema over cube families return the witness cube achieving the
maximum (first in enumeration order on ties) so that frozen regression
values stay reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .grid import (
    ContainmentError,
    GridCube,
    GridError,
    GridFunction,
    WEIGHT_FLOOR,
    enumerate_cubes,
    is_power_of_two,
    padded_cumsum,
)
from .operators import (
    DYADIC,
    RESTRICTED,
    ZERO_EXTENSION,
    _check_mode,
    _dyadic_block_means,
    _dyadic_max_means,
    _expand_blocks,
    _restricted_max_means,
    _window_sums,
    _zero_extension_max_means,
    maximal,
)

_CHUNK_ELEMS = 1 << 22

FAMILIES = ("all", "dyadic")


@dataclass(frozen=True)
class SeminormReport:
    value: float
    witness: GridCube
    family: str

    def to_json(self, mode: str | None = None) -> dict:
        out = {
            "value": self.value,
            "witness": self.witness.to_json(),
            "family": self.family,
        }
        if mode is not None:
            out["mode"] = mode
        return out


@dataclass(frozen=True)
class WeightConstants:
    a1: float
    a_infty: float
    mode: str
    family: str
    witness: GridCube

    def to_json(self) -> dict:
        return {
            "a1": self.a1,
            "a_infty": self.a_infty,
            "mode": self.mode,
            "family": self.family,
            "witness": self.witness.to_json(),
        }


# ---------------------------------------------------------------------------
# Single-cube functionals (used to re-evaluate witnesses and by tests).
# ---------------------------------------------------------------------------

def mean_oscillation(f: GridFunction, cube: GridCube) -> float:
    seg = f.values[cube.slices]
    return float(np.abs(seg - seg.mean()).mean())


def lower_oscillation(f: GridFunction, cube: GridCube) -> float:
    seg = f.values[cube.slices]
    return float(seg.mean() - seg.min())


def weighted_lower_oscillation(f: GridFunction, w: GridFunction, cube: GridCube) -> float:
    seg = f.values[cube.slices]
    wseg = w.values[cube.slices]
    return float((seg * wseg).sum() / wseg.sum() - seg.min())


# ---------------------------------------------------------------------------
# Family scans.
# ---------------------------------------------------------------------------

def _window_mins(vals: np.ndarray, side: int) -> np.ndarray:
    if vals.ndim == 1:
        return sliding_window_view(vals, side).min(axis=1)
    windows = sliding_window_view(vals, (side, side))
    m0, m1 = windows.shape[0], windows.shape[1]
    out = np.empty((m0, m1))
    rows = max(1, _CHUNK_ELEMS // max(1, m1 * side * side))
    for r0 in range(0, m0, rows):
        out[r0 : r0 + rows] = windows[r0 : r0 + rows].min(axis=(2, 3))
    return out


def _window_oscillations_for(vals: np.ndarray, cum: np.ndarray, side: int) -> np.ndarray:
    means = _window_sums(cum, side) / side ** vals.ndim
    if vals.ndim == 1:
        return np.abs(sliding_window_view(vals, side) - means[:, None]).mean(axis=1)
    windows = sliding_window_view(vals, (side, side))
    out = np.empty(means.shape)
    rows = max(1, _CHUNK_ELEMS // max(1, means.shape[1] * side * side))
    for r0 in range(0, means.shape[0], rows):
        out[r0 : r0 + rows] = np.abs(
            windows[r0 : r0 + rows] - means[r0 : r0 + rows][..., None, None]
        ).mean(axis=(2, 3))
    return out


def _scan(per_side, resolution: int, dim: int, family: str) -> SeminormReport:
    """Maximize a per-window functional over a cube family.

    ``per_side(side, step)`` returns the per-anchor value array for one side
    (step 1 for the full family, step=side for dyadic blocks).
    """
    if family not in FAMILIES:
        raise GridError(f"unknown cube family {family!r}")
    best = -np.inf
    witness = None
    if family == "all":
        sides = range(1, resolution + 1)
    else:
        sides = []
        s = 1
        while s <= resolution:
            sides.append(s)
            s *= 2
    for side in sides:
        step = side if family == "dyadic" else 1
        arr = per_side(side, step)
        flat = int(np.argmax(arr))
        val = float(arr.flat[flat])
        if val > best:
            best = val
            rel = np.unravel_index(flat, arr.shape) if dim == 2 else (flat,)
            witness = GridCube(tuple(int(r) * step for r in rel), side)
    return SeminormReport(value=best, witness=witness, family=family)


def bmo_seminorm(f: GridFunction, family: str = "all") -> SeminormReport:
    """Supremum over the family of the mean oscillation of f."""
    vals = f.values
    cum = padded_cumsum(vals)

    def per_side(side, step):
        if step == 1:
            return _window_oscillations_for(vals, cum, side)
        means = _dyadic_block_means(vals, side)
        return _dyadic_block_means(np.abs(vals - _expand_blocks(means, side)), side)

    return _scan(per_side, f.resolution, f.dim, family)


def blo_seminorm(f: GridFunction, family: str = "all") -> SeminormReport:
    """Supremum over the family of (mean - min) of f."""
    vals = f.values
    cum = padded_cumsum(vals)

    def per_side(side, step):
        if step == 1:
            means = _window_sums(cum, side) / side ** f.dim
            return means - _window_mins(vals, side)
        means = _dyadic_block_means(vals, side)
        return means - _dyadic_block_mins(vals, side)

    return _scan(per_side, f.resolution, f.dim, family)


def _dyadic_block_mins(vals: np.ndarray, side: int) -> np.ndarray:
    n = vals.shape[0]
    if vals.ndim == 1:
        return vals.reshape(n // side, side).min(axis=1)
    return vals.reshape(n // side, side, n // side, side).min(axis=(1, 3))


def blo_w_seminorm(f: GridFunction, w: GridFunction, family: str = "all") -> SeminormReport:
    """Weighted lower-oscillation seminorm: averages against the weight w."""
    w = w.as_weight()
    vals = f.values
    wvals = w.values
    cum_fw = padded_cumsum(vals * wvals)
    cum_w = padded_cumsum(wvals)

    def per_side(side, step):
        if step == 1:
            s_fw = _window_sums(cum_fw, side)
            s_w = _window_sums(cum_w, side)
            return s_fw / s_w - _window_mins(vals, side)
        n = vals.shape[0]
        if vals.ndim == 1:
            s_fw = (vals * wvals).reshape(n // side, side).sum(axis=1)
            s_w = wvals.reshape(n // side, side).sum(axis=1)
        else:
            s_fw = (vals * wvals).reshape(n // side, side, n // side, side).sum(axis=(1, 3))
            s_w = wvals.reshape(n // side, side, n // side, side).sum(axis=(1, 3))
        return s_fw / s_w - _dyadic_block_mins(vals, side)

    return _scan(per_side, f.resolution, f.dim, family)


# ---------------------------------------------------------------------------
# Weight constants.
# ---------------------------------------------------------------------------

def a1_constant(w: GridFunction, mode: str = RESTRICTED) -> float:
    """Largest cell ratio Mw / w."""
    w = w.as_weight()
    mw = maximal(w, mode)
    return float(np.max(mw.values / w.values))


def local_reference_field(w: GridFunction, cube: GridCube, mode: str = RESTRICTED) -> np.ndarray:
    """Values of M(w.chi_Q) on the cells of Q.

    Cubes with side above Q's own have averages dominated by Q itself
    (the mass is supported on Q), so the supremum may be taken over sides
    up to side(Q); this makes the evaluation local and exact.
    """
    _check_mode(mode)
    if not cube.within(w.resolution):
        raise GridError(f"{cube} exceeds resolution {w.resolution}")
    n = w.resolution
    side = cube.side
    if mode == DYADIC:
        u = np.zeros_like(w.values)
        u[cube.slices] = w.values[cube.slices]
        return _dyadic_max_means(u)[cube.slices]
    if mode == ZERO_EXTENSION:
        u = np.zeros_like(w.values)
        u[cube.slices] = w.values[cube.slices]
        return _zero_extension_max_means(u, side_cap=side)[cube.slices]
    lo = tuple(max(0, a - (side - 1)) for a in cube.anchor)
    hi = tuple(min(n, a + 2 * side - 1) for a in cube.anchor)
    window = tuple(slice(l, h) for l, h in zip(lo, hi))
    u = np.zeros(tuple(h - l for l, h in zip(lo, hi)))
    rel = tuple(slice(a - l, a - l + side) for a, l in zip(cube.anchor, lo))
    u[rel] = w.values[cube.slices]
    return _restricted_max_means(u, side_cap=side)[rel]


def fujii_wilson(
    w: GridFunction,
    mode: str = RESTRICTED,
    family: str | None = None,
) -> WeightConstants:
    """Fujii-Wilson constant sup_Q (1/w(Q)) int_Q M(w.chi_Q), plus the
    cell-ratio constant of the same weight.

    The all-cubes family costs one local maximal field per candidate cube,
    so the default switches to dyadic above resolution 128.
    """
    w = w.as_weight()
    if family is None:
        family = "dyadic" if w.resolution > 128 else "all"
    if family not in FAMILIES:
        raise GridError(f"unknown cube family {family!r}")
    best = -np.inf
    witness = None
    for cube in enumerate_cubes(w.resolution, w.dim, family):
        field = local_reference_field(w, cube, mode)
        val = float(field.sum() / w.values[cube.slices].sum())
        if val > best:
            best = val
            witness = cube
    return WeightConstants(
        a1=a1_constant(w, mode),
        a_infty=best,
        mode=mode,
        family=family,
        witness=witness,
    )


def coifman_rochberg(w: GridFunction, cube: GridCube, mode: str = RESTRICTED) -> GridFunction:
    """Square root of the maximal function of w.chi_Q normalized by w_Q.

    A standard construction of a weight with bounded cell-ratio constant;
    it is >= 1 on Q in restricted mode.
    """
    w = w.as_weight()
    wq = float(w.values[cube.slices].mean())
    u = np.zeros_like(w.values)
    u[cube.slices] = w.values[cube.slices] / wq
    field = maximal(w.with_values(u), mode)
    return w.with_values(np.sqrt(field.values))


def log_plus_transform(f: GridFunction) -> GridFunction:
    """Cellwise max(0, log f); defined for positive-valued functions."""
    if np.any(f.values <= 0):
        raise GridError("log-plus transform needs positive cell values")
    return f.with_values(np.maximum(0.0, np.log(f.values)))


def exp_weight(f: GridFunction, alpha: float = 1.0) -> GridFunction:
    """Weight e^{alpha f}, floored per the grid-module weight policy."""
    return f.with_values(np.exp(alpha * f.values)).as_weight(floor=True)


def reverse_holder_check(
    w: GridFunction,
    cube: GridCube,
    subset: np.ndarray,
    a_infty: float | None = None,
    mode: str = RESTRICTED,
    family: str | None = None,
) -> dict:
    """Set-measure inequality w(E)/w(Q) <= 2 (|E|/|Q|)^(1/(2^{d+1} [w])).

    ``subset`` is a boolean cell mask that must be contained in the cube.
    """
    w = w.as_weight()
    subset = np.asarray(subset, dtype=bool)
    if subset.shape != w.values.shape:
        raise ContainmentError("subset mask must cover the full grid")
    outside = subset.copy()
    outside[cube.slices] = False
    if outside.any():
        raise ContainmentError("subset is not contained in the cube")
    if a_infty is None:
        a_infty = fujii_wilson(w, mode, family).a_infty
    wq = float(w.values[cube.slices].sum())
    lhs = float(w.values[subset].sum()) / wq
    frac = float(subset.sum()) / cube.cell_count
    exponent = 1.0 / (2 ** (w.dim + 1) * a_infty)
    rhs = 0.0 if frac == 0.0 else 2.0 * frac ** exponent
    return {"lhs": lhs, "rhs": rhs, "ok": lhs <= rhs + 1e-12, "a_infty": a_infty}


def llogl_ratio(w: GridFunction, cube: GridCube, mode: str = RESTRICTED) -> dict:
    """Stein-type equivalence: compare the cube mean of M(w.chi_Q) with the
    cube mean of (1 + log+(w / w_Q)) w."""
    w = w.as_weight()
    field = local_reference_field(w, cube, mode)
    lhs = float(field.mean())
    seg = w.values[cube.slices]
    wq = float(seg.mean())
    rhs = float(((1.0 + np.maximum(0.0, np.log(seg / wq))) * seg).mean())
    return {"lhs": lhs, "rhs": rhs, "ratio": lhs / rhs}
