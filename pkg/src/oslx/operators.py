"""Maximal-operator kernels with brute-force oracle twins.

Three boundary proxies for the whole-space operator are offered and every
computed field is tagged with the mode used:

* ``restricted``  -- supremum over cubes contained in the domain,
* ``zero``        -- the function is extended by zero and cubes may stick
                     out, with sides capped at three domain widths,
* ``dyadic``      -- supremum over the standard dyadic cubes.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .grid import (
    GridCube,
    GridError,
    GridFunction,
    PrefixTable,
    UnsupportedCubeError,
    is_power_of_two,
    padded_cumsum,
    triple,
)

RESTRICTED = "restricted"
ZERO_EXTENSION = "zero"
DYADIC = "dyadic"
MODES = (RESTRICTED, ZERO_EXTENSION, DYADIC)

HARDY_LITTLEWOOD = "hardy_littlewood"
SHARP = "sharp"

# Cap on cube sides in zero-extension mode, in domain widths.  Beyond this,
# averages of compactly supported data are dominated by cubes already seen.
ZERO_SIDE_FACTOR = 3

_CHUNK_ELEMS = 1 << 22


class DegenerateInputError(GridError):
    """Constant input where the operation needs oscillation."""


@dataclass(frozen=True)
class MaximalField:
    """A per-cell maximal-function field tagged with its boundary mode."""

    field: GridFunction
    mode: str
    kind: str

    @property
    def values(self) -> np.ndarray:
        return self.field.values


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise GridError(f"unknown boundary mode {mode!r}; expected one of {MODES}")


# ---------------------------------------------------------------------------
# Sliding maxima.  Monotone deque with ties kept (strict-< pops), so the
# result is independent of traversal direction.
# ---------------------------------------------------------------------------

def sliding_max_trailing(a: np.ndarray, window: int) -> np.ndarray:
    """out[i] = max(a[max(0, i-window+1) : i+1])."""
    n = len(a)
    out = np.empty(n)
    dq: deque[int] = deque()
    for i in range(n):
        v = a[i]
        while dq and a[dq[-1]] < v:
            dq.pop()
        dq.append(i)
        if dq[0] <= i - window:
            dq.popleft()
        out[i] = a[dq[0]]
    return out


def _per_cell_max(per_window: np.ndarray, side: int, shape: tuple[int, ...]) -> np.ndarray:
    """Max over windows containing each cell, from per-window values.

    ``per_window`` is indexed by window anchor; cell x is covered by anchors
    in [x-side+1, x] clipped to the valid anchor range, which is exactly a
    trailing sliding maximum after right-padding with -inf.
    """
    padded = np.full(shape, -np.inf)
    padded[tuple(slice(0, m) for m in per_window.shape)] = per_window
    if len(shape) == 1:
        return sliding_max_trailing(padded, side)
    tmp = np.empty(shape)
    for r in range(shape[0]):
        tmp[r] = sliding_max_trailing(padded[r], side)
    out = np.empty(shape)
    for c in range(shape[1]):
        out[:, c] = sliding_max_trailing(tmp[:, c], side)
    return out


def _window_sums(cum: np.ndarray, side: int) -> np.ndarray:
    """All box sums of a given side from a padded cumulative table."""
    if cum.ndim == 1:
        return cum[side:] - cum[:-side]
    return (
        cum[side:, side:]
        - cum[:-side, side:]
        - cum[side:, :-side]
        + cum[:-side, :-side]
    )


def _restricted_max_means(vals: np.ndarray, side_cap: int | None = None) -> np.ndarray:
    """Per-cell max of window means over cubes inside the array bounds."""
    dim = vals.ndim
    cap = min(vals.shape)
    if side_cap is not None:
        cap = min(cap, side_cap)
    cum = padded_cumsum(vals)
    out = np.full(vals.shape, -np.inf)
    for side in range(1, cap + 1):
        means = _window_sums(cum, side) / side ** dim
        np.maximum(out, _per_cell_max(means, side, vals.shape), out=out)
    return out


def _zero_extension_max_means(vals: np.ndarray, side_cap: int | None = None) -> np.ndarray:
    n = max(vals.shape)
    cap = ZERO_SIDE_FACTOR * n
    if side_cap is not None:
        cap = min(cap, side_cap)
    pad = cap - 1
    padded = np.pad(vals, pad)
    res = _restricted_max_means(padded, side_cap=cap)
    core = tuple(slice(pad, pad + m) for m in vals.shape)
    return res[core]


def _dyadic_block_means(vals: np.ndarray, side: int) -> np.ndarray:
    n = vals.shape[0]
    if vals.ndim == 1:
        return vals.reshape(n // side, side).mean(axis=1)
    return vals.reshape(n // side, side, n // side, side).mean(axis=(1, 3))


def _expand_blocks(blocks: np.ndarray, side: int) -> np.ndarray:
    out = np.repeat(blocks, side, axis=0)
    if blocks.ndim == 2:
        out = np.repeat(out, side, axis=1)
    return out


def _dyadic_max_means(vals: np.ndarray) -> np.ndarray:
    n = vals.shape[0]
    if not is_power_of_two(n):
        raise GridError("dyadic mode needs a power-of-two resolution")
    out = np.full(vals.shape, -np.inf)
    side = 1
    while side <= n:
        np.maximum(out, _expand_blocks(_dyadic_block_means(vals, side), side), out=out)
        side *= 2
    return out


def maximal(f: GridFunction, mode: str = RESTRICTED, side_cap: int | None = None) -> MaximalField:
    """Hardy-Littlewood maximal function of ``f`` in the given boundary mode."""
    _check_mode(mode)
    vals = np.abs(f.values)
    if mode == RESTRICTED:
        out = _restricted_max_means(vals, side_cap)
    elif mode == ZERO_EXTENSION:
        out = _zero_extension_max_means(vals, side_cap)
    else:
        out = _dyadic_max_means(vals)
        if side_cap is not None:
            raise GridError("side_cap is not supported in dyadic mode")
    return MaximalField(f.with_values(out), mode, HARDY_LITTLEWOOD)


def _naive_cubes(n: int, dim: int, mode: str):
    """(anchor, side) stream for the naive oracles; anchors may be negative
    in zero-extension mode."""
    if mode == RESTRICTED:
        for side in range(1, n + 1):
            stops = range(0, n - side + 1)
            yield from _anchor_product(stops, dim, side)
    elif mode == ZERO_EXTENSION:
        for side in range(1, ZERO_SIDE_FACTOR * n + 1):
            stops = range(-(side - 1), n)
            yield from _anchor_product(stops, dim, side)
    else:
        side = 1
        while side <= n:
            stops = range(0, n, side)
            yield from _anchor_product(stops, dim, side)
            side *= 2


def _anchor_product(stops, dim, side):
    if dim == 1:
        for a in stops:
            yield (a,), side
    else:
        for a0 in stops:
            for a1 in stops:
                yield (a0, a1), side


def _clip(anchor: tuple[int, ...], side: int, n: int) -> tuple[slice, ...]:
    return tuple(slice(max(a, 0), min(a + side, n)) for a in anchor)


def maximal_naive(f: GridFunction, mode: str = RESTRICTED) -> MaximalField:
    """Exhaustive cube-enumeration twin of :func:`maximal` (tests, small N)."""
    _check_mode(mode)
    vals = np.abs(f.values)
    n = f.resolution
    out = np.full(vals.shape, -np.inf)
    for anchor, side in _naive_cubes(n, f.dim, mode):
        covered = _clip(anchor, side, n)
        seg = vals[covered]
        if seg.size == 0:
            continue
        avg = float(seg.sum()) / side ** f.dim
        np.maximum(out[covered], avg, out=out[covered])
    return MaximalField(f.with_values(out), mode, HARDY_LITTLEWOOD)


# ---------------------------------------------------------------------------
# Sharp maximal function.
# ---------------------------------------------------------------------------

def _window_oscillations(vals: np.ndarray, cum: np.ndarray, side: int) -> np.ndarray:
    """Mean |f - f_Q| for every window of the given side (exact, chunked)."""
    dim = vals.ndim
    means = _window_sums(cum, side) / side ** dim
    if dim == 1:
        windows = sliding_window_view(vals, side)
        return np.abs(windows - means[:, None]).mean(axis=1)
    windows = sliding_window_view(vals, (side, side))
    out = np.empty(means.shape)
    rows = max(1, _CHUNK_ELEMS // max(1, means.shape[1] * side * side))
    for r0 in range(0, means.shape[0], rows):
        blk = windows[r0 : r0 + rows]
        out[r0 : r0 + rows] = np.abs(
            blk - means[r0 : r0 + rows][..., None, None]
        ).mean(axis=(2, 3))
    return out


def _restricted_sharp(vals: np.ndarray, side_cap: int | None = None) -> np.ndarray:
    cap = min(vals.shape)
    if side_cap is not None:
        cap = min(cap, side_cap)
    cum = padded_cumsum(vals)
    out = np.full(vals.shape, -np.inf)
    for side in range(1, cap + 1):
        osc = _window_oscillations(vals, cum, side)
        np.maximum(out, _per_cell_max(osc, side, vals.shape), out=out)
    return out


def _dyadic_sharp(vals: np.ndarray) -> np.ndarray:
    n = vals.shape[0]
    out = np.full(vals.shape, -np.inf)
    side = 1
    while side <= n:
        means = _dyadic_block_means(vals, side)
        dev = np.abs(vals - _expand_blocks(means, side))
        osc = _dyadic_block_means(dev, side)
        np.maximum(out, _expand_blocks(osc, side), out=out)
        side *= 2
    return out


def sharp_maximal(f: GridFunction, mode: str = RESTRICTED) -> MaximalField:
    """Fefferman-Stein sharp maximal function of ``f``."""
    _check_mode(mode)
    vals = f.values
    n = f.resolution
    if mode == RESTRICTED:
        out = _restricted_sharp(vals)
    elif mode == ZERO_EXTENSION:
        cap = ZERO_SIDE_FACTOR * n
        pad = cap - 1
        res = _restricted_sharp(np.pad(vals, pad), side_cap=cap)
        out = res[tuple(slice(pad, pad + m) for m in vals.shape)]
    else:
        out = _dyadic_sharp(vals)
    return MaximalField(f.with_values(out), mode, SHARP)


def sharp_maximal_naive(f: GridFunction, mode: str = RESTRICTED) -> MaximalField:
    """Exhaustive cube-enumeration twin of :func:`sharp_maximal`."""
    _check_mode(mode)
    vals = f.values
    n = f.resolution
    out = np.full(vals.shape, -np.inf)
    for anchor, side in _naive_cubes(n, f.dim, mode):
        covered = _clip(anchor, side, n)
        seg = vals[covered]
        if seg.size == 0:
            continue
        volume = side ** f.dim
        mean = float(seg.sum()) / volume
        # cells outside the domain carry f = 0 and contribute |mean| each
        osc = (float(np.abs(seg - mean).sum()) + (volume - seg.size) * abs(mean)) / volume
        np.maximum(out[covered], osc, out=out[covered])
    return MaximalField(f.with_values(out), mode, SHARP)


def local_maximal(f: GridFunction, cube: GridCube) -> np.ndarray:
    """Local dyadic maximal values of (f - f_Q)chi_Q on the cells of Q.

    The cube carries its own dyadic lattice, so its side must be a power
    of two.
    """
    if not is_power_of_two(cube.side):
        raise UnsupportedCubeError(
            f"local maximal needs a power-of-two side, got {cube.side}"
        )
    if not cube.within(f.resolution):
        raise GridError(f"{cube} exceeds resolution {f.resolution}")
    sub = f.values[cube.slices]
    dev = np.abs(sub - sub.mean())
    return _dyadic_max_means(dev)


def weak_l1_quasinorm(g: GridFunction, normalization: float = 1.0) -> float:
    """sup_t t * |{|g| > t}| / normalization, exact over the level sets."""
    if normalization <= 0:
        raise GridError(f"normalization must be positive, got {normalization}")
    vals = np.sort(np.abs(g.values).ravel())[::-1]
    positive = vals > 0
    if not positive.any():
        return 0.0
    counts = np.arange(1, vals.size + 1, dtype=np.float64)
    best = float(np.max(vals[positive] * counts[positive]))
    return best * g.cell_volume / normalization


def nonlocal_bound_probe(
    f: GridFunction, cube: GridCube, mode: str = RESTRICTED
) -> dict:
    """Empirical constant in the nonlocal maximal bound.

    Replaces f on the tripled cube by its average there, computes the
    maximal function of the replaced function, and reports the largest
    value of (Mg - essinf_Q Mf)^+ / M#f over the cells of Q.
    """
    if float(f.values.max()) == float(f.values.min()):
        raise DegenerateInputError("constant input: sharp maximal vanishes")
    tripled = triple(cube, f.resolution)
    avg = PrefixTable.from_function(f).cube_average(tripled)
    gvals = f.values.copy()
    gvals[tripled.slices] = avg
    g = f.with_values(gvals)
    mf = maximal(f, mode)
    mg = maximal(g, mode)
    sharp = sharp_maximal(f, mode)
    essinf = float(mf.values[cube.slices].min())
    num = np.maximum(mg.values[cube.slices] - essinf, 0.0)
    den = sharp.values[cube.slices]
    if np.any(den <= 0):
        raise DegenerateInputError("sharp maximal vanishes on the probed cube")
    ratios = num / den
    flat = int(np.argmax(ratios))
    rel = np.unravel_index(flat, ratios.shape)
    witness = tuple(int(a + r) for a, r in zip(cube.anchor, rel))
    return {
        "max_ratio": float(ratios.flat[flat]),
        "cell": witness,
        "essinf": essinf,
        "mode": mode,
    }
