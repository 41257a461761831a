"""Uniform-grid step functions, cubes and prefix-sum range queries.

Everything lives on the unit cube [0,1)^d sampled on N cells per axis
(N a power of two).  Kernels work in cell units; physical coordinates
appear only at I/O time.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

WEIGHT_FLOOR = 1e-12

_MAGIC = b"OSLX"
_HEADER = struct.Struct("<4sII4x")  # magic, dim, resolution, 4 reserved bytes


class GridError(ValueError):
    """Base class for grid-layer failures."""


class RangeError(GridError):
    """Cube indices fall outside the addressable range."""


class TriplingUnavailableError(GridError):
    """The tripled cube would not fit inside the domain."""


class UnsupportedCubeError(GridError):
    """Cube does not carry the structure an operation needs."""


class ContainmentError(GridError):
    """A set argument is not contained where it must be."""


class ParseError(GridError):
    """Malformed grid file."""


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def pairwise_cumsum(a: np.ndarray, axis: int = -1) -> np.ndarray:
    """Cumulative sum with pairwise (tree) accumulation.

    Error grows like O(log n) in the block count instead of O(n),
    which keeps range-query tolerances honest at large resolutions.
    """
    a = np.moveaxis(np.asarray(a, dtype=np.float64), axis, -1)
    return np.moveaxis(_pairwise_cumsum_last(a), -1, axis)


def _pairwise_cumsum_last(a: np.ndarray) -> np.ndarray:
    n = a.shape[-1]
    if n <= 64:
        return np.cumsum(a, axis=-1)
    h = n // 2
    left = _pairwise_cumsum_last(a[..., :h])
    right = _pairwise_cumsum_last(a[..., h:])
    return np.concatenate([left, right + left[..., -1:]], axis=-1)


@dataclass(frozen=True)
class GridFunction:
    """Real-valued step function on a uniform grid over [0,1)^d."""

    dim: int
    resolution: int
    values: np.ndarray

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise GridError(f"dim must be 1 or 2, got {self.dim}")
        if not is_power_of_two(self.resolution):
            raise GridError(f"resolution must be a power of two, got {self.resolution}")
        v = np.asarray(self.values, dtype=np.float64)
        try:
            v = v.reshape((self.resolution,) * self.dim)
        except ValueError:
            raise GridError(
                f"values of size {v.size} do not fill a {self.resolution}^{self.dim} grid"
            ) from None
        if not np.all(np.isfinite(v)):
            raise GridError("values must be finite (no NaN/Inf)")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_values(cls, values: np.ndarray) -> "GridFunction":
        v = np.asarray(values, dtype=np.float64)
        if v.ndim not in (1, 2):
            raise GridError(f"expected a 1- or 2-dimensional array, got ndim={v.ndim}")
        if v.ndim == 2 and v.shape[0] != v.shape[1]:
            raise GridError(f"2-d grids must be square, got {v.shape}")
        return cls(dim=v.ndim, resolution=v.shape[0], values=v)

    @property
    def cell_width(self) -> float:
        return 1.0 / self.resolution

    @property
    def cell_volume(self) -> float:
        return self.cell_width ** self.dim

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(self.dim, self.resolution, values)

    def as_weight(self, floor: bool = False) -> "GridFunction":
        """Validate (or coerce, with ``floor=True``) this function as a weight."""
        if not floor and np.any(self.values <= 0):
            raise GridError(
                "weight has nonpositive entries; pass floor=True to clamp at the floor"
            )
        return self.with_values(np.maximum(self.values, WEIGHT_FLOOR))


@dataclass(frozen=True)
class GridCube:
    """Axis-aligned cube in cell units: [anchor, anchor + side) per axis."""

    anchor: tuple[int, ...]
    side: int

    def __post_init__(self):
        anchor = tuple(int(a) for a in self.anchor)
        object.__setattr__(self, "anchor", anchor)
        if len(anchor) not in (1, 2):
            raise GridError(f"anchor must have 1 or 2 axes, got {len(anchor)}")
        if any(a < 0 for a in anchor):
            raise GridError(f"anchor must be nonnegative, got {anchor}")
        if self.side < 1:
            raise GridError(f"side must be >= 1, got {self.side}")

    @property
    def dim(self) -> int:
        return len(self.anchor)

    @property
    def slices(self) -> tuple[slice, ...]:
        return tuple(slice(a, a + self.side) for a in self.anchor)

    @property
    def cell_count(self) -> int:
        return self.side ** self.dim

    def within(self, resolution: int) -> bool:
        return all(a + self.side <= resolution for a in self.anchor)

    def measure(self, resolution: int) -> float:
        return (self.side / resolution) ** self.dim

    def contains_cell(self, cell: tuple[int, ...]) -> bool:
        return all(a <= c < a + self.side for a, c in zip(self.anchor, cell))

    def contains_cube(self, other: "GridCube") -> bool:
        return all(
            a <= b and b + other.side <= a + self.side
            for a, b in zip(self.anchor, other.anchor)
        )

    def to_json(self) -> dict:
        return {"anchor": list(self.anchor), "side": self.side}


def triple(cube: GridCube, resolution: int) -> GridCube:
    """Cube with the same center and three times the side length."""
    anchor = tuple(a - cube.side for a in cube.anchor)
    side = 3 * cube.side
    if any(a < 0 or a + side > resolution for a in anchor):
        raise TriplingUnavailableError(
            f"tripling {cube} exceeds the domain at resolution {resolution}"
        )
    return GridCube(anchor=anchor, side=side)


@dataclass(frozen=True)
class PrefixTable:
    """Summed-area tables for O(1) cube sums of values and |values|."""

    dim: int
    resolution: int
    cell_volume: float
    cum: np.ndarray
    cum_abs: np.ndarray

    @classmethod
    def from_function(cls, f: GridFunction) -> "PrefixTable":
        return cls(
            dim=f.dim,
            resolution=f.resolution,
            cell_volume=f.cell_volume,
            cum=padded_cumsum(f.values),
            cum_abs=padded_cumsum(np.abs(f.values)),
        )

    def _raw_sum(self, cube: GridCube, absolute: bool) -> float:
        if cube.dim != self.dim:
            raise RangeError(f"cube dim {cube.dim} != table dim {self.dim}")
        if not cube.within(self.resolution):
            raise RangeError(f"{cube} exceeds resolution {self.resolution}")
        c = self.cum_abs if absolute else self.cum
        return window_sum(c, cube.anchor, cube.side)

    def cube_sum(self, cube: GridCube, absolute: bool = False) -> float:
        """Integral of the step function over the cube."""
        return self._raw_sum(cube, absolute) * self.cell_volume

    def cube_average(self, cube: GridCube, absolute: bool = False) -> float:
        return self._raw_sum(cube, absolute) / cube.cell_count


def padded_cumsum(values: np.ndarray) -> np.ndarray:
    """Cumulative sums with one leading row/column of zeros per axis."""
    c = values
    for axis in range(values.ndim):
        c = pairwise_cumsum(c, axis=axis)
    return np.pad(c, [(1, 0)] * values.ndim)


def window_sum(cum: np.ndarray, anchor: tuple[int, ...], side: int) -> float:
    """Box sum from a padded cumulative table (raw cell values, no volume)."""
    if len(anchor) == 1:
        (a,) = anchor
        return float(cum[a + side] - cum[a])
    a0, a1 = anchor
    return float(
        cum[a0 + side, a1 + side]
        - cum[a0, a1 + side]
        - cum[a0 + side, a1]
        + cum[a0, a1]
    )


def cube_sum(table: PrefixTable, cube: GridCube) -> float:
    return table.cube_sum(cube)


def cube_average(table: PrefixTable, cube: GridCube) -> float:
    return table.cube_average(cube)


def cube_min(f: GridFunction, cube: GridCube) -> float:
    """Minimum cell value over the cube (the essential infimum of a step function)."""
    if not cube.within(f.resolution):
        raise RangeError(f"{cube} exceeds resolution {f.resolution}")
    return float(f.values[cube.slices].min())


@dataclass(frozen=True)
class WeightedMeasure:
    """w(Q) queries backed by a prefix table of a positive weight."""

    table: PrefixTable

    @classmethod
    def from_weight(cls, w: GridFunction) -> "WeightedMeasure":
        return cls(table=PrefixTable.from_function(w.as_weight()))

    def __call__(self, cube: GridCube) -> float:
        return self.table.cube_sum(cube)


def weighted_measure(wm: WeightedMeasure, cube: GridCube) -> float:
    return wm(cube)


def enumerate_cubes(
    resolution: int,
    dim: int,
    family: str = "all",
    cell: tuple[int, ...] | None = None,
) -> Iterator[GridCube]:
    """Deterministic cube stream: ascending side, then lexicographic anchor.

    Families: ``all`` (every admissible anchor/side), ``dyadic`` (the standard
    dyadic lattice, requires a power-of-two resolution), ``containing`` (the
    ``all`` subfamily whose closure contains ``cell``).
    """
    n = resolution
    if family == "all":
        for side in range(1, n + 1):
            yield from _anchors(n, dim, side, step=1)
    elif family == "dyadic":
        if not is_power_of_two(n):
            raise GridError("dyadic family needs a power-of-two resolution")
        side = 1
        while side <= n:
            yield from _anchors(n, dim, side, step=side)
            side *= 2
    elif family == "containing":
        if cell is None or len(cell) != dim:
            raise GridError("family 'containing' needs a cell with one index per axis")
        for side in range(1, n + 1):
            ranges = [
                range(max(0, c - side + 1), min(c, n - side) + 1) for c in cell
            ]
            if dim == 1:
                for a in ranges[0]:
                    yield GridCube((a,), side)
            else:
                for a0 in ranges[0]:
                    for a1 in ranges[1]:
                        yield GridCube((a0, a1), side)
    else:
        raise GridError(f"unknown cube family {family!r}")


def _anchors(n: int, dim: int, side: int, step: int) -> Iterator[GridCube]:
    stops = range(0, n - side + 1, step)
    if dim == 1:
        for a in stops:
            yield GridCube((a,), side)
    else:
        for a0 in stops:
            for a1 in stops:
                yield GridCube((a0, a1), side)


def count_cubes(resolution: int, dim: int, family: str = "all") -> int:
    """Closed-form count for the ``all`` and ``dyadic`` families."""
    n = resolution
    if family == "all":
        return sum((n - side + 1) ** dim for side in range(1, n + 1))
    if family == "dyadic":
        total, side = 0, 1
        while side <= n:
            total += (n // side) ** dim
            side *= 2
        return total
    raise GridError(f"no closed-form count for family {family!r}")


# ---------------------------------------------------------------------------
# File formats: CSV (one value per line for d=1, N comma-separated rows for
# d=2) and raw little-endian float64 binary with a 16-byte OSLX header.
# ---------------------------------------------------------------------------

def format_float(x: float) -> str:
    return format(float(x), ".17g")


def write_grid(f: GridFunction, path: str | Path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        _write_csv(f, path)
    else:
        _write_binary(f, path)


def read_grid(path: str | Path) -> GridFunction:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return _read_csv(path)
    return _read_binary(path)


def _write_csv(f: GridFunction, path: Path) -> None:
    if f.dim == 1:
        lines = [format_float(v) for v in f.values]
    else:
        lines = [",".join(format_float(v) for v in row) for row in f.values]
    path.write_text("\n".join(lines) + "\n")


def _read_csv(path: Path) -> GridFunction:
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append([float(tok) for tok in line.split(",")])
            except ValueError as exc:
                raise ParseError(f"{path}: line {lineno}: {exc}") from None
    if not rows:
        raise ParseError(f"{path}: empty grid file")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        bad = next(i for i, r in enumerate(rows, start=1) if len(r) != width)
        raise ParseError(f"{path}: line {bad}: ragged row (expected {width} values)")
    arr = np.asarray(rows, dtype=np.float64)
    if width == 1:
        return GridFunction.from_values(arr[:, 0])
    if len(rows) != width:
        raise ParseError(f"{path}: 2-d grid must be square, got {len(rows)}x{width}")
    return GridFunction.from_values(arr)


def _write_binary(f: GridFunction, path: Path) -> None:
    header = _HEADER.pack(_MAGIC, f.dim, f.resolution)
    path.write_bytes(header + f.values.astype("<f8").tobytes())


def _read_binary(path: Path) -> GridFunction:
    blob = path.read_bytes()
    if len(blob) < _HEADER.size:
        raise ParseError(f"{path}: offset 0: truncated header")
    magic, dim, n = _HEADER.unpack_from(blob)
    if magic != _MAGIC:
        raise ParseError(f"{path}: offset 0: bad magic {magic!r}")
    expected = _HEADER.size + 8 * n ** dim
    if len(blob) != expected:
        raise ParseError(
            f"{path}: offset {len(blob)}: expected {expected} bytes for a "
            f"{n}^{dim} grid"
        )
    values = np.frombuffer(blob, dtype="<f8", offset=_HEADER.size).reshape((n,) * dim)
    return GridFunction(dim=dim, resolution=n, values=values)
