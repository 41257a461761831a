import numpy as np
import pytest

from oslx.grid import (
    ContainmentError,
    GridCube,
    GridError,
    GridFunction,
    ParseError,
    PrefixTable,
    RangeError,
    TriplingUnavailableError,
    count_cubes,
    cube_min,
    enumerate_cubes,
    format_float,
    is_power_of_two,
    pairwise_cumsum,
    read_grid,
    triple,
    write_grid,
)


def test_power_of_two_validation():
    with pytest.raises(GridError):
        GridFunction(1, 6, np.zeros(6))
    with pytest.raises(GridError):
        GridFunction(3, 4, np.zeros((4, 4, 4)))
    with pytest.raises(GridError):
        GridFunction(1, 4, [1.0, np.nan, 0.0, 0.0])
    assert is_power_of_two(1) and is_power_of_two(64)
    assert not is_power_of_two(0) and not is_power_of_two(12)


def test_from_values_shapes():
    f = GridFunction.from_values(np.arange(8.0))
    assert f.dim == 1 and f.resolution == 8
    g = GridFunction.from_values(np.ones((4, 4)))
    assert g.dim == 2 and g.cell_volume == 1 / 16
    with pytest.raises(GridError):
        GridFunction.from_values(np.ones((4, 8)))


def test_values_are_read_only():
    f = GridFunction(1, 4, [1.0, 2.0, 3.0, 4.0])
    with pytest.raises(ValueError):
        f.values[0] = 0.0


def test_as_weight():
    f = GridFunction(1, 4, [1.0, -1.0, 2.0, 3.0])
    with pytest.raises(GridError):
        f.as_weight()
    w = f.as_weight(floor=True)
    assert w.values.min() > 0


def test_cube_geometry():
    q = GridCube((2, 3), 4)
    assert q.dim == 2 and q.cell_count == 16
    assert q.slices == (slice(2, 6), slice(3, 7))
    assert q.within(8) and not q.within(6)
    assert q.contains_cell((2, 3)) and not q.contains_cell((6, 3))
    assert q.contains_cube(GridCube((3, 4), 2))
    assert not q.contains_cube(GridCube((5, 5), 2))


def test_triple():
    t = triple(GridCube((4,), 2), 16)
    assert t.anchor == (2,) and t.side == 6
    with pytest.raises(TriplingUnavailableError):
        triple(GridCube((0,), 2), 16)
    with pytest.raises(TriplingUnavailableError):
        triple(GridCube((10,), 4), 16)


def test_pairwise_cumsum_matches_cumsum():
    rng = np.random.default_rng(0)
    a = rng.normal(size=300)
    assert np.allclose(pairwise_cumsum(a), np.cumsum(a), rtol=1e-12)
    b = rng.normal(size=(70, 130))
    assert np.allclose(pairwise_cumsum(b, axis=0), np.cumsum(b, axis=0), rtol=1e-12)


def test_prefix_table_sums():
    rng = np.random.default_rng(1)
    f = GridFunction(2, 8, rng.normal(size=(8, 8)))
    table = PrefixTable.from_function(f)
    q = GridCube((1, 2), 3)
    direct = f.values[q.slices].sum() * f.cell_volume
    assert abs(table.cube_sum(q) - direct) < 1e-12
    assert abs(table.cube_average(q) - f.values[q.slices].mean()) < 1e-12
    assert abs(table.cube_sum(q, absolute=True)
               - np.abs(f.values[q.slices]).sum() * f.cell_volume) < 1e-12
    with pytest.raises(RangeError):
        table.cube_sum(GridCube((7, 7), 3))


def test_cube_min_is_exact():
    f = GridFunction(1, 8, [3, 1, 4, 1, 5, 9, 2, 6])
    assert cube_min(f, GridCube((2,), 4)) == 1.0


def test_enumerate_order_and_count():
    cubes = list(enumerate_cubes(4, 1, "all"))
    sides = [c.side for c in cubes]
    assert sides == sorted(sides)
    first = [c.anchor for c in cubes[:4]]
    assert first == [(0,), (1,), (2,), (3,)]
    assert len(list(enumerate_cubes(4, 2, "all"))) == count_cubes(4, 2) == 30
    assert len(list(enumerate_cubes(8, 1, "dyadic"))) == count_cubes(8, 1, "dyadic")


def test_enumerate_containing():
    cell = (5,)
    cubes = list(enumerate_cubes(8, 1, "containing", cell))
    assert all(c.contains_cell(cell) for c in cubes)
    # every all-family cube containing the cell shows up exactly once
    brute = [c for c in enumerate_cubes(8, 1, "all") if c.contains_cell(cell)]
    assert [(c.anchor, c.side) for c in cubes] == [(c.anchor, c.side) for c in brute]


def test_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(2)
    for f in (GridFunction(1, 8, rng.normal(size=8)),
              GridFunction(2, 4, rng.normal(size=(4, 4)))):
        p = tmp_path / "g.csv"
        write_grid(f, p)
        g = read_grid(p)
        assert g.dim == f.dim and np.array_equal(g.values, f.values)
        # writing twice gives identical bytes
        p2 = tmp_path / "g2.csv"
        write_grid(f, p2)
        assert p.read_bytes() == p2.read_bytes()


def test_binary_roundtrip(tmp_path):
    rng = np.random.default_rng(3)
    f = GridFunction(2, 8, rng.normal(size=(8, 8)))
    p = tmp_path / "g.grid"
    write_grid(f, p)
    g = read_grid(p)
    assert np.array_equal(g.values, f.values)


def test_parse_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("1.0\nnot-a-number\n")
    with pytest.raises(ParseError, match="line 2"):
        read_grid(bad)
    ragged = tmp_path / "ragged.csv"
    ragged.write_text("1,2\n3\n")
    with pytest.raises(ParseError, match="ragged"):
        read_grid(ragged)
    trunc = tmp_path / "trunc.grid"
    trunc.write_bytes(b"OSLX")
    with pytest.raises(ParseError, match="offset"):
        read_grid(trunc)
    magic = tmp_path / "magic.grid"
    magic.write_bytes(b"NOPE" + bytes(12) + bytes(8))
    with pytest.raises(ParseError, match="magic"):
        read_grid(magic)


def test_format_float():
    assert format_float(0.1) == "0.10000000000000001"
    assert float(format_float(np.pi)) == np.pi
