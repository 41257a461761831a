"""Inequality harness: ratio records, tail profiles, good-lambda checks,
the two-sided weight-constant comparison, and frozen-calibration plumbing.

The dimensional constants in the estimates being exercised are not
constructive, so the harness freezes empirically observed constants per
(dim, mode, family) and later runs compare against them with a small
regression margin.  The verifiable content is uniform boundedness and the
linear-in-p scaling, never a particular constant value.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .corpus import (
    a1_family,
    half_space_example,
    log_abs_demo,
    power_weight,
    random_dyadic_bmo,
    spike,
    two_valued_weight,
)
from .grid import GridCube, GridError, GridFunction
from .operators import (
    DegenerateInputError,
    MaximalField,
    RESTRICTED,
    local_maximal,
    maximal,
    nonlocal_bound_probe,
    sharp_maximal,
)
from .oscillation import (
    a1_constant,
    blo_w_seminorm,
    bmo_seminorm,
    coifman_rochberg,
    exp_weight,
    fujii_wilson,
    llogl_ratio,
    log_plus_transform,
    reverse_holder_check,
)
from .report import json_load, json_text, stable_hash

TAIL_FIT_WINDOW = (1e-4, 0.5)
REGRESSION_MARGIN = 0.05
P_VALUES = (1, 2, 4, 8)


class StaleCalibrationError(GridError):
    """Frozen constants were produced on a different corpus."""


@dataclass(frozen=True)
class RatioRecord:
    lhs: float
    p: float
    a_infty: float
    normalized: float
    mode: str
    family: str
    cube: GridCube
    label: str = ""

    def to_json(self) -> dict:
        return {
            "lhs": self.lhs,
            "p": self.p,
            "a_infty": self.a_infty,
            "normalized": self.normalized,
            "mode": self.mode,
            "family": self.family,
            "cube": self.cube.to_json(),
            "label": self.label,
        }


@dataclass(frozen=True)
class TailProfile:
    t_grid: np.ndarray
    mass: np.ndarray
    fitted_rate: float
    fitted_intercept: float
    fit_ok: bool

    def to_json(self) -> dict:
        return {
            "t_grid": self.t_grid,
            "mass": self.mass,
            "fitted_rate": self.fitted_rate,
            "fitted_intercept": self.fitted_intercept,
            "fit_ok": self.fit_ok,
        }


@dataclass(frozen=True)
class RatioFields:
    """Cached maximal and sharp fields of one function in one mode."""

    maximal: MaximalField
    sharp: MaximalField

    @classmethod
    def compute(cls, f: GridFunction, mode: str = RESTRICTED) -> "RatioFields":
        return cls(maximal=maximal(f, mode), sharp=sharp_maximal(f, mode))

    @property
    def mode(self) -> str:
        return self.maximal.mode


def _require_nonconstant(f: GridFunction) -> None:
    if float(f.values.max()) == float(f.values.min()):
        raise DegenerateInputError("constant input: ratios are undefined")


def ratio_parts_on_cube(
    fields: RatioFields, cube: GridCube
) -> tuple[np.ndarray, np.ndarray]:
    """Numerator (Mf - essinf_Q Mf) and denominator M#f on the cells of Q."""
    mvals = fields.maximal.values[cube.slices]
    num = mvals - float(mvals.min())
    den = fields.sharp.values[cube.slices]
    if np.any(den <= 0):
        raise DegenerateInputError("sharp maximal vanishes on the cube")
    return num, den


def _weighted_pmean(r: np.ndarray, wseg: np.ndarray, p: float) -> float:
    return float(((r ** p * wseg).sum() / wseg.sum()) ** (1.0 / p))


def pnorm_ratio(
    f: GridFunction,
    w: GridFunction,
    cube: GridCube,
    p: float,
    mode: str = RESTRICTED,
    a_infty: float | None = None,
    fields: RatioFields | None = None,
    family: str = "dyadic",
    label: str = "",
) -> RatioRecord:
    """Weighted p-mean over Q of (Mf - essinf_Q Mf) / M#f, with the
    normalization lhs / (p * [w])."""
    if p < 1:
        raise GridError(f"p must be >= 1, got {p}")
    _require_nonconstant(f)
    w = w.as_weight()
    if fields is None:
        fields = RatioFields.compute(f, mode)
    if a_infty is None:
        a_infty = fujii_wilson(w, mode, family).a_infty
    num, den = ratio_parts_on_cube(fields, cube)
    lhs = _weighted_pmean(num / den, w.values[cube.slices], p)
    return RatioRecord(
        lhs=lhs,
        p=p,
        a_infty=a_infty,
        normalized=lhs / (p * a_infty),
        mode=mode,
        family=family,
        cube=cube,
        label=label,
    )


def local_pnorm_ratio(
    f: GridFunction,
    w: GridFunction,
    cube: GridCube,
    p: float,
    mode: str = RESTRICTED,
    a_infty: float | None = None,
    sharp: MaximalField | None = None,
    family: str = "dyadic",
    label: str = "",
) -> RatioRecord:
    """Same p-mean with the local dyadic maximal of (f - f_Q)chi_Q as the
    numerator.  The cube side must be a power of two."""
    if p < 1:
        raise GridError(f"p must be >= 1, got {p}")
    sub = f.values[cube.slices]
    if float(sub.max()) == float(sub.min()):
        raise DegenerateInputError("input is constant on the cube")
    w = w.as_weight()
    if sharp is None:
        sharp = sharp_maximal(f, mode)
    if a_infty is None:
        a_infty = fujii_wilson(w, mode, family).a_infty
    num = local_maximal(f, cube)
    den = sharp.values[cube.slices]
    if np.any(den <= 0):
        raise DegenerateInputError("sharp maximal vanishes on the cube")
    lhs = _weighted_pmean(num / den, w.values[cube.slices], p)
    return RatioRecord(
        lhs=lhs,
        p=p,
        a_infty=a_infty,
        normalized=lhs / (p * a_infty),
        mode=mode,
        family=family,
        cube=cube,
        label=label,
    )


def tail_profile(
    f: GridFunction,
    w: GridFunction,
    cube: GridCube,
    mode: str = RESTRICTED,
    t_grid: np.ndarray | None = None,
    fields: RatioFields | None = None,
) -> TailProfile:
    """Sampled map t -> w({ratio > t} inter Q) / w(Q) with a fitted
    exponential decay rate over the stated mass window."""
    _require_nonconstant(f)
    w = w.as_weight()
    if fields is None:
        fields = RatioFields.compute(f, mode)
    num, den = ratio_parts_on_cube(fields, cube)
    r = num / den
    wseg = w.values[cube.slices]
    wq = float(wseg.sum())
    if t_grid is None:
        rmax = float(r.max())
        t_grid = np.linspace(0.0, rmax * 1.02 if rmax > 0 else 1.0, 128)
    t_grid = np.asarray(t_grid, dtype=np.float64)
    mass = np.array([float(wseg[r > t].sum()) / wq for t in t_grid])
    lo, hi = TAIL_FIT_WINDOW
    sel = (mass >= lo) & (mass <= hi)
    # a flat window (one distinct mass value) has no decay rate to fit
    if int(sel.sum()) >= 3 and np.unique(mass[sel]).size >= 2:
        rate, intercept = np.polyfit(t_grid[sel], np.log(mass[sel]), 1)
        return TailProfile(t_grid, mass, float(rate), float(intercept), True)
    return TailProfile(t_grid, mass, float("nan"), float("nan"), False)


def good_lambda(
    f: GridFunction,
    w: GridFunction,
    cube: GridCube,
    lam: float,
    gamma: float,
    mode: str = RESTRICTED,
    fields: RatioFields | None = None,
) -> dict:
    """Relative distributional check: the set {Mf - essinf > lambda,
    M#f <= gamma lambda} is contained in the ratio tail at 1/gamma."""
    if lam <= 0 or gamma <= 0:
        raise GridError("lambda and gamma must be positive")
    _require_nonconstant(f)
    w = w.as_weight()
    if fields is None:
        fields = RatioFields.compute(f, mode)
    num, den = ratio_parts_on_cube(fields, cube)
    wseg = w.values[cube.slices]
    wq = float(wseg.sum())
    level = (num > lam) & (den <= gamma * lam)
    tail = (num / den) > (1.0 / gamma)
    mass = float(wseg[level].sum()) / wq
    bound_mass = float(wseg[tail].sum()) / wq
    included = bool(not np.any(level & ~tail))
    return {
        "mass": mass,
        "bound_mass": bound_mass,
        "ok": included and mass <= bound_mass + 1e-12,
        "included": included,
    }


def layer_cake_lp(profile: TailProfile, p: float) -> float:
    """(p * integral of t^{p-1} mass(t) dt)^{1/p} by the trapezoid rule."""
    if p < 1:
        raise GridError(f"p must be >= 1, got {p}")
    g = profile.t_grid ** (p - 1) * profile.mass
    return float((p * np.trapezoid(g, profile.t_grid)) ** (1.0 / p))


def layer_cake_bounds(profile: TailProfile, p: float) -> tuple[float, float]:
    """Riemann lower/upper bounds bracketing the layer-cake integral (and its
    trapezoid approximation) on the same grid."""
    g = profile.t_grid ** (p - 1) * profile.mass
    dt = np.diff(profile.t_grid)
    lower = float((p * (dt * np.minimum(g[:-1], g[1:])).sum()) ** (1.0 / p))
    upper = float((p * (dt * np.maximum(g[:-1], g[1:])).sum()) ** (1.0 / p))
    return lower, upper


def gamma_growth_check(p: float, bound: float = 1.2) -> dict:
    """Gamma(p+1)^{1/p} / p stays below a fixed bound on [1, 64]."""
    value = float(np.exp(gammaln(p + 1) / p) / p)
    return {"value": value, "ok": value <= bound}


# ---------------------------------------------------------------------------
# Two-sided weight-constant comparison.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class XMember:
    name: str
    func: GridFunction
    analytic_maximal: GridFunction | None = None


def default_x_corpus(
    n: int,
    dim: int = 1,
    seeds: tuple[int, ...] = (31, 32),
    depth: int = 5,
    weight: GridFunction | None = None,
) -> list[XMember]:
    """Candidate functions for the supremum of the weighted lower-oscillation
    of the maximal function over unit-oscillation inputs.

    Always contains the half-space member with its analytic maximal field;
    optionally adds the log-plus of the square-root maximal construction of
    the weight under study."""
    ex = half_space_example(n, dim)
    members = [XMember("half_space", ex.func, ex.analytic_maximal)]
    for s in seeds:
        members.append(XMember(f"dyadic_bmo_{s}", random_dyadic_bmo(n, dim, depth, seed=s)))
    if weight is not None:
        full = GridCube((0,) * dim, n)
        b = log_plus_transform(coifman_rochberg(weight, full, RESTRICTED))
        if float(b.values.max()) > float(b.values.min()):
            members.append(XMember("log_sqrt_maximal", b))
    return members


def x_estimate(
    w: GridFunction,
    corpus: list[XMember],
    mode: str = RESTRICTED,
    family: str = "all",
) -> dict:
    """max over the corpus of blo_w(Mf) / bmo(f)."""
    if not corpus:
        raise GridError("corpus must be nonempty")
    w = w.as_weight()
    table = []
    for member in corpus:
        _require_nonconstant(member.func)
        if member.analytic_maximal is not None:
            mf = member.analytic_maximal
        else:
            mf = maximal(member.func, mode).field
        num = blo_w_seminorm(mf, w, family).value
        den = bmo_seminorm(member.func, family).value
        table.append({"name": member.name, "ratio": num / den, "blo_w": num, "bmo": den})
    best = max(table, key=lambda row: row["ratio"])
    return {"x_hat": best["ratio"], "best": best["name"], "table": table}


def char_lower_bound(w: GridFunction, boundary_cell: int | None = None) -> dict:
    """Half-space witness: pick the half-space side carrying at least half
    of the weight of the central straddling cube."""
    w = w.as_weight()
    n = w.resolution
    ex = half_space_example(n, w.dim, boundary_cell=boundary_cell)
    cube = GridCube((0,) * w.dim, n)
    mask = ex.func.values > 0
    wq = float(w.values.sum())
    lower = float(w.values[mask].sum())
    value = max(lower, wq - lower) / wq
    side = "lower" if lower >= wq - lower else "upper"
    return {"value": value, "ok": value >= 0.5 - 1e-12, "side": side}


# ---------------------------------------------------------------------------
# Calibration corpus, frozen constants, regression checks.
# ---------------------------------------------------------------------------

def corpus_spec(suite: str = "default") -> dict:
    # The p-sweep corpus is a list of matched (function, weight) pairs.  A
    # pair only exercises the linear-in-p scaling when the function's
    # singular set sits where the weight is small, so pairs are curated
    # rather than taken as a full product.  Grid truncation caps reachable
    # ratio ranges (and hence usable weight constants) near log(N).
    if suite == "default":
        return {
            "suite": "default",
            "mode": RESTRICTED,
            "fw_family": "dyadic",
            "p_values": list(P_VALUES),
            "blocks": [
                {
                    "dim": 1,
                    "n": 512,
                    "functions": [
                        {"kind": "log", "center": 0.25},
                        {"kind": "log", "center": 0.5},
                        {"kind": "log", "center": 0.75},
                        {"kind": "log_rdb", "center": 0.25, "seed": 1, "depth": 6, "noise": 0.3},
                        {"kind": "log_rdb", "center": 0.5, "seed": 2, "depth": 6, "noise": 0.3},
                        # singularity at the minimum of the seed-4 depth-9
                        # oscillation, matching the exp_rdb weights below
                        {"kind": "log", "center": 0.2353515625},
                    ],
                    "weights": [
                        {"kind": "unit"},
                        {"kind": "power", "exponent": 2.0},
                        {"kind": "power", "exponent": 6.0},
                        {"kind": "two_valued", "ratio": 8.0},
                        {"kind": "a1", "delta": 0.5, "seed": 7},
                        {"kind": "a1", "delta": 0.9, "seed": 8},
                        {"kind": "exp_rdb", "lam": 1.5, "seed": 4, "depth": 9},
                        {"kind": "exp_rdb", "lam": 2.0, "seed": 4, "depth": 9},
                    ],
                    "pairs": [
                        [0, 0], [1, 0], [2, 0], [4, 0],
                        [1, 1], [4, 1],
                        [1, 2], [4, 2],
                        [0, 3], [3, 3],
                        [0, 4], [4, 4],
                        [0, 5], [3, 5], [4, 5],
                        [5, 6], [5, 7],
                    ],
                },
                {
                    "dim": 2,
                    "n": 64,
                    "functions": [
                        {"kind": "log", "center": 0.5},
                        {"kind": "log_rdb", "center": 0.5, "seed": 11, "depth": 4, "noise": 0.5},
                    ],
                    "weights": [
                        {"kind": "unit"},
                        {"kind": "power", "exponent": 2.0},
                    ],
                    "pairs": [[0, 0], [0, 1], [1, 0], [1, 1]],
                },
            ],
            "cube_seed": 101,
            "random_cubes": 8,
            "good_lambda": {"count": 100, "seed": 202},
            "nonlocal": {
                "dim": 1,
                "n": 128,
                "seeds": [21, 22, 23, 24, 25],
                "depth": 5,
                "side": 16,
                "anchors": 10,
            },
            "x": {
                "dim": 1,
                "n": 128,
                "member_seeds": [31, 32],
                "depth": 5,
                "weights": [
                    {"kind": "unit"},
                    {"kind": "power", "exponent": 2.0},
                    {"kind": "two_valued", "ratio": 8.0},
                    {"kind": "a1", "delta": 0.5, "seed": 7},
                    {"kind": "a1", "delta": 0.9, "seed": 8},
                    {"kind": "exp_rdb", "lam": 1.5, "seed": 4, "depth": 7},
                ],
            },
            "llogl": {"dim": 1, "n": 64, "ratios": [2.0, 8.0, 32.0], "min_side": 16},
            "rh": {
                "dim": 1,
                "n": 32,
                "weights": [
                    {"kind": "unit"},
                    {"kind": "power", "exponent": 2.0},
                    {"kind": "two_valued", "ratio": 8.0},
                    {"kind": "a1", "delta": 0.5, "seed": 7},
                    {"kind": "a1", "delta": 0.9, "seed": 8},
                ],
                "per_weight": 20,
                "seed": 303,
            },
            "cr": {
                "dim": 1,
                "n": 64,
                "weights": [
                    {"kind": "unit"},
                    {"kind": "power", "exponent": 2.0},
                    {"kind": "two_valued", "ratio": 8.0},
                    {"kind": "a1", "delta": 0.5, "seed": 7},
                ],
                "min_side": 16,
            },
            "gamma_samples": 64,
        }
    if suite == "quick":
        return {
            "suite": "quick",
            "mode": RESTRICTED,
            "fw_family": "dyadic",
            "p_values": [1, 2],
            "blocks": [
                {
                    "dim": 1,
                    "n": 64,
                    "functions": [
                        {"kind": "log", "center": 0.5},
                        {"kind": "log_rdb", "center": 0.25, "seed": 1, "depth": 4, "noise": 0.3},
                    ],
                    "weights": [
                        {"kind": "unit"},
                        {"kind": "power", "exponent": 2.0},
                        {"kind": "two_valued", "ratio": 8.0},
                    ],
                    "pairs": [[0, 0], [0, 1], [0, 2], [1, 0], [1, 1], [1, 2]],
                },
            ],
            "cube_seed": 101,
            "random_cubes": 4,
            "good_lambda": {"count": 25, "seed": 202},
            "nonlocal": {
                "dim": 1,
                "n": 64,
                "seeds": [21, 22],
                "depth": 4,
                "side": 8,
                "anchors": 5,
            },
            "x": {
                "dim": 1,
                "n": 64,
                "member_seeds": [31],
                "depth": 4,
                "weights": [
                    {"kind": "unit"},
                    {"kind": "two_valued", "ratio": 8.0},
                ],
            },
            "llogl": {"dim": 1, "n": 32, "ratios": [2.0, 8.0], "min_side": 8},
            "rh": {
                "dim": 1,
                "n": 16,
                "weights": [{"kind": "unit"}, {"kind": "two_valued", "ratio": 8.0}],
                "per_weight": 10,
                "seed": 303,
            },
            "cr": {
                "dim": 1,
                "n": 32,
                "weights": [{"kind": "unit"}, {"kind": "two_valued", "ratio": 8.0}],
                "min_side": 8,
            },
            "gamma_samples": 16,
        }
    raise GridError(f"unknown calibration suite {suite!r}")


def build_function(desc: dict, n: int, dim: int) -> GridFunction:
    kind = desc["kind"]
    if kind == "rdb":
        return random_dyadic_bmo(n, dim, desc["depth"], seed=desc["seed"])
    if kind == "half_space":
        return half_space_example(n, dim).func
    if kind == "log":
        return log_abs_demo(n, dim, center=desc["center"])
    if kind == "log_rdb":
        base = log_abs_demo(n, dim, center=desc["center"])
        noise = random_dyadic_bmo(n, dim, desc["depth"], seed=desc["seed"])
        return base.with_values(base.values + desc["noise"] * noise.values)
    raise GridError(f"unknown function kind {kind!r}")


def build_weight(desc: dict, n: int, dim: int) -> GridFunction:
    kind = desc["kind"]
    if kind == "unit":
        return GridFunction(dim, n, np.ones((n,) * dim))
    if kind == "power":
        return power_weight(n, dim, desc["exponent"])
    if kind == "two_valued":
        return two_valued_weight(n, dim, desc["ratio"])
    if kind == "a1":
        return a1_family(n, dim, desc["delta"], seed=desc["seed"])
    if kind == "spike":
        return spike(n, dim).as_weight(floor=True)
    if kind == "exp_rdb":
        b = random_dyadic_bmo(n, dim, desc["depth"], seed=desc["seed"])
        return exp_weight(b, desc["lam"])
    raise GridError(f"unknown weight kind {kind!r}")


def _dyadic_cubes_from(n: int, dim: int, min_side: int) -> list[GridCube]:
    cubes = []
    side = min_side
    while side <= n:
        stops = range(0, n - side + 1, side)
        if dim == 1:
            cubes.extend(GridCube((a,), side) for a in stops)
        else:
            cubes.extend(GridCube((a0, a1), side) for a0 in stops for a1 in stops)
        side *= 2
    return cubes


def _random_cubes(n: int, dim: int, count: int, rng: np.random.Generator) -> list[GridCube]:
    cubes = []
    for _ in range(count):
        side = int(rng.integers(max(2, n // 8), n // 2 + 1))
        anchor = tuple(int(a) for a in rng.integers(0, n - side + 1, size=dim))
        cubes.append(GridCube(anchor, side))
    return cubes


class CalibrationRun:
    """One deterministic pass over the calibration corpus.

    Parts are independent so a run can recompute only the constants a
    given verification suite needs.
    """

    PARTS = ("core", "local", "nonlocal", "x", "weights")

    def __init__(self, suite: str = "default"):
        self.spec = corpus_spec(suite)
        self.mode = self.spec["mode"]
        self.fw_family = self.spec["fw_family"]
        self._fields: dict = {}
        self._weights: dict = {}

    @property
    def corpus_hash(self) -> str:
        return stable_hash(self.spec)

    def _function(self, block_idx: int, fn_idx: int):
        key = ("f", block_idx, fn_idx)
        if key not in self._fields:
            block = self.spec["blocks"][block_idx]
            f = build_function(block["functions"][fn_idx], block["n"], block["dim"])
            self._fields[key] = (f, RatioFields.compute(f, self.mode))
        return self._fields[key]

    def _weight(self, block_idx: int, w_idx: int):
        key = ("w", block_idx, w_idx)
        if key not in self._weights:
            block = self.spec["blocks"][block_idx]
            w = build_weight(block["weights"][w_idx], block["n"], block["dim"])
            fw = fujii_wilson(w, self.mode, self.fw_family).a_infty
            self._weights[key] = (w, fw)
        return self._weights[key]

    def _block_cubes(self, block_idx: int) -> list[GridCube]:
        block = self.spec["blocks"][block_idx]
        n, dim = block["n"], block["dim"]
        rng = np.random.default_rng(self.spec["cube_seed"] + block_idx)
        return _dyadic_cubes_from(n, dim, max(1, n // 8)) + _random_cubes(
            n, dim, self.spec["random_cubes"], rng
        )

    # -- parts -------------------------------------------------------------

    def part_core(self) -> dict:
        """p-mean ratios, tail profiles and good-lambda checks on the
        (function, weight) pair corpus."""
        spec = self.spec
        p_values = spec["p_values"]
        cstar = -np.inf
        span = -np.inf
        kappa = np.inf
        p_monotone = True
        tails_monotone = True
        rates_negative = True
        gl_ok = True
        pair_count = 0
        gl_rng = np.random.default_rng(spec["good_lambda"]["seed"])
        for bi, block in enumerate(spec["blocks"]):
            cubes = self._block_cubes(bi)
            for fi, wi in block["pairs"]:
                f, fields = self._function(bi, fi)
                w, fw = self._weight(bi, wi)
                pair_count += 1
                wvals = w.values
                # per-pair supremum over cubes for each p; the span of
                # that profile is the linear-in-p proxy
                pair_norm = [-np.inf] * len(p_values)
                for cube in cubes:
                    num, den = ratio_parts_on_cube(fields, cube)
                    r = num / den
                    wseg = wvals[cube.slices]
                    lhs_list = [_weighted_pmean(r, wseg, p) for p in p_values]
                    for a, b in zip(lhs_list, lhs_list[1:]):
                        if b < a - 1e-9:
                            p_monotone = False
                    normalized = [
                        lhs / (p * fw) for lhs, p in zip(lhs_list, p_values)
                    ]
                    pair_norm = [max(a, b) for a, b in zip(pair_norm, normalized)]
                    cstar = max(cstar, max(normalized))
                    profile = tail_profile(
                        f, w, cube, self.mode, fields=fields
                    )
                    if np.any(np.diff(profile.mass) > 0):
                        tails_monotone = False
                    if profile.fit_ok:
                        if profile.fitted_rate >= 0:
                            rates_negative = False
                        else:
                            kappa = min(kappa, abs(profile.fitted_rate) * fw)
                if min(pair_norm) > 0:
                    span = max(span, max(pair_norm) / min(pair_norm))
                # good-lambda draws on the whole-domain cube
                full = GridCube((0,) * block["dim"], block["n"])
                num, den = ratio_parts_on_cube(fields, full)
                top = float(num.max())
                for _ in range(spec["good_lambda"]["count"]):
                    lam = float(gl_rng.uniform(0.0, top)) + 1e-9
                    gamma = float(np.exp(gl_rng.uniform(np.log(0.01), np.log(100.0))))
                    res = good_lambda(f, w, full, lam, gamma, self.mode, fields=fields)
                    gl_ok = gl_ok and res["ok"]
        return {
            "constants": {
                "pnorm_cstar": float(cstar),
                "pnorm_span": float(span),
                "tail_kappa": float(kappa),
            },
            "structural": {
                "pair_count": pair_count,
                "p_monotone": p_monotone,
                "tails_monotone": tails_monotone,
                "tail_rates_negative": rates_negative,
                "good_lambda_ok": gl_ok,
            },
        }

    def part_local(self) -> dict:
        """Local-dyadic numerator variant on power-of-two cubes."""
        spec = self.spec
        best = -np.inf
        for bi, block in enumerate(spec["blocks"]):
            if block["dim"] != 1:
                continue
            n = block["n"]
            cubes = _dyadic_cubes_from(n, 1, max(1, n // 8))
            for fi, wi in block["pairs"]:
                f, fields = self._function(bi, fi)
                w, fw = self._weight(bi, wi)
                for cube in cubes:
                    sub = f.values[cube.slices]
                    if float(sub.max()) == float(sub.min()):
                        continue
                    for p in spec["p_values"]:
                        rec = local_pnorm_ratio(
                            f, w, cube, p, self.mode,
                            a_infty=fw, sharp=fields.sharp,
                            family=self.fw_family,
                        )
                        best = max(best, rec.normalized)
        return {"constants": {"cp_cstar": float(best)}, "structural": {}}

    def part_nonlocal(self) -> dict:
        spec = self.spec["nonlocal"]
        n, dim, side = spec["n"], spec["dim"], spec["side"]
        lo, hi = side, n - 2 * side
        anchors = np.linspace(lo, hi, spec["anchors"]).astype(int)
        best = -np.inf
        count = 0
        for seed in spec["seeds"]:
            f = random_dyadic_bmo(n, dim, spec["depth"], seed=seed)
            for a in anchors:
                probe = nonlocal_bound_probe(f, GridCube((int(a),) * dim, side), self.mode)
                best = max(best, probe["max_ratio"])
                count += 1
        return {
            "constants": {"nonlocal_c": float(best)},
            "structural": {"nonlocal_count": count},
        }

    def part_x(self) -> dict:
        spec = self.spec["x"]
        n, dim = spec["n"], spec["dim"]
        lower = np.inf
        upper = -np.inf
        for wdesc in spec["weights"]:
            w = build_weight(wdesc, n, dim)
            fw = fujii_wilson(w, self.mode, self.fw_family).a_infty
            corpus = default_x_corpus(
                n, dim, seeds=tuple(spec["member_seeds"]), depth=spec["depth"], weight=w
            )
            xhat = x_estimate(w, corpus, self.mode)["x_hat"]
            lower = min(lower, xhat / fw)
            upper = max(upper, xhat / fw)
        return {
            "constants": {"x_lower": float(lower), "x_upper": float(upper)},
            "structural": {},
        }

    def part_weights(self) -> dict:
        """Reverse-Hoelder, L log L, square-root-maximal and Gamma-growth
        diagnostics."""
        spec = self.spec
        # L log L equivalence on the two-valued family plus a spike.
        ll = spec["llogl"]
        lo, hi = np.inf, -np.inf
        for ratio in ll["ratios"]:
            w = two_valued_weight(ll["n"], ll["dim"], ratio)
            for cube in _dyadic_cubes_from(ll["n"], ll["dim"], ll["min_side"]):
                r = llogl_ratio(w, cube, self.mode)["ratio"]
                lo, hi = min(lo, r), max(hi, r)
        wspike = spike(ll["n"], ll["dim"]).as_weight(floor=True)
        full = GridCube((0,) * ll["dim"], ll["n"])
        llogl_spike = llogl_ratio(wspike, full, self.mode)["ratio"]
        # Reverse-Hoelder on random cube/subset draws.
        rh = spec["rh"]
        rng = np.random.default_rng(rh["seed"])
        rh_ok = True
        for wdesc in rh["weights"]:
            w = build_weight(wdesc, rh["n"], rh["dim"])
            fw = fujii_wilson(w, self.mode, "all").a_infty
            for _ in range(rh["per_weight"]):
                side = int(rng.integers(1, rh["n"] + 1))
                anchor = tuple(
                    int(a) for a in rng.integers(0, rh["n"] - side + 1, size=rh["dim"])
                )
                cube = GridCube(anchor, side)
                mask = np.zeros((rh["n"],) * rh["dim"], dtype=bool)
                pick = rng.random((side,) * rh["dim"]) < rng.uniform(0.1, 0.9)
                mask[cube.slices] = pick
                res = reverse_holder_check(w, cube, mask, a_infty=fw, mode=self.mode)
                rh_ok = rh_ok and res["ok"]
        # Square-root-maximal construction: cell-ratio constant and floor.
        cr = spec["cr"]
        a1_bound = -np.inf
        v_min = np.inf
        for wdesc in cr["weights"]:
            w = build_weight(wdesc, cr["n"], cr["dim"])
            for cube in _dyadic_cubes_from(cr["n"], cr["dim"], cr["min_side"]):
                v = coifman_rochberg(w, cube, self.mode)
                a1_bound = max(a1_bound, a1_constant(v, self.mode))
                v_min = min(v_min, float(v.values[cube.slices].min()))
        ps = np.linspace(1.0, 64.0, spec["gamma_samples"])
        gamma_max = max(gamma_growth_check(p)["value"] for p in ps)
        gamma_ok = all(gamma_growth_check(p)["ok"] for p in ps)
        return {
            "constants": {
                "llogl_lo": float(lo),
                "llogl_hi": float(hi),
                "llogl_spike": float(llogl_spike),
                "a1_cr_bound": float(a1_bound),
            },
            "structural": {
                "rh_ok": rh_ok,
                "cr_min_v": float(v_min),
                "cr_floor_ok": bool(v_min >= 1.0 - 1e-12),
                "gamma_max": float(gamma_max),
                "gamma_ok": gamma_ok,
            },
        }

    def run(self, parts: tuple[str, ...] | None = None) -> dict:
        parts = parts or self.PARTS
        constants: dict = {}
        structural: dict = {}
        for part in parts:
            if part not in self.PARTS:
                raise GridError(f"unknown calibration part {part!r}")
            result = getattr(self, f"part_{part}")()
            constants.update(result["constants"])
            structural.update(result["structural"])
        return {
            "suite": self.spec["suite"],
            "corpus_hash": self.corpus_hash,
            "mode": self.mode,
            "fw_family": self.fw_family,
            "constants": constants,
            "structural": structural,
        }


def run_calibration(suite: str = "default", parts: tuple[str, ...] | None = None) -> dict:
    return CalibrationRun(suite).run(parts)


def freeze_text(result: dict) -> str:
    return json_text(
        {
            "suite": result["suite"],
            "corpus_hash": result["corpus_hash"],
            "mode": result["mode"],
            "fw_family": result["fw_family"],
            "constants": result["constants"],
        }
    ) + "\n"


def load_frozen(text: str) -> dict:
    return json_load(text)


def check_against_frozen(
    result: dict, frozen: dict, margin: float = REGRESSION_MARGIN
) -> list[dict]:
    """Compare recomputed constants with frozen ones within the margin.

    Only constants present in both are compared, so a partial recomputation
    checks exactly what it recomputed."""
    if result["corpus_hash"] != frozen["corpus_hash"]:
        raise StaleCalibrationError(
            "calibration corpus changed; re-freeze the constants"
        )
    rows = []
    for name in sorted(set(result["constants"]) & set(frozen["constants"])):
        observed = result["constants"][name]
        reference = frozen["constants"][name]
        scale = max(abs(reference), 1e-12)
        rows.append(
            {
                "name": name,
                "frozen": reference,
                "observed": observed,
                "ok": abs(observed - reference) <= margin * scale,
            }
        )
    return rows
