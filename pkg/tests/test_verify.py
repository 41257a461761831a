import numpy as np
import pytest

from oslx.grid import GridCube, GridError, GridFunction
from oslx.operators import DegenerateInputError
from oslx.corpus import random_dyadic_bmo, two_valued_weight
from oslx.verify import (
    CalibrationRun,
    RatioFields,
    StaleCalibrationError,
    char_lower_bound,
    check_against_frozen,
    corpus_spec,
    default_x_corpus,
    freeze_text,
    gamma_growth_check,
    good_lambda,
    layer_cake_bounds,
    layer_cake_lp,
    load_frozen,
    local_pnorm_ratio,
    pnorm_ratio,
    tail_profile,
    x_estimate,
)


@pytest.fixture(scope="module")
def small_pair():
    f = random_dyadic_bmo(64, 1, 4, seed=1)
    w = two_valued_weight(64, 1, 4.0)
    fields = RatioFields.compute(f)
    return f, w, fields


def test_pnorm_monotone_in_p(small_pair):
    f, w, fields = small_pair
    q = GridCube((0,), 64)
    lhs = [pnorm_ratio(f, w, q, p, fields=fields, a_infty=1.3).lhs for p in (1, 2, 4, 8)]
    assert all(b >= a - 1e-9 for a, b in zip(lhs, lhs[1:]))


def test_pnorm_rejects_bad_inputs(small_pair):
    f, w, fields = small_pair
    q = GridCube((0,), 64)
    with pytest.raises(DegenerateInputError):
        pnorm_ratio(GridFunction(1, 64, np.ones(64)), w, q, 1)
    with pytest.raises(GridError):
        pnorm_ratio(f, w, q, 0.5)


def test_pnorm_normalization(small_pair):
    f, w, fields = small_pair
    q = GridCube((0,), 64)
    rec = pnorm_ratio(f, w, q, 4, fields=fields, a_infty=2.0)
    assert abs(rec.normalized - rec.lhs / (4 * 2.0)) < 1e-15


def test_local_pnorm_constant_on_cube(small_pair):
    f, w, fields = small_pair
    flat = GridFunction(1, 64, np.concatenate([np.zeros(32), np.ones(32)]))
    with pytest.raises(DegenerateInputError):
        local_pnorm_ratio(flat, w, GridCube((0,), 16), 1, a_infty=1.0)


def test_local_pnorm_matches_direct(small_pair):
    f, w, fields = small_pair
    q = GridCube((16,), 16)
    rec = local_pnorm_ratio(f, w, q, 1, a_infty=1.0, sharp=fields.sharp)
    from oslx.operators import local_maximal
    num = local_maximal(f, q)
    den = fields.sharp.values[q.slices]
    wseg = w.values[q.slices]
    want = float((num / den * wseg).sum() / wseg.sum())
    assert abs(rec.lhs - want) < 1e-12


def test_tail_profile_invariants(small_pair):
    f, w, fields = small_pair
    q = GridCube((0,), 64)
    prof = tail_profile(f, w, q, fields=fields)
    assert np.all(np.diff(prof.mass) <= 0)
    assert np.all((prof.mass >= 0) & (prof.mass <= 1))
    num, den = fields.maximal.values - fields.maximal.values.min(), fields.sharp.values
    frac_positive = float(w.values[(num / den) > 0].sum()) / w.values.sum()
    assert abs(prof.mass[0] - frac_positive) < 1e-12
    assert prof.mass[-1] == 0.0  # grid extends past the max ratio


def test_tail_profile_flat_window_is_unfit(small_pair):
    f, w, fields = small_pair
    q = GridCube((0,), 64)
    prof = tail_profile(f, w, q, t_grid=np.array([0.0, 1e-9, 2e-9]), fields=fields)
    assert not prof.fit_ok and np.isnan(prof.fitted_rate)


def test_good_lambda(small_pair):
    f, w, fields = small_pair
    q = GridCube((0,), 64)
    num, _ = (fields.maximal.values - fields.maximal.values[q.slices].min(),
              fields.sharp.values)
    top = float(num.max())
    res = good_lambda(f, w, q, top + 1.0, 0.5, fields=fields)
    assert res["mass"] == 0.0 and res["ok"]
    # gamma large: the sharp constraint is vacuous
    big = good_lambda(f, w, q, 0.3, 1e9, fields=fields)
    direct = float(w.values[num > 0.3].sum()) / w.values.sum()
    assert abs(big["mass"] - direct) < 1e-12
    rng = np.random.default_rng(0)
    for _ in range(25):
        lam = float(rng.uniform(0.01, top))
        gam = float(np.exp(rng.uniform(np.log(0.01), np.log(100))))
        assert good_lambda(f, w, q, lam, gam, fields=fields)["ok"]


def test_layer_cake(small_pair):
    f, w, fields = small_pair
    q = GridCube((0,), 64)
    num, den = (fields.maximal.values - fields.maximal.values.min(), fields.sharp.values)
    r = num / den
    dense = tail_profile(f, w, q, t_grid=np.linspace(0, r.max() * 1.001, 5000),
                         fields=fields)
    for p in (1, 2, 4):
        direct = float(((r ** p * w.values).sum() / w.values.sum()) ** (1 / p))
        lo, hi = layer_cake_bounds(dense, p)
        assert lo - 1e-9 <= direct <= hi + 1e-9
        assert lo - 1e-9 <= layer_cake_lp(dense, p) <= hi + 1e-9
    empty = tail_profile(f, w, q, t_grid=np.array([r.max() * 2, r.max() * 3]),
                         fields=fields)
    assert layer_cake_lp(empty, 2) == 0.0


def test_gamma_growth():
    assert gamma_growth_check(1.0)["value"] == 1.0
    ps = np.linspace(1, 64, 64)
    vals = [gamma_growth_check(p) for p in ps]
    assert all(v["ok"] for v in vals)
    assert max(v["value"] for v in vals) <= 1.2


def test_x_estimate_unit_weight_half_space_bound():
    w = GridFunction(1, 64, np.ones(64))
    corpus = default_x_corpus(64, 1, weight=w)
    res = x_estimate(w, corpus)
    assert res["x_hat"] >= 0.5
    assert any(row["name"] == "half_space" for row in res["table"])


def test_char_lower_bound():
    unit = GridFunction(1, 64, np.ones(64))
    res = char_lower_bound(unit)
    assert abs(res["value"] - 0.5) < 1e-12 and res["ok"]
    skew = two_valued_weight(64, 1, 8.0)
    res2 = char_lower_bound(skew)
    assert res2["value"] > 0.5 and res2["ok"]


def test_corpus_spec_is_stable():
    a = corpus_spec("quick")
    b = corpus_spec("quick")
    assert a == b
    with pytest.raises(GridError):
        corpus_spec("nope")


def test_freeze_and_check_roundtrip():
    run = CalibrationRun("quick")
    result = run.run(parts=("weights",))
    frozen = load_frozen(freeze_text(run.run()))
    rows = check_against_frozen(result, frozen)
    assert rows and all(r["ok"] for r in rows)
    # margin behavior
    bumped = dict(result)
    bumped["constants"] = {k: v * 1.2 for k, v in result["constants"].items()}
    rows2 = check_against_frozen(bumped, frozen)
    assert not all(r["ok"] for r in rows2)
    stale = dict(frozen)
    stale["corpus_hash"] = "0" * 64
    with pytest.raises(StaleCalibrationError):
        check_against_frozen(result, stale)


def test_calibration_rerun_is_bitwise_identical():
    from oslx.report import json_text
    a = CalibrationRun("quick").run()
    b = CalibrationRun("quick").run()
    assert json_text(a) == json_text(b)
