from dataclasses import replace

import numpy as np
import pytest

from spinebalance import COLUMNS, ConfigError, ExperimentConfig, TiltParams, compare, run_cell, run_sweep
from spinebalance.experiment import cell_rng, default_frequencies, ordering_holds, summarize

SMALL = ExperimentConfig.from_dict({"sweep": {"frequencies": [0.5, 2.1, 4.5], "repetitions": 3}})


def test_default_frequencies():
    assert default_frequencies() == pytest.approx([0.5 + 0.4 * m for m in range(11)], abs=1e-12)
    assert len(ExperimentConfig().sweep.frequencies) == 11
    assert ExperimentConfig().sweep.repetitions == 10


def test_config_round_trip():
    cfg = ExperimentConfig()
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg
    assert ExperimentConfig.from_dict({}) == cfg


@pytest.mark.parametrize(
    "data",
    [
        {"nope": 1},
        {"geometry": {"spine_length": -1}},
        {"gait": {"duty": 0.7}},
        {"controller": {"amplitude": -0.1}},
        {"controller": {"initial_phase": "sometimes"}},
        {"sweep": {"repetitions": 0}},
        {"sweep": {"samples_per_period": 250}},
        {"sweep": {"frequencies": []}},
        {"tilt": {"damping": -1}},
        {"tilt": {"unknown": 1}},
        {"output_dir": 3},
        [],
    ],
)
def test_bad_configs_raise_config_error(data):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(data)


def test_cell_trace_covers_whole_half_strides():
    cfg = ExperimentConfig()
    rec = run_cell(cfg, "balance_spine", 0, 0)
    m = cfg.sweep.samples_per_period // 2
    assert rec.data.shape == (cfg.sweep.half_strides * m, len(COLUMNS))
    t = rec.column("t")
    T = 1.0 / cfg.sweep.frequencies[0]
    # first recorded sample is the first cell of a half stride
    assert ((t[0] / (T / cfg.sweep.samples_per_period)) - 0.5) % m == pytest.approx(0.0, abs=1e-9)


def test_repetitions_use_different_offsets_but_are_reproducible():
    offsets = [int(cell_rng(SMALL.sweep.seed, 1, r).integers(0, 256)) for r in range(10)]
    assert len(set(offsets)) > 1
    assert offsets == [int(cell_rng(SMALL.sweep.seed, 1, r).integers(0, 256)) for r in range(10)]
    a = [run_cell(SMALL, "spine", 1, r).column("t")[0] for r in range(10)]
    b = [run_cell(SMALL, "spine", 1, r).column("t")[0] for r in range(10)]
    assert a == b and len(set(a)) > 1


def test_balance_trace_hits_zero_distance_at_quarter_instants():
    cfg = replace(ExperimentConfig(), sweep=replace(ExperimentConfig().sweep, samples_per_period=512))
    rec = run_cell(cfg, "balance_spine", 0, 0)
    d = rec.column("dis")
    m = 256
    # the zero crossing sits exactly between the two cells around each quarter
    for h in range(cfg.sweep.half_strides):
        q = h * m + m // 2
        assert d[q - 1] * d[q] < 0
        assert np.count_nonzero(np.diff(np.sign(d[h * m : (h + 1) * m]))) == 1


def test_sweep_is_ordered_and_parallel_safe():
    serial = run_sweep(SMALL, "balance_spine", jobs=1)
    parallel = run_sweep(SMALL, "balance_spine", jobs=2)
    assert [(r.frequency, r.repetition) for r in serial] == [(f, k) for f in SMALL.sweep.frequencies for k in range(3)]
    for a, b in zip(serial, parallel):
        assert np.array_equal(a.data, b.data) and a.metrics == b.metrics


def test_summary_has_mean_and_std_per_frequency():
    recs = run_sweep(SMALL, "non_spine", keep_traces=False)
    s = summarize(recs, SMALL.sweep.frequencies)
    assert list(s) == ["0.5", "2.1", "4.5"]
    assert s["0.5"]["repetitions"] == 3
    assert set(s["0.5"]["mean_abs_roll"]) == {"mean", "std"}


def test_comparison_table_shape_and_winners():
    res = compare(SMALL)
    assert len(res["rows"]) == 3 * 3
    assert all(w["mean_abs_roll"] == "balance_spine" for w in res["winners"].values())


def test_zero_amplitude_makes_all_controllers_equal():
    cfg = ExperimentConfig.from_dict(
        {"controller": {"amplitude": 0.0}, "sweep": {"frequencies": [0.9], "repetitions": 2}}
    )
    rows = compare(cfg)["rows"]
    assert rows[0] == {**rows[1], "controller": rows[0]["controller"]}
    assert rows[0] == {**rows[2], "controller": rows[0]["controller"]}


def test_ordering_helper():
    res = compare(SMALL)
    assert all(ordering_holds(res, "mean_abs_roll", ["balance_spine", "spine", "non_spine"]).values())
    assert not any(ordering_holds(res, "mean_abs_roll", ["non_spine", "spine"]).values())


def test_metrics_refine_consistently():
    base = ExperimentConfig.from_dict({"sweep": {"frequencies": [0.5, 4.5], "repetitions": 1}})
    fine = replace(base, sweep=replace(base.sweep, samples_per_period=1024))
    for kind in ("non_spine", "spine", "balance_spine"):
        for fi in range(2):
            a = run_cell(base, kind, fi, 0, keep_trace=False).metrics.to_dict()
            b = run_cell(fine, kind, fi, 0, keep_trace=False).metrics.to_dict()
            for name in a:
                assert a[name] == pytest.approx(b[name], rel=0.01), (kind, fi, name)


def test_undamped_proxy_still_runs():
    cfg = replace(SMALL, tilt=TiltParams(damping=0.0, reset_on_switch=False))
    rec = run_cell(cfg, "spine", 0, 0)
    assert np.all(np.isfinite(rec.data))
