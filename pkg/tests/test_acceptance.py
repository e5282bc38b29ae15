"""Acceptance criteria 1-8.

Each check returns ``(ok, detail)``; the pytest wrappers time it, print one
PASS/FAIL line per criterion and then assert both the result and the runtime
bound. Run ``python tests/test_acceptance.py`` for the summary alone.
"""

from __future__ import annotations

import math
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

from spinebalance import (
    ComPosition,
    ControllerKind,
    ExperimentConfig,
    RobotGeometry,
    Segment,
    SpineControllerParams,
    StrideState,
    balance_state,
    compare,
    dis_trace,
    flexion_at,
    flexion_trajectory,
    footholds,
    hind_displacement,
    initial_state,
    read_trace,
    run_cell,
    run_controller,
    support_line,
    warp_factor,
    write_trace,
)
from spinebalance.experiment import controller_for, ordering_holds
from spinebalance.gait import stride_arrays
from spinebalance.kinematics import SERIES_THRESHOLD
from spinebalance.solver import BalanceProblem, count_sign_changes, solve_balance_flexion

RNG_SEED = 20240611


def random_geometry(rng):
    return RobotGeometry(*rng.uniform(0.005, 0.5, size=4))


def criterion_1():
    rng = np.random.default_rng(RNG_SEED)
    worst, exact = 0.0, True
    R_sw = SERIES_THRESHOLD / 2  # |theta_s| at the switch
    R = np.array([R_sw, -R_sw, np.nextafter(R_sw, 0), -np.nextafter(R_sw, 0)])
    for _ in range(1000):
        g = random_geometry(rng)
        l_h = rng.uniform(-0.1, 0.1)
        s = np.array(hind_displacement(g, l_h, R, method="series"))
        d = np.array(hind_displacement(g, l_h, R, method="direct"))
        a = np.array(hind_displacement(g, l_h, R))
        worst = max(worst, float(np.max(np.abs(s - d))), float(np.max(np.abs(a - d))))
        exact &= hind_displacement(g, l_h, 0.0) == (l_h, g.hind_hip_halfwidth)
    return worst < 1e-9 and exact, f"max series/direct gap {worst:.2e} m, exact at R=0: {exact}"


def two_point(p, q):
    (x1, y1), (x2, y2) = p, q
    return np.array([y1 - y2, x2 - x1, x1 * y2 - x2 * y1])


def criterion_2():
    # 100 random geometries x 100 random (stride, R) samples, evaluated in batches
    rng = np.random.default_rng(RNG_SEED + 1)
    worst_res, worst_oracle, positive = 0.0, 0.0, True
    for _ in range(100):
        g = random_geometry(rng)
        l_f, l_h = rng.uniform(-0.1, 0.1, size=(2, 100))
        R = rng.uniform(-math.pi / 2, math.pi / 2, size=100)
        st = balance_state(g, l_f, l_h, R, ComPosition(), 0)
        # footholds from the displacement map alone, independent of the line formula
        l_hx, l_hy = hind_displacement(g, l_h, R)
        fore = np.stack([l_f, np.full_like(l_f, -g.fore_hip_halfwidth)])
        hind = np.stack([l_hx - g.body_length - g.spine_length, l_hy])
        coef = np.stack([st.a, st.b, st.c])
        res = np.abs(coef[0] * fore[0] + coef[1] * fore[1] + coef[2])
        res = np.maximum(res, np.abs(coef[0] * hind[0] + coef[1] * hind[1] + coef[2]))
        worst_res = max(worst_res, float(res.max()))
        oracle = two_point(hind, fore)
        scale = np.sum(coef[:2] * oracle[:2], axis=0) / np.sum(oracle[:2] ** 2, axis=0)
        positive &= bool(np.all(scale > 0))
        mismatch = np.max(np.abs(coef / scale - oracle), axis=0) / np.hypot(oracle[0], oracle[1])
        worst_oracle = max(worst_oracle, float(mismatch.max()))
        # the scalar API agrees with the batch on a spot sample
        line = support_line(g, StrideState(l_f[0], l_h[0]), R[0])
        positive &= (line.a, line.b, line.c) == (st.a[0], st.b[0], st.c[0])
    ok = worst_res < 1e-12 and worst_oracle < 1e-12 and positive
    return ok, (
        f"10^4 samples: max incidence residual {worst_res:.2e}, "
        f"max oracle mismatch {worst_oracle:.2e}, positive scale: {positive}"
    )


def criterion_3():
    cfg = ExperimentConfig()
    problem = BalanceProblem.at_balance_instant(cfg.geometry, cfg.gait, cfg.com)
    R = np.linspace(-math.pi / 2, math.pi / 2, 100_001)
    d = problem.distance(R)
    diff = np.diff(d)
    monotone = bool(np.all(diff > 0) or np.all(diff < 0))
    changes = count_sign_changes(d)
    i = int(np.flatnonzero(np.sign(d[1:]) != np.sign(d[:-1]))[0])
    crossing = R[i] - d[i] * (R[i + 1] - R[i]) / (d[i + 1] - d[i])
    res = solve_balance_flexion(problem)
    spacing = R[1] - R[0]
    ok = monotone and changes == 1 and abs(res.residual) < 1e-9 and abs(res.root - crossing) <= spacing
    return ok, (
        f"strictly monotone: {monotone}, sign changes {changes}, residual {abs(res.residual):.1e} m, "
        f"|root - grid crossing| {abs(res.root - crossing):.1e} rad (spacing {spacing:.1e})"
    )


def criterion_4():
    cfg = ExperimentConfig()
    T = 1.0
    ctrl = controller_for(cfg, "balance_spine", T)
    assert ctrl.time_step == T / 1000
    k1 = warp_factor(ctrl.balance_target, ctrl.amplitude, Segment.FIRST_QUARTER)
    k2 = warp_factor(ctrl.balance_target, ctrl.amplitude, Segment.SECOND_QUARTER)
    sum_ok = k1 + k2 == 2.0

    def step(params):
        state = initial_state(params)
        R = [flexion_at(params, state, 0.0)[0]]
        for n in range(1, 1001):
            r, state = flexion_at(params, state, n * params.time_step)
            R.append(r)
        return np.array(R), state

    R, state = step(ctrl)
    period_err = abs(state.f_T - 2 * math.pi)
    period_ok = period_err <= ctrl.k_max * 2 * math.pi / 1000
    hit_err = abs(abs(R[250]) - ctrl.balance_target)
    hit_ok = hit_err < 1e-6

    ident = SpineControllerParams(ControllerKind.BALANCE_SPINE, ctrl.amplitude, T, ctrl.initial_phase, balance_target=0.0)
    spine = SpineControllerParams(ControllerKind.SPINE, ctrl.amplitude, T, ctrl.initial_phase)
    gap = float(np.max(np.abs(step(ident)[0] - step(spine)[0])))
    ident_ok = gap <= 1e-12
    ok = sum_ok and period_ok and hit_ok and ident_ok
    return ok, (
        f"(a) k1+k2=2: {sum_ok}; (b) |f_T(T)-2pi| {period_err:.1e}; (c) ||R(T/4)|-R'| {hit_err:.1e} rad; "
        f"(d) R'=0 vs spine {gap:.1e}"
    )


def criterion_5():
    cfg = ExperimentConfig()
    T = cfg.gait.period
    ctrl = controller_for(cfg, "balance_spine", T)
    tb = np.array([(2 * n + 1) * T / 4 for n in range(4)])
    diag = np.array([n % 2 for n in range(4)])
    l_f, l_h = stride_arrays(cfg.gait, tb, diagonal=diag)
    R, _, _ = flexion_trajectory(ctrl, tb)
    # the stepped controller at t_s = T/1000 reaches the same instants
    _, R_steps, _, _ = run_controller(ctrl, 2000)
    R_stepped = R_steps[[250, 750, 1250, 1750]]
    bal = np.abs(balance_state(cfg.geometry, l_f, l_h, R, cfg.com, diag).dis)
    bal = np.maximum(bal, np.abs(balance_state(cfg.geometry, l_f, l_h, R_stepped, cfg.com, diag).dis))
    non = abs(float(balance_state(cfg.geometry, l_f[0], l_h[0], 0.0, cfg.com, 0).dis))
    ok = bool(np.all(bal < 1e-6)) and non > 10 * 1e-6
    return ok, f"balance_spine max |dis(t_b)| {bal.max():.1e} m over n=0..3; non_spine |dis(T/4)| {non:.2e} m"


def criterion_6():
    cfg = ExperimentConfig()
    assert len(cfg.sweep.frequencies) == 11 and cfg.sweep.repetitions == 10
    res = compare(cfg)
    roll = ordering_holds(res, "mean_abs_roll", ["balance_spine", "spine", "non_spine"])
    p_spine = ordering_holds(res, "mean_abs_pitch", ["spine", "non_spine"])
    p_bal = ordering_holds(res, "mean_abs_pitch", ["balance_spine", "non_spine"])
    n_roll = sum(roll.values())
    n_pitch = sum(p_spine[f] and p_bal[f] for f in roll)
    ok = n_roll == 11 and n_pitch == 11
    return ok, f"roll balance<spine<non at {n_roll}/11 frequencies; pitch both spines<non at {n_pitch}/11"


def criterion_7():
    cfg = ExperimentConfig()
    worst = 0.0
    for kind in ControllerKind:
        ctrl = controller_for(cfg, kind, cfg.gait.period)
        _, d = dis_trace(cfg.geometry, cfg.gait, ctrl, ComPosition(cfg.com.cx, 0.0), 1024)
        worst = max(worst, float(np.max(np.abs(d[512:] + d[:512]))))
    return worst < 1e-9, f"max |dis(t+T/2)+dis(t)| {worst:.1e} m over all controllers"


def criterion_8():
    cfg = ExperimentConfig.from_dict({"sweep": {"frequencies": [0.5, 2.5, 4.5], "repetitions": 2}})
    same_bytes, identity, count = True, True, 0
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        for kind in ControllerKind:
            for fi in range(3):
                for rep in range(2):
                    a = write_trace(run_cell(cfg, kind, fi, rep), tmp / "a" / f"{kind.value}{fi}{rep}.csv")
                    rec = run_cell(cfg, kind, fi, rep)
                    b = write_trace(rec, tmp / "b" / a.name)
                    same_bytes &= a.read_bytes() == b.read_bytes()
                    same_bytes &= a.with_suffix(".json").read_bytes() == b.with_suffix(".json").read_bytes()
                    back = read_trace(b)
                    identity &= (
                        back.data.shape == rec.data.shape
                        and np.array_equal(back.data, rec.data)
                        and back.metrics == rec.metrics
                        and back.config == rec.config
                        and (back.controller, back.frequency, back.seed, back.repetition)
                        == (rec.controller, rec.frequency, rec.seed, rec.repetition)
                    )
                    count += 1
    return same_bytes and identity, f"{count} records: byte-identical reruns {same_bytes}, read(write(r)) == r {identity}"


CRITERIA = [
    (1, "kinematic singularity", criterion_1, 1.0),
    (2, "support-line incidence", criterion_2, 1.0),
    (3, "monotone balance distance", criterion_3, 5.0),
    (4, "warp correctness", criterion_4, 1.0),
    (5, "balance-status distribution", criterion_5, 1.0),
    (6, "controller ordering over the sweep", criterion_6, 30.0),
    (7, "mirror antisymmetry", criterion_7, 1.0),
    (8, "determinism and I/O", criterion_8, 1.0),
]


def evaluate(number, name, fn, limit):
    t0 = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - t0
    fast = elapsed < limit
    status = "PASS" if ok and fast else "FAIL"
    line = f"criterion {number} [{status}] {name}: {detail}; runtime {elapsed:.2f} s (limit {limit:g} s)"
    return ok, fast, line


@pytest.mark.parametrize("number,name,fn,limit", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, name, fn, limit, capsys):
    ok, fast, line = evaluate(number, name, fn, limit)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line
    assert fast, line


if __name__ == "__main__":
    results = [evaluate(*c) for c in CRITERIA]
    for _, _, line in results:
        print(line)
    sys.exit(0 if all(ok and fast for ok, fast, _ in results) else 1)
