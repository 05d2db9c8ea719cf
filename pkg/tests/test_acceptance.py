"""End-to-end acceptance checks, one test per headline claim.

Each test exercises a whole claim at its stated tolerance and time budget;
the conftest hook prints a PASS/FAIL line per criterion after the run.
"""

import math
import random
import time
from dataclasses import replace
from fractions import Fraction as F

import pytest

from discbilliards.constructions import (
    NEAR_TRIPLE_FINALS,
    Side,
    budget,
    build_1d_max,
    build_foch_like,
    build_main,
    build_near_triple,
    build_small_family,
    verify_scenario,
)
from discbilliards.core import Precision
from discbilliards.limit_process import (
    GapInit,
    build_limit,
    conservation_check,
    convergence_experiment,
    discontinuities,
    random_gap_init,
)
from discbilliards.pinned import ArmPhase, closed_form_a1, run_main_schedule
from discbilliards.simulator import (
    CollisionKind,
    SimConfig,
    reverse_time,
    run,
)


def _assert_budget(elapsed: float, budget_s: float, what: str) -> None:
    assert elapsed < budget_s, f"{what} took {elapsed:.2f}s, budget {budget_s}s"


# --------------------------------------------------------------------------
# 1. collinear discs attain the pairwise maximum


def test_criterion_01_oned_counts():
    t0 = time.perf_counter()
    for n in range(2, 13):
        result = verify_scenario(build_1d_max(n))
        assert result.report.proper_count == n * (n - 1) // 2, f"n={n}"
        assert result.passed
    _assert_budget(time.perf_counter() - t0, 1.0, "collinear sweep")


# --------------------------------------------------------------------------
# 2. three discs: three collisions forward, one backward


def test_criterion_02_reversal_asymmetry():
    t0 = time.perf_counter()
    sc = build_foch_like()
    report = run(sc.initial, sc.injections, sc.config)
    times = [float(e.time) for e in report.events if e.kind is CollisionKind.PROPER]
    assert len(times) == 3
    for got, want in zip(times, (0.012987, 0.0193063, 10.4153)):
        assert got == pytest.approx(want, rel=1e-3)
    assert float(report.final_state.time) == pytest.approx(10.4153, rel=1e-3)
    reversed_report = run(reverse_time(sc.initial), cfg=SimConfig(stop_time=2.0))
    assert reversed_report.proper_count == 1
    _assert_budget(time.perf_counter() - t0, 1.0, "three-disc runs")
    # Centers at the third collision (the run halts right there), compared
    # per disc as |got - reference| <= 1e-2 |reference|.  The P1 and P2
    # reference rows agree with the straight-line motion fixed by the first
    # two exchanges to every printed digit.  The P3 reference landing would
    # need an inbound x-velocity of 0.68145, but the first contact is
    # exactly head-on by construction (0.6622 = 77 * 0.0086) and therefore
    # fixes 0.6622; that row cannot be reproduced from these inputs, so it
    # is asserted last and reports honestly.
    finals = (
        ("P1", (-2.906, 800.963)),
        ("P2", (6.98517, -0.00268084)),
        ("P3", (7.08868, -2.0)),
    )
    for label, want in finals:
        got = report.final_state.ball(label).center
        err = math.hypot(float(got.x) - want[0], float(got.y) - want[1])
        rel = err / math.hypot(*want)
        assert rel <= 1e-2, (
            f"{label}: got ({float(got.x):.6f}, {float(got.y):.6f}), "
            f"reference {want}, vector-relative error {rel:.2e}"
        )


# --------------------------------------------------------------------------
# 3. small families beat the pairwise count by one


def test_criterion_03_small_family_counts():
    for n, want in ((4, 7), (5, 11), (6, 16)):
        t0 = time.perf_counter()
        result = verify_scenario(build_small_family(n))
        assert result.report.proper_count >= want, f"n={n}"
        assert result.passed
        _assert_budget(time.perf_counter() - t0, 30.0, f"small family n={n}")


# --------------------------------------------------------------------------
# 4. staged construction reaches f(n), with per-stage floors


def _check_main(n: int, stage_floors) -> None:
    result = verify_scenario(build_main(n))
    assert result.passed, f"n={n} stages {[s.got for s in result.stages]}"
    assert result.report.proper_count >= budget(n).f
    got = [s.got for s in result.stages]
    assert got[0] == stage_floors[0], f"n={n} preparation count"
    for i, floor in enumerate(stage_floors[1:], start=1):
        assert got[i] >= floor, f"n={n} stage {i}"


def test_criterion_04_staged_counts():
    t0 = time.perf_counter()
    _check_main(6, (2, 6, 7))
    _check_main(7, (2, 6, 7, 8))
    _assert_budget(time.perf_counter() - t0, 600.0, "staged builds n=6,7")
    # stretch size: three discs per arm, forty-five collisions
    stretch = verify_scenario(build_main(9))
    assert stretch.report.proper_count >= budget(9).f == 45
    assert stretch.passed


# --------------------------------------------------------------------------
# 5. externally scheduled waves match the closed forms


def test_criterion_05_pinned_closed_forms():
    t0 = time.perf_counter()
    for n1 in range(1, 11):
        hist = run_main_schedule(n1)
        for k in range(1, n1 + 1):
            got_b = hist.a1_after_b_hits[k - 1]
            want_b = closed_form_a1(k, ArmPhase.TOWARD_C)
            got_c = hist.a1_after_c_hits[k - 1]
            want_c = closed_form_a1(k, ArmPhase.TOWARD_B)
            assert abs(got_b.x - want_b.x) <= 1e-12 and abs(got_b.y - want_b.y) <= 1e-12
            assert abs(got_c.x - want_c.x) <= 1e-12 and abs(got_c.y - want_c.y) <= 1e-12
    _assert_budget(time.perf_counter() - t0, 1.0, "wave schedules")


# --------------------------------------------------------------------------
# 6. the exact limit evolution: census, conservation, terminal gaps


def test_criterion_06_limit_exactness():
    t0 = time.perf_counter()
    rng = random.Random(20250825)
    for _ in range(50):
        m = rng.randint(1, 4)
        n1 = rng.randint(1, 3)
        g = random_gap_init(rng, m, n1)
        L = build_limit(g, m, n1)
        assert len(discontinuities(L)) == m - 1 + n1 * (n1 + 1)
        for t in list(L.tB) + list(L.tC):
            rep = conservation_check(L, t)
            assert rep.passed and rep.energy == 0
        T = L.horizon
        spread = T - L.tC_time(n1)
        vals = {lab: L.component(lab).value(T) for lab in L.labels}
        for j in range(1, n1 + 1):
            assert vals[f"C{j}"] - vals[f"C{j - 1}"] >= F(3, 4**n1) * spread >= 1
            bgap = vals[f"B{j}"] - vals[f"B{j - 1}"]
            assert bgap >= (F(1, 8) * spread if j == n1 else 1)
        ratio = (vals["B1"] - vals["B0"]) / (vals["C1"] - vals["C0"])
        if n1 == 1:
            assert ratio <= F(2, 3)
        else:
            assert ratio >= F(3, 2) + F(2 ** (2 * n1 + 1)) / (3 * T * g.rho)
        if m >= 2:
            assert vals["A1"] - vals["A2"] >= F(3, 2 ** (2 * n1 + 1)) * spread >= F(1, 2)
        for k in range(2, m):
            assert vals[f"A{k}"] - vals[f"A{k + 1}"] == g.GA[k - 2]
        last = L.tC_time(n1)
        assert (m - 1 + F(2 ** (2 * n1 + 1) - 2, 3)) / g.rho < last
        assert last < m - 1 + F(2 ** (2 * n1 + 1), 3)
    _assert_budget(time.perf_counter() - t0, 5.0, "50 randomized limits")


# --------------------------------------------------------------------------
# 7. simulations approach the limit as the scale shrinks


def test_criterion_07_convergence():
    t0 = time.perf_counter()
    cases = (
        (GapInit(ZB0=F(1, 2), ZC0=F(1, 2), GA=(), GB=(F(2, 3),), GC=(F(1),), rho=F(3, 2)), 1, 1),
        (
            GapInit(
                ZB0=F(1, 4),
                ZC0=F(1, 4),
                GA=(F(1, 2),),
                GB=(F(1, 2), F(3, 4)),
                GC=(F(7, 8), F(1)),
                rho=2,
            ),
            2,
            2,
        ),
    )
    for g, m, n1 in cases:
        rows = convergence_experiment(g, m, n1, (1e-2, 1e-3, 1e-4))
        sups = [r.sup_dist for r in rows]
        for earlier, later in zip(sups, sups[1:]):
            assert later < 2.0 * earlier, f"m={m} n1={n1} sups={sups}"
        assert sups[-1] < sups[0]
        assert rows[-1].proper_count == rows[-1].expected_count
        # scaled gaps never dip below -2*eps*(1+t)^2 at any recorded time
        assert all(r.gap_margin >= 0.0 for r in rows), f"m={m} n1={n1}"
    _assert_budget(time.perf_counter() - t0, 120.0, "eps sweeps")


# --------------------------------------------------------------------------
# 8. a near-triple contact resolves differently per bias side


def test_criterion_08_near_triple_finals():
    t0 = time.perf_counter()
    finals = {}
    for side in (Side.LEFT, Side.RIGHT):
        sc = build_near_triple(1e-3, side)
        report = run(sc.initial, sc.injections, sc.config)
        assert report.proper_count == 3
        finals[side] = {
            label: report.final_state.ball(label).velocity.as_floats()
            for label in ("A1", "B1", "C1")
        }
        for label, want in NEAR_TRIPLE_FINALS[side].items():
            got = finals[side][label]
            assert abs(got[0] - want[0]) <= 2e-2, f"{side} {label} x"
            assert abs(got[1] - want[1]) <= 2e-2, f"{side} {label} y"
    # the right-bias outcome is the left one reflected through the y-axis,
    # with the two lower discs swapping roles
    for left_label, right_label in (("A1", "A1"), ("B1", "C1"), ("C1", "B1")):
        lx, ly = finals[Side.LEFT][left_label]
        rx, ry = finals[Side.RIGHT][right_label]
        assert abs(rx + lx) <= 4e-2 and abs(ry - ly) <= 4e-2
    _assert_budget(time.perf_counter() - t0, 1.0, "near-triple runs")


# --------------------------------------------------------------------------
# 9. universal run invariants: drift, separation, approach


def _accepted_runs():
    for n in (4, 12):
        sc = build_1d_max(n)
        yield f"oned{n}", sc, replace(sc.config, record_trajectory=True)
    sc = build_foch_like()
    yield "foch", sc, replace(sc.config, record_trajectory=True)
    sc = build_small_family(5)
    yield "small5", sc, replace(sc.config, record_trajectory=True)
    sc = build_main(6)
    yield "main6", sc, replace(sc.config, record_trajectory=True)
    sc = build_near_triple(1e-3, Side.LEFT)
    yield "triple", sc, replace(sc.config, record_trajectory=True)
    prec = Precision(bits=96)
    yield "triple96", sc, SimConfig(precision=prec, record_trajectory=True)


def test_criterion_09_universal_invariants():
    for name, sc, cfg in _accepted_runs():
        report = run(sc.initial, sc.injections, cfg)  # raising here means simultaneity
        bits = cfg.precision.bits
        drift_cap = 1e-9 if bits is None else 2.0 ** (8 - bits)
        assert report.energy_drift <= drift_cap, f"{name} drift {report.energy_drift}"
        floor = 2.0 - 1e-10
        for snap in report.trajectory:
            balls = snap.balls
            for i in range(len(balls)):
                for j in range(i + 1, len(balls)):
                    dx = float(balls[i].center.x - balls[j].center.x)
                    dy = float(balls[i].center.y - balls[j].center.y)
                    assert math.hypot(dx, dy) >= floor, f"{name} overlap at t={snap.time}"
        for e in report.events:
            if e.kind is not CollisionKind.PROPER:
                continue
            v1, v2 = e.pre_velocities
            closing = float((v1 - v2).dot(e.normal))
            assert closing < 0.0, f"{name}: counted contact without approach"


# --------------------------------------------------------------------------
# 10. the counting function against its rivals, exactly


def test_criterion_10_budget_identities():
    t0 = time.perf_counter()
    assert budget(6).f == 15 == budget(6).naive
    for n in (3, 4, 5):
        assert budget(n).f < budget(n).naive
    for n in range(7, 201):
        assert budget(n).f > budget(n).naive
    for n in range(3, 201):
        assert 27 * budget(n).f > n**3
    _assert_budget(time.perf_counter() - t0, 1.0, "budget sweep")
