"""Simulator behavior: predictions, resolution, runs, errors, and I/O."""

import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from discbilliards.core import Precision, Vec2
from discbilliards.errors import (
    OverlapInput,
    PrecisionExhausted,
    Receding,
    NotInContact,
    SimultaneousCollision,
)
from discbilliards.simulator import (
    BallId,
    BallState,
    CollisionKind,
    InjectionSchedule,
    SimConfig,
    SystemState,
    free_flight,
    load_scene,
    parse_ball_id,
    resolve_collision,
    reverse_time,
    run,
    save_scene,
    scene_from_json,
    scene_to_json,
    time_to_collision,
)


def ball(tag, cx, cy, vx, vy):
    return BallState(parse_ball_id(tag), Vec2(cx, cy), Vec2(vx, vy))


def state(*balls, time=0.0):
    return SystemState(time=time, balls=balls)


def three_disc_scene():
    """Three discs whose forward run has 3 collisions, the last far out."""
    return state(
        ball("P1", 0.0, 0.0, 0.0, 0.0),
        ball("P2", 1.9961, 0.5, 0.2, -0.05),
        ball("P3", -0.0086, -3.0, 0.6622, 77.0),
    )


# --------------------------------------------------------------------------
# time_to_collision


def test_head_on_gap_two():
    t = time_to_collision(ball("P1", 0, 0, 1, 0), ball("P2", 4, 0, 0, 0))
    assert t == pytest.approx(2.0, rel=1e-15)


def test_receding_gives_none():
    assert time_to_collision(ball("P1", 0, 0, -1, 0), ball("P2", 4, 0, 0, 0)) is None


def test_miss_gives_none():
    # minimum distance along the path is 4 > 2
    assert time_to_collision(ball("P1", 0, 0, 0, 0), ball("P2", 4, 3, 0, -1)) is None


def test_parallel_gives_none():
    assert time_to_collision(ball("P1", 0, 0, 1, 1), ball("P2", 5, 0, 1, 1)) is None


def test_overlap_input_raises():
    with pytest.raises(OverlapInput):
        time_to_collision(ball("P1", 0, 0, 0, 0), ball("P2", 1, 0, 0, 0))


def test_touching_approaching_gives_zero():
    t = time_to_collision(ball("P1", 0, 0, 1, 0), ball("P2", 2, 0, 0, 0))
    assert t == 0


def test_extreme_velocity_ratio_is_stable():
    # a slow drift and a 1e9-fold faster chaser: the small root must survive
    slow = ball("P1", 100.0, 0.0, 1.0, 0.0)
    fast = ball("P2", 0.0, 0.0, 1e9, 0.0)
    t = time_to_collision(fast, slow)
    expected = 98.0 / (1e9 - 1.0)
    assert t == pytest.approx(expected, rel=1e-12)


# --------------------------------------------------------------------------
# resolve_collision


def test_head_on_swap():
    v1, v2 = resolve_collision(ball("P1", 0, 0, 1, 0), ball("P2", 2, 0, -1, 0))
    assert v1.as_floats() == (-1.0, 0.0)
    assert v2.as_floats() == (1.0, 0.0)


def test_grazing_contact_keeps_velocities():
    v1, v2 = resolve_collision(ball("P1", 0, 0, 0, 1), ball("P2", 2, 0, 0, 0))
    assert v1.as_floats() == (0.0, 1.0)
    assert v2.as_floats() == (0.0, 0.0)


def test_oblique_exchange():
    v1, v2 = resolve_collision(ball("P1", 0, 0, 1, 1), ball("P2", 2, 0, 0, 0))
    assert v1.as_floats() == pytest.approx((0.0, 1.0))
    assert v2.as_floats() == pytest.approx((1.0, 0.0))


def test_not_in_contact_raises():
    with pytest.raises(NotInContact):
        resolve_collision(ball("P1", 0, 0, 1, 0), ball("P2", 3, 0, 0, 0))


def test_receding_resolution_raises():
    with pytest.raises(Receding):
        resolve_collision(ball("P1", 0, 0, -1, 0), ball("P2", 2, 0, 1, 0))


# --------------------------------------------------------------------------
# run loop


def test_head_on_run():
    rep = run(state(ball("P1", 0, 0, 1, 0), ball("P2", 4, 0, -1, 0)))
    assert rep.proper_count == 1
    assert rep.final_state.ball("P1").velocity.as_floats() == (-1.0, 0.0)
    assert rep.final_state.ball("P2").velocity.as_floats() == (1.0, 0.0)
    assert rep.energy_drift == 0.0
    assert rep.momentum_drift == 0.0


def test_three_disc_forward_times():
    rep = run(three_disc_scene())
    assert rep.proper_count == 3
    times = [float(e.time) for e in rep.events if e.kind is CollisionKind.PROPER]
    for got, want in zip(times, (0.012987, 0.0193063, 10.4153)):
        assert got == pytest.approx(want, rel=1e-3)


def test_three_disc_reversed_has_one_collision():
    rep = run(reverse_time(three_disc_scene()))
    assert rep.proper_count == 1


def test_reverse_time_involution():
    s = three_disc_scene()
    back = reverse_time(reverse_time(s))
    for a, b in zip(s.balls, back.balls):
        assert a.velocity.as_floats() == b.velocity.as_floats()


def test_reversed_terminal_state_retraces():
    s = three_disc_scene()
    fwd = run(s, cfg=SimConfig(stop_time=1.0))
    assert fwd.proper_count == 2
    back = run(reverse_time(fwd.final_state), cfg=SimConfig(stop_time=2.0))
    assert back.proper_count == 2
    fwd_times = [float(e.time) for e in fwd.events]
    back_times = [1.0 + (1.0 - float(e.time)) for e in reversed(back.events)]
    for a, b in zip(fwd_times, back_times):
        assert a == pytest.approx(b, abs=1e-9)


def test_stale_predictions_are_skipped():
    rep = run(
        state(
            ball("P1", 0, 0, 1, 0),
            ball("P2", 3, 0, 0, 0),
            ball("P3", 6, 0, 0, 0),
        )
    )
    assert rep.proper_count == 2
    assert rep.final_state.ball("P1").velocity.as_floats() == (0.0, 0.0)
    assert rep.final_state.ball("P2").velocity.as_floats() == (0.0, 0.0)
    assert rep.final_state.ball("P3").velocity.as_floats() == (1.0, 0.0)


def test_injection_mid_run():
    # P1 and P2 swap at t=1; P3 appears far left at t=5 moving fast, catches
    # P1 (now leftbound), and the kicked P1 then runs down P2.
    schedule = InjectionSchedule(((5.0, ball("P3", -40.0, 0.0, 10.0, 0.0)),))
    rep = run(
        state(ball("P1", 0, 0, 1, 0), ball("P2", 4, 0, -1, 0)),
        injections=schedule,
    )
    assert rep.proper_count == 3
    assert rep.energy_drift <= 1e-12
    by_id = {b.id: b for b in rep.final_state.balls}
    assert float(by_id[parse_ball_id("P3")].velocity.x) == pytest.approx(-1.0)
    assert float(by_id[parse_ball_id("P2")].velocity.x) == pytest.approx(10.0)


def test_injection_overlap_rejected():
    schedule = InjectionSchedule(((1.0, ball("P3", 1.0, 0.0, 0.0, 0.0)),))
    with pytest.raises(OverlapInput):
        run(state(ball("P1", 0, 0, 0, 0), ball("P2", 8, 0, 0, 0)), injections=schedule)


def test_simultaneous_shared_ball():
    s = state(
        ball("P1", 0, 0, 0, 0),
        ball("P2", -4, 0, 1, 0),
        ball("P3", 4, 0, -1, 0),
    )
    with pytest.raises(SimultaneousCollision):
        run(s)


def test_simultaneous_touching_chain():
    s = state(
        ball("P1", 0, 0, 0, 0),
        ball("P2", 2, 0, 0, 0),  # touching P1
        ball("P3", -4, 0, 1, 0),  # hits P1 at t=2
        ball("P4", 6, 0, -1, 0),  # hits P2 at t=2, linked through the chain
    )
    with pytest.raises(SimultaneousCollision):
        run(s)


def test_distant_simultaneous_pairs_are_fine():
    s = state(
        ball("P1", 0, 0, 1, 0),
        ball("P2", 4, 0, -1, 0),
        ball("P3", 0, 100, 1, 0),
        ball("P4", 4, 100, -1, 0),
    )
    rep = run(s)
    assert rep.proper_count == 2


def test_grazing_event_recorded_and_not_counted():
    cfg = SimConfig(grazing_tol=1e-3)
    delta = 1e-7
    rep = run(
        state(ball("P1", 0, 0, 0, 0), ball("P2", -4, 2 - delta, 1, 0)),
        cfg=cfg,
    )
    kinds = [e.kind for e in rep.events]
    assert kinds == [CollisionKind.GRAZING]
    assert rep.proper_count == 0
    assert rep.final_state.ball("P2").velocity.as_floats() == (1.0, 0.0)


def test_overlapping_initial_state_rejected():
    with pytest.raises(OverlapInput):
        run(state(ball("P1", 0, 0, 0, 0), ball("P2", 1.5, 0, 0, 0)))


def test_stop_time_advances_state():
    rep = run(state(ball("P1", 0, 0, 1, 0), ball("P2", 10, 0, 0, 0)), cfg=SimConfig(stop_time=3.0))
    assert float(rep.final_state.time) == 3.0
    assert rep.final_state.ball("P1").center.as_floats() == (3.0, 0.0)
    assert rep.proper_count == 0


def test_max_events_halts():
    rep = run(
        state(ball("P1", 0, 0, 1, 0), ball("P2", 3, 0, 0, 0), ball("P3", 6, 0, 0, 0)),
        cfg=SimConfig(max_events=1),
    )
    assert rep.proper_count == 1


def test_free_flight():
    s = free_flight(state(ball("P1", 1, 2, 3, -1)), 2.0)
    assert s.ball("P1").center.as_floats() == (7.0, 0.0)
    assert float(s.time) == 2.0


def test_big_float_backend_runs():
    prec = Precision(128)
    s = state(
        BallState(parse_ball_id("P1"), Vec2(prec.number(0), prec.number(0)), Vec2(prec.number(1), prec.number(0))),
        BallState(parse_ball_id("P2"), Vec2(prec.number(4), prec.number(0)), Vec2(prec.number(-1), prec.number(0))),
        time=prec.number(0),
    )
    rep = run(s, cfg=SimConfig(precision=prec))
    assert rep.proper_count == 1
    assert rep.energy_drift <= 2.0 ** (8 - 128)


# --------------------------------------------------------------------------
# 1-D oracle: proper count equals half-line crossing count


def crossing_count(xs, vs):
    n = len(xs)
    count = 0
    for i in range(n):
        for j in range(i + 1, n):
            dx = xs[j] - xs[i]
            dv = vs[i] - vs[j]
            if dv != 0 and dx / dv > 0:
                count += 1
    return count


@settings(max_examples=120, deadline=None)
@given(
    st.lists(st.integers(min_value=-5, max_value=5), min_size=2, max_size=6),
    st.lists(st.integers(min_value=2, max_value=9), min_size=5, max_size=5),
)
def test_collinear_matches_halfline_oracle(vels, gaps):
    n = len(vels)
    xs = [0.0]
    for g in gaps[: n - 1]:
        xs.append(xs[-1] + 2.0 + g / 3.0)
    balls = [ball(f"P{k}", xs[k], 0.0, float(vels[k]), 0.0) for k in range(n)]
    try:
        rep = run(SystemState(time=0.0, balls=balls))
    except SimultaneousCollision:
        assume(False)
        return
    assert rep.proper_count == crossing_count(xs, [float(v) for v in vels])


# --------------------------------------------------------------------------
# conservation and contact invariants on random planar scatters


@settings(max_examples=60, deadline=None)
@given(
    st.integers(min_value=2, max_value=5),
    st.randoms(use_true_random=False),
)
def test_random_scatter_invariants(n, rng):
    balls = []
    for k in range(n):
        gx, gy = k % 3, k // 3
        balls.append(
            ball(
                f"P{k}",
                4.0 * gx + rng.uniform(-0.6, 0.6),
                4.0 * gy + rng.uniform(-0.6, 0.6),
                rng.uniform(-2, 2),
                rng.uniform(-2, 2),
            )
        )
    s = SystemState(time=0.0, balls=balls)
    try:
        rep = run(s, cfg=SimConfig(stop_time=8.0))
    except SimultaneousCollision:
        assume(False)
        return
    assert rep.energy_drift <= 1e-9
    for e in rep.events:
        if e.kind is CollisionKind.PROPER:
            approach = (e.pre_velocities[0] - e.pre_velocities[1]).dot(e.normal)
            assert approach < 0
    finals = rep.final_state.balls
    for i in range(len(finals)):
        for j in range(i + 1, len(finals)):
            d = (finals[i].center - finals[j].center).norm()
            assert d >= 2 - 1e-10


# --------------------------------------------------------------------------
# scene I/O


def test_scene_roundtrip_double(tmp_path):
    s = three_disc_scene()
    schedule = InjectionSchedule(((1.25, ball("P4", 40.0, 40.0, -1.0, 0.0)),))
    path = tmp_path / "scene.json"
    save_scene(path, s, schedule)
    loaded, loaded_sched = load_scene(path)
    for a, b in zip(s.balls, loaded.balls):
        assert a == b
    assert loaded_sched.entries[0][0] == 1.25
    assert loaded_sched.entries[0][1] == schedule.entries[0][1]


def test_scene_roundtrip_big_float():
    prec = Precision(170)
    with prec.activate():
        third = prec.number(1) / 3
        s = SystemState(
            time=prec.number(0),
            balls=(
                BallState(parse_ball_id("A1"), Vec2(third, prec.sqrt(prec.number(2))), Vec2(third * 3, third)),
            ),
        )
    doc = scene_to_json(s, precision=prec)
    back, _ = scene_from_json(doc, precision=prec)
    assert back.balls[0].center.x == s.balls[0].center.x
    assert back.balls[0].center.y == s.balls[0].center.y
    assert back.balls[0].velocity.y == s.balls[0].velocity.y


def test_ball_id_parsing():
    assert str(parse_ball_id("A12")) == "A12"
    assert parse_ball_id("B3") == BallId("B", 3)
    with pytest.raises(ValueError):
        BallId("X", 1)
