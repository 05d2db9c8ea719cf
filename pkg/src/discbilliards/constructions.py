"""Scenario builders with verified collision budgets.

Each builder returns a ``Scenario``: an initial state, an optional injection
schedule, and the collision counts the scenario is expected to produce, so
that a single ``verify_scenario`` call can re-run and check it.  The counting
functions (``budget``, ``upper_bounds``) are exact integer arithmetic.

The scenarios:

* ``build_1d_max``: n collinear discs whose velocities force every pair to
  collide exactly once, the 1-D maximum of n(n-1)/2.
* ``build_foch_like``: a three-disc state with three forward collisions but
  only one after time reversal.
* ``build_small_family``: the three-disc state above run to a moment when
  the centers align, then a chain of ever-faster discs fired along that
  line; n discs total produce at least 1 + n(n-1)/2 collisions.
* ``build_preparation`` / ``build_main``: the staged three-family scenario
  whose collision count realizes ``budget(n).f``, built stage by stage with
  injections placed from simulated positions.
* ``build_near_triple``: a three-disc near-simultaneous triple collision
  resolved into a definite pairwise order by a small perturbation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

from .core import DOUBLE, Precision, Vec2, frame
from .errors import (
    AlignmentNotFound,
    BadFamilies,
    BadN,
    BadParams,
    Eps0TooLarge,
    PrecisionExhausted,
    SimultaneousCollision,
    StageCountShortfall,
    TuningFailed,
)
from .simulator import (
    BallId,
    BallState,
    CollisionKind,
    InjectionSchedule,
    SimConfig,
    SimulationReport,
    SystemState,
    _ball_from_json,
    _ball_to_json,
    free_flight,
    reverse_time,
    run,
    scene_from_json,
    scene_to_json,
)


# --------------------------------------------------------------------------
# counting


@dataclass(frozen=True)
class CollisionBudget:
    """Exact lower-bound bookkeeping for n discs split as n = 2*n1 + n2."""

    n: int
    n1: int
    n2: int
    f: int
    naive: int


def budget(n: int) -> CollisionBudget:
    """Collision-count lower bound f(n) against the pairwise count n(n-1)/2.

    f beats the pairwise count from n = 7 on, ties it at n = 6, and exceeds
    n^3/27 for every n >= 3.
    """
    if n < 3:
        raise BadN(f"budget needs n >= 3, got {n}")
    n1 = n // 3
    n2 = n - 2 * n1
    f = n1 * (n1 + 1) * n2 + n2 * (n2 - 1) // 2 + n1 * (n1 - 1)
    return CollisionBudget(n=n, n1=n1, n2=n2, f=f, naive=n * (n - 1) // 2)


def upper_bounds(n: int) -> tuple[int, int]:
    """Two exact-integer collision-count upper bounds for n planar discs.

    Returns ceil((32*n^(3/2))^(n^2)) and (400*n^2)^(2*n^4).  The first is
    computed via the integer square root of its square, so the ceiling is
    exact even when n^(3/2) is irrational.
    """
    if n < 2:
        raise BadN(f"upper_bounds needs n >= 2, got {n}")
    nn = n * n
    squared = 32 ** (2 * nn) * n ** (3 * nn)
    root = math.isqrt(squared)
    first = root if root * root == squared else root + 1
    second = (400 * nn) ** (2 * nn * nn)
    return first, second


def halfline_crossings(positions: Sequence[float], velocities: Sequence[float]) -> int:
    """Pairs of 1-D free trajectories that cross at positive time.

    For equal masses on a line, elastic collisions relabel the trajectories,
    so the collision count equals this crossing count.  A pair crosses iff
    the one behind moves faster: position order and velocity order disagree.
    """
    if len(positions) != len(velocities):
        raise BadParams("positions and velocities must have equal length")
    order = sorted(range(len(positions)), key=lambda k: positions[k])
    count = 0
    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            if velocities[order[a]] > velocities[order[b]]:
                count += 1
    return count


# --------------------------------------------------------------------------
# scenario plumbing


@dataclass(frozen=True)
class Scenario:
    """A runnable configuration bundled with its expected collision counts.

    ``exact_total`` selects whether the total is an equality or a lower
    bound.  When stage windows are attached, window i is
    [stage_boundaries[i], stage_boundaries[i+1]) and ``stage_is_minimum[i]``
    says whether its count is a floor or must match exactly.
    """

    kind: str
    initial: SystemState
    injections: InjectionSchedule
    expected_total: int
    exact_total: bool = True
    expected_stage_counts: Optional[tuple[int, ...]] = None
    stage_boundaries: Optional[tuple[float, ...]] = None
    stage_is_minimum: Optional[tuple[bool, ...]] = None
    config: SimConfig = field(default_factory=SimConfig)


@dataclass
class StageResult:
    index: int
    window: tuple[float, float]
    expected: int
    got: int
    minimum: bool

    @property
    def ok(self) -> bool:
        return self.got >= self.expected if self.minimum else self.got == self.expected


@dataclass
class VerificationResult:
    scenario: Scenario
    report: SimulationReport
    total_ok: bool
    stages: list[StageResult]

    @property
    def passed(self) -> bool:
        return self.total_ok and all(s.ok for s in self.stages)


def verify_scenario(sc: Scenario, cfg: Optional[SimConfig] = None) -> VerificationResult:
    """Re-run a scenario and compare collision counts with its expectations."""
    cfg = cfg or sc.config
    report = run(sc.initial, sc.injections, cfg)
    if sc.exact_total:
        total_ok = report.proper_count == sc.expected_total
    else:
        total_ok = report.proper_count >= sc.expected_total
    stages: list[StageResult] = []
    if sc.expected_stage_counts is not None and sc.stage_boundaries is not None:
        minima = sc.stage_is_minimum or tuple(
            True for _ in sc.expected_stage_counts
        )
        for i, expected in enumerate(sc.expected_stage_counts):
            lo = sc.stage_boundaries[i]
            hi = sc.stage_boundaries[i + 1]
            stages.append(
                StageResult(
                    index=i,
                    window=(float(lo), float(hi)),
                    expected=expected,
                    got=report.stage_count(lo, hi),
                    minimum=minima[i],
                )
            )
    return VerificationResult(scenario=sc, report=report, total_ok=total_ok, stages=stages)


def scenario_to_json(sc: Scenario) -> dict:
    prec = sc.config.precision
    doc: dict = {
        "kind": sc.kind,
        "expected_total": sc.expected_total,
        "exact_total": sc.exact_total,
        "state": scene_to_json(sc.initial, precision=prec),
        "injections": [
            {"time": prec.format(t), "ball": _ball_to_json(b, prec)}
            for t, b in sc.injections.entries
        ],
    }
    if sc.expected_stage_counts is not None:
        doc["expected_stage_counts"] = list(sc.expected_stage_counts)
        doc["stage_boundaries"] = [prec.format(t) for t in sc.stage_boundaries]
        doc["stage_is_minimum"] = list(sc.stage_is_minimum)
    if sc.config.stop_time is not None:
        doc["stop_time"] = prec.format(sc.config.stop_time)
    if prec.bits is not None:
        doc["precision_bits"] = prec.bits
    return doc


def scenario_from_json(doc: dict) -> Scenario:
    bits = doc.get("precision_bits")
    prec = Precision(bits=bits) if bits else DOUBLE
    state, _ = scene_from_json(doc["state"], prec)
    entries = tuple(
        (prec.parse(item["time"]), _ball_from_json(item["ball"], prec))
        for item in doc.get("injections", [])
    )
    stop = doc.get("stop_time")
    cfg = SimConfig(
        precision=prec, stop_time=prec.parse(stop) if stop is not None else None
    )
    counts = doc.get("expected_stage_counts")
    bounds = doc.get("stage_boundaries")
    minima = doc.get("stage_is_minimum")
    return Scenario(
        kind=doc["kind"],
        initial=state,
        injections=InjectionSchedule(entries),
        expected_total=doc["expected_total"],
        exact_total=doc.get("exact_total", True),
        expected_stage_counts=tuple(counts) if counts is not None else None,
        stage_boundaries=tuple(prec.parse(t) for t in bounds) if bounds else None,
        stage_is_minimum=tuple(minima) if minima is not None else None,
        config=cfg,
    )


# --------------------------------------------------------------------------
# 1-D maximum


def build_1d_max(n: int) -> Scenario:
    """n collinear discs that realize the 1-D maximum of n(n-1)/2 collisions.

    The leftmost disc rests and each later disc moves left faster than all
    before it (speeds 2^(k-1) - 1), so every pair's free trajectories cross;
    the doubling speeds make all crossing times distinct, which keeps the
    collision sequence free of simultaneous events.
    """
    if n < 2:
        raise BadN(f"build_1d_max needs n >= 2, got {n}")
    balls = []
    for k in range(1, n + 1):
        x = 2.5 * (k - 1)
        v = 0.0 if k == 1 else -(2.0 ** (k - 1) - 1.0)
        balls.append(BallState(BallId("P", k), Vec2(x, 0.0), Vec2(v, 0.0)))
    return Scenario(
        kind="oned",
        initial=SystemState(time=0.0, balls=tuple(balls)),
        injections=InjectionSchedule(),
        expected_total=n * (n - 1) // 2,
        exact_total=True,
    )


# --------------------------------------------------------------------------
# three discs: three collisions forward, one backward


FOCH_POSITIONS = ((0.0, 0.0), (1.9961, 0.5), (-0.0086, -3.0))
FOCH_VELOCITIES = ((0.0, 0.0), (0.2, -0.05), (0.6622, 77.0))


def build_foch_like() -> Scenario:
    """Three discs with three forward collisions but a single reversed one.

    The collision count of a reversed evolution can differ from the forward
    count; this explicit state has forward collisions near t = 0.013, 0.0193
    and 10.415, while the time-reversed run has exactly one.
    """
    balls = tuple(
        BallState(BallId("P", k + 1), Vec2(*FOCH_POSITIONS[k]), Vec2(*FOCH_VELOCITIES[k]))
        for k in range(3)
    )
    return Scenario(
        kind="foch",
        initial=SystemState(time=0.0, balls=balls),
        injections=InjectionSchedule(),
        expected_total=3,
        exact_total=True,
    )


# --------------------------------------------------------------------------
# small families: 1 + n(n-1)/2 for n = 4, 5, 6


def _unit(v: Vec2) -> Vec2:
    norm = v.norm()
    return v.scaled(1.0 / norm)


def _alignment_roots(state: SystemState) -> list[float]:
    """Positive times (offsets from state.time) when the 3 centers align."""
    p1, p2, p3 = (b.center for b in state.balls)
    v1, v2, v3 = (b.velocity for b in state.balls)
    dp2, dv2 = p2 - p1, v2 - v1
    dp3, dv3 = p3 - p1, v3 - v1
    a = float(dv2.cross(dv3))
    b = float(dp2.cross(dv3)) + float(dv2.cross(dp3))
    c = float(dp2.cross(dp3))
    roots: list[float] = []
    if abs(a) < 1e-14 * (abs(b) + abs(c) + 1.0):
        if b != 0.0:
            roots.append(-c / b)
    else:
        disc = b * b - 4.0 * a * c
        if disc >= 0.0:
            sq = math.sqrt(disc)
            q = -(b + math.copysign(sq, b)) / 2.0
            roots.append(q / a)
            if q != 0.0:
                roots.append(c / q)
    return sorted(t for t in roots if t > 1e-9)


def _chain_end(state: SystemState) -> Optional[tuple[BallId, Vec2]]:
    """End disc to fire at, and the direction from it through the chain.

    Of the two end discs of the (aligned) three-disc configuration, picks
    the one with the smaller gap to its neighbour: firing into the clustered
    end leaves the spent relay discs resting in a tight, slow stack, whereas
    firing across the wide gap strands each spent chaser far from the action
    with a large velocity residue that ruins the aim of later waves.
    """
    balls = state.balls
    dists = {}
    for a in range(3):
        for b in range(a + 1, 3):
            dists[(a, b)] = float((balls[a].center - balls[b].center).norm())
    (i, j), span = max(dists.items(), key=lambda kv: kv[1])
    if span <= 0.0:
        return None
    mid = 3 - i - j
    u = _unit(balls[j].center - balls[i].center)
    s_mid = float((balls[mid].center - balls[i].center).dot(u))
    if not 0.0 < s_mid < span:
        return None
    if s_mid <= span - s_mid:
        return balls[i].id, u
    return balls[j].id, u.scaled(-1.0)


def build_small_family(
    n: int,
    escalation: float = 1e2,
    retries: int = 6,
    slow_factor: float = 1e-6,
    precision: Precision = DOUBLE,
) -> Scenario:
    """n discs (4 <= n <= 6) realizing at least 1 + n(n-1)/2 collisions.

    Starts from the three-disc state whose forward evolution has four
    collisions when entered from its own reversed quiescent past, waits for
    the moment the three centers align, then fires n-3 chase discs down
    that line, each wave geometrically faster than the last.  Wave k adds
    k+2 collisions: the transferred momentum relays through the whole chain
    ahead of the new disc.

    Collision counts are invariant under multiplying every velocity by one
    positive constant, so the three-disc prelude is slowed by slow_factor
    before the chain phase.  This is load-bearing, not cosmetic: each relay
    crosses an 850-unit span whose endpoints keep drifting with whatever
    velocity residue the previous wave left them, and at the original
    speeds the second wave already misses its far target by tens of units.
    Slowing the prelude makes the three discs quasi-static on wave
    timescales while leaving their collision count untouched.

    The escalation factor keeps top speeds moderate at either extreme: each
    wave must dwarf the residue of the last, but a chaser faster than ~1e10
    reaches consecutive chain members (2 units apart) within the
    simultaneity window and the run is rejected as ill-conditioned.
    """
    if not 4 <= n <= 6:
        raise BadN(f"build_small_family needs 4 <= n <= 6, got {n}")
    if escalation <= 1.0:
        raise BadParams("escalation factor must exceed 1")
    if not 0.0 < slow_factor <= 1.0:
        raise BadParams("slow_factor must lie in (0, 1]")
    # realize the 4-collision three-disc start: reverse the 3-collision
    # state, run out its single collision (near t = 0.32), drift, and
    # reverse again.  Horizons are finite: rounding residue in a resolved
    # collision can leave femto-scale drift between parted discs, and an
    # unbounded run would chase that phantom contact into astronomic times.
    foch = build_foch_like()
    back = run(
        reverse_time(foch.initial),
        cfg=SimConfig(precision=precision, stop_time=2.0),
    )
    if back.proper_count != 1:
        raise TuningFailed(
            f"reversed three-disc run gave {back.proper_count} collisions; "
            "expected a single one"
        )
    start = SystemState(
        time=0.0, balls=reverse_time(free_flight(back.final_state, 1.0)).balls
    )

    # forward, the last of the four collisions lands near t = 13.4
    fourth_stop = 18.0
    fourth = run(start, cfg=SimConfig(precision=precision, stop_time=fourth_stop))
    if fourth.proper_count != 4:
        raise TuningFailed(
            f"three-disc start gave {fourth.proper_count} collisions; "
            "expected four"
        )
    t4 = max(
        float(e.time) for e in fourth.events if e.kind is CollisionKind.PROPER
    )

    # search for alignment from the moment of the fourth collision, not the
    # horizon, in case the centers line up before the horizon is reached
    align_base = free_flight(fourth.final_state, t4 - fourth_stop)
    aligned = None
    for offset in _alignment_roots(align_base):
        candidate = free_flight(align_base, offset)
        picked = _chain_end(candidate)
        if picked is not None:
            aligned = (float(candidate.time), picked[0], picked[1])
            break
    if aligned is None:
        raise AlignmentNotFound(
            "no post-collision time yields an aligned configuration with a "
            "usable end disc"
        )
    t_star, end_id, end_direction = aligned

    # slow the prelude: same trajectories, same four collisions, traversed
    # slow_factor times slower, so the aligned cluster barely moves while
    # the chain waves run at ordinary speeds
    start = SystemState(
        time=0.0,
        balls=tuple(
            BallState(b.id, b.center, b.velocity.scaled(slow_factor))
            for b in start.balls
        ),
    )
    t_star = t_star / slow_factor

    m = n - 3
    expected_waves = [k + 2 for k in range(1, m + 1)]
    top_speed = max(float(b.velocity.norm()) for b in start.balls)
    entries: list[tuple[float, BallState]] = []
    boundaries = [0.0, t_star]
    tau = t_star
    speed = max(top_speed, 1.0) * escalation
    horizon = 1.0
    # each wave is fired at the previous wave's resting chaser (the end disc
    # for wave 1), aimed along the local stack axis toward the disc resting
    # just ahead of it
    anchors = [end_id]
    for k in range(1, m + 1):
        placed = run(
            start, InjectionSchedule(tuple(entries)), SimConfig(precision=precision, stop_time=tau)
        ).final_state
        chaser = BallId("A", k)
        anchor = next(b for b in placed.balls if b.id == anchors[-1])
        if k == 1:
            direction = end_direction
        else:
            ahead = next(b for b in placed.balls if b.id == anchors[-2])
            direction = _unit(ahead.center - anchor.center)
        accepted = None
        for attempt in range(retries):
            ball = BallState(
                chaser, anchor.center - direction.scaled(3.0), direction.scaled(speed)
            )
            trial = entries + [(tau, ball)]
            h = horizon
            while True:
                try:
                    rep = run(
                        start,
                        InjectionSchedule(tuple(trial)),
                        SimConfig(precision=precision, stop_time=tau + h),
                    )
                except (PrecisionExhausted, SimultaneousCollision):
                    # this speed makes the cascade ill-conditioned; count the
                    # attempt as a miss and let the retry ladder move on
                    break
                got = rep.stage_count(tau, math.inf)
                if got >= expected_waves[k - 1]:
                    accepted = (ball, rep, h)
                    break
                if rep.halt_reason == "quiescent" or h > 1024.0:
                    break
                h *= 2.0
            if accepted is not None:
                break
            speed *= 10.0
        if accepted is None:
            raise TuningFailed(
                f"wave {k} never reached {expected_waves[k - 1]} collisions "
                f"(last speed {speed:.3g})"
            )
        ball, rep, horizon_used = accepted
        entries.append((tau, ball))
        anchors.append(chaser)
        last_event = max(
            float(e.time) for e in rep.events if float(e.time) >= tau
        )
        tau = last_event + max(1e-9, (last_event - boundaries[-1]) * 1e-3)
        boundaries.append(tau)
        speed *= escalation
        horizon = horizon_used

    stop = boundaries[-1] + horizon
    boundaries[-1] = stop
    expected_total = 1 + n * (n - 1) // 2
    return Scenario(
        kind="small",
        initial=start,
        injections=InjectionSchedule(tuple(entries)),
        expected_total=expected_total,
        exact_total=False,
        expected_stage_counts=(4, *expected_waves),
        stage_boundaries=tuple(boundaries),
        stage_is_minimum=(False, *(True for _ in expected_waves)),
        config=SimConfig(precision=precision, stop_time=stop),
    )


# --------------------------------------------------------------------------
# the staged three-family construction

# relative size of the velocity tie-breaker in build_preparation; small
# enough to leave every entry-condition margin intact, large enough that
# the reversed-run collision times split by far more than simultaneity_tol
_TIE_BREAK = 2.0**-20


def build_preparation(
    n1: int, eps, rho, precision: Precision = DOUBLE
) -> SystemState:
    """Time-zero state of 2*n1+1 discs poised for the staged construction.

    One disc sits at the origin moving up at speed 1-eps; two chains of n1
    discs rest along the two upper arm lines with gaps eps (2/3*eps for the
    first left gap) and drift inward with speeds roughly proportional to
    their depth, normalized so the full velocity vector has unit norm.  The
    depth profile carries a tiny exponential perturbation so the rear-end
    collisions of the reversed run happen one at a time.  Running this state
    backward produces exactly n1*(n1-1) collisions and then silence, so its
    past is collision-free beyond a finite horizon.
    """
    if n1 < 1:
        raise BadParams(f"need n1 >= 1, got {n1}")
    if not 0.0 < float(eps) < 1.0:
        raise BadParams(f"eps must lie in (0,1), got {float(eps)}")
    if not float(rho) > 1.5:
        raise BadParams(f"rho must exceed 3/2, got {float(rho)}")
    fr = frame(precision)
    one = precision.number(1)
    e = precision.number(eps)
    two_thirds = (one + one) / 3

    balls = []
    a_pos = Vec2(precision.number(0), precision.number(0))
    a_vel = fr.w0.scaled(one - e)
    balls.append(BallState(BallId("A", 1), a_pos, a_vel))

    # depth factors are (n1 - j) plus a tiny exponential tie-breaker: with
    # the plain linear profile, every adjacent pair in an arm has gap eps
    # closing at the same speed, so all rear-end collisions of the reversed
    # run would land on one instant and the middle discs would see genuine
    # simultaneous contacts (ill-posed for n1 >= 3)
    depth = [
        precision.number(n1 - j)
        + precision.number(_TIE_BREAK) * (precision.number(2 ** (n1 - j)) - one)
        for j in range(1, n1 + 1)
    ]
    sum_sq = sum((d * d for d in depth), precision.number(0))
    if n1 >= 2:
        kappa = precision.sqrt((one - (one - e) * (one - e)) / (2 * sum_sq))
    else:
        kappa = precision.number(0)

    b_pos = fr.w1.scaled(2 + two_thirds * e)
    c_pos = fr.w2.scaled(2 + e)
    for j in range(1, n1 + 1):
        inward = -(kappa * depth[j - 1])
        balls.append(BallState(BallId("B", j), b_pos, fr.w1.scaled(inward)))
        balls.append(BallState(BallId("C", j), c_pos, fr.w2.scaled(inward)))
        b_pos = b_pos + fr.w1.scaled(2 + e)
        c_pos = c_pos + fr.w2.scaled(2 + e)

    if n1 == 1:
        # all chain velocities vanish, so unit total norm means rescaling
        # the lone moving disc to exactly unit speed (counts are invariant
        # under uniform velocity scaling)
        scale = one / (one - e)
        balls = [
            BallState(b.id, b.center, b.velocity.scaled(scale)) for b in balls
        ]
    return SystemState(time=0.0, balls=tuple(balls))


@dataclass(frozen=True)
class ICReport:
    """Outcome of the four entry-condition clauses plus the measured gaps.

    Clause 1: the origin disc lies in the upward cone, at most eps high.
    Clause 2: every disc is within eps of its family's arm line.
    Clause 3: all projected gaps lie in [eps/rho, eps].
    Clause 4: the two innermost gaps have ratio at most 2/3 either way.
    """

    clause_i: bool
    clause_ii: bool
    clause_iii: bool
    clause_iv: bool
    gamma_min: float
    gamma_max: float
    first_gap_ratio: float
    slack: float

    @property
    def passed(self) -> bool:
        return self.clause_i and self.clause_ii and self.clause_iii and self.clause_iv


def check_ic(
    state: SystemState, eps, rho, precision: Precision = DOUBLE
) -> ICReport:
    """Evaluate the staged construction's entry conditions on a state.

    Comparisons allow an absolute slack of 64*max|center|*2^(1-p) for the
    backend's p significand bits, because the preparation state sits exactly
    on two clause boundaries (largest gap = eps, gap ratio = 2/3) and would
    otherwise fail by one rounding error.
    """
    a_fam = state.family("A")
    b_fam = state.family("B")
    c_fam = state.family("C")
    if not a_fam or not b_fam or len(b_fam) != len(c_fam):
        raise BadFamilies(
            f"need families A (>=1), B and C of equal size, got "
            f"{len(a_fam)}/{len(b_fam)}/{len(c_fam)}"
        )
    fr = frame(precision)
    e = float(eps)
    r = float(rho)
    max_center = max(float(b.center.norm()) for b in state.balls)
    slack = 64.0 * max(1.0, max_center) * 2.0 ** (1 - precision.significand_bits)

    a1 = a_fam[0].center
    clause_i = (
        float(a1.dot(fr.w1)) >= -slack
        and float(a1.dot(fr.w2)) >= -slack
        and float(a1.dot(fr.w0)) <= e + slack
    )

    off_axis = [abs(float(a1.dot(fr.u1))), abs(float(a1.dot(fr.u2)))]
    off_axis.extend(abs(float(b.center.dot(fr.u0))) for b in a_fam[1:])
    off_axis.extend(abs(float(b.center.dot(fr.u1))) for b in b_fam)
    off_axis.extend(abs(float(b.center.dot(fr.u2))) for b in c_fam)
    clause_ii = max(off_axis) <= e + slack

    gaps = []
    for prev, cur in zip(a_fam, a_fam[1:]):
        gaps.append(float((prev.center - cur.center).dot(fr.w0)) - 2.0)
    prev_b = a1
    for b in b_fam:
        gaps.append(float((b.center - prev_b).dot(fr.w1)) - 2.0)
        prev_b = b.center
    prev_c = a1
    for c in c_fam:
        gaps.append(float((c.center - prev_c).dot(fr.w2)) - 2.0)
        prev_c = c.center
    gamma_min = min(gaps)
    gamma_max = max(gaps)
    clause_iii = (e / r <= gamma_min + slack) and (gamma_max <= e + slack)

    gap_b1 = float((b_fam[0].center - a1).dot(fr.w1)) - 2.0
    gap_c1 = float((c_fam[0].center - a1).dot(fr.w2)) - 2.0
    ratio = gap_b1 / gap_c1 if gap_c1 != 0.0 else math.inf
    clause_iv = (3.0 * gap_b1 <= 2.0 * gap_c1 + slack) or (
        3.0 * gap_c1 <= 2.0 * gap_b1 + slack
    )

    return ICReport(
        clause_i=clause_i,
        clause_ii=clause_ii,
        clause_iii=clause_iii,
        clause_iv=clause_iv,
        gamma_min=gamma_min,
        gamma_max=gamma_max,
        first_gap_ratio=ratio,
        slack=slack,
    )


@dataclass(frozen=True)
class StageSchedule:
    """Stage parameters for the staged construction on n discs.

    Stage m runs on [boundaries[m-1], boundaries[m]) and must produce at
    least m-1+n1*(n1+1) collisions.  eps and rho grow geometrically with
    fixed multipliers 1+2T and 1+3T; lam is the per-stage velocity scale.
    eps/rho/lam carry n2+1 entries (index m-1 holds stage m's value, with
    one extra for the final boundary check); boundaries has n2+1 entries
    T_1=0 .. T_{n2+1}.
    """

    n: int
    n1: int
    n2: int
    T: float
    rho0: float
    eps0: float
    eps: tuple[float, ...]
    rho: tuple[float, ...]
    lam: tuple[float, ...]
    boundaries: tuple[float, ...]
    expected_stage_counts: tuple[int, ...]
    prep_count: int


def schedule(n: int, rho0: float = 4.0, eps0: Optional[float] = None) -> StageSchedule:
    """Compute stage widths, tolerances and velocity scales for n discs."""
    if n < 3:
        raise BadN(f"schedule needs n >= 3, got {n}")
    if not rho0 > 2.0:
        raise BadParams(f"rho0 must exceed 2, got {rho0}")
    b = budget(n)
    T = b.n2 + 2.0 ** (2 * b.n1)
    if eps0 is None:
        eps0 = min(1e-3, 0.25 / (1.0 + 2.0 * T) ** b.n2)
    if eps0 <= 0.0:
        raise BadParams(f"eps0 must be positive, got {eps0}")
    eps = tuple(eps0 * (1.0 + 2.0 * T) ** m for m in range(1, b.n2 + 2))
    if eps[b.n2 - 1] >= 0.5:
        raise Eps0TooLarge(
            f"eps0={eps0} drives stage {b.n2} tolerance to {eps[b.n2 - 1]} >= 1/2"
        )
    rho = tuple(rho0 * (1.0 + 3.0 * T) ** m for m in range(1, b.n2 + 2))
    lam = [1.0]
    for m in range(1, b.n2 + 1):
        lam.append(lam[-1] / math.sqrt(eps[m]))
    boundaries = [0.0]
    for m in range(1, b.n2 + 1):
        boundaries.append(boundaries[-1] + eps[m - 1] * T / lam[m - 1])
    counts = tuple(m - 1 + b.n1 * (b.n1 + 1) for m in range(1, b.n2 + 1))
    return StageSchedule(
        n=n,
        n1=b.n1,
        n2=b.n2,
        T=T,
        rho0=rho0,
        eps0=eps0,
        eps=eps,
        rho=rho,
        lam=tuple(lam),
        boundaries=tuple(boundaries),
        expected_stage_counts=counts,
        prep_count=b.n1 * (b.n1 - 1),
    )


def _attempt_main(sched: StageSchedule, precision: Precision) -> Scenario:
    """One non-adaptive pass of the staged builder at fixed parameters."""
    with precision.activate():
        fr = frame(precision)
        prep = build_preparation(sched.n1, sched.eps[0], sched.rho[0], precision)
        entry = check_ic(prep, sched.eps[0], sched.rho[0], precision)
        if not entry.passed:
            raise StageCountShortfall(
                f"preparation state fails entry conditions: {entry}", stage=0
            )

        # the reversed chain cascade finishes by ~sqrt(eps * n1^3) << the
        # horizon; running further only risks chasing femto-scale rounding
        # drift between parted discs into astronomic phantom contacts
        quiet_time = 64.0
        back = run(
            reverse_time(prep),
            cfg=SimConfig(precision=precision, stop_time=quiet_time),
        )
        if back.proper_count != sched.prep_count:
            raise StageCountShortfall(
                f"reversed preparation gave {back.proper_count} collisions, "
                f"expected {sched.prep_count}",
                stage=0,
                got=back.proper_count,
                expected=sched.prep_count,
            )
        if back.events and float(back.events[-1].time) > quiet_time / 2:
            raise StageCountShortfall(
                "reversed preparation still active near the horizon "
                f"(last event at {float(back.events[-1].time):.6g})",
                stage=0,
            )
        t_start = -(quiet_time + 1.0)
        start = SystemState(
            time=t_start,
            balls=reverse_time(free_flight(back.final_state, 1.0)).balls,
        )

        entries: list[tuple[float, BallState]] = []
        for m in range(1, sched.n2):
            t_next = sched.boundaries[m]
            state_m = run(
                start,
                InjectionSchedule(tuple(entries)),
                SimConfig(precision=precision, stop_time=t_next),
            ).final_state
            lowest = next(b for b in state_m.balls if b.id == BallId("A", m))
            eps_next = precision.number(sched.eps[m])
            pos = lowest.center - fr.w0.scaled(2 + eps_next)
            vel = fr.w0.scaled(
                precision.number(sched.lam[m])
                * precision.sqrt(precision.number(1) - eps_next)
            )
            entries.append((t_next, BallState(BallId("A", m + 1), pos, vel)))

        stop = sched.boundaries[-1]
        report = run(
            start,
            InjectionSchedule(tuple(entries)),
            SimConfig(precision=precision, stop_time=stop),
        )

        prep_got = report.stage_count(t_start, 0.0)
        if prep_got != sched.prep_count:
            raise StageCountShortfall(
                f"preparation window produced {prep_got} collisions, "
                f"expected {sched.prep_count}",
                stage=0,
                got=prep_got,
                expected=sched.prep_count,
            )
        for m in range(1, sched.n2 + 1):
            lo = sched.boundaries[m - 1]
            hi = sched.boundaries[m]
            got = report.stage_count(lo, hi)
            expected = sched.expected_stage_counts[m - 1]
            if got < expected:
                raise StageCountShortfall(
                    f"stage {m} produced {got} collisions in [{lo:.6g}, {hi:.6g}), "
                    f"expected at least {expected}",
                    stage=m,
                    got=got,
                    expected=expected,
                )

        # every injected disc must first touch the system strictly after its
        # injection time
        for t_inj, ball in entries:
            first = next(
                (float(e.time) for e in report.events if ball.id in e.pair), None
            )
            if first is not None and first <= float(t_inj):
                raise StageCountShortfall(
                    f"disc {ball.id} collides at {first}, not after its "
                    f"injection at {float(t_inj)}",
                    stage=None,
                )

        # entry conditions must hold at every stage boundary, measured on
        # the state including the disc injected there (if any)
        for m in range(1, sched.n2 + 1):
            t_bound = sched.boundaries[m]
            state_b = run(
                start,
                InjectionSchedule(tuple(entries)),
                SimConfig(precision=precision, stop_time=t_bound),
            ).final_state
            ic = check_ic(state_b, sched.eps[m], sched.rho[m], precision)
            if not ic.passed:
                raise StageCountShortfall(
                    f"entry conditions fail at stage boundary {m} "
                    f"(t={t_bound:.6g}): {ic}",
                    stage=m,
                )

        total = sched.prep_count + sum(sched.expected_stage_counts)
        return Scenario(
            kind="main",
            initial=start,
            injections=InjectionSchedule(tuple(entries)),
            expected_total=total,
            exact_total=False,
            expected_stage_counts=(sched.prep_count, *sched.expected_stage_counts),
            stage_boundaries=(t_start, *sched.boundaries),
            stage_is_minimum=(False, *(True for _ in sched.expected_stage_counts)),
            config=SimConfig(precision=precision, stop_time=stop),
        )


_BIT_LADDER = (None, 128, 256, 512, 1024, 2048, 4096)


def build_main(
    n: int,
    rho0: float = 4.0,
    eps0: Optional[float] = None,
    adaptive: bool = True,
    precision: Optional[Precision] = None,
    max_halvings: int = 60,
) -> Scenario:
    """Build the staged scenario whose collision count realizes budget(n).f.

    The preparation state supplies n1*(n1-1) collisions from its reversed
    past; each stage m then contributes at least m-1+n1*(n1+1) more, with a
    new disc injected below the column at every stage boundary.  With
    ``adaptive`` set, eps0 is halved when a stage falls short of its quota
    (the guarantee only holds for small enough eps) and the arithmetic
    precision is raised when the simulator reports exhaustion.
    """
    sched = schedule(n, rho0=rho0, eps0=eps0)
    ladder = list(_BIT_LADDER)
    if precision is not None:
        ladder = [precision.bits] + [b for b in ladder if (b or 0) > (precision.bits or 0)]
    bits_idx = 0
    halvings = 0
    while True:
        prec = Precision(bits=ladder[bits_idx]) if ladder[bits_idx] else DOUBLE
        try:
            return _attempt_main(sched, prec)
        except StageCountShortfall:
            if not adaptive or halvings >= max_halvings:
                raise
            halvings += 1
            sched = schedule(n, rho0=rho0, eps0=sched.eps0 / 2.0)
        except PrecisionExhausted:
            if not adaptive or bits_idx + 1 >= len(ladder):
                raise
            bits_idx += 1


# --------------------------------------------------------------------------
# near-simultaneous triple collision


class Side(Enum):
    """Which lower disc the descending disc is biased toward."""

    LEFT = "left"
    RIGHT = "right"


_ROOT3 = math.sqrt(3.0)

NEAR_TRIPLE_FINALS = {
    Side.LEFT: {
        "A1": (0.25, _ROOT3 / 4),
        "B1": (-1.5, _ROOT3 / 2),
        "C1": (1.25, _ROOT3 / 4),
    },
    Side.RIGHT: {
        "A1": (-0.25, _ROOT3 / 4),
        "B1": (-1.25, _ROOT3 / 4),
        "C1": (1.5, _ROOT3 / 2),
    },
}


def build_near_triple(eps: float, side: Side) -> Scenario:
    """Split a triple collision into three pairwise ones by an eps-nudge.

    The unperturbed state has a disc falling symmetrically onto two
    mutually touching discs that converge on it: all three would touch at
    once.  Pushing the lower pair apart by eps and the falling disc down
    and sideways resolves the order into lower-pair first, then the falling
    disc against its near neighbor, then against the far one.  The limiting
    outgoing velocities differ between the two bias sides, which is why a
    simultaneous triple has no canonical resolution.
    """
    if not 0.0 < eps <= 1e-2:
        raise BadParams(f"eps must lie in (0, 0.01], got {eps}")
    if side is Side.LEFT:
        a_x = -eps
    elif side is Side.RIGHT:
        a_x = eps
    else:
        raise BadParams(f"unknown side {side!r}")
    balls = (
        BallState(BallId("A", 1), Vec2(a_x, -_ROOT3 - 4.0 * eps), Vec2(0.0, _ROOT3)),
        BallState(BallId("B", 1), Vec2(-1.0 - eps, 0.0), Vec2(1.0, 0.0)),
        BallState(BallId("C", 1), Vec2(1.0 + eps, 0.0), Vec2(-1.0, 0.0)),
    )
    return Scenario(
        kind="near_triple",
        initial=SystemState(time=0.0, balls=balls),
        injections=InjectionSchedule(),
        expected_total=3,
        exact_total=True,
    )
