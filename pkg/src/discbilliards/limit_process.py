"""Exact limiting dynamics of the hub-and-arms scene under the slow-start scaling.

When the hub disc sits at the meeting point of two 60-degree arm chains with a
vertical chain hanging below, and every projected gap is scaled by a small eps
while time and arm coordinates are rescaled by 1/eps, the projected motion
approaches a piecewise-linear evolution that can be written down in closed form
with rational breakpoints and dyadic slopes.  This module builds that evolution
in exact :class:`fractions.Fraction` arithmetic, inspects its collision
structure (slope discontinuities, conservation laws, velocity hand-offs), and
compares it against scaled trajectories extracted from actual simulations.

Conventions shared with :mod:`.constructions`: family A is the vertical chain
(A1 is the hub), family B sits on the up-left arm, family C on the up-right
arm.  The limit component written ``B0``/``C0`` is the hub's own projection on
the corresponding arm direction, so a limit vector has m + 2*n1 + 2 entries for
m vertical and n1 + n1 arm discs.
"""

from __future__ import annotations

import csv
import logging
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from .constructions import check_ic
from .core import DOUBLE, Precision, Vec2, frame
from .errors import (
    BadFamilies,
    BadGaps,
    BadParams,
    DiscBilliardsError,
    NotABreakpoint,
    ShapeMismatch,
    StageCountShortfall,
)
from .simulator import (
    BallId,
    BallState,
    CollisionKind,
    SimConfig,
    SimulationReport,
    SystemState,
    run,
)

_logger = logging.getLogger(__name__)

_ZERO = Fraction(0)
_HALF = Fraction(1, 2)


def _fraction(x) -> Fraction:
    """Exact conversion; floats convert via their binary value."""
    try:
        return Fraction(x)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise BadGaps(f"not a rational: {x!r}") from exc


# --------------------------------------------------------------------------
# exact piecewise-linear paths


@dataclass(frozen=True)
class PiecewiseLinear:
    """Continuous piecewise-linear path over exact rationals.

    ``slopes[i]`` is the right-derivative on ``[breakpoints[i],
    breakpoints[i+1])``; ``final_slope`` extends beyond the last breakpoint.
    Values left of the first breakpoint extrapolate with the first slope.
    """

    breakpoints: tuple
    values: tuple
    slopes: tuple
    final_slope: Fraction

    def __post_init__(self):
        bps = tuple(_fraction(t) for t in self.breakpoints)
        vals = tuple(_fraction(v) for v in self.values)
        slopes = tuple(_fraction(s) for s in self.slopes)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "slopes", slopes)
        object.__setattr__(self, "final_slope", _fraction(self.final_slope))
        if not bps or len(vals) != len(bps) or len(slopes) != len(bps) - 1:
            raise ValueError("breakpoints/values/slopes lengths are inconsistent")
        for a, b in zip(bps, bps[1:]):
            if not a < b:
                raise ValueError("breakpoints must be strictly increasing")
        for i, s in enumerate(slopes):
            if vals[i] + s * (bps[i + 1] - bps[i]) != vals[i + 1]:
                raise ValueError(f"discontinuous at breakpoint {i + 1}")

    def _segment_slope(self, i: int) -> Fraction:
        return self.slopes[i] if i < len(self.slopes) else self.final_slope

    def value(self, t) -> Fraction:
        t = _fraction(t)
        i = bisect_right(self.breakpoints, t) - 1
        if i < 0:
            return self.values[0] + self._segment_slope(0) * (t - self.breakpoints[0])
        return self.values[i] + self._segment_slope(i) * (t - self.breakpoints[i])

    def slope_right(self, t) -> Fraction:
        t = _fraction(t)
        i = bisect_right(self.breakpoints, t) - 1
        return self._segment_slope(max(i, 0))

    def slope_left(self, t) -> Fraction:
        t = _fraction(t)
        i = bisect_left(self.breakpoints, t)
        return self._segment_slope(max(i - 1, 0))

    def jump_times(self) -> tuple:
        """Breakpoints where the slope actually changes."""
        out = []
        for i in range(1, len(self.breakpoints)):
            if self.slopes[i - 1] != self._segment_slope(i):
                out.append(self.breakpoints[i])
        return tuple(out)

    def derivative_steps(self) -> "StepPath":
        times = [self.breakpoints[0]]
        levels = [self._segment_slope(0)]
        for t in self.jump_times():
            times.append(t)
            levels.append(self.slope_right(t))
        return StepPath(tuple(times), tuple(levels))


def _schedule_path(start_value, changes) -> PiecewiseLinear:
    """Path from a start value and (time, new right-slope) changes.

    The slope is 0 before the first change; changes at the current left end
    replace the pending slope instead of opening a zero-length segment, and
    changes to the already-active slope are dropped.
    """
    bps = [_ZERO]
    vals = [_fraction(start_value)]
    segs = []
    cur = _ZERO
    for t, s in changes:
        t = _fraction(t)
        s = _fraction(s)
        if t < bps[-1]:
            raise ValueError("slope changes must come in time order")
        if t == bps[-1]:
            cur = s
            continue
        if s == cur:
            continue
        vals.append(vals[-1] + cur * (t - bps[-1]))
        segs.append(cur)
        bps.append(t)
        cur = s
    return PiecewiseLinear(tuple(bps), tuple(vals), tuple(segs), cur)


def _crossings(a: PiecewiseLinear, b: PiecewiseLinear) -> set:
    """All times where a - b vanishes (touch or crossing), exactly."""
    ts = sorted(set(a.breakpoints) | set(b.breakpoints))
    out = set()
    for i, t0 in enumerate(ts):
        hi = ts[i + 1] if i + 1 < len(ts) else None
        d0 = a.value(t0) - b.value(t0)
        if d0 == 0:
            out.add(t0)
            continue
        ds = a.slope_right(t0) - b.slope_right(t0)
        if ds == 0:
            continue
        tc = t0 - d0 / ds
        if tc > t0 and (hi is None or tc < hi):
            out.add(tc)
    return out


def _order_statistics(paths: Sequence[PiecewiseLinear]) -> tuple:
    """Increasing ordering of a family of paths, rank by rank.

    Candidate times are all breakpoints plus all pairwise meeting times, so
    the relative order is constant on every gap between candidates and the
    rank paths come out exactly piecewise linear.
    """
    paths = list(paths)
    cands = set()
    for p in paths:
        cands.update(p.breakpoints)
    for a, b in combinations(paths, 2):
        cands.update(_crossings(a, b))
    times = sorted(cands)
    boundary_vals = [sorted(p.value(t) for p in paths) for t in times]
    seg_slopes = []
    for i, t0 in enumerate(times):
        mid = (t0 + times[i + 1]) / 2 if i + 1 < len(times) else t0 + 1
        by_value = sorted(paths, key=lambda p: p.value(mid))
        seg_slopes.append([p.slope_right(mid) for p in by_value])

    out = []
    for r in range(len(paths)):
        bps = [times[0]]
        vals = [boundary_vals[0][r]]
        segs = []
        cur = seg_slopes[0][r]
        for i in range(1, len(times)):
            s = seg_slopes[i][r]
            if s == cur:
                continue
            vals.append(vals[-1] + cur * (times[i] - bps[-1]))
            segs.append(cur)
            bps.append(times[i])
            cur = s
        out.append(PiecewiseLinear(tuple(bps), tuple(vals), tuple(segs), cur))
    return tuple(out)


# --------------------------------------------------------------------------
# starting data


@dataclass(frozen=True)
class GapInit:
    """Starting gaps and hub offsets for the limiting evolution, all rational.

    Field names mirror the JSON schema: ``ZB0``/``ZC0`` are the hub's two arm
    projections at time zero, ``GA`` lists the m-1 vertical gaps from the hub
    downward, ``GB``/``GC`` the n1 gaps along the up-left and up-right arms
    outward, and ``rho`` bounds every gap into [1/rho, 1].
    """

    ZB0: Fraction
    ZC0: Fraction
    GA: tuple
    GB: tuple
    GC: tuple
    rho: Fraction

    def __post_init__(self):
        object.__setattr__(self, "ZB0", _fraction(self.ZB0))
        object.__setattr__(self, "ZC0", _fraction(self.ZC0))
        object.__setattr__(self, "GA", tuple(_fraction(x) for x in self.GA))
        object.__setattr__(self, "GB", tuple(_fraction(x) for x in self.GB))
        object.__setattr__(self, "GC", tuple(_fraction(x) for x in self.GC))
        object.__setattr__(self, "rho", _fraction(self.rho))

    @property
    def m(self) -> int:
        return len(self.GA) + 1

    @property
    def n1(self) -> int:
        return len(self.GB)

    def validate(self):
        """Raise BadGaps listing every violated entry condition."""
        problems = []
        if not self.rho > 1:
            problems.append(f"rho must exceed 1, got {self.rho}")
        if self.ZB0 < 0 or self.ZC0 < 0:
            problems.append("hub offsets ZB0, ZC0 must be non-negative")
        if self.ZB0 + self.ZC0 > 1:
            problems.append(f"ZB0 + ZC0 = {self.ZB0 + self.ZC0} exceeds 1")
        if not self.GB:
            problems.append("need at least one gap on each arm")
        if len(self.GB) != len(self.GC):
            problems.append(
                f"arms must have equally many gaps, got {len(self.GB)}/{len(self.GC)}"
            )
        if self.rho > 1:
            inv = 1 / self.rho
            for name, gaps, base in (("GA", self.GA, 2), ("GB", self.GB, 1), ("GC", self.GC, 1)):
                for i, x in enumerate(gaps):
                    if not inv <= x <= 1:
                        problems.append(
                            f"{name}[{i + base}] = {x} outside [1/rho, 1] = [{inv}, 1]"
                        )
        if self.GB and self.GC and not self.GB[0] <= Fraction(2, 3) * self.GC[0]:
            problems.append(
                f"first left gap {self.GB[0]} must be at most two thirds of "
                f"the first right gap {self.GC[0]}"
            )
        if problems:
            raise BadGaps("; ".join(problems))


def gap_init_to_json(g: GapInit) -> dict:
    """JSON document with every rational as a 'p/q' string."""
    return {
        "ZB0": str(g.ZB0),
        "ZC0": str(g.ZC0),
        "GA": [str(x) for x in g.GA],
        "GB": [str(x) for x in g.GB],
        "GC": [str(x) for x in g.GC],
        "rho": str(g.rho),
    }


def gap_init_from_json(doc: dict) -> GapInit:
    try:
        return GapInit(
            ZB0=doc["ZB0"],
            ZC0=doc["ZC0"],
            GA=doc.get("GA", ()),
            GB=doc["GB"],
            GC=doc["GC"],
            rho=doc["rho"],
        )
    except KeyError as exc:
        raise BadGaps(f"missing field {exc} in gap document") from exc


_DENOMINATORS = (997, 1009, 1013, 1019, 1021, 1031, 1033, 1039)


def _random_fraction(rng, lo, hi) -> Fraction:
    """Uniform-ish rational in [lo, hi] with a large prime denominator.

    The spread of denominators keeps independently drawn gaps from landing in
    accidental rational relations, so event times of the built limit stay
    pairwise distinct.
    """
    lo, hi = _fraction(lo), _fraction(hi)
    d = rng.choice(_DENOMINATORS)
    a = math.ceil(lo * d)
    b = math.floor(hi * d)
    if b < a:
        return (lo + hi) / 2
    return Fraction(rng.randint(a, b), d)


def random_gap_init(rng, m: int, n1: int) -> GapInit:
    """Feasible random starting data for the given chain sizes.

    The hub offsets stay in [1/8, 1/2] so the scene realization of
    :func:`convergence_experiment` also satisfies the off-arm entry clause.
    """
    if m < 1 or n1 < 1:
        raise BadParams(f"need m >= 1 and n1 >= 1, got m={m}, n1={n1}")
    rho = Fraction(rng.randint(4, 16), 2)
    inv = 1 / rho
    ga = tuple(_random_fraction(rng, inv, 1) for _ in range(m - 1))
    gc1 = _random_fraction(rng, Fraction(3, 2) * inv, 1)
    gb1 = _random_fraction(rng, inv, Fraction(2, 3) * gc1)
    gb = (gb1,) + tuple(_random_fraction(rng, inv, 1) for _ in range(n1 - 1))
    gc = (gc1,) + tuple(_random_fraction(rng, inv, 1) for _ in range(n1 - 1))
    g = GapInit(
        ZB0=_random_fraction(rng, Fraction(1, 8), _HALF),
        ZC0=_random_fraction(rng, Fraction(1, 8), _HALF),
        GA=ga,
        GB=gb,
        GC=gc,
        rho=rho,
    )
    g.validate()
    return g


# --------------------------------------------------------------------------
# the limiting evolution


def _vb(j: int) -> Fraction:
    """Outward speed picked up by the j-th left-arm disc."""
    return _HALF if j == 1 else Fraction(3, 2 ** (2 * j - 1))


def _vc(j: int) -> Fraction:
    """Outward speed picked up by the j-th right-arm disc."""
    return Fraction(3, 4**j)


@dataclass(frozen=True)
class LimitEvolution:
    """The limiting piecewise-linear motion of all projected coordinates.

    ``components`` holds, in order, the vertical ordering A_m..A_1, the hub's
    left projection B0 with the left-arm ordering B1..B_{n1}, then C0 with the
    right-arm ordering.  ``tA`` is indexed m..1 (time k is when the rising
    disc reaches vertical rank k), ``tB``/``tC`` are indexed 1..n1 (when arm
    rank 1 starts carrying the j-th outgoing speed), and ``V`` stores the two
    speed ladders as (left, right) tuples.  All entries are exact rationals.
    """

    m: int
    n1: int
    start: GapInit
    tA: tuple
    tB: tuple
    tC: tuple
    V: tuple
    labels: tuple
    components: tuple
    horizon: Fraction

    @property
    def n(self) -> int:
        return self.m + 2 * self.n1

    def tA_time(self, k: int) -> Fraction:
        return self.tA[self.m - k]

    def tB_time(self, j: int) -> Fraction:
        return self.tB[j - 1]

    def tC_time(self, j: int) -> Fraction:
        return self.tC[j - 1]

    def vB(self, j: int) -> Fraction:
        return self.V[0][j - 1]

    def vC(self, j: int) -> Fraction:
        return self.V[1][j - 1]

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError as exc:
            raise ShapeMismatch(f"no component labelled {label!r}") from exc

    def component(self, label: str) -> PiecewiseLinear:
        return self.components[self.index(label)]

    def slopes_before(self, t) -> tuple:
        return tuple(c.slope_left(t) for c in self.components)

    def slopes_after(self, t) -> tuple:
        return tuple(c.slope_right(t) for c in self.components)


def _component_labels(m: int, n1: int) -> tuple:
    labels = [f"A{k}" for k in range(m, 0, -1)]
    labels += [f"B{j}" for j in range(n1 + 1)]
    labels += [f"C{j}" for j in range(n1 + 1)]
    return tuple(labels)


def build_limit(g: GapInit, m: int, n1: int) -> LimitEvolution:
    """Construct the limiting evolution from starting gaps, exactly.

    The vertical chain contributes one rising coordinate that sweeps up
    through m-1 resting ones; the hub then forwards its unit speed into the
    arms, alternating left and right with speeds halving at each hand-off.
    Arm coordinates are reported as increasing orderings, so each outgoing
    disc overtakes its slower predecessors inside the window where it is
    fastest.
    """
    if m < 1 or n1 < 1:
        raise BadParams(f"need m >= 1 and n1 >= 1, got m={m}, n1={n1}")
    g.validate()
    if len(g.GA) != m - 1:
        raise BadGaps(f"m={m} needs {m - 1} vertical gaps, got {len(g.GA)}")
    if len(g.GB) != n1:
        raise BadGaps(f"n1={n1} needs {n1} gaps per arm, got {len(g.GB)}")

    # positions at time zero
    za0 = {1: g.ZB0 + g.ZC0}
    for k in range(2, m + 1):
        za0[k] = za0[k - 1] - g.GA[k - 2]
    zb0 = {0: g.ZB0}
    zc0 = {0: g.ZC0}
    for j in range(1, n1 + 1):
        zb0[j] = zb0[j - 1] + g.GB[j - 1]
        zc0[j] = zc0[j - 1] + g.GC[j - 1]

    # event times: the riser crosses one vertical gap per unit gap, then the
    # hand-offs slow down geometrically while the gaps they must cross stay
    # of order one
    ta = {m: _ZERO}
    for k in range(m - 1, 0, -1):
        ta[k] = ta[k + 1] + g.GA[k - 1]
    tb = {1: ta[1] + 2 * g.GB[0]}
    tc = {1: tb[1] + Fraction(4, 3) * (g.GC[0] - g.GB[0])}
    for j in range(2, n1 + 1):
        tb[j] = tc[j - 1] + Fraction(2 ** (2 * j - 1), 3) * g.GB[j - 1]
        tc[j] = tb[j] + Fraction(2 ** (2 * j), 3) * g.GC[j - 1]

    vb = tuple(_vb(j) for j in range(1, n1 + 1))
    vc = tuple(_vc(j) for j in range(1, n1 + 1))

    # per-disc paths: rest, then move outward at the hand-off speed
    ya = [
        PiecewiseLinear((_ZERO,), (za0[k],), (), Fraction(1 if k == m else 0))
        for k in range(1, m + 1)
    ]
    yb = [
        PiecewiseLinear((_ZERO, tb[j]), (zb0[j], zb0[j]), (_ZERO,), vb[j - 1])
        if tb[j] > 0
        else PiecewiseLinear((_ZERO,), (zb0[j],), (), vb[j - 1])
        for j in range(1, n1 + 1)
    ]
    yc = [
        PiecewiseLinear((_ZERO, tc[j]), (zc0[j], zc0[j]), (_ZERO,), vc[j - 1])
        for j in range(1, n1 + 1)
    ]

    a_ranks = _order_statistics(ya)
    b_ranks = _order_statistics(yb)
    c_ranks = _order_statistics(yc)

    # hub projections: caught by the riser at tA_1, then alternately pushing
    # an arm disc out (slope 0 while the other side is active)
    b0_changes = [(ta[1], _HALF), (tb[1], _ZERO)]
    c0_changes = [(ta[1], _HALF), (tb[1], _vc(1))]
    a1_changes = [(ta[1], Fraction(1))]
    for j in range(1, n1 + 1):
        a1_changes += [(tb[j], _vc(j)), (tc[j], _vc(j) / 2)]
        if j < n1:
            b0_changes += [(tc[j], _vb(j + 1)), (tb[j + 1], _ZERO)]
            c0_changes += [(tc[j], _ZERO), (tb[j + 1], _vc(j + 1))]
        else:
            b0_changes.append((tc[j], _vb(j + 1)))
            c0_changes.append((tc[j], _ZERO))
    zb_hub = _schedule_path(g.ZB0, b0_changes)
    zc_hub = _schedule_path(g.ZC0, c0_changes)
    # the top vertical rank is the hub itself once caught: its height is the
    # sum of the two arm projections, so it is built from the summed schedule
    # rather than the plain ordering (which would keep rising forever)
    za_top = _schedule_path(za0[1], a1_changes)

    components = a_ranks[: m - 1] + (za_top, zb_hub) + b_ranks + (zc_hub,) + c_ranks
    return LimitEvolution(
        m=m,
        n1=n1,
        start=g,
        tA=tuple(ta[k] for k in range(m, 0, -1)),
        tB=tuple(tb[j] for j in range(1, n1 + 1)),
        tC=tuple(tc[j] for j in range(1, n1 + 1)),
        V=(vb, vc),
        labels=_component_labels(m, n1),
        components=components,
        horizon=Fraction(m + 4**n1),
    )


def discontinuities(L: LimitEvolution, horizon=None) -> list:
    """All times in (0, horizon] where some component's slope jumps.

    Returns (time, affected component indices) pairs in time order.  The top
    vertical component is skipped: it is the sum of the two hub projections,
    so each of its jumps merely echoes one already reported for B0 or C0.
    """
    hz = L.horizon if horizon is None else _fraction(horizon)
    if hz <= 0:
        raise BadParams(f"horizon must be positive, got {hz}")
    derived_top = L.m - 1
    groups = {}
    for idx, comp in enumerate(L.components):
        if idx == derived_top:
            continue
        for t in comp.jump_times():
            if 0 < t <= hz:
                groups.setdefault(t, []).append(idx)
    return [(t, tuple(groups[t])) for t in sorted(groups)]


# --------------------------------------------------------------------------
# conservation and hand-off identities at the breakpoints


@dataclass(frozen=True)
class ConservationReport:
    """Exact residuals of the conserved quantities across one breakpoint.

    The momentum-x residual is scaled by sqrt(3) and energy drops the common
    mass factor, keeping everything rational: with hub rates p = DB0, q = DC0
    the hub velocity contributes ((q-p)/sqrt(3), p+q), each left-arm rate r
    contributes r along the up-left arm, and so on.  ``transfers`` holds the
    hand-off identities for the colliding pair (new rate of one side minus
    the old rate of the other), all zero when the breakpoint is clean.
    """

    time: Fraction
    family: str
    index: int
    momentum_x: Fraction
    momentum_y: Fraction
    energy: Fraction
    transfers: tuple

    @property
    def passed(self) -> bool:
        residuals = (self.momentum_x, self.momentum_y, self.energy) + self.transfers
        return all(x == 0 for x in residuals)


def _invariants(L: LimitEvolution, slopes: tuple):
    """(sqrt3 * momentum_x, momentum_y, energy) from a slope vector."""
    m, n1 = L.m, L.n1
    a = slopes[: m - 1]  # vertical movers; the top entry is the derived hub sum
    p = slopes[m]
    r = slopes[m + 1 : m + 1 + n1]
    q = slopes[m + n1 + 1]
    s = slopes[m + n1 + 2 :]
    mx = (q - p) + Fraction(3, 2) * (sum(s) - sum(r))
    my = sum(a) + (p + q) + (sum(r) + sum(s)) / 2
    en = (
        sum(x * x for x in a)
        + Fraction(4, 3) * (p * p + q * q + p * q)
        + sum(x * x for x in r)
        + sum(x * x for x in s)
    )
    return mx, my, en


def conservation_check(L: LimitEvolution, t) -> ConservationReport:
    """Verify momentum, energy, and the hand-off rules across breakpoint t.

    Accepts the hub hand-off times tB_j / tC_j and the vertical meeting times
    tA_k with k < m; anything else raises NotABreakpoint.  All residuals are
    exact rationals and a correct evolution yields zeros throughout.
    """
    t = _fraction(t)
    if t in L.tB:
        family, index = "B", L.tB.index(t) + 1
    elif t in L.tC:
        family, index = "C", L.tC.index(t) + 1
    elif t in L.tA and t > 0:
        family, index = "A", L.m - L.tA.index(t)
    else:
        raise NotABreakpoint(f"{t} is not a collision breakpoint of this evolution")

    before = L.slopes_before(t)
    after = L.slopes_after(t)
    bx, by, be = _invariants(L, before)
    ax, ay, ae = _invariants(L, after)

    if family == "A":
        upper = L.component(f"A{index}")
        lower = L.component(f"A{index + 1}")
        transfers = (
            upper.slope_right(t) - 1,
            lower.slope_left(t) - 1,
            lower.slope_right(t),
            upper.slope_left(t),
        )
    elif family == "B":
        hub = L.component("B0")
        first = L.component("B1")
        other = L.component("C0")
        transfers = (
            hub.slope_right(t) - first.slope_left(t),
            first.slope_right(t) - hub.slope_left(t),
            other.slope_right(t)
            - (other.slope_left(t) + (hub.slope_left(t) - first.slope_left(t)) / 2),
        )
    else:
        hub = L.component("C0")
        first = L.component("C1")
        other = L.component("B0")
        transfers = (
            hub.slope_right(t) - first.slope_left(t),
            first.slope_right(t) - hub.slope_left(t),
            other.slope_right(t)
            - (other.slope_left(t) + (hub.slope_left(t) - first.slope_left(t)) / 2),
        )

    return ConservationReport(
        time=t,
        family=family,
        index=index,
        momentum_x=ax - bx,
        momentum_y=ay - by,
        energy=ae - be,
        transfers=transfers,
    )


# --------------------------------------------------------------------------
# scaled trajectories from simulations


@dataclass(frozen=True)
class SampledPath:
    """Float polyline through simulation snapshots.

    ``slopes[i]`` is the exact velocity projection holding on
    ``[times[i], times[i+1])``; between snapshots the motion is free flight,
    so interpolation between sampled values is exact up to rounding.
    """

    times: tuple
    values: tuple
    slopes: tuple

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        values = tuple(float(v) for v in self.values)
        slopes = tuple(float(s) for s in self.slopes)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "slopes", slopes)
        if not times or len(values) != len(times) or len(slopes) != len(times):
            raise ValueError("times/values/slopes lengths are inconsistent")
        for a, b in zip(times, times[1:]):
            if not a < b:
                raise ValueError("sample times must be strictly increasing")

    def value(self, t) -> float:
        t = float(t)
        i = bisect_right(self.times, t) - 1
        if i < 0:
            return self.values[0] + self.slopes[0] * (t - self.times[0])
        if i + 1 < len(self.times):
            lo, hi = self.times[i], self.times[i + 1]
            w = (t - lo) / (hi - lo)
            return self.values[i] * (1 - w) + self.values[i + 1] * w
        return self.values[i] + self.slopes[i] * (t - self.times[i])

    def derivative_steps(self) -> "StepPath":
        times = [self.times[0]]
        levels = [self.slopes[0]]
        for t, s in zip(self.times[1:], self.slopes[1:]):
            if s != levels[-1]:
                times.append(t)
                levels.append(s)
        return StepPath(tuple(times), tuple(levels))


@dataclass(frozen=True)
class StepPath:
    """Right-continuous step function: value ``values[i]`` from ``times[i]``."""

    times: tuple
    values: tuple

    def __post_init__(self):
        times = tuple(self.times)
        values = tuple(self.values)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        if not times or len(values) != len(times):
            raise ValueError("times/values lengths are inconsistent")
        for a, b in zip(times, times[1:]):
            if not a < b:
                raise ValueError("step times must be strictly increasing")

    def value(self, t):
        i = bisect_right(self.times, t) - 1
        return self.values[max(i, 0)]


@dataclass(frozen=True)
class ScaledTrajectory:
    """Simulated motion in limit coordinates: time and arm gaps over eps.

    Components follow the limit layout (A_m..A_1, B0..B_{n1}, C0..C_{n1});
    vertical entries are disc heights shifted by two per depth step, arm
    entries are arm projections shifted by two per slot, and B0/C0 are the
    hub's own projections, all divided by eps.
    """

    eps: float
    labels: tuple
    components: tuple

    def component(self, label: str) -> SampledPath:
        try:
            return self.components[self.labels.index(label)]
        except ValueError as exc:
            raise ShapeMismatch(f"no component labelled {label!r}") from exc


def _family_index_map(initial: SystemState):
    a = initial.family("A")
    b = initial.family("B")
    c = initial.family("C")
    if not a or not b or len(b) != len(c):
        raise BadFamilies(
            f"need families A (>=1), B and C of equal size, got "
            f"{len(a)}/{len(b)}/{len(c)}"
        )
    for fam, lst in (("A", a), ("B", b), ("C", c)):
        got = [x.id.index for x in lst]
        if got != list(range(1, len(lst) + 1)):
            raise BadFamilies(f"family {fam} indices must be 1..{len(lst)}, got {got}")
    if len(initial.balls) != len(a) + len(b) + len(c):
        raise BadFamilies("scene contains discs outside families A/B/C")
    return len(a), len(b)


def extract_scaled(report: SimulationReport, initial: SystemState, eps) -> ScaledTrajectory:
    """Rescale a recorded trajectory into limit coordinates.

    Times shift to start at zero and divide by eps; each coordinate is the
    appropriate arm projection minus twice its slot depth, divided by eps.
    Slopes come from the recorded velocities, which hold exactly until the
    next snapshot.
    """
    e = float(eps)
    if not e > 0:
        raise BadParams(f"eps must be positive, got {e}")
    if report.trajectory is None:
        raise BadParams("the run must be made with record_trajectory=True")
    m, n1 = _family_index_map(initial)
    labels = _component_labels(m, n1)

    snaps = []
    for snap in report.trajectory:
        if snaps and float(snap.time) == float(snaps[-1].time):
            snaps[-1] = snap
        else:
            snaps.append(snap)

    fr = frame(DOUBLE)
    w1 = fr.w1.as_floats()
    w2 = fr.w2.as_floats()
    t0 = float(snaps[0].time)

    times = [(float(s.time) - t0) / e for s in snaps]
    series = {lab: ([], []) for lab in labels}
    for snap in snaps:
        for k in range(1, m + 1):
            ball = snap.ball(f"A{k}")
            vals, slopes = series[f"A{k}"]
            vals.append((float(ball.center.y) + 2 * (k - 1)) / e)
            slopes.append(float(ball.velocity.y))
        hub = snap.ball("A1")
        hx, hy = hub.center.as_floats()
        hvx, hvy = hub.velocity.as_floats()
        for lab, w in (("B0", w1), ("C0", w2)):
            vals, slopes = series[lab]
            vals.append((w[0] * hx + w[1] * hy) / e)
            slopes.append(w[0] * hvx + w[1] * hvy)
        for fam, w in (("B", w1), ("C", w2)):
            for j in range(1, n1 + 1):
                ball = snap.ball(f"{fam}{j}")
                cx, cy = ball.center.as_floats()
                vx, vy = ball.velocity.as_floats()
                vals, slopes = series[f"{fam}{j}"]
                vals.append((w[0] * cx + w[1] * cy - 2 * j) / e)
                slopes.append(w[0] * vx + w[1] * vy)

    components = tuple(
        SampledPath(tuple(times), tuple(series[lab][0]), tuple(series[lab][1]))
        for lab in labels
    )
    return ScaledTrajectory(eps=e, labels=labels, components=components)


def sup_distance(X: ScaledTrajectory, L: LimitEvolution, horizon=None) -> float:
    """Largest pointwise gap between scaled simulation and limit on [0, horizon].

    Both sides are piecewise linear, so the maximum over the merged breakpoint
    grid (plus midpoints as a rounding guard) is the true supremum.
    """
    if X.labels != L.labels:
        raise ShapeMismatch(
            f"component labels differ: {X.labels} vs {L.labels}"
        )
    hz = float(L.horizon if horizon is None else horizon)
    worst = 0.0
    for xs, zs in zip(X.components, L.components):
        grid = {0.0, hz}
        grid.update(float(t) for t in zs.breakpoints if 0 <= t <= hz)
        grid.update(t for t in xs.times if 0 <= t <= hz)
        pts = sorted(grid)
        pts += [(a + b) / 2 for a, b in zip(pts, pts[1:])]
        for t in pts:
            worst = max(worst, abs(xs.value(t) - float(zs.value(Fraction(t)))))
    return worst


# --------------------------------------------------------------------------
# step-function distance


def _clip_steps(path: StepPath, horizon):
    jumps = [t for t in path.times[1:] if t <= horizon]
    values = list(path.values[: len(jumps) + 1])
    return jumps, values


def skorohod_distance(f: StepPath, g: StepPath, horizon) -> float:
    """Smallest uniform deviation achievable after warping time on [0, horizon].

    Time warps are continuous increasing reparametrizations fixing 0 and the
    horizon.  For step functions the best warp aligns some matching of the two
    jump sequences and leaves the rest unmatched, so a dynamic program over
    monotone jump matchings is exact: aligning jumps costs their time offset,
    and every traversed plateau pair costs its value offset.
    """
    fj, fv = _clip_steps(f, horizon)
    gj, gv = _clip_steps(g, horizon)
    p, q = len(fj), len(gj)
    inf = float("inf")
    best = [[inf] * (q + 1) for _ in range(p + 1)]
    best[0][0] = abs(fv[0] - gv[0])
    for i in range(p + 1):
        for j in range(q + 1):
            if i == 0 and j == 0:
                continue
            cost = abs(fv[i] - gv[j])
            options = []
            if i > 0:
                options.append(max(best[i - 1][j], cost))
            if j > 0:
                options.append(max(best[i][j - 1], cost))
            if i > 0 and j > 0:
                aligned = fj[i - 1] == gj[j - 1] or (
                    fj[i - 1] < horizon and gj[j - 1] < horizon
                )
                if aligned:
                    tgap = abs(fj[i - 1] - gj[j - 1])
                    options.append(max(best[i - 1][j - 1], cost, tgap))
            best[i][j] = min(options)
    return best[p][q]


# --------------------------------------------------------------------------
# physical realization and the eps sweep


def build_gap_scene(g: GapInit, m: int, n1: int, eps, precision: Precision = DOUBLE) -> SystemState:
    """Disc scene whose scaled coordinates at time zero equal the gap data.

    The hub is placed so its two arm projections are eps*ZB0 and eps*ZC0; the
    vertical chain hangs below it in an exact column (so its collisions are
    exactly head-on) and the arm chains sit on rays through the hub, giving
    zero off-arm offsets.  Everything rests except the lowest vertical disc,
    which moves straight up at unit speed.
    """
    if m < 1 or n1 < 1:
        raise BadParams(f"need m >= 1 and n1 >= 1, got m={m}, n1={n1}")
    g.validate()
    if len(g.GA) != m - 1 or len(g.GB) != n1:
        raise BadGaps(
            f"gap data is sized for m={g.m}, n1={g.n1}, not m={m}, n1={n1}"
        )
    ef = _fraction(eps)
    if not 0 < ef < 1:
        raise BadParams(f"eps must lie in (0, 1), got {float(eps)}")
    num = precision.number
    fr = frame(precision)
    sqrt3 = precision.sqrt(num(3))
    e = num(ef)

    hub_x = e * num(g.ZC0 - g.ZB0) / sqrt3
    zero = num(0)
    rest = Vec2(zero, zero)
    up = Vec2(zero, num(1))

    balls = []
    height = g.ZB0 + g.ZC0
    for k in range(1, m + 1):
        if k > 1:
            height = height - g.GA[k - 2]
        center = Vec2(hub_x, e * num(height) - num(2 * (k - 1)))
        balls.append(BallState(BallId("A", k), center, up if k == m else rest))
    hub_center = balls[0].center
    run_b = _ZERO
    run_c = _ZERO
    for j in range(1, n1 + 1):
        run_b += g.GB[j - 1]
        run_c += g.GC[j - 1]
        along_b = num(2 * j) + e * num(run_b)
        along_c = num(2 * j) + e * num(run_c)
        balls.append(BallState(BallId("B", j), hub_center + fr.w1.scaled(along_b), rest))
        balls.append(BallState(BallId("C", j), hub_center + fr.w2.scaled(along_c), rest))
    return SystemState(time=num(0), balls=tuple(balls))


@dataclass(frozen=True)
class ConvergenceRow:
    """One eps of the sweep: distances to the limit and the collision census.

    ``gap_margin`` is the worst slack of the scaled no-overlap bound: every
    adjacent scaled gap must stay above -2*eps*(1+t)^2, and the margin is the
    minimum of (gap + bound) over all pairs and event times, so a negative
    value flags a violation.
    """

    eps: float
    sup_dist: float
    skorohod_dist: float
    proper_count: int
    expected_count: int
    gap_margin: float


def _adjacent_labels(m: int, n1: int):
    pairs = [(f"A{k}", f"A{k + 1}") for k in range(1, m)]
    pairs += [(f"B{j}", f"B{j - 1}") for j in range(1, n1 + 1)]
    pairs += [(f"C{j}", f"C{j - 1}") for j in range(1, n1 + 1)]
    return pairs


def _gap_margin(X: ScaledTrajectory, m: int, n1: int) -> float:
    """Min over event times of adjacent scaled gap plus 2*eps*(1+t)^2.

    The bound is concave in t and the gaps are linear between events, so
    checking sample times alone covers every moment in between.
    """
    margin = math.inf
    times = X.components[0].times
    for hi, lo in _adjacent_labels(m, n1):
        a = X.component(hi)
        b = X.component(lo)
        for i, t in enumerate(times):
            gap = a.values[i] - b.values[i]
            margin = min(margin, gap + 2 * X.eps * (1 + t) ** 2)
    return margin


def convergence_experiment(
    g: GapInit,
    m: int,
    n1: int,
    eps_list: Sequence,
    cfg: Optional[SimConfig] = None,
) -> list:
    """Sweep eps downward and measure how simulations approach the limit.

    For each eps the gap data is realized as a physical scene, simulated to
    rescaled time equal to the limit's horizon, and compared: sup distance of
    positions, worst step distance of velocities, proper collision count
    against the limit's discontinuity count, and the scaled no-overlap margin.
    Raises StageCountShortfall if the smallest eps misses the expected count.
    """
    cfg = cfg or SimConfig()
    eps_vals = [float(x) for x in eps_list]
    if not eps_vals:
        raise BadParams("eps_list must not be empty")
    if any(not 0 < x < 0.25 for x in eps_vals):
        raise BadParams(f"every eps must lie in (0, 1/4), got {eps_vals}")
    if any(not a > b for a, b in zip(eps_vals, eps_vals[1:])):
        raise BadParams(f"eps_list must be strictly decreasing, got {eps_vals}")

    L = build_limit(g, m, n1)
    expected = len(discontinuities(L))
    stop = float(L.horizon)

    rows = []
    for eps in eps_vals:
        scene = build_gap_scene(g, m, n1, eps, cfg.precision)
        entry = check_ic(scene, eps, float(g.rho), cfg.precision)
        if not entry.passed:
            raise BadParams(
                f"gap data does not realize an entry state at eps={eps}; "
                f"hub offsets may be too lopsided"
            )
        run_cfg = replace(cfg, stop_time=eps * stop, record_trajectory=True)
        report = run(scene, None, run_cfg)
        X = extract_scaled(report, scene, eps)
        sup = sup_distance(X, L)
        sko = max(
            skorohod_distance(
                xs.derivative_steps(), zs.derivative_steps(), stop
            )
            for xs, zs in zip(X.components, L.components)
        )
        row = ConvergenceRow(
            eps=eps,
            sup_dist=sup,
            skorohod_dist=sko,
            proper_count=report.proper_count,
            expected_count=expected,
            gap_margin=_gap_margin(X, m, n1),
        )
        _logger.debug("eps sweep row: %s", row)
        rows.append(row)

    last = rows[-1]
    if last.proper_count != expected:
        raise StageCountShortfall(
            f"eps={last.eps} produced {last.proper_count} proper collisions, "
            f"expected {expected}",
            got=last.proper_count,
            expected=expected,
        )
    return rows


def write_convergence_csv(path, rows: Sequence[ConvergenceRow]):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["eps", "sup_dist", "skorohod_dist", "proper_count", "expected_count"]
        )
        for r in rows:
            writer.writerow(
                [repr(r.eps), repr(r.sup_dist), repr(r.skorohod_dist), r.proper_count, r.expected_count]
            )


# --------------------------------------------------------------------------
# velocity hand-off residuals of a physical run


def velocity_transfer_check(report: SimulationReport, eps, bound: float = 16.0) -> float:
    """Worst normalized velocity hand-off error across a run's collisions.

    At each proper collision the post-collision arm rates should equal the
    partner's pre-collision rates up to order eps*(1+t) in rescaled time t;
    hub collisions additionally shift the opposite arm's projection by half
    the difference of the colliding ones.  Returns the largest residual
    divided by eps*(1+t), and raises if it exceeds ``bound``.
    """
    e = float(eps)
    if not e > 0:
        raise BadParams(f"eps must be positive, got {e}")
    fr = frame(DOUBLE)
    w = {
        "A": fr.w0.as_floats(),
        "B": fr.w1.as_floats(),
        "C": fr.w2.as_floats(),
    }

    def dot(wv, vec: Vec2) -> float:
        x, y = vec.as_floats()
        return wv[0] * x + wv[1] * y

    t0 = float(report.trajectory[0].time) if report.trajectory else 0.0
    worst = 0.0
    for ev in report.events:
        if ev.kind is not CollisionKind.PROPER:
            continue
        (id1, id2) = ev.pair
        pre = dict(zip((id1, id2), ev.pre_velocities))
        post = dict(zip((id1, id2), ev.post_velocities))
        fams = {id1.family, id2.family}
        residuals = []
        if id1.family == id2.family and abs(id1.index - id2.index) == 1:
            wv = w[id1.family]
            residuals.append(dot(wv, post[id1]) - dot(wv, pre[id2]))
            residuals.append(dot(wv, post[id2]) - dot(wv, pre[id1]))
        elif fams == {"A", "B"} and {id1.index, id2.index} == {1}:
            hub, arm = (id1, id2) if id1.family == "A" else (id2, id1)
            residuals.append(dot(w["B"], post[hub]) - dot(w["B"], pre[arm]))
            residuals.append(dot(w["B"], post[arm]) - dot(w["B"], pre[hub]))
            residuals.append(
                dot(w["C"], post[hub])
                - (
                    dot(w["C"], pre[hub])
                    + (dot(w["B"], pre[hub]) - dot(w["B"], pre[arm])) / 2
                )
            )
        elif fams == {"A", "C"} and {id1.index, id2.index} == {1}:
            hub, arm = (id1, id2) if id1.family == "A" else (id2, id1)
            residuals.append(dot(w["C"], post[hub]) - dot(w["C"], pre[arm]))
            residuals.append(dot(w["C"], post[arm]) - dot(w["C"], pre[hub]))
            residuals.append(
                dot(w["B"], post[hub])
                - (
                    dot(w["B"], pre[hub])
                    + (dot(w["C"], pre[hub]) - dot(w["C"], pre[arm])) / 2
                )
            )
        else:
            raise BadFamilies(
                f"collision {id1} x {id2} falls outside the hub-and-chains pattern"
            )
        t = (float(ev.time) - t0) / e
        scale = e * (1 + max(t, 0.0))
        worst = max(worst, max(abs(x) for x in residuals) / scale)
    if worst > bound:
        raise DiscBilliardsError(
            f"velocity hand-off residual {worst:.3g} exceeds the {bound} envelope"
        )
    return worst
