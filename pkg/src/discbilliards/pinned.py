"""Pseudo-velocity exchange between pinned discs.

The discs in this model never move.  Each carries a pseudo-velocity, and any
declared contact between two touching discs may be fired at any moment by an
external schedule: the component of the relative pseudo-velocity along the
(fixed) line of centers is handed from one disc to the other, exactly as in
an elastic collision, but with no approach requirement and no motion.

The two-arm configuration puts one disc at the origin and two chains of
touching discs along the upper-left and upper-right arm directions.  Firing
the contacts in alternating waves drains the origin disc's pseudo-speed
geometrically: each arm hit peels off the component along that arm and the
chain contacts then carry it outward.  ``closed_form_a1`` gives the origin
disc's pseudo-velocity after each arm hit in closed form, which
``run_main_schedule`` reproduces by iterated projection.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import IO, Optional

from .core import ReferenceFrame, Vec2, frame, project
from .errors import BadParams, NotInContact, OverlapInput

_CONTACT_TOL = 1e-9


@dataclass(frozen=True)
class PinnedConfig:
    """Static disc centers with per-disc pseudo-velocities and contact list.

    ``contacts`` enumerates the index pairs allowed to exchange; each pair
    must sit at center distance exactly 2 (touching).  Contacts are declared
    by the builder rather than detected, which keeps the geometry exact.
    """

    centers: tuple[Vec2, ...]
    pseudo_velocities: tuple[Vec2, ...]
    contacts: tuple[tuple[int, int], ...]
    labels: Optional[tuple[str, ...]] = None

    def __post_init__(self) -> None:
        n = len(self.centers)
        if len(self.pseudo_velocities) != n:
            raise BadParams("need one pseudo-velocity per center")
        if self.labels is not None and len(self.labels) != n:
            raise BadParams("need one label per center")
        for a in range(n):
            for b in range(a + 1, n):
                d = (self.centers[a] - self.centers[b]).norm()
                if float(d) < 2.0 - _CONTACT_TOL:
                    raise OverlapInput(
                        f"pinned discs {a} and {b} overlap (distance {float(d):.17g})"
                    )
        for i, j in self.contacts:
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise BadParams(f"contact ({i}, {j}) is out of range")
            d = (self.centers[i] - self.centers[j]).norm()
            if abs(float(d) - 2.0) > _CONTACT_TOL:
                raise BadParams(
                    f"contact ({i}, {j}) is not touching (distance {float(d):.17g})"
                )

    def label(self, i: int) -> str:
        if self.labels is not None:
            return self.labels[i]
        return f"D{i}"

    def pseudo_energy(self) -> float:
        return float(sum(v.norm2() for v in self.pseudo_velocities))

    def pseudo_momentum(self) -> Vec2:
        total = Vec2(0.0, 0.0)
        for v in self.pseudo_velocities:
            total = total + v
        return total


def pseudo_collide(cfg: PinnedConfig, pair: tuple[int, int]) -> PinnedConfig:
    """Fire one declared contact: exchange along the fixed line of centers.

    Unlike moving-disc collisions there is no approach condition; the
    schedule, not a predicate, decides what fires.  Pseudo-energy and total
    pseudo-momentum are preserved.
    """
    i, j = pair
    if (i, j) not in cfg.contacts and (j, i) not in cfg.contacts:
        raise NotInContact(f"({i}, {j}) is not a declared contact")
    axis = cfg.centers[i] - cfg.centers[j]
    transfer = project(axis, cfg.pseudo_velocities[i] - cfg.pseudo_velocities[j])
    vels = list(cfg.pseudo_velocities)
    vels[i] = vels[i] - transfer
    vels[j] = vels[j] + transfer
    return replace(cfg, pseudo_velocities=tuple(vels))


class ArmPhase(Enum):
    """Which arm the origin disc's pseudo-velocity points toward.

    After the k-th left-arm hit the residual points toward the right arm
    (TOWARD_C); after the k-th right-arm hit it points back toward the left
    arm (TOWARD_B).
    """

    TOWARD_C = "toward_c"
    TOWARD_B = "toward_b"


def closed_form_a1(
    k: int, phase: ArmPhase, fr: Optional[ReferenceFrame] = None
) -> Vec2:
    """Origin-disc pseudo-velocity after the k-th hit on the given arm.

    TOWARD_C returns (sqrt(3)/2^(2k-1)) u1, which decomposes as
    (3/2^(2k)) w2 + (sqrt(3)/2^(2k)) u2; TOWARD_B returns
    (sqrt(3)/2^(2k)) u2 = (3/2^(2k+1)) w1 + (sqrt(3)/2^(2k+1)) u1.
    Speeds halve per half-cycle.
    """
    if k < 1:
        raise BadParams("k must be >= 1")
    if fr is None:
        fr = frame()
    root3 = math.sqrt(3.0)
    if phase is ArmPhase.TOWARD_C:
        return fr.u1.scaled(root3 / 2.0 ** (2 * k - 1))
    if phase is ArmPhase.TOWARD_B:
        return fr.u2.scaled(root3 / 2.0 ** (2 * k))
    raise BadParams(f"unknown phase {phase!r}")


@dataclass(frozen=True)
class PseudoCollisionRecord:
    """One fired contact: step index, pair, and the pair's velocity change."""

    step: int
    pair: tuple[int, int]
    labels: tuple[str, str]
    before: tuple[Vec2, Vec2]
    after: tuple[Vec2, Vec2]


@dataclass(frozen=True)
class ScheduleHistory:
    """Full record of a two-arm schedule run.

    ``a1_after_b_hits[k-1]`` / ``a1_after_c_hits[k-1]`` hold the origin
    disc's pseudo-velocity right after its k-th left-arm / right-arm hit;
    ``wave_snapshots[k-1]`` is the configuration once wave k has finished
    both chain transfers.
    """

    final: PinnedConfig
    records: tuple[PseudoCollisionRecord, ...]
    a1_after_b_hits: tuple[Vec2, ...]
    a1_after_c_hits: tuple[Vec2, ...]
    wave_snapshots: tuple[PinnedConfig, ...]


def two_arm_config(n1: int, fr: Optional[ReferenceFrame] = None) -> PinnedConfig:
    """Origin disc plus two touching chains of n1 discs along each arm.

    The origin disc starts with unit upward pseudo-velocity; everything else
    is at rest.  Contacts: origin to the first disc of each chain, plus
    consecutive discs within each chain.
    """
    if n1 < 1:
        raise BadParams("n1 must be >= 1")
    if fr is None:
        fr = frame()
    centers = [Vec2(0.0, 0.0)]
    labels = ["A1"]
    for j in range(1, n1 + 1):
        centers.append(fr.w1.scaled(2.0 * j))
        labels.append(f"B{j}")
    for j in range(1, n1 + 1):
        centers.append(fr.w2.scaled(2.0 * j))
        labels.append(f"C{j}")
    contacts = [(0, 1), (0, n1 + 1)]
    for j in range(1, n1):
        contacts.append((j, j + 1))
        contacts.append((n1 + j, n1 + j + 1))
    vels = [fr.w0] + [Vec2(0.0, 0.0)] * (2 * n1)
    return PinnedConfig(
        centers=tuple(centers),
        pseudo_velocities=tuple(vels),
        contacts=tuple(contacts),
        labels=tuple(labels),
    )


def run_main_schedule(n1: int) -> ScheduleHistory:
    """Fire the alternating two-arm wave schedule and record everything.

    Wave k fires the left-arm contact, then n1-k left-chain transfers, then
    the right-arm contact, then n1-k right-chain transfers.  Over n1 waves
    that is exactly n1*(n1+1) pseudo-collisions (2*n1 of them at the origin
    disc).  Each wave leaves exactly one moving disc per touched chain.
    """
    cfg = two_arm_config(n1)
    records: list[PseudoCollisionRecord] = []
    a1_after_b: list[Vec2] = []
    a1_after_c: list[Vec2] = []
    snapshots: list[PinnedConfig] = []

    def fire(current: PinnedConfig, pair: tuple[int, int]) -> PinnedConfig:
        i, j = pair
        before = (current.pseudo_velocities[i], current.pseudo_velocities[j])
        nxt = pseudo_collide(current, pair)
        records.append(
            PseudoCollisionRecord(
                step=len(records),
                pair=pair,
                labels=(current.label(i), current.label(j)),
                before=before,
                after=(nxt.pseudo_velocities[i], nxt.pseudo_velocities[j]),
            )
        )
        return nxt

    b_of = lambda j: j  # noqa: E731 - tiny index maps read better inline
    c_of = lambda j: n1 + j  # noqa: E731
    for k in range(1, n1 + 1):
        cfg = fire(cfg, (0, b_of(1)))
        a1_after_b.append(cfg.pseudo_velocities[0])
        for j in range(1, n1 - k + 1):
            cfg = fire(cfg, (b_of(j), b_of(j + 1)))
        cfg = fire(cfg, (0, c_of(1)))
        a1_after_c.append(cfg.pseudo_velocities[0])
        for j in range(1, n1 - k + 1):
            cfg = fire(cfg, (c_of(j), c_of(j + 1)))
        snapshots.append(cfg)

    return ScheduleHistory(
        final=cfg,
        records=tuple(records),
        a1_after_b_hits=tuple(a1_after_b),
        a1_after_c_hits=tuple(a1_after_c),
        wave_snapshots=tuple(snapshots),
    )


def expected_wave_speed(k: int, arm: str) -> float:
    """Exact chain-pulse speed created by wave k on arm "B" or "C".

    The left arm's first pulse carries speed 1/2; afterwards both arms decay
    by a factor 4 per wave: 3/2^(2k-1) on the left, 3/2^(2k) on the right.
    """
    if k < 1:
        raise BadParams("k must be >= 1")
    if arm == "B":
        return 0.5 if k == 1 else 3.0 / 2.0 ** (2 * k - 1)
    if arm == "C":
        return 3.0 / 2.0 ** (2 * k)
    raise BadParams('arm must be "B" or "C"')


def _vec_json(v: Vec2) -> list[float]:
    return [float(v.x), float(v.y)]


def write_history(history: ScheduleHistory, fp: IO[str]) -> int:
    """Write one JSON line per fired contact; returns the line count."""
    for rec in history.records:
        fp.write(
            json.dumps(
                {
                    "step": rec.step,
                    "pair": list(rec.pair),
                    "labels": list(rec.labels),
                    "before": [_vec_json(rec.before[0]), _vec_json(rec.before[1])],
                    "after": [_vec_json(rec.after[0]), _vec_json(rec.after[1])],
                },
                separators=(",", ":"),
            )
        )
        fp.write("\n")
    return len(history.records)
