"""Command-line front end: build scenes, run them, check counts, plot paths.

Exit codes separate mathematical shortfalls from engineering failures so a
CI job can tell them apart: 0 success, 1 count shortfall, 2 bad input or
unreadable file, 3 simultaneous collision, 4 precision exhausted, 5 tuning
or stage-count failure while building a scene.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional
from xml.sax.saxutils import escape

from .constructions import (
    Scenario,
    Side,
    budget,
    build_1d_max,
    build_foch_like,
    build_main,
    build_near_triple,
    build_preparation,
    build_small_family,
    scenario_from_json,
    scenario_to_json,
    upper_bounds,
    verify_scenario,
)
from .core import DOUBLE, Precision
from .errors import (
    BadParams,
    DiscBilliardsError,
    PrecisionExhausted,
    SimultaneousCollision,
    StageCountShortfall,
    TuningFailed,
)
from .limit_process import (
    build_limit,
    conservation_check,
    convergence_experiment,
    discontinuities,
    gap_init_from_json,
    write_convergence_csv,
)
from .simulator import (
    BallState,
    CollisionKind,
    InjectionSchedule,
    SimConfig,
    SystemState,
    run,
    scene_from_json,
    write_event_log,
    write_trajectory_csv,
)

EXIT_OK = 0
EXIT_SHORTFALL = 1
EXIT_BAD_INPUT = 2
EXIT_SIMULTANEOUS = 3
EXIT_PRECISION = 4
EXIT_TUNING = 5


def _exit_code(exc: DiscBilliardsError) -> int:
    if isinstance(exc, SimultaneousCollision):
        return EXIT_SIMULTANEOUS
    if isinstance(exc, PrecisionExhausted):
        return EXIT_PRECISION
    if isinstance(exc, (TuningFailed, StageCountShortfall)):
        return EXIT_TUNING
    return EXIT_BAD_INPUT


# --------------------------------------------------------------------------
# run manifest


@dataclass
class RunManifest:
    """Sidecar record of one command invocation and its headline numbers."""

    command: str
    config: dict
    inputs: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    exit_status: int = 0
    counts: dict = field(default_factory=dict)

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(asdict(self), fh, indent=2)
            fh.write("\n")


def _manifest_path(args: argparse.Namespace) -> str:
    explicit = getattr(args, "manifest", None)
    if explicit:
        return explicit
    out = getattr(args, "out", None)
    if out:
        return str(Path(out).with_suffix(".manifest.json"))
    return f"billiards_{args.command.replace('-', '_')}_manifest.json"


# --------------------------------------------------------------------------
# shared flag handling


def _resolve_precision(args: argparse.Namespace, fallback: Optional[int] = None) -> Precision:
    """Pick the arithmetic backend: env var beats flag beats file beats double."""
    env = os.environ.get("BILLIARD_PRECISION_BITS")
    if env:
        try:
            bits = int(env)
        except ValueError:
            raise BadParams(f"BILLIARD_PRECISION_BITS must be an integer, got {env!r}")
    else:
        bits = getattr(args, "precision", None)
        if bits is None:
            bits = fallback
    return DOUBLE if bits is None else Precision(bits=bits)


def _explicit_bits(args: argparse.Namespace) -> Optional[int]:
    env = os.environ.get("BILLIARD_PRECISION_BITS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise BadParams(f"BILLIARD_PRECISION_BITS must be an integer, got {env!r}")
    return getattr(args, "precision", None)


def _digit_count(value: int) -> int:
    """Decimal digits of a positive integer, safe past the str() size cap."""
    d = (value.bit_length() - 1) * 30103 // 100000  # floor(log10(2)) scaled
    while 10 ** (d + 1) <= value:
        d += 1
    return d + 1


def _big(value: int, threshold: int = 40) -> str:
    """Exact integer when short, mantissa plus digit count when huge."""
    digits = _digit_count(value)
    if digits <= threshold:
        return str(value)
    lead = str(value // 10 ** (digits - 7))
    return f"{lead[0]}.{lead[1:]}e+{digits - 1} ({digits} digits)"


def _load_json(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


# --------------------------------------------------------------------------
# SVG plotting

_FAMILY_COLORS = {"A": "#c0392b", "B": "#2471a3", "C": "#1e8449", "P": "#6c3483"}
_VIEW = 1000.0


class _Viewport:
    """Map a square world window onto the fixed 1000 x 1000 view, y up."""

    def __init__(self, box):
        xmin, ymin, xmax, ymax = box
        span = max(xmax - xmin, ymax - ymin, 1e-9)
        self.scale = _VIEW / span
        self.x0 = (xmin + xmax) / 2.0 - span / 2.0
        self.y1 = (ymin + ymax) / 2.0 + span / 2.0

    def mx(self, x: float) -> float:
        return (x - self.x0) * self.scale

    def my(self, y: float) -> float:
        return (self.y1 - y) * self.scale


def _tracks(snapshots):
    """Center polylines keyed by disc id, in first-appearance order."""
    order: list = []
    tracks: dict = {}
    for snap in snapshots:
        for b in snap.balls:
            key = str(b.id)
            if key not in tracks:
                tracks[key] = []
                order.append(key)
            tracks[key].append((float(b.center.x), float(b.center.y)))
    return order, tracks


def _view_window(tracks) -> tuple:
    """A window around where discs start; far excursions get clipped.

    The window is seeded by every disc's first recorded position (initial
    placement or injection point) so a fast disc that shoots far away does
    not flatten everything else into a line.
    """
    seeds = [tr[0] for tr in tracks.values()]
    xs = [p[0] for p in seeds]
    ys = [p[1] for p in seeds]
    diag = math.hypot(max(xs) - min(xs), max(ys) - min(ys))
    pad = max(6.0, 1.5 * diag)
    return min(xs) - pad, min(ys) - pad, max(xs) + pad, max(ys) + pad


def _clip_segment(p, q, box):
    """Liang-Barsky: the visible piece of segment p-q, or None."""
    xmin, ymin, xmax, ymax = box
    dx, dy = q[0] - p[0], q[1] - p[1]
    t0, t1 = 0.0, 1.0
    for pk, qk in (
        (-dx, p[0] - xmin),
        (dx, xmax - p[0]),
        (-dy, p[1] - ymin),
        (dy, ymax - p[1]),
    ):
        if pk == 0.0:
            if qk < 0.0:
                return None
            continue
        r = qk / pk
        if pk < 0.0:
            if r > t1:
                return None
            if r > t0:
                t0 = r
        else:
            if r < t0:
                return None
            if r < t1:
                t1 = r
    return (
        (p[0] + t0 * dx, p[1] + t0 * dy),
        (p[0] + t1 * dx, p[1] + t1 * dy),
        t0,
    )


def _clip_polyline(points, box):
    """Visible runs of a polyline plus the farthest point if any part left."""
    runs: list = []
    current: list = []
    farthest = None
    cx, cy = (box[0] + box[2]) / 2.0, (box[1] + box[3]) / 2.0
    for p, q in zip(points, points[1:]):
        piece = _clip_segment(p, q, box)
        for outside in (p, q):
            if not (box[0] <= outside[0] <= box[2] and box[1] <= outside[1] <= box[3]):
                d = math.hypot(outside[0] - cx, outside[1] - cy)
                if farthest is None or d > farthest[0]:
                    farthest = (d, outside)
        if piece is None:
            if current:
                runs.append(current)
                current = []
            continue
        a, b, t0 = piece
        if t0 > 0.0 and current:
            runs.append(current)
            current = []
        if not current:
            current.append(a)
        current.append(b)
    if current:
        runs.append(current)
    if len(points) == 1:
        runs.append([points[0]])
    return runs, None if farthest is None else farthest[1]


def render_svg(path, snapshots, events, title: str) -> None:
    """Deterministic trajectory plot: paths as polylines, collisions as dots.

    The view window follows the discs' starting positions; paths that leave
    it are clipped at the border and noted in a text inset instead of
    letting one runaway disc squash the interesting region.
    """
    order, tracks = _tracks(snapshots)
    box = _view_window(tracks)
    view = _Viewport(box)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_VIEW:.0f} {_VIEW:.0f}">',
        f'<rect width="{_VIEW:.0f}" height="{_VIEW:.0f}" fill="white"/>',
    ]
    notes: list = []
    for key in order:
        pts = tracks[key]
        color = _FAMILY_COLORS.get(key[0], "#555555")
        runs, farthest = _clip_polyline(pts, box)
        for piece in runs:
            if len(piece) < 2:
                continue
            attr = " ".join(f"{view.mx(x):.2f},{view.my(y):.2f}" for x, y in piece)
            parts.append(
                f'<polyline points="{attr}" fill="none" stroke="{color}" stroke-width="2"/>'
            )
        x0, y0 = pts[0]
        parts.append(
            f'<circle cx="{view.mx(x0):.2f}" cy="{view.my(y0):.2f}" r="{view.scale:.2f}" '
            f'fill="{color}" fill-opacity="0.15" stroke="{color}" stroke-width="1"/>'
        )
        if farthest is not None:
            notes.append(f"{key} clipped, reaches ({farthest[0]:.1f}, {farthest[1]:.1f})")
    by_time: dict = {}
    for snap in snapshots:
        by_time.setdefault(float(snap.time), snap)
    for e in events:
        snap = by_time.get(float(e.time))
        if snap is None:
            continue
        a = snap.ball(e.pair[0]).center
        b = snap.ball(e.pair[1]).center
        x = (float(a.x) + float(b.x)) / 2.0
        y = (float(a.y) + float(b.y)) / 2.0
        if not (box[0] <= x <= box[2] and box[1] <= y <= box[3]):
            continue
        if e.kind is CollisionKind.PROPER:
            parts.append(f'<circle cx="{view.mx(x):.2f}" cy="{view.my(y):.2f}" r="4" fill="black"/>')
        else:
            parts.append(
                f'<circle cx="{view.mx(x):.2f}" cy="{view.my(y):.2f}" r="4" '
                'fill="none" stroke="black" stroke-width="1"/>'
            )
    parts.append(
        f'<text x="14" y="26" font-family="monospace" font-size="18">{escape(title)}</text>'
    )
    for i, note in enumerate(notes):
        parts.append(
            f'<text x="14" y="{48 + 20 * i}" font-family="monospace" font-size="14" '
            f'fill="#555555">{escape(note)}</text>'
        )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts))
        fh.write("\n")


# --------------------------------------------------------------------------
# commands


def cmd_bounds(args: argparse.Namespace, manifest: RunManifest) -> int:
    b = budget(args.n)
    cube = args.n**3 / 27.0
    if b.f == b.naive:
        flag = "equal"
    elif b.f > b.naive:
        flag = "exceeds naive"
    else:
        flag = "below naive"
    print(f"n={b.n} split n1={b.n1} n2={b.n2}")
    print(f"f={b.f} naive={b.naive} ({flag})")
    print(f"n^3/27={cube:.3f} ratio f/(n^3/27)={b.f / cube:.4f}")
    first, second = upper_bounds(args.n)
    print(f"upper bound (32 n^1.5)^(n^2):  {_big(first)}")
    print(f"upper bound (400 n^2)^(2 n^4): {_big(second)}")
    if args.n == 3:
        print("note: K(3,2) = 4, three planar discs can collide four times")
    manifest.counts = {"f": b.f, "naive": b.naive}
    return EXIT_OK


def _load_runnable(path, args: argparse.Namespace):
    """Accept either a bare scene file or a full scenario file."""
    doc = _load_json(path)
    if "state" in doc and "kind" in doc:
        sc = scenario_from_json(doc)
        bits = _explicit_bits(args)
        if bits is not None and bits != sc.config.precision.bits:
            prec = Precision(bits=bits)
            doc["precision_bits"] = bits
            sc = scenario_from_json(doc)
        return sc.initial, sc.injections, sc.config
    prec = _resolve_precision(args, fallback=doc.get("precision_bits"))
    state, injections = scene_from_json(doc, prec)
    return state, injections, SimConfig(precision=prec)


def cmd_simulate(args: argparse.Namespace, manifest: RunManifest) -> int:
    manifest.inputs.append(args.scene)
    state, injections, cfg = _load_runnable(args.scene, args)
    prec = cfg.precision
    want_paths = bool(args.svg or args.csv)
    stop = args.stop_time if args.stop_time is not None else cfg.stop_time
    cfg = SimConfig(
        precision=prec,
        stop_time=prec.number(stop) if stop is not None else None,
        max_events=args.max_events,
        record_trajectory=want_paths,
    )
    report = run(state, injections, cfg)
    print(f"proper={report.proper_count}")
    print(
        f"events={len(report.events)} halt={report.halt_reason} "
        f"energy_drift={report.energy_drift:.3e} momentum_drift={report.momentum_drift:.3e}"
    )
    if args.out:
        write_event_log(args.out, report.events, prec)
        manifest.outputs.append(args.out)
    if args.csv:
        write_trajectory_csv(args.csv, report.trajectory)
        manifest.outputs.append(args.csv)
    if args.svg:
        title = f"{Path(args.scene).name}  proper={report.proper_count}"
        render_svg(args.svg, report.trajectory, report.events, title)
        manifest.outputs.append(args.svg)
    manifest.counts = {
        "proper": report.proper_count,
        "events": len(report.events),
    }
    return EXIT_OK


def _build_scenario(args: argparse.Namespace) -> Scenario:
    kind = args.kind
    if kind in ("oned", "small", "main") and args.n is None:
        raise BadParams(f"--kind {kind} needs --n")
    if kind == "oned":
        return build_1d_max(args.n)
    if kind == "foch":
        return build_foch_like()
    if kind == "small":
        prec = _resolve_precision(args)
        return build_small_family(args.n, precision=prec)
    if kind == "main":
        bits = _explicit_bits(args)
        return build_main(
            args.n,
            rho0=args.rho0,
            eps0=args.eps0,
            adaptive=args.adaptive,
            precision=Precision(bits=bits) if bits is not None else None,
        )
    if kind == "near-triple":
        return build_near_triple(args.eps, Side(args.side))
    if kind == "prep":
        if args.n1 is None:
            raise BadParams("--kind prep needs --n1")
        prec = _resolve_precision(args)
        state = build_preparation(args.n1, args.eps, args.rho, precision=prec)
        reversed_state = SystemState(
            time=state.time,
            balls=tuple(BallState(b.id, b.center, -b.velocity) for b in state.balls),
        )
        return Scenario(
            kind="prep",
            initial=reversed_state,
            injections=InjectionSchedule(),
            expected_total=args.n1 * (args.n1 - 1),
            exact_total=True,
            config=SimConfig(precision=prec),
        )
    raise BadParams(f"unknown kind {kind!r}")


def _expectation_counts(sc: Scenario) -> dict:
    counts = {
        "expected_total": sc.expected_total,
        "exact_total": sc.exact_total,
    }
    if sc.expected_stage_counts is not None:
        counts["expected_stage_counts"] = list(sc.expected_stage_counts)
    return counts


def cmd_construct(args: argparse.Namespace, manifest: RunManifest) -> int:
    sc = _build_scenario(args)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_json(sc), fh, indent=2)
        fh.write("\n")
    manifest.outputs.append(args.out)
    manifest.counts = _expectation_counts(sc)
    rel = "exactly" if sc.exact_total else "at least"
    print(f"wrote {args.out} (kind={sc.kind}, expects {rel} {sc.expected_total})")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, manifest: RunManifest) -> int:
    if args.scene:
        manifest.inputs.append(args.scene)
        sc = scenario_from_json(_load_json(args.scene))
    else:
        if args.kind is None:
            raise BadParams("verify needs --kind or --scene")
        sc = _build_scenario(args)
    result = verify_scenario(sc)
    for s in result.stages:
        rel = ">=" if s.minimum else "=="
        status = "ok" if s.ok else "SHORT"
        print(
            f"stage {s.index}  window [{s.window[0]:.6g}, {s.window[1]:.6g})  "
            f"expected {rel} {s.expected}  got {s.got}  {status}"
        )
    rel = "==" if sc.exact_total else ">="
    status = "ok" if result.total_ok else "SHORT"
    print(
        f"total  expected {rel} {sc.expected_total}  "
        f"got {result.report.proper_count}  {status}"
    )
    manifest.counts = {
        "proper": result.report.proper_count,
        **_expectation_counts(sc),
        "passed": result.passed,
    }
    if result.passed:
        print(f"verified kind={sc.kind}")
        return EXIT_OK
    failing = next((s for s in result.stages if not s.ok), None)
    if failing is not None:
        print(f"shortfall at stage {failing.index}: got {failing.got}, expected {failing.expected}")
    else:
        print(f"shortfall in total: got {result.report.proper_count}, expected {sc.expected_total}")
    return EXIT_SHORTFALL


def cmd_limit(args: argparse.Namespace, manifest: RunManifest) -> int:
    manifest.inputs.append(args.gaps)
    g = gap_init_from_json(_load_json(args.gaps))
    m = args.m if args.m is not None else g.m
    n1 = args.n1 if args.n1 is not None else g.n1
    L = build_limit(g, m, n1)
    events = discontinuities(L)
    print(f"m={m} n1={n1} horizon={L.horizon}")
    for t, idx in events:
        labels = ",".join(L.labels[i] for i in idx)
        print(f"breakpoint t={t}  affected={labels}")
    print(f"discontinuities={len(events)} expected={m - 1 + n1 * (n1 + 1)}")
    times = sorted(list(L.tB) + list(L.tC) + [t for t in L.tA if t > 0])
    checks = []
    for t in times:
        rep = conservation_check(L, t)
        checks.append(rep)
        status = "exact" if rep.passed else "VIOLATION"
        print(f"conservation at t={rep.time} ({rep.family}{rep.index}): {status}")
    ok = all(rep.passed for rep in checks)
    if args.report:
        doc = {
            "m": m,
            "n1": n1,
            "horizon": str(L.horizon),
            "discontinuities": [
                {"time": str(t), "affected": [L.labels[i] for i in idx]} for t, idx in events
            ],
            "conservation": [
                {
                    "time": str(rep.time),
                    "family": rep.family,
                    "index": rep.index,
                    "exact": rep.passed,
                }
                for rep in checks
            ],
        }
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
        manifest.outputs.append(args.report)
    manifest.counts = {
        "discontinuities": len(events),
        "conservation_exact": sum(1 for rep in checks if rep.passed),
    }
    return EXIT_OK if ok else EXIT_SHORTFALL


def cmd_converge(args: argparse.Namespace, manifest: RunManifest) -> int:
    manifest.inputs.append(args.gaps)
    g = gap_init_from_json(_load_json(args.gaps))
    m = args.m if args.m is not None else g.m
    n1 = args.n1 if args.n1 is not None else g.n1
    try:
        eps_list = tuple(float(tok) for tok in args.eps.split(","))
    except ValueError:
        raise BadParams(f"--eps must be a comma-separated float list, got {args.eps!r}")
    rows = convergence_experiment(g, m, n1, eps_list)
    write_convergence_csv(args.out, rows)
    manifest.outputs.append(args.out)
    for r in rows:
        print(
            f"eps={r.eps:g}  sup={r.sup_dist:.3e}  skorohod={r.skorohod_dist:.3e}  "
            f"proper={r.proper_count}/{r.expected_count}  gap_margin={r.gap_margin:.3e}"
        )
    print(f"wrote {args.out}")
    manifest.counts = {
        "proper": rows[-1].proper_count,
        "expected": rows[-1].expected_count,
    }
    return EXIT_OK


# --------------------------------------------------------------------------
# parser and entry point


def _add_manifest_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--manifest",
        default=None,
        help="run manifest path (default: next to --out, or ./billiards_<cmd>_manifest.json)",
    )


def _add_kind_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--kind",
        choices=("oned", "foch", "small", "main", "near-triple", "prep"),
        default=None,
        help="which construction to build",
    )
    p.add_argument("--n", type=int, default=None, help="disc count (oned, small, main)")
    p.add_argument("--n1", type=int, default=None, help="arm length (prep)")
    p.add_argument("--eps", type=float, default=1e-3, help="offset scale (near-triple, prep)")
    p.add_argument("--rho", type=float, default=4.0, help="gap spread (prep)")
    p.add_argument("--rho0", type=float, default=4.0, help="initial gap spread (main)")
    p.add_argument("--eps0", type=float, default=None, help="initial offset scale (main)")
    p.add_argument(
        "--side",
        choices=("left", "right"),
        default="left",
        help="bias direction (near-triple)",
    )
    p.add_argument(
        "--adaptive",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="retry main construction with shrunken eps0 and more bits on failure",
    )
    p.add_argument("--precision", type=int, default=None, help="significand bits")


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="discbilliards",
        description="Colliding unit discs: scene builders, event-driven runs, limit diagnostics.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="print collision-count bounds for n discs")
    p.add_argument("--n", type=int, required=True)
    _add_manifest_flag(p)
    p.set_defaults(handler=cmd_bounds)

    p = sub.add_parser("simulate", help="run a scene or scenario file")
    p.add_argument("scene", help="scene/scenario JSON path")
    p.add_argument("--precision", type=int, default=None, help="significand bits")
    p.add_argument("--stop-time", type=float, default=None)
    p.add_argument("--max-events", type=int, default=100_000)
    p.add_argument("--out", default=None, help="event log path (one JSON object per line)")
    p.add_argument(
        "--csv",
        default=None,
        help="trajectory table path; columns time,id,cx,cy,vx,vy (one row per disc per event)",
    )
    p.add_argument("--svg", default=None, help="trajectory plot path")
    _add_manifest_flag(p)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("construct", help="build a scene and save it with its expected counts")
    _add_kind_flags(p)
    p.add_argument("--out", required=True, help="scenario JSON path")
    _add_manifest_flag(p)
    p.set_defaults(handler=cmd_construct)

    p = sub.add_parser("verify", help="build (or load) a scenario, run it, compare counts")
    _add_kind_flags(p)
    p.add_argument("--scene", default=None, help="check a saved scenario instead of building")
    _add_manifest_flag(p)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("limit", help="print the exact scaled evolution of a gap file")
    p.add_argument("gaps", help="gap JSON path (fractions as 'p/q' strings)")
    p.add_argument("--m", type=int, default=None, help="vertical chain length")
    p.add_argument("--n1", type=int, default=None, help="arm length")
    p.add_argument("--report", default=None, help="detailed JSON report path")
    _add_manifest_flag(p)
    p.set_defaults(handler=cmd_limit)

    p = sub.add_parser("converge", help="sweep eps and compare simulations against the limit")
    p.add_argument("gaps", help="gap JSON path")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--n1", type=int, default=None)
    p.add_argument(
        "--eps",
        default="1e-2,1e-3,1e-4",
        help="comma-separated decreasing scales",
    )
    p.add_argument("--out", required=True, help="sweep CSV path")
    _add_manifest_flag(p)
    p.set_defaults(handler=cmd_converge)

    return top


def _public_config(args: argparse.Namespace) -> dict:
    skip = {"handler", "command", "manifest"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    manifest = RunManifest(command=args.command, config=_public_config(args))
    try:
        code = args.handler(args, manifest)
    except DiscBilliardsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = _exit_code(exc)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_BAD_INPUT
    manifest.exit_status = code
    try:
        manifest.write(_manifest_path(args))
    except OSError as exc:
        print(f"warning: could not write manifest: {exc}", file=sys.stderr)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
