"""Event-driven hard-disc billiards with collision-count experiments.

The package simulates equal-mass unit discs in the plane under the elastic
collision law, provides builders for families of initial conditions that
realize known collision-count lower bounds, a pinned (static-disc)
pseudo-collision calculus, and an exact rational model of the limiting
piecewise-linear gap dynamics together with convergence diagnostics.
"""

from .constructions import (
    CollisionBudget,
    ICReport,
    Scenario,
    Side,
    StageResult,
    StageSchedule,
    VerificationResult,
    budget,
    build_1d_max,
    build_foch_like,
    build_main,
    build_near_triple,
    build_preparation,
    build_small_family,
    check_ic,
    halfline_crossings,
    scenario_from_json,
    scenario_to_json,
    schedule,
    upper_bounds,
    verify_scenario,
)
from .core import DOUBLE, Precision, ReferenceFrame, Vec2, frame, project
from .limit_process import (
    ConservationReport,
    ConvergenceRow,
    GapInit,
    LimitEvolution,
    PiecewiseLinear,
    SampledPath,
    ScaledTrajectory,
    StepPath,
    build_gap_scene,
    build_limit,
    conservation_check,
    convergence_experiment,
    discontinuities,
    extract_scaled,
    gap_init_from_json,
    gap_init_to_json,
    random_gap_init,
    skorohod_distance,
    sup_distance,
    velocity_transfer_check,
    write_convergence_csv,
)
from .pinned import (
    ArmPhase,
    PinnedConfig,
    PseudoCollisionRecord,
    ScheduleHistory,
    closed_form_a1,
    expected_wave_speed,
    pseudo_collide,
    run_main_schedule,
    two_arm_config,
    write_history,
)
from .simulator import (
    BallId,
    BallState,
    CollisionEvent,
    CollisionKind,
    InjectionSchedule,
    SimConfig,
    SimulationReport,
    SystemState,
    free_flight,
    load_scene,
    resolve_collision,
    reverse_time,
    run,
    save_scene,
    time_to_collision,
)

__all__ = [
    "DOUBLE",
    "Precision",
    "ReferenceFrame",
    "Vec2",
    "frame",
    "project",
    "BallId",
    "BallState",
    "CollisionEvent",
    "CollisionKind",
    "InjectionSchedule",
    "SimConfig",
    "SimulationReport",
    "SystemState",
    "free_flight",
    "load_scene",
    "resolve_collision",
    "reverse_time",
    "run",
    "save_scene",
    "time_to_collision",
    "CollisionBudget",
    "ICReport",
    "Scenario",
    "Side",
    "StageResult",
    "StageSchedule",
    "VerificationResult",
    "budget",
    "build_1d_max",
    "build_foch_like",
    "build_main",
    "build_near_triple",
    "build_preparation",
    "build_small_family",
    "check_ic",
    "halfline_crossings",
    "scenario_from_json",
    "scenario_to_json",
    "schedule",
    "upper_bounds",
    "verify_scenario",
    "ArmPhase",
    "PinnedConfig",
    "PseudoCollisionRecord",
    "ScheduleHistory",
    "closed_form_a1",
    "expected_wave_speed",
    "pseudo_collide",
    "run_main_schedule",
    "two_arm_config",
    "write_history",
    "ConservationReport",
    "ConvergenceRow",
    "GapInit",
    "LimitEvolution",
    "PiecewiseLinear",
    "SampledPath",
    "ScaledTrajectory",
    "StepPath",
    "build_gap_scene",
    "build_limit",
    "conservation_check",
    "convergence_experiment",
    "discontinuities",
    "extract_scaled",
    "gap_init_from_json",
    "gap_init_to_json",
    "random_gap_init",
    "skorohod_distance",
    "sup_distance",
    "velocity_transfer_check",
    "write_convergence_csv",
]

__version__ = "0.1.0"
