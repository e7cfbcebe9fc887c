"""Quasi-static model of thin-layer separation with a roller-fingertip gripper.

Modules
-------
materials  layer properties, friction pairs, the bundled material table
mechanics  friction/buckling force balance, outcome classification, FD buckling check
graspfsm   Approach/Hold/Drag/Snap/Grasp/Lift state machine and episode simulation
sweep      seeded parameter sweeps and grid files
expdata    trial-log ingestion, success rates, holding-force calibration
cli        ``layersep`` command line
"""

from .graspfsm import (
    Coating,
    Done,
    EpisodeConfig,
    EpisodeTrace,
    Event,
    FailureReason,
    FingerSpec,
    Phase,
    run_episode,
    step,
)
from .materials import (
    FrictionTable,
    LayerStack,
    MaterialSheet,
    friction_coefficient,
    load_database,
    load_material_db,
    second_moment_of_area,
)
from .mechanics import (
    ClampMode,
    ClampSpec,
    ForceBalance,
    OutcomeKind,
    RollerSpec,
    RollerSurface,
    SeparationOutcome,
    SeparationScenario,
    buckling_critical_load,
    friction_force,
    numerical_buckling_oracle,
    predict,
    predict_clamped,
    predict_unclamped,
    resolve_balance,
)
from .sweep import ContactModel, NoiseModel, OutcomeGrid, SweepAxes, clamp_comparison, run_sweep

__version__ = "0.1.0"
