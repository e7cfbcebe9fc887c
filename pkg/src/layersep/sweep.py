"""Seeded parameter sweeps over penetration, roller speed, edge distance and roller type.

Every repetition of every cell draws its perturbations from its own random
stream, keyed by ``(seed, cell, repetition)``. Tallies therefore do not
depend on evaluation order, and cells may be farmed out to worker
processes without changing a single count.

The cell key leaves out the roller-type coordinate. Dented and smooth
variants of a cell see the same perturbed friction and normal force, so
comparisons between roller types are paired.
"""

from __future__ import annotations

import csv
import io
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .graspfsm import EpisodeConfig, run_episode
from .mechanics import (
    DEFAULT_SMOOTH_OVERRUN,
    ClampMode,
    ClampSpec,
    OutcomeKind,
    RollerSpec,
    RollerSurface,
    rpm_to_rad_s,
)

GRID_COLUMNS = ("penetration_m", "velocity_rpm", "edge_distance_m", "roller",
                "success", "reps", "modal_outcome")
MU_FLOOR = 0.01
REFERENCE_RPM = 18.3  # speed at which the roller's overrun tolerance is specified
_KIND_ORDER = {k: i for i, k in enumerate(OutcomeKind)}


class SweepError(RuntimeError):
    pass


@dataclass(frozen=True)
class ContactModel:
    """Linear map from commanded penetration depth to roller normal force."""

    stiffness: float = 500.0  # N/m, assumed

    def __post_init__(self):
        if not self.stiffness > 0:
            raise ValueError("contact stiffness must be > 0")

    def normal_force(self, penetration: float) -> float:
        return self.stiffness * abs(penetration)


def _paper_penetrations():
    return tuple(float(x) for x in np.linspace(0.0, 4e-3, 5))


def _paper_velocities():
    return tuple(float(x) for x in np.linspace(1.0, 45.0, 5))


@dataclass(frozen=True)
class SweepAxes:
    penetrations: tuple[float, ...] = field(default_factory=_paper_penetrations)  # m
    velocities: tuple[float, ...] = field(default_factory=_paper_velocities)  # rev/min
    edge_distances: tuple[float, ...] = (0.02,)  # m
    roller_types: tuple[RollerSurface, ...] = (RollerSurface.DENTED,)
    repetitions: int = 5

    def __post_init__(self):
        for name in ("penetrations", "velocities", "edge_distances", "roller_types"):
            values = tuple(getattr(self, name))
            if not values:
                raise ValueError(f"sweep axis {name} is empty")
            if len(set(values)) != len(values):
                raise ValueError(f"sweep axis {name} has repeated values")
            object.__setattr__(self, name, values)
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return (len(self.penetrations), len(self.velocities),
                len(self.edge_distances), len(self.roller_types))


@dataclass(frozen=True)
class NoiseModel:
    mu_sigma: float = 0.05  # relative
    fn_sigma: float = 0.10  # relative
    seed: int = 0

    def __post_init__(self):
        if self.mu_sigma < 0 or self.fn_sigma < 0:
            raise ValueError("noise sigmas must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True, eq=False)
class OutcomeGrid:
    axes: SweepAxes
    success: np.ndarray  # int, shape axes.shape
    modal: np.ndarray  # OutcomeKind objects, shape axes.shape

    @property
    def repetitions(self) -> int:
        return self.axes.repetitions

    @property
    def rate(self) -> np.ndarray:
        return self.success / self.axes.repetitions

    def __eq__(self, other):
        if not isinstance(other, OutcomeGrid):
            return NotImplemented
        return (self.axes == other.axes
                and np.array_equal(self.success, other.success)
                and np.array_equal(self.modal, other.modal))

    def cells(self):
        """Yield ``(penetration, rpm, edge_distance, roller, success, modal)`` in C order."""
        a = self.axes
        for idx in np.ndindex(*a.shape):
            i, j, k, r = idx
            yield (a.penetrations[i], a.velocities[j], a.edge_distances[k],
                   a.roller_types[r], int(self.success[idx]), self.modal[idx])

    def roller_slice(self, roller: RollerSurface) -> np.ndarray:
        return self.success[..., self.axes.roller_types.index(roller)]


# --- evaluation ----------------------------------------------------------------


def _tolerance_at(base: RollerSpec, rpm: float) -> float:
    # A smooth roller captures the bottom layer once it has turned a fixed
    # angle past the edge; with a fixed stop latency this shrinks the
    # tolerated delay as the speed grows.
    ref = DEFAULT_SMOOTH_OVERRUN if base.overrun_tolerance is None else base.overrun_tolerance
    return ref * REFERENCE_RPM / rpm


def _perturbed_config(base: EpisodeConfig, contact: ContactModel, noise: NoiseModel,
                      axes: SweepAxes, idx: tuple[int, int, int, int], rep: int) -> EpisodeConfig:
    i, j, k, r = idx
    s = base.scenario
    key = np.ravel_multi_index((i, j, k), axes.shape[:3])
    rng = np.random.default_rng([noise.seed, int(key), rep])
    z = rng.standard_normal(4)

    top, bottom = s.stack.top, s.stack.bottom
    pairs = [
        (s.roller.roller_surface_id, top.top_surface),
        (top.bottom_surface, bottom.top_surface),
        (bottom.bottom_surface, s.stack.substrate),
    ]
    overrides = {}
    for pair, zi in zip(pairs, z[:3]):
        mu = s.friction[pair] * (1.0 + noise.mu_sigma * zi)
        overrides[pair] = max(mu, MU_FLOOR)
    fn = contact.normal_force(axes.penetrations[i]) * (1.0 + noise.fn_sigma * z[3])

    rpm = axes.velocities[j]
    surface = axes.roller_types[r]
    roller = replace(
        s.roller,
        surface=surface,
        angular_velocity=rpm_to_rad_s(rpm),
        overrun_tolerance=_tolerance_at(s.roller, rpm),
    )
    scenario = replace(
        s,
        friction=s.friction.with_overrides(overrides),
        normal_force=max(fn, 0.0),
        roller=roller,
        edge_distance=axes.edge_distances[k],
    )
    return replace(base, scenario=scenario)


def _modal_kind(kinds: list[OutcomeKind]) -> OutcomeKind:
    counts: dict[OutcomeKind, int] = {}
    for kind in kinds:
        counts[kind] = counts.get(kind, 0) + 1
    return max(counts, key=lambda kind: (counts[kind], -_KIND_ORDER[kind]))


def _evaluate_cell(task):
    base, contact, noise, axes, idx, calibration = task
    wins = 0
    kinds = []
    try:
        for rep in range(axes.repetitions):
            cfg = _perturbed_config(base, contact, noise, axes, idx, rep)
            trace = run_episode(cfg, calibration)
            wins += trace.success
            kinds.append(trace.separation)
    except Exception as exc:
        i, j, k, r = idx
        raise SweepError(
            f"cell (penetration={axes.penetrations[i]!r} m, velocity={axes.velocities[j]!r} rpm, "
            f"edge_distance={axes.edge_distances[k]!r} m, roller={axes.roller_types[r].value}): "
            f"{type(exc).__name__}: {exc}"
        ) from exc
    return idx, wins, _modal_kind(kinds)


def run_sweep(axes: SweepAxes, base: EpisodeConfig, contact: ContactModel | None = None,
              noise: NoiseModel | None = None, workers: int | None = None,
              calibration=None) -> OutcomeGrid:
    """Run ``axes.repetitions`` episodes per cell and tally successes.

    ``workers > 1`` evaluates cells in a process pool; the result is
    identical to the serial run.
    """
    contact = contact or ContactModel()
    noise = noise or NoiseModel()
    if calibration is None:
        from .expdata import default_holding_calibration
        calibration = default_holding_calibration()

    tasks = [(base, contact, noise, axes, idx, calibration) for idx in np.ndindex(*axes.shape)]
    success = np.zeros(axes.shape, dtype=np.int64)
    modal = np.empty(axes.shape, dtype=object)

    if workers is not None and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate_cell, tasks,
                                    chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        results = map(_evaluate_cell, tasks)
    for idx, wins, kind in results:
        success[idx] = wins
        modal[idx] = kind
    success.setflags(write=False)
    modal.setflags(write=False)
    return OutcomeGrid(axes, success, modal)


def clamp_comparison(axes: SweepAxes, base: EpisodeConfig, contact: ContactModel | None = None,
                     noise: NoiseModel | None = None, clamp: ClampSpec | None = None,
                     workers: int | None = None, calibration=None
                     ) -> tuple[OutcomeGrid, OutcomeGrid]:
    """Run the same grid unclamped and held by the fingers."""
    if clamp is None:
        current = base.scenario.clamp
        clamp = current if current.mode is ClampMode.FINGER else ClampSpec.finger()
    if clamp.mode is not ClampMode.FINGER:
        raise ValueError("clamp_comparison compares against a FingerClamp")
    free = replace(base, scenario=replace(base.scenario, clamp=ClampSpec.unclamped()))
    held = replace(base, scenario=replace(base.scenario, clamp=clamp))
    return (run_sweep(axes, free, contact, noise, workers, calibration),
            run_sweep(axes, held, contact, noise, workers, calibration))


def success_region(grid: OutcomeGrid) -> list[tuple]:
    """Cells with at least one success, as ``(penetration, rpm, edge, roller, success)``."""
    return [c[:5] for c in grid.cells() if c[4] > 0]


def dominance(grid: OutcomeGrid, better: RollerSurface = RollerSurface.DENTED,
              worse: RollerSurface = RollerSurface.SMOOTH) -> tuple[bool, int]:
    """``(better >= worse in every cell, number of cells where better > worse)``."""
    a, b = grid.roller_slice(better), grid.roller_slice(worse)
    return bool(np.all(a >= b)), int(np.count_nonzero(a > b))


# --- files -----------------------------------------------------------------------


def format_grid_csv(grid: OutcomeGrid) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(GRID_COLUMNS)
    for pen, rpm, edge, roller, wins, kind in grid.cells():
        w.writerow([repr(pen), repr(rpm), repr(edge), roller.value, wins,
                    grid.repetitions, kind.value])
    return buf.getvalue()


def format_heatmap(grid: OutcomeGrid) -> str:
    """One success/reps matrix per (edge distance, roller) slice.

    Rows are penetration depths (mm), columns roller speeds (rev/min).
    """
    a = grid.axes
    reps = a.repetitions
    cell_w = max(len(f"{reps}/{reps}"), max(len(f"{v:g}") for v in a.velocities)) + 1
    lines = []
    for k, edge in enumerate(a.edge_distances):
        for r, roller in enumerate(a.roller_types):
            lines.append(f"# edge_distance_m={edge!r} roller={roller.value}")
            lines.append("pen_mm\\rpm".ljust(11) + "".join(f"{v:g}".rjust(cell_w) for v in a.velocities))
            for i, pen in enumerate(a.penetrations):
                row = "".join(f"{grid.success[i, j, k, r]}/{reps}".rjust(cell_w)
                              for j in range(len(a.velocities)))
                lines.append(f"{pen * 1e3:g}".ljust(11) + row)
            lines.append("")
    return "\n".join(lines)


def heatmap_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".heatmap.txt")


def export_grid(grid: OutcomeGrid, path) -> tuple[Path, Path]:
    """Write the grid CSV and a text heatmap next to it; return both paths."""
    path = Path(path)
    path.write_text(format_grid_csv(grid), encoding="utf-8", newline="\n")
    hm = heatmap_path(path)
    hm.write_text(format_heatmap(grid), encoding="utf-8", newline="\n")
    return path, hm


def _unique(values: Sequence) -> tuple:
    return tuple(dict.fromkeys(values))


def parse_grid_csv(text: str) -> OutcomeGrid:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != GRID_COLUMNS:
        raise ValueError("grid CSV header must be " + ",".join(GRID_COLUMNS))
    body = rows[1:]
    if not body:
        raise ValueError("grid CSV has no cells")
    reps = {int(r[5]) for r in body}
    if len(reps) != 1:
        raise ValueError("grid CSV mixes repetition counts")
    axes = SweepAxes(
        penetrations=_unique(float(r[0]) for r in body),
        velocities=_unique(float(r[1]) for r in body),
        edge_distances=_unique(float(r[2]) for r in body),
        roller_types=_unique(RollerSurface(r[3]) for r in body),
        repetitions=reps.pop(),
    )
    if len(body) != int(np.prod(axes.shape)):
        raise ValueError(f"grid CSV has {len(body)} cells, axes imply {int(np.prod(axes.shape))}")
    success = np.empty(axes.shape, dtype=np.int64)
    modal = np.empty(axes.shape, dtype=object)
    for idx, row in zip(itertools.product(*(range(n) for n in axes.shape)), body):
        expected = (axes.penetrations[idx[0]], axes.velocities[idx[1]],
                    axes.edge_distances[idx[2]], axes.roller_types[idx[3]])
        got = (float(row[0]), float(row[1]), float(row[2]), RollerSurface(row[3]))
        if got != expected:
            raise ValueError(f"grid CSV rows out of order at {got}")
        success[idx] = int(row[4])
        if not 0 <= success[idx] <= axes.repetitions:
            raise ValueError(f"success count {row[4]} outside [0, {axes.repetitions}]")
        modal[idx] = OutcomeKind(row[6])
    return OutcomeGrid(axes, success, modal)


def import_grid(path) -> OutcomeGrid:
    return parse_grid_csv(Path(path).read_text(encoding="utf-8"))
