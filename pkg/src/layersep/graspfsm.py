"""Six-phase flap grasp sequence as a deterministic transition system.

Approach -> Hold -> Drag -> Snap -> Grasp -> Lift -> Done. Events are fed
in by the caller (a simulation driver or a replayed log); nothing here is
sensed. Illegal (phase, event) pairs raise instead of being ignored.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Union

from .mechanics import (
    OutcomeKind,
    RollerSpec,
    SeparationScenario,
    predict,
)


class Phase(enum.Enum):
    APPROACH = "Approach"
    HOLD = "Hold"
    DRAG = "Drag"
    SNAP = "Snap"
    GRASP = "Grasp"
    LIFT = "Lift"


class FailureReason(enum.Enum):
    ROLLER_SLIP = "RollerSlip"
    BOTH_LAYERS_DRAGGED = "BothLayersDragged"
    TOP_STUCK = "TopStuck"
    BOTTOM_LAYER_CAPTURED = "BottomLayerCaptured"
    GRASP_LOST = "GraspLost"
    NO_SNAP = "NoSnap"


@dataclass(frozen=True)
class Done:
    reason: FailureReason | None = None

    @property
    def success(self) -> bool:
        return self.reason is None

    def __str__(self) -> str:
        if self.reason is None:
            return "Done(Success)"
        return f"Done(Failure({self.reason.value}))"


State = Union[Phase, Done]


class Event(enum.Enum):
    CONTACT_DETECTED = "ContactDetected"  # fingers touch the stack
    ROLLER_CONTACT = "RollerContact"  # roller touches the top layer, rotation starts
    EDGE_REACHED = "EdgeReached"
    SNAP_COMPLETE = "SnapComplete"
    GRASP_CLOSED = "GraspClosed"
    LIFT_COMPLETE = "LiftComplete"
    ROLLER_SLIPPED = "RollerSlipped"
    LAYERS_DRAGGED = "LayersDragged"
    TOP_STUCK = "TopStuck"
    BOTTOM_CAPTURED = "BottomCaptured"
    NO_SNAP = "NoSnap"
    GRASP_LOST = "GraspLost"


TRANSITIONS: dict[tuple[Phase, Event], State] = {
    (Phase.APPROACH, Event.CONTACT_DETECTED): Phase.HOLD,
    (Phase.HOLD, Event.ROLLER_CONTACT): Phase.DRAG,
    (Phase.DRAG, Event.EDGE_REACHED): Phase.SNAP,
    (Phase.DRAG, Event.ROLLER_SLIPPED): Done(FailureReason.ROLLER_SLIP),
    (Phase.DRAG, Event.LAYERS_DRAGGED): Done(FailureReason.BOTH_LAYERS_DRAGGED),
    (Phase.DRAG, Event.TOP_STUCK): Done(FailureReason.TOP_STUCK),
    (Phase.SNAP, Event.SNAP_COMPLETE): Phase.GRASP,
    (Phase.SNAP, Event.BOTTOM_CAPTURED): Done(FailureReason.BOTTOM_LAYER_CAPTURED),
    (Phase.SNAP, Event.NO_SNAP): Done(FailureReason.NO_SNAP),
    (Phase.GRASP, Event.GRASP_CLOSED): Phase.LIFT,
    (Phase.LIFT, Event.LIFT_COMPLETE): Done(),
    (Phase.LIFT, Event.GRASP_LOST): Done(FailureReason.GRASP_LOST),
}

PHASE_ORDER = tuple(Phase)


class IllegalTransition(ValueError):
    def __init__(self, state: State, event: Event):
        name = str(state) if isinstance(state, Done) else state.value
        super().__init__(f"illegal transition: event {event.value} in phase {name}")
        self.state = state
        self.event = event


def step(phase: State, event: Event) -> State:
    if isinstance(phase, Done):
        raise IllegalTransition(phase, event)
    try:
        return TRANSITIONS[phase, event]
    except KeyError:
        raise IllegalTransition(phase, event) from None


# --- episode configuration ---------------------------------------------------


class Coating(enum.Enum):
    SILICONE = "Silicone"
    PLAIN = "Plain"


class SnapResult(enum.Enum):
    SNAP_OK = "SnapOk"
    BOTTOM_LAYER_CAPTURED = "BottomLayerCaptured"


@dataclass(frozen=True)
class FingerSpec:
    coating: Coating = Coating.SILICONE
    spring_rate: float | None = None  # N/m; never quantified, kept for the record
    close_force: float = 100.0  # N, assumed nominal gripper closing force
    contact_count: int = 2

    def __post_init__(self):
        if self.close_force < 0:
            raise ValueError("close_force must be >= 0")
        if self.contact_count < 1:
            raise ValueError("contact_count must be >= 1")


@dataclass(frozen=True)
class EpisodeConfig:
    scenario: SeparationScenario
    fingers: FingerSpec = field(default_factory=FingerSpec)
    roller_stop_delay: float = 0.1  # s of rotation past edge arrival
    pull_force: float = 40.0  # N applied while lifting

    def __post_init__(self):
        if self.roller_stop_delay < 0:
            raise ValueError("roller_stop_delay must be >= 0")
        if self.pull_force < 0:
            raise ValueError("pull_force must be >= 0")


@dataclass(frozen=True)
class TraceStep:
    state: State
    time: float
    annotation: str = ""


@dataclass(frozen=True)
class EpisodeTrace:
    steps: tuple[TraceStep, ...]
    drag_duration: float
    holding_capacity: float
    separation: OutcomeKind | None = None  # mechanics prediction for the drag

    @property
    def terminal(self) -> Done:
        return self.steps[-1].state

    @property
    def success(self) -> bool:
        return self.terminal.success

    def phases(self) -> list[Phase]:
        return [s.state for s in self.steps if isinstance(s.state, Phase)]


# --- phase models --------------------------------------------------------------


def drag_time_to_edge(edge_distance: float, roller: RollerSpec) -> float:
    """Time for a non-slipping roller to carry the flap edge to the contact."""
    if not roller.angular_velocity > 0:
        raise ValueError("roller angular velocity must be > 0")
    if edge_distance == 0:
        return 0.0
    return edge_distance / (roller.radius * roller.angular_velocity)


def snap_resolution(roller: RollerSpec, stop_delay: float) -> SnapResult:
    # dents keep the flap engaged whatever the overrun; a smooth roller keeps
    # dragging and pulls the bottom layer in once the overrun is too long
    if stop_delay <= roller.effective_overrun_tolerance:
        return SnapResult.SNAP_OK
    return SnapResult.BOTTOM_LAYER_CAPTURED


def holding_capacity(fingers: FingerSpec, calibration=None) -> float:
    """Pull force the closed fingers-against-roller grasp withstands (N).

    ``calibration`` is a :class:`layersep.expdata.HoldingCalibration`; the
    default is fitted to the bundled pull-test log.
    """
    if calibration is None:
        from .expdata import default_holding_calibration

        calibration = default_holding_calibration()
    return calibration.capacity(fingers.coating, fingers.close_force, fingers.contact_count)


_DRAG_FAILURES = {
    OutcomeKind.BOTH_DRAGGED: (Event.LAYERS_DRAGGED, "both layers dragged"),
    OutcomeKind.TOP_STUCK: (Event.TOP_STUCK, "traction below buckling load"),
    OutcomeKind.NOTHING_MOVES: (Event.ROLLER_SLIPPED, "roller slips on the top layer"),
}


def run_episode(config: EpisodeConfig, calibration=None) -> EpisodeTrace:
    s = config.scenario
    roller = s.roller
    capacity = holding_capacity(config.fingers, calibration)
    t_drag = drag_time_to_edge(s.edge_distance, roller)

    steps = []
    state: State = Phase.APPROACH
    t = 0.0

    def advance(event: Event, note: str, at: float):
        nonlocal state
        state = step(state, event)
        steps.append(TraceStep(state, at, note))

    steps.append(TraceStep(state, t, "descending"))
    advance(Event.CONTACT_DETECTED, f"fingers hold stack ({s.clamp.mode.value})", t)

    outcome = predict(s)
    b = outcome.balance
    advance(
        Event.ROLLER_CONTACT,
        f"F_N={s.normal_force:.6g} N, rotating at {roller.rpm:.6g} rev/min",
        t,
    )

    if outcome.kind is not OutcomeKind.TOP_SEPARATES:
        event, note = _DRAG_FAILURES[outcome.kind]
        if b.f_fr1 <= b.f_fr2:
            event, note = Event.ROLLER_SLIPPED, "roller slips on the top layer"
        advance(event, f"{note}: {outcome.kind.value}", t)
        return EpisodeTrace(tuple(steps), t_drag, capacity, outcome.kind)

    t += t_drag
    advance(Event.EDGE_REACHED, f"edge reached after {t_drag:.6g} s", t)

    t += config.roller_stop_delay
    if snap_resolution(roller, config.roller_stop_delay) is SnapResult.BOTTOM_LAYER_CAPTURED:
        advance(Event.BOTTOM_CAPTURED,
                f"roller overran by {config.roller_stop_delay:.6g} s", t)
        return EpisodeTrace(tuple(steps), t_drag, capacity, outcome.kind)
    advance(Event.SNAP_COMPLETE, f"flap flipped ({roller.surface.value} roller)", t)
    advance(Event.GRASP_CLOSED,
            f"fingers closed at {config.fingers.close_force:.6g} N "
            f"({config.fingers.coating.value})", t)

    if config.pull_force > capacity:
        advance(Event.GRASP_LOST,
                f"pull {config.pull_force:.6g} N exceeds capacity {capacity:.6g} N", t)
    else:
        advance(Event.LIFT_COMPLETE,
                f"pull {config.pull_force:.6g} N within capacity {capacity:.6g} N", t)
    return EpisodeTrace(tuple(steps), t_drag, capacity, outcome.kind)


# --- trace text format ----------------------------------------------------------
#
#   # drag_duration=<s>
#   # holding_capacity=<N>
#   # separation=<OutcomeKind>
#   <timestamp>\t<phase>\t<annotation>
#
# Terminal lines carry "Done(Success)" or "Done(Failure(<reason>))".


def _state_name(state: State) -> str:
    return str(state) if isinstance(state, Done) else state.value


def _parse_state(name: str) -> State:
    if name == "Done(Success)":
        return Done()
    if name.startswith("Done(Failure(") and name.endswith("))"):
        return Done(FailureReason(name[len("Done(Failure("):-2]))
    return Phase(name)


def format_trace(trace: EpisodeTrace) -> str:
    lines = [
        f"# drag_duration={trace.drag_duration!r}",
        f"# holding_capacity={trace.holding_capacity!r}",
    ]
    if trace.separation is not None:
        lines.append(f"# separation={trace.separation.value}")
    for s in trace.steps:
        note = s.annotation.replace("\t", " ").replace("\n", " ")
        lines.append(f"{s.time!r}\t{_state_name(s.state)}\t{note}")
    return "\n".join(lines) + "\n"


def parse_trace(text: str) -> EpisodeTrace:
    header = {}
    steps = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            header[key.strip()] = value.strip()
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 3 tab-separated fields")
        try:
            steps.append(TraceStep(_parse_state(parts[1]), float(parts[0]), parts[2]))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    if not steps or not isinstance(steps[-1].state, Done):
        raise ValueError("trace does not end in a Done state")
    separation = header.get("separation")
    return EpisodeTrace(
        tuple(steps),
        float(header.get("drag_duration", "nan")),
        float(header.get("holding_capacity", "nan")),
        OutcomeKind(separation) if separation else None,
    )


def replay(states: list[State]) -> list[Event]:
    """Recover the event sequence that drives ``step`` through ``states``.

    Raises ``ValueError`` if two consecutive states are not connected by
    any transition.
    """
    events = []
    for current, nxt in zip(states, states[1:]):
        for (phase, event), target in TRANSITIONS.items():
            if phase == current and target == nxt:
                events.append(event)
                break
        else:
            raise ValueError(f"no transition from {_state_name(current)} to {_state_name(nxt)}")
    return events

