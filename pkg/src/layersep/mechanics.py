"""Quasi-static force balance for separating the top layer of a two-layer stack.

A roller pressed with normal force ``F_N`` onto the stack drives the top
layer through friction. The layer weights are neglected, so the same
normal force acts at every interface under the roller contact and the
three friction capacities are

    f_fr1 = mu(roller, top) * F_N           traction on the top layer
    f_fr2 = mu(top, bottom) * F_N + F_adh    resistance between the layers
    f_fr3 = mu(bottom, substrate) * F_N      resistance of the table

Without a clamp the top layer separates iff ``f_fr1 > f_fr2`` and
``f_fr2 < f_fr3``. With a second normal force holding the stack at a
distance ``l`` from the roller, each layer segment behaves as a pinned
Euler column and must be buckled: separation needs
``f_fr1 - f_fr2 > F_B1`` and ``f_fr2 - f_fr3 < F_B2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .materials import FrictionTable, LayerStack, second_moment_of_area

RPM_MIN = 1.0
RPM_MAX = 45.0
DEFAULT_ROLLER_RADIUS = 0.01  # m
DEFAULT_SMOOTH_OVERRUN = 0.15  # s, assumed
DEFAULT_FINGER_HOLD = 10.0  # N, assumed
DEFAULT_FINGER_GAP = 0.02535  # m, pre-opened finger distance used on the bench


def rpm_to_rad_s(rpm: float) -> float:
    return rpm * 2.0 * math.pi / 60.0


def rad_s_to_rpm(omega: float) -> float:
    return omega * 60.0 / (2.0 * math.pi)


class ClampMode(enum.Enum):
    UNCLAMPED = "Unclamped"
    RIGID = "RigidClamp"
    FINGER = "FingerClamp"


class RollerSurface(enum.Enum):
    DENTED = "Dented"
    SMOOTH = "Smooth"


class OutcomeKind(enum.Enum):
    TOP_SEPARATES = "TopSeparates"
    BOTH_DRAGGED = "BothDragged"
    NOTHING_MOVES = "NothingMoves"
    TOP_STUCK = "TopStuck"


class OracleConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class ClampSpec:
    mode: ClampMode = ClampMode.UNCLAMPED
    holding_force: float = 0.0  # N, F_N2
    clamp_distance: float = 0.0  # m, roller contact to hold line
    finger_spring_rate: float | None = None  # N/m, unused by the quasi-static model

    def __post_init__(self):
        if self.mode is ClampMode.UNCLAMPED:
            if self.holding_force != 0:
                raise ValueError("an unclamped stack has no holding force")
        else:
            if not self.clamp_distance > 0:
                raise ValueError(f"{self.mode.value} needs clamp_distance > 0")
            if not self.holding_force > 0:
                raise ValueError(f"{self.mode.value} needs holding_force > 0")

    @classmethod
    def unclamped(cls) -> ClampSpec:
        return cls()

    @classmethod
    def rigid(cls, distance: float, holding_force: float = math.inf) -> ClampSpec:
        return cls(ClampMode.RIGID, holding_force, distance)

    @classmethod
    def finger(cls, distance: float = DEFAULT_FINGER_GAP,
               holding_force: float = DEFAULT_FINGER_HOLD,
               spring_rate: float | None = None) -> ClampSpec:
        return cls(ClampMode.FINGER, holding_force, distance, spring_rate)


@dataclass(frozen=True)
class RollerSpec:
    radius: float = DEFAULT_ROLLER_RADIUS
    surface: RollerSurface = RollerSurface.DENTED
    roller_surface_id: str = "silicone-roller"
    angular_velocity: float = field(default_factory=lambda: rpm_to_rad_s(18.3))  # rad/s
    # time past edge arrival that a smooth roller tolerates; None picks the default
    overrun_tolerance: float | None = None

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"roller radius must be > 0, got {self.radius}")
        lo, hi = rpm_to_rad_s(RPM_MIN), rpm_to_rad_s(RPM_MAX)
        # small slack so rpm values converted back and forth stay inside
        if not lo * (1 - 1e-12) <= self.angular_velocity <= hi * (1 + 1e-12):
            raise ValueError(
                f"angular velocity {rad_s_to_rpm(self.angular_velocity):.4g} rev/min "
                f"outside motor range [{RPM_MIN:g}, {RPM_MAX:g}]"
            )
        if self.overrun_tolerance is not None and self.overrun_tolerance < 0:
            raise ValueError("overrun_tolerance must be >= 0")

    @classmethod
    def at_rpm(cls, rpm: float, **kw) -> RollerSpec:
        return cls(angular_velocity=rpm_to_rad_s(rpm), **kw)

    @property
    def rpm(self) -> float:
        return rad_s_to_rpm(self.angular_velocity)

    @property
    def effective_overrun_tolerance(self) -> float:
        if self.surface is RollerSurface.DENTED:
            return math.inf
        if self.overrun_tolerance is None:
            return DEFAULT_SMOOTH_OVERRUN
        return self.overrun_tolerance


@dataclass(frozen=True)
class SeparationScenario:
    stack: LayerStack
    friction: FrictionTable
    roller: RollerSpec = field(default_factory=RollerSpec)
    normal_force: float = 1.0  # N
    clamp: ClampSpec = field(default_factory=ClampSpec)
    edge_distance: float = 0.02  # m, roller contact to free edge of the top layer
    interlayer_adhesion: float = 0.0  # N

    def __post_init__(self):
        if self.normal_force < 0:
            raise ValueError(f"normal force must be >= 0, got {self.normal_force}")
        if self.edge_distance < 0:
            raise ValueError(f"edge distance must be >= 0, got {self.edge_distance}")
        if self.interlayer_adhesion < 0:
            raise ValueError("interlayer adhesion must be >= 0")

    def replace(self, **changes) -> SeparationScenario:
        return replace(self, **changes)


@dataclass(frozen=True)
class ForceBalance:
    f_fr1: float
    f_fr2: float
    f_fr3: float
    f_b1: float
    f_b2: float
    top_margin: float
    bottom_margin: float
    mode: ClampMode = ClampMode.UNCLAMPED
    hold_capacity: float = 0.0  # resistance of the clamp on the bottom layer
    hold_margin: float = math.inf  # hold_capacity - (f_fr2 - f_fr3)


@dataclass(frozen=True)
class SeparationOutcome:
    kind: OutcomeKind
    balance: ForceBalance

    @property
    def separates(self) -> bool:
        return self.kind is OutcomeKind.TOP_SEPARATES


def friction_force(mu: float, normal: float) -> float:
    """Amontons friction capacity ``mu * normal``."""
    if normal < 0:
        raise ValueError(f"normal force must be >= 0, got {normal}")
    if not mu > 0:
        raise ValueError(f"friction coefficient must be > 0, got {mu}")
    return mu * normal


def buckling_critical_load(E: float, w: float, h: float, l: float) -> float:
    """First-mode Euler load ``pi**2 E w h**3 / (12 l**2)`` of a pinned strip."""
    if l == 0:
        raise ValueError("zero span: the buckling load is unbounded (edge-start case)")
    if not (E > 0 and w > 0 and h > 0 and l > 0):
        raise ValueError(f"all arguments must be > 0, got E={E}, w={w}, h={h}, l={l}")
    return math.pi**2 * E * second_moment_of_area(w, h) / l**2


# --- finite-difference oracle -------------------------------------------------


def second_difference_eigenvalue(n: int) -> float:
    """Exact smallest eigenvalue of tridiag(-1, 2, -1) of order n."""
    return 2.0 - 2.0 * math.cos(math.pi / (n + 1))


@lru_cache(maxsize=64)
def _smallest_second_difference_eigenvalue(n: int, tol: float, max_iter: int) -> float:
    # Inverse iteration on tridiag(-1, 2, -1) with a Thomas factorisation
    # computed once; the Rayleigh quotient gives the eigenvalue.
    d = np.empty(n)  # LU pivots: d[0] = 2, d[i] = 2 - 1/d[i-1]
    d[0] = 2.0
    for i in range(1, n):
        d[i] = 2.0 - 1.0 / d[i - 1]

    def solve(rhs):
        y = rhs.copy()
        for i in range(1, n):
            y[i] += y[i - 1] / d[i - 1]
        x = np.empty(n)
        x[-1] = y[-1] / d[-1]
        for i in range(n - 2, -1, -1):
            x[i] = (y[i] + x[i + 1]) / d[i]
        return x

    def apply(v):
        out = 2.0 * v
        out[1:] -= v[:-1]
        out[:-1] -= v[1:]
        return out

    v = np.ones(n) / math.sqrt(n)
    lam = float(v @ apply(v))
    for _ in range(max_iter):
        w = solve(v)
        v = w / np.linalg.norm(w)
        new = float(v @ apply(v))
        if abs(new - lam) <= tol * new:
            return new
        lam = new
    raise OracleConvergenceError(
        f"inverse iteration did not converge within {max_iter} iterations (n={n})"
    )


def numerical_buckling_oracle(E: float, w: float, h: float, l: float, n: int = 400,
                              tol: float = 1e-13, max_iter: int = 500) -> float:
    """Buckling load from a finite-difference discretisation of the column.

    ``y'' + (P/EI) y = 0`` with ``y(0) = y(l) = 0`` on ``n`` interior points
    gives ``P = EI * lambda_min / dx**2`` where ``lambda_min`` is the smallest
    eigenvalue of the second-difference matrix tridiag(-1, 2, -1). Does not
    use the closed form.
    """
    if n < 16:
        raise ValueError(f"grid too coarse: n={n} < 16")
    if not (E > 0 and w > 0 and h > 0 and l > 0):
        raise ValueError(f"all arguments must be > 0, got E={E}, w={w}, h={h}, l={l}")
    lam = _smallest_second_difference_eigenvalue(int(n), float(tol), int(max_iter))
    dx = l / (n + 1)
    return E * second_moment_of_area(w, h) * lam / dx**2


# --- force balance and classification ------------------------------------------


def resolve_balance(s: SeparationScenario) -> ForceBalance:
    top, bottom = s.stack.top, s.stack.bottom
    fn = s.normal_force
    mu1 = s.friction[s.roller.roller_surface_id, top.top_surface]
    mu2 = s.friction[top.bottom_surface, bottom.top_surface]
    mu3 = s.friction[bottom.bottom_surface, s.stack.substrate]

    f1 = friction_force(mu1, fn)
    f2 = friction_force(mu2, fn) + s.interlayer_adhesion
    f3 = friction_force(mu3, fn)

    mode = s.clamp.mode
    if mode is ClampMode.UNCLAMPED:
        return ForceBalance(f1, f2, f3, 0.0, 0.0, f1 - f2, f3 - f2, mode)

    span = s.clamp.clamp_distance
    if not span > 0:
        raise ValueError(f"{mode.value} needs clamp_distance > 0")
    fb1 = buckling_critical_load(top.youngs_modulus, top.width, top.thickness, span)
    fb2 = buckling_critical_load(bottom.youngs_modulus, bottom.width, bottom.thickness, span)
    if mode is ClampMode.RIGID:
        hold = math.inf
    else:
        hold = friction_force(mu3, s.clamp.holding_force)
    return ForceBalance(
        f1, f2, f3, fb1, fb2,
        top_margin=(f1 - f2) - fb1,
        bottom_margin=fb2 - (f2 - f3),
        mode=mode,
        hold_capacity=hold,
        hold_margin=hold - (f2 - f3),
    )


def classify_unclamped(b: ForceBalance) -> OutcomeKind:
    """Unclamped sign pattern; ties count as non-separation."""
    if b.f_fr1 > b.f_fr2:
        return OutcomeKind.TOP_SEPARATES if b.f_fr2 < b.f_fr3 else OutcomeKind.BOTH_DRAGGED
    # top and bottom stick together; the pair slides only if the roller beats the table
    return OutcomeKind.BOTH_DRAGGED if b.f_fr1 > b.f_fr3 else OutcomeKind.NOTHING_MOVES


def classify_clamped(b: ForceBalance) -> OutcomeKind:
    if not (b.f_fr1 - b.f_fr2 > b.f_b1):
        return OutcomeKind.TOP_STUCK
    if not (b.f_fr2 - b.f_fr3 < b.f_b2):
        return OutcomeKind.BOTH_DRAGGED
    if b.mode is ClampMode.FINGER and b.hold_margin < 0:
        # the fingers no longer act as a clamp
        return classify_unclamped(b)
    return OutcomeKind.TOP_SEPARATES


def predict_unclamped(s: SeparationScenario) -> SeparationOutcome:
    if s.clamp.mode is not ClampMode.UNCLAMPED:
        raise ValueError(f"predict_unclamped needs an unclamped scenario, got {s.clamp.mode.value}")
    b = resolve_balance(s)
    return SeparationOutcome(classify_unclamped(b), b)


def predict_clamped(s: SeparationScenario) -> SeparationOutcome:
    if s.clamp.mode is ClampMode.UNCLAMPED:
        raise ValueError("predict_clamped needs a RigidClamp or FingerClamp scenario")
    b = resolve_balance(s)
    return SeparationOutcome(classify_clamped(b), b)


def predict(s: SeparationScenario) -> SeparationOutcome:
    if s.clamp.mode is ClampMode.UNCLAMPED:
        return predict_unclamped(s)
    return predict_clamped(s)
