"""Trial-log ingestion, success-rate summaries and the holding-force fit."""

from __future__ import annotations

import csv
import io
import math
import statistics
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .graspfsm import Coating, Done, FailureReason
from .mechanics import RollerSurface

LOG_COLUMNS = (
    "trial_id",
    "material_pair",
    "penetration_m",
    "velocity_rpm",
    "edge_distance_m",
    "roller",
    "coating",
    "close_force_n",
    "outcome",
    "max_pull_force_n",
)
GROUP_KEYS = ("material_pair", "roller", "coating", "edge_distance", "velocity", "penetration")
COND_LIMIT = 1e12


class LogFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line


def parse_outcome(text: str) -> Done:
    if text == "Success":
        return Done()
    return Done(_enum(FailureReason, text, "outcome"))


def outcome_name(outcome: Done) -> str:
    return "Success" if outcome.success else outcome.reason.value


@dataclass(frozen=True)
class TrialRecord:
    trial_id: str
    material_pair: str
    penetration: float  # m
    velocity: float  # rev/min
    edge_distance: float  # m
    roller: RollerSurface
    coating: Coating
    close_force: float  # N
    outcome: Done
    max_pull_force: float | None = None  # N
    line: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.close_force < 0:
            raise ValueError("close_force must be >= 0")
        if self.max_pull_force is not None and self.max_pull_force < 0:
            raise ValueError("max_pull_force must be >= 0")

    @property
    def success(self) -> bool:
        return self.outcome.success


def _enum(cls, value, what):
    try:
        return cls(value)
    except ValueError:
        allowed = ", ".join(m.value for m in cls)
        raise ValueError(f"unknown {what} {value!r} (expected one of {allowed})") from None


def _parse_row(row: dict, line: int) -> TrialRecord:
    try:
        outcome = parse_outcome(row["outcome"])
        pull = row["max_pull_force_n"]
        return TrialRecord(
            trial_id=row["trial_id"],
            material_pair=row["material_pair"],
            penetration=float(row["penetration_m"]),
            velocity=float(row["velocity_rpm"]),
            edge_distance=float(row["edge_distance_m"]),
            roller=_enum(RollerSurface, row["roller"], "roller"),
            coating=_enum(Coating, row["coating"], "coating"),
            close_force=float(row["close_force_n"]),
            outcome=outcome,
            max_pull_force=float(pull) if pull.strip() else None,
            line=line,
        )
    except ValueError as exc:
        raise LogFormatError(str(exc), line) from None


def read_log(text: str) -> list[TrialRecord]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise LogFormatError("no records") from None
    if tuple(h.strip() for h in header) != LOG_COLUMNS:
        raise LogFormatError("header must be " + ",".join(LOG_COLUMNS), 1)
    records = []
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(LOG_COLUMNS):
            raise LogFormatError(f"expected {len(LOG_COLUMNS)} fields, got {len(row)}", line)
        records.append(_parse_row(dict(zip(LOG_COLUMNS, (c.strip() for c in row))), line))
    if not records:
        raise LogFormatError("no records")
    return records


def ingest_log(path) -> list[TrialRecord]:
    text = Path(path).read_text(encoding="utf-8")
    return read_log(text)


def format_log(records: Iterable[TrialRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(LOG_COLUMNS)
    for r in records:
        w.writerow([
            r.trial_id, r.material_pair, repr(r.penetration), repr(r.velocity),
            repr(r.edge_distance), r.roller.value, r.coating.value, repr(r.close_force),
            outcome_name(r.outcome), "" if r.max_pull_force is None else repr(r.max_pull_force),
        ])
    return buf.getvalue()


def write_log(path, records: Iterable[TrialRecord]) -> None:
    Path(path).write_text(format_log(records), encoding="utf-8", newline="\n")


def bundled_log_path(name: str) -> Path:
    return Path(str(resources.files("layersep") / "data" / name))


# --- holding-force calibration --------------------------------------------------


@dataclass(frozen=True)
class CoatingFit:
    mu_eff: float
    roller_contribution: float  # N
    residual_norm: float  # N, 2-norm of the residuals
    max_abs_residual: float  # N
    n: int
    condition: float
    rank_deficient: bool = False


@dataclass(frozen=True)
class HoldingCalibration:
    """capacity = mu_eff * close_force * contact_count + roller_contribution."""

    fits: dict[Coating, CoatingFit]
    contact_count: int = 2
    median_close_force: float = math.nan

    def _fit(self, coating: Coating) -> CoatingFit:
        try:
            return self.fits[coating]
        except KeyError:
            raise KeyError(f"missing calibration for {coating.value} fingers") from None

    def mu_eff(self, coating: Coating) -> float:
        return self._fit(coating).mu_eff

    def roller_contribution(self, coating: Coating) -> float:
        return self._fit(coating).roller_contribution

    def capacity(self, coating: Coating, close_force: float,
                 contact_count: int | None = None) -> float:
        fit = self._fit(coating)
        count = self.contact_count if contact_count is None else contact_count
        return fit.mu_eff * close_force * count + fit.roller_contribution

    def coating_gap(self, close_force: float | None = None) -> float:
        """Silicone minus plain capacity at ``close_force`` (default: data median)."""
        f = self.median_close_force if close_force is None else close_force
        return self.capacity(Coating.SILICONE, f) - self.capacity(Coating.PLAIN, f)


def _fit_line(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float, bool]:
    # normal equations for y = slope*x + intercept
    ata = np.array([[math.fsum(x * x), math.fsum(x)], [math.fsum(x), float(len(x))]])
    aty = np.array([math.fsum(x * y), math.fsum(y)])
    cond = float(np.linalg.cond(ata))
    if not np.isfinite(cond) or cond > COND_LIMIT:
        return 0.0, math.fsum(y) / len(y), cond, True
    slope, intercept = np.linalg.solve(ata, aty)
    return float(slope), float(intercept), cond, False


def fit_holding_model(records: Sequence[TrialRecord], contact_count: int = 2) -> HoldingCalibration:
    """Least-squares fit of pull capacity against closing force, per coating.

    Only records with a recorded ``max_pull_force`` take part. If every
    closing force of a coating is equal the slope is not identifiable; that
    coating falls back to an intercept-only fit (``rank_deficient=True``).
    """
    by_coating: dict[Coating, list[TrialRecord]] = defaultdict(list)
    for r in records:
        if r.max_pull_force is not None:
            by_coating[r.coating].append(r)
    if not by_coating:
        raise ValueError("no records with max_pull_force")

    fits = {}
    for coating, rows in by_coating.items():
        if len(rows) < 2:
            raise ValueError(f"need >= 2 pull records for {coating.value}, got {len(rows)}")
        x = np.array([r.close_force * contact_count for r in rows])
        y = np.array([r.max_pull_force for r in rows])
        mu, rc, cond, deficient = _fit_line(x, y)
        resid = y - (mu * x + rc)
        fits[coating] = CoatingFit(
            mu_eff=mu,
            roller_contribution=rc,
            residual_norm=math.sqrt(math.fsum(resid * resid)),
            max_abs_residual=float(np.max(np.abs(resid))),
            n=len(rows),
            condition=cond,
            rank_deficient=deficient,
        )
    pulls = [r.close_force for rows in by_coating.values() for r in rows]
    return HoldingCalibration(fits, contact_count, float(statistics.median(pulls)))


@lru_cache(maxsize=1)
def default_holding_calibration() -> HoldingCalibration:
    return fit_holding_model(ingest_log(bundled_log_path("fig9_pull.csv")))


# --- summaries ------------------------------------------------------------------


@dataclass(frozen=True)
class GroupStats:
    trials: int
    successes: int

    @property
    def rate(self) -> float:
        return self.successes / self.trials

    def percent(self) -> str:
        return f"{100.0 * self.rate:.2f}%"


@dataclass(frozen=True)
class PullStats:
    count: int
    min: float
    max: float
    mean: float


@dataclass(frozen=True)
class SummaryReport:
    group_by: tuple[str, ...]
    groups: dict[tuple, GroupStats]
    total: int
    pull: dict[Coating, PullStats]
    calibration: HoldingCalibration | None = None
    # penetration -> normal-force stiffness; not identifiable from logs without forces
    contact_stiffness: float | None = None


def _group_value(r: TrialRecord, key: str):
    value = getattr(r, key)
    return value.value if hasattr(value, "value") else value


def summarize(records: Sequence[TrialRecord], group_by: Sequence[str] = ("material_pair",),
              fit: bool = False) -> SummaryReport:
    if not records:
        raise ValueError("no records to summarize")
    for key in group_by:
        if key not in GROUP_KEYS:
            raise ValueError(f"cannot group by {key!r}; choose from {', '.join(GROUP_KEYS)}")

    counts: dict[tuple, list[int]] = defaultdict(lambda: [0, 0])
    pulls: dict[Coating, list[float]] = defaultdict(list)
    for r in records:
        key = tuple(_group_value(r, k) for k in group_by)
        counts[key][0] += 1
        counts[key][1] += r.success
        if r.max_pull_force is not None:
            pulls[r.coating].append(r.max_pull_force)

    groups = {k: GroupStats(*counts[k]) for k in sorted(counts, key=lambda k: tuple(map(str, k)))}
    pull = {
        c: PullStats(len(v), min(v), max(v), math.fsum(v) / len(v))
        for c, v in sorted(pulls.items(), key=lambda kv: kv[0].value)
    }
    calibration = fit_holding_model(records) if fit else None
    return SummaryReport(tuple(group_by), groups, len(records), pull, calibration)


def format_summary(report: SummaryReport) -> str:
    """``key=value`` text, one ``[section]`` per topic."""
    out = ["[summary]", f"records={report.total}", f"group_by={','.join(report.group_by)}", ""]
    out.append("[groups]")
    for key, g in report.groups.items():
        name = "/".join(map(str, key))
        out.append(f"{name}={g.successes}/{g.trials} ({g.percent()})")
    if report.pull:
        out += ["", "[pull_force]"]
        for c, p in report.pull.items():
            out.append(f"{c.value}.count={p.count}")
            out.append(f"{c.value}.min_n={p.min!r}")
            out.append(f"{c.value}.max_n={p.max!r}")
            out.append(f"{c.value}.mean_n={p.mean!r}")
    if report.calibration is not None:
        cal = report.calibration
        out += ["", "[calibration]", f"contact_count={cal.contact_count}",
                f"median_close_force_n={cal.median_close_force!r}"]
        for c, f in sorted(cal.fits.items(), key=lambda kv: kv[0].value):
            out.append(f"{c.value}.mu_eff={f.mu_eff!r}")
            out.append(f"{c.value}.roller_contribution_n={f.roller_contribution!r}")
            out.append(f"{c.value}.residual_norm_n={f.residual_norm!r}")
            out.append(f"{c.value}.rank_deficient={str(f.rank_deficient).lower()}")
        if Coating.SILICONE in cal.fits and Coating.PLAIN in cal.fits:
            out.append(f"coating_gap_n={cal.coating_gap()!r}")
        out.append("contact_stiffness=unavailable")
    return "\n".join(out) + "\n"


def format_group_table(report: SummaryReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([*report.group_by, "successes", "trials", "rate"])
    for key, g in report.groups.items():
        w.writerow([*key, g.successes, g.trials, repr(g.rate)])
    return buf.getvalue()


def format_pull_table(report: SummaryReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["coating", "count", "min_n", "max_n", "mean_n"])
    for c, p in report.pull.items():
        w.writerow([c.value, p.count, repr(p.min), repr(p.max), repr(p.mean)])
    return buf.getvalue()
