"""Layer materials, surface friction pairs and the bundled material database."""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

BUNDLED_DB = "materials_fig6.db"

MATERIAL_COLUMNS = (
    "name",
    "youngs_modulus_pa",
    "thickness_m",
    "width_m",
    "stiffness_index",
    "top_surface",
    "bottom_surface",
)
FRICTION_COLUMNS = ("surface_a", "surface_b", "mu", "provenance")
STACK_COLUMNS = ("name", "top", "bottom", "substrate")
PROVENANCES = ("paper", "assumed")


class MaterialDBError(ValueError):
    """Raised when a material database cannot be parsed or fails validation."""


class UnknownPairError(LookupError):
    """No friction coefficient is stored for a pair of surfaces."""

    def __init__(self, a: str, b: str):
        super().__init__(f"no friction coefficient for surface pair ({a!r}, {b!r})")
        self.a = a
        self.b = b

    def __str__(self) -> str:
        return self.args[0]


def pair_key(a: str, b: str) -> tuple[str, str]:
    """Unordered pair key: surface names sorted lexicographically."""
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class MaterialSheet:
    name: str
    youngs_modulus: float  # Pa
    thickness: float  # m
    width: float  # m
    stiffness_index: float  # relative stiffness in [0, 1]
    top_surface: str
    bottom_surface: str

    def __post_init__(self):
        if not self.name:
            raise MaterialDBError("material name must be non-empty")
        for attr in ("youngs_modulus", "thickness", "width"):
            value = getattr(self, attr)
            if not value > 0:
                raise MaterialDBError(f"{self.name}: {attr} must be > 0, got {value}")
        if not 0.0 <= self.stiffness_index <= 1.0:
            raise MaterialDBError(
                f"{self.name}: stiffness_index must lie in [0, 1], got {self.stiffness_index}"
            )
        if not self.top_surface or not self.bottom_surface:
            raise MaterialDBError(f"{self.name}: surface identifiers must be non-empty")

    @property
    def second_moment(self) -> float:
        return second_moment_of_area(self.width, self.thickness)

    @property
    def flexural_rigidity(self) -> float:
        return self.youngs_modulus * self.second_moment


@dataclass(frozen=True)
class FrictionTable:
    """Symmetric map from surface pairs to Coulomb friction coefficients.

    Keys are stored sorted so ``table[a, b]`` and ``table[b, a]`` hit the same
    entry. ``provenance`` records whether a value was measured ("paper") or
    chosen for the model ("assumed").
    """

    entries: Mapping[tuple[str, str], float]
    provenance: Mapping[tuple[str, str], str] = field(default_factory=dict)

    def __post_init__(self):
        normalised: dict[tuple[str, str], float] = {}
        for (a, b), mu in self.entries.items():
            if not a or not b:
                raise MaterialDBError("surface identifiers must be non-empty")
            key = pair_key(a, b)
            if key in normalised:
                raise MaterialDBError(f"duplicate friction pair {key}")
            if not mu > 0:
                raise MaterialDBError(f"friction coefficient for {key} must be > 0, got {mu}")
            normalised[key] = float(mu)
        prov = {pair_key(a, b): p for (a, b), p in self.provenance.items()}
        for key, p in prov.items():
            if p not in PROVENANCES:
                raise MaterialDBError(f"unknown provenance {p!r} for {key}")
        object.__setattr__(self, "entries", normalised)
        object.__setattr__(self, "provenance", prov)

    def __getitem__(self, pair: tuple[str, str]) -> float:
        return friction_coefficient(self, *pair)

    def __contains__(self, pair) -> bool:
        return pair_key(*pair) in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def surfaces(self) -> set[str]:
        return {s for key in self.entries for s in key}

    def with_overrides(self, overrides: Mapping[tuple[str, str], float]) -> FrictionTable:
        entries = dict(self.entries)
        for (a, b), mu in overrides.items():
            entries[pair_key(a, b)] = mu
        return FrictionTable(entries, self.provenance)


@dataclass(frozen=True)
class LayerStack:
    top: MaterialSheet
    bottom: MaterialSheet
    substrate: str

    def __post_init__(self):
        if not self.substrate:
            raise MaterialDBError("substrate surface must be non-empty")


@dataclass(frozen=True)
class MaterialDB:
    sheets: tuple[MaterialSheet, ...]
    friction: FrictionTable
    stacks: Mapping[str, tuple[str, str, str]] = field(default_factory=dict)

    def sheet(self, name: str) -> MaterialSheet:
        for s in self.sheets:
            if s.name == name:
                return s
        raise KeyError(f"unknown material {name!r}")

    def stack(self, name: str) -> LayerStack:
        try:
            top, bottom, substrate = self.stacks[name]
        except KeyError:
            known = ", ".join(sorted(self.stacks)) or "none"
            raise KeyError(f"unknown material pair {name!r} (known: {known})") from None
        return LayerStack(self.sheet(top), self.sheet(bottom), substrate)


def friction_coefficient(table: FrictionTable, a: str, b: str) -> float:
    try:
        return table.entries[pair_key(a, b)]
    except KeyError:
        raise UnknownPairError(a, b) from None


def second_moment_of_area(w: float, h: float) -> float:
    """Second moment of area ``w*h**3/12`` of a rectangular strip (m^4)."""
    if not (w > 0 and h > 0):
        raise ValueError(f"width and thickness must be > 0, got w={w}, h={h}")
    return w * h**3 / 12.0


# --- database file -----------------------------------------------------------


def _split_sections(text: str, source: str) -> dict[str, list[tuple[int, str]]]:
    sections: dict[str, list[tuple[int, str]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current in sections:
                raise MaterialDBError(f"{source}:{lineno}: duplicate section [{current}]")
            sections[current] = []
            continue
        if current is None:
            raise MaterialDBError(f"{source}:{lineno}: record outside of a section")
        sections[current].append((lineno, line))
    return sections


def _records(lines, columns, section, source):
    if not lines:
        return []
    header_line, header = lines[0]
    names = tuple(c.strip() for c in next(csv.reader([header])))
    if names != columns:
        raise MaterialDBError(
            f"{source}:{header_line}: [{section}] header must be {','.join(columns)}"
        )
    out = []
    for lineno, line in lines[1:]:
        row = [c.strip() for c in next(csv.reader([line]))]
        if len(row) != len(columns):
            raise MaterialDBError(
                f"{source}:{lineno}: expected {len(columns)} fields, got {len(row)}"
            )
        out.append((lineno, dict(zip(columns, row))))
    return out


def _float(value: str, where: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise MaterialDBError(f"{where}: not a number: {value!r}") from None


def parse_material_db(text: str, source: str = "<string>") -> MaterialDB:
    sections = _split_sections(text, source)
    for name in ("materials", "friction"):
        if name not in sections:
            raise MaterialDBError(f"{source}: missing [{name}] section")
    unknown = set(sections) - {"materials", "friction", "stacks"}
    if unknown:
        raise MaterialDBError(f"{source}: unknown section(s) {sorted(unknown)}")

    sheets = []
    seen = set()
    for lineno, rec in _records(sections["materials"], MATERIAL_COLUMNS, "materials", source):
        where = f"{source}:{lineno}"
        if rec["name"] in seen:
            raise MaterialDBError(f"{where}: duplicate material {rec['name']!r}")
        seen.add(rec["name"])
        try:
            sheets.append(
                MaterialSheet(
                    name=rec["name"],
                    youngs_modulus=_float(rec["youngs_modulus_pa"], where),
                    thickness=_float(rec["thickness_m"], where),
                    width=_float(rec["width_m"], where),
                    stiffness_index=_float(rec["stiffness_index"], where),
                    top_surface=rec["top_surface"],
                    bottom_surface=rec["bottom_surface"],
                )
            )
        except MaterialDBError as exc:
            raise MaterialDBError(f"{where}: {exc}") from None

    entries, prov = {}, {}
    for lineno, rec in _records(sections["friction"], FRICTION_COLUMNS, "friction", source):
        where = f"{source}:{lineno}"
        key = pair_key(rec["surface_a"], rec["surface_b"])
        if key in entries:
            raise MaterialDBError(f"{where}: duplicate friction pair {key}")
        mu = _float(rec["mu"], where)
        if not mu > 0:
            raise MaterialDBError(f"{where}: friction coefficient must be > 0, got {mu}")
        entries[key] = mu
        prov[key] = rec["provenance"]
    try:
        table = FrictionTable(entries, prov)
    except MaterialDBError as exc:
        raise MaterialDBError(f"{source}: {exc}") from None

    stacks = {}
    for lineno, rec in _records(sections.get("stacks", []), STACK_COLUMNS, "stacks", source):
        where = f"{source}:{lineno}"
        if rec["name"] in stacks:
            raise MaterialDBError(f"{where}: duplicate stack {rec['name']!r}")
        for role in ("top", "bottom"):
            if rec[role] not in seen:
                raise MaterialDBError(f"{where}: stack refers to unknown material {rec[role]!r}")
        stacks[rec["name"]] = (rec["top"], rec["bottom"], rec["substrate"])

    return MaterialDB(tuple(sheets), table, stacks)


def bundled_db_path() -> Path:
    return Path(str(resources.files("layersep") / "data" / BUNDLED_DB))


def load_database(path: str | os.PathLike | None = None) -> MaterialDB:
    """Read a material database file; ``None`` selects the bundled one."""
    path = Path(path) if path is not None else bundled_db_path()
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise MaterialDBError(f"cannot read material database {path}: {exc}") from exc
    return parse_material_db(text, source=str(path))


def load_material_db(path=None) -> tuple[list[MaterialSheet], FrictionTable]:
    db = load_database(path)
    return list(db.sheets), db.friction


def _fmt(x: float) -> str:
    return repr(float(x))


def format_material_db(db: MaterialDB) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    buf.write("[materials]\n")
    w.writerow(MATERIAL_COLUMNS)
    for s in db.sheets:
        w.writerow(
            [s.name, _fmt(s.youngs_modulus), _fmt(s.thickness), _fmt(s.width),
             _fmt(s.stiffness_index), s.top_surface, s.bottom_surface]
        )
    buf.write("\n[friction]\n")
    w.writerow(FRICTION_COLUMNS)
    for key in sorted(db.friction.entries):
        w.writerow([key[0], key[1], _fmt(db.friction.entries[key]),
                    db.friction.provenance.get(key, "assumed")])
    if db.stacks:
        buf.write("\n[stacks]\n")
        w.writerow(STACK_COLUMNS)
        for name, (top, bottom, substrate) in db.stacks.items():
            w.writerow([name, top, bottom, substrate])
    return buf.getvalue()


def write_material_db(path, sheets: Iterable[MaterialSheet] | MaterialDB,
                      table: FrictionTable | None = None, stacks=None) -> None:
    if isinstance(sheets, MaterialDB):
        db = sheets
    else:
        db = MaterialDB(tuple(sheets), table, dict(stacks or {}))
    Path(path).write_text(format_material_db(db), encoding="utf-8", newline="\n")


def sheet_as_dict(sheet: MaterialSheet) -> dict:
    return {f.name: getattr(sheet, f.name) for f in fields(sheet)}
