"""File-based material database.

A material file is INI text with one `[material]` section::

    [material]
    name = ethanol
    kind = oscillator
    c_ir = 23.84
    c_uv = 0.852
    omega_ir_rad_s = 6.6e14
    omega_uv_rad_s = 1.14e16

Tabulated materials point at a two-column CSV (`xi_rad_s,eps`) through
`table_csv`, resolved relative to the material file.
"""

from __future__ import annotations

import configparser
import logging
import math
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .constants import CODATA, PhysicalConstants
from .materials import (
    VACUUM,
    CarrierAugmentedModel,
    CarrierParameters,
    ConstantPermittivity,
    DrudeModel,
    IdealMetal,
    InvariantViolation,
    MaterialError,
    OpticalDataTable,
    OscillatorModel,
    PermittivityModel,
    TabulatedPermittivity,
)

logger = logging.getLogger(__name__)

PathLike = Union[str, "os.PathLike[str]"]

MATERIALS_DIR_ENV = "CASIMIR_MATERIALS_DIR"
PACKAGE_MATERIALS_DIR = Path(__file__).parent / "data" / "materials"

SECTION = "material"

# required and optional numeric / reference keys per kind
KINDS: Dict[str, Tuple[Tuple[str, ...], Tuple[str, ...]]] = {
    "oscillator": (("c_ir", "c_uv", "omega_ir_rad_s", "omega_uv_rad_s"), ()),
    "carriers": (
        ("base", "n_density_m3", "m_eff_e", "m_eff_h", "gamma_e_rad_s", "gamma_h_rad_s"),
        (),
    ),
    "drude": (("omega_p_rad_s", "gamma_rad_s"), ("base",)),
    "tabulated": (("table_csv",), ("static_eps",)),
    "constant": (("eps",), ()),
    "ideal_metal": ((), ()),
}
TEXT_KEYS = ("base", "table_csv")
META_KEYS = ("name", "kind", "note")


class MaterialFileError(MaterialError):
    """Exception raised for an unreadable or inconsistent material file."""

    def __init__(
        self, message: str, path: Optional[PathLike] = None, lineno: Optional[int] = None
    ):
        self.path = None if path is None else Path(path)
        self.lineno = lineno
        location = ""
        if path is not None:
            location = f"{path}:{lineno}: " if lineno is not None else f"{path}: "
        super().__init__(location + message)


@dataclass(frozen=True)
class MaterialRecord:
    """A named material definition as stored on disk.

    Attributes
    ----------
        name: unique material name
        kind: one of `KINDS`
        parameters: numeric parameters, keyed as in the file
        base: referenced base material (carriers, drude)
        table_csv: CSV file name (tabulated)
        table: (xi, eps) rows of the CSV (tabulated)
        note: free text, e.g. provenance of approximate data

    """

    name: str
    kind: str
    parameters: Dict[str, float] = field(default_factory=dict)
    base: Optional[str] = None
    table_csv: Optional[str] = None
    table: Tuple[Tuple[float, float], ...] = ()
    note: str = ""

    def __post_init__(self) -> None:
        if not self.name or not re.fullmatch(r"[A-Za-z0-9_.\-]+", self.name):
            raise MaterialFileError(f"Invalid material name {self.name!r}")
        if self.kind not in KINDS:
            raise MaterialFileError(f"Unknown material kind {self.kind!r}")

    def tabulated(self) -> TabulatedPermittivity:
        """Interprets `table`; a first row at xi = 0 carries eps(0)."""
        rows = list(self.table)
        static = self.parameters.get("static_eps")
        if rows and rows[0][0] == 0.0:
            static = rows[0][1] if static is None else static
            rows = rows[1:]
        grid = tuple(r[0] for r in rows)
        values = tuple(r[1] for r in rows)
        if static is None:
            static = values[0] if values else math.nan
        return TabulatedPermittivity(grid, values, static)


def _line_of(text: str, key: str) -> Optional[int]:
    pattern = re.compile(rf"^\s*{re.escape(key)}\s*[=:]")
    for number, line in enumerate(text.splitlines(), start=1):
        if pattern.match(line):
            return number
    return None


def _parse_float(raw: str, key: str, path: Path, text: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise MaterialFileError(
            f"Value of {key!r} is not a number: {raw!r}", path, _line_of(text, key)
        ) from None


def read_table_csv(path: PathLike, columns: Tuple[str, str]) -> np.ndarray:
    """Reads a two-column CSV with a header line into an (n, 2) array."""
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as handle:
            header = handle.readline().strip()
            lineno = 1
            # leading comment lines describe how the table was made
            while header.startswith("#") and not header.lstrip("#").strip().startswith(columns[0]):
                header = handle.readline().strip()
                lineno += 1
            header = header.lstrip("#").strip()
            if header.replace(" ", "") != ",".join(columns):
                raise MaterialFileError(
                    f"Expected CSV header {','.join(columns)!r}, got {header!r}", path, lineno
                )
            rows = np.loadtxt(handle, delimiter=",", comments="#", ndmin=2)
    except MaterialFileError:
        raise
    except OSError as err:
        raise MaterialFileError(f"Cannot read table: {err}", path) from err
    except ValueError as err:
        raise MaterialFileError(f"Malformed table: {err}", path) from err
    if rows.size == 0:
        return np.zeros((0, 2))
    if rows.shape[1] != 2:
        raise MaterialFileError(f"Expected 2 columns, got {rows.shape[1]}", path)
    return rows


def write_table_csv(
    path: PathLike,
    rows: np.ndarray,
    columns: Tuple[str, str],
    comments: Sequence[str] = (),
) -> None:
    """Writes (n, 2) rows at full float precision, after optional `# ` comment lines."""
    header = "\n".join([f"# {line}" for line in comments] + [",".join(columns)])
    np.savetxt(
        path,
        np.asarray(rows, dtype=np.float64).reshape(-1, 2),
        fmt="%.17g",
        delimiter=",",
        header=header,
        comments="",
        encoding="utf-8",
    )


def load_material(path: PathLike) -> MaterialRecord:
    """Parses and validates one material file.

    Args:
    ----
        path: INI file with a `[material]` section.

    Returns:
    -------
        MaterialRecord: the validated record (tables are loaded).

    Raises:
    ------
        MaterialFileError: parse failure (with line number), unknown kind,
            missing key.
        InvariantViolation: parameters that break a model invariant.

    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise MaterialFileError(f"Cannot read material file: {err}", path) from err

    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=str(path))
    except configparser.MissingSectionHeaderError as err:
        raise MaterialFileError("Missing [material] section header", path, err.lineno) from None
    except configparser.ParsingError as err:
        lineno, line = err.errors[0] if err.errors else (None, "")
        raise MaterialFileError(f"Cannot parse line: {line!r}", path, lineno) from None
    except configparser.Error as err:
        lineno = getattr(err, "lineno", None)
        raise MaterialFileError(str(err.message), path, lineno) from None

    if not parser.has_section(SECTION):
        raise MaterialFileError(f"Missing [{SECTION}] section", path)
    section = parser[SECTION]
    for key in ("name", "kind"):
        if key not in section:
            raise MaterialFileError(f"Missing key {key!r}", path)
    kind = section["kind"].strip()
    if kind not in KINDS:
        raise MaterialFileError(
            f"Unknown material kind {kind!r}; expected one of {', '.join(KINDS)}",
            path,
            _line_of(text, "kind"),
        )

    required, optional = KINDS[kind]
    for key in section:
        if key not in required + optional + META_KEYS:
            raise MaterialFileError(
                f"Unexpected key {key!r} for kind {kind!r}", path, _line_of(text, key)
            )
    for key in required:
        if key not in section:
            raise MaterialFileError(f"Missing key {key!r} for kind {kind!r}", path)

    parameters = {
        key: _parse_float(section[key], key, path, text)
        for key in required + optional
        if key in section and key not in TEXT_KEYS
    }
    base = section.get("base")
    table_csv = section.get("table_csv")
    table: Tuple[Tuple[float, float], ...] = ()
    if table_csv is not None:
        rows = read_table_csv(path.parent / table_csv, ("xi_rad_s", "eps"))
        table = tuple((float(x), float(e)) for x, e in rows)

    record = MaterialRecord(
        name=section["name"].strip(),
        kind=kind,
        parameters=parameters,
        base=None if base is None else base.strip(),
        table_csv=table_csv,
        table=table,
        note=section.get("note", ""),
    )
    validate_record(record)
    logger.debug("Loaded material %s (%s) from %s", record.name, record.kind, path)
    return record


def save_material(record: MaterialRecord, path: PathLike, write_table: bool = True) -> None:
    """Writes `record` so that `load_material` reproduces it exactly.

    Floats are written with `repr`, tables at 17 significant digits. The
    table CSV goes next to the material file unless `write_table` is False
    (the caller has written it already).
    """
    validate_record(record)
    path = Path(path)
    values: Dict[str, str] = {"name": record.name, "kind": record.kind}
    if record.note:
        values["note"] = record.note
    if record.base is not None:
        values["base"] = record.base
    table_csv = record.table_csv
    if record.kind == "tabulated":
        table_csv = table_csv or f"{record.name}.csv"
        values["table_csv"] = table_csv
        if write_table:
            write_table_csv(path.parent / table_csv, np.array(record.table), ("xi_rad_s", "eps"))
    for key, value in record.parameters.items():
        values[key] = repr(float(value))

    parser = configparser.ConfigParser(interpolation=None)
    parser[SECTION] = values
    with open(path, "w", encoding="utf-8") as handle:
        parser.write(handle)
    logger.debug("Saved material %s to %s", record.name, path)


Resolver = Callable[[str], PermittivityModel]


def build_model(
    record: MaterialRecord,
    resolve: Optional[Resolver] = None,
    constants: PhysicalConstants = CODATA,
) -> PermittivityModel:
    """Constructs the permittivity model a record describes.

    Args:
    ----
        record: material record.
        resolve: maps a base-material name to its model; needed for
            `carriers` records and `drude` records with a base.
        constants: physical constants for the plasma frequencies.

    Returns:
    -------
        PermittivityModel

    """
    p = record.parameters
    if record.kind == "oscillator":
        return OscillatorModel(p["c_ir"], p["c_uv"], p["omega_ir_rad_s"], p["omega_uv_rad_s"])
    if record.kind == "constant":
        return ConstantPermittivity(p["eps"])
    if record.kind == "ideal_metal":
        return IdealMetal()
    if record.kind == "tabulated":
        return record.tabulated()

    if record.base is None:
        base: PermittivityModel = VACUUM
    elif resolve is None:
        raise MaterialFileError(
            f"Material {record.name!r} references base {record.base!r}; no resolver given"
        )
    else:
        base = resolve(record.base)
    if record.kind == "drude":
        return DrudeModel(p["omega_p_rad_s"], p["gamma_rad_s"], base)
    return illuminate(base, record, constants=constants)


def carrier_parameters(record: MaterialRecord) -> CarrierParameters:
    p = record.parameters
    return CarrierParameters(p["n_density_m3"], p["m_eff_e"], p["m_eff_h"])


def validate_record(record: MaterialRecord) -> None:
    """Checks every invariant that can be checked without resolving bases."""
    missing = [k for k in KINDS[record.kind][0] if k not in TEXT_KEYS + tuple(record.parameters)]
    if missing:
        raise MaterialFileError(f"Material {record.name!r} lacks {', '.join(missing)}")
    if record.kind == "carriers":
        if record.base is None:
            raise MaterialFileError(f"Carriers material {record.name!r} needs a base")
        carrier_parameters(record)
        for key in ("gamma_e_rad_s", "gamma_h_rad_s"):
            value = record.parameters[key]
            if not (math.isfinite(value) and value > 0.0):
                raise InvariantViolation(f"{key} must be > 0, got {value}")
    elif record.kind == "drude":
        DrudeModel(record.parameters["omega_p_rad_s"], record.parameters["gamma_rad_s"])
    else:
        build_model(record)


def illuminate(
    base: PermittivityModel,
    carriers: MaterialRecord,
    n_density: Optional[float] = None,
    constants: PhysicalConstants = CODATA,
) -> CarrierAugmentedModel:
    """Adds the carriers of a `carriers` record to `base`.

    Args:
    ----
        base: permittivity of the plate without light.
        carriers: record supplying effective masses and relaxation parameters.
        n_density: carrier density overriding the record's, m^-3.
        constants: physical constants.

    """
    if carriers.kind != "carriers":
        raise MaterialFileError(f"Material {carriers.name!r} is not a carriers material")
    params = carrier_parameters(carriers)
    if n_density is not None:
        params = params.with_density(n_density)
    return CarrierAugmentedModel.from_carriers(
        base,
        params,
        carriers.parameters["gamma_e_rad_s"],
        carriers.parameters["gamma_h_rad_s"],
        constants,
    )


def load_optical_data(path: PathLike) -> OpticalDataTable:
    """Reads an `omega_rad_s,im_eps` CSV for the Kramers-Kronig transform."""
    rows = read_table_csv(path, ("omega_rad_s", "im_eps"))
    return OpticalDataTable(tuple(rows[:, 0]), tuple(rows[:, 1]))


def default_materials_dir() -> Path:
    """`$CASIMIR_MATERIALS_DIR` if set, else the shipped material set."""
    override = os.environ.get(MATERIALS_DIR_ENV)
    return Path(override) if override else PACKAGE_MATERIALS_DIR


class MaterialDatabase:
    """Directory of material files indexed by material name.

    Args:
    ----
        directory: folder holding `*.ini` material files; defaults to
            `default_materials_dir()`.
        constants: physical constants used to build carrier models.

    """

    def __init__(
        self, directory: Optional[PathLike] = None, constants: PhysicalConstants = CODATA
    ):
        self.directory = Path(directory) if directory is not None else default_materials_dir()
        self.constants = constants
        self._paths: Optional[Dict[str, Path]] = None
        self._records: Dict[str, MaterialRecord] = {}

    def _index(self) -> Dict[str, Path]:
        if self._paths is None:
            if not self.directory.is_dir():
                raise MaterialFileError("Material directory does not exist", self.directory)
            paths: Dict[str, Path] = {}
            for path in sorted(self.directory.glob("*.ini")):
                record = load_material(path)
                if record.name in paths:
                    raise MaterialFileError(
                        f"Duplicate material name {record.name!r} (also in {paths[record.name]})",
                        path,
                    )
                paths[record.name] = path
                self._records[record.name] = record
            self._paths = paths
            logger.info("Indexed %d materials in %s", len(paths), self.directory)
        return self._paths

    def names(self) -> List[str]:
        return sorted(self._index())

    def __contains__(self, name: str) -> bool:
        return name in self._index()

    def record(self, name: str) -> MaterialRecord:
        if name not in self._index():
            raise MaterialFileError(
                f"Unknown material {name!r}; available: {', '.join(self.names())}",
                self.directory,
            )
        return self._records[name]

    def model(self, name: str) -> PermittivityModel:
        """Builds the model for `name`, resolving base references."""
        return self._model(name, ())

    def _model(self, name: str, chain: Tuple[str, ...]) -> PermittivityModel:
        if name in chain:
            raise MaterialFileError(
                "Base reference cycle: " + " -> ".join(chain + (name,)), self.directory
            )
        record = self.record(name)
        return build_model(
            record, lambda other: self._model(other, chain + (name,)), self.constants
        )
