"""Command-line front end.

Usage examples:
  # pressure-separation curve of a preset, dark
  casimirpulse sweep --preset au-ethanol-si --light off --a-min 50e-9 --a-max 500e-9 --points 100

  # crossover separation under illumination
  casimirpulse crossover --preset si-ethanol-si --light on

  # explicit materials, dark and lit pressures at 300 nm
  casimirpulse modulate --plate1 gold --medium ethanol --plate2 silicon --separation 300e-9

  # static permittivity of a database material
  casimirpulse material-eval --name ethanol --xi 0

  # eps(i xi) table from Im eps(omega) by Kramers-Kronig
  casimirpulse kk-build --input optical.csv --output material_table.csv

Every output is a CSV whose `#` header lines record the tool version, the
system, the temperature, the sign convention and the quadrature settings,
plus a `# reproduce:` line that regenerates the file byte for byte.
"""

from __future__ import annotations

import argparse
import logging
import math
import shlex
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ._version import __version__
from .analysis import (
    CrossoverError,
    Scenario,
    find_crossover,
    modulation_depth,
    quasi_static_displacement,
    sweep,
)
from .database import (
    MaterialDatabase,
    MaterialRecord,
    load_optical_data,
    save_material,
    write_table_csv,
)
from .lifshitz import ConvergenceError, LayerSystem, QuadratureSettings
from .materials import MaterialError, kk_table
from .presets import LIT_CARRIERS, PRESET_MATERIALS, build_system, build_systems

logger = logging.getLogger(__name__)

PROG = "casimirpulse"
EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_PARTIAL = 3

COMMANDS = ("sweep", "crossover", "modulate", "material-eval", "kk-build")
SYSTEM_COMMANDS = ("sweep", "crossover", "modulate")
SIGN_CONVENTION = "pressure < 0 is attraction, pressure > 0 is repulsion"
FLOAT_FORMAT = "%.11e"


class ConfigError(ValueError):
    """Exception raised for an invalid combination of options."""

    pass


@dataclass(frozen=True)
class RunConfig:
    """Everything one CLI invocation needs.

    Attributes
    ----------
        command: one of `COMMANDS`
        preset: preset name, or None when plate1/medium/plate2 are given
        light: whether plate 2 is illuminated
        temperature: K
        a_min, a_max: separation range, m
        points: sweep points
        carrier_density: photo-excited carrier density, m^-3 (None: the
            carriers material's own)
        output: output path, None for stdout

    """

    command: str
    preset: Optional[str] = None
    plate1: Optional[str] = None
    medium: Optional[str] = None
    plate2: Optional[str] = None
    light: bool = False
    temperature: float = 300.0
    a_min: float = 50e-9
    a_max: float = 500e-9
    points: int = 100
    carrier_density: Optional[float] = None
    rel_tol: float = 1e-6
    max_matsubara: int = 5000
    workers: int = 1
    tol: float = 1e-10
    separation: Optional[float] = None
    plate_area: float = 1e-10
    spring_constant: float = 0.02
    name: Optional[str] = None
    xi: Tuple[float, ...] = ()
    input: Optional[str] = None
    material_name: Optional[str] = None
    kk_points: int = 200
    output: Optional[str] = None
    materials_dir: Optional[str] = None
    verbosity: int = 0
    _settings: QuadratureSettings = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"Unknown command {self.command!r}")
        try:
            object.__setattr__(
                self,
                "_settings",
                QuadratureSettings(rel_tol=self.rel_tol, max_matsubara=self.max_matsubara),
            )
        except ValueError as err:
            raise ConfigError(str(err)) from None
        if self.command in SYSTEM_COMMANDS:
            self._check_system()
        elif self.command == "material-eval":
            if not self.name or not self.xi:
                raise ConfigError("material-eval needs --name and --xi")
            if any(not x >= 0.0 for x in self.xi):
                raise ConfigError("--xi values must be >= 0")
        elif self.command == "kk-build":
            if not self.input or not self.output:
                raise ConfigError("kk-build needs --input and --output")
            if self.kk_points < 2:
                raise ConfigError("kk-build needs at least 2 points")

    def _check_system(self) -> None:
        explicit = (self.plate1, self.medium, self.plate2)
        if self.preset is not None:
            if any(explicit):
                raise ConfigError("Give either --preset or --plate1/--medium/--plate2, not both")
            if self.preset not in PRESET_MATERIALS:
                raise ConfigError(f"Unknown preset {self.preset!r}")
        elif not all(explicit):
            raise ConfigError("Give --preset or all of --plate1, --medium and --plate2")
        if not (math.isfinite(self.temperature) and self.temperature > 0.0):
            raise ConfigError(f"--temperature must be > 0, got {self.temperature}")
        if not (math.isfinite(self.a_max) and 0.0 < self.a_min < self.a_max):
            raise ConfigError(f"Need 0 < --a-min < --a-max, got {self.a_min}, {self.a_max}")
        if self.points < 2:
            raise ConfigError(f"--points must be >= 2, got {self.points}")
        if self.carrier_density is not None and not self.carrier_density > 0.0:
            raise ConfigError(f"--carrier-density must be > 0, got {self.carrier_density}")
        if self.workers < 1:
            raise ConfigError(f"--workers must be >= 1, got {self.workers}")
        if self.command == "crossover" and not self.tol > 0.0:
            raise ConfigError(f"--tol must be > 0, got {self.tol}")
        if self.command == "modulate":
            if self.separation is None:
                raise ConfigError("modulate needs --separation")
            if not self.a_min <= self.separation <= self.a_max:
                raise ConfigError(
                    f"--separation {self.separation} outside [{self.a_min}, {self.a_max}]"
                )
            if not (self.plate_area > 0.0 and self.spring_constant > 0.0):
                raise ConfigError("--plate-area and --spring-constant must be > 0")

    @property
    def settings(self) -> QuadratureSettings:
        return self._settings

    @property
    def materials(self) -> Tuple[str, str, str]:
        if self.preset is not None:
            return PRESET_MATERIALS[self.preset]
        assert self.plate1 and self.medium and self.plate2
        return self.plate1, self.medium, self.plate2

    def argv(self) -> List[str]:
        """Canonical arguments reproducing this run's output (floats as repr)."""
        args = [self.command]
        if self.command in SYSTEM_COMMANDS:
            if self.preset is not None:
                args += ["--preset", self.preset]
            else:
                plate1, medium, plate2 = self.materials
                args += ["--plate1", plate1, "--medium", medium, "--plate2", plate2]
            args += ["--light", "on" if self.light else "off"]
            args += ["--temperature", repr(self.temperature)]
            if self.carrier_density is not None:
                args += ["--carrier-density", repr(self.carrier_density)]
            args += ["--a-min", repr(self.a_min), "--a-max", repr(self.a_max)]
            args += ["--rel-tol", repr(self.rel_tol), "--max-matsubara", str(self.max_matsubara)]
            if self.command == "sweep":
                args += ["--points", str(self.points)]
            elif self.command == "crossover":
                args += ["--tol", repr(self.tol)]
            else:
                assert self.separation is not None
                args += [
                    "--separation",
                    repr(self.separation),
                    "--plate-area",
                    repr(self.plate_area),
                    "--spring-constant",
                    repr(self.spring_constant),
                ]
        elif self.command == "material-eval":
            assert self.name is not None
            args += ["--name", self.name, "--xi"] + [repr(x) for x in self.xi]
        else:
            assert self.input is not None
            args += ["--input", self.input, "--points", str(self.kk_points)]
            if self.material_name is not None:
                args += ["--material-name", self.material_name]
        if self.materials_dir is not None:
            args += ["--materials-dir", self.materials_dir]
        return args


def _add_system_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("plate system")
    group.add_argument("--preset", choices=sorted(PRESET_MATERIALS), default=None)
    group.add_argument("--plate1", default=None, help="Material name of plate 1.")
    group.add_argument("--medium", default=None, help="Material name of the medium.")
    group.add_argument("--plate2", default=None, help="Material name of plate 2 (illuminated).")
    group.add_argument("--light", choices=("on", "off"), default="off")
    group.add_argument("--temperature", type=float, default=300.0, help="Kelvin.")
    group.add_argument(
        "--carrier-density",
        type=float,
        default=None,
        help=f"Photo-excited carrier density, m^-3 (default: from {LIT_CARRIERS}).",
    )
    group.add_argument("--a-min", type=float, default=50e-9, help="Smallest separation, m.")
    group.add_argument("--a-max", type=float, default=500e-9, help="Largest separation, m.")
    group.add_argument("--rel-tol", type=float, default=1e-6)
    group.add_argument("--max-matsubara", type=int, default=5000)


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", default=None, help="Output CSV (default: stdout).")
    common.add_argument(
        "--materials-dir",
        default=None,
        help="Material database directory (default: $CASIMIR_MATERIALS_DIR or the shipped set).",
    )
    common.add_argument("-v", "--verbose", action="count", default=0)
    common.add_argument("-q", "--quiet", action="count", default=0)

    parser = argparse.ArgumentParser(
        prog=PROG, description="Casimir pressure between plates immersed in a liquid."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("sweep", parents=[common], help="Pressure-separation curve.")
    _add_system_options(p)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--workers", type=int, default=1, help="Threads evaluating separations.")

    p = commands.add_parser("crossover", parents=[common], help="Sign-change separation.")
    _add_system_options(p)
    p.add_argument("--tol", type=float, default=1e-10, help="Bracket width, m.")

    p = commands.add_parser("modulate", parents=[common], help="Dark vs lit pressure.")
    _add_system_options(p)
    p.add_argument("--separation", type=float, required=True, help="m.")
    p.add_argument("--plate-area", type=float, default=1e-10, help="m^2.")
    p.add_argument("--spring-constant", type=float, default=0.02, help="N/m.")

    p = commands.add_parser("material-eval", parents=[common], help="eps(i xi) of a material.")
    p.add_argument("--name", required=True)
    p.add_argument("--xi", type=float, nargs="+", required=True, help="rad/s.")

    p = commands.add_parser("kk-build", parents=[common], help="Kramers-Kronig eps(i xi) table.")
    p.add_argument("--input", required=True, help="CSV with columns omega_rad_s,im_eps.")
    p.add_argument("--points", type=int, default=200, help="Tabulated frequencies.")
    p.add_argument(
        "--material-name",
        default=None,
        help="Also write <name>.ini next to the output, a tabulated material.",
    )
    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    """Parses command-line arguments; usage errors exit with status 2."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    options = vars(args)
    command = options.pop("command")
    verbosity = options.pop("verbose") - options.pop("quiet")
    if command == "kk-build":
        options["kk_points"] = options.pop("points")
    if "light" in options:
        options["light"] = options["light"] == "on"
    if "xi" in options:
        options["xi"] = tuple(options["xi"])
    try:
        return RunConfig(command=command, verbosity=verbosity, **options)
    except ConfigError as err:
        parser.error(str(err))
        raise


def _material_lines(database: MaterialDatabase, names: Sequence[str]) -> List[str]:
    """One line per material used, base references included."""
    lines: List[str] = []
    seen: List[str] = []
    pending = list(names)
    while pending:
        name = pending.pop(0)
        if name in seen:
            continue
        seen.append(name)
        record = database.record(name)
        fields = [f"kind={record.kind}"]
        if record.base is not None:
            fields.append(f"base={record.base}")
            pending.append(record.base)
        if record.table_csv is not None:
            fields.append(f"table_csv={record.table_csv}")
        fields += [f"{key}={value!r}" for key, value in sorted(record.parameters.items())]
        lines.append(f"material {name}: {' '.join(fields)}")
    return lines


def _used_materials(config: RunConfig) -> List[str]:
    if config.command == "material-eval":
        assert config.name is not None
        return [config.name]
    names = list(config.materials)
    if config.light or config.command == "modulate":
        names.append(LIT_CARRIERS)
    return names


def _header(config: RunConfig, database: Optional[MaterialDatabase]) -> List[str]:
    """Header lines, without the leading `# `."""
    lines = [f"{PROG} {__version__}", f"command: {config.command}"]
    if database is not None:
        directory = str(database.directory.resolve())
        lines.append(f"materials_dir: {directory}")
        lines += _material_lines(database, _used_materials(config))
        config = replace(config, materials_dir=directory)
    if config.command in SYSTEM_COMMANDS:
        assert database is not None
        plate1, medium, plate2 = config.materials
        system = f"{plate1} | {medium} | {plate2}"
        if config.preset is not None:
            system += f" (preset {config.preset})"
        lines.append(f"system: {system}")
        lines.append(f"light: {'on' if config.light else 'off'}")
        lines.append(f"temperature_k: {config.temperature!r}")
        if config.light:
            density = config.carrier_density
            if density is None:
                density = database.record(LIT_CARRIERS).parameters["n_density_m3"]
            lines.append(f"carrier_density_m3: {density!r}")
        lines.append(f"sign_convention: {SIGN_CONVENTION}")
        s = config.settings
        lines.append(
            f"settings: rel_tol={s.rel_tol!r} max_matsubara={s.max_matsubara} "
            f"y_upper_margin={s.y_upper_margin!r} max_subdivisions={s.max_subdivisions}"
        )
    lines.append(f"reproduce: {PROG} {shlex.join(config.argv())}")
    return lines


def _commented(lines: List[str]) -> List[str]:
    return [f"# {line}" for line in lines]


def _row(*values: float) -> str:
    return ",".join(FLOAT_FORMAT % v for v in values)


def _emit(config: RunConfig, lines: List[str]) -> None:
    text = "\n".join(lines) + "\n"
    if config.output is None:
        sys.stdout.write(text)
    else:
        with open(config.output, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        logger.info("Wrote %s", config.output)


def _system(config: RunConfig, database: MaterialDatabase) -> LayerSystem:
    plate1, medium, plate2 = config.materials
    return build_system(
        plate1,
        medium,
        plate2,
        database,
        config.light,
        config.temperature,
        config.carrier_density,
    )


def _run_sweep(config: RunConfig, database: MaterialDatabase) -> int:
    result = sweep(
        _system(config, database),
        (config.a_min, config.a_max),
        config.points,
        config.settings,
        workers=config.workers,
        constants=database.constants,
    )
    lines = _commented(_header(config, database)) + ["a_m,pressure_pa,est_error_pa"]
    lines += [_row(p.separation, p.pressure, p.est_error) for p in result.points]
    lines += [f"# failed: a_m={f.separation!r}: {f.message}" for f in result.failures]
    _emit(config, lines)
    if result.failures:
        logger.warning("%d of %d sweep points failed", len(result.failures), config.points)
        return EXIT_PARTIAL
    return EXIT_OK


def _run_crossover(config: RunConfig, database: MaterialDatabase) -> int:
    result = find_crossover(
        _system(config, database),
        (config.a_min, config.a_max),
        config.tol,
        config.settings,
        constants=database.constants,
    )
    lines = _commented(_header(config, database))
    lines.append("separation_m,a_lo_m,a_hi_m,sign_below,sign_above,count")
    if result is None:
        lines.append("# crossover: none")
    else:
        lo, hi = result.bracket
        lines.append(
            f"{_row(result.separation, lo, hi)},"
            f"{result.sign_below:+d},{result.sign_above:+d},{result.count}"
        )
    _emit(config, lines)
    return EXIT_OK


def _run_modulate(config: RunConfig, database: MaterialDatabase) -> int:
    plate1, medium, plate2 = config.materials
    systems = build_systems(
        plate1, medium, plate2, database, config.temperature, config.carrier_density
    )
    assert config.separation is not None
    name = config.preset or "-".join(config.materials)
    scenario = Scenario(
        name, systems[False], systems[True], (config.a_min, config.a_max), config.points
    )
    result = modulation_depth(scenario, config.separation, config.settings, database.constants)

    def stroke(p: float) -> float:
        return quasi_static_displacement(p, config.plate_area, config.spring_constant)

    lines = _commented(_header(config, database))
    lines.append(f"# plate_area_m2: {config.plate_area!r}")
    lines.append(f"# spring_constant_n_m: {config.spring_constant!r}")
    lines.append(
        "a_m,p_dark_pa,p_lit_pa,delta_pa,delta_error_pa,"
        "displacement_dark_m,displacement_lit_m,displacement_delta_m"
    )
    lines.append(
        _row(
            config.separation,
            result.p_dark,
            result.p_lit,
            result.delta,
            result.delta_error,
            stroke(result.p_dark),
            stroke(result.p_lit),
            stroke(result.delta),
        )
    )
    _emit(config, lines)
    return EXIT_OK


def _run_material_eval(config: RunConfig, database: MaterialDatabase) -> int:
    assert config.name is not None
    model = database.model(config.name)
    lines = _commented(_header(config, database)) + ["xi_rad_s,eps"]
    for xi in config.xi:
        # xi = 0 reports eps(0), infinite for Drude-divergent models
        eps = model.static_permittivity() if xi == 0.0 else model.evaluate(xi)
        lines.append(_row(xi, eps))
    _emit(config, lines)
    return EXIT_OK


def _run_kk_build(config: RunConfig) -> int:
    assert config.input is not None and config.output is not None
    output = Path(config.output)
    data = load_optical_data(config.input)
    table = kk_table(data, points=config.kk_points)
    rows = np.vstack(
        [[0.0, table.static_value], np.column_stack([table.grid, table.values])]
    )
    record = None
    if config.material_name is not None:
        record = MaterialRecord(
            name=config.material_name,
            kind="tabulated",
            table_csv=output.name,
            table=tuple((float(x), float(e)) for x, e in rows),
            note=f"Kramers-Kronig transform of {Path(config.input).name}",
        )
        record.tabulated()

    write_table_csv(output, rows, ("xi_rad_s", "eps"), comments=_header(config, None))
    logger.info("Wrote %d eps(i xi) values to %s", len(table.grid), output)
    if record is not None:
        ini = output.parent / f"{record.name}.ini"
        save_material(record, ini, write_table=False)
        logger.info("Wrote material %s to %s", record.name, ini)
    return EXIT_OK


def run(config: RunConfig) -> int:
    """Executes one command and returns the process exit status.

    0 on success, 1 on any error (logged), 3 when a sweep completed with
    failed points.
    """
    try:
        if config.command == "kk-build":
            return _run_kk_build(config)
        database = MaterialDatabase(config.materials_dir)
        if config.command == "material-eval":
            return _run_material_eval(config, database)
        if config.command == "sweep":
            return _run_sweep(config, database)
        if config.command == "crossover":
            return _run_crossover(config, database)
        return _run_modulate(config, database)
    except (ConvergenceError, CrossoverError) as err:
        logger.error("Not converged: %s", err)
    except (MaterialError, ConfigError) as err:
        logger.error("%s", err)
    except ValueError as err:
        logger.error("Invalid input: %s", err)
    except OSError as err:
        logger.error("I/O error: %s", err)
    return EXIT_ERROR


def main(argv: Optional[Sequence[str]] = None) -> int:
    config = parse_args(argv)
    level = logging.INFO
    if config.verbosity > 0:
        level = logging.DEBUG
    elif config.verbosity < 0:
        level = logging.WARNING
    logging.basicConfig(
        level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr
    )
    return run(config)
