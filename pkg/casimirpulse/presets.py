"""Ready-made plate systems: a plate in ethanol facing a silicon plate.

Each preset builds a `Scenario` whose lit system replaces the silicon plate
by its carrier-augmented model.
"""

from __future__ import annotations

from typing import Callable, Dict, Optional, Tuple

from .analysis import Range, Scenario
from .database import MaterialDatabase, illuminate
from .lifshitz import LayerSystem

LIT_CARRIERS = "silicon_lit"
DEFAULT_RANGE: Range = (50e-9, 500e-9)


def build_system(
    plate1: str,
    medium: str,
    plate2: str,
    database: MaterialDatabase,
    light: bool = False,
    temperature: float = 300.0,
    carrier_density: Optional[float] = None,
    carriers: str = LIT_CARRIERS,
) -> LayerSystem:
    """One layer system; the `carriers` record is read only when `light` is on.

    Args:
    ----
        plate1: material name of plate 1.
        medium: material name of the medium.
        plate2: material name of plate 2, the illuminated plate.
        database: material database resolving the names.
        light: whether plate 2 is illuminated.
        temperature: K.
        carrier_density: photo-excited carrier density, m^-3; the carriers
            material's own density when None.
        carriers: name of the `carriers` material supplying masses and
            relaxation parameters.

    """
    plate = database.model(plate2)
    if light:
        plate = illuminate(plate, database.record(carriers), carrier_density, database.constants)
    return LayerSystem(database.model(plate1), database.model(medium), plate, temperature)


def build_systems(
    plate1: str,
    medium: str,
    plate2: str,
    database: MaterialDatabase,
    temperature: float = 300.0,
    carrier_density: Optional[float] = None,
    carriers: str = LIT_CARRIERS,
) -> Dict[bool, LayerSystem]:
    """Dark and lit layer systems keyed by the light state."""
    return {
        light: build_system(
            plate1, medium, plate2, database, light, temperature, carrier_density, carriers
        )
        for light in (False, True)
    }


# (plate 1, medium, plate 2) material names per preset
PRESET_MATERIALS: Dict[str, Tuple[str, str, str]] = {
    "au-ethanol-si": ("gold", "ethanol", "silicon"),
    "si-ethanol-si": ("silicon", "ethanol", "silicon"),
    "al2o3-ethanol-si": ("alumina", "ethanol", "silicon"),
}


def _preset(name: str) -> Callable[..., Scenario]:
    plate1, medium, plate2 = PRESET_MATERIALS[name]

    def build(
        database: MaterialDatabase,
        temperature: float = 300.0,
        carrier_density: Optional[float] = None,
        a_range: Range = DEFAULT_RANGE,
        points: int = 100,
    ) -> Scenario:
        systems = build_systems(plate1, medium, plate2, database, temperature, carrier_density)
        return Scenario(name, systems[False], systems[True], a_range, points)

    build.__name__ = name.replace("-", "_")
    build.__doc__ = f"{plate1} | {medium} | {plate2}, dark and lit."
    return build


au_ethanol_si = _preset("au-ethanol-si")
si_ethanol_si = _preset("si-ethanol-si")
al2o3_ethanol_si = _preset("al2o3-ethanol-si")

scenarios: Dict[str, Callable[..., Scenario]] = {
    "au-ethanol-si": au_ethanol_si,
    "si-ethanol-si": si_ethanol_si,
    "al2o3-ethanol-si": al2o3_ethanol_si,
}


def build_scenario(
    name: str,
    database: Optional[MaterialDatabase] = None,
    temperature: float = 300.0,
    carrier_density: Optional[float] = None,
    a_range: Range = DEFAULT_RANGE,
    points: int = 100,
) -> Scenario:
    """Builds the preset `name` from `database` (the default database when None)."""
    if name not in scenarios:
        raise KeyError(f"Unknown preset {name!r}; available: {', '.join(sorted(scenarios))}")
    if database is None:
        database = MaterialDatabase()
    return scenarios[name](database, temperature, carrier_density, a_range, points)
