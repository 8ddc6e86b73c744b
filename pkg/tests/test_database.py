from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from casimirpulse import (
    CarrierAugmentedModel,
    DrudeModel,
    IdealMetal,
    InvariantViolation,
    MaterialDatabase,
    MaterialFileError,
    MaterialRecord,
    TabulatedPermittivity,
    default_materials_dir,
    illuminate,
    load_material,
    plasma_frequency,
    read_table_csv,
    save_material,
    write_table_csv,
)
from casimirpulse.database import (
    MATERIALS_DIR_ENV,
    PACKAGE_MATERIALS_DIR,
    carrier_parameters,
    validate_record,
)

SHIPPED = ["alumina", "ethanol", "gold", "ideal_metal", "silicon", "silicon_lit", "vacuum"]


def write(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path


@pytest.mark.database
def test_shipped_materials() -> None:
    db = MaterialDatabase(PACKAGE_MATERIALS_DIR)
    assert db.names() == SHIPPED
    assert "ethanol" in db and "water" not in db
    assert db.model("ethanol").static_permittivity() == pytest.approx(25.692, rel=1e-12)
    assert db.model("alumina").static_permittivity() == pytest.approx(10.102, rel=1e-12)
    assert db.model("silicon").static_permittivity() == pytest.approx(11.66, rel=1e-12)
    assert isinstance(db.model("gold"), DrudeModel)
    assert isinstance(db.model("ideal_metal"), IdealMetal)
    assert db.model("vacuum").evaluate(1e15) == 1.0


@pytest.mark.database
def test_lit_silicon_resolves_base() -> None:
    db = MaterialDatabase(PACKAGE_MATERIALS_DIR)
    lit = db.model("silicon_lit")
    assert isinstance(lit, CarrierAugmentedModel)
    assert lit.base == db.model("silicon")
    assert lit.omega_p_e == pytest.approx(5.08e14, rel=5e-3)
    assert lit.omega_p_h == pytest.approx(5.69e14, rel=5e-3)


@pytest.mark.database
def test_illuminate_density_override() -> None:
    db = MaterialDatabase(PACKAGE_MATERIALS_DIR)
    record = db.record("silicon_lit")
    brighter = illuminate(db.model("silicon"), record, n_density=4 * 2.1e25)
    assert brighter.omega_p_e == pytest.approx(
        2 * plasma_frequency(carrier_parameters(record), "electron"), rel=1e-12
    )
    with pytest.raises(MaterialFileError):
        illuminate(db.model("silicon"), db.record("ethanol"))


@pytest.mark.database
def test_unknown_material() -> None:
    db = MaterialDatabase(PACKAGE_MATERIALS_DIR)
    with pytest.raises(MaterialFileError, match="Unknown material 'water'"):
        db.model("water")


@pytest.mark.database
def test_unknown_kind_reports_line(tmp_path: Path) -> None:
    path = write(tmp_path / "foo.ini", "[material]\nname = foo\nkind = plasma\n")
    with pytest.raises(MaterialFileError) as info:
        load_material(path)
    assert info.value.lineno == 3
    assert info.value.path == path
    assert "plasma" in str(info.value)


@pytest.mark.database
def test_bad_number_reports_line(tmp_path: Path) -> None:
    path = write(
        tmp_path / "bad.ini",
        "[material]\nname = bad\nkind = oscillator\nc_ir = 1.0\nc_uv = lots\n"
        "omega_ir_rad_s = 1e14\nomega_uv_rad_s = 1e16\n",
    )
    with pytest.raises(MaterialFileError) as info:
        load_material(path)
    assert info.value.lineno == 5


@pytest.mark.database
def test_missing_and_unexpected_keys(tmp_path: Path) -> None:
    missing = write(tmp_path / "a.ini", "[material]\nname = a\nkind = constant\n")
    with pytest.raises(MaterialFileError, match="Missing key 'eps'"):
        load_material(missing)
    extra = write(tmp_path / "b.ini", "[material]\nname = b\nkind = constant\neps = 2\ncolor = red\n")
    with pytest.raises(MaterialFileError) as info:
        load_material(extra)
    assert info.value.lineno == 5
    no_header = write(tmp_path / "c.ini", "name = c\n")
    with pytest.raises(MaterialFileError):
        load_material(no_header)
    with pytest.raises(MaterialFileError):
        load_material(tmp_path / "absent.ini")


@pytest.mark.database
def test_invariant_violation_on_load(tmp_path: Path) -> None:
    path = write(
        tmp_path / "neg.ini",
        "[material]\nname = neg\nkind = oscillator\nc_ir = -1.0\nc_uv = 1.0\n"
        "omega_ir_rad_s = 1e14\nomega_uv_rad_s = 1e16\n",
    )
    with pytest.raises(InvariantViolation):
        load_material(path)


@pytest.mark.database
@pytest.mark.parametrize("name", SHIPPED)
def test_save_load_round_trip(tmp_path: Path, name: str) -> None:
    record = load_material(PACKAGE_MATERIALS_DIR / f"{name}.ini")
    save_material(record, tmp_path / "copy.ini")
    assert load_material(tmp_path / "copy.ini") == record


@pytest.mark.database
def test_tabulated_material(tmp_path: Path) -> None:
    rows = np.array([[0.0, 12.0], [1e14, 11.0], [1e15, 8.0], [1e16, 1.5]])
    write_table_csv(tmp_path / "tab.csv", rows, ("xi_rad_s", "eps"), comments=["made by hand"])
    write(tmp_path / "tab.ini", "[material]\nname = tab\nkind = tabulated\ntable_csv = tab.csv\n")
    db = MaterialDatabase(tmp_path)
    model = db.model("tab")
    assert isinstance(model, TabulatedPermittivity)
    assert model.static_permittivity() == 12.0
    assert model.evaluate(1e15) == pytest.approx(8.0, rel=1e-12)

    record = db.record("tab")
    save_material(record, tmp_path / "again.ini")
    assert load_material(tmp_path / "again.ini").tabulated() == model


@pytest.mark.database
def test_table_csv_header(tmp_path: Path) -> None:
    write(tmp_path / "t.csv", "omega,eps\n1e14,2.0\n")
    with pytest.raises(MaterialFileError) as info:
        read_table_csv(tmp_path / "t.csv", ("xi_rad_s", "eps"))
    assert info.value.lineno == 1
    write(tmp_path / "u.csv", "xi_rad_s,eps\n1e14,abc\n")
    with pytest.raises(MaterialFileError):
        read_table_csv(tmp_path / "u.csv", ("xi_rad_s", "eps"))


@pytest.mark.database
def test_base_cycle(tmp_path: Path) -> None:
    carriers = (
        "[material]\nname = {name}\nkind = carriers\nbase = {base}\nn_density_m3 = 1e25\n"
        "m_eff_e = 0.3\nm_eff_h = 0.3\ngamma_e_rad_s = 1e13\ngamma_h_rad_s = 1e13\n"
    )
    write(tmp_path / "x.ini", carriers.format(name="x", base="y"))
    write(tmp_path / "y.ini", carriers.format(name="y", base="x"))
    with pytest.raises(MaterialFileError, match="cycle"):
        MaterialDatabase(tmp_path).model("x")


@pytest.mark.database
def test_duplicate_names(tmp_path: Path) -> None:
    write(tmp_path / "a.ini", "[material]\nname = same\nkind = constant\neps = 2\n")
    write(tmp_path / "b.ini", "[material]\nname = same\nkind = constant\neps = 3\n")
    with pytest.raises(MaterialFileError, match="Duplicate"):
        MaterialDatabase(tmp_path).names()


@pytest.mark.database
def test_directory_override(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv(MATERIALS_DIR_ENV, raising=False)
    assert default_materials_dir() == PACKAGE_MATERIALS_DIR
    monkeypatch.setenv(MATERIALS_DIR_ENV, str(tmp_path))
    write(tmp_path / "glass.ini", "[material]\nname = glass\nkind = constant\neps = 2.25\n")
    db = MaterialDatabase()
    assert db.names() == ["glass"]
    with pytest.raises(MaterialFileError):
        MaterialDatabase(tmp_path / "missing").names()


@pytest.mark.database
def test_record_validation() -> None:
    with pytest.raises(MaterialFileError):
        MaterialRecord("bad name", "constant", {"eps": 2.0})
    with pytest.raises(MaterialFileError):
        MaterialRecord("ok", "plasma")
    orphan = MaterialRecord(
        "orphan",
        "carriers",
        {
            "n_density_m3": 1e25,
            "m_eff_e": 0.3,
            "m_eff_h": 0.3,
            "gamma_e_rad_s": 1e13,
            "gamma_h_rad_s": 1e13,
        },
    )
    with pytest.raises(MaterialFileError, match="needs a base"):
        validate_record(orphan)
    with pytest.raises(InvariantViolation):
        validate_record(replace(orphan, base="silicon", parameters={**orphan.parameters, "gamma_h_rad_s": 0.0}))
