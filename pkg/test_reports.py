"""
Tests for run manifests and census reports.
"""

import json
from fractions import Fraction

import pytest

from enumeration import enumerate_cells
from errors import InputFormatError
from manifest import RunManifest, __version__
from reports import census_table, export_report, mass_breakdown, missing_dimensions


@pytest.fixture(scope="module")
def cells_3():
    return enumerate_cells(3)


def test_manifest_defaults_and_updates():
    manifest = RunManifest("cells")
    assert manifest["dimension"] == 3
    assert manifest["version"] == __version__
    manifest.set_config({"dimension": 4, "workers": 2, "seed_perturbation": "1/50", "output": None})
    assert manifest["seed_perturbation"] == Fraction(1, 50)
    data = manifest.to_dict()
    assert data["seed_perturbation"] == "1/50"
    assert "generated_at" in data
    assert set(manifest.comparable_dict()) == set(data) - {"generated_at", "workers", "checkpoint"}


@pytest.mark.parametrize("settings", [
    {"dimension": 6},
    {"dimension": 1},
    {"workers": 0},
    {"checkpoint_every": 0},
    {"seed_perturbation": "-1/10"},
    {"dimension": 2, "min_dim": 4},
])
def test_manifest_rejects_out_of_range(settings):
    with pytest.raises(InputFormatError):
        RunManifest("enumerate").set_config(settings)


def test_manifest_accepts_dimension_one_for_checks():
    assert RunManifest("mass-check").set_config({"dimension": 1})["dimension"] == 1


def test_manifest_from_output_header(tmp_path):
    path = tmp_path / "census.json"
    source = RunManifest("cells").set_config({"dimension": 2, "min_dim": 1})
    path.write_text(json.dumps({"manifest": source.to_dict(), "cells": []}))
    loaded = RunManifest("cells").load_from_json(str(path))
    assert loaded.comparable_dict() == source.comparable_dict()
    with pytest.raises(InputFormatError):
        RunManifest().load_from_json(str(tmp_path / "missing.json"))


def test_mass_breakdown_and_table(cells_3):
    breakdown = mass_breakdown(cells_3.records)
    assert list(breakdown) == [6, 5, 4, 3, 2, 1]
    assert sum(breakdown.values()) == 0
    assert breakdown[6] == Fraction(1, cells_3.top[0].stabilizer)
    table = census_table(cells_3.records)
    assert list(table.index) == [6, 5, 4, 3, 2, 1]
    assert table.loc[6, "orbits"] == 1
    assert int(table["orbits"].sum()) == len(cells_3.records)
    assert all(table["pd_orbits"] <= table["orbits"])
    assert census_table([]).empty


def test_missing_dimensions():
    assert missing_dimensions(3, [6, 5, 4, 3, 2, 1]) == []
    assert missing_dimensions(3, [6]) == [5, 4, 3, 2, 1]


def test_export_report_verdicts():
    manifest = RunManifest("matroidal-check").to_dict()
    text = export_report("matroidal-check", manifest, {"total": 2, "passed": 2, "value": Fraction(1, 3)})
    body = json.loads(text)
    assert body["verdict"] == "PASS"
    assert body["report"]["value"] == "1/3"
    failing = json.loads(export_report("cs-check", manifest, {"total": 2, "passed": 1}))
    assert failing["verdict"] == "FAIL"
