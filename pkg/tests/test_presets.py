import json

import pytest

import geopursuit as gp
from geopursuit.presets import PRESET_IDS, preset_document, run_preset


def test_preset_ids_complete():
    assert set(PRESET_IDS) == {"example1_plane", "example2_disk",
                               "example3_chebyshev", "circle_counterexample",
                               "tree_cat0"}


def test_unknown_preset_rejected():
    with pytest.raises(gp.ValidationError):
        preset_document("example9_torus")


def test_overrides_apply():
    doc = preset_document("example2_disk", seed=42, epsilon=0.2)
    assert doc["seed"] == 42
    assert doc["game"]["epsilon"] == 0.2
    # the stored template is untouched
    assert preset_document("example2_disk")["game"]["epsilon"] == 0.1


@pytest.mark.parametrize("preset,expected", [
    ("example2_disk", ["captured"] * 3),
    ("example3_chebyshev", ["captured"] * 3),
    ("tree_cat0", ["captured"] * 3),
    ("example1_plane", ["evaded"] * 2),
    ("circle_counterexample", ["evaded"]),
])
def test_presets_meet_their_expected_class(tmp_path, preset, expected):
    result = run_preset(preset, tmp_path / preset)
    assert result.exit_code == 0
    assert result.outcomes == expected
    summary = json.loads((tmp_path / preset / "summary.json").read_text())
    assert summary["ok"] is True
    assert summary["config_hash"]


def test_unexpected_outcome_exits_3(tmp_path):
    # the circle runner holds the distance, so demanding capture fails:
    # force it by overriding the plane preset onto a tiny horizon where
    # nothing could change class -- instead flip expectation by running
    # the capture preset with an un-capturable horizon
    result = run_preset("example2_disk", tmp_path / "short", seed=0,
                        horizon_steps=1)
    assert result.exit_code == 3
    assert all(o == "evaded" for o in result.outcomes)
