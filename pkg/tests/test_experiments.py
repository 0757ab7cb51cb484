import importlib.util
import json
from pathlib import Path

import pytest

from src.config import SETTINGS
from src.experiments import barbell_scaling, calibrate_example2, expander_trend, location_demo


def test_calibration_picks_small_self_weight():
    result = calibrate_example2()
    assert result.epsilon == 0.1
    assert result.reverse == {"a": False, "b": False}
    assert result.matched
    assert result.errors["a"] == pytest.approx(0.0032, abs=1e-4)
    assert len(result.table) == 5 * 2 * 2


def test_calibration_progress(capsys):
    calibrate_example2(epsilons=(0.1, 0.5), verbose=True)
    err = capsys.readouterr().err
    assert "[1/2] epsilon=0.1" in err
    assert "✓" in err


def test_barbell_scaling():
    result = barbell_scaling()
    assert result.cross == pytest.approx([204.0, 1235.0, 8866.5], rel=1e-9)
    assert result.within == pytest.approx([17.0, 32.5, 64.25], rel=1e-9)
    assert result.cross_slope == pytest.approx(2.72, abs=0.01)
    assert result.within_slope == pytest.approx(0.96, abs=0.01)


def test_barbell_scaling_rejects_small_bells():
    with pytest.raises(ValueError, match="bells"):
        barbell_scaling(sizes=(6,))


def test_expander_trend_decreases():
    result = expander_trend()
    assert result.decreasing
    assert result.total_influence == 0.5
    assert all(s >= 0 for s in result.sup)
    assert result.to_dict()["decreasing"]


def test_location_changes_deviation_but_not_bound():
    result = location_demo()
    assert result.bound_inside == pytest.approx(result.bound_bridge, rel=1e-12)
    assert result.actual_bridge > result.actual_inside
    assert result.actual_bridge <= result.bound_bridge


def _load_script():
    path = Path(__file__).parent.parent / "scripts" / "run_experiments.py"
    module_spec = importlib.util.spec_from_file_location("run_experiments", path)
    module = importlib.util.module_from_spec(module_spec)
    module_spec.loader.exec_module(module)
    return module


def test_run_experiments_script_saves_results(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    script = _load_script()
    script.main(["--only", "barbell", "--sizes", "12", "24", "--only", "location", "--save"])
    out = capsys.readouterr().out
    assert "[1/2] barbell" in out
    assert "✓ Experiments complete" in out
    saved = json.loads((tmp_path / SETTINGS.output_dir / "experiments.json").read_text())
    assert sorted(saved) == ["barbell", "location"]
    assert saved["barbell"]["cross"] == pytest.approx([204.0, 1235.0], rel=1e-9)


def test_run_experiments_script_fails_on_bad_sizes(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    script = _load_script()
    with pytest.raises(SystemExit) as exc:
        script.main(["--only", "barbell", "--sizes", "6"])
    assert exc.value.code == 1
