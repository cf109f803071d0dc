import filecmp
import json

import pytest

from mesynth.cli import main


def run_dir(tmp_path, name="run", days=3, template="aerospace", seed=42):
    out = tmp_path / name
    assert main(["run", "--template", template, "--days", str(days), "--seed", str(seed), "--out", str(out)]) == 0
    return out


@pytest.fixture(scope="module")
def built(tmp_path_factory):
    out = run_dir(tmp_path_factory.mktemp("cli"))
    assert main(["rebuild", "--run-dir", str(out)]) == 0
    return out


def differing(a, b):
    """Relative paths whose bytes differ between two directory trees."""
    out = []

    def walk(cmp, prefix=""):
        out.extend(prefix + n for n in cmp.diff_files + cmp.left_only + cmp.right_only)
        for name, sub in cmp.subdirs.items():
            walk(sub, f"{prefix}{name}/")

    walk(filecmp.dircmp(a, b))
    return sorted(out)


def test_validate_exit_codes(tmp_path, capsys):
    assert main(["validate", "--template", "pharma"]) == 0
    assert main(["validate", "--template", "no-such-template"]) == 3
    assert main(["validate", "--all", "--json", str(tmp_path / "v.json")]) == 0
    report = json.loads((tmp_path / "v.json").read_text())
    assert "aerospace" in report and all(r["ok"] for r in report.values())


def test_run_directory_is_canonical(tmp_path):
    a, b = run_dir(tmp_path, "a", days=2), run_dir(tmp_path, "b", days=2)
    for d in (a, b):
        assert main(["sync", "--run-dir", str(d)]) == 0
        assert main(["rebuild", "--run-dir", str(d)]) == 0
    assert differing(a, b) == ["metrics.json"]
    assert not (a / ".lock").exists()


def test_run_layout(built):
    meta = json.loads((built / "run.json").read_text())
    assert meta["config"]["template_id"] == "aerospace" and meta["config"]["duration_days"] == 3
    assert (built / "events.jsonl").stat().st_size > 0
    assert (built / "star" / "_manifest.json").exists()


def test_tool_prints_table(built, capsys):
    assert main(["tool", "--run-dir", str(built), "--name", "first_pass_yield", "--args", '{"group_by": "day"}']) == 0
    assert "fpy" in capsys.readouterr().out.splitlines()[0]


def test_tool_exit_codes(built, capsys):
    assert main(["tool", "--run-dir", str(built), "--name", "material_genealogy",
                 "--args", '{"order_nid": "WO-999999"}']) == 8
    assert main(["tool", "--run-dir", str(built), "--name", "cycle_time_analysis",
                 "--args", '{"station_nid": "BOND-1"}']) == 7
    assert main(["tool", "--run-dir", str(built), "--name", "cycle_time_analysis", "--args", "[1]"]) == 2
    assert main(["tool", "--run-dir", str(built), "--name", "cycle_time_analysis", "--unconstrained",
                 "--args", '{"station_nid": "BOND-1"}']) == 0


def test_tool_save_writes_report(built):
    assert main(["tool", "--run-dir", str(built), "--name", "production_status_summary", "--save"]) == 0
    doc = json.loads((built / "reports" / "tool-production_status_summary.json").read_text())
    assert doc["call"]["condition"] == "constrained" and doc["result"]["columns"]


def test_locked_run_dir(built, capsys):
    (built / ".lock").write_text("1")
    try:
        assert main(["sync", "--run-dir", str(built)]) == 10
        assert "locked" in capsys.readouterr().err
    finally:
        (built / ".lock").unlink()


def test_missing_run_dir(tmp_path):
    assert main(["sync", "--run-dir", str(tmp_path / "empty")]) == 4


def test_sync_then_lake_rebuild(tmp_path, capsys):
    out = run_dir(tmp_path, days=2)
    assert main(["sync", "--run-dir", str(out), "--cycles", "2"]) == 0
    text = capsys.readouterr().out
    assert "lake matches store" in text and "cycle 2: 0 rows" in text
    assert main(["rebuild", "--run-dir", str(out), "--source", "lake"]) == 0
    lake_star = {p.name: p.read_bytes() for p in (out / "star").glob("*.jsonl")}
    assert main(["rebuild", "--run-dir", str(out)]) == 0
    assert lake_star == {p.name: p.read_bytes() for p in (out / "star").glob("*.jsonl")}


def test_schemas_render(tmp_path):
    path = tmp_path / "s.json"
    assert main(["schemas", "--template", "aerospace", "--out", str(path)]) == 0
    doc = json.loads(path.read_text())
    assert len(doc) == 12
    assert main(["schemas", "--template", "aerospace", "--unconstrained", "--out", str(path)]) == 0
    assert "enum" not in path.read_text()


def test_swap_reports_fresh_enums(built, capsys):
    assert main(["swap", "--run-dir", str(built), "--template", "pharma"]) == 0
    report = json.loads((built / "reports" / "swap.json").read_text())
    assert report["before"]["failure_codes"] == 24 and report["after"]["failure_codes"] == 27
    assert report["after"]["stale_enum_values"] == []


@pytest.mark.slow
def test_halluc_eval_replay(tmp_path, capsys):
    assert main(["halluc-eval", "--client", "replay", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "hallucination.json").read_text())
    con, unc = doc["aggregates"]["constrained"], doc["aggregates"]["unconstrained"]
    assert (unc["queries"], unc["fabrications"], unc["empty"], unc["correct"]) == (72, 31, 27, 14)
    assert con["fabrications"] == 0
    assert doc["comparison"]["cohens_h"] == pytest.approx(1.431, abs=5e-4)
    assert "Fisher exact p" in capsys.readouterr().out


def test_http_client_without_endpoint_is_usage_error(monkeypatch, tmp_path):
    monkeypatch.delenv("MESYNTH_LLM_ENDPOINT", raising=False)
    monkeypatch.delenv("MESYNTH_LLM_MODEL", raising=False)
    code = main(["halluc-eval", "--client", "http", "--templates", "aerospace", "--condition", "constrained"])
    assert code == 2
