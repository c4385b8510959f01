"""Tests for the command-line interface and its exit-code contract."""

import json

import pytest

from storysphere.cli import main


@pytest.fixture(scope="module")
def compiled_graph(project_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("cli") / "graph.json"
    code = main(["compile", str(project_dir / "manifest.json"), "--out", str(out)])
    assert code == 0
    return out


def test_compile_writes_graph_and_report(project_dir, compiled_graph, capsys):
    assert compiled_graph.is_file()
    assert compiled_graph.with_suffix(".report.json").is_file()
    report = json.loads(compiled_graph.with_suffix(".report.json").read_text())
    assert report["provider_failures"] == 0
    assert len(report["scenes"]) == 3


def test_compile_is_byte_deterministic(project_dir, compiled_graph, tmp_path):
    out2 = tmp_path / "again.json"
    assert main(["compile", str(project_dir / "manifest.json"), "--out", str(out2)]) == 0
    assert out2.read_bytes() == compiled_graph.read_bytes()


def test_compile_missing_saliency_exits_1(project_dir, tmp_path, capsys):
    manifest = json.loads((project_dir / "manifest.json").read_text())
    manifest["saliency_dir"] = "nowhere"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(manifest))
    # inputs resolve relative to the manifest location
    code = main(["compile", str(bad)])
    assert code == 1
    assert "saliency" in capsys.readouterr().err


def test_compile_bad_lambda_exits_1(project_dir, tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"diversity_lambda": 1.5}))
    code = main(
        ["compile", str(project_dir / "manifest.json"), "--config", str(config)]
    )
    assert code == 1
    assert "lambda" in capsys.readouterr().err


def test_compile_config_overrides(project_dir, tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"max_options": 1}))
    out = tmp_path / "single.json"
    code = main(
        [
            "compile",
            str(project_dir / "manifest.json"),
            "--config",
            str(config),
            "--out",
            str(out),
        ]
    )
    assert code == 0
    doc = json.loads(out.read_text())
    assert all(len(s["branches"]) == 1 for s in doc["scenes"])


def test_validate_ok(compiled_graph, capsys):
    assert main(["validate", str(compiled_graph)]) == 0
    assert "ok" in capsys.readouterr().out


def test_validate_corrupt_exits_2(compiled_graph, tmp_path, capsys):
    doc = json.loads(compiled_graph.read_text())
    doc["scenes"][0]["default_branch"] = 9
    bad = tmp_path / "corrupt.json"
    bad.write_text(json.dumps(doc))
    assert main(["validate", str(bad)]) == 2
    assert "default_branch" in capsys.readouterr().err


def test_validate_missing_file_exits_1(tmp_path):
    assert main(["validate", str(tmp_path / "nope.json")]) == 1


def test_inspect(compiled_graph, capsys):
    assert main(["inspect", str(compiled_graph)]) == 0
    out = capsys.readouterr().out
    assert "scene 0" in out and "scene 2" in out
    assert main(["inspect", str(compiled_graph), "--scene", "1"]) == 0
    out = capsys.readouterr().out
    assert "scene 1" in out and "scene 2" not in out
    assert main(["inspect", str(compiled_graph), "--scene", "9"]) == 1


def test_simulate_default_and_replay(compiled_graph, tmp_path, capsys):
    trace_path = tmp_path / "trace.json"
    assert (
        main(
            [
                "simulate",
                str(compiled_graph),
                "--policy",
                "default_only",
                "--out",
                str(trace_path),
            ]
        )
        == 0
    )
    trace = json.loads(trace_path.read_text())
    assert [e["branch"] for e in trace["events"]] == [0, 0, 0]
    # replaying the trace as a script reproduces it byte-identically
    replay_path = tmp_path / "replay.json"
    assert (
        main(
            [
                "simulate",
                str(compiled_graph),
                "--policy",
                "script",
                "--script",
                str(trace_path),
                "--out",
                str(replay_path),
            ]
        )
        == 0
    )
    assert replay_path.read_bytes() == trace_path.read_bytes()


def test_simulate_script_stdout(compiled_graph, tmp_path, capsys):
    script = tmp_path / "script.json"
    script.write_text("[1, 0]")
    assert (
        main(["simulate", str(compiled_graph), "--policy", "script", "--script", str(script)])
        == 0
    )
    trace = json.loads(capsys.readouterr().out)
    assert [e["branch"] for e in trace["events"]] == [0, 1, 0]


def test_simulate_bad_script_exits_1(compiled_graph, tmp_path):
    script = tmp_path / "script.json"
    script.write_text("{\"no\": 1}")
    assert (
        main(["simulate", str(compiled_graph), "--policy", "script", "--script", str(script)])
        == 1
    )


def test_eval_timing_self_agreement(compiled_graph, capsys):
    assert main(["eval-timing", str(compiled_graph), str(compiled_graph)]) == 0
    assert "J = 1.000" in capsys.readouterr().out


def test_eval_timing_hand_case(tmp_path, capsys):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    a.write_text("0\n100\n")
    b.write_text("3\n200\n")
    assert main(["eval-timing", str(a), str(b)]) == 0
    out = capsys.readouterr().out
    assert "J = 0.333" in out
    assert "0 ~ 3" in out


def test_eval_timing_empty_vs_nonempty(tmp_path, capsys):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    a.write_text("")
    b.write_text("12.5\n")
    assert main(["eval-timing", str(a), str(b)]) == 0
    assert "J = 0.000" in capsys.readouterr().out


def test_eval_timing_malformed_exits_1(tmp_path, capsys):
    a = tmp_path / "a.txt"
    a.write_text("12\nnot-a-number\n")
    b = tmp_path / "b.txt"
    b.write_text("1\n")
    assert main(["eval-timing", str(a), str(b)]) == 1
    assert "line 2" in capsys.readouterr().err


def test_unknown_command_exits_1():
    assert main(["frobnicate"]) == 1


def test_provider_failure_exits_3_but_emits(project_dir, tmp_path, capsys, monkeypatch):
    monkeypatch.delenv("STORYSPHERE_PROVIDER_URL", raising=False)
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"provider": "http"}))  # endpoint unset -> all requests fail
    out = tmp_path / "graph.json"
    code = main(
        [
            "compile",
            str(project_dir / "manifest.json"),
            "--config",
            str(config),
            "--out",
            str(out),
        ]
    )
    assert code == 3
    assert out.is_file()
    doc = json.loads(out.read_text())
    # placeholders in place of provider texts
    assert doc["scenes"][0]["title"] == "Scene 1"
    assert doc["scenes"][0]["branches"][0]["title"] == "Branch 1"
    assert doc["scenes"][0]["branches"][0]["narration"]["text"] is None
    assert main(["validate", str(out)]) == 0
