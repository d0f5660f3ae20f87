"""Command-line interface: exit codes, outputs, plotting purity."""

import json

from gvfleet import cli


def write_scenario(tmp_path, doc, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def mini_doc():
    return {
        "name": "mini",
        "dt": 0.01,
        "duration": 1.0,
        "seed": 1,
        "vehicles": [
            {"kind": "uav",
             "path": {"kind": "circle", "center": [0.0, 0.0], "radius": 5.0,
                      "altitude": 4.0},
             "gains": {"k": [1.5, 1.5, 1.5], "c": 2.0},
             "limits": {"speed": 8.0},
             "start": {"q": [5.0, 0.0, 4.0], "p": [0.0, -5.0, 0.0]}},
            {"kind": "uav",
             "path": {"kind": "circle", "center": [0.0, 0.0], "radius": 5.0,
                      "altitude": 8.0},
             "gains": {"k": [1.5, 1.5, 1.5], "c": 2.0},
             "limits": {"speed": 8.0},
             "start": {"q": [5.0, 1.0, 8.0], "p": [0.0, -5.0, 0.0]}},
        ],
        "topology": {"preset": "chain", "delta": 0.0},
        "safety": {"enabled": False, "radius": 1.0, "gamma": 1.0},
        "outputs": {},
    }


class TestRun:
    def test_run_writes_outputs(self, tmp_path):
        scen = write_scenario(tmp_path, mini_doc())
        out = tmp_path / "out"
        assert cli.main(["run", "--scenario", str(scen), "--out", str(out)]) == 0
        csv_path = out / "mini_telemetry.csv"
        lines = csv_path.read_text().splitlines()
        assert lines[0].split(",")[0] == "t"
        n_ticks = int(round(1.0 / 0.01)) + 1
        assert len(lines) == 1 + n_ticks * 2
        metrics = json.loads((out / "mini_metrics.json").read_text())
        assert metrics["provenance"]["seed"] == 1
        assert "metrics" in metrics

    def test_overrides_recorded_in_provenance(self, tmp_path):
        scen = write_scenario(tmp_path, mini_doc())
        out = tmp_path / "out"
        code = cli.main(["run", "--scenario", str(scen), "--dt", "0.02",
                         "--duration", "0.5", "--seed", "42", "--out", str(out)])
        assert code == 0
        payload = json.loads((out / "mini_metrics.json").read_text())
        assert payload["provenance"]["dt"] == 0.02
        assert payload["provenance"]["overrides"] == {
            "dt": 0.02, "duration": 0.5, "seed": 42}
        lines = (out / "mini_telemetry.csv").read_text().splitlines()
        assert len(lines) == 1 + (int(round(0.5 / 0.02)) + 1) * 2

    def test_missing_scenario_exits_2(self, tmp_path, capsys):
        assert cli.main(["run", "--scenario", str(tmp_path / "nope.json")]) == 2
        assert "not found" in capsys.readouterr().err

    def test_malformed_json_exits_2(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert cli.main(["run", "--scenario", str(path)]) == 2

    def test_disconnected_topology_exits_5_without_telemetry(self, tmp_path, capsys):
        doc = mini_doc()
        doc["topology"] = {"edges": []}
        scen = write_scenario(tmp_path, doc)
        out = tmp_path / "out"
        assert cli.main(["run", "--scenario", str(scen), "--out", str(out)]) == 5
        assert "spanning tree" in capsys.readouterr().err
        assert not (out / "mini_telemetry.csv").exists()

    def test_enable_safety_flag(self, tmp_path):
        scen = write_scenario(tmp_path, mini_doc())
        out = tmp_path / "out"
        code = cli.main(["run", "--scenario", str(scen), "--out", str(out),
                         "--enable-safety", "true"])
        assert code == 0
        payload = json.loads((out / "mini_metrics.json").read_text())
        assert payload["provenance"]["overrides"]["enable_safety"] is True

    def test_bundled_name_resolves(self, tmp_path):
        out = tmp_path / "out"
        code = cli.main(["run", "--scenario", "circular_6", "--duration", "1.0",
                         "--out", str(out)])
        assert code == 0
        assert (out / "circular_6_telemetry.csv").exists()


class TestPlot:
    def test_plot_is_pure_function_of_csv(self, tmp_path):
        scen = write_scenario(tmp_path, mini_doc())
        out = tmp_path / "out"
        assert cli.main(["run", "--scenario", str(scen), "--out", str(out)]) == 0
        csv_path = out / "mini_telemetry.csv"
        plot_a = tmp_path / "plot_a"
        plot_b = tmp_path / "plot_b"
        assert cli.main(["plot", str(csv_path), "--out", str(plot_a)]) == 0
        assert cli.main(["plot", str(csv_path), "--out", str(plot_b)]) == 0
        for stem in ("mini_telemetry_trajectories.svg", "mini_telemetry_traces.svg"):
            a = (plot_a / stem).read_bytes()
            b = (plot_b / stem).read_bytes()
            assert a == b
            assert a.startswith(b"<svg")

    def test_plot_missing_file_exits_2(self, tmp_path):
        assert cli.main(["plot", str(tmp_path / "none.csv")]) == 2
