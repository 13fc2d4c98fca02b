import json
from pathlib import Path

import numpy as np
import pytest

import sensorval as sv
from sensorval.cli import main
from conftest import FIXTURES


NET = str(FIXTURES / "reference_net.json")
DISC = str(FIXTURES / "reference_net.disc.json")
READINGS = str(FIXTURES / "reference_readings.csv")
STRUCTURE = str(FIXTURES / "reference_structure.json")


@pytest.fixture()
def train_csv(tmp_path, ref):
    sub = sv.Dataset(ref.train.sensors, ref.train.values[:400])
    path = tmp_path / "train.csv"
    path.write_text(sub.to_csv())
    return str(path)


class TestLearn:
    def test_learn_round_trip(self, tmp_path, train_csv):
        out = tmp_path / "net.json"
        rc = main(["learn", "--structure", STRUCTURE, "--data", train_csv,
                   "--out", str(out)])
        assert rc == 0
        net = sv.load_network(out.read_text())
        assert len(net.variables) == 5
        disc = sv.discretizer_from_json(
            (tmp_path / "net.disc.json").read_text())
        assert disc.bins == 10

    def test_empty_csv(self, tmp_path, capsys):
        data = tmp_path / "empty.csv"
        data.write_text("a,g,m,p,t\n")
        rc = main(["learn", "--structure", STRUCTURE, "--data", str(data),
                   "--out", str(tmp_path / "net.json")])
        assert rc == 2
        assert "no data rows" in capsys.readouterr().err

    def test_unknown_column(self, tmp_path, train_csv, capsys):
        structure = tmp_path / "structure.json"
        structure.write_text(sv.save_structure(
            sv.NetworkStructure("bad", ("m", "zz"), ())))
        rc = main(["learn", "--structure", str(structure), "--data", train_csv,
                   "--out", str(tmp_path / "net.json")])
        assert rc == 2
        assert "zz" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        rc = main(["learn", "--structure", str(tmp_path / "nope.json"),
                   "--data", str(tmp_path / "nope.csv"),
                   "--out", str(tmp_path / "net.json")])
        assert rc == 2


class TestCompileTree:
    def test_pruned_default(self, tmp_path, capsys):
        out = tmp_path / "tree.json"
        rc = main(["compile-tree", "--network", NET, "--out", str(out)])
        assert rc == 0
        tree = sv.tree_from_json(out.read_text())
        assert tree.node_count() <= 30
        assert tree.depth() == 5
        assert "pruned" in capsys.readouterr().out

    def test_full_flag(self, tmp_path, capsys):
        out = tmp_path / "tree.json"
        rc = main(["compile-tree", "--network", NET, "--out", str(out),
                   "--full"])
        assert rc == 0
        tree = sv.tree_from_json(out.read_text())
        assert tree.node_count() == 31
        assert tree.depth() == 5

    def test_single_sensor_net(self, tmp_path):
        variables = [sv.Variable("s", ("0", "1"))]
        net = sv.BayesNet(variables, [],
                          {"s": sv.Cpt("s", (), np.array([[0.5, 0.5]]))})
        path = tmp_path / "one.json"
        path.write_text(sv.save_network(net))
        out = tmp_path / "tree.json"
        assert main(["compile-tree", "--network", str(path),
                     "--out", str(out)]) == 0
        assert sv.tree_from_json(out.read_text()).node_count() == 1


class TestValidate:
    def test_streams_step_lines(self, tmp_path):
        out = tmp_path / "steps.jsonl"
        data = tmp_path / "one_row.csv"
        data.write_text("\n".join(Path(READINGS).read_text().splitlines()[:2])
                        + "\n")
        rc = main(["validate", "--network", NET, "--discretizer", DISC,
                   "--data", str(data), "--criterion", "sigma", "--k", "3",
                   "--out", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 5
        records = [json.loads(line) for line in lines]
        assert [r["step"] for r in records] == [1, 2, 3, 4, 5]
        assert records[-1]["quality"] > 0.9

    def test_fault_resolves_in_stream(self, tmp_path, ref):
        row = sv.inject_fault(ref.test.row(10), sv.FaultSpec("g", "severe"),
                              ref.discretizer)
        data = tmp_path / "fault.csv"
        data.write_text(sv.Dataset(ref.test.sensors, np.array(
            [[row[s] for s in ref.test.sensors]])).to_csv())
        out = tmp_path / "steps.jsonl"
        rc = main(["validate", "--network", NET, "--discretizer", DISC,
                   "--data", str(data), "--out", str(out)])
        assert rc == 0
        last = json.loads(out.read_text().splitlines()[-1])
        assert last["pf"]["g"] > 0.99

    def test_empty_body_ok(self, tmp_path):
        data = tmp_path / "empty.csv"
        data.write_text("a,g,m,p,t\n")
        out = tmp_path / "steps.jsonl"
        rc = main(["validate", "--network", NET, "--discretizer", DISC,
                   "--data", str(data), "--out", str(out)])
        assert rc == 0
        assert out.read_text() == ""

    def test_missing_sensor_column(self, tmp_path, capsys):
        data = tmp_path / "short.csv"
        data.write_text("a,g,m,p\n0.1,0.1,0.1,0.1\n")
        rc = main(["validate", "--network", NET, "--discretizer", DISC,
                   "--data", str(data)])
        assert rc == 2
        assert "t" in capsys.readouterr().err

    def test_consumer_may_stop_reading(self, tmp_path):
        import subprocess
        data = tmp_path / "rows.csv"
        data.write_text("\n".join(Path(READINGS).read_text().splitlines()[:4])
                        + "\n")
        proc = subprocess.run(
            f"sensorval validate --network {NET} --discretizer {DISC} "
            f"--data {data} | head -1",
            shell=True, capture_output=True, text=True)
        assert proc.returncode == 0
        assert "error" not in proc.stderr
        json.loads(proc.stdout.strip())

    def test_tree_traversal(self, tmp_path):
        tree_path = tmp_path / "tree.json"
        assert main(["compile-tree", "--network", NET,
                     "--out", str(tree_path)]) == 0
        data = tmp_path / "one_row.csv"
        data.write_text("\n".join(Path(READINGS).read_text().splitlines()[:2])
                        + "\n")
        out = tmp_path / "steps.jsonl"
        rc = main(["validate", "--network", NET, "--discretizer", DISC,
                   "--tree", str(tree_path), "--data", str(data),
                   "--out", str(out)])
        assert rc == 0
        first = json.loads(out.read_text().splitlines()[0])
        assert first["sensor"] == "t"


class TestSimulateAndCompare:
    def test_simulate_report(self, tmp_path):
        data = tmp_path / "rows.csv"
        lines = Path(READINGS).read_text().splitlines()
        data.write_text("\n".join(lines[:3]) + "\n")
        out = tmp_path / "report.csv"
        rc = main(["simulate", "--network", NET, "--discretizer", DISC,
                   "--data", str(data), "--criterion", "sigma", "--k", "3",
                   "--seed", "4", "--out", str(out)])
        assert rc == 0
        text = out.read_text().splitlines()
        assert text[0] == ("criterion,severity,type1_count,type1_rate,"
                           "type2_count,type2_rate")
        assert len(text) == 3

    def test_simulate_severity_filter(self, tmp_path):
        data = tmp_path / "rows.csv"
        lines = Path(READINGS).read_text().splitlines()
        data.write_text("\n".join(lines[:2]) + "\n")
        out = tmp_path / "report.csv"
        rc = main(["simulate", "--network", NET, "--discretizer", DISC,
                   "--data", str(data), "--severity", "severe",
                   "--seed", "4", "--out", str(out)])
        assert rc == 0
        rows = out.read_text().splitlines()[1:]
        assert len(rows) == 1 and rows[0].split(",")[1] == "severe"

    def test_simulate_empty_test_set(self, tmp_path):
        data = tmp_path / "rows.csv"
        data.write_text("a,g,m,p,t\n")
        out = tmp_path / "report.csv"
        rc = main(["simulate", "--network", NET, "--discretizer", DISC,
                   "--data", str(data), "--seed", "4", "--out", str(out)])
        assert rc == 0
        rows = out.read_text().splitlines()
        assert rows[1].endswith("0,0.000000,0,0.000000")

    def test_simulate_deterministic(self, tmp_path):
        data = tmp_path / "rows.csv"
        lines = Path(READINGS).read_text().splitlines()
        data.write_text("\n".join(lines[:3]) + "\n")
        outs = []
        for name in ("r1.csv", "r2.csv"):
            out = tmp_path / name
            rc = main(["simulate", "--network", NET, "--discretizer", DISC,
                       "--data", str(data), "--seed", "9", "--out", str(out)])
            assert rc == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_compare_profiles(self, tmp_path):
        data = tmp_path / "rows.csv"
        lines = Path(READINGS).read_text().splitlines()
        data.write_text("\n".join(lines[:6]) + "\n")
        out = tmp_path / "profile.csv"
        rc = main(["compare", "--network", NET, "--discretizer", DISC,
                   "--data", str(data), "--experiments", "6", "--seed", "2",
                   "--out", str(out)])
        assert rc == 0
        rows = out.read_text().splitlines()
        assert rows[0] == "step,mean_quality_entropy,mean_quality_random"
        assert len(rows) == 6
        values = [row.split(",") for row in rows[1:]]
        assert [v[0] for v in values] == ["1", "2", "3", "4", "5"]
        assert float(values[0][1]) >= float(values[0][2])

    def test_compare_needs_rows(self, tmp_path, capsys):
        data = tmp_path / "rows.csv"
        data.write_text("a,g,m,p,t\n")
        rc = main(["compare", "--network", NET, "--discretizer", DISC,
                   "--data", str(data), "--experiments", "2",
                   "--out", str(tmp_path / "p.csv")])
        assert rc == 2
