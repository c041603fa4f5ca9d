import csv
import json

import numpy as np
import pytest

from oracles import full_adder_rows
from qca_forge import cli
from qca_forge import logic_core as lc
from qca_forge.logic_core import TruthSpec


def _run(*argv):
    return cli.main([str(a) for a in argv])


def test_report_lists_computed_and_published_columns(capsys, tmp_path):
    assert _run("report", "fa", "--out", tmp_path) == 0
    printed = capsys.readouterr().out.splitlines()
    assert printed[0].split()[:4] == ["design", "cell_count", "area_um2", "delay_zones"]
    rows = list(csv.DictReader((tmp_path / "report.csv").open()))
    assert len(rows) == 1
    row = rows[0]
    assert row["design"] == "fa"
    assert (row["delay_zones"], row["maj_count"], row["not_count"]) == ("3", "3", "2")
    assert row["published_cell_count"] == "48"


def test_empty_report_is_just_a_header(capsys):
    assert _run("report") == 0
    assert len(capsys.readouterr().out.strip().splitlines()) == 1


def test_report_all_covers_every_circuit(capsys):
    assert _run("report", "all") == 0
    names = [line.split()[0] for line in capsys.readouterr().out.splitlines()[1:]]
    assert names == ["fa", "fas", "fa5", "ripple8", "ripple8_sub"]


def test_unknown_design_exits_2(capsys):
    assert _run("report", "fa9") == 2
    assert "unknown design" in capsys.readouterr().err


def test_synth_round_trip(tmp_path):
    path = tmp_path / "net.json"
    assert _run("synth", "--circuit", "fas", "--out", path) == 0
    net = lc.load_json(path)
    assert net.output_names == ("Cout", "Sum/Sub", "Bout", "Gar1")


def _save(spec, path):
    lc.save_json(spec, path)
    return path


def test_reversibilize_adds_two_columns_to_the_adder(tmp_path):
    irrev = TruthSpec.from_function(("a", "b", "c_in"), ("Cout", "Sum"), lambda a, b, c: full_adder_rows()[a * 4 + b * 2 + c])
    src = _save(irrev, tmp_path / "adder.json")
    assert _run("reversibilize", src, "--out", tmp_path) == 0
    rev = lc.load_json(tmp_path / "adder.reversible.json")
    assert rev.output_names == ("Cout", "Sum", "Gar1", "Gar2")
    assert len({tuple(r) for r in rev.rows.tolist()}) == 8
    steps = list(csv.reader((tmp_path / "adder.steps.csv").open()))
    assert len(steps) == 3


def test_reversibilize_injective_input_logs_no_steps(tmp_path):
    ident = TruthSpec.from_function(("x", "y"), ("y", "x"), lambda x, y: (y, x))
    src = _save(ident, tmp_path / "swap.json")
    assert _run("reversibilize", src, "--out", tmp_path) == 0
    assert lc.load_json(tmp_path / "swap.reversible.json") == ident
    assert len(list(csv.reader((tmp_path / "swap.steps.csv").open()))) == 1


def test_reversibilize_and2(tmp_path):
    src = _save(TruthSpec.from_function(("x", "y"), ("z",), lambda x, y: (x & y,)), tmp_path / "and2.json")
    assert _run("reversibilize", src, "--out", tmp_path) == 0
    assert lc.load_json(tmp_path / "and2.reversible.json").n_outputs == 3


@pytest.mark.parametrize("text", ["{bad", '{"inputs": ["a"], "outputs": ["f"], "rows": ["0"]}', "[]"])
def test_malformed_spec_exits_nonzero(tmp_path, capsys, text):
    bad = tmp_path / "bad.json"
    bad.write_text(text)
    assert _run("reversibilize", bad, "--out", tmp_path) == 2
    assert capsys.readouterr().err


def test_missing_file_exits_nonzero(tmp_path):
    assert _run("sim", "--layout", tmp_path / "nope.json", "--spec", tmp_path / "nope.json") == 2


def test_invalid_circuit_is_a_usage_error():
    with pytest.raises(SystemExit) as exc:
        _run("pipeline", "fa7")
    assert exc.value.code == 2


@pytest.mark.parametrize("circuit", ["fa", "fa5"])
def test_pipeline_passes_and_writes_every_artifact(tmp_path, circuit, capsys):
    out = tmp_path / circuit
    assert _run("pipeline", circuit, "--out", out) == 0
    assert "PASS" in capsys.readouterr().out
    for name in ("net.json", "spec.json", "layout.json", "waveform.csv", "verdict.json", "metrics.json"):
        assert (out / name).exists()
    verdict = json.loads((out / "verdict.json").read_text())
    assert verdict["passed"] and verdict["exhaustive"] and verdict["vectors"] == 8
    assert verdict["waveform_decodes_correctly"]


def test_pipeline_waveform_holds_each_output_column(tmp_path):
    out = tmp_path / "fa"
    _run("pipeline", "fa", "--out", out)
    header = next(csv.reader((out / "waveform.csv").open()))
    assert header[:5] == ["sample", "clock0", "clock1", "clock2", "clock3"]
    assert {"a", "b", "c_in", "Cout", "Sum", "Gar1", "Gar2"} <= set(header)


def test_layout_then_sim(tmp_path, capsys):
    lay = tmp_path / "maj5.json"
    assert _run("layout", "--circuit", "maj5", "--out", lay) == 0
    spec = TruthSpec.from_function(("B", "A", "C", "D", "E"), ("out",), lambda *v: (int(sum(v) >= 3),))
    src = _save(spec, tmp_path / "m5spec.json")
    assert _run("sim", "--layout", lay, "--spec", src, "--out", tmp_path) == 0
    assert "PASS 32 vectors" in capsys.readouterr().out


def test_sim_failure_exits_1(tmp_path):
    lay = tmp_path / "maj3.json"
    _run("layout", "--circuit", "maj3", "--out", lay)
    wrong = TruthSpec.from_function(("A", "B", "C"), ("out",), lambda a, b, c: (a & b & c,))
    assert _run("sim", "--layout", lay, "--spec", _save(wrong, tmp_path / "w.json"), "--out", tmp_path) == 1


def test_fault_sweep_writes_reports(tmp_path, capsys):
    lay = tmp_path / "and3.json"
    _run("layout", "--circuit", "and3", "--out", lay)
    assert _run("fault-sweep", "--layout", lay, "--cell", "B", "--dirs", "E", "--max", "4", "--out", tmp_path) == 0
    assert "not possible" in capsys.readouterr().out
    summary = json.loads((tmp_path / "fault_B.json").read_text())
    assert summary["directions"]["E"]["not_possible"] is True


def test_sampled_runs_are_seeded(tmp_path):
    """Two runs with the same seed produce identical verdicts and waveforms."""
    from qca_forge import adder_lib as al
    from qca_forge import qca_layout as ql

    spec = lc.to_truth_spec(al.circuit("ripple8"))
    lay = ql.gen_circuit("ripple8")
    one = cli.simulate_and_verify(lay, spec, tmp_path, "landauer", 4, 7, waveform_vectors=2)
    wave_one = (tmp_path / "waveform.csv").read_bytes()
    two = cli.simulate_and_verify(lay, spec, tmp_path, "landauer", 4, 7, waveform_vectors=2)
    assert one == two and wave_one == (tmp_path / "waveform.csv").read_bytes()
    assert one["passed"] and one["seed"] == 7 and not one["exhaustive"]
    assert np.array_equal(cli._vectors(17, 4, 7), cli._vectors(17, 4, 7))
