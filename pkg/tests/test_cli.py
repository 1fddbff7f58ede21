import json
import os

import pytest

from icingplant.cli import main, shipped_path
from icingplant.engine import Trace
from icingplant.fitting import Dataset, load_predictor


def test_simulate_shipped_scenario(tmp_path, capsys):
    out = tmp_path / "trace.csv"
    rc = main(["simulate", "--out", str(out), "--format", "csv"])
    assert rc == 0
    trace = Trace.load_csv(str(out))
    assert len(trace) == 1201          # 1200 s at 1 s plus the initial row
    assert "wrote 1201 rows" in capsys.readouterr().out


def test_simulate_nonexistent_scenario(tmp_path, capsys):
    rc = main(["simulate", "--scenario", "/nope/missing.json",
               "--out", str(tmp_path / "t.csv")])
    assert rc == 2
    assert "not found" in capsys.readouterr().err


def test_simulate_malformed_scenario(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"duration_s": 100, "events": [{"t": 500, "action": "set_v_ts", "args": {"value_mps": 10}}]}')
    rc = main(["simulate", "--scenario", str(bad), "--out", str(tmp_path / "t.csv")])
    assert rc == 2
    err = capsys.readouterr().err
    assert "outside" in err


def test_simulate_runtime_halt_exit_1(tmp_path, capsys):
    # draining a thimble-sized tank halts mid-run
    cfg = json.load(open(shipped_path("paper_iv.config.json")))
    cfg["S1_m2"] = 0.002
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    sc = json.load(open(shipped_path("paper_iv.scenario.json")))
    sc["initial"]["water_setpoint_lph"] = 13.0
    sc_path = tmp_path / "sc.json"
    sc_path.write_text(json.dumps(sc))
    rc = main(["simulate", "--scenario", str(sc_path), "--config", str(cfg_path),
               "--out", str(tmp_path / "t.csv")])
    assert rc == 1
    assert "halted" in capsys.readouterr().err


def test_simulate_renders_figures(tmp_path):
    out = tmp_path / "trace.csv"
    figs = tmp_path / "figs"
    rc = main(["simulate", "--out", str(out), "--figures", str(figs)])
    assert rc == 0
    names = sorted(os.listdir(figs))
    assert "lwc.png" in names and "mvd.png" in names
    assert "water_valves.png" in names


def test_synthesize_then_describe(tmp_path, capsys):
    data = tmp_path / "synth.csv"
    rc = main(["synthesize", "--n", "400", "--seed", "3", "--out", str(data)])
    assert rc == 0
    ds = Dataset.load_csv(str(data), provenance="synthetic")
    assert len(ds) == 400
    rc = main(["describe", "--data", str(data), "--reference"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "correlation matrix" in out
    assert "max |corr - reference|" in out


def test_describe_rejects_bad_schema(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b,c\n1,2,3\n")
    rc = main(["describe", "--data", str(bad)])
    assert rc == 2
    assert "header" in capsys.readouterr().err


def test_fit_polynomial_tn(tmp_path, capsys):
    data = tmp_path / "synth.csv"
    main(["synthesize", "--n", "1000", "--seed", "1", "--out", str(data)])
    model = tmp_path / "tn.model.json"
    rc = main(["fit", "--data", str(data), "--target", "T_n",
               "--model", "poly", "--out", str(model)])
    assert rc == 0
    pred = load_predictor(str(model))
    assert len(pred.terms) == 4        # intercept + three temperatures
    out = capsys.readouterr().out
    assert "MSE" in out
    assert "reference errors" in out   # published context, printed not gated


def test_fit_missing_target_column(tmp_path, capsys):
    data = tmp_path / "synth.csv"
    main(["synthesize", "--n", "100", "--seed", "1", "--out", str(data)])
    rc = main(["fit", "--data", str(data), "--target", "bogus",
               "--model", "poly", "--out", str(tmp_path / "m.json")])
    assert rc == 2
    assert "unknown target" in capsys.readouterr().err


def test_fit_tree_constant_target_single_leaf(tmp_path):
    data = tmp_path / "flat.csv"
    main(["synthesize", "--n", "60", "--seed", "2", "--out", str(data)])
    # overwrite the target column with a constant
    rows = open(data).read().splitlines()
    header = rows[0].split(",")
    t_n_col = header.index("T_n")
    fixed = [rows[0]]
    for line in rows[1:]:
        cells = line.split(",")
        cells[t_n_col] = "5.0"
        fixed.append(",".join(cells))
    open(data, "w").write("\n".join(fixed) + "\n")
    model = tmp_path / "tree.model.json"
    rc = main(["fit", "--data", str(data), "--target", "T_n",
               "--model", "tree", "--out", str(model)])
    assert rc == 0
    pred = load_predictor(str(model))
    assert pred.n_leaves() == 1


def test_fit_renders_figures(tmp_path):
    data = tmp_path / "synth.csv"
    main(["synthesize", "--n", "200", "--seed", "4", "--out", str(data)])
    figs = tmp_path / "figs"
    rc = main(["fit", "--data", str(data), "--target", "MVD",
               "--model", "poly", "--out", str(tmp_path / "m.json"),
               "--figures", str(figs)])
    assert rc == 0
    assert any(n.startswith("fit_MVD") for n in os.listdir(figs))


def test_describe_renders_correlation_figure(tmp_path):
    data = tmp_path / "synth.csv"
    main(["synthesize", "--n", "200", "--seed", "5", "--out", str(data)])
    figs = tmp_path / "figs"
    rc = main(["describe", "--data", str(data), "--figures", str(figs)])
    assert rc == 0
    assert "correlation.png" in os.listdir(figs)


def test_simulate_with_fitted_mvd_model(tmp_path):
    """A fitted model file plugs into the simulation in place of the
    built-in coefficients."""
    data = tmp_path / "synth.csv"
    main(["synthesize", "--n", "400", "--seed", "6", "--out", str(data)])
    model = tmp_path / "mvd.json"
    assert main(["fit", "--data", str(data), "--target", "MVD",
                 "--model", "poly", "--out", str(model)]) == 0
    out = tmp_path / "trace.csv"
    rc = main(["simulate", "--out", str(out), "--mvd-model", str(model)])
    assert rc == 0
    built_in = tmp_path / "trace_builtin.csv"
    assert main(["simulate", "--out", str(built_in)]) == 0
    a = Trace.load_csv(str(out))
    b = Trace.load_csv(str(built_in))
    assert a[600].mvd_um != b[600].mvd_um       # different predictor in play
    assert a[600].lwc_gm3 == b[600].lwc_gm3     # physics untouched


def test_simulate_missing_model_file(tmp_path, capsys):
    rc = main(["simulate", "--out", str(tmp_path / "t.csv"),
               "--tn-model", "/nope/model.json"])
    assert rc == 2
    assert "not found" in capsys.readouterr().err
