import csv
import io
import json
import subprocess
import sys

import pytest

from cli_cases import SUBCOMMANDS, VARIANTS, make_config, run_bytes, threads
from gaugekit import cli
from gaugekit.cli import OP_COVERAGE, emit_plot_data, main, run


def load(cfg):
    code, data, _, err = run_bytes(cfg)
    assert code == 0, err
    return json.loads(data)["result"]


def test_k3_example(tmp_path):
    res = load({"cmd": "sw-dim", "c1sq": 0, "chi": 24, "sigma": -16, "output": str(tmp_path / "k3.json")})
    assert res == {"d": 0, "ind_dirac": 2}


def test_chern_c1_example(tmp_path):
    res = load({"cmd": "chern-c1", "N": 8, "flux": 3, "output": str(tmp_path / "c1.json")})
    assert res["rounded"] == 3 and res["residual"] < 1e-9


@pytest.mark.parametrize(
    "cfg",
    [
        {"cmd": "chern-c1", "N": 8, "flux": 3, "bogus": 1},
        {"cmd": "chern-c1", "N": "eight"},
        {"cmd": "sw-dim", "c1sq": 0, "chi": 24},
        {"cmd": "no-such-command"},
        {"cmd": "dirac-spectrum", "format": "xml"},
        {"cmd": "cs-value", "grid": [2, 4, 4]},
    ],
)
def test_malformed_config_exit_3(tmp_path, cfg):
    cfg = dict(cfg, output=str(tmp_path / "out.json"))
    code, data, out, err = run_bytes(cfg)
    assert code == 3 and data is None and out == ""
    assert json.loads(err)["kind"] == "config"


def test_non_object_config(tmp_path):
    err = io.StringIO()
    assert run([1, 2], stderr=err) == 3


def test_numerical_failure_exit_2(tmp_path):
    cfg = {"cmd": "dirac-spectrum", "N": 12, "d": 3, "r": 1.0, "output": str(tmp_path / "s.json")}
    code, data, _, err = run_bytes(cfg)
    assert code == 2 and data is None
    assert json.loads(err)["error"] == "NoSpectralGap"


def test_bad_thread_count(tmp_path):
    with threads("many"):
        code, _, _, err = run_bytes({"cmd": "sw-dim", "c1sq": 0, "chi": 0, "sigma": 0, "output": str(tmp_path / "x")})
    assert code == 3


def test_emit_plot_data(tmp_path):
    hist = [(k, 1.0 / (k + 1)) for k in range(5)]
    text = emit_plot_data(hist, tmp_path / "h.csv")
    rows = list(csv.reader(io.StringIO((tmp_path / "h.csv").read_text())))
    assert text == (tmp_path / "h.csv").read_text()
    assert rows[0] == ["x", "y"] and len(rows) == 6
    assert float(rows[3][1]) == 1.0 / 3  # repr round trip
    assert emit_plot_data([], tmp_path / "e.csv") == "x,y\n"
    with pytest.raises(OSError):
        emit_plot_data(hist, tmp_path / "missing" / "h.csv")


def test_spectrum_csv_has_chirality_column(tmp_path):
    cfg = {"cmd": "dirac-spectrum", "N": 8, "d": 1, "r": 0.5, "k": 6, "format": "csv", "output": str(tmp_path / "s.csv")}
    code, data, _, _ = run_bytes(cfg)
    rows = list(csv.reader(io.StringIO(data.decode())))
    assert code == 0 and len(rows) == 7
    assert rows[0] == ["mode", "abs_eigenvalue", "chirality"]
    assert all(-1.0 <= float(r[2]) <= 1.0 for r in rows[1:])


def test_flow_csv_series(tmp_path):
    code, data, _, _ = run_bytes(make_config("flow", tmp_path))
    rows = list(csv.reader(io.StringIO(data.decode())))
    energies = [float(r[1]) for r in rows[1:]]
    assert code == 0 and rows[0] == ["step", "energy"]
    assert all(b <= a for a, b in zip(energies, energies[1:]))


def test_schema_rejects_unknown_keys_everywhere():
    for cmd in SUBCOMMANDS:
        schema = cli.config_schema(cmd)
        assert schema["additionalProperties"] is False


def _called_codes(cfg):
    seen = set()

    def prof(frame, event, arg):
        if event == "call":
            seen.add(frame.f_code)

    sys.setprofile(prof)
    try:
        code, _, _, err = run_bytes(cfg)
    finally:
        sys.setprofile(None)
    assert code == 0, err
    return seen


def test_every_operation_reached_from_its_subcommand(tmp_path):
    assert set(OP_COVERAGE.values()) <= set(SUBCOMMANDS)
    # a dict keyed by function maps each operation to exactly one subcommand
    assert len(OP_COVERAGE) == len({f.__qualname__ + f.__module__ for f in OP_COVERAGE})
    by_cmd = {}
    for fn, cmd in OP_COVERAGE.items():
        by_cmd.setdefault(cmd, []).append(fn)
    with threads(1):
        for cmd, fns in by_cmd.items():
            seen = set()
            for extra in [{}] + VARIANTS.get(cmd, []):
                seen |= _called_codes(make_config(cmd, tmp_path, light=True, **extra))
            missing = [f.__name__ for f in fns if f.__code__ not in seen]
            assert not missing, f"{cmd} never calls {missing}"


@pytest.mark.parametrize("cmd", ["chern-c1", "hopf", "flow", "sw-descent", "repvar-solve", "dirac-index", "degree"])
def test_bit_identical_outputs(tmp_path, cmd):
    outs = []
    for n in (1, 1, 4):
        with threads(n):
            code, data, out, _ = run_bytes(make_config(cmd, tmp_path, light=True))
        assert code == 0
        outs.append((data, out))
    assert outs[0] == outs[1] == outs[2]


def test_main_entry_point(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"cmd": "sw-dim", "c1sq": 9, "chi": 3, "sigma": 1, "output": "ignored"}))
    target = tmp_path / "cp2.json"
    assert main([str(cfg_path), "--output", str(target)]) == 0
    assert json.loads(target.read_text())["result"]["d"] == 0
    assert "sw-dim" in capsys.readouterr().out
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main([str(bad)]) == 3


def test_console_script(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"cmd": "chern-c2", "m12": 1, "m34": 1, "output": str(tmp_path / "c2.json")}))
    proc = subprocess.run([sys.executable, "-m", "gaugekit.cli", str(cfg)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert json.loads((tmp_path / "c2.json").read_text())["result"]["rounded"] == -2
