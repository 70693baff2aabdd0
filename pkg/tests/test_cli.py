import json
import subprocess
import sys

import numpy as np
import pytest

from klooster.cli import CSV_HEADER, ConfigError, ExperimentConfig, emit_csv, main, resolve_config
from klooster.kloosterman import partial_sums
from klooster.multipliers import MultiplierSpec

PARTIAL = ["partial", "--multiplier", "eta", "--conjugate", "--twist", "3", "--level", "3",
           "--m", "0", "--n", "1"]


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_config_json_round_trip():
    cfg = ExperimentConfig(command="partial", twist=-3, conjugate=True, level=3, xmax=500,
                           sample="dyadic", workers=2, delta=0.25)
    assert ExperimentConfig.from_json(cfg.to_json()) == cfg
    assert ExperimentConfig.from_json(ExperimentConfig().to_json()) == ExperimentConfig()
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"bogus": 1})


def test_precedence(tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"command": "partial", "xmax": 99, "level": 3, "twist": 3,
                                "conjugate": True, "workers": 3}))
    cfg, _ = resolve_config(["partial", "--config", str(conf), "--xmax", "120"])
    assert cfg.xmax == 120          # flag beats file
    assert cfg.workers == 3         # file beats default
    assert cfg.m == 0               # default
    assert cfg.multiplier() == MultiplierSpec.mock_theta_gamma()


def test_twist_three_means_character_mod_three():
    cfg = ExperimentConfig(command="sum", twist=3, conjugate=True, level=3, c=3)
    assert cfg.multiplier().twist == -3


def test_exact_emits_one_record(capsys):
    code, out, _ = run(["exact", "--n", "5", "--cutoff", "3000"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 1
    rec = json.loads(lines[0])
    assert rec["config"]["n"] == 5 and rec["config"]["cutoff"] == 3000
    assert rec["result"]["nearest_int"] == -2
    assert set(rec["result"]) == {"n", "cutoff", "value", "imag", "nearest_int", "distance",
                                  "last_decade_mass"}


def test_partial_csv(tmp_path, capsys):
    out = tmp_path / "p.csv"
    code, _, _ = run(PARTIAL + ["--xmax", "3000", "--dyadic", "-o", str(out)], capsys)
    assert code == 0
    rows = out.read_text().splitlines()
    assert rows[0] == CSV_HEADER
    assert [int(r.split(",")[0]) for r in rows[1:]] == [3, 6, 12, 24, 48, 96, 192, 384, 768,
                                                        1536, 3000]
    side = json.loads((tmp_path / "p.csv.json").read_text())
    assert side["xmax"] == 3000 and side["sample"] == "dyadic"


def test_partial_warm_cache_byte_identical(tmp_path, capsys):
    cache = tmp_path / "cache.csv"
    a, b, c = (tmp_path / f"{x}.csv" for x in "abc")
    assert run(PARTIAL + ["--xmax", "1500", "--cache", str(cache), "-o", str(a)], capsys)[0] == 0
    assert run(PARTIAL + ["--xmax", "1500", "--cache", str(cache), "-o", str(b)], capsys)[0] == 0
    assert run(PARTIAL + ["--xmax", "1500", "--workers", "3", "-o", str(c)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()


def test_emit_csv_rows_and_empty(tmp_path):
    empty = partial_sums(MultiplierSpec.mock_theta_gamma(), 0, 1, 2)
    assert emit_csv(empty, tmp_path / "e.csv") == CSV_HEADER + "\n"
    assert (tmp_path / "e.csv").read_text() == CSV_HEADER + "\n"
    s = partial_sums(MultiplierSpec.mock_theta_gamma(), 0, 1, 300)
    text = emit_csv(s)
    assert len(text.splitlines()) == len(s) + 1
    back = np.array([[float(v) for v in row.split(",")] for row in text.splitlines()[1:]])
    assert np.array_equal(back[:, 1] + 1j * back[:, 2], s.s)
    assert np.array_equal(back[:, 3] + 1j * back[:, 4], s.running)


def test_emit_csv_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    s = partial_sums(MultiplierSpec.mock_theta_gamma(), 0, 1, 30)
    with pytest.raises(OSError, match="file"):
        emit_csv(s, blocker / "sub" / "p.csv")


def test_sum_window_tail_phi(capsys):
    code, out, _ = run(["sum", "--multiplier", "trivial", "--m", "1", "--n", "1", "--c", "7"], capsys)
    assert code == 0 and json.loads(out)["result"]["term_count"] == 6
    code, out, _ = run(["window"] + PARTIAL[1:] + ["--y", "1000", "--x", "2000"], capsys)
    assert code == 0 and json.loads(out)["result"]["count"] == 333
    code, out, _ = run(["tail"] + PARTIAL[1:] + ["--cmax", "300", "--kind", "I", "--beta", "3/2"], capsys)
    assert code == 0 and json.loads(out)["result"]["terms"] > 0
    code, out, _ = run(["phi", "--a", "1", "--x", "10", "--transform", "hat", "--r", "0.5"], capsys)
    assert code == 0 and "value" in json.loads(out)["result"]


def test_exit_invalid_config(capsys):
    code, _, err = run(["sum", "--twist", "3", "--level", "4", "--c", "4"], capsys)
    assert code == 2
    rec = json.loads(err)
    assert rec["error"] == "invalid_config" and rec["exit_code"] == 2
    assert run(["partial", "--level", "3"], capsys)[0] == 2          # missing --xmax
    assert run(["window", "--y", "1900", "--x", "2000"], capsys)[0] == 2


def test_exit_regime(capsys):
    code, _, err = run(["phi", "--a", "100", "--x", "4", "--profile", "linear",
                        "--transform", "hat", "--r", "1"], capsys)
    assert code == 3
    assert json.loads(err)["error"] == "numeric_regime"


def test_exit_cache_corruption(tmp_path, capsys):
    cache = tmp_path / "cache.csv"
    run(PARTIAL + ["--xmax", "30", "--cache", str(cache)], capsys)
    with cache.open("a") as fh:
        fh.write("garbage\n")
    code, _, err = run(PARTIAL + ["--xmax", "30", "--cache", str(cache)], capsys)
    assert code == 4
    rec = json.loads(err)
    assert rec["line"] == 11 and rec["path"] == str(cache)


def test_env_cache_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("KLOOSTER_CACHE_DIR", str(tmp_path))
    run(PARTIAL + ["--xmax", "60"], capsys)
    assert (tmp_path / "sums.csv").exists()


def test_verify_quick_subprocess(tmp_path):
    out = tmp_path / "v.json"
    proc = subprocess.run([sys.executable, "-m", "klooster", "verify", "--quick", "-o", str(out)],
                          capture_output=True, text=True, timeout=600,
                          env={"KLOOSTER_CACHE_DIR": str(tmp_path), "PATH": ""})
    lines = proc.stdout.splitlines()
    assert lines[0].startswith("check")
    assert len(lines) == 9
    results = json.loads(out.read_text())["result"]
    assert [r["name"][0] for r in results] == list("12345678")
    assert proc.returncode == (0 if all(r["passed"] for r in results) else 1)
