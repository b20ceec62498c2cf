import json

import jsonschema
import pytest

from seqemp.cli import load_config, main
from seqemp.limits import ks_quantile
from seqemp.report import dumps
from seqemp.schemas import SCHEMAS

SETAR_GEN = """\
[gen]
kind = setar
n = {n}
seed = {seed}

[setar]
mu1 = 0
mu2 = {mu2}
threshold = 0

[innovation]
kind = gaussian
sigma = 1.0
"""

REG_GEN = """\
[gen]
kind = regression
n = 200
seed = {seed}

[regression]
d = 1
regressor_law = uniform
{change}

[innovation]
kind = mds
"""

TEST_CFG = """\
[setar_test]
statistic = both
level = 0.05
seed = 5
cvm_reps = 2000
cvm_resolution = 256

[cpt_test]
seed = 6
reps = 500
s_resolution = 20
z_points = 20
"""


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


def _gen(tmp_path, text, name="data.csv"):
    cfg = _write(tmp_path, name + ".ini", text)
    out = str(tmp_path / name)
    assert main(["gen", "--config", cfg, "--out", out]) == 0
    return out


def _roundtrip(path, kind):
    text = open(path, encoding="utf-8").read()
    doc = json.loads(text)
    jsonschema.validate(doc, SCHEMAS[kind])
    assert dumps(doc) == text
    return doc


# ---------------------------------------------------------------- config


def test_config_value_typing(tmp_path):
    p = _write(tmp_path, "c.ini", "[a]\nn = 5\nx = 0.5\nkind = gaussian\nlst = [1, 2]\nnothing = null\n")
    assert load_config(p) == {"a": {"n": 5, "x": 0.5, "kind": "gaussian", "lst": [1, 2], "nothing": None}}
    j = _write(tmp_path, "c.json", json.dumps({"a": {"n": 5}}))
    assert load_config(j) == {"a": {"n": 5}}


def test_bad_config(tmp_path, capsys):
    p = _write(tmp_path, "bad.ini", "n = 5\n")
    assert main(["gen", "--config", p, "--out", str(tmp_path / "x.csv")]) == 1
    assert "error" in capsys.readouterr().err
    p = _write(tmp_path, "bad2.ini", "[gen]\nkind = setar\nn = 10\nseed = 1\nbogus = 3\n")
    assert main(["gen", "--config", p, "--out", str(tmp_path / "x.csv")]) == 1
    assert "bogus" in capsys.readouterr().err


# ---------------------------------------------------------------- gen


def test_gen_setar_rows_and_sidecar(tmp_path, capsys):
    out = _gen(tmp_path, SETAR_GEN.format(n=50, seed=1, mu2=0))
    lines = open(out).read().splitlines()
    assert lines[0] == "t,y" and len(lines) == 52
    side = _roundtrip(out + ".json", "gen-sidecar")
    assert side["seed"] == [1] and side["parameters"]["mu1"] == 0
    assert json.loads(capsys.readouterr().out) == side


def test_gen_byte_identical(tmp_path):
    a = _gen(tmp_path, SETAR_GEN.format(n=30, seed=2, mu2=1), "a.csv")
    b = _gen(tmp_path, SETAR_GEN.format(n=30, seed=2, mu2=1), "b.csv")
    assert open(a, "rb").read() == open(b, "rb").read()


def test_gen_missing_seed_names_field(tmp_path, capsys):
    text = SETAR_GEN.format(n=30, seed=2, mu2=1).replace("seed = 2\n", "")
    cfg = _write(tmp_path, "g.ini", text)
    assert main(["gen", "--config", cfg, "--out", str(tmp_path / "x.csv")]) == 1
    assert "'seed'" in capsys.readouterr().err
    # --seed supplies it
    assert main(["gen", "--config", cfg, "--seed", "4", "--out", str(tmp_path / "x.csv")]) == 0


def test_gen_regression(tmp_path):
    out = _gen(tmp_path, REG_GEN.format(seed=3, change=""))
    assert open(out).readline().strip() == "t,y,x1"


# ---------------------------------------------------------------- setar-test


def test_setar_constant_column_is_error(tmp_path, capsys):
    p = _write(tmp_path, "c.csv", "t,y\n" + "".join(f"{t},2.0\n" for t in range(20)))
    assert main(["setar-test", p, "--config", _write(tmp_path, "t.ini", TEST_CFG)]) == 1
    assert "constant" in capsys.readouterr().err


def test_setar_malformed_line(tmp_path, capsys):
    p = _write(tmp_path, "m.csv", "t,y\n0,1.0\n1,x\n")
    assert main(["setar-test", p]) == 1
    assert "line 3" in capsys.readouterr().err


def test_setar_strong_alternative_exit_2(tmp_path):
    data = _gen(tmp_path, SETAR_GEN.format(n=500, seed=7, mu2=2))
    out = str(tmp_path / "r.json")
    plot = str(tmp_path / "t.csv")
    code = main(["setar-test", data, "--config", _write(tmp_path, "t.ini", TEST_CFG), "--out", out,
                 "--plot-data", plot])
    assert code == 2
    doc = _roundtrip(out, "test-report")
    assert doc["decisions"] == {"T_n1": "reject", "T_n2": "reject"}
    assert open(plot).readline().strip() == "z,T_n"


def test_setar_null_mostly_exit_0(tmp_path):
    codes = []
    cfg = _write(tmp_path, "ks.ini", "[setar_test]\nstatistic = KS\n")
    for seed in range(20):
        data = _gen(tmp_path, SETAR_GEN.format(n=200, seed=seed, mu2=0), f"h{seed}.csv")
        codes.append(main(["setar-test", data, "--config", cfg, "--out", str(tmp_path / f"h{seed}.json")]))
    assert set(codes) <= {0, 2}
    assert codes.count(0) >= 16


def test_setar_reproducible(tmp_path):
    data = _gen(tmp_path, SETAR_GEN.format(n=100, seed=8, mu2=0))
    cfg = _write(tmp_path, "t.ini", TEST_CFG)
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    main(["setar-test", data, "--config", cfg, "--out", a])
    main(["setar-test", data, "--config", cfg, "--out", b, "--workers", "2"])
    assert open(a).read() == open(b).read()


# ---------------------------------------------------------------- cpt-test


def test_cpt_malformed(tmp_path, capsys):
    p = _write(tmp_path, "m.csv", "t,y,x1\n1,1.0\n")
    assert main(["cpt-test", p, "--config", _write(tmp_path, "t.ini", TEST_CFG)]) == 1
    assert "line 2" in capsys.readouterr().err


def test_cpt_shift_exit_2_and_null_exit_0(tmp_path):
    cfg = _write(tmp_path, "t.ini", TEST_CFG)
    shifted = _gen(tmp_path, REG_GEN.format(seed=9, change="change_fraction = 0.5\n\n[mean_fn_after]\n"
                                                        "kind = constant\nlevel = 1.5"), "s.csv")
    out = str(tmp_path / "s.json")
    plot = str(tmp_path / "b.csv")
    assert main(["cpt-test", shifted, "--config", cfg, "--out", out, "--plot-data", plot]) == 2
    doc = _roundtrip(out, "test-report")
    assert 0.35 <= doc["locator"]["argmax_s"] <= 0.65
    assert open(plot).readline().strip() == "s,z,value"
    null = _gen(tmp_path, REG_GEN.format(seed=10, change=""), "n.csv")
    assert main(["cpt-test", null, "--config", cfg, "--out", str(tmp_path / "n.json")]) == 0


def test_cpt_workers_do_not_change_output(tmp_path):
    cfg = _write(tmp_path, "t.ini", TEST_CFG)
    data = _gen(tmp_path, REG_GEN.format(seed=11, change=""))
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    main(["cpt-test", data, "--config", cfg, "--out", a])
    main(["cpt-test", data, "--config", cfg, "--out", b, "--workers", "2"])
    assert open(a).read() == open(b).read()


def test_cpt_missing_seed(tmp_path, capsys):
    data = _gen(tmp_path, REG_GEN.format(seed=12, change=""))
    assert main(["cpt-test", data]) == 1
    assert "'seed'" in capsys.readouterr().err


# ---------------------------------------------------------------- verify


def test_verify_entropy_value_six(tmp_path):
    cfg = _write(tmp_path, "v.ini", "[entropy]\nQ = 6\ngamma = 2\nd = 2\n")
    out = str(tmp_path / "e.json")
    plot = str(tmp_path / "e.csv")
    assert main(["verify", "entropy", "--config", cfg, "--out", out, "--plot-data", plot]) == 0
    doc = _roundtrip(out, "verify-report")
    a2 = doc["result"]["A2"]
    assert a2["pass"] and a2["value"] == pytest.approx(6.0, rel=1e-12)
    assert open(plot).readline().strip() == "condition,pass,value"


def test_verify_moment_zero(tmp_path):
    cfg = _write(tmp_path, "v.ini", "[moment]\ngen = zero\nQ = 2\nn_list = [4, 8]\nreps = 10\nseed = 1\n")
    out = str(tmp_path / "m.json")
    assert main(["verify", "moment", "--config", cfg, "--out", out]) == 0
    assert _roundtrip(out, "verify-report")["result"]["ratio"] == [0.0, 0.0]


def test_verify_modulus_empty_flag(tmp_path):
    cfg = _write(tmp_path, "v.ini", "[modulus]\nQ = 4\ngamma = 2\ndelta_list = [0.01]\nn_list = [32]\n"
                                    "reps = 5\nseed = 2\nz_points = 4\n")
    out = str(tmp_path / "m.json")
    plot = str(tmp_path / "m.csv")
    assert main(["verify", "modulus", "--config", cfg, "--out", out, "--plot-data", plot]) == 0
    assert _roundtrip(out, "verify-report")["result"]["empty_pair_set"] == [True]
    assert open(plot).readline().strip() == "delta,n,M,se"


def test_verify_fidi(tmp_path):
    cfg = _write(tmp_path, "v.ini", "[fidi]\nkind = gaussian\nn = 100\nreps = 200\nseed = 3\n")
    out = str(tmp_path / "f.json")
    assert main(["verify", "fidi", "--config", cfg, "--out", out]) == 0
    assert _roundtrip(out, "verify-report")["result"]["target"][0][1] == pytest.approx(0.09)


# ---------------------------------------------------------------- quantiles


def test_quantiles_command(tmp_path):
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    args = ["quantiles", "--functional", "ks", "--levels", "0.9,0.95,0.99", "--reps", "20000",
            "--resolution", "2000", "--seed", "3"]
    assert main(args + ["--out", a]) == 0
    assert main(args + ["--out", b]) == 0
    doc = _roundtrip(a, "quantile-table")
    assert open(a).read() == open(b).read()
    assert doc["quantiles"] == sorted(doc["quantiles"])
    assert abs(doc["quantiles"][1] - ks_quantile(0.95)) < 0.02


def test_quantiles_needs_seed(tmp_path, capsys):
    assert main(["quantiles", "--functional", "cvm", "--reps", "1000"]) == 1
    assert "'seed'" in capsys.readouterr().err


def test_cli_module_entry_point(tmp_path):
    import subprocess
    import sys

    r = subprocess.run([sys.executable, "-m", "seqemp", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and "seqemp" in r.stdout
