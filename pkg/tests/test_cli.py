from __future__ import annotations

import json

import numpy as np
import pytest

from distorder.cli import EXIT_DOMAIN, EXIT_INPUT, EXIT_OK, EXIT_VERIFY, RunConfig, main
from distorder.errors import ConfigurationError


def write_function(path, f, n=64, T=1.0):
    t = np.linspace(0.0, T, n + 1)
    path.write_text("t,value\n" + "".join(f"{a:.17g},{b:.17g}\n" for a, b in zip(t, f(t))))
    return path


def read_csv(path):
    lines = path.read_text().strip().split("\n")
    return lines[0].split(","), np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])


def test_kernel_rows(tmp_path):
    out = tmp_path / "k.csv"
    assert main(["kernel", "--s", "0.5,1,2.718281828459045", "--out", str(out)]) == EXIT_OK
    header, rows = read_csv(out)
    assert header == ["s", "k", "k_prime", "K", "L"]
    assert rows[1, 4] == pytest.approx(1.0, rel=1e-14)
    assert rows[2, 4] == pytest.approx(1.718282, rel=1e-6)
    assert np.all(np.diff(rows[:, 1]) < 0)


def test_output_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["kappa", "--t", "0.1,0.5", "--out", str(a)])
    main(["kappa", "--t", "0.1,0.5", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
    _, rows = read_csv(a)
    assert rows[0, 1] > rows[1, 1]


def test_deriv_constant_and_compare_all(tmp_path, capsys):
    src = write_function(tmp_path / "c.csv", lambda t: 0 * t + 2.0)
    out = tmp_path / "d.csv"
    assert main(["deriv", str(src), "--method", "def4", "--out", str(out)]) == EXIT_OK
    _, rows = read_csv(out)
    assert np.max(np.abs(rows[:, 1])) < 1e-6

    src = write_function(tmp_path / "q.csv", lambda t: t**2, n=1024)
    assert main(["deriv", str(src), "--compare-all", "--out", str(out)]) == EXIT_OK
    header, rows = read_csv(out)
    assert header == ["t", "conv", "spectral", "bp", "def4"]
    report = json.loads(capsys.readouterr().err)
    assert max(report["max_relative_deviation"].values()) <= 1e-2


def test_deriv_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n0,1\n")
    assert main(["deriv", str(bad)]) == EXIT_INPUT
    src = write_function(tmp_path / "one.csv", lambda t: 1 + t)
    assert main(["deriv", str(src), "--method", "bp"]) == EXIT_DOMAIN
    assert main(["deriv", str(tmp_path / "missing.csv")]) == EXIT_INPUT


def test_integ(tmp_path):
    src = write_function(tmp_path / "one.csv", lambda t: 1 + 0 * t, n=16)
    out = tmp_path / "i.csv"
    assert main(["integ", str(src), "--out", str(out)]) == EXIT_OK
    _, rows = read_csv(out)
    assert rows[0, 1] == 0 and np.all(np.diff(rows[:, 1]) > 0)


@pytest.mark.parametrize("lam", [0.0, -1.0, 1.0])
def test_solve(tmp_path, lam):
    out = tmp_path / "u.csv"
    assert main(["solve", "--lambda", str(lam), "--grid-n", "64", "--out", str(out)]) == EXIT_OK
    _, rows = read_csv(out)
    u = rows[:, 1]
    if lam == 0:
        assert np.all(u == 1)
    elif lam < 0:
        assert np.all(np.diff(u) < 0) and np.all(u > 0)
    else:
        assert np.all(np.diff(u) > 0)


def test_solve_step_too_large():
    assert main(["solve", "--lambda", "1e4", "--grid-n", "4"]) == EXIT_DOMAIN


def test_contour_dump(tmp_path):
    out = tmp_path / "c.csv"
    assert main(["contour-dump", "--s", "0.5", "--out", str(out)]) == EXIT_OK
    header, rows = read_csv(out)
    assert header == ["re_z", "im_z", "re_w", "im_w"]
    assert np.allclose(rows[:, 1], -rows[::-1, 1])


def test_verify_default(tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify", "--out", str(out)]) == EXIT_OK
    report = json.loads(out.read_text())
    assert report["passed"] and set(report["suites"]) == {"kernels", "contour", "gridops", "funcalc"}


def test_verify_tight_tolerance(tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify", "--tolerance", "1e-9", "--out", str(out)]) == EXIT_VERIFY
    report = json.loads(out.read_text())
    assert "four_way_agreement" in report["failed"]


def test_verify_inadmissible_weight(capsys):
    assert main(["verify", "--weight", "bump"]) == EXIT_INPUT
    assert "μ(1)=0" in capsys.readouterr().err


def test_config_precedence(tmp_path):
    cfg_file = tmp_path / "run.json"
    cfg_file.write_text(json.dumps({"grid": {"n": 32, "T": 2.0}, "weight": {"kind": "constant", "c": 2}}))
    out = tmp_path / "u.csv"
    assert main(["solve", "--lambda", "0", "--config", str(cfg_file), "--grid-n", "8", "--out", str(out)]) == 0
    _, rows = read_csv(out)
    assert rows.shape[0] == 9 and rows[-1, 0] == 2.0


def test_config_validation(tmp_path):
    with pytest.raises(ConfigurationError):
        RunConfig.from_dict({"grid": {"n": 1}})
    with pytest.raises(ConfigurationError):
        RunConfig.from_dict({"colour": "blue"})
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"contour": {"omega": 0.3}}))
    assert main(["kernel", "--config", str(bad)]) == EXIT_INPUT


def test_weight_flag_json(tmp_path):
    out = tmp_path / "k.csv"
    assert main(["kernel", "--s", "2.718281828459045", "--weight", '{"kind":"power_at_zero","a":1,"nu":1}', "--out", str(out)]) == 0
    _, rows = read_csv(out)
    assert rows[0, 4] == pytest.approx(1.0, rel=1e-13)


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == EXIT_INPUT
