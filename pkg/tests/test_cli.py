import json
from fractions import Fraction

import pytest

from weiltransfer.cli import (generate_random_phi, load_config, main,
                              parse_quadspace, run_job)
from weiltransfer.errors import ConfigError
from weiltransfer.padic import valuation

SPLIT4 = {"p": 3, "dim": 4, "kind": "split"}


def write_json(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def test_density_basic(tmp_path, capsys):
    cfg = write_json(tmp_path, "job.json",
                     {"quadspace": SPLIT4, "phi": "basic",
                      "grid": {"a": ["1"]}})
    rc = main(["density", "--config", cfg])
    out = capsys.readouterr().out
    assert rc == 0
    report = json.loads(out)
    assert report["suite"] == "density"
    case = report["cases"][0]
    assert case["value"] == "8/9"
    assert case["certified"] is True
    assert case["stabilized_at"] >= 1


def test_toml_config_and_out_file(tmp_path):
    path = tmp_path / "job.toml"
    path.write_text('[quadspace]\np = 3\ndim = 4\nkind = "split"\n'
                    '[grid]\na = ["1"]\n')
    out = tmp_path / "report.json"
    rc = main(["density", "--config", str(path), "--out", str(out)])
    assert rc == 0
    report = json.loads(out.read_text())
    assert report["pass"] is True


def test_verify_transfer_suite(tmp_path, capsys):
    cfg = write_json(tmp_path, "job.json",
                     {"quadspace": SPLIT4, "phi": "basic",
                      "grid": {"a": ["1", "3", "1/3"]}})
    rc = main(["verify-transfer", "--config", cfg])
    report = json.loads(capsys.readouterr().out)
    assert rc == 0 and report["pass"]
    for case in report["cases"]:
        assert case["equal"] is True
        assert case["lhs"]["exact"] == case["rhs"]["exact"]
        assert case["levels"]["n"] >= 1
    # deterministic modulo timing
    main(["verify-transfer", "--config", cfg])
    again = json.loads(capsys.readouterr().out)

    def strip(rep):
        return [{k: v for k, v in c.items() if k != "ms"}
                for c in rep["cases"]]
    assert strip(report) == strip(again)


def test_verify_transfer_random_phi(tmp_path, capsys):
    cfg = write_json(tmp_path, "job.json",
                     {"quadspace": SPLIT4,
                      "phi": {"random": {"count": 2, "seed": 11,
                                         "cells": 2}},
                      "grid": {"a": ["1", "3"]}})
    rc = main(["verify-transfer", "--config", cfg])
    report = json.loads(capsys.readouterr().out)
    assert rc == 0 and report["pass"]
    assert len(report["cases"]) == 4


def test_verify_fl_suite(tmp_path, capsys):
    cfg = write_json(tmp_path, "job.json",
                     {"quadspace": SPLIT4, "grid": {"a": ["1", "3", "1/3"]}})
    rc = main(["verify-fl", "--config", cfg])
    report = json.loads(capsys.readouterr().out)
    assert rc == 0 and report["pass"]
    ids = [c["id"] for c in report["cases"]]
    assert "restrict-basic" in ids
    assert any(i.startswith("basic-f") for i in ids)


def test_verify_weil_suite(tmp_path, capsys):
    cfg = write_json(tmp_path, "job.json",
                     {"quadspace": SPLIT4, "seed": 5, "grid": {"pairs": 3}})
    rc = main(["verify-weil", "--config", cfg])
    report = json.loads(capsys.readouterr().out)
    assert rc == 0 and report["pass"]
    ids = {c["id"] for c in report["cases"]}
    assert {"gamma-squared", "weyl-square", "plancherel"} <= ids


def test_lfactor_suite(tmp_path, capsys):
    cfg = write_json(tmp_path, "job.json",
                     {"quadspace": SPLIT4,
                      "grid": {"alpha": [{"order": 1},
                                         {"order": 8, "exp": 3}, 0.3]}})
    rc = main(["lfactor", "--config", cfg])
    report = json.loads(capsys.readouterr().out)
    assert rc == 0 and report["pass"]
    # dim-4 disc-1 normalized factor is identically 1
    for case in report["cases"]:
        if case["id"].startswith("assembly"):
            assert abs(case["lhs"]["float"][0] - 1) < 1e-12
            assert abs(case["lhs"]["float"][1]) < 1e-12


def test_hecke_check_suite(tmp_path, capsys):
    cfg = write_json(tmp_path, "job.json",
                     {"quadspace": SPLIT4, "grid": {"a": ["1"]}})
    rc = main(["hecke-check", "--config", cfg])
    report = json.loads(capsys.readouterr().out)
    assert rc == 0 and report["pass"]
    ids = {c["id"] for c in report["cases"]}
    assert {"coset-count", "k-invariance-n", "k-invariance-w"} <= ids


def test_config_errors(tmp_path, capsys):
    bad_gram = write_json(tmp_path, "a.json",
                          {"quadspace": {"p": 3, "gram": [[1, 0], [0]],
                                         "v1": ["1", "0"]}})
    assert main(["density", "--config", bad_gram]) == 3
    missing = str(tmp_path / "nope.json")
    assert main(["density", "--config", missing]) == 3
    conflict = write_json(tmp_path, "b.json",
                          {"command": "lfactor", "quadspace": SPLIT4})
    assert main(["density", "--config", conflict]) == 3
    odd = write_json(tmp_path, "c.json",
                     {"quadspace": {"p": 3, "dim": 3, "kind": "split"}})
    assert main(["verify-weil", "--config", odd]) == 3
    zero_a = write_json(tmp_path, "d.json",
                        {"quadspace": SPLIT4, "grid": {"a": ["0"]}})
    assert main(["verify-transfer", "--config", zero_a]) == 3
    capsys.readouterr()


def test_float_rational_rejected(tmp_path):
    cfg = load_config(write_json(tmp_path, "e.json",
                                 {"quadspace": SPLIT4,
                                  "grid": {"a": [0.5]},
                                  "command": "density", "phi": "basic"}))
    with pytest.raises(ConfigError):
        run_job(cfg)


def test_parse_quadspace_explicit():
    Q = parse_quadspace({"p": 3, "gram": [[0, 1], [1, 0]],
                         "v1": ["1", "1"]})
    assert Q.n == 2 and Q.v1 == (Fraction(1), Fraction(1))
    with pytest.raises(ConfigError):
        parse_quadspace({"p": 3, "gram": [[3, 0], [0, 1]], "v1": [1, 0]})


def test_generate_random_phi_contract():
    f1 = generate_random_phi(3, 4, 42, support_radius=1, n_cells=4)
    f2 = generate_random_phi(3, 4, 42, support_radius=1, n_cells=4)
    assert f1.cells == f2.cells
    f3 = generate_random_phi(3, 4, 43, support_radius=1, n_cells=4)
    assert f1.cells != f3.cells
    for (c, k), _ in f1.cells.items():
        assert all(valuation(x, 3) >= -1 for x in c if x != 0)
        assert 0 <= k <= 1
