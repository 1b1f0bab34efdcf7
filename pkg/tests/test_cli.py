import json

import pytest

from lorlab.cli import EXIT_INFEASIBLE, EXIT_OK, EXIT_USAGE, main

CRIT = ["--pair", "BF", "--d", "1", "--s0", "1/2", "--p0", "1", "--q0", "1", "--r0", "1",
        "--s1", "0", "--p1", "2", "--q1", "2", "--r1", "1"]


def swap(args, flag, value):
    out = list(args)
    out[out.index(flag) + 1] = value
    return out


def test_decide_holds(capsys):
    assert main(["decide", *CRIT]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out == {"holds": True, "clause": "iii", "theorem": "BF"}


def test_decide_fails(capsys):
    assert main(["decide", *swap(CRIT, "--q0", "2")]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["holds"] is False


def test_decide_parses_inf(capsys):
    # on the critical line only q0 <= r1 matters, so an infinite r0 still holds
    assert main(["decide", *swap(CRIT, "--r0", "inf")]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["clause"] == "iii"
    assert main(["decide", *swap(swap(CRIT, "--q0", "inf"), "--r1", "4")]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["holds"] is False


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["decide", *swap(CRIT, "--p0", "one")])
    assert info.value.code == EXIT_USAGE
    assert main(["decide", "--pair", "BF"]) == EXIT_USAGE
    assert main(["decide", *swap(CRIT, "--p0", "-1")]) == EXIT_USAGE


def test_verify_dilation_growth(tmp_path, capsys):
    args = ["verify", "--pair", "BB", "--s0", "0", "--p0", "1", "--q0", "2", "--r0", "2",
            "--s1", "0", "--p1", "2", "--q1", "2", "--r1", "2", "--sizes", "4,5,6",
            "--csv", str(tmp_path / "t.csv"), "--json", str(tmp_path / "t.json")]
    assert main(args) == EXIT_OK
    summary = json.loads((tmp_path / "t.json").read_text())
    assert summary["classification"] == "growth" and summary["consistent"]
    assert (tmp_path / "t.csv").read_text().startswith("N,source_norm")


def test_verify_jawerth_bounded(tmp_path, capsys):
    cfg = tmp_path / "q.json"
    cfg.write_text(json.dumps({"pair": "FB", "s0": "1/2", "p0": 1, "q0": 2, "r0": 2,
                               "s1": 0, "p1": 2, "q1": 2, "r1": 2, "sizes": "2,3,4"}))
    assert main(["verify", "--config", str(cfg)]) == EXIT_OK
    summary = json.loads(capsys.readouterr().out.splitlines()[-1])
    assert summary["holds"] and summary["clause"] == "iii"
    assert summary["classification"] == "bounded"


def test_verify_config_errors(tmp_path):
    cfg = tmp_path / "q.json"
    cfg.write_text(json.dumps({"colour": "blue"}))
    assert main(["verify", "--config", str(cfg)]) == EXIT_USAGE
    assert main(["verify", "--config", str(tmp_path / "missing.json")]) == EXIT_USAGE
    assert main(["verify", *CRIT, "--sizes", "3"]) == EXIT_USAGE


def test_verify_infeasible():
    args = ["verify", "--pair", "BB", "--s0", "0", "--p0", "1", "--q0", "2", "--r0", "2",
            "--s1", "0", "--p1", "2", "--q1", "2", "--r1", "2", "--sizes", "4,40"]
    assert main(args) == EXIT_INFEASIBLE


def test_constants_deterministic(tmp_path):
    paths = []
    for i in range(2):
        csv_path, svg_path = tmp_path / f"c{i}.csv", tmp_path / f"c{i}.svg"
        assert main(["constants", "--p-grid", "0.5,2", "--r-grid", "1,4,inf", "--budget", "60",
                     "--seed", "3", "--csv", str(csv_path), "--svg", str(svg_path)]) == EXIT_OK
        paths.append((csv_path.read_bytes(), svg_path.read_bytes()))
    assert paths[0] == paths[1]
    lines = paths[0][0].decode().splitlines()
    assert lines[0].startswith("p,r,status,empirical_lower,analytic_bound_mod_A")
    assert len(lines) == 7


def test_constants_bound_column(capsys):
    assert main(["constants", "--p-grid", "0.5", "--r-grid", "0.6,1,2,inf", "--budget", "1"]) == EXIT_OK
    rows = capsys.readouterr().out.splitlines()[1:]
    col = [float(r.split(",")[4]) for r in rows]
    assert col == sorted(col) and col[-1] == 4.0


def test_constants_usage(capsys):
    assert main(["constants", "--p-grid", "", "--r-grid", "1"]) == EXIT_USAGE
    assert main(["constants", "--r-grid", "1"]) == EXIT_USAGE
    assert main(["constants", "--p-grid", "1", "--r-grid", "1", "--budget", "0"]) == EXIT_USAGE


def test_constants_domain_row(capsys):
    assert main(["constants", "--p-grid", "inf", "--r-grid", "1", "--budget", "1"]) == EXIT_OK
    assert "domain error" in capsys.readouterr().out
