import json

import pytest

from moyallax import cli
from moyallax.cli import main
from moyallax.errors import ConsistencyError
from moyallax.verify import SuiteReport


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("MU_CAP", "EPS_WINDOW", "DEPTH", "FORMAT", "SEED", "OUTPUT"):
        monkeypatch.delenv("MOYALLAX_" + name, raising=False)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_flow_d1_commutative(capsys):
    code, out, _ = run(capsys, "flow", "--d", "1", "--mu-cap", "0")
    assert code == 0
    assert out.splitlines()[1] == "u*u_{1,0} + 1/12*eps^2*u_{3,0}"
    assert "max_mu=0" in out.splitlines()[0]


def test_flow_d1_mu4_terms(capsys):
    code, out, _ = run(capsys, "flow", "--d", "1", "--mu-cap", "4")
    assert code == 0
    body = out.splitlines()[1]
    for term in ("u*u_{1,0}", "1/12*eps^2*u_{3,0}", "-1/8*eps^2*mu^2*u_{0,2}*u_{3,0}", "1/4*eps^2*mu^2*u_{1,1}*u_{2,1}"):
        assert term in body


def test_flow_d2_classical(capsys):
    code, out, _ = run(capsys, "flow", "--d", "2", "--mu-cap", "0", "--format", "csv")
    assert code == 0
    rows = out.splitlines()
    assert rows[0] == "re,im,eps,mu,jets"
    assert sorted(rows[1:]) == sorted(
        [
            '1/2,0,0,0,"u_{0,0}*u_{0,0}*u_{1,0}"',
            '1/12,0,2,0,"u_{0,0}*u_{3,0}"',
            '1/6,0,2,0,"u_{1,0}*u_{2,0}"',
            '1/240,0,4,0,"u_{5,0}"',
        ]
    )


def test_flow_json_metadata(capsys):
    code, out, _ = run(capsys, "flow", "--d", "1", "--mu-cap", "2", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data["flow"] == 1
    assert data["trunc"]["max_mu"] == 2
    assert data["terms"]
    assert all(t["c"]["im"] == "0" for t in data["terms"])
    assert {"c": {"re": "1/12", "im": "0"}, "eps": 2, "mu": 0, "jets": [[3, 0, 1]]} in data["terms"]


def test_flow_rejects_bad_arguments(capsys):
    assert run(capsys, "flow", "--d", "1", "--mu-cap", "3")[0] == 1
    assert run(capsys, "flow", "--d", "0")[0] == 1
    assert run(capsys, "flow", "--d", "2", "--depth", "-3")[0] == 1
    assert run(capsys, "flow", "--d", "1", "--depth", "-1")[0] == 1
    assert run(capsys, "flow", "--d", "1", "--eps-window", "3", "1")[0] == 1
    with pytest.raises(SystemExit) as exc:
        main(["flow"])
    assert exc.value.code == 1


def test_dr_quadratic_examples(capsys):
    assert run(capsys, "dr-quadratic", "--g", "1", "--a", "1", "0", "--b", "0", "1")[1] == "1/24\n"
    assert run(capsys, "dr-quadratic", "--g", "0", "--a", "7", "-3", "--b", "2", "2")[1] == "1\n"
    code, out, _ = run(capsys, "dr-quadratic", "--g", "2", "--a", "1", "0", "--b", "0", "1", "--verify")
    assert code == 0
    assert out == "1/1920\nrecursion 1/960 agrees\n"
    assert run(capsys, "dr-quadratic", "--g", "1")[0] == 1


def test_dr_quadratic_table(capsys):
    code, out, _ = run(capsys, "dr-quadratic", "--table", "3", "2", "2", "--verify")
    rows = out.splitlines()
    assert code == 0
    assert rows[0] == "g,a1,a2,b1,b2,value"
    assert len(rows) == 1 + 4 * 5**4
    assert "1,1,0,0,1,1/24" in rows


def test_verify_suites(capsys):
    for argv in (["verify", "flow1"], ["verify", "step1", "--mu-cap", "8"], ["verify", "commute", "--d", "2"]):
        code, out, _ = run(capsys, *argv)
        assert code == 0, out
        assert out.splitlines()[-1].startswith("PASS")


def test_verify_json(capsys):
    code, out, _ = run(capsys, "verify", "extract-d1", "--gmax", "1", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data["status"] == "PASS"
    assert data["checks"]


def test_verify_failure_exit_code(capsys, monkeypatch):
    def failing(name, cancel=None, **opts):
        r = SuiteReport(name)
        r.add("forced", 1, 2)
        return r

    monkeypatch.setattr(cli, "run_suite", failing)
    code, out, _ = run(capsys, "verify", "flow1")
    assert code == 3
    assert "FAIL" in out
    assert "-1" in out


def test_consistency_failure_exit_code(capsys, monkeypatch):
    def broken(*args, **kwargs):
        raise ConsistencyError("residual at order 1", discrepancy="u_{1,0}")

    monkeypatch.setattr(cli, "flow_rhs", broken)
    code, out, err = run(capsys, "flow", "--d", "1")
    assert code == 2
    assert out == ""
    assert "u_{1,0}" in err


def test_extract_examples(capsys):
    assert run(capsys, "extract", "--d", "1", "--g", "1", "--k", "0", "--b", "3", "-3")[1] == "3/4\nprovenance: paper\n"
    code, out, _ = run(capsys, "extract", "--d", "1", "--g", "2", "--k", "2", "--b", "0", "1", "-1", "--a", "1", "0", "-1")
    assert code == 0
    assert out == "1/192\nprovenance: paper\n"
    code, out, _ = run(capsys, "extract", "--d", "2", "--g", "1", "--k", "0", "--b", "1", "-1")
    assert code == 0
    assert out.endswith("provenance: prediction\n")


def test_extract_constraint_violations(capsys):
    assert run(capsys, "extract", "--d", "1", "--g", "1", "--k", "0", "--b", "1", "1")[0] == 1
    assert run(capsys, "extract", "--d", "1", "--g", "1", "--k", "0", "--b", "1", "-1", "--a", "1")[0] == 1


def test_environment_overrides(capsys, monkeypatch):
    monkeypatch.setenv("MOYALLAX_MU_CAP", "0")
    monkeypatch.setenv("MOYALLAX_FORMAT", "csv")
    code, out, _ = run(capsys, "flow", "--d", "1")
    assert code == 0
    assert out.startswith("re,im,eps,mu,jets\n")
    assert "mu" not in out.split("\n", 1)[1].replace("u_", "")
    # flags win over the environment
    code, out, _ = run(capsys, "flow", "--d", "1", "--mu-cap", "2", "--format", "text")
    assert "max_mu=2" in out
    monkeypatch.setenv("MOYALLAX_MU_CAP", "four")
    assert run(capsys, "flow", "--d", "1")[0] == 1


def test_eps_window_env(capsys, monkeypatch):
    monkeypatch.setenv("MOYALLAX_EPS_WINDOW", "0,0")
    code, out, _ = run(capsys, "flow", "--d", "1", "--mu-cap", "0")
    assert out.splitlines()[1] == "u*u_{1,0}"


def test_output_file(tmp_path, capsys, monkeypatch):
    target = tmp_path / "flow.txt"
    code, out, _ = run(capsys, "flow", "--d", "1", "--mu-cap", "0", "--output", str(target))
    assert code == 0
    assert out == ""
    assert target.read_text().splitlines()[1] == "u*u_{1,0} + 1/12*eps^2*u_{3,0}"
    assert [p.name for p in tmp_path.iterdir()] == ["flow.txt"]
    monkeypatch.setenv("MOYALLAX_OUTPUT", str(tmp_path / "env.txt"))
    run(capsys, "dr-quadratic", "--g", "0", "--a", "1", "0", "--b", "0", "1")
    assert (tmp_path / "env.txt").read_text() == "1\n"


def test_failed_run_leaves_no_file(tmp_path, capsys, monkeypatch):
    def broken(*args, **kwargs):
        raise ConsistencyError("boom")

    monkeypatch.setattr(cli, "flow_rhs", broken)
    target = tmp_path / "out.txt"
    assert run(capsys, "flow", "--d", "1", "--output", str(target))[0] == 2
    assert list(tmp_path.iterdir()) == []


def test_interrupt_exit_code(capsys, monkeypatch):
    def interrupted(fn):
        raise cli.Cancelled("interrupted")

    monkeypatch.setattr(cli, "_run_cancellable", interrupted)
    assert run(capsys, "flow", "--d", "1")[0] == 130


def test_byte_identical_output(capsys):
    argv = ["verify", "assoc", "--count", "5", "--seed", "7", "--format", "json"]
    first = run(capsys, *argv)[1]
    second = run(capsys, *argv)[1]
    assert first == second
    assert run(capsys, "flow", "--d", "2", "--mu-cap", "2")[1] == run(capsys, "flow", "--d", "2", "--mu-cap", "2")[1]
