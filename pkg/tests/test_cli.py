"""Command dispatch: worked examples, error surfacing, determinism."""

import pytest

from branchlab import cli
from branchlab.errors import ScenarioError
from branchlab.scenario import empty_scenario, parse_scenario

DEMO = """\
[functional psi]
axiom 0 0 0 1
axiom 1 0 1 1
axiom 00 1 0 2
axiom 01 1 1 2
axiom 10 1 0 2
axiom 11 1 1 2

[functional flat]
axiom 0 0 0 1
axiom 1 0 0 1

[tree T]
node e
node 0
node 1
node 00
node 01
node 10
node 11

[tree S]
node e
node 0
node 1

[tree W]
node e
node 00
node 01
node 10

[params]
seed 5
"""


@pytest.fixture
def sc():
    return parse_scenario(DEMO)


def statuses(report):
    return [ln.status for ln in report.lines]


def test_exhaustive_twocol_n1_gives_sixteen_passes():
    rep = cli.run_command("verify twocol --n 1 --exhaustive",
                          empty_scenario())
    assert len(rep.lines) == 16
    assert statuses(rep) == ["PASS"] * 16
    assert rep.ok


def test_cupping_on_the_empty_adversary(sc):
    rep = cli.run_command("run cupping --n 2", empty_scenario())
    assert statuses(rep) == ["PASS"] * 3
    assert all(ln.witness for ln in rep.lines)


def test_selfdelim_worked_example():
    rep = cli.run_command("encode sd 5 2", empty_scenario())
    assert statuses(rep) == ["PASS"]
    assert rep.lines[0].witness == "10001110"


def test_thin_check_both_ways(sc):
    ok = cli.run_command("check thin --tree T --sub S", sc)
    assert statuses(ok) == ["PASS"]
    # W's three length-2 strings all sit at level 1, so the antichain
    # weighs 3/2 and the check must fail with a witness
    bad = cli.run_command("check thin --tree W --sub W", sc)
    assert statuses(bad) == ["FAIL"]
    assert bad.lines[0].witness
    assert not bad.ok


def test_split_check_both_ways(sc):
    assert statuses(cli.run_command(
        "check split --psi psi --tree T", sc)) == ["PASS"]
    flat = cli.run_command("check split --psi flat --tree T", sc)
    assert statuses(flat) == ["FAIL"]
    assert "," in flat.lines[0].witness


def test_dangling_names_surface_as_error_lines(sc):
    rep = cli.run_command("check thin --tree T --sub NOPE", sc)
    assert statuses(rep) == ["ERROR"]
    assert "NOPE" in rep.lines[0].witness
    rep = cli.run_command("trace dnr", empty_scenario())
    assert statuses(rep) == ["ERROR"]


def test_unknown_commands_are_usage_errors(sc):
    with pytest.raises(ScenarioError):
        cli.run_command("polish trees", sc)
    with pytest.raises(ScenarioError):
        cli.run_command("verify", sc)


def test_seed_override_and_determinism(sc):
    a = cli.run_command("verify twocol --n 2 --count 20 --seed 77", sc)
    b = cli.run_command("verify twocol --n 2 --count 20 --seed 77", sc)
    assert a.render() == b.render()
    assert a.seed == 77
    c = cli.run_command("verify twocol --n 2 --count 20", sc)
    assert c.seed == 5


def test_scenario_flag_reads_a_file(tmp_path):
    f = tmp_path / "d.scn"
    f.write_text(DEMO)
    rep = cli.run_command(f"check split --psi psi --tree T --scenario {f}",
                          empty_scenario())
    assert statuses(rep) == ["PASS"]
    assert rep.seed == 5


def test_main_exit_codes_and_output(tmp_path, capsys):
    assert cli.main(["encode", "sd", "5", "2"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines() == ["# seed 0", "PASS\tsd-5-2\t10001110"]

    f = tmp_path / "d.scn"
    f.write_text(DEMO)
    assert cli.main(["check", "thin", "--tree", "W", "--sub", "W",
                     "--scenario", str(f)]) == 1
    capsys.readouterr()

    assert cli.main(["no-such-command"]) == 2
    assert "error:" in capsys.readouterr().err


def test_traceable_and_smc_runs(sc):
    rep = cli.run_command("run traceable --horizon 5", sc)
    assert rep.ok and len(rep.lines) == 4
    rep = cli.run_command("run smc --psi psi --oracle 5 --budget 32", sc)
    assert rep.ok
    assert rep.lines[0].witness.startswith(("no-splittings",
                                            "splitting-subtree"))


def test_kappa_lines_match_the_doubling_form():
    rep = cli.run_command("verify kappa --imax 2 --nmax 3",
                          empty_scenario())
    assert rep.ok
    by_id = {ln.check_id: ln.witness for ln in rep.lines}
    assert by_id["kappa-0-0"] == "4"
    assert by_id["kappa-1-3"] == "16"
