import pytest

import gen
from teamlogic import (
    check,
    char_formula,
    dump_model,
    load_model,
    parse_formula,
    print_formula,
    parse_kahr,
    reduce_to_equality,
    reduce_to_inclusion,
    variable_distinguished,
)
from teamlogic.cli import main
from teamlogic.syntax import LFD, Incl


@pytest.fixture
def dm_path(tmp_path):
    path = tmp_path / "model.dm"
    path.write_text(dump_model(gen.ex_local_dep()))
    return str(path)


@pytest.fixture
def inc_paths(tmp_path):
    left, right, _ = gen.ex_inc()
    lp, rp = tmp_path / "left.dm", tmp_path / "right.dm"
    lp.write_text(dump_model(left))
    rp.write_text(dump_model(right))
    return str(lp), str(rp)


def test_check_true_false_and_errors(dm_path, capsys):
    assert main(["check", "--model", dm_path, "--formula", "D[y] x",
                 "--at", "1 1 0"]) == 0
    assert "true" in capsys.readouterr().out
    assert main(["check", "--model", dm_path, "--formula", "D[x] y",
                 "--at", "1 1 0"]) == 1
    assert "false" in capsys.readouterr().out
    assert main(["check", "--model", dm_path, "--formula", "D[y] x",
                 "--at", "9 9 9"]) == 2
    assert "error" in capsys.readouterr().err
    assert main(["check", "--model", dm_path, "--formula", "D[y", "--at",
                 "1 1 0"]) == 2


def test_check_reports_stats(dm_path, capsys):
    main(["check", "--model", dm_path, "--formula", "A[] E[] D[y] x",
          "--at", "0 0 0"])
    out = capsys.readouterr().out
    assert "stats:" in out and "atoms=" in out


def test_check_fo_team_mode(tmp_path, capsys):
    path = tmp_path / "st.dm"
    path.write_text("universe 0 1\nvars x y\n")
    rc = main(["check", "--model", str(path), "--formula", "D[x] y",
               "--at", "0 0", "--team-fo", "x = y"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "materialized team size: 2" in out
    assert "free variable bound: 2" in out


def test_check_fo_team_bound_warning(tmp_path, capsys):
    path = tmp_path / "st.dm"
    path.write_text("universe 0 1\nvars x y\n")
    rc = main(["check", "--model", str(path), "--formula", "D[x] y",
               "--at", "0 0", "--team-fo", "x = y", "--bound", "1"])
    captured = capsys.readouterr()
    assert rc == 0
    assert "warning" in captured.err


def test_check_fo_team_conflicts_with_team_block(dm_path):
    assert main(["check", "--model", dm_path, "--formula", "D[y] x",
                 "--at", "1 1 0", "--team-fo", "x = y"]) == 2


def test_check_omega_flag_rejects_unknown_kind(dm_path):
    assert main(["check", "--model", dm_path, "--formula", "D[y] x",
                 "--at", "1 1 0", "--omega", "bogus"]) == 2


def test_bisim_matches_library(inc_paths, capsys):
    lp, rp = inc_paths
    rc = main(["bisim", "--left", lp, "--right", rp, "--at-left", "a b",
               "--at-right", "1 2", "--omega", "D,Y,=,!="])
    out = capsys.readouterr().out
    assert rc == 0
    assert out.startswith("bisimilar")
    assert "fixpoint" in out
    assert "  0 0" in out and "  1 1" in out


def test_bisim_not_bisimilar_exit_code(tmp_path, capsys):
    a = tmp_path / "a.dm"
    b = tmp_path / "b.dm"
    a.write_text("universe 0\nvars x\nrel P 1\n0\nend\nteam\n0\nend\n")
    b.write_text("universe 0\nvars x\nrel P 1\nend\nteam\n0\nend\n")
    rc = main(["bisim", "--left", str(a), "--right", str(b),
               "--at-left", "0", "--at-right", "0", "--omega", "D,Y",
               "--witness"])
    out = capsys.readouterr().out
    assert rc == 1
    assert "not bisimilar" in out
    assert "witness: atom disagreement" in out


def test_charform_output_parses(dm_path, capsys):
    rc = main(["charform", "--model", dm_path, "--at", "0 0 0",
               "--depth", "1", "--omega", "D,Y"])
    out = capsys.readouterr().out
    assert rc == 0
    model = gen.ex_local_dep()
    parsed = parse_formula(out.strip(), model.ftype)
    expected = char_formula(model, ("0", "0", "0"), 1, LFD)
    assert parsed == expected


def test_charform_depth_guard(dm_path):
    assert main(["charform", "--model", dm_path, "--at", "0 0 0",
                 "--depth", "5", "--omega", "D,Y"]) == 2


def test_translate_modes(dm_path, capsys):
    for mode in ("standard", "modal"):
        rc = main(["translate", "--mode", mode, "--model", dm_path,
                   "--formula", "D[y] x"])
        assert rc == 0
        assert "forall" in capsys.readouterr().out
    rc = main(["translate", "--mode", "guarded", "--model", dm_path,
               "--formula", "in(x ; y)"])
    assert rc == 0
    assert "exists" in capsys.readouterr().out
    # equality atom is outside the modal fragment
    assert main(["translate", "--mode", "modal", "--model", dm_path,
                 "--formula", "x = y"]) == 2


def test_reduce_targets(tmp_path, capsys):
    kahr = tmp_path / "s.kahr"
    kahr.write_text("binary E\nmatrix E(x y)\n")
    psi = parse_kahr(kahr.read_text())
    rc = main(["reduce", str(kahr), "--target", "incl"])
    assert rc == 0
    assert capsys.readouterr().out.strip() == print_formula(
        reduce_to_inclusion(psi)
    )
    rc = main(["reduce", str(kahr), "--target", "eq"])
    assert rc == 0
    assert capsys.readouterr().out.strip() == print_formula(
        reduce_to_equality(psi)
    )


def test_reduce_bad_input(tmp_path):
    kahr = tmp_path / "bad.kahr"
    kahr.write_text("binary E\nmatrix x = y\n")
    assert main(["reduce", str(kahr), "--target", "incl"]) == 2


def test_vd_roundtrip(dm_path, capsys):
    rc = main(["vd", "--model", dm_path])
    out = capsys.readouterr().out
    assert rc == 0
    vd = load_model(out)
    expected, _ = variable_distinguished(gen.ex_local_dep())
    assert vd == expected


def test_union_roundtrip(inc_paths, capsys):
    lp, rp = inc_paths
    rc = main(["union", "--left", lp, "--right", rp])
    out = capsys.readouterr().out
    assert rc == 0
    model = load_model(out)
    left, right, _ = gen.ex_inc()
    assert len(model.team) == len(left.team) + len(right.team)


def test_out_flag_writes_file(dm_path, tmp_path, capsys):
    target = tmp_path / "report.txt"
    rc = main(["check", "--model", dm_path, "--formula", "D[y] x",
               "--at", "1 1 0", "--out", str(target)])
    assert rc == 0
    assert capsys.readouterr().out == ""
    assert "true" in target.read_text()


def test_missing_file_is_exit_2(tmp_path):
    assert main(["check", "--model", str(tmp_path / "nope.dm"),
                 "--formula", "D[y] x", "--at", "0 0 0"]) == 2
