import subprocess
import sys
from fractions import Fraction

import pytest

from scatterkit import formats
from scatterkit.brokenlines import enumerate_broken_lines, theta
from scatterkit.cluster import ClusterSeed, initial_variables, mutate_matrix, mutate_variable
from scatterkit.errors import ParseError
from scatterkit.lattice import Seed
from scatterkit.mirror import structure_constants
from scatterkit.svg import render_diagram
from scatterkit.toric import builtin_fan

A2_SEED_TEXT = """scatterkit seed v1
rank 2
skew_matrix 0 1 -1 0
unfrozen 1 2
"""


def run_cli(args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "scatterkit.cli", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


# ---------------------------------------------------------------------------
# format round-trips


def test_seed_roundtrip(a2):
    text = formats.write_seed(a2)
    assert text == A2_SEED_TEXT
    assert formats.parse_seed(text) == a2
    assert formats.write_seed(formats.parse_seed(text)) == text


def test_seed_empty_unfrozen(torus_seed):
    text = formats.write_seed(torus_seed)
    assert formats.parse_seed(text) == torus_seed


def test_diagram_roundtrip(a2_diagram):
    text = formats.write_diagram(a2_diagram)
    again = formats.parse_diagram(text)
    assert set(again.walls) == set(a2_diagram.walls)
    assert again.order == a2_diagram.order and again.seed == a2_diagram.seed
    assert formats.write_diagram(again) == text


def test_diagram_roundtrip_kronecker(k2_diagram):
    text = formats.write_diagram(k2_diagram)
    assert formats.write_diagram(formats.parse_diagram(text)) == text


def test_theta_roundtrip(a2_diagram):
    Q = (Fraction(-2), Fraction(-7, 5))
    t = theta(a2_diagram, (1, 0), Q)
    lines = enumerate_broken_lines(a2_diagram, (1, 0), Q)
    text = formats.write_theta(t, include_lines=lines)
    seed, m, basepoint, base, table, order = formats.parse_theta(text)
    assert seed == a2_diagram.seed
    assert m == (1, 0) and base == (1, 0) and order == a2_diagram.order
    assert basepoint == Q
    assert table == t.table.term_dict


def test_table_roundtrip(a2_diagram):
    tab = structure_constants(a2_diagram, [(1, 0), (-1, 0)])
    text = formats.write_table(a2_diagram.seed, tab)
    seed, inputs, entries, order, basepoint = formats.parse_table(text)
    assert seed == a2_diagram.seed
    assert inputs == ((1, 0), (-1, 0))
    assert entries == tab.table
    assert basepoint == tab.basepoint.point


def test_fan_roundtrip():
    for name in ("P2", "P1xP1", "Bl1P2"):
        fan = builtin_fan(name)
        text = formats.write_fan(fan)
        assert formats.parse_fan(text) == fan
        assert formats.write_fan(formats.parse_fan(text)) == text


def test_mutation_trace_roundtrip():
    cs = ClusterSeed.make([[0, 1], [-1, 0]], [0, 1])
    seq = [0, 1, 0]
    states = []
    cur, variables = cs, initial_variables(cs)
    states.append((cur.matrix, tuple(variables)))
    for k in seq:
        variables = mutate_variable(cur, variables, k)
        cur = mutate_matrix(cur, k)
        states.append((cur.matrix, tuple(variables)))
    text = formats.write_mutation_trace(cs, seq, states)
    seed2, seq2, states2 = formats.parse_mutation_trace(text)
    assert seed2 == cs and seq2 == seq and states2 == states
    assert formats.write_mutation_trace(seed2, seq2, states2) == text


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError):
        formats.parse_seed("garbage\n")
    with pytest.raises(ParseError):
        formats.parse_seed("scatterkit seed v1\nrank 2\nskew_matrix 0 1 -1\nunfrozen\n")
    with pytest.raises(ParseError):
        formats.parse_seed(A2_SEED_TEXT + "extra\n")


def test_svg_deterministic(a2_diagram):
    a = render_diagram(a2_diagram)
    b = render_diagram(a2_diagram)
    assert a == b
    assert a.startswith("<svg") and a.rstrip().endswith("</svg>")
    assert a.count("<line") == len(a2_diagram.walls)


# ---------------------------------------------------------------------------
# CLI behavior


@pytest.fixture
def workdir(tmp_path):
    (tmp_path / "a2.seed").write_text(A2_SEED_TEXT, encoding="utf-8")
    return tmp_path


def test_cli_scatter_deterministic(workdir):
    r1 = run_cli(["scatter", "a2.seed", "--order", "6", "--out", "d1.txt", "--svg", "d1.svg"], workdir)
    r2 = run_cli(["scatter", "a2.seed", "--order", "6", "--out", "d2.txt", "--svg", "d2.svg"], workdir)
    assert r1.returncode == 0 and r2.returncode == 0
    d1 = (workdir / "d1.txt").read_bytes()
    assert d1 == (workdir / "d2.txt").read_bytes()
    assert (workdir / "d1.svg").read_bytes() == (workdir / "d2.svg").read_bytes()
    diagram = formats.parse_diagram(d1.decode())
    assert len(diagram.walls) == 3


def test_cli_theta_and_reparse(workdir):
    run_cli(["scatter", "a2.seed", "--order", "5", "--out", "d.txt"], workdir)
    r = run_cli(
        ["theta", "d.txt", "--m", "1,0", "--basepoint=-2,-7/5", "--out", "t.txt"], workdir
    )
    assert r.returncode == 0
    seed, m, bp, base, table, order = formats.parse_theta((workdir / "t.txt").read_text())
    assert m == (1, 0) and table == {(0, 0): 1, (0, 1): 1, (1, 1): 1}


def test_cli_theta_auto_basepoint(workdir):
    r = run_cli(["theta", "a2.seed", "--m", "0,0", "--order", "3"], workdir)
    assert r.returncode == 0
    assert "term 0 0 1" in r.stdout


def test_cli_multiply(workdir):
    run_cli(["scatter", "a2.seed", "--order", "5", "--out", "d.txt"], workdir)
    r = run_cli(["multiply", "d.txt", "--p", "1,0", "--p=-1,0", "--out", "m.txt"], workdir)
    assert r.returncode == 0
    _, inputs, entries, *_ = formats.parse_table((workdir / "m.txt").read_text())
    assert entries == {(0, 0): 1, (0, 1): 1}


def test_cli_mutate(workdir):
    r = run_cli(["mutate", "a2.seed", "--sequence", "1,2,1,2,1", "--out", "tr.txt"], workdir)
    assert r.returncode == 0
    seed, seq, states = formats.parse_mutation_trace((workdir / "tr.txt").read_text())
    assert len(states) == 6


def test_cli_toric_product(workdir):
    r = run_cli(["toric", "P2", "product", "--a", "1,0", "--b=-1,0"], workdir)
    assert r.returncode == 0
    assert "q 0 0" in r.stdout
    assert "class 1 1 1" in r.stdout


def test_cli_verify_pass(workdir):
    r = run_cli(["verify", "a2.seed", "--level", "fast"], workdir)
    assert r.returncode == 0
    assert "FAIL" not in r.stdout
    for name in ("loop-consistency", "mirror-laws", "cluster-comparison"):
        assert f"PASS {name}" in r.stdout


def test_cli_verify_corrupted_diagram(workdir):
    run_cli(["scatter", "a2.seed", "--order", "4", "--out", "d.txt"], workdir)
    text = (workdir / "d.txt").read_text()
    lines = text.splitlines()
    lines[-1] = lines[-1].replace("coeffs 1", "coeffs 2")
    (workdir / "bad.txt").write_text("\n".join(lines) + "\n")
    r = run_cli(["verify", "bad.txt", "--level", "fast"], workdir)
    assert r.returncode == 1
    assert "FAIL" in r.stdout


def test_cli_parse_error_exit_2(workdir):
    (workdir / "bad.seed").write_text("not a seed\n")
    r = run_cli(["scatter", "bad.seed", "--order", "3"], workdir)
    assert r.returncode == 2
    assert "error" in r.stderr


def test_cli_unsupported_rank_exit_2(workdir):
    (workdir / "r3.seed").write_text(
        "scatterkit seed v1\nrank 3\nskew_matrix 0 1 0 -1 0 1 0 -1 0\nunfrozen 1 2 3\n"
    )
    r = run_cli(["scatter", "r3.seed", "--order", "3"], workdir)
    assert r.returncode == 2


def test_cli_verify_toric_builtin(workdir):
    r = run_cli(["verify", "P1xP1", "--level", "fast"], workdir)
    assert r.returncode == 0
    assert "PASS stanley-reisner" in r.stdout


def test_cli_scatter_empty_seed(tmp_path):
    (tmp_path / "torus.seed").write_text(
        "scatterkit seed v1\nrank 2\nskew_matrix 0 1 -1 0\nunfrozen\n"
    )
    r = run_cli(["scatter", "torus.seed", "--order", "4", "--out", "d.txt"], tmp_path)
    assert r.returncode == 0
    d = formats.parse_diagram((tmp_path / "d.txt").read_text())
    assert d.walls == ()


def test_cli_verify_good_diagram(workdir):
    run_cli(["scatter", "a2.seed", "--order", "4", "--out", "d.txt"], workdir)
    r = run_cli(["verify", "d.txt", "--level", "fast"], workdir)
    assert r.returncode == 0
    assert "PASS loop-consistency" in r.stdout
    assert "PASS theta-consistency" in r.stdout


def test_cli_verify_rank3_diagram(tmp_path):
    text = (
        "scatterkit diagram v1\nrank 3\nskew_matrix 0 1 0 -1 0 0 0 0 0\nunfrozen 1\n"
        "order 3\nwalls 1\n"
        "wall direction 1 0 0 ; support hyperplane ; origin initial ; coeffs 1\n"
    )
    (tmp_path / "r3.diagram").write_text(text)
    r = run_cli(["verify", "r3.diagram", "--level", "fast"], tmp_path)
    assert r.returncode == 0
    assert "PASS wall-form" in r.stdout


def test_cli_verify_full_level_a2(workdir):
    r = run_cli(["verify", "a2.seed", "--level", "full"], workdir)
    assert r.returncode == 0
    for name in (
        "loop-consistency",
        "theta-consistency",
        "theta-positivity",
        "mirror-laws",
        "table-positivity",
        "cluster-comparison",
    ):
        assert f"PASS {name}" in r.stdout
    assert "FAIL" not in r.stdout
