"""Acceptance criteria, one test per criterion, one printed line each.

Run with ``pytest -s tests/test_acceptance.py`` to see the report lines.
"""

import random
import subprocess
import sys
import time

import pytest

from scatterkit import formats
from scatterkit.brokenlines import theta_consistency_check
from scatterkit.cluster import ClusterSeed, compare_exchange, mutation_class
from scatterkit.lattice import Seed, vadd, vsub
from scatterkit.mirror import (
    ThetaExpansion,
    multiply,
    pairing,
    pairing_direct,
    structure_constants,
)
from scatterkit.scattering import (
    Support,
    chamber_point,
    complete,
    cwall_supports,
    generated_wall_confined,
    generic_loop,
    is_incoming,
    loop_defect,
    random_generic_loop,
)
from scatterkit.toric import BUILTIN_FANS, build_phi, builtin_fan
from scatterkit.verify import (
    check_stanley_reisner,
    check_toric_cocycle,
    check_toric_effectivity,
    check_toric_segment_formulas,
    check_toric_vanishing,
    check_toric_weight_identity,
)

A2 = Seed.make([[0, 1], [-1, 0]], [0, 1])
K2 = Seed.make([[0, 2], [-2, 0]], [0, 1])
K3 = Seed.make([[0, 3], [-3, 0]], [0, 1])


@pytest.fixture(scope="module")
def diagrams():
    return {
        ("A2", 8): complete(A2, 8),
        ("A2", 6): complete(A2, 6),
        ("A2", 5): complete(A2, 5),
        ("A2", 4): complete(A2, 4),
        ("K2", 6): complete(K2, 6),
        ("K2", 5): complete(K2, 5),
        ("K3", 6): complete(K3, 6),
    }


@pytest.fixture(scope="module")
def collected():
    """Tables and theta coefficients accumulated by criteria 4–5 for criterion 6."""
    return {"tables": [], "thetas": []}


def report(num, ok, detail):
    line = f"ACCEPTANCE {num} {'PASS' if ok else 'FAIL'} — {detail}"
    print(line)
    assert ok, line


def test_criterion_1_a2_pentagon(diagrams):
    t0 = time.time()
    d = complete(A2, 8)
    elapsed = time.time() - t0
    ok = len(d.walls) == 3
    gen = d.generated_walls
    ok = ok and len(gen) == 1
    w = gen[0]
    ok = ok and w.direction == (1, 1) and w.support == Support.ray((-1, -1))
    ok = ok and w.function.coeffs == (1,)
    defect = loop_defect(d, generic_loop(d))
    ok = ok and not any(defect.values())
    ok = ok and elapsed < 1.0
    report(1, ok, f"3 walls, third = (−R₊(1,1), 1+z^(1,1)), loop identity mod J^9, {elapsed:.3f}s")


def test_criterion_2_kronecker_consistency(diagrams):
    t0 = time.time()
    details = []
    ok = True
    for name, seed in (("K2", K2), ("K3", K3)):
        d = diagrams[(name, 6)]
        rng = random.Random(101)
        for i in range(64):
            loop = random_generic_loop(d, rng)
            if any(loop_defect(d, loop).values()):
                ok = False
                details.append(f"{name}: defect on loop {i}")
                break
        for w in d.walls:
            if any(c < 0 for c in w.function.coeffs):
                ok = False
                details.append(f"{name}: negative wall coefficient")
            # single-direction form: the function is a series in z^{j·n0} by
            # construction; re-check the stored shape explicitly
            if w.function.direction != w.direction:
                ok = False
                details.append(f"{name}: direction mismatch")
        details.append(f"{name}: {len(d.walls)} walls, 64 loops")
    elapsed = time.time() - t0
    ok = ok and elapsed < 300
    report(2, ok, "; ".join(details) + f", {elapsed:.1f}s")


def test_criterion_3_cwall_confinement(diagrams):
    ok = True
    details = []
    for name, seed in (("A2", A2), ("K2", K2), ("K3", K3)):
        k = 8 if name == "A2" else 6
        d = diagrams[(name, k)]
        cw = cwall_supports(seed, k)
        for w in d.generated_walls:
            if not generated_wall_confined(seed, w, cw):
                ok = False
                details.append(f"{name}: wall {w.direction} escapes")
            if is_incoming(w):
                ok = False
                details.append(f"{name}: generated wall {w.direction} incoming")
        details.append(f"{name}: {len(d.generated_walls)} generated walls confined")
    report(3, ok, "; ".join(details))


def test_criterion_4_theta_consistency(diagrams, collected):
    t0 = time.time()
    ms = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1)]
    ok = True
    count = 0
    for name in ("A2", "K2"):
        d = diagrams[(name, 6)]
        for w in d.walls:
            for m in ms:
                passed, data = theta_consistency_check(d, m, w, 6, return_data=True)
                if not passed:
                    ok = False
                count += 1
                collected["thetas"].append(data["theta_b"])
                collected["thetas"].append(data["transported"])
    elapsed = time.time() - t0
    ok = ok and elapsed < 60
    report(4, ok, f"{count} wall/m checks on A2 and Kronecker-2 at k=6, {elapsed:.1f}s")


def test_criterion_5_mirror_laws(diagrams, collected):
    t0 = time.time()
    ok = True
    details = []
    rng = random.Random(55)
    for name in ("A2", "K2"):
        d = diagrams[(name, 5)]

        def rand_p():
            return (rng.randint(-2, 2), rng.randint(-2, 2))

        # commutativity under permutation
        for _ in range(10):
            ps = [rand_p() for _ in range(3)]
            t1 = structure_constants(d, ps, 5)
            perm = list(ps)
            rng.shuffle(perm)
            t2 = structure_constants(d, perm, 5)
            collected["tables"].append((d, ps, t1))
            if t1.table != t2.table:
                ok = False
                details.append(f"{name}: commutativity fails on {ps}")
        # unit law
        for _ in range(5):
            b = ThetaExpansion.basis(rand_p(), 5)
            unit = ThetaExpansion.unit(2, 5)
            if multiply(d, unit, b) != b:
                ok = False
                details.append(f"{name}: unit law fails")
        # associativity on 20 random triples
        for _ in range(20):
            a, b, c = (ThetaExpansion.basis(rand_p(), 5) for _ in range(3))
            lhs = multiply(d, multiply(d, a, b), c)
            rhs = multiply(d, a, multiply(d, b, c))
            if lhs != rhs:
                ok = False
                details.append(f"{name}: associativity fails")
        # Frobenius on 20 random tuples with n ≤ 4
        for _ in range(20):
            n = rng.randint(2, 4)
            ps = [rand_p() for _ in range(n)]
            tab = structure_constants(d, ps, 5)
            collected["tables"].append((d, ps, tab))
            via = pairing(d, [ThetaExpansion.basis(p, 5) for p in ps])
            if via != pairing_direct(d, ps, 5):
                ok = False
                details.append(f"{name}: Frobenius fails on {ps}")
        details.append(f"{name}: laws hold")
    elapsed = time.time() - t0
    ok = ok and elapsed < 300
    report(5, ok, "; ".join(details) + f", {elapsed:.1f}s")


def test_criterion_6_positivity_convexity(diagrams, collected):
    ok = True
    n_tables = 0
    for d, ps, tab in collected["tables"]:
        total = ps[0]
        for p in ps[1:]:
            total = vadd(total, p)
        for q, c in tab.entries:
            if c < 0:
                ok = False
            off = vsub(q, total)
            deg = d.seed.degree(off)
            if deg is None or deg > tab.order:
                ok = False
        n_tables += 1
    n_thetas = 0
    for series in collected["thetas"]:
        for off, c in series.terms:
            if c < 0:
                ok = False
        n_thetas += 1
    ok = ok and n_tables > 0 and n_thetas > 0
    report(6, ok, f"{n_tables} tables and {n_thetas} theta series nonnegative and P-convex")


def test_criterion_7_cluster_comparison(diagrams):
    t0 = time.time()
    d = diagrams[("A2", 4)]
    cs = ClusterSeed.make(A2.form.matrix, A2.unfrozen)
    rep = compare_exchange(d, cs, 4)
    ok = rep["ok"] and len(rep["relations"]) == 5
    variables, _ = mutation_class(cs)
    ok = ok and all(v.is_positive() for v in variables)
    ok = ok and all(v["theta_matches"] for v in rep["variables"])
    elapsed = time.time() - t0
    ok = ok and elapsed < 60
    report(7, ok, f"5/5 exchange relations matched, Laurent positive, {elapsed:.1f}s")


def test_criterion_8_toric_mode():
    t0 = time.time()
    ok = True
    details = []
    for name in BUILTIN_FANS:
        fan = builtin_fan(name)
        phi = build_phi(fan)
        for check in (
            check_toric_weight_identity(fan, phi, pairs=100),
            check_toric_cocycle(fan, phi, triples=100),
            check_toric_vanishing(fan, phi, pairs=100),
            check_toric_segment_formulas(fan, phi, segments=100),
            check_toric_effectivity(fan, phi, pairs=100),
            check_stanley_reisner(fan, phi, span=3),
        ):
            cname, passed, detail = check
            if not passed:
                ok = False
                details.append(f"{name}/{cname}: {detail}")
    elapsed = time.time() - t0
    ok = ok and elapsed < 60
    report(8, ok, f"weight/cocycle/vanishing/segment/nef/SR on {', '.join(BUILTIN_FANS)}, {elapsed:.1f}s")


def test_criterion_9_basepoint_independence(diagrams):
    ok = True
    details = []
    for name in ("A2", "K2"):
        d = diagrams[(name, 5)]
        ps = [(1, 0), (-1, -1)]
        points, tables = set(), set()
        for variant in range(5):
            z = chamber_point(d, 0, variant)
            points.add(z)
            tables.add(structure_constants(d, ps, 5, basepoint=z).entries)
        if len(points) != 5 or len(tables) != 1:
            ok = False
        details.append(f"{name}: 5 basepoints agree")
    report(9, ok, "; ".join(details))


def test_criterion_10_determinism_roundtrip(tmp_path):
    seed_text = "scatterkit seed v1\nrank 2\nskew_matrix 0 1 -1 0\nunfrozen 1 2\n"
    (tmp_path / "a2.seed").write_text(seed_text)

    def run(args):
        r = subprocess.run(
            [sys.executable, "-m", "scatterkit.cli", *args],
            capture_output=True,
            text=True,
            cwd=tmp_path,
        )
        assert r.returncode == 0, r.stderr
        return r

    ok = True
    commands = [
        ["scatter", "a2.seed", "--order", "6", "--out", "OUT", "--svg", "OUT.svg"],
        ["theta", "a2.seed", "--m", "1,0", "--basepoint=-2,-7/5", "--order", "5", "--out", "OUT"],
        ["multiply", "a2.seed", "--p", "1,0", "--p=-1,0", "--order", "5", "--out", "OUT"],
        ["mutate", "a2.seed", "--sequence", "1,2,1,2,1", "--out", "OUT"],
        ["verify", "a2.seed", "--level", "fast", "--out", "OUT"],
    ]
    for cmd in commands:
        run([a.replace("OUT", "one") for a in cmd])
        run([a.replace("OUT", "two") for a in cmd])
        if (tmp_path / "one").read_bytes() != (tmp_path / "two").read_bytes():
            ok = False
    if (tmp_path / "one.svg").read_bytes() != (tmp_path / "two.svg").read_bytes():
        ok = False
    # round-trips: every emitted file re-parses to an equal value
    run(["scatter", "a2.seed", "--order", "6", "--out", "d.txt"])
    d = formats.parse_diagram((tmp_path / "d.txt").read_text())
    ok = ok and formats.write_diagram(d) == (tmp_path / "d.txt").read_text()
    run(["theta", "d.txt", "--m", "1,0", "--basepoint=-2,-7/5", "--out", "t.txt"])
    parsed = formats.parse_theta((tmp_path / "t.txt").read_text())
    ok = ok and parsed[1] == (1, 0)
    run(["multiply", "d.txt", "--p", "1,0", "--p=-1,0", "--out", "m.txt"])
    seed, inputs, entries, order, bp = formats.parse_table((tmp_path / "m.txt").read_text())
    ok = ok and entries == {(0, 0): 1, (0, 1): 1}
    report(10, ok, "byte-identical reruns for scatter/theta/multiply/mutate; files re-parse equal")
