"""Line-oriented text grammars for every artifact the CLI reads or writes.

All files are UTF-8, LF-terminated, canonically sorted, and round-trip
byte-identically: parse(write(x)) == x and write(parse(text)) == text.
Rationals are rendered as ``a/b`` (or ``a`` when integral); indices in seed
and fan files are 1-based.
"""

from __future__ import annotations

from fractions import Fraction

from .cluster import ClusterSeed, LaurentPolynomial
from .errors import ParseError
from .lattice import Seed
from .scattering import ScatteringDiagram, Support, Wall
from .series import WallFunction
from .toric import Fan

MAGIC = "scatterkit"


def _fmt_frac(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _parse_frac(tok: str, lineno) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad rational {tok!r}", lineno)


def _parse_int(tok: str, lineno) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"bad integer {tok!r}", lineno)


class _Reader:
    def __init__(self, text):
        self.lines = text.splitlines()
        self.pos = 0

    @property
    def lineno(self):
        return self.pos  # 0-based position == 1-based number of consumed line

    def next(self):
        while self.pos < len(self.lines):
            line = self.lines[self.pos].strip()
            self.pos += 1
            if line:
                return line
        raise ParseError("unexpected end of file", self.pos)

    def expect(self, keyword):
        line = self.next()
        toks = line.split()
        if toks[0] != keyword:
            raise ParseError(f"expected {keyword!r}, found {toks[0]!r}", self.lineno)
        return toks[1:]

    def done(self):
        while self.pos < len(self.lines):
            if self.lines[self.pos].strip():
                raise ParseError("trailing content", self.pos + 1)
            self.pos += 1


def _expect_magic(r: _Reader, kind):
    toks = r.next().split()
    if len(toks) != 3 or toks[0] != MAGIC or toks[1] != kind or toks[2] != "v1":
        raise ParseError(f"not a {MAGIC} {kind} v1 file", r.lineno)


# ---------------------------------------------------------------------------
# seeds


def _seed_lines(seed: Seed):
    flat = " ".join(str(x) for row in seed.form.matrix for x in row)
    unfrozen = " ".join(str(i + 1) for i in seed.unfrozen)
    return [
        f"rank {seed.rank}",
        f"skew_matrix {flat}".rstrip(),
        f"unfrozen {unfrozen}".rstrip(),
    ]


def _read_seed_lines(r: _Reader) -> Seed:
    rank = _parse_int(r.expect("rank")[0], r.lineno)
    toks = r.expect("skew_matrix")
    if len(toks) != rank * rank:
        raise ParseError(f"skew_matrix needs {rank*rank} entries", r.lineno)
    vals = [_parse_int(t, r.lineno) for t in toks]
    rows = [vals[i * rank : (i + 1) * rank] for i in range(rank)]
    toks = r.expect("unfrozen")
    unfrozen = [_parse_int(t, r.lineno) - 1 for t in toks]
    if any(i < 0 or i >= rank for i in unfrozen):
        raise ParseError("unfrozen index out of range", r.lineno)
    try:
        return Seed.make(rows, unfrozen)
    except ValueError as err:
        raise ParseError(str(err), r.lineno)


def write_seed(seed: Seed) -> str:
    return "\n".join([f"{MAGIC} seed v1"] + _seed_lines(seed)) + "\n"


def parse_seed(text: str) -> Seed:
    r = _Reader(text)
    _expect_magic(r, "seed")
    seed = _read_seed_lines(r)
    r.done()
    return seed


# ---------------------------------------------------------------------------
# diagrams


def _wall_sort_key(w: Wall):
    return (
        0 if w.initial else 1,
        w.direction,
        w.support.kind,
        w.support.generators,
    )


def write_diagram(d: ScatteringDiagram) -> str:
    lines = [f"{MAGIC} diagram v1"] + _seed_lines(d.seed) + [f"order {d.order}"]
    walls = sorted(d.walls, key=_wall_sort_key)
    lines.append(f"walls {len(walls)}")
    for w in walls:
        direction = " ".join(str(x) for x in w.direction)
        if w.support.kind == "hyperplane":
            support = "hyperplane"
        else:
            gens = " ".join(" ".join(str(x) for x in g) for g in w.support.generators)
            support = f"cone {gens}"
        origin = "initial" if w.initial else "generated"
        coeffs = " ".join(str(c) for c in w.function.coeffs)
        lines.append(
            f"wall direction {direction} ; support {support} ; origin {origin} ; coeffs {coeffs}".rstrip()
        )
    return "\n".join(lines) + "\n"


def parse_diagram(text: str) -> ScatteringDiagram:
    r = _Reader(text)
    _expect_magic(r, "diagram")
    seed = _read_seed_lines(r)
    order = _parse_int(r.expect("order")[0], r.lineno)
    nwalls = _parse_int(r.expect("walls")[0], r.lineno)
    walls = []
    for _ in range(nwalls):
        toks = r.expect("wall")
        fields = {}
        current = None
        for tok in toks:
            if tok == ";":
                current = None
            elif current is None:
                current = tok
                fields[current] = []
            else:
                fields[current].append(tok)
        try:
            direction = tuple(_parse_int(t, r.lineno) for t in fields["direction"])
            sup_toks = fields["support"]
            if sup_toks[0] == "hyperplane":
                support = Support.hyperplane()
            elif sup_toks[0] == "cone":
                flat = [_parse_int(t, r.lineno) for t in sup_toks[1:]]
                if len(flat) % seed.rank:
                    raise ParseError("cone generators have wrong length", r.lineno)
                gens = tuple(
                    tuple(flat[i : i + seed.rank])
                    for i in range(0, len(flat), seed.rank)
                )
                support = Support("cone", gens)
            else:
                raise ParseError(f"unknown support kind {sup_toks[0]!r}", r.lineno)
            initial = fields["origin"] == ["initial"]
            coeffs = tuple(_parse_int(t, r.lineno) for t in fields.get("coeffs", []))
            func = WallFunction.make(seed, direction, coeffs, order)
            walls.append(Wall(seed, direction, support, func, initial))
        except KeyError as err:
            raise ParseError(f"wall record missing field {err}", r.lineno)
        except ValueError as err:
            raise ParseError(str(err), r.lineno)
    r.done()
    return ScatteringDiagram(seed, order, tuple(walls))


# ---------------------------------------------------------------------------
# theta dumps


def write_theta(theta_fn, include_lines=None) -> str:
    """Serialize a ThetaFunction; pass the broken-line list to append a trace."""
    t = theta_fn.table
    seed = t.seed
    lines = [f"{MAGIC} theta v1"] + _seed_lines(seed) + [f"order {t.order}"]
    lines.append("m " + " ".join(str(x) for x in theta_fn.m))
    lines.append("basepoint " + " ".join(_fmt_frac(x) for x in theta_fn.endpoint))
    lines.append("base " + " ".join(str(x) for x in t.base))
    lines.append(f"terms {len(t.terms)}")
    for off, c in t.terms:
        lines.append("term " + " ".join(str(x) for x in off) + f" {c}")
    if include_lines is not None:
        lines.append(f"lines {len(include_lines)}")
        for ln in include_lines:
            bits = ["line exponent " + " ".join(str(x) for x in ln.final_exponent)]
            bits.append(f"coefficient {ln.final_coefficient}")
            bends = []
            for seg in ln.segments[1:]:
                pt = " ".join(_fmt_frac(x) for x in seg.start)
                bends.append(f"{pt} exp " + " ".join(str(x) for x in seg.exponent))
            bits.append("bends " + " , ".join(bends) if bends else "bends")
            lines.append(" ; ".join(bits))
    return "\n".join(lines) + "\n"


def parse_theta(text: str):
    """Parse a theta dump into (seed, m, basepoint, table-dict, order)."""
    r = _Reader(text)
    _expect_magic(r, "theta")
    seed = _read_seed_lines(r)
    order = _parse_int(r.expect("order")[0], r.lineno)
    m = tuple(_parse_int(t, r.lineno) for t in r.expect("m"))
    basepoint = tuple(_parse_frac(t, r.lineno) for t in r.expect("basepoint"))
    base = tuple(_parse_int(t, r.lineno) for t in r.expect("base"))
    nterms = _parse_int(r.expect("terms")[0], r.lineno)
    table = {}
    for _ in range(nterms):
        toks = r.expect("term")
        off = tuple(_parse_int(t, r.lineno) for t in toks[: seed.rank])
        table[off] = _parse_int(toks[seed.rank], r.lineno)
    return seed, m, basepoint, base, table, order


# ---------------------------------------------------------------------------
# structure-constant tables


def write_table(seed: Seed, table) -> str:
    lines = [f"{MAGIC} table v1"] + _seed_lines(seed) + [f"order {table.order}"]
    lines.append(
        "basepoint " + " ".join(_fmt_frac(x) for x in table.basepoint.point)
    )
    lines.append(f"inputs {len(table.inputs)}")
    for p in table.inputs:
        lines.append("p " + " ".join(str(x) for x in p))
    lines.append(f"entries {len(table.entries)}")
    for q, c in table.entries:
        lines.append("entry " + " ".join(str(x) for x in q) + f" {c}")
    return "\n".join(lines) + "\n"


def parse_table(text: str):
    """Parse a table file into (seed, inputs, entries, order, basepoint)."""
    r = _Reader(text)
    _expect_magic(r, "table")
    seed = _read_seed_lines(r)
    order = _parse_int(r.expect("order")[0], r.lineno)
    basepoint = tuple(_parse_frac(t, r.lineno) for t in r.expect("basepoint"))
    nin = _parse_int(r.expect("inputs")[0], r.lineno)
    inputs = []
    for _ in range(nin):
        inputs.append(tuple(_parse_int(t, r.lineno) for t in r.expect("p")))
    nent = _parse_int(r.expect("entries")[0], r.lineno)
    entries = {}
    for _ in range(nent):
        toks = r.expect("entry")
        q = tuple(_parse_int(t, r.lineno) for t in toks[: seed.rank])
        entries[q] = _parse_int(toks[seed.rank], r.lineno)
    r.done()
    return seed, tuple(inputs), entries, order, basepoint


# ---------------------------------------------------------------------------
# fans


def write_fan(fan: Fan) -> str:
    lines = [f"{MAGIC} fan v1", f"rank {fan.rank}", f"rays {fan.nrays}"]
    for v in fan.rays:
        lines.append("ray " + " ".join(str(x) for x in v))
    lines.append(f"cones {len(fan.cones)}")
    for i, j in fan.cones:
        lines.append(f"cone {i + 1} {j + 1}")
    return "\n".join(lines) + "\n"


def parse_fan(text: str) -> Fan:
    r = _Reader(text)
    _expect_magic(r, "fan")
    rank = _parse_int(r.expect("rank")[0], r.lineno)
    nrays = _parse_int(r.expect("rays")[0], r.lineno)
    rays = []
    for _ in range(nrays):
        rays.append(tuple(_parse_int(t, r.lineno) for t in r.expect("ray")))
    ncones = _parse_int(r.expect("cones")[0], r.lineno)
    cones = []
    for _ in range(ncones):
        toks = r.expect("cone")
        cones.append(tuple(_parse_int(t, r.lineno) - 1 for t in toks))
    r.done()
    try:
        return Fan.make(rays, cones, rank)
    except Exception as err:
        raise ParseError(str(err), r.lineno)


# ---------------------------------------------------------------------------
# mutation traces


def _poly_lines(label, poly: LaurentPolynomial):
    lines = [f"{label} terms {len(poly.terms)}"]
    for e, c in poly.terms:
        lines.append("term " + " ".join(str(x) for x in e) + f" {c}")
    return lines


def write_mutation_trace(seed: ClusterSeed, sequence, states) -> str:
    """States: list of (matrix_rows, variables) after 0, 1, 2, … mutations."""
    n = seed.rank
    lines = [f"{MAGIC} mutation-trace v1", f"rank {n}"]
    flat = " ".join(str(x) for row in seed.matrix for x in row)
    lines.append(f"exchange_matrix {flat}")
    lines.append("unfrozen " + " ".join(str(i + 1) for i in seed.unfrozen))
    lines.append("sequence " + " ".join(str(k + 1) for k in sequence))
    for step, (matrix, variables) in enumerate(states):
        head = f"step {step}" if step == 0 else f"step {step} mutate {sequence[step-1]+1}"
        lines.append(head)
        lines.append("matrix " + " ".join(str(x) for row in matrix for x in row))
        for i, v in enumerate(variables):
            lines.extend(_poly_lines(f"var {i + 1}", v))
    return "\n".join(lines) + "\n"


def parse_mutation_trace(text: str):
    r = _Reader(text)
    _expect_magic(r, "mutation-trace")
    rank = _parse_int(r.expect("rank")[0], r.lineno)
    flat = [_parse_int(t, r.lineno) for t in r.expect("exchange_matrix")]
    rows = [flat[i * rank : (i + 1) * rank] for i in range(rank)]
    unfrozen = [_parse_int(t, r.lineno) - 1 for t in r.expect("unfrozen")]
    seed = ClusterSeed.make(rows, unfrozen)
    seq = [_parse_int(t, r.lineno) - 1 for t in r.expect("sequence")]
    states = []
    for step in range(len(seq) + 1):
        r.expect("step")
        flat = [_parse_int(t, r.lineno) for t in r.expect("matrix")]
        matrix = tuple(tuple(flat[i * rank : (i + 1) * rank]) for i in range(rank))
        variables = []
        for i in range(rank):
            toks = r.expect("var")
            nterms = _parse_int(toks[-1], r.lineno)
            terms = {}
            for _ in range(nterms):
                ts = r.expect("term")
                e = tuple(_parse_int(t, r.lineno) for t in ts[:rank])
                terms[e] = _parse_int(ts[rank], r.lineno)
            variables.append(LaurentPolynomial.make(rank, terms))
        states.append((matrix, tuple(variables)))
    r.done()
    return seed, seq, states
