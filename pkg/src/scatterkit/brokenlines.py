"""Broken-line enumeration and local theta functions.

A broken line for exponent m ends at a generic point Q; each segment carries a
monomial whose exponent is the segment's negated travel velocity, and at each
wall crossing the monomial is multiplied by one term of f^{⟨n,·⟩} with the
signed normal positive on the departure side.  Enumeration searches backward
from Q: bends strictly decrease the exponent in the P-order, so total bend
degree ≤ k bounds the search.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NonGenericEndpoint
from .lattice import dot, is_zero, parallel, primitive, vadd, vneg, vscale, vsub
from .series import TruncatedMonoidSeries
from .scattering import ScatteringDiagram, CrossingEvent, cross


@dataclass(frozen=True)
class Segment:
    """One straight piece of a broken line, in forward order.

    ``start`` is the bend point beginning the segment (None for the unbounded
    first segment); the travel velocity is −exponent.
    """

    exponent: tuple
    coefficient: int
    start: tuple = None


@dataclass(frozen=True)
class BrokenLine:
    m: tuple
    endpoint: tuple
    segments: tuple  # Segment list, unbounded first

    @property
    def final_exponent(self):
        return self.segments[-1].exponent

    @property
    def final_coefficient(self):
        return self.segments[-1].coefficient

    @property
    def bend_points(self):
        return tuple(s.start for s in self.segments[1:])


@dataclass(frozen=True)
class ThetaFunction:
    m: tuple
    endpoint: tuple
    table: TruncatedMonoidSeries

    @property
    def coefficients(self):
        return dict(self.table.terms)


# ---------------------------------------------------------------------------
# enumeration


def _wall_power_coeff(function_coeffs, s, j):
    """Coefficient of z^{j·n₀} in f^s where f = 1 + Σ c_i z^{i·n₀} (s ≥ 1)."""
    # dense 1-d convolution up to j; cached by caller
    out = [1] + [0] * j
    base = [1] + list(function_coeffs[:j]) + [0] * max(0, j - len(function_coeffs))
    for _ in range(s):
        new = [0] * (j + 1)
        for a in range(j + 1):
            if out[a] == 0:
                continue
            for b in range(0, j + 1 - a):
                new[a + b] += out[a] * base[b]
        out = new
    return out[j]


class _Enumerator:
    def __init__(self, diagram: ScatteringDiagram, m, Q, k):
        self.d = diagram
        self.seed = diagram.seed
        self.m = tuple(m)
        self.Q = tuple(Fraction(x) for x in Q)
        self.k = k
        self._power_cache = {}
        for w in diagram.walls:
            if w.contains(self.Q):
                raise NonGenericEndpoint(f"endpoint {Q} lies on a wall support")

    def _bend_coeff(self, group, s, j):
        key = (group, s, j)
        if key not in self._power_cache:
            walls = group
            if len(walls) == 1:
                coeffs = walls[0].function.coeffs
            else:
                # co-supported parallel walls: multiply the functions first
                prod = [1]
                for w in walls:
                    base = [1] + list(w.function.coeffs)
                    new = [0] * (len(prod) + len(base) - 1)
                    for a, ca in enumerate(prod):
                        for b, cb in enumerate(base):
                            new[a + b] += ca * cb
                    prod = new
                coeffs = tuple(prod[1:])
            self._power_cache[key] = _wall_power_coeff(coeffs, s, j)
        return self._power_cache[key]

    def _crossings(self, pos, exp):
        """Wall groups hit by the backward ray pos + t·exp, t > 0, ordered by t.

        Returns [(t, point, (walls…))]; walls sharing a crossing point must have
        parallel directions, otherwise the configuration is non-generic.
        """
        hits = {}
        for w in self.d.walls:
            f = w.functional
            fe = dot(f, exp)
            if fe == 0:
                continue
            t = Fraction(-dot(f, pos), fe)
            if t <= 0:
                continue
            p = vadd(pos, vscale(t, exp))
            if is_zero(p):
                raise NonGenericEndpoint("a broken-line segment passes through the origin")
            if not w.contains(p, strict=True):
                if w.contains(p, strict=False):
                    raise NonGenericEndpoint("bend at a support's relative boundary")
                continue
            hits.setdefault(t, []).append((w, p))
        out = []
        for t in sorted(hits):
            group = hits[t]
            dirs = {primitive(w.direction) for w, _ in group}
            if len(dirs) > 1:
                raise NonGenericEndpoint("two non-parallel walls met at one point")
            out.append((t, group[0][1], tuple(w for w, _ in group)))
        return out

    def run(self):
        """All broken lines with asymptotic exponent m, total bend degree ≤ k."""
        if is_zero(self.m):
            zero = tuple(0 for _ in range(self.seed.rank))
            line = BrokenLine(self.m, self.Q, (Segment(zero, 1, None),))
            return [line]
        results = []
        for e_final in self._final_exponents():
            # bends discovered backward as (point, wall group, j, factor)
            self._search(self.Q, e_final, [], results)
        results.sort(key=lambda ln: (ln.final_exponent, ln.bend_points))
        for line in results:
            self._validate(line)
        return results

    def _final_exponents(self):
        out = []
        for off in _p_offsets(self.seed, self.k):
            e = vadd(self.m, off)
            if not is_zero(e):
                out.append(e)
        return out

    def _search(self, pos, exp, bends, results):
        if exp == self.m:
            segs = [Segment(self.m, 1, None)]
            running = 1
            for point, group, j, factor in reversed(bends):
                running *= factor
                prev_exp = segs[-1].exponent
                n0 = primitive(group[0].direction)
                segs.append(Segment(vadd(prev_exp, vscale(j, n0)), running, point))
            results.append(BrokenLine(self.m, self.Q, tuple(segs)))
            return
        remaining = vsub(exp, self.m)
        budget = self.seed.degree(remaining)
        if budget is None or budget == 0:
            return
        for t, p, group in self._crossings(pos, exp):
            n0 = primitive(group[0].direction)
            dn0 = self.seed.degree(n0)
            f = group[0].functional
            s = dot(f, exp)
            if s == 0:
                continue
            s = abs(s)
            jmax = budget // dn0
            for j in range(1, jmax + 1):
                step = vscale(j, n0)
                rem2 = vsub(remaining, step)
                if self.seed.degree(rem2) is None:
                    continue
                factor = self._bend_coeff(group, s, j)
                if factor == 0:
                    continue
                e_prev = vsub(exp, step)
                self._search(p, e_prev, bends + [(p, group, j, factor)], results)

    # -- forward re-validation -------------------------------------------------

    def _validate(self, line: BrokenLine):
        segs = line.segments
        assert segs[0].coefficient == 1 and segs[0].exponent == self.m
        for prev, cur in zip(segs, segs[1:]):
            inc = vsub(cur.exponent, prev.exponent)
            d = self.seed.degree(inc)
            assert d is not None and d > 0, "bend increment must lie in P \\ 0"
            p = cur.start
            groups = [w for w in self.d.walls if w.contains(p, strict=True)]
            assert groups, "bend point off every wall support"
            n0 = primitive(groups[0].direction)
            assert parallel(inc, n0), "bend increment not parallel to the wall direction"
            f = groups[0].functional
            s = dot(f, prev.exponent)
            assert s != 0, "bend on a wall pairing to zero"
            j = self.seed.degree(inc) // self.seed.degree(n0)
            expect = self._bend_coeff(tuple(groups), abs(s), j)
            assert cur.coefficient == prev.coefficient * expect, "bend factor mismatch"
        # geometric chaining: each segment travels with velocity −exponent
        pts = list(line.bend_points) + [self.Q]
        for i in range(len(pts) - 1):
            seg_exp = segs[i + 1].exponent
            delta = vsub(pts[i + 1], pts[i])
            tdir = vneg(seg_exp)
            idx = next(j for j, a in enumerate(tdir) if a != 0)
            lam = Fraction(delta[idx], tdir[idx])
            assert lam > 0 and all(
                delta[j] == lam * tdir[j] for j in range(len(delta))
            ), "segment does not travel along −exponent"
        cum_deg = self.seed.degree(vsub(line.final_exponent, self.m))
        assert cum_deg is not None and cum_deg <= self.k


def _p_offsets(seed, k):
    """All offsets of P with degree ≤ k, sorted by (degree, lex)."""
    gens = seed.generators
    out = [tuple(0 for _ in range(seed.rank))]
    frontier = {out[0]}
    for _ in range(k):
        new = set()
        for o in frontier:
            for g in gens:
                new.add(vadd(o, g))
        new -= set(out)
        out.extend(sorted(new))
        frontier = new
    return out


def enumerate_broken_lines(diagram, m, Q, k=None):
    """The complete finite list of broken lines, deterministic order."""
    k = diagram.order if k is None else k
    d = diagram if k == diagram.order else diagram.truncate(k)
    return _Enumerator(d, m, Q, k).run()


def theta(diagram, m, Q, k=None):
    """Local theta function: sum of final monomials over all broken lines."""
    k = diagram.order if k is None else k
    lines = enumerate_broken_lines(diagram, m, Q, k)
    seed = diagram.seed
    acc = {}
    for ln in lines:
        off = vsub(ln.final_exponent, tuple(m))
        acc[off] = acc.get(off, 0) + ln.final_coefficient
    table = TruncatedMonoidSeries.make(seed, tuple(m), acc, k)
    zero = tuple(0 for _ in range(seed.rank))
    assert table.coefficient(zero) == 1, "theta leading term must be exactly z^m"
    return ThetaFunction(tuple(m), tuple(Fraction(x) for x in Q), table)


_theta_cache = {}


def theta_cached(diagram, m, Q, k=None):
    """Memoized theta table; diagrams are immutable values so content-keying is safe."""
    k = diagram.order if k is None else k
    key = (diagram, tuple(m), tuple(Q), k)
    if key not in _theta_cache:
        _theta_cache[key] = theta(diagram, m, Q, k)
    return _theta_cache[key]


def clear_theta_cache():
    _theta_cache.clear()


# ---------------------------------------------------------------------------
# consistency across a wall


def _wall_interior_point(diagram, wall, variant=0):
    """Generic rational point in the wall's relative interior, off other walls."""
    if wall.support.kind == "hyperplane":
        base = wall.direction
        candidates = [vscale(Fraction(1 + variant, 2 + variant), base),
                      vscale(Fraction(-(1 + variant), 2 + variant), base)]
    else:
        g = wall.support.generators[0]
        candidates = [vscale(Fraction(1 + variant, 2 + variant), g)]
    for p in candidates:
        clash = [w for w in diagram.walls if w is not wall and w.contains(p)
                 and not parallel(w.direction, wall.direction)]
        if not clash and not is_zero(p):
            return p
    raise NonGenericEndpoint("no generic interior point on the wall")  # pragma: no cover


def theta_consistency_check(diagram, m, wall, k=None, return_data=False):
    """Prop.-21.34-style check: crossing the wall maps theta at a to theta at b.

    Picks certified points a, b on either side near a generic interior point,
    applies the crossing with the departure-side convention, and compares the
    tables exactly modulo the truncation.  Degenerate side points are re-picked.
    """
    k = diagram.order if k is None else k
    d = diagram if k == diagram.order else diagram.truncate(k)
    match = [w for w in d.walls if w.direction == wall.direction
             and w.support == wall.support]
    if not match:
        raise ValueError(f"wall {wall.direction} is trivial at order {k}")
    wall = match[0]
    f = wall.functional
    u = next(
        v
        for v in _unit_vectors(d.seed.rank)
        + [vadd(a, b) for a in _unit_vectors(d.seed.rank) for b in _unit_vectors(d.seed.rank)]
        if dot(f, v) != 0
    )
    for variant in range(8):
        x = _wall_interior_point(d, wall, variant)
        delta = Fraction(1, 2 + variant)
        for _ in range(40):
            a = vadd(x, vscale(delta, u))
            b = vadd(x, vscale(-delta, u))
            delta /= 2
            if any(w.contains(a) or w.contains(b) for w in d.walls):
                continue
            if _walls_between(d, a, b) != [wall]:
                continue
            try:
                theta_a = theta_cached(d, m, a, k).table
                theta_b = theta_cached(d, m, b, k).table
            except NonGenericEndpoint:
                continue
            eps = 1 if dot(f, a) > 0 else -1
            ev = CrossingEvent(wall, x, eps)
            transported = cross(ev, theta_a)
            ok = transported == theta_b
            if return_data:
                return ok, {"a": a, "b": b, "transported": transported, "theta_b": theta_b}
            return ok
    raise NonGenericEndpoint("could not isolate the wall between generic points")  # pragma: no cover


def _unit_vectors(rank):
    return [tuple(1 if j == i else 0 for j in range(rank)) for i in range(rank)]


def _walls_between(diagram, a, b):
    """Walls crossed by the open segment a→b (each once), else raise."""
    from .scattering import _segment_crossings

    return [ev.wall for _, ev in _segment_crossings(diagram, a, b)]


def chamber_theta(diagram, m, sector_index, k=None):
    """Chamber-indexed theta: computed at the chamber's deterministic representative."""
    from .scattering import chamber_point

    for variant in range(8):
        try:
            Q = chamber_point(diagram, sector_index, variant)
            return theta_cached(diagram, m, Q, k)
        except NonGenericEndpoint:
            continue
    raise NonGenericEndpoint("no usable representative in the chamber")  # pragma: no cover
