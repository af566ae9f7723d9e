"""Walls, wall-crossing automorphisms, path-ordered products, and completion.

All diagrams here are central: every support is a cone with apex 0 inside the
skew-perpendicular hyperplane of its direction vector.  Rank-2 completion
solves the consistency condition order by order; higher-rank diagrams can be
imported from file and used read-only by every other operation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NonTransversalPath, UnsupportedRank
from .lattice import (
    Seed,
    angle_key,
    dot,
    is_zero,
    parallel,
    primitive,
    vadd,
    vneg,
    vscale,
    vsub,
)
from .series import TruncatedMonoidSeries, WallFunction

# ---------------------------------------------------------------------------
# supports and walls


@dataclass(frozen=True)
class Support:
    """Cone inside a wall hyperplane: the full hyperplane or a simplicial cone.

    ``generators`` is empty for a full hyperplane; otherwise it lists linearly
    independent integer generators (a single one for the rank-2 rays the
    completion produces).
    """

    kind: str  # "hyperplane" | "cone"
    generators: tuple = ()

    @staticmethod
    def hyperplane():
        return Support("hyperplane")

    @staticmethod
    def ray(g):
        return Support("cone", (tuple(g),))

    def contains(self, functional, point, strict=False):
        """Exact membership of a rational point; ``strict`` asks for the relative interior.

        ``functional`` is the wall's ⟨n₀,·⟩ covector defining the ambient hyperplane.
        """
        if dot(functional, point) != 0:
            return False
        if self.kind == "hyperplane":
            return True
        gens = self.generators
        if len(gens) == 1:
            g = gens[0]
            idx = next((i for i, a in enumerate(g) if a != 0), None)
            if idx is None:
                return False
            lam = Fraction(point[idx], g[idx])
            if any(point[i] != lam * g[i] for i in range(len(g))):
                return False
            return lam > 0 if strict else lam >= 0
        # simplicial cone: solve the (independent) generator system exactly
        from .lattice import solve_rational

        rows = [[g[i] for g in gens] for i in range(len(point))]
        sol = solve_rational(rows, list(point))
        if sol is None:
            return False
        return all((lam > 0 if strict else lam >= 0) for lam in sol)


@dataclass(frozen=True)
class Wall:
    """(support, direction, function): support ⊆ {⟨direction,·⟩ = 0}."""

    seed: Seed
    direction: tuple  # n₀, primitive, in P
    support: Support
    function: WallFunction
    initial: bool = False

    def __post_init__(self):
        n0 = self.direction
        d = self.seed.degree(n0)
        if d is None or d == 0:
            raise ValueError("wall direction must lie in P \\ 0")
        if tuple(primitive(n0)) != tuple(n0):
            raise ValueError("wall direction must be primitive")
        f = self.functional
        for g in self.support.generators:
            if dot(f, g) != 0:
                raise ValueError("support generator off the wall hyperplane")
        if self.function.direction != self.direction:
            raise ValueError("wall function direction must match the wall")

    @property
    def functional(self):
        return self.seed.form.functional(self.direction)

    def contains(self, point, strict=False):
        return self.support.contains(self.functional, point, strict=strict)


def is_incoming(wall: Wall) -> bool:
    """True iff the wall's monomial direction lies in its support (exact test)."""
    n0 = tuple(Fraction(a) for a in wall.direction)
    return wall.support.contains(wall.functional, n0)


@dataclass(frozen=True)
class ScatteringDiagram:
    seed: Seed
    order: int
    walls: tuple

    @property
    def generated_walls(self):
        return tuple(w for w in self.walls if not w.initial)

    @property
    def initial_walls(self):
        return tuple(w for w in self.walls if w.initial)

    def truncate(self, new_order):
        if new_order > self.order:
            raise ValueError("cannot extend a diagram's order")
        walls = []
        for w in self.walls:
            f = w.function.truncate(new_order)
            if not w.initial and f.is_trivial():
                continue
            walls.append(Wall(w.seed, w.direction, w.support, f, w.initial))
        return ScatteringDiagram(self.seed, new_order, tuple(walls))


def initial_diagram(seed: Seed, k: int) -> ScatteringDiagram:
    """One incoming wall (e^⊥, 1 + z^e) per unfrozen generator e."""
    if k < 0:
        raise ValueError("order must be nonnegative")
    walls = []
    for e in seed.generators:
        func = WallFunction.make(seed, e, (1,), k)
        walls.append(Wall(seed, e, Support.hyperplane(), func, initial=True))
    return ScatteringDiagram(seed, k, tuple(walls))


# ---------------------------------------------------------------------------
# crossing events and path-ordered products


@dataclass(frozen=True)
class CrossingEvent:
    """A transversal crossing: wall, exact point, and departure-side sign.

    ``epsilon`` flips ⟨n₀,·⟩ so the signed normal is strictly positive at the
    point the path leaves when it crosses.
    """

    wall: Wall
    point: tuple
    epsilon: int

    def signed_normal(self):
        return vscale(self.epsilon, self.wall.functional)


def cross(event: CrossingEvent, s: TruncatedMonoidSeries) -> TruncatedMonoidSeries:
    """Apply the wall-crossing map z^v ↦ z^v f^{n(v)} term by term."""
    n = event.signed_normal()
    k = s.order
    f = event.wall.function.to_series().truncate(min(k, event.wall.function.order))
    powers = {}
    acc = None
    for off, c in s.terms:
        v = vadd(s.base, off)
        p = dot(n, v)
        if p not in powers:
            powers[p] = f.power(p, k)
        piece = powers[p].scale(c)
        term = TruncatedMonoidSeries.make(s.seed, vadd(s.base, off), dict(piece.terms), k)
        term = term.rebase(s.base)
        acc = term if acc is None else acc.add(term)
    if acc is None:
        return s
    return acc


def _segment_crossings(diagram, a, b):
    """Crossing events for the open segment a→b, ordered by parameter.

    Raises NonTransversalPath if a crossing hits the origin, a support's
    relative boundary, or two walls at the same parameter.
    """
    events = []
    direction = vsub(b, a)
    for w in diagram.walls:
        f = w.functional
        fa = dot(f, a)
        fdir = dot(f, direction)
        if fdir == 0:
            if fa == 0 and any(
                w.contains(vadd(a, vscale(Fraction(t, 7), direction)))
                for t in range(1, 7)
            ):
                raise NonTransversalPath("path segment runs inside a wall support")
            continue
        t = Fraction(-fa, fdir)
        if not (0 < t < 1):
            continue
        p = vadd(a, vscale(t, direction))
        if is_zero(p):
            raise NonTransversalPath("path crosses the origin joint")
        if not w.contains(p, strict=True):
            if w.contains(p, strict=False):
                raise NonTransversalPath("path meets a support's relative boundary")
            continue
        eps = -1 if fdir > 0 else 1
        events.append((t, CrossingEvent(w, p, eps)))
    events.sort(key=lambda e: e[0])
    for (t1, e1), (t2, e2) in zip(events, events[1:]):
        if t1 == t2:
            raise NonTransversalPath(
                f"two walls crossed at the same parameter t={t1}"
            )
    return events


@dataclass(frozen=True)
class StraightPath:
    """Piecewise-straight path with exact rational breakpoints; optionally closed."""

    points: tuple
    closed: bool = False

    @staticmethod
    def through(points, closed=False):
        return StraightPath(tuple(tuple(Fraction(x) for x in p) for p in points), closed)

    def segments(self):
        pts = self.points
        segs = list(zip(pts, pts[1:]))
        if self.closed and len(pts) > 1:
            segs.append((pts[-1], pts[0]))
        return segs


def path_crossings(diagram: ScatteringDiagram, path: StraightPath):
    """All crossing events along the path in traversal order."""
    for p in path.points:
        for w in diagram.walls:
            if w.contains(p):
                raise NonTransversalPath(f"path vertex {p} lies on a wall")
    events = []
    for a, b in path.segments():
        events.extend(ev for _, ev in _segment_crossings(diagram, a, b))
    return events


def path_ordered_product(diagram, path, s):
    """Compose the wall-crossing maps met along the path, in traversal order."""
    for ev in path_crossings(diagram, path):
        s = cross(ev, s)
    return s


# ---------------------------------------------------------------------------
# rays, chambers, loops (rank 2)


def diagram_ray_directions(diagram):
    """Primitive ray directions of all wall supports, sorted counterclockwise."""
    if diagram.seed.rank != 2:
        raise UnsupportedRank("ray decomposition requires rank 2")
    dirs = set()
    for w in diagram.walls:
        if w.support.kind == "hyperplane":
            g = primitive(w.direction)
            dirs.add(g)
            dirs.add(vneg(g))
        else:
            for g in w.support.generators:
                dirs.add(primitive(g))
    return tuple(sorted(dirs, key=angle_key))


def _perp(v):
    return (-v[1], v[0])


def chamber_sectors(diagram):
    """Open angular sectors (as ccw boundary-ray pairs) of the wall arrangement."""
    rays = diagram_ray_directions(diagram)
    if not rays:
        return ()
    if len(rays) == 1:
        g = rays[0]
        return ((g, g),)
    return tuple((rays[i], rays[(i + 1) % len(rays)]) for i in range(len(rays)))


def _sector_interior(a, b, lam):
    """Rational direction strictly inside the ccw sector from ray a to ray b.

    ``lam`` in (0,1) sweeps the sector counterclockwise.
    """
    if a == b:  # single ray: the sector is everything else, swept ccw
        fan = (
            vadd(a, _perp(a)),
            _perp(a),
            vadd(vneg(a), _perp(a)),
            vneg(a),
            vadd(vneg(a), vneg(_perp(a))),
            vneg(_perp(a)),
            vadd(a, vneg(_perp(a))),
        )
        idx = min(int(lam * len(fan)), len(fan) - 1)
        return tuple(Fraction(x) for x in fan[idx])
    if b == vneg(a):  # half-plane sector
        d = vadd(_perp(a), vscale(1 - 2 * lam, a))
        return tuple(Fraction(x) for x in d)
    d = vadd(vscale(1 - lam, a), vscale(lam, b))
    return tuple(Fraction(x) for x in d)


def sector_directions(diagram, reps_per_sector=1):
    """Interior rational directions, ``reps_per_sector`` per chamber, ccw order."""
    sectors = chamber_sectors(diagram)
    if not sectors:
        base = [(1, 0), (0, 1), (-1, 0), (0, -1)]
        return [tuple(Fraction(x) for x in v) for v in base]
    out = []
    for a, b in sectors:
        for i in range(reps_per_sector):
            lam = Fraction(2 * i + 1, 2 * reps_per_sector)
            out.append(_sector_interior(a, b, lam))
    return out


def chamber_point(diagram, sector_index=0, variant=0):
    """Certified-generic rational point inside the given chamber.

    ``variant`` picks among deterministic interior representatives (used to
    re-pick when an enumeration hits a degenerate configuration).
    """
    sectors = chamber_sectors(diagram)
    if not sectors:
        p = (Fraction(1 + variant, 1 + 2 * variant), Fraction(1, 3 + variant))
    else:
        a, b = sectors[sector_index % len(sectors)]
        lam = Fraction(2 * variant + 1, 2 * variant + 3)
        d = _sector_interior(a, b, lam)
        scale = Fraction(2 + variant, 2)
        p = vscale(scale, d)
    for w in diagram.walls:
        if w.contains(p):
            raise NonTransversalPath("chamber representative landed on a wall")
    return p


def generic_loop(diagram, radii=None):
    """Closed counterclockwise star-shaped loop around the origin."""
    sectors = chamber_sectors(diagram)
    reps = 1 if len(sectors) >= 3 else (3 if not sectors else (3 + len(sectors)) // max(len(sectors), 1))
    dirs = sector_directions(diagram, reps_per_sector=max(1, reps))
    if radii is None:
        radii = [Fraction(1)] * len(dirs)
    pts = [vscale(r, d) for d, r in zip(dirs, radii)]
    return StraightPath.through(pts, closed=True)


def random_generic_loop(diagram, rng):
    """Random star-shaped generic loop; retries until transversal."""
    sectors = chamber_sectors(diagram)
    reps = 1 if len(sectors) >= 3 else (3 if not sectors else (3 + len(sectors)) // max(len(sectors), 1))
    dirs = sector_directions(diagram, reps_per_sector=max(1, reps))
    for _ in range(64):
        radii = [Fraction(rng.randint(1, 40), rng.randint(1, 40)) for _ in dirs]
        start = rng.randrange(len(dirs))
        loop = StraightPath.through(
            [vscale(r, d) for d, r in zip(dirs[start:] + dirs[:start], radii)],
            closed=True,
        )
        try:
            path_crossings(diagram, loop)
        except NonTransversalPath:  # pragma: no cover - star-shaped loops are generic
            continue
        return loop
    raise NonTransversalPath("could not draw a generic loop")  # pragma: no cover


def loop_defect(diagram, loop, order=None):
    """Images of the generators z^e around the loop, minus the identity.

    Returns a dict e → {offset: coefficient} of nonzero discrepancy terms.
    """
    k = diagram.order if order is None else order
    d = diagram if order is None else diagram.truncate(order)
    out = {}
    for e in d.seed.generators:
        s = TruncatedMonoidSeries.monomial(d.seed, e, k)
        img = path_ordered_product(d, loop, s)
        defect = dict(img.terms)
        zero = tuple(0 for _ in range(d.seed.rank))
        defect[zero] = defect.get(zero, 0) - 1
        out[e] = {o: c for o, c in defect.items() if c != 0}
    return out


def is_consistent(diagram, loop=None, order=None):
    loop = generic_loop(diagram) if loop is None else loop
    return all(not v for v in loop_defect(diagram, loop, order).values())


# ---------------------------------------------------------------------------
# completion (rank 2)


def complete(seed: Seed, k: int) -> ScatteringDiagram:
    """Consistent finite-order diagram: initial walls plus outgoing ray walls.

    Order-by-order: the loop defect at degree ℓ decomposes over primitive ray
    directions; each ray's unique canceling coefficient is solved from the
    first-order response ε⟨n₀,e⟩ and verified against both generators.
    """
    if seed.rank > 2:
        raise UnsupportedRank(f"completion implemented for rank ≤ 2, got {seed.rank}")
    if k < 0:
        raise ValueError("order must be nonnegative")
    base = initial_diagram(seed, k)
    if len(seed.unfrozen) < 2 or k == 0 or seed.rank < 2:
        return base

    generated = {}  # primitive direction -> WallFunction

    def assemble(order):
        walls = list(initial_diagram(seed, order).walls)
        for n0 in sorted(generated, key=lambda v: (angle_key(vneg(v)), v)):
            func = generated[n0].truncate(order)
            if func.is_trivial():
                continue
            walls.append(Wall(seed, n0, Support.ray(vneg(n0)), func, initial=False))
        return ScatteringDiagram(seed, order, tuple(walls))

    def ray_epsilon(n0):
        # departure-side sign when a ccw loop crosses the outgoing ray -R+·n0:
        # the tangent there is perp(-n0), so epsilon = -sign(⟨n0, perp(-n0)⟩)
        f = seed.form.functional(n0)
        tangent = _perp(vneg(n0))
        val = dot(f, tangent)
        assert val != 0, "nondegenerate form cannot give a tangent pairing of zero"
        return -1 if val > 0 else 1

    for ell in range(1, k + 1):
        diag = assemble(ell)
        loop = generic_loop(diag)
        defects = loop_defect(diag, loop, order=ell)
        by_offset = {}
        for e, table in defects.items():
            for off, c in table.items():
                if seed.degree(off) != ell:
                    raise AssertionError(
                        f"defect at unexpected degree {seed.degree(off)} during order {ell}"
                    )
                by_offset.setdefault(off, {})[e] = c
        for off in sorted(by_offset):
            n0 = primitive(off)
            if seed.degree(n0) is None:
                raise AssertionError(f"defect direction {off} outside P")
            j = seed.degree(off) // seed.degree(n0)
            eps = ray_epsilon(n0)
            votes = []
            for e in seed.generators:
                s = seed.form.pair(n0, e)
                c = by_offset[off].get(e, 0)
                if s == 0:
                    if c != 0:
                        raise AssertionError("defect on a direction pairing to zero")
                    continue
                votes.append(Fraction(-c, eps * s))
            if not votes:
                raise AssertionError("no generator pairs with the defect direction")
            if any(v != votes[0] for v in votes):
                raise AssertionError(f"inconsistent cancellation solve at {off}")
            delta = votes[0]
            if delta.denominator != 1:
                raise AssertionError(f"non-integer wall coefficient {delta} at {off}")
            prev = generated.get(n0) or WallFunction.make(seed, n0, (), k)
            generated[n0] = prev.with_added_term(j, int(delta))
        # the inserted coefficients must cancel the whole order-ℓ defect
        check = loop_defect(assemble(ell), generic_loop(assemble(ell)), order=ell)
        if any(check.values()):
            raise AssertionError(f"defect not canceled at order {ell}")

    return assemble(k)


# ---------------------------------------------------------------------------
# C-wall saturation (Construction-style confinement data, rank 2)


def cwall_supports(seed: Seed, d: int):
    """The saturated C-wall set W_d as (support generators, monomial) pairs.

    Supports are 1-dimensional in rank 2: full line, single ray, or the origin.
    Closed under the two sum rules (nonzero pairing, or parallel monomials),
    monomial degrees capped by d.
    """
    if seed.rank != 2:
        raise UnsupportedRank("C-wall saturation implemented for rank 2")
    if d < 1:
        raise ValueError("d must be at least 1")

    # support encoding: ("line", dir) | ("ray", dir) | ("zero",), dir primitive
    current = set()
    for e in seed.generators:
        for j in range(1, d + 1):
            if j * seed.degree(e) <= d:
                current.add((("line", e), vscale(j, e)))

    def intersect(s1, s2):
        if s1[0] == "zero" or s2[0] == "zero":
            return ("zero",)
        d1, d2 = s1[1], s2[1]
        if s1[0] == "line" and s2[0] == "line":
            return s1 if parallel(d1, d2) else ("zero",)
        if s1[0] == "line":
            return s2 if parallel(d1, d2) else ("zero",)
        if s2[0] == "line":
            return s1 if parallel(d1, d2) else ("zero",)
        if d1 == d2:
            return s1
        return ("zero",)

    def minus_ray(s, n):
        nd = primitive(n)
        if s[0] == "zero":
            return ("ray", vneg(nd))
        if s[0] == "line":
            return s
        g = s[1]
        if g == vneg(nd):
            return s
        if g == nd:
            return ("line", nd)
        raise AssertionError("C-wall support left the monomial's perp line")

    changed = True
    while changed:
        changed = False
        items = sorted(current)
        for s1, n1 in items:
            for s2, n2 in items:
                pairing = seed.form.pair(n1, n2)
                if pairing == 0 and not parallel(n1, n2):
                    continue
                n = vadd(n1, n2)
                dn = seed.degree(n)
                if dn is None or dn > d:
                    continue
                new = (minus_ray(intersect(s1, s2), n), n)
                if new not in current:
                    current.add(new)
                    changed = True

    def gens(s):
        if s[0] == "line":
            return (s[1], vneg(s[1]))
        if s[0] == "ray":
            return (s[1],)
        return ()

    out = [(gens(s), n) for s, n in sorted(current)]
    return out


def cwall_is_incoming(support_gens, monomial):
    """Membership of the monomial in a saturated-set support (rank 2)."""
    if not support_gens:
        return False
    m = primitive(monomial)
    return any(primitive(g) == m for g in support_gens)


def generated_wall_confined(seed, wall, cwalls):
    """True iff the wall's support sits inside some C-wall cone with parallel monomial."""
    if wall.support.kind == "hyperplane":
        sup_dirs = (primitive(wall.direction), vneg(primitive(wall.direction)))
    else:
        sup_dirs = tuple(primitive(g) for g in wall.support.generators)
    for gens, n in cwalls:
        if not parallel(n, wall.direction):
            continue
        cone_dirs = tuple(primitive(g) for g in gens)
        if all(g in cone_dirs for g in sup_dirs):
            return True
    return False
