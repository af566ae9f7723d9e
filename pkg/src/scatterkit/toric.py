"""Exact toric mode: complete smooth rank-2 fans, curve classes via kinks,
torus weights, and the fully class-graded toric mirror product.

Curve classes are stored as intersection vectors in ℤ^{rays}, i.e. kernel
elements of ℤ^{rays} → M sending unit vectors to primitive ray generators.
The piecewise-linear function φ has its kink along each ray equal to the
class of the corresponding boundary curve; products are computed from the
balanced tripod with the evaluation line subtracted, which coincides with
φ(a) + φ(b) − φ(a+b).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InconsistentFan, NonTransversalPath, UnsupportedRank
from .lattice import (
    angle_key,
    cross2,
    dot,
    int_kernel_basis,
    is_zero,
    primitive,
    solve_rational,
    vadd,
    vneg,
    vscale,
    vsub,
)


@dataclass(frozen=True)
class Fan:
    """Complete smooth rank-2 fan: primitive rays in ccw order, cones = adjacent pairs."""

    rank: int
    rays: tuple
    cones: tuple  # pairs of ray indices, ccw

    @staticmethod
    def make(rays, cones=None, rank=None):
        rays = tuple(tuple(int(x) for x in r) for r in rays)
        r = rank if rank is not None else (len(rays[0]) if rays else 0)
        if r != 2:
            raise UnsupportedRank("fans are implemented for rank 2")
        if len(set(rays)) != len(rays):
            raise InconsistentFan("duplicate rays")
        for v in rays:
            if is_zero(v) or primitive(v) != v:
                raise InconsistentFan(f"ray {v} is not primitive")
        order = sorted(range(len(rays)), key=lambda i: angle_key(rays[i]))
        sorted_rays = tuple(rays[i] for i in order)
        n = len(sorted_rays)
        if n < 3:
            raise InconsistentFan("a complete rank-2 fan needs at least 3 rays")
        for i in range(n):
            d = cross2(sorted_rays[i], sorted_rays[(i + 1) % n])
            if d <= 0:
                raise InconsistentFan("rays do not wind once around the origin")
            if d != 1:
                raise InconsistentFan(
                    f"cone ({sorted_rays[i]}, {sorted_rays[(i+1)%n]}) is not smooth"
                )
        expected = {frozenset((sorted_rays[i], sorted_rays[(i + 1) % n])) for i in range(n)}
        if cones is not None:
            given = {frozenset((rays[a], rays[b])) for a, b in cones}
            if given != expected:
                raise InconsistentFan("maximal cones do not match ray adjacency")
        cone_pairs = tuple((i, (i + 1) % n) for i in range(n))
        return Fan(2, sorted_rays, cone_pairs)

    @property
    def nrays(self):
        return len(self.rays)

    def cone_of(self, p):
        """Index of a maximal cone containing p (boundaries allowed); p=0 → cone 0."""
        if all(x == 0 for x in p):
            return 0
        n = self.nrays
        for c, (i, j) in enumerate(self.cones):
            a, b = self.rays[i], self.rays[j]
            if cross2(a, p) >= 0 and cross2(p, b) >= 0:
                return c
        raise InconsistentFan("fan is not complete")  # pragma: no cover

    def cone_coordinates(self, p):
        """Exact coordinates of p in its containing cone (nonnegative)."""
        c = self.cone_of(p)
        i, j = self.cones[c]
        a, b = self.rays[i], self.rays[j]
        det = cross2(a, b)
        alpha = Fraction(cross2(p, b), det)
        beta = Fraction(cross2(a, p), det)
        return c, (i, alpha), (j, beta)

    def shares_cone(self, p, q):
        """True iff p and q lie in a common (closed) maximal cone."""
        for c, (i, j) in enumerate(self.cones):
            a, b = self.rays[i], self.rays[j]
            if all(
                cross2(a, v) >= 0 and cross2(v, b) >= 0
                for v in (p, q)
                if not is_zero(v)
            ):
                return True
        return False


def builtin_fan(name):
    fans = {
        "P2": [(1, 0), (0, 1), (-1, -1)],
        "P1xP1": [(1, 0), (0, 1), (-1, 0), (0, -1)],
        "Bl1P2": [(1, 0), (1, 1), (0, 1), (-1, -1)],
    }
    if name not in fans:
        raise KeyError(f"unknown builtin fan {name!r}; choose from {sorted(fans)}")
    return Fan.make(fans[name])


BUILTIN_FANS = ("P2", "P1xP1", "Bl1P2")


@dataclass(frozen=True)
class CurveClass:
    """Intersection vector (γ·D_i) over the rays; kernel membership is validated."""

    fan: Fan
    vector: tuple

    @staticmethod
    def make(fan, vector):
        vector = tuple(int(x) for x in vector)
        if len(vector) != fan.nrays:
            raise ValueError("intersection vector length must match ray count")
        s = (0, 0)
        for c, v in zip(vector, fan.rays):
            s = vadd(s, vscale(c, v))
        if not is_zero(s):
            raise ValueError(f"{vector} is not in the kernel of ℤ^rays → M")
        return CurveClass(fan, vector)

    @staticmethod
    def zero(fan):
        return CurveClass(fan, tuple(0 for _ in range(fan.nrays)))

    def add(self, other):
        return CurveClass.make(self.fan, vadd(self.vector, other.vector))

    def sub(self, other):
        return CurveClass.make(self.fan, vsub(self.vector, other.vector))

    def scale(self, c):
        return CurveClass.make(self.fan, vscale(int(c), self.vector))

    def is_zero(self):
        return is_zero(self.vector)

    def decompose(self):
        """Integer coordinates in the kernel basis (for human-readable output)."""
        basis = kernel_basis(self.fan)
        rows = [[b[i] for b in basis] for i in range(self.fan.nrays)]
        sol = solve_rational(rows, list(self.vector))
        assert sol is not None and all(x.denominator == 1 for x in sol)
        return tuple(int(x) for x in sol)


def kernel_basis(fan):
    rows = [tuple(v[i] for v in fan.rays) for i in range(fan.rank)]
    return tuple(int_kernel_basis(rows))


def kink_classes(fan):
    """Class of the boundary curve over each ray: 1 at neighbors, −a_i at the ray.

    a_i is fixed by v_{i−1} + v_{i+1} = a_i·v_i, the smooth-surface relation.
    """
    n = fan.nrays
    classes = []
    for i in range(n):
        v = fan.rays[i]
        s = vadd(fan.rays[(i - 1) % n], fan.rays[(i + 1) % n])
        if cross2(s, v) != 0:
            raise InconsistentFan("neighbor sum is not parallel to the ray")
        idx = 0 if v[0] != 0 else 1
        a, rem = divmod(s[idx], v[idx])
        if rem != 0:  # pragma: no cover - smooth fans always divide
            raise InconsistentFan("non-integer self-intersection")
        vec = [0] * n
        vec[(i - 1) % n] = 1
        vec[(i + 1) % n] = 1
        vec[i] = -a
        classes.append(CurveClass.make(fan, vec))
    return tuple(classes)


@dataclass(frozen=True)
class PLFunctionWithKinks:
    """Per-maximal-cone linear part of φ: a pair of class-valued slopes per cone.

    slopes[c] = (s_x, s_y) with φ(p) = p_x·s_x + p_y·s_y on cone c; the base
    cone 0 has zero linear part.
    """

    fan: Fan
    kinks: tuple  # CurveClass per ray
    slopes: tuple  # per cone: pair of int tuples in ℤ^{rays}

    def slope(self, cone_index):
        return self.slopes[cone_index]

    def value(self, p):
        """φ(p) ∈ Q^{rays} using the linear part of a cone containing p."""
        c = self.fan.cone_of(p)
        return self.value_on_cone(c, p)

    def value_on_cone(self, c, p):
        sx, sy = self.slopes[c]
        return tuple(p[0] * sx[i] + p[1] * sy[i] for i in range(self.fan.nrays))

    def derivative(self, c, w):
        """dφ|_cone(w) as an exact vector (w any rational direction)."""
        sx, sy = self.slopes[c]
        return tuple(w[0] * sx[i] + w[1] * sy[i] for i in range(self.fan.nrays))


def build_phi(fan: Fan, kinks=None) -> PLFunctionWithKinks:
    """Solve for a representative φ with the prescribed kinks, base cone normalized.

    Walking ccw around the fan, each shared ray v adds n_v⊗κ_v to the linear
    part, n_v = cross2(v, ·) the primitive functional positive on the ccw side.
    The walk must close up exactly; kink equations are re-verified afterwards.
    """
    kappa = kink_classes(fan) if kinks is None else tuple(kinks)
    if len(kappa) != fan.nrays:
        raise InconsistentFan("need one kink class per ray")
    n = fan.nrays
    zero = tuple(0 for _ in range(n))
    slopes = [None] * n
    slopes[0] = (zero, zero)
    for c in range(n):
        nxt = (c + 1) % n
        shared = fan.cones[c][1]  # ray between cone c and cone c+1
        v = fan.rays[shared]
        kv = kappa[shared].vector
        # n_v = cross2(v, ·) = (−v_y, v_x): positive on the ccw (next) side
        nv = (-v[1], v[0])
        sx, sy = slopes[c]
        new = (
            tuple(sx[i] + nv[0] * kv[i] for i in range(n)),
            tuple(sy[i] + nv[1] * kv[i] for i in range(n)),
        )
        if nxt == 0:
            if new != slopes[0]:
                raise InconsistentFan("kink equations do not close up around the fan")
        else:
            slopes[nxt] = new
    phi = PLFunctionWithKinks(fan, kappa, tuple(slopes))
    # re-verify every kink equation on the finished function
    for c in range(n):
        nxt = (c + 1) % n
        shared = fan.cones[c][1]
        v = fan.rays[shared]
        nv = (-v[1], v[0])
        sx0, sy0 = phi.slopes[c]
        sx1, sy1 = phi.slopes[nxt]
        for i in range(n):
            if sx1[i] - sx0[i] != nv[0] * kappa[shared].vector[i] or \
               sy1[i] - sy0[i] != nv[1] * kappa[shared].vector[i]:
                raise InconsistentFan("kink verification failed")  # pragma: no cover
    return phi


# ---------------------------------------------------------------------------
# directed segments and their classes


@dataclass(frozen=True)
class DirectedSegment:
    """ℤ-affine path with derivative w; either endpoint may be at infinity.

    ``start``/``end`` are rational points or None (infinite); ``anchor`` is any
    finite point on the path (defaults to whichever endpoint is finite).
    """

    direction: tuple
    start: tuple = None
    end: tuple = None
    anchor: tuple = None

    @staticmethod
    def finite(a, b, direction=None):
        a = tuple(Fraction(x) for x in a)
        b = tuple(Fraction(x) for x in b)
        d = vsub(b, a)
        w = primitive(tuple(int(x * _lcm_den(d)) for x in d)) if direction is None else tuple(direction)
        _check_parallel(d, w)
        return DirectedSegment(w, a, b, a)

    @staticmethod
    def ray_from(a, direction):
        a = tuple(Fraction(x) for x in a)
        return DirectedSegment(tuple(int(x) for x in direction), a, None, a)

    @staticmethod
    def ray_to(b, direction):
        b = tuple(Fraction(x) for x in b)
        return DirectedSegment(tuple(int(x) for x in direction), None, b, b)

    @staticmethod
    def full_line(anchor, direction):
        anchor = tuple(Fraction(x) for x in anchor)
        return DirectedSegment(tuple(int(x) for x in direction), None, None, anchor)


def _lcm_den(d):
    import math

    out = 1
    for f in d:
        out = out * f.denominator // math.gcd(out, f.denominator)
    return out


def _check_parallel(d, w):
    if cross2(d, w) != 0 or dot(d, w) <= 0:
        raise ValueError("direction does not match the segment's orientation")


def segment_class(phi: PLFunctionWithKinks, seg: DirectedSegment) -> CurveClass:
    """Sum of kink classes over transversal ray crossings, lattice-length weighted.

    Computed both as the crossing sum Σ |n_ρ(w)|·κ_ρ and as the difference of
    endpoint derivatives of φ∘l; the two must agree exactly.
    """
    fan = phi.fan
    w = seg.direction
    if is_zero(w):
        return CurveClass.zero(fan)
    anchor = seg.anchor
    for endpoint in (seg.start, seg.end):
        if endpoint is not None and _on_some_ray(fan, endpoint):
            raise NonTransversalPath("segment endpoint lies on a ray")
    # parameter bounds: anchor + t·w, t ∈ (t0, t1)
    t0 = None if seg.start is None else _param_of(anchor, w, seg.start)
    t1 = None if seg.end is None else _param_of(anchor, w, seg.end)
    if t0 is not None and t1 is not None and t1 <= t0:
        raise ValueError("end point precedes start point")

    total = CurveClass.zero(fan)
    for rho, kappa in zip(fan.rays, phi.kinks):
        nrho = (-rho[1], rho[0])
        nw = dot(nrho, w)
        if nw == 0:
            if dot(nrho, anchor) == 0:
                raise NonTransversalPath("segment runs along a ray line")
            continue
        t = Fraction(-dot(nrho, anchor), nw)
        if (t0 is not None and t <= t0) or (t1 is not None and t >= t1):
            continue
        p = vadd(anchor, vscale(t, w))
        lam = _ray_param(rho, p)
        if lam is None or lam < 0:
            continue
        if lam == 0:
            raise NonTransversalPath("segment crosses the fan's origin")
        total = total.add(kappa.scale(abs(nw)))
    # derivative-difference cross-check
    start_cone = (
        fan.cone_of(seg.start) if seg.start is not None else fan.cone_of(vneg(w))
    )
    end_cone = fan.cone_of(seg.end) if seg.end is not None else fan.cone_of(w)
    d_start = phi.derivative(start_cone, w)
    d_end = phi.derivative(end_cone, w)
    diff = tuple(int(e - s) for e, s in zip(d_end, d_start))
    alt = CurveClass.make(fan, diff)
    assert alt.vector == total.vector, "kink sum disagrees with derivative difference"
    return total


def _param_of(anchor, w, p):
    d = vsub(p, anchor)
    idx = next(i for i, x in enumerate(w) if x != 0)
    t = Fraction(d[idx], w[idx])
    if any(d[i] != t * w[i] for i in range(len(w))):
        raise ValueError("point is not on the segment's line")
    return t


def _ray_param(rho, p):
    idx = next(i for i, x in enumerate(rho) if x != 0)
    lam = Fraction(p[idx], rho[idx])
    if any(p[i] != lam * rho[i] for i in range(len(p))):
        return None
    return lam


def _on_some_ray(fan, p):
    for rho in fan.rays:
        lam = _ray_param(rho, p)
        if lam is not None and lam >= 0:
            return True
    return False


# ---------------------------------------------------------------------------
# spines and trees


@dataclass(frozen=True)
class SpineTree:
    """Finite vertices with outward-directed edges; legs may run to infinity.

    ``vertices``: tuple of rational points.  ``edges``: (i, j, w) with j a
    vertex index or None for an unbounded leg, w the outward integer derivative
    at vertex i.
    """

    vertices: tuple
    edges: tuple

    @staticmethod
    def make(vertices, edges):
        vertices = tuple(tuple(Fraction(x) for x in p) for p in vertices)
        edges = tuple((int(i), (None if j is None else int(j)), tuple(int(x) for x in w))
                      for i, j, w in edges)
        return SpineTree(vertices, edges)

    def outward_at(self, i):
        out = []
        for a, b, w in self.edges:
            if a == i:
                out.append(w)
            elif b == i:
                out.append(vneg(w))
        return out

    def is_balanced(self):
        degree = {}
        for a, b, w in self.edges:
            degree[a] = degree.get(a, 0) + 1
            if b is not None:
                degree[b] = degree.get(b, 0) + 1
        for i in range(len(self.vertices)):
            if degree.get(i, 0) >= 2:
                s = (0, 0)
                for w in self.outward_at(i):
                    s = vadd(s, w)
                if not is_zero(s):
                    return False
        return True

    def has_bending_vertex(self):
        for i in range(len(self.vertices)):
            out = self.outward_at(i)
            if len(out) == 2 and not is_zero(vadd(out[0], out[1])):
                return True
        return False

    def segments(self):
        segs = []
        for a, b, w in self.edges:
            if b is None:
                segs.append(DirectedSegment.ray_from(self.vertices[a], w))
            else:
                segs.append(DirectedSegment.finite(self.vertices[a], self.vertices[b], w))
        return segs


def tree_class(phi: PLFunctionWithKinks, spine: SpineTree) -> CurveClass:
    """Sum of per-edge classes; orientation- and root-independent."""
    if not spine.is_balanced():
        raise ValueError("spine is not balanced at an interior vertex")
    total = CurveClass.zero(phi.fan)
    for seg in spine.segments():
        total = total.add(segment_class(phi, seg))
    # root independence: recompute with every edge reversed
    total_rev = CurveClass.zero(phi.fan)
    for a, b, w in spine.edges:
        if b is None:
            total_rev = total_rev.add(segment_class(phi, DirectedSegment.ray_from(spine.vertices[a], w)))
        else:
            total_rev = total_rev.add(
                segment_class(phi, DirectedSegment.finite(spine.vertices[b], spine.vertices[a], vneg(w)))
            )
    assert total_rev.vector == total.vector, "tree class depends on the root"
    return total


def straight_count(fan: Fan, spine: SpineTree, gamma: CurveClass, phi=None) -> int:
    """1 iff the spine is balanced with no bending vertex and γ is its class."""
    phi = build_phi(fan) if phi is None else phi
    if not spine.is_balanced() or spine.has_bending_vertex():
        return 0
    return 1 if tree_class(phi, spine).vector == gamma.vector else 0


# ---------------------------------------------------------------------------
# weights and products


@dataclass(frozen=True)
class WeightVector:
    fan: Fan
    vector: tuple

    def add(self, other):
        return WeightVector(self.fan, vadd(self.vector, other.vector))


def weight(fan: Fan, P) -> WeightVector:
    """Ray coordinates of P in its containing cone, zero elsewhere."""
    P = tuple(int(x) for x in P)
    vec = [0] * fan.nrays
    if not is_zero(P):
        _, (i, alpha), (j, beta) = fan.cone_coordinates(P)
        if alpha.denominator != 1 or beta.denominator != 1 or alpha < 0 or beta < 0:
            raise ValueError("nonintegral cone coordinates on a smooth fan")  # pragma: no cover
        vec[i] += int(alpha)
        vec[j] += int(beta)
    return WeightVector(fan, tuple(vec))


def weight_class(gamma: CurveClass) -> WeightVector:
    return WeightVector(gamma.fan, gamma.vector)


def _generic_root(fan, variant=0):
    cands = [
        (Fraction(2 + variant, 3), Fraction(1, 7 + variant)),
        (Fraction(-3, 5 + variant), Fraction(2 + variant, 11)),
        (Fraction(1, 13), Fraction(-5 - variant, 9)),
    ]
    for p in cands:
        if not _on_some_ray(fan, p):
            return p
    raise NonTransversalPath("no generic root available")  # pragma: no cover


def toric_product(fan: Fan, phi: PLFunctionWithKinks, a, b, root=None):
    """(a+b, γ) with γ the class of the balanced tripod minus the evaluation line.

    γ is root-independent and equals φ(a) + φ(b) − φ(a+b); the weight identity
    w(a) + w(b) = w(a+b) + w(γ) is asserted on every call.
    """
    a = tuple(int(x) for x in a)
    b = tuple(int(x) for x in b)
    q = vadd(a, b)

    def compute(x):
        legs = []
        for d in (a, b, vneg(q)):
            if not is_zero(d):
                legs.append((0, None, d))
        spine = SpineTree.make([x], legs)
        if not spine.is_balanced():  # pragma: no cover - tripods balance by construction
            raise AssertionError("tripod imbalance")
        gamma = tree_class(phi, spine)
        if not is_zero(q):
            gamma = gamma.sub(segment_class(phi, DirectedSegment.full_line(x, q)))
        return gamma

    last = None
    for variant in range(6):
        x = _generic_root(fan, variant) if root is None else tuple(Fraction(v) for v in root)
        try:
            gamma = compute(x)
        except NonTransversalPath:
            if root is not None:
                raise
            continue
        if last is None:
            last = gamma
            if root is not None:
                break
        else:
            assert gamma.vector == last.vector, "product class depends on the root"
            break
    else:  # pragma: no cover
        raise NonTransversalPath("no generic root for the tripod")
    gamma = last
    # PL-function formula and weight identity, asserted exactly
    pl = tuple(
        int(va + vb - vq)
        for va, vb, vq in zip(phi.value(a), phi.value(b), phi.value(q))
    )
    assert gamma.vector == pl, "tripod class disagrees with φ(a)+φ(b)−φ(a+b)"
    lhs = weight(fan, a).add(weight(fan, b)).vector
    rhs = weight(fan, q).add(weight_class(gamma)).vector
    assert lhs == rhs, "weight conservation failed"
    return q, gamma


def stanley_reisner_product(fan: Fan, a, b):
    """θ_a·θ_b ↦ θ_{a+b} when a, b share a cone, 0 otherwise (the degenerate rule)."""
    a = tuple(int(x) for x in a)
    b = tuple(int(x) for x in b)
    if fan.shares_cone(a, b):
        return vadd(a, b), 1
    return None, 0


# ---------------------------------------------------------------------------
# nef cone generators (Picard rank ≤ 2)


def nef_generators(fan: Fan):
    """Divisor-coefficient vectors generating the nef cone, slice-normalized.

    NE(Y) is spanned by the boundary-curve (kink) classes; nef is its dual in
    divisor space modulo linear equivalence.  Implemented for Picard rank ≤ 2,
    which covers the built-in fans.
    """
    n = fan.nrays
    rho = n - 2
    if rho < 1:
        return ()
    if rho > 2:
        raise UnsupportedRank("nef generators implemented for Picard rank ≤ 2")
    kappa = [k.vector for k in kink_classes(fan)]
    # slice: force f = 0 on the first two rays (their generators are a basis)
    i0, i1 = 0, 1
    if cross2(fan.rays[i0], fan.rays[i1]) == 0:  # pragma: no cover - adjacent rays independent
        i1 = 2
    free = [i for i in range(n) if i not in (i0, i1)]
    # constraint rows: for y ∈ R^rho, (Σ_j y_j e_{free_j})·κ ≥ 0
    rows = [[kv[j] for j in free] for kv in kappa]
    gens = _dual_cone_small(rows, rho)
    out = []
    for g in gens:
        f = [0] * n
        for y, j in zip(g, free):
            f[j] = y
        out.append(tuple(f))
    return tuple(out)


def _dual_cone_small(rows, dim):
    if dim == 1:
        vals = [r[0] for r in rows]
        if all(v >= 0 for v in vals):
            return ((1,),)
        if all(v <= 0 for v in vals):
            return ((-1,),)
        return ()
    gens = set()
    for r in rows:
        if all(x == 0 for x in r):
            continue
        for cand in ((-r[1], r[0]), (r[1], -r[0])):
            if all(c == 0 for c in cand):
                continue
            if all(sum(c * x for c, x in zip(cand, row)) >= 0 for row in rows):
                gens.add(primitive(cand))
    return tuple(sorted(gens))


def nef_pairing(f, gamma: CurveClass):
    """F·γ for a divisor-coefficient vector f."""
    return dot(f, gamma.vector)
