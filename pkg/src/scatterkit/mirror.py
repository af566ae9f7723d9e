"""Structure constants, theta-basis multiplication, trace, and Frobenius pairing.

The table for θ_{p₁}⋯θ_{p_n} is obtained by multiplying the local theta series
at one certified-generic basepoint and expanding the product over the theta
family at that same point.  The family is unitriangular for the P-degree
order (each θ_q = z^q·(1 + higher)), so the expansion is an exact integer
back-substitution, and by consistency the resulting table does not depend on
the basepoint's chamber representative.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NonGenericEndpoint, OrderMismatch
from .lattice import dot, vadd, vsub
from .brokenlines import _p_offsets, theta_cached
from .scattering import chamber_point, chamber_sectors


def default_basepoint(diagram, variant=0):
    """Deterministic certified-generic basepoint.

    Prefers the chamber containing the sum of the P-generators (for cluster
    seeds the all-positive chamber, where theta tables match initial-cluster
    Laurent data); falls back to the first chamber.
    """
    sectors = chamber_sectors(diagram)
    idx = 0
    if sectors:
        target = vadd(*diagram.seed.generators) if len(diagram.seed.generators) > 1 else (
            diagram.seed.generators[0] if diagram.seed.generators else None
        )
        if target is not None:
            from .lattice import cross2, vneg

            for i, (a, b) in enumerate(sectors):
                t = tuple(Fraction(x) for x in target)
                inside = False
                if a == b:
                    inside = False
                elif b == vneg(a):
                    inside = cross2(a, t) > 0
                else:
                    inside = cross2(a, t) > 0 and cross2(t, b) > 0
                if inside:
                    idx = i
                    break
    return chamber_point(diagram, idx, variant)


@dataclass(frozen=True)
class ChamberCertificate:
    """Basepoint with the exact sign data certifying its open chamber."""

    point: tuple
    wall_signs: tuple  # sign of ⟨n₀,·⟩ per wall, 0 forbidden

    @staticmethod
    def at(diagram, point):
        signs = []
        for w in diagram.walls:
            v = dot(w.functional, point)
            if v == 0 and w.contains(point):
                raise NonGenericEndpoint("basepoint lies on a wall support")
            signs.append(0 if v == 0 else (1 if v > 0 else -1))
        return ChamberCertificate(tuple(point), tuple(signs))


@dataclass(frozen=True)
class StructureConstantTable:
    inputs: tuple  # the p-vectors
    entries: tuple  # sorted ((q, coefficient), ...), coefficients > 0
    order: int
    basepoint: ChamberCertificate

    @property
    def table(self):
        return dict(self.entries)

    def entry(self, q):
        return self.table.get(tuple(q), 0)


_table_cache = {}


def structure_constants(diagram, ps, k=None, basepoint=None):
    """Theta-basis expansion of θ_{p₁}⋯θ_{p_n} at one basepoint.

    Every admissible q (q − Σpᵢ ∈ P of degree ≤ k) receives the coefficient of
    θ_q; entries are exact nonnegative integers independent of the basepoint's
    chamber representative.
    """
    if not ps:
        raise ValueError("ps must be nonempty")
    k = diagram.order if k is None else k
    d = diagram if k == diagram.order else diagram.truncate(k)
    ps = tuple(tuple(p) for p in ps)
    key = None
    if basepoint is None:
        key = (d, ps, k)
        if key in _table_cache:
            return _table_cache[key]

    last_err = None
    for variant in range(8):
        if basepoint is None:
            z = default_basepoint(d, variant)
        else:
            z = tuple(Fraction(x) for x in basepoint)
        try:
            tab = _expand_at(d, ps, k, z)
            if key is not None:
                _table_cache[key] = tab
            return tab
        except NonGenericEndpoint as err:
            last_err = err
            if basepoint is not None:
                raise
    raise last_err  # pragma: no cover


def _expand_at(d, ps, k, z):
    seed = d.seed
    total = ps[0]
    prod = theta_cached(d, ps[0], z, k).table
    for p in ps[1:]:
        prod = prod.mul(theta_cached(d, p, z, k).table)
        total = vadd(total, p)

    entries = {}
    residual = prod
    for off in _p_offsets(seed, k):
        c = residual.coefficient(off)
        if c == 0:
            continue
        q = vadd(total, off)
        entries[q] = c
        theta_q = theta_cached(d, q, z, k).table.rebase(total)
        residual = residual.sub(theta_q.scale(c))
    assert not residual.terms, "theta expansion left a nonzero residual"
    for q, c in entries.items():
        if c < 0:
            raise AssertionError(f"negative structure constant {c} at {q}")
    cert = ChamberCertificate.at(d, z)
    return StructureConstantTable(ps, tuple(sorted(entries.items())), k, cert)


# ---------------------------------------------------------------------------
# theta expansions (elements of the mirror algebra)


@dataclass(frozen=True)
class ThetaExpansion:
    """Finite integer combination Σ c_q θ_q at a fixed truncation order.

    ``windows`` records, per coset of M modulo the P-span, the base point w
    such that every entry q of the coset is certified for deg(q − w) ≤ order;
    products truncate to the min-plus composition of their factors' windows,
    which keeps iterated multiplication exactly associative.  An empty tuple
    means "derive from the support" (valid for hand-built expansions: every
    pair table θ_p·θ_q leads with coefficient 1 at p+q).
    """

    terms: tuple  # sorted ((q, coeff), …), nonzero coefficients
    order: int
    windows: tuple = field(default=(), compare=False)

    @staticmethod
    def make(terms, order, windows=()):
        acc = {}
        for q, c in (terms.items() if isinstance(terms, dict) else terms):
            q = tuple(q)
            c = int(c)
            if c:
                acc[q] = acc.get(q, 0) + c
        acc = {q: c for q, c in acc.items() if c}
        return ThetaExpansion(tuple(sorted(acc.items())), int(order), tuple(sorted(windows)))

    @staticmethod
    def basis(q, order):
        return ThetaExpansion.make({tuple(q): 1}, order)

    @staticmethod
    def unit(rank, order):
        return ThetaExpansion.basis(tuple(0 for _ in range(rank)), order)

    @property
    def table(self):
        return dict(self.terms)

    def coefficient(self, q):
        return self.table.get(tuple(q), 0)

    def is_unit_multiple(self):
        return len(self.terms) == 1 and all(x == 0 for x in self.terms[0][0])

    def window_map(self, seed):
        """Per-coset window: stored if present, else componentwise support minimum."""
        if self.windows:
            return dict(self.windows)
        out = {}
        s = set(seed.unfrozen)
        for q, _ in self.terms:
            key = tuple(x for i, x in enumerate(q) if i not in s)
            if key in out:
                out[key] = tuple(
                    min(a, b) if i in s else a for i, (a, b) in enumerate(zip(out[key], q))
                )
            else:
                out[key] = q
        return out

    def add(self, other):
        self._check(other)
        acc = dict(self.terms)
        for q, c in other.terms:
            acc[q] = acc.get(q, 0) + c
        windows = ()
        if self.windows and other.windows:
            merged = dict(self.windows)
            for key, w in other.windows:
                if key in merged:
                    merged[key] = tuple(min(a, b) for a, b in zip(merged[key], w))
                else:
                    merged[key] = w
            windows = merged.items()
        return ThetaExpansion.make(acc, self.order, windows)

    def scale(self, c):
        return ThetaExpansion.make(
            {q: c * v for q, v in self.terms}, self.order, self.windows
        )

    def _check(self, other):
        if self.order != other.order:
            raise OrderMismatch(f"orders {self.order} and {other.order} differ")


def multiply(diagram, a: ThetaExpansion, b: ThetaExpansion, basepoint=None):
    """Bilinear extension of the structure constants on basis pairs.

    Entries are truncated to the composed window; θ₀-multiples act as exact
    units (their structure constants are δ at every order).
    """
    a._check(b)
    k = a.order
    seed = diagram.seed
    if a.is_unit_multiple():
        return b.scale(a.terms[0][1])
    if b.is_unit_multiple():
        return a.scale(b.terms[0][1])
    wa = a.window_map(seed)
    wb = b.window_map(seed)
    s = set(seed.unfrozen)

    def coset_key(v):
        return tuple(x for i, x in enumerate(v) if i not in s)

    windows = {}
    for ka, va in wa.items():
        for kb, vb in wb.items():
            w = vadd(va, vb)
            key = coset_key(w)
            if key in windows:
                windows[key] = tuple(min(x, y) for x, y in zip(windows[key], w))
            else:
                windows[key] = w
    acc = {}
    for p, cp in a.terms:
        for q, cq in b.terms:
            tab = structure_constants(diagram, (p, q), k, basepoint)
            for r, c in tab.entries:
                acc[r] = acc.get(r, 0) + cp * cq * c
    kept = {}
    for r, c in acc.items():
        w = windows[coset_key(r)]
        d = seed.degree(vsub(r, w))
        if d is not None and d <= k:
            kept[r] = c
    return ThetaExpansion.make(kept, k, windows.items())


def trace(a: ThetaExpansion):
    """Coefficient of θ₀."""
    for q, c in a.terms:
        if all(x == 0 for x in q):
            return c
    return 0


def product(diagram, expansions, basepoint=None):
    """Iterated binary product (left to right)."""
    if not expansions:
        raise ValueError("need at least one factor")
    acc = expansions[0]
    for e in expansions[1:]:
        acc = multiply(diagram, acc, e, basepoint)
    return acc


def pairing(diagram, expansions, basepoint=None):
    """⟨a₁, …, a_n⟩ = Trace(a₁⋯a_n), n ≥ 2."""
    if len(expansions) < 2:
        raise ValueError("the pairing needs at least two arguments")
    return trace(product(diagram, expansions, basepoint))


def pairing_direct(diagram, ps, k=None, basepoint=None):
    """The same pairing on basis elements via the direct n-fold table at q = 0."""
    tab = structure_constants(diagram, ps, k, basepoint)
    zero = tuple(0 for _ in range(diagram.seed.rank))
    return tab.entry(zero)


def n_fold_expansion(diagram, ps, k=None, basepoint=None):
    """θ_{p₁}⋯θ_{p_n} computed directly from n-tuples of broken lines."""
    tab = structure_constants(diagram, ps, k, basepoint)
    total = tuple(ps[0])
    for p in ps[1:]:
        total = vadd(total, p)
    s = set(diagram.seed.unfrozen)
    key = tuple(x for i, x in enumerate(total) if i not in s)
    return ThetaExpansion.make(dict(tab.entries), tab.order, {key: total}.items())


def gram_matrix(diagram, points, k=None, basepoint=None):
    """Matrix of pairings ⟨θ_p, θ_q⟩ with its rank over the rationals."""
    points = [tuple(p) for p in points]
    n = len(points)
    mat = [
        [pairing_direct(diagram, (points[i], points[j]), k, basepoint) for j in range(n)]
        for i in range(n)
    ]
    return mat, _rational_rank(mat)


def _rational_rank(mat):
    rows = [[Fraction(x) for x in row] for row in mat]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
        rank += 1
    return rank


def clear_table_cache():
    _table_cache.clear()
