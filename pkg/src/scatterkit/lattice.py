"""Exact integer/rational linear algebra for the seed lattice.

Everything downstream works in a fixed lattice M of rank r with a
skew-symmetric integer form.  Lattice vectors are plain int tuples in the
fixed basis, rational points are tuples of ``fractions.Fraction``; all
arithmetic is exact.  The exponent monoid P is generated by the unfrozen
sub-basis, so membership and degree are coordinate tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .errors import ConstraintConflict, DimensionMismatch

Vec = tuple  # integer lattice vector, length = rank
Point = tuple  # tuple of Fraction, length = rank


# ---------------------------------------------------------------------------
# vector helpers


def vadd(u, v):
    return tuple(a + b for a, b in zip(u, v))


def vsub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def vneg(u):
    return tuple(-a for a in u)


def vscale(c, u):
    return tuple(c * a for a in u)


def is_zero(u):
    return all(a == 0 for a in u)


def content(u) -> int:
    """gcd of the entries (0 for the zero vector)."""
    g = 0
    for a in u:
        g = gcd(g, abs(a))
    return g


def primitive(u):
    """u divided by its content; only defined for nonzero u."""
    g = content(u)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(a // g for a in u)


def parallel(u, v) -> bool:
    """True iff u and v span the same line (both nonzero)."""
    if is_zero(u) or is_zero(v):
        return False
    return primitive(u) in (primitive(v), vneg(primitive(v)))


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def cross2(u, v):
    """Planar cross product u1*v2 - u2*v1 (rank 2 only)."""
    return u[0] * v[1] - u[1] * v[0]


def angle_key(v):
    """Sort key ordering nonzero rank-2 vectors counterclockwise from +x.

    Exact: (half-plane index, slope comparison via cross product) — no floats.
    Vectors on the same ray compare equal.
    """
    x, y = v
    if x == 0 and y == 0:
        raise ValueError("zero vector has no angle")
    if y > 0 or (y == 0 and x > 0):
        half = 0
    else:
        half = 1
    # within a half-plane, ccw order is comparison by cross product
    return (half, _SlopeKey(v))


class _SlopeKey:
    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v

    def __lt__(self, other):
        return cross2(self.v, other.v) > 0

    def __eq__(self, other):
        return cross2(self.v, other.v) == 0

    def __hash__(self):
        return hash(primitive(self.v))


# ---------------------------------------------------------------------------
# integer kernel (column-style Hermite reduction)


def int_kernel_basis(rows):
    """Basis of the integer kernel {x : A x = 0} for A given as a list of rows.

    Column HNF: track a unimodular transform U with A·U column-reduced; the
    columns of U hitting zero columns of A·U form a saturated kernel basis.
    """
    if not rows:
        return []
    m = len(rows)
    n = len(rows[0])
    a = [list(r) for r in rows]
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def col(mat, j):
        return [mat[i][j] for i in range(len(mat))]

    def swap_cols(j, k):
        for i in range(m):
            a[i][j], a[i][k] = a[i][k], a[i][j]
        for i in range(n):
            u[i][j], u[i][k] = u[i][k], u[i][j]

    def addmul_col(j, k, c):
        # col_j += c * col_k
        for i in range(m):
            a[i][j] += c * a[i][k]
        for i in range(n):
            u[i][j] += c * u[i][k]

    row = 0
    lead = 0
    while row < m and lead < n:
        # gcd-reduce the entries a[row][lead:] into position `lead`
        piv = None
        for j in range(lead, n):
            if a[row][j] != 0:
                piv = j
                break
        if piv is None:
            row += 1
            continue
        swap_cols(lead, piv)
        changed = True
        while changed:
            changed = False
            for j in range(lead + 1, n):
                if a[row][j] != 0:
                    q = a[row][j] // a[row][lead]
                    addmul_col(j, lead, -q)
                    if a[row][j] != 0:
                        swap_cols(lead, j)
                        changed = True
        row += 1
        lead += 1

    basis = []
    for j in range(n):
        if all(a[i][j] == 0 for i in range(m)):
            vec = tuple(u[i][j] for i in range(n))
            if not is_zero(vec):
                basis.append(vec)
    return basis


def solve_rational(rows, rhs):
    """Solve A x = rhs exactly over Q; returns a Fraction tuple or None.

    A is given by rows; requires a unique solution on the span (uses Gaussian
    elimination with exact pivoting, returns None if inconsistent or
    underdetermined entries remain free — callers only use it on full-rank
    square-ish systems).
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    aug = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if p is None:
            continue
        aug[r], aug[p] = aug[p], aug[r]
        pv = aug[r][c]
        aug[r] = [x / pv for x in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if aug[i][n] != 0:
            return None
    if len(pivots) < n:
        return None
    sol = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        sol[c] = aug[i][n]
    return tuple(sol)


# ---------------------------------------------------------------------------
# skew form and seeds


@dataclass(frozen=True)
class SkewForm:
    """Integer antisymmetric bilinear form, stored as a row tuple-of-tuples."""

    matrix: tuple

    def __post_init__(self):
        m = self.matrix
        r = len(m)
        if any(len(row) != r for row in m):
            raise DimensionMismatch("skew form matrix must be square")
        for i in range(r):
            for j in range(r):
                if m[i][j] + m[j][i] != 0:
                    raise ValueError("form matrix is not antisymmetric")

    @staticmethod
    def from_rows(rows):
        return SkewForm(tuple(tuple(int(x) for x in row) for row in rows))

    @property
    def rank(self):
        return len(self.matrix)

    def pair(self, u, v):
        """⟨u, v⟩ — bilinear, antisymmetric; exact."""
        if len(u) != self.rank or len(v) != self.rank:
            raise DimensionMismatch(
                f"vectors of length {len(u)}, {len(v)} for rank {self.rank}"
            )
        m = self.matrix
        return sum(u[i] * sum(m[i][j] * v[j] for j in range(self.rank)) for i in range(self.rank))

    def functional(self, u):
        """The covector ⟨u, ·⟩ as an int tuple."""
        if len(u) != self.rank:
            raise DimensionMismatch("vector length does not match form rank")
        m = self.matrix
        return tuple(
            sum(u[i] * m[i][j] for i in range(self.rank)) for j in range(self.rank)
        )

    def determinant(self):
        rows = [list(r) for r in self.matrix]
        n = len(rows)
        det = Fraction(1)
        for c in range(n):
            p = next((i for i in range(c, n) if rows[i][c] != 0), None)
            if p is None:
                return 0
            if p != c:
                rows[c], rows[p] = rows[p], rows[c]
                det = -det
            det *= rows[c][c]
            inv = Fraction(1, rows[c][c])
            for i in range(c + 1, n):
                if rows[i][c]:
                    f = rows[i][c] * inv
                    rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
        assert det.denominator == 1
        return int(det)


def pair(form: SkewForm, u, v):
    """Module-level alias for ``form.pair`` (the spec's free-function surface)."""
    return form.pair(u, v)


NOT_IN_P = None  # sentinel value returned by `degree` for exponents outside P


@dataclass(frozen=True)
class Seed:
    """A rank-r lattice with skew form and unfrozen sub-basis S (0-based indices).

    P is the submonoid generated by the unfrozen basis vectors; it is freely
    generated (sub-basis), hence automatically strictly convex.
    """

    rank: int
    form: SkewForm
    unfrozen: tuple

    def __post_init__(self):
        if self.form.rank != self.rank:
            raise DimensionMismatch("form rank differs from seed rank")
        idx = tuple(sorted(set(int(i) for i in self.unfrozen)))
        if idx and (idx[0] < 0 or idx[-1] >= self.rank):
            raise ValueError("unfrozen indices out of range")
        object.__setattr__(self, "unfrozen", idx)

    @staticmethod
    def make(rows, unfrozen, rank=None):
        form = SkewForm.from_rows(rows)
        r = rank if rank is not None else form.rank
        return Seed(r, form, tuple(unfrozen))

    def basis_vector(self, i):
        return tuple(1 if j == i else 0 for j in range(self.rank))

    @property
    def generators(self):
        """The generators of P (unfrozen basis vectors, ascending index)."""
        return tuple(self.basis_vector(i) for i in self.unfrozen)

    def degree(self, n):
        """d(n): sum of S-coordinates if n ∈ P, else NOT_IN_P.

        P is freely generated by the sub-basis S, so the largest number of
        P-summands of n is the coordinate sum.
        """
        if len(n) != self.rank:
            raise DimensionMismatch("vector length does not match seed rank")
        total = 0
        s = set(self.unfrozen)
        for i, a in enumerate(n):
            if i in s:
                if a < 0:
                    return NOT_IN_P
                total += a
            elif a != 0:
                return NOT_IN_P
        return total

    def in_P(self, n) -> bool:
        return self.degree(n) is not NOT_IN_P

    # advisory predicates: the cluster comparison assumes these, the scattering
    # computation itself does not (Kronecker seeds legitimately fail them)
    def has_primitive_pairings(self) -> bool:
        return all(content(self.form.functional(e)) == 1 for e in self.generators)

    def is_unimodular(self) -> bool:
        return abs(self.form.determinant()) == 1


def degree(seed: Seed, n):
    """Free-function alias for ``seed.degree``."""
    return seed.degree(n)


# ---------------------------------------------------------------------------
# certified generic points


_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61)


@dataclass(frozen=True)
class GenericPoint:
    """A rational point together with the exclusion list it was checked against."""

    coords: tuple
    avoided: tuple = field(default=())

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]


def _candidate_coords(rank, attempt):
    # distinct prime powers keep coordinates rationally independent enough
    return tuple(Fraction(1, _PRIMES[j % len(_PRIMES)] ** (attempt + 1 + j // len(_PRIMES)))
                 for j in range(rank))


def generic_point(rank, constraint=None, avoid=(), max_attempts=64):
    """Deterministic exact rational point avoiding the given hyperplanes.

    The first argument is a rank or a Seed.  With ``constraint=n`` the point
    lies on n^⊥.  Every functional in ``avoid`` is checked for exact
    nonvanishing; the certificate records the checked list.  The only
    impossible request is a constraint parallel to an avoided normal,
    reported as CONSTRAINT_CONFLICT.
    """
    if isinstance(rank, Seed):
        rank = rank.rank
    avoid = [tuple(a) for a in avoid]
    if constraint is not None:
        n = tuple(constraint)
        if is_zero(n):
            raise ValueError("constraint normal must be nonzero")
        for a in avoid:
            if parallel(a, n):
                raise ConstraintConflict(
                    f"avoided normal {a} vanishes identically on the constraint hyperplane"
                )
        basis = int_kernel_basis([n])
    else:
        basis = [tuple(1 if j == i else 0 for j in range(rank)) for i in range(rank)]

    for attempt in range(max_attempts):
        coeffs = _candidate_coords(len(basis), attempt)
        coords = tuple(
            sum(c * b[j] for c, b in zip(coeffs, basis)) for j in range(rank)
        )
        if all(coords[j] == 0 for j in range(rank)):
            continue
        if constraint is not None and dot(constraint, coords) != 0:
            raise AssertionError("kernel basis failed")  # pragma: no cover
        if all(dot(a, coords) != 0 for a in avoid):
            return GenericPoint(coords, tuple(avoid))
    raise ConstraintConflict("no generic point found in the attempt budget")  # pragma: no cover
