"""Arithmetic in the class-free coefficient ring truncated by the degree filtration.

A truncated series represents z^base · Σ_p c_p z^p with p ranging over the
exponent monoid P, all offsets of degree ≤ order.  Coefficients are exact
arbitrary-precision integers; truncation convention: order k keeps offsets of
degree ≤ k ("mod J^{k+1}" everywhere).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NonUnitConstantTerm, OrderMismatch
from .lattice import Seed, is_zero, vadd, vsub


def _sorted_terms(terms):
    return tuple(sorted(terms.items()))


@dataclass(frozen=True)
class TruncatedMonoidSeries:
    """Element of z^base(ℤ[P]/J^{order+1}); immutable value object."""

    seed: Seed
    base: tuple
    terms: tuple  # sorted ((offset tuple, coeff), ...), no zero coefficients
    order: int

    @staticmethod
    def make(seed, base, terms, order):
        """Normalize a {offset: coeff} mapping: drop zeros, truncate, validate P-membership."""
        clean = {}
        for off, c in (terms.items() if isinstance(terms, dict) else terms):
            off = tuple(off)
            c = int(c)
            if c == 0:
                continue
            d = seed.degree(off)
            if d is None:
                raise ValueError(f"offset {off} is not in P")
            if d > order:
                continue
            clean[off] = clean.get(off, 0) + c
        clean = {o: c for o, c in clean.items() if c != 0}
        return TruncatedMonoidSeries(seed, tuple(base), _sorted_terms(clean), int(order))

    @staticmethod
    def monomial(seed, exponent, order, coeff=1):
        """The single term coeff·z^exponent (base = exponent, offset 0)."""
        zero = tuple(0 for _ in range(seed.rank))
        return TruncatedMonoidSeries.make(seed, tuple(exponent), {zero: coeff}, order)

    @staticmethod
    def one(seed, order):
        zero = tuple(0 for _ in range(seed.rank))
        return TruncatedMonoidSeries.monomial(seed, zero, order)

    # -- inspection ----------------------------------------------------------

    @property
    def term_dict(self):
        return dict(self.terms)

    def coefficient(self, offset):
        return self.term_dict.get(tuple(offset), 0)

    def exponent_coefficient(self, exponent):
        """Coefficient of z^exponent (absolute exponent, not offset)."""
        off = vsub(tuple(exponent), self.base)
        if self.seed.degree(off) is None:
            return 0
        return self.coefficient(off)

    def constant_term(self):
        zero = tuple(0 for _ in range(self.seed.rank))
        return self.coefficient(zero)

    def is_one(self):
        zero = tuple(0 for _ in range(self.seed.rank))
        return is_zero(self.base) and self.terms == ((zero, 1),)

    def support_degrees(self):
        return tuple(self.seed.degree(o) for o, _ in self.terms)

    # -- ring operations ------------------------------------------------------

    def _check_compatible(self, other):
        if self.order != other.order:
            raise OrderMismatch(f"orders {self.order} and {other.order} differ")
        if self.seed != other.seed:
            raise ValueError("series over different seeds")

    def add(self, other):
        """Sum; requires equal bases (offsets live in a common coset)."""
        self._check_compatible(other)
        if self.base != other.base:
            raise ValueError("cannot add series with different bases; rebase first")
        acc = dict(self.terms)
        for off, c in other.terms:
            acc[off] = acc.get(off, 0) + c
        return TruncatedMonoidSeries.make(self.seed, self.base, acc, self.order)

    def scale(self, c):
        c = int(c)
        return TruncatedMonoidSeries.make(
            self.seed, self.base, {o: c * v for o, v in self.terms}, self.order
        )

    def neg(self):
        return self.scale(-1)

    def sub(self, other):
        return self.add(other.neg())

    def mul(self, other):
        """Product; bases add, offsets of degree > order are dropped."""
        self._check_compatible(other)
        k = self.order
        deg = self.seed.degree
        acc = {}
        bdeg = {o: deg(o) for o, _ in other.terms}
        for o1, c1 in self.terms:
            d1 = deg(o1)
            for o2, c2 in other.terms:
                if d1 + bdeg[o2] > k:
                    continue
                off = vadd(o1, o2)
                acc[off] = acc.get(off, 0) + c1 * c2
        return TruncatedMonoidSeries.make(
            self.seed, vadd(self.base, other.base), acc, k
        )

    def rebase(self, new_base):
        """Re-express with a different base; drops offsets leaving the order window.

        Requires base − new_base ∈ P so that old offsets remain in P.
        """
        shift = vsub(self.base, tuple(new_base))
        if self.seed.degree(shift) is None:
            raise ValueError("new base does not precede the old one in the P-order")
        acc = {vadd(shift, o): c for o, c in self.terms}
        return TruncatedMonoidSeries.make(self.seed, tuple(new_base), acc, self.order)

    def truncate(self, new_order):
        if new_order > self.order:
            raise ValueError("cannot extend a truncated series")
        return TruncatedMonoidSeries.make(
            self.seed, self.base, dict(self.terms), new_order
        )

    def power(self, exponent, order=None):
        """Exact truncated power; negative exponents via the geometric-series inverse.

        Requires constant term exactly 1 when exponent < 0 (the only case the
        scattering construction produces).
        """
        k = self.order if order is None else order
        f = self if order is None else self.truncate(order)
        e = int(exponent)
        if e == 0:
            return TruncatedMonoidSeries.one(self.seed, k)
        if e < 0:
            f = f.inverse()
            e = -e
        result = TruncatedMonoidSeries.one(self.seed, k)
        square = f
        while e:
            if e & 1:
                result = result.mul(square)
            e >>= 1
            if e:
                square = square.mul(square)
        return result

    def inverse(self):
        """Inverse of a unit series 1 + η, η of positive degree, within the truncation."""
        if not is_zero(self.base) or self.constant_term() != 1:
            raise NonUnitConstantTerm("inverse requires base 0 and constant term 1")
        zero = tuple(0 for _ in range(self.seed.rank))
        eta = TruncatedMonoidSeries.make(
            self.seed, zero, {o: c for o, c in self.terms if o != zero}, self.order
        )
        acc = TruncatedMonoidSeries.one(self.seed, self.order)
        term = TruncatedMonoidSeries.one(self.seed, self.order)
        for _ in range(self.order):
            term = term.mul(eta).neg()
            if not term.terms:
                break
            acc = acc.add(term)
        return acc

    def __str__(self):
        bits = []
        for off, c in self.terms:
            exp = vadd(self.base, off)
            bits.append(f"{c}*z^{exp}")
        return " + ".join(bits) if bits else "0"


@dataclass(frozen=True)
class WallFunction:
    """1 + Σ_j c_j z^{j·direction}, direction a primitive vector of P.

    ``coeffs[j-1]`` is c_j; the list length is capped by j·deg(direction) ≤ order.
    """

    seed: Seed
    direction: tuple
    coeffs: tuple
    order: int

    @staticmethod
    def make(seed, direction, coeffs, order):
        direction = tuple(direction)
        d = seed.degree(direction)
        if d is None or d == 0:
            raise ValueError("wall direction must lie in P \\ 0")
        jmax = order // d
        coeffs = tuple(int(c) for c in coeffs)[:jmax]
        # strip trailing zeros for a canonical representation
        while coeffs and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        return WallFunction(seed, direction, coeffs, int(order))

    def coefficient(self, j):
        if j == 0:
            return 1
        if 1 <= j <= len(self.coeffs):
            return self.coeffs[j - 1]
        return 0

    def is_trivial(self):
        return not self.coeffs

    def to_series(self):
        zero = tuple(0 for _ in range(self.seed.rank))
        terms = {zero: 1}
        for j, c in enumerate(self.coeffs, start=1):
            terms[vscale_int(j, self.direction)] = c
        return TruncatedMonoidSeries.make(self.seed, zero, terms, self.order)

    def with_added_term(self, j, delta):
        """New wall function with c_j += delta (used by the completion solver)."""
        need = max(j, len(self.coeffs))
        coeffs = list(self.coeffs) + [0] * (need - len(self.coeffs))
        coeffs[j - 1] += delta
        return WallFunction.make(self.seed, self.direction, coeffs, self.order)

    def truncate(self, new_order):
        return WallFunction.make(self.seed, self.direction, self.coeffs, new_order)

    def __str__(self):
        bits = ["1"]
        for j, c in enumerate(self.coeffs, start=1):
            if c:
                exp = vscale_int(j, self.direction)
                bits.append(f"{c}*z^{exp}")
        return " + ".join(bits)


def vscale_int(c, u):
    return tuple(c * a for a in u)


def multiply(a: TruncatedMonoidSeries, b: TruncatedMonoidSeries) -> TruncatedMonoidSeries:
    """Free-function alias for ``a.mul(b)``."""
    return a.mul(b)


def power(f, exponent, order):
    """Truncated power of a wall function or unit-constant-term series."""
    if isinstance(f, WallFunction):
        f = f.to_series().truncate(min(order, f.order))
    if f.order < order:
        raise OrderMismatch("series order too small for the requested truncation")
    return f.power(exponent, order)
