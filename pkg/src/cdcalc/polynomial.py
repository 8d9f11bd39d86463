"""Exact multivariate polynomials over the rationals.

All symbolic work in this package runs on these polynomials: coefficients
are `fractions.Fraction`, so addition, multiplication and differentiation
are exact.  Floating point enters only when a polynomial is evaluated at a
numeric point.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


class ScalarField:
    """A polynomial in ``dimension`` variables with rational coefficients.

    Stored as a map from exponent multi-indices (tuples of ints) to nonzero
    Fraction coefficients; the zero polynomial is the empty map.
    Instances are immutable.
    """

    __slots__ = ("coeffs", "dimension")

    def __init__(self, coeffs, dimension):
        clean = {}
        for expo, c in coeffs.items():
            expo = tuple(int(e) for e in expo)
            if len(expo) != dimension:
                raise ValueError(
                    f"exponent {expo} does not match dimension {dimension}"
                )
            if any(e < 0 for e in expo):
                raise ValueError(f"negative exponent in {expo}")
            c = Fraction(c)
            if c != 0:
                clean[expo] = clean.get(expo, Fraction(0)) + c
        object.__setattr__(self, "coeffs", {e: c for e, c in clean.items() if c != 0})
        object.__setattr__(self, "dimension", dimension)

    def __setattr__(self, name, value):
        raise AttributeError("ScalarField is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, dimension):
        return cls({}, dimension)

    @classmethod
    def constant(cls, value, dimension):
        return cls({(0,) * dimension: Fraction(value)}, dimension)

    @classmethod
    def coordinate(cls, i, dimension):
        """The coordinate function x_i."""
        expo = tuple(1 if j == i else 0 for j in range(dimension))
        return cls({expo: Fraction(1)}, dimension)

    @classmethod
    def monomial(cls, exponents, coeff=1):
        return cls({tuple(exponents): Fraction(coeff)}, len(exponents))

    # -- predicates ---------------------------------------------------

    def is_zero(self):
        return not self.coeffs

    def is_constant(self):
        return all(sum(e) == 0 for e in self.coeffs)

    def degree(self):
        """Total degree; the zero polynomial has degree -1 by convention."""
        if not self.coeffs:
            return -1
        return max(sum(e) for e in self.coeffs)

    # -- arithmetic ---------------------------------------------------

    def _check(self, other):
        if self.dimension != other.dimension:
            raise ValueError(
                f"dimension mismatch: {self.dimension} vs {other.dimension}"
            )

    def __add__(self, other):
        if isinstance(other, Rational):
            other = ScalarField.constant(other, self.dimension)
        self._check(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, Fraction(0)) + c
        return ScalarField(out, self.dimension)

    __radd__ = __add__

    def __neg__(self):
        return ScalarField({e: -c for e, c in self.coeffs.items()}, self.dimension)

    def __sub__(self, other):
        if isinstance(other, Rational):
            other = ScalarField.constant(other, self.dimension)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Rational):
            return ScalarField(
                {e: c * Fraction(other) for e, c in self.coeffs.items()},
                self.dimension,
            )
        self._check(other)
        out = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return ScalarField(out, self.dimension)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power")
        result = ScalarField.constant(1, self.dimension)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Rational):
            other = ScalarField.constant(other, self.dimension)
        if not isinstance(other, ScalarField):
            return NotImplemented
        return self.dimension == other.dimension and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.dimension, frozenset(self.coeffs.items())))

    # -- calculus -----------------------------------------------------

    def diff(self, i):
        """Exact partial derivative with respect to x_i."""
        out = {}
        for e, c in self.coeffs.items():
            if e[i] == 0:
                continue
            de = list(e)
            de[i] -= 1
            out[tuple(de)] = c * e[i]
        return ScalarField(out, self.dimension)

    def shift(self, point):
        """Substitute x -> x + point, exactly (point entries rational)."""
        point = [Fraction(p) for p in point]
        coords = [
            ScalarField.coordinate(i, self.dimension) + point[i]
            for i in range(self.dimension)
        ]
        return self.compose(coords)

    def compose(self, args):
        """Substitute args[i] (ScalarField) for x_i."""
        if len(args) != self.dimension:
            raise ValueError("wrong number of substitution arguments")
        dim = args[0].dimension
        result = ScalarField.zero(dim)
        for e, c in self.coeffs.items():
            term = ScalarField.constant(c, dim)
            for i, p in enumerate(e):
                if p:
                    term = term * (args[i] ** p)
            result = result + term
        return result

    def __call__(self, point):
        """Evaluate at a point.

        Rational entries give an exact Fraction; float entries give a float.
        """
        exact = all(isinstance(p, Rational) for p in point)
        if exact:
            point = [Fraction(p) for p in point]
        total = Fraction(0) if exact else 0.0
        for e, c in self.coeffs.items():
            term = c if exact else float(c)
            for p, k in zip(point, e):
                for _ in range(k):
                    term = term * p
            total = total + term
        return total

    # -- display / io -------------------------------------------------

    def __repr__(self):
        if not self.coeffs:
            return "ScalarField(0)"
        names = (
            ["x", "y", "z"][: self.dimension]
            if self.dimension <= 3
            else [f"x{i}" for i in range(self.dimension)]
        )
        parts = []
        for e, c in sorted(self.coeffs.items()):
            factors = [] if c != 1 or sum(e) == 0 else []
            if c != 1 or sum(e) == 0:
                factors.append(str(c))
            for n, p in zip(names, e):
                if p == 1:
                    factors.append(n)
                elif p > 1:
                    factors.append(f"{n}^{p}")
            parts.append("*".join(factors))
        return "ScalarField(" + " + ".join(parts) + ")"

    def to_json(self):
        return [
            {
                "exponents": list(e),
                "numerator": c.numerator,
                "denominator": c.denominator,
            }
            for e, c in sorted(self.coeffs.items())
        ]

    @classmethod
    def from_json(cls, terms, dimension):
        coeffs = {}
        for t in terms:
            e = tuple(t["exponents"])
            coeffs[e] = coeffs.get(e, Fraction(0)) + Fraction(
                t["numerator"], t["denominator"]
            )
        return cls(coeffs, dimension)
