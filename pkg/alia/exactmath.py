"""Exact cyclotomic arithmetic and linear algebra.

Every number in alia is a :class:`CycScalar`, an element of a cyclotomic
field Q(zeta_n) stored as rational coordinates in the power basis
``1, zeta, ..., zeta^(phi(n)-1)`` reduced modulo the n-th cyclotomic
polynomial. Matrices are immutable :class:`ExactMatrix` grids of scalars.

Example usage:
    >>> from alia.exactmath import CycScalar, ExactMatrix, kernel_basis
    >>> z = CycScalar.zeta(5)
    >>> (z + z**4) ** 2 == CycScalar.parse("zeta5^2 + 2 + zeta5^3")
    True
    >>> len(kernel_basis(ExactMatrix.zeros(2, 2)))
    2
"""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import sympy
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    standard_transformations,
)

from alia.errors import (
    DimensionMismatchError,
    InconsistencyError,
    IncompatibleFieldError,
    NotFiniteOrderError,
)

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]
Scalarish = Union["CycScalar", int, Fraction, str]
Vector = Tuple["CycScalar", ...]

_X = sympy.Symbol("x")
_PARSE_TRANSFORMS = standard_transformations + (convert_xor,)


@lru_cache(maxsize=None)
def _phi(n: int) -> int:
    return int(sympy.totient(n))


@lru_cache(maxsize=None)
def _modulus(n: int) -> Tuple[int, ...]:
    """Ascending integer coefficients of the n-th cyclotomic polynomial."""
    poly = sympy.Poly(sympy.cyclotomic_poly(n, _X), _X)
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


@lru_cache(maxsize=None)
def _power_table(n: int) -> Tuple[Tuple[Fraction, ...], ...]:
    """Reduced coordinates of zeta_n^j for j = 0..n-1."""
    d = _phi(n)
    mod = _modulus(n)
    table: List[Tuple[Fraction, ...]] = []
    current = [Fraction(0)] * d
    current[0] = Fraction(1)
    for _ in range(n):
        table.append(tuple(current))
        # multiply by zeta, then fold the overflow term with the monic modulus
        top = current[-1]
        shifted = [Fraction(0)] + current[:-1]
        if top:
            for k in range(d):
                shifted[k] -= top * mod[k]
        current = shifted
    return tuple(table)


@lru_cache(maxsize=None)
def _trace_weights(n: int) -> Tuple[Fraction, ...]:
    """Normalized trace of zeta_n^k for k < phi(n) (Ramanujan sums / phi(n))."""
    weights = []
    for k in range(_phi(n)):
        g = math.gcd(n, k) if k else n
        q = n // g
        weights.append(Fraction(int(sympy.mobius(q)), _phi(q)))
    return tuple(weights)


def _reduce(poly: Sequence[Fraction], n: int) -> Tuple[Fraction, ...]:
    d = _phi(n)
    if len(poly) <= d:
        return tuple(poly) + (Fraction(0),) * (d - len(poly))
    table = _power_table(n)
    out = list(poly[:d])
    for j in range(d, len(poly)):
        c = poly[j]
        if c:
            row = table[j % n]
            for k in range(d):
                if row[k]:
                    out[k] += c * row[k]
    return tuple(out)


def _poly_trim(p: List[Fraction]) -> List[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(
    a: List[Fraction], b: List[Fraction]
) -> Tuple[List[Fraction], List[Fraction]]:
    a = _poly_trim(list(a))
    b = _poly_trim(list(b))
    if not a or len(a) < len(b):
        return [], a
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    lead = b[-1]
    while a and len(a) >= len(b):
        shift = len(a) - len(b)
        c = a[-1] / lead
        q[shift] = c
        for k, bk in enumerate(b):
            a[k + shift] -= c * bk
        _poly_trim(a)
    return q, a


def _poly_mul(a: Sequence[Fraction], b: Sequence[Fraction]) -> List[Fraction]:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] += ai * bj
    return out


def _poly_sub(a: Sequence[Fraction], b: Sequence[Fraction]) -> List[Fraction]:
    n = max(len(a), len(b))
    out = [Fraction(0)] * n
    for i, c in enumerate(a):
        out[i] += c
    for i, c in enumerate(b):
        out[i] -= c
    return _poly_trim(out)


class CycScalar:
    """Exact element of the cyclotomic field Q(zeta_order).

    Parameters
    ----------
    coeffs : sequence of int or Fraction
        Coordinates in the power basis of zeta_order. Sequences longer than
        phi(order) are reduced modulo the cyclotomic polynomial.
    order : int, optional
        Root-of-unity order of the ambient field. Defaults to 1 (Q).
    """

    __slots__ = ("order", "coeffs", "_hash")

    def __init__(self, coeffs: Sequence[Rational], order: int = 1):
        if order < 1:
            raise ValueError("order must be a positive integer")
        self.order = int(order)
        self.coeffs: Tuple[Fraction, ...] = _reduce(
            [Fraction(c) for c in coeffs], self.order
        )
        self._hash: Optional[int] = None

    # -- constructors -----------------------------------------------------

    @classmethod
    def rational(cls, value: Rational) -> "CycScalar":
        return cls((Fraction(value),), 1)

    @classmethod
    def zero(cls, order: int = 1) -> "CycScalar":
        return cls((), order)

    @classmethod
    def one(cls, order: int = 1) -> "CycScalar":
        return cls((1,), order)

    @classmethod
    def zeta(cls, n: int, k: int = 1) -> "CycScalar":
        """Return zeta_n^k."""
        if n < 1:
            raise ValueError("root order must be positive")
        return cls(_power_table(n)[k % n], n)

    @classmethod
    def coerce(cls, value: Scalarish) -> "CycScalar":
        if isinstance(value, CycScalar):
            return value
        if isinstance(value, bool):
            raise TypeError("booleans are not scalars")
        if isinstance(value, (int, Fraction)):
            return cls.rational(value)
        if isinstance(value, str):
            return cls.parse(value)
        raise TypeError(f"Cannot interpret {type(value).__name__} as a CycScalar")

    @classmethod
    def parse(cls, text: str, order: Optional[int] = None) -> "CycScalar":
        """Parse the exact text syntax, e.g. ``"3/2*zeta5^2 - zeta5 + 1"``.

        Symbols ``zetaN`` denote the primitive root exp(2*pi*i/N); the result
        lives in the field of the lcm of all orders that occur (and ``order``
        when given).
        """
        text = text.strip()
        if not text:
            raise ValueError("empty scalar literal")
        try:
            expr = parse_expr(text, transformations=_PARSE_TRANSFORMS)
        except Exception as exc:  # sympy raises a zoo of exception types
            raise ValueError(f"Cannot parse scalar {text!r}: {exc}") from exc
        roots: Dict[sympy.Symbol, int] = {}
        for sym in expr.free_symbols:
            name = sym.name
            if not name.startswith("zeta") or not name[4:].isdigit():
                raise ValueError(f"Unknown symbol {name!r} in scalar {text!r}")
            roots[sym] = int(name[4:])
        n = order or 1
        for r in roots.values():
            n = math.lcm(n, r)
        w = sympy.Symbol("w")
        expr = sympy.expand(expr.subs({s: w ** (n // r) for s, r in roots.items()}))
        powers = [Fraction(0)] * n
        for term in sympy.Add.make_args(expr):
            coeff, exponent = term.as_coeff_exponent(w)
            if not coeff.is_Rational or not exponent.is_Integer:
                raise ValueError(f"Scalar {text!r} is not a cyclotomic polynomial")
            powers[int(exponent) % n] += Fraction(int(coeff.p), int(coeff.q))
        return cls(powers, n)

    # -- field embedding --------------------------------------------------

    def lift(self, new_order: int) -> "CycScalar":
        """View this element inside Q(zeta_new_order)."""
        return field_embed(self, new_order)

    @staticmethod
    def _align(a: "CycScalar", b: "CycScalar") -> Tuple["CycScalar", "CycScalar"]:
        if a.order == b.order:
            return a, b
        n = math.lcm(a.order, b.order)
        return a.lift(n), b.lift(n)

    def reduced(self) -> "CycScalar":
        """Return the same element in the smallest field Q(zeta_d) holding it."""
        for d in sorted(sympy.divisors(self.order)):
            if d == self.order:
                return self
            candidate = _descend(self, d)
            if candidate is not None:
                return candidate
        return self

    # -- predicates -------------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def height(self) -> int:
        """Bit size of the stored coordinates, used for pivot selection."""
        return sum(
            c.numerator.bit_length() + c.denominator.bit_length()
            for c in self.coeffs
            if c
        )

    # -- arithmetic -------------------------------------------------------

    def __neg__(self) -> "CycScalar":
        return CycScalar._raw(tuple(-c for c in self.coeffs), self.order)

    def __add__(self, other: Scalarish) -> "CycScalar":
        if not isinstance(other, CycScalar):
            if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
                coeffs = list(self.coeffs)
                coeffs[0] += other
                return CycScalar._raw(tuple(coeffs), self.order)
            return NotImplemented
        a, b = CycScalar._align(self, other)
        return CycScalar._raw(tuple(x + y for x, y in zip(a.coeffs, b.coeffs)), a.order)

    __radd__ = __add__

    def __sub__(self, other: Scalarish) -> "CycScalar":
        if not isinstance(other, (CycScalar, int, Fraction)):
            return NotImplemented
        return self + (-CycScalar.coerce(other))

    def __rsub__(self, other: Scalarish) -> "CycScalar":
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return CycScalar.coerce(other) + (-self)

    def __mul__(self, other: Scalarish) -> "CycScalar":
        if not isinstance(other, CycScalar):
            if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
                return CycScalar._raw(tuple(c * other for c in self.coeffs), self.order)
            return NotImplemented
        if other.order == 1:
            return self * other.coeffs[0]
        if self.order == 1:
            return other * self.coeffs[0]
        a, b = CycScalar._align(self, other)
        return CycScalar(_poly_mul(a.coeffs, b.coeffs), a.order)

    __rmul__ = __mul__

    def inverse(self) -> "CycScalar":
        """Multiplicative inverse by the extended Euclidean algorithm."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero CycScalar")
        if self.order == 1:
            return CycScalar._raw((1 / self.coeffs[0],), 1)
        # solve s*a + t*Phi = 1 over Q[x]
        r0 = [Fraction(c) for c in _modulus(self.order)]
        r1 = _poly_trim(list(self.coeffs))
        s0: List[Fraction] = []
        s1: List[Fraction] = [Fraction(1)]
        while len(r1) > 1:
            q, r = _poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        inv_const = 1 / r1[0]
        return CycScalar([c * inv_const for c in s1], self.order)

    def __truediv__(self, other: Scalarish) -> "CycScalar":
        if not isinstance(other, (CycScalar, int, Fraction)):
            return NotImplemented
        other = CycScalar.coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other: Scalarish) -> "CycScalar":
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return CycScalar.coerce(other) * self.inverse()

    def __pow__(self, exponent: int) -> "CycScalar":
        if not isinstance(exponent, int):
            return NotImplemented
        base = self if exponent >= 0 else self.inverse()
        result = CycScalar.one(self.order)
        e = abs(exponent)
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def galois(self, a: int) -> "CycScalar":
        """Apply the automorphism zeta -> zeta^a (a coprime to the order)."""
        n = self.order
        if math.gcd(a, n) != 1:
            raise ValueError(f"{a} is not a unit modulo {n}")
        powers = [Fraction(0)] * n
        for k, c in enumerate(self.coeffs):
            if c:
                powers[(a * k) % n] += c
        return CycScalar(powers, n)

    def conjugate(self) -> "CycScalar":
        return self.galois(-1)

    def normalized_trace(self) -> Fraction:
        """Trace down to Q divided by the field degree (embedding invariant)."""
        return sum(
            (c * w for c, w in zip(self.coeffs, _trace_weights(self.order)) if c),
            Fraction(0),
        )

    # -- comparison -------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, CycScalar):
            if self.order == other.order:
                return self.coeffs == other.coeffs
            a, b = CycScalar._align(self, other)
            return a.coeffs == b.coeffs
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.is_rational() and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.normalized_trace())
        return self._hash

    # -- text -------------------------------------------------------------

    def __str__(self) -> str:
        terms: List[str] = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            mag = abs(c)
            sign = "-" if c < 0 else "+"
            if k == 0:
                body = str(mag)
            else:
                root = f"zeta{self.order}" + (f"^{k}" if k > 1 else "")
                body = root if mag == 1 else f"{mag}*{root}"
            terms.append(f"{sign} {body}")
        if not terms:
            return "0"
        text = " ".join(terms)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def __repr__(self) -> str:
        return f"CycScalar('{self}')"

    @classmethod
    def _raw(cls, coeffs: Tuple[Fraction, ...], order: int) -> "CycScalar":
        obj = cls.__new__(cls)
        obj.order = order
        obj.coeffs = coeffs
        obj._hash = None
        return obj


def _descend(s: CycScalar, d: int) -> Optional[CycScalar]:
    """Return s as an element of Q(zeta_d) if it lies there, else None."""
    n = s.order
    # s is in the subfield iff it is fixed by every a = 1 mod d
    for a in range(1, n):
        if math.gcd(a, n) == 1 and a % d == 1 % d and s.galois(a) != s:
            return None
    # solve for coordinates in Q(zeta_d) by matching lifted power bases
    basis = [CycScalar.zeta(d, k).lift(n) for k in range(_phi(d))]
    rows = [[b.coeffs[i] for b in basis] + [s.coeffs[i]] for i in range(_phi(n))]
    solution = _solve_rational(rows, len(basis))
    if solution is None:
        raise InconsistencyError("Galois-fixed element has no subfield coordinates")
    return CycScalar(solution, d)


def _solve_rational(aug: List[List[Fraction]], ncols: int) -> Optional[List[Fraction]]:
    rows = [list(r) for r in aug]
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if any(row[-1] for row in rows[r:]):
        return None
    out = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        out[c] = rows[i][-1]
    return out


def field_embed(s: CycScalar, new_order: int) -> CycScalar:
    """Embed ``s`` from Q(zeta_n) into Q(zeta_new_order).

    Raises
    ------
    IncompatibleFieldError
        If the current order does not divide ``new_order``.
    """
    if new_order == s.order:
        return s
    if new_order % s.order:
        raise IncompatibleFieldError(
            f"Q(zeta_{s.order}) does not embed into Q(zeta_{new_order})"
        )
    step = new_order // s.order
    powers = [Fraction(0)] * new_order
    for k, c in enumerate(s.coeffs):
        if c:
            powers[k * step] += c
    return CycScalar(powers, new_order)


def common_order(values: Iterable[CycScalar]) -> int:
    n = 1
    for v in values:
        n = math.lcm(n, v.order)
    return n


def root_exponent(value: CycScalar, zeta: CycScalar, nu: int) -> Optional[int]:
    """Return k in [0, nu) with value == zeta**k, or None."""
    power = CycScalar.one()
    for k in range(nu):
        if power == value:
            return k
        power = power * zeta
    return None


def sqrt_in_field(value: Rational) -> CycScalar:
    """Square root of a rational number inside a cyclotomic field.

    Uses quadratic Gauss sums for odd primes, zeta_8 + zeta_8^-1 for 2 and
    zeta_4 for -1. The result is returned in the smallest field holding it.
    """
    q = Fraction(value)
    if q == 0:
        return CycScalar.zero()
    root = CycScalar.one()
    sign = -1 if q < 0 else 1
    q = abs(q)
    num = sympy.factorint(q.numerator)
    den = sympy.factorint(q.denominator)
    square_part = Fraction(1)
    for p, e in num.items():
        square_part *= Fraction(p) ** (e // 2)
        if e % 2:
            root = root * _sqrt_prime(p)
    for p, e in den.items():
        square_part /= Fraction(p) ** (e // 2)
        if e % 2:
            # 1/sqrt(p) = sqrt(p)/p
            root = root * _sqrt_prime(p) / p
    if sign < 0:
        root = root * CycScalar.zeta(4)
    result = root * square_part
    if result * result != Fraction(value):
        raise InconsistencyError(f"square root of {value} failed verification")
    return result.reduced()


@lru_cache(maxsize=None)
def _sqrt_prime(p: int) -> CycScalar:
    if p == 2:
        return CycScalar.zeta(8) + CycScalar.zeta(8, 7)
    gauss = CycScalar.zero(p)
    for a in range(1, p):
        gauss = gauss + CycScalar.zeta(p, a) * int(sympy.legendre_symbol(a, p))
    if p % 4 == 1:
        return gauss
    # gauss = i*sqrt(p)
    return gauss * CycScalar.zeta(4, 3)


# ---------------------------------------------------------------------------
# Vectors
# ---------------------------------------------------------------------------


def as_vector(values: Iterable[Scalarish]) -> Vector:
    return tuple(CycScalar.coerce(v) for v in values)


def zero_vector(n: int) -> Vector:
    return (CycScalar.zero(),) * n


def unit_vector(n: int, i: int) -> Vector:
    return tuple(CycScalar.one() if k == i else CycScalar.zero() for k in range(n))


def vec_add(a: Sequence[CycScalar], b: Sequence[CycScalar]) -> Vector:
    if len(a) != len(b):
        raise DimensionMismatchError(f"vector lengths {len(a)} and {len(b)} differ")
    return tuple(x + y for x, y in zip(a, b))


def vec_scale(c: Scalarish, a: Sequence[CycScalar]) -> Vector:
    c = CycScalar.coerce(c)
    return tuple(c * x for x in a)


def vec_is_zero(a: Sequence[CycScalar]) -> bool:
    return all(x.is_zero() for x in a)


def dot(a: Sequence[CycScalar], b: Sequence[CycScalar]) -> CycScalar:
    if len(a) != len(b):
        raise DimensionMismatchError(f"vector lengths {len(a)} and {len(b)} differ")
    total = CycScalar.zero()
    for x, y in zip(a, b):
        if x and y:
            total = total + x * y
    return total


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------


class ExactMatrix:
    """Immutable dense matrix over cyclotomic fields.

    Parameters
    ----------
    rows : sequence of sequences
        Entries; anything :meth:`CycScalar.coerce` accepts.
    ncols : int, optional
        Column count, required only for matrices without rows.
    """

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Sequence[Sequence[Scalarish]], ncols: Optional[int] = None):
        self.rows: Tuple[Vector, ...] = tuple(as_vector(r) for r in rows)
        self.nrows = len(self.rows)
        if self.rows:
            self.ncols = len(self.rows[0])
            if any(len(r) != self.ncols for r in self.rows):
                raise DimensionMismatchError("ragged matrix rows")
        else:
            self.ncols = ncols or 0

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls([unit_vector(n, i) for i in range(n)], n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "ExactMatrix":
        return cls([zero_vector(ncols) for _ in range(nrows)], ncols)

    @classmethod
    def diag(cls, entries: Sequence[Scalarish]) -> "ExactMatrix":
        n = len(entries)
        vals = as_vector(entries)
        return cls(
            [[vals[i] if i == j else CycScalar.zero() for j in range(n)] for i in range(n)],
            n,
        )

    @classmethod
    def from_columns(
        cls, columns: Sequence[Sequence[Scalarish]], nrows: Optional[int] = None
    ) -> "ExactMatrix":
        if not columns:
            return cls([[] for _ in range(nrows or 0)], 0)
        return cls([list(r) for r in zip(*columns)], len(columns))

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, index: Tuple[int, int]) -> CycScalar:
        i, j = index
        return self.rows[i][j]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> List[Vector]:
        return [self.column(j) for j in range(self.ncols)]

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.columns(), self.nrows)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_zero(self) -> bool:
        return all(vec_is_zero(r) for r in self.rows)

    def field_order(self) -> int:
        return common_order(x for r in self.rows for x in r)

    def lift(self, order: int) -> "ExactMatrix":
        return ExactMatrix([[x.lift(order) for x in r] for r in self.rows], self.ncols)

    # -- arithmetic -------------------------------------------------------

    def _check_same_shape(self, other: "ExactMatrix") -> None:
        if self.shape != other.shape:
            raise DimensionMismatchError(f"shapes {self.shape} and {other.shape} differ")

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        self._check_same_shape(other)
        return ExactMatrix([vec_add(a, b) for a, b in zip(self.rows, other.rows)], self.ncols)

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix([[-x for x in r] for r in self.rows], self.ncols)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self + (-other)

    def __mul__(self, c: Scalarish) -> "ExactMatrix":
        if isinstance(c, ExactMatrix):
            return NotImplemented
        return ExactMatrix([vec_scale(c, r) for r in self.rows], self.ncols)

    __rmul__ = __mul__

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.ncols != other.nrows:
            raise DimensionMismatchError(
                f"cannot multiply {self.shape} by {other.shape}"
            )
        cols = other.columns()
        return ExactMatrix([[dot(r, c) for c in cols] for r in self.rows], other.ncols)

    def apply(self, v: Sequence[CycScalar]) -> Vector:
        if len(v) != self.ncols:
            raise DimensionMismatchError(
                f"vector of length {len(v)} for matrix with {self.ncols} columns"
            )
        return tuple(dot(r, v) for r in self.rows)

    def __pow__(self, exponent: int) -> "ExactMatrix":
        if not self.is_square():
            raise DimensionMismatchError("power of a non-square matrix")
        base = self if exponent >= 0 else self.inverse()
        result = ExactMatrix.identity(self.nrows)
        e = abs(exponent)
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def trace(self) -> CycScalar:
        total = CycScalar.zero()
        for i in range(min(self.nrows, self.ncols)):
            total = total + self.rows[i][i]
        return total

    def hstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.nrows != other.nrows:
            raise DimensionMismatchError("hstack needs equal row counts")
        return ExactMatrix([a + b for a, b in zip(self.rows, other.rows)], self.ncols + other.ncols)

    def vstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.ncols != other.ncols:
            raise DimensionMismatchError("vstack needs equal column counts")
        return ExactMatrix(self.rows + other.rows, self.ncols)

    # -- elimination ------------------------------------------------------

    def _bareiss(self, limit: Optional[int] = None) -> Tuple[List[List[CycScalar]], List[int], int]:
        """Fraction-free row echelon form.

        Each update ``(p * a - f * b) / previous`` is an exact division, so the
        entries below a pivot stay minors of the input. Among the candidate rows
        of a column the entry of smallest height is used as pivot. Returns the
        rows, the pivot columns and the sign of the row permutation.
        """
        rows = [list(r) for r in self.rows]
        pivots: List[int] = []
        sign = 1
        previous = CycScalar.one()
        r = 0
        for c in range(self.ncols if limit is None else min(limit, self.ncols)):
            if r >= len(rows):
                break
            candidates = [i for i in range(r, len(rows)) if rows[i][c]]
            if not candidates:
                continue
            p = min(candidates, key=lambda i: rows[i][c].height())
            if p != r:
                rows[r], rows[p] = rows[p], rows[r]
                sign = -sign
            pivot_row = rows[r]
            pivot = pivot_row[c]
            for i in range(r + 1, len(rows)):
                f = rows[i][c]
                rows[i] = [(pivot * a - f * b) / previous for a, b in zip(rows[i], pivot_row)]
            previous = pivot
            pivots.append(c)
            r += 1
        return rows, pivots, sign

    def rref(self, limit: Optional[int] = None) -> Tuple["ExactMatrix", List[int]]:
        """Reduced row echelon form and pivot columns.

        Pivots are only taken in the first ``limit`` columns when given.
        The echelon form comes from :meth:`_bareiss`; pivot rows are scaled
        and cleared upwards only at the end.
        """
        rows, pivots, _sign = self._bareiss(limit)
        for r in range(len(pivots) - 1, -1, -1):
            c = pivots[r]
            inv = rows[r][c].inverse()
            rows[r] = [x * inv if x else x for x in rows[r]]
            pivot_row = rows[r]
            for i in range(r):
                f = rows[i][c]
                if f:
                    rows[i] = [a - f * b if b else a for a, b in zip(rows[i], pivot_row)]
        return ExactMatrix(rows, self.ncols), pivots

    def rank(self) -> int:
        return len(self._bareiss()[1])

    def det(self) -> CycScalar:
        """Determinant as the last fraction-free pivot."""
        if not self.is_square():
            raise DimensionMismatchError("determinant of a non-square matrix")
        n = self.nrows
        if n == 0:
            return CycScalar.one()
        rows, pivots, sign = self._bareiss()
        if len(pivots) < n:
            return CycScalar.zero()
        return rows[n - 1][n - 1] if sign > 0 else -rows[n - 1][n - 1]

    def inverse(self) -> "ExactMatrix":
        if not self.is_square():
            raise DimensionMismatchError("inverse of a non-square matrix")
        n = self.nrows
        reduced, pivots = self.hstack(ExactMatrix.identity(n)).rref()
        if pivots[:n] != list(range(n)):
            raise ZeroDivisionError("matrix is singular")
        return ExactMatrix([r[n:] for r in reduced.rows], n)

    def solve(self, b: Sequence[CycScalar]) -> Optional[Vector]:
        """One solution x of ``self @ x == b``, or None when inconsistent."""
        solutions = self.solve_many([b])
        return solutions[0]

    def solve_many(self, rhs: Sequence[Sequence[CycScalar]]) -> List[Optional[Vector]]:
        n = self.ncols
        k = len(rhs)
        for b in rhs:
            if len(b) != self.nrows:
                raise DimensionMismatchError("right-hand side length mismatch")
        aug = ExactMatrix(
            [list(self.rows[i]) + [b[i] for b in rhs] for i in range(self.nrows)],
            n + k,
        )
        reduced, coeff_pivots = aug.rref(limit=n)
        out: List[Optional[Vector]] = []
        for j in range(k):
            col = n + j
            if any(reduced.rows[i][col] for i in range(len(coeff_pivots), self.nrows)):
                out.append(None)
                continue
            x = [CycScalar.zero()] * n
            for i, p in enumerate(coeff_pivots):
                x[p] = reduced.rows[i][col]
            out.append(tuple(x))
        return out

    def column_space(self) -> List[Vector]:
        """RREF basis of the column space, as vectors."""
        reduced, pivots = self.transpose().rref()
        return [reduced.rows[i] for i in range(len(pivots))]

    def multiplicative_order(self, bound: int) -> int:
        """Smallest k <= bound with self**k == I.

        Raises
        ------
        NotFiniteOrderError
            If no such k exists.
        """
        ident = ExactMatrix.identity(self.nrows)
        power = self
        for k in range(1, bound + 1):
            if power == ident:
                return k
            power = power @ self
        raise NotFiniteOrderError(f"matrix has no finite order up to {bound}")

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.rows) + "]"

    def __repr__(self) -> str:
        return f"ExactMatrix({self})"

    def to_text(self) -> List[List[str]]:
        return [[str(x) for x in r] for r in self.rows]

    @classmethod
    def from_text(cls, rows: Sequence[Sequence[Union[str, int]]]) -> "ExactMatrix":
        return cls([[CycScalar.coerce(x) for x in r] for r in rows])


def kernel_basis(matrix: ExactMatrix) -> List[Vector]:
    """RREF-normalized basis of the right kernel.

    Raises
    ------
    InconsistencyError
        If a basis vector fails ``M @ v == 0`` or rank-nullity fails.
    """
    reduced, pivots = matrix.rref()
    n = matrix.ncols
    free = [c for c in range(n) if c not in set(pivots)]
    basis: List[Vector] = []
    for f in free:
        v = [CycScalar.zero()] * n
        v[f] = CycScalar.one()
        for i, p in enumerate(pivots):
            v[p] = -reduced.rows[i][f]
        basis.append(tuple(v))
    if len(pivots) + len(basis) != n:
        raise InconsistencyError("rank-nullity violated")
    for v in basis:
        if not vec_is_zero(matrix.apply(v)):
            raise InconsistencyError("kernel vector is not annihilated")
    return basis


def span_intersection(a: Sequence[Vector], b: Sequence[Vector]) -> List[Vector]:
    """RREF basis of span(a) ∩ span(b)."""
    if not a or not b:
        return []
    n = len(a[0])
    # solve sum x_i a_i = sum y_j b_j
    cols = list(a) + [vec_scale(-1, v) for v in b]
    kernel = kernel_basis(ExactMatrix.from_columns(cols, n))
    vectors = []
    for k in kernel:
        v = zero_vector(n)
        for coeff, base in zip(k[: len(a)], a):
            if coeff:
                v = vec_add(v, vec_scale(coeff, base))
        vectors.append(v)
    if not vectors:
        return []
    reduced, pivots = ExactMatrix(vectors, n).rref()
    return [reduced.rows[i] for i in range(len(pivots))]


def eigenprojectors(
    a: ExactMatrix, nu: int, zeta: Optional[CycScalar] = None
) -> List[ExactMatrix]:
    """Projectors onto the zeta^m-eigenspaces of ``a`` for m = 0..nu-1.

    ``P_m = (1/nu) * sum_k zeta^(-m k) a^k`` requires ``a**nu == I``.
    """
    if not a.is_square():
        raise DimensionMismatchError("eigenprojectors need a square matrix")
    zeta = zeta if zeta is not None else CycScalar.zeta(nu)
    powers = [ExactMatrix.identity(a.nrows)]
    for _ in range(nu):
        powers.append(powers[-1] @ a)
    if powers[nu] != powers[0]:
        raise NotFiniteOrderError(f"operator does not satisfy A^{nu} = I")
    inv_zeta = zeta.inverse()
    projectors = []
    for m in range(nu):
        total = ExactMatrix.zeros(a.nrows, a.ncols)
        w = CycScalar.one()
        step = inv_zeta ** m
        for k in range(nu):
            total = total + powers[k] * w
            w = w * step
        projectors.append(total * Fraction(1, nu))
    return projectors


class EchelonSpan:
    """Incrementally maintained reduced echelon basis of a subspace.

    Rows are stored sparsely as ``{column: scalar}`` with pivot entry 1.
    """

    def __init__(self, ambient_dim: int):
        self.ambient_dim = ambient_dim
        self._rows: Dict[int, Dict[int, CycScalar]] = {}

    @property
    def dim(self) -> int:
        return len(self._rows)

    def reduce(self, vector: Mapping[int, CycScalar]) -> Dict[int, CycScalar]:
        v = {k: CycScalar.coerce(x) for k, x in vector.items() if x}
        for pivot in sorted(self._rows):
            c = v.get(pivot)
            if c:
                for k, x in self._rows[pivot].items():
                    y = v.get(k, CycScalar.zero()) - c * x
                    if y:
                        v[k] = y
                    else:
                        v.pop(k, None)
        return v

    def add(self, vector: Union[Mapping[int, CycScalar], Sequence[CycScalar]]) -> bool:
        """Insert a vector; returns True when the span grew."""
        if not isinstance(vector, Mapping):
            vector = {k: CycScalar.coerce(x) for k, x in enumerate(vector) if x}
        v = self.reduce(vector)
        if not v:
            return False
        pivot = min(v)
        inv = v[pivot].inverse()
        v = {k: x * inv for k, x in v.items()}
        for p, row in self._rows.items():
            c = row.get(pivot)
            if c:
                for k, x in v.items():
                    y = row.get(k, CycScalar.zero()) - c * x
                    if y:
                        row[k] = y
                    else:
                        row.pop(k, None)
        self._rows[pivot] = v
        return True

    def contains(self, vector: Union[Mapping[int, CycScalar], Sequence[CycScalar]]) -> bool:
        if not isinstance(vector, Mapping):
            vector = {k: CycScalar.coerce(x) for k, x in enumerate(vector) if x}
        return not self.reduce(vector)

    def basis(self) -> List[Vector]:
        out = []
        for pivot in sorted(self._rows):
            row = self._rows[pivot]
            out.append(tuple(row.get(k, CycScalar.zero()) for k in range(self.ambient_dim)))
        return out

    def pivots(self) -> List[int]:
        return sorted(self._rows)
