"""Functions on a punctured Riemann sphere.

The ring of functions holomorphic away from a finite pole set ``S`` consists
of rational functions whose denominators vanish only on ``S``. This module
provides polynomials over :class:`~alia.exactmath.CycScalar`, the pole-restricted
rational functions, Taylor jets and their Jordan-block evaluation, Hom-space
dimensions between jet representations, Hermite interpolation, Möbius
pullbacks, linearizing charts at fixed points and the pole-order filtration.

Example usage:
    >>> from alia.funring import PoleRationalFunction, SpherePoint, taylor_jet
    >>> f = PoleRationalFunction.parse("z^5/(z-1)", [SpherePoint.INFINITY, SpherePoint.parse("1")])
    >>> [str(c) for c in taylor_jet(f, SpherePoint.parse("2"), 2).coeffs]
    ['32', '48']
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import ClassVar, Iterable, List, Optional, Sequence, Tuple, Union

import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from alia.errors import (
    ChartError,
    DimensionMismatchError,
    InconsistencyError,
    NotFiniteOrderError,
    PoleError,
    PreconditionError,
)
from alia.exactmath import CycScalar, ExactMatrix, Scalarish, kernel_basis

logger = logging.getLogger(__name__)

_Z = sympy.Symbol("z")
_TRANSFORMS = standard_transformations + (convert_xor,)


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------


class Polynomial:
    """Dense univariate polynomial over cyclotomic scalars, ascending degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalarish] = ()):
        values = [CycScalar.coerce(c) for c in coeffs]
        while values and values[-1].is_zero():
            values.pop()
        self.coeffs: Tuple[CycScalar, ...] = tuple(values)

    @classmethod
    def constant(cls, c: Scalarish) -> "Polynomial":
        return cls([c])

    @classmethod
    def monomial(cls, k: int, c: Scalarish = 1) -> "Polynomial":
        return cls([0] * k + [c])

    @classmethod
    def linear_factor(cls, root: Scalarish) -> "Polynomial":
        """The polynomial ``z - root``."""
        return cls([-CycScalar.coerce(root), 1])

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> CycScalar:
        return self.coeffs[-1] if self.coeffs else CycScalar.zero()

    def coefficient(self, k: int) -> CycScalar:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else CycScalar.zero()

    def __add__(self, other: Union["Polynomial", Scalarish]) -> "Polynomial":
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(self.coefficient(k) + other.coefficient(k) for k in range(n))

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(-c for c in self.coeffs)

    def __sub__(self, other: Union["Polynomial", Scalarish]) -> "Polynomial":
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other)
        return self + (-other)

    def __mul__(self, other: Union["Polynomial", Scalarish]) -> "Polynomial":
        if not isinstance(other, Polynomial):
            c = CycScalar.coerce(other)
            return Polynomial(c * a for a in self.coeffs)
        if self.is_zero() or other.is_zero():
            return Polynomial()
        out = [CycScalar.zero()] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] = out[i + j] + a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Polynomial":
        result = Polynomial.constant(1)
        for _ in range(exponent):
            result = result * self
        return result

    def __divmod__(self, other: "Polynomial") -> Tuple["Polynomial", "Polynomial"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        remainder = list(self.coeffs)
        quotient = [CycScalar.zero()] * max(len(remainder) - len(other.coeffs) + 1, 0)
        inv_lead = other.leading().inverse()
        while len(remainder) >= len(other.coeffs) and remainder:
            shift = len(remainder) - len(other.coeffs)
            c = remainder[-1] * inv_lead
            quotient[shift] = c
            for k, b in enumerate(other.coeffs):
                remainder[k + shift] = remainder[k + shift] - c * b
            remainder.pop()
            while remainder and remainder[-1].is_zero():
                remainder.pop()
        return Polynomial(quotient), Polynomial(remainder)

    def __floordiv__(self, other: "Polynomial") -> "Polynomial":
        return divmod(self, other)[0]

    def __mod__(self, other: "Polynomial") -> "Polynomial":
        return divmod(self, other)[1]

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Polynomial):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __call__(self, x: Scalarish) -> CycScalar:
        x = CycScalar.coerce(x)
        total = CycScalar.zero()
        for c in reversed(self.coeffs):
            total = total * x + c
        return total

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        return self * self.leading().inverse()

    def derivative(self) -> "Polynomial":
        return Polynomial(c * k for k, c in enumerate(self.coeffs) if k)

    def taylor_shift(self, x0: Scalarish) -> "Polynomial":
        """Coefficients of ``p(x0 + t)`` as a polynomial in t."""
        x0 = CycScalar.coerce(x0)
        work = list(self.coeffs)
        n = len(work)
        for i in range(n):
            for k in range(n - 2, i - 1, -1):
                work[k] = work[k] + x0 * work[k + 1]
        return Polynomial(work)

    def homogenized_compose(self, p: "Polynomial", q: "Polynomial", n: int) -> "Polynomial":
        """``sum_k c_k p^k q^(n-k)`` for ``n >= degree``."""
        total = Polynomial()
        for k, c in enumerate(self.coeffs):
            if c:
                total = total + (p ** k) * (q ** (n - k)) * c
        return total

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts: List[str] = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c.is_zero():
                continue
            mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
            if c.is_rational():
                value = c.to_fraction()
                sign = "-" if value < 0 else "+"
                mag = abs(value)
                if not mono:
                    body = str(mag)
                elif mag == 1:
                    body = mono
                else:
                    body = f"{mag}*{mono}"
            else:
                sign = "+"
                body = f"({c})" + (f"*{mono}" if mono else "")
            parts.append(f"{sign} {body}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def __repr__(self) -> str:
        return f"Polynomial('{self}')"


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic greatest common divisor."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def _sympy_to_polynomial(expr: sympy.Expr) -> Polynomial:
    poly = sympy.Poly(sympy.expand(expr), _Z)
    coeffs = list(reversed(poly.all_coeffs()))
    return Polynomial(CycScalar.parse(str(c)) for c in coeffs)


# ---------------------------------------------------------------------------
# Points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpherePoint:
    """Point of the Riemann sphere: a finite scalar or infinity."""

    value: Optional[CycScalar]

    INFINITY: ClassVar["SpherePoint"]

    @classmethod
    def finite(cls, value: Scalarish) -> "SpherePoint":
        return cls(CycScalar.coerce(value))

    @classmethod
    def parse(cls, text: Union[str, int]) -> "SpherePoint":
        if isinstance(text, str) and text.strip().lower() in {"inf", "infinity", "oo", "∞"}:
            return cls.INFINITY
        return cls.finite(text if not isinstance(text, str) else CycScalar.parse(text))

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def require_finite(self) -> CycScalar:
        if self.value is None:
            raise ChartError("operation needs a finite point; apply a Möbius chart first")
        return self.value

    def homogeneous(self) -> Tuple[CycScalar, CycScalar]:
        if self.value is None:
            return (CycScalar.one(), CycScalar.zero())
        return (self.value, CycScalar.one())

    def __str__(self) -> str:
        return "inf" if self.value is None else str(self.value)

    def __repr__(self) -> str:
        return f"SpherePoint({self})"


SpherePoint.INFINITY = SpherePoint(None)


def mobius_apply(gamma: ExactMatrix, x: SpherePoint) -> SpherePoint:
    """Image of a point under ``z -> (a z + b) / (c z + d)``."""
    (a, b), (c, d) = gamma.rows
    u, v = x.homogeneous()
    num = a * u + b * v
    den = c * u + d * v
    if den.is_zero():
        return SpherePoint.INFINITY
    return SpherePoint(num / den)


def mobius_inverse(gamma: ExactMatrix) -> ExactMatrix:
    """Adjugate of a 2 x 2 matrix, the inverse up to scaling."""
    _check_mobius(gamma)
    (a, b), (c, d) = gamma.rows
    return ExactMatrix([[d, -b], [-c, a]])


def mobius_equal(g1: ExactMatrix, g2: ExactMatrix) -> bool:
    """Projective equality of Möbius matrices."""
    entries1 = [x for r in g1.rows for x in r]
    entries2 = [x for r in g2.rows for x in r]
    pivot = next(k for k, x in enumerate(entries1) if x)
    if entries2[pivot].is_zero():
        return False
    ratio = entries2[pivot] / entries1[pivot]
    return all(x * ratio == y for x, y in zip(entries1, entries2))


def mobius_normalize(gamma: ExactMatrix) -> ExactMatrix:
    """Scale so the first nonzero entry is 1."""
    entries = [x for r in gamma.rows for x in r]
    pivot = next(x for x in entries if x)
    return gamma * pivot.inverse()


def _check_mobius(gamma: ExactMatrix) -> None:
    if gamma.shape != (2, 2):
        raise DimensionMismatchError("Möbius maps are 2 x 2 matrices")
    if gamma.det().is_zero():
        raise PreconditionError("singular Möbius matrix")


# ---------------------------------------------------------------------------
# Rational functions with poles in S
# ---------------------------------------------------------------------------


def _unique_points(points: Iterable[SpherePoint]) -> Tuple[SpherePoint, ...]:
    out: List[SpherePoint] = []
    for p in points:
        if p not in out:
            out.append(p)
    return tuple(out)


class PoleRationalFunction:
    """Reduced rational function ``num/den`` holomorphic outside ``pole_set``.

    Raises
    ------
    PoleError
        If the denominator has a root outside the pole set, or if infinity is
        not a pole and ``deg num > deg den``.
    """

    __slots__ = ("num", "den", "pole_set")

    def __init__(
        self,
        num: Union[Polynomial, Scalarish],
        den: Union[Polynomial, Scalarish] = 1,
        pole_set: Sequence[SpherePoint] = (SpherePoint.INFINITY,),
    ):
        num = num if isinstance(num, Polynomial) else Polynomial.constant(num)
        den = den if isinstance(den, Polynomial) else Polynomial.constant(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            den = Polynomial.constant(1)
        else:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, den = num // g, den // g
        scale = den.leading().inverse()
        self.num = num * scale
        self.den = den * scale
        self.pole_set = _unique_points(pole_set)
        self._check_poles()

    def _check_poles(self) -> None:
        rest = self.den
        for p in self.pole_set:
            if p.is_infinite:
                continue
            factor = Polynomial.linear_factor(p.value)
            while rest.degree > 0:
                q, r = divmod(rest, factor)
                if not r.is_zero():
                    break
                rest = q
        if rest.degree > 0:
            raise PoleError(f"denominator {self.den} has roots outside the pole set")
        if SpherePoint.INFINITY not in self.pole_set and self.num.degree > self.den.degree:
            raise PoleError("function has a pole at infinity, which is not in the pole set")

    # -- constructors -----------------------------------------------------

    @classmethod
    def constant(cls, c: Scalarish, pole_set: Sequence[SpherePoint]) -> "PoleRationalFunction":
        return cls(Polynomial.constant(c), Polynomial.constant(1), pole_set)

    @classmethod
    def parse(cls, text: str, pole_set: Sequence[SpherePoint] = (SpherePoint.INFINITY,)) -> "PoleRationalFunction":
        """Parse text such as ``"((1/2)*z^3 - 1)/((z-1)*(z+1))"``."""
        try:
            expr = parse_expr(text, transformations=_TRANSFORMS, local_dict={"z": _Z})
        except Exception as exc:  # sympy raises many exception types
            raise ValueError(f"Cannot parse rational function {text!r}: {exc}") from exc
        for sym in expr.free_symbols:
            if sym != _Z and not (sym.name.startswith("zeta") and sym.name[4:].isdigit()):
                raise ValueError(f"Unknown symbol {sym.name!r} in {text!r}")
        num, den = sympy.fraction(sympy.together(expr))
        return cls(_sympy_to_polynomial(num), _sympy_to_polynomial(den), pole_set)

    # -- arithmetic -------------------------------------------------------

    def _combined_poles(self, other: "PoleRationalFunction") -> Tuple[SpherePoint, ...]:
        return _unique_points(self.pole_set + other.pole_set)

    def _coerce(self, other: Union["PoleRationalFunction", Scalarish]) -> "PoleRationalFunction":
        if isinstance(other, PoleRationalFunction):
            return other
        return PoleRationalFunction.constant(other, self.pole_set)

    def __add__(self, other: Union["PoleRationalFunction", Scalarish]) -> "PoleRationalFunction":
        other = self._coerce(other)
        return PoleRationalFunction(
            self.num * other.den + other.num * self.den,
            self.den * other.den,
            self._combined_poles(other),
        )

    __radd__ = __add__

    def __neg__(self) -> "PoleRationalFunction":
        return PoleRationalFunction(-self.num, self.den, self.pole_set)

    def __sub__(self, other: Union["PoleRationalFunction", Scalarish]) -> "PoleRationalFunction":
        return self + (-self._coerce(other))

    def __mul__(self, other: Union["PoleRationalFunction", Scalarish]) -> "PoleRationalFunction":
        other = self._coerce(other)
        return PoleRationalFunction(
            self.num * other.num, self.den * other.den, self._combined_poles(other)
        )

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "PoleRationalFunction":
        result = PoleRationalFunction.constant(1, self.pole_set)
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PoleRationalFunction):
            return NotImplemented
        return (
            self.num == other.num
            and self.den == other.den
            and set(self.pole_set) == set(other.pole_set)
        )

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def evaluate(self, x: SpherePoint) -> CycScalar:
        if x.is_infinite:
            if self.num.degree > self.den.degree:
                raise PoleError("function has a pole at infinity")
            if self.num.degree < self.den.degree:
                return CycScalar.zero()
            return self.num.leading() / self.den.leading()
        d = self.den(x.value)
        if d.is_zero():
            raise PoleError(f"function has a pole at {x}")
        return self.num(x.value) / d

    def pole_order(self, p: SpherePoint) -> int:
        """Order of the pole at ``p`` (0 when holomorphic there)."""
        if p.is_infinite:
            return max(0, self.num.degree - self.den.degree)
        factor = Polynomial.linear_factor(p.value)
        order = 0
        rest = self.den
        while rest.degree > 0:
            q, r = divmod(rest, factor)
            if not r.is_zero():
                break
            rest = q
            order += 1
        return order

    def __str__(self) -> str:
        if self.den.degree == 0:
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self) -> str:
        return f"PoleRationalFunction('{self}')"


# ---------------------------------------------------------------------------
# Jets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Jet:
    """Taylor-normalized jet: ``coeffs[i] = f^(i)(base) / i!``."""

    base: SpherePoint
    coeffs: Tuple[CycScalar, ...]

    @property
    def order(self) -> int:
        return len(self.coeffs)


def taylor_jet(f: PoleRationalFunction, x0: SpherePoint, m: int) -> Jet:
    """First ``m`` Taylor coefficients of ``f`` at the finite point ``x0``.

    Raises
    ------
    ChartError
        If ``x0`` is infinity.
    PoleError
        If ``x0`` lies in the pole set or is a root of the denominator.
    """
    if m < 1:
        raise PreconditionError("jet order must be at least 1")
    x = x0.require_finite()
    if x0 in f.pole_set:
        raise PoleError(f"{x0} lies in the pole set")
    n = f.num.taylor_shift(x)
    d = f.den.taylor_shift(x)
    d0 = d.coefficient(0)
    if d0.is_zero():
        raise PoleError(f"denominator vanishes at {x0}")
    inv = d0.inverse()
    coeffs: List[CycScalar] = []
    for k in range(m):
        acc = n.coefficient(k)
        for j in range(1, k + 1):
            dj = d.coefficient(j)
            if dj:
                acc = acc - dj * coeffs[k - j]
        coeffs.append(acc * inv)
    return Jet(x0, tuple(coeffs))


def jordan_eval(f: PoleRationalFunction, x: SpherePoint, m: int) -> ExactMatrix:
    """``f(J_{x,m})``: upper-triangular Toeplitz matrix of the jet of ``f`` at x."""
    jet = taylor_jet(f, x, m)
    zero = CycScalar.zero()
    return ExactMatrix(
        [[jet.coeffs[j - i] if j >= i else zero for j in range(m)] for i in range(m)], m
    )


def ring_generators(pole_set: Sequence[SpherePoint]) -> List[PoleRationalFunction]:
    """Generators ``z`` (when infinity is a pole) and ``1/(z - eps)`` of the ring."""
    gens: List[PoleRationalFunction] = []
    if SpherePoint.INFINITY in pole_set:
        gens.append(PoleRationalFunction(Polynomial.monomial(1), 1, pole_set))
    for p in pole_set:
        if not p.is_infinite:
            gens.append(PoleRationalFunction(1, Polynomial.linear_factor(p.value), pole_set))
    return gens


def hom_dimension(
    x: SpherePoint,
    i: int,
    x2: SpherePoint,
    j: int,
    pole_set: Optional[Sequence[SpherePoint]] = None,
) -> int:
    """Dimension of the intertwiners from the jet representation (x, i) to (x2, j)."""
    poles = tuple(pole_set) if pole_set is not None else (SpherePoint.INFINITY,)
    gens = ring_generators(poles)
    unknowns = i * j
    rows: List[List[CycScalar]] = []
    for f in gens:
        r1 = jordan_eval(f, x, i)
        r2 = jordan_eval(f, x2, j)
        # theta is j x i, unknown (a, b) at index a*i + b; rows of r2*theta - theta*r1
        for a in range(j):
            for b in range(i):
                row = [CycScalar.zero()] * unknowns
                for c in range(j):
                    if r2[a, c]:
                        row[c * i + b] = row[c * i + b] + r2[a, c]
                for c in range(i):
                    if r1[c, b]:
                        row[a * i + c] = row[a * i + c] - r1[c, b]
                rows.append(row)
    if not rows:
        return unknowns
    return len(kernel_basis(ExactMatrix(rows, unknowns)))


def hermite_interpolate(
    points: Sequence[Tuple[SpherePoint, Scalarish]],
    m: int,
    pole_set: Optional[Sequence[SpherePoint]] = None,
) -> PoleRationalFunction:
    """Polynomial f with ``f^(j)(z_i) = 0`` for ``j < m`` and ``f^(m)(z_i) = c_i``.

    The interpolant is ``prod (z - z_k)^m * g`` with g the Lagrange polynomial
    through the rescaled targets; the result is checked against its jets.
    """
    poles = tuple(pole_set) if pole_set is not None else (SpherePoint.INFINITY,)
    if SpherePoint.INFINITY not in poles:
        raise PreconditionError("polynomial interpolation needs infinity in the pole set")
    if m < 0:
        raise PreconditionError("derivative order must be nonnegative")
    nodes: List[CycScalar] = []
    targets: List[CycScalar] = []
    for p, c in points:
        if p.is_infinite:
            raise PreconditionError("interpolation points must be finite")
        if p in poles:
            raise PoleError(f"interpolation point {p} lies in the pole set")
        if p.value in nodes:
            raise PreconditionError(f"duplicate interpolation point {p}")
        nodes.append(p.value)
        targets.append(CycScalar.coerce(c))
    if not nodes:
        raise PreconditionError("no interpolation points given")
    base = Polynomial.constant(1)
    for z in nodes:
        base = base * Polynomial.linear_factor(z) ** m
    factorial = math.factorial(m)
    g = Polynomial()
    for i, zi in enumerate(nodes):
        weight = CycScalar.one() * factorial
        lagrange = Polynomial.constant(1)
        for k, zk in enumerate(nodes):
            if k != i:
                weight = weight * (zi - zk) ** m
                lagrange = lagrange * Polynomial.linear_factor(zk) * (zi - zk).inverse()
        g = g + lagrange * (targets[i] / weight)
    f = PoleRationalFunction(base * g, 1, poles)
    for z, c in zip(nodes, targets):
        jet = taylor_jet(f, SpherePoint(z), m + 1)
        if any(jet.coeffs[:m]) or jet.coeffs[m] * factorial != c:
            raise InconsistencyError("Hermite interpolant failed its jet check")
    logger.debug("Hermite interpolant of degree %d through %d points", f.num.degree, len(nodes))
    return f


def mobius_pullback(f: PoleRationalFunction, gamma: ExactMatrix) -> PoleRationalFunction:
    """``gamma f = f o gamma^-1``, with the pole set moved by gamma."""
    _check_mobius(gamma)
    (a, b), (c, d) = mobius_inverse(gamma).rows
    p = Polynomial([b, a])
    q = Polynomial([d, c])
    n = max(f.num.degree, f.den.degree, 0)
    num = f.num.homogenized_compose(p, q, n)
    den = f.den.homogenized_compose(p, q, n)
    poles = tuple(mobius_apply(gamma, s) for s in f.pole_set)
    return PoleRationalFunction(num, den, poles)


@dataclass(frozen=True)
class LinearizingChart:
    """Coordinate ``t = (C00 x + C01)/(C10 x + C11)`` with ``t(x0) = 0``.

    In this chart the stabilizer generator satisfies ``t(gamma0 x) = zeta * t(x)``,
    so it acts on functions by ``gamma0 . t = zeta^-1 t``.
    """

    chart: ExactMatrix
    zeta: CycScalar
    order: int


def _root_of_unity_order(z: CycScalar) -> Optional[int]:
    bound = 2 * z.order
    power = z
    for k in range(1, bound + 1):
        if power == 1:
            return k
        power = power * z
    return None


def linearizing_coordinate(x0: SpherePoint, gamma0: ExactMatrix) -> LinearizingChart:
    """Chart at a fixed point ``x0`` of ``gamma0`` in which gamma0 is a rotation.

    Raises
    ------
    PreconditionError
        If ``gamma0`` does not fix ``x0``.
    NotFiniteOrderError
        If ``gamma0`` has infinite order as a Möbius map.
    """
    _check_mobius(gamma0)
    if mobius_apply(gamma0, x0) != x0:
        raise PreconditionError(f"{x0} is not fixed by the stabilizer generator")
    one, zero = CycScalar.one(), CycScalar.zero()
    row1 = (zero, one) if x0.is_infinite else (one, -x0.value)
    (a, b), (c, d) = gamma0.rows
    if b.is_zero() and c.is_zero() and a == d:
        second = (one, zero) if x0.is_infinite else (zero, one)
        return LinearizingChart(ExactMatrix([row1, second]), one, 1)
    image = (row1[0] * a + row1[1] * c, row1[0] * b + row1[1] * d)
    k = 0 if row1[0] else 1
    lam1 = image[k] / row1[k]
    if image != (lam1 * row1[0], lam1 * row1[1]):
        raise InconsistencyError("fixed point does not give a left eigenvector")
    lam2 = gamma0.trace() - lam1
    if lam1 == lam2:
        raise NotFiniteOrderError("parabolic Möbius map has infinite order")
    shifted = gamma0 - ExactMatrix.identity(2) * lam2
    row2 = kernel_basis(shifted.transpose())[0]
    zeta = lam1 / lam2
    nu = _root_of_unity_order(zeta)
    if nu is None:
        raise NotFiniteOrderError("stabilizer generator has infinite order")
    chart = ExactMatrix([row1, row2])
    logger.debug("linearizing chart at %s with rotation of order %d", x0, nu)
    return LinearizingChart(chart, zeta, nu)


def chart_jet(f: PoleRationalFunction, x0: SpherePoint, m: int, chart: Optional[ExactMatrix] = None) -> Jet:
    """Jet of ``f`` at ``x0`` in the coordinate given by ``chart`` (standard chart if None)."""
    if chart is None:
        return taylor_jet(f, x0, m)
    return taylor_jet(mobius_pullback(f, chart), SpherePoint.finite(0), m)


# ---------------------------------------------------------------------------
# Pole-order filtration
# ---------------------------------------------------------------------------


class FunctionFiltration:
    """Functions with pole order at most ``D`` at every point of ``S``.

    Elements are ``p / q_D`` with ``q_D = prod_finite (z - eps)^D`` and
    ``deg p < size``; coordinates are the coefficients of p.
    """

    def __init__(self, pole_set: Sequence[SpherePoint], degree: int):
        if degree < 0:
            raise PreconditionError("filtration degree must be nonnegative")
        self.pole_set = _unique_points(pole_set)
        if not self.pole_set:
            raise PreconditionError("pole set must be non-empty")
        self.degree = degree
        finite = [p for p in self.pole_set if not p.is_infinite]
        self.denominator = Polynomial.constant(1)
        for p in finite:
            self.denominator = self.denominator * Polynomial.linear_factor(p.value) ** degree
        has_infinity = SpherePoint.INFINITY in self.pole_set
        self.size = degree * len(finite) + (degree + 1 if has_infinity else 1)

    def basis_function(self, k: int) -> PoleRationalFunction:
        return PoleRationalFunction(Polynomial.monomial(k), self.denominator, self.pole_set)

    def function(self, coords: Sequence[CycScalar]) -> PoleRationalFunction:
        if len(coords) != self.size:
            raise DimensionMismatchError("coordinate vector has the wrong length")
        return PoleRationalFunction(Polynomial(coords), self.denominator, self.pole_set)

    def coordinates(self, f: PoleRationalFunction) -> Tuple[CycScalar, ...]:
        q, r = divmod(self.denominator, f.den)
        if not r.is_zero():
            raise PreconditionError(f"{f} has poles beyond filtration degree {self.degree}")
        p = f.num * q
        if p.degree >= self.size:
            raise PreconditionError(f"{f} has poles beyond filtration degree {self.degree}")
        return tuple(p.coefficient(k) for k in range(self.size))

    def action_matrix(self, gamma: ExactMatrix) -> ExactMatrix:
        """Matrix of ``f -> f o gamma^-1`` on the basis ``z^k / q_D``."""
        columns = [
            self.coordinates(mobius_pullback(self.basis_function(k), gamma))
            for k in range(self.size)
        ]
        return ExactMatrix.from_columns(columns, self.size)

    def embed(self, coords: Sequence[CycScalar], lower: "FunctionFiltration") -> Tuple[CycScalar, ...]:
        """Coordinates in ``self`` of an element given in a lower filtration step."""
        return self.coordinates(lower.function(coords))


def degree_of(f: PoleRationalFunction) -> int:
    """Smallest filtration degree containing ``f``."""
    return max((f.pole_order(p) for p in f.pole_set), default=0)


def parse_points(values: Iterable[Union[str, int]]) -> List[SpherePoint]:
    return [SpherePoint.parse(v) for v in values]


def point_key(p: SpherePoint) -> Tuple[int, Tuple]:
    """Deterministic sort key for sphere points."""
    if p.is_infinite:
        return (1, ())
    return (0, (p.value.order, p.value.coeffs))


