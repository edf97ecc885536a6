"""Tests for exact cyclotomic arithmetic and linear algebra."""

import random
from fractions import Fraction

import pytest

from alia.errors import (
    DimensionMismatchError,
    IncompatibleFieldError,
    NotFiniteOrderError,
)
from alia.exactmath import (
    CycScalar,
    EchelonSpan,
    ExactMatrix,
    eigenprojectors,
    field_embed,
    kernel_basis,
    root_exponent,
    span_intersection,
    sqrt_in_field,
    unit_vector,
)


class TestCycScalar:
    """Field arithmetic in Q(zeta_n)."""

    def test_root_of_unity_has_its_order(self):
        """zeta_5 to the fifth power is one."""
        z = CycScalar.zeta(5)
        assert z**5 == 1
        assert z**4 != 1

    def test_parse_matches_arithmetic(self):
        """Parsed literals agree with values built by arithmetic."""
        z = CycScalar.zeta(5)
        assert (z + z**4) ** 2 == CycScalar.parse("zeta5^2 + 2 + zeta5^3")
        assert CycScalar.parse("zeta4^2") == -1

    def test_text_form_is_canonical(self):
        """Terms print in power order with rational coefficients."""
        value = CycScalar.parse("3/2*zeta5^2 - zeta5 + 1")
        assert str(value) == "1 - zeta5 + 3/2*zeta5^2"
        assert str(CycScalar.zero()) == "0"

    def test_parse_rejects_unknown_symbols(self):
        """Only zetaN symbols are accepted."""
        with pytest.raises(ValueError):
            CycScalar.parse("x + 1")
        with pytest.raises(ValueError):
            CycScalar.parse("   ")

    def test_inverse(self):
        """Every nonzero element is invertible."""
        x = CycScalar.parse("2 + zeta7 - 3*zeta7^3")
        assert x * x.inverse() == 1
        assert Fraction(1, 3) * 3 * x / x == 1
        with pytest.raises(ZeroDivisionError):
            CycScalar.zero(7).inverse()

    def test_mixed_fields_multiply_in_the_compositum(self):
        """zeta_3 * zeta_4 = zeta_12^7."""
        product = CycScalar.zeta(3) * CycScalar.zeta(4)
        assert product == CycScalar.zeta(12, 7)
        assert product.order == 12

    def test_reduced_finds_smallest_field(self):
        """A lifted element descends back to its own field."""
        lifted = CycScalar.zeta(3).lift(6)
        assert lifted.order == 6
        assert lifted.reduced().order == 3
        assert lifted.reduced() == CycScalar.zeta(3)

    def test_reduced_keeps_irrational_elements(self):
        """i*sqrt(2) = zeta_8 + zeta_8^3 lies in no proper subfield of Q(zeta_8)."""
        value = CycScalar.parse("zeta8 + zeta8^3")
        assert value.reduced().order == 8
        assert value.reduced() == value
        assert CycScalar.parse("zeta8^2").reduced().order == 4
        assert CycScalar.parse("zeta3 + zeta3^2").reduced() == -1
        assert CycScalar.parse("zeta3 + zeta3^2").reduced().order == 1

    def test_incompatible_embedding(self):
        """Q(zeta_3) does not embed into Q(zeta_4)."""
        with pytest.raises(IncompatibleFieldError):
            field_embed(CycScalar.zeta(3), 4)

    def test_galois_conjugate(self):
        """Complex conjugation inverts roots of unity."""
        z = CycScalar.zeta(8)
        assert z.conjugate() == z.inverse()

    def test_root_exponent(self):
        """Discrete logarithm with respect to a chosen root."""
        z = CycScalar.zeta(5)
        assert root_exponent(z**3, z, 5) == 3
        assert root_exponent(CycScalar.rational(2), z, 5) is None


class TestSquareRoots:
    """Square roots of rationals inside cyclotomic fields."""

    @pytest.mark.parametrize("value", [2, 3, 5, -1, -3, Fraction(1, 2), 12])
    def test_square_is_recovered(self, value):
        """sqrt(q)^2 == q."""
        root = sqrt_in_field(value)
        assert root * root == value

    def test_minus_one_is_i(self):
        """sqrt(-1) is zeta_4."""
        assert sqrt_in_field(-1) == CycScalar.zeta(4)


class TestExactMatrix:
    """Dense exact matrices."""

    def test_inverse_and_det(self):
        """A unimodular matrix has an integral inverse."""
        m = ExactMatrix([[2, 1], [1, 1]])
        assert m.det() == 1
        assert m @ m.inverse() == ExactMatrix.identity(2)

    def test_elimination_is_fraction_free(self):
        """Integer input keeps integer entries and ends on the determinant."""
        m = ExactMatrix([[3, 7, 2], [5, 1, 4], [2, 6, 9]])
        rows, pivots, _sign = m._bareiss()
        assert pivots == [0, 1, 2]
        for row in rows:
            for x in row:
                assert all(c.denominator == 1 for c in x.coeffs)
        assert m.det() == -248
        assert ExactMatrix([[0, 1], [1, 0]]).det() == -1

    def test_lowest_height_pivot_is_used(self):
        """The small entry of the first column becomes the first pivot row."""
        rows, _pivots, sign = ExactMatrix([[1000, 3], [1, 2]])._bareiss()
        assert rows[0][0] == 1
        assert sign == -1

    def test_singular_inverse(self):
        """Singular matrices cannot be inverted."""
        with pytest.raises(ZeroDivisionError):
            ExactMatrix([[1, 2], [2, 4]]).inverse()

    def test_shape_mismatch(self):
        """Products check their shapes."""
        with pytest.raises(DimensionMismatchError):
            ExactMatrix([[1, 2]]) @ ExactMatrix([[1, 2]])
        with pytest.raises(DimensionMismatchError):
            ExactMatrix([[1, 2], [3]])

    def test_kernel_basis(self):
        """The kernel of a rank one 2x3 matrix is two-dimensional."""
        m = ExactMatrix([[1, 2, 3], [2, 4, 6]])
        kernel = kernel_basis(m)
        assert len(kernel) == 2
        assert m.rank() == 1
        for v in kernel:
            assert all(x == 0 for x in m.apply(v))

    def test_solve_many_keeps_consistent_columns(self):
        """An inconsistent right-hand side does not disturb the others."""
        m = ExactMatrix([[1, 0], [0, 0]])
        one, zero = CycScalar.one(), CycScalar.zero()
        bad, good = m.solve_many([(zero, one), (one + one, zero)])
        assert bad is None
        assert good == (2, 0)

    def test_multiplicative_order(self):
        """A rotation by a quarter turn has order four."""
        assert ExactMatrix([[0, -1], [1, 0]]).multiplicative_order(10) == 4
        with pytest.raises(NotFiniteOrderError):
            ExactMatrix([[1, 1], [0, 1]]).multiplicative_order(10)

    def test_eigenprojectors_sum_to_identity(self):
        """Projectors for an involution split the space."""
        a = ExactMatrix.diag([1, -1, -1])
        projectors = eigenprojectors(a, 2)
        assert projectors[0] + projectors[1] == ExactMatrix.identity(3)
        assert projectors[0].rank() == 1
        assert projectors[1].rank() == 2

    def test_eigenprojectors_need_finite_order(self):
        """The operator must satisfy A^nu = I."""
        with pytest.raises(NotFiniteOrderError):
            eigenprojectors(ExactMatrix.diag([1, 2]), 2)

    def test_text_round_trip(self):
        """Matrices print to and parse from exact strings."""
        m = ExactMatrix([[CycScalar.zeta(3), 1], [0, Fraction(-1, 2)]])
        assert ExactMatrix.from_text(m.to_text()) == m


class TestSubspaces:
    """Echelon spans and intersections."""

    def test_echelon_span_detects_dependence(self):
        """Adding a dependent vector does not grow the span."""
        span = EchelonSpan(3)
        assert span.add([1, 1, 0])
        assert span.add([0, 1, 1])
        assert not span.add([1, 2, 1])
        assert span.dim == 2
        assert span.contains([1, 0, -1])
        assert not span.contains([0, 0, 1])

    def test_span_intersection(self):
        """span(e1, e2) meets span(e2, e3) in span(e2)."""
        e = [unit_vector(3, i) for i in range(3)]
        assert span_intersection([e[0], e[1]], [e[1], e[2]]) == [e[1]]
        assert span_intersection([e[0]], [e[2]]) == []


def random_scalar(rng, order=5):
    return CycScalar([Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(order - 1)], order)


def random_matrix(rng, n, order=5):
    return ExactMatrix([[random_scalar(rng, order) for _ in range(n)] for _ in range(n)])


class TestFieldProperties:
    """Seeded checks of the field and matrix identities."""

    def test_field_axioms(self):
        """Distributivity and inverses over Q(zeta5)."""
        rng = random.Random(5)
        for _ in range(25):
            a, b, c = (random_scalar(rng) for _ in range(3))
            assert a * (b + c) == a * b + a * c
            assert (a - b) + b == a
            if a:
                assert a * a.inverse() == 1

    def test_determinant_is_multiplicative(self):
        """det(AB) = det(A) det(B) for random 3x3 matrices."""
        rng = random.Random(11)
        for _ in range(5):
            a, b = random_matrix(rng, 3), random_matrix(rng, 3)
            assert (a @ b).det() == a.det() * b.det()

    def test_inverse_of_random_matrices(self):
        """Invertible random matrices have exact inverses."""
        rng = random.Random(23)
        for _ in range(5):
            m = random_matrix(rng, 3)
            if m.det():
                assert m @ m.inverse() == ExactMatrix.identity(3)
                assert m.rank() == 3

    def test_kernel_vectors_are_annihilated(self):
        """Kernel bases of random 2x4 matrices complement the rank."""
        rng = random.Random(42)
        for _ in range(5):
            m = ExactMatrix([[random_scalar(rng) for _ in range(4)] for _ in range(2)])
            basis = kernel_basis(m)
            assert len(basis) == 4 - m.rank()
            for v in basis:
                assert not any(m.apply(v))
