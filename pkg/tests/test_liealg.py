"""Tests for structure-constant Lie algebras."""

import pytest

from alia.errors import DimensionMismatchError, InconsistencyError, PreconditionError
from alia.exactmath import ExactMatrix
from alia.liealg import (
    StructLieAlgebra,
    Subspace,
    automorphism_from_generators,
    center,
    derived_series,
    ideal_closure,
    is_solvable,
    killing_form,
    quotient,
    radical,
    rank_of_type,
    sl2,
    sl3,
    special_linear,
    verify_isomorphism,
)


def heisenberg() -> StructLieAlgebra:
    return StructLieAlgebra(["x", "y", "z"], {(0, 1): {2: 1}})


class TestStructLieAlgebra:
    """Construction, validation and serialization."""

    def test_sl2_brackets(self):
        """[h, e] = 2e, [h, f] = -2f, [e, f] = h."""
        g = sl2()
        assert g.bracket_basis(0, 1) == {1: 2}
        assert g.bracket_basis(0, 2) == {2: -2}
        assert g.bracket_basis(1, 2) == {0: 1}
        assert g.bracket_basis(2, 1) == {0: -1}

    def test_bracket_table(self):
        """The bracket table lists nonzero brackets of basis vectors."""
        table = sl2().bracket_table().splitlines()
        assert "[h, e] = 2*e" in table
        assert "[h, f] = -2*f" in table
        assert "[e, f] = h" in table

    def test_jacobi_violation(self):
        """Structure constants breaking Jacobi are rejected."""
        with pytest.raises(InconsistencyError):
            StructLieAlgebra(["a", "b", "c"], {(0, 1): {0: 1}, (0, 2): {1: 1}})

    def test_self_bracket_must_vanish(self):
        """[b_i, b_i] = 0."""
        with pytest.raises(PreconditionError):
            StructLieAlgebra(["a"], {(0, 0): {0: 1}})

    def test_grading_is_checked(self):
        """Brackets must add degrees."""
        with pytest.raises(InconsistencyError):
            StructLieAlgebra(["x", "y", "z"], {(0, 1): {2: 1}}, grading=[1, 1, 1])
        graded = StructLieAlgebra(["x", "y", "z"], {(0, 1): {2: 1}}, grading=[1, 1, 2])
        assert graded.check_grading()

    def test_json_round_trip_is_isomorphic(self):
        """An algebra read back from JSON has the same brackets."""
        g = sl3()
        h = StructLieAlgebra.from_json(g.to_json())
        assert h.labels == g.labels
        assert verify_isomorphism(ExactMatrix.identity(8), g, h)

    def test_dim_mismatch_in_json(self):
        """dim must agree with the label count."""
        with pytest.raises(DimensionMismatchError):
            StructLieAlgebra.from_json({"dim": 2, "labels": ["a"], "entries": []})

    def test_matrix_realization(self):
        """Matrices are converted to and from basis coordinates."""
        g = sl2()
        coords = g.matrix_coordinates(ExactMatrix([[3, 1], [0, -3]]))
        assert coords == (3, 1, 0)
        assert g.matrix_of(coords) == ExactMatrix([[3, 1], [0, -3]])
        with pytest.raises(PreconditionError):
            g.matrix_coordinates(ExactMatrix.identity(2))


class TestStructureTheory:
    """Killing form, radical, center and derived series."""

    def test_sl2_killing_form(self):
        """kappa(h, h) = 8 and kappa(e, f) = 4."""
        kappa = killing_form(sl2())
        assert kappa.rows[0][0] == 8
        assert kappa.rows[1][2] == 4
        assert kappa.rows[1][1] == 0

    def test_semisimple_has_trivial_radical(self):
        """sl2 and sl3 are semisimple and centerless."""
        for g in (sl2(), sl3()):
            assert radical(g).dim == 0
            assert center(g).dim == 0
            assert not is_solvable(g)

    def test_heisenberg(self):
        """The Heisenberg algebra is solvable with a one-dimensional center."""
        g = heisenberg()
        assert [s.dim for s in derived_series(g)] == [3, 1, 0]
        assert is_solvable(g)
        assert center(g).dim == 1
        assert radical(g).dim == 3

    def test_ideal_closure(self):
        """The ideal generated by e in sl2 is everything."""
        g = sl2()
        assert ideal_closure(Subspace.of(g, [g.basis_vector(1)])).dim == 3

    def test_quotient_by_center(self):
        """Heisenberg modulo its center is abelian of dimension two."""
        g = heisenberg()
        q, complement = quotient(g, center(g))
        assert q.dim == 2
        assert q.is_abelian()
        assert complement == [0, 1]

    def test_quotient_needs_an_ideal(self):
        """Quotients by non-ideals are refused."""
        g = sl2()
        with pytest.raises(PreconditionError):
            quotient(g, Subspace.of(g, [g.basis_vector(1)]))

    def test_derived_series_of_non_ideal(self):
        """The derived series of a subspace needs an ideal."""
        g = sl2()
        with pytest.raises(PreconditionError):
            derived_series(Subspace.of(g, [g.basis_vector(0)]))


class TestAutomorphisms:
    """Extending generator assignments to automorphisms."""

    def test_swap_e_and_f(self):
        """e <-> f extends to an automorphism sending h to -h."""
        g = sl2()
        e, f = g.basis_vector(1), g.basis_vector(2)
        phi = automorphism_from_generators(g, [e, f], [f, e])
        assert phi.apply(g.basis_vector(0)) == (-1, 0, 0)

    def test_non_automorphism_is_refused(self):
        """Scaling f alone breaks [h, e] = 2e."""
        g = sl2()
        e, f = g.basis_vector(1), g.basis_vector(2)
        with pytest.raises(PreconditionError):
            automorphism_from_generators(g, [e, f], [e, tuple(2 * x for x in f)])

    def test_generators_must_generate(self):
        """A single vector does not generate sl2."""
        g = sl2()
        with pytest.raises(PreconditionError):
            automorphism_from_generators(g, [g.basis_vector(0)], [g.basis_vector(0)])


class TestPresets:
    """Named algebras."""

    def test_special_linear_dimensions(self):
        """sl(n) has dimension n^2 - 1."""
        assert sl3().dim == 8
        g = special_linear(4)
        assert g.dim == 15
        assert g.type_label == "A3"

    def test_rank_of_type(self):
        """Type labels carry the rank."""
        assert rank_of_type("A3") == 3
        assert rank_of_type("X") is None
        assert rank_of_type(None) is None
