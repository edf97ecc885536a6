"""Tests for tame-shape classification, solvable growth and bricks."""

import json

import pytest

from alia.equivariant import stabilized_quotient
from alia.errors import PreconditionError
from alia.exactmath import ExactMatrix
from alia.funring import SpherePoint
from alia.liealg import StructLieAlgebra, sl2
from alia.presets import load_preset
from alia.wildness import (
    ONE_DIMENSIONAL,
    SEMISIMPLE,
    SS_PLUS_LINE,
    WILD,
    adjoint_representation,
    brick_example,
    check_representation,
    endomorphism_algebra,
    is_brick,
    is_monotone,
    makedonskii_classify,
    truncate_quotient,
    wildness_report,
)

ZERO = SpherePoint.finite(0)


def gl2():
    return StructLieAlgebra(
        ["h", "e", "f", "c"],
        {(0, 1): {1: 2}, (0, 2): {2: -2}, (1, 2): {0: 1}},
    )


@pytest.fixture(scope="module")
def z5():
    return load_preset("sl2-z5")


@pytest.fixture(scope="module")
def report(z5):
    return wildness_report(z5, ZERO, nmax=4)


class TestClassification:
    """The three tame shapes and the wild remainder."""

    def test_line(self):
        """A one-dimensional algebra is tame."""
        assert makedonskii_classify(StructLieAlgebra(["x"], {})).verdict == ONE_DIMENSIONAL

    def test_semisimple(self):
        """sl2 has zero radical."""
        result = makedonskii_classify(sl2())
        assert result.verdict == SEMISIMPLE
        assert result.radical.dim == 0
        assert not result.wild

    def test_semisimple_plus_line(self):
        """gl2 splits as sl2 plus its center."""
        result = makedonskii_classify(gl2())
        assert result.verdict == SS_PLUS_LINE
        assert result.center.dim == 1
        assert result.derived.dim == 3

    def test_heisenberg_is_wild(self):
        """The radical of a nilpotent algebra is everything."""
        heisenberg = StructLieAlgebra(["x", "y", "z"], {(0, 1): {2: 1}})
        result = makedonskii_classify(heisenberg)
        assert result.verdict == WILD
        assert result.reason == "radical has dimension 3"

    def test_abelian_plane_is_wild(self):
        """Two commuting generators already give a wild algebra."""
        assert makedonskii_classify(StructLieAlgebra(["x", "y"], {})).wild

    def test_json(self):
        """Classifications serialize their witness dimensions."""
        doc = makedonskii_classify(gl2()).to_json()
        assert doc["radical_dim"] == 1
        assert doc["center_dim"] == 1
        assert doc["derived_dim"] == 3


class TestSolvableGrowth:
    """Growth of the vanishing ideal through A / I_{0,n} for sl2-z5."""

    def test_verdicts(self, report):
        """Quotients of dimension one stay tame, the rest are wild."""
        assert [row.verdict for row in report.rows] == [
            ONE_DIMENSIONAL, ONE_DIMENSIONAL, WILD, WILD,
        ]
        assert report.first_wild == 3

    def test_dimensions(self, report):
        """The vanishing image grows by one in each strict step."""
        assert [row.quotient_dim for row in report.rows] == [1, 1, 2, 3]
        assert [row.solvable_dim for row in report.rows] == [0, 0, 1, 2]
        assert all(row.solvable for row in report.rows)
        assert report.monotone
        assert is_monotone(report.rows)

    def test_derived_dims(self, report):
        """The image in A / I_{0,3} is a line, hence abelian."""
        assert report.rows[2].derived_dims == [1, 0]
        assert report.rows[0].derived_dims == [0]

    def test_json_and_table(self, report):
        """Reports serialize and render as a table."""
        doc = json.loads(json.dumps(report.to_json()))
        assert doc["config"] == "sl2-z5"
        assert doc["point"] == "0"
        assert doc["first_wild"] == 3
        assert len(doc["rows"]) == 4
        text = report.table()
        assert text.startswith("solvable ideals at 0 (sl2-z5)")
        assert "wild" in text

    def test_nmax_must_be_positive(self, z5):
        """Empty tables are refused."""
        with pytest.raises(PreconditionError):
            wildness_report(z5, ZERO, nmax=0, degree=3)

    def test_truncation_needs_a_grading(self):
        """Ungraded algebras cannot be truncated."""
        with pytest.raises(PreconditionError):
            truncate_quotient(sl2(), 1)


class TestBricks:
    """Commutants of representations."""

    def test_adjoint_sl2_is_an_irreducible_brick(self):
        """Scalars are the only endomorphisms of the adjoint module."""
        g = sl2()
        result = endomorphism_algebra(adjoint_representation(g), g)
        assert result.dim == 1
        assert result.irreducible is True
        assert result.invariant_subspace is None

    def test_direct_sum_is_not_a_brick(self):
        """Two distinct characters of a line give a two-dimensional commutant."""
        result = endomorphism_algebra([ExactMatrix.diag([1, 2])])
        assert result.dim == 2
        assert not result.is_brick
        assert result.irreducible is False
        assert len(result.invariant_subspace) == 1

    def test_jet_quotient_brick(self, z5):
        """A / I_{0,3} acts on itself as a reducible brick."""
        q = stabilized_quotient(z5.action, ZERO, 3)
        result = brick_example(q)
        assert result.is_brick
        assert result.rep_dim == 2
        assert result.irreducible is False
        assert len(result.invariant_subspace) == 1
        doc = result.to_json()
        assert doc["brick"] is True
        assert len(doc["invariant_subspace"]) == 1

    def test_explicit_brick(self):
        """ρ(h) = diag(0, -2) and a lower nilpotent ρ(f z^2) form a brick."""
        algebra = StructLieAlgebra(["h", "fz2"], {(0, 1): {1: -2}})
        rho_h = ExactMatrix.diag([0, -2])
        rho_f = ExactMatrix([[0, 0], [2, 0]])
        assert is_brick([rho_h, rho_f], algebra)

    def test_representation_check(self):
        """Matrices that break [h, e] = 2e are refused."""
        unit = ExactMatrix([[0, 1], [0, 0]])
        zero = ExactMatrix.zeros(2, 2)
        with pytest.raises(PreconditionError):
            check_representation(sl2(), [zero, unit, unit])
        with pytest.raises(PreconditionError):
            check_representation(sl2(), [zero, zero])

    def test_mixed_sizes(self):
        """All matrices of a representation share one size."""
        with pytest.raises(PreconditionError):
            endomorphism_algebra([ExactMatrix.identity(2), ExactMatrix.identity(3)])


class TestLongGrowthTable:
    """The sl2-z5 table up to n = 25."""

    @pytest.fixture(scope="class")
    def long_report(self, z5):
        return wildness_report(z5, ZERO, nmax=25)

    def test_growth(self, long_report):
        """dim K_n counts invariant degrees in [1, n - 1]."""
        degrees = [0, 2, 3, 5, 7, 8, 10, 12, 13, 15, 17, 18, 20, 22, 23]
        expected = [sum(1 for d in degrees if 1 <= d < n) for n in range(1, 26)]
        assert [row.solvable_dim for row in long_report.rows] == expected
        assert long_report.rows[-1].solvable_dim == 14
        assert long_report.monotone

    def test_every_kernel_is_solvable(self, long_report):
        """Positive-degree parts are solvable and the quotients wild from n = 3."""
        assert all(row.solvable for row in long_report.rows)
        assert all(row.classification.wild for row in long_report.rows[2:])
