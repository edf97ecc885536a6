"""Tests for Kac coordinates, the root groupoid and the exponent cochains.

The three sl3-d6 presets cover an inner torsion of order six twisted by the
outer diagram automorphism (A2^(2)), an inner involution (A2^(1)) and an
outer involution (A2^(2)).
"""

import json

import pytest

from alia.errors import InconsistencyError, PreconditionError
from alia.exactmath import CycScalar, ExactMatrix
from alia.kacroots import (
    affine_reflection,
    canonical_coordinates,
    diagram_symmetries,
    is_kac_normalized,
    kac_report,
    kac_report_for_config,
    local_structure_algebra,
    local_structure_certificate,
    local_structure_from_torsion,
    normalize_exponents,
    omega1,
    omega2,
    omega2_dot,
    omega2_edges,
    omega2_value,
    regular_fixed_element,
    replay_weyl_word,
    torsion_of_config,
    weyl_word_text,
)
from alia.liealg import StructLieAlgebra, sl2
from alia.presets import load_preset

A1_AFFINE = [[2, -2], [-2, 2]]
A2_AFFINE = [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]]
A2_TWISTED = [[2, -4], [-1, 2]]


@pytest.fixture(scope="module")
def report_a():
    return kac_report_for_config(load_preset("sl3-d6-a"))


@pytest.fixture(scope="module")
def report_b():
    return kac_report_for_config(load_preset("sl3-d6-b"))


@pytest.fixture(scope="module")
def report_c():
    return kac_report_for_config(load_preset("sl3-d6-c"))


@pytest.fixture(scope="module")
def report_torus():
    return kac_report(sl2(), ExactMatrix.diag([1, -1, -1]), m=3)


class TestAffineWeylNormalization:
    """Affine reflections and the search for Kac coordinates."""

    def test_reflections(self):
        """(4, 1) -> (2, 5) -> (1, 1) in A2^(2) with ν0 = 6."""
        assert affine_reflection((4, 1), 0, A2_TWISTED, 6) == (2, 5)
        assert affine_reflection((2, 5), 1, A2_TWISTED, 6) == (1, 1)
        assert replay_weyl_word((4, 1), (0, 1), A2_TWISTED, 6) == (1, 1)

    def test_normalize(self):
        """The shortest normalizing word for (4, 1) is σ1σ0."""
        coords = normalize_exponents((4, 1), A2_TWISTED, (2, 1), 2, 6, special=1)
        assert coords.s == (1, 1)
        assert coords.word == (0, 1)
        assert coords.word_text == "σ1σ0"
        assert coords.raw == (4, 1)

    def test_already_normalized(self):
        """Normalized exponents need the empty word."""
        coords = normalize_exponents((1, 1), A1_AFFINE, (1, 1), 1, 2)
        assert coords.s == (1, 1)
        assert coords.word_text == "1"

    def test_trivial_torsion(self):
        """ν0 = 1 puts all weight on the special node."""
        coords = normalize_exponents((0, 0), A1_AFFINE, (1, 1), 1, 1)
        assert coords.s == (1, 0)

    def test_normalization_predicate(self):
        """Normalized exponents are nonnegative, sum to ν0 and are coprime."""
        assert is_kac_normalized((1, 1), (2, 1), 2, 6)
        assert not is_kac_normalized((0, 3), (2, 1), 2, 6)
        assert not is_kac_normalized((2, -1), (2, 1), 2, 6)

    def test_word_text(self):
        """The first reflection applied is written last."""
        assert weyl_word_text(()) == "1"
        assert weyl_word_text((2, 0, 1)) == "σ1σ0σ2"

    def test_diagram_symmetries(self):
        """A2^(1) has the full symmetric group, A2^(2) none."""
        assert len(diagram_symmetries(A2_AFFINE)) == 6
        assert diagram_symmetries(A2_TWISTED) == [(0, 1)]

    def test_canonical_coordinates(self):
        """The lexicographic minimum of the symmetry orbit is chosen."""
        assert canonical_coordinates((1, 0, 1), A2_AFFINE) == ((0, 1, 1), True)
        assert canonical_coordinates((0, 1, 1), A2_AFFINE) == ((0, 1, 1), False)


class TestInnerInvolutionOfSl2:
    """diag(1, -1, -1) on sl2: type A1^(1) with both exponents one."""

    def test_coordinates(self, report_torus):
        """Raw exponents are already normalized."""
        assert report_torus.factorization.affine_type == "A1^(1)"
        assert report_torus.raw == (1, 1)
        assert report_torus.s == (1, 1)
        assert report_torus.weyl_word_text == "1"

    def test_groupoid(self, report_torus):
        """Zero and the two real classes."""
        names = [e.name for e in report_torus.groupoid.elements]
        assert names == ["0", "α0", "α1"]
        assert report_torus.omega1_table() == (0, 1, 1)

    def test_carries(self, report_torus):
        """Only α0 + α1 = δ carries."""
        assert omega2_edges(report_torus.groupoid, report_torus.omega2) == [("α0", "α1")]
        assert report_torus.cocycle

    def test_cochains_from_coordinates(self, report_torus):
        """ω1 and ω2 recomputed from the Kac coordinates match the report."""
        groupoid = report_torus.groupoid
        nu0 = report_torus.factorization.nu0
        w1 = omega1(groupoid, report_torus.s, nu0)
        assert w1 == report_torus.omega1_normalized
        assert omega2(groupoid, w1, nu0) == report_torus.omega2

    def test_local_structure(self, report_torus):
        """The rebuilt algebra matches the twisted model at m = 3."""
        assert report_torus.local_structure is True
        algebra = local_structure_from_torsion(sl2(), ExactMatrix.diag([1, -1, -1]), 3)
        assert algebra.dim == 4
        assert algebra.grading == (0, 1, 1, 2)

    def test_brackets_follow_the_carries(self, report_torus):
        """[α0 z, α1 z] lands on the Cartan part at z^2 because ω2(α0, α1) = 1."""
        groupoid = report_torus.groupoid
        w1 = report_torus.omega1_raw
        algebra, _ = local_structure_algebra(sl2(), groupoid, w1, 2, 3)
        a, b = algebra.index("α0@z^1"), algebra.index("α1@z^1")
        assert set(algebra.bracket_basis(a, b)) == {algebra.index("0@z^2")}
        without_carries = {pair: 0 for pair in omega2(groupoid, w1, 2)}
        with pytest.raises(InconsistencyError):
            local_structure_algebra(sl2(), groupoid, w1, 2, 3, without_carries)


class TestTwistedTorsionOfOrderSix:
    """The sl3-d6-a torsion: A2^(2) with raw exponents (4, 1)."""

    def test_kac_coordinates(self, report_a):
        """(4, 1) normalizes to (1, 1) through σ1σ0."""
        assert report_a.factorization.affine_type == "A2^(2)"
        assert report_a.factorization.nu0 == 6
        assert report_a.factorization.marks == (2, 1)
        assert report_a.raw == (4, 1)
        assert report_a.weyl_word_text == "σ1σ0"
        assert report_a.s == (1, 1)
        assert not report_a.canonicalized

    def test_rotation_root(self):
        """The torsion turns the chart at 0 by the primitive sixth root ζ6."""
        gamma0, nu0, zeta = torsion_of_config(load_preset("sl3-d6-a"))
        assert nu0 == 6
        assert zeta == CycScalar.zeta(6)

    def test_replay(self, report_a):
        """Replaying the word on the raw exponents gives the coordinates."""
        fact = report_a.factorization
        word = report_a.coordinates.word
        assert replay_weyl_word(report_a.raw, word, fact.cartan, fact.nu0) == report_a.normalized

    def test_groupoid_names(self, report_a):
        """Eight classes, listed by level and weight."""
        names = [e.name for e in report_a.groupoid.elements]
        assert names == ["0", "3α0+2α1", "α0", "α1", "α0+α1", "δ", "3α0+α1", "4α0+α1"]
        assert report_a.groupoid.element(report_a.groupoid.key_of("δ")).kind == "imaginary"

    def test_omega1_tables(self, report_a):
        """Raw and normalized exponents of every class."""
        assert report_a.omega1_table(normalized=False) == (0, 2, 4, 1, 5, 3, 1, 5)
        assert report_a.omega1_table() == (0, 5, 1, 1, 2, 3, 4, 5)

    def test_carries_are_a_cocycle(self, report_a):
        """ω2 takes values in {0, 1} and satisfies the cocycle identity."""
        assert set(report_a.omega2.values()) <= {0, 1}
        assert report_a.cocycle

    def test_omega2_value_needs_composable_pair(self, report_a):
        """Non-composable pairs have no carry."""
        groupoid = report_a.groupoid
        delta = groupoid.key_of("δ")
        with pytest.raises(PreconditionError):
            omega2_value(groupoid, report_a.omega2, groupoid.key_of("α0"), groupoid.key_of("α0"))
        zero = groupoid.zero
        assert omega2_value(groupoid, report_a.omega2, delta, zero) == 0

    def test_json_and_dot(self, report_a):
        """The report serializes to JSON and Graphviz."""
        doc = json.loads(json.dumps(report_a.to_json()))
        assert doc["raw"] == [4, 1]
        assert doc["weyl_word_text"] == "σ1σ0"
        assert doc["special_node"] == 1
        assert len(doc["omega1_table"]) == 8
        assert "local_structure" not in doc
        dot = report_a.dot()
        assert dot.startswith('graph "A2^(2)" {')
        assert '"δ";' in dot

    def test_table(self, report_a):
        """The text table summarizes the normalization."""
        text = report_a.table()
        assert "raw exponents (4, 1) -> (1, 1) via σ1σ0" in text
        assert "omega2 = 1 on:" in text


class TestInvolutions:
    """The sl3-d6-b inner and sl3-d6-c outer involutions."""

    def test_inner_involution(self, report_b):
        """Kac coordinates (0, 1, 1) with four carrying pairs."""
        assert report_b.factorization.affine_type == "A2^(1)"
        assert report_b.s == (0, 1, 1)
        assert report_b.groupoid.order == 7
        edges = omega2_edges(report_b.groupoid, report_b.omega2)
        assert len(edges) == 4
        zero_node = report_b.normalized.index(0)
        p, q = (f"α{i}" for i in range(3) if i != zero_node)
        hexagon = {
            frozenset((p, f"-{p}")),
            frozenset((q, f"-{q}")),
            frozenset((p, q)),
            frozenset((f"-{p}", f"-{q}")),
        }
        assert {frozenset(edge) for edge in edges} == hexagon
        w1 = report_b.omega1_normalized
        for a, b in edges:
            groupoid = report_b.groupoid
            assert w1[groupoid.key_of(a)] == w1[groupoid.key_of(b)] == 1
        assert report_b.cocycle

    def test_outer_involution(self, report_c):
        """Kac coordinates (0, 1); ω1 is the level and δ carries with itself."""
        assert report_c.factorization.affine_type == "A2^(2)"
        assert report_c.s == (0, 1)
        for e in report_c.groupoid.elements:
            assert report_c.omega1_normalized[e.key] == e.level
        assert ("δ", "δ") in omega2_edges(report_c.groupoid, report_c.omega2)
        assert report_c.cocycle

    def test_dot_lists_edges(self, report_c):
        """Carrying pairs become undirected edges."""
        dot = omega2_dot(report_c.groupoid, report_c.omega2, title="c")
        assert '"δ" -- "δ";' in dot
        assert dot.rstrip().endswith("}")


class TestPreconditions:
    """Inputs the pipeline refuses."""

    def test_unknown_type(self):
        """Algebras without a Cartan type label are not supported."""
        heisenberg = StructLieAlgebra(["x", "y", "z"], {(0, 1): {2: 1}})
        with pytest.raises(PreconditionError):
            regular_fixed_element(heisenberg, ExactMatrix.identity(3))


class TestLocalStructureOnDihedralPoints:
    """The algebra rebuilt from ω1 and ω2 matches the twisted models for m ≤ 6."""

    @pytest.mark.parametrize("m", [1, 2, 3, 4, 5, 6])
    @pytest.mark.parametrize("name", ["report_a", "report_b", "report_c"])
    def test_raw_and_normalized_cochains(self, request, name, m):
        """Both the γ0 cochain and the Kac-normalized one with its ω2 certify."""
        report = request.getfixturevalue(name)
        lie = load_preset("sl3-d6-a").lie
        fact, groupoid = report.factorization, report.groupoid
        assert local_structure_certificate(lie, fact, groupoid, m)
        assert local_structure_certificate(
            lie, fact, groupoid, m, report.omega1_normalized, report.omega2
        )

    def test_report_runs_the_certificate(self):
        """kac_report_for_config with m records the verified local structure."""
        report = kac_report_for_config(load_preset("sl3-d6-b"), m=3)
        assert report.local_structure is True
        assert report.to_json()["local_structure"] == {"m": 3, "verified": True}
