"""Tests for group actions, invariant bases and jet ideals.

The sl2-z5 action rotates z -> zeta5^4 z and scales e, f by zeta5^2,
zeta5^3, so the invariants are h z^(5j), f z^(5j+2) and e z^(5j+3).
"""

import random

import pytest

from alia.errors import NotFiniteOrderError, PoleError, PreconditionError, StabilizationError
from alia.equivariant import (
    EquivariantElement,
    Generator,
    GroupAction,
    JetRep,
    conjugation_automorphism,
    directsum_ideal_intersection_check,
    fixed_subalgebra,
    ideal_chain,
    ideal_of_jet_reps,
    invariant_basis,
    jet_ideal,
    jet_ideal_is_closed,
    outer_automorphism,
    point_evaluation,
    quotient_by_jet_ideal,
    reynolds,
    stabilized_quotient,
    stabilizer,
)
from alia.exactmath import ExactMatrix
from alia.funring import PoleRationalFunction, SpherePoint, mobius_apply
from alia.liealg import StructLieAlgebra, sl2
from alia.presets import load_preset

ZERO = SpherePoint.finite(0)
ONE = SpherePoint.finite(1)


@pytest.fixture(scope="module")
def z5():
    return load_preset("sl2-z5")


@pytest.fixture(scope="module")
def algebra(z5):
    return invariant_basis(z5.action, z5.lie, 13)


class TestGroupAction:
    """Closure, stabilizers and orbits."""

    def test_orbit_and_stabilizers(self, z5):
        """0 is fixed by the whole group, 1 has a free orbit."""
        action = z5.action
        assert stabilizer(action, ZERO).order == 5
        assert stabilizer(action, ONE).order == 1
        assert len(action.orbit(ONE)) == 5
        assert action.orbit(ZERO) == [ZERO]

    def test_stabilizer_of_a_pole(self, z5):
        """Points of the pole set have no stabilizer here."""
        with pytest.raises(PoleError):
            stabilizer(z5.action, SpherePoint.INFINITY)

    def test_fixed_subalgebra(self, z5):
        """The Cartan line is fixed at 0, everything at a free point."""
        assert fixed_subalgebra(z5.action, ZERO).dim == 1
        assert fixed_subalgebra(z5.action, ONE).dim == 3

    def test_infinite_group_is_detected(self):
        """A translation generates no finite group."""
        g = sl2()
        shift = Generator("t", ExactMatrix.identity(3), ExactMatrix([[1, 1], [0, 1]]))
        with pytest.raises(NotFiniteOrderError):
            GroupAction(g, [shift], [SpherePoint.INFINITY], max_elements=20)

    def test_unfaithful_action_is_refused(self):
        """A generator acting trivially on g but not on the sphere is refused."""
        g = sl2()
        flip = Generator("s", ExactMatrix.identity(3), ExactMatrix([[1, 0], [0, -1]]))
        with pytest.raises(PreconditionError):
            GroupAction(g, [flip], [SpherePoint.INFINITY])

    def test_describe(self, z5):
        """Summaries name the generators and pole set."""
        info = z5.action.describe()
        assert info["order"] == 5
        assert info["generators"] == ["r"]
        assert info["poles"] == ["inf"]

    def test_matrix_automorphisms_need_a_matrix_basis(self):
        """Abstract structure-constant algebras have no matrices to conjugate."""
        heisenberg = StructLieAlgebra(["x", "y", "z"], {(0, 1): {2: 1}})
        with pytest.raises(PreconditionError):
            conjugation_automorphism(heisenberg, ExactMatrix.identity(2))
        with pytest.raises(PreconditionError):
            outer_automorphism(heisenberg, ExactMatrix.identity(2))


class TestInvariantBasis:
    """Invariants of g tensor the pole-order filtration."""

    def test_dimension_and_degrees(self, algebra):
        """Three invariants per Lie basis vector up to degree 13."""
        assert algebra.dim == 9
        assert sorted(algebra.degrees) == [0, 2, 3, 5, 7, 8, 10, 12, 13]

    def test_basis_elements_are_invariant(self, z5, algebra):
        """Every basis element is fixed by the generators."""
        for r in range(algebra.dim):
            assert algebra.element(r).is_invariant(z5.action)

    def test_reynolds_projects_onto_invariants(self, z5):
        """Averaging e z^3 keeps it, averaging e z kills it."""
        lie = z5.lie
        e = lie.basis_vector(lie.index("e"))
        kept = EquivariantElement(((e, PoleRationalFunction.parse("z^3")),), lie)
        killed = EquivariantElement(((e, PoleRationalFunction.parse("z")),), lie)
        assert reynolds(z5.action, kept).collected() == kept.collected()
        assert reynolds(z5.action, killed).collected() == {}

    def test_point_evaluation_lands_in_fixed_subalgebra(self, z5, algebra):
        """Values at 0 lie in the Cartan line."""
        for r in range(algebra.dim):
            (value,) = point_evaluation(algebra.element(r), [ZERO], z5.action)
            assert value[1] == 0 and value[2] == 0

    def test_json_round_trip(self, z5, algebra):
        """The cached basis survives serialization."""
        again = type(algebra).from_json(z5.action, algebra.to_json())
        assert again.vectors == algebra.vectors
        assert again.degrees == algebra.degrees


class TestJetIdeals:
    """Jet ideals at the fixed point 0."""

    def test_ideal_chain(self, algebra):
        """I_{0,1} = I_{0,2} and the chain is strict from then on."""
        chain = ideal_chain(algebra, ZERO, 4)
        assert [s.codim for s in chain] == [1, 1, 2, 3]
        assert [s.strict for s in chain] == [True, False, True, True]
        assert all(s.dim + s.codim == algebra.dim for s in chain)

    def test_jet_ideal_matches_chain(self, algebra):
        """The jet ideal of order three has codimension two."""
        assert jet_ideal(algebra, ZERO, 3).dim == algebra.dim - 2

    def test_jet_ideal_is_an_ideal(self, algebra):
        """Brackets with the ideal keep vanishing jets."""
        ideal = jet_ideal(algebra, ZERO, 3)
        assert jet_ideal_is_closed(algebra, ideal, ZERO, 3)

    def test_direct_sum_is_intersection(self, algebra):
        """The ideal of a direct sum of jets is the intersection."""
        phi = [JetRep(ZERO, 2)]
        psi = [JetRep(ONE, 1)]
        assert directsum_ideal_intersection_check(algebra, phi, psi)
        combined = ideal_of_jet_reps(algebra, phi + psi)
        assert combined.dim == algebra.dim - 1 - 3

    def test_jet_order_must_be_positive(self, algebra):
        """Order zero jets are refused."""
        with pytest.raises(PreconditionError):
            ideal_of_jet_reps(algebra, [JetRep(ZERO, 0)])


class TestQuotients:
    """Graded quotients by jet ideals."""

    def test_order_three_quotient(self, z5):
        """A / I_{0,3} is spanned by h and f z^2 with [h, f z^2] = -2 f z^2."""
        q = stabilized_quotient(z5.action, ZERO, 3)
        assert q.dim == 2
        assert q.homogeneous
        assert list(q.algebra.labels) == ["h@z^0", "f@z^2"]
        assert q.algebra.bracket_basis(0, 1) == {1: -2}
        assert q.nu0 == 5
        assert q.dimensions[-1] == q.dimensions[-2] == 2

    def test_unstabilized_quotient(self, algebra):
        """A large enough truncation already gives the graded quotient."""
        q = quotient_by_jet_ideal(algebra, ZERO, 4, stabilize=False)
        assert q.dim == 3
        assert q.dimensions == [3]

    def test_stabilization_budget(self, z5):
        """A tiny degree budget cannot confirm stability."""
        with pytest.raises(StabilizationError) as info:
            stabilized_quotient(z5.action, ZERO, 4, start_degree=1, step=1, max_degree=2)
        assert info.value.dimensions == [1, 2]

    @pytest.mark.parametrize("preset,m,dim", [("sl3-d6-b", 1, 4), ("sl3-d6-c", 2, 8)])
    def test_unclosed_images_are_grown(self, preset, m, dim):
        """Truncations whose jet image misses brackets count as not yet stable."""
        cfg = load_preset(preset)
        q = stabilized_quotient(cfg.action, cfg.base_point, m)
        assert q.ready
        assert q.closed
        assert q.dim == dim
        assert q.dimensions[-1] == q.dimensions[-2] == dim

    def test_free_point_quotient_is_g(self, z5):
        """At a point with trivial stabilizer the first quotient is sl2."""
        q = stabilized_quotient(z5.action, ONE, 1, start_degree=3)
        assert q.dim == 3
        assert q.nu0 == 1
        assert not q.algebra.is_abelian()

    def test_zeta_generator_field(self, z5):
        """The action lives over Q(zeta5)."""
        assert z5.action.field_order == 5


class TestIdealProperties:
    """Orbit invariance and direct sums of jet ideals."""

    def test_ideal_is_constant_on_orbits(self, z5, algebra):
        """Points of one orbit define the same jet ideal."""
        rotation = z5.action.generators[0].mobius
        image = mobius_apply(rotation, ONE)
        assert image != ONE
        for m in (1, 2):
            here, there = jet_ideal(algebra, ONE, m), jet_ideal(algebra, image, m)
            assert here <= there and there <= here

    def test_direct_sums_of_random_jets(self, algebra):
        """I of a direct sum is the intersection, on seeded random pairs."""
        rng = random.Random(3)
        points = [ZERO, ONE, SpherePoint.finite(-1), SpherePoint.finite(2)]
        for _ in range(6):
            phi = [JetRep(rng.choice(points), rng.randint(1, 2))]
            psi = [JetRep(rng.choice(points), rng.randint(1, 2))]
            assert directsum_ideal_intersection_check(algebra, phi, psi)
