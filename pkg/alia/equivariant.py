"""Finite group actions, automorphic Lie algebras and jet ideals.

A :class:`GroupAction` realizes a finite group simultaneously by Lie algebra
automorphisms and Möbius maps. :func:`invariant_basis` computes the invariant
elements of ``g ⊗ F_D`` for the pole-order filtration ``F_D`` of the function
ring, which gives a :class:`FilteredALiA`. Jet ideals, their chains and the
graded quotients are computed inside this finite truncation.

Example usage:
    >>> from alia.presets import load_preset
    >>> from alia.equivariant import invariant_basis, ideal_chain
    >>> action = load_preset("sl2-z5").action
    >>> algebra = invariant_basis(action, action.lie, 13)
    >>> [step.codim for step in ideal_chain(algebra, action.base_point, 4)]
    [1, 1, 2, 3]
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from alia.errors import (
    InconsistencyError,
    NotFiniteOrderError,
    PoleError,
    PreconditionError,
    StabilizationError,
)
from alia.exactmath import (
    CycScalar,
    EchelonSpan,
    ExactMatrix,
    Vector,
    kernel_basis,
    vec_is_zero,
)
from alia.funring import (
    FunctionFiltration,
    LinearizingChart,
    PoleRationalFunction,
    Polynomial,
    SpherePoint,
    chart_jet,
    linearizing_coordinate,
    mobius_apply,
    mobius_equal,
    mobius_normalize,
    mobius_pullback,
)
from alia.liealg import (
    StructLieAlgebra,
    Subspace,
    format_vector,
    is_automorphism,
)

logger = logging.getLogger(__name__)

SparseColumns = List[Dict[int, CycScalar]]


def _sparse_columns(m: ExactMatrix) -> SparseColumns:
    return [{i: m.rows[i][j] for i in range(m.nrows) if m.rows[i][j]} for j in range(m.ncols)]


def _sparse_product(a: SparseColumns, b: SparseColumns) -> SparseColumns:
    """Column-sparse product ``a @ b``."""
    out: SparseColumns = []
    for col in b:
        acc: Dict[int, CycScalar] = {}
        for k, c in col.items():
            for i, x in a[k].items():
                y = acc.get(i, CycScalar.zero()) + c * x
                if y:
                    acc[i] = y
                else:
                    acc.pop(i, None)
        out.append(acc)
    return out


def _sparse_identity(n: int) -> SparseColumns:
    return [{j: CycScalar.one()} for j in range(n)]


def _sparse_trace(a: SparseColumns) -> CycScalar:
    total = CycScalar.zero()
    for j, col in enumerate(a):
        c = col.get(j)
        if c:
            total = total + c
    return total


# ---------------------------------------------------------------------------
# Automorphisms from matrix data
# ---------------------------------------------------------------------------


def _require_matrix_basis(lie: StructLieAlgebra) -> None:
    if lie.matrix_basis is None:
        raise PreconditionError("matrix automorphisms need a Lie algebra with a matrix basis")


def conjugation_automorphism(lie: StructLieAlgebra, t: ExactMatrix) -> ExactMatrix:
    """Matrix of ``X -> T X T^-1`` on a matrix Lie algebra."""
    _require_matrix_basis(lie)
    t_inv = t.inverse()
    columns = [lie.matrix_coordinates(t @ m @ t_inv) for m in lie.matrix_basis]
    return ExactMatrix.from_columns(columns, lie.dim)


def outer_automorphism(lie: StructLieAlgebra, j: ExactMatrix) -> ExactMatrix:
    """Matrix of ``X -> -J X^T J^-1`` on a matrix Lie algebra."""
    _require_matrix_basis(lie)
    j_inv = j.inverse()
    columns = [lie.matrix_coordinates(-(j @ m.transpose() @ j_inv)) for m in lie.matrix_basis]
    return ExactMatrix.from_columns(columns, lie.dim)


# ---------------------------------------------------------------------------
# Group actions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Generator:
    """One generator of the reduction group, acting on g and on the sphere."""

    name: str
    lie_matrix: ExactMatrix
    mobius: ExactMatrix


@dataclass(frozen=True)
class GroupElement:
    """Element of the closed group; ``word`` lists generator indices."""

    index: int
    word: Tuple[int, ...]
    lie_matrix: ExactMatrix
    mobius: ExactMatrix

    def apply(self, x: SpherePoint) -> SpherePoint:
        return mobius_apply(self.mobius, x)


class GroupAction:
    """Finite group acting on a Lie algebra and on the Riemann sphere.

    Parameters
    ----------
    lie : StructLieAlgebra
        The Lie algebra g.
    generators : sequence of Generator
        Generators of the group.
    pole_set : sequence of SpherePoint
        Non-empty Γ-invariant pole set S.
    base_point : SpherePoint, optional
        Default evaluation point used by presets and the CLI.
    max_elements : int
        Closure cap; exceeding it raises NotFiniteOrderError.
    """

    def __init__(
        self,
        lie: StructLieAlgebra,
        generators: Sequence[Generator],
        pole_set: Sequence[SpherePoint],
        base_point: Optional[SpherePoint] = None,
        max_elements: int = 200,
        name: str = "",
    ):
        if not pole_set:
            raise PreconditionError("pole set must be non-empty")
        self.lie = lie
        self.name = name
        self.pole_set: Tuple[SpherePoint, ...] = tuple(pole_set)
        self.base_point = base_point
        order = lie.field_order()
        for g in generators:
            order = math.lcm(order, g.lie_matrix.field_order(), g.mobius.field_order())
        for p in self.pole_set:
            if not p.is_infinite:
                order = math.lcm(order, p.value.order)
        self.field_order = order
        self.generators: Tuple[Generator, ...] = tuple(
            Generator(g.name, g.lie_matrix.lift(order), mobius_normalize(g.mobius).lift(order))
            for g in generators
        )
        for g in self.generators:
            if g.lie_matrix.shape != (lie.dim, lie.dim):
                raise PreconditionError(f"generator {g.name} has a Lie matrix of the wrong size")
            if not is_automorphism(g.lie_matrix, lie):
                raise PreconditionError(f"generator {g.name} is not a Lie algebra automorphism")
            if g.mobius.det().is_zero():
                raise PreconditionError(f"generator {g.name} has a singular Möbius matrix")
            for p in self.pole_set:
                if mobius_apply(g.mobius, p) not in self.pole_set:
                    raise PreconditionError(f"pole set is not invariant under {g.name}")
        self.elements: List[GroupElement] = self._close(max_elements)
        self._check_faithful()
        self.table = self._multiplication_table()
        self._function_cache: Dict[Tuple[int, int], SparseColumns] = {}
        self._basis_cache: Dict[int, "FilteredALiA"] = {}
        logger.info("group closure has %d elements (field order %d)", len(self.elements), order)

    def _close(self, cap: int) -> List[GroupElement]:
        n = self.lie.dim
        identity = GroupElement(0, (), ExactMatrix.identity(n), ExactMatrix.identity(2))
        elements = [identity]
        frontier = [identity]
        while frontier:
            new: List[GroupElement] = []
            for e in frontier:
                for gi, g in enumerate(self.generators):
                    lie_m = e.lie_matrix @ g.lie_matrix
                    mob = mobius_normalize(e.mobius @ g.mobius)
                    if any(
                        x.lie_matrix == lie_m and mobius_equal(x.mobius, mob) for x in elements
                    ):
                        continue
                    element = GroupElement(len(elements), e.word + (gi,), lie_m, mob)
                    elements.append(element)
                    new.append(element)
                    if len(elements) > cap:
                        raise NotFiniteOrderError(
                            f"group closure exceeds {cap} elements; the action is not finite"
                        )
            frontier = new
        return elements

    def _check_faithful(self) -> None:
        lie_distinct = []
        mob_distinct: List[ExactMatrix] = []
        for e in self.elements:
            if e.lie_matrix not in lie_distinct:
                lie_distinct.append(e.lie_matrix)
            if not any(mobius_equal(e.mobius, m) for m in mob_distinct):
                mob_distinct.append(e.mobius)
        if len(lie_distinct) != len(self.elements):
            raise PreconditionError("the action on the Lie algebra is not faithful")
        if len(mob_distinct) != len(self.elements):
            raise PreconditionError("the action on the sphere is not faithful")

    def _multiplication_table(self) -> List[List[int]]:
        table = []
        for a in self.elements:
            row = []
            for b in self.elements:
                prod = a.lie_matrix @ b.lie_matrix
                row.append(next(c.index for c in self.elements if c.lie_matrix == prod))
            table.append(row)
        return table

    @property
    def order(self) -> int:
        return len(self.elements)

    def element_order(self, index: int) -> int:
        k, current = 1, index
        while current != 0:
            current = self.table[current][index]
            k += 1
        return k

    def inverse(self, index: int) -> int:
        return next(j for j in range(self.order) if self.table[index][j] == 0)

    def orbit(self, x: SpherePoint) -> List[SpherePoint]:
        out: List[SpherePoint] = []
        for e in self.elements:
            y = e.apply(x)
            if y not in out:
                out.append(y)
        return out

    def function_matrix(self, index: int, filtration: FunctionFiltration) -> SparseColumns:
        """Sparse matrix of ``f -> f o gamma^-1`` on the filtration basis."""
        key = (index, filtration.degree)
        cached = self._function_cache.get(key)
        if cached is not None:
            return cached
        element = self.elements[index]
        if not element.word:
            result = _sparse_identity(filtration.size)
        else:
            prefix = next(e for e in self.elements if e.word == element.word[:-1])
            result = _sparse_product(
                self.function_matrix(prefix.index, filtration),
                self._generator_function_matrix(element.word[-1], filtration),
            )
        self._function_cache[key] = result
        return result

    def _generator_function_matrix(self, gi: int, filtration: FunctionFiltration) -> SparseColumns:
        key = (-1 - gi, filtration.degree)
        cached = self._function_cache.get(key)
        if cached is None:
            cached = _sparse_columns(filtration.action_matrix(self.generators[gi].mobius))
            self._function_cache[key] = cached
        return cached

    def describe(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "order": self.order,
            "generators": [g.name for g in self.generators],
            "poles": [str(p) for p in self.pole_set],
            "field_order": self.field_order,
        }


@dataclass(frozen=True)
class Stabilizer:
    """Cyclic stabilizer of a point, generated by ``generator`` of order ``order``."""

    point: SpherePoint
    generator: GroupElement
    order: int
    members: Tuple[int, ...]


def stabilizer(action: GroupAction, x0: SpherePoint) -> Stabilizer:
    """Stabilizer subgroup of ``x0`` and a generator of it."""
    if x0 in action.pole_set:
        raise PoleError(f"{x0} lies in the pole set")
    members = tuple(e.index for e in action.elements if e.apply(x0) == x0)
    nu = len(members)
    gen = next((i for i in members if action.element_order(i) == nu), None)
    if gen is None:
        raise InconsistencyError(f"stabilizer of {x0} is not cyclic")
    logger.debug("stabilizer of %s has order %d", x0, nu)
    return Stabilizer(x0, action.elements[gen], nu, members)


def fixed_subalgebra(action: GroupAction, x: SpherePoint) -> Subspace:
    """The subalgebra of g fixed by the stabilizer of x."""
    stab = stabilizer(action, x)
    n = action.lie.dim
    matrix = stab.generator.lie_matrix - ExactMatrix.identity(n)
    return Subspace(kernel_basis(matrix), n, action.lie)


def local_chart(action: GroupAction, x0: SpherePoint) -> Tuple[Stabilizer, LinearizingChart]:
    stab = stabilizer(action, x0)
    return stab, linearizing_coordinate(x0, stab.generator.mobius)


# ---------------------------------------------------------------------------
# Equivariant elements and the filtered algebra
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EquivariantElement:
    """Finite sum ``sum_t A_t ⊗ f_t`` of Lie vectors times functions."""

    terms: Tuple[Tuple[Vector, PoleRationalFunction], ...]
    lie: StructLieAlgebra

    def collected(self) -> Dict[int, PoleRationalFunction]:
        """Coefficient function of every Lie basis vector (zeros omitted)."""
        out: Dict[int, PoleRationalFunction] = {}
        for vector, f in self.terms:
            for a, c in enumerate(vector):
                if c:
                    out[a] = out[a] + f * c if a in out else f * c
        return {a: f for a, f in out.items() if not f.is_zero()}

    def transform(self, element: GroupElement) -> "EquivariantElement":
        """``gamma . a = sum gamma A_t ⊗ f_t o gamma^-1``."""
        return EquivariantElement(
            tuple(
                (element.lie_matrix.apply(v), mobius_pullback(f, element.mobius))
                for v, f in self.terms
            ),
            self.lie,
        )

    def is_invariant(self, action: GroupAction) -> bool:
        base = self.collected()
        for g in action.generators:
            image = EquivariantElement(
                tuple((g.lie_matrix.apply(v), mobius_pullback(f, g.mobius)) for v, f in self.terms),
                self.lie,
            ).collected()
            if image != base:
                return False
        return True

    def bracket(self, other: "EquivariantElement") -> "EquivariantElement":
        terms = []
        for v, f in self.terms:
            for w, g in other.terms:
                u = self.lie.bracket(v, w)
                if not vec_is_zero(u):
                    terms.append((u, f * g))
        return EquivariantElement(tuple(terms), self.lie)

    def evaluate(self, x: SpherePoint) -> Vector:
        total = [CycScalar.zero()] * self.lie.dim
        for v, f in self.terms:
            value = f.evaluate(x)
            if value:
                total = [t + value * c for t, c in zip(total, v)]
        return tuple(total)

    def jet(self, x0: SpherePoint, m: int, chart: Optional[ExactMatrix] = None) -> Vector:
        """Jet image, power-major: coordinate ``t * dim + a``."""
        n = self.lie.dim
        out = [CycScalar.zero()] * (n * m)
        for a, f in self.collected().items():
            coeffs = chart_jet(f, x0, m, chart).coeffs
            for t, c in enumerate(coeffs):
                if c:
                    out[t * n + a] = c
        return tuple(out)

    def __str__(self) -> str:
        parts = []
        for a, f in sorted(self.collected().items()):
            parts.append(f"{self.lie.labels[a]} ⊗ ({f})")
        return " + ".join(parts) if parts else "0"


class FilteredALiA:
    """Invariant elements of ``g ⊗ F_D`` with their filtration degrees.

    ``vectors[r]`` holds coordinates ``a * N + k`` of ``e_a ⊗ z^k / q_D``,
    where ``N`` is the size of the filtration step ``F_D``.
    """

    def __init__(
        self,
        action: GroupAction,
        lie: StructLieAlgebra,
        filtration: FunctionFiltration,
        vectors: Sequence[Vector],
        degrees: Sequence[int],
    ):
        self.action = action
        self.lie = lie
        self.filtration = filtration
        self.vectors: List[Vector] = list(vectors)
        self.degrees: List[int] = list(degrees)
        self._jet_cache: Dict[Tuple[SpherePoint, int], Tuple[ExactMatrix, LinearizingChart, int]] = {}

    @property
    def degree(self) -> int:
        return self.filtration.degree

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def element(self, r: int) -> EquivariantElement:
        return self.element_from_vector(self.vectors[r])

    def element_from_vector(self, vector: Sequence[CycScalar]) -> EquivariantElement:
        n, size = self.lie.dim, self.filtration.size
        terms = []
        for a in range(n):
            block = vector[a * size : (a + 1) * size]
            if any(block):
                terms.append((self.lie.basis_vector(a), self.filtration.function(block)))
        return EquivariantElement(tuple(terms), self.lie)

    def combination(self, coeffs: Sequence[CycScalar]) -> EquivariantElement:
        """Element with the given coordinates in this basis."""
        total = [CycScalar.zero()] * (self.lie.dim * self.filtration.size)
        for c, v in zip(coeffs, self.vectors):
            if c:
                total = [t + c * x if x else t for t, x in zip(total, v)]
        return self.element_from_vector(total)

    def elements_of_degree(self, d: int) -> List[int]:
        return [r for r, deg in enumerate(self.degrees) if deg == d]

    def jet_matrix(self, x0: SpherePoint, m: int) -> Tuple[ExactMatrix, LinearizingChart, int]:
        """Matrix of ``id ⊗ jet`` at x0 in the linearizing chart.

        Rows are power-major jet coordinates ``t * dim + a``; columns are the
        basis elements. Also returns the chart and the stabilizer order.
        """
        key = (x0, m)
        cached = self._jet_cache.get(key)
        if cached is not None:
            return cached
        stab, chart = local_chart(self.action, x0)
        size, n = self.filtration.size, self.lie.dim
        function_jets = [
            chart_jet(self.filtration.basis_function(k), x0, m, chart.chart).coeffs
            for k in range(size)
        ]
        columns = []
        for v in self.vectors:
            col = [CycScalar.zero()] * (n * m)
            for idx, c in enumerate(v):
                if not c:
                    continue
                a, k = divmod(idx, size)
                for t, j in enumerate(function_jets[k]):
                    if j:
                        col[t * n + a] = col[t * n + a] + c * j
            columns.append(col)
        matrix = ExactMatrix.from_columns(columns, n * m) if columns else ExactMatrix.zeros(n * m, 0)
        result = (matrix, chart, stab.order)
        self._jet_cache[key] = result
        return result

    def to_json(self) -> Dict[str, Any]:
        return {
            "degree": self.degree,
            "degrees": list(self.degrees),
            "vectors": [[[k, str(c)] for k, c in enumerate(v) if c] for v in self.vectors],
        }

    @classmethod
    def from_json(cls, action: GroupAction, doc: Mapping[str, Any]) -> "FilteredALiA":
        filtration = FunctionFiltration(action.pole_set, int(doc["degree"]))
        length = action.lie.dim * filtration.size
        vectors = []
        for entries in doc["vectors"]:
            v = [CycScalar.zero()] * length
            for k, text in entries:
                v[int(k)] = CycScalar.parse(str(text), action.field_order)
            vectors.append(tuple(v))
        return cls(action, action.lie, filtration, vectors, doc["degrees"])

    def __repr__(self) -> str:
        return f"FilteredALiA(degree={self.degree}, dim={self.dim})"


def _reynolds(
    i: int,
    phi: Mapping[int, CycScalar],
    lie_cols: Sequence[SparseColumns],
    fun_cols: Sequence[SparseColumns],
    size: int,
    weight: Fraction,
) -> Dict[int, CycScalar]:
    acc: Dict[int, CycScalar] = {}
    for lc, fc in zip(lie_cols, fun_cols):
        image: Dict[int, CycScalar] = {}
        for k, c in phi.items():
            for b, x in fc[k].items():
                y = image.get(b, CycScalar.zero()) + c * x
                if y:
                    image[b] = y
                else:
                    image.pop(b, None)
        for a, la in lc[i].items():
            for b, fb in image.items():
                idx = a * size + b
                y = acc.get(idx, CycScalar.zero()) + la * fb
                if y:
                    acc[idx] = y
                else:
                    acc.pop(idx, None)
    return {k: c * weight for k, c in acc.items()}


def invariant_basis(
    action: GroupAction, lie: Optional[StructLieAlgebra] = None, degree: int = 0
) -> FilteredALiA:
    """Basis of the invariants in ``g ⊗ F_D``, built degree by degree.

    Every basis element is a Reynolds average of ``e_i ⊗ phi`` with ``phi`` a
    function first appearing in ``F_d``; its filtration degree is ``d``.

    Raises
    ------
    InconsistencyError
        If the rank disagrees with the character formula.
    """
    lie = lie if lie is not None else action.lie
    if lie.dim != action.lie.dim:
        raise PreconditionError("Lie algebra does not match the action")
    cached = action._basis_cache.get(degree)
    if cached is not None:
        return cached
    filtration = FunctionFiltration(action.pole_set, degree)
    size, n = filtration.size, lie.dim
    lie_cols = [_sparse_columns(e.lie_matrix) for e in action.elements]
    fun_cols = [action.function_matrix(e.index, filtration) for e in action.elements]
    weight = Fraction(1, action.order)

    span = EchelonSpan(n * size)
    function_span = EchelonSpan(size)
    vectors: List[Vector] = []
    degrees: List[int] = []
    for d in range(degree + 1):
        lower = FunctionFiltration(action.pole_set, d)
        cofactor = FunctionFiltration(action.pole_set, degree - d).denominator
        for k in range(lower.size):
            coeffs = (cofactor * Polynomial.monomial(k)).coeffs
            phi = {j: c for j, c in enumerate(coeffs) if c}
            if not function_span.add(phi):
                continue
            for i in range(n):
                image = _reynolds(i, phi, lie_cols, fun_cols, size, weight)
                reduced = span.reduce(image)
                if not reduced:
                    continue
                lead = reduced[min(reduced)].inverse()
                reduced = {j: c * lead for j, c in reduced.items()}
                span.add(reduced)
                vectors.append(tuple(reduced.get(j, CycScalar.zero()) for j in range(n * size)))
                degrees.append(d)
        logger.debug("degree %d: %d invariants so far", d, len(vectors))

    total = CycScalar.zero()
    for lc, fc in zip(lie_cols, fun_cols):
        total = total + _sparse_trace(lc) * _sparse_trace(fc)
    expected = total * weight
    if expected != len(vectors):
        raise InconsistencyError(
            f"found {len(vectors)} invariants, character formula predicts {expected}"
        )
    algebra = FilteredALiA(action, lie, filtration, vectors, degrees)
    action._basis_cache[degree] = algebra
    logger.info("invariant basis at degree %d has %d elements", degree, algebra.dim)
    return algebra


def reynolds(action: GroupAction, element: EquivariantElement) -> EquivariantElement:
    """Average of an element over the group."""
    weight = Fraction(1, action.order)
    terms = []
    for e in action.elements:
        for v, f in element.transform(e).terms:
            terms.append((v, f * weight))
    return EquivariantElement(tuple(terms), element.lie)


def point_evaluation(
    a: EquivariantElement,
    points: Sequence[SpherePoint],
    action: Optional[GroupAction] = None,
) -> List[Vector]:
    """Values of ``a`` at each point; with an action, checks they lie in g^x."""
    values = []
    for x in points:
        for _, f in a.terms:
            if x in f.pole_set:
                raise PoleError(f"{x} lies in the pole set")
        value = a.evaluate(x)
        if action is not None:
            stab = stabilizer(action, x)
            if stab.generator.lie_matrix.apply(value) != value:
                raise InconsistencyError(f"value at {x} is not fixed by its stabilizer")
        values.append(value)
    return values


# ---------------------------------------------------------------------------
# Jet ideals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JetRep:
    """Jet representation of order ``order`` at ``point``."""

    point: SpherePoint
    order: int


def jet_ideal(algebra: FilteredALiA, x0: SpherePoint, m: int) -> Subspace:
    """Kernel of ``id ⊗ jet`` at x0 of order m, in basis coordinates."""
    return ideal_of_jet_reps(algebra, [JetRep(x0, m)])


def ideal_of_jet_reps(algebra: FilteredALiA, reps: Sequence[JetRep]) -> Subspace:
    """Ideal of the direct sum of the given jet representations."""
    if not reps:
        raise PreconditionError("no jet representations given")
    matrix: Optional[ExactMatrix] = None
    for rep in reps:
        if rep.order < 1:
            raise PreconditionError("jet order must be at least 1")
        block = algebra.jet_matrix(rep.point, rep.order)[0]
        matrix = block if matrix is None else matrix.vstack(block)
    assert matrix is not None
    return Subspace(kernel_basis(matrix), algebra.dim)


def jet_ideal_is_closed(algebra: FilteredALiA, ideal: Subspace, x0: SpherePoint, m: int) -> bool:
    """Brackets of ideal vectors with basis elements have vanishing jets."""
    _, chart, _ = algebra.jet_matrix(x0, m)
    for v in ideal.basis:
        element = algebra.combination(v)
        for r in range(algebra.dim):
            product = algebra.element(r).bracket(element)
            if not vec_is_zero(product.jet(x0, m, chart.chart)):
                return False
    return True


@dataclass(frozen=True)
class ChainStep:
    """One step of the jet ideal chain."""

    m: int
    dim: int
    codim: int
    strict: bool


def ideal_chain(algebra: FilteredALiA, x0: SpherePoint, mmax: int) -> List[ChainStep]:
    """Dimensions and codimensions of the jet ideals for m = 1..mmax."""
    if mmax < 1:
        raise PreconditionError("mmax must be at least 1")
    matrix = algebra.jet_matrix(x0, mmax)[0]
    n = algebra.lie.dim
    steps: List[ChainStep] = []
    previous = 0
    for m in range(1, mmax + 1):
        rank = ExactMatrix(matrix.rows[: n * m], algebra.dim).rank()
        steps.append(ChainStep(m, algebra.dim - rank, rank, rank > previous))
        previous = rank
    return steps


def directsum_ideal_intersection_check(
    algebra: FilteredALiA, phi: Sequence[JetRep], psi: Sequence[JetRep]
) -> bool:
    """Check that the ideal of ``phi ⊕ psi`` is the intersection of both ideals.

    Raises
    ------
    InconsistencyError
        With both dimensions when the identity fails.
    """
    combined = ideal_of_jet_reps(algebra, list(phi) + list(psi))
    left = ideal_of_jet_reps(algebra, phi)
    right = ideal_of_jet_reps(algebra, psi)
    meet = left.intersection(right)
    if combined != meet:
        raise InconsistencyError(
            f"direct-sum ideal has dim {combined.dim}, intersection has dim {meet.dim}"
        )
    return True


# ---------------------------------------------------------------------------
# Quotients by jet ideals
# ---------------------------------------------------------------------------


@dataclass
class JetQuotient:
    """``A / I_{x0,m}`` realized as the jet image inside ``g ⊗ C[t]/(t^m)``."""

    algebra: StructLieAlgebra
    point: SpherePoint
    m: int
    rows: List[Vector]
    row_degrees: List[int]
    lie_parts: List[Vector]
    representatives: List[Vector]
    chart: LinearizingChart
    nu0: int
    degree: int
    homogeneous: bool
    dimensions: List[int] = field(default_factory=list)
    source: Optional[FilteredALiA] = None
    closed: bool = True

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def ready(self) -> bool:
        """Graded and closed under the bracket, so a Lie algebra quotient."""
        return self.homogeneous and self.closed


def _quotient_at(algebra: FilteredALiA, x0: SpherePoint, m: int) -> JetQuotient:
    matrix, chart, nu0 = algebra.jet_matrix(x0, m)
    n = algebra.lie.dim
    rows = matrix.column_space() if algebra.dim else []
    row_degrees: List[int] = []
    lie_parts: List[Vector] = []
    homogeneous = True
    for row in rows:
        blocks = {idx // n for idx, c in enumerate(row) if c}
        t = min(blocks)
        homogeneous = homogeneous and len(blocks) == 1
        row_degrees.append(t)
        lie_parts.append(tuple(row[t * n : (t + 1) * n]))
    pivots = [next(i for i, c in enumerate(row) if c) for row in rows]
    labels = [jet_label(algebra.lie, v, t) for v, t in zip(lie_parts, row_degrees)]

    def not_ready(closed: bool) -> JetQuotient:
        placeholder = StructLieAlgebra(labels, {}, validate=False)
        return JetQuotient(placeholder, x0, m, rows, row_degrees, lie_parts, [], chart, nu0,
                           algebra.degree, homogeneous, [], algebra, closed)

    if not homogeneous:
        return not_ready(True)
    structure: Dict[Tuple[int, int], Dict[int, CycScalar]] = {}
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            t = row_degrees[i] + row_degrees[j]
            if t >= m:
                continue
            w = algebra.lie.bracket(lie_parts[i], lie_parts[j])
            if vec_is_zero(w):
                continue
            full = [CycScalar.zero()] * (n * m)
            full[t * n : (t + 1) * n] = w
            column = {r: full[p] for r, p in enumerate(pivots) if full[p]}
            rebuilt = [CycScalar.zero()] * (n * m)
            for r, c in column.items():
                rebuilt = [x + c * y if y else x for x, y in zip(rebuilt, rows[r])]
            if tuple(rebuilt) != tuple(full):
                # the truncation misses invariants that the bracket reaches
                logger.debug("degree %d: jet image not closed under the bracket", algebra.degree)
                return not_ready(False)
            structure[(i, j)] = column
    quotient = StructLieAlgebra(labels, structure, grading=row_degrees)
    representatives = matrix.solve_many(rows) if rows else []
    if any(r is None for r in representatives):
        raise InconsistencyError("jet image row without a preimage")
    return JetQuotient(
        quotient, x0, m, rows, row_degrees, lie_parts,
        [r for r in representatives if r is not None], chart, nu0, algebra.degree, True,
        [], algebra,
    )


def jet_label(lie: StructLieAlgebra, v: Vector, t: int) -> str:
    support = [a for a, c in enumerate(v) if c]
    if len(support) == 1 and v[support[0]] == 1:
        name = lie.labels[support[0]]
    else:
        name = f"({format_vector(v, lie.labels)})"
    return f"{name}@z^{t}"


def stabilized_quotient(
    action: GroupAction,
    x0: SpherePoint,
    m: int,
    start_degree: Optional[int] = None,
    step: Optional[int] = None,
    max_degree: Optional[int] = None,
) -> JetQuotient:
    """Grow the filtration degree until the quotient dimension stabilizes.

    Stability means two consecutive degrees (``step`` apart, default the
    stabilizer order) give graded, bracket-closed jet images of the same
    dimension.

    Raises
    ------
    StabilizationError
        If the dimensions do not settle below ``max_degree``.
    """
    if m < 1:
        raise PreconditionError("m must be at least 1")
    nu0 = stabilizer(action, x0).order
    step = step or nu0
    degree = start_degree if start_degree is not None else max(m - 1, 0)
    max_degree = max_degree if max_degree is not None else degree + 10 * step + m
    dims: List[int] = []
    previous: Optional[JetQuotient] = None
    while degree <= max_degree:
        current = _quotient_at(invariant_basis(action, action.lie, degree), x0, m)
        dims.append(current.dim)
        logger.debug("degree %d: quotient dimension %d", degree, current.dim)
        if (
            previous is not None
            and previous.ready
            and current.ready
            and previous.dim == current.dim
        ):
            current.dimensions = dims
            logger.info("quotient at %s, m=%d stabilized at dim %d", x0, m, current.dim)
            return current
        previous = current
        degree += step
    raise StabilizationError(
        f"quotient dimensions {dims} did not stabilize up to degree {max_degree}; raise --degree",
        dims,
    )


def quotient_by_jet_ideal(
    algebra: FilteredALiA,
    x0: SpherePoint,
    m: int,
    stabilize: bool = True,
    step: Optional[int] = None,
    max_degree: Optional[int] = None,
) -> JetQuotient:
    """Graded quotient ``A / I_{x0,m}``.

    Without ``stabilize`` the given truncation is used as is and must already
    give a graded jet image closed under the bracket.
    """
    if not stabilize:
        result = _quotient_at(algebra, x0, m)
        if not result.ready:
            raise StabilizationError(
                "jet image is not a graded subalgebra at this degree", [result.dim]
            )
        result.dimensions = [result.dim]
        return result
    return stabilized_quotient(
        algebra.action, x0, m, start_degree=algebra.degree, step=step, max_degree=max_degree
    )

