"""Wildness certificates for finite-dimensional quotients.

A finite-dimensional Lie algebra has wild representation type unless it is
one-dimensional, semisimple, or semisimple plus a one-dimensional center.
:func:`makedonskii_classify` decides which shape applies and keeps the
subspaces that justify the decision. :func:`solvable_growth` follows the
image of the vanishing ideal ``I_{x0,1}`` through the quotients
``A / I_{x0,n}``; :func:`endomorphism_algebra` computes commutants of
representations (bricks).

Example usage:
    >>> from alia.presets import load_preset
    >>> from alia.funring import SpherePoint
    >>> cfg = load_preset("sl2-z5")
    >>> report = wildness_report(cfg, SpherePoint.parse("0"), nmax=4)
    >>> [row.verdict for row in report.rows]
    ['one-dimensional', 'one-dimensional', 'wild', 'wild']
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from alia.equivariant import FilteredALiA, JetQuotient, invariant_basis, quotient_by_jet_ideal
from alia.errors import PreconditionError
from alia.exactmath import CycScalar, EchelonSpan, ExactMatrix, Vector, kernel_basis
from alia.funring import SpherePoint
from alia.liealg import (
    StructLieAlgebra,
    Subspace,
    bracket_span,
    center,
    derived_series,
    radical,
    quotient,
)

logger = logging.getLogger(__name__)

ONE_DIMENSIONAL = "one-dimensional"
SEMISIMPLE = "semisimple"
SS_PLUS_LINE = "ss-plus-line"
WILD = "wild"
TAME_SHAPES = (ONE_DIMENSIONAL, SEMISIMPLE, SS_PLUS_LINE)

IRREDUCIBILITY_LIMIT = 4


@dataclass
class Classification:
    """Verdict on a finite-dimensional Lie algebra with its witnesses.

    ``reason`` names the tame shape that was recognized, or the first
    property that rules out the ss-plus-line shape.
    """

    verdict: str
    dim: int
    radical: Subspace
    center: Subspace
    derived: Subspace
    reason: str

    @property
    def wild(self) -> bool:
        return self.verdict == WILD

    def to_json(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict,
            "dim": self.dim,
            "radical_dim": self.radical.dim,
            "center_dim": self.center.dim,
            "derived_dim": self.derived.dim,
            "reason": self.reason,
        }


def makedonskii_classify(g: StructLieAlgebra) -> Classification:
    """Decide whether ``g`` has one of the three tame shapes."""
    full = Subspace.full(g)
    derived = bracket_span(full, full)
    rad = radical(g)
    cen = center(g)
    if g.dim == 1:
        verdict, reason = ONE_DIMENSIONAL, "dimension 1"
    elif rad.dim == 0:
        verdict, reason = SEMISIMPLE, "radical is zero"
    elif rad.dim > 1:
        verdict, reason = WILD, f"radical has dimension {rad.dim}"
    elif not rad <= cen:
        verdict, reason = WILD, "radical is not central"
    elif rad.intersection(derived).dim:
        verdict, reason = WILD, "radical lies in the derived algebra"
    else:
        # g = [g, g] + rad with [g, g] an ideal, so the sum is direct as Lie algebras
        verdict, reason = SS_PLUS_LINE, "central line complementary to the derived algebra"
    logger.debug("classified algebra of dim %d as %s (%s)", g.dim, verdict, reason)
    return Classification(verdict, g.dim, rad, cen, derived, reason)


# ---------------------------------------------------------------------------
# Solvable ideals of the jet quotients
# ---------------------------------------------------------------------------


@dataclass
class GrowthRow:
    n: int
    quotient_dim: int
    solvable_dim: int
    derived_dims: List[int]
    solvable: bool
    classification: Classification

    @property
    def verdict(self) -> str:
        return self.classification.verdict

    def to_json(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "quotient_dim": self.quotient_dim,
            "solvable_dim": self.solvable_dim,
            "derived_dims": self.derived_dims,
            "solvable": self.solvable,
            "classification": self.classification.to_json(),
        }


def truncate_quotient(q: StructLieAlgebra, n: int) -> StructLieAlgebra:
    """``A / I_{x0,n}`` from a graded quotient ``A / I_{x0,N}`` with N >= n."""
    if q.grading is None:
        raise PreconditionError("truncation needs a graded quotient")
    high = [q.basis_vector(i) for i, d in enumerate(q.grading) if d >= n]
    if not high:
        return q
    truncated, _ = quotient(q, Subspace.of(q, high))
    return truncated


def vanishing_image(q: StructLieAlgebra) -> Subspace:
    """Image of ``I_{x0,1}``: the part of positive jet degree."""
    if q.grading is None:
        raise PreconditionError("vanishing image needs a graded quotient")
    return Subspace.of(q, [q.basis_vector(i) for i, d in enumerate(q.grading) if d >= 1])


def growth_row(q: StructLieAlgebra, n: int) -> GrowthRow:
    kernel = vanishing_image(q)
    series = derived_series(kernel)
    return GrowthRow(
        n,
        q.dim,
        kernel.dim,
        [s.dim for s in series],
        series[-1].dim == 0,
        makedonskii_classify(q),
    )


def solvable_growth(
    algebra: FilteredALiA,
    x0: SpherePoint,
    nmax: int,
    step: Optional[int] = None,
    max_degree: Optional[int] = None,
) -> List[GrowthRow]:
    """Rows ``n = 1..nmax`` of the solvable-ideal growth table at ``x0``.

    The quotient is computed once at ``n = nmax``; smaller ``n`` are read
    off by truncating its grading.
    """
    if nmax < 1:
        raise PreconditionError("nmax must be at least 1")
    top = quotient_by_jet_ideal(algebra, x0, nmax, step=step, max_degree=max_degree)
    rows = [growth_row(truncate_quotient(top.algebra, n), n) for n in range(1, nmax + 1)]
    logger.info("growth table at %s up to n=%d: solvable dims %s",
                x0, nmax, [r.solvable_dim for r in rows])
    return rows


def is_monotone(rows: Sequence[GrowthRow]) -> bool:
    dims = [r.solvable_dim for r in rows]
    return all(a <= b for a, b in zip(dims, dims[1:]))


@dataclass
class WildnessReport:
    """Growth table of solvable ideals with per-quotient classification."""

    name: str
    point: SpherePoint
    nmax: int
    start_degree: int
    rows: List[GrowthRow] = field(default_factory=list)

    @property
    def monotone(self) -> bool:
        return is_monotone(self.rows)

    @property
    def first_wild(self) -> Optional[int]:
        return next((r.n for r in self.rows if r.classification.wild), None)

    def to_json(self) -> Dict[str, Any]:
        return {
            "config": self.name,
            "point": str(self.point),
            "nmax": self.nmax,
            "start_degree": self.start_degree,
            "monotone": self.monotone,
            "first_wild": self.first_wild,
            "rows": [r.to_json() for r in self.rows],
        }

    def table(self) -> str:
        lines = [
            f"solvable ideals at {self.point} ({self.name})",
            f"{'n':>4}{'dim Q':>8}{'dim K':>8}  {'solvable':<9}{'verdict':<16}reason",
        ]
        for r in self.rows:
            lines.append(
                f"{r.n:>4}{r.quotient_dim:>8}{r.solvable_dim:>8}  {str(r.solvable):<9}"
                f"{r.verdict:<16}{r.classification.reason}"
            )
        return "\n".join(lines) + "\n"


def wildness_report(
    cfg: Any,
    x0: SpherePoint,
    nmax: int = 30,
    degree: Optional[int] = None,
    step: Optional[int] = None,
) -> WildnessReport:
    degree = degree if degree is not None else nmax - 1
    algebra = invariant_basis(cfg.action, cfg.lie, degree)
    rows = solvable_growth(algebra, x0, nmax, step=step)
    return WildnessReport(cfg.name, x0, nmax, algebra.degree, rows)


# ---------------------------------------------------------------------------
# Representations and bricks
# ---------------------------------------------------------------------------


def adjoint_representation(g: StructLieAlgebra) -> List[ExactMatrix]:
    """``ad`` of every basis vector, in basis order."""
    return [g.adjoint(g.basis_vector(i)) for i in range(g.dim)]


def check_representation(g: StructLieAlgebra, matrices: Sequence[ExactMatrix]) -> None:
    """Raise PreconditionError unless ``ρ([a, b]) = [ρ(a), ρ(b)]`` on basis pairs."""
    if len(matrices) != g.dim:
        raise PreconditionError(f"{len(matrices)} matrices for an algebra of dim {g.dim}")
    n = matrices[0].nrows if matrices else 0
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            lhs = ExactMatrix.zeros(n, n)
            for k, c in g.bracket_basis(i, j).items():
                lhs = lhs + matrices[k] * c
            rhs = matrices[i] @ matrices[j] - matrices[j] @ matrices[i]
            if lhs != rhs:
                raise PreconditionError(
                    f"matrices do not respect the bracket of {g.labels[i]} and {g.labels[j]}"
                )


def _flatten(m: ExactMatrix) -> Vector:
    return tuple(c for row in m.rows for c in row)


def _generated_algebra(matrices: Sequence[ExactMatrix], n: int) -> List[ExactMatrix]:
    """Basis of the unital associative algebra generated by ``matrices``."""
    span = EchelonSpan(n * n)
    basis: List[ExactMatrix] = []
    frontier = [ExactMatrix.identity(n)]
    while frontier:
        m = frontier.pop()
        if span.add(_flatten(m)):
            basis.append(m)
            frontier.extend(m @ a for a in matrices)
    return basis


def _orbit_span(algebra: Sequence[ExactMatrix], v: Vector, n: int) -> List[Vector]:
    span = EchelonSpan(n)
    for m in algebra:
        span.add(m.apply(v))
    return span.basis()


@dataclass
class EndomorphismReport:
    """Commutant of a representation and an invariant-subspace search.

    ``irreducible`` is None when the dimension exceeds the search limit.
    ``invariant_subspace`` is a proper nonzero invariant subspace if found.
    """

    dim: int
    basis: List[ExactMatrix]
    rep_dim: int
    irreducible: Optional[bool]
    invariant_subspace: Optional[List[Vector]] = None

    @property
    def is_brick(self) -> bool:
        return self.dim == 1

    def to_json(self) -> Dict[str, Any]:
        return {
            "dim": self.dim,
            "rep_dim": self.rep_dim,
            "brick": self.is_brick,
            "irreducible": self.irreducible,
            "invariant_subspace": (
                [[str(c) for c in v] for v in self.invariant_subspace]
                if self.invariant_subspace is not None else None
            ),
        }


def endomorphism_algebra(
    matrices: Sequence[ExactMatrix], algebra: Optional[StructLieAlgebra] = None
) -> EndomorphismReport:
    """Commutant ``{T : [T, ρ(a)] = 0}`` of a representation.

    Parameters
    ----------
    matrices : sequence of ExactMatrix
        ``ρ`` of the basis vectors.
    algebra : StructLieAlgebra, optional
        When given, the matrices are first checked to form a representation.
    """
    if not matrices:
        raise PreconditionError("a representation needs at least one matrix")
    n = matrices[0].nrows
    if any(m.shape != (n, n) for m in matrices):
        raise PreconditionError("representation matrices must be square of one size")
    if algebra is not None:
        check_representation(algebra, matrices)
    # T is unknown with T[i][k] at column i * n + k
    rows: List[List[CycScalar]] = []
    for a in matrices:
        for i in range(n):
            for j in range(n):
                row = [CycScalar.zero()] * (n * n)
                for k in range(n):
                    if a[k, j]:
                        row[i * n + k] = row[i * n + k] + a[k, j]
                    if a[i, k]:
                        row[k * n + j] = row[k * n + j] - a[i, k]
                if any(row):
                    rows.append(row)
    if rows:
        solutions = kernel_basis(ExactMatrix(rows, n * n))
    else:
        solutions = [tuple(CycScalar.one() if c == i else CycScalar.zero() for c in range(n * n))
                     for i in range(n * n)]
    basis = [ExactMatrix([list(v[i * n:(i + 1) * n]) for i in range(n)], n) for v in solutions]

    irreducible: Optional[bool] = None
    witness: Optional[List[Vector]] = None
    if n <= IRREDUCIBILITY_LIMIT:
        generated = _generated_algebra(matrices, n)
        irreducible = len(generated) == n * n
        if not irreducible:
            candidates = [tuple(CycScalar.one() if c == i else CycScalar.zero() for c in range(n))
                          for i in range(n)]
            for m in matrices:
                candidates.extend(kernel_basis(m))
            for v in candidates:
                orbit = _orbit_span(generated, v, n)
                if 0 < len(orbit) < n:
                    witness = orbit
                    break
    else:
        logger.warning("irreducibility not checked for a representation of dim %d", n)
    logger.debug("commutant of a %d-dimensional representation has dim %d", n, len(basis))
    return EndomorphismReport(len(basis), basis, n, irreducible, witness)


def is_brick(matrices: Sequence[ExactMatrix], algebra: Optional[StructLieAlgebra] = None) -> bool:
    return endomorphism_algebra(matrices, algebra).is_brick


def brick_example(quotient_result: JetQuotient) -> EndomorphismReport:
    """Adjoint representation of a jet quotient and its commutant."""
    q = quotient_result.algebra
    return endomorphism_algebra(adjoint_representation(q), q)
