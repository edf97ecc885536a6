"""Twisted truncated current algebras ``(g ⊗ C[z]/(z^m))^γ0``.

The algebra has the basis ``A ⊗ z^k`` (0 <= k < m) where ``A`` runs through
an eigenbasis of the ``ζ^k``-eigenspace of γ0. It is the graded model of the
quotient of an automorphic Lie algebra by the jet ideal at a point with
stabilizer generated by γ0; :func:`quotient_certificate` checks this
identification on an actual quotient.

Example usage:
    >>> from alia.liealg import sl2
    >>> from alia.exactmath import ExactMatrix, CycScalar
    >>> from alia.equivariant import conjugation_automorphism
    >>> lie = sl2()
    >>> z5 = CycScalar.zeta(5)
    >>> gamma0 = conjugation_automorphism(lie, ExactMatrix.diag([z5, z5 ** 4]))
    >>> model = build(lie, gamma0, 6, zeta=z5 ** 4)
    >>> model.realized.labels
    ('h@z^0', 'f@z^2', 'e@z^3', 'h@z^5')
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

from alia.equivariant import (
    FilteredALiA,
    JetQuotient,
    jet_label,
    quotient_by_jet_ideal,
    stabilizer,
)
from alia.errors import InconsistencyError, PreconditionError
from alia.exactmath import CycScalar, ExactMatrix, Vector, eigenprojectors, vec_is_zero
from alia.funring import SpherePoint
from alia.liealg import StructLieAlgebra, is_automorphism, verify_isomorphism

logger = logging.getLogger(__name__)

MAX_ORDER = 720


def eigenspace_decomposition(
    gamma0: ExactMatrix, nu: int, zeta: Optional[CycScalar] = None
) -> Dict[int, List[Vector]]:
    """RREF bases of the ``ζ^k``-eigenspaces of ``gamma0``, k = 0..nu-1."""
    projectors = eigenprojectors(gamma0, nu, zeta)
    blocks = {k: p.column_space() for k, p in enumerate(projectors)}
    total = sum(len(b) for b in blocks.values())
    if total != gamma0.nrows:
        raise InconsistencyError(
            f"eigenspaces have total dimension {total}, expected {gamma0.nrows}"
        )
    return blocks


def exponent_census(
    lie: StructLieAlgebra, gamma0: ExactMatrix, nu: Optional[int] = None,
    zeta: Optional[CycScalar] = None,
) -> Dict[int, int]:
    """Dimension of each eigenspace ``g_k`` of gamma0."""
    nu = nu or gamma0.multiplicative_order(MAX_ORDER)
    return {k: len(b) for k, b in eigenspace_decomposition(gamma0, nu, zeta).items()}


@dataclass
class TwistedTruncatedCurrentAlgebra:
    """Explicit ``(g ⊗ C[z]/(z^m))^γ0`` with its eigenbasis bookkeeping."""

    lie: StructLieAlgebra
    gamma0: ExactMatrix
    nu: int
    zeta: CycScalar
    m: int
    eigenbases: Dict[int, List[Vector]]
    basis: List[Tuple[Vector, int]]
    realized: StructLieAlgebra

    @property
    def dim(self) -> int:
        return self.realized.dim

    def indices_of_degree(self, k: int) -> List[int]:
        return [i for i, (_, t) in enumerate(self.basis) if t == k]

    def coordinates(self, vector: Sequence[CycScalar], k: int) -> Vector:
        """Coordinates of ``vector ⊗ z^k`` in the basis of this algebra.

        Raises
        ------
        PreconditionError
            If ``vector`` is not in the ``ζ^k``-eigenspace or ``k >= m``.
        """
        if not 0 <= k < self.m:
            raise PreconditionError(f"exponent {k} outside 0..{self.m - 1}")
        block = self.eigenbases[k % self.nu]
        out = [CycScalar.zero()] * self.dim
        if vec_is_zero(vector):
            return tuple(out)
        if not block:
            raise PreconditionError(f"vector is not in the eigenspace of exponent {k}")
        solution = ExactMatrix.from_columns(block, self.lie.dim).solve(vector)
        if solution is None:
            raise PreconditionError(f"vector is not in the eigenspace of exponent {k}")
        for idx, c in zip(self.indices_of_degree(k), solution):
            out[idx] = c
        return tuple(out)

    def to_json(self) -> Dict[str, Any]:
        doc = self.realized.to_json()
        doc["nu"] = self.nu
        doc["m"] = self.m
        return doc


def _eigen_coordinates(
    eigenbases: Dict[int, List[Vector]], dim: int
) -> Tuple[ExactMatrix, List[int]]:
    """Inverse of the eigenbasis change of basis, plus the block of each column."""
    columns: List[Vector] = []
    blocks: List[int] = []
    for k in sorted(eigenbases):
        for v in eigenbases[k]:
            columns.append(v)
            blocks.append(k)
    return ExactMatrix.from_columns(columns, dim).inverse(), blocks


def build(
    lie: StructLieAlgebra,
    gamma0: ExactMatrix,
    m: int,
    zeta: Optional[CycScalar] = None,
    nu: Optional[int] = None,
) -> TwistedTruncatedCurrentAlgebra:
    """Construct ``(g ⊗ C[z]/(z^m))^γ0`` as a graded StructLieAlgebra.

    Parameters
    ----------
    lie : StructLieAlgebra
        The algebra g.
    gamma0 : ExactMatrix
        Finite-order automorphism of g.
    m : int
        Truncation order (m >= 1).
    zeta : CycScalar, optional
        Primitive root of unity of order ν0 defining the exponents; defaults
        to ``exp(2πi/ν0)``.
    nu : int, optional
        Order of gamma0, computed when omitted.
    """
    if m < 1:
        raise PreconditionError("truncation order m must be at least 1")
    if not is_automorphism(gamma0, lie):
        raise PreconditionError("gamma0 is not an automorphism of the Lie algebra")
    nu = nu or gamma0.multiplicative_order(MAX_ORDER)
    zeta = zeta if zeta is not None else CycScalar.zeta(nu)
    eigenbases = eigenspace_decomposition(gamma0, nu, zeta)
    to_eigen, blocks = _eigen_coordinates(eigenbases, lie.dim)
    offsets: Dict[int, int] = {}
    pos = 0
    for k in sorted(eigenbases):
        offsets[k] = pos
        pos += len(eigenbases[k])

    basis: List[Tuple[Vector, int]] = []
    for t in range(m):
        for v in eigenbases[t % nu]:
            basis.append((v, t))
    first_of_degree: Dict[int, int] = {}
    for idx, (_, t) in enumerate(basis):
        first_of_degree.setdefault(t, idx)

    structure: Dict[Tuple[int, int], Dict[int, CycScalar]] = {}
    for i, (a, s) in enumerate(basis):
        for j in range(i + 1, len(basis)):
            b, t = basis[j]
            if s + t >= m:
                continue
            w = lie.bracket(a, b)
            if vec_is_zero(w):
                continue
            coords = to_eigen.apply(w)
            k = (s + t) % nu
            column: Dict[int, CycScalar] = {}
            for c_idx, c in enumerate(coords):
                if not c:
                    continue
                if blocks[c_idx] != k:
                    raise InconsistencyError("bracket leaves the expected eigenspace")
                column[first_of_degree[s + t] + c_idx - offsets[k]] = c
            structure[(i, j)] = column
    labels = [jet_label(lie, v, t) for v, t in basis]
    realized = StructLieAlgebra(labels, structure, grading=[t for _, t in basis])
    logger.debug("built twisted truncated current algebra of dim %d (nu=%d, m=%d)",
                 realized.dim, nu, m)
    return TwistedTruncatedCurrentAlgebra(lie, gamma0, nu, zeta, m, eigenbases, basis, realized)


def contraction_check(model: TwistedTruncatedCurrentAlgebra) -> bool:
    """Check that the ``m = ν0`` model is the degree contraction of g.

    The contracted bracket of eigenvectors ``A`` (degree i) and ``B``
    (degree j) is ``[A, B]`` when ``i + j < ν0`` and zero otherwise.
    """
    if model.m != model.nu:
        raise PreconditionError(f"contraction needs m = nu0 = {model.nu}, got m = {model.m}")
    lie = model.lie
    if model.dim != lie.dim:
        return False
    to_eigen, _ = _eigen_coordinates(model.eigenbases, lie.dim)
    for i in range(model.dim):
        for j in range(i + 1, model.dim):
            (a, s), (b, t) = model.basis[i], model.basis[j]
            expected = [CycScalar.zero()] * model.dim
            if s + t < model.nu:
                for c_idx, c in enumerate(to_eigen.apply(lie.bracket(a, b))):
                    if c:
                        expected[c_idx] = c
            got = model.realized.bracket(model.realized.basis_vector(i), model.realized.basis_vector(j))
            if tuple(expected) != got:
                logger.debug("contraction differs at (%d, %d)", i, j)
                return False
    return True


@dataclass
class QuotientCertificate:
    """A jet quotient, its twisted model and the leading-coefficient map."""

    quotient: JetQuotient
    model: TwistedTruncatedCurrentAlgebra
    matrix: ExactMatrix
    verified: bool

    def to_json(self) -> Dict[str, Any]:
        return {
            "point": str(self.quotient.point),
            "m": self.quotient.m,
            "nu0": self.quotient.nu0,
            "degree": self.quotient.degree,
            "dimensions": list(self.quotient.dimensions),
            "quotient": self.quotient.algebra.to_json(),
            "model": self.model.realized.to_json(),
            "isomorphism": self.matrix.to_text(),
            "verified": self.verified,
        }


def leading_coefficient_map(
    quotient: JetQuotient, model: TwistedTruncatedCurrentAlgebra
) -> ExactMatrix:
    """Send each quotient basis vector to its leading Taylor coefficient in ``model``."""
    if not quotient.ready:
        raise PreconditionError(
            "jet image is not a graded subalgebra; the truncation has not stabilized"
        )
    columns = [
        model.coordinates(v, t) for v, t in zip(quotient.lie_parts, quotient.row_degrees)
    ]
    if not columns:
        return ExactMatrix.zeros(model.dim, 0)
    return ExactMatrix.from_columns(columns, model.dim)


def quotient_certificate(
    algebra: FilteredALiA,
    x0: SpherePoint,
    m: int,
    step: Optional[int] = None,
    max_degree: Optional[int] = None,
) -> QuotientCertificate:
    """Quotient ``A / I_{x0,m}`` together with its verified twisted model."""
    quotient = quotient_by_jet_ideal(algebra, x0, m, step=step, max_degree=max_degree)
    gamma0 = stabilizer(algebra.action, x0).generator.lie_matrix
    model = build(algebra.lie, gamma0, m, zeta=quotient.chart.zeta, nu=quotient.nu0)
    matrix = leading_coefficient_map(quotient, model)
    verified = verify_isomorphism(matrix, quotient.algebra, model.realized) if (
        matrix.ncols == model.dim
    ) else False
    logger.info("quotient at %s, m=%d: dim %d, model dim %d, verified=%s",
                x0, m, quotient.dim, model.dim, verified)
    return QuotientCertificate(quotient, model, matrix, verified)


def leading_coefficient_iso(
    algebra: FilteredALiA,
    x0: SpherePoint,
    m: int,
    step: Optional[int] = None,
    max_degree: Optional[int] = None,
) -> ExactMatrix:
    """Verified isomorphism ``A / I_{x0,m} -> (g ⊗ C[z]/(z^m))^γ0``.

    Raises
    ------
    StabilizationError
        If the quotient dimensions do not settle.
    InconsistencyError
        If the leading-coefficient map is not an isomorphism.
    """
    cert = quotient_certificate(algebra, x0, m, step=step, max_degree=max_degree)
    if not cert.verified:
        raise InconsistencyError(
            f"leading coefficients do not give an isomorphism at {x0}, m={m}"
        )
    return cert.matrix
