"""Finite-dimensional Lie algebras presented by structure constants.

Example usage:
    >>> from alia.liealg import sl2, killing_form, radical
    >>> g = sl2()
    >>> g.bracket_basis(1, 2)   # [e, f]
    {0: CycScalar('1')}
    >>> radical(g).dim
    0
"""

from __future__ import annotations

import logging
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from alia.errors import (
    DimensionMismatchError,
    InconsistencyError,
    PreconditionError,
)
from alia.exactmath import (
    CycScalar,
    EchelonSpan,
    ExactMatrix,
    Vector,
    as_vector,
    common_order,
    kernel_basis,
    span_intersection,
    unit_vector,
    vec_add,
    vec_is_zero,
)

logger = logging.getLogger(__name__)

StructureConstants = Dict[Tuple[int, int], Dict[int, CycScalar]]


class StructLieAlgebra:
    """Lie algebra given by basis labels and sparse structure constants.

    Parameters
    ----------
    labels : sequence of str
        Display names of the basis vectors.
    structure : mapping
        ``{(i, j): {k: c}}`` meaning ``[b_i, b_j] = sum_k c * b_k``. Keys with
        ``i > j`` are folded in by antisymmetry.
    grading : sequence of int, optional
        Integer degree of each basis vector.
    type_label : str, optional
        Cartan type of a simple algebra, e.g. ``"A1"`` or ``"A2"``.
    matrix_basis : sequence of ExactMatrix, optional
        Matrix realization of the basis (used for conjugation actions).
    validate : bool
        Check antisymmetry, Jacobi and grading on construction.
    """

    def __init__(
        self,
        labels: Sequence[str],
        structure: Mapping[Tuple[int, int], Mapping[int, Any]],
        grading: Optional[Sequence[int]] = None,
        type_label: Optional[str] = None,
        matrix_basis: Optional[Sequence[ExactMatrix]] = None,
        validate: bool = True,
    ):
        self.labels: Tuple[str, ...] = tuple(labels)
        self.dim = len(self.labels)
        self.grading: Optional[Tuple[int, ...]] = (
            tuple(int(d) for d in grading) if grading is not None else None
        )
        if self.grading is not None and len(self.grading) != self.dim:
            raise DimensionMismatchError("grading length differs from dimension")
        self.type_label = type_label
        self.matrix_basis: Optional[Tuple[ExactMatrix, ...]] = (
            tuple(matrix_basis) if matrix_basis is not None else None
        )
        self._sc: StructureConstants = {}
        for (i, j), column in structure.items():
            if not (0 <= i < self.dim and 0 <= j < self.dim):
                raise DimensionMismatchError(f"basis index ({i}, {j}) out of range")
            if i == j:
                if any(CycScalar.coerce(c) for c in column.values()):
                    raise PreconditionError(f"[b_{i}, b_{i}] must vanish")
                continue
            sign = 1 if i < j else -1
            key = (min(i, j), max(i, j))
            target = self._sc.setdefault(key, {})
            for k, c in column.items():
                c = CycScalar.coerce(c) * sign
                total = target.get(k, CycScalar.zero()) + c
                if total:
                    target[k] = total
                else:
                    target.pop(k, None)
            if not target:
                del self._sc[key]
        if validate:
            self.validate()

    # -- structure --------------------------------------------------------

    def bracket_basis(self, i: int, j: int) -> Dict[int, CycScalar]:
        """Structure constants of ``[b_i, b_j]`` as a sparse column."""
        if i == j:
            return {}
        if i < j:
            return dict(self._sc.get((i, j), {}))
        return {k: -c for k, c in self._sc.get((j, i), {}).items()}

    def bracket(self, x: Sequence[CycScalar], y: Sequence[CycScalar]) -> Vector:
        return bracket(x, y, self)

    def adjoint(self, x: Sequence[CycScalar]) -> ExactMatrix:
        """Matrix of ad(x) in the basis (columns are images of basis vectors)."""
        columns = [self.bracket(x, unit_vector(self.dim, k)) for k in range(self.dim)]
        return ExactMatrix.from_columns(columns, self.dim)

    def basis_vector(self, i: int) -> Vector:
        return unit_vector(self.dim, i)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def entries(self) -> List[Tuple[int, int, int, CycScalar]]:
        """Nonzero structure constants ``(i, j, k, c)`` with ``i < j``, sorted."""
        out = []
        for (i, j) in sorted(self._sc):
            for k in sorted(self._sc[(i, j)]):
                out.append((i, j, k, self._sc[(i, j)][k]))
        return out

    def field_order(self) -> int:
        return common_order(c for _, _, _, c in self.entries())

    def is_abelian(self) -> bool:
        return not self._sc

    # -- validation -------------------------------------------------------

    def check_jacobi(self) -> bool:
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                for k in range(j + 1, self.dim):
                    ei, ej, ek = (self.basis_vector(t) for t in (i, j, k))
                    total = vec_add(
                        vec_add(
                            self.bracket(ei, self.bracket(ej, ek)),
                            self.bracket(ej, self.bracket(ek, ei)),
                        ),
                        self.bracket(ek, self.bracket(ei, ej)),
                    )
                    if not vec_is_zero(total):
                        logger.debug("Jacobi fails on (%s, %s, %s)", *[self.labels[t] for t in (i, j, k)])
                        return False
        return True

    def check_grading(self) -> bool:
        if self.grading is None:
            return True
        for i, j, k, _ in self.entries():
            if self.grading[k] != self.grading[i] + self.grading[j]:
                return False
        return True

    def validate(self) -> None:
        """Raise InconsistencyError when Jacobi or the grading fails."""
        if not self.check_jacobi():
            raise InconsistencyError("structure constants violate the Jacobi identity")
        if not self.check_grading():
            raise InconsistencyError("structure constants violate the grading")

    # -- matrices ---------------------------------------------------------

    def matrix_coordinates(self, matrix: ExactMatrix) -> Vector:
        """Coordinates of a matrix in the matrix realization of the basis."""
        if self.matrix_basis is None:
            raise PreconditionError("algebra has no matrix realization")
        columns = [_flatten(m) for m in self.matrix_basis]
        system = ExactMatrix.from_columns(columns, len(columns[0]))
        solution = system.solve(_flatten(matrix))
        if solution is None:
            raise PreconditionError("matrix does not lie in the algebra")
        return solution

    def matrix_of(self, x: Sequence[CycScalar]) -> ExactMatrix:
        if self.matrix_basis is None:
            raise PreconditionError("algebra has no matrix realization")
        n = self.matrix_basis[0].nrows
        total = ExactMatrix.zeros(n, n)
        for c, m in zip(x, self.matrix_basis):
            if c:
                total = total + m * c
        return total

    # -- serialization ----------------------------------------------------

    def to_json(self) -> Dict[str, Any]:
        doc: Dict[str, Any] = {
            "dim": self.dim,
            "labels": list(self.labels),
            "field_order": self.field_order(),
            "entries": [[i, j, k, str(c)] for i, j, k, c in self.entries()],
        }
        if self.grading is not None:
            doc["grading"] = list(self.grading)
        if self.type_label is not None:
            doc["type_label"] = self.type_label
        return doc

    @classmethod
    def from_json(cls, doc: Mapping[str, Any], validate: bool = True) -> "StructLieAlgebra":
        labels = list(doc["labels"])
        if int(doc.get("dim", len(labels))) != len(labels):
            raise DimensionMismatchError("dim disagrees with the number of labels")
        order = int(doc.get("field_order", 1))
        structure: Dict[Tuple[int, int], Dict[int, CycScalar]] = {}
        for i, j, k, text in doc.get("entries", []):
            value = CycScalar.parse(str(text), order)
            structure.setdefault((int(i), int(j)), {})[int(k)] = value
        return cls(
            labels,
            structure,
            grading=doc.get("grading"),
            type_label=doc.get("type_label"),
            validate=validate,
        )

    def bracket_table(self) -> str:
        """Human-readable list of the nonzero brackets of basis vectors."""
        lines = []
        for (i, j) in sorted(self._sc):
            terms = format_vector_terms(self._sc[(i, j)], self.labels)
            lines.append(f"[{self.labels[i]}, {self.labels[j]}] = {terms}")
        return "\n".join(lines)

    def __repr__(self) -> str:
        return f"StructLieAlgebra(dim={self.dim}, labels={list(self.labels)!r})"


def format_vector_terms(column: Mapping[int, CycScalar], labels: Sequence[str]) -> str:
    if not column:
        return "0"
    parts = []
    for k in sorted(column):
        c = column[k]
        text = str(c)
        if c == 1:
            parts.append(labels[k])
        elif c == -1:
            parts.append(f"-{labels[k]}")
        elif c.is_rational() or len([x for x in c.coeffs if x]) == 1:
            parts.append(f"{text}*{labels[k]}")
        else:
            parts.append(f"({text})*{labels[k]}")
    return " + ".join(parts).replace("+ -", "- ")


def format_vector(v: Sequence[CycScalar], labels: Sequence[str]) -> str:
    return format_vector_terms({k: c for k, c in enumerate(v) if c}, labels)


def _flatten(m: ExactMatrix) -> Vector:
    return tuple(x for row in m.rows for x in row)


def bracket(x: Sequence[CycScalar], y: Sequence[CycScalar], g: StructLieAlgebra) -> Vector:
    """Bracket of coordinate vectors in ``g``."""
    if len(x) != g.dim or len(y) != g.dim:
        raise DimensionMismatchError(
            f"vectors of length {len(x)}, {len(y)} in an algebra of dimension {g.dim}"
        )
    out = [CycScalar.zero()] * g.dim
    xs = [(i, c) for i, c in enumerate(x) if c]
    ys = [(j, c) for j, c in enumerate(y) if c]
    for i, a in xs:
        for j, b in ys:
            if i == j:
                continue
            column = g.bracket_basis(i, j)
            if not column:
                continue
            ab = a * b
            for k, c in column.items():
                out[k] = out[k] + ab * c
    return tuple(out)


# ---------------------------------------------------------------------------
# Subspaces
# ---------------------------------------------------------------------------


class Subspace:
    """Linear subspace of a Lie algebra, stored as an RREF basis."""

    def __init__(
        self,
        vectors: Iterable[Sequence[CycScalar]],
        ambient_dim: int,
        algebra: Optional[StructLieAlgebra] = None,
    ):
        self.ambient_dim = ambient_dim
        self.algebra = algebra
        rows = [as_vector(v) for v in vectors]
        for v in rows:
            if len(v) != ambient_dim:
                raise DimensionMismatchError("vector length differs from ambient dimension")
        if rows:
            reduced, pivots = ExactMatrix(rows, ambient_dim).rref()
            self.basis: List[Vector] = [reduced.rows[i] for i in range(len(pivots))]
            self.pivots: List[int] = pivots
        else:
            self.basis = []
            self.pivots = []

    @classmethod
    def of(cls, algebra: StructLieAlgebra, vectors: Iterable[Sequence[CycScalar]]) -> "Subspace":
        return cls(vectors, algebra.dim, algebra)

    @classmethod
    def full(cls, algebra: StructLieAlgebra) -> "Subspace":
        return cls([algebra.basis_vector(i) for i in range(algebra.dim)], algebra.dim, algebra)

    @classmethod
    def zero(cls, algebra: StructLieAlgebra) -> "Subspace":
        return cls([], algebra.dim, algebra)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def codim(self) -> int:
        return self.ambient_dim - self.dim

    def contains(self, v: Sequence[CycScalar]) -> bool:
        residue = list(v)
        for row, p in zip(self.basis, self.pivots):
            c = residue[p]
            if c:
                residue = [a - c * b if b else a for a, b in zip(residue, row)]
        return vec_is_zero(residue)

    def __le__(self, other: "Subspace") -> bool:
        return all(other.contains(v) for v in self.basis)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.ambient_dim == other.ambient_dim
            and self.pivots == other.pivots
            and self.basis == other.basis
        )

    def __hash__(self) -> int:
        return hash((self.ambient_dim, tuple(self.basis)))

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace(self.basis + other.basis, self.ambient_dim, self.algebra or other.algebra)

    def intersection(self, other: "Subspace") -> "Subspace":
        return Subspace(
            span_intersection(self.basis, other.basis),
            self.ambient_dim,
            self.algebra or other.algebra,
        )

    def is_ideal(self) -> bool:
        if self.algebra is None:
            raise PreconditionError("subspace is not attached to an algebra")
        return ideal_closure(self).dim == self.dim

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


def _require_algebra(s: Subspace) -> StructLieAlgebra:
    if s.algebra is None:
        raise PreconditionError("subspace is not attached to an algebra")
    return s.algebra


def ideal_closure(s: Subspace) -> Subspace:
    """Smallest ideal containing ``s``."""
    g = _require_algebra(s)
    span = EchelonSpan(g.dim)
    queue: List[Vector] = []
    for v in s.basis:
        if span.add(v):
            queue.append(v)
    while queue:
        v = queue.pop()
        for i in range(g.dim):
            w = g.bracket(g.basis_vector(i), v)
            if not vec_is_zero(w) and span.add(w):
                queue.append(w)
    return Subspace(span.basis(), g.dim, g)


def bracket_span(a: Subspace, b: Subspace) -> Subspace:
    """Span of all brackets ``[x, y]`` with x in a and y in b."""
    g = _require_algebra(a)
    span = EchelonSpan(g.dim)
    for x in a.basis:
        for y in b.basis:
            w = g.bracket(x, y)
            if not vec_is_zero(w):
                span.add(w)
    return Subspace(span.basis(), g.dim, g)


def derived_series(target: Union[StructLieAlgebra, Subspace]) -> List[Subspace]:
    """Derived series ``D_0 = I, D_{k+1} = [D_k, D_k]`` until it stabilizes.

    Raises
    ------
    PreconditionError
        If a Subspace input is not an ideal.
    """
    if isinstance(target, StructLieAlgebra):
        current = Subspace.full(target)
    else:
        current = target
        if not current.is_ideal():
            raise PreconditionError("derived series requested for a non-ideal subspace")
    series = [current]
    while current.dim:
        nxt = bracket_span(current, current)
        if nxt.dim == current.dim:
            break
        series.append(nxt)
        current = nxt
    logger.debug("derived series dims %s", [s.dim for s in series])
    return series


def is_solvable(target: Union[StructLieAlgebra, Subspace]) -> bool:
    return derived_series(target)[-1].dim == 0


def _adjoint_sparse(g: StructLieAlgebra, i: int) -> Dict[Tuple[int, int], CycScalar]:
    out: Dict[Tuple[int, int], CycScalar] = {}
    for k in range(g.dim):
        for l, c in g.bracket_basis(i, k).items():
            out[(l, k)] = c
    return out


def killing_form(g: StructLieAlgebra) -> ExactMatrix:
    """Gram matrix of ``tr(ad x ad y)`` on the basis."""
    ads = [_adjoint_sparse(g, i) for i in range(g.dim)]
    rows = [[CycScalar.zero()] * g.dim for _ in range(g.dim)]
    for i in range(g.dim):
        for j in range(i, g.dim):
            total = CycScalar.zero()
            adj = ads[j]
            for (l, k), c in ads[i].items():
                d = adj.get((k, l))
                if d:
                    total = total + c * d
            rows[i][j] = total
            rows[j][i] = total
    return ExactMatrix(rows, g.dim)


def radical(g: StructLieAlgebra) -> Subspace:
    """Killing-orthogonal complement of the derived algebra (characteristic 0)."""
    derived = bracket_span(Subspace.full(g), Subspace.full(g))
    if derived.dim == 0:
        return Subspace.full(g)
    kappa = killing_form(g)
    constraints = ExactMatrix([kappa.apply(y) for y in derived.basis], g.dim)
    return Subspace(kernel_basis(constraints), g.dim, g)


def center(g: StructLieAlgebra) -> Subspace:
    rows: List[Vector] = []
    for i in range(g.dim):
        rows.extend(g.adjoint(g.basis_vector(i)).rows)
    if not rows:
        return Subspace.full(g)
    return Subspace(kernel_basis(ExactMatrix(rows, g.dim)), g.dim, g)


def quotient(g: StructLieAlgebra, ideal: Subspace) -> Tuple[StructLieAlgebra, List[int]]:
    """Quotient algebra ``g / ideal`` on the non-pivot basis vectors.

    Returns the quotient and the indices of ``g`` whose cosets form its basis.
    The grading is kept when the ideal is spanned by homogeneous vectors.
    """
    if not ideal.is_ideal():
        raise PreconditionError("quotient by a subspace that is not an ideal")
    complement = [c for c in range(g.dim) if c not in set(ideal.pivots)]
    position = {c: n for n, c in enumerate(complement)}

    def reduce(v: Sequence[CycScalar]) -> Dict[int, CycScalar]:
        residue = list(v)
        for row, p in zip(ideal.basis, ideal.pivots):
            c = residue[p]
            if c:
                residue = [a - c * b if b else a for a, b in zip(residue, row)]
        return {position[k]: c for k, c in enumerate(residue) if c}

    structure: Dict[Tuple[int, int], Dict[int, CycScalar]] = {}
    for a, ca in enumerate(complement):
        for b in range(a + 1, len(complement)):
            column = g.bracket_basis(ca, complement[b])
            if not column:
                continue
            v = [CycScalar.zero()] * g.dim
            for k, c in column.items():
                v[k] = c
            reduced = reduce(v)
            if reduced:
                structure[(a, b)] = reduced
    grading = None
    if g.grading is not None and all(
        len({g.grading[k] for k, c in enumerate(row) if c}) <= 1 for row in ideal.basis
    ):
        grading = [g.grading[c] for c in complement]
    q = StructLieAlgebra([g.labels[c] for c in complement], structure, grading=grading)
    logger.debug("quotient of dim %d by ideal of dim %d", g.dim, ideal.dim)
    return q, complement


def verify_isomorphism(f: ExactMatrix, g1: StructLieAlgebra, g2: StructLieAlgebra) -> bool:
    """True iff ``f`` (columns = images of g1's basis) is a Lie isomorphism."""
    if f.shape != (g2.dim, g1.dim):
        raise DimensionMismatchError(
            f"map of shape {f.shape} between algebras of dims {g1.dim} and {g2.dim}"
        )
    if g1.dim != g2.dim or f.rank() != g1.dim:
        return False
    images = f.columns()
    for i in range(g1.dim):
        for j in range(i + 1, g1.dim):
            lhs = f.apply(g1.bracket(g1.basis_vector(i), g1.basis_vector(j)))
            rhs = g2.bracket(images[i], images[j])
            if lhs != rhs:
                logger.debug("bracket of %s and %s not preserved", g1.labels[i], g1.labels[j])
                return False
    return True


def is_automorphism(m: ExactMatrix, g: StructLieAlgebra) -> bool:
    return verify_isomorphism(m, g, g)


def from_matrix_basis(
    labels: Sequence[str],
    matrices: Sequence[ExactMatrix],
    type_label: Optional[str] = None,
    grading: Optional[Sequence[int]] = None,
) -> StructLieAlgebra:
    """Structure constants of a Lie algebra of matrices closed under commutators."""
    if len(labels) != len(matrices):
        raise DimensionMismatchError("one label per matrix required")
    columns = [_flatten(m) for m in matrices]
    system = ExactMatrix.from_columns(columns, len(columns[0]))
    if system.rank() != len(matrices):
        raise PreconditionError("matrix basis is linearly dependent")
    pairs = [(i, j) for i in range(len(matrices)) for j in range(i + 1, len(matrices))]
    commutators = [
        _flatten(matrices[i] @ matrices[j] - matrices[j] @ matrices[i]) for i, j in pairs
    ]
    solutions = system.solve_many(commutators) if commutators else []
    structure: Dict[Tuple[int, int], Dict[int, CycScalar]] = {}
    for (i, j), sol in zip(pairs, solutions):
        if sol is None:
            raise PreconditionError(f"[{labels[i]}, {labels[j]}] leaves the span")
        column = {k: c for k, c in enumerate(sol) if c}
        if column:
            structure[(i, j)] = column
    return StructLieAlgebra(
        labels, structure, grading=grading, type_label=type_label, matrix_basis=matrices
    )


def automorphism_from_generators(
    g: StructLieAlgebra,
    sources: Sequence[Sequence[CycScalar]],
    targets: Sequence[Sequence[CycScalar]],
) -> ExactMatrix:
    """Extend ``sources[i] -> targets[i]`` to an automorphism of ``g``.

    The sources must generate ``g`` as a Lie algebra.

    Raises
    ------
    PreconditionError
        If the sources do not generate or the extension is not an automorphism.
    """
    span = EchelonSpan(g.dim)
    pairs: List[Tuple[Vector, Vector]] = []
    for s, t in zip(sources, targets):
        s, t = as_vector(s), as_vector(t)
        if span.add(s):
            pairs.append((s, t))
    frontier = list(pairs)
    while frontier and span.dim < g.dim:
        new: List[Tuple[Vector, Vector]] = []
        for a, fa in frontier:
            for b, fb in pairs:
                c = g.bracket(a, b)
                if not vec_is_zero(c) and span.add(c):
                    new.append((c, g.bracket(fa, fb)))
        pairs.extend(new)
        frontier = new
    if span.dim < g.dim:
        raise PreconditionError("generators do not generate the algebra")
    src = ExactMatrix.from_columns([p[0] for p in pairs], g.dim)
    dst = ExactMatrix.from_columns([p[1] for p in pairs], g.dim)
    phi = dst @ src.inverse()
    if not is_automorphism(phi, g):
        raise PreconditionError("generator assignment does not extend to an automorphism")
    return phi


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------


def matrix_unit(n: int, i: int, j: int) -> ExactMatrix:
    """The n x n matrix with a single 1 in row i, column j (0-based)."""
    return ExactMatrix(
        [[1 if (r, c) == (i, j) else 0 for c in range(n)] for r in range(n)], n
    )


def sl2() -> StructLieAlgebra:
    """sl(2) in the basis h = diag(1, -1), e = e12, f = e21."""
    h = matrix_unit(2, 0, 0) - matrix_unit(2, 1, 1)
    return from_matrix_basis(
        ["h", "e", "f"], [h, matrix_unit(2, 0, 1), matrix_unit(2, 1, 0)], type_label="A1"
    )


def sl3() -> StructLieAlgebra:
    """sl(3) in a Chevalley basis with the lowest root vector E0 = e31.

    E1 = e12, E2 = e23 are the simple root vectors, F0 = e13, F1 = e21,
    F2 = e32 their transposes, H1 = e11 - e22 and H2 = e22 - e33.
    """
    u = lambda i, j: matrix_unit(3, i - 1, j - 1)  # noqa: E731
    matrices = [
        u(1, 1) - u(2, 2),
        u(2, 2) - u(3, 3),
        u(3, 1),
        u(1, 2),
        u(2, 3),
        u(1, 3),
        u(2, 1),
        u(3, 2),
    ]
    labels = ["H1", "H2", "E0", "E1", "E2", "F0", "F1", "F2"]
    return from_matrix_basis(labels, matrices, type_label="A2")


def special_linear(n: int) -> StructLieAlgebra:
    """sl(n): Cartan elements ``H{i}`` followed by matrix units ``E{i}{j}``."""
    if n == 2:
        return sl2()
    if n == 3:
        return sl3()
    if n < 2:
        raise PreconditionError("sl(n) needs n >= 2")
    labels: List[str] = []
    matrices: List[ExactMatrix] = []
    for i in range(n - 1):
        labels.append(f"H{i + 1}")
        matrices.append(matrix_unit(n, i, i) - matrix_unit(n, i + 1, i + 1))
    for i in range(n):
        for j in range(n):
            if i != j:
                labels.append(f"E{i + 1}{j + 1}")
                matrices.append(matrix_unit(n, i, j))
    return from_matrix_basis(labels, matrices, type_label=f"A{n - 1}")


PRESET_ALGEBRAS = {"sl2": sl2, "sl3": sl3}


def rank_of_type(type_label: Optional[str]) -> Optional[int]:
    """Rank encoded in a Cartan type label such as ``"A2"``."""
    if not type_label or len(type_label) < 2 or not type_label[1:].isdigit():
        return None
    return int(type_label[1:])
