"""Root data, torsion factorization and Kac coordinates.

For a finite-order automorphism γ0 of a simple Lie algebra this module finds
a regular γ0-fixed element, the roots of its centralizer, the factorization
``γ0 = μ g`` into a diagram automorphism and an inner part, and the Kac
coordinates of γ0 together with the affine Weyl word that normalizes them.
The exponents extend additively to the root groupoid; their normalized
coboundary ``omega2`` records the carries of the twisted bracket, and
:func:`local_structure_algebra` rebuilds the twisted truncated current
algebra from this data alone.

Example usage:
    >>> from alia.presets import load_preset
    >>> cfg = load_preset("sl3-d6-a")
    >>> report = kac_report_for_config(cfg)
    >>> report.raw, report.weyl_word_text, report.s
    ((4, 1), 'σ1σ0', (1, 1))
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from alia.errors import InconsistencyError, PreconditionError
from alia.exactmath import (
    CycScalar,
    ExactMatrix,
    Vector,
    eigenprojectors,
    kernel_basis,
    root_exponent,
    span_intersection,
    sqrt_in_field,
    unit_vector,
    vec_add,
    vec_is_zero,
    vec_scale,
)
from alia.liealg import (
    StructLieAlgebra,
    automorphism_from_generators,
    killing_form,
    rank_of_type,
    verify_isomorphism,
)

logger = logging.getLogger(__name__)

SEARCH_BUDGET = 200
MAX_NORM = 512

Key = Tuple[int, ...]


# ---------------------------------------------------------------------------
# Small helpers
# ---------------------------------------------------------------------------


def _echelon(vectors: Sequence[Vector], dim: int) -> List[Vector]:
    if not vectors:
        return []
    reduced, pivots = ExactMatrix(list(vectors), dim).rref()
    return [reduced.rows[i] for i in range(len(pivots))]


def _ratio(image: Sequence[CycScalar], v: Sequence[CycScalar]) -> Optional[CycScalar]:
    """The scalar c with ``image == c * v``, or None."""
    pivot = next(i for i, x in enumerate(v) if x)
    c = image[pivot] / v[pivot]
    return c if tuple(image) == vec_scale(c, v) else None


def _as_int(c: CycScalar) -> Optional[int]:
    if not c.is_rational():
        return None
    q = c.to_fraction()
    return q.numerator if q.denominator == 1 else None


def _form(kappa: ExactMatrix, x: Sequence[CycScalar], y: Sequence[CycScalar]) -> CycScalar:
    total = CycScalar.zero()
    for a, row in zip(x, kappa.rows):
        if a:
            for b, k in zip(y, row):
                if b and k:
                    total = total + a * b * k
    return total


def _weighted_tuples(length: int, weight: int) -> Iterator[Tuple[int, ...]]:
    if length == 0:
        if weight == 0:
            yield ()
        return
    for a in range(-2, 3):
        if abs(a) <= weight:
            for rest in _weighted_tuples(length - 1, weight - abs(a)):
                yield (a,) + rest


def small_combinations(length: int, budget: int = SEARCH_BUDGET) -> Iterator[Tuple[int, ...]]:
    """Nonzero coefficient tuples in [-2, 2], smallest total weight first."""
    produced = 0
    for weight in range(1, 2 * length + 1):
        batch = sorted(
            _weighted_tuples(length, weight),
            key=lambda c: (tuple(-abs(x) for x in c), tuple(-x for x in c)),
        )
        for c in batch:
            if produced >= budget:
                return
            produced += 1
            yield c


def _combine(coeffs: Sequence[int], basis: Sequence[Vector], dim: int) -> Vector:
    out: Vector = tuple(CycScalar.zero() for _ in range(dim))
    for c, v in zip(coeffs, basis):
        if c:
            out = vec_add(out, vec_scale(c, v))
    return out


def integer_eigenspaces(
    op: ExactMatrix, basis: Sequence[Vector], bound: int
) -> Optional[Dict[int, List[Vector]]]:
    """Split ``span(basis)`` into eigenspaces of ``op`` with integer eigenvalues.

    Returns None when eigenvalues in ``[-bound, bound]`` do not exhaust the span.
    """
    n = op.nrows
    if not basis:
        return {}
    frame = ExactMatrix.from_columns(list(basis), n)
    out: Dict[int, List[Vector]] = {}
    found = 0
    for k in sorted(range(-bound, bound + 1), key=lambda k: (abs(k), -k)):
        shifted = op - ExactMatrix.identity(n) * k
        coeffs = kernel_basis(shifted @ frame)
        if coeffs:
            out[k] = _echelon([frame.apply(c) for c in coeffs], n)
            found += len(coeffs)
            if found == len(basis):
                return dict(sorted(out.items()))
    return None


# ---------------------------------------------------------------------------
# Regular elements and roots
# ---------------------------------------------------------------------------


@dataclass
class ScaledElement:
    """``x / s`` with ``ad(x / s)`` diagonalizable over the integers."""

    vector: Vector
    adjoint: ExactMatrix
    eigenspaces: Dict[int, List[Vector]]
    norm: int


def integral_scaling(
    lie: StructLieAlgebra,
    x: Sequence[CycScalar],
    kappa: Optional[ExactMatrix] = None,
    max_norm: int = MAX_NORM,
) -> Optional[ScaledElement]:
    """Rescale ``x`` so that ad has integer eigenvalues, if possible.

    Candidates ``x' = x / s`` have Killing norm ``S = κ(x', x')`` for
    S = 1, 2, ... and ``s = sqrt(κ(x, x) / S)`` in a cyclotomic field.
    """
    kappa = kappa if kappa is not None else killing_form(lie)
    norm = _form(kappa, x, x)
    if norm.is_zero() or not norm.is_rational():
        return None
    q = norm.to_fraction()
    ad = lie.adjoint(x)
    ad2 = ad @ ad
    t4 = (ad2 @ ad2).trace()
    if not t4.is_rational():
        return None
    t4q = t4.to_fraction()
    identity_basis = [unit_vector(lie.dim, i) for i in range(lie.dim)]
    for big_s in range(1, max_norm + 1):
        # tr(ad x'^4) = tr(ad x^4) * S^2 / κ(x,x)^2 must be an integer
        if (t4q * big_s * big_s / (q * q)).denominator != 1:
            continue
        s = sqrt_in_field(q / big_s)
        inv = s.inverse()
        ad_s = ad * inv
        spaces = integer_eigenspaces(ad_s, identity_basis, math.isqrt(big_s))
        if spaces is not None:
            logger.debug("integral scaling found with Killing norm %d", big_s)
            return ScaledElement(vec_scale(inv, x), ad_s, spaces, big_s)
    return None


def regular_fixed_element(
    lie: StructLieAlgebra, gamma0: ExactMatrix, budget: int = SEARCH_BUDGET
) -> ScaledElement:
    """A regular semisimple element of ``g^γ0`` with integral adjoint spectrum.

    Raises
    ------
    PreconditionError
        If the algebra has no known rank or no candidate succeeds.
    """
    rank = rank_of_type(lie.type_label)
    if rank is None:
        raise PreconditionError(f"unsupported Lie algebra type {lie.type_label!r}")
    fixed = kernel_basis(gamma0 - ExactMatrix.identity(lie.dim))
    if not fixed:
        raise PreconditionError("gamma0 has no fixed vectors")
    kappa = killing_form(lie)
    tried = 0
    for coeffs in small_combinations(len(fixed), budget):
        tried += 1
        x = _combine(coeffs, fixed, lie.dim)
        if len(kernel_basis(lie.adjoint(x))) != rank:
            continue
        scaled = integral_scaling(lie, x, kappa)
        if scaled is not None:
            logger.info("regular fixed element found after %d candidates", tried)
            return scaled
    raise PreconditionError(
        f"no regular fixed element among {tried} candidates of the fixed space"
        f" (dimension {len(fixed)})"
    )


@dataclass(frozen=True)
class Root:
    values: Tuple[int, ...]
    vector: Vector

    @property
    def positive(self) -> bool:
        return self.values[0] > 0


@dataclass
class RootDatum:
    """Roots of the centralizer of a regular element.

    ``values`` of a root are its (integer) values on ``csa_basis``; the first
    basis element is the regular element itself and decides positivity.
    """

    type_label: str
    rank: int
    csa_basis: List[Vector]
    cartan: List[Vector]
    roots: List[Root]
    simple: List[int]
    highest: int

    def index_of(self, values: Sequence[int]) -> Optional[int]:
        values = tuple(values)
        return next((i for i, r in enumerate(self.roots) if r.values == values), None)

    def negative_of(self, i: int) -> int:
        j = self.index_of(tuple(-v for v in self.roots[i].values))
        if j is None:
            raise InconsistencyError("root system is not symmetric")
        return j

    @property
    def lowest(self) -> int:
        return self.negative_of(self.highest)

    def positive_roots(self) -> List[int]:
        return [i for i, r in enumerate(self.roots) if r.positive]


def csa_roots(
    lie: StructLieAlgebra, regular: ScaledElement, budget: int = SEARCH_BUDGET
) -> RootDatum:
    """Joint eigen-decomposition of g under the centralizer of ``regular``."""
    rank = rank_of_type(lie.type_label)
    cartan = regular.eigenspaces.get(0, [])
    if rank is None or len(cartan) != rank:
        raise InconsistencyError("centralizer of the regular element has the wrong dimension")
    blocks: List[Tuple[Tuple[int, ...], List[Vector]]] = [
        ((k,), vecs) for k, vecs in regular.eigenspaces.items() if k != 0
    ]
    csa_basis = [regular.vector]
    kappa = killing_form(lie)
    candidates = small_combinations(len(cartan), budget)
    while any(len(vecs) > 1 for _, vecs in blocks):
        coeffs = next(candidates, None)
        if coeffs is None:
            raise InconsistencyError("root spaces could not be separated")
        scaled = integral_scaling(lie, _combine(coeffs, cartan, lie.dim), kappa)
        if scaled is None:
            continue
        refined: List[Tuple[Tuple[int, ...], List[Vector]]] = []
        for values, vecs in blocks:
            for k, space in scaled.eigenspaces.items():
                common = span_intersection(vecs, space)
                if common:
                    refined.append((values + (k,), common))
        if sum(len(v) for _, v in refined) != sum(len(v) for _, v in blocks):
            raise InconsistencyError("refinement lost dimensions")
        if len(refined) > len(blocks):
            blocks = refined
            csa_basis.append(scaled.vector)
    # complete csa_basis to a basis of the Cartan subalgebra
    while len(_echelon(csa_basis, lie.dim)) < rank:
        coeffs = next(candidates, None)
        if coeffs is None:
            raise InconsistencyError("Cartan subalgebra basis could not be completed")
        scaled = integral_scaling(lie, _combine(coeffs, cartan, lie.dim), kappa)
        if scaled is not None and len(_echelon(csa_basis + [scaled.vector], lie.dim)) > len(
            _echelon(csa_basis, lie.dim)
        ):
            csa_basis.append(scaled.vector)
    adjoints = [lie.adjoint(h) for h in csa_basis]
    roots = []
    for _, vecs in blocks:
        values = tuple(_as_int(_ratio(ad.apply(vecs[0]), vecs[0])) for ad in adjoints)
        if any(v is None for v in values):
            raise InconsistencyError("root values are not integral")
        roots.append(Root(values, vecs[0]))
    roots.sort(key=lambda r: r.values)
    if len(roots) != lie.dim - rank:
        raise InconsistencyError(f"found {len(roots)} roots, expected {lie.dim - rank}")
    positives = {r.values for r in roots if r.positive}
    simple = [
        i for i, r in enumerate(roots)
        if r.positive and not any(
            tuple(a - b for a, b in zip(r.values, p)) in positives for p in positives
        )
    ]
    if len(simple) != rank:
        raise InconsistencyError(f"found {len(simple)} simple roots, expected rank {rank}")
    highest = max((i for i, r in enumerate(roots) if r.positive), key=lambda i: roots[i].values[0])
    logger.debug("root datum: %d roots, simple %s", len(roots), [roots[i].values for i in simple])
    return RootDatum(lie.type_label or "", rank, csa_basis, cartan, roots, simple, highest)


# ---------------------------------------------------------------------------
# Torsion factorization and the affine diagram
# ---------------------------------------------------------------------------


def _coroot(lie: StructLieAlgebra, e: Vector, f: Vector) -> Vector:
    """``H`` proportional to ``[e, f]`` with ``[H, e] = 2 e``."""
    h = lie.bracket(e, f)
    lam = _ratio(lie.bracket(h, e), e) if not vec_is_zero(h) else None
    if lam is None or lam.is_zero():
        raise InconsistencyError("root vectors do not span an sl2-triple")
    return vec_scale(CycScalar.rational(2) / lam, h)


def _eigen_exponent(op: ExactMatrix, v: Vector, zeta: CycScalar, nu0: int, what: str) -> int:
    c = _ratio(op.apply(v), v)
    k = root_exponent(c, zeta, nu0) if c is not None else None
    if k is None:
        raise InconsistencyError(f"{what} is not an eigenvector with a root-of-unity eigenvalue")
    return k


@dataclass
class TorsionFactorization:
    """``γ0 = μ g`` with μ a diagram automorphism and g inner.

    ``nodes`` are the generators ``E_0, ..., E_l`` (simple root vectors of the
    affine diagram); ``special`` is the index of the lowest root vector among
    them. ``exponents`` are the raw γ0-exponents of the nodes.
    """

    gamma0: ExactMatrix
    nu0: int
    zeta: CycScalar
    mu: ExactMatrix
    mu_perm: Tuple[int, ...]
    r: int
    inner: ExactMatrix
    simple_exponents: Tuple[int, ...]
    nodes: List[Vector]
    partners: List[Vector]
    coroots: List[Vector]
    levels: Tuple[int, ...]
    cartan: List[List[int]]
    marks: Tuple[int, ...]
    special: int
    exponents: Tuple[int, ...]
    affine_type: str

    @property
    def ell(self) -> int:
        return len(self.nodes) - 1


def _affine_marks(cartan: List[List[int]]) -> Tuple[int, ...]:
    kernel = kernel_basis(ExactMatrix(cartan))
    if len(kernel) != 1:
        raise InconsistencyError("affine Cartan matrix must have a one-dimensional kernel")
    v = [c.to_fraction() for c in kernel[0]]
    denominator = math.lcm(*(x.denominator for x in v))
    ints = [int(x * denominator) for x in v]
    g = math.gcd(*ints)
    ints = [x // g for x in ints]
    if ints[0] < 0:
        ints = [-x for x in ints]
    if any(x <= 0 for x in ints):
        raise InconsistencyError(f"marks {ints} are not positive")
    return tuple(ints)


def factor_torsion(
    lie: StructLieAlgebra,
    datum: RootDatum,
    gamma0: ExactMatrix,
    nu0: int,
    zeta: Optional[CycScalar] = None,
) -> TorsionFactorization:
    """Factor γ0 into a diagram automorphism and an inner torsion.

    Parameters
    ----------
    lie : StructLieAlgebra
        A simple Lie algebra.
    datum : RootDatum
        Roots of a γ0-fixed regular element.
    gamma0 : ExactMatrix
        The torsion, of order ``nu0``.
    zeta : CycScalar, optional
        Primitive ``nu0``-th root of unity in which exponents are measured.
    """
    zeta = zeta if zeta is not None else CycScalar.zeta(nu0)
    rank = datum.rank
    e_vecs = [datum.roots[i].vector for i in datum.simple]
    f_vecs = [datum.roots[datum.negative_of(i)].vector for i in datum.simple]
    # rescale F so that [E, F] is a coroot
    for i in range(rank):
        h = lie.bracket(e_vecs[i], f_vecs[i])
        lam = _ratio(lie.bracket(h, e_vecs[i]), e_vecs[i])
        if lam is None or lam.is_zero():
            raise InconsistencyError("simple root vectors do not form sl2-triples")
        f_vecs[i] = vec_scale(CycScalar.rational(2) / lam, f_vecs[i])
    coroots = [lie.bracket(e, f) for e, f in zip(e_vecs, f_vecs)]
    finite_cartan = [
        [_as_int(_ratio(lie.bracket(coroots[i], e_vecs[j]), e_vecs[j])) for j in range(rank)]
        for i in range(rank)
    ]

    perm: List[int] = []
    for e in e_vecs:
        image = gamma0.apply(e)
        j = next((j for j, t in enumerate(e_vecs) if _ratio(image, t) is not None), None)
        if j is None:
            raise InconsistencyError("gamma0 does not permute the simple root spaces")
        perm.append(j)
    if any(finite_cartan[perm[i]][perm[j]] != finite_cartan[i][j]
           for i in range(rank) for j in range(rank)):
        raise InconsistencyError(f"induced permutation {perm} is not a diagram automorphism")
    r = 1
    current = list(perm)
    while current != list(range(rank)):
        current = [perm[c] for c in current]
        r += 1
    if r > 2:
        raise PreconditionError(f"diagram automorphisms of order {r} are not supported")
    if r == 2 and datum.type_label != "A2":
        raise PreconditionError(f"twisted type {datum.type_label}^(2) is not supported")

    low = datum.roots[datum.lowest].vector
    high = datum.roots[datum.highest].vector
    identity = ExactMatrix.identity(lie.dim)
    if r == 1:
        mu = identity
    else:
        i1 = next(i for i in range(rank) if perm[i] != i)
        i2 = perm[i1]
        lam = _ratio(gamma0.apply(gamma0.apply(e_vecs[i1])), e_vecs[i1])
        k = root_exponent(lam, zeta, nu0) if lam is not None else None
        if k is None:
            raise InconsistencyError("gamma0 squared does not scale the simple root vector")
        options = [s for s in range(nu0) if (2 * s) % nu0 == k]
        if not options:
            raise InconsistencyError("no square root of the exponent of gamma0 squared")
        best = None
        for s in options:
            c = zeta ** s
            e2 = vec_scale(c.inverse(), gamma0.apply(e_vecs[i1]))
            f2 = vec_scale(c, gamma0.apply(f_vecs[i1]))
            mu_s = automorphism_from_generators(
                lie, [e_vecs[i1], e2, f_vecs[i1], f2], [e2, e_vecs[i1], f2, f_vecs[i1]]
            )
            g = mu_s.inverse() @ gamma0
            eigen = {_ratio(g.apply(v), v) for v in (low, e_vecs[i1], e2)}
            score = (len(eigen), s)
            if best is None or score < best[0]:
                best = (score, s, mu_s, e2, f2)
        assert best is not None
        _, s_choice, mu, e_vecs[i2], f_vecs[i2] = best
        coroots[i2] = lie.bracket(e_vecs[i2], f_vecs[i2])
        logger.debug("outer factor fixed with square root exponent %d", s_choice)
    inner = mu.inverse() @ gamma0
    if mu @ inner != gamma0 or mu @ inner != inner @ mu:
        raise InconsistencyError("gamma0 = mu g with commuting factors failed")
    simple_exponents = tuple(
        _eigen_exponent(inner, e, zeta, nu0, "simple root vector") for e in e_vecs
    )

    if r == 1:
        nodes = [low] + e_vecs
        partners = [high] + f_vecs
        special = 0
    else:
        i1 = next(i for i in range(rank) if perm[i] != i)
        i2 = perm[i1]
        nodes = [vec_add(e_vecs[i1], e_vecs[i2]), low]
        partners = [vec_add(f_vecs[i1], f_vecs[i2]), high]
        special = 1
    node_coroots = [_coroot(lie, e, f) for e, f in zip(nodes, partners)]
    cartan: List[List[int]] = []
    for i in range(len(nodes)):
        row = []
        for j in range(len(nodes)):
            c = _ratio(lie.bracket(node_coroots[i], nodes[j]), nodes[j])
            value = _as_int(c) if c is not None else None
            if value is None:
                raise InconsistencyError("affine Cartan matrix entry is not an integer")
            row.append(value)
        cartan.append(row)
    marks = _affine_marks(cartan)
    levels = tuple(
        0 if r == 1 else _eigen_exponent(mu, v, CycScalar.rational(-1), 2, "node vector")
        for v in nodes
    )
    exponents = tuple(_eigen_exponent(gamma0, v, zeta, nu0, "node vector") for v in nodes)
    if (r * sum(a * s for a, s in zip(marks, exponents))) % nu0:
        raise InconsistencyError(f"raw exponents {exponents} violate the affine relation")
    affine_type = f"{datum.type_label}^({r})"
    logger.info("torsion of order %d: type %s, raw exponents %s", nu0, affine_type, exponents)
    return TorsionFactorization(
        gamma0, nu0, zeta, mu, tuple(perm), r, inner, simple_exponents, nodes, partners,
        node_coroots, levels, cartan, marks, special, exponents, affine_type,
    )


# ---------------------------------------------------------------------------
# Kac coordinates
# ---------------------------------------------------------------------------

MAX_ORBIT = 20000


@dataclass
class KacCoordinates:
    """Normalized exponents ``s`` with ``r * Σ a_i s_i = ν0`` and ``gcd(s) = 1``.

    ``word`` lists the affine reflections in the order they were applied to
    the raw exponents.
    """

    s: Tuple[int, ...]
    marks: Tuple[int, ...]
    r: int
    nu0: int
    raw: Tuple[int, ...]
    word: Tuple[int, ...]

    @property
    def word_text(self) -> str:
        return weyl_word_text(self.word)


def affine_reflection(
    s: Sequence[int], j: int, cartan: Sequence[Sequence[int]], nu0: int
) -> Tuple[int, ...]:
    """Exponents after the simple affine reflection at node ``j``."""
    out = []
    for t, value in enumerate(s):
        if t == j:
            out.append((-s[j]) % nu0)
        else:
            out.append((value - cartan[j][t] * s[j]) % nu0)
    return tuple(out)


def replay_weyl_word(
    s: Sequence[int], word: Sequence[int], cartan: Sequence[Sequence[int]], nu0: int
) -> Tuple[int, ...]:
    current = tuple(x % nu0 for x in s)
    for j in word:
        current = affine_reflection(current, j, cartan, nu0)
    return current


def is_kac_normalized(s: Sequence[int], marks: Sequence[int], r: int, nu0: int) -> bool:
    return (
        all(x >= 0 for x in s)
        and r * sum(a * x for a, x in zip(marks, s)) == nu0
        and math.gcd(*s) == 1
    )


def weyl_word_text(word: Sequence[int]) -> str:
    """Composition notation: the first reflection applied is written last."""
    if not word:
        return "1"
    return "".join(f"σ{j}" for j in reversed(word))


def normalize_exponents(
    raw: Sequence[int],
    cartan: Sequence[Sequence[int]],
    marks: Sequence[int],
    r: int,
    nu0: int,
    special: int = 0,
) -> KacCoordinates:
    """Breadth-first search of the affine Weyl orbit for Kac coordinates.

    Nodes are tried in increasing order, so the word found is the shortest,
    lexicographically first.

    Raises
    ------
    PreconditionError
        If no normalized representative appears in the orbit.
    """
    raw = tuple(x % nu0 for x in raw)
    if nu0 == 1:
        s = tuple(1 if i == special else 0 for i in range(len(raw)))
        return KacCoordinates(s, tuple(marks), r, nu0, raw, ())
    seen = {raw: ()}
    queue = deque([raw])
    while queue:
        current = queue.popleft()
        word = seen[current]
        if is_kac_normalized(current, marks, r, nu0):
            logger.debug("Kac coordinates %s reached by %s", current, weyl_word_text(word))
            return KacCoordinates(current, tuple(marks), r, nu0, raw, word)
        for j in range(len(raw)):
            nxt = affine_reflection(current, j, cartan, nu0)
            if nxt not in seen:
                if len(seen) >= MAX_ORBIT:
                    raise PreconditionError(
                        f"affine Weyl orbit of {raw} exceeds {MAX_ORBIT} states"
                    )
                seen[nxt] = word + (j,)
                queue.append(nxt)
    raise PreconditionError(f"no Kac-normalized exponents in the orbit of {raw}")


def kac_coordinates(fact: TorsionFactorization) -> KacCoordinates:
    return normalize_exponents(
        fact.exponents, fact.cartan, fact.marks, fact.r, fact.nu0, fact.special
    )


def diagram_symmetries(cartan: Sequence[Sequence[int]]) -> List[Tuple[int, ...]]:
    """Node permutations preserving the affine Cartan matrix."""
    n = len(cartan)
    return [
        perm for perm in itertools.permutations(range(n))
        if all(cartan[perm[i]][perm[j]] == cartan[i][j] for i in range(n) for j in range(n))
    ]


def canonical_coordinates(
    s: Sequence[int], cartan: Sequence[Sequence[int]]
) -> Tuple[Tuple[int, ...], bool]:
    """Lexicographically least image of ``s`` under the diagram symmetries."""
    s = tuple(s)
    best = min(tuple(s[perm[i]] for i in range(len(s))) for perm in diagram_symmetries(cartan))
    return best, best != s


# ---------------------------------------------------------------------------
# The affine root groupoid
# ---------------------------------------------------------------------------


@dataclass
class GroupoidElement:
    """A class of affine roots modulo ``r δ`` with its root space in g.

    ``kind`` is ``"zero"``, ``"real"`` or ``"imaginary"``.
    """

    key: Key
    name: str
    level: int
    weights: Tuple[int, ...]
    kind: str
    vectors: List[Vector]
    representative: Key = ()

    @property
    def multiplicity(self) -> int:
        return len(self.vectors)


def _term(c: int, label: str) -> str:
    if c == 1:
        return label
    if c == -1:
        return f"-{label}"
    return f"{c}{label}"


def format_affine_root(n: Sequence[int], marks: Sequence[int]) -> str:
    if not any(n):
        return "0"
    if tuple(n) == tuple(marks):
        return "δ"
    text = ""
    for i, c in enumerate(n):
        if c:
            term = _term(c, f"α{i}")
            text += term if not text or term.startswith("-") else f"+{term}"
    return text


@dataclass
class AffineRootGroupoid:
    """Affine roots of a torsion modulo ``r δ`` with partial addition.

    Two elements compose when the class of their sum is again an element.
    """

    cartan: List[List[int]]
    marks: Tuple[int, ...]
    r: int
    special: int
    elements: List[GroupoidElement]

    def __post_init__(self) -> None:
        self._index = {e.key: i for i, e in enumerate(self.elements)}
        self._names = {e.name: e.key for e in self.elements}

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def zero(self) -> Key:
        return tuple(0 for _ in self.marks)

    def reduce(self, n: Sequence[int]) -> Key:
        k = n[self.special] // self.r
        return tuple(x - k * self.r * a for x, a in zip(n, self.marks))

    def position(self, key: Key) -> int:
        return self._index[key]

    def element(self, key: Key) -> GroupoidElement:
        return self.elements[self._index[key]]

    def key_of(self, name: str) -> Key:
        if name not in self._names:
            raise PreconditionError(f"unknown groupoid element {name!r}")
        return self._names[name]

    def add(self, a: Key, b: Key) -> Optional[Key]:
        total = self.reduce(tuple(x + y for x, y in zip(a, b)))
        return total if total in self._index else None

    def name(self, key: Key) -> str:
        return self.element(key).name

    def composable_pairs(self) -> List[Tuple[Key, Key, Key]]:
        """Unordered pairs ``{α, β}`` (α = β allowed) whose sum is an element."""
        out = []
        for i, a in enumerate(self.elements):
            for b in self.elements[i:]:
                total = self.add(a.key, b.key)
                if total is not None:
                    out.append((a.key, b.key, total))
        return out


def _representative(n: Key, marks: Sequence[int], r: int) -> Key:
    """Representative of ``n + Z r δ`` used for display."""
    if r == 1:
        # shortest, then fewest negative coefficients
        span = max(abs(x) for x in n) + 1
        return min(
            (tuple(x + k * a for x, a in zip(n, marks)) for k in range(-span, span + 1)),
            key=lambda v: (sum(abs(x) for x in v), sum(1 for x in v if x < 0), tuple(-x for x in v)),
        )
    step = tuple(r * a for a in marks)
    k = max(-(x // s) for x, s in zip(n, step))
    return tuple(x + k * s for x, s in zip(n, step))


def _weight_bound(adjoint: ExactMatrix) -> int:
    square = (adjoint @ adjoint).trace()
    if not square.is_rational():
        raise InconsistencyError("coroot has a non-rational Killing norm")
    return math.isqrt(max(0, int(square.to_fraction()))) + 1


def root_groupoid(lie: StructLieAlgebra, fact: TorsionFactorization) -> AffineRootGroupoid:
    """Decompose g into affine root spaces modulo ``r δ``.

    Raises
    ------
    InconsistencyError
        If a root space has the wrong multiplicity.
    """
    p, r, ell = fact.special, fact.r, fact.ell
    others = [i for i in range(ell + 1) if i != p]
    if r == 1:
        level_blocks = {0: [unit_vector(lie.dim, i) for i in range(lie.dim)]}
    else:
        if fact.levels[p] != 1 or any(fact.levels[i] for i in others):
            raise InconsistencyError(f"unexpected node levels {fact.levels}")
        projectors = eigenprojectors(fact.mu, 2, CycScalar.rational(-1))
        level_blocks = {k: proj.column_space() for k, proj in enumerate(projectors)}
    blocks: List[Tuple[int, Tuple[int, ...], List[Vector]]] = [
        (level, (), vecs) for level, vecs in level_blocks.items() if vecs
    ]
    for i in others:
        ad = lie.adjoint(fact.coroots[i])
        bound = _weight_bound(ad)
        refined = []
        for level, weights, vecs in blocks:
            spaces = integer_eigenspaces(ad, vecs, bound)
            if spaces is None:
                raise InconsistencyError("coroot is not diagonalizable with integer spectrum")
            refined.extend((level, weights + (k,), space) for k, space in spaces.items())
        blocks = refined

    reduced_cartan = ExactMatrix([[fact.cartan[i][j] for j in others] for i in others])
    # imaginary classes are the multiples of δ below r δ
    imaginary = {tuple(k * a for a in fact.marks) for k in range(1, r)}
    proto: Dict[Key, Tuple[int, Tuple[int, ...], List[Vector]]] = {}
    for level, weights, vecs in blocks:
        n_p = level if r > 1 else 0
        rhs = [CycScalar.rational(w - fact.cartan[i][p] * n_p) for w, i in zip(weights, others)]
        solution = reduced_cartan.solve(rhs) if others else ()
        coords = [_as_int(c) for c in solution] if solution is not None else [None]
        if any(c is None for c in coords):
            raise InconsistencyError(f"weights {weights} are not in the root lattice")
        n = [0] * (ell + 1)
        n[p] = n_p
        for i, c in zip(others, coords):
            n[i] = c
        k = n[p] // r
        key = tuple(x - k * r * a for x, a in zip(n, fact.marks))
        if key in proto:
            raise InconsistencyError(f"affine root {key} occurs twice")
        proto[key] = (level, weights, vecs)

    zero = tuple(0 for _ in fact.marks)
    rank = rank_of_type(lie.type_label) or 0
    elements: List[GroupoidElement] = []
    for key, (level, weights, vecs) in proto.items():
        if key == zero:
            kind, expected = "zero", ell
        elif key in imaginary:
            kind, expected = "imaginary", (rank - ell) // (r - 1)
        else:
            kind, expected = "real", 1
        if len(vecs) != expected:
            raise InconsistencyError(
                f"{kind} root {key} has multiplicity {len(vecs)}, expected {expected}"
            )
        rep = _representative(key, fact.marks, r)
        name = format_affine_root(rep, fact.marks)
        elements.append(GroupoidElement(key, name, level, weights, kind, vecs, rep))
    if sum(e.multiplicity for e in elements) != lie.dim:
        raise InconsistencyError("root spaces do not exhaust the Lie algebra")

    def order_key(e: GroupoidElement) -> Tuple[Any, ...]:
        if e.key == zero:
            return (0,)
        if r == 1:
            rep = e.representative
            lead = next(i for i, x in enumerate(rep) if x)
            return (1, sum(abs(x) for x in rep), lead, rep[lead] < 0, rep)
        weight = [Fraction(sum(x * fact.cartan[i][j] for j, x in enumerate(e.key)), 2)
                  for i in others]
        return (1, e.level, weight, e.key)

    elements.sort(key=order_key)
    logger.info("root groupoid with %d elements", len(elements))
    return AffineRootGroupoid(fact.cartan, fact.marks, r, p, elements)


# ---------------------------------------------------------------------------
# Exponent cochains
# ---------------------------------------------------------------------------


def omega1(groupoid: AffineRootGroupoid, s: Sequence[int], nu0: int) -> Dict[Key, int]:
    """Exponent ``Σ n_i s_i mod ν0`` of every groupoid element."""
    return {
        e.key: sum(n * x for n, x in zip(e.key, s)) % nu0 for e in groupoid.elements
    }


def omega2(
    groupoid: AffineRootGroupoid, w1: Mapping[Key, int], nu0: int
) -> Dict[Tuple[Key, Key], int]:
    """Carry ``(ω1 α + ω1 β - ω1(α + β)) / ν0`` of every composable pair.

    Raises
    ------
    InconsistencyError
        If a carry is outside ``{0, 1}``.
    """
    out: Dict[Tuple[Key, Key], int] = {}
    for a, b, total in groupoid.composable_pairs():
        carry, rest = divmod(w1[a] + w1[b] - w1[total], nu0)
        if rest or carry not in (0, 1):
            raise InconsistencyError(
                f"carry of ({groupoid.name(a)}, {groupoid.name(b)}) is not 0 or 1"
            )
        out[(a, b)] = carry
    return out


def omega2_value(
    groupoid: AffineRootGroupoid, w2: Mapping[Tuple[Key, Key], int], a: Key, b: Key
) -> int:
    if groupoid.add(a, b) is None:
        raise PreconditionError(f"{groupoid.name(a)} and {groupoid.name(b)} do not compose")
    pa, pb = groupoid.position(a), groupoid.position(b)
    return w2[(a, b) if pa <= pb else (b, a)]


def cocycle_check(groupoid: AffineRootGroupoid, w2: Mapping[Tuple[Key, Key], int]) -> bool:
    """``ω2(α, β) + ω2(α + β, γ) = ω2(β, γ) + ω2(α, β + γ)`` on composable triples."""
    keys = [e.key for e in groupoid.elements]
    for a in keys:
        for b in keys:
            ab = groupoid.add(a, b)
            if ab is None:
                continue
            for c in keys:
                bc = groupoid.add(b, c)
                if bc is None or groupoid.add(ab, c) is None:
                    continue
                lhs = omega2_value(groupoid, w2, a, b) + omega2_value(groupoid, w2, ab, c)
                rhs = omega2_value(groupoid, w2, b, c) + omega2_value(groupoid, w2, a, bc)
                if lhs != rhs:
                    return False
    return True


def omega2_edges(
    groupoid: AffineRootGroupoid, w2: Mapping[Tuple[Key, Key], int]
) -> List[Tuple[str, str]]:
    return [(groupoid.name(a), groupoid.name(b)) for (a, b), v in w2.items() if v]


def omega2_dot(
    groupoid: AffineRootGroupoid, w2: Mapping[Tuple[Key, Key], int], title: str = "omega2"
) -> str:
    """Undirected graph of the pairs with carry 1, in Graphviz syntax."""
    lines = [f'graph "{title}" {{']
    for e in groupoid.elements:
        lines.append(f'  "{e.name}";')
    for a, b in omega2_edges(groupoid, w2):
        lines.append(f'  "{a}" -- "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Local structure algebra
# ---------------------------------------------------------------------------


def root_space_constants(
    lie: StructLieAlgebra, groupoid: AffineRootGroupoid
) -> Dict[Tuple[Key, int, Key, int], Dict[int, CycScalar]]:
    """Structure constants ``C`` of g in the root-space frames of the groupoid.

    ``[A_(α,u), A_(β,v)] = Σ_w C[(α, u, β, v)][w] A_(α+β,w)``; pairs whose
    bracket vanishes are omitted.

    Raises
    ------
    InconsistencyError
        If a bracket leaves the root space of the sum.
    """
    frames = {
        e.key: ExactMatrix.from_columns(e.vectors, lie.dim) for e in groupoid.elements
    }
    out: Dict[Tuple[Key, int, Key, int], Dict[int, CycScalar]] = {}
    for a in groupoid.elements:
        for b in groupoid.elements:
            total = groupoid.add(a.key, b.key)
            for u, x in enumerate(a.vectors):
                for v, y in enumerate(b.vectors):
                    w = lie.bracket(x, y)
                    if vec_is_zero(w):
                        continue
                    coords = frames[total].solve(w) if total is not None else None
                    if coords is None:
                        raise InconsistencyError("bracket leaves the root space of the sum")
                    out[(a.key, u, b.key, v)] = {k: c for k, c in enumerate(coords) if c}
    return out


def local_structure_algebra(
    lie: StructLieAlgebra,
    groupoid: AffineRootGroupoid,
    w1: Mapping[Key, int],
    nu0: int,
    m: int,
    w2: Optional[Mapping[Tuple[Key, Key], int]] = None,
) -> Tuple[StructLieAlgebra, List[Tuple[Key, int, int]]]:
    """Truncated algebra with basis ``a^i_(α,u)`` built from ω1, ω2 and ``C``.

    ``a^i_(α,u)`` stands for ``A_(α,u) ⊗ z^(i ν0 + ω1(α))`` with exponent
    below ``m``, and

        [a^i_(α,u), a^j_(β,v)] = Σ_w C a^(i+j+ω2(α,β))_(α+β,w)

    when ``(i + j + ω2(α, β)) ν0 + ω1(α + β) < m`` and zero otherwise.
    Returns the algebra and its basis as ``(key, u, i)``.
    """
    if m < 1:
        raise PreconditionError("truncation order m must be at least 1")
    if any(not 0 <= w1[e.key] < nu0 for e in groupoid.elements):
        raise PreconditionError("omega1 values must lie in [0, nu0)")
    w2 = w2 if w2 is not None else omega2(groupoid, w1, nu0)
    basis: List[Tuple[Key, int, int]] = []
    for e in groupoid.elements:
        i = 0
        while i * nu0 + w1[e.key] < m:
            for u in range(e.multiplicity):
                basis.append((e.key, u, i))
            i += 1

    def exponent(b: Tuple[Key, int, int]) -> int:
        return b[2] * nu0 + w1[b[0]]

    basis.sort(key=lambda b: (exponent(b), groupoid.position(b[0]), b[1]))
    index = {b: n for n, b in enumerate(basis)}
    constants = root_space_constants(lie, groupoid)
    structure: Dict[Tuple[int, int], Dict[int, CycScalar]] = {}
    for p, (ka, ua, i) in enumerate(basis):
        for q in range(p + 1, len(basis)):
            kb, ub, j = basis[q]
            c = constants.get((ka, ua, kb, ub))
            if not c:
                continue
            total = groupoid.add(ka, kb)
            level = i + j + omega2_value(groupoid, w2, ka, kb)
            if level * nu0 + w1[total] >= m:
                continue
            structure[(p, q)] = {index[(total, w, level)]: x for w, x in c.items()}
    labels = []
    for b in basis:
        k, u = b[0], b[1]
        name = groupoid.name(k)
        if groupoid.element(k).multiplicity > 1:
            name = f"{name}[{u}]"
        labels.append(f"{name}@z^{exponent(b)}")
    algebra = StructLieAlgebra(labels, structure, grading=[exponent(b) for b in basis])
    return algebra, basis


def cochain_torsion(
    lie: StructLieAlgebra, groupoid: AffineRootGroupoid, w1: Mapping[Key, int], zeta: CycScalar
) -> ExactMatrix:
    """Automorphism acting on each root space ``α`` by ``ζ^ω1(α)``."""
    vectors: List[Vector] = []
    scalars: List[CycScalar] = []
    for e in groupoid.elements:
        vectors.extend(e.vectors)
        scalars.extend([zeta ** w1[e.key]] * e.multiplicity)
    frame = ExactMatrix.from_columns(vectors, lie.dim)
    return frame @ ExactMatrix.diag(scalars) @ frame.inverse()


def local_structure_certificate(
    lie: StructLieAlgebra,
    fact: TorsionFactorization,
    groupoid: AffineRootGroupoid,
    m: int,
    w1: Optional[Mapping[Key, int]] = None,
    w2: Optional[Mapping[Tuple[Key, Key], int]] = None,
) -> bool:
    """Compare the algebra rebuilt from ω1 and ω2 with a twisted current algebra.

    With the raw cochain (the default) the model is twisted by γ0 itself.
    Any other cochain, such as the one of the Kac coordinates, is checked
    against the torsion acting on each root space by ``ζ^ω1``.
    """
    from alia.truncur import build

    nu0 = fact.nu0
    if w1 is None:
        w1, torsion = omega1(groupoid, fact.exponents, nu0), fact.gamma0
    else:
        torsion = cochain_torsion(lie, groupoid, w1, fact.zeta)
    algebra, basis = local_structure_algebra(lie, groupoid, w1, nu0, m, w2)
    model = build(lie, torsion, m, zeta=fact.zeta, nu=nu0)
    if algebra.dim != model.dim:
        logger.debug("local structure dim %d, model dim %d", algebra.dim, model.dim)
        return False
    columns = [
        model.coordinates(groupoid.element(k).vectors[u], i * nu0 + w1[k]) for k, u, i in basis
    ]
    if not columns:
        return True
    matrix = ExactMatrix.from_columns(columns, model.dim)
    return verify_isomorphism(matrix, algebra, model.realized)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass
class KacReport:
    """Everything the ``kac`` command prints for one torsion."""

    type_label: str
    factorization: TorsionFactorization
    coordinates: KacCoordinates
    s: Tuple[int, ...]
    canonicalized: bool
    groupoid: AffineRootGroupoid
    omega1_raw: Dict[Key, int]
    omega1_normalized: Dict[Key, int]
    omega2: Dict[Tuple[Key, Key], int]
    cocycle: bool
    local_structure: Optional[bool] = None
    local_m: Optional[int] = None

    @property
    def raw(self) -> Tuple[int, ...]:
        return self.factorization.exponents

    @property
    def normalized(self) -> Tuple[int, ...]:
        return self.coordinates.s

    @property
    def weyl_word_text(self) -> str:
        return self.coordinates.word_text

    def omega1_table(self, normalized: bool = True) -> Tuple[int, ...]:
        values = self.omega1_normalized if normalized else self.omega1_raw
        return tuple(values[e.key] for e in self.groupoid.elements)

    def dot(self) -> str:
        return omega2_dot(self.groupoid, self.omega2, title=self.factorization.affine_type)

    def to_json(self) -> Dict[str, Any]:
        fact = self.factorization
        doc: Dict[str, Any] = {
            "type": self.type_label,
            "affine_type": fact.affine_type,
            "r": fact.r,
            "nu0": fact.nu0,
            "cartan": fact.cartan,
            "marks": list(fact.marks),
            "special_node": fact.special,
            "raw": list(self.raw),
            "normalized": list(self.normalized),
            "weyl_word": list(self.coordinates.word),
            "weyl_word_text": self.weyl_word_text,
            "s": list(self.s),
            "canonicalized": self.canonicalized,
            "omega1_table": [
                {
                    "element": e.name,
                    "kind": e.kind,
                    "multiplicity": e.multiplicity,
                    "raw": self.omega1_raw[e.key],
                    "normalized": self.omega1_normalized[e.key],
                }
                for e in self.groupoid.elements
            ],
            "omega2_pairs": [
                {"pair": [self.groupoid.name(a), self.groupoid.name(b)], "value": v}
                for (a, b), v in self.omega2.items()
            ],
            "cocycle": self.cocycle,
        }
        if self.local_m is not None:
            doc["local_structure"] = {"m": self.local_m, "verified": self.local_structure}
        return doc

    def table(self) -> str:
        fact = self.factorization
        lines = [
            f"type {fact.affine_type}, nu0 = {fact.nu0}, marks {fact.marks}",
            f"raw exponents {self.raw} -> {self.normalized} via {self.weyl_word_text}",
            f"Kac coordinates {self.s}" + (" (canonicalized)" if self.canonicalized else ""),
            "",
            f"{'element':<14}{'mult':>5}{'raw':>5}{'norm':>6}",
        ]
        for e in self.groupoid.elements:
            lines.append(
                f"{e.name:<14}{e.multiplicity:>5}{self.omega1_raw[e.key]:>5}"
                f"{self.omega1_normalized[e.key]:>6}"
            )
        edges = omega2_edges(self.groupoid, self.omega2)
        lines.append("")
        lines.append("omega2 = 1 on: " + (", ".join(f"{{{a}, {b}}}" for a, b in edges) or "none"))
        return "\n".join(lines) + "\n"


def kac_report(
    lie: StructLieAlgebra,
    gamma0: ExactMatrix,
    nu0: Optional[int] = None,
    zeta: Optional[CycScalar] = None,
    m: Optional[int] = None,
) -> KacReport:
    """Run the full pipeline on a torsion ``gamma0``.

    When ``m`` is given the local structure algebra is also checked against
    the twisted truncated current algebra of order ``m``.
    """
    nu0 = nu0 or gamma0.multiplicative_order(MAX_ORBIT)
    zeta = zeta if zeta is not None else CycScalar.zeta(nu0)
    regular = regular_fixed_element(lie, gamma0)
    datum = csa_roots(lie, regular)
    fact = factor_torsion(lie, datum, gamma0, nu0, zeta)
    coords = kac_coordinates(fact)
    canonical, changed = canonical_coordinates(coords.s, fact.cartan)
    if changed:
        logger.warning("Kac coordinates %s replaced by the diagram-symmetric %s",
                       coords.s, canonical)
    groupoid = root_groupoid(lie, fact)
    w1_raw = omega1(groupoid, fact.exponents, nu0)
    w1_norm = omega1(groupoid, coords.s, nu0)
    w2 = omega2(groupoid, w1_norm, nu0)
    report = KacReport(
        lie.type_label or "", fact, coords, canonical, changed, groupoid,
        w1_raw, w1_norm, w2, cocycle_check(groupoid, w2),
    )
    if m is not None:
        report.local_m = m
        # both the raw cochain of γ0 and the normalized one with the reported ω2
        report.local_structure = local_structure_certificate(
            lie, fact, groupoid, m
        ) and local_structure_certificate(lie, fact, groupoid, m, w1_norm, w2)
    logger.info("Kac coordinates %s (raw %s, word %s)", canonical, fact.exponents,
                coords.word_text)
    return report


def torsion_of_config(cfg: Any) -> Tuple[ExactMatrix, int, CycScalar]:
    """Torsion matrix, order and linearizing root of unity of a config."""
    from alia.equivariant import stabilizer
    from alia.funring import linearizing_coordinate

    if cfg.torsion is not None:
        element = cfg.torsion_element()
    elif cfg.base_point is not None:
        element = stabilizer(cfg.action, cfg.base_point).generator
    else:
        raise PreconditionError("config names neither a torsion element nor a base point")
    nu0 = cfg.action.element_order(element.index)
    if nu0 == 1:
        zeta = CycScalar.one()
    elif cfg.base_point is not None and element.apply(cfg.base_point) == cfg.base_point:
        zeta = linearizing_coordinate(cfg.base_point, element.mobius).zeta
    else:
        zeta = CycScalar.zeta(nu0)
    return element.lie_matrix, nu0, zeta


def kac_report_for_config(cfg: Any, m: Optional[int] = None) -> KacReport:
    gamma0, nu0, zeta = torsion_of_config(cfg)
    return kac_report(cfg.lie, gamma0, nu0, zeta, m=m)


def local_structure_from_torsion(
    lie: StructLieAlgebra,
    gamma0: ExactMatrix,
    m: int,
    nu0: Optional[int] = None,
    zeta: Optional[CycScalar] = None,
) -> StructLieAlgebra:
    """:func:`local_structure_algebra` computed straight from a torsion."""
    nu0 = nu0 or gamma0.multiplicative_order(MAX_ORBIT)
    zeta = zeta if zeta is not None else CycScalar.zeta(nu0)
    datum = csa_roots(lie, regular_fixed_element(lie, gamma0))
    fact = factor_torsion(lie, datum, gamma0, nu0, zeta)
    groupoid = root_groupoid(lie, fact)
    algebra, _ = local_structure_algebra(
        lie, groupoid, omega1(groupoid, fact.exponents, nu0), nu0, m
    )
    return algebra
