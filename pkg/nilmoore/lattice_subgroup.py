# Version: v1.2
"""
nilmoore.lattice_subgroup — Lattice subgroups Γ, the integral dual 𝔤*_Γ, and
Malcev bases strongly based on Γ.

Γ is given by a Z-basis of log Γ. Closure of exp(log Γ) under the group
product is certified by exhaustive pairwise products of ±basis vectors plus
seeded random words up to a configured length; this is a bounded check,
not a proof, and every LatticeSubgroup records the bound it passed.

Malcev bases are built through an explicit flag of subspaces:

    0 ⊆ … ⊆ h_i + (h_{i+1} ∩ 𝔤^k) ⊆ … ⊆ 𝔤

for the chain 0 ⊂ h ⊂ 𝔤 (or a longer user chain). Every subspace between
two neighbours of that flag is a subalgebra, and an ideal when the chain
members are ideals, so a Z-basis adapted to the flag is automatically a
weak (resp. strong) Malcev basis.
"""

import random
from dataclasses import dataclass
from typing import Optional, Sequence

from sympy import ImmutableMatrix

from nilmoore import config, metrics
from nilmoore.config import logger
from nilmoore.errors import (
    ChainNotFound,
    NotClosed,
    NotFullRank,
    ShapeMismatch,
)
from nilmoore.exactlin import (
    RatMatrix,
    ZLattice,
    complete_basis,
    determinant,
    dual_lattice,
    hstack,
    in_span,
    intersect_subspace,
    is_integral,
    kernel_basis,
    solve,
    span_basis,
)
from nilmoore.nilpotent import AlgebraElement, GroupElement, LieAlgebra, product_of_exponentials

# A word is a sequence of (basis index, ±1): exp(±v_i) factors in order.
Word = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class LatticeSubgroup:
    """Γ ⊂ G with log Γ = ``log_basis``; closure certified up to ``word_length``."""

    algebra: LieAlgebra
    log_basis: ZLattice
    word_length: int
    samples: int
    seed: int

    @property
    def n(self) -> int:
        return self.algebra.n

    def contains_log(self, X: AlgebraElement) -> bool:
        return self.log_basis.contains(X)

    def generators(self) -> list[AlgebraElement]:
        return self.log_basis.vectors()


def _describe_word(word: Word) -> str:
    return " ".join(f"exp({'-' if s < 0 else ''}v{i + 1})" for i, s in word)


def _word_log(g: LieAlgebra, basis: Sequence[AlgebraElement], word: Word) -> AlgebraElement:
    element = GroupElement(g, g.zero())
    for i, s in word:
        factor = GroupElement(g, basis[i])
        element = element * (factor if s > 0 else factor.inverse())
    return element.log


def verify_lattice_subgroup(
    g: LieAlgebra,
    L: ZLattice,
    *,
    word_length: Optional[int] = None,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
) -> LatticeSubgroup:
    """Certify that exp(L) is a subgroup, up to words of length ``word_length``.

    Raises:
        ShapeMismatch: If L does not live in 𝔤.
        NotFullRank: If L is not cocompact.
        NotClosed: With the first word whose log escapes L.
    """
    word_length = config.DEFAULT_WORD_LENGTH if word_length is None else word_length
    samples = config.DEFAULT_CLOSURE_SAMPLES if samples is None else samples
    seed = config.DEFAULT_SEED if seed is None else seed
    if L.ambient_dim != g.n:
        raise ShapeMismatch(f"lattice lives in dimension {L.ambient_dim}, algebra in {g.n}")
    if not L.is_full_rank:
        raise NotFullRank(f"log Γ has rank {L.rank} in dimension {g.n}; Γ is not cocompact")

    basis = L.vectors()
    with metrics.timer() as t:
        if g.step <= 1:
            logger.debug("abelian algebra: exp(L) is closed, BCH is addition")
        else:
            words: list[Word] = [
                ((i, si), (j, sj))
                for i in range(len(basis))
                for j in range(i + 1, len(basis))
                for si in (1, -1)
                for sj in (1, -1)
            ]
            rng = random.Random(seed)
            if word_length >= 2:
                for _ in range(samples):
                    length = rng.randint(2, word_length)
                    words.append(
                        tuple((rng.randrange(len(basis)), rng.choice((1, -1))) for _ in range(length))
                    )
            for word in words:
                log = _word_log(g, basis, word)
                if not L.contains(log):
                    raise NotClosed(
                        word,
                        log,
                        f"{_describe_word(word)} has log {g.describe(log)} outside log Γ",
                    )
    metrics.record_computation(
        kind="lattice_closure", elapsed_ms=t.elapsed_ms, word_length=word_length, samples=samples
    )
    logger.info(
        f"lattice closure certified up to word length {word_length} ({samples} samples)"
    )
    return LatticeSubgroup(g, L, word_length, samples, seed)


def integral_dual(gamma: LatticeSubgroup) -> ZLattice:
    """𝔤*_Γ = {l : ⟨l, log Γ⟩ ⊂ Z}."""
    return dual_lattice(gamma.log_basis)


# ---------------------------------------------------------------------------
# Malcev bases
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MalcevBasis:
    """Ordered Z-basis of log Γ whose prefixes span subalgebras (or ideals).

    ``boundaries`` are the prefix lengths of the construction flag; any
    prefix length between two boundaries also spans a subalgebra.
    """

    vectors: tuple[AlgebraElement, ...]
    pass_through: int
    kind: str
    boundaries: tuple[int, ...]

    @property
    def s(self) -> int:
        return self.pass_through

    @property
    def matrix(self) -> RatMatrix:
        return hstack(list(self.vectors), self.vectors[0].rows)

    def coordinates_of(self, f: RatMatrix) -> RatMatrix:
        """(⟨f, v_1⟩, …, ⟨f, v_n⟩) for a dual element f."""
        return ImmutableMatrix(self.matrix.T * f)

    def functional_from(self, coords: RatMatrix) -> RatMatrix:
        """Inverse of coordinates_of."""
        return ImmutableMatrix(self.matrix.T.inv() * coords)

    @property
    def trailing(self) -> tuple[AlgebraElement, ...]:
        return self.vectors[self.pass_through :]


def _flag(g: LieAlgebra, chain: Sequence[list[AlgebraElement]]) -> list[list[AlgebraElement]]:
    """Refine 0 ⊂ chain ⊂ 𝔤 by the lower central series."""
    n = g.n
    members = [[]] + [span_basis(c, n) for c in chain] + [span_basis(g.series_term(1), n)]
    flag: list[list[AlgebraElement]] = [[]]
    for lower, upper in zip(members, members[1:]):
        for k in range(g.step + 1, 0, -1):
            layer = span_basis(lower + _intersect(upper, g.series_term(k), n), n)
            if len(layer) > len(flag[-1]):
                flag.append(layer)
    return flag


def _intersect(A: list[AlgebraElement], B: list[AlgebraElement], n: int) -> list[AlgebraElement]:
    if not A or not B:
        return []
    # x = A·a = B·b  ⇔  [A | −B]·(a, b) = 0
    M = hstack(list(A) + [-v for v in B], n)
    A_mat = hstack(list(A), n)
    return span_basis([ImmutableMatrix(A_mat * k[: len(A), :]) for k in kernel_basis(M)], n)


def _certify(
    gamma: LatticeSubgroup,
    vectors: Sequence[AlgebraElement],
    s: int,
    h: list[AlgebraElement],
) -> str:
    """Check the Malcev invariants; return "strong" or "weak"."""
    g, L = gamma.algebra, gamma.log_basis
    C = solve(L.basis, hstack(list(vectors), g.n))
    if C is None or not is_integral(C) or abs(determinant(C)) != 1:
        raise ChainNotFound("constructed vectors are not a Z-basis of log Γ")
    prefix_h = list(vectors[:s])
    if len(h) != s or not all(in_span(prefix_h, v) for v in h):
        raise ChainNotFound("leading vectors do not span the requested subalgebra")
    ideals = True
    for k in range(1, len(vectors) + 1):
        prefix = list(vectors[:k])
        if not g.is_subalgebra(prefix):
            raise ChainNotFound(f"prefix of length {k} is not a subalgebra")
        ideals = ideals and g.is_ideal(prefix)
    return "strong" if ideals else "weak"


def weak_malcev_through(
    gamma: LatticeSubgroup,
    h: Sequence[AlgebraElement],
    chain: Sequence[Sequence[AlgebraElement]] = (),
) -> MalcevBasis:
    """Malcev basis strongly based on Γ whose first s vectors span h.

    Args:
        gamma: The lattice subgroup.
        h: Spanning vectors of a rational subalgebra.
        chain: Optional further subalgebras; together with h they must be
            nested when sorted by dimension.

    Raises:
        ChainNotFound: If some chain member is not a subalgebra, the chain is
            not nested, or the constructed basis fails certification.
    """
    g, L = gamma.algebra, gamma.log_basis
    n = g.n
    h_basis = span_basis(list(h), n)
    unique: dict[tuple, list[AlgebraElement]] = {}
    for c in [*chain, h_basis]:
        reduced = span_basis(list(c), n)
        unique[tuple(tuple(v) for v in reduced)] = reduced
    members = sorted(unique.values(), key=len)
    for member in members:
        if not g.is_subalgebra(member):
            raise ChainNotFound(
                f"span{{{', '.join(g.describe(v) for v in member)}}} is not bracket-closed"
            )
    for lower, upper in zip(members, members[1:]):
        if len(lower) == len(upper) or not all(in_span(upper, v) for v in lower):
            raise ChainNotFound("chain members are not strictly nested")
    members = [m for m in members if 0 < len(m) < n]

    flag = _flag(g, members)
    vectors: list[AlgebraElement] = []
    boundaries = [0]
    for subspace in flag[1:]:
        outer = intersect_subspace(L, subspace)
        inner = ZLattice(hstack(vectors, n))
        vectors.extend(complete_basis(inner, outer))
        boundaries.append(len(vectors))

    s = len(h_basis)
    if s not in boundaries:
        raise ChainNotFound("h is not a member of the construction flag")
    kind = _certify(gamma, vectors, s, h_basis)
    logger.info(f"{kind} Malcev basis through h built with s={s}")
    logger.debug("Malcev basis: " + ", ".join(g.describe(v) for v in vectors))
    return MalcevBasis(tuple(vectors), s, kind, tuple(boundaries))


def malcev_variant(
    gamma: LatticeSubgroup, basis: MalcevBasis, rng: random.Random
) -> MalcevBasis:
    """A different Malcev basis through the same h.

    Applies random unimodular shears and a permutation inside each flag
    layer and adds random integer multiples of earlier vectors. Prefix
    spans at the boundaries are unchanged.
    """
    vectors = list(basis.vectors)
    for a, b in zip(basis.boundaries, basis.boundaries[1:]):
        layer = vectors[a:b]
        rng.shuffle(layer)
        for _ in range(2 * len(layer)):
            if len(layer) < 2:
                break
            i, j = rng.sample(range(len(layer)), 2)
            layer[i] = layer[i] + rng.choice((-2, -1, 1, 2)) * layer[j]
        for i in range(len(layer)):
            if rng.random() < 0.5:
                layer[i] = -layer[i]
            for earlier in vectors[:a]:
                layer[i] = layer[i] + rng.randint(-1, 1) * earlier
        vectors[a:b] = [ImmutableMatrix(v) for v in layer]
    g = gamma.algebra
    h_basis = span_basis(vectors[: basis.pass_through], g.n)
    kind = _certify(gamma, vectors, basis.pass_through, h_basis)
    return MalcevBasis(tuple(vectors), basis.pass_through, kind, basis.boundaries)


def check_strongly_based(
    gamma: LatticeSubgroup,
    basis: MalcevBasis,
    *,
    samples: int = 50,
    bound: int = 3,
    seed: Optional[int] = None,
) -> None:
    """exp(a₁v₁)⋯exp(a_nv_n) ∈ Γ for random integer tuples a.

    Raises:
        NotClosed: With the exponent tuple as the witness word.
    """
    g = gamma.algebra
    rng = random.Random(config.DEFAULT_SEED if seed is None else seed)
    for _ in range(samples):
        a = [rng.randint(-bound, bound) for _ in basis.vectors]
        log = product_of_exponentials(g, [c * v for c, v in zip(a, basis.vectors)])
        if not gamma.contains_log(log):
            word = tuple((i, c) for i, c in enumerate(a) if c)
            raise NotClosed(word, log, f"exponents {a} give log {g.describe(log)} outside log Γ")


def group_log(gamma: LatticeSubgroup, word: Word) -> AlgebraElement:
    """log of the product of exp(±v_i) over a word in the Γ generators."""
    return _word_log(gamma.algebra, gamma.generators(), word)

