# Version: v1.2
"""
nilmoore.nilpotent — Nilpotent Lie algebras from rational structure constants.

A LieAlgebra stores [X_i, X_j] for i < j only, so antisymmetry is
structural. ``validate`` is the only public constructor: it certifies the
Jacobi identity and nilpotency before handing the algebra out.

Elements of 𝔤 and 𝔤* are n×1 RatMatrix columns in the coordinate basis
X_i and the dual basis X_i* respectively; ⟨l, X⟩ is their dot product.
Group elements are kept in exponential coordinates only.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

from sympy import ImmutableMatrix, Integer, Rational, factorial

from nilmoore.config import MAX_BCH_STEP, logger
from nilmoore.errors import InvalidBracket, JacobiViolation, NotNilpotent, StepTooLarge
from nilmoore.exactlin import (
    RatMatrix,
    in_span,
    rational,
    span_basis,
    unit_vector,
    zero_vector,
)

AlgebraElement = RatMatrix
DualElement = RatMatrix

# (i, j, k, c): [X_i, X_j] has coefficient c on X_k; indices are 0-based.
StructureConstant = tuple[int, int, int, object]


class LieAlgebra:
    """A validated nilpotent Lie algebra over Q. Build with ``validate``."""

    def __init__(
        self,
        n: int,
        names: tuple[str, ...],
        brackets: dict[tuple[int, int], dict[int, Rational]],
    ) -> None:
        self.n = n
        self.names = names
        self.brackets = brackets
        self._terms = [
            (i, j, k, c) for (i, j), col in sorted(brackets.items()) for k, c in sorted(col.items())
        ]

    def __repr__(self) -> str:
        return f"LieAlgebra(n={self.n}, brackets={len(self._terms)})"

    # -- elements -----------------------------------------------------------

    def element(self, coordinates: Iterable) -> AlgebraElement:
        vals = [rational(x) for x in coordinates]
        if len(vals) != self.n:
            raise InvalidBracket(f"expected {self.n} coordinates, got {len(vals)}")
        return ImmutableMatrix(self.n, 1, vals)

    def basis_vector(self, i: int) -> AlgebraElement:
        return unit_vector(self.n, i)

    def zero(self) -> AlgebraElement:
        return zero_vector(self.n)

    def describe(self, v: RatMatrix, dual: bool = False) -> str:
        """Render v as e.g. "X1 + 1/2 X3" (or with X1* for dual elements)."""
        star = "*" if dual else ""
        parts = []
        for k in range(self.n):
            c = v[k]
            if c == 0:
                continue
            coef = "" if c == 1 else ("-" if c == -1 else f"{c} ")
            parts.append(f"{coef}{self.names[k]}{star}")
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"

    # -- bracket ------------------------------------------------------------

    def bracket(self, X: AlgebraElement, Y: AlgebraElement) -> AlgebraElement:
        out = [Integer(0)] * self.n
        for i, j, k, c in self._terms:
            coef = X[i] * Y[j] - X[j] * Y[i]
            if coef:
                out[k] += coef * c
        return ImmutableMatrix(self.n, 1, out)

    def pairing(self, l: DualElement, X: AlgebraElement) -> Rational:
        return sum((l[k] * X[k] for k in range(self.n)), Integer(0))

    def ad_matrix(self, X: AlgebraElement) -> RatMatrix:
        """Matrix of ad(X) = [X, ·] on coordinate columns."""
        cols = [self.bracket(X, unit_vector(self.n, j)) for j in range(self.n)]
        return ImmutableMatrix(self.n, self.n, lambda r, c: cols[c][r])

    # -- filtration ---------------------------------------------------------

    @cached_property
    def lower_central_series(self) -> list[list[AlgebraElement]]:
        """Bases of 𝔤 = 𝔤¹ ⊇ 𝔤² ⊇ … ending with the zero subspace."""
        series = [[unit_vector(self.n, i) for i in range(self.n)]]
        while series[-1]:
            current = series[-1]
            images = [
                self.bracket(unit_vector(self.n, i), v) for i in range(self.n) for v in current
            ]
            nxt = span_basis([w for w in images if any(w)], self.n)
            if len(nxt) == len(current):
                names = [self.describe(v) for v in current]
                raise NotNilpotent(
                    current,
                    f"lower central series stabilizes at span{{{', '.join(names)}}}",
                )
            series.append(nxt)
        return series

    @property
    def step(self) -> int:
        return len(self.lower_central_series) - 1

    def series_term(self, k: int) -> list[AlgebraElement]:
        """Basis of 𝔤^k (1-based; empty once past the step)."""
        series = self.lower_central_series
        return series[k - 1] if k - 1 < len(series) else []

    # -- subspaces ----------------------------------------------------------

    def is_subalgebra(self, vectors: Sequence[AlgebraElement]) -> bool:
        return all(
            in_span(vectors, self.bracket(u, v))
            for a, u in enumerate(vectors)
            for v in vectors[a + 1 :]
        )

    def is_ideal(self, vectors: Sequence[AlgebraElement]) -> bool:
        return all(
            in_span(vectors, self.bracket(unit_vector(self.n, i), v))
            for i in range(self.n)
            for v in vectors
        )

    def derived_algebra(self) -> list[AlgebraElement]:
        return self.series_term(2)


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


def validate(
    n: int,
    structure: Iterable[StructureConstant],
    names: Optional[Sequence[str]] = None,
) -> LieAlgebra:
    """Build and certify a nilpotent Lie algebra.

    Args:
        n: Dimension.
        structure: Triples (i, j, k, c) meaning [X_i, X_j] ∋ c·X_k, 0-based.
            A pair may be given in either order; it is stored as i < j.
        names: Coordinate labels, default X1..Xn.

    Raises:
        InvalidBracket: Out-of-range index, [X_i, X_i] ≠ 0, or a repeated entry.
        JacobiViolation: With the first failing basis triple.
        NotNilpotent: With the stabilized term of the lower central series.
    """
    names = tuple(names) if names is not None else tuple(f"X{i + 1}" for i in range(n))
    if len(names) != n:
        raise InvalidBracket(f"{len(names)} names given for dimension {n}")
    brackets: dict[tuple[int, int], dict[int, Rational]] = {}
    seen: set[tuple[int, int, int]] = set()
    for i, j, k, c in structure:
        if not all(0 <= idx < n for idx in (i, j, k)):
            raise InvalidBracket(f"bracket index out of range in [{i + 1}, {j + 1}] -> {k + 1}")
        value = rational(c)
        if i == j:
            if value != 0:
                raise InvalidBracket(f"[{names[i]}, {names[i]}] must vanish")
            continue
        if i > j:
            i, j, value = j, i, -value
        if (i, j, k) in seen:
            raise InvalidBracket(
                f"coefficient of {names[k]} in [{names[i]}, {names[j]}] given twice"
            )
        seen.add((i, j, k))
        if value != 0:
            brackets.setdefault((i, j), {})[k] = value

    g = LieAlgebra(n, names, brackets)
    _check_jacobi(g)
    step = g.step
    logger.debug(f"validated {n}-dimensional algebra of step {step}")
    return g


def _check_jacobi(g: LieAlgebra) -> None:
    e = [unit_vector(g.n, i) for i in range(g.n)]
    for i in range(g.n):
        for j in range(i + 1, g.n):
            for k in range(j + 1, g.n):
                total = (
                    g.bracket(e[i], g.bracket(e[j], e[k]))
                    + g.bracket(e[j], g.bracket(e[k], e[i]))
                    + g.bracket(e[k], g.bracket(e[i], e[j]))
                )
                if any(total):
                    raise JacobiViolation(
                        (i, j, k),
                        f"Jacobi identity fails for ({g.names[i]}, {g.names[j]}, {g.names[k]})",
                    )


def lower_central_series(g: LieAlgebra) -> list[list[AlgebraElement]]:
    return g.lower_central_series


def ad_matrix(g: LieAlgebra, X: AlgebraElement) -> RatMatrix:
    return g.ad_matrix(X)


def Ad_exp(g: LieAlgebra, X: AlgebraElement) -> RatMatrix:
    """exp(ad X) = Σ ad(X)^k / k!, a finite sum on a nilpotent algebra."""
    A = g.ad_matrix(X)
    total = ImmutableMatrix.eye(g.n)
    power = ImmutableMatrix.eye(g.n)
    k = 0
    while True:
        k += 1
        power = power * A
        if not any(power):
            return total
        total = total + power / factorial(k)


def coAd_exp(g: LieAlgebra, X: AlgebraElement) -> RatMatrix:
    """Coadjoint action of exp X on dual coordinates: Ad_exp(−X) transposed."""
    return ImmutableMatrix(Ad_exp(g, -X).T)


# ---------------------------------------------------------------------------
# Baker–Campbell–Hausdorff
# ---------------------------------------------------------------------------


def bch_product(g: LieAlgebra, X: AlgebraElement, Y: AlgebraElement) -> AlgebraElement:
    """log(exp X · exp Y), Dynkin terms through total degree 5.

    Terms of degree above the step vanish and are skipped.

    Raises:
        StepTooLarge: For algebras of step > 5.
    """
    step = g.step
    if step > MAX_BCH_STEP:
        raise StepTooLarge(f"BCH product is implemented through step {MAX_BCH_STEP}, got {step}")
    b = g.bracket
    Z = X + Y
    if step < 2:
        return ImmutableMatrix(Z)
    XY = b(X, Y)
    Z = Z + XY / 2
    if step >= 3:
        XXY = b(X, XY)
        YXY = b(Y, XY)
        Z = Z + XXY / 12 - YXY / 12
    if step >= 4:
        YXXY = b(Y, XXY)
        Z = Z - YXXY / 24
    if step >= 5:
        YX = -XY
        YYX = b(Y, YX)
        YYYX = b(Y, YYX)
        XXXY = b(X, XXY)
        Z = Z - (b(Y, YYYX) + b(X, XXXY)) / 720
        Z = Z + (b(X, YYYX) + b(Y, XXXY)) / 360
        Z = Z + (b(Y, b(X, YXY)) + b(X, b(Y, b(X, YX)))) / 120
    return ImmutableMatrix(Z)


@dataclass(frozen=True)
class GroupElement:
    """exp(log) in the simply connected group of ``algebra``."""

    algebra: LieAlgebra
    log: AlgebraElement

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.algebra, bch_product(self.algebra, self.log, other.log))

    def inverse(self) -> "GroupElement":
        return GroupElement(self.algebra, ImmutableMatrix(-self.log))

    def coAd(self) -> RatMatrix:
        return coAd_exp(self.algebra, self.log)


def product_of_exponentials(g: LieAlgebra, factors: Sequence[AlgebraElement]) -> AlgebraElement:
    """log(exp F₁ · exp F₂ ⋯ exp F_m), folded left to right."""
    Z = g.zero()
    for F in factors:
        Z = bch_product(g, Z, F)
    return Z


def is_two_step(g: LieAlgebra) -> bool:
    return g.step <= 2

