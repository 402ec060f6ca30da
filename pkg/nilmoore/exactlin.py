# Version: v1.3
"""
nilmoore.exactlin — Exact rational/integer linear algebra and Z-lattices.

Matrices are sympy ``ImmutableMatrix`` values with ``Rational`` entries.
Floats are rejected at every entry point. Normal forms are computed on
plain Python ints and handed back as immutable sympy matrices.

Conventions
-----------
hermite_form : row style. H = U·M is in row echelon form, pivots are
               positive, and entries above a pivot lie in [0, pivot).
smith_form   : U·M·V = D with d_1 | d_2 | … and nonnegative diagonal.
ZLattice     : columns of ``basis`` are a Z-basis. Two lattices are equal
               when their column Hermite forms agree.
"""

import re
from dataclasses import dataclass
from functools import cached_property, reduce
from math import prod
from typing import Iterable, Optional, Sequence

from sympy import ImmutableMatrix, Integer, Matrix, Rational, ilcm
from sympy.core.intfunc import igcdex
from sympy.core.numbers import Float

from nilmoore.errors import NotASublattice, NotFullRank, RankMismatch, ShapeMismatch

RatMatrix = ImmutableMatrix

_RATIONAL_RE = re.compile(r"^\s*[+-]?\d+\s*(/\s*[+-]?\d+\s*)?$")


# ---------------------------------------------------------------------------
# Construction helpers
# ---------------------------------------------------------------------------


def rational(value) -> Rational:
    """Coerce *value* (int, "p/q" string, Rational) to an exact Rational.

    Raises:
        TypeError: For floats, decimal strings, or anything non-rational.
    """
    if isinstance(value, (float, Float)):
        raise TypeError(f"floating-point value {value!r} is not exact")
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, str):
        if not _RATIONAL_RE.match(value):
            raise TypeError(f"{value!r} is not an integer or a 'p/q' fraction")
        return Rational(value.replace(" ", ""))
    if isinstance(value, (int, Rational)):
        return Rational(value)
    raise TypeError(f"cannot read {value!r} as an exact rational")


def rat_matrix(rows: Sequence[Sequence]) -> RatMatrix:
    """Build a RatMatrix from nested rows of exact values."""
    rows = [list(r) for r in rows]
    ncols = len(rows[0]) if rows else 0
    if any(len(r) != ncols for r in rows):
        raise ShapeMismatch("ragged rows")
    return ImmutableMatrix(len(rows), ncols, [rational(x) for r in rows for x in r])


def column(values: Iterable) -> RatMatrix:
    """Build an n×1 column vector."""
    vals = [rational(x) for x in values]
    return ImmutableMatrix(len(vals), 1, vals)


def zero_vector(n: int) -> RatMatrix:
    return ImmutableMatrix.zeros(n, 1)


def unit_vector(n: int, i: int) -> RatMatrix:
    return ImmutableMatrix(n, 1, [1 if k == i else 0 for k in range(n)])


def identity(n: int) -> RatMatrix:
    return ImmutableMatrix.eye(n)


def hstack(columns: Sequence[RatMatrix], rows: int) -> RatMatrix:
    """Join column vectors into one matrix (an n×0 matrix when empty)."""
    if not columns:
        return ImmutableMatrix.zeros(rows, 0)
    return ImmutableMatrix(Matrix.hstack(*columns))


def columns_of(M: RatMatrix) -> list[RatMatrix]:
    return [ImmutableMatrix(M[:, j]) for j in range(M.cols)]


def is_integral(M: RatMatrix) -> bool:
    return all(Rational(x).q == 1 for x in M)


def denominator_lcm(M: RatMatrix) -> int:
    return int(reduce(ilcm, (Rational(x).q for x in M), 1))


def scale_to_integer(M: RatMatrix) -> tuple[int, RatMatrix]:
    """Return (s, s·M) with s the LCM of the denominators of M."""
    s = denominator_lcm(M)
    return s, ImmutableMatrix(M * s)


def _int_rows(M: RatMatrix) -> list[list[int]]:
    if not is_integral(M):
        raise ValueError("an integer matrix is required")
    return [[int(M[i, j]) for j in range(M.cols)] for i in range(M.rows)]


def _from_rows(rows: list[list[int]], nrows: int, ncols: int) -> RatMatrix:
    return ImmutableMatrix(nrows, ncols, [x for r in rows for x in r])


def _eye_rows(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


# ---------------------------------------------------------------------------
# Elementary unimodular operations on int rows
# ---------------------------------------------------------------------------


def _combine_rows(mats: Sequence[list[list[int]]], r: int, i: int, a: int, b: int) -> None:
    """Replace rows (r, i) so that entry a at row r becomes gcd(a, b) and b becomes 0.

    When a divides b the pivot row is kept and row i is reduced against it.
    """
    if a and b % a == 0:
        k = b // a
        for M in mats:
            M[i] = [v - k * u for u, v in zip(M[r], M[i])]
        return
    x, y, g = (int(v) for v in igcdex(a, b))
    p, q = -b // g, a // g
    for M in mats:
        rr, ri = M[r], M[i]
        M[r] = [x * u + y * v for u, v in zip(rr, ri)]
        M[i] = [p * u + q * v for u, v in zip(rr, ri)]


def _combine_cols(mats: Sequence[list[list[int]]], r: int, j: int, a: int, b: int) -> None:
    """Column twin of _combine_rows."""
    if a and b % a == 0:
        k = b // a
        for M in mats:
            for line in M:
                line[j] -= k * line[r]
        return
    x, y, g = (int(v) for v in igcdex(a, b))
    p, q = -b // g, a // g
    for M in mats:
        for line in M:
            u, v = line[r], line[j]
            line[r] = x * u + y * v
            line[j] = p * u + q * v


def _swap_cols(mats: Sequence[list[list[int]]], a: int, b: int) -> None:
    for M in mats:
        for line in M:
            line[a], line[b] = line[b], line[a]


# ---------------------------------------------------------------------------
# Normal forms
# ---------------------------------------------------------------------------


def hermite_form(M: RatMatrix) -> tuple[RatMatrix, RatMatrix]:
    """Row Hermite normal form of an integer matrix.

    Returns:
        (H, U) with U unimodular and H = U·M upper echelon, pivots positive,
        entries above each pivot reduced into [0, pivot).
    """
    m, n = M.shape
    A = _int_rows(M)
    U = _eye_rows(m)
    r = 0
    for c in range(n):
        if r == m:
            break
        for i in range(r + 1, m):
            if A[i][c]:
                _combine_rows((A, U), r, i, A[r][c], A[i][c])
        if A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-x for x in A[r]]
            U[r] = [-x for x in U[r]]
        pivot = A[r][c]
        for i in range(r):
            q = A[i][c] // pivot
            if q:
                A[i] = [u - q * v for u, v in zip(A[i], A[r])]
                U[i] = [u - q * v for u, v in zip(U[i], U[r])]
        r += 1
    return _from_rows(A, m, n), _from_rows(U, m, m)


@dataclass(frozen=True)
class SmithDecomposition:
    """U·original·V = D with U, V unimodular and d_1 | d_2 | …."""

    U: RatMatrix
    D: RatMatrix
    V: RatMatrix
    original: RatMatrix

    @property
    def elementary_divisors(self) -> tuple[int, ...]:
        return tuple(int(self.D[i, i]) for i in range(min(self.D.shape)))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.elementary_divisors if d)


def smith_form(M: RatMatrix) -> SmithDecomposition:
    """Smith normal form by deterministic gcd pivoting."""
    m, n = M.shape
    A = _int_rows(M)
    U = _eye_rows(m)
    V = _eye_rows(n)
    for t in range(min(m, n)):
        pivot_at = _smallest_nonzero(A, t)
        if pivot_at is None:
            break
        pi, pj = pivot_at
        if pi != t:
            A[t], A[pi] = A[pi], A[t]
            U[t], U[pi] = U[pi], U[t]
        if pj != t:
            _swap_cols((A, V), t, pj)
        while True:
            for i in range(t + 1, m):
                if A[i][t]:
                    _combine_rows((A, U), t, i, A[t][t], A[i][t])
            for j in range(t + 1, n):
                if A[t][j]:
                    _combine_cols((A, V), t, j, A[t][t], A[t][j])
            if any(A[i][t] for i in range(t + 1, m)):
                continue
            p = A[t][t]
            offender = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p),
                None,
            )
            if offender is None:
                break
            A[t] = [u + v for u, v in zip(A[t], A[offender])]
            U[t] = [u + v for u, v in zip(U[t], U[offender])]
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    return SmithDecomposition(
        U=_from_rows(U, m, m),
        D=_from_rows(A, m, n),
        V=_from_rows(V, n, n),
        original=ImmutableMatrix(M),
    )


def _smallest_nonzero(A: list[list[int]], t: int) -> Optional[tuple[int, int]]:
    best = None
    for i in range(t, len(A)):
        for j in range(t, len(A[i])):
            v = abs(A[i][j])
            if v and (best is None or v < best[0]):
                best = (v, i, j)
    return None if best is None else (best[1], best[2])


# ---------------------------------------------------------------------------
# Rational linear algebra
# ---------------------------------------------------------------------------


def kernel_basis(M: RatMatrix) -> list[RatMatrix]:
    """Basis of the right null space of M (empty for full column rank)."""
    return [ImmutableMatrix(v) for v in Matrix(M).nullspace()]


def rank(M: RatMatrix) -> int:
    if 0 in M.shape:
        return 0
    return int(Matrix(M).rank())


def solve(B: RatMatrix, V: RatMatrix) -> Optional[RatMatrix]:
    """Unique X with B·X = V for full-column-rank B, or None if inconsistent."""
    if B.rows != V.rows:
        raise ShapeMismatch(f"cannot solve {B.shape} against {V.shape}")
    if B.cols == 0:
        return ImmutableMatrix.zeros(0, V.cols) if not any(V) else None
    try:
        X, params = Matrix(B).gauss_jordan_solve(Matrix(V))
    except ValueError:
        return None
    if params.rows:
        raise RankMismatch("basis columns are not linearly independent")
    return ImmutableMatrix(X)


def span_basis(vectors: Sequence[RatMatrix], n: int) -> list[RatMatrix]:
    """A reduced basis of span(vectors), deterministic (RREF rows)."""
    if not vectors:
        return []
    R, pivots = Matrix(hstack(vectors, n).T).rref()
    return [ImmutableMatrix(R[i, :].T) for i in range(len(pivots))]


def in_span(vectors: Sequence[RatMatrix], v: RatMatrix) -> bool:
    if not any(v):
        return True
    if not vectors:
        return False
    return rank(hstack(list(vectors) + [v], v.rows)) == rank(hstack(vectors, v.rows))


def annihilator(vectors: Sequence[RatMatrix], n: int) -> list[RatMatrix]:
    """Basis of {f : ⟨f, v⟩ = 0 for all v} in dual coordinates."""
    if not vectors:
        return [unit_vector(n, i) for i in range(n)]
    return kernel_basis(hstack(vectors, n).T)


def pfaffian(A: RatMatrix) -> Rational:
    """Pfaffian by recursive expansion along the first row."""
    k = A.rows
    if k % 2:
        return Integer(0)
    rows = [[A[i, j] for j in range(k)] for i in range(k)]
    return _pf(rows, tuple(range(k)))


def _pf(rows: list, idx: tuple[int, ...]) -> Rational:
    if not idx:
        return Integer(1)
    first, rest = idx[0], idx[1:]
    total = Integer(0)
    for pos, j in enumerate(rest):
        a = rows[first][j]
        if a == 0:
            continue
        sign = 1 if pos % 2 == 0 else -1
        total += sign * a * _pf(rows, rest[:pos] + rest[pos + 1 :])
    return total


def determinant(A: RatMatrix) -> Rational:
    if A.rows == 0:
        return Integer(1)
    return Rational(Matrix(A).det())


def integer_kernel(M: RatMatrix) -> RatMatrix:
    """Columns form a Z-basis of {x ∈ Z^k : M·x = 0}."""
    k = M.cols
    if M.rows == 0 or not any(M):
        return identity(k)
    _, Mi = scale_to_integer(M)
    H, U = hermite_form(ImmutableMatrix(Mi.T))
    zero_rows = [i for i in range(H.rows) if not any(H[i, :])]
    return hstack([ImmutableMatrix(U[i, :].T) for i in zero_rows], k)


# ---------------------------------------------------------------------------
# Z-lattices
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ZLattice:
    """A Z-lattice given by a full-column-rank rational basis matrix."""

    basis: RatMatrix

    def __post_init__(self) -> None:
        object.__setattr__(self, "basis", ImmutableMatrix(self.basis))
        if rank(self.basis) != self.basis.cols:
            raise NotFullRank("lattice basis columns are linearly dependent")

    @classmethod
    def standard(cls, n: int) -> "ZLattice":
        return cls(identity(n))

    @classmethod
    def from_generators(cls, vectors: Sequence[RatMatrix], n: int) -> "ZLattice":
        """Z-basis of the lattice generated by possibly dependent vectors."""
        if not vectors or not any(any(v) for v in vectors):
            return cls(ImmutableMatrix.zeros(n, 0))
        s, G = scale_to_integer(hstack(vectors, n))
        H, _ = hermite_form(ImmutableMatrix(G.T))
        rows = [ImmutableMatrix(H[i, :].T) / s for i in range(H.rows) if any(H[i, :])]
        return cls(hstack(rows, n))

    @property
    def ambient_dim(self) -> int:
        return self.basis.rows

    @property
    def rank(self) -> int:
        return self.basis.cols

    @property
    def is_full_rank(self) -> bool:
        return self.rank == self.ambient_dim

    def vectors(self) -> list[RatMatrix]:
        return columns_of(self.basis)

    @cached_property
    def canonical(self) -> RatMatrix:
        """Column Hermite form: basis·W for the unique admissible unimodular W."""
        if self.rank == 0:
            return self.basis
        s, B = scale_to_integer(self.basis)
        H, _ = hermite_form(ImmutableMatrix(B.T))
        return ImmutableMatrix(H.T / s)

    def coordinates(self, v: RatMatrix) -> Optional[RatMatrix]:
        """Rational coordinates of v in this basis, None when v ∉ span."""
        return solve(self.basis, v)

    def contains(self, v: RatMatrix) -> bool:
        coords = self.coordinates(v)
        return coords is not None and is_integral(coords)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ZLattice):
            return NotImplemented
        return (
            self.ambient_dim == other.ambient_dim
            and self.rank == other.rank
            and self.canonical == other.canonical
        )

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self.canonical))


def change_of_basis(L: ZLattice, L0: ZLattice) -> RatMatrix:
    """Matrix C with L.basis·C = L0.basis.

    Raises:
        RankMismatch: If the lattices do not span the same subspace.
    """
    if L.ambient_dim != L0.ambient_dim or L.rank != L0.rank:
        raise RankMismatch(
            f"lattices of rank {L.rank} and {L0.rank} "
            f"(ambient {L.ambient_dim}, {L0.ambient_dim}) cannot be compared"
        )
    C = solve(L.basis, L0.basis)
    if C is None:
        raise RankMismatch("the two lattices span different subspaces")
    return C


def sublattice_index(L: ZLattice, L0: ZLattice) -> int:
    """[L : L0] as the product of the elementary divisors of the change of basis.

    Raises:
        NotASublattice: If the change of basis is not integral.
        RankMismatch: If the spans differ.
    """
    C = change_of_basis(L, L0)
    if not is_integral(C):
        raise NotASublattice("the change of basis from L to L0 is not integral")
    return prod(smith_form(C).elementary_divisors)


def dual_lattice(L: ZLattice) -> ZLattice:
    """{f : ⟨f, v⟩ ∈ Z for all v ∈ L}, basis = inverse-transpose.

    Raises:
        NotFullRank: The dual of a lower-rank lattice is not discrete.
    """
    if not L.is_full_rank:
        raise NotFullRank(
            f"dual of a rank-{L.rank} lattice in dimension {L.ambient_dim} is not discrete"
        )
    return ZLattice(ImmutableMatrix(L.basis.inv().T))


def intersect_subspace(L: ZLattice, subspace: Sequence[RatMatrix]) -> ZLattice:
    """Z-basis of the saturated sublattice L ∩ span(subspace)."""
    n = L.ambient_dim
    ann = annihilator(list(subspace), n)
    if not ann:
        return L
    M = ImmutableMatrix(hstack(ann, n).T * L.basis)
    K = integer_kernel(M)
    return ZLattice(ZLattice(ImmutableMatrix(L.basis * K)).canonical)


def complete_basis(inner: ZLattice, outer: ZLattice) -> list[RatMatrix]:
    """Vectors extending inner's basis to a Z-basis of outer.

    The completion is returned in column Hermite form relative to outer.

    Raises:
        NotASublattice: If inner is not a saturated sublattice of outer.
    """
    p, q = inner.rank, outer.rank
    if p == 0:
        return columns_of(outer.canonical)
    P = solve(outer.basis, inner.basis)
    if P is None or not is_integral(P):
        raise NotASublattice("inner lattice is not contained in the outer lattice")
    H, U = hermite_form(P)
    if H[:p, :] != identity(p):
        raise NotASublattice("inner lattice is not saturated in the outer lattice")
    if q == p:
        return []
    C = ImmutableMatrix(U.inv()[:, p:])
    Hc, _ = hermite_form(ImmutableMatrix(C.T))
    C = ImmutableMatrix(Hc.T)
    return [ImmutableMatrix(outer.basis * C[:, j]) for j in range(C.cols)]
