# Version: v1.0
"""Tests for nilmoore.exactlin — normal forms, kernels and Z-lattices."""

import random

import pytest
from sympy import ImmutableMatrix, Rational

from nilmoore.errors import NotASublattice, NotFullRank, RankMismatch
from nilmoore.exactlin import (
    ZLattice,
    column,
    complete_basis,
    determinant,
    dual_lattice,
    hermite_form,
    hstack,
    identity,
    integer_kernel,
    intersect_subspace,
    kernel_basis,
    pfaffian,
    rat_matrix,
    rational,
    smith_form,
    span_basis,
    sublattice_index,
)
from tests.conftest import parallelepiped_point_count


def _random_integer_matrix(rng: random.Random, rows: int, cols: int) -> ImmutableMatrix:
    return ImmutableMatrix(rows, cols, [rng.randint(-9, 9) for _ in range(rows * cols)])


def _is_row_hermite(H: ImmutableMatrix) -> bool:
    last_pivot = -1
    for r in range(H.rows):
        nonzero = [c for c in range(H.cols) if H[r, c] != 0]
        if not nonzero:
            return all(not any(H[k, :]) for k in range(r, H.rows))
        c = nonzero[0]
        if c <= last_pivot or H[r, c] <= 0:
            return False
        if any(not (0 <= H[k, c] < H[r, c]) for k in range(r)):
            return False
        last_pivot = c
    return True


def _random_skew(rng: random.Random, k: int) -> ImmutableMatrix:
    entries = [[0] * k for _ in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            v = rng.randint(-5, 5)
            entries[i][j], entries[j][i] = v, -v
    return ImmutableMatrix(entries)


class TestRational:
    def test_fraction_string_is_reduced(self):
        assert rational("3/6") == Rational(1, 2)

    def test_integer_passes(self):
        assert rational(-4) == -4

    def test_float_rejected(self):
        with pytest.raises(TypeError):
            rational(0.5)

    def test_decimal_string_rejected(self):
        with pytest.raises(TypeError):
            rational("0.5")

    def test_bool_rejected(self):
        with pytest.raises(TypeError):
            rational(True)


class TestHermiteForm:
    def test_identity_is_canonical(self):
        H, U = hermite_form(identity(3))
        assert H == identity(3)
        assert U == identity(3)

    def test_upper_triangular_golden(self):
        M = rat_matrix([[2, 4], [0, 3]])
        H, U = hermite_form(M)
        assert H == rat_matrix([[2, 1], [0, 3]])
        assert U * M == H

    def test_permutation_case(self):
        M = rat_matrix([[0, 1], [1, 0]])
        H, U = hermite_form(M)
        assert H == identity(2)
        assert U == M

    def test_equal_entries_in_pivot_column(self):
        M = rat_matrix([[3], [3]])
        H, U = hermite_form(M)
        assert H == rat_matrix([[3], [0]])
        assert U * M == H

    def test_random_matrices(self):
        rng = random.Random(11)
        for _ in range(40):
            M = _random_integer_matrix(rng, rng.randint(1, 5), rng.randint(1, 5))
            H, U = hermite_form(M)
            assert U * M == H
            assert abs(U.det()) == 1
            assert _is_row_hermite(H)

    def test_rejects_fractions(self):
        with pytest.raises(ValueError):
            hermite_form(rat_matrix([["1/2"]]))


class TestSmithForm:
    def test_identity(self):
        assert smith_form(identity(4)).D == identity(4)

    def test_two_by_two_skew(self):
        assert smith_form(rat_matrix([[0, 2], [-2, 0]])).elementary_divisors == (2, 2)

    def test_filiform_shaped_skew(self):
        assert smith_form(rat_matrix([[0, -6], [6, 0]])).elementary_divisors == (6, 6)

    def test_divisibility_fix(self):
        dec = smith_form(rat_matrix([[2, 0], [0, 3]]))
        assert dec.elementary_divisors == (1, 6)

    def test_pivot_equal_to_entry_below(self):
        M = rat_matrix([[1, 0], [1, 1]])
        dec = smith_form(M)
        assert dec.D == identity(2)
        assert dec.U * M * dec.V == dec.D

    def test_odd_skew_matrix(self):
        M = rat_matrix([[0, 1, 1], [-1, 0, 1], [-1, -1, 0]])
        dec = smith_form(M)
        assert dec.elementary_divisors == (1, 1, 0)
        assert dec.U * M * dec.V == dec.D

    def test_repeated_entries(self):
        dec = smith_form(rat_matrix([[2, 2], [2, 2]]))
        assert dec.elementary_divisors == (2, 0)

    def test_coprime_row_uses_bezout(self):
        M = rat_matrix([[3, 5]])
        dec = smith_form(M)
        assert dec.elementary_divisors == (1,)
        assert dec.U * M * dec.V == dec.D

    def test_zero_matrix(self):
        dec = smith_form(ImmutableMatrix.zeros(2, 3))
        assert dec.elementary_divisors == (0, 0)
        assert dec.rank == 0

    @pytest.mark.parametrize("seed", range(3))
    def test_random_matrices(self, seed):
        rng = random.Random(seed)
        for _ in range(15):
            rows, cols = rng.randint(1, 6), rng.randint(1, 6)
            M = _random_integer_matrix(rng, rows, cols)
            dec = smith_form(M)
            assert dec.U * M * dec.V == dec.D
            assert abs(dec.U.det()) == 1
            assert abs(dec.V.det()) == 1
            d = dec.elementary_divisors
            assert all(x >= 0 for x in d)
            for a, b in zip(d, d[1:]):
                assert (a == 0 and b == 0) or (a != 0 and b % a == 0)
            for i in range(rows):
                for j in range(cols):
                    if i != j:
                        assert dec.D[i, j] == 0
            if rows == cols:
                assert abs(dec.D.det()) == abs(M.det())


class TestKernelBasis:
    def test_zero_matrix_gives_full_basis(self):
        assert len(kernel_basis(ImmutableMatrix.zeros(3, 3))) == 3

    def test_invertible_gives_empty(self):
        assert kernel_basis(rat_matrix([[0, 1], [-1, 0]])) == []

    def test_filiform_skew_form_at_x1_star(self):
        # only ⟨l, [X4, X2]⟩ = 1 survives
        B = ImmutableMatrix.zeros(4, 4).as_mutable()
        B[3, 1], B[1, 3] = 1, -1
        kernel = span_basis(kernel_basis(ImmutableMatrix(B)), 4)
        assert kernel == [column([1, 0, 0, 0]), column([0, 0, 1, 0])]

    def test_rank_nullity(self):
        rng = random.Random(5)
        for _ in range(20):
            M = _random_integer_matrix(rng, rng.randint(1, 4), rng.randint(1, 5))
            K = kernel_basis(M)
            for v in K:
                assert not any(M * v)
            assert M.rank() + len(K) == M.cols


class TestIntegerKernel:
    def test_plane_kernel_is_saturated(self):
        K = integer_kernel(rat_matrix([[1, 1, 1]]))
        assert K.cols == 2
        lattice = ZLattice(K)
        assert lattice.contains(column([1, -1, 0]))
        assert lattice.contains(column([0, 1, -1]))

    def test_empty_constraint_is_identity(self):
        assert integer_kernel(ImmutableMatrix.zeros(0, 3)) == identity(3)


class TestZLattice:
    def test_equality_up_to_unimodular_change(self):
        assert ZLattice(rat_matrix([[1, 1], [0, 1]])) == ZLattice.standard(2)
        assert hash(ZLattice(rat_matrix([[1, 1], [0, 1]]))) == hash(ZLattice.standard(2))

    def test_different_lattices_differ(self):
        assert ZLattice(rat_matrix([[2, 0], [0, 1]])) != ZLattice.standard(2)

    def test_dependent_columns_rejected(self):
        with pytest.raises(NotFullRank):
            ZLattice(rat_matrix([[1, 2], [2, 4]]))

    def test_contains_uses_integral_coordinates(self):
        L = ZLattice(rat_matrix([[1, 0], [0, "1/2"]]))
        assert L.contains(column([3, "1/2"]))
        assert not L.contains(column(["1/2", 0]))

    def test_from_generators_drops_dependencies(self):
        L = ZLattice.from_generators([column([2, 0]), column([0, 2]), column([1, 1])], 2)
        assert L == ZLattice(rat_matrix([[2, 1], [0, 1]]))


class TestSublatticeIndex:
    def test_identical_lattices(self):
        assert sublattice_index(ZLattice.standard(2), ZLattice.standard(2)) == 1

    def test_skew_columns(self):
        L0 = ZLattice(rat_matrix([[0, 2], [-2, 0]]))
        assert sublattice_index(ZLattice.standard(2), L0) == 4

    def test_six_by_three(self):
        L0 = ZLattice(rat_matrix([[6, 0], [0, 3]]))
        assert sublattice_index(ZLattice.standard(2), L0) == 18

    def test_unimodular_shear(self):
        L0 = ZLattice(rat_matrix([[1, 1], [0, 1]]))
        assert sublattice_index(ZLattice.standard(2), L0) == 1

    def test_not_a_sublattice(self):
        with pytest.raises(NotASublattice):
            sublattice_index(ZLattice.standard(2), ZLattice(rat_matrix([["1/2", 0], [0, 1]])))

    def test_rank_mismatch(self):
        with pytest.raises(RankMismatch):
            sublattice_index(ZLattice.standard(2), ZLattice(rat_matrix([[1], [0]])))

    def test_brute_force_oracle_small(self):
        self._oracle(random.Random(3), 15)

    @pytest.mark.acceptance
    def test_brute_force_oracle_full(self):
        self._oracle(random.Random(2024), 100)

    @staticmethod
    def _oracle(rng: random.Random, cases: int) -> None:
        done = 0
        while done < cases:
            k = rng.randint(1, 3)
            B = ImmutableMatrix(k, k, [rng.randint(-6, 6) for _ in range(k * k)])
            det = abs(B.det())
            if det == 0 or det > 100:
                continue
            assert sublattice_index(ZLattice.standard(k), ZLattice(B)) == parallelepiped_point_count(B)
            done += 1


class TestDualLattice:
    def test_identity(self):
        assert dual_lattice(ZLattice.standard(3)) == ZLattice.standard(3)

    def test_filiform_lattice(self):
        L = ZLattice(rat_matrix([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 6]]))
        expected = rat_matrix([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, "1/6"]])
        assert dual_lattice(L) == ZLattice(expected)

    def test_heisenberg_lattice(self):
        L = ZLattice(rat_matrix([[1, 0, 0], [0, 1, 0], [0, 0, "1/2"]]))
        assert dual_lattice(L) == ZLattice(rat_matrix([[1, 0, 0], [0, 1, 0], [0, 0, 2]]))

    def test_involution(self):
        rng = random.Random(9)
        for _ in range(10):
            B = ImmutableMatrix(3, 3, [Rational(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(9)])
            if B.det() == 0:
                continue
            L = ZLattice(B)
            assert dual_lattice(dual_lattice(L)) == L

    def test_not_full_rank(self):
        with pytest.raises(NotFullRank):
            dual_lattice(ZLattice(rat_matrix([[1], [0]])))


class TestSaturationAndCompletion:
    def test_intersection_with_centre(self):
        L = ZLattice(rat_matrix([[1, 0, 0], [0, 1, 0], [0, 0, "1/2"]]))
        M = intersect_subspace(L, [column([0, 0, 1])])
        assert M == ZLattice(rat_matrix([[0], [0], ["1/2"]]))

    def test_completion_is_unimodular(self):
        inner = ZLattice(rat_matrix([[1], [1]]))
        extra = complete_basis(inner, ZLattice.standard(2))
        assert len(extra) == 1
        assert abs(determinant(hstack(inner.vectors() + extra, 2))) == 1

    def test_unsaturated_inner_rejected(self):
        with pytest.raises(NotASublattice):
            complete_basis(ZLattice(rat_matrix([[2], [0]])), ZLattice.standard(2))

    def test_inner_outside_outer_rejected(self):
        with pytest.raises(NotASublattice):
            complete_basis(ZLattice(rat_matrix([["1/2"], [0]])), ZLattice.standard(2))


class TestPfaffian:
    def test_two_by_two(self):
        assert pfaffian(rat_matrix([[0, 5], [-5, 0]])) == 5

    def test_four_by_four_expansion(self):
        a01, a02, a03, a12, a13, a23 = 1, 2, 3, 4, 5, 6
        A = rat_matrix(
            [
                [0, a01, a02, a03],
                [-a01, 0, a12, a13],
                [-a02, -a12, 0, a23],
                [-a03, -a13, -a23, 0],
            ]
        )
        assert pfaffian(A) == a01 * a23 - a02 * a13 + a03 * a12

    def test_odd_size_is_zero(self):
        assert pfaffian(ImmutableMatrix.zeros(3, 3)) == 0

    def test_square_is_determinant(self):
        rng = random.Random(1)
        for k in (2, 4, 6):
            A = _random_skew(rng, k)
            assert pfaffian(A) ** 2 == A.det()
