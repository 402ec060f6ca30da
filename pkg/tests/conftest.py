# Version: v3.0
"""
tests/conftest.py — Shared algebras, lattice subgroups and random-case builders.

Every randomized helper takes an explicit ``random.Random`` so each test is
reproducible from its own seed.
"""

import random
from dataclasses import dataclass
from itertools import product
from pathlib import Path

import pytest
from sympy import ImmutableMatrix, Rational

from nilmoore import metrics
from nilmoore.exactlin import ZLattice, column, hstack, rat_matrix
from nilmoore.lattice_subgroup import LatticeSubgroup, integral_dual, verify_lattice_subgroup
from nilmoore.nilpotent import LieAlgebra, validate
from nilmoore.orbits import filiform_algebra, filiform_lattice_subgroup

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

# Small closure budgets keep the default suite fast; acceptance tests pass
# their own.
FAST_CLOSURE = {"word_length": 3, "samples": 20, "seed": 0}


@pytest.fixture(autouse=True)
def _clear_metrics_history():
    """Keep metrics history isolated between tests."""
    metrics.reset_history()
    yield
    metrics.reset_history()


# ---------------------------------------------------------------------------
# Named algebras
# ---------------------------------------------------------------------------


def heisenberg() -> LieAlgebra:
    return validate(3, [(0, 1, 2, 1)], ["X1", "X2", "X3"])


def heisenberg_gamma() -> LatticeSubgroup:
    L = ZLattice(rat_matrix([[1, 0, 0], [0, 1, 0], [0, 0, "1/2"]]))
    return verify_lattice_subgroup(heisenberg(), L, **FAST_CLOSURE)


def abelian(n: int) -> LieAlgebra:
    return validate(n, [])


def abelian_gamma(n: int) -> LatticeSubgroup:
    return verify_lattice_subgroup(abelian(n), ZLattice.standard(n), **FAST_CLOSURE)


@pytest.fixture(scope="session")
def heis() -> LieAlgebra:
    return heisenberg()


@pytest.fixture(scope="session")
def heis_gamma() -> LatticeSubgroup:
    return heisenberg_gamma()


@pytest.fixture(scope="session")
def fil() -> LieAlgebra:
    return filiform_algebra()


@pytest.fixture(scope="session")
def fil_gamma() -> LatticeSubgroup:
    return filiform_lattice_subgroup()


@pytest.fixture(scope="session")
def ab2_gamma() -> LatticeSubgroup:
    return abelian_gamma(2)


@pytest.fixture()
def fixtures_dir() -> Path:
    return FIXTURES


def vec(*values) -> ImmutableMatrix:
    return column(values)


# ---------------------------------------------------------------------------
# Random two-step cases
# ---------------------------------------------------------------------------


@dataclass
class TwoStepCase:
    gamma: LatticeSubgroup
    l: ImmutableMatrix


def random_two_step_algebra(rng: random.Random, max_dim: int = 8) -> tuple[LieAlgebra, int]:
    """Generators X1..Xa with brackets in the span of the central Z's."""
    a = rng.randint(2, 4)
    c = rng.randint(1, min(3, max_dim - a))
    n = a + c
    structure = []
    for i in range(a):
        for j in range(i + 1, a):
            for k in range(a, n):
                coef = rng.choice((-1, 0, 0, 1))
                if coef:
                    structure.append((i, j, k, coef))
    return validate(n, structure), a


def random_two_step_lattice(rng: random.Random, g: LieAlgebra, a: int) -> ZLattice:
    """Z p_1 ⊕ … ⊕ Z p_a ⊕ C, with C ⊇ ½[p_i, p_j] full rank in the centre span."""
    n = g.n
    while True:
        P = [[rng.choice((-1, 0, 1)) for _ in range(a)] for _ in range(a)]
        if ImmutableMatrix(P).det() != 0:
            break
    p = [column([P[r][c] for r in range(a)] + [0] * (n - a)) for c in range(a)]
    central = [g.bracket(p[i], p[j]) / 2 for i in range(a) for j in range(i + 1, a)]
    central += [column([0] * k + [Rational(1, rng.choice((1, 2)))] + [0] * (n - k - 1)) for k in range(a, n)]
    C = ZLattice.from_generators(central, n)
    return ZLattice(hstack(p + C.vectors(), n))


def random_two_step_case(
    rng: random.Random, *, max_window: int = 5000, closure: dict | None = None
) -> TwoStepCase:
    """A verified two-step lattice subgroup and an integral functional.

    Cases whose enumeration window would exceed ``max_window`` are redrawn.
    """
    from nilmoore.multiplicity import skew_form

    closure = closure or FAST_CLOSURE
    while True:
        g, a = random_two_step_algebra(rng)
        L = random_two_step_lattice(rng, g, a)
        gamma = verify_lattice_subgroup(g, L, **closure)
        dual = integral_dual(gamma)
        coeffs = [rng.randint(-2, 2) for _ in range(g.n)]
        l = ImmutableMatrix(dual.basis * column(coeffs))
        skew = skew_form(g, l)
        m = g.n - len(skew.stabilizer)
        if m and _window_estimate(gamma, l, m) > max_window:
            continue
        return TwoStepCase(gamma, l)


def _window_estimate(gamma: LatticeSubgroup, l, m: int) -> int:
    from nilmoore.multiplicity import a_matrix

    return int(a_matrix(gamma, l).det) ** m


# ---------------------------------------------------------------------------
# Brute-force lattice oracle
# ---------------------------------------------------------------------------


def parallelepiped_point_count(B: ImmutableMatrix) -> int:
    """#{x ∈ Z^k : B⁻¹x ∈ [0, 1)^k} for a nonsingular integer k×k matrix B."""
    k = B.rows
    corners = [
        B * column(bits) for bits in product((0, 1), repeat=k)
    ]
    lo = [min(c[i] for c in corners) for i in range(k)]
    hi = [max(c[i] for c in corners) for i in range(k)]
    Binv = B.inv()
    count = 0
    for x in product(*(range(int(lo[i]), int(hi[i]) + 1) for i in range(k))):
        y = Binv * column(x)
        if all(0 <= y[i] < 1 for i in range(k)):
            count += 1
    return count
