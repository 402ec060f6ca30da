# Version: v1.1
"""
nilmoore.multiplicity — The skew form B_l, the matrix A_l, c(Ω), the
Corwin–Greenleaf multiplicity, the two-step closed form and the Moore verdict.

    B_l(X, Y) = ⟨l, [X, Y]⟩            𝔤(l) = ker B_l
    A_l = (⟨l, [v_i, v_j]⟩)_{s < i, j ≤ n}   for a Malcev basis through 𝔤(l)
    c(Ω) = det(A_f)^{-1/2} = 1 / |Pf(A_f)|
    mult = Σ_Ω c(Ω) over Γ-classes Ω of O ∩ 𝔤*_Γ

For two-step algebras every class has the same c, and mult = |Pf(A_l)|,
count = det(A_l), so mult² = count.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from sympy import ImmutableMatrix, Integer, Rational

from nilmoore import config
from nilmoore.config import logger
from nilmoore.errors import (
    EmptySpectrum,
    FullStabilizer,
    NotInDualLattice,
    StepTooLarge,
    UnsupportedStep,
)
from nilmoore.exactlin import RatMatrix, determinant, is_integral, kernel_basis, pfaffian, span_basis
from nilmoore.lattice_subgroup import LatticeSubgroup, MalcevBasis, weak_malcev_through
from nilmoore.nilpotent import AlgebraElement, DualElement, LieAlgebra, is_two_step


@dataclass(frozen=True)
class SkewFormReport:
    l: DualElement
    B: RatMatrix
    stabilizer: tuple[AlgebraElement, ...]

    @property
    def is_full_stabilizer(self) -> bool:
        return len(self.stabilizer) == self.B.rows


@dataclass(frozen=True)
class AMatrixReport:
    malcev: MalcevBasis
    A: RatMatrix
    det: Integer
    pfaffian: Integer

    @property
    def c_omega(self) -> Rational:
        return Rational(1, abs(self.pfaffian))


@dataclass(frozen=True)
class MooreVerdict:
    mult: Rational
    count: int

    @property
    def mult_squared(self) -> Rational:
        return self.mult**2

    @property
    def holds(self) -> bool:
        return self.mult_squared == self.count

    @property
    def inequality_holds(self) -> bool:
        return bool(self.mult <= self.count)


@dataclass(frozen=True)
class OrbitReport:
    """Everything computed for one functional."""

    l: DualElement
    skew: SkewFormReport
    a: Optional[AMatrixReport]
    count: int
    mult: Rational
    method: str

    @property
    def verdict(self) -> MooreVerdict:
        return MooreVerdict(self.mult, self.count)


# ---------------------------------------------------------------------------
# Skew form and integrality
# ---------------------------------------------------------------------------


def skew_form(g: LieAlgebra, l: DualElement) -> SkewFormReport:
    n = g.n
    e = [g.basis_vector(i) for i in range(n)]
    entries = [[g.pairing(l, g.bracket(e[i], e[j])) for j in range(n)] for i in range(n)]
    B = ImmutableMatrix(entries) if n else ImmutableMatrix.zeros(0, 0)
    stabilizer = span_basis(kernel_basis(B), n)
    return SkewFormReport(ImmutableMatrix(l), B, tuple(stabilizer))


def in_dual_lattice(gamma: LatticeSubgroup, l: DualElement) -> bool:
    """True iff ⟨l, v⟩ ∈ Z for every basis vector v of log Γ."""
    return is_integral(ImmutableMatrix(gamma.log_basis.basis.T * l))


def restriction_to_derived(g: LieAlgebra, f: DualElement) -> tuple:
    """f restricted to [𝔤, 𝔤], as pairings with a fixed basis."""
    return tuple(g.pairing(f, v) for v in g.derived_algebra())


# ---------------------------------------------------------------------------
# A_l
# ---------------------------------------------------------------------------


def a_matrix(
    gamma: LatticeSubgroup,
    l: DualElement,
    *,
    malcev: Optional[MalcevBasis] = None,
) -> AMatrixReport:
    """A_l on the trailing vectors of a Malcev basis through 𝔤(l).

    Raises:
        NotInDualLattice: If l is not integral on log Γ.
        FullStabilizer: If 𝔤(l) = 𝔤; the multiplicity is then 1.
        ChainNotFound: Propagated from the Malcev construction.
    """
    g = gamma.algebra
    if not in_dual_lattice(gamma, l):
        raise NotInDualLattice(f"{g.describe(l, dual=True)} is not integral on log Γ")
    skew = skew_form(g, l)
    if skew.is_full_stabilizer:
        raise FullStabilizer(f"{g.describe(l, dual=True)} vanishes on [𝔤, 𝔤]")
    basis = malcev if malcev is not None else weak_malcev_through(gamma, skew.stabilizer)
    trailing = basis.trailing
    A = ImmutableMatrix(
        [[g.pairing(l, g.bracket(u, v)) for v in trailing] for u in trailing]
    )
    assert is_integral(A), "A_l must be integral for l in the integral dual"
    det = Integer(determinant(A))
    pf = Integer(pfaffian(A))
    assert pf**2 == det and det > 0, "Pf(A_l)^2 must equal det(A_l) > 0"
    logger.debug(f"A_l = {A.tolist()}, det = {det}, Pf = {pf}")
    return AMatrixReport(basis, A, det, pf)


def c_omega(gamma: LatticeSubgroup, f: DualElement) -> Rational:
    """det(A_f)^{-1/2}, or 1 on a one-point orbit."""
    if skew_form(gamma.algebra, f).is_full_stabilizer:
        if not in_dual_lattice(gamma, f):
            raise NotInDualLattice(f"{gamma.algebra.describe(f, dual=True)} is not integral on log Γ")
        return Integer(1)
    return a_matrix(gamma, f).c_omega


# ---------------------------------------------------------------------------
# Multiplicities
# ---------------------------------------------------------------------------


def _flat_report(gamma: LatticeSubgroup, l: DualElement, skew: SkewFormReport) -> OrbitReport:
    mult = Integer(1) if in_dual_lattice(gamma, l) else Integer(0)
    return OrbitReport(l, skew, None, int(mult), mult, "flat")


def multiplicity_two_step(gamma: LatticeSubgroup, l: DualElement) -> OrbitReport:
    """Closed form: mult = |Pf(A_l)|, count = det(A_l).

    Raises:
        StepTooLarge: For step > 2.
        NotInDualLattice: If l is not integral on log Γ.
    """
    g = gamma.algebra
    if not is_two_step(g):
        raise StepTooLarge(f"the closed form needs step ≤ 2, algebra has step {g.step}")
    if not in_dual_lattice(gamma, l):
        raise NotInDualLattice(f"{g.describe(l, dual=True)} is not integral on log Γ")
    skew = skew_form(g, l)
    if skew.is_full_stabilizer:
        return _flat_report(gamma, l, skew)
    a = a_matrix(gamma, l)
    mult = abs(a.pfaffian)
    report = OrbitReport(l, skew, a, int(a.det), mult, "closed-form")
    assert report.verdict.holds, "two-step orbits must satisfy mult² = count"
    return report


def multiplicity_corwin_greenleaf(
    gamma: LatticeSubgroup, l: DualElement, orbit_classes: Sequence[DualElement]
) -> Rational:
    """Σ c(Ω) over the supplied Γ-class representatives of O_l ∩ 𝔤*_Γ.

    Raises:
        EmptySpectrum: If no classes are given (multiplicity 0).
    """
    if not orbit_classes:
        raise EmptySpectrum(
            f"{gamma.algebra.describe(l, dual=True)}: orbit does not meet 𝔤*_Γ, multiplicity 0"
        )
    g = gamma.algebra
    cache: dict[tuple, Rational] = {}
    total = Integer(0)
    for f in orbit_classes:
        key = restriction_to_derived(g, f)
        if key not in cache:
            cache[key] = c_omega(gamma, f)
        total += cache[key]
    logger.info(f"Corwin–Greenleaf sum over {len(orbit_classes)} classes: {total}")
    return total


def evaluate(
    gamma: LatticeSubgroup,
    l: DualElement,
    orbit_classes: Optional[Sequence[DualElement]] = None,
) -> OrbitReport:
    """Dispatch by step: closed form for step ≤ 2, otherwise class sum.

    Raises:
        UnsupportedStep: Step ≥ 3 with a non-flat orbit and no classes.
    """
    g = gamma.algebra
    if is_two_step(g):
        return multiplicity_two_step(gamma, l)
    skew = skew_form(g, l)
    if skew.is_full_stabilizer:
        return _flat_report(gamma, l, skew)
    if orbit_classes is None:
        raise UnsupportedStep(
            f"step {g.step}: multiplicity needs the Γ-orbit classes of O ∩ 𝔤*_Γ"
        )
    mult = multiplicity_corwin_greenleaf(gamma, l, orbit_classes)
    a = a_matrix(gamma, l) if in_dual_lattice(gamma, l) else None
    return OrbitReport(l, skew, a, len(orbit_classes), mult, "corwin-greenleaf")


def moore_check(
    gamma: LatticeSubgroup,
    l: DualElement,
    orbit_classes: Optional[Sequence[DualElement]] = None,
) -> MooreVerdict:
    """mult² = count, plus Moore's inequality mult ≤ count."""
    verdict = evaluate(gamma, l, orbit_classes).verdict
    if not verdict.inequality_holds:
        logger.warning(
            f"mult {verdict.mult} exceeds count {verdict.count}: "
            "the supplied orbit classes are inconsistent"
        )
    return verdict


def evaluate_many(
    gamma: LatticeSubgroup,
    functionals: Sequence[DualElement],
    workers: Optional[int] = None,
) -> list[OrbitReport]:
    """Closed-form reports for many functionals, in input order."""
    workers = config.DEFAULT_WORKERS if workers is None else workers
    if workers <= 1:
        return [multiplicity_two_step(gamma, l) for l in functionals]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda l: multiplicity_two_step(gamma, l), functionals))
