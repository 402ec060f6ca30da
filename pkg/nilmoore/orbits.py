# Version: v1.4
"""
nilmoore.orbits — Coadjoint orbits and Γ-orbit counting.

Two independent paths count the Γ-classes of O ∩ 𝔤*_Γ for two-step groups:

1. ``count_orbits_two_step``: Smith form of A_l in Malcev dual coordinates.
   Γ·f = f + Σ Z e_j, so the classes are the residues of Z^{n−s} modulo
   the columns of A_l, and there are det(A_l) of them.
2. ``two_step_enumeration_window`` + ``enumerate_gamma_orbits``: union-find
   over the box [0, N)^{n−s}, N = det(A_l), joining each point with its
   images under coAd of the Γ generators computed directly from coAd_exp.

The built-in four-dimensional filiform example lives here too: its window
of 18 classes, the closed form of its coadjoint action, and the rational
polarization used for it.
"""

import random
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Hashable, Optional, Sequence

from sympy import ImmutableMatrix, Rational, floor

from nilmoore import config, metrics
from nilmoore.config import logger
from nilmoore.errors import (
    NotInDualLattice,
    StepTooLarge,
    UnsupportedComputation,
    WindowNotInvariantWarning,
)
from nilmoore.exactlin import (
    RatMatrix,
    ZLattice,
    annihilator,
    column,
    intersect_subspace,
    is_integral,
    rat_matrix,
    smith_form,
    sublattice_index,
)
from nilmoore.lattice_subgroup import (
    LatticeSubgroup,
    MalcevBasis,
    Word,
    group_log,
    integral_dual,
    verify_lattice_subgroup,
    weak_malcev_through,
)
from nilmoore.multiplicity import (
    AMatrixReport,
    MooreVerdict,
    OrbitReport,
    a_matrix,
    evaluate_many,
    in_dual_lattice,
    multiplicity_corwin_greenleaf,
    restriction_to_derived,
    skew_form,
)
from nilmoore.nilpotent import (
    DualElement,
    GroupElement,
    LieAlgebra,
    coAd_exp,
    is_two_step,
    product_of_exponentials,
    validate,
)

Key = Hashable
Action = Callable[[Key], Key]


@dataclass(frozen=True)
class AffineOrbit:
    """l + 𝔤(l)^⊥ for a two-step algebra."""

    basepoint: DualElement
    stabilizer: tuple[RatMatrix, ...]
    direction: tuple[RatMatrix, ...]

    def contains(self, f: DualElement) -> bool:
        diff = f - self.basepoint
        return all((diff.T * v)[0] == 0 for v in self.stabilizer)


@dataclass(frozen=True)
class GammaOrbitClasses:
    representatives: tuple
    method: str

    @property
    def count(self) -> int:
        return len(self.representatives)


def _require_two_step(g: LieAlgebra) -> None:
    if not is_two_step(g):
        raise StepTooLarge(
            f"step {g.step}: affine orbits and closed-form counts need step ≤ 2 "
            "(use the counterexample command for the filiform fixture)"
        )


def two_step_orbit(g: LieAlgebra, l: DualElement) -> AffineOrbit:
    _require_two_step(g)
    stabilizer = skew_form(g, l).stabilizer
    return AffineOrbit(
        ImmutableMatrix(l), stabilizer, tuple(annihilator(list(stabilizer), g.n))
    )


# ---------------------------------------------------------------------------
# Closed-form count (Smith residues)
# ---------------------------------------------------------------------------


def count_orbits_two_step(gamma: LatticeSubgroup, l: DualElement) -> GammaOrbitClasses:
    """Γ-classes of O_l ∩ 𝔤*_Γ as Smith-form residues.

    In trailing Malcev dual coordinates the integral points of the orbit form
    𝔏 = Z^(n-s), and exp(v_j) translates them by e_j, the j-th column of A_l.
    The count is [𝔏 : 𝔏₀] with 𝔏₀ = span_Z{e_j}, which equals det(A_l).
    """
    g = gamma.algebra
    _require_two_step(g)
    if not in_dual_lattice(gamma, l):
        raise NotInDualLattice(f"{g.describe(l, dual=True)} is not integral on log Γ")
    if skew_form(g, l).is_full_stabilizer:
        return GammaOrbitClasses((ImmutableMatrix(l),), "closed-form")

    a = a_matrix(gamma, l)
    basis, s = a.malcev, a.malcev.s
    integral_points = ZLattice.standard(a.A.rows)
    translations = ZLattice(a.A)
    count = sublattice_index(integral_points, translations)
    base = basis.coordinates_of(l)
    dec = smith_form(a.A)
    U_inv = dec.U.inv()
    reps = []
    for residue in product(*(range(d) for d in dec.elementary_divisors)):
        shift = U_inv * column(residue)
        coords = ImmutableMatrix(
            [base[i] for i in range(s)] + [base[s + i] + shift[i] for i in range(shift.rows)]
        )
        reps.append(basis.functional_from(coords))
    assert len(reps) == count == a.det, "[𝔏 : 𝔏₀] must match the Smith residues and det(A_l)"
    logger.info(
        f"closed-form count {count} = [𝔏 : 𝔏₀] from elementary divisors {dec.elementary_divisors}"
    )
    return GammaOrbitClasses(tuple(reps), "closed-form")


# ---------------------------------------------------------------------------
# Independent enumeration
# ---------------------------------------------------------------------------


class _UnionFind:
    def __init__(self, size: int) -> None:
        self.parent = list(range(size))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _edges(
    chunk: Sequence[tuple[int, Key]],
    index: dict,
    actions: Sequence[Action],
    wrap: Optional[Action],
) -> tuple[list[tuple[int, int]], int]:
    edges, escaped = [], 0
    for i, point in chunk:
        for act in actions:
            image = act(point)
            if wrap is not None:
                image = wrap(image)
            j = index.get(image)
            if j is None:
                escaped += 1
            elif j != i:
                edges.append((i, j))
    return edges, escaped


def enumerate_gamma_orbits(
    points: Sequence[Key],
    actions: Sequence[Action],
    *,
    wrap: Optional[Action] = None,
    workers: Optional[int] = None,
    expect_escapes: bool = False,
) -> GammaOrbitClasses:
    """Union-find of a finite window under generator actions.

    Each class is represented by its smallest point; representatives are
    returned sorted. The result does not depend on ``workers``.
    With ``expect_escapes`` the window is known not to be closed and escaped
    images are only logged at DEBUG.

    Warns:
        WindowNotInvariantWarning: If some image leaves the window.
    """
    workers = config.DEFAULT_WORKERS if workers is None else max(1, workers)
    index = {p: i for i, p in enumerate(points)}
    indexed = list(enumerate(points))
    with metrics.timer() as t:
        if workers == 1:
            results = [_edges(indexed, index, actions, wrap)]
        else:
            chunks = [indexed[k::workers] for k in range(workers)]
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(lambda c: _edges(c, index, actions, wrap), chunks))
        uf = _UnionFind(len(points))
        escaped = 0
        for edges, lost in results:
            escaped += lost
            for i, j in edges:
                uf.union(i, j)
        classes: dict[int, list[Key]] = {}
        for i, p in indexed:
            classes.setdefault(uf.find(i), []).append(p)
        reps = tuple(sorted(min(members) for members in classes.values()))
    if escaped:
        message = f"{escaped} generator images left the enumeration window"
        if expect_escapes:
            logger.debug(message)
        else:
            logger.warning(message)
            warnings.warn(message, WindowNotInvariantWarning, stacklevel=2)
    metrics.record_computation(
        kind="enumeration",
        elapsed_ms=t.elapsed_ms,
        window=len(points),
        classes=len(reps),
        workers=workers,
    )
    return GammaOrbitClasses(reps, "enumerated")


def coadjoint_actions(gamma: LatticeSubgroup, words: Sequence[Word]) -> list[Action]:
    """coAd(γ) for each word γ, acting on dual coordinate tuples."""
    g = gamma.algebra
    actions = []
    for word in words:
        M = GroupElement(g, group_log(gamma, word)).coAd()
        actions.append(lambda key, M=M: tuple(M * ImmutableMatrix(key)))
    return actions


def generator_words(gamma: LatticeSubgroup) -> list[Word]:
    return [((i, 1),) for i in range(gamma.n)]


@dataclass(frozen=True)
class EnumerationWindow:
    """Box [0, N)^{n−s} in Malcev dual coordinates with integer actions."""

    modulus: int
    malcev: MalcevBasis
    base: RatMatrix
    points: list = field(repr=False)
    actions: list = field(repr=False)

    def wrap(self, key: tuple) -> tuple:
        return tuple(c % self.modulus for c in key)

    def functional(self, key: tuple) -> DualElement:
        s = self.malcev.s
        coords = ImmutableMatrix([self.base[i] for i in range(s)] + list(key))
        return self.malcev.functional_from(coords)


def two_step_enumeration_window(
    gamma: LatticeSubgroup, l: DualElement, *, max_window: Optional[int] = None
) -> EnumerationWindow:
    """Fundamental window for the Γ-action on O_l ∩ 𝔤*_Γ.

    Coordinates are ⟨f, v_i⟩ for i > s in a Malcev basis through 𝔤(l).
    Generator shifts come from coAd_exp of the Γ generators, not from A_l;
    reduction modulo N is an identification inside each Γ-orbit because
    N·Z^{n−s} lies in the shift lattice.

    Raises:
        UnsupportedComputation: If N^{n−s} exceeds the configured window cap.
    """
    g = gamma.algebra
    _require_two_step(g)
    max_window = config.MAX_ENUMERATION_WINDOW if max_window is None else max_window
    if not in_dual_lattice(gamma, l):
        raise NotInDualLattice(f"{g.describe(l, dual=True)} is not integral on log Γ")
    skew = skew_form(g, l)
    basis = weak_malcev_through(gamma, skew.stabilizer)
    s, m = basis.s, g.n - basis.s
    base = basis.coordinates_of(l)
    shifts = []
    for v in gamma.generators():
        moved = basis.coordinates_of(coAd_exp(g, v) * l) - base
        assert is_integral(moved) and not any(moved[:s, :]), "coAd of Γ must preserve O ∩ 𝔤*_Γ"
        shifts.append(tuple(int(x) for x in moved[s:, :]))
    modulus = 1
    if m:
        modulus = abs(int(a_matrix(gamma, l, malcev=basis).det))
    size = modulus**m
    if size > max_window:
        raise UnsupportedComputation(
            f"enumeration window of {size} points exceeds MOORE_MAX_WINDOW={max_window}"
        )
    points = list(product(range(modulus), repeat=m))
    actions = [
        (lambda key, e=e: tuple(k + d for k, d in zip(key, e))) for e in shifts
    ]
    return EnumerationWindow(modulus, basis, base, points, actions)


def enumerate_two_step(
    gamma: LatticeSubgroup, l: DualElement, *, workers: Optional[int] = None
) -> GammaOrbitClasses:
    """Enumeration-path twin of count_orbits_two_step."""
    window = two_step_enumeration_window(gamma, l)
    classes = enumerate_gamma_orbits(
        window.points, window.actions, wrap=window.wrap, workers=workers
    )
    reps = tuple(window.functional(k) for k in classes.representatives)
    return GammaOrbitClasses(reps, "enumerated")


# ---------------------------------------------------------------------------
# Spectrum
# ---------------------------------------------------------------------------


def orbit_lattice_point(gamma: LatticeSubgroup, l: DualElement) -> Optional[DualElement]:
    """A point of (l + 𝔤(l)^⊥) ∩ 𝔤*_Γ, or None.

    In Malcev dual coordinates the orbit fixes the first s coordinates and
    frees the rest, so a point exists iff those s coordinates are integers.
    """
    g = gamma.algebra
    _require_two_step(g)
    if in_dual_lattice(gamma, l):
        return ImmutableMatrix(l)
    skew = skew_form(g, l)
    if skew.is_full_stabilizer:
        return None
    basis = weak_malcev_through(gamma, skew.stabilizer)
    coords = basis.coordinates_of(l)
    s = basis.s
    if not is_integral(coords[:s, :]):
        return None
    witness = ImmutableMatrix(
        [coords[i] for i in range(s)] + [floor(coords[i]) for i in range(s, g.n)]
    )
    return basis.functional_from(witness)


def spectrum_condition(gamma: LatticeSubgroup, l: DualElement) -> bool:
    """True iff the coadjoint orbit of l meets 𝔤*_Γ."""
    return orbit_lattice_point(gamma, l) is not None


@dataclass(frozen=True)
class SpectrumEntry:
    representative: DualElement
    lattice_coordinates: tuple[int, ...]
    window_points: int
    report: OrbitReport


def _orbit_key(g: LieAlgebra, f: DualElement, stabilizers: dict) -> tuple:
    restriction = restriction_to_derived(g, f)
    if restriction not in stabilizers:
        stabilizers[restriction] = skew_form(g, f).stabilizer
    stab = stabilizers[restriction]
    return (
        tuple(tuple(v) for v in stab),
        tuple(g.pairing(f, v) for v in stab),
    )


def enumerate_spectrum(
    gamma: LatticeSubgroup, bound: Optional[int] = None
) -> list[SpectrumEntry]:
    """Coadjoint orbits through dual-lattice points with coordinates in [−B, B].

    Rows are sorted by the lattice coordinates of their representative,
    which is the smallest such point on the orbit.
    """
    g = gamma.algebra
    _require_two_step(g)
    bound = config.DEFAULT_SPECTRUM_BOUND if bound is None else bound
    dual = integral_dual(gamma)
    groups: dict[tuple, list[tuple[int, ...]]] = {}
    stabilizers: dict = {}
    with metrics.timer() as t:
        for coords in product(range(-bound, bound + 1), repeat=g.n):
            f = ImmutableMatrix(dual.basis * column(coords))
            groups.setdefault(_orbit_key(g, f, stabilizers), []).append(coords)
        rep_coords = [min(members) for members in groups.values()]
        reps = [ImmutableMatrix(dual.basis * column(c)) for c in rep_coords]
        entries = [
            SpectrumEntry(f, c, len(members), report)
            for f, c, members, report in zip(
                reps, rep_coords, groups.values(), evaluate_many(gamma, reps)
            )
        ]
    entries.sort(key=lambda e: e.lattice_coordinates)
    metrics.record_computation(
        kind="spectrum", elapsed_ms=t.elapsed_ms, bound=bound, orbits=len(entries)
    )
    return entries


# ---------------------------------------------------------------------------
# The four-dimensional filiform example
# ---------------------------------------------------------------------------

FILIFORM_NAMES = ("X1", "X2", "X3", "X4")
# [X4, X2] = X1, [X4, X3] = X2
FILIFORM_BRACKETS = ((3, 1, 0, 1), (3, 2, 1, 1))
FILIFORM_LATTICE = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 6))
FILIFORM_PERIOD = 6
FILIFORM_T_RESIDUES = (0, 2, 4)


def filiform_algebra() -> LieAlgebra:
    return validate(4, FILIFORM_BRACKETS, FILIFORM_NAMES)


def filiform_lattice_subgroup(*, seed: Optional[int] = None) -> LatticeSubgroup:
    return verify_lattice_subgroup(
        filiform_algebra(), ZLattice(rat_matrix(FILIFORM_LATTICE)), seed=seed
    )


def filiform_functional(t, s) -> DualElement:
    """f_{t,s} = X1* + t X2* + (t²/2) X3* + (s/6) X4*."""
    t, s = Rational(t), Rational(s)
    return ImmutableMatrix([1, t, t**2 / 2, s / FILIFORM_PERIOD])


def filiform_parameters(f: DualElement) -> Optional[tuple[Rational, Rational]]:
    """(t, s) with f = f_{t,s}, or None when f is off the orbit of X1*."""
    if f[0] != 1 or f[2] != f[1] ** 2 / 2:
        return None
    return f[1], f[3] * FILIFORM_PERIOD


def filiform_window() -> list[tuple[int, int]]:
    return [(t, s) for t in FILIFORM_T_RESIDUES for s in range(FILIFORM_PERIOD)]


def filiform_wrap(key: tuple[int, int]) -> tuple[int, int]:
    return (key[0] % FILIFORM_PERIOD, key[1] % FILIFORM_PERIOD)


def filiform_actions(gamma: LatticeSubgroup) -> list[Action]:
    """Γ generators acting on (t, s) through coAd_exp."""
    g = gamma.algebra
    matrices = [coAd_exp(g, v) for v in gamma.generators()]

    def make(M: RatMatrix) -> Action:
        def act(key):
            params = filiform_parameters(M * filiform_functional(*key))
            if params is None:
                raise UnsupportedComputation("Γ moved a point off the orbit of X1*")
            return tuple(int(p) for p in params)

        return act

    return [make(M) for M in matrices]


def closed_form_action(t0, s0, r, s, t) -> DualElement:
    """coAd(exp rX2 · exp sX3 · exp 6tX4) applied to f_{t0,s0}, in closed form."""
    t0, s0, r, s, t = (Rational(x) for x in (t0, s0, r, s, t))
    moved = t0 - FILIFORM_PERIOD * t
    return ImmutableMatrix(
        [1, moved, moved**2 / 2, s0 / FILIFORM_PERIOD + s * t0 + r - FILIFORM_PERIOD * s * t]
    )


def verify_action_closed_form(
    g: LieAlgebra, *, samples: Optional[int] = None, seed: Optional[int] = None
) -> int:
    """Compare coAd_exp of BCH-folded products with the closed form.

    Returns:
        Number of random parameter tuples checked.
    """
    samples = config.DEFAULT_ACTION_SPOT_CHECKS if samples is None else samples
    rng = random.Random(config.DEFAULT_SEED if seed is None else seed)
    e = [g.basis_vector(i) for i in range(g.n)]
    for _ in range(samples):
        r, s, t = (rng.randint(-5, 5) for _ in range(3))
        t0 = Rational(rng.randint(-12, 12), rng.randint(1, 4))
        s0 = Rational(rng.randint(-12, 12), rng.randint(1, 4))
        log = product_of_exponentials(g, [r * e[1], s * e[2], FILIFORM_PERIOD * t * e[3]])
        got = coAd_exp(g, log) * filiform_functional(t0, s0)
        expected = closed_form_action(t0, s0, r, s, t)
        if got != expected:
            raise AssertionError(
                f"coAd mismatch at (t0, s0, r, s, t) = {(t0, s0, r, s, t)}: "
                f"{g.describe(got, dual=True)} vs {g.describe(expected, dual=True)}"
            )
    return samples


def parametrization_witness(g: LieAlgebra, t, s) -> DualElement:
    """coAd(exp((s/6) X2) · exp(−t X4)) · X1*, which equals f_{t,s}."""
    log = product_of_exponentials(
        g,
        [Rational(s, FILIFORM_PERIOD) * g.basis_vector(1), -Rational(t) * g.basis_vector(3)],
    )
    return coAd_exp(g, log) * g.basis_vector(0)


def polarization_holds(gamma: LatticeSubgroup, l: DualElement) -> bool:
    """𝔪 = span{X1, X2, X3} is a rational polarization at l."""
    g = gamma.algebra
    m = [g.basis_vector(i) for i in range(3)]
    isotropic = all(g.pairing(l, g.bracket(u, v)) == 0 for u in m for v in m)
    stab_dim = len(skew_form(g, l).stabilizer)
    maximal = 2 * len(m) == g.n + stab_dim
    integral = all(
        g.pairing(l, v).q == 1 for v in intersect_subspace(gamma.log_basis, m).vectors()
    )
    return g.is_subalgebra(m) and isotropic and maximal and integral


def is_filiform_pair(gamma: LatticeSubgroup) -> bool:
    g = gamma.algebra
    if g.n != 4:
        return False
    return (
        g.brackets == filiform_algebra().brackets
        and gamma.log_basis == ZLattice(rat_matrix(FILIFORM_LATTICE))
    )


def fixture_orbit_classes(
    gamma: LatticeSubgroup, l: DualElement
) -> Optional[list[DualElement]]:
    """The 18 window classes when (𝔤, Γ) is the filiform pair and l ∈ O_{X1*} ∩ 𝔤*_Γ."""
    if not is_filiform_pair(gamma) or not in_dual_lattice(gamma, l):
        return None
    if filiform_parameters(l) is None:
        return None
    classes = enumerate_gamma_orbits(
        filiform_window(), filiform_actions(gamma), wrap=filiform_wrap
    )
    return [filiform_functional(t, s) for t, s in classes.representatives]


@dataclass(frozen=True)
class CounterexampleReport:
    gamma: LatticeSubgroup
    l: DualElement
    classes: GammaOrbitClasses
    functionals: tuple[DualElement, ...]
    a: AMatrixReport
    c_omega: tuple[Rational, ...]
    mult: Rational
    verdict: MooreVerdict
    cross_check_count: int
    action_checks: int
    polarization: bool


def filiform_counterexample(
    *,
    spot_checks: Optional[int] = None,
    seed: Optional[int] = None,
) -> CounterexampleReport:
    """Moore's formula fails for the filiform group at Γ = exp Z X1 ⋯ exp 6Z X4."""
    with metrics.timer() as t:
        gamma = filiform_lattice_subgroup(seed=seed)
        g = gamma.algebra
        l = g.basis_vector(0)

        window = filiform_window()
        for key in window:
            if parametrization_witness(g, *key) != filiform_functional(*key):
                raise AssertionError(f"f_{key} is not reached from X1*")
            if not in_dual_lattice(gamma, filiform_functional(*key)):
                raise AssertionError(f"f_{key} is not integral on log Γ")
        classes = enumerate_gamma_orbits(window, filiform_actions(gamma), wrap=filiform_wrap)

        doubled = [
            (tt, ss)
            for tt in range(0, 2 * FILIFORM_PERIOD, 2)
            for ss in range(2 * FILIFORM_PERIOD)
        ]
        cross = enumerate_gamma_orbits(doubled, filiform_actions(gamma), expect_escapes=True)

        functionals = tuple(filiform_functional(*key) for key in classes.representatives)
        a = a_matrix(gamma, l)
        c_values = tuple(a_matrix(gamma, f).c_omega for f in functionals)
        mult = multiplicity_corwin_greenleaf(gamma, l, functionals)
        checks = verify_action_closed_form(g, samples=spot_checks, seed=seed)
        polar = polarization_holds(gamma, l)
    metrics.record_computation(
        kind="counterexample", elapsed_ms=t.elapsed_ms, count=classes.count, mult=str(mult)
    )
    verdict = MooreVerdict(mult, classes.count)
    logger.info(
        f"filiform: count {classes.count}, mult {mult}, det(A_l) {a.det}, "
        f"Moore formula {'holds' if verdict.holds else 'fails'}"
    )
    return CounterexampleReport(
        gamma=gamma,
        l=l,
        classes=classes,
        functionals=functionals,
        a=a,
        c_omega=c_values,
        mult=mult,
        verdict=verdict,
        cross_check_count=cross.count,
        action_checks=checks,
        polarization=polar,
    )


def two_step_counts_agree(gamma: LatticeSubgroup, l: DualElement) -> bool:
    """Closed-form count equals enumerated count."""
    return count_orbits_two_step(gamma, l).count == enumerate_two_step(gamma, l).count

