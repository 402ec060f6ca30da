# Version: v1.1
"""
nilmoore.report — Report models, exact serialization and table rendering.

Rationals cross the I/O boundary as canonical strings ("3", "-1/6"), never
as decimals. Structured output is the JSON dump of ``Report`` with a
"formatVersion" field; ``parse_report`` reads it back unchanged.
"""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field
from sympy import Rational

from nilmoore.config import FORMAT_VERSION
from nilmoore.exactlin import RatMatrix
from nilmoore.multiplicity import OrbitReport
from nilmoore.nilpotent import LieAlgebra
from nilmoore.orbits import CounterexampleReport, SpectrumEntry


def q(value) -> str:
    """Canonical exact string of a rational ("p/q" in lowest terms, q > 0)."""
    return str(Rational(value))


def vec(v: RatMatrix) -> list[str]:
    return [q(x) for x in v]


def mat(M: RatMatrix) -> list[list[str]]:
    return [[q(M[i, j]) for j in range(M.cols)] for i in range(M.rows)]


# ---------------------------------------------------------------------------
# Models
# ---------------------------------------------------------------------------


class AlgebraSummary(BaseModel):
    dimension: int
    names: list[str]
    step: int


class OrbitRow(BaseModel):
    """One functional: orbit data, multiplicity and the Moore verdict."""

    functional: str
    coordinates: list[str]
    witness: Optional[list[str]] = Field(
        None, description="Point of O ∩ 𝔤*_Γ used when the functional is not integral"
    )
    in_spectrum: bool = True
    stabilizer: list[list[str]] = Field(default_factory=list)
    malcev_basis: Optional[list[list[str]]] = None
    pass_through: Optional[int] = None
    malcev_kind: Optional[str] = None
    a_matrix: Optional[list[list[str]]] = None
    det: Optional[str] = None
    pfaffian: Optional[str] = None
    c_omega: Optional[str] = None
    count: int = 0
    mult: str = "0"
    mult_squared: str = "0"
    moore_holds: Optional[bool] = None
    inequality_holds: Optional[bool] = None
    method: str = ""
    note: Optional[str] = None


class SpectrumRow(BaseModel):
    representative: list[str]
    lattice_coordinates: list[int]
    window_points: int
    mult: str
    count: int
    moore_holds: bool


class ClassRow(BaseModel):
    t: str
    s: str
    functional: list[str]
    c_omega: str


class CounterexampleSummary(BaseModel):
    functional: list[str]
    window: str
    classes: list[ClassRow]
    count: int
    det_a: str
    pfaffian: str
    mult: str
    mult_squared: str
    holds: bool
    inequality_holds: bool
    cross_check_count: int
    action_checks: int
    polarization: bool


class Report(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    format_version: int = Field(FORMAT_VERSION, alias="formatVersion")
    command: str
    algebra: Optional[AlgebraSummary] = None
    closure_word_length: Optional[int] = None
    closure_samples: Optional[int] = None
    orbits: list[OrbitRow] = Field(default_factory=list)
    spectrum: list[SpectrumRow] = Field(default_factory=list)
    counterexample: Optional[CounterexampleSummary] = None
    diagnostics: list[str] = Field(default_factory=list)


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------


def algebra_summary(g: LieAlgebra) -> AlgebraSummary:
    return AlgebraSummary(dimension=g.n, names=list(g.names), step=g.step)


def orbit_row(name: str, report: OrbitReport, *, l: Optional[RatMatrix] = None) -> OrbitRow:
    """Row for ``report``; ``l`` is the user's functional when a witness was used."""
    verdict = report.verdict
    a = report.a
    return OrbitRow(
        functional=name,
        coordinates=vec(l if l is not None else report.l),
        witness=vec(report.l) if l is not None else None,
        stabilizer=[vec(v) for v in report.skew.stabilizer],
        malcev_basis=[vec(v) for v in a.malcev.vectors] if a else None,
        pass_through=a.malcev.s if a else None,
        malcev_kind=a.malcev.kind if a else None,
        a_matrix=mat(a.A) if a else None,
        det=q(a.det) if a else None,
        pfaffian=q(a.pfaffian) if a else None,
        c_omega=q(a.c_omega) if a else None,
        count=report.count,
        mult=q(report.mult),
        mult_squared=q(verdict.mult_squared),
        moore_holds=verdict.holds,
        inequality_holds=verdict.inequality_holds,
        method=report.method,
    )


def outside_spectrum_row(name: str, l: RatMatrix) -> OrbitRow:
    return OrbitRow(
        functional=name,
        coordinates=vec(l),
        in_spectrum=False,
        method="spectrum-condition",
        note="multiplicity 0: the coadjoint orbit does not meet 𝔤*_Γ",
    )


def spectrum_row(entry: SpectrumEntry) -> SpectrumRow:
    verdict = entry.report.verdict
    return SpectrumRow(
        representative=vec(entry.representative),
        lattice_coordinates=list(entry.lattice_coordinates),
        window_points=entry.window_points,
        mult=q(entry.report.mult),
        count=entry.report.count,
        moore_holds=verdict.holds,
    )


def counterexample_summary(report: CounterexampleReport) -> CounterexampleSummary:
    classes = [
        ClassRow(t=q(t), s=q(s), functional=vec(f), c_omega=q(c))
        for (t, s), f, c in zip(report.classes.representatives, report.functionals, report.c_omega)
    ]
    return CounterexampleSummary(
        functional=vec(report.l),
        window="t ∈ {0, 2, 4}, s ∈ {0, …, 5}, (t, s) taken mod 6",
        classes=classes,
        count=report.verdict.count,
        det_a=q(report.a.det),
        pfaffian=q(report.a.pfaffian),
        mult=q(report.mult),
        mult_squared=q(report.verdict.mult_squared),
        holds=report.verdict.holds,
        inequality_holds=report.verdict.inequality_holds,
        cross_check_count=report.cross_check_count,
        action_checks=report.action_checks,
        polarization=report.polarization,
    )


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def to_structured(report: Report) -> str:
    return report.model_dump_json(by_alias=True, indent=2)


def parse_report(text: str) -> Report:
    return Report.model_validate_json(text)


def _fmt_vec(values: list[str]) -> str:
    return "(" + ", ".join(values) + ")"


def render_table(report: Report) -> str:
    """Human-readable rendering."""
    lines = [f"nilmoore {report.command} (format {report.format_version})"]
    if report.algebra:
        a = report.algebra
        lines.append(f"algebra: dimension {a.dimension}, step {a.step}, basis {', '.join(a.names)}")
    if report.closure_word_length is not None:
        lines.append(
            f"lattice subgroup: closure certified up to word length "
            f"{report.closure_word_length} ({report.closure_samples} random words)"
        )
    for row in report.orbits:
        lines.append("")
        lines.append(f"functional {row.functional} = {_fmt_vec(row.coordinates)}")
        if not row.in_spectrum:
            lines.append(f"  {row.note}")
            continue
        if row.witness:
            lines.append(f"  orbit meets 𝔤*_Γ at {_fmt_vec(row.witness)}")
        if row.malcev_basis:
            lines.append(
                f"  {row.malcev_kind} Malcev basis (s={row.pass_through}): "
                + ", ".join(_fmt_vec(v) for v in row.malcev_basis)
            )
        if row.a_matrix:
            lines.append(f"  A_l = {row.a_matrix}  det {row.det}  Pf {row.pfaffian}  c(Ω) {row.c_omega}")
        lines.append(f"  method: {row.method}")
        lines.append(f"  count #[O ∩ 𝔤*_Γ / Γ] = {row.count}")
        lines.append(f"  multiplicity = {row.mult}")
        verdict = "holds" if row.moore_holds else "fails"
        lines.append(f"  moore: mult² = {row.mult_squared} vs count {row.count}: {verdict}")
        lines.append(f"  moore inequality mult ≤ count: {row.inequality_holds}")
    if report.spectrum:
        lines.append("")
        lines.append(f"{'representative':<32} {'points':>6} {'mult':>6} {'count':>6}  moore")
        for srow in report.spectrum:
            lines.append(
                f"{_fmt_vec(srow.representative):<32} {srow.window_points:>6} "
                f"{srow.mult:>6} {srow.count:>6}  {'holds' if srow.moore_holds else 'fails'}"
            )
        lines.append(f"{len(report.spectrum)} orbit(s)")
    if report.counterexample:
        c = report.counterexample
        lines.append("")
        lines.append(f"functional l = {_fmt_vec(c.functional)}")
        lines.append(f"window: {c.window}")
        for row in c.classes:
            lines.append(f"  f_(t={row.t}, s={row.s}) = {_fmt_vec(row.functional)}  c(Ω) = {row.c_omega}")
        lines.append(f"Γ-classes: {c.count} (doubled window without wraparound: {c.cross_check_count})")
        lines.append(f"det(A_l) = {c.det_a}, Pf = {c.pfaffian}  (det ≠ count outside two-step)")
        lines.append(f"multiplicity = Σ c(Ω) = {c.mult}")
        lines.append(f"moore: mult² = {c.mult_squared} vs count {c.count}: {'holds' if c.holds else 'fails'}")
        lines.append(f"moore inequality mult ≤ count: {c.inequality_holds}")
        lines.append(f"coadjoint action spot checks passed: {c.action_checks}")
        lines.append(f"span{{X1, X2, X3}} is a rational polarization: {c.polarization}")
    for d in report.diagnostics:
        lines.append(d)
    return "\n".join(lines)
