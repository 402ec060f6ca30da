# Version: v1.1
"""
nilmoore.problem — Problem-file models and loader.

A problem file is TOML (grammar in docs/problem_format.md). Indices in the
file are 1-based; everything handed to the library is 0-based. Exact values
are integers or "p/q" strings; TOML floats are rejected.
"""

import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from pydantic import BaseModel, ConfigDict, Field, StrictInt, ValidationError, field_validator, model_validator

from nilmoore.config import FORMAT_VERSION, logger
from nilmoore.errors import ProblemParseError
from nilmoore.exactlin import ZLattice, column, rat_matrix, rational
from nilmoore.lattice_subgroup import LatticeSubgroup, verify_lattice_subgroup
from nilmoore.nilpotent import DualElement, LieAlgebra, validate

Exact = Union[StrictInt, str]


def _check_exact(value):
    try:
        rational(value)
    except TypeError as e:
        raise ValueError(str(e)) from e
    return value


# ---------------------------------------------------------------------------
# File models
# ---------------------------------------------------------------------------


class BracketEntry(BaseModel):
    """[X_i, X_j] has coefficient ``coefficient`` on X_k."""

    model_config = ConfigDict(extra="forbid")

    i: int = Field(..., ge=1)
    j: int = Field(..., ge=1)
    k: int = Field(..., ge=1)
    coefficient: Exact = Field(..., description="Integer or 'p/q' string")

    @field_validator("coefficient", mode="before")
    @classmethod
    def _exact_value(cls, value):
        return _check_exact(value)


class LatticeSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    matrix: list[list[Exact]] = Field(..., description="Rows; columns are a Z-basis of log Γ")

    @field_validator("matrix", mode="before")
    @classmethod
    def _exact_entries(cls, rows):
        if isinstance(rows, list):
            for row in rows:
                if isinstance(row, list):
                    for x in row:
                        _check_exact(x)
        return rows


class FunctionalEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: Optional[str] = None
    coordinates: list[Exact]

    @field_validator("coordinates", mode="before")
    @classmethod
    def _exact_entries(cls, values):
        if isinstance(values, list):
            for x in values:
                _check_exact(x)
        return values


class OrbitClassesEntry(BaseModel):
    """Γ-class representatives of O_l ∩ 𝔤*_Γ for one named functional."""

    model_config = ConfigDict(extra="forbid")

    functional: str
    representatives: list[list[Exact]]

    @field_validator("representatives", mode="before")
    @classmethod
    def _exact_entries(cls, rows):
        if isinstance(rows, list):
            for row in rows:
                if isinstance(row, list):
                    for x in row:
                        _check_exact(x)
        return rows


class ProblemFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    format_version: int = FORMAT_VERSION
    dimension: int = Field(..., ge=1)
    names: Optional[list[str]] = None
    brackets: list[BracketEntry] = Field(default_factory=list)
    lattice: LatticeSection
    functionals: list[FunctionalEntry] = Field(default_factory=list)
    orbit_classes: list[OrbitClassesEntry] = Field(default_factory=list)

    @model_validator(mode="after")
    def _shapes(self) -> "ProblemFile":
        n = self.dimension
        if self.format_version != FORMAT_VERSION:
            raise ValueError(f"unsupported format_version {self.format_version}")
        if self.names is not None and len(self.names) != n:
            raise ValueError(f"{len(self.names)} names for dimension {n}")
        for b in self.brackets:
            if max(b.i, b.j, b.k) > n:
                raise ValueError(f"bracket index out of range in [{b.i}, {b.j}] -> {b.k}")
        rows = self.lattice.matrix
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError(f"lattice matrix must be {n}×{n}")
        names = [f.name for f in self.functionals if f.name is not None]
        if len(names) != len(set(names)):
            raise ValueError("functional names must be unique")
        for f in self.functionals:
            if len(f.coordinates) != n:
                raise ValueError(f"functional {f.name or '?'} needs {n} coordinates")
        known = set(self.functional_names())
        for oc in self.orbit_classes:
            if oc.functional not in known:
                raise ValueError(f"orbit_classes refers to unknown functional {oc.functional!r}")
            if any(len(r) != n for r in oc.representatives):
                raise ValueError(f"orbit class representatives need {n} coordinates")
        return self

    def functional_names(self) -> list[str]:
        return [f.name or f"l{i + 1}" for i, f in enumerate(self.functionals)]


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------


def _location(error: ValidationError) -> str:
    first = error.errors()[0]
    return ".".join(str(p) for p in first["loc"]) or "<root>"


def parse_problem(text: str, source: str = "<input>") -> ProblemFile:
    """Parse problem text.

    Raises:
        ProblemParseError: On TOML syntax errors or schema violations.
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ProblemParseError(str(e), location=source) from e
    try:
        return ProblemFile.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        raise ProblemParseError(first["msg"], location=f"{source}: {_location(e)}") from e


def load_problem(path: str) -> ProblemFile:
    """Read and parse a problem file; "-" reads stdin."""
    if path == "-":
        return parse_problem(sys.stdin.read(), "<stdin>")
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ProblemParseError(f"cannot read problem file: {e}", location=path) from e
    return parse_problem(text, path)


# ---------------------------------------------------------------------------
# Building library objects
# ---------------------------------------------------------------------------


@dataclass
class Problem:
    """A parsed problem with its algebra and certified lattice subgroup."""

    algebra: LieAlgebra
    gamma: LatticeSubgroup
    functionals: dict[str, DualElement] = field(default_factory=dict)
    orbit_classes: dict[str, list[DualElement]] = field(default_factory=dict)

    def functional(self, name: Optional[str]) -> tuple[str, DualElement]:
        """Look up by name; None means the first functional."""
        if not self.functionals:
            raise ProblemParseError("problem file declares no functionals")
        if name is None:
            return next(iter(self.functionals.items()))
        if name not in self.functionals:
            raise ProblemParseError(
                f"unknown functional {name!r} (have: {', '.join(self.functionals)})"
            )
        return name, self.functionals[name]


def build_algebra(spec: ProblemFile) -> LieAlgebra:
    structure = [(b.i - 1, b.j - 1, b.k - 1, b.coefficient) for b in spec.brackets]
    return validate(spec.dimension, structure, spec.names)


def build_problem(spec: ProblemFile, *, seed: Optional[int] = None) -> Problem:
    """Validate the algebra and certify the lattice subgroup.

    Raises:
        MathematicalInvalidity: From validation or the closure check.
    """
    g = build_algebra(spec)
    gamma = verify_lattice_subgroup(g, ZLattice(rat_matrix(spec.lattice.matrix)), seed=seed)
    functionals = {
        name: column(f.coordinates)
        for name, f in zip(spec.functional_names(), spec.functionals)
    }
    classes = {
        oc.functional: [column(r) for r in oc.representatives] for oc in spec.orbit_classes
    }
    logger.info(
        f"problem: dimension {g.n}, step {g.step}, {len(functionals)} functional(s)"
    )
    return Problem(g, gamma, functionals, classes)
