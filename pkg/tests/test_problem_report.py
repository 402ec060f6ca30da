# Version: v1.0
"""Tests for nilmoore.problem and nilmoore.report — parsing, building and exact serialization."""

import io

import pytest
from sympy import Rational

from nilmoore.errors import JacobiViolation, ProblemParseError
from nilmoore.multiplicity import multiplicity_two_step
from nilmoore.orbits import filiform_counterexample
from nilmoore.problem import Problem, build_problem, load_problem, parse_problem
from nilmoore.report import (
    Report,
    algebra_summary,
    counterexample_summary,
    orbit_row,
    outside_spectrum_row,
    parse_report,
    q,
    render_table,
    to_structured,
)
from tests.conftest import vec

HEADER = """
format_version = 1
dimension = 2

[lattice]
matrix = [[1, 0], [0, 1]]
"""


def _parse_error(text: str) -> ProblemParseError:
    with pytest.raises(ProblemParseError) as exc:
        parse_problem(text, "case.problem")
    return exc.value


class TestParseProblem:
    def test_heisenberg_fixture(self, fixtures_dir):
        spec = load_problem(str(fixtures_dir / "heisenberg.problem"))
        assert spec.dimension == 3
        assert spec.names == ["X1", "X2", "X3"]
        assert spec.lattice.matrix[2][2] == "1/2"
        assert spec.functional_names() == ["l", "l4", "flat", "shifted", "half"]

    def test_default_functional_names(self):
        spec = parse_problem(HEADER + "[[functionals]]\ncoordinates = [1, 0]\n[[functionals]]\ncoordinates = [0, 1]\n")
        assert spec.functional_names() == ["l1", "l2"]

    def test_float_coordinate_rejected(self):
        error = _parse_error(HEADER + "[[functionals]]\ncoordinates = [0.5, 0]\n")
        assert "functionals.0.coordinates" in str(error)
        assert "not exact" in str(error)

    def test_float_coefficient_rejected(self):
        error = _parse_error(HEADER + "[[brackets]]\ni = 1\nj = 2\nk = 1\ncoefficient = 1.0\n")
        assert "brackets.0.coefficient" in str(error)

    def test_decimal_string_rejected(self):
        error = _parse_error(HEADER + '[[functionals]]\ncoordinates = ["0.5", 0]\n')
        assert "p/q" in str(error)

    def test_toml_syntax_error_has_position(self):
        error = _parse_error("dimension = = 2\n")
        assert "line 1" in str(error)
        assert error.location == "case.problem"

    def test_unknown_key_rejected(self):
        error = _parse_error(HEADER + "colour = 1\n")
        assert "colour" in str(error)

    def test_lattice_shape(self):
        _parse_error(HEADER.replace("dimension = 2", "dimension = 3"))

    def test_bracket_index_out_of_range(self):
        error = _parse_error(HEADER + "[[brackets]]\ni = 1\nj = 2\nk = 3\ncoefficient = 1\n")
        assert "out of range" in str(error)

    def test_duplicate_functional_names(self):
        text = HEADER + '[[functionals]]\nname = "a"\ncoordinates = [1, 0]\n' * 2
        assert "unique" in str(_parse_error(text))

    def test_unknown_orbit_class_functional(self):
        text = HEADER + '[[orbit_classes]]\nfunctional = "nope"\nrepresentatives = [[1, 0]]\n'
        assert "nope" in str(_parse_error(text))

    def test_format_version(self):
        _parse_error(HEADER.replace("format_version = 1", "format_version = 2"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ProblemParseError):
            load_problem(str(tmp_path / "absent.problem"))

    def test_stdin(self, monkeypatch, fixtures_dir):
        text = (fixtures_dir / "abelian2.problem").read_text(encoding="utf-8")
        monkeypatch.setattr("sys.stdin", io.StringIO(text))
        assert load_problem("-").dimension == 2


class TestBuildProblem:
    def test_heisenberg(self, fixtures_dir):
        problem = build_problem(load_problem(str(fixtures_dir / "heisenberg.problem")), seed=0)
        assert problem.algebra.step == 2
        assert problem.functional("shifted") == ("shifted", vec("1/3", "5/2", 2))
        assert problem.functional(None)[0] == "l"

    def test_unknown_functional(self, fixtures_dir):
        problem = build_problem(load_problem(str(fixtures_dir / "abelian2.problem")), seed=0)
        with pytest.raises(ProblemParseError):
            problem.functional("missing")

    def test_no_functionals(self, heis_gamma):
        with pytest.raises(ProblemParseError):
            Problem(heis_gamma.algebra, heis_gamma).functional(None)

    def test_jacobi_violation(self, fixtures_dir):
        with pytest.raises(JacobiViolation) as exc:
            build_problem(load_problem(str(fixtures_dir / "jacobi_violation.problem")), seed=0)
        assert exc.value.triple == (0, 1, 2)

    def test_orbit_classes_are_columns(self):
        text = HEADER + (
            '[[functionals]]\nname = "a"\ncoordinates = [1, 0]\n'
            '[[orbit_classes]]\nfunctional = "a"\nrepresentatives = [[1, 0], ["1/2", 3]]\n'
        )
        problem = build_problem(parse_problem(text), seed=0)
        assert problem.orbit_classes["a"] == [vec(1, 0), vec("1/2", 3)]


class TestReport:
    def test_exact_strings(self):
        assert q(Rational(-2, 12)) == "-1/6"
        assert q(3) == "3"

    def test_structured_round_trip(self, heis_gamma):
        row = orbit_row("l", multiplicity_two_step(heis_gamma, vec(0, 0, 2)))
        report = Report(command="mult", algebra=algebra_summary(heis_gamma.algebra), orbits=[row])
        text = to_structured(report)
        assert '"formatVersion": 1' in text
        assert '"c_omega": "1/2"' in text
        assert parse_report(text) == report

    def test_witness_row(self, heis_gamma):
        row = orbit_row("shifted", multiplicity_two_step(heis_gamma, vec(0, 2, 2)), l=vec("1/3", "5/2", 2))
        assert row.coordinates == ["1/3", "5/2", "2"]
        assert row.witness == ["0", "2", "2"]

    def test_table(self, heis_gamma):
        rows = [
            orbit_row("l", multiplicity_two_step(heis_gamma, vec(0, 0, 2))),
            outside_spectrum_row("half", vec(0, 0, 1)),
        ]
        text = render_table(Report(command="mult", orbits=rows))
        assert "multiplicity = 2" in text
        assert "count #[O ∩ 𝔤*_Γ / Γ] = 4" in text
        assert "multiplicity 0" in text

    def test_counterexample_table(self):
        summary = counterexample_summary(filiform_counterexample(spot_checks=2, seed=0))
        assert summary.count == 18
        assert summary.mult == "3"
        assert {row.c_omega for row in summary.classes} == {"1/6"}
        text = render_table(Report(command="counterexample", counterexample=summary))
        assert "mult² = 9 vs count 18: fails" in text
