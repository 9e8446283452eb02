#!/usr/bin/env python3
"""
Tests for lib/arrangement.py

Parsing, normalization, intersection points, chamber enumeration and the
chambers disjoint from F, including property tests on random rational
arrangements.
"""

from fractions import Fraction

import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from lib.arrangement import (
    AffineTransform,
    betti_numbers,
    enumerate_chambers,
    euler_characteristic,
    fiber_chambers,
    intersection_summary,
    is_staircase,
    normalize_arrangement,
    parse_arrangement,
    parse_rational,
)
from lib.errors import (
    ArrangementError,
    DegenerateLine,
    DuplicateLine,
    EmptyArrangement,
    MalformedRational,
)
from tests.conftest import make_arrangement


class TestParsing:
    """Test rational literals and arrangement documents."""

    def test_parse_rational_forms(self):
        """Test integers and p/q strings."""
        assert parse_rational("1/3") == Fraction(1, 3)
        assert parse_rational("-4") == Fraction(-4)
        assert parse_rational(2) == Fraction(2)
        assert parse_rational(" 6/4 ") == Fraction(3, 2)

    @pytest.mark.parametrize("value", ["1.5", "abc", "1/0", True, None, 0.5])
    def test_parse_rational_rejects(self, value):
        """Test malformed literals are rejected."""
        with pytest.raises(MalformedRational):
            parse_rational(value)

    def test_parse_arrangement_from_json(self):
        """Test a JSON string document."""
        lines = parse_arrangement('{"lines": [["1", "0", "0"], ["0", "1", "-1/2"]]}')

        assert len(lines) == 2
        assert lines[1].c == Fraction(-1, 2)
        assert lines[1].source == 1

    def test_degenerate_line(self):
        """Test a = b = 0 is rejected with its index."""
        with pytest.raises(DegenerateLine) as exc_info:
            parse_arrangement({"lines": [["1", "0", "0"], ["0", "0", "1"]]})
        assert exc_info.value.index == 1

    def test_duplicate_line(self):
        """Test proportional triples are duplicates."""
        with pytest.raises(DuplicateLine) as exc_info:
            parse_arrangement({"lines": [["1", "0", "0"], ["0", "1", "0"], ["2", "0", "0"]]})
        assert exc_info.value.indices == (0, 2)
        assert str(exc_info.value) == "DuplicateLine(0,2)"

    def test_empty_arrangement(self):
        """Test an arrangement needs at least one line."""
        with pytest.raises(EmptyArrangement):
            parse_arrangement({"lines": []})

    def test_missing_lines_key(self):
        """Test a document without lines is a ValueError."""
        with pytest.raises(ValueError):
            parse_arrangement({"name": "nothing"})

    def test_bad_triple(self):
        """Test a triple of the wrong length."""
        with pytest.raises(MalformedRational):
            parse_arrangement({"lines": [["1", "0"]]})


class TestNormalization:
    """Test the standard position of an arrangement."""

    def test_rotation_is_orthogonal(self):
        """Test rational rotations have cos^2 + sin^2 = 1."""
        (cos, minus_sin), (sin, cos2) = AffineTransform.rotation(Fraction(1, 7)).matrix
        assert cos == cos2
        assert minus_sin == -sin
        assert cos * cos + sin * sin == 1

    def test_normalized_shape(self, generic4):
        """Test steep lines, increasing abscissae and intersections in (1, R0)."""
        assert generic4.n == 4
        assert all(line.a == 1 and abs(line.b) <= 1 for line in generic4.lines)
        assert list(generic4.a_f) == sorted(generic4.a_f)
        assert len(set(generic4.a_f)) == 4
        for p in intersection_summary(generic4):
            assert 1 < p.point[1] < generic4.R0
        assert generic4.R > generic4.R0

    def test_horizontal_lines_are_rotated(self):
        """Test an arrangement with a horizontal line gets a rotation."""
        arr = make_arrangement([["0", "1", "0"], ["1", "0", "0"]])

        assert not arr.transform.is_identity()
        assert all(line.a != 0 for line in arr.lines)

    def test_order_records_sources(self, generic4):
        """Test the new order is a permutation of the input indices."""
        assert sorted(generic4.order) == [0, 1, 2, 3]

    def test_to_dict(self, two_crossing):
        """Test the normalized document uses rational strings."""
        data = two_crossing.to_dict()

        assert data["name"] == "two_crossing"
        assert len(data["lines"]) == 2
        assert all(isinstance(v, str) for line in data["lines"] for v in line)
        assert set(data) >= {"aF", "R0", "R", "transform", "order"}

    def test_empty_raw_list(self):
        """Test normalization of nothing fails."""
        with pytest.raises(EmptyArrangement):
            normalize_arrangement([])


class TestChambers:
    """Test chamber enumeration."""

    def test_pencil_intersection(self, pencil4):
        """Test four concurrent lines meet in one point of multiplicity 4."""
        summary = intersection_summary(pencil4)

        assert len(summary) == 1
        assert summary[0].multiplicity == 4
        assert summary[0].lines == (0, 1, 2, 3)

    def test_staircase(self):
        """Test the sign vectors met by F."""
        assert is_staircase((1, 1, -1))
        assert is_staircase((-1, -1))
        assert not is_staircase((1, -1, 1))
        assert not is_staircase((-1, 1))

    def test_corpus_counts(self, corpus):
        """Test every corpus arrangement has its expected chamber counts."""
        for entry in corpus.entries:
            arr = normalize_arrangement(parse_arrangement(entry.document()))
            chambers = enumerate_chambers(arr)
            fibers = fiber_chambers(arr, chambers)

            assert arr.n == entry.expected["n"], entry.name
            assert len(chambers) == entry.expected["chambers"], entry.name
            assert len(fibers) == entry.expected["b"], entry.name
            assert euler_characteristic(arr) == entry.expected["chi"], entry.name

    def test_fiber_chambers(self, generic4):
        """Test base points, strip heights and widths of the chambers missing F."""
        fibers = fiber_chambers(generic4)
        b = len(fibers)

        assert b == 6
        assert [f.s for f in fibers] == list(range(1, 7))
        assert len({f.point[1] for f in fibers}) == b
        for f in fibers:
            assert not is_staircase(f.delta)
            assert generic4.sign_vector(f.point) == f.delta
            assert f.eps == Fraction(1, 4 * (b + 1))
            assert f.h_prime == 1 - Fraction(f.s, b + 1)
            assert 0 < f.rho < 1
            assert f.a1[1] == f.a2[1] == 1 - f.rho

    def test_parallel_lines_have_no_fibers(self, two_parallel):
        """Test two parallel lines leave every chamber on F."""
        assert fiber_chambers(two_parallel) == []
        assert betti_numbers(two_parallel) == (1, 2, 0)


def _documents():
    triple = st.tuples(*(st.integers(-3, 3) for _ in range(3)))
    return st.lists(triple, min_size=1, max_size=6)


class TestRandomArrangements:
    """Property tests over random rational arrangements."""

    @given(_documents())
    @settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
    def test_chamber_count_formula(self, triples):
        """Test chambers = 1 + n + sum(m_p - 1) and |ch_F| = sum(m_p - 1)."""
        try:
            raw = parse_arrangement({"lines": [[str(v) for v in t] for t in triples]})
        except ArrangementError:
            assume(False)
        arr = normalize_arrangement(raw)
        excess = sum(p.multiplicity - 1 for p in intersection_summary(arr))

        chambers = enumerate_chambers(arr)
        assert len(chambers) == 1 + arr.n + excess
        assert len(fiber_chambers(arr, chambers)) == excess
        assert betti_numbers(arr) == (1, arr.n, excess)

    @given(_documents())
    @settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
    def test_normalize_is_idempotent(self, triples):
        """Test a normalized arrangement is already in standard position."""
        try:
            raw = parse_arrangement({"lines": [[str(v) for v in t] for t in triples]})
        except ArrangementError:
            assume(False)
        arr = normalize_arrangement(raw)
        again = normalize_arrangement(list(arr.lines))

        assert again.lines == arr.lines
        assert again.transform.is_identity()
        assert (again.a_f, again.R0, again.R) == (arr.a_f, arr.R0, arr.R)


GRID = [Fraction(k, 4) for k in range(-32, 33)]


def grid_sign_vectors(raw, arr):
    """Sign vectors of the normalized lines at every grid point off the raw lines."""
    found = set()
    for x1 in GRID:
        for x2 in GRID:
            if any(line.value(x1, x2) == 0 for line in raw):
                continue
            found.add(arr.sign_vector(arr.transform.apply_point((x1, x2))))
    return found


class TestGridOracle:
    """Test chamber enumeration against sampling a dense grid."""

    @pytest.mark.parametrize(
        "lines",
        [
            [["1", "0", "0"], ["0", "1", "0"], ["1", "1", "-1"], ["1", "-1", "-2"]],
            [["1", "0", "0"], ["0", "1", "0"], ["1", "-1", "0"], ["1", "1", "0"]],
            [["1", "0", "0"], ["1", "0", "-1"], ["0", "1", "0"], ["0", "1", "-1"], ["0", "1", "-2"]],
            [["1", "2", "-1"], ["2", "-1", "1"], ["1", "1", "1"]],
        ],
    )
    def test_chambers_match_grid(self, lines):
        """Test the enumerated sign vectors are exactly those met by the grid."""
        raw = parse_arrangement({"lines": lines})
        arr = normalize_arrangement(raw)

        assert {c.sign_vector for c in enumerate_chambers(arr)} == grid_sign_vectors(raw, arr)

    def test_corpus_matches_grid(self, corpus):
        """Test every corpus arrangement against the grid."""
        for entry in corpus.entries:
            raw = parse_arrangement(entry.document())
            arr = normalize_arrangement(raw)
            assert len(enumerate_chambers(arr)) == len(grid_sign_vectors(raw, arr)), entry.name
