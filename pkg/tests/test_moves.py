#!/usr/bin/env python3
"""
Tests for lib/moves.py

Local rewrites of strip curves and their application to whole divides.
"""

from fractions import Fraction

import pytest

from lib.arrangement import fiber_chambers
from lib.divide import Between, Cap, assemble_kirby_divide, kirby_strips, reduce_gamma, strip_for_window
from lib.errors import PatternMismatch
from lib.moves import MoveSpec, apply_move, reduce_by_moves, reduction_moves, rewrite_strip

F = Fraction


def strip(delta, window=None):
    return strip_for_window(delta, window or (1, len(delta)), 1, F(1, 2), F(1, 8))


@pytest.fixture
def full_generic4(generic4):
    strips = kirby_strips(generic4, fiber_chambers(generic4), reduced=False)
    return assemble_kirby_divide(generic4, strips), strips


class TestRewriteStrip:
    """Test moves on the combinatorics of one curve."""

    def test_cusp_bigon_forward(self):
        """Test a cap cusp passes a dotted segment across a straight gap."""
        moved = rewrite_strip(strip((1, 1, -1, 1)), MoveSpec("cuspBigon", "attach:1", "left"), 4)

        assert moved.window == (2, 4)
        assert moved.left_cap is Cap.CUSP
        assert moved.betweens == (Between.CUSP_UP, Between.CUSP_DOWN)

    def test_cusp_slide_forward(self):
        """Test a cap cusp cancels the upward cusp beyond the next segment."""
        moved = rewrite_strip(strip((1, -1, 1, -1)), MoveSpec("cuspSlide", "attach:1", "right"), 4)

        assert moved.window == (1, 3)
        assert moved.right_cap is Cap.ROUND
        assert moved.betweens == (Between.CUSP_UP, Between.CUSP_DOWN)
        assert moved.cusp_count == 3

    @pytest.mark.parametrize("move_id", ["cuspBigon", "cuspSlide"])
    def test_backward_inverts_forward(self, move_id):
        """Test each cap move undoes itself."""
        start = strip((1, 1, -1, 1)) if move_id == "cuspBigon" else strip((1, -1, 1, -1))
        site = "left" if move_id == "cuspBigon" else "right"
        moved = rewrite_strip(start, MoveSpec(move_id, "attach:1", site), 4)
        back = rewrite_strip(moved, MoveSpec(move_id, "attach:1", site, direction="backward"), 4)
        assert back == start

    def test_cusp_cancel_round_trip(self):
        """Test inserting and cancelling a zigzag on a straight gap."""
        start = strip((-1, -1, 1))
        inserted = rewrite_strip(start, MoveSpec("cuspCancel", "attach:1", 1, "backward", "down_up"), 3)

        assert inserted.betweens == (Between.ZIGZAG_DOWN_UP, Between.CUSP_DOWN)
        assert inserted.cusp_count == 3
        assert rewrite_strip(inserted, MoveSpec("cuspCancel", "attach:1", 1), 3) == start

    @pytest.mark.parametrize(
        "spec",
        [
            MoveSpec("cuspFlip", "attach:1", "left"),
            MoveSpec("cuspBigon", "attach:1", "left", direction="sideways"),
            MoveSpec("cuspBigon", "attach:1", "middle"),
            MoveSpec("cuspBigon", "attach:1", "left"),
            MoveSpec("cuspSlide", "attach:1", "left", direction="backward"),
            MoveSpec("cuspCancel", "attach:1", 2, direction="backward"),
            MoveSpec("cuspCancel", "attach:1", 5, direction="backward"),
            MoveSpec("cuspCancel", "attach:1", 1),
            MoveSpec("cuspCancel", "attach:1", 1, direction="backward", variant="sideways"),
        ],
    )
    def test_pattern_mismatch(self, spec):
        """Test moves whose local pattern is absent are refused."""
        with pytest.raises(PatternMismatch) as exc_info:
            rewrite_strip(strip((-1, -1, 1)), spec, 3)
        assert exc_info.value.details["moveId"] == spec.move_id


class TestReductionMoves:
    """Test the move sequences from full to reduced curves."""

    def test_bigon_then_slide(self):
        """Test a straight gap is crossed by cuspBigon and a cusp gap by cuspSlide."""
        full = strip((1, 1, -1, 1))
        moves = reduction_moves(full, reduce_gamma(full), 4)

        assert [(m.move_id, m.site) for m in moves] == [("cuspBigon", "left"), ("cuspSlide", "left")]

    def test_already_reduced(self):
        """Test no moves are needed on a reduced curve."""
        reduced = strip((-1, -1, 1))
        assert reduction_moves(reduced, reduced, 3) == []

    def test_target_outside_window(self):
        """Test a target reaching past the curve is not reachable."""
        with pytest.raises(PatternMismatch):
            reduction_moves(strip((-1, -1, 1), (2, 3)), strip((-1, -1, 1)), 3)

    def test_reduce_divide_by_moves(self, generic4, full_generic4):
        """Test moving the full divide lands on the reduced divide."""
        full, strips = full_generic4
        targets = {st.label: reduce_gamma(st) for st in strips}

        reduced = reduce_by_moves(full, targets)
        assert reduced == assemble_kirby_divide(generic4, list(targets.values()))


class TestApplyMove:
    """Test moves on whole divides."""

    def test_zigzag_on_divide(self, full_generic4):
        """Test inserting a zigzag keeps the divide valid and cancelling restores it."""
        divide, strips = full_generic4
        st = next(s for s in strips if Between.STRAIGHT in s.betweens)
        site = st.window[0] + st.betweens.index(Between.STRAIGHT)

        moved = apply_move(divide, MoveSpec("cuspCancel", st.label, site, direction="backward"))
        assert len(moved.curve(st.label).cusps) == st.cusp_count + 2

        restored = apply_move(moved, MoveSpec("cuspCancel", st.label, site))
        assert restored == divide

    def test_unknown_curve(self, full_generic4):
        """Test a move on a missing label."""
        divide, _ = full_generic4
        with pytest.raises(PatternMismatch):
            apply_move(divide, MoveSpec("cuspCancel", "attach:99", 1))

    def test_dotted_curve_has_no_strip(self, full_generic4):
        """Test dotted segments cannot be rewritten."""
        divide, _ = full_generic4
        with pytest.raises(PatternMismatch):
            apply_move(divide, MoveSpec("cuspCancel", "dotted:1", 1))

    def test_move_spec_to_dict(self):
        """Test the move document keys."""
        assert MoveSpec("cuspSlide", "attach:2", "right").to_dict() == {
            "moveId": "cuspSlide",
            "curve": "attach:2",
            "site": "right",
            "direction": "forward",
            "variant": "up_down",
        }
