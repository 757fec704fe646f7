"""Threshold location by scan + bisection over a problem parameter."""

import math

import pytest

from neutralstab import CriterionId, SweepSpec, find_threshold, sweep_grid
from neutralstab.criteria import Verdict


def _verdict(cid, satisfied):
    return Verdict(criterion=cid, lhs=0.0, rhs=1.0, satisfied=satisfied,
                   margin=1.0, precondition_ok=True)


def _template(predicates):
    def template(x):
        return {cid: _verdict(cid, bool(pred(x)))
                for cid, pred in predicates.items()}
    return template


CID = CriterionId.THM1_A
CID2 = CriterionId.THM1_B


class TestSpecValidation:
    def test_bad_ranges_rejected(self):
        with pytest.raises(ValueError):
            SweepSpec("r", 1.0, 0.5, (CID,))
        with pytest.raises(ValueError):
            SweepSpec("r", 0.0, 1.0, (CID,), tol=0.0)
        with pytest.raises(ValueError):
            SweepSpec("r", 0.0, 1.0, (CID,), scan_points=4)

    def test_criteria_coerced_from_strings(self):
        spec = SweepSpec("r", 0.0, 1.0, ("THM1_A",))
        assert spec.criteria == (CriterionId.THM1_A,)


class TestThresholds:
    def test_half_line_below(self):
        spec = SweepSpec("x", 0.0, 1.0, (CID,), tol=1e-8)
        res, = find_threshold(spec, _template({CID: lambda x: x < 0.3}))
        assert res.direction == "satisfied_below"
        assert res.upper == pytest.approx(0.3, abs=1e-8)
        assert res.bracket_verified

    def test_half_line_above(self):
        spec = SweepSpec("x", 0.0, 1.0, (CID,), tol=1e-8)
        res, = find_threshold(spec, _template({CID: lambda x: x >= 0.7}))
        assert res.direction == "satisfied_above"
        assert res.lower == pytest.approx(0.7, abs=1e-8)

    def test_interval(self):
        spec = SweepSpec("x", 0.0, 1.0, (CID,), tol=1e-8)
        res, = find_threshold(
            spec, _template({CID: lambda x: 0.2 < x < 0.6}))
        assert res.direction == "satisfied_inside"
        assert res.lower == pytest.approx(0.2, abs=1e-8)
        assert res.upper == pytest.approx(0.6, abs=1e-8)
        assert res.bracket_verified

    def test_degenerate_patterns(self):
        spec = SweepSpec("x", 0.0, 1.0, (CID, CID2))
        results = find_threshold(spec, _template({
            CID: lambda x: True, CID2: lambda x: False}))
        by_id = {r.criterion: r for r in results}
        assert by_id[CID].direction == "always"
        assert by_id[CID2].direction == "never"
        assert by_id[CID].scan is not None

    def test_non_monotone_not_bisected(self):
        spec = SweepSpec("x", 0.0, 10.0, (CID,))
        res, = find_threshold(
            spec, _template({CID: lambda x: math.sin(x) > 0}))
        assert res.direction == "non_monotone"
        assert res.lower is None and res.upper is None
        assert len(res.scan) == spec.scan_points

    def test_multiple_criteria_in_one_pass(self):
        spec = SweepSpec("x", 0.0, 1.0, (CID, CID2), tol=1e-7)
        results = find_threshold(spec, _template({
            CID: lambda x: x < 0.25, CID2: lambda x: x < 0.75}))
        by_id = {r.criterion: r for r in results}
        assert by_id[CID].upper == pytest.approx(0.25, abs=1e-7)
        assert by_id[CID2].upper == pytest.approx(0.75, abs=1e-7)


class TestGrid:
    def test_rows_cover_values_and_criteria(self):
        spec = SweepSpec("x", 0.0, 1.0, (CID, CID2), scan_points=16)
        rows = sweep_grid(spec, _template({
            CID: lambda x: x < 0.5, CID2: lambda x: True}), n_points=10)
        assert len(rows) == 20
        assert {row["criterion"] for row in rows} == {"THM1_A", "THM1_B"}
        assert all("x" in row and "satisfied" in row for row in rows)
