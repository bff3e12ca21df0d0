"""
Tests for the truncation lab.

Tests cover:
- Size sequences and model validation
- Structure of the two truncated models
- Trends of the margins across sizes
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from orcalc.domains.errors import BadModelError
from orcalc.domains.lab.models import LabModel
from orcalc.domains.lab.services import build_model, lab_sizes, measure, run_lab


class TestLabSizes:
    """Test the doubling size sequence."""

    @pytest.mark.parametrize(
        "n, expected",
        [(4, [4]), (16, [4, 8, 16]), (20, [4, 8, 16, 20]), (64, [4, 8, 16, 32, 64])],
    )
    def test_sequences(self, n, expected):
        """Verify sizes double from 4 and end at n."""
        assert lab_sizes(n) == expected

    def test_too_small(self):
        """Verify n < 4 raises BadModelError."""
        with pytest.raises(BadModelError):
            lab_sizes(3)

    def test_unknown_model(self):
        """Verify an unknown model name raises BadModelError."""
        with pytest.raises(BadModelError):
            build_model("ex3", 4)
        with pytest.raises(BadModelError):
            run_lab("ex3", 4)


class TestBuildModel:
    """Test the truncated operators."""

    def test_ex1_blocks(self):
        """Verify ex1 is [[diag(1/i), I], [I, 0]] with S the first n coordinates."""
        b, s, probe = build_model(LabModel.EX1, 4)
        assert b.dim == 8
        assert_allclose(b.entries[:4, :4], np.diag([1.0, 1 / 2, 1 / 3, 1 / 4]), atol=1e-15)
        assert_allclose(b.entries[:4, 4:], np.eye(4), atol=1e-15)
        assert_allclose(b.entries[4:, 4:], np.zeros((4, 4)), atol=1e-15)
        assert_allclose(s.projector_matrix(), np.diag([1.0] * 4 + [0.0] * 4), atol=1e-15)
        assert np.linalg.norm(probe) == pytest.approx(1.0)
        assert_allclose(probe[:4], 0.0)

    def test_ex214_probe(self):
        """Verify ex214 is diagonal and S is the orthogonal complement of the probe."""
        b, s, probe = build_model("ex214", 4)
        assert_allclose(b.entries, np.diag(1.0 / np.arange(1, 9)), atol=1e-15)
        assert s.dim == 7
        assert_allclose(s.basis.conj().T @ probe, 0.0, atol=1e-12)

    def test_coupling_and_decay(self):
        """Verify the coupling scales b and the decay shapes a."""
        b, _, _ = build_model(LabModel.EX1, 4, decay=2.0, coupling=3.0)
        assert b.entries[1, 1] == pytest.approx(0.25)
        assert b.entries[0, 4] == pytest.approx(3.0)


class TestLabTrends:
    """Test the margins of the two models across sizes."""

    def test_ex1_row(self):
        """Verify ex1 at n = 4 has ||f|| = 2 and ||y0|| = 4."""
        row = measure(LabModel.EX1, 4)
        assert row.quasi and row.weak
        assert row.f_norm == pytest.approx(2.0)
        assert row.y0_norm == pytest.approx(4.0)
        assert row.quasi_margin > 0.1

    def test_ex1_coupling_scales_y0(self):
        """Verify ||y0|| grows linearly with the coupling."""
        assert measure(LabModel.EX1, 4, coupling=2.0).y0_norm == pytest.approx(8.0)

    def test_ex1_trend(self):
        """Verify ||y0|| increases over 4..64 while the quasi margin stays above 0.1."""
        report = run_lab(LabModel.EX1, 64)
        assert [row.n for row in report.rows] == [4, 8, 16, 32, 64]
        assert report.y0_increasing
        assert report.min_quasi_margin > 0.1
        assert all(row.quasi and row.weak for row in report.rows)

    def test_ex214_trend(self):
        """Verify the ex214 quasi margin decreases while weak complementability holds."""
        report = run_lab(LabModel.EX214, 64)
        assert report.quasi_margin_decreasing
        assert all(row.weak for row in report.rows)
        assert report.rows[-1].quasi_margin < report.rows[0].quasi_margin / 2
