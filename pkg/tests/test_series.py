import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from warpgap.series import (
    CONVERGENT,
    DIVERGENT,
    INCONCLUSIVE,
    LogBound,
    TermBoundSpec,
    classify_exp_series,
    glued_series_norms,
    imported_bounds,
)


class TestClassifier:
    def test_geometric_value(self):
        cls, log_val = classify_exp_series(-3.0, LogBound.affine(2.0))
        assert cls == CONVERGENT
        assert math.exp(log_val) == pytest.approx(math.e / (math.e - 1.0), rel=1e-14)

    def test_laplacian_p2_value(self):
        cls, log_val = classify_exp_series(-3.0, LogBound.affine(-2.0))
        assert cls == CONVERGENT
        assert math.exp(log_val) == pytest.approx(1.0 / (1.0 - math.exp(-5.0)), rel=1e-14)

    def test_supergeometric_divergence_no_overflow(self):
        cls, log_val = classify_exp_series(-3.0, LogBound.power(1.0, 1000.0))
        assert cls == DIVERGENT
        assert log_val is None

    def test_supergeometric_negative_converges(self):
        cls, _ = classify_exp_series(0.0, LogBound.power(-1.0, 2.0))
        assert cls == CONVERGENT

    def test_constant_terms_diverge(self):
        cls, _ = classify_exp_series(0.0, LogBound.affine(0.0, 1.0))
        assert cls == DIVERGENT

    def test_positive_slope_diverges(self):
        cls, _ = classify_exp_series(1.0, LogBound.affine(0.5))
        assert cls == DIVERGENT

    def test_ratio_limit_one_is_inconclusive(self):
        # terms exp(-sqrt(k)) vanish but the ratio test limit is 1
        cls, log_val = classify_exp_series(0.0, LogBound.power(-1.0, 0.5))
        assert cls == INCONCLUSIVE
        assert log_val is None

    def test_fractional_growth_diverges_by_term_test(self):
        cls, _ = classify_exp_series(0.0, LogBound.power(1.0, 0.5))
        assert cls == DIVERGENT

    def test_partial_sums_match_closed_form(self):
        for slope in (-1.0, -5.0, -0.3):
            _, log_val = classify_exp_series(slope, LogBound.affine(0.0))
            partial = sum(math.exp(slope * k) for k in range(200))
            tail = math.exp(slope * 200) / (1.0 - math.exp(slope))
            assert partial == pytest.approx(math.exp(log_val), rel=1e-13, abs=tail * 10)

    @given(
        st.floats(min_value=-6.0, max_value=-0.5),
        st.floats(min_value=0.1, max_value=3.0),
    )
    @settings(max_examples=100, deadline=None)
    def test_faster_decay_never_breaks_convergence(self, rate, extra):
        bound = LogBound.affine(1.0)
        base_cls, _ = classify_exp_series(rate, bound)
        faster_cls, _ = classify_exp_series(rate - extra, bound)
        if base_cls == CONVERGENT:
            assert faster_cls == CONVERGENT


class TestGluedNorms:
    def test_stated_rate_values(self):
        rep = glued_series_norms(imported_bounds(2.0))
        lp = rep.item("lp")
        assert lp.classification == CONVERGENT
        assert math.exp(lp.closed_form_log) == pytest.approx(
            math.e / (math.e - 1.0), rel=1e-14
        )
        lap = rep.item("laplacian_lp")
        assert lap.classification == CONVERGENT
        assert math.exp(lap.closed_form_log) == pytest.approx(
            1.0 / (1.0 - math.exp(-5.0)), rel=1e-14
        )
        hess = rep.item("hessian_lp")
        assert hess.classification == DIVERGENT
        assert hess.closed_form_log is None

    @pytest.mark.parametrize("p", [2.0, 3.0, 4.0])
    def test_sharp_rate_below_stated(self, p):
        rep = glued_series_norms(imported_bounds(p))
        for norm in ("lp", "laplacian_lp"):
            it = rep.item(norm)
            assert it.sharp_classification == CONVERGENT
            assert it.sharp_le_stated
            assert it.sharp_closed_form_log <= it.closed_form_log + 1e-12

    def test_hessian_sharp_still_divergent(self):
        rep = glued_series_norms(imported_bounds(3.0))
        assert rep.item("hessian_lp").sharp_classification == DIVERGENT

    def test_rejects_p_below_one(self):
        with pytest.raises(ValueError):
            TermBoundSpec(
                rate=-3.0, p=0.5,
                lp_log=LogBound.affine(2.0),
                laplacian_log=LogBound.affine(-2.0),
                hessian_log=LogBound.power(1.0, 1000.0),
            )

    def test_json_schema(self):
        doc = json.loads(glued_series_norms(imported_bounds(2.0)).to_json())
        assert {it["norm"] for it in doc["items"]} == {
            "lp", "laplacian_lp", "hessian_lp",
        }
        for it in doc["items"]:
            assert set(it) == {"norm", "classification", "closed_form_log_or_null"}
        assert "sharp_check" in doc
