import numpy as np
import pytest
from hypothesis import given, strategies as st

from hystid.core import (
    DerivFactor,
    NonFinite,
    NonUniformGrid,
    SparseModel,
    TermDescriptor,
    TimeSeries,
    TooShort,
    canonicalize,
    render_equation,
    validate_series,
)


def make_series(t, u=None, w=None):
    t = np.asarray(t, dtype=float)
    u = np.zeros_like(t) if u is None else np.asarray(u, dtype=float)
    w = np.zeros_like(t) if w is None else np.asarray(w, dtype=float)
    return TimeSeries(t, u, w)


class TestValidateSeries:
    def test_uniform_zero_series_is_valid(self):
        ts = make_series([0.0, 0.1, 0.2, 0.3])
        assert validate_series(ts) is ts

    def test_non_uniform_grid_names_index(self):
        ts = make_series([0.0, 0.1, 0.25, 0.3])
        with pytest.raises(NonUniformGrid) as exc:
            validate_series(ts)
        assert exc.value.index == 2

    def test_too_short(self):
        with pytest.raises(TooShort):
            validate_series(make_series([0.0, 0.1, 0.2]))

    def test_decreasing_time(self):
        with pytest.raises(NonUniformGrid):
            validate_series(make_series([0.3, 0.2, 0.1, 0.0]))

    def test_nan_names_channel_and_index(self):
        ts = make_series([0.0, 0.1, 0.2, 0.3], w=[0.0, np.nan, 0.0, 0.0])
        with pytest.raises(NonFinite) as exc:
            validate_series(ts)
        assert exc.value.name == "w"
        assert exc.value.index == 1

    def test_tolerates_float_grid_roundoff(self):
        t = np.arange(5000) * 7e-4
        validate_series(make_series(t))

    def test_immutable_arrays(self):
        ts = make_series([0.0, 0.1, 0.2, 0.3])
        with pytest.raises(ValueError):
            ts.w[0] = 1.0


class TestTermDescriptor:
    def test_abs_w_squared_folds_into_w_squared(self):
        d = TermDescriptor(pow_abs_w=2)
        assert d.pow_abs_w == 0
        assert d.pow_w == 2

    def test_odd_abs_power_keeps_single_abs(self):
        d = TermDescriptor(pow_abs_w=3, pow_w=1)
        assert d.pow_abs_w == 1
        assert d.pow_w == 3

    def test_equality_is_fieldwise(self):
        a = TermDescriptor(DerivFactor.ABSOLUTE, pow_u=1)
        b = TermDescriptor(DerivFactor.ABSOLUTE, pow_u=1)
        assert a == b and hash(a) == hash(b)
        assert a != TermDescriptor(DerivFactor.SIGNED, pow_u=1)

    def test_names(self):
        assert TermDescriptor().name == "1"
        assert TermDescriptor(DerivFactor.SIGNED).name == "u'"
        assert TermDescriptor(DerivFactor.ABSOLUTE, pow_u=1).name == "|u'|*u"
        assert TermDescriptor(pow_w=1, pow_abs_w=1).name == "w*|w|"
        assert TermDescriptor(DerivFactor.SIGNED, pow_u=2, pow_y=1).name == "u'*u^2*y"

    def test_rejects_negative_powers(self):
        with pytest.raises(ValueError):
            TermDescriptor(pow_u=-1)

    @given(st.sampled_from(list(DerivFactor)),
           st.integers(0, 5), st.integers(0, 5), st.integers(0, 5), st.integers(0, 2))
    def test_canonicalize_idempotent(self, fac, pu, pw, paw, py):
        d = TermDescriptor(fac, pu, pw, paw, py)
        assert canonicalize(d) == d
        assert canonicalize(canonicalize(d)) == canonicalize(d)

    @given(st.integers(0, 6), st.integers(0, 6))
    def test_canonical_form_preserves_total_w_power(self, pw, paw):
        d = TermDescriptor(pow_w=pw, pow_abs_w=paw)
        assert d.pow_abs_w in (0, 1)
        assert d.pow_w + d.pow_abs_w == pw + paw


def model_from(coefs: dict, threshold=0.1, target="w"):
    terms = tuple(coefs)
    return SparseModel(np.array([coefs[d] for d in terms], dtype=float),
                       terms, threshold, target_name=target)


class TestRenderEquation:
    def test_zero_model(self):
        m = model_from({TermDescriptor(): 0.0})
        assert render_equation(m) == "dw/dt = 0"

    def test_duhem_style_model(self):
        m = model_from({
            TermDescriptor(DerivFactor.ABSOLUTE, pow_u=1): 0.4,
            TermDescriptor(DerivFactor.ABSOLUTE, pow_w=1): -0.5,
            TermDescriptor(DerivFactor.SIGNED): 0.251,
        })
        # canonical library order: degree then factor, so u' leads
        assert render_equation(m) == "dw/dt = 0.251*u' - 0.5*|u'|*w + 0.4*|u'|*u"

    def test_single_constant_term(self):
        m = model_from({TermDescriptor(): -0.17})
        assert render_equation(m) == "dw/dt = -0.17"

    def test_actuator_style_model(self):
        m = model_from({
            TermDescriptor(): -0.17,
            TermDescriptor(pow_u=1): -2.38,
            TermDescriptor(DerivFactor.SIGNED): 0.58,
            TermDescriptor(DerivFactor.ABSOLUTE): 0.12,
            TermDescriptor(pow_w=1, pow_abs_w=1): -0.07,
        })
        assert render_equation(m) == (
            "dw/dt = -0.17 + 0.58*u' + 0.12*|u'| - 2.38*u - 0.07*w*|w|")

    def test_aux_target_renders_dy(self):
        m = model_from({TermDescriptor(DerivFactor.SIGNED): 0.4}, target="y")
        assert render_equation(m) == "dy/dt = 0.4*u'"

    def test_precision_controls_significant_digits(self):
        m = model_from({TermDescriptor(DerivFactor.SIGNED): 0.25136})
        assert render_equation(m, 3) == "dw/dt = 0.251*u'"
        assert render_equation(m, 2) == "dw/dt = 0.25*u'"

    @given(st.lists(st.floats(-10, 10).filter(lambda c: abs(c) > 1e-3),
                    min_size=1, max_size=4))
    def test_injective_on_distinct_patterns(self, coefs):
        terms = [TermDescriptor(pow_u=k) for k in range(len(coefs))]
        m1 = model_from(dict(zip(terms, coefs)))
        shifted = [c * 1.5 + 0.1 for c in coefs]
        m2 = model_from(dict(zip(terms, shifted)))
        r1, r2 = render_equation(m1, 6), render_equation(m2, 6)
        rounded_equal = all(f"{a:.6g}" == f"{b:.6g}" for a, b in zip(coefs, shifted))
        assert (r1 == r2) == rounded_equal


class TestSparseModel:
    def test_support_names(self):
        m = model_from({TermDescriptor(DerivFactor.SIGNED): 0.4,
                        TermDescriptor(pow_u=1): 0.0})
        assert m.support_names == ("u'",)

    def test_coefficient_lookup_canonicalizes(self):
        m = model_from({TermDescriptor(pow_w=2): 1.5})
        assert m.coefficient_of(TermDescriptor(pow_abs_w=2)) == 1.5

    def test_mismatched_lengths_rejected(self):
        with pytest.raises(Exception):
            SparseModel(np.array([1.0, 2.0]), (TermDescriptor(),), 0.1)
