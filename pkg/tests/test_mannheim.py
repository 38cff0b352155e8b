import math

import numpy as np
import pytest

from fixtures import (
    CONSTANT_C,
    VARYING_C,
    by_name,
    g3_nonconstant_mannheim,
    pg1_nonconstant_mannheim,
    tan_fixture,
    tanh_fixture,
    wrong_fixture,
)
from galcurves import ExpressionCurve
from galcurves.curves import SampledCurve, Space
from galcurves.errors import InputError
from galcurves.frames import frame_jets, frame_table
from galcurves.mannheim import (
    LAMBDA_SWEEP,
    OffsetCurve,
    Verdict,
    characterize,
    closed_form_check,
    closed_form_residuals,
    construct_partner,
    helix_planar_check,
    lambda_sweep,
    mannheim_constant,
    partner_ode_residual,
    verify_pair,
    verify_partner_ode,
)
from galcurves.spaces import parallel_residual


@pytest.fixture(scope="module")
def tan_curve():
    return tan_fixture()


@pytest.fixture(scope="module")
def tanh_curve():
    return tanh_fixture()


@pytest.fixture(scope="module")
def g3_synth():
    return g3_nonconstant_mannheim()


@pytest.fixture(scope="module")
def pg1_synth():
    return pg1_nonconstant_mannheim()


# --- Mannheim constant --------------------------------------------------------------

def test_circle_is_mannheim_with_unit_constant():
    r = mannheim_constant(by_name("G3", "circle").curve())
    assert r.verdict is Verdict.MANNHEIM
    assert r.c_estimate == pytest.approx(1.0, abs=1e-12)
    assert r.lam == r.c_estimate


def test_cubic_is_not_mannheim():
    c = by_name("G3", "cubic").curve()
    r = mannheim_constant(c)
    assert r.verdict is Verdict.NOT_MANNHEIM
    # c(s) = (s^2 + 1)^(5/2)
    s = c.grid()
    want = (s**2 + 1) ** 2.5
    median = float(np.median(want))
    assert r.c_estimate == pytest.approx(median, rel=1e-12)
    assert r.c_residual == pytest.approx(np.abs(want - median).max() / median, rel=1e-10)


def test_hyperbola_constant_is_minus_one():
    r = mannheim_constant(by_name("PG3-I", "hyperbola").curve())
    assert r.verdict is Verdict.MANNHEIM
    assert abs(r.c_estimate + 1) <= 1e-8


def test_type2_constant_uses_cosh_phi():
    r = mannheim_constant(by_name("PG3-II", "hyperbola_asinh").curve())
    assert r.verdict is Verdict.MANNHEIM
    assert r.c_estimate == pytest.approx(-1.0, abs=1e-12)


def test_torsion_free_curve_is_degenerate():
    r = mannheim_constant(by_name("G3", "parabola").curve())
    assert r.verdict is Verdict.DEGENERATE
    assert r.c_estimate is None and r.lam is None


@pytest.mark.parametrize("space, name", CONSTANT_C)
def test_constant_c_detected(space, name):
    r = mannheim_constant(by_name(space, name).curve())
    assert r.c_residual <= 1e-8
    assert r.verdict is Verdict.MANNHEIM


@pytest.mark.parametrize("space, name", VARYING_C)
def test_varying_c_detected(space, name):
    r = mannheim_constant(by_name(space, name).curve())
    assert r.c_residual >= 0.1
    assert r.verdict is Verdict.NOT_MANNHEIM


def test_verdict_matches_residual_and_tolerance():
    c = by_name("G3", "cubic").curve()
    assert mannheim_constant(c, tol=10.0).verdict is Verdict.MANNHEIM


def test_report_serialization_field_names():
    d = mannheim_constant(by_name("G3", "circle").curve()).to_dict()
    assert {"space", "c_estimate", "c_residual", "verdict", "lambda"} <= set(d)
    assert d["verdict"] == "Mannheim" and d["space"] == "G3"


# --- partner construction -------------------------------------------------------------

def test_hyperbola_partner_is_a_degenerate_line():
    pair = construct_partner(by_name("PG3-I", "hyperbola").curve(), -1.0)
    assert pair.degenerate and pair.coincidence_residual is None
    rows = pair.partner.positions()
    np.testing.assert_allclose(rows[:, 2:], 0.0, atol=1e-13)
    assert pair.warnings


def test_circle_partner_is_a_degenerate_line():
    pair = construct_partner(by_name("G3", "circle").curve(), 1.0)
    assert pair.degenerate
    np.testing.assert_allclose(pair.partner.positions()[:, 2:], 0.0, atol=1e-13)


def test_synthesized_g3_partner(g3_synth):
    pair = construct_partner(g3_synth, 0.5)
    assert not pair.degenerate
    assert pair.coincidence_residual <= 1e-6
    assert isinstance(pair.partner, SampledCurve)


@pytest.mark.parametrize("space, name", [("G3", "log_helix"), ("PG3-I", "log_type1")])
def test_expression_partner_is_exact(space, name):
    c = by_name(space, name).curve()
    pair = construct_partner(c, mannheim_constant(c).lam)
    assert isinstance(pair.partner, OffsetCurve)
    assert not pair.degenerate
    assert pair.coincidence_residual <= 1e-12


def test_type2_partner_lives_in_type1():
    c = by_name("PG3-II", "hyperbola_asinh").curve()
    pair = construct_partner(c, -1.0)
    assert pair.partner.space is Space.PG3_I
    # partner is the line (s, 0, -s)
    rows = pair.partner.positions()
    np.testing.assert_allclose(rows[:, 2], 0.0, atol=1e-12)
    np.testing.assert_allclose(rows[:, 3], -rows[:, 0], atol=1e-12)
    assert pair.degenerate


@pytest.mark.parametrize("space, name", [("G3", "log_helix"), ("PG3-I", "log_type1"),
                                         ("G3", "cubic"), ("PG3-II", "cos_square")])
def test_partner_keeps_arclength_parameter(space, name):
    c = by_name(space, name).curve()
    rows = OffsetCurve(c, 0.3).positions()
    assert np.array_equal(rows[:, 0], rows[:, 1])


def test_non_mannheim_offsets_fail_the_coincidence():
    sweep = lambda_sweep(by_name("G3", "cubic").curve())
    assert set(sweep) == set(LAMBDA_SWEEP)
    assert min(sweep.values()) >= 0.1


# --- pair verification ----------------------------------------------------------------

@pytest.mark.parametrize("space, name", [("G3", "log_helix"), ("PG3-I", "log_type1")])
def test_verify_pair_on_own_partner(space, name):
    c = by_name(space, name).curve()
    lam = mannheim_constant(c).lam
    partner = construct_partner(c, lam).partner
    report = verify_pair(c, partner)
    assert report.coincidence_residual <= 1e-6
    assert report.lam == pytest.approx(lam, abs=1e-6)
    assert report.lambda_residual <= 1e-6
    assert report.accepted


def test_verify_pair_on_sampled_partner(g3_synth):
    partner = construct_partner(g3_synth, 0.5).partner
    report = verify_pair(g3_synth, partner)
    assert report.coincidence_residual <= 1e-6
    assert report.lam == pytest.approx(0.5, abs=1e-6)


def test_scaled_circle_is_not_a_partner():
    a = ExpressionCurve("G3", "cos(s)", "sin(s)", domain=(0, 6))
    b = ExpressionCurve("G3", "0.5*cos(s)", "0.5*sin(s)", domain=(0, 6))
    report = verify_pair(a, b)
    assert report.coincidence_residual == pytest.approx(1.0, abs=1e-12)
    assert not report.accepted


def test_identical_curves_give_zero_offset_warning():
    a = by_name("G3", "cubic").curve()
    report = verify_pair(a, a)
    assert report.lam == 0.0
    assert any("zero offset" in w for w in report.warnings)


def test_verify_pair_space_mismatch():
    with pytest.raises(InputError):
        verify_pair(by_name("G3", "circle").curve(), by_name("PG3-I", "hyperbola").curve())


def test_coincidence_is_sign_blind():
    c = by_name("G3", "log_helix").curve()
    partner = construct_partner(c, 1.0).partner
    s = c.grid()[::20]
    Na = frame_table(c, s).N
    B1 = frame_table(partner, s).B
    for n, b in zip(Na, B1):
        r = parallel_residual(n, b)
        assert parallel_residual(-n, b) == r
        assert parallel_residual(n, -b) == r


# --- partner ODEs ---------------------------------------------------------------------

def test_tan_fixture_solves_g3_ode(tan_curve):
    report = verify_partner_ode(tan_curve, 1.0)
    assert report.ode_residual <= 1e-6 and report.passed
    assert report.theta_series is not None and report.theta_series.shape == report.s.shape


def test_tanh_fixture_solves_pseudo_ode(tanh_curve):
    report = verify_partner_ode(tanh_curve, 1.0)
    assert report.ode_residual <= 1e-6 and report.passed
    assert report.theta_series is None


def test_wrong_fixture_fails():
    report = verify_partner_ode(wrong_fixture(), 1.0)
    # |1 - (s^2 + 1)| peaks at s = 1.2 on the interior grid
    assert report.ode_residual >= 0.5
    assert report.ode_residual == pytest.approx(1.197**2, rel=1e-4)
    assert not report.passed


def test_ode_rejects_zero_lambda(tan_curve):
    with pytest.raises(InputError):
        verify_partner_ode(tan_curve, 0.0)


def test_ode_space_argument_must_match(tan_curve):
    with pytest.raises(InputError):
        verify_partner_ode(tan_curve, 1.0, space="PG3-I")


def test_pure_ode_residual_signs():
    s = np.linspace(0.1, 1.0, 50)
    tau = np.tan(s)
    assert partner_ode_residual(1.0, tau, 1 + tau**2, 1.0, "G3").max() <= 1e-14
    tau = -np.tanh(s)
    assert partner_ode_residual(1.0, tau, tau**2 - 1, 1.0, "PG3-I").max() <= 1e-14


def _nondegenerate_g3_partners():
    out = []
    for c in (by_name("G3", "log_helix").curve(), g3_nonconstant_mannheim()):
        pair = construct_partner(c, mannheim_constant(c).lam)
        assert not pair.degenerate
        out.append((c, pair.partner))
    return out


@pytest.mark.xfail(strict=True, reason="the Galilean partner ODE does not hold for offset partners")
def test_constructed_g3_partners_satisfy_partner_ode():
    for alpha, partner in _nondegenerate_g3_partners():
        lam = verify_pair(alpha, partner).lam
        assert verify_partner_ode(partner, lam).ode_residual <= 1e-5


def test_constructed_partner_torsion_relations():
    """What offset partners do satisfy: tau1 = +-tau and |tau1'| = kappa1 / |lambda|."""
    cases = _nondegenerate_g3_partners()
    c = by_name("PG3-I", "log_type1").curve()
    cases.append((c, construct_partner(c, -1.0).partner))
    cases.append((pg1_nonconstant_mannheim(), None))
    for alpha, partner in cases:
        lam = mannheim_constant(alpha).lam
        if partner is None:
            partner = construct_partner(alpha, lam).partner
        s = partner.grid()
        fa = frame_jets(alpha, s, order=1)
        fp = frame_jets(partner, s, order=1)
        sign = 1.0 if alpha.space is Space.G3 else -1.0
        tol = 1e-9 if isinstance(partner, OffsetCurve) else 1e-4
        assert np.abs(fp.tau.value - sign * fa.tau.value).max() <= tol
        assert np.abs(np.abs(fp.tau.coeffs[1]) - fp.kappa.value / abs(lam)).max() <= tol


# --- closed forms ----------------------------------------------------------------------

@pytest.mark.parametrize("eps", [1, -1])
def test_tanh_closed_form_fits_pseudo_fixture(tanh_curve, eps):
    report = closed_form_check(tanh_curve, 1.0, eps)
    assert report.closed_form_residual_tanh <= 1e-6
    assert report.closed_form_residual_tan >= 0.1


def test_tan_closed_form_fits_g3_fixture(tan_curve):
    report = closed_form_check(tan_curve, 1.0, 1)
    assert report.closed_form_residual_tan <= 1e-6
    assert report.c0 == pytest.approx(-0.103, abs=1e-12)  # -(first grid point)


def test_closed_form_with_zero_curvature_is_constant():
    s = np.linspace(0, 1, 21)
    tau = np.full_like(s, 0.4)
    for space in ("G3", "PG3-I"):
        r_tan, r_tanh, *_ = closed_form_residuals(s, np.zeros_like(s), tau, 2.0, 1, space)
        assert r_tan <= 1e-15 and r_tanh <= 1e-15


def test_tanh_form_unavailable_when_out_of_range():
    s = np.linspace(0, 1, 21)
    tau = np.full_like(s, 0.8)
    _, r_tanh, _, c0h, _ = closed_form_residuals(s, np.zeros_like(s), tau, 2.0, 1, "PG3-I")
    assert r_tanh is None and c0h is None


def test_tan_poles_are_masked():
    s = np.linspace(0, math.pi, 101)
    tau = -np.tan(s)
    r_tan, _, _, _, masked = closed_form_residuals(s, np.ones_like(s), tau, 1.0, 1, "PG3-I")
    assert masked >= 1
    assert r_tan <= 1e-6


def test_epsilon_validated(tanh_curve):
    with pytest.raises(InputError):
        closed_form_check(tanh_curve, 1.0, 2)


def test_theorem_report_serializes(tanh_curve):
    d = closed_form_check(tanh_curve, 1.0).to_dict()
    for key in ("ode_residual", "closed_form_residual_tan", "closed_form_residual_tanh"):
        assert math.isfinite(d[key]) and d[key] >= 0
    assert math.isfinite(d["c0"])


# --- helices ----------------------------------------------------------------------------

@pytest.mark.parametrize("space, name", [("G3", "circle"), ("PG3-I", "hyperbola")])
def test_helix_partners_are_straight(space, name):
    report = helix_planar_check(by_name(space, name).curve())
    assert report.is_helix
    assert report.partner_degenerate
    assert report.proposition_satisfied


def test_nonconstant_mannheim_is_not_a_helix(g3_synth):
    report = helix_planar_check(g3_synth)
    assert report.mannheim.verdict is Verdict.MANNHEIM
    assert report.is_helix is False
    assert report.proposition_satisfied is None


def test_helix_check_skipped_for_non_mannheim():
    report = helix_planar_check(by_name("G3", "cubic").curve())
    assert report.proposition_satisfied is None
    assert report.partner_degenerate is None


# --- characterization ---------------------------------------------------------------------

@pytest.mark.parametrize("space, name", CONSTANT_C)
def test_mannheim_curves_have_partners(space, name):
    assert characterize(by_name(space, name).curve()).passed


@pytest.mark.parametrize("space, name", VARYING_C)
def test_non_mannheim_curves_have_no_partner_in_sweep(space, name):
    report = characterize(by_name(space, name).curve())
    assert report.passed
    assert min(report.sweep.values()) >= 0.1


def test_synthesized_curves_characterized(g3_synth, pg1_synth):
    for c in (g3_synth, pg1_synth):
        report = characterize(c)
        assert report.mannheim.verdict is Verdict.MANNHEIM
        assert report.pair.coincidence_residual <= 1e-6
        assert report.passed
