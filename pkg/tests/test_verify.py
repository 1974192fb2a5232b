import json
import math

import numpy as np
import pytest
from helpers import random_series
from hypothesis import given, settings
from hypothesis import strategies as st

from slicereg.errors import (
    HypothesisFailed,
    InputFormatError,
    NotIntrinsic,
    NotNormalized,
    NonzeroConstantTerm,
    ParameterOutOfRange,
    PrerequisiteNotMet,
    SchwarzViolation,
)
from slicereg.geocheck import Condition, SampleGrid, check_condition
from slicereg.maps import caratheodory_extremal, geometric, half_identity, koebe
from slicereg.quat import UNIT_I, UNIT_J, Quaternion, UnitImaginary
from slicereg.series import TruncatedSeries, bullet_compose
from slicereg.verify import (
    MP_NORMALIZATION,
    CoefficientKind,
    Envelope,
    LaurentTail,
    MNorm,
    area_complement,
    build_subordinate,
    coefficient_bounds,
    integral_mean,
    integral_mean_bound,
    koebe_quarter,
    m_norm,
    rogosinski,
    sphere_measure,
    subordination_suite,
    t_transform_bounds,
    verify_envelope,
)

GRID = SampleGrid.default()
Q = TruncatedSeries.identity(64)


def _consistent(rep):
    assert rep.passed == (rep.max_violation <= rep.tolerance)
    assert rep.tightness is None or rep.tightness >= -rep.max_violation - 1e-15


# --- envelopes ------------------------------------------------------------------------


@pytest.mark.parametrize("kind", list(Envelope))
def test_identity_passes_every_envelope_strictly(kind):
    rep = verify_envelope(Q, kind, GRID)
    _consistent(rep)
    assert rep.passed and rep.tightness > 0 and not rep.extremal


def test_caratheodory_extremal_contact():
    f = caratheodory_extremal(0.0, UNIT_I, 128)
    rep = verify_envelope(f, Envelope.CARATHEODORY, GRID)
    assert rep.passed and rep.extremal
    assert rep.details["lower_tightness"] < 1e-8
    w = rep.details["lower_witness"]
    assert w[0] < 0 and np.allclose(w[1:], 0.0, atol=1e-15)
    assert rep.hypotheses["sampled"] == ["positive-deriv-real-part"]


def test_caratheodory_prerequisite():
    k = koebe(64)
    with pytest.raises(PrerequisiteNotMet):
        verify_envelope(k, Envelope.CARATHEODORY, GRID)
    wrong = check_condition(k, Condition.SLICE_STARLIKE, GRID)
    with pytest.raises(PrerequisiteNotMet):
        verify_envelope(k, Envelope.CARATHEODORY, GRID, prerequisite=wrong)


def test_koebe_growth_contact_at_negative_radius():
    rep = verify_envelope(koebe(64), Envelope.GROWTH, GRID)
    assert rep.passed and rep.extremal
    w = rep.details["lower_witness"]
    assert w[0] < 0 and np.allclose(w[1:], 0.0, atol=1e-15)
    assert "injectivity on slice i" in rep.hypotheses["sampled"]
    assert "univalence on the unit ball" in rep.hypotheses["asserted"]


def test_envelope_preconditions():
    with pytest.raises(NotNormalized):
        verify_envelope(Q * 2.0, Envelope.GROWTH, GRID)
    with pytest.raises(NotIntrinsic):
        verify_envelope(TruncatedSeries([[0, 0, 0, 0], [1, 0, 0, 0], [0, 0.1, 0, 0]]), Envelope.GROWTH, GRID)
    # q + 3q^2/2 identifies x and -2/3 - x; both of -1/4 and -5/12 are grid points here
    grid = SampleGrid.generate(radii=[0.25, 5 / 12], angles=64)
    with pytest.raises(HypothesisFailed):
        verify_envelope(TruncatedSeries.from_real([0, 1, 1.5]), Envelope.DISTORTION, grid)


# --- integral mean, quarter theorem ----------------------------------------------------


def test_integral_mean_examples():
    r = 0.5
    assert math.isclose(integral_mean(TruncatedSeries.one(4), UNIT_I, r, 64), 2 * math.pi * r, rel_tol=1e-14)
    rep = integral_mean_bound(koebe(64), UNIT_I, r, 256)
    assert rep.passed and math.isclose(rep.details["bound"], 6 * math.pi)
    fine = integral_mean_bound(koebe(64), UNIT_I, r, 512)
    assert abs(fine.details["value"] - rep.details["value"]) < 1e-6


def test_integral_mean_refinement_converges():
    d = koebe(400)
    from slicereg.series import slice_derivative

    d = slice_derivative(d)
    for r in (0.3, 0.6, 0.9):
        assert abs(integral_mean(d, UNIT_I, r, 256) - integral_mean(d, UNIT_I, r, 512)) < 1e-8


def test_integral_mean_rejects_untrusted_radius():
    from slicereg.errors import InsufficientSamples

    with pytest.raises(InsufficientSamples):
        integral_mean_bound(koebe(32), UNIT_I, 0.9)
    with pytest.raises(ParameterOutOfRange):
        integral_mean_bound(koebe(32), UNIT_I, 1.0)


def test_koebe_quarter():
    rep = koebe_quarter(koebe(64), GRID)
    assert rep.passed and rep.extremal
    grid = SampleGrid.generate(radii=[0.99], angles=64)
    rep = koebe_quarter(koebe(4000), grid)
    assert rep.details["min_modulus"][0] >= 0.2487
    q = koebe_quarter(Q, GRID)
    assert np.allclose(q.details["min_modulus"], GRID.radii)
    assert koebe_quarter(caratheodory_extremal(0.0, UNIT_I, 128), GRID).passed


# --- area theorem ----------------------------------------------------------------------


def test_area_trivial_and_single_term():
    res = area_complement(LaurentTail([[0, 0, 0, 0], [0, 0, 0, 0]]))
    assert math.isclose(res.formula_value, 2 * math.pi)
    assert math.isclose(res.oracle_value, 2 * math.pi, rel_tol=1e-5)
    formula, oracle = area_complement(LaurentTail([[0, 0, 0, 0], [0.5, 0, 0, 0]]))
    assert math.isclose(formula, math.pi * 1.75)
    assert abs(formula - oracle) / formula < 0.01


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_area_oracle_small_tails(seed, M):
    rng = np.random.default_rng(seed)
    c = rng.standard_normal((M + 1, 4))
    n = np.arange(M + 1)
    total = float(np.sum(n * np.sum(c**2, axis=1)))
    target = rng.uniform(0.05, 0.5)
    c[1:] *= math.sqrt(target / total)
    try:
        res = area_complement(LaurentTail(c), UnitImaginary.normalized(*rng.standard_normal(3)))
    except HypothesisFailed:
        return
    assert res.relative_error < 0.01 and res.report.passed


def test_area_hypothesis_failure():
    # z + a/z identifies z and a/z; with a = 1.02 * 1.7 both lie on sampled exterior circles
    with pytest.raises(HypothesisFailed):
        area_complement(LaurentTail([[0, 0, 0, 0], [1.02 * 1.7, 0, 0, 0]]))


def test_laurent_tail_validation():
    with pytest.raises(InputFormatError):
        LaurentTail([[0, 0, 0, 0]])
    with pytest.raises(InputFormatError):
        LaurentTail.from_json('{"coeffs": [[0, 0, 0]]}')
    t = LaurentTail([[0, 0, 0, 0], [0.5, 0, 0, 0]])
    assert LaurentTail.from_json(json.dumps(t.to_dict())).M == 1


# --- coefficient bounds ----------------------------------------------------------------


def test_coefficient_bound_equality_cases():
    rep = coefficient_bounds(koebe(128), CoefficientKind.BIEBERBACH)
    assert rep.passed and rep.tightness == 0.0 and rep.extremal
    assert rep.hypotheses["asserted"]
    rep = coefficient_bounds(geometric(64), "convex-coeff")
    assert rep.passed and rep.tightness == 0.0
    rep = coefficient_bounds(LaurentTail([[0, 0, 0, 0], [1.0, 0, 0, 0]]), "area-sum")
    assert rep.passed and rep.details["area_sum"] == 1.0
    rep = coefficient_bounds(koebe(10), "convex-coeff")
    assert not rep.passed and rep.witness == Quaternion(10.0)


# --- Rogosinski and subordination ------------------------------------------------------


def test_rogosinski_examples():
    k = koebe(32)
    assert rogosinski(k, k).tightness == 0.0
    f = build_subordinate(k, half_identity(32))
    rep = rogosinski(f, k)
    assert rep.passed and min(rep.details["per_n_slack"]) > 0
    lam = Quaternion(0, 0.6, 0.8, 0)
    rep = rogosinski(TruncatedSeries.monomial(1, lam, 1), TruncatedSeries.identity(1))
    assert rep.passed and abs(rep.tightness) < 1e-15


def test_build_subordinate():
    rng = np.random.default_rng(0)
    g = random_series(rng, 16)
    assert build_subordinate(g, TruncatedSeries.identity(16)).max_diff(g) == 0.0
    f = build_subordinate(g, half_identity(16))
    assert np.allclose(f.coeffs, g.coeffs * (0.5 ** np.arange(17))[:, None], rtol=0, atol=1e-16)
    sq = build_subordinate(g, TruncatedSeries.monomial(2, 1.0, 16))
    assert np.all(sq.coeffs[1::2] == 0)
    assert f.certificate["intrinsic_w"] and f.g is g
    with pytest.raises(NonzeroConstantTerm):
        build_subordinate(g, TruncatedSeries.one(4))
    with pytest.raises(SchwarzViolation):
        build_subordinate(g, TruncatedSeries.monomial(1, 1.5, 4))


def test_subordination_suite_examples():
    k = koebe(64)
    rep = subordination_suite(k, k)
    assert rep.passed
    minf = m_norm(k, MNorm.inf_slice(UNIT_I), 0.5)
    assert rep.details["inequalities"]["slice_max"]["slack"] >= (math.sqrt(2) - 1) * minf - 1e-12
    f = build_subordinate(k, half_identity(64))
    rep = subordination_suite(f, k)
    assert rep.passed
    assert rep.details["inequalities"]["derivative_at_zero"]["lhs"] == 0.5
    lam = Quaternion(0.5, 0.5, -0.5, 0.5)
    rep = subordination_suite(TruncatedSeries.monomial(1, lam, 8), TruncatedSeries.identity(8))
    assert abs(rep.details["inequalities"]["derivative_at_zero"]["slack"]) < 1e-15
    with pytest.raises(PrerequisiteNotMet):
        subordination_suite(k + TruncatedSeries.one(64), k)


# --- norms ------------------------------------------------------------------------------


def test_m_norm_slice_examples():
    q = TruncatedSeries.identity(4)
    r = 0.6
    assert math.isclose(m_norm(q, MNorm.inf_slice(UNIT_I), r), r)
    assert math.isclose(m_norm(q, MNorm.mp_slice(2, UNIT_J), r), r)
    assert abs(m_norm(koebe(400), MNorm.inf_slice(UNIT_I), 0.5) - 0.5 / 0.25) < 1e-6
    with pytest.raises(ParameterOutOfRange):
        m_norm(q, MNorm.inf(), 1.0)
    with pytest.raises(ParameterOutOfRange):
        m_norm(q, MNorm.mp(0.5), 0.5)


def test_m_norm_sphere_normalization():
    q = TruncatedSeries.identity(4)
    r = 0.5
    # |q| = r on the sphere: M_p^p = r^p * measure / (4 pi)
    expected = (MP_NORMALIZATION * sphere_measure(r) * r**2) ** 0.5
    assert math.isclose(m_norm(q, MNorm.mp(2), r), expected, rel_tol=1e-10)
    assert math.isclose(m_norm(q, MNorm.inf(), r), r, rel_tol=1e-14)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_sphere_max_dominates_slice_max(seed):
    rng = np.random.default_rng(seed)
    f = random_series(rng, 12)
    u = UnitImaginary.normalized(*rng.standard_normal(3))
    r = float(rng.uniform(0.1, 0.9))
    assert m_norm(f, MNorm.inf(), r) >= m_norm(f, MNorm.inf_slice(u), r) - 1e-12


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 0.9))
def test_mp_slice_resolution_convergence(seed, r):
    f = random_series(np.random.default_rng(seed), 16, rho=1.0)
    a = m_norm(f, MNorm.mp_slice(2, UNIT_I), r, 256)
    b = m_norm(f, MNorm.mp_slice(2, UNIT_I), r, 512)
    assert abs(a - b) < 1e-8


def test_m_infinity_brute_force():
    rng = np.random.default_rng(1)
    f = random_series(rng, 8)
    r = 0.7
    from slicereg.series import evaluate_many

    best = 0.0
    for _ in range(20):
        u = rng.standard_normal(3)
        u /= np.linalg.norm(u)
        best = max(best, m_norm(f, MNorm.inf_slice(UnitImaginary(*u)), r))
    assert m_norm(f, MNorm.inf(), r) >= best - 1e-12


# --- t transform -------------------------------------------------------------------------


def test_t_transform_examples():
    rep = t_transform_bounds(TruncatedSeries.identity(4), 0.9, 201)
    assert rep.passed
    assert rep.details["first_tightness"] > 0
    f = TruncatedSeries.from_real([0, 1, 0.25])
    assert t_transform_bounds(f, 0.5, 101).passed
    with pytest.raises(ParameterOutOfRange):
        t_transform_bounds(f, 1.0)


def test_reports_are_deterministic():
    a = verify_envelope(koebe(64), Envelope.DISTORTION, SampleGrid.default(seed=5)).to_dict()
    b = verify_envelope(koebe(64), Envelope.DISTORTION, SampleGrid.default(seed=5)).to_dict()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
