import math

import numpy as np
import pytest

from wirtinger import (PeriodicWeight, PowerWeightPair, bound_general,
                       bound_power, closed_form_pq0, extremal_fn_pq,
                       extremal_fn_ps, extremal_weight_pq, extremal_weight_ps,
                       mu_constant, rayleigh_quotient,
                       sharpness_characterization, sine_family,
                       verify_sharpness)

TWO_PI = 2 * math.pi
ONE = PeriodicWeight.constant(1.0)
ABAR = extremal_weight_ps(4.0)
PS_CONSTANT = ((4 / math.pi) * math.atan(4 ** -0.5)) ** -2


def one_sided(fn, fn_prime, x, side, eps=1e-7):
    """First-order one-sided limit of fn at x from `side` (+1 or -1)."""
    x0 = x - side * eps
    return float(fn(x0)) + side * eps * float(fn_prime(x0))


def flux_one_sided(weight, fn_prime, x, side, eps=1e-7):
    """Richardson-extrapolated one-sided limit of weight * fn'."""
    f1 = float(weight.eval(x - side * eps)) * float(fn_prime(x - side * eps))
    f2 = float(weight.eval(x - side * 2 * eps)) * float(fn_prime(x - side * 2 * eps))
    return 2 * f1 - f2


# -- bounds -------------------------------------------------------------


def test_bound_general_trivial():
    assert bound_general(ONE, ONE) == pytest.approx(1.0, rel=1e-15)


def test_bound_general_equal_weights_matches_ps():
    assert bound_general(ABAR, ABAR) == pytest.approx(PS_CONSTANT, rel=1e-14)


def test_bound_general_reciprocal_pair():
    assert bound_general(ABAR, ABAR.power(-1.0)) == pytest.approx(6.25, rel=1e-14)


def test_bound_power_trivial():
    pair = PowerWeightPair.create(ABAR, 0.0, 0.0)
    assert bound_power(pair) == pytest.approx(1.0, rel=1e-15)


def test_bound_power_equal_exponents_reduce_to_ps():
    pair = PowerWeightPair.create(ABAR, 1.0, 1.0)
    assert bound_power(pair) == pytest.approx(PS_CONSTANT, rel=1e-14)


def test_bound_power_example_4_1_0():
    gam = extremal_weight_pq(4.0, 1.0, 0.0).weight
    pair = PowerWeightPair.create(gam, 1.0, 0.0)
    expected = ((4.0 / 3.0) / ((4 / math.pi) * math.atan(4 ** -0.25))) ** 2
    assert bound_power(pair) == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(2.895, abs=2e-3)


def test_bound_power_rejects_negative_sum():
    with pytest.raises(ValueError):
        bound_power(PowerWeightPair.create(ABAR, 0.0, -1.0))


def test_bound_power_specialization_property():
    for gam, p in [(ABAR, 1.0), (ABAR, 2.0), (sine_family(4.0), 1.0)]:
        pair = PowerWeightPair.create(gam, p, p)
        assert bound_power(pair) == pytest.approx(
            bound_general(gam.power(p), gam.power(p)), rel=1e-12)


def test_power_pair_normalizes_gamma():
    pair = PowerWeightPair.create(ABAR.scale(3.0), 1.0, 1.0)
    assert pair.gamma.ess_bounds().inf == pytest.approx(1.0, abs=1e-12)
    assert pair.M == pytest.approx(4.0, rel=1e-12)


# -- extremal profiles -------------------------------------------------


def test_extremal_weight_ps_values():
    assert list(ABAR.values) == [1.0, 4.0, 1.0, 4.0]
    assert np.allclose(ABAR.breakpoints,
                       [0, math.pi / 2, math.pi, 3 * math.pi / 2])


def test_extremal_fn_ps_classical_limit():
    prof = extremal_fn_ps(1.0)
    assert prof.constants["lambda"] == pytest.approx(1.0, rel=1e-14)
    probes = np.linspace(0, TWO_PI, 33)
    assert np.allclose(prof.fn(probes), np.sin(probes - math.pi / 4),
                       atol=1e-12)


def test_extremal_fn_ps_continuity_identity():
    # continuity at pi/2 encodes tan(sqrt(lambda) pi/4) = L^(-1/2)
    prof = extremal_fn_ps(4.0)
    lam = prof.constants["lambda"]
    assert math.tan(math.sqrt(lam) * math.pi / 4) == pytest.approx(0.5, rel=1e-14)
    left = one_sided(prof.fn, prof.fn_prime, math.pi / 2, -1)
    right = one_sided(prof.fn, prof.fn_prime, math.pi / 2, +1)
    assert left == pytest.approx(right, abs=1e-12)


def test_extremal_fn_ps_attains_quotient():
    prof = extremal_fn_ps(4.0)
    q, resid = rayleigh_quotient(ABAR, ABAR, prof.fn, prof.fn_prime)
    assert q == pytest.approx(1.0 / prof.constants["lambda"], rel=1e-10)
    assert resid <= 1e-8


def test_extremal_weight_pq_cases():
    prof = extremal_weight_pq(4.0, 1.0, 0.0)
    assert prof.constants["c_pq"] == pytest.approx(4.0 / 3.0, rel=1e-15)
    assert np.allclose(prof.weight.breakpoints,
                       [0, 2 * math.pi / 3, math.pi, 5 * math.pi / 3])
    prof = extremal_weight_pq(4.0, 0.0, 1.0)
    assert prof.constants["c_pq"] == pytest.approx(2.0 / 3.0, rel=1e-15)
    assert np.allclose(prof.weight.breakpoints,
                       [0, math.pi / 3, math.pi, 4 * math.pi / 3])


def test_extremal_weight_pq_equal_exponents_match_bar_a():
    prof = extremal_weight_pq(4.0, 1.0, 1.0)
    probes = np.linspace(0.01, TWO_PI, 57)
    assert np.allclose(prof.weight.eval(probes), ABAR.eval(probes))


def test_extremal_weight_pq_rejects_bad_params():
    with pytest.raises(ValueError):
        extremal_weight_pq(1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        extremal_weight_pq(4.0, 1.0, -1.0)


def test_extremal_fn_pq_equal_exponents_reduce_to_ps():
    prof_pq = extremal_fn_pq(4.0, 1.0, 1.0)
    prof_ps = extremal_fn_ps(4.0)
    assert prof_pq.constants["mu"] == pytest.approx(
        prof_ps.constants["lambda"], rel=1e-14)
    probes = np.linspace(0, TWO_PI, 1000, endpoint=False)
    assert np.max(np.abs(prof_pq.fn(probes) - prof_ps.fn(probes))) <= 1e-12


def test_extremal_fn_pq_near_classical_limit():
    for mode in ("continuity_corrected", "paper_literal"):
        prof = extremal_fn_pq(1.0 + 1e-9, 1.0, 0.0, mu_mode=mode)
        assert prof.constants["mu"] == pytest.approx(1.0, abs=1e-8)


def test_mu_modes_disagree_for_m_gt_1():
    corrected = mu_constant(4.0, 1.0, 0.0)
    literal = mu_constant(4.0, 1.0, 0.0, "paper_literal")
    assert abs(corrected - literal) > 0.1
    with pytest.raises(ValueError):
        mu_constant(4.0, 1.0, 0.0, "bogus")


def test_paper_literal_mu_breaks_continuity():
    # the discrepancy at the first breakpoint, evaluated directly
    mu = mu_constant(4.0, 1.0, 0.0, "paper_literal")
    s = math.sqrt(mu)
    resid = abs(math.sin(s * math.pi / 4) - 4 ** -0.25 * math.cos(s * math.pi / 4))
    assert resid > 0.1


def test_corrected_mu_gives_continuity_everywhere():
    prof = extremal_fn_pq(4.0, 1.0, 0.0)
    c = prof.constants["c_pq"]
    for bp in (c * math.pi / 2, math.pi, math.pi + c * math.pi / 2, TWO_PI):
        left = one_sided(prof.fn, prof.fn_prime, bp, -1)
        right = one_sided(prof.fn, prof.fn_prime, bp, +1)
        assert abs(left - right) <= 1e-12


def test_transmission_continuity_corrected():
    # gamma^q * w' is continuous across the weight jumps
    M, p, q = 4.0, 1.0, 0.0
    prof = extremal_fn_pq(M, p, q)
    gq = prof.weight.power(q)
    c = prof.constants["c_pq"]
    for bp in (c * math.pi / 2, math.pi, math.pi + c * math.pi / 2, TWO_PI):
        left = flux_one_sided(gq, prof.fn_prime, bp, -1)
        right = flux_one_sided(gq, prof.fn_prime, bp, +1)
        assert abs(left - right) <= 1e-10


def test_extremal_fn_pq_constraint():
    prof = extremal_fn_pq(4.0, 1.0, 0.0)
    a = prof.weight.power(1.0)
    _, resid = rayleigh_quotient(a, prof.weight.power(0.0),
                                 prof.fn, prof.fn_prime)
    assert resid <= 1e-8


def test_equality_attainment():
    for M, p, q in [(4, 1, 0), (4, 2, 1), (9, 1, 1)]:
        prof = extremal_fn_pq(M, p, q)
        pair = PowerWeightPair.create(prof.weight, p, q)
        quot, _ = rayleigh_quotient(pair.a, pair.b, prof.fn, prof.fn_prime)
        assert quot == pytest.approx(bound_power(pair), rel=1e-6)


# -- p + q = 0 closed form -------------------------------------------------


def test_closed_form_pq0_classical():
    const, prof = closed_form_pq0(ONE, amplitude=1.0, phase=0.3)
    assert const == pytest.approx(1.0, rel=1e-14)
    probes = np.linspace(0, TWO_PI, 33)
    assert np.allclose(prof.fn(probes), np.cos(probes + 0.3), atol=1e-12)


def test_closed_form_pq0_bar_a():
    const, prof = closed_form_pq0(ABAR)
    assert const == pytest.approx(6.25, rel=1e-14)
    q, resid = rayleigh_quotient(ABAR, ABAR.power(-1.0),
                                 prof.fn, prof.fn_prime)
    assert q == pytest.approx(6.25, rel=1e-8)
    assert resid <= 1e-8


def test_closed_form_pq0_rejects_zero_amplitude():
    with pytest.raises(ValueError):
        closed_form_pq0(ABAR, amplitude=0.0)


# -- verification -----------------------------------------------------------


def test_verify_sharpness_extremal_family():
    gam = extremal_weight_pq(4.0, 1.0, 0.0).weight
    rep = verify_sharpness(PowerWeightPair.create(gam, 1.0, 0.0), n=1024)
    assert rep.sharp and abs(rep.relative_gap) <= 5e-3


def test_verify_sharpness_sine_is_strict():
    rep = verify_sharpness(PowerWeightPair.create(sine_family(4.0), 1.0, 0.0),
                           n=1024)
    assert not rep.sharp and rep.relative_gap > 0.01


def test_verify_sharpness_pq0_always_sharp():
    rep = verify_sharpness(PowerWeightPair.create(sine_family(4.0), 1.0, -1.0),
                           n=1024)
    assert rep.sharp and abs(rep.relative_gap) <= 1e-4


def test_verify_sharpness_phase_equivariance():
    def shifted_bar_gamma(phi):
        # gamma(theta + phi) as a piecewise-constant weight; sample each
        # interval slightly inside to dodge rounding at the jumps
        base = extremal_weight_pq(4.0, 1.0, 0.0).weight
        bp = np.sort(np.mod(base.breakpoints - phi, TWO_PI))
        vals = base.eval(bp + phi + 1e-9)
        return PeriodicWeight.piecewise(bp, vals)

    reports = []
    for phi in (0.0, 0.3, 1.7):
        gam = shifted_bar_gamma(phi)
        reports.append(verify_sharpness(PowerWeightPair.create(gam, 1.0, 0.0),
                                        n=1024))
    for rep in reports[1:]:
        assert rep.sharp == reports[0].sharp
        assert rep.bound == pytest.approx(reports[0].bound, rel=1e-6)
        assert rep.computed == pytest.approx(reports[0].computed, rel=1e-6)


def test_sharpness_characterization_equal_bar_a():
    is_sharp, phase, resid = sharpness_characterization(ABAR, ABAR, n=512)
    assert is_sharp and resid <= 1e-12
    assert phase == pytest.approx(0.0, abs=1e-9)


def test_sharpness_characterization_gamma_bar():
    gam = extremal_weight_pq(4.0, 1.0, 0.0).weight
    is_sharp, _, resid = sharpness_characterization(gam, ONE, n=512)
    assert is_sharp and resid <= 1e-12


def test_sharpness_characterization_sine_not_sharp():
    a = sine_family(4.0)
    is_sharp, _, resid = sharpness_characterization(
        a.power(2.0), ONE, n=512, cross_check=False)
    assert not is_sharp and resid > 0.01
