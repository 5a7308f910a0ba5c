import math

import numpy as np
import pytest

from cverasure.codec import CodecConfig
from cverasure.gaussian import coherent, db_to_r, squeezed, thermal, vacuum
from cverasure.postselect import (
    QuadratureError,
    ThresholdWindow,
    direct_channel_fidelity,
    filter_analytic,
    filter_monte_carlo,
    simple_splitter_protocol,
)

A = 2 * math.sqrt(2)
IN1 = coherent(A, A)


def no_erasure_rectangle_mass(r, eta, n_e, x_th, p_th):
    """Closed form: without erasures the outcomes are independent, zero-mean,
    each with variance eta e^{-2r} + 1 - eta + n_e."""
    s = eta * math.exp(-2 * r) + 1 - eta + n_e
    return math.erf(x_th / math.sqrt(2 * s)) * math.erf(p_th / math.sqrt(2 * s))


@pytest.mark.parametrize("db", [0.0, 3.0, 6.0])
@pytest.mark.parametrize("eta", [1.0, 0.9])
def test_no_erasure(db, eta):
    r = db_to_r(db)
    w = ThresholdWindow(0.8, 1.3)
    res = filter_analytic(IN1, vacuum(1), 0.0, CodecConfig(r, eta, 0.02), w)
    assert res.fidelity_out1 == pytest.approx(1, abs=1e-12)
    assert res.fidelity_out2 == pytest.approx(1, abs=1e-12)
    assert res.success_prob == pytest.approx(no_erasure_rectangle_mass(r, eta, 0.02, 0.8, 1.3), abs=1e-12)


def test_no_erasure_nonvacuum_second_input():
    in2 = squeezed(0.3, 0.5, -0.4, 0.9)
    res = filter_analytic(coherent(0.5, 1.0), in2, 0.0, CodecConfig(0.4, 0.9), ThresholdWindow(0.5, 0.5))
    assert res.fidelity_out1 == pytest.approx(1, abs=1e-12)
    assert res.fidelity_out2 == pytest.approx(1, abs=1e-12)


def test_huge_window_keeps_everything():
    for pe in (0.0, 0.3, 1.0):
        res = filter_analytic(IN1, vacuum(1), pe, CodecConfig(db_to_r(3), 0.9), ThresholdWindow(1e3, 1e3))
        assert res.success_prob == pytest.approx(1, abs=1e-6)


def test_huge_window_matches_unconditioned_mixture():
    """With no postselection the fidelity is the pattern-weighted overlap of the
    undisplaced outputs, which can be built from the deterministic decoder with zero gains."""
    from cverasure.channel import all_patterns, erase_modes
    from cverasure.codec import decode_deterministic, encode
    from cverasure.gaussian import overlap_fidelity

    r, pe = db_to_r(3), 0.2
    cfg = CodecConfig(r, 0.9)
    enc = encode(IN1, vacuum(1), r)
    expected = sum(
        p.probability * overlap_fidelity(IN1, decode_deterministic(erase_modes(enc, p), None, cfg)[0])
        for p in all_patterns(pe)
    )
    res = filter_analytic(IN1, vacuum(1), pe, cfg, ThresholdWindow(1e3, 1e3))
    assert res.fidelity_out1 == pytest.approx(expected, abs=1e-9)


def test_breakdown_recomposes():
    res = filter_analytic(IN1, vacuum(1), 0.2, CodecConfig(db_to_r(3), 0.9), ThresholdWindow.auto(db_to_r(3)))
    assert len(res.per_pattern_breakdown) == 16
    ps = sum(c.pattern.probability * c.acceptance_prob for c in res.per_pattern_breakdown)
    assert abs(ps - res.success_prob) <= 1e-9
    for c in res.per_pattern_breakdown:
        assert 0 <= c.acceptance_prob <= 1
        assert 0 <= c.fidelity_mass_out1 <= c.acceptance_prob + 1e-15
    assert res.convergence <= 1e-6


def test_zero_db_beats_direct_transmission():
    cfg = CodecConfig(0.0, 0.9, 0.0)
    res = filter_analytic(IN1, vacuum(1), 0.1, cfg, ThresholdWindow(1, 1))
    direct = direct_channel_fidelity(IN1, 0.1)
    assert direct == pytest.approx(0.9, abs=1e-6)
    assert res.fidelity_out1 > direct


def test_simple_splitter_is_the_zero_db_case():
    w = ThresholdWindow(1, 1)
    for pe in (0.0, 0.05, 0.15, 0.25):
        a = simple_splitter_protocol(IN1, pe, w, eta_hd=0.9)
        b = filter_analytic(IN1, vacuum(1), pe, CodecConfig(0.0, 0.9, 0.0), w)
        assert (a.success_prob, a.fidelity_out1, a.fidelity_out2) == (b.success_prob, b.fidelity_out1, b.fidelity_out2)
        assert a.fidelity_out1 > direct_channel_fidelity(IN1, pe) or pe == 0
    assert simple_splitter_protocol(IN1, 0.0, w).fidelity_out1 == pytest.approx(1, abs=1e-12)


def test_direct_channel_fidelity():
    assert direct_channel_fidelity(IN1, 0.0) == 1.0
    for pe in (0.1, 0.5, 1.0):
        assert direct_channel_fidelity(vacuum(1), pe) == pytest.approx(1.0, abs=1e-15)
    assert direct_channel_fidelity(IN1, 0.2) == pytest.approx(0.8 + 0.2 * math.exp(-16), rel=1e-15)


def test_shrinking_window_filters():
    r = db_to_r(3)
    cfg = CodecConfig(r, 0.9)
    for pe in (0.1, 0.3):
        prev = None
        for t in (2.0, 1.0, 0.7, 0.4, 0.2):
            res = filter_analytic(IN1, vacuum(1), pe, cfg, ThresholdWindow(t, t))
            if prev is not None:
                assert res.fidelity_out1 >= prev.fidelity_out1 - 1e-9
                assert res.success_prob < prev.success_prob
            prev = res


def test_amplitude_dependence():
    """Postselected fidelity dips at low input intensity and then rises.

    At |alpha| = 0 an erasure is harmless (the input is vacuum), so the curve
    starts high, falls while erasures go undetected, and climbs again once the
    bright input makes erased events visible in the homodyne outcomes.
    """
    r = db_to_r(3)
    cfg = CodecConfig(r, 0.9)
    w = ThresholdWindow.auto(r)
    a2 = np.arange(0, 17)
    f = np.array([filter_analytic(coherent(math.sqrt(x / 2), math.sqrt(x / 2)), vacuum(1), 0.1, cfg, w).fidelity_out1 for x in a2])
    k = int(np.argmin(f))
    assert 1 <= k <= 6
    assert np.all(np.diff(f[:k + 1]) < 0)
    assert np.all(np.diff(f[k:]) >= -1e-9)


def test_symmetrized_postselection():
    r = db_to_r(3)
    cfg = CodecConfig(r, 0.9, symmetrize=True)
    in2 = coherent(-1.0, 0.5)
    res = filter_analytic(IN1, in2, 0.0, cfg, ThresholdWindow.auto(r))
    assert res.fidelity_out1 == pytest.approx(1, abs=1e-12)
    assert res.fidelity_out2 == pytest.approx(1, abs=1e-12)
    res = filter_analytic(IN1, in2, 0.2, cfg, ThresholdWindow.auto(r))
    mc = filter_monte_carlo(IN1, in2, 0.2, cfg, ThresholdWindow.auto(r), 50_000, 3)
    assert abs(res.fidelity_out2 - mc.fidelity_out2) <= 3 * mc.fidelity_out2_se


def test_impure_second_input_reports_nan():
    res = filter_analytic(IN1, thermal(0.2), 0.1, CodecConfig(0.3), ThresholdWindow(1, 1))
    assert math.isnan(res.fidelity_out2) and not math.isnan(res.fidelity_out1)


def test_quadrature_nonconvergence_is_reported():
    with pytest.raises(QuadratureError):
        filter_analytic(IN1, vacuum(1), 0.2, CodecConfig(db_to_r(6), 0.9), ThresholdWindow(3, 3), quadrature_order=1)


def test_window_validation():
    with pytest.raises(ValueError):
        ThresholdWindow(0, 1)
    with pytest.raises(ValueError):
        ThresholdWindow(1, math.inf)
    assert ThresholdWindow.auto(0.0) == ThresholdWindow(1.0, 1.0)


class TestMonteCarlo:
    def test_no_erasure_fidelity_is_one(self):
        res = filter_monte_carlo(IN1, vacuum(1), 0.0, CodecConfig(0.3, 0.9), ThresholdWindow(1, 1), 5000, 0)
        assert res.fidelity_out1 == pytest.approx(1, abs=1e-12)
        assert res.fidelity_out1_se <= 1e-12

    def test_deterministic_under_seed(self):
        args = (IN1, vacuum(1), 0.3, CodecConfig(0.3, 0.9), ThresholdWindow(1, 1), 5000)
        a, b = filter_monte_carlo(*args, seed=5), filter_monte_carlo(*args, seed=5)
        assert (a.success_prob, a.fidelity_out1) == (b.success_prob, b.fidelity_out1)

    def test_huge_window(self):
        res = filter_monte_carlo(IN1, vacuum(1), 0.4, CodecConfig(0.3, 0.9), ThresholdWindow(1e3, 1e3), 2000, 1)
        assert res.success_prob == 1.0

    def test_all_erased_matches_analytic(self):
        cfg = CodecConfig(db_to_r(3), 0.9)
        w = ThresholdWindow(1.5, 1.5)
        an = filter_analytic(IN1, vacuum(1), 1.0, cfg, w)
        mc = filter_monte_carlo(IN1, vacuum(1), 1.0, cfg, w, 100_000, 17)
        assert abs(an.success_prob - mc.success_prob) <= 3 * mc.success_prob_se
        # everything erased: the outputs are vacuum whatever the outcomes
        assert an.fidelity_out1 == pytest.approx(math.exp(-16), rel=1e-9)
        assert mc.fidelity_out1 == pytest.approx(math.exp(-16), rel=1e-9)

    def test_rejects_bad_sample_count(self):
        with pytest.raises(ValueError):
            filter_monte_carlo(IN1, vacuum(1), 0.1, CodecConfig(0.3), ThresholdWindow(1, 1), 0)
