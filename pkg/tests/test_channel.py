import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cverasure.channel import (
    ErasurePattern,
    GaussianMixture,
    all_patterns,
    channel_mixture,
    erase_modes,
    loss_by_ancilla,
    partial_loss,
    sample_pattern,
    sample_patterns,
)
from cverasure.codec import encode
from cverasure.gaussian import coherent, partial_trace, squeezed, tensor, vacuum


@pytest.fixture
def encoded():
    return encode(coherent(1.2, -0.4), squeezed(0.3, 0.2, 0.1), 0.5)


def test_empty_and_full_erasure(encoded):
    assert erase_modes(encoded, ErasurePattern.of("")).allclose(encoded, atol=0)
    assert erase_modes(encoded, ErasurePattern.of("ABCD")).allclose(vacuum(4), atol=0)


def test_erase_matches_ancilla_construction(encoded):
    erased = erase_modes(encoded, ErasurePattern.of("A"))
    brute = loss_by_ancilla(encoded, 0, 0.0)
    np.testing.assert_allclose(erased.mean, brute.mean, atol=1e-15)
    np.testing.assert_allclose(erased.cov, brute.cov, atol=1e-15)
    assert partial_trace(erased, [0]).allclose(vacuum(1), atol=1e-15)
    assert partial_trace(erased, [1, 2, 3]).allclose(partial_trace(encoded, [1, 2, 3]), atol=0)


def test_erase_idempotent(encoded):
    p = ErasurePattern.of("BD")
    once = erase_modes(encoded, p)
    assert erase_modes(once, p).allclose(once, atol=0)


def test_erase_bad_mode():
    with pytest.raises(ValueError):
        erase_modes(vacuum(2), ErasurePattern.of("C"))
    with pytest.raises(ValueError):
        ErasurePattern.of("E")


def test_partial_loss():
    c = coherent(1.0, 2.0)
    assert partial_loss(c, 0, 1.0).allclose(c, atol=0)
    assert partial_loss(c, 0, 0.0).allclose(vacuum(1), atol=0)
    half = partial_loss(c, 0, 0.5)
    np.testing.assert_allclose(half.mean, c.mean * math.sqrt(0.5), atol=1e-15)
    np.testing.assert_allclose(half.cov, np.eye(2), atol=1e-15)
    assert half.allclose(loss_by_ancilla(c, 0, 0.5), atol=1e-14)
    with pytest.raises(ValueError):
        partial_loss(c, 0, 1.1)


def test_partial_loss_zero_is_erasure(encoded):
    assert partial_loss(encoded, "C", 0.0).allclose(erase_modes(encoded, ErasurePattern.of("C")), atol=0)


@settings(max_examples=30)
@given(st.floats(0, 1), st.floats(0, 1), st.integers(0, 3))
def test_partial_loss_composes(e1, e2, k):
    s = encode(coherent(1.2, -0.4), squeezed(0.3, 0.2, 0.1), 0.5)
    a = partial_loss(partial_loss(s, k, e1), k, e2)
    b = partial_loss(s, k, e1 * e2)
    assert a.allclose(b, atol=1e-12)


def test_pattern_probabilities():
    pats = all_patterns(0.2)
    assert len(pats) == 16
    single = [p for p in pats if len(p.erased) == 1]
    assert all(p.probability == pytest.approx(0.1024, abs=1e-15) for p in single)
    assert pats[0].probability == pytest.approx(0.8**4)


@given(st.floats(0, 1))
def test_weights_sum_to_one(pe):
    w = [p.probability for p in all_patterns(pe)]
    assert len(w) == 16 and min(w) >= 0
    assert abs(sum(w) - 1) <= 1e-12


def test_mixture(encoded):
    m = channel_mixture(encoded, 0.0)
    assert len(m.components) == 1 and m.components[0][0] == 1.0
    m = channel_mixture(encoded, 0.3)
    assert len(m.components) == 16
    assert abs(m.weights.sum() - 1) <= 1e-12
    with pytest.raises(ValueError):
        channel_mixture(vacuum(2), 0.1)
    with pytest.raises(ValueError):
        GaussianMixture(((0.5, vacuum(1)), (0.4, vacuum(1))))


def test_mixture_reproduces_single_mode_channel():
    """Coherent state on A with vacuum elsewhere: mode-A marginal is (1-p)|a><a| + p|0><0|."""
    pe = 0.27
    c = coherent(0.8, -1.3)
    m = channel_mixture(tensor(c, vacuum(3)), pe)
    intact, lost = 0.0, 0.0
    for w, s in m.components:
        a = partial_trace(s, [0])
        if a.allclose(c, atol=0):
            intact += w
        elif a.allclose(vacuum(1), atol=0):
            lost += w
        else:
            pytest.fail("unexpected component")
    assert intact == pytest.approx(1 - pe, abs=1e-12)
    assert lost == pytest.approx(pe, abs=1e-12)


def test_sampling():
    rng = np.random.default_rng(0)
    assert not sample_patterns(0.0, 1000, rng).any()
    assert sample_patterns(1.0, 1000, rng).all()
    assert sample_pattern(0.0, 1).erased == frozenset()
    assert sample_pattern(1.0, 1).erased == frozenset(range(4))
    assert sample_pattern(0.4, 9) == sample_pattern(0.4, 9)
    n = 100_000
    freq = sample_patterns(0.3, n, np.random.default_rng(42))[:, 0].mean()
    assert abs(freq - 0.3) <= 3 * math.sqrt(0.3 * 0.7 / n)
