"""Erasure filtration by postselection on the decoder's homodyne outcomes.

Without knowledge of where (or whether) an erasure happened, the decoder
applies no displacement and keeps the two output modes only when the
recorded outcomes satisfy ``|x_m| <= x_th`` and ``|p_m| <= p_th``. Two
engines evaluate the resulting success probability and fidelities: a
deterministic quadrature over the acceptance window and a Monte Carlo
sampler that serves as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .channel import ErasurePattern, all_patterns, erase_modes, pattern_probability, sample_patterns
from .codec import CodecConfig, decoder_premeasurement, encode, measurement_split, symmetrizer_op
from .gaussian import GaussianState, overlap_fidelity, vacuum

DEFAULT_ORDER = 16
CONVERGENCE_TOL = 1e-4
# half-width, in outcome standard deviations, beyond which the window is clipped
CLIP_SIGMAS = 12.0
PANEL_SIGMAS = 3.0


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class ThresholdWindow:
    x_th: float
    p_th: float

    def __post_init__(self):
        for v in (self.x_th, self.p_th):
            if not (math.isfinite(v) and v > 0):
                raise ValueError("thresholds must be finite and positive")

    @classmethod
    def auto(cls, squeeze_r: float) -> "ThresholdWindow":
        t = math.exp(-squeeze_r)
        return cls(t, t)


@dataclass(frozen=True)
class PatternContribution:
    pattern: ErasurePattern
    acceptance_prob: float
    fidelity_mass_out1: float
    fidelity_mass_out2: float

    @property
    def conditional_fidelity_out1(self) -> float:
        return self.fidelity_mass_out1 / self.acceptance_prob if self.acceptance_prob > 0 else float("nan")

    @property
    def conditional_fidelity_out2(self) -> float:
        return self.fidelity_mass_out2 / self.acceptance_prob if self.acceptance_prob > 0 else float("nan")


@dataclass(frozen=True)
class FilterResult:
    success_prob: float
    fidelity_out1: float
    fidelity_out2: float
    per_pattern_breakdown: tuple = field(default=(), repr=False)
    success_prob_se: float = 0.0
    fidelity_out1_se: float = 0.0
    fidelity_out2_se: float = 0.0
    convergence: float = 0.0
    engine: str = "analytic"


@dataclass(frozen=True)
class _PatternModel:
    """Outcome Gaussian and fidelity-target parameters for one erasure pattern."""

    mu: np.ndarray
    cov: np.ndarray
    base: np.ndarray
    K: np.ndarray
    M: np.ndarray
    pref: np.ndarray

    @property
    def icov(self):
        return np.linalg.inv(self.cov)

    @property
    def norm(self):
        return 1.0 / (2.0 * np.pi * math.sqrt(np.linalg.det(self.cov)))


def _is_pure(s: GaussianState) -> bool:
    return s.n_modes == 1 and abs(s.symplectic_eigenvalues()[0] - 1.0) <= 1e-6


def _pattern_model(encoded, pattern, cfg, targets) -> _PatternModel:
    pre = decoder_premeasurement(erase_modes(encoded, pattern))
    split = measurement_split(pre, cfg.eta_hd, cfg.n_e)
    mean, cov, gain = split.rest.mean, split.rest.cov, split.gain
    if cfg.symmetrize:
        B = symmetrizer_op().matrix
        mean, cov, gain = B @ mean, B @ cov @ B.T, B @ gain
    base, K, M, pref = [], [], [], []
    for j, tgt in enumerate(targets):
        sl = slice(2 * j, 2 * j + 2)
        Vs = tgt.cov + cov[sl, sl]
        base.append(mean[sl] - tgt.mean)
        K.append(gain[sl])
        M.append(np.linalg.inv(Vs))
        pref.append(2.0 / math.sqrt(np.linalg.det(Vs)))
    return _PatternModel(split.outcome_mean, split.outcome_cov, np.array(base), np.array(K), np.array(M), np.array(pref))


def _targets(in1, in2):
    # impure inputs get a vacuum placeholder; their fidelity is reported as NaN
    return [s if _is_pure(s) else vacuum(1) for s in (in1, in2)], [_is_pure(in1), _is_pure(in2)]


def _axis_nodes(lo, hi, sigma, order):
    if hi <= lo:
        return np.empty(0), np.empty(0)
    n_panels = max(1, math.ceil((hi - lo) / (PANEL_SIGMAS * sigma)))
    t, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    xs = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    ws = (half[:, None] * w[None, :]).ravel()
    return xs, ws


def _integrate(model: _PatternModel, window: ThresholdWindow, order: int):
    sx, sp = np.sqrt(np.diag(model.cov))
    xs, wx = _axis_nodes(max(-window.x_th, model.mu[0] - CLIP_SIGMAS * sx), min(window.x_th, model.mu[0] + CLIP_SIGMAS * sx), sx, order)
    ps, wp = _axis_nodes(max(-window.p_th, model.mu[1] - CLIP_SIGMAS * sp), min(window.p_th, model.mu[1] + CLIP_SIGMAS * sp), sp, order)
    if xs.size == 0 or ps.size == 0:
        return 0.0, np.zeros(len(model.pref))
    return kernels.window_integrate(xs, wx, ps, wp, model.mu, model.icov, model.norm, model.base, model.K, model.M, model.pref)


def _summarize(contribs, fid_ok):
    ps = sum(c.pattern.probability * c.acceptance_prob for c in contribs)
    f1 = sum(c.pattern.probability * c.fidelity_mass_out1 for c in contribs)
    f2 = sum(c.pattern.probability * c.fidelity_mass_out2 for c in contribs)
    nan = float("nan")
    fid1 = min(f1 / ps, 1.0) if ps > 0 and fid_ok[0] else nan
    fid2 = min(f2 / ps, 1.0) if ps > 0 and fid_ok[1] else nan
    return min(ps, 1.0), fid1, fid2


def _run_quadrature(models, patterns, window, order, fid_ok):
    contribs = []
    for pat, model in zip(patterns, models):
        mass, fid = _integrate(model, window, order)
        contribs.append(PatternContribution(pat, min(max(mass, 0.0), 1.0), float(fid[0]), float(fid[1])))
    return contribs, _summarize(contribs, fid_ok)


def filter_analytic(
    in1: GaussianState,
    in2: GaussianState,
    p_e: float,
    cfg: CodecConfig,
    window: ThresholdWindow,
    quadrature_order: int = DEFAULT_ORDER,
) -> FilterResult:
    """Success probability and postselected fidelities by window quadrature.

    For every erasure pattern the recorded outcomes are Gaussian and the
    output modes, given the outcomes, are Gaussian with an outcome-independent
    covariance and a mean affine in the outcomes. The acceptance probability
    and the outcome-averaged overlap with each input are 2-d integrals over
    the window, evaluated with composite Gauss-Legendre rules at
    ``quadrature_order`` and twice that order; the difference is reported as
    ``convergence`` and must stay below ``CONVERGENCE_TOL``.
    """
    encoded = encode(in1, in2, cfg.squeeze_r, cfg.symmetrize)
    targets, fid_ok = _targets(in1, in2)
    patterns = all_patterns(p_e)
    models = [_pattern_model(encoded, p, cfg, targets) for p in patterns]

    _, coarse = _run_quadrature(models, patterns, window, quadrature_order, fid_ok)
    contribs, fine = _run_quadrature(models, patterns, window, 2 * quadrature_order, fid_ok)
    conv = max((abs(a - b) for a, b in zip(coarse, fine) if not (math.isnan(a) or math.isnan(b))), default=0.0)
    if conv > CONVERGENCE_TOL:
        raise QuadratureError(f"window quadrature did not converge (order doubling changed result by {conv:.3g})")
    ps, f1, f2 = fine
    return FilterResult(ps, f1, f2, tuple(contribs), convergence=conv, engine="analytic")


def filter_monte_carlo(
    in1: GaussianState,
    in2: GaussianState,
    p_e: float,
    cfg: CodecConfig,
    window: ThresholdWindow,
    n_samples: int,
    seed=None,
) -> FilterResult:
    """Monte Carlo estimate: sample erasure events and homodyne outcomes.

    Each sample draws an erasure pattern mode by mode, then an outcome pair
    from that pattern's outcome distribution; accepted samples contribute the
    closed-form overlap of their conditional output state with the input.
    Standard errors use the delta method for the ratio estimator.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    encoded = encode(in1, in2, cfg.squeeze_r, cfg.symmetrize)
    targets, fid_ok = _targets(in1, in2)

    codes = sample_patterns(p_e, n_samples, rng) @ np.array([1, 2, 4, 8])
    n_acc = 0
    s1 = np.zeros(2)
    s2 = np.zeros(2)
    contribs = []
    for code in np.unique(codes):
        count = int(np.count_nonzero(codes == code))
        erased = frozenset(k for k in range(4) if code >> k & 1)
        pattern = ErasurePattern(erased, pattern_probability(erased, p_e))
        model = _pattern_model(encoded, pattern, cfg, targets)
        L = np.linalg.cholesky(model.cov)
        samples = model.mu + rng.standard_normal((count, 2)) @ L.T
        a, f, f2 = kernels.mc_accumulate(samples, window.x_th, window.p_th, model.mu, model.base, model.K, model.M, model.pref)
        n_acc += a
        s1 += f
        s2 += f2
        contribs.append(PatternContribution(pattern, a / count, f[0] / count, f[1] / count))

    N = float(n_samples)
    ps = n_acc / N
    ps_se = math.sqrt(ps * (1.0 - ps) / N)
    fids, ses = [], []
    for j in range(2):
        if n_acc == 0 or not fid_ok[j]:
            fids.append(float("nan"))
            ses.append(float("nan"))
            continue
        R = s1[j] / n_acc
        var = s2[j] / N - 2.0 * R * s1[j] / N + R * R * n_acc / N
        fids.append(R)
        ses.append(math.sqrt(max(var, 0.0) / N) / ps)
    return FilterResult(
        ps, fids[0], fids[1], tuple(contribs),
        success_prob_se=ps_se, fidelity_out1_se=ses[0], fidelity_out2_se=ses[1], engine="mc",
    )


def direct_channel_fidelity(in1: GaussianState, p_e: float) -> float:
    """Fidelity of a pure state sent straight through the erasure channel."""
    return (1.0 - p_e) + p_e * overlap_fidelity(in1, vacuum(1))


def simple_splitter_protocol(
    in1: GaussianState,
    p_e: float,
    window: ThresholdWindow,
    eta_hd: float = 1.0,
    n_e: float = 0.0,
    quadrature_order: int = DEFAULT_ORDER,
) -> FilterResult:
    """Beam-splitter-only variant: no squeezing and a vacuum second input."""
    return filter_analytic(in1, vacuum(1), p_e, CodecConfig(0.0, eta_hd, n_e), window, quadrature_order)
