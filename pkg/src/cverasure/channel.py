"""Probabilistic erasure channel acting on the four transmitted modes."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .gaussian import GaussianState, apply, beam_splitter, partial_trace, tensor, vacuum

LABELS = ("A", "B", "C", "D")


def mode_index(label) -> int:
    if isinstance(label, (int, np.integer)):
        if not 0 <= label < len(LABELS):
            raise ValueError(f"no transmitted mode {label}")
        return int(label)
    try:
        return LABELS.index(str(label).upper())
    except ValueError:
        raise ValueError(f"unknown mode label {label!r}; expected one of {LABELS}") from None


@dataclass(frozen=True)
class ErasurePattern:
    erased: frozenset
    probability: float = 1.0

    @classmethod
    def of(cls, labels="", p_e: float | None = None) -> "ErasurePattern":
        erased = frozenset(mode_index(l) for l in labels)
        prob = 1.0 if p_e is None else pattern_probability(erased, p_e)
        return cls(erased, prob)

    @property
    def labels(self) -> str:
        return "".join(LABELS[k] for k in sorted(self.erased)) or "-"


def pattern_probability(erased, p_e: float, n: int = 4) -> float:
    k = len(erased)
    return p_e**k * (1.0 - p_e) ** (n - k)


def all_patterns(p_e: float) -> list[ErasurePattern]:
    """The sixteen erasure events, ordered by number of erasures then label."""
    if not 0.0 <= p_e <= 1.0:
        raise ValueError("erasure probability must lie in [0, 1]")
    out = []
    for k in range(5):
        for combo in itertools.combinations(range(4), k):
            out.append(ErasurePattern(frozenset(combo), pattern_probability(combo, p_e)))
    return out


def erase_modes(state: GaussianState, pattern: ErasurePattern) -> GaussianState:
    """Replace each erased mode by vacuum, dropping its correlations."""
    mean = state.mean.copy()
    cov = state.cov.copy()
    for k in pattern.erased:
        if not 0 <= k < state.n_modes:
            raise ValueError(f"erased mode {k} not present in a {state.n_modes}-mode state")
        i = slice(2 * k, 2 * k + 2)
        mean[i] = 0.0
        cov[i, :] = 0.0
        cov[:, i] = 0.0
        cov[i, i] = np.eye(2)
    return GaussianState(mean, cov)


def partial_loss(state: GaussianState, mode: int, eta: float) -> GaussianState:
    """Pure-loss channel of transmittance ``eta`` on one mode."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError("transmittance must lie in [0, 1]")
    mode = mode_index(mode) if isinstance(mode, str) else mode
    s, noise = np.sqrt(eta), 1.0 - eta
    mean = state.mean.copy()
    cov = state.cov.copy()
    i = slice(2 * mode, 2 * mode + 2)
    mean[i] *= s
    cov[i, :] *= s
    cov[:, i] *= s
    cov[i, i] += noise * np.eye(2)
    return GaussianState(mean, cov)


def loss_by_ancilla(state: GaussianState, mode: int, eta: float) -> GaussianState:
    """Loss as an explicit beam splitter with a vacuum ancilla that is then traced out."""
    n = state.n_modes
    big = apply(beam_splitter(n + 1, mode, n, eta), tensor(state, vacuum(1)))
    return partial_trace(big, range(n))


@dataclass(frozen=True)
class GaussianMixture:
    components: tuple

    def __post_init__(self):
        comps = tuple((float(w), s) for w, s in self.components)
        if not comps:
            raise ValueError("mixture needs at least one component")
        if any(w <= 0 for w, _ in comps):
            raise ValueError("mixture weights must be positive")
        if abs(sum(w for w, _ in comps) - 1.0) > 1e-10:
            raise ValueError("mixture weights must sum to one")
        if len({s.n_modes for _, s in comps}) != 1:
            raise ValueError("mixture components must have equal mode counts")
        object.__setattr__(self, "components", comps)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.components])

    def mean(self) -> np.ndarray:
        return sum(w * s.mean for w, s in self.components)


def channel_mixture(state: GaussianState, p_e: float) -> GaussianMixture:
    """Erasure channel on modes 0..3; any further modes pass untouched.

    Patterns of zero weight (only possible at p_e = 0 or 1) are dropped.
    """
    if state.n_modes < 4:
        raise ValueError("channel acts on four transmitted modes")
    comps = [(p.probability, erase_modes(state, p)) for p in all_patterns(p_e) if p.probability > 0]
    return GaussianMixture(tuple(comps))


def sample_patterns(p_e: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Boolean array ``(size, 4)``; entry True means that mode was erased."""
    if not 0.0 <= p_e <= 1.0:
        raise ValueError("erasure probability must lie in [0, 1]")
    return rng.random((size, 4)) < p_e


def sample_pattern(p_e: float, rng) -> ErasurePattern:
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    row = sample_patterns(p_e, 1, rng)[0]
    erased = frozenset(int(k) for k in np.flatnonzero(row))
    return ErasurePattern(erased, pattern_probability(erased, p_e))
