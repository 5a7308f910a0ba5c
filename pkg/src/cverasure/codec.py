"""Four-mode encoder and the feedforward decoder.

Mode layout of the transmitted state is (A, B, C, D). The encoder mixes
input 1 with EPR mode 3 into (A, B) and input 2 with EPR mode 4 into (C, D).
The decoder undoes the two beam splitters (BS1 on A, B and BS2 on C, D),
mixes the two auxiliary ports, and records ``p`` of mode 3 and ``x`` of
mode 4. Those outcomes ``(x_m, p_m)`` drive the displacement

    x_out = x + g_x * x_m,   p_out = p + g_p * p_m

on the two output modes, with gains chosen from the erasure location.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import LABELS, mode_index
from .gaussian import (
    GaussianState,
    SymplecticOp,
    apply,
    balanced,
    homodyne_split,
    partial_trace,
    tensor,
    two_mode_squeezed,
)

SQRT2 = np.sqrt(2.0)

# measured (mode, quadrature) of the premeasurement state, ordered as (x_m, p_m)
MEASURED = ((3, "x"), (2, "p"))


@dataclass(frozen=True)
class GainSet:
    g_x1: float = 0.0
    g_p1: float = 0.0
    g_x2: float = 0.0
    g_p2: float = 0.0

    def matrix(self) -> np.ndarray:
        """Feedforward map from (x_m, p_m) to (x1, p1, x2, p2) displacements."""
        return np.array(
            [[self.g_x1, 0.0], [0.0, self.g_p1], [self.g_x2, 0.0], [0.0, self.g_p2]]
        )


GAIN_TABLE = {
    None: GainSet(),
    "A": GainSet(-SQRT2, -SQRT2, 0.0, 0.0),
    "B": GainSet(SQRT2, SQRT2, 0.0, 0.0),
    "C": GainSet(0.0, 0.0, SQRT2, -SQRT2),
    "D": GainSet(0.0, 0.0, -SQRT2, SQRT2),
}


def _label(erased):
    if erased is None or erased == "" or erased == "-" or str(erased).lower() == "none":
        return None
    return LABELS[mode_index(erased)]


def gain_table(erased=None) -> GainSet:
    return GAIN_TABLE[_label(erased)]


@dataclass(frozen=True)
class CodecConfig:
    squeeze_r: float = 0.0
    eta_hd: float = 1.0
    n_e: float = 0.0
    symmetrize: bool = False

    def __post_init__(self):
        if self.squeeze_r < 0:
            raise ValueError("squeeze_r must be non-negative")
        if not 0.0 < self.eta_hd <= 1.0:
            raise ValueError("eta_hd must lie in (0, 1]")
        if self.n_e < 0:
            raise ValueError("n_e must be non-negative")


def encoder_op() -> SymplecticOp:
    """Acts on (in1, in2, E3, E4) and returns modes in the order (A, B, C, D)."""
    # reorder to (in1, E3, in2, E4) so BS outputs land as (A, B, C, D)
    perm = np.zeros((8, 8))
    for new, old in enumerate((0, 2, 1, 3)):
        perm[2 * new : 2 * new + 2, 2 * old : 2 * old + 2] = np.eye(2)
    return balanced(4, 2, 3) @ balanced(4, 0, 1) @ SymplecticOp(perm)


def decoder_op() -> SymplecticOp:
    """(A, B, C, D) -> (1, 2, 3, 4) just before homodyne detection."""
    # BS1: (A, B) -> (1, aux3); BS2: (C, D) -> (2, aux4); then (aux3, aux4) -> (3, 4)
    perm = np.zeros((8, 8))
    for new, old in enumerate((0, 2, 1, 3)):
        perm[2 * new : 2 * new + 2, 2 * old : 2 * old + 2] = np.eye(2)
    return balanced(4, 2, 3) @ SymplecticOp(perm) @ balanced(4, 2, 3) @ balanced(4, 0, 1)


def symmetrizer_op() -> SymplecticOp:
    """Balanced mixing of the two signal modes; it is its own inverse."""
    return balanced(2, 0, 1)


def encode(in1: GaussianState, in2: GaussianState, squeeze_r: float, symmetrize: bool = False) -> GaussianState:
    for s in (in1, in2):
        if s.n_modes != 1:
            raise ValueError("encoder inputs must be single-mode states")
    signals = tensor(in1, in2)
    if symmetrize:
        signals = apply(symmetrizer_op(), signals)
    state = tensor(signals, two_mode_squeezed(squeeze_r))
    return apply(encoder_op(), state)


def decoder_premeasurement(received: GaussianState) -> GaussianState:
    """State of modes (1, 2, 3, 4) before the homodyne detectors.

    Modes 1 and 2 are the outputs prior to displacement; ``x`` of mode 4 and
    ``p`` of mode 3 are the measured quadratures.
    """
    if received.n_modes != 4:
        raise ValueError("decoder expects the four transmitted modes")
    return apply(decoder_op(), received)


def measurement_split(pre: GaussianState, eta_hd: float = 1.0, n_e: float = 0.0):
    """Joint Gaussian of the recorded outcomes (x_m, p_m) and output modes (1, 2)."""
    return homodyne_split(pre, MEASURED, eta_hd, n_e)


def feedforward(pre: GaussianState, gains: GainSet, eta_hd: float = 1.0, n_e: float = 0.0) -> GaussianState:
    """Exact two-mode output after outcome-dependent displacement.

    The displacement is linear in the recorded outcomes, so averaging over
    them leaves a Gaussian state. Gains act on outcomes rescaled by
    ``1/sqrt(eta_hd)``, which keeps the decoder unbiased for lossy detectors.
    """
    split = measurement_split(pre, eta_hd, n_e)
    G = gains.matrix() / np.sqrt(eta_hd)
    KG = split.gain + G
    mean = split.rest.mean + G @ split.outcome_mean
    cov = split.rest.cov + KG @ split.outcome_cov @ KG.T
    return GaussianState(mean, 0.5 * (cov + cov.T))


def unsymmetrize(joint: GaussianState) -> tuple[GaussianState, GaussianState]:
    """Undo the input mixing on the joint two-mode output and split it."""
    if joint.n_modes != 2:
        raise ValueError("expected the joint two-mode decoder output")
    out = apply(symmetrizer_op(), joint)
    return partial_trace(out, [0]), partial_trace(out, [1])


def decode_joint(received: GaussianState, erased, cfg: CodecConfig) -> GaussianState:
    gains = gain_table(erased)
    joint = feedforward(decoder_premeasurement(received), gains, cfg.eta_hd, cfg.n_e)
    if cfg.symmetrize:
        joint = apply(symmetrizer_op(), joint)
    return joint


def decode_deterministic(received: GaussianState, erased, cfg: CodecConfig) -> tuple[GaussianState, GaussianState]:
    """Decode with the gain row for the reported erasure location.

    Only single erasures are covered by the gain table; a state that suffered
    several erasures is still processed exactly, but the fidelity guarantees
    do not apply to it.
    """
    joint = decode_joint(received, erased, cfg)
    return partial_trace(joint, [0]), partial_trace(joint, [1])


def decoder_linear_map(erased=None) -> np.ndarray:
    """Coefficients of the premeasurement quadratures in terms of the sources.

    Returns a 8 x 10 matrix acting on (in1, in2, E3, E4, v) where ``v`` is the
    vacuum that replaces the erased mode (its column is zero if nothing is
    erased).
    """
    enc = encoder_op().matrix
    T = np.zeros((8, 10))
    T[:, :8] = enc
    k = None if _label(erased) is None else mode_index(erased)
    if k is not None:
        T[2 * k : 2 * k + 2, :] = 0.0
        T[2 * k : 2 * k + 2, 8:10] = np.eye(2)
    return decoder_op().matrix @ T


def calibrated_gains(erased) -> GainSet:
    """Gains that cancel the vacuum entering through the erased mode.

    Solved per quadrature from the linear map of the decoder, for the output
    that carries the erased mode's signal.
    """
    k = mode_index(erased)
    M = decoder_linear_map(erased)
    out = 0 if k < 2 else 1
    xm_row, pm_row = 2 * 3, 2 * 2 + 1
    gx = -M[2 * out, 8] / M[xm_row, 8]
    gp = -M[2 * out + 1, 9] / M[pm_row, 9]
    return GainSet(gx, gp, 0.0, 0.0) if out == 0 else GainSet(0.0, 0.0, gx, gp)


def noise_optimal_gains(received: GaussianState, erased) -> GainSet:
    """Variance-minimising gains (ideal detection) for the damaged output."""
    split = measurement_split(decoder_premeasurement(received))
    # Var(q + g m) is minimised at g = -Cov(q, m) / Var(m) = -gain
    out = 0 if mode_index(erased) < 2 else 1
    g = -split.gain
    gx, gp = g[2 * out, 0], g[2 * out + 1, 1]
    return GainSet(gx, gp, 0.0, 0.0) if out == 0 else GainSet(0.0, 0.0, gx, gp)
