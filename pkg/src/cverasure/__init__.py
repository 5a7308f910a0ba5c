"""Phase-space simulation of a continuous-variable erasure-correcting code."""

from .channel import (
    ErasurePattern,
    GaussianMixture,
    all_patterns,
    channel_mixture,
    erase_modes,
    partial_loss,
    sample_pattern,
)
from .codec import (
    CodecConfig,
    GainSet,
    decode_deterministic,
    decoder_premeasurement,
    encode,
    gain_table,
    unsymmetrize,
)
from .decompositions import BlochMessiahFactors, bloch_messiah
from .gaussian import (
    GaussianState,
    SymplecticOp,
    apply,
    balanced,
    beam_splitter,
    coherent,
    condition_on_homodyne,
    cv_cnot,
    db_to_r,
    overlap_fidelity,
    partial_trace,
    tensor,
    two_mode_squeezed,
    vacuum,
    wigner,
)
from .kernels import BACKEND
from .postselect import (
    FilterResult,
    ThresholdWindow,
    direct_channel_fidelity,
    filter_analytic,
    filter_monte_carlo,
    simple_splitter_protocol,
)

__version__ = "0.1.0"
