"""Self-check groups run by ``cverasure verify``.

Each group returns ``(passed, detail)``. Gains are looked up through
:func:`codec.gain_table` at call time, so a corrupted table is caught by the
``moments`` group.
"""

from __future__ import annotations

import math

import numpy as np

from . import codec
from .channel import ErasurePattern, erase_modes
from .decompositions import bloch_messiah, random_symplectic
from .gaussian import (
    SymplecticOp,
    beam_splitter,
    coherent,
    cv_cnot,
    db_to_r,
    homodyne_split,
    squeezer,
    two_mode_squeezed,
    vacuum,
    wigner_grid,
)
from .postselect import ThresholdWindow, filter_analytic, filter_monte_carlo


def check_symplectic(n_random: int = 100, seed: int = 0):
    rng = np.random.default_rng(seed)
    ops = [beam_splitter(2, 0, 1, t) for t in rng.uniform(0, 1, 10)]
    ops += [cv_cnot(2, 0, 1), cv_cnot(2, 0, 1, inverse=True), squeezer(1, 0, 0.7)]
    ops += [codec.encoder_op(), codec.decoder_op(), codec.symmetrizer_op()]
    for _ in range(n_random):
        ops.append(SymplecticOp(random_symplectic(int(rng.integers(1, 5)), rng)))
    worst = max(op.symplectic_error() for op in ops)
    return worst <= 1e-12, f"max |S Omega S^T - Omega| = {worst:.2e} over {len(ops)} maps"


def check_bloch_messiah(n_random: int = 100, seed: int = 1):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_random):
        n = int(rng.integers(1, 5))
        S = random_symplectic(n, rng)
        f = bloch_messiah(SymplecticOp(S))
        I = np.eye(2 * n)
        errs = [np.max(np.abs(f.reconstruct() - S))]
        for P in (f.passive_in, f.passive_out):
            errs += [np.max(np.abs(P.matrix @ P.matrix.T - I)), P.symplectic_error()]
        worst = max(worst, *errs)
    return worst <= 1e-10, f"max reconstruction/passivity error = {worst:.2e} over {n_random} maps"


def check_conditioning():
    r = 0.6
    tmsv = two_mode_squeezed(r)
    split = homodyne_split(tmsv, [(1, "x")])
    var_err = abs(split.rest.cov[0, 0] - 1.0 / math.cosh(2 * r))
    # conditional covariance must not depend on the outcome
    covs = [split.conditional([m]).cov for m in (-3.0, 0.0, 2.5)]
    indep = max(np.max(np.abs(c - covs[0])) for c in covs)
    lossy = homodyne_split(tmsv, [(1, "p")], eta_hd=0.8, n_e=0.05)
    ms = np.linspace(-40, 40, 40001)
    dens = np.array([lossy.outcome_density(m) for m in ms])
    norm_err = abs(np.trapezoid(dens, ms) - 1.0)
    xs = np.linspace(-8, 8, 801)
    W = wigner_grid(vacuum(1), xs, xs)
    w_err = abs(np.trapezoid(np.trapezoid(W, xs, axis=1), xs) - 1.0)
    ok = var_err <= 1e-12 and indep == 0.0 and norm_err <= 1e-8 and w_err <= 1e-6
    return ok, f"Var err {var_err:.1e}, outcome dependence {indep:.1e}, density norm {norm_err:.1e}, Wigner norm {w_err:.1e}"


def check_moments(r: float = db_to_r(6.0)):
    """Premeasurement and post-feedforward moments for every single erasure."""
    X, Y = 3.1, -1.7
    e2r = math.exp(-2 * r)
    worst = 0.0
    for label in "ABCD":
        k = "ABCD".index(label)
        in1 = coherent(X / 2, Y / 2) if k < 2 else coherent(0.4, 0.2)
        in2 = coherent(0.4, 0.2) if k < 2 else coherent(X / 2, Y / 2)
        target = in1 if k < 2 else in2
        rec = erase_modes(codec.encode(in1, in2, r), ErasurePattern.of(label))
        if label == "A":
            pre = codec.decoder_premeasurement(rec)
            worst = max(worst, abs(pre.mean[0] - X / 2), abs(pre.mean[6] - (-X / (2 * math.sqrt(2)))))
        joint = codec.feedforward(codec.decoder_premeasurement(rec), codec.gain_table(label))
        j = 0 if k < 2 else 1
        out_mean = joint.mean[2 * j : 2 * j + 2]
        out_cov = joint.cov[2 * j : 2 * j + 2, 2 * j : 2 * j + 2]
        worst = max(
            worst,
            float(np.max(np.abs(out_mean - target.mean))),
            float(np.max(np.abs(out_cov - (1 + 2 * e2r) * np.eye(2)))),
        )
    return worst <= 1e-12, f"max moment deviation = {worst:.2e}"


def check_gain_calibration():
    bad = []
    for label in "ABCD":
        cal = codec.calibrated_gains(label)
        tab = codec.gain_table(label)
        a = np.array([cal.g_x1, cal.g_p1, cal.g_x2, cal.g_p2])
        b = np.array([tab.g_x1, tab.g_p1, tab.g_x2, tab.g_p2])
        if np.max(np.abs(a - b)) > 1e-12:
            bad.append(label)
    return not bad, "table matches vacuum-cancelling gains" if not bad else f"mismatched rows: {','.join(bad)}"


def check_engines(n_samples: int = 20000, seed: int = 11):
    a = 2 * math.sqrt(2)
    in1, in2 = coherent(a, a), vacuum(1)
    worst = 0.0
    for pe, db in ((0.0, 0.0), (0.1, 3.0), (0.3, 6.0)):
        r = db_to_r(db)
        cfg = codec.CodecConfig(r, 0.9, 0.0)
        w = ThresholdWindow.auto(r)
        an = filter_analytic(in1, in2, pe, cfg, w)
        mc = filter_monte_carlo(in1, in2, pe, cfg, w, n_samples, seed)
        for x, y, se in (
            (an.success_prob, mc.success_prob, mc.success_prob_se),
            (an.fidelity_out1, mc.fidelity_out1, mc.fidelity_out1_se),
        ):
            worst = max(worst, abs(x - y) / (3 * se + 1e-12))
    return worst <= 1.0, f"max |analytic - mc| / 3 SE = {worst:.2f}"


GROUPS = {
    "symplectic": check_symplectic,
    "bloch_messiah": check_bloch_messiah,
    "conditioning": check_conditioning,
    "moments": check_moments,
    "gain_calibration": check_gain_calibration,
    "engines": check_engines,
}


def run_all(groups=None):
    results = []
    for name in groups or GROUPS:
        try:
            ok, detail = GROUPS[name]()
        except Exception as exc:  # a crashing group is a failing group
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, bool(ok), detail))
    return results
