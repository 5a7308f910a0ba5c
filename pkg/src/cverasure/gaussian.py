"""Gaussian states and phase-space primitives.

Conventions used throughout the package:

* quadratures are interleaved, ``(x1, p1, x2, p2, ...)``;
* the vacuum covariance is the identity (shot-noise units, x = a + a^dagger);
* a coherent state |alpha> has mean ``(2 Re alpha, 2 Im alpha)``.

With these conventions the overlap of two coherent states is
``exp(-|alpha - beta|^2)`` and a Gaussian state of covariance ``V`` and mean
``d`` has the Wigner function

    W(r) = exp(-(r - d)^T V^{-1} (r - d) / 2) / ((2 pi)^n sqrt(det V)).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

SYMM_TOL = 1e-12


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


def omega(n: int) -> np.ndarray:
    """Symplectic form for ``n`` modes in interleaved ordering."""
    return np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def quad_index(mode: int, quadrature: str) -> int:
    if quadrature not in ("x", "p"):
        raise ValueError(f"quadrature must be 'x' or 'p', got {quadrature!r}")
    return 2 * mode + (quadrature == "p")


@dataclass(frozen=True)
class GaussianState:
    """An n-mode Gaussian state given by its mean vector and covariance matrix."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = _frozen(self.mean)
        cov = _frozen(self.cov)
        if mean.ndim != 1 or mean.size % 2 or mean.size == 0:
            raise ValueError("mean must be a non-empty vector of even length")
        if cov.shape != (mean.size, mean.size):
            raise ValueError(f"cov shape {cov.shape} does not match mean length {mean.size}")
        if np.max(np.abs(cov - cov.T)) > SYMM_TOL * max(1.0, np.max(np.abs(cov))):
            raise ValueError("covariance matrix is not symmetric")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n_modes(self) -> int:
        return self.mean.size // 2

    def symplectic_eigenvalues(self) -> np.ndarray:
        vals = np.abs(np.linalg.eigvals(1j * omega(self.n_modes) @ self.cov))
        return np.sort(vals)[::2]

    def is_physical(self, tol: float = 1e-9) -> bool:
        return bool(np.all(self.symplectic_eigenvalues() >= 1 - tol))

    def purity(self) -> float:
        return float(1.0 / np.sqrt(np.linalg.det(self.cov)))

    def mode(self, k: int) -> "GaussianState":
        return partial_trace(self, [k])

    def allclose(self, other: "GaussianState", atol: float = 1e-12) -> bool:
        return (
            self.n_modes == other.n_modes
            and np.allclose(self.mean, other.mean, rtol=0, atol=atol)
            and np.allclose(self.cov, other.cov, rtol=0, atol=atol)
        )


@dataclass(frozen=True)
class SymplecticOp:
    """Affine phase-space map ``r -> S r + displacement``."""

    matrix: np.ndarray
    displacement: np.ndarray = field(default=None)

    def __post_init__(self):
        S = _frozen(self.matrix)
        if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] % 2:
            raise ValueError("symplectic matrix must be square with even dimension")
        d = np.zeros(S.shape[0]) if self.displacement is None else self.displacement
        d = _frozen(d)
        if d.shape != (S.shape[0],):
            raise ValueError("displacement length does not match matrix")
        object.__setattr__(self, "matrix", S)
        object.__setattr__(self, "displacement", d)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    def symplectic_error(self) -> float:
        W = omega(self.n_modes)
        return float(np.max(np.abs(self.matrix @ W @ self.matrix.T - W)))

    def inverse(self) -> "SymplecticOp":
        # S^{-1} = -Omega S^T Omega for symplectic S
        W = omega(self.n_modes)
        Sinv = -W @ self.matrix.T @ W
        return SymplecticOp(Sinv, -Sinv @ self.displacement)

    def __matmul__(self, other: "SymplecticOp") -> "SymplecticOp":
        """Composition: ``(self @ other)`` applies ``other`` first."""
        return SymplecticOp(
            self.matrix @ other.matrix,
            self.matrix @ other.displacement + self.displacement,
        )


def identity_op(n: int) -> SymplecticOp:
    return SymplecticOp(np.eye(2 * n))


def vacuum(n: int = 1) -> GaussianState:
    if n < 1:
        raise ValueError("need at least one mode")
    return GaussianState(np.zeros(2 * n), np.eye(2 * n))


def coherent(alpha_re: float, alpha_im: float = 0.0) -> GaussianState:
    return GaussianState([2.0 * alpha_re, 2.0 * alpha_im], np.eye(2))


def squeezed(r: float, phi: float = 0.0, alpha_re: float = 0.0, alpha_im: float = 0.0) -> GaussianState:
    """Displaced single-mode squeezed state; ``phi = 0`` squeezes x."""
    R = np.array([[np.cos(phi / 2), -np.sin(phi / 2)], [np.sin(phi / 2), np.cos(phi / 2)]])
    cov = R @ np.diag([np.exp(-2 * r), np.exp(2 * r)]) @ R.T
    return GaussianState([2.0 * alpha_re, 2.0 * alpha_im], 0.5 * (cov + cov.T))


def thermal(nbar: float) -> GaussianState:
    return GaussianState(np.zeros(2), (2 * nbar + 1) * np.eye(2))


def two_mode_squeezed(r: float) -> GaussianState:
    """EPR pair with x1 - x2 and p1 + p2 squeezed to variance ``2 exp(-2r)``."""
    if r < 0:
        raise ValueError("squeeze parameter must be non-negative")
    c, s = np.cosh(2 * r), np.sinh(2 * r)
    Z = np.diag([1.0, -1.0])
    cov = np.block([[c * np.eye(2), s * Z], [s * Z, c * np.eye(2)]])
    return GaussianState(np.zeros(4), cov)


def db_to_r(db: float) -> float:
    """Squeeze parameter for a noise reduction of ``db`` decibels below shot noise."""
    return db * np.log(10.0) / 20.0


def _embed(n: int, modes: Sequence[int], block: np.ndarray) -> np.ndarray:
    k = len(modes)
    if len(set(modes)) != k:
        raise ValueError(f"mode indices must be distinct, got {tuple(modes)}")
    for m in modes:
        if not 0 <= m < n:
            raise ValueError(f"mode {m} out of range for {n} modes")
    S = np.eye(2 * n)
    idx = np.array([[2 * m, 2 * m + 1] for m in modes]).ravel()
    S[np.ix_(idx, idx)] = block
    return S


def beam_splitter(n: int, mode_a: int, mode_b: int, t: float = 0.5) -> SymplecticOp:
    """Beam splitter of intensity transmittance ``t`` acting on modes a and b.

    out_a = sqrt(t) a + sqrt(1-t) b,  out_b = sqrt(1-t) a - sqrt(t) b,
    identically for x and p. The 2x2 mixing matrix is its own inverse.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError("transmittance must lie in [0, 1]")
    if mode_a == mode_b:
        raise ValueError("beam splitter needs two distinct modes")
    a, b = np.sqrt(t), np.sqrt(1.0 - t)
    block = np.kron(np.array([[a, b], [b, -a]]), np.eye(2))
    return SymplecticOp(_embed(n, [mode_a, mode_b], block))


def balanced(n: int, mode_a: int, mode_b: int) -> SymplecticOp:
    return beam_splitter(n, mode_a, mode_b, 0.5)


def cv_cnot(n: int, control: int, target: int, inverse: bool = False) -> SymplecticOp:
    """CV CNOT: x_t -> x_t + x_c, p_c -> p_c - p_t (signs flipped for the inverse)."""
    g = -1.0 if inverse else 1.0
    block = np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, -g],
            [g, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )
    return SymplecticOp(_embed(n, [control, target], block))


def squeezer(n: int, mode: int, r: float) -> SymplecticOp:
    """Single-mode squeezer: x -> e^{-r} x, p -> e^{r} p."""
    return SymplecticOp(_embed(n, [mode], np.diag([np.exp(-r), np.exp(r)])))


def rotation(n: int, mode: int, theta: float) -> SymplecticOp:
    c, s = np.cos(theta), np.sin(theta)
    return SymplecticOp(_embed(n, [mode], np.array([[c, -s], [s, c]])))


def displacement(n: int, mode: int, alpha_re: float, alpha_im: float = 0.0) -> SymplecticOp:
    d = np.zeros(2 * n)
    d[2 * mode], d[2 * mode + 1] = 2.0 * alpha_re, 2.0 * alpha_im
    return SymplecticOp(np.eye(2 * n), d)


def apply(op: SymplecticOp, state: GaussianState) -> GaussianState:
    if op.n_modes != state.n_modes:
        raise ValueError(f"operator acts on {op.n_modes} modes, state has {state.n_modes}")
    S = op.matrix
    cov = S @ state.cov @ S.T
    return GaussianState(S @ state.mean + op.displacement, 0.5 * (cov + cov.T))


def tensor(*states: GaussianState) -> GaussianState:
    if not states:
        raise ValueError("need at least one state")
    mean = np.concatenate([s.mean for s in states])
    cov = np.zeros((mean.size, mean.size))
    i = 0
    for s in states:
        k = s.mean.size
        cov[i : i + k, i : i + k] = s.cov
        i += k
    return GaussianState(mean, cov)


def partial_trace(state: GaussianState, keep: Iterable[int]) -> GaussianState:
    """Reduced state on the modes in ``keep`` (in the given order)."""
    keep = list(keep)
    for m in keep:
        if not 0 <= m < state.n_modes:
            raise ValueError(f"mode {m} out of range")
    idx = np.array([[2 * m, 2 * m + 1] for m in keep], dtype=int).ravel()
    return GaussianState(state.mean[idx], state.cov[np.ix_(idx, idx)])


def wigner(state: GaussianState, point):
    """Wigner function at ``point``; a stack of points of shape ``(..., 2n)`` is accepted."""
    point = np.asarray(point, dtype=float)
    if point.shape[-1:] != state.mean.shape:
        raise ValueError("point dimension does not match state")
    d = point - state.mean
    n = state.n_modes
    quad = np.einsum("...i,ij,...j->...", d, np.linalg.inv(state.cov), d)
    val = np.exp(-0.5 * quad) / ((2 * np.pi) ** n * np.sqrt(np.linalg.det(state.cov)))
    return float(val) if val.ndim == 0 else val


def wigner_grid(state: GaussianState, xs: np.ndarray, ps: np.ndarray) -> np.ndarray:
    """Single-mode Wigner function on the grid ``xs x ps`` (shape ``(len(xs), len(ps))``)."""
    if state.n_modes != 1:
        raise ValueError("wigner_grid is single-mode only")
    X, P = np.meshgrid(xs - state.mean[0], ps - state.mean[1], indexing="ij")
    Vi = np.linalg.inv(state.cov)
    quad = Vi[0, 0] * X**2 + 2 * Vi[0, 1] * X * P + Vi[1, 1] * P**2
    return np.exp(-0.5 * quad) / (2 * np.pi * np.sqrt(np.linalg.det(state.cov)))


@dataclass(frozen=True)
class HomodyneSplit:
    """Joint Gaussian description of a homodyne measurement.

    Outcomes ``m`` are distributed as N(outcome_mean, outcome_cov); given ``m``
    the unmeasured modes are in a Gaussian state with covariance ``rest.cov``
    and mean ``rest.mean + gain @ (m - outcome_mean)``.
    """

    rest: GaussianState
    gain: np.ndarray
    outcome_mean: np.ndarray
    outcome_cov: np.ndarray
    rest_modes: tuple

    def conditional(self, outcome) -> GaussianState:
        delta = np.atleast_1d(np.asarray(outcome, dtype=float)) - self.outcome_mean
        return GaussianState(self.rest.mean + self.gain @ delta, self.rest.cov)

    def outcome_density(self, outcome) -> float:
        delta = np.atleast_1d(np.asarray(outcome, dtype=float)) - self.outcome_mean
        k = delta.size
        q = delta @ np.linalg.solve(self.outcome_cov, delta)
        return float(np.exp(-0.5 * q) / np.sqrt((2 * np.pi) ** k * np.linalg.det(self.outcome_cov)))


def homodyne_split(
    state: GaussianState,
    measurements: Sequence[tuple],
    eta_hd: float = 1.0,
    n_e: float = 0.0,
) -> HomodyneSplit:
    """Gaussian conditioning for homodyne detection of several quadratures.

    ``measurements`` is a sequence of ``(mode, 'x' | 'p')`` on distinct modes.
    The detector model is a loss of transmittance ``eta_hd`` in front of an
    ideal homodyne, plus ``n_e`` of electronic noise (shot-noise units) on the
    recorded value. The recorded outcome is therefore
    ``sqrt(eta_hd) q + noise`` with noise variance ``1 - eta_hd + n_e``.
    """
    if not 0.0 < eta_hd <= 1.0:
        raise ValueError("eta_hd must lie in (0, 1]")
    if n_e < 0:
        raise ValueError("electronic noise must be non-negative")
    modes = [m for m, _ in measurements]
    if len(set(modes)) != len(modes):
        raise ValueError("each mode can be measured at most once")
    q_idx = np.array([quad_index(m, q) for m, q in measurements], dtype=int)
    rest_modes = tuple(k for k in range(state.n_modes) if k not in modes)
    r_idx = np.array([[2 * k, 2 * k + 1] for k in rest_modes], dtype=int).ravel()

    s = np.sqrt(eta_hd)
    noise = (1.0 - eta_hd) + n_e
    V = state.cov
    Vqq = s * s * V[np.ix_(q_idx, q_idx)] + noise * np.eye(q_idx.size)
    Vrq = s * V[np.ix_(r_idx, q_idx)]
    if np.min(np.linalg.eigvalsh(Vqq)) < 1e-12:
        raise ValueError("measured quadrature variance is degenerate")
    gain = np.linalg.solve(Vqq, Vrq.T).T
    rcov = V[np.ix_(r_idx, r_idx)] - gain @ Vrq.T
    rest = GaussianState(state.mean[r_idx], 0.5 * (rcov + rcov.T))
    return HomodyneSplit(rest, gain, s * state.mean[q_idx], Vqq, rest_modes)


def condition_on_homodyne(
    state: GaussianState,
    mode: int,
    quadrature: str,
    outcome: float,
    eta_hd: float = 1.0,
    n_e: float = 0.0,
) -> tuple[GaussianState, float]:
    """Condition on a single homodyne outcome.

    Returns the state of the remaining modes and the probability density of
    the recorded outcome.
    """
    if state.n_modes < 2:
        raise ValueError("need at least one unmeasured mode")
    split = homodyne_split(state, [(mode, quadrature)], eta_hd, n_e)
    return split.conditional(outcome), split.outcome_density(outcome)


def overlap_fidelity(pure: GaussianState, rho: GaussianState) -> float:
    """Fidelity <psi|rho|psi> between a pure single-mode state and ``rho``."""
    if pure.n_modes != 1 or rho.n_modes != 1:
        raise ValueError("overlap_fidelity is defined for single-mode states")
    if abs(pure.symplectic_eigenvalues()[0] - 1.0) > 1e-6:
        raise ValueError("reference state is not pure")
    return gaussian_overlap(pure.mean, pure.cov, rho.mean, rho.cov)


def gaussian_overlap(m1, V1, m2, V2) -> float:
    # (4 pi)^n integral of W1 W2; equals Tr(rho1 rho2)
    Vs = np.asarray(V1) + np.asarray(V2)
    d = np.asarray(m1) - np.asarray(m2)
    n = d.size // 2
    val = 2.0**n / np.sqrt(np.linalg.det(Vs)) * np.exp(-0.5 * d @ np.linalg.solve(Vs, d))
    return float(min(max(val, 0.0), 1.0))
