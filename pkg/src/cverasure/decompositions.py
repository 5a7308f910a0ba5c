"""Bloch-Messiah (Euler) decomposition of symplectic matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gaussian import SymplecticOp, omega


@dataclass(frozen=True)
class BlochMessiahFactors:
    """``S = passive_out @ squeeze @ passive_in``.

    ``squeezes[k] = r_k`` and the squeeze stage acts as
    ``x_k -> e^{r_k} x_k, p_k -> e^{-r_k} p_k``.
    """

    passive_in: SymplecticOp
    squeezes: np.ndarray
    passive_out: SymplecticOp

    def squeeze_matrix(self) -> np.ndarray:
        d = np.exp(np.repeat(self.squeezes, 2) * np.tile([1.0, -1.0], len(self.squeezes)))
        return np.diag(d)

    def reconstruct(self) -> np.ndarray:
        return self.passive_out.matrix @ self.squeeze_matrix() @ self.passive_in.matrix


def _symplectic_gram_schmidt(basis: np.ndarray, W: np.ndarray) -> list[np.ndarray]:
    """Split an Omega-invariant subspace into pairs (u, -Omega u)."""
    vecs = []
    remaining = [basis[:, j] for j in range(basis.shape[1])]
    while remaining:
        v = remaining.pop(0)
        for w in vecs:
            v = v - (w @ v) * w
        nv = np.linalg.norm(v)
        if nv < 1e-8:
            continue
        u = v / nv
        vecs.extend([u, -W @ u])
    return vecs[0::2]


def bloch_messiah(op: SymplecticOp, tol: float = 1e-8, unit_tol: float = 1e-9) -> BlochMessiahFactors:
    """Decompose a symplectic map into passive, squeezing, and passive stages.

    ``S^T S`` is diagonalised by an orthogonal-symplectic ``O``; its
    eigenvalues come in pairs ``(e^{2r}, e^{-2r})`` related by Omega. The
    squeezes are returned in descending order.
    """
    S = np.asarray(op.matrix, dtype=float)
    n = op.n_modes
    W = omega(n)
    if np.max(np.abs(S @ W @ S.T - W)) > tol:
        raise ValueError("matrix is not symplectic")

    evals, evecs = np.linalg.eigh(S.T @ S)
    # eigh sorts ascending; walk from the largest
    order = np.argsort(-evals, kind="stable")
    evals, evecs = evals[order], evecs[:, order]
    big = evals > 1.0 + unit_tol
    n_sq = int(np.count_nonzero(big))
    if n_sq > n:
        raise ValueError("inconsistent symplectic spectrum")

    us = [evecs[:, j] for j in range(n_sq)]
    unit = np.abs(evals - 1.0) <= unit_tol
    if np.count_nonzero(unit):
        us.extend(_symplectic_gram_schmidt(evecs[:, unit], W))
    if len(us) != n:
        raise ValueError("could not build an orthogonal-symplectic eigenbasis")

    O = np.zeros((2 * n, 2 * n))
    for k, u in enumerate(us):
        O[:, 2 * k] = u
        O[:, 2 * k + 1] = -W @ u
    r = np.zeros(n)
    r[:n_sq] = 0.5 * np.log(evals[:n_sq])

    D = np.exp(np.repeat(r, 2) * np.tile([1.0, -1.0], n))
    # S = (S O D^{-1}) D O^T, and S O D^{-1} is orthogonal-symplectic
    out = S @ O / D
    return BlochMessiahFactors(SymplecticOp(O.T), r, SymplecticOp(out))


def random_passive(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random orthogonal-symplectic matrix (interferometer)."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    U = q * (np.diag(r) / np.abs(np.diag(r)))
    X, Y = U.real, U.imag
    M = np.block([[X, -Y], [Y, X]])  # xxpp ordering
    perm = np.array([[k, n + k] for k in range(n)]).ravel()
    return M[np.ix_(perm, perm)]


def random_symplectic(n: int, rng: np.random.Generator, max_r: float = 1.0) -> np.ndarray:
    r = rng.uniform(0.0, max_r, n)
    D = np.diag(np.exp(np.repeat(r, 2) * np.tile([1.0, -1.0], n)))
    return random_passive(n, rng) @ D @ random_passive(n, rng)
