"""NumPy reference implementation of the integration kernels.

Both functions evaluate, at outcome points ``m``, the outcome density

    N(m) = norm * exp(-(m - mu)^T icov (m - mu) / 2)

and, for each of ``k`` fidelity targets, the overlap of the conditional
output state with the target,

    F_j(m) = pref_j * exp(-D_j^T M_j D_j / 2),   D_j = base_j + K_j (m - mu).
"""

import numpy as np


def _fidelities(d, base, K, M, pref):
    # d: (N, 2) outcome offsets -> (k, N)
    D = base[:, None, :] + np.einsum("kab,nb->kna", K, d)
    q = np.einsum("kna,kab,knb->kn", D, M, D)
    return pref[:, None] * np.exp(-0.5 * q)


def window_integrate(xs, wx, ps, wp, mu, icov, norm, base, K, M, pref):
    """Tensor-product quadrature of N and N * F_j over the node grid.

    Returns ``(mass, fid_mass)`` with ``fid_mass`` of length k.
    """
    X, P = np.meshgrid(np.asarray(xs) - mu[0], np.asarray(ps) - mu[1], indexing="ij")
    w = np.outer(wx, wp).ravel()
    d = np.column_stack([X.ravel(), P.ravel()])
    q = icov[0, 0] * d[:, 0] ** 2 + 2.0 * icov[0, 1] * d[:, 0] * d[:, 1] + icov[1, 1] * d[:, 1] ** 2
    dens = w * norm * np.exp(-0.5 * q)
    F = _fidelities(d, np.asarray(base), np.asarray(K), np.asarray(M), np.asarray(pref))
    return float(dens.sum()), F @ dens


def mc_accumulate(samples, x_th, p_th, mu, base, K, M, pref):
    """Accept samples inside the window and accumulate conditional fidelities.

    Returns ``(n_accepted, sum_f, sum_f_sq)``; sums run over accepted samples.
    """
    samples = np.asarray(samples)
    acc = (np.abs(samples[:, 0]) <= x_th) & (np.abs(samples[:, 1]) <= p_th)
    d = samples[acc] - mu
    F = _fidelities(d, np.asarray(base), np.asarray(K), np.asarray(M), np.asarray(pref))
    return int(acc.sum()), F.sum(axis=1), (F * F).sum(axis=1)
