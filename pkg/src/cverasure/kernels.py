"""Kernel backend selection.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``CVERASURE_PURE_PYTHON`` is set to a non-empty value,
the NumPy implementation is used.
"""

import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if not os.environ.get("CVERASURE_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        pass


def _c(a, ndim):
    a = np.ascontiguousarray(a, dtype=float)
    if a.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {a.shape}")
    return a


def window_integrate(xs, wx, ps, wp, mu, icov, norm, base, K, M, pref, impl=None):
    impl = impl or _impl
    mass, fid = impl.window_integrate(
        _c(xs, 1), _c(wx, 1), _c(ps, 1), _c(wp, 1), _c(mu, 1), _c(icov, 2), float(norm),
        _c(base, 2), _c(K, 3), _c(M, 3), _c(pref, 1),
    )
    return float(mass), np.asarray(fid, dtype=float)


def mc_accumulate(samples, x_th, p_th, mu, base, K, M, pref, impl=None):
    impl = impl or _impl
    n, s1, s2 = impl.mc_accumulate(
        _c(samples, 2), float(x_th), float(p_th), _c(mu, 1), _c(base, 2), _c(K, 3), _c(M, 3), _c(pref, 1)
    )
    return int(n), np.asarray(s1, dtype=float), np.asarray(s2, dtype=float)
