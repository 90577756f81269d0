"""Pure-numpy kernel implementations (fallback for the Cython extension)."""

import numpy as np


def bruteforce_count_range(lo, hi, m, n, s, t):
    """Count x in [lo, hi) whose mn-bit row-major matrix has line sums (s, t)."""
    arr = np.arange(lo, hi, dtype=np.int64)
    ok = np.ones(arr.shape, dtype=bool)
    for j in range(m):
        rs = np.zeros(arr.shape, dtype=np.int8)
        for k in range(n):
            rs += ((arr >> (j * n + k)) & 1).astype(np.int8)
        ok &= rs == s[j]
        if not ok.any():
            return 0
    for k in range(n):
        cs = np.zeros(arr.shape, dtype=np.int8)
        for j in range(m):
            cs += ((arr >> (j * n + k)) & 1).astype(np.int8)
        ok &= cs == t[k]
    return int(np.count_nonzero(ok))


def mc_f_sum(lam, s, t, theta, phi):
    """Sum the oscillatory integrand over a batch of angle samples.

    lam: (m, n) saddle-point success probabilities; theta: (c, m); phi: (c, n).
    Returns (sum Re F, sum Im F, sum (Re F)^2) over the batch, where
    F = prod_jk (1 + lam_jk (e^{i(theta_j+phi_k)} - 1)) e^{-i(s.theta + t.phi)}.
    """
    m, n = lam.shape
    e_th = np.exp(1j * theta)
    e_ph = np.exp(1j * phi)
    prod = np.exp(-1j * (theta @ np.asarray(s, dtype=float) + phi @ np.asarray(t, dtype=float)))
    for j in range(m):
        for k in range(n):
            prod = prod * (1.0 + lam[j, k] * (e_th[:, j] * e_ph[:, k] - 1.0))
    re = prod.real
    return float(re.sum()), float(prod.imag.sum()), float((re * re).sum())
