"""Pure-numpy kernel implementations; same signatures as the compiled core.

Statevector convention: qubit i is bit i of the flat amplitude index, so in
the C-order [2]*n reshape, qubit q lives on axis n-1-q.
"""
from __future__ import annotations

import numpy as np


def apply_1q(amps: np.ndarray, n: int, q: int, m00, m01, m10, m11) -> None:
    view = amps.reshape([2] * n)
    moved = np.moveaxis(view, n - 1 - q, 0)
    lo = moved[0].copy()
    hi = moved[1]
    moved[0] = m00 * lo + m01 * hi
    moved[1] = m10 * lo + m11 * hi


def apply_cx(amps: np.ndarray, n: int, c: int, t: int) -> None:
    view = amps.reshape([2] * n)
    moved = np.moveaxis(view, (n - 1 - c, n - 1 - t), (0, 1))
    tmp = moved[1, 0].copy()
    moved[1, 0] = moved[1, 1]
    moved[1, 1] = tmp


def apply_cz(amps: np.ndarray, n: int, c: int, t: int) -> None:
    view = amps.reshape([2] * n)
    moved = np.moveaxis(view, (n - 1 - c, n - 1 - t), (0, 1))
    moved[1, 1] *= -1


def eval_poly_batch(
    nums: np.ndarray,
    idx: np.ndarray,
    ptr: np.ndarray,
    points: np.ndarray,
    modulus: int,
) -> np.ndarray:
    """Evaluate a multilinear polynomial (CSR monomials) at boolean points, mod `modulus`.

    nums[t] is the numerator of monomial t, idx[ptr[t]:ptr[t+1]] its variable
    indices; points is (samples, nvars) of 0/1.  Returns int64[samples].
    """
    samples = points.shape[0]
    acc = np.zeros(samples, dtype=np.int64)
    for t in range(len(nums)):
        vs = idx[ptr[t]:ptr[t + 1]]
        on = points[:, vs].all(axis=1)
        acc[on] = (acc[on] + nums[t]) % modulus
    return acc
