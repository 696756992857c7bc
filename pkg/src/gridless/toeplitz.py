"""Hermitian Toeplitz lift of a first-row parameter vector and its adjoint.

The lift maps ``u`` of length ``n`` (``u[0]`` real) to the Hermitian Toeplitz
matrix ``T(u)`` with ``T[j, k] = u[k - j]`` for ``k >= j`` and
``conj(u[j - k])`` otherwise.  A positive semidefinite ``T(u)`` of rank
``r < n`` encodes ``r`` frequencies with positive powers; see
:mod:`gridless.retrieval` for the decomposition.
"""

from __future__ import annotations

import numpy as np

__all__ = ["toeplitz_lift", "toeplitz_adjoint", "eigencheck_psd"]


def toeplitz_lift(u: np.ndarray) -> np.ndarray:
    """Build the Hermitian Toeplitz matrix whose first row is ``u`` transposed.

    Parameters
    ----------
    u : array_like, shape (n,)
        First-row parameter; ``u[0]`` is taken as real (Hermitian diagonal).

    Returns
    -------
    ndarray, shape (n, n)
        Hermitian exactly by construction.
    """
    u = np.asarray(u, dtype=complex).ravel()
    n = u.size
    if n == 0:
        raise ValueError("u must be nonempty")
    u = u.copy()
    u[0] = u[0].real
    d = np.arange(n)[None, :] - np.arange(n)[:, None]  # k - j
    t = np.where(d >= 0, u[np.abs(d)], np.conj(u[np.abs(d)]))
    return t


def toeplitz_adjoint(m: np.ndarray) -> np.ndarray:
    """Adjoint of the lift: diagonal sums of the Hermitian part of ``m``.

    Returns ``v`` with ``v[0]`` equal to the real trace of the Hermitian part
    ``H = (M + M^H)/2`` and, for ``d >= 1``, ``v[d]`` equal to twice the sum
    of superdiagonal ``d`` of ``H``.  This fixes the pairing convention

        ``Re tr(T(u)^H M) = Re(u^H v)``

    for every parameter vector ``u``.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("m must be square")
    h = (m + m.conj().T) / 2.0
    n = m.shape[0]
    v = np.empty(n, dtype=complex)
    v[0] = np.trace(h).real
    for d in range(1, n):
        v[d] = 2.0 * np.trace(h, offset=d)
    return v


def eigencheck_psd(m: np.ndarray, tol: float = 1e-10) -> tuple[bool, float]:
    """Smallest eigenvalue of a Hermitian matrix and whether it is >= -tol."""
    lam_min = float(np.linalg.eigvalsh(m)[0])
    return lam_min >= -tol, lam_min
