"""Subspace (MUSIC) baseline on the sample covariance of observed rows.

Works directly on the sampled geometry: steering vectors are restricted to
the observation pattern, and the pseudospectrum is the inverse squared
projection onto the noise subspace of the sample covariance.  Requires the
model order as an input (order estimation is out of scope) and, like any
plain subspace method, degrades when sources are strongly correlated, since
coherent sources collapse the signal subspace rank.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .signal import SamplingPattern

__all__ = [
    "Pseudospectrum",
    "sample_covariance",
    "music_pseudospectrum",
    "pick_peaks",
]


@dataclass(frozen=True)
class Pseudospectrum:
    """Sampled spectrum curve on a uniform frequency grid in [0, 1)."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float).ravel()
        values = np.asarray(self.values, dtype=float).ravel()
        if grid.size != values.size:
            raise ValueError("grid and values must have equal length")
        if np.any(np.diff(grid) <= 0) or (grid.size and not 0 <= grid[0] < 1):
            raise ValueError("grid must be strictly increasing within [0, 1)")
        grid.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def to_csv(self, path=None) -> str | None:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["f", "value"])
        for f, v in zip(self.grid, self.values):
            writer.writerow([f, v])
        if path is None:
            return buf.getvalue()
        with open(path, "w", newline="") as fh:
            fh.write(buf.getvalue())
        return None


def sample_covariance(y_obs: np.ndarray) -> np.ndarray:
    """Snapshot-averaged outer product ``(1/L) Y Y^H``; Hermitian PSD."""
    y = np.atleast_2d(np.asarray(y_obs, dtype=complex))
    l = y.shape[1]
    if l < 1:
        raise ValueError("need at least one snapshot")
    r = (y @ y.conj().T) / l
    return (r + r.conj().T) / 2.0


def music_pseudospectrum(
    r: np.ndarray,
    k: int,
    pattern: SamplingPattern,
    grid_size: int = 8192,
) -> Pseudospectrum:
    """Noise-subspace pseudospectrum ``1 / ||E_n^H a_omega(f)||^2``.

    Parameters
    ----------
    r : ndarray, shape (m, m)
        Sample covariance of the observed rows.
    k : int
        Assumed number of sources; must be below ``m``.
    pattern : SamplingPattern
        Observation geometry; steering vectors are restricted to it.
    grid_size : int
        Uniform grid resolution over [0, 1).
    """
    r = np.asarray(r, dtype=complex)
    m = r.shape[0]
    if r.shape != (m, m):
        raise ValueError("covariance must be square")
    if pattern.m != m:
        raise ValueError(f"pattern selects {pattern.m} rows, covariance is {m}x{m}")
    if not 0 < k < m:
        raise ValueError(f"need 0 < k < {m}, got {k}")
    _, vecs = np.linalg.eigh(r)
    e_noise = vecs[:, : m - k]
    grid = np.arange(grid_size) / grid_size
    steer = np.exp(2j * np.pi * np.outer(pattern.indices0(), grid))
    denom = np.sum(np.abs(e_noise.conj().T @ steer) ** 2, axis=0)
    return Pseudospectrum(grid, 1.0 / np.maximum(denom, 1e-300))


def pick_peaks(ps: Pseudospectrum, k: int) -> tuple[np.ndarray, bool]:
    """Return up to ``k`` largest strict local maxima, parabolically refined.

    Maxima are strict against both circular neighbors; equal-height peaks
    tie-break toward the lower frequency.  Returns the refined frequencies
    (sorted) and whether ``k`` maxima were found.
    """
    v = ps.values
    g = v.size
    if g < 3:
        raise ValueError("need at least 3 grid points")
    left = np.roll(v, 1)
    right = np.roll(v, -1)
    is_peak = (v > left) & (v > right)
    idx = np.flatnonzero(is_peak)
    # sort by height descending, then by frequency ascending for ties
    order = np.lexsort((ps.grid[idx], -v[idx]))
    chosen = idx[order][:k]
    refined = []
    step = 1.0 / g
    for i in chosen:
        alpha, beta, gamma = v[(i - 1) % g], v[i], v[(i + 1) % g]
        denom = alpha - 2.0 * beta + gamma
        delta = 0.5 * (alpha - gamma) / denom if denom != 0 else 0.0
        delta = float(np.clip(delta, -0.5, 0.5))
        refined.append((ps.grid[i] + delta * step) % 1.0)
    return np.sort(np.array(refined)), len(chosen) == k
