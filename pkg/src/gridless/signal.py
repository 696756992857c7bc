"""Synthetic multi-snapshot sinusoidal signals and their sampling model.

A signal of length ``n`` with ``l`` snapshots is a superposition of ``k``
complex sinusoids: ``Y = sum_k a(f_k) s_k`` where ``a(f)`` is the unit-first-
entry steering vector and ``s_k`` is a row of complex amplitudes.  Rows of
``Y`` are observed on an index set omega (1-based), possibly perturbed by
complex Gaussian noise, and recovery is constrained either to match the
observed rows exactly or to stay within a Frobenius ball around them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FrequencyMixture",
    "SamplingPattern",
    "FeasibleDomain",
    "MeasurementSet",
    "steering_vector",
    "synthesize",
    "subsample",
    "draw_mixture",
    "add_noise",
    "noise_ball_radius",
    "wrap_distance",
]


def wrap_distance(f1, f2):
    """Circular distance between frequencies on the unit torus [0, 1)."""
    d = np.abs(np.asarray(f1, dtype=float) - np.asarray(f2, dtype=float)) % 1.0
    return np.minimum(d, 1.0 - d)


@dataclass(frozen=True)
class FrequencyMixture:
    """Ground-truth frequencies and per-component amplitude rows.

    Parameters
    ----------
    freqs : array_like, shape (k,)
        Frequencies in cycles/sample; canonicalized modulo 1 to [0, 1).
    coeffs : array_like, shape (k, l)
        Complex amplitudes; row ``i`` belongs to ``freqs[i]``.
    """

    freqs: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        freqs = np.mod(np.asarray(self.freqs, dtype=float).ravel(), 1.0)
        coeffs = np.atleast_2d(np.asarray(self.coeffs, dtype=complex))
        if coeffs.shape[0] != freqs.size:
            raise ValueError(
                f"coeffs has {coeffs.shape[0]} rows for {freqs.size} frequencies"
            )
        if freqs.size != np.unique(freqs).size:
            raise ValueError("frequencies must be pairwise distinct")
        if freqs.size and np.any(np.all(coeffs == 0, axis=1)):
            raise ValueError("zero amplitude rows are not components")
        freqs.flags.writeable = False
        coeffs.flags.writeable = False
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def k(self) -> int:
        return self.freqs.size

    @property
    def l(self) -> int:
        return self.coeffs.shape[1]


@dataclass(frozen=True)
class SamplingPattern:
    """Strictly increasing 1-based row indices omega within ambient length n."""

    omega: np.ndarray
    n: int

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=int).ravel()
        if omega.size and (omega[0] < 1 or omega[-1] > self.n):
            raise ValueError("omega entries must lie in [1, n]")
        if np.any(np.diff(omega) <= 0):
            raise ValueError("omega must be strictly increasing")
        omega.flags.writeable = False
        object.__setattr__(self, "omega", omega)

    @property
    def m(self) -> int:
        return self.omega.size

    @classmethod
    def full(cls, n: int) -> "SamplingPattern":
        return cls(np.arange(1, n + 1), n)

    def indices0(self) -> np.ndarray:
        """0-based row indices for array slicing."""
        return self.omega - 1


@dataclass(frozen=True)
class FeasibleDomain:
    """Recovery constraint on the observed rows.

    ``eta is None`` means exact equality on omega; otherwise the candidate's
    rows on omega must stay within Frobenius distance ``eta`` of the data.
    """

    eta: float | None = None

    def __post_init__(self):
        if self.eta is not None:
            if not np.isfinite(self.eta) or self.eta < 0:
                raise ValueError("ball radius must be finite and nonnegative")

    @classmethod
    def equality(cls) -> "FeasibleDomain":
        return cls(None)

    @classmethod
    def ball(cls, eta: float) -> "FeasibleDomain":
        return cls(float(eta))

    @property
    def is_ball(self) -> bool:
        return self.eta is not None


@dataclass(frozen=True)
class MeasurementSet:
    """Observed rows, where they were observed, and the recovery constraint."""

    pattern: SamplingPattern
    y_obs: np.ndarray
    domain: FeasibleDomain = field(default_factory=FeasibleDomain.equality)

    def __post_init__(self):
        y = np.asarray(self.y_obs, dtype=complex)
        # 1-D input is a single snapshot (column), not a row
        y = y[:, None] if y.ndim == 1 else np.atleast_2d(y)
        if y.shape[0] != self.pattern.m:
            raise ValueError(
                f"y_obs has {y.shape[0]} rows but pattern selects {self.pattern.m}"
            )
        y.flags.writeable = False
        object.__setattr__(self, "y_obs", y)

    @property
    def n(self) -> int:
        return self.pattern.n

    @property
    def m(self) -> int:
        return self.pattern.m

    @property
    def l(self) -> int:
        return self.y_obs.shape[1]

    def to_json(self) -> str:
        """Serialize to a JSON document with exact float round-trip."""
        doc = {
            "n": int(self.n),
            "l": int(self.l),
            "omega": [int(i) for i in self.pattern.omega],
            "y_obs": [[[z.real, z.imag] for z in row] for row in self.y_obs],
            "domain": {
                "variant": "ball" if self.domain.is_ball else "equality",
                "eta": self.domain.eta,
            },
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "MeasurementSet":
        doc = json.loads(text)
        pattern = SamplingPattern(np.asarray(doc["omega"]), doc["n"])
        y = np.array(
            [[complex(re, im) for re, im in row] for row in doc["y_obs"]],
            dtype=complex,
        ).reshape(len(doc["omega"]), doc["l"])
        dom = doc["domain"]
        domain = (
            FeasibleDomain.ball(dom["eta"])
            if dom["variant"] == "ball"
            else FeasibleDomain.equality()
        )
        return cls(pattern, y, domain)


def steering_vector(f: float, n: int) -> np.ndarray:
    """Complex sinusoid ``exp(i 2 pi f j)`` for ``j = 0..n-1``.

    The first entry is exactly 1 and ``||a(f)||^2 = n`` for every ``f``.
    """
    if not 0 <= f < 1:
        raise ValueError(f"frequency {f} outside [0, 1); reduce modulo 1 first")
    if n < 1:
        raise ValueError("n must be positive")
    return np.exp(2j * np.pi * f * np.arange(n))


def synthesize(mix: FrequencyMixture, n: int) -> np.ndarray:
    """Superimpose the mixture's sinusoids into an ``n x l`` data matrix."""
    if n < 1:
        raise ValueError("n must be positive")
    if mix.k == 0:
        return np.zeros((n, mix.l), dtype=complex)
    atoms = np.exp(2j * np.pi * np.outer(np.arange(n), mix.freqs))
    return atoms @ mix.coeffs


def subsample(y: np.ndarray, pattern: SamplingPattern) -> np.ndarray:
    """Keep the rows of ``y`` indexed by the (1-based) pattern."""
    y = np.atleast_2d(np.asarray(y))
    if y.shape[0] != pattern.n:
        raise ValueError(f"y has {y.shape[0]} rows, pattern expects {pattern.n}")
    return y[pattern.indices0(), :]


def draw_mixture(
    k: int,
    min_sep: float,
    l: int,
    rng: np.random.Generator,
    max_tries: int = 10_000,
) -> FrequencyMixture:
    """Draw ``k`` frequencies with pairwise wrap-around separation >= min_sep.

    Frequencies are rejection-sampled uniformly; if the bounded retry budget
    is exhausted (tight separations at large k), falls back to evenly spaced
    anchors with independent jitter, which satisfies the separation
    constraint by construction.  Amplitudes are i.i.d. standard complex
    normal (unit per-entry variance).

    Parameters
    ----------
    k : int
        Number of components.
    min_sep : float
        Required minimum circular separation.
    l : int
        Number of snapshots (columns per amplitude row).
    rng : numpy.random.Generator
        Source of randomness; the draw is deterministic given its state.
    """
    if k < 0 or l < 1:
        raise ValueError("need k >= 0 and l >= 1")
    if k * min_sep >= 1:
        raise ValueError(f"cannot place {k} frequencies {min_sep} apart on the torus")
    if k == 0:
        return FrequencyMixture(np.empty(0), np.empty((0, l)))
    freqs = None
    for _ in range(max_tries):
        cand = np.sort(rng.uniform(size=k))
        gaps = np.diff(np.concatenate([cand, [cand[0] + 1.0]]))
        if k == 1 or np.all(gaps >= min_sep):
            freqs = cand
            break
    if freqs is None:
        # stratified fallback: anchor spacing 1/k, jitter < 1/k - min_sep
        jitter = rng.uniform(0.0, 1.0 / k - min_sep, size=k)
        freqs = np.sort(np.mod(rng.uniform() + np.arange(k) / k + jitter, 1.0))
    coeffs = (
        rng.standard_normal((k, l)) + 1j * rng.standard_normal((k, l))
    ) / np.sqrt(2.0)
    return FrequencyMixture(freqs, coeffs)


def add_noise(
    y_obs: np.ndarray, sigma2: float, rng: np.random.Generator
) -> np.ndarray:
    """Add circularly-symmetric complex Gaussian noise of per-entry variance sigma2."""
    if sigma2 < 0:
        raise ValueError("noise variance must be nonnegative")
    y_obs = np.asarray(y_obs, dtype=complex)
    if sigma2 == 0:
        return y_obs.copy()
    w = rng.standard_normal(y_obs.shape) + 1j * rng.standard_normal(y_obs.shape)
    return y_obs + np.sqrt(sigma2 / 2.0) * w


def noise_ball_radius(m: int, l: int, sigma2: float) -> float:
    """Frobenius radius ``sqrt((ml + 2 sqrt(ml)) sigma2)``.

    Mean plus twice the standard deviation of the squared Frobenius norm of
    an ``m x l`` matrix with i.i.d. complex Gaussian entries of variance
    sigma2, so the true noise falls inside the ball with high probability.
    """
    if m < 1 or l < 1:
        raise ValueError("need m, l >= 1")
    ml = m * l
    return float(np.sqrt((ml + 2.0 * np.sqrt(ml)) * sigma2))
