"""Haar averages of sqrt-quadratic-form statistics over a fixed spectrum.

For a PSD matrix G with eigenvalues lams and a Haar-random unit vector c,
the quantity of interest is E[sqrt(sum_j lams_j |c_j|^2)].  The root-mean
(Cauchy-Schwarz) relaxation sqrt(mean(lams)) upper-bounds it; the gap
between the two, normalized by sqrt(max(lams)), is the D statistic that
measures how loose the relaxation is for a given spectrum shape.

The exact mean has a closed form for distinct eigenvalues, an alternating
sum whose terms cancel catastrophically in floating point, so it is
evaluated in arbitrary precision with the digit budget scaled to the
dimension.  Whenever the closed form is unusable (repeated eigenvalues,
too-small gaps, overflow of the plausible range) the Monte Carlo route
takes over and the result is flagged accordingly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from mpmath import mp

from . import rng as _rng
from .errors import ArgumentError, CapabilityError, ValidationError
from .pauli import DENSE_QUBIT_CAP, PauliSum, commutator

EXACT_METHOD = "exact"
MC_METHOD = "mc"

ONE_NONZERO = "one_nonzero"
EQUALLY_SPACED = "equally_spaced"
DEGENERATE = "degenerate"
EXPONENTIAL_RANDOM = "exponential_random"
SCENARIOS = (ONE_NONZERO, EQUALLY_SPACED, DEGENERATE, EXPONENTIAL_RANDOM)

# past this dimension the digit budget for the exact alternating sum makes
# single evaluations take seconds, so the sampler takes over
EXACT_DIM_CAP = 512

GAP_FRACTION = 1e-6


@dataclass(frozen=True)
class MeanSqrtResult:
    """E[sqrt(lams . |c|^2)] with the route that produced it.

    samples and std_err are zero when the closed form was used.
    """

    value: float
    method: str
    samples: int
    std_err: float


@dataclass(frozen=True)
class DStatistic:
    value: float
    method: str
    samples: int
    std_err: float
    cauchy: float
    mean_sqrt: float


def _clean_spectrum(lams) -> np.ndarray:
    arr = np.asarray(lams, dtype=float).ravel()
    if arr.size == 0:
        raise ArgumentError("spectrum is empty")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("spectrum has non-finite entries")
    scale = float(np.max(np.abs(arr), initial=0.0))
    floor = -1e-12 * max(scale, 1.0)
    if np.any(arr < floor):
        raise ValidationError("spectrum has negative eigenvalues")
    return np.clip(arr, 0.0, None)


def exact_mean_sqrt(lams) -> float:
    """Closed-form E[sqrt(sum lams_j |c_j|^2)] for distinct eigenvalues.

    Zero eigenvalues are handled by reduction: each drops its term and
    lowers the power in the surviving ones, which keeps the sum free of
    vanishing denominators.  Repeated positive eigenvalues make the form
    singular and raise; callers that cannot rule them out should go
    through mean_sqrt, which falls back to sampling.
    """
    arr = _clean_spectrum(lams)
    d = arr.size
    pos = np.sort(arr[arr > 0.0])
    if pos.size == 0:
        return 0.0
    m0 = d - pos.size
    if pos.size > 1 and np.min(np.diff(pos)) == 0.0:
        raise ValidationError("repeated positive eigenvalues; no closed form")
    with mp.workdps(30 + d):
        pref = (mp.sqrt(mp.pi) / 2) * mp.e ** (mp.loggamma(d) - mp.loggamma(d + 0.5))
        expo = d - mp.mpf(1) / 2 - m0
        total = mp.mpf(0)
        vals = [mp.mpf(x) for x in pos]
        for j, lj in enumerate(vals):
            denom = mp.mpf(1)
            for k, lk in enumerate(vals):
                if k != j:
                    denom *= lj - lk
            total += lj ** expo / denom
        return float(pref * total)


def mc_mean_sqrt(lams, trials: int = 1000, seed: int = 0) -> tuple[float, float]:
    """Sampled E[sqrt(lams . |c|^2)] over Haar vectors c, with its SE."""
    arr = _clean_spectrum(lams)
    if trials < 2:
        raise ArgumentError(f"need at least 2 trials, got {trials}")
    d = arr.size
    gen = _rng.generator(seed, "haar-mean", d, trials)
    z = gen.standard_normal((trials, 2 * d))
    weights = z[:, :d] ** 2 + z[:, d:] ** 2
    s = weights @ arr / np.sum(weights, axis=1)
    root = np.sqrt(s)
    return float(np.mean(root)), float(np.std(root, ddof=1) / math.sqrt(trials))


def cauchy_bound(lams) -> float:
    """sqrt(Tr G / d), the root-mean-square relaxation of the Haar mean."""
    return float(math.sqrt(np.mean(_clean_spectrum(lams))))


def mean_sqrt(lams, trials: int = 1000, seed: int = 0) -> MeanSqrtResult:
    """E[sqrt(lams . |c|^2)] by closed form when trustworthy, else sampled.

    The closed form is skipped when positive eigenvalues repeat or nearly
    repeat (min gap below 1e-6 of the largest eigenvalue), when the
    dimension is past the exact cap, and its output is discarded when it
    lands outside the a priori range [0, sqrt(max lams)].
    """
    arr = _clean_spectrum(lams)
    lam_max = float(np.max(arr))
    if lam_max == 0.0:
        return MeanSqrtResult(0.0, EXACT_METHOD, 0, 0.0)
    pos = np.sort(arr[arr > 0.0])
    usable = arr.size <= EXACT_DIM_CAP
    if usable and pos.size > 1:
        usable = float(np.min(np.diff(pos))) >= GAP_FRACTION * lam_max
    if usable:
        value = exact_mean_sqrt(arr)
        if 0.0 <= value <= math.sqrt(lam_max):
            return MeanSqrtResult(value, EXACT_METHOD, 0, 0.0)
    value, err = mc_mean_sqrt(arr, trials=trials, seed=seed)
    return MeanSqrtResult(value, MC_METHOD, trials, err)


def d_statistic(lams, trials: int = 1000, seed: int = 0) -> DStatistic:
    """Normalized slack of the Cauchy-Schwarz relaxation for this spectrum.

    D = (sqrt(mean lams) - E[sqrt(S)]) / sqrt(max lams), in [0, 1).
    """
    arr = _clean_spectrum(lams)
    lam_max = float(np.max(arr))
    if lam_max == 0.0:
        raise ValidationError("D statistic undefined for an all-zero spectrum")
    mean = mean_sqrt(arr, trials=trials, seed=seed)
    root_max = math.sqrt(lam_max)
    cauchy = cauchy_bound(arr)
    return DStatistic(
        value=(cauchy - mean.value) / root_max,
        method=mean.method,
        samples=mean.samples,
        std_err=mean.std_err / root_max,
        cauchy=cauchy,
        mean_sqrt=mean.value,
    )


def d_one_nonzero(d: int) -> float:
    """Closed-form D for the spectrum with a single nonzero eigenvalue.

    1/sqrt(d) - (sqrt(pi)/2) Gamma(d)/Gamma(d + 1/2); the log-gamma route
    keeps it finite far past the point where the Gamma ratio overflows.
    Approaches (1 - sqrt(pi)/2)/sqrt(d) for large d and is 0 at d = 1.
    """
    if d < 1:
        raise ArgumentError(f"dimension must be positive, got {d}")
    from scipy.special import gammaln

    ratio = math.exp(float(gammaln(d) - gammaln(d + 0.5)))
    return 1.0 / math.sqrt(d) - 0.5 * math.sqrt(math.pi) * ratio


def build_scenario(name: str, d: int, lam: float = 1.0, seed: int = 0) -> np.ndarray:
    """Named eigenvalue profiles used throughout the D-statistic studies."""
    if d < 1:
        raise ArgumentError(f"dimension must be positive, got {d}")
    if lam <= 0:
        raise ArgumentError(f"largest eigenvalue must be positive, got {lam}")
    if name == ONE_NONZERO:
        out = np.zeros(d)
        out[0] = lam
        return out
    if name == EQUALLY_SPACED:
        return lam * np.arange(1, d + 1) / d
    if name == DEGENERATE:
        return np.full(d, lam)
    if name == EXPONENTIAL_RANDOM:
        gen = _rng.generator(seed, "haar-exp", d)
        return gen.standard_exponential(d)
    raise ArgumentError(f"unknown scenario {name!r}; expected one of {SCENARIOS}")


@dataclass(frozen=True)
class Pf1HaarBound:
    """First-order single-segment error bound without the Cauchy-Schwarz step."""

    value: float
    method: str
    samples: int
    std_err: float
    dim: int


def pf1_no_cauchy_bound(a: PauliSum, b: PauliSum, t: float,
                        trials: int = 1000, seed: int = 0) -> Pf1HaarBound:
    """Haar-average bound for one first-order segment of H = A + B.

    The leading error operator has squared modulus (t^4/4) [iB,A]^2, so the
    average-case error is the Haar mean of the square root of that PSD
    form, computed from its spectrum rather than relaxed to the Frobenius
    norm.  Needs a dense eigendecomposition, hence the qubit cap.
    """
    if a.n != b.n:
        raise ArgumentError(f"group sizes differ: {a.n} vs {b.n}")
    if a.n > DENSE_QUBIT_CAP:
        raise CapabilityError(
            f"spectrum route needs dense matrices; n={a.n} exceeds "
            f"the cap of {DENSE_QUBIT_CAP}")
    comm = commutator(b, a)
    herm = 1j * comm.dense()
    eigs = np.linalg.eigvalsh(herm)
    spectrum = 0.25 * (t ** 4) * eigs ** 2
    res = mean_sqrt(spectrum, trials=trials, seed=seed)
    return Pf1HaarBound(res.value, res.method, res.samples, res.std_err,
                        dim=1 << a.n)
