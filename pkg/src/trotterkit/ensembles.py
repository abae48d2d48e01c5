"""Random input states and empirical error statistics.

Error samples compare two evolutions on the same random input: S(psi) =
||U psi - U0 psi||^2.  Averaging over any ensemble whose first moment is
I/d (all three kinds below qualify) estimates Tr(M M^dag)/d for the
multiplicative error M = U0^dag U - I, which is what the closed-form
bounds in `bounds` predict.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import rng as _rng
from .errors import ArgumentError

HAAR = "haar"
LOCAL_HAAR = "local_haar"
COMPUTATIONAL_BASIS = "computational_basis"
KINDS = (HAAR, LOCAL_HAAR, COMPUTATIONAL_BASIS)

# States are generated in sample-major chunks so that large batches never
# materialize more than roughly this many complex entries at once.  The
# chunk size is a fixed function of the dimension, which keeps a given
# (seed, kind, n, samples) run byte-reproducible.
_CHUNK_ENTRIES = 1_048_576

ApplyFn = Callable[[np.ndarray], np.ndarray]


def _chunk_size(dim: int) -> int:
    return max(1, _CHUNK_ENTRIES // dim)


def sample_states(n: int, kind: str, gen: np.random.Generator,
                  count: int) -> np.ndarray:
    """Draw `count` random n-qubit states as the columns of a (2^n, count) array.

    Kinds: "haar" (normalized complex Gaussian vector), "local_haar"
    (product of independent single-qubit Haar states), and
    "computational_basis" (uniformly random basis vector).
    """
    if n < 1:
        raise ArgumentError(f"need at least one qubit, got n={n}")
    if count < 1:
        raise ArgumentError(f"need a positive sample count, got {count}")
    dim = 1 << n

    if kind == HAAR:
        z = gen.standard_normal((count, 2 * dim))
        psi = (z[:, :dim] + 1j * z[:, dim:]).T
        psi /= np.linalg.norm(psi, axis=0)
        return psi

    if kind == LOCAL_HAAR:
        z = gen.standard_normal((count, n, 4))
        amp = np.empty((count, n, 2), dtype=np.complex128)
        amp[..., 0] = z[..., 0] + 1j * z[..., 1]
        amp[..., 1] = z[..., 2] + 1j * z[..., 3]
        amp /= np.linalg.norm(amp, axis=2, keepdims=True)
        # Assemble the product state highest qubit first, so that after the
        # loop qubit q occupies bit q of the basis index.
        out = np.ones((count, 1), dtype=np.complex128)
        for q in reversed(range(n)):
            out = (out[:, :, None] * amp[:, None, q, :]).reshape(count, -1)
        return out.T

    if kind == COMPUTATIONAL_BASIS:
        idx = gen.integers(0, dim, size=count)
        psi = np.zeros((dim, count), dtype=np.complex128)
        psi[idx, np.arange(count)] = 1.0
        return psi

    raise ArgumentError(f"unknown ensemble kind {kind!r}; expected one of {KINDS}")


def sample_state(n: int, kind: str, gen: np.random.Generator) -> np.ndarray:
    """Single random state as a flat (2^n,) vector."""
    return sample_states(n, kind, gen, 1)[:, 0]


@dataclass(frozen=True)
class ErrorSampleStats:
    """Summary statistics of S(psi) = ||U psi - U0 psi||^2 over random inputs.

    `mean_sqrtS` / `std_sqrtS` describe sqrt(S) (the 2-norm error itself);
    `mean_S` / `var_S` describe S.  Standard deviations use the unbiased
    (ddof=1) estimator and are 0.0 when only one sample was drawn.  The
    seed is the one the caller passed in, recorded so result rows stay
    reproducible.
    """

    samples: int
    mean_sqrtS: float
    std_sqrtS: float
    mean_S: float
    var_S: float
    seed: int

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise ArgumentError("statistics need at least one sample")


def _stats_from_values(s_values: np.ndarray, seed: int) -> ErrorSampleStats:
    count = s_values.size
    root = np.sqrt(np.maximum(s_values, 0.0))
    var_s = float(np.var(s_values, ddof=1)) if count > 1 else 0.0
    std_root = float(np.std(root, ddof=1)) if count > 1 else 0.0
    return ErrorSampleStats(
        samples=count,
        mean_sqrtS=float(np.mean(root)),
        std_sqrtS=std_root,
        mean_S=float(np.mean(s_values)),
        var_S=var_s,
        seed=seed,
    )


def _squared_errors(apply_u: ApplyFn, apply_u0: ApplyFn,
                    states: np.ndarray) -> np.ndarray:
    diff = np.asarray(apply_u(states)) - np.asarray(apply_u0(states))
    return np.einsum("ij,ij->j", diff.conj(), diff).real


def empirical_error(apply_u: ApplyFn, apply_u0: ApplyFn, n: int,
                    kind: str = HAAR, samples: int = 20,
                    seed: int = 0) -> ErrorSampleStats:
    """Sample S(psi) over random inputs and summarize.

    `apply_u` and `apply_u0` must accept a (2^n, batch) array of state
    columns and return the evolved columns; both the product-formula
    applier and the exact evolver do.  Sampling is deterministic in
    (seed, kind, n, samples).
    """
    if samples < 1:
        raise ArgumentError(f"need a positive sample count, got {samples}")
    if kind not in KINDS:
        raise ArgumentError(f"unknown ensemble kind {kind!r}; expected one of {KINDS}")
    gen = _rng.generator(seed, "empirical", kind, n)
    dim = 1 << n
    chunk = _chunk_size(dim)
    parts = []
    remaining = samples
    while remaining > 0:
        take = min(chunk, remaining)
        states = sample_states(n, kind, gen, take)
        parts.append(_squared_errors(apply_u, apply_u0, states))
        remaining -= take
    return _stats_from_values(np.concatenate(parts), seed)


def empirical_subsystem_error(apply_u: ApplyFn, apply_u0: ApplyFn, n: int,
                              fixed: int, samples: int = 20,
                              seed: int = 0) -> ErrorSampleStats:
    """Error statistics with a fixed |0...0> register on the low `fixed` qubits.

    The remaining n-fixed qubits carry a Haar-random state, so the input
    ensemble is |0...0> tensor psi_rand embedded in the full register.
    With fixed=0 this coincides with `empirical_error` over the Haar kind.
    """
    if not 0 <= fixed < n:
        raise ArgumentError(
            f"fixed register must satisfy 0 <= fixed < n, got fixed={fixed}, n={n}")
    if fixed == 0:
        return empirical_error(apply_u, apply_u0, n, HAAR, samples, seed)
    if samples < 1:
        raise ArgumentError(f"need a positive sample count, got {samples}")
    gen = _rng.generator(seed, "empirical-subsystem", fixed, n)
    dim = 1 << n
    free = n - fixed
    rows = np.arange(1 << free) << fixed
    chunk = _chunk_size(dim)
    parts = []
    remaining = samples
    while remaining > 0:
        take = min(chunk, remaining)
        rand = sample_states(free, HAAR, gen, take)
        full = np.zeros((dim, take), dtype=np.complex128)
        full[rows, :] = rand
        parts.append(_squared_errors(apply_u, apply_u0, full))
        remaining -= take
    return _stats_from_values(np.concatenate(parts), seed)
