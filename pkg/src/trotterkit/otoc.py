"""Out-of-time-order correlator of a spread butterfly operator.

The observable is Tr[V0 rho V0^dag Z_1] with V0 = e^{iHt} X_n e^{-iHt}: an
X on the last qubit, spread by the dynamics, probed by Z on the first.
The input rho fixes the first qubit to |0> and leaves the other n-1
maximally mixed, so the correlator is an average over the 2^{n-1} suffix
basis states and starts at exactly 1 for t = 0.  The trotterized variant
replaces both conjugation legs by the product formula, the reversed leg
running the formula at -t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng as _rng
from .bounds import multiplicative_error
from .errors import ArgumentError, CapabilityError
from .evolution import ExactEvolver, exact_unitary_dense
from .formulas import SegmentApplier, make_plan, pf_unitary_dense
from .models import HamiltonianInstance
from .pauli import DENSE_QUBIT_CAP

_CHUNK_COLUMNS = 512


@dataclass(frozen=True)
class OtocConfig:
    """Evolution recipe for the correlator.

    p and r both None means exact conjugation legs; both set means the
    order-p product formula with r segments per leg.  The probe pair is
    fixed: Z on the first qubit, X on the last.
    """

    inst: HamiltonianInstance
    t: float
    p: int | None = None
    r: int | None = None

    def __post_init__(self):
        if self.inst.n < 2:
            raise ArgumentError("the correlator needs at least two qubits")
        if (self.p is None) != (self.r is None):
            raise ArgumentError("p and r must be given together")


@dataclass(frozen=True)
class OtocBounds:
    """Telescoped per-segment bounds on the correlator gap."""

    avg: float
    worst: float
    m_frob_normalized: float
    m_spectral: float


def _suffix_indices(n: int) -> np.ndarray:
    # the probed qubit is bit 0 and is pinned to |0>, so the mixed part
    # enumerates indices with that bit clear
    return np.arange(1 << (n - 1), dtype=np.int64) << 1


def _correlator_over_columns(leg_minus, leg_plus, n: int,
                             cols: np.ndarray) -> float:
    """Mean <Z_1> after V0 acting on the given suffix basis columns.

    V0 = e^{iHt} X_n e^{-iHt}: the minus leg first, then the bit flip on
    the last qubit, then the plus leg.
    """
    d = 1 << n
    flip = np.arange(d, dtype=np.int64) ^ (1 << (n - 1))
    signs = 1.0 - 2.0 * (np.arange(d, dtype=np.int64) & 1).astype(float)
    total = 0.0
    for start in range(0, cols.size, _CHUNK_COLUMNS):
        chunk = cols[start:start + _CHUNK_COLUMNS]
        psi = np.zeros((d, chunk.size), dtype=complex)
        psi[chunk, np.arange(chunk.size)] = 1.0
        psi = leg_plus(leg_minus(psi)[flip, :])
        total += float(signs @ np.sum(psi.real ** 2 + psi.imag ** 2, axis=1))
    return total / cols.size


def _appliers(cfg: OtocConfig):
    """(e^{-iHt}, e^{+iHt}) appliers, exact or formula-based per config."""
    inst, t = cfg.inst, cfg.t
    if cfg.p is None:
        evolver = ExactEvolver(inst)
        return (lambda psi: evolver.evolve(psi, t),
                lambda psi: evolver.evolve(psi, -t))
    return (SegmentApplier(make_plan(inst, t, cfg.r, cfg.p)),
            SegmentApplier(make_plan(inst, -t, cfg.r, cfg.p)))


def otoc_exact(cfg: OtocConfig) -> float:
    """Correlator under exact conjugation, averaged over the full basis.

    Runs the complete 2^{n-1}-state average, so it is limited to the dense
    range; past that, use otoc_sampled.
    """
    if cfg.p is not None:
        raise ArgumentError("exact correlator takes a config without p, r")
    if cfg.inst.n > DENSE_QUBIT_CAP:
        raise CapabilityError(
            f"full-basis average needs dense evolution; n={cfg.inst.n} "
            f"exceeds the cap of {DENSE_QUBIT_CAP}; sample instead")
    fwd, bwd = _appliers(cfg)
    return _correlator_over_columns(fwd, bwd, cfg.inst.n,
                                    _suffix_indices(cfg.inst.n))


def otoc_trotterized(cfg: OtocConfig) -> float:
    """Correlator with both conjugation legs replaced by the formula."""
    if cfg.p is None:
        raise ArgumentError("trotterized correlator needs p and r set")
    if cfg.inst.n > DENSE_QUBIT_CAP:
        raise CapabilityError(
            f"full-basis average is capped at {DENSE_QUBIT_CAP} qubits; "
            "sample instead")
    fwd, bwd = _appliers(cfg)
    return _correlator_over_columns(fwd, bwd, cfg.inst.n,
                                    _suffix_indices(cfg.inst.n))


def otoc_sampled(cfg: OtocConfig, samples: int, seed: int = 0,
                 delta: float = 0.01) -> tuple[float, float]:
    """Sampled correlator with a Hoeffding radius.

    Averages over `samples` uniformly drawn suffix basis states; each
    contributes a value in [-1, 1], so the estimate is within
    sqrt(2 ln(2/delta) / samples) of the full average with probability at
    least 1 - delta.  Asking for at least the full basis switches to the
    complete enumeration (the radius is then just conservative).
    """
    if samples < 1:
        raise ArgumentError(f"need a positive sample count, got {samples}")
    if not 0.0 < delta < 1.0:
        raise ArgumentError(f"delta must be in (0, 1), got {delta}")
    n = cfg.inst.n
    d1 = 1 << (n - 1)
    radius = math.sqrt(2.0 * math.log(2.0 / delta) / samples)
    if samples >= d1:
        cols = _suffix_indices(n)
    else:
        gen = _rng.generator(seed, "otoc-sample", cfg.inst.model, n, samples)
        cols = np.sort(gen.integers(0, d1, size=samples).astype(np.int64)) << 1
    fwd, bwd = _appliers(cfg)
    return _correlator_over_columns(fwd, bwd, n, cols), radius


def otoc_error_bound(cfg: OtocConfig) -> OtocBounds:
    """Average and worst-case bounds on |exact - trotterized| correlator.

    Both legs contribute r segments whose multiplicative errors telescope:
    4 r (||m||_F / sqrt d) sqrt(d/d1) on average over the mixed input,
    4 r ||m|| in the worst case.  A formula that reproduces the segment
    exactly gives zero in both.
    """
    if cfg.p is None:
        raise ArgumentError("error bound needs p and r set")
    inst, r = cfg.inst, cfg.r
    if inst.n > DENSE_QUBIT_CAP:
        raise CapabilityError(
            f"segment error needs dense unitaries; n={inst.n} exceeds "
            f"the cap of {DENSE_QUBIT_CAP}")
    tau = cfg.t / r
    u_seg = pf_unitary_dense(make_plan(inst, tau, 1, cfg.p))
    u0_seg = exact_unitary_dense(inst, tau)
    m = multiplicative_error(u_seg, u0_seg)
    d = 1 << inst.n
    d1 = d // 2
    frob_norm = float(np.linalg.norm(m, "fro")) / math.sqrt(d)
    spectral = float(np.linalg.norm(m, 2))
    return OtocBounds(
        avg=4.0 * r * frob_norm * math.sqrt(d / d1),
        worst=4.0 * r * spectral,
        m_frob_normalized=frob_norm,
        m_spectral=spectral,
    )
