"""Reference evolution e^{-iHt}: dense eigendecomposition or Lanczos.

The dense route diagonalizes once and reuses the basis for every (t, state)
pair.  The Lanczos route is matrix-free for qubit counts past the dense
cap: it grows a Krylov subspace per time step with full reorthogonalization
and halves the step whenever the residual estimate misses the tolerance,
so the reference stays far below the Trotter errors measured against it.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import eigh_tridiagonal

from trotterkit.errors import (
    ArgumentError,
    CapabilityError,
    ConvergenceError,
    ValidationError,
)
from trotterkit.models import HamiltonianInstance
from trotterkit.pauli import DENSE_QUBIT_CAP, PauliSum

KRYLOV_MAX_DIM = 30
_MAX_HALVINGS = 40

# Small cache of dense eigendecompositions.  Searches at different
# formula orders rebuild evolvers for the same instance back to back,
# and at twelve qubits each diagonalization costs minutes.  Entries are
# about d^2 complex numbers each, so the slot count stays tiny.
_EIG_CACHE: dict = {}
_EIG_CACHE_SLOTS = 2


def _eig_cache_key(h):
    """Reproducible identity of a built-in instance, None for the rest.

    The builders are deterministic in (model, n, seed, params), so that
    tuple pins the spectrum.  Hand-assembled instances have no such
    guarantee and are never cached.
    """
    if not isinstance(h, HamiltonianInstance) or h.model == "custom":
        return None
    return (h.model, h.n, h.seed, repr(sorted(h.params.items())))


def _total_of(h) -> PauliSum:
    total = h.total() if isinstance(h, HamiltonianInstance) else h
    if not total.is_hermitian():
        raise ValidationError("Hamiltonian must be Hermitian")
    return total


def exact_unitary_dense(h, t: float) -> np.ndarray:
    """e^{-iHt} as a dense matrix via Hermitian eigendecomposition."""
    total = _total_of(h)
    if total.n > DENSE_QUBIT_CAP:
        raise CapabilityError(
            f"dense evolution capped at {DENSE_QUBIT_CAP} qubits, got {total.n}"
        )
    w, v = np.linalg.eigh(total.dense())
    return (v * np.exp(-1j * t * w)) @ v.conj().T


class ExactEvolver:
    """Evolves states under the full Hamiltonian of an instance.

    mode "dense_eig" caches one eigendecomposition; "krylov" is matrix-free;
    "auto" picks dense when it fits under the cap.
    """

    def __init__(self, h, mode: str = "auto", tolerance: float = 1e-10):
        self.total = _total_of(h)
        self.n = self.total.n
        self.tolerance = float(tolerance)
        if tolerance <= 0:
            raise ArgumentError("tolerance must be positive")
        if mode == "auto":
            mode = "dense_eig" if self.n <= DENSE_QUBIT_CAP else "krylov"
        if mode not in ("dense_eig", "krylov"):
            raise ArgumentError(f"unknown mode {mode!r}")
        if mode == "dense_eig" and self.n > DENSE_QUBIT_CAP:
            raise CapabilityError(
                f"dense evolution capped at {DENSE_QUBIT_CAP} qubits, got {self.n}"
            )
        self.mode = mode
        self._eigh = None
        if mode == "dense_eig":
            key = _eig_cache_key(h)
            cached = _EIG_CACHE.get(key) if key is not None else None
            if cached is None:
                cached = np.linalg.eigh(self.total.dense())
                if key is not None:
                    while len(_EIG_CACHE) >= _EIG_CACHE_SLOTS:
                        _EIG_CACHE.pop(next(iter(_EIG_CACHE)))
                    _EIG_CACHE[key] = cached
            self._eigh = cached

    def evolve(self, psi: np.ndarray, t: float) -> np.ndarray:
        psi = np.asarray(psi, dtype=complex)
        if psi.shape[0] != 1 << self.n:
            raise ArgumentError(
                f"state has leading dimension {psi.shape[0]}, need {1 << self.n}"
            )
        if t == 0:
            return psi.copy()
        if self.mode == "dense_eig":
            w, v = self._eigh
            phases = np.exp(-1j * t * w)
            rot = phases if psi.ndim == 1 else phases[:, None]
            return v @ (rot * (v.conj().T @ psi))
        if psi.ndim == 1:
            return self._krylov_full(psi, t)
        return np.stack(
            [self._krylov_full(psi[:, j], t) for j in range(psi.shape[1])], axis=1
        )

    def _krylov_full(self, psi: np.ndarray, t: float) -> np.ndarray:
        remaining = float(t)
        step = float(t)
        halvings = 0
        while abs(remaining) > 0:
            if abs(step) > abs(remaining):
                step = remaining
            out = self._krylov_step(psi, step)
            if out is None:
                step *= 0.5
                halvings += 1
                if halvings > _MAX_HALVINGS:
                    raise ConvergenceError(
                        "Krylov step halving exhausted without meeting tolerance"
                    )
                continue
            psi = out
            remaining -= step
        return psi

    def _krylov_step(self, psi: np.ndarray, tau: float):
        """One Lanczos step; None when the residual misses the tolerance."""
        norm0 = np.linalg.norm(psi)
        if norm0 == 0:
            return psi.copy()
        basis = [psi / norm0]
        alphas: list[float] = []
        betas: list[float] = []
        for _ in range(KRYLOV_MAX_DIM):
            w = self.total.apply_to_state(basis[-1])
            alphas.append(float(np.real(np.vdot(basis[-1], w))))
            w = w - alphas[-1] * basis[-1]
            if len(basis) > 1:
                w = w - betas[-1] * basis[-2]
            # full reorthogonalization keeps the basis clean at tiny betas
            for b in basis:
                w = w - np.vdot(b, w) * b
            beta = float(np.linalg.norm(w))
            y, err = self._propagate_small(alphas, betas, tau, beta)
            if err <= self.tolerance:
                out = np.zeros_like(psi)
                for c, b in zip(y, basis):
                    out = out + c * b
                return norm0 * out
            if beta < 1e-14:
                # invariant subspace: the small problem is exact
                out = np.zeros_like(psi)
                for c, b in zip(y, basis):
                    out = out + c * b
                return norm0 * out
            betas.append(beta)
            basis.append(w / beta)
        return None

    @staticmethod
    def _propagate_small(alphas, betas, tau, next_beta):
        """exp(-i tau T) e1 for the tridiagonal T, plus a residual estimate."""
        m = len(alphas)
        if m == 1 and not betas:
            y = np.array([np.exp(-1j * tau * alphas[0])])
            return y, abs(tau) * next_beta
        w, q = eigh_tridiagonal(np.array(alphas), np.array(betas))
        y = q @ (np.exp(-1j * tau * w) * q[0, :].conj())
        err = abs(tau) * next_beta * abs(y[-1])
        return y, err
