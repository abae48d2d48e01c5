"""Trotter-Suzuki product formulas: stage lists, dense unitaries, fast apply.

A stage list records the (coefficient, direction) sequence of one formula
segment.  First order is a single forward sweep through the groups; order
2k comes from the usual recursion, five scaled copies of order 2k-2, and
is kept literal (no merging of adjacent stages) so the stage count stays
2 * 5^(k-1).

Stage s=1 is the leftmost factor of the segment unitary.  Applying a
segment to a state therefore walks the stage list backwards, and within a
forward stage applies the last group first.

The matrix-free path exploits structure per group: if every qubit sees a
single Pauli axis across the group's strings, a local basis change makes
the group diagonal (one cached phase vector); otherwise the group splits
into disjoint-support components, each exponentiated as a small dense
block.  Both factorizations are exact, so all Trotter error lives between
groups, never inside one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from trotterkit.errors import ArgumentError, CapabilityError, ValidationError
from trotterkit.models import HamiltonianInstance
from trotterkit.pauli import (
    DENSE_QUBIT_CAP,
    PauliSum,
    restrict_to_support,
    support_components,
)

FORWARD = "forward"
REVERSE = "reverse"

LOCAL_BLOCK_CAP = 12

_HAD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
_S_DAG = np.array([[1, 0], [0, -1j]], dtype=complex)
# W with W A W^dag = Z for axis A; None means already diagonal
_AXIS_CHANGE = {(1, 0): _HAD, (1, 1): _HAD @ _S_DAG, (0, 1): None}


@dataclass(frozen=True)
class StageList:
    """Ordered (coefficient, direction) stages of one formula segment."""

    order: int
    stages: tuple

    def __post_init__(self):
        if self.order < 1:
            raise ArgumentError(f"formula order must be >= 1, got {self.order}")
        total = sum(a for a, _ in self.stages)
        if abs(total - 1.0) > 1e-14:
            raise ArgumentError(f"stage coefficients sum to {total!r}, need 1")
        for _, direction in self.stages:
            if direction not in (FORWARD, REVERSE):
                raise ArgumentError(f"bad stage direction {direction!r}")

    @property
    def stage_count(self) -> int:
        return len(self.stages)


def suzuki_stages(k: int) -> StageList:
    """Order-2k stage list; k=1 is the symmetric half-forward half-back."""
    if k < 1:
        raise ArgumentError(f"half-order must be >= 1, got {k}")
    stages = [(0.5, FORWARD), (0.5, REVERSE)]
    for j in range(2, k + 1):
        p = 1.0 / (4.0 - 4.0 ** (1.0 / (2 * j - 1)))
        outer = [(a * p, d) for a, d in stages]
        middle = [(a * (1.0 - 4.0 * p), d) for a, d in stages]
        stages = outer + outer + middle + outer + outer
    return StageList(order=2 * k, stages=tuple(stages))


def stages_for_order(p: int) -> StageList:
    """Stage list for formula order p in {1, 2, 4, 6, ...}."""
    if p == 1:
        return StageList(order=1, stages=((1.0, FORWARD),))
    if p >= 2 and p % 2 == 0:
        return suzuki_stages(p // 2)
    raise ArgumentError(f"no product formula of order {p}; use 1 or an even order")


@dataclass(frozen=True)
class EvolutionPlan:
    """One simulation: instance, total time, segment count, stage list."""

    instance: HamiltonianInstance
    t: float
    r: int
    stage_list: StageList

    def __post_init__(self):
        if not isinstance(self.r, (int, np.integer)) or self.r < 1:
            raise ArgumentError(f"segment count must be a positive int, got {self.r}")
        if not np.isfinite(self.t):
            raise ArgumentError(f"time must be finite, got {self.t}")

    @property
    def order(self) -> int:
        return self.stage_list.order


def make_plan(inst: HamiltonianInstance, t: float, r: int, p: int) -> EvolutionPlan:
    return EvolutionPlan(instance=inst, t=float(t), r=int(r), stage_list=stages_for_order(p))


def _group_eigh(op: PauliSum):
    if not op.is_hermitian():
        raise ValidationError("group Hamiltonian has complex coefficients")
    w, v = np.linalg.eigh(op.dense())
    return w, v


def pf_unitary_dense(plan: EvolutionPlan) -> np.ndarray:
    """Dense matrix of the full r-segment formula (small n only)."""
    n = plan.instance.n
    if n > DENSE_QUBIT_CAP:
        raise CapabilityError(f"dense formula capped at {DENSE_QUBIT_CAP} qubits, got {n}")
    d = 1 << n
    eighs = [_group_eigh(op) for _, op in plan.instance.groups]
    tau = plan.t / plan.r
    seg = np.eye(d, dtype=complex)
    for a, direction in plan.stage_list.stages:
        indices = range(len(eighs))
        if direction == REVERSE:
            indices = reversed(list(indices))
        for g in indices:
            w, v = eighs[g]
            gate = (v * np.exp(-1j * a * tau * w)) @ v.conj().T
            seg = seg @ gate
    return np.linalg.matrix_power(seg, plan.r)


def apply_local_gate(
    gate: np.ndarray, support: tuple[int, ...], psi: np.ndarray, n: int
) -> np.ndarray:
    """Apply a 2^k x 2^k gate on the given qubits to (d,) or (d, batch)."""
    k = len(support)
    lo = support[0]
    if support == tuple(range(lo, lo + k)) and psi.flags.c_contiguous:
        # A contiguous bit run is a single axis of the row-major state, so
        # a reshape view plus one batched matmul avoids the copies below.
        high = 1 << (n - lo - k)
        rest = (psi.shape[1] if psi.ndim == 2 else 1) << lo
        out = gate @ psi.reshape(high, 1 << k, rest)
        return out.reshape(psi.shape)
    batch = psi.ndim == 2
    shape = (2,) * n + ((psi.shape[1],) if batch else ())
    tensor = psi.reshape(shape)
    # axis n-1-q carries qubit q; the block index has support[0] as its
    # least significant bit, so the moved axes run high bit to low bit
    move = [n - 1 - q for q in reversed(support)]
    tensor = np.moveaxis(tensor, move, range(k))
    tail = tensor.shape[k:]
    flat = tensor.reshape(1 << k, -1)
    out = (gate @ flat).reshape((2,) * k + tail)
    out = np.moveaxis(out, range(k), move)
    return np.ascontiguousarray(out.reshape(psi.shape))


class _PhasePropagator:
    """Group whose strings share one Pauli axis per qubit: diagonalize once."""

    def __init__(self, op: PauliSum, n: int, axes: dict[int, tuple[int, int]]):
        self.n = n
        self.changes = []
        for q, axis in sorted(axes.items()):
            w = _AXIS_CHANGE[axis]
            if w is not None:
                self.changes.append((q, w, w.conj().T))
        d = 1 << n
        idx = np.arange(d, dtype=np.uint64)
        phi = np.zeros(d)
        for (x, z), c in op.terms.items():
            if abs(c.imag) > 1e-12:
                raise ValidationError("group Hamiltonian has complex coefficients")
            mask = np.uint64(x | z)
            signs = 1.0 - 2.0 * (np.bitwise_count(idx & mask).astype(np.int64) & 1)
            phi += c.real * signs
        self.phases = phi
        self._cache: dict[float, np.ndarray] = {}

    def apply(self, tau: float, psi: np.ndarray) -> np.ndarray:
        rot = self._cache.get(tau)
        if rot is None:
            rot = np.exp(-1j * tau * self.phases)
            self._cache[tau] = rot
        for q, w, _ in self.changes:
            psi = apply_local_gate(w, (q,), psi, self.n)
        psi = psi * (rot if psi.ndim == 1 else rot[:, None])
        for q, _, wd in self.changes:
            psi = apply_local_gate(wd, (q,), psi, self.n)
        return psi


class _BlockPropagator:
    """Group split into disjoint-support components, each a dense block."""

    def __init__(self, op: PauliSum, n: int):
        self.n = n
        self.blocks = []  # (support, eigvals, eigvecs)
        self.identity_coeff = 0.0
        for comp in support_components(op):
            if not comp.is_hermitian():
                raise ValidationError("group Hamiltonian has complex coefficients")
            sup = tuple(sorted({q for key in comp.terms for q in
                                _occupied(key, n)}))
            if not sup:
                self.identity_coeff += comp.normalized_trace().real
                continue
            if len(sup) > LOCAL_BLOCK_CAP:
                raise CapabilityError(
                    f"group has a connected non-axis component on {len(sup)} "
                    f"qubits, above the local block cap {LOCAL_BLOCK_CAP}"
                )
            small = restrict_to_support(comp, sup)
            w, v = np.linalg.eigh(small.dense())
            self.blocks.append((sup, w, v))
        self.blocks.sort(key=lambda b: b[0])
        self._fusion = _fusion_runs([sup for sup, _, _ in self.blocks])
        self._cache: dict[float, list] = {}

    def apply(self, tau: float, psi: np.ndarray) -> np.ndarray:
        gates = self._cache.get(tau)
        if gates is None:
            per = [
                (sup, (v * np.exp(-1j * tau * w)) @ v.conj().T)
                for sup, w, v in self.blocks
            ]
            gates = []
            for run in self._fusion:
                sup, gate = per[run[0]]
                for idx in run[1:]:
                    nxt_sup, nxt_gate = per[idx]
                    # the later block holds the higher bits of the fused index
                    gate = np.kron(nxt_gate, gate)
                    sup = sup + nxt_sup
                gates.append((sup, gate))
            if self.identity_coeff:
                gates.append((None, np.exp(-1j * tau * self.identity_coeff)))
            self._cache[tau] = gates
        for sup, gate in gates:
            if sup is None:
                psi = psi * gate
            else:
                psi = apply_local_gate(gate, sup, psi, self.n)
        return psi


_FUSION_QUBITS = 4


def _fusion_runs(supports: list[tuple[int, ...]]) -> list[list[int]]:
    """Group sorted disjoint supports into contiguous runs worth one pass.

    Blocks inside a group commute, so any bundling preserves the product.
    Runs are capped so fused gates stay small enough that the batched
    matmul is still bandwidth bound rather than compute bound.
    """
    runs: list[list[int]] = []
    i = 0
    while i < len(supports):
        run = [i]
        sup = supports[i]
        while sup == tuple(range(sup[0], sup[0] + len(sup))):
            j = run[-1] + 1
            if j >= len(supports):
                break
            nxt = supports[j]
            if nxt[0] != sup[-1] + 1 or len(sup) + len(nxt) > _FUSION_QUBITS:
                break
            if nxt != tuple(range(nxt[0], nxt[0] + len(nxt))):
                break
            run.append(j)
            sup = sup + nxt
        runs.append(run)
        i = run[-1] + 1
    return runs


def _occupied(key: tuple[int, int], n: int):
    occ = key[0] | key[1]
    return [q for q in range(n) if (occ >> q) & 1]


def _uniform_axes(op: PauliSum, n: int):
    """Per-qubit Pauli axis if consistent across all strings, else None."""
    axes: dict[int, tuple[int, int]] = {}
    for (x, z) in op.terms:
        occ = x | z
        q = 0
        while occ >> q:
            if (occ >> q) & 1:
                a = ((x >> q) & 1, (z >> q) & 1)
                if axes.setdefault(q, a) != a:
                    return None
            q += 1
    return axes


def group_propagator(op: PauliSum, n: int):
    axes = _uniform_axes(op, n)
    if axes is not None:
        return _PhasePropagator(op, n, axes)
    return _BlockPropagator(op, n)


class SegmentApplier:
    """Applies segments of a plan to state vectors, matrix-free.

    Builds one propagator per group, then flattens the stage list into the
    order gates actually act on a state (stages backwards, groups backwards
    inside forward stages).
    """

    def __init__(self, plan: EvolutionPlan):
        self.plan = plan
        props = [group_propagator(op, plan.instance.n) for _, op in plan.instance.groups]
        tau = plan.t / plan.r
        self.ops = []
        for a, direction in reversed(plan.stage_list.stages):
            ordered = props[::-1] if direction == FORWARD else props
            for prop in ordered:
                self.ops.append((prop, a * tau))

    def __call__(self, psi: np.ndarray, segments: int | None = None) -> np.ndarray:
        reps = self.plan.r if segments is None else segments
        psi = np.asarray(psi, dtype=complex)
        for _ in range(reps):
            for prop, tau in self.ops:
                psi = prop.apply(tau, psi)
        return psi


def pf_apply(plan: EvolutionPlan, psi: np.ndarray) -> np.ndarray:
    """U_p^r(t/r) applied to psi without building any d x d matrix."""
    return SegmentApplier(plan)(psi)
