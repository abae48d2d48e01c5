"""Stage lists and product-formula application against dense oracles."""

import numpy as np
import pytest
from scipy.linalg import expm

from oracles import dense_of, haar_state
from trotterkit.errors import ArgumentError, CapabilityError
from trotterkit.formulas import (
    FORWARD,
    REVERSE,
    EvolutionPlan,
    SegmentApplier,
    StageList,
    apply_local_gate,
    make_plan,
    pf_apply,
    pf_unitary_dense,
    stages_for_order,
    suzuki_stages,
)
from trotterkit.models import (
    build_heisenberg_1d,
    build_k_local_random,
    build_power_law,
    custom_instance,
)
from trotterkit.pauli import PauliString, PauliSum
from trotterkit.rng import generator

P2 = 0.4144907717943757  # 1 / (4 - 4^(1/3))


def test_second_order_stage_list():
    sl = suzuki_stages(1)
    assert sl.order == 2
    assert sl.stages == ((0.5, FORWARD), (0.5, REVERSE))


def test_fourth_order_stage_list_structure():
    sl = suzuki_stages(2)
    assert sl.order == 4 and sl.stage_count == 10
    coeffs = [a for a, _ in sl.stages]
    dirs = [d for _, d in sl.stages]
    assert dirs == [FORWARD, REVERSE] * 5
    for i in (0, 1, 2, 3, 6, 7, 8, 9):
        assert abs(coeffs[i] - P2 / 2) < 1e-15
    for i in (4, 5):
        assert abs(coeffs[i] - (1 - 4 * P2) / 2) < 1e-15


@pytest.mark.parametrize("k", [1, 2, 3])
def test_stage_coefficients_sum_to_one(k):
    sl = suzuki_stages(k)
    assert sl.stage_count == 2 * 5 ** (k - 1)
    assert abs(sum(a for a, _ in sl.stages) - 1.0) < 1e-14


def test_stages_for_order_dispatch():
    assert stages_for_order(1).stages == ((1.0, FORWARD),)
    assert stages_for_order(2) == suzuki_stages(1)
    assert stages_for_order(4) == suzuki_stages(2)
    for bad in (0, 3, 5, -2):
        with pytest.raises(ArgumentError):
            stages_for_order(bad)
    with pytest.raises(ArgumentError):
        suzuki_stages(0)


def test_stage_list_validation():
    with pytest.raises(ArgumentError):
        StageList(order=1, stages=((0.7, FORWARD),))
    with pytest.raises(ArgumentError):
        StageList(order=1, stages=((1.0, "sideways"),))
    with pytest.raises(ArgumentError):
        EvolutionPlan(build_heisenberg_1d(2, 0), 1.0, 0, stages_for_order(1))


def test_dense_formula_at_zero_time_is_identity():
    plan = make_plan(build_heisenberg_1d(3, 0), t=0.0, r=2, p=2)
    assert np.allclose(pf_unitary_dense(plan), np.eye(8), atol=1e-14)


def test_single_group_has_no_splitting_error():
    inst = build_heisenberg_1d(3, seed=1)
    merged = custom_instance(3, [("all", inst.total())])
    exact = expm(-1j * 0.7 * dense_of(inst.total()))
    for p in (1, 2, 4):
        u = pf_unitary_dense(make_plan(merged, t=0.7, r=3, p=p))
        assert np.allclose(u, exact, atol=1e-10)


def test_commuting_groups_match_exact():
    n = 4
    za = PauliSum.from_strings(n, [(0.3, "ZZII"), (0.7, "ZIII")])
    zb = PauliSum.from_strings(n, [(-0.4, "IZZI"), (0.2, "IIZZ")])
    inst = custom_instance(n, [("a", za), ("b", zb)])
    exact = expm(-1j * 1.3 * dense_of(za + zb))
    u = pf_unitary_dense(make_plan(inst, t=1.3, r=1, p=1))
    assert np.allclose(u, exact, atol=1e-10)


@pytest.mark.parametrize("p", [1, 2, 4])
@pytest.mark.parametrize("r", [1, 3])
def test_dense_formula_is_unitary(p, r):
    for inst in (build_heisenberg_1d(4, 2), build_power_law(3, 1.0, 2)):
        u = pf_unitary_dense(make_plan(inst, t=1.1, r=r, p=p))
        assert np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]), 2) < 1e-10


def test_first_order_ordering_is_left_to_right():
    # U_1 = e^{-iAt} e^{-iBt} for groups listed (A, B)
    inst = build_heisenberg_1d(3, seed=5)
    a = dense_of(inst.group("A"))
    b = dense_of(inst.group("B"))
    t = 0.9
    expected = expm(-1j * t * a) @ expm(-1j * t * b)
    u = pf_unitary_dense(make_plan(inst, t=t, r=1, p=1))
    assert np.allclose(u, expected, atol=1e-12)


def test_second_order_is_symmetric_strang():
    inst = build_heisenberg_1d(3, seed=5)
    a = dense_of(inst.group("A"))
    b = dense_of(inst.group("B"))
    t = 0.9
    expected = (
        expm(-1j * t / 2 * a) @ expm(-1j * t / 2 * b)
        @ expm(-1j * t / 2 * b) @ expm(-1j * t / 2 * a)
    )
    u = pf_unitary_dense(make_plan(inst, t=t, r=1, p=2))
    assert np.allclose(u, expected, atol=1e-12)


def test_apply_local_gate_matches_kron():
    gen = generator(0, "test-local-gate")
    n = 4
    d = 16
    gate = gen.normal(size=(4, 4)) + 1j * gen.normal(size=(4, 4))
    psi = haar_state(gen, d, 3)
    # embed on qubits (1, 3): full = sum over the 4x4 entries of projectors
    full = np.zeros((d, d), dtype=complex)
    for b in range(d):
        blk = ((b >> 1) & 1) | (((b >> 3) & 1) << 1)
        for blk2 in range(4):
            b2 = (b & ~((1 << 1) | (1 << 3))) | ((blk2 & 1) << 1) | (((blk2 >> 1) & 1) << 3)
            full[b2, b] += gate[blk2, blk]
    got = apply_local_gate(gate, (1, 3), psi, n)
    assert np.allclose(got, full @ psi, atol=1e-12)


@pytest.mark.parametrize(
    "inst",
    [
        build_heisenberg_1d(6, seed=7),
        build_power_law(5, 1.0, seed=8),
        build_k_local_random(5, 3, 2, seed=9),
    ],
    ids=["heisenberg", "power_law", "k_local"],
)
@pytest.mark.parametrize("p", [1, 2, 4])
def test_matrix_free_apply_matches_dense(inst, p):
    plan = make_plan(inst, t=0.8, r=3, p=p)
    u = pf_unitary_dense(plan)
    gen = generator(11, "test-apply-dense", inst.n, p)
    psi = haar_state(gen, 1 << inst.n)
    assert np.allclose(pf_apply(plan, psi), u @ psi, atol=1e-10)
    batch = haar_state(gen, 1 << inst.n, 5)
    assert np.allclose(pf_apply(plan, batch), u @ batch, atol=1e-10)


def test_norm_preserved_over_many_segments():
    inst = build_heisenberg_1d(6, seed=12)
    plan = make_plan(inst, t=3.0, r=1000, p=2)
    psi = haar_state(generator(13, "test-norm"), 64)
    out = pf_apply(plan, psi)
    assert abs(np.linalg.norm(out) - 1.0) < 1e-9


def test_second_order_error_shrinks_four_fold():
    inst = build_heisenberg_1d(6, seed=14)
    exact = expm(-1j * 1.0 * dense_of(inst.total()))
    psi = haar_state(generator(15, "test-order2"), 64)
    ref = exact @ psi
    errs = []
    for r in (8, 16):
        out = pf_apply(make_plan(inst, t=1.0, r=r, p=2), psi)
        errs.append(np.linalg.norm(out - ref))
    ratio = errs[0] / errs[1]
    assert 3.5 < ratio < 4.5


@pytest.mark.parametrize("p,slope_target", [(1, 2.0), (2, 3.0), (4, 5.0)])
def test_single_segment_error_order(p, slope_target):
    inst = build_heisenberg_1d(4, seed=16)
    hd = dense_of(inst.total())
    ts = np.geomspace(1e-3, 1e-1, 9)
    dists = []
    for t in ts:
        u = pf_unitary_dense(make_plan(inst, t=float(t), r=1, p=p))
        dists.append(np.linalg.norm(u - expm(-1j * t * hd), 2))
    pts = [(np.log(t), np.log(e)) for t, e in zip(ts, dists) if 1e-12 < e < 0.5]
    assert len(pts) >= 4
    xs, ys = np.array([p0 for p0, _ in pts]), np.array([p1 for _, p1 in pts])
    slope = np.polyfit(xs, ys, 1)[0]
    assert abs(slope - slope_target) < 0.15


def test_phase_diagonal_path_is_used_and_correct():
    # Power-law groups are axis-uniform, so they take the diagonal route;
    # compare one group exponential against scipy on a non-trivial support.
    from trotterkit.formulas import _PhasePropagator, group_propagator

    inst = build_power_law(5, 2.0, seed=17)
    op = inst.group("Y")
    prop = group_propagator(op, 5)
    assert isinstance(prop, _PhasePropagator)
    psi = haar_state(generator(18, "test-phase"), 32)
    expected = expm(-1j * 0.37 * dense_of(op)) @ psi
    assert np.allclose(prop.apply(0.37, psi), expected, atol=1e-10)


def test_block_path_handles_identity_terms():
    n = 3
    op = PauliSum.from_strings(
        n, [(0.4, "XXI"), (0.2, "ZII"), (0.9, "III")]
    )
    inst = custom_instance(n, [("g", op)])
    plan = make_plan(inst, t=1.2, r=1, p=1)
    psi = haar_state(generator(19, "test-ident"), 8)
    expected = expm(-1j * 1.2 * dense_of(op)) @ psi
    assert np.allclose(pf_apply(plan, psi), expected, atol=1e-10)


def test_oversized_connected_group_is_refused():
    n = 13
    pairs = []
    for q in range(n - 1):
        m = (1 << q) | (1 << (q + 1))
        pairs.append((1.0, PauliString(n, m, 0)))
        pairs.append((0.5, PauliString(n, 0, m)))
    inst = custom_instance(n, [("wide", PauliSum.from_strings(n, pairs))])
    plan = make_plan(inst, t=0.1, r=1, p=1)
    with pytest.raises(CapabilityError):
        SegmentApplier(plan)
    with pytest.raises(CapabilityError):
        pf_unitary_dense(plan)
