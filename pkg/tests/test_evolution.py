"""Reference evolution: dense eigendecomposition and Lanczos agreement."""

import numpy as np
import pytest
from scipy.linalg import expm

from oracles import dense_of, haar_state
from trotterkit.errors import (
    ArgumentError,
    CapabilityError,
    ConvergenceError,
    ValidationError,
)
from trotterkit.evolution import ExactEvolver, exact_unitary_dense
from trotterkit.models import build_heisenberg_1d, custom_instance
from trotterkit.pauli import PauliSum
from trotterkit.rng import generator


def test_zero_time_returns_state():
    ev = ExactEvolver(build_heisenberg_1d(3, 0))
    psi = haar_state(generator(0, "ev-zero"), 8)
    assert np.array_equal(ev.evolve(psi, 0.0), psi)


def test_z_eigenstate_picks_up_phase():
    inst = custom_instance(2, [("z", PauliSum.from_strings(2, [(1.0, "ZI")]))])
    psi = np.zeros(4, dtype=complex)
    psi[0] = 1.0
    for mode in ("dense_eig", "krylov"):
        out = ExactEvolver(inst, mode=mode).evolve(psi, 0.8)
        assert abs(out[0] - np.exp(-1j * 0.8)) < 1e-10
        assert np.linalg.norm(out[1:]) < 1e-12


def test_krylov_matches_dense_heisenberg():
    inst = build_heisenberg_1d(6, seed=1)
    psi = haar_state(generator(1, "ev-kry"), 64)
    dense = ExactEvolver(inst, mode="dense_eig").evolve(psi, 6.0)
    kry = ExactEvolver(inst, mode="krylov").evolve(psi, 6.0)
    assert np.linalg.norm(dense - kry) < 1e-8


def test_krylov_batch_and_longer_chain():
    inst = build_heisenberg_1d(9, seed=2)
    batch = haar_state(generator(2, "ev-batch"), 512, 3)
    dense = ExactEvolver(inst, mode="dense_eig").evolve(batch, 3.0)
    kry = ExactEvolver(inst, mode="krylov").evolve(batch, 3.0)
    assert np.linalg.norm(dense - kry) < 1e-8


@pytest.mark.parametrize("mode", ["dense_eig", "krylov"])
def test_composition_property(mode):
    inst = build_heisenberg_1d(5, seed=3)
    ev = ExactEvolver(inst, mode=mode)
    psi = haar_state(generator(3, "ev-comp"), 32)
    two_step = ev.evolve(ev.evolve(psi, 0.7), 1.1)
    one_step = ev.evolve(psi, 1.8)
    assert np.linalg.norm(two_step - one_step) < 1e-8


@pytest.mark.parametrize("mode", ["dense_eig", "krylov"])
def test_norm_preservation(mode):
    inst = build_heisenberg_1d(6, seed=4)
    ev = ExactEvolver(inst, mode=mode)
    psi = haar_state(generator(4, "ev-norm"), 64)
    out = ev.evolve(psi, 5.0)
    assert abs(np.linalg.norm(out) - 1.0) < 1e-9


def test_energy_conserved_along_krylov_evolution():
    inst = build_heisenberg_1d(6, seed=5)
    total = inst.total()
    ev = ExactEvolver(inst, mode="krylov")
    psi = haar_state(generator(5, "ev-energy"), 64)
    e0 = np.vdot(psi, total.apply_to_state(psi)).real
    for t in (0.5, 2.0, 7.0):
        out = ev.evolve(psi, t)
        e1 = np.vdot(out, total.apply_to_state(out)).real
        assert abs(e1 - e0) < 1e-8 * max(abs(e0), 1.0)


def test_unitary_group_law_and_bond_eigenphases():
    inst = build_heisenberg_1d(3, seed=6)
    t = 1.4
    u = exact_unitary_dense(inst, t)
    v = exact_unitary_dense(inst, -t)
    assert np.linalg.norm(u @ v - np.eye(8), 2) < 1e-10

    bond = custom_instance(
        2, [("b", PauliSum.from_strings(2, [(1.0, "XX"), (1.0, "YY"), (1.0, "ZZ")]))]
    )
    w = exact_unitary_dense(bond, t)
    phases = np.sort_complex(np.linalg.eigvals(w))
    expected = np.sort_complex(
        np.array([np.exp(-1j * t)] * 3 + [np.exp(3j * t)])
    )
    assert np.allclose(phases, expected, atol=1e-10)


def test_exact_unitary_matches_expm():
    inst = build_heisenberg_1d(4, seed=7)
    u = exact_unitary_dense(inst, 2.2)
    assert np.allclose(u, expm(-2.2j * dense_of(inst.total())), atol=1e-10)


def test_dense_cap_and_argument_errors():
    inst = build_heisenberg_1d(4, seed=8)
    with pytest.raises(CapabilityError):
        ExactEvolver(build_heisenberg_1d(13, 0), mode="dense_eig")
    with pytest.raises(ArgumentError):
        ExactEvolver(inst, mode="qr")
    with pytest.raises(ArgumentError):
        ExactEvolver(inst, tolerance=0.0)
    ev = ExactEvolver(inst)
    with pytest.raises(ArgumentError):
        ev.evolve(np.zeros(7, dtype=complex), 1.0)


def test_non_hermitian_rejected():
    bad = custom_instance(2, [("g", PauliSum.from_strings(2, [(1j, "XY")]))])
    with pytest.raises(ValidationError):
        ExactEvolver(bad)
    with pytest.raises(ValidationError):
        exact_unitary_dense(bad, 1.0)


def test_impossible_tolerance_raises_convergence_error():
    inst = build_heisenberg_1d(5, seed=9)
    ev = ExactEvolver(inst, mode="krylov", tolerance=1e-300)
    psi = haar_state(generator(6, "ev-conv"), 32)
    with pytest.raises(ConvergenceError):
        ev.evolve(psi, 4.0)


def test_auto_mode_picks_by_size():
    assert ExactEvolver(build_heisenberg_1d(4, 0)).mode == "dense_eig"
    assert ExactEvolver(build_heisenberg_1d(13, 0)).mode == "krylov"
