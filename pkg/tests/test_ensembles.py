"""Random-state ensembles and empirical error statistics."""

import numpy as np
import pytest

from trotterkit import ensembles, evolution, formulas, models, rng
from trotterkit.errors import ArgumentError


def _heisenberg_pair(n, t, r, p=1, seed=3):
    inst = models.build_heisenberg_1d(n, seed=seed)
    plan = formulas.make_plan(inst, t, r, p)
    u = formulas.pf_unitary_dense(plan)
    u0 = evolution.exact_unitary_dense(inst, t)
    return u, u0


def _multiplicative_error(u, u0):
    return u0.conj().T @ u - np.eye(u.shape[0])


def _matmul(mat):
    return lambda psi: mat @ psi


class TestSampling:
    @pytest.mark.parametrize("kind", ensembles.KINDS)
    def test_unit_norm_columns(self, kind):
        gen = rng.generator(7, "unit-norm", kind)
        states = ensembles.sample_states(3, kind, gen, 50)
        assert states.shape == (8, 50)
        norms = np.linalg.norm(states, axis=0)
        assert np.max(np.abs(norms - 1.0)) < 1e-12

    def test_computational_basis_is_one_hot(self):
        gen = rng.generator(1, "one-hot")
        states = ensembles.sample_states(3, ensembles.COMPUTATIONAL_BASIS, gen, 40)
        hits = np.abs(states) > 0
        assert np.all(hits.sum(axis=0) == 1)
        assert np.allclose(states[hits], 1.0)
        # With 40 draws over 8 outcomes, more than one index should appear.
        assert len(set(np.argmax(hits, axis=0))) > 1

    def test_local_haar_states_are_products(self):
        gen = rng.generator(2, "product-check")
        states = ensembles.sample_states(2, ensembles.LOCAL_HAAR, gen, 25)
        for col in states.T:
            # A two-qubit product state has a rank-1 amplitude matrix.
            # Index convention: qubit 0 is the low bit, so reshaping to
            # (high, low) = (qubit 1, qubit 0) preserves the product split.
            sv = np.linalg.svd(col.reshape(2, 2), compute_uv=False)
            assert sv[0] == pytest.approx(1.0, abs=1e-12)
            assert sv[1] < 1e-12

    def test_haar_first_moment_is_maximally_mixed(self):
        # One-design check: the average projector over many Haar samples
        # approaches I/d.  |psi_i|^2 is Beta(1, d-1) distributed, so the
        # diagonal estimator's standard error is sqrt((d-1)/(d^2(d+1)N)).
        n, d, count = 3, 8, 10_000
        gen = rng.generator(11, "moment")
        states = ensembles.sample_states(n, ensembles.HAAR, gen, count)
        avg = (states @ states.conj().T) / count
        sigma = np.sqrt((d - 1) / (d**2 * (d + 1) * count))
        diag = np.diag(avg).real
        assert np.max(np.abs(diag - 1 / d)) < 3.5 * sigma
        off = avg - np.diag(np.diag(avg))
        # Off-diagonal entries have comparable fluctuation scale.
        assert np.max(np.abs(off)) < 4 * sigma

    def test_sampling_argument_errors(self):
        gen = rng.generator(0)
        with pytest.raises(ArgumentError):
            ensembles.sample_states(0, ensembles.HAAR, gen, 5)
        with pytest.raises(ArgumentError):
            ensembles.sample_states(2, ensembles.HAAR, gen, 0)
        with pytest.raises(ArgumentError):
            ensembles.sample_states(2, "uniform", gen, 5)

    def test_sample_state_is_flat(self):
        gen = rng.generator(1)
        assert ensembles.sample_state(4, ensembles.HAAR, gen).shape == (16,)


class TestEmpiricalError:
    def test_identical_evolutions_give_zero(self):
        u, _ = _heisenberg_pair(3, 1.0, 4)
        stats = ensembles.empirical_error(_matmul(u), _matmul(u), 3, samples=10, seed=5)
        assert stats.mean_S == 0.0
        assert stats.mean_sqrtS == 0.0
        assert stats.var_S == 0.0

    def test_opposite_sign_evolutions(self):
        # U = -U0 gives S = ||2 psi||^2 = 4 for every input.
        _, u0 = _heisenberg_pair(3, 1.0, 4)
        stats = ensembles.empirical_error(
            _matmul(-u0), _matmul(u0), 3, samples=30, seed=6)
        assert stats.mean_sqrtS == pytest.approx(2.0, abs=1e-12)
        assert stats.mean_S == pytest.approx(4.0, abs=1e-12)
        assert stats.var_S == pytest.approx(0.0, abs=1e-12)
        assert stats.std_sqrtS == pytest.approx(0.0, abs=1e-12)

    def test_mean_matches_trace_formula(self):
        # E[S] = Tr(M M^dag)/d over any ensemble with first moment I/d.
        n, t, r = 4, 1.0, 10
        u, u0 = _heisenberg_pair(n, t, r)
        m = _multiplicative_error(u, u0)
        expected = np.einsum("ij,ij->", m.conj(), m).real / 2**n
        stats = ensembles.empirical_error(
            _matmul(u), _matmul(u0), n, samples=600, seed=17)
        se = np.sqrt(stats.var_S / stats.samples)
        assert abs(stats.mean_S - expected) <= 4 * se + 1e-12

    def test_variance_law(self):
        # Var[S] <= 4 Tr(M M^dag) / (d (d+1)) for Haar inputs; allow 1.5x
        # headroom for estimator noise at this sample size.
        n, t, r = 4, 1.0, 10
        d = 2**n
        u, u0 = _heisenberg_pair(n, t, r)
        m = _multiplicative_error(u, u0)
        frob_sq = np.einsum("ij,ij->", m.conj(), m).real
        bound = 4 * frob_sq / (d * (d + 1))
        stats = ensembles.empirical_error(
            _matmul(u), _matmul(u0), n, samples=600, seed=23)
        assert stats.var_S <= 1.5 * bound + 1e-12

    def test_kinds_agree_on_the_mean(self):
        n, t, r = 4, 1.0, 8
        u, u0 = _heisenberg_pair(n, t, r)
        results = {
            kind: ensembles.empirical_error(
                _matmul(u), _matmul(u0), n, kind=kind, samples=500, seed=29)
            for kind in ensembles.KINDS
        }
        pairs = [(ensembles.HAAR, ensembles.LOCAL_HAAR),
                 (ensembles.HAAR, ensembles.COMPUTATIONAL_BASIS),
                 (ensembles.LOCAL_HAAR, ensembles.COMPUTATIONAL_BASIS)]
        for a, b in pairs:
            sa, sb = results[a], results[b]
            se = np.sqrt(sa.var_S / sa.samples + sb.var_S / sb.samples)
            assert abs(sa.mean_S - sb.mean_S) <= 4 * se + 1e-12

    def test_jensen_inequality(self):
        u, u0 = _heisenberg_pair(4, 1.5, 6)
        stats = ensembles.empirical_error(
            _matmul(u), _matmul(u0), 4, samples=200, seed=31)
        assert stats.mean_sqrtS <= np.sqrt(stats.mean_S) + 1e-12

    def test_deterministic_in_seed(self):
        u, u0 = _heisenberg_pair(3, 1.0, 5)
        a = ensembles.empirical_error(_matmul(u), _matmul(u0), 3, samples=40, seed=9)
        b = ensembles.empirical_error(_matmul(u), _matmul(u0), 3, samples=40, seed=9)
        c = ensembles.empirical_error(_matmul(u), _matmul(u0), 3, samples=40, seed=10)
        assert a == b
        assert a.mean_S != c.mean_S

    def test_chunked_batches_cover_all_samples(self, monkeypatch):
        monkeypatch.setattr(ensembles, "_CHUNK_ENTRIES", 16)
        u, u0 = _heisenberg_pair(3, 1.0, 5)
        stats = ensembles.empirical_error(
            _matmul(u), _matmul(u0), 3, samples=50, seed=12)
        assert stats.samples == 50
        assert stats.mean_S > 0

    def test_matrix_free_appliers_match_dense(self):
        n, t, r = 4, 1.0, 6
        inst = models.build_heisenberg_1d(n, seed=3)
        plan = formulas.make_plan(inst, t, r, 2)
        u = formulas.pf_unitary_dense(plan)
        u0 = evolution.exact_unitary_dense(inst, t)
        apply_pf = formulas.SegmentApplier(plan)
        evolver = evolution.ExactEvolver(inst)
        dense = ensembles.empirical_error(
            _matmul(u), _matmul(u0), n, samples=25, seed=41)
        free = ensembles.empirical_error(
            apply_pf, lambda psi: evolver.evolve(psi, t), n, samples=25, seed=41)
        assert dense.mean_S == pytest.approx(free.mean_S, rel=1e-9, abs=1e-13)
        assert dense.mean_sqrtS == pytest.approx(free.mean_sqrtS, rel=1e-9, abs=1e-13)

    def test_sample_count_validation(self):
        u, u0 = _heisenberg_pair(3, 1.0, 5)
        with pytest.raises(ArgumentError):
            ensembles.empirical_error(_matmul(u), _matmul(u0), 3, samples=0)
        single = ensembles.empirical_error(_matmul(u), _matmul(u0), 3, samples=1)
        assert single.var_S == 0.0
        assert single.std_sqrtS == 0.0


class TestSubsystemError:
    def test_mean_matches_restricted_trace(self):
        # Fixing the low k qubits to |0...0> restricts the column average of
        # ||M psi||^2 to columns whose low k bits vanish.
        n, t, r, k = 5, 1.0, 8, 2
        u, u0 = _heisenberg_pair(n, t, r)
        m = _multiplicative_error(u, u0)
        cols = np.arange(2 ** (n - k)) << k
        block = m[:, cols]
        d1 = 2 ** (n - k)
        expected = np.einsum("ij,ij->", block.conj(), block).real / d1
        stats = ensembles.empirical_subsystem_error(
            _matmul(u), _matmul(u0), n, fixed=k, samples=600, seed=51)
        se = np.sqrt(stats.var_S / stats.samples)
        assert abs(stats.mean_S - expected) <= 4 * se + 1e-12

    def test_root_error_respects_frobenius_bound(self):
        n, t, r = 5, 1.0, 8
        u, u0 = _heisenberg_pair(n, t, r)
        m = _multiplicative_error(u, u0)
        frob = np.linalg.norm(m)
        for k in (1, 2):
            d1 = 2 ** (n - k)
            stats = ensembles.empirical_subsystem_error(
                _matmul(u), _matmul(u0), n, fixed=k, samples=400, seed=53 + k)
            se = stats.std_sqrtS / np.sqrt(stats.samples)
            assert stats.mean_sqrtS <= frob / np.sqrt(d1) + 4 * se

    def test_fixed_zero_delegates_to_haar(self):
        u, u0 = _heisenberg_pair(4, 1.0, 6)
        sub = ensembles.empirical_subsystem_error(
            _matmul(u), _matmul(u0), 4, fixed=0, samples=30, seed=8)
        full = ensembles.empirical_error(
            _matmul(u), _matmul(u0), 4, kind=ensembles.HAAR, samples=30, seed=8)
        assert sub == full

    def test_fixed_register_validation(self):
        u, u0 = _heisenberg_pair(3, 1.0, 5)
        for bad in (-1, 3, 4):
            with pytest.raises(ArgumentError):
                ensembles.empirical_subsystem_error(
                    _matmul(u), _matmul(u0), 3, fixed=bad, samples=5)

    def test_fixed_qubits_remain_zero(self):
        captured = {}

        def capture(psi):
            captured["states"] = np.array(psi)
            return psi

        ensembles.empirical_subsystem_error(
            capture, lambda psi: psi, 4, fixed=2, samples=6, seed=2)
        states = captured["states"]
        mask = np.ones(16, dtype=bool)
        mask[np.arange(4) << 2] = False
        assert np.all(states[mask, :] == 0)
        assert np.max(np.abs(np.linalg.norm(states, axis=0) - 1)) < 1e-12
