import numpy as np
import pytest

from conftest import brute_force_amplitudes

from ucrbm.errors import SizeCapError
from ucrbm.rbm import (
    RbmParams,
    VariationalIndex,
    exact_statevector,
    log_amplitude,
    log_amplitude_batch,
    log_derivatives,
    r_factor,
    random_init,
)
from ucrbm.spins import all_spin_configs, index_to_spins, spins_to_index


def zero_params(n, m, unitary=True):
    return RbmParams(
        b=np.zeros(n, complex),
        m=np.zeros(m, complex),
        w=np.zeros((n, m), complex),
        unitary_coupled=unitary,
    )


class TestRandomInit:
    def test_zero_stddev_gives_zero_parameters(self):
        p = random_init(3, 2, 0.0, 0, True)
        assert np.all(p.b == 0) and np.all(p.m == 0) and np.all(p.w == 0)

    def test_same_seed_is_bit_identical(self):
        a = random_init(4, 3, 0.1, 123, False)
        b = random_init(4, 3, 0.1, 123, False)
        assert np.array_equal(a.b, b.b)
        assert np.array_equal(a.m, b.m)
        assert np.array_equal(a.w, b.w)

    def test_slot_variance_matches_target(self):
        # variance 0.01 per independent real slot, estimated over many seeds
        index = VariationalIndex(2, 2, True)
        draws = np.empty((10_000, index.size))
        for seed in range(draws.shape[0]):
            draws[seed] = index.flatten(random_init(2, 2, 0.1, seed, True))
        variances = draws.var(axis=0)
        assert np.all(np.abs(variances - 0.01) < 6e-4)
        assert np.abs(draws.mean(axis=0)).max() < 5e-3

    def test_unrestricted_populates_real_couplings(self):
        for seed in range(100):
            p = random_init(4, 4, 0.1, seed, False)
            assert np.all(p.w.real != 0.0)

    def test_unitary_flag_zeroes_real_couplings(self):
        for seed in range(100):
            p = random_init(4, 4, 0.1, seed, True)
            assert np.max(np.abs(p.w.real)) == 0.0
            assert np.any(p.w.imag != 0.0)

    def test_rejects_negative_stddev(self):
        with pytest.raises(ValueError):
            random_init(2, 2, -0.1, 0, True)


class TestLogAmplitude:
    def test_zero_parameters_give_zero(self):
        p = zero_params(3, 2)
        for k in range(8):
            assert log_amplitude(p, index_to_spins(k, 3)) == 0.0

    def test_single_visible_bias(self):
        p = RbmParams(np.array([0.3 + 0.2j]), np.zeros(0), np.zeros((1, 0)))
        assert log_amplitude(p, [1]) == pytest.approx(0.3 + 0.2j)
        assert log_amplitude(p, [-1]) == pytest.approx(-0.3 - 0.2j)

    def test_matches_hidden_spin_enumeration(self):
        # normalized closed-form amplitudes equal the normalized brute-force
        # hidden-spin sum entrywise (the 2^M constant cancels)
        for seed in range(10):
            for n, m in ((2, 1), (3, 3), (2, 3), (3, 2)):
                p = random_init(n, m, 0.3, seed, seed % 2 == 0)
                brute = brute_force_amplitudes(p)
                brute = brute / np.linalg.norm(brute)
                lp = log_amplitude_batch(p, all_spin_configs(n).astype(float))
                closed = np.exp(lp)
                closed = closed / np.linalg.norm(closed)
                np.testing.assert_allclose(closed, brute, atol=1e-12)

    def test_full_sweep_at_tight_tolerance(self):
        rng_seeds = range(100)
        for seed in rng_seeds:
            n = 2 + seed % 2
            m = 1 + seed % 3
            p = random_init(n, m, 0.25, seed, False)
            brute = brute_force_amplitudes(p)
            brute = brute / np.linalg.norm(brute)
            closed = np.exp(log_amplitude_batch(p, all_spin_configs(n).astype(float)))
            closed = closed / np.linalg.norm(closed)
            assert np.max(np.abs(closed - brute)) < 1e-12

    def test_overflow_safe_for_large_parameters(self):
        p = RbmParams(
            np.array([400.0 + 1.0j]), np.array([500.0 - 2.0j]), np.array([[300.0 + 0.5j]])
        )
        value = log_amplitude(p, [1])
        assert np.isfinite(value.real) and np.isfinite(value.imag)
        assert value.real == pytest.approx(400.0 + 800.0 - np.log(2.0), rel=1e-12)


class TestExactStatevector:
    def test_uniform_at_zero_parameters(self):
        sv = exact_statevector(zero_params(2, 2))
        np.testing.assert_allclose(sv.amplitudes, np.full(4, 0.5), atol=1e-14)

    def test_single_qubit_bias_ratio(self):
        # amplitudes normalize (e^b, e^{-b}); b = ln(3)/2 gives ratio 3
        p = RbmParams(np.array([0.5 * np.log(3.0)]), np.zeros(0), np.zeros((1, 0)))
        sv = exact_statevector(p)
        np.testing.assert_allclose(
            sv.amplitudes, np.array([3.0, 1.0]) / np.sqrt(10.0), atol=1e-14
        )

    def test_matches_brute_force_construction(self):
        p = random_init(3, 3, 0.3, 5, False)
        brute = brute_force_amplitudes(p)
        brute = brute / np.linalg.norm(brute)
        sv = exact_statevector(p)
        fid = abs(np.vdot(sv.amplitudes, brute))
        assert fid >= 1.0 - 1e-12

    def test_norm_is_one(self):
        for seed in range(5):
            sv = exact_statevector(random_init(4, 4, 0.5, seed, True))
            assert abs(sv.norm - 1.0) < 1e-12

    def test_cap_enforced(self):
        with pytest.raises(SizeCapError):
            exact_statevector(zero_params(5, 0), cap=4)


class TestLogDerivatives:
    def test_zero_parameter_slots(self):
        p = zero_params(2, 2)
        index = VariationalIndex.for_params(p)
        z = np.array([1, -1], dtype=np.int8)
        derivs = log_derivatives(p, z)
        labels = index.labels()
        for i in range(2):
            assert derivs[labels.index(f"b_re[{i}]")] == z[i]
            assert derivs[labels.index(f"m_re[{i}]")] == 0.0  # tanh(0)

    def test_imaginary_slots_are_i_times_real_slots(self):
        p = random_init(3, 2, 0.4, 1, False)
        z = index_to_spins(5, 3)
        derivs = log_derivatives(p, z)
        n, m = 3, 2
        np.testing.assert_allclose(derivs[n : 2 * n], 1j * derivs[:n], atol=1e-15)
        np.testing.assert_allclose(
            derivs[2 * n + m : 2 * n + 2 * m], 1j * derivs[2 * n : 2 * n + m], atol=1e-15
        )

    @pytest.mark.parametrize("unitary", [True, False])
    def test_finite_difference_all_slots(self, unitary):
        step = 1e-6
        p = random_init(2, 2, 0.3, 9, unitary)
        index = VariationalIndex.for_params(p)
        theta = index.flatten(p)
        for k in range(4):
            z = index_to_spins(k, 2)
            derivs = log_derivatives(p, z)
            for slot in range(index.size):
                bump = np.zeros(index.size)
                bump[slot] = step
                fd = (
                    log_amplitude(index.unflatten(theta + bump), z)
                    - log_amplitude(index.unflatten(theta - bump), z)
                ) / (2 * step)
                assert abs(fd - derivs[slot]) < 1e-6


class TestVariationalIndex:
    @pytest.mark.parametrize("n,m,unitary", [(1, 0, True), (2, 3, True), (3, 2, False), (4, 1, False)])
    def test_flatten_unflatten_round_trip(self, n, m, unitary):
        p = random_init(n, m, 0.7, 42, unitary)
        index = VariationalIndex.for_params(p)
        q = index.unflatten(index.flatten(p))
        assert np.array_equal(p.b, q.b)
        assert np.array_equal(p.m, q.m)
        assert np.array_equal(p.w, q.w)

    def test_size_counts_independent_slots(self):
        assert VariationalIndex(3, 2, True).size == 2 * 3 + 2 * 2 + 6
        assert VariationalIndex(3, 2, False).size == 2 * 3 + 2 * 2 + 12
        assert len(VariationalIndex(3, 2, False).labels()) == 22

    def test_unflatten_never_writes_real_couplings_under_flag(self):
        rng = np.random.default_rng(3)
        index = VariationalIndex(3, 3, True)
        for _ in range(200):
            p = index.unflatten(rng.normal(0, 2.0, index.size))
            assert np.max(np.abs(p.w.real)) == 0.0

    def test_column_major_coupling_order(self):
        p = random_init(2, 2, 0.5, 8, False)
        index = VariationalIndex.for_params(p)
        vec = index.flatten(p)
        labels = index.labels()
        assert labels[8:12] == ["w_im[0,0]", "w_im[1,0]", "w_im[0,1]", "w_im[1,1]"]
        assert vec[labels.index("w_im[1,0]")] == p.w[1, 0].imag
        assert vec[labels.index("w_re[0,1]")] == p.w[0, 1].real


class TestRFactor:
    def test_identity_operator(self):
        assert r_factor(0.0, 1) == 1.0
        assert r_factor(0.0, -1) == 0.0

    def test_matches_matrix_element(self):
        # <+| exp(m Z) |s> computed with explicit 2x2 matrices
        plus = np.array([1.0, 1.0]) / np.sqrt(2)
        minus = np.array([1.0, -1.0]) / np.sqrt(2)
        for m_val in (np.log(2.0), -0.3, 0.9):
            gate = np.diag([np.exp(m_val), np.exp(-m_val)])
            assert r_factor(m_val, 1) == pytest.approx(plus @ gate @ plus, abs=1e-14)
            assert r_factor(m_val, -1) == pytest.approx(plus @ gate @ minus, abs=1e-14)

    def test_known_values(self):
        assert r_factor(np.log(2.0), 1) == pytest.approx(1.25)
        assert r_factor(np.log(2.0), -1) == pytest.approx(0.75)
        assert r_factor(-0.3, -1) == pytest.approx(-np.sinh(0.3))

    def test_rejects_bad_outcome(self):
        with pytest.raises(ValueError):
            r_factor(0.1, 0)


class TestValidation:
    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            RbmParams(np.array([np.nan + 0j]), np.zeros(0), np.zeros((1, 0)))

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(ValueError):
            RbmParams(np.zeros(2, complex), np.zeros(1, complex), np.zeros((2, 2), complex))

    def test_rejects_real_couplings_under_flag(self):
        with pytest.raises(ValueError):
            RbmParams(
                np.zeros(1, complex),
                np.zeros(1, complex),
                np.array([[0.1 + 0.2j]]),
                unitary_coupled=True,
            )

    def test_arrays_are_immutable(self):
        p = random_init(2, 2, 0.1, 0, True)
        with pytest.raises(ValueError):
            p.b[0] = 1.0


class TestSpinHelpers:
    def test_index_round_trip(self):
        for n in (1, 3, 5):
            for k in range(1 << n):
                assert spins_to_index(index_to_spins(k, n)) == k

    def test_big_endian_convention(self):
        # qubit 0 is the most significant bit; |0> carries z = +1
        assert spins_to_index(np.array([-1, 1, 1])) == 4
