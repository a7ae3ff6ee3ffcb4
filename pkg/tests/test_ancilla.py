import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from qmeas.ancilla import (
    EffectSet,
    MeterModel,
    build_from_hamiltonian,
    build_from_markers,
    consecutive,
    extended_joint_probability,
    extended_measurement_operators,
    extended_readout,
    measurement_operators,
    premeasure,
    readout,
    reduced_meter_state,
    reduced_system_state,
    repeated,
)
from qmeas.meters import CNOT, QubitMeter, cnot_images
from qmeas.projective import luders_conditional, outcome_probability
from qmeas.qcore import (
    KET0,
    KET1,
    SIGMA_Z,
    DimensionError,
    ZeroProbabilityError,
    density,
    is_unitary,
    kron,
    partial_trace,
    random_density,
    random_ket,
    random_unitary,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def random_premeasurement(rng, d_s=3, d_m=4, seed=None):
    meter = MeterModel(random_ket(d_m, rng), random_unitary(d_m, rng))
    markers = [random_ket(d_m, rng) for _ in range(d_s)]
    basis = random_unitary(d_s, rng)
    return build_from_markers(d_s, meter, markers, basis=basis, completion_seed=seed), markers


class TestPreMeasurement:
    @given(seeds)
    def test_unitary_and_marker_images(self, seed):
        rng = np.random.default_rng(seed)
        pm, markers = random_premeasurement(rng, seed=seed % 1000)
        u = pm.unitary
        assert is_unitary(u, 1e-10)
        for i in range(pm.system_dim):
            inp = np.kron(pm.basis[:, i], pm.meter.initial)
            assert_allclose(u @ inp, np.kron(pm.basis[:, i], markers[i]), atol=1e-10)

    def test_marker_norm_checked(self):
        with pytest.raises(ValueError):
            build_from_markers(2, MeterModel(KET0), [KET0, 2 * KET1])

    def test_marker_count_checked(self):
        with pytest.raises(DimensionError):
            build_from_markers(2, MeterModel(KET0), [KET0])

    def test_observables_independent_of_completion(self, rng):
        pm_a, markers = random_premeasurement(rng, seed=1)
        pm_b = build_from_markers(3, pm_a.meter, markers, basis=pm_a.basis, completion_seed=2)
        assert not np.allclose(pm_a.unitary, pm_b.unitary)
        rho = random_density(3, rng)
        tau_a = pm_a.unitary @ kron(rho, density(pm_a.meter.initial)) @ pm_a.unitary.conj().T
        tau_b = pm_b.unitary @ kron(rho, density(pm_b.meter.initial)) @ pm_b.unitary.conj().T
        assert_allclose(tau_a, tau_b, atol=1e-12)
        assert_allclose(premeasure(pm_a, rho), tau_a, atol=1e-12)

    def test_reduced_states_match_partial_trace(self, rng):
        pm, _ = random_premeasurement(rng)
        rho = random_density(3, rng)
        tau = premeasure(pm, rho)
        assert_allclose(reduced_system_state(pm, rho), partial_trace(tau, pm.dims, "system"),
                        atol=1e-13)
        assert_allclose(reduced_meter_state(pm, rho), partial_trace(tau, pm.dims, "meter"),
                        atol=1e-13)

    def test_reduced_system_elements_scale_with_marker_overlap(self, rng):
        # <s_i|sigma_1|s_j> = <s_i|sigma_0|s_j> <m^(j)|m^(i)>
        pm, markers = random_premeasurement(rng)
        rho = random_density(3, rng)
        b = pm.basis
        lhs = b.conj().T @ reduced_system_state(pm, rho) @ b
        gram = np.array([[np.vdot(markers[j], markers[i]) for j in range(3)] for i in range(3)])
        assert_allclose(lhs, (b.conj().T @ rho @ b) * gram, atol=1e-13)

    def test_hamiltonian_construction(self, rng):
        meter = MeterModel(random_ket(3, rng))
        n_op = rng.normal(size=(3, 3))
        n_op = n_op + n_op.T
        obs = np.diag([1.0, -0.5])
        pm = build_from_hamiltonian(obs, meter, n_op, 0.3)
        w = pm.unitary @ np.kron(np.eye(2), meter.initial.reshape(3, 1))
        assert_allclose(w, pm.images, atol=1e-12)

    def test_hamiltonian_requires_hermitian_coupling(self):
        with pytest.raises(ValueError):
            build_from_hamiltonian(SIGMA_Z, MeterModel(KET0), np.array([[0, 1], [0, 0]]), 0.1)


class TestMeasurementOperators:
    def test_formula_from_marker_overlaps(self, rng):
        # Omega_k = sum_i <m_k|m^(i)> Pi_i
        pm, markers = random_premeasurement(rng)
        ops = measurement_operators(pm)
        for k in range(pm.meter_dim):
            mk = pm.meter.pointer_state(k)
            expected = sum(np.vdot(mk, markers[i]) * np.outer(pm.basis[:, i], pm.basis[:, i].conj())
                           for i in range(3))
            assert_allclose(ops[k], expected, atol=1e-13)

    @given(seeds)
    def test_effects_complete_and_positive(self, seed):
        rng = np.random.default_rng(seed)
        pm, _ = random_premeasurement(rng, d_s=int(rng.integers(2, 5)), d_m=int(rng.integers(2, 6)))
        eff = measurement_operators(pm).effects().check()
        assert eff.completeness_error() < 1e-10

    def test_readout_matches_operator_update(self, rng):
        pm, _ = random_premeasurement(rng)
        rho = random_density(3, rng)
        tau = premeasure(pm, rho)
        ops = measurement_operators(pm)
        probs = ops.effects().probabilities(rho)
        for k in range(pm.meter_dim):
            state, prob = readout(pm, tau, k)
            ref, ref_prob = ops.conditional(rho, k)
            assert prob == pytest.approx(probs[k], abs=1e-13)
            assert prob == pytest.approx(ref_prob, abs=1e-13)
            assert_allclose(state, ref, atol=1e-12)

    def test_unconditional_update_is_reduced_state(self, rng):
        pm, _ = random_premeasurement(rng)
        rho = random_density(3, rng)
        assert_allclose(measurement_operators(pm).apply(rho), reduced_system_state(pm, rho),
                        atol=1e-13)

    def test_zero_probability_readout(self):
        pm = QubitMeter(0.0).premeasurement()
        tau = premeasure(pm, np.diag([1.0, 0.0]))
        with pytest.raises(ZeroProbabilityError):
            readout(pm, tau, 1)

    def test_effect_set_rejects_incomplete(self):
        with pytest.raises(ValueError):
            EffectSet(np.array([np.eye(2) * 0.5])).check()


class TestDoubleQubit:
    @pytest.mark.parametrize("theta", [0.0, 0.4, 1.1, np.pi / 2])
    def test_operators_and_effects(self, theta):
        c, s = np.cos(theta / 2), np.sin(theta / 2)
        ops = measurement_operators(QubitMeter(theta).premeasurement())
        assert_allclose(ops[0], np.diag([c, s]), atol=1e-12)
        assert_allclose(ops[1], np.diag([s, c]), atol=1e-12)
        eff = ops.effects().effects
        assert_allclose(eff[0], np.diag([c**2, s**2]), atol=1e-12)
        assert_allclose(eff[1], np.diag([s**2, c**2]), atol=1e-12)

    def test_images_match_cnot(self):
        qm = QubitMeter(0.8)
        assert_allclose(qm.premeasurement().images, cnot_images(qm), atol=1e-14)
        assert is_unitary(CNOT)

    def test_marker_overlap_is_sin_theta(self):
        assert QubitMeter(0.9).overlap() == pytest.approx(np.sin(0.9))

    @given(seeds)
    def test_strong_limit_equals_projective(self, seed):
        rng = np.random.default_rng(seed)
        rho = random_density(2, rng)
        pm = QubitMeter(0.0).premeasurement()
        tau = premeasure(pm, rho)
        dist = outcome_probability(SIGMA_Z, rho)
        for k, value in enumerate((1.0, -1.0)):
            if dist.probability(value) < 1e-9:
                continue
            state, prob = readout(pm, tau, k)
            ref, ref_prob = luders_conditional(SIGMA_Z, rho, value)
            assert prob == pytest.approx(ref_prob, abs=1e-12)
            assert_allclose(state, ref, atol=1e-12)

    def test_no_measurement_at_right_angle(self, rng):
        rho = random_density(2, rng)
        pm = QubitMeter(np.pi / 2).premeasurement()
        assert_allclose(reduced_system_state(pm, rho), rho, atol=1e-14)


class TestConsecutive:
    def test_two_double_qubit_measurements(self):
        # coherence shrinks by the product of the marker overlaps
        rho = density(np.array([1, 1]) / np.sqrt(2))
        a, b = QubitMeter(0.5), QubitMeter(1.2)
        out = consecutive(a.premeasurement(), b.premeasurement(), rho)
        assert out[0, 1] == pytest.approx(0.5 * np.sin(0.5) * np.sin(1.2))
        assert out[0, 0] == pytest.approx(0.5)

    def test_repeated_equals_power(self):
        rho = density(np.array([0.6, 0.8j]))
        pm = QubitMeter(1.0).premeasurement()
        out = repeated(pm, rho, 5)
        assert out[0, 1] == pytest.approx(rho[0, 1] * np.sin(1.0) ** 5)

    def test_composed_operators_complete(self, rng):
        p1, _ = random_premeasurement(rng)
        p2, _ = random_premeasurement(rng)
        comp = measurement_operators(p2).compose(measurement_operators(p1))
        assert len(comp) == 16
        assert comp.completeness_error() < 1e-12
        rho = random_density(3, rng)
        assert_allclose(comp.apply(rho), consecutive(p1, p2, rho), atol=1e-13)

    def test_dimension_mismatch(self, rng):
        p1, _ = random_premeasurement(rng, d_s=2)
        p2, _ = random_premeasurement(rng, d_s=3)
        with pytest.raises(DimensionError):
            consecutive(p1, p2, np.eye(2) / 2)


class TestExtendedEnvironment:
    @given(seeds)
    def test_effects_complete(self, seed):
        rng = np.random.default_rng(seed)
        dims = (2, 3, 2)
        u = random_unitary(12, rng)
        _, eff = extended_measurement_operators(u, random_ket(3, rng), random_ket(2, rng), dims)
        assert eff.check().completeness_error() < 1e-10

    def test_probability_matches_joint_state(self, rng):
        dims = (2, 2, 3)
        u = random_unitary(12, rng)
        d0, m0 = random_ket(2, rng), random_ket(3, rng)
        rho = random_density(2, rng)
        _, eff = extended_measurement_operators(u, d0, m0, dims)
        probs = eff.probabilities(rho)
        for k in range(3):
            assert probs[k] == pytest.approx(extended_joint_probability(u, d0, m0, dims, rho, k),
                                             abs=1e-13)
            state, prob = extended_readout(u, d0, m0, dims, rho, k)
            assert prob == pytest.approx(probs[k], abs=1e-13)
            assert np.trace(state).real == pytest.approx(1.0)

    def test_trivial_environment_reduces_to_plain_operators(self, rng):
        pm, _ = random_premeasurement(rng, d_s=2, d_m=3)
        u = pm.unitary                      # S (x) M; environment of dimension 1
        omega, _ = extended_measurement_operators(u, [1.0], pm.meter.initial, (2, 1, 3))
        plain = measurement_operators(build_from_markers(2, MeterModel(pm.meter.initial),
                                                         pm.markers, basis=pm.basis))
        assert_allclose(omega[:, 0], plain.operators, atol=1e-12)

    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError):
            extended_measurement_operators(np.eye(8) * 2, KET0, KET0, (2, 2, 2))

    def test_pointer_basis_rotation(self, rng):
        dims = (2, 2, 2)
        u = random_unitary(8, rng)
        hadamard = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
        _, eff = extended_measurement_operators(u, KET0, KET1, dims, pointer_basis=hadamard)
        assert eff.completeness_error() < 1e-12
