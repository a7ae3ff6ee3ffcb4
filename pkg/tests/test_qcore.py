import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from qmeas.qcore import (
    IDENTITY2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    DimensionError,
    NumericalContractError,
    Observable,
    antihermitian_part,
    check_density,
    check_ket,
    density,
    evolve,
    expectation,
    hermitian_part,
    kron,
    matexp_hermitian,
    partial_trace,
    purity,
    random_density,
    random_ket,
    random_unitary,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def partial_trace_loop(t, d_s, d_m, keep):
    """Reference partial trace by explicit index sums."""
    if keep == "system":
        out = np.zeros((d_s, d_s), dtype=complex)
        for i in range(d_s):
            for j in range(d_s):
                out[i, j] = sum(t[i * d_m + a, j * d_m + a] for a in range(d_m))
        return out
    out = np.zeros((d_m, d_m), dtype=complex)
    for a in range(d_m):
        for b in range(d_m):
            out[a, b] = sum(t[i * d_m + a, i * d_m + b] for i in range(d_s))
    return out


class TestPartialTrace:
    def test_product_state_factorises(self, rng):
        rho_s, rho_m = random_density(3, rng), random_density(4, rng)
        joint = kron(rho_s, rho_m)
        assert_allclose(partial_trace(joint, (3, 4), "system"), rho_s, atol=1e-14)
        assert_allclose(partial_trace(joint, (3, 4), "meter"), rho_m, atol=1e-14)

    @given(seeds)
    def test_matches_index_loop(self, seed):
        rng = np.random.default_rng(seed)
        t = random_density(6, rng)
        for keep in ("system", "meter"):
            assert_allclose(partial_trace(t, (2, 3), keep), partial_trace_loop(t, 2, 3, keep),
                            atol=1e-14)

    def test_bell_state_is_maximally_mixed(self):
        bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
        assert_allclose(partial_trace(density(bell), (2, 2), 0), IDENTITY2 / 2, atol=1e-15)

    def test_bad_dims(self):
        with pytest.raises(DimensionError):
            partial_trace(np.eye(6), (2, 2))
        with pytest.raises(ValueError):
            partial_trace(np.eye(4), (2, 2), keep="both")


class TestObservable:
    def test_degenerate_grouping(self):
        obs = Observable.from_matrix(np.diag([1.0, -1.0, 1.0]))
        assert obs.eigenvalues == (-1.0, 1.0)
        assert_allclose(obs.projectors[1], np.diag([1, 0, 1]), atol=1e-15)
        assert_allclose(obs.spectral_sum(), obs.matrix, atol=1e-14)

    def test_pauli_spectrum(self):
        for s in (SIGMA_X, SIGMA_Y, SIGMA_Z):
            obs = Observable.from_matrix(s)
            assert_allclose(obs.eigenvalues, [-1, 1], atol=1e-15)
            assert_allclose(sum(obs.projectors), IDENTITY2, atol=1e-15)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            Observable.from_matrix([[0, 1], [0, 0]])

    @given(seeds)
    def test_projectors_resolve_identity(self, seed):
        rng = np.random.default_rng(seed)
        u = random_unitary(4, rng)
        obs = Observable.from_spectrum([0.5, -1.0, 0.5, 2.0], u)
        assert len(obs.eigenvalues) == 3
        assert_allclose(sum(obs.projectors), np.eye(4), atol=1e-12)
        for p in obs.projectors:
            assert_allclose(p @ p, p, atol=1e-12)
        assert obs.projector_for(0.5).trace().real == pytest.approx(2.0)

    def test_unknown_eigenvalue(self):
        with pytest.raises(ValueError):
            Observable.from_matrix(SIGMA_Z).projector_for(0.3)


class TestStates:
    def test_check_density_accepts_valid(self, rng):
        check_density(random_density(3, rng))

    @pytest.mark.parametrize("bad", [
        np.array([[1.0, 0.5j], [0.5j, 0.0]]),     # not Hermitian
        np.diag([0.6, 0.6]),                      # trace
        np.diag([1.5, -0.5]),                     # not positive
    ])
    def test_check_density_rejects(self, bad):
        with pytest.raises(ValueError):
            check_density(bad)

    def test_contract_error_type(self):
        with pytest.raises(NumericalContractError):
            check_density(np.diag([1.5, -0.5]), error=NumericalContractError)

    def test_unnormalized_ket(self):
        with pytest.raises(ValueError):
            check_ket([1.0, 1.0])

    def test_purity(self, rng):
        assert purity(density(random_ket(5, rng))) == pytest.approx(1.0)
        assert purity(np.eye(4) / 4) == pytest.approx(0.25)


class TestOperators:
    def test_hermitian_split(self, rng):
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        h, k = hermitian_part(a), antihermitian_part(a)
        assert_allclose(h + 1j * k, a, atol=1e-14)
        assert_allclose(k, k.conj().T, atol=1e-14)

    def test_matexp_against_pauli_formula(self):
        # exp(-i t sigma_x) = cos t - i sin t sigma_x
        t = 0.37
        assert_allclose(matexp_hermitian(SIGMA_X, t),
                        np.cos(t) * IDENTITY2 - 1j * np.sin(t) * SIGMA_X, atol=1e-15)

    def test_evolve_rejects_non_unitary(self):
        with pytest.raises(ValueError):
            evolve(np.eye(2) / 2, 2 * np.eye(2))

    def test_expectation(self):
        plus = density(np.array([1, 1]) / np.sqrt(2))
        assert expectation(SIGMA_X, plus) == pytest.approx(1.0)
        assert expectation(SIGMA_Z, plus) == pytest.approx(0.0)
