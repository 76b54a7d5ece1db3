import numpy as np
import pytest

from purigeo.errors import DomainError, NonHermitianInput
from purigeo.matcore import (
    eig_hermitian,
    matfun,
    schmidt_decompose,
    sqrtm_psd,
)

from conftest import dag, rand_complex, rand_hermitian, rand_lowrank


class TestEigHermitian:
    def test_identity(self):
        vals, vecs = eig_hermitian(np.eye(3))
        assert np.allclose(vals, [1, 1, 1])
        assert np.allclose(vecs @ dag(vecs), np.eye(3))

    def test_diagonal(self):
        vals, vecs = eig_hermitian(np.diag([3.0, 1.0]))
        assert np.allclose(vals, [3.0, 1.0])
        assert np.allclose(np.abs(vecs), np.eye(2))

    def test_random_residual(self, rng):
        a = rand_hermitian(rng, 6)
        vals, vecs = eig_hermitian(a)
        assert np.linalg.norm(a @ vecs - vecs * vals) < 1e-10
        assert np.all(np.diff(vals) <= 0)
        assert np.linalg.norm(dag(vecs) @ vecs - np.eye(6)) < 1e-12

    def test_rejects_non_hermitian(self, rng):
        with pytest.raises(NonHermitianInput):
            eig_hermitian(rand_complex(rng, 3))


class TestMatfun:
    def test_identity_map(self, rng):
        a = rand_hermitian(rng, 4)
        assert np.allclose(matfun(a, lambda t: t), a)

    def test_sqrt_diagonal(self):
        assert np.allclose(matfun(np.diag([4.0, 9.0]), np.sqrt), np.diag([2.0, 3.0]))

    def test_exp_matches_power_series(self, rng):
        a = rand_hermitian(rng, 4)
        # scaled-truncated power-series oracle
        m = 2**8
        term = np.eye(4, dtype=complex)
        series = np.eye(4, dtype=complex)
        for j in range(1, 30):
            term = term @ (a / m) / j
            series = series + term
        for _ in range(8):
            series = series @ series
        assert np.linalg.norm(matfun(a, np.exp) - series) < 1e-10

    def test_composition(self, rng):
        a = rand_hermitian(rng, 4)
        a = a @ dag(a)  # PSD so sqrt is defined
        direct = matfun(a, lambda t: np.exp(np.sqrt(t)))
        nested = matfun(matfun(a, np.sqrt), np.exp)
        assert np.linalg.norm(direct - nested) < 1e-10

    def test_domain_error(self):
        with pytest.raises(DomainError):
            matfun(np.diag([1.0, -2.0]), np.sqrt)

    def test_sqrtm_psd_clips_noise(self):
        a = np.diag([1.0, -1e-14])
        s = sqrtm_psd(a)
        assert np.allclose(s, np.diag([1.0, 0.0]), atol=1e-7)
        with pytest.raises(DomainError):
            sqrtm_psd(np.diag([1.0, -0.5]))


class TestSchmidt:
    def test_rank_one_product(self):
        w = np.zeros((2, 2), dtype=complex)
        w[0, 1] = 1.0  # |e1><e2|
        sd = schmidt_decompose(w)
        assert sd.rank == 1
        assert np.allclose(sd.lambdas, [1.0])
        assert np.allclose(np.abs(sd.left[:, 0]), [1, 0])
        assert np.allclose(np.abs(sd.right[:, 0]), [0, 1])
        assert np.allclose(sd.phase, w)

    def test_hermitian_positive_phase_is_support_projection(self):
        w = sqrtm_psd(np.diag([0.5, 0.5]))
        sd = schmidt_decompose(w)
        assert np.allclose(sd.lambdas, [0.5, 0.5])
        assert np.allclose(sd.phase, np.eye(2))

    def test_random_invertible(self, rng):
        w = rand_complex(rng, 3)
        sd = schmidt_decompose(w)
        assert sd.rank == 3
        assert np.linalg.norm(sd.reconstruct() - w) < 1e-10
        rho_vals = np.linalg.eigvalsh(w @ dag(w))[::-1]
        assert np.allclose(rho_vals[: sd.rank], sd.lambdas, atol=1e-10)

    def test_left_right_spectra_agree(self, rng):
        w = rand_lowrank(rng, 4, 2)
        sd = schmidt_decompose(w)
        assert sd.rank == 2
        left_vals = np.sort(np.linalg.eigvalsh(w @ dag(w)))[::-1][:2]
        right_vals = np.sort(np.linalg.eigvalsh(dag(w) @ w))[::-1][:2]
        assert np.allclose(left_vals, sd.lambdas, atol=1e-10)
        assert np.allclose(right_vals, sd.lambdas, atol=1e-10)

    def test_polar_split(self, rng):
        w = rand_lowrank(rng, 4, 2)
        sd = schmidt_decompose(w)
        assert np.linalg.norm(sqrtm_psd(w @ dag(w)) @ sd.phase - w) < 1e-9
        # phase is a partial isometry whose supports are rank-n_w projections
        p = sd.phase @ dag(sd.phase)
        q = dag(sd.phase) @ sd.phase
        assert np.linalg.norm(p @ p - p) < 1e-12
        assert np.linalg.norm(q @ q - q) < 1e-12
        assert abs(np.trace(p).real - sd.rank) < 1e-12
        assert abs(np.trace(q).real - sd.rank) < 1e-12

    def test_zero_matrix(self):
        sd = schmidt_decompose(np.zeros((3, 3)))
        assert sd.rank == 0
        assert sd.lambdas.size == 0
        assert np.allclose(sd.phase, 0.0)

    def test_right_frame_forced_by_pairing(self, rng):
        w = rand_complex(rng, 3)
        sd = schmidt_decompose(w)
        for j in range(sd.rank):
            forced = dag(w) @ sd.left[:, j] / np.sqrt(sd.lambdas[j])
            assert np.linalg.norm(forced - sd.right[:, j]) < 1e-10
