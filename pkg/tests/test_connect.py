import numpy as np
import pytest

from purigeo.connect import (
    bures_decompose,
    connection_eval,
    horizontal_lift,
    horizontal_part,
    sylvester_solve,
    tangent_split,
    vertical_part,
)
from purigeo.errors import (
    BasePointMismatch,
    RankDeficient,
    UnsolvableSupport,
)
from purigeo.funzoo import ScalarFunction, connection_catalog, k_from_F_HS
from purigeo.matcore import sqrtm_psd
from purigeo.purify import SuperopKind, modular_conjugate, project, pushforward, superop_apply

from conftest import (
    apply_dense,
    dag,
    left_mult,
    rand_anti,
    rand_complex,
    rand_faithful,
    rand_hermitian,
    rand_invertible,
    rand_lowrank,
    rand_unitary,
    right_mult,
)

BURES = connection_catalog("bures")
CANONICAL = connection_catalog("canonical")
GS = connection_catalog("global_section")


def re_hs(a, b):
    return float(np.trace(dag(a) @ b).real)


class TestSylvester:
    def test_scaled_identity(self, rng):
        xi = rand_hermitian(rng, 3)
        g = sylvester_solve(0.5 * np.eye(3), xi)
        assert np.linalg.norm(g - xi) < 1e-12

    def test_two_level(self):
        rho = np.diag([2.0, 1.0])
        xi = np.array([[0.0, 1.0], [1.0, 0.0]])
        assert np.linalg.norm(sylvester_solve(rho, xi) - xi / 3) < 1e-12

    def test_dense_oracle(self, rng):
        rho = rand_faithful(rng, 4)
        xi = rand_hermitian(rng, 4)
        g = sylvester_solve(rho, xi)
        assert np.linalg.norm(rho @ g + g @ rho - xi) < 1e-9
        dense = left_mult(rho) + right_mult(rho)
        want = apply_dense(np.linalg.inv(dense), xi)
        assert np.linalg.norm(g - want) < 1e-9

    def test_unsolvable_support(self):
        rho = np.diag([1.0, 0.0])
        xi = np.array([[0.0, 0.0], [0.0, 1.0]])  # weight on the null space
        with pytest.raises(UnsolvableSupport):
            sylvester_solve(rho, xi)

    def test_minimal_support_at_rank_deficiency(self, rng):
        rho = np.diag([1.0, 0.5, 0.0])
        xi = np.zeros((3, 3))
        xi[0, 1] = xi[1, 0] = 0.3
        xi[0, 2] = xi[2, 0] = 0.2
        g = sylvester_solve(rho, xi)
        assert abs(g[2, 2]) < 1e-14
        assert np.linalg.norm(rho @ g + g @ rho - xi) < 1e-10


class TestBuresDecompose:
    def test_pure_gauge_tangent(self, rng):
        w = rand_invertible(rng, 3)
        a0 = rand_anti(rng, 3)
        split = bures_decompose(w, w @ a0)
        assert np.linalg.norm(split.g) < 1e-10
        assert np.linalg.norm(split.neutral) < 1e-10
        assert np.linalg.norm(split.a - a0) < 1e-10

    def test_commuting_root_curve_is_horizontal(self, rng):
        # Hermitian w commuting with its Hermitian velocity: no gauge part
        d = np.diag([1.5, 1.0, 0.5])
        u = rand_unitary(rng, 3)
        w = u @ d @ dag(u)
        x = u @ np.diag([0.3, -0.1, 0.2]) @ dag(u)
        split = bures_decompose(w, x)
        assert np.linalg.norm(split.a) < 1e-12
        assert np.linalg.norm(split.neutral) < 1e-12

    def test_rank_two_in_three(self, rng):
        w = rand_lowrank(rng, 3, 2)
        x = rand_complex(rng, 3)
        split = bures_decompose(w, x)
        recon = split.g @ w + split.neutral + w @ split.a
        assert np.linalg.norm(recon - x) < 1e-9
        assert np.linalg.norm(dag(w) @ split.neutral) < 1e-9
        assert np.linalg.norm(split.neutral @ dag(w)) < 1e-9
        # three-way real orthogonality
        assert abs(re_hs(split.g @ w, w @ split.a)) < 1e-9
        assert abs(re_hs(split.g @ w, split.neutral)) < 1e-9
        assert abs(re_hs(split.neutral, w @ split.a)) < 1e-9
        # minimal supports: g and a vanish on the null frames
        sd_left = np.linalg.eigh(w @ dag(w))
        null_left = sd_left[1][:, np.abs(sd_left[0]) < 1e-12]
        assert np.linalg.norm(dag(null_left) @ split.g @ null_left) < 1e-10
        sd_right = np.linalg.eigh(dag(w) @ w)
        null_right = sd_right[1][:, np.abs(sd_right[0]) < 1e-12]
        assert np.linalg.norm(dag(null_right) @ split.a @ null_right) < 1e-10

    def test_parallelity_condition_of_horizontal_part(self, rng):
        w = rand_complex(rng, 3)
        x = rand_complex(rng, 3)
        split = bures_decompose(w, x)
        y = split.g @ w
        assert np.linalg.norm(dag(y) @ w - dag(w) @ y) < 1e-10


class TestConnectionEval:
    def test_matches_split_at_any_invertible_point(self, rng):
        w = rand_invertible(rng, 3)
        x = rand_complex(rng, 3)
        a = connection_eval(BURES, w, x)
        assert np.linalg.norm(a - bures_decompose(w, x).a) < 1e-9

    def test_flat_F_is_antisymmetrized_left_logarithm(self, rng):
        w = rand_invertible(rng, 3)
        x = rand_complex(rng, 3)
        m = np.linalg.solve(w, x)
        want = (m - dag(m)) / 2
        assert np.linalg.norm(connection_eval(CANONICAL, w, x) - want) < 1e-10

    def test_commuting_tangent_is_F_independent(self, rng):
        w = rand_invertible(rng, 3)
        rho = project(w)
        lam, u = np.linalg.eigh(rho)
        xi = u @ np.diag(rng.normal(size=3)) @ dag(u)
        x = 0.5 * xi @ dag(np.linalg.inv(w)) + w @ rand_anti(rng, 3)
        want = connection_eval(CANONICAL, w, x)
        for conn in (BURES, GS, connection_catalog("power", 1.6)):
            assert np.linalg.norm(connection_eval(conn, w, x) - want) < 1e-9

    def test_value_is_antihermitian(self, rng):
        w = rand_invertible(rng, 4)
        x = rand_complex(rng, 4)
        a = connection_eval(GS, w, x)
        assert np.linalg.norm(a + dag(a)) < 1e-10

    def test_third_formula_cross_check(self, rng):
        # a = a_can + (1/2) w^(-1) (F(L/R) pushforward) (w^(-1))^dagger;
        # conjugating the pushforward back through the lift doubles the
        # symmetrized logarithmic derivative, hence the 1/2
        w = rand_invertible(rng, 3)
        x = rand_complex(rng, 3)
        conn = connection_catalog("power", 0.9)
        winv = np.linalg.inv(w)
        m = winv @ x
        xi = pushforward(w, x)
        acan = (m - dag(m)) / 2
        want = acan + winv @ superop_apply(conn, SuperopKind.L_OVER_R, w, xi) @ dag(winv) / 2
        assert np.linalg.norm(connection_eval(conn, w, x) - want) < 1e-9

    def test_gauge_equivariance(self, rng):
        w = rand_invertible(rng, 3)
        x = rand_complex(rng, 3)
        u = rand_unitary(rng, 3)
        du = u @ rand_anti(rng, 3)
        for conn in (BURES, CANONICAL, GS):
            a = connection_eval(conn, w, x)
            a_prime = connection_eval(conn, w @ u, x @ u + w @ du)
            assert np.linalg.norm(a_prime - (dag(u) @ a @ u + dag(u) @ du)) < 1e-9

    def test_rescaling_invariance(self, rng):
        w = rand_invertible(rng, 3)
        x = rand_complex(rng, 3)
        conn = connection_catalog("power", 1.3)
        a = connection_eval(conn, w, x)
        lam0, dlam = 1.7, -0.4
        assert np.linalg.norm(connection_eval(conn, lam0 * w, dlam * w + lam0 * x) - a) < 1e-9

    def test_reproduces_gauge_generators(self, rng):
        w = rand_invertible(rng, 3)
        a0 = rand_anti(rng, 3)
        for conn in (BURES, CANONICAL, GS):
            assert np.linalg.norm(connection_eval(conn, w, w @ a0) - a0) < 1e-10

    def test_global_section_annihilates_root_velocity(self, rng):
        h0 = rand_hermitian(rng, 3, 0.5)
        h1 = rand_hermitian(rng, 3, 0.5)

        def root(t):
            from purigeo.matcore import matfun
            return sqrtm_psd(matfun(h0 + np.sin(t) * h1, np.exp))

        t0, h = 0.4, 1e-4
        wdot = (-root(t0 + 2 * h) + 8 * root(t0 + h) - 8 * root(t0 - h) + root(t0 - 2 * h)) / (12 * h)
        assert np.linalg.norm(connection_eval(GS, root(t0), wdot)) < 1e-9

    def test_general_F_refused_at_rank_deficiency(self, rng):
        w = rand_lowrank(rng, 3, 2)
        x = rand_complex(rng, 3)
        with pytest.raises(RankDeficient):
            connection_eval(CANONICAL, w, x)
        # the orthogonality-split choice still works
        a = connection_eval(BURES, w, x)
        assert np.linalg.norm(a + dag(a)) < 1e-10


class TestSplitAndLift:
    def test_gauge_tangent_has_no_horizontal_part(self, rng):
        w = rand_invertible(rng, 3)
        a0 = rand_anti(rng, 3)
        for conn in (BURES, GS):
            assert np.linalg.norm(horizontal_part(conn, w, w @ a0)) < 1e-9

    def test_split_reassembles(self, rng):
        w = rand_invertible(rng, 3)
        x = rand_complex(rng, 3)
        conn = connection_catalog("power", 0.6)
        v = vertical_part(conn, w, x)
        hpart = horizontal_part(conn, w, x)
        assert np.linalg.norm(v + hpart - x) < 1e-10
        assert np.linalg.norm(connection_eval(conn, w, hpart)) < 1e-9
        assert np.linalg.norm(pushforward(w, hpart) - pushforward(w, x)) < 1e-9

    def test_two_vertical_formulas_agree(self, rng):
        # x_ver = x - r(inverse ratio)(x + modular-reflected x)
        w = rand_invertible(rng, 3)
        x = rand_complex(rng, 3)
        conn = connection_catalog("power", 1.4)
        r = conn.r
        refl = modular_conjugate(w, superop_apply(
            ScalarFunction(lambda t: np.sqrt(1.0 / np.asarray(t, dtype=float))),
            SuperopKind.DELTA, w, x))
        got = x - superop_apply(r, SuperopKind.DELTA_INV, w, x + refl)
        assert np.linalg.norm(got - vertical_part(conn, w, x)) < 1e-9

    def test_lift_zero(self, rng):
        w = rand_invertible(rng, 3)
        assert np.linalg.norm(horizontal_lift(BURES, w, np.zeros((3, 3)))) < 1e-14

    def test_lift_pushes_forward(self, rng):
        w = rand_invertible(rng, 3)
        xi = rand_hermitian(rng, 3)
        for conn in (BURES, CANONICAL, GS):
            lift = horizontal_lift(conn, w, xi)
            assert np.linalg.norm(pushforward(w, lift) - xi) < 1e-9
            assert np.linalg.norm(connection_eval(conn, w, lift)) < 1e-9

    def test_lift_matches_horizontal_part(self, rng):
        w = rand_invertible(rng, 3)
        x = rand_complex(rng, 3)
        conn = connection_catalog("power", 0.8)
        assert np.linalg.norm(
            horizontal_lift(conn, w, pushforward(w, x)) - horizontal_part(conn, w, x)
        ) < 1e-9

    def test_flat_r_two_level(self):
        rho = np.diag([2.0, 1.0])
        w = sqrtm_psd(rho)
        xi = np.array([[0.0, 1.0], [1.0, 0.0]])
        lift = horizontal_lift(CANONICAL, w, xi)
        want = 0.5 * xi @ np.linalg.inv(dag(w))
        assert np.linalg.norm(lift - want) < 1e-12

    def test_base_point_check(self, rng):
        w = rand_invertible(rng, 3)
        xi = rand_hermitian(rng, 3)
        with pytest.raises(BasePointMismatch):
            horizontal_lift(BURES, w, xi, at=np.eye(3))

    def test_rank_deficient_refused(self, rng):
        w = rand_lowrank(rng, 3, 2)
        xi = pushforward(w, rand_complex(rng, 3))
        with pytest.raises(RankDeficient):
            horizontal_lift(BURES, w, xi)
        with pytest.raises(RankDeficient):
            vertical_part(BURES, w, rand_complex(rng, 3))

    def test_k_metric_horizontality_two_sided(self, rng):
        # x = k(Delta)(g w) is real orthogonal to gauge tangents in the
        # k-weighted product; adding a gauge component breaks it
        w = rand_invertible(rng, 3)
        k = k_from_F_HS(connection_catalog("power", 0.7))
        kinv = ScalarFunction(lambda t: 1.0 / k.fn(t))
        g = rand_hermitian(rng, 3)
        x = superop_apply(k, SuperopKind.DELTA, w, g @ w)
        worst = 0.0
        for _ in range(5):
            a0 = rand_anti(rng, 3)
            val = np.trace(dag(w @ a0) @ superop_apply(kinv, SuperopKind.DELTA, w, x)).real
            worst = max(worst, abs(val))
        assert worst < 1e-10
        bad = x + w @ rand_anti(rng, 3)
        vals = []
        for _ in range(5):
            a0 = rand_anti(rng, 3)
            vals.append(abs(np.trace(dag(w @ a0) @ superop_apply(kinv, SuperopKind.DELTA, w, bad)).real))
        assert max(vals) > 1e-6


class TestTangentSplit:
    def test_commuting_tangent(self, rng):
        rho = rand_faithful(rng, 3)
        lam, u = np.linalg.eigh(rho)
        xi = u @ np.diag(rng.normal(size=3)) @ dag(u)
        par, perp = tangent_split(rho, xi)
        assert np.linalg.norm(perp) < 1e-10
        assert np.linalg.norm(par - xi) < 1e-10

    def test_two_level_off_diagonal(self):
        rho = np.diag([2.0, 1.0])
        sx = np.array([[0.0, 1.0], [1.0, 0.0]])
        par, perp = tangent_split(rho, sx)
        assert np.linalg.norm(par) < 1e-12
        assert np.linalg.norm(perp - sx) < 1e-12

    def test_degenerate_state_keeps_everything(self, rng):
        xi = rand_hermitian(rng, 3)
        par, perp = tangent_split(np.eye(3), xi)
        assert np.linalg.norm(par - xi) < 1e-12
        assert np.linalg.norm(perp) < 1e-12

    def test_perp_is_a_commutator(self, rng):
        rho = rand_faithful(rng, 4)
        xi = rand_hermitian(rng, 4)
        par, perp = tangent_split(rho, xi)
        assert np.linalg.norm(par + perp - xi) < 1e-12
        assert np.linalg.norm(rho @ par - par @ rho) < 1e-8
        # solve perp = i [b, rho] in the eigenbasis and verify
        lam, u = np.linalg.eigh(rho)
        comps = dag(u) @ perp @ u
        denom = 1j * (lam[None, :] - lam[:, None])
        safe = np.abs(denom) > 1e-12
        b = np.where(safe, comps / np.where(safe, denom, 1.0), 0.0)
        b = u @ b @ dag(u)
        assert np.linalg.norm(1j * (b @ rho - rho @ b) - perp) < 1e-8
