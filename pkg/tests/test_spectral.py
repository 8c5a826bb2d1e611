"""Tests for pencil eigenvalues, derivative formulas, and matrix concavity."""

import unittest

import numpy as np

from phessian.errors import AdmissibilityError, DegenerateSpectrumError
from phessian.spectral import (
    Pencil,
    eigs,
    jacobi_eigh,
    linearization,
    midpoint_concavity_check,
    schur_horn_check,
    spectral_derivs,
    weyl_check,
)
from phessian.symfun import sigma


def rand_sym(rng, n, scale=1.0):
    M = rng.uniform(-scale, scale, (n, n))
    return 0.5 * (M + M.T)


def rand_spd(rng, n):
    M = rng.uniform(-1, 1, (n, n))
    return M @ M.T + n * np.eye(n)


class TestEigs(unittest.TestCase):
    def test_diagonal_sorted(self):
        lam = eigs(Pencil(np.eye(3), np.diag([3.0, 1.0, 2.0])))
        np.testing.assert_allclose(lam, [1.0, 2.0, 3.0], atol=1e-13)

    def test_scalar_pencil_scaling(self):
        lam = eigs(Pencil(2.0 * np.eye(2), np.diag([1.0, 2.0])))
        np.testing.assert_allclose(lam, [2.0, 4.0], atol=1e-13)

    def test_two_by_two_hand_case(self):
        lam = eigs(Pencil(np.eye(2), np.array([[2.0, 1.0], [1.0, 2.0]])))
        np.testing.assert_allclose(lam, [1.0, 3.0], atol=1e-12)

    def test_not_spd_rejected(self):
        with self.assertRaises(ValueError):
            Pencil(np.diag([1.0, -1.0]), np.eye(2))

    def test_asymmetry_rejected(self):
        B = np.array([[1.0, 2.0], [0.0, 1.0]])
        with self.assertRaises(ValueError):
            Pencil(np.eye(2), B)

    def test_against_numpy_eig_of_product(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            n = rng.integers(2, 7)
            A = rand_spd(rng, n)
            B = rand_sym(rng, n, 3.0)
            lam = eigs(Pencil(A, B))
            ref = np.sort(np.linalg.eigvals(A @ B).real)
            np.testing.assert_allclose(lam, ref, atol=1e-9 * max(1, np.abs(ref).max()))

    def test_eps_shift_identity(self):
        # lam(A, B + eps*A^{-1}) = lam(A, B) + eps
        rng = np.random.default_rng(1)
        for _ in range(50):
            n = rng.integers(2, 6)
            A = rand_spd(rng, n)
            B = rand_sym(rng, n, 2.0)
            eps = rng.uniform(0.1, 2.0)
            shifted = eigs(Pencil(A, B + eps * np.linalg.inv(A)))
            np.testing.assert_allclose(shifted, eigs(Pencil(A, B)) + eps, atol=1e-9)

    def test_congruence_invariance(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            n = rng.integers(2, 6)
            A = rand_spd(rng, n)
            B = rand_sym(rng, n, 2.0)
            # well-conditioned P
            P = rand_spd(rng, n)
            Pinv = np.linalg.inv(P)
            lam1 = eigs(Pencil(A, B))
            lam2 = eigs(Pencil(P @ A @ P.T, Pinv.T @ B @ Pinv))
            np.testing.assert_allclose(lam1, lam2, atol=1e-9 * max(1, np.abs(lam1).max()))


class TestJacobi(unittest.TestCase):
    def test_matches_eigh(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            n = rng.integers(1, 9)
            M = rand_sym(rng, n, 5.0)
            w = jacobi_eigh(M)
            np.testing.assert_allclose(w, np.linalg.eigvalsh(M), atol=1e-11 * max(1, n))

    def test_vectors_reconstruct(self):
        rng = np.random.default_rng(4)
        M = rand_sym(rng, 5, 2.0)
        w, V = jacobi_eigh(M, vectors=True)
        np.testing.assert_allclose(V @ np.diag(w) @ V.T, M, atol=1e-12)
        np.testing.assert_allclose(V.T @ V, np.eye(5), atol=1e-12)

    def test_batched_matches_scalar(self):
        rng = np.random.default_rng(5)
        Ms = np.stack([rand_sym(rng, 4, 3.0) for _ in range(40)])
        w = jacobi_eigh(Ms)
        for i in range(40):
            np.testing.assert_allclose(w[i], jacobi_eigh(Ms[i]), atol=1e-13)

    def test_zero_matrix(self):
        w = jacobi_eigh(np.zeros((3, 3)))
        np.testing.assert_array_equal(w, np.zeros(3))


class TestWeyl(unittest.TestCase):
    def test_hand_case(self):
        lower, upper = weyl_check(
            np.eye(2), np.diag([1.0, 2.0]), np.diag([0.0, 1.0]), 2
        )
        self.assertAlmostEqual(lower, 1.0, places=12)
        self.assertAlmostEqual(upper, 0.0, places=12)

    def test_zero_c(self):
        rng = np.random.default_rng(6)
        B = rand_sym(rng, 3, 2.0)
        for q in (1, 2, 3):
            lower, upper = weyl_check(np.eye(3), B, np.zeros((3, 3)), q)
            self.assertAlmostEqual(lower, 0.0, places=10)
            self.assertAlmostEqual(upper, 0.0, places=10)

    def test_random_sandwich(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            B = rand_sym(rng, 4, 3.0)
            C = rand_sym(rng, 4, 3.0)
            q = int(rng.integers(1, 5))
            lower, upper = weyl_check(np.eye(4), B, C, q)
            self.assertGreaterEqual(lower, -1e-10)
            self.assertGreaterEqual(upper, -1e-10)


def fd_second(func, E1, E2, h=1e-4):
    """Central second difference of func(B) in directions E1, E2."""
    return (
        func(h * E1 + h * E2)
        - func(h * E1 - h * E2)
        - func(-h * E1 + h * E2)
        + func(-h * E1 - h * E2)
    ) / (4.0 * h * h)


def sym_basis(n, j, k):
    E = np.zeros((n, n))
    E[j, k] += 0.5
    E[k, j] += 0.5
    return E


class TestSpectralDerivs(unittest.TestCase):
    def test_grad_lambda_sparsity(self):
        d = spectral_derivs(2, np.array([1.0, 2.0, 4.0]))
        G = d.grad_lambda[2]
        self.assertEqual(G[2, 2], 1.0)
        self.assertEqual(np.count_nonzero(G), 1)
        self.assertEqual(d.grad_lambda_A[2][2, 2], 4.0)

    def test_unsorted_diagonal(self):
        # lam_1 of diag(5, 1) lives in slot 2
        d = spectral_derivs(1, np.array([5.0, 1.0]))
        self.assertEqual(d.grad_lambda[0][1, 1], 1.0)
        self.assertEqual(d.grad_lambda[1][0, 0], 1.0)

    def test_hess_lambda_hand_value(self):
        d = spectral_derivs(2, np.array([1.0, 2.0, 4.0]))
        self.assertAlmostEqual(d.hess_lambda[2][0, 2, 2, 0], 1.0 / 6.0, places=13)

    def test_hess_sigma_hand_values(self):
        d = spectral_derivs(2, np.array([1.0, 2.0, 3.0]))
        self.assertEqual(d.hess_sigma[0, 0, 1, 1], 1.0)
        self.assertEqual(d.hess_sigma[0, 1, 0, 1], -0.5)
        self.assertEqual(d.hess_sigma[0, 1, 1, 0], -0.5)
        self.assertEqual(d.hess_sigma[0, 1, 2, 2], 0.0)

    def test_degenerate_raises_with_pair(self):
        with self.assertRaises(DegenerateSpectrumError) as cm:
            spectral_derivs(2, np.array([1.0, 1.0 + 1e-9, 3.0]))
        self.assertEqual(cm.exception.pair, (1, 2))

    def test_degenerate_skip_fills_nan(self):
        d = spectral_derivs(2, np.array([1.0, 1.0, 3.0]), skip_degenerate=True)
        self.assertTrue(np.all(np.isnan(d.hess_lambda[0])))
        self.assertTrue(np.all(np.isnan(d.hess_lambda[1])))
        self.assertFalse(np.any(np.isnan(d.hess_lambda[2])))
        # sigma blocks stay finite at ties
        self.assertTrue(np.all(np.isfinite(d.hess_sigma)))

    def test_finite_difference_agreement(self):
        rng = np.random.default_rng(8)
        h = 1e-4
        checked = 0
        while checked < 30:
            n = int(rng.integers(2, 5))
            mu = np.sort(rng.uniform(-3, 3, n))
            if np.min(np.diff(mu)) < 0.5:
                continue
            checked += 1
            p = int(rng.integers(1, n + 1))
            D = np.diag(mu)
            d = spectral_derivs(p, mu)

            def lam_q(dB, q):
                return np.linalg.eigvalsh(D + dB)[q]

            def sig(dB):
                return sigma(p, np.linalg.eigvalsh(D + dB))

            for j in range(n):
                for k in range(j, n):
                    E1 = sym_basis(n, j, k)
                    fd_g = (sig(h * E1) - sig(-h * E1)) / (2 * h)
                    an_g = np.sum(d.grad_sigma * E1)
                    self.assertLess(abs(fd_g - an_g), 1e-6)
                    for q in range(n):
                        fd_l = (lam_q(h * E1, q) - lam_q(-h * E1, q)) / (2 * h)
                        an_l = np.sum(d.grad_lambda[q] * E1)
                        self.assertLess(abs(fd_l - an_l), 1e-6)
                    for l in range(n):
                        for m in range(l, n):
                            E2 = sym_basis(n, l, m)
                            fd_h = fd_second(sig, E1, E2, h)
                            an_h = np.einsum(
                                "jk,jklm,lm->", E1, d.hess_sigma, E2
                            )
                            self.assertLess(abs(fd_h - an_h), 1e-6)
                            for q in range(n):
                                fd_hl = fd_second(
                                    lambda dB: lam_q(dB, q), E1, E2, h
                                )
                                an_hl = np.einsum(
                                    "jk,jklm,lm->", E1, d.hess_lambda[q], E2
                                )
                                self.assertLess(abs(fd_hl - an_hl), 1e-6)


class TestLinearization(unittest.TestCase):
    def test_hand_case(self):
        out = linearization(2, np.eye(3), np.diag([1.0, 2.0, 3.0]))
        ref = np.diag([5.0, 4.0, 3.0]) / (2.0 * np.sqrt(11.0))
        np.testing.assert_allclose(out.F, ref, atol=1e-12)

    def test_identity_case(self):
        for n in (2, 3, 4):
            out = linearization(n, np.eye(n), np.eye(n))
            np.testing.assert_allclose(out.F, np.eye(n) / n, atol=1e-12)

    def test_trace_lower_bound(self):
        from math import comb

        rng = np.random.default_rng(9)
        for _ in range(100):
            n = int(rng.integers(2, 6))
            p = int(rng.integers(1, n + 1))
            B = rand_sym(rng, n, 2.0) + 2 * n * np.eye(n)
            lam = eigs(Pencil(np.eye(n), B))
            if sigma(p, lam) <= 0:
                continue
            out = linearization(p, np.eye(n), B)
            self.assertGreaterEqual(out.trace_F, comb(n, p) ** (1.0 / p) - 1e-10)
            # F symmetric positive definite
            self.assertGreater(np.linalg.eigvalsh(out.F)[0], 0.0)

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(10)
        h = 1e-5
        for _ in range(20):
            n = int(rng.integers(2, 5))
            p = int(rng.integers(1, n + 1))
            g_inv = rand_spd(rng, n)
            B = rand_sym(rng, n, 1.0) + 2 * n * np.linalg.inv(g_inv)
            out = linearization(p, g_inv, B)

            def val(dB):
                lam = eigs(Pencil(g_inv, B + dB))
                return sigma(p, lam) ** (1.0 / p)

            for j in range(n):
                for k in range(j, n):
                    E = sym_basis(n, j, k)
                    fd = (val(h * E) - val(-h * E)) / (2 * h)
                    self.assertLess(abs(fd - np.sum(out.F * E)), 1e-6)

    def test_inadmissible_rejected(self):
        with self.assertRaises(AdmissibilityError):
            linearization(2, np.eye(3), np.diag([-1.0, 1.0, 1.0]))


class TestSchurHorn(unittest.TestCase):
    def test_hand_case(self):
        ok, gap = schur_horn_check(np.array([[2.0, 1.0], [1.0, 2.0]]), 2)
        self.assertTrue(ok)
        self.assertAlmostEqual(gap, 1.0, places=12)

    def test_diagonal_gap_zero(self):
        ok, gap = schur_horn_check(np.diag([1.0, 2.0, 3.0]), 2)
        self.assertTrue(ok)
        self.assertAlmostEqual(gap, 0.0, places=12)

    def test_random_conjugations(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
            B = Q @ np.diag([1.0, 2.0, 3.0]) @ Q.T
            ok, gap = schur_horn_check(0.5 * (B + B.T), 2)
            self.assertTrue(ok)
            self.assertGreaterEqual(gap, -1e-10)

    def test_outside_closure_rejected(self):
        with self.assertRaises(AdmissibilityError):
            schur_horn_check(np.diag([-2.0, 1.0, 0.5]), 2)


class TestMidpointConcavity(unittest.TestCase):
    def test_degenerate_combination(self):
        B = np.diag([1.0, 2.0])
        self.assertAlmostEqual(
            midpoint_concavity_check(np.eye(2), B, B, 2, 0.3), 0.0, places=12
        )

    def test_hand_case(self):
        slack = midpoint_concavity_check(
            np.eye(2), np.diag([1.0, 3.0]), np.diag([3.0, 1.0]), 2, 0.5
        )
        self.assertAlmostEqual(slack, 2.0 - np.sqrt(3.0), places=12)

    def test_random_pairs(self):
        rng = np.random.default_rng(12)
        count = 0
        while count < 200:
            A = rand_spd(rng, 4)
            B1 = rand_sym(rng, 4, 1.0) + 6 * np.linalg.inv(A)
            B2 = rand_sym(rng, 4, 1.0) + 6 * np.linalg.inv(A)
            p = int(rng.integers(1, 5))
            try:
                slack = midpoint_concavity_check(A, B1, B2, p, rng.uniform())
            except AdmissibilityError:
                continue
            count += 1
            self.assertGreaterEqual(slack, -1e-10)

    def test_bad_t_rejected(self):
        with self.assertRaises(ValueError):
            midpoint_concavity_check(np.eye(2), np.eye(2), np.eye(2), 1, 1.5)


if __name__ == "__main__":
    unittest.main()
