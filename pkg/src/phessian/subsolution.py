"""Explicit exponential-bump subsolutions on ball domains and the key lemma.

The construction takes a defining function u (u < 0 inside, 0 on the
boundary, admissible Hessian), a boundary datum psi extended inside with
admissible Hessian, and a positive right-hand factor phi_tilde(x, t)
non-decreasing in t, and produces

    v = psi + A (e^{B u} - 1)

with explicit constants A, B such that

    sigma_p^{1/p}(lam(D^2 v)) >= phi_tilde(x, v) (1 + |Dv| + |v|^alpha)

holds on the closed ball.  Everything is evaluated on a uniform Cartesian
grid over the bounding box; admissibility and the final slack are checked
on nodes at distance >= 2h inside the ball where the central-difference
Hessians are trustworthy.

The key-lemma checker evaluates the concave-function inequality

    sum_j df_j|_nu (mu_j - nu_j) >= delta sum_j df_j - (R + |mu - delta 1|)
                                     min_j df_j + a - f(nu)

for f = sigma_p^{1/p}, with the level-set/ball hypothesis decided by
randomized ray sampling (a semi-decision: sampling can only certify
"holds on all sampled rays").
"""

from dataclasses import dataclass

import numpy as np

from .cone import ConeSpec, INTERIOR, classify, classify_batch
from .errors import AdmissibilityError, ConstructionError
from .spectral import jacobi_eigh
from .symfun import _as_values, sigma, sigma_trunc


def rank_one_sigma(mu, B, nu, p):
    """Both sides of the rank-one update identity

        sigma_p(lam(diag(mu) + B nu nu^T)) =
            sigma_p(mu) + B sum_j nu_j^2 sigma_{p-1}(mu|j).

    The left side goes through the eigensolver, the right side through
    sigma-minors; agreement within 1e-9 (relative past unit size) is
    asserted before returning (lhs, rhs).
    """
    mu = _as_values(mu)
    nu = np.asarray(nu, dtype=float)
    n = len(mu)
    M = np.diag(mu) + B * np.outer(nu, nu)
    lhs = sigma(p, jacobi_eigh(M))
    rhs = sigma(p, mu) + B * sum(
        nu[j] ** 2 * sigma_trunc(p - 1, mu, [j + 1]) for j in range(n)
    )
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs), abs(rhs)), (lhs, rhs)
    return float(lhs), float(rhs)


@dataclass(frozen=True)
class BallProblem:
    """Ball-domain data for the exponential-bump construction.

    psi, u are callables taking an (N, n) array of points; phi_tilde takes
    (points, t) with t an (N,) array.  u must be a defining function of
    the ball (negative inside, zero on the boundary) with admissible
    Hessian; psi needs lam(D^2 psi) in the closed cone.
    """

    n: int
    radius: float
    resolution: int
    p: int
    alpha: float
    psi: callable
    phi_tilde: callable
    u: callable

    def __post_init__(self):
        if not 1 <= self.p <= self.n:
            raise ValueError("need 1 <= p <= n")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.radius <= 0 or self.resolution < 9:
            raise ValueError("need positive radius and resolution >= 9")


@dataclass(frozen=True)
class SubsolutionResult:
    A: float
    B: float
    eps1: float
    eps2: float
    v: np.ndarray          # grid field, shape (resolution,)*n
    worst_slack: float


def _grid_hessian(f, h):
    """Central-difference gradient and Hessian of a grid field (one-sided
    at the box edge).  Returns (grad (n,)+shape, hess (n,n)+shape)."""
    grads = np.gradient(f, h, edge_order=2)
    if f.ndim == 1:
        grads = [grads]
    n = f.ndim
    hess = np.empty((n, n) + f.shape)
    for i in range(n):
        gi = np.gradient(grads[i], h, edge_order=2)
        if n == 1:
            gi = [gi]
        for j in range(n):
            hess[i, j] = gi[j]
    hess = 0.5 * (hess + np.swapaxes(hess, 0, 1))
    return np.stack(grads), hess


def _ball_grid(problem):
    r, res, n = problem.radius, problem.resolution, problem.n
    axis = np.linspace(-r, r, res)
    h = axis[1] - axis[0]
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    dist = np.linalg.norm(pts, axis=-1)
    return pts, dist, h


def construct(problem):
    """Run the construction and certify it nodewise.

    Extracts eps1 = min sigma_p(lam(D^2 u)), eps2 = min of the top-entry-
    deleted minor sigma_{p-1}(lam|n), the majorant constants C1 (max of
    phi_tilde(x, psi)) and C2 (1 + max|Dpsi| + max|psi|^alpha), picks A
    and B by the p >= 2 or p = 1 branch, and reports the worst slack of
    the target differential inequality over the trusted nodes.
    """
    n, p, alpha = problem.n, problem.p, problem.alpha
    pts, dist, h = _ball_grid(problem)
    shape = (problem.resolution,) * n
    in_ball = dist <= problem.radius + 1e-12
    trusted = dist <= problem.radius - 2 * h

    u = problem.u(pts).reshape(shape)
    psi = problem.psi(pts).reshape(shape)

    du, d2u = _grid_hessian(u, h)
    dpsi, d2psi = _grid_hessian(psi, h)

    flat_hess_u = np.moveaxis(d2u.reshape(n, n, -1), -1, 0)
    lam_u = jacobi_eigh(flat_hess_u[in_ball])
    codes = classify_batch(lam_u, ConeSpec(n, p))
    if np.any(codes != 2):
        node = int(np.flatnonzero(in_ball)[np.argmax(codes != 2)])
        raise ConstructionError(
            "defining function u is not admissible at a grid node",
            node=node,
        )
    if np.any(u.ravel()[in_ball & (dist < problem.radius - h)] >= 0):
        raise ConstructionError("u must be negative inside the ball")

    eps1 = float(np.min(sigma(p, lam_u)))
    eps2 = float(np.min(sigma(p - 1, lam_u[:, : n - 1]))) if n > 1 else 1.0

    flat_hess_psi = np.moveaxis(d2psi.reshape(n, n, -1), -1, 0)
    lam_psi = jacobi_eigh(flat_hess_psi[in_ball])
    psi_codes = classify_batch(lam_psi, ConeSpec(n, p))
    if np.any(psi_codes == 0):
        node = int(np.flatnonzero(in_ball)[np.argmax(psi_codes == 0)])
        raise ConstructionError(
            "extension psi leaves the closed cone at a grid node", node=node
        )

    psi_flat = psi.ravel()[in_ball]
    dpsi_norm = np.linalg.norm(dpsi.reshape(n, -1), axis=0)[in_ball]
    C1 = float(np.max(problem.phi_tilde(pts[in_ball], psi_flat)))
    C2 = float(1.0 + np.max(dpsi_norm) + np.max(np.abs(psi_flat) ** alpha))

    du_norm = np.linalg.norm(du.reshape(n, -1), axis=0)
    max_du = float(np.max(du_norm[in_ball]))
    min_u = float(np.min(u.ravel()[in_ball]))
    if p >= 2:
        B = C1**p * 2 ** (p - 1) / eps2 * max_du ** (p - 2)
        A = C2 ** (1.0 / alpha) + (
            C1 * 2 ** ((2 * p - 1) / p) * eps1 ** (-1.0 / p) / B
            * np.exp(-B * min_u)
        ) ** (1.0 / (1.0 - alpha))
    else:
        B = C1**2 / (2.0 * eps1 * eps2)
        A = C2 ** (1.0 / alpha) + (
            4.0 / eps1 * C1 / B * np.exp(-B * min_u)
        ) ** (1.0 / (1.0 - alpha))

    v = psi + A * (np.exp(B * u) - 1.0)
    dv, d2v = _grid_hessian(v, h)
    flat_hess_v = np.moveaxis(d2v.reshape(n, n, -1), -1, 0)
    lam_v = jacobi_eigh(flat_hess_v[trusted])
    v_codes = classify_batch(lam_v, ConeSpec(n, p))
    if np.any(v_codes != 2):
        node = int(np.flatnonzero(trusted)[np.argmax(v_codes != 2)])
        raise ConstructionError(
            "constructed v loses admissibility at a grid node", node=node
        )

    v_flat = v.ravel()[trusted]
    dv_norm = np.linalg.norm(dv.reshape(n, -1), axis=0)[trusted]
    lhs = sigma(p, lam_v) ** (1.0 / p)
    rhs = problem.phi_tilde(pts[trusted], v_flat) * (
        1.0 + dv_norm + np.abs(v_flat) ** alpha
    )
    worst = float(np.min(lhs - rhs))
    return SubsolutionResult(float(A), float(B), eps1, eps2, v, worst)


@dataclass(frozen=True)
class KeyLemmaConfig:
    n: int
    p: int
    delta: float
    R: float
    a: float
    mu: np.ndarray
    nu: np.ndarray


def _f_grad(p, nu):
    """Gradient of f = sigma_p^{1/p} at nu (in the open cone)."""
    sp = sigma(p, nu)
    minors = np.array(
        [sigma_trunc(p - 1, nu, [j]) for j in range(1, len(nu) + 1)]
    )
    return (1.0 / p) * sp ** (1.0 / p - 1.0) * minors


def _level_set_hypothesis(n, p, delta, R, a, mu, directions=10**4, seed=0):
    """Sample rays from mu - delta*1 into the positive orthant, locate the
    crossing of the level set {sigma_p^{1/p} = a}, and test whether every
    crossing stays inside the ball of radius R.  False means 'undetermined
    or failed', never a certified violation of the lemma.
    """
    rng = np.random.default_rng(seed)
    base = mu - delta * np.ones(n)
    xi = rng.uniform(0.0, 1.0, (directions, n)) + 1e-3
    xi /= np.linalg.norm(xi, axis=-1, keepdims=True)
    spec = ConeSpec(n, p)

    def fvals(t):
        pts = base[None, :] + t[:, None] * xi
        inside = classify_batch(pts, spec) == 2
        s = np.where(inside, sigma(p, pts), 0.0)
        return np.where(inside, np.maximum(s, 0.0) ** (1.0 / p), -np.inf)

    # bracket: find hi with f >= a on every ray (f -> +inf along the ray)
    hi = np.full(directions, 1.0)
    for _ in range(200):
        bad = fvals(hi) < a
        if not np.any(bad):
            break
        hi = np.where(bad, 2.0 * hi, hi)
    else:
        return False
    lo = np.zeros(directions)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        above = fvals(mid) >= a
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    crossings = base[None, :] + hi[:, None] * xi
    return bool(np.all(np.linalg.norm(crossings, axis=-1) < R))


def key_lemma_check(cfg, directions=10**4, seed=0):
    """(lhs, rhs, hypothesis_ok) of the key lemma at cfg with f = sigma_p^{1/p}.

    lhs >= rhs is guaranteed by the lemma whenever hypothesis_ok; a False
    hypothesis_ok only means the sampling failed to certify the level-set
    hypothesis.
    """
    mu = _as_values(cfg.mu)
    nu = _as_values(cfg.nu)
    if cfg.delta <= 0 or cfg.R <= 0 or cfg.a <= 0:
        raise ValueError("delta, R, a must be positive")
    if classify(nu, ConeSpec(cfg.n, cfg.p)).region != INTERIOR:
        raise AdmissibilityError(f"nu = {nu} is not in the open cone", lam=nu)
    grad = _f_grad(cfg.p, nu)
    f_nu = sigma(cfg.p, nu) ** (1.0 / cfg.p)
    shift = np.linalg.norm(mu - cfg.delta * np.ones(cfg.n))
    lhs = float(np.dot(grad, mu - nu))
    rhs = float(
        cfg.delta * np.sum(grad)
        - (cfg.R + shift) * np.min(grad)
        + cfg.a
        - f_nu
    )
    ok = _level_set_hypothesis(
        cfg.n, cfg.p, cfg.delta, cfg.R, cfg.a, mu, directions, seed
    )
    return lhs, rhs, ok


def matrix_form_sides(p, delta, R, a, C, D):
    """Matrix-form sides of the key lemma for symmetric C, D:

        lhs = sum_jk F^{jk} (c_jk - d_jk)
        rhs = delta * tr(F) + a - f(lam(D))
              - (R + |lam(C) - delta 1|) lam_1(F)

    with F the gradient of f(lam(I, .)) = sigma_p^{1/p} at D, assembled by
    diagonalizing D and conjugating the diagonal-frame gradient back.
    """
    C = np.asarray(C, dtype=float)
    D = np.asarray(D, dtype=float)
    n = D.shape[-1]
    nu, Q = jacobi_eigh(D, vectors=True)
    if classify(nu, ConeSpec(n, p)).region != INTERIOR:
        raise AdmissibilityError(f"lam(D) = {nu} not in the open cone", lam=nu)
    grad = _f_grad(p, nu)
    F = Q @ np.diag(grad) @ Q.T
    lam_C = jacobi_eigh(C)
    f_nu = sigma(p, nu) ** (1.0 / p)
    lhs = float(np.sum(F * (C - D)))
    rhs = float(
        delta * np.trace(F)
        + a
        - f_nu
        - (R + np.linalg.norm(lam_C - delta)) * np.min(grad)
    )
    return lhs, rhs
