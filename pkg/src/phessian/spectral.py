"""Eigenvalue pencils and the exact derivative formulas at diagonal points.

The eigenvalue map lam(A, B) takes a positive definite symmetric A and a
symmetric B to the spectrum of A*B, computed by congruence: with the
Cholesky factorization A = P^T P the spectrum of A*B equals that of the
symmetric matrix P B P^T, which a cyclic Jacobi sweep diagonalizes.  The
Jacobi solver is written batched (any leading shape) because the grid
solver calls it on every node at once.

On top of the map sit the closed-form first and second derivatives of
lam_q and of sigma_p(lam) at (A, B) = (I, D) with D diagonal, the Weyl
sandwich, the Schur-Horn diagonal comparison, the linearization matrix
F^{jk} of sigma_p^{1/p}, and midpoint concavity of sigma_p^{1/p} on the
matrix cone.
"""

from dataclasses import dataclass

import numpy as np

from .cone import BOUNDARY, ConeSpec, INTERIOR, classify
from .errors import AdmissibilityError, DegenerateSpectrumError
from .symfun import sigma, sigma_trunc


def _check_symmetric(M, name="matrix"):
    M = np.asarray(M, dtype=float)
    if M.ndim < 2 or M.shape[-1] != M.shape[-2]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    scale = max(1.0, float(np.max(np.abs(M))) if M.size else 0.0)
    skew = np.max(np.abs(M - np.swapaxes(M, -1, -2)))
    if skew > 1e-13 * scale:
        raise ValueError(f"{name} not symmetric: asymmetry {skew:.3e}")
    return 0.5 * (M + np.swapaxes(M, -1, -2))


@dataclass(frozen=True)
class SymMatrix:
    """Dense symmetric matrix; symmetry enforced to 1e-13 relative."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "entries", _check_symmetric(self.entries, "entries")
        )

    @property
    def n(self):
        return self.entries.shape[-1]


def _as_matrix(M):
    if isinstance(M, SymMatrix):
        return M.entries
    return _check_symmetric(M)


@dataclass(frozen=True)
class Pencil:
    """Pair (A, B) with A symmetric positive definite, B symmetric."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = _as_matrix(self.A)
        B = _as_matrix(self.B)
        if A.shape != B.shape:
            raise ValueError("A and B must have the same shape")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        _cholesky_spd(A)  # raises if not positive definite


def _cholesky_spd(A):
    """Cholesky of a (batch of) SPD matrices; ValueError when not SPD."""
    try:
        return np.linalg.cholesky(A)
    except np.linalg.LinAlgError as exc:
        raise ValueError("matrix is not positive definite") from exc


def jacobi_eigh(M, vectors=False, tol_scale=1e-13, max_sweeps=50):
    """Batched cyclic Jacobi diagonalization of symmetric matrices.

    Fixed pivot order (row-cyclic), off-diagonal convergence at
    tol_scale * Frobenius norm per matrix, early exit once every matrix in
    the batch has converged.  Returns eigenvalues sorted ascending and,
    when requested, the matching orthonormal eigenvector columns.
    """
    A = np.array(M, dtype=float)
    n = A.shape[-1]
    batch = A.shape[:-2]
    tol = tol_scale * np.maximum(np.sqrt(np.sum(A * A, axis=(-2, -1))), 1e-300)
    V = np.broadcast_to(np.eye(n), A.shape).copy() if vectors else None

    def offnorm(A):
        off = A.copy()
        idx = np.arange(n)
        off[..., idx, idx] = 0.0
        return np.sqrt(np.sum(off * off, axis=(-2, -1)))

    for _ in range(max_sweeps):
        if np.all(offnorm(A) <= tol):
            break
        for i in range(n - 1):
            for j in range(i + 1, n):
                aij = A[..., i, j]
                active = np.abs(aij) > 1e-300
                if not np.any(active):
                    continue
                aii = A[..., i, i]
                ajj = A[..., j, j]
                theta = np.where(
                    active, (ajj - aii) / np.where(active, 2 * aij, 1.0), 0.0
                )
                sgn = np.where(theta >= 0, 1.0, -1.0)
                t = sgn / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # rotate rows/columns i and j
                rowi = A[..., i, :].copy()
                rowj = A[..., j, :].copy()
                A[..., i, :] = c[..., None] * rowi - s[..., None] * rowj
                A[..., j, :] = s[..., None] * rowi + c[..., None] * rowj
                coli = A[..., :, i].copy()
                colj = A[..., :, j].copy()
                A[..., :, i] = c[..., None] * coli - s[..., None] * colj
                A[..., :, j] = s[..., None] * coli + c[..., None] * colj
                if vectors:
                    vi = V[..., :, i].copy()
                    vj = V[..., :, j].copy()
                    V[..., :, i] = c[..., None] * vi - s[..., None] * vj
                    V[..., :, j] = s[..., None] * vi + c[..., None] * vj

    idx = np.arange(n)
    w = A[..., idx, idx]
    order = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    if vectors:
        V = np.take_along_axis(V, order[..., None, :], axis=-1)
        return w, V
    return w


def eigs(pencil):
    """Eigenvalues of the pencil, ascending: spectrum of A*B via the
    congruence P B P^T with A = P^T P."""
    if not isinstance(pencil, Pencil):
        pencil = Pencil(*pencil)
    L = _cholesky_spd(pencil.A)
    P = np.swapaxes(L, -1, -2)
    M = P @ pencil.B @ np.swapaxes(P, -1, -2)
    return jacobi_eigh(M)


def eigs_batch(A, B):
    """Batched pencil eigenvalues without per-call validation (solver path)."""
    L = _cholesky_spd(A)
    P = np.swapaxes(L, -1, -2)
    M = P @ B @ np.swapaxes(P, -1, -2)
    return jacobi_eigh(M)


def weyl_check(A, B, C, q):
    """Weyl sandwich slacks for the q-th (1-based) pencil eigenvalue:

        lam_q(A,B) + lam_1(A,C) <= lam_q(A,B+C) <= lam_q(A,B) + lam_n(A,C)

    Returns (lower_slack, upper_slack), both >= 0 up to roundoff.
    """
    A = _as_matrix(A)
    B = _as_matrix(B)
    C = _as_matrix(C)
    n = A.shape[-1]
    if not 1 <= q <= n:
        raise ValueError(f"need 1 <= q <= n, got q={q}")
    lam_B = eigs(Pencil(A, B))
    lam_C = eigs(Pencil(A, C))
    lam_BC = eigs(Pencil(A, B + C))
    lower = lam_BC[q - 1] - lam_B[q - 1] - lam_C[0]
    upper = lam_B[q - 1] + lam_C[-1] - lam_BC[q - 1]
    return float(lower), float(upper)


@dataclass(frozen=True)
class SpectralDerivs:
    """Closed-form derivatives of lam_q and sigma_p(lam) at (A,B) = (I,D).

    Index conventions: grad_lambda[q-1][j,k] is d lam_q / d b_jk;
    hess_lambda[q-1][j,k,l,m] is d^2 lam_q / (d b_lm d b_jk); sigma blocks
    drop the q index.  All arrays use 0-based numpy indexing for the
    matrix slots.
    """

    grad_lambda: np.ndarray      # (n, n, n)
    grad_lambda_A: np.ndarray    # (n, n, n)
    hess_lambda: np.ndarray      # (n, n, n, n, n); NaN blocks when skipped
    grad_sigma: np.ndarray       # (n, n)
    grad_sigma_A: np.ndarray     # (n, n)
    hess_sigma: np.ndarray       # (n, n, n, n)


def spectral_derivs(p, D, gap_tol=1e-6, skip_degenerate=False):
    """Derivative formulas at the diagonal point (A, B) = (I, diag(D)).

    hess_lambda needs every eigenvalue it references to be simple (gap >=
    gap_tol); with skip_degenerate the offending q-blocks are filled with
    NaN instead of raising.  The sigma blocks use the minor closed forms,
    finite at ties, so they carry no gap requirement.
    """
    mu = np.asarray(D, dtype=float)
    if mu.ndim != 1:
        raise ValueError("D must be a vector of diagonal entries")
    n = len(mu)

    grad_lambda = np.zeros((n, n, n))
    grad_lambda_A = np.zeros((n, n, n))
    order = np.argsort(mu, kind="stable")
    # lam_q is the q-th smallest; at a diagonal matrix it sits in slot
    # order[q-1] of the diagonal
    for q in range(n):
        s = order[q]
        grad_lambda[q, s, s] = 1.0
        grad_lambda_A[q, s, s] = mu[s]

    hess_lambda = np.zeros((n, n, n, n, n))
    for q in range(n):
        s = order[q]
        gaps = np.abs(mu - mu[s])
        gaps[s] = np.inf
        if np.min(gaps) < gap_tol:
            other = int(np.argmin(gaps))
            if skip_degenerate:
                hess_lambda[q] = np.nan
                continue
            raise DegenerateSpectrumError(
                f"eigenvalue gap {np.min(gaps):.3e} below {gap_tol:.1e} "
                f"between entries {s + 1} and {other + 1}",
                pair=(min(s, other) + 1, max(s, other) + 1),
            )
        for k in range(n):
            if k == s:
                continue
            val = 1.0 / (2.0 * (mu[s] - mu[k]))
            hess_lambda[q, s, k, s, k] = val   # j=l=q, k=m != j
            hess_lambda[q, s, k, k, s] = val   # j=q, m=q? (j=m=q,k=l) pattern
            hess_lambda[q, k, s, k, s] = val   # k=m=q, j=l != k
            hess_lambda[q, k, s, s, k] = val   # k=l=q, j=m != k

    grad_sigma = np.zeros((n, n))
    grad_sigma_A = np.zeros((n, n))
    for j in range(n):
        minor = sigma_trunc(p - 1, mu, [j + 1])
        grad_sigma[j, j] = minor
        grad_sigma_A[j, j] = mu[j] * minor

    hess_sigma = np.zeros((n, n, n, n))
    for j in range(n):
        for l in range(n):
            if l != j:
                pair = sigma_trunc(p - 2, mu, [j + 1, l + 1])
                hess_sigma[j, j, l, l] = pair          # doubled diagonal
                hess_sigma[j, l, j, l] = -0.5 * pair   # (j=l', k=m')
                hess_sigma[j, l, l, j] = -0.5 * pair   # transposed pair
    return SpectralDerivs(
        grad_lambda, grad_lambda_A, hess_lambda,
        grad_sigma, grad_sigma_A, hess_sigma,
    )


@dataclass(frozen=True)
class LinearizationField:
    """Linearization coefficients F^{jk} of sigma_p^{1/p}(lam(g_inv, .))
    and their trace."""

    F: np.ndarray
    trace_F: float


def _diag_linearization(p, mu):
    """The diagonal-frame factor (1/p) sigma_p^{1/p-1} diag(sigma_{p-1}(mu|j))."""
    sp = sigma(p, mu)
    minors = np.array([sigma_trunc(p - 1, mu, [j]) for j in range(1, len(mu) + 1)])
    return (1.0 / p) * sp ** (1.0 / p - 1.0) * minors


def linearization(p, g_inv, B):
    """F^{jk} = d sigma_p^{1/p}(lam(g_inv, .)) / d b_jk at B.

    Reduce with the Cholesky congruence g_inv = P^T P, diagonalize
    P B P^T = Q D Q^T, and pull the diagonal-frame derivative back through
    S = Q^T P: F = S^T G S.  Requires lam in the open cone; positive
    definiteness of F is asserted before returning.
    """
    g_inv = _as_matrix(g_inv)
    B = _as_matrix(B)
    n = g_inv.shape[-1]
    L = _cholesky_spd(g_inv)
    P = L.T
    mu, Q = jacobi_eigh(P @ B @ P.T, vectors=True)
    if classify(mu, ConeSpec(n, p)).region != INTERIOR:
        raise AdmissibilityError(
            f"lam(g_inv, B) = {mu} is not in the open cone (n={n}, p={p})",
            lam=mu,
        )
    G = _diag_linearization(p, mu)
    S = Q.T @ P
    F = S.T @ (G[:, None] * S)
    F = 0.5 * (F + F.T)
    _cholesky_spd(F)  # minors strictly positive inside the cone => F > 0
    return LinearizationField(F, float(np.trace(F)))


def schur_horn_check(B, p):
    """Diagonal-vs-spectrum comparison: with lam(I,B) in the closed cone
    the diagonal lies there too, and sigma_p(diag) >= sigma_p(lam).

    Returns (diag_in_closure, sigma_gap).
    """
    B = _as_matrix(B)
    n = B.shape[-1]
    spec = ConeSpec(n, p)
    lam = eigs(Pencil(np.eye(n), B))
    region = classify(lam, spec).region
    if region not in (INTERIOR, BOUNDARY):
        raise AdmissibilityError(
            f"lam(I, B) = {lam} is outside the closed cone", lam=lam
        )
    d = np.diagonal(B)
    diag_in = classify(d, spec).region in (INTERIOR, BOUNDARY)
    gap = sigma(p, d) - sigma(p, lam)
    return bool(diag_in), float(gap)


def midpoint_concavity_check(A, B1, B2, p, t):
    """Concavity slack of sigma_p^{1/p}(lam(A, .)) along the segment:

        sigma_p^{1/p}(lam(A,(1-t)B1+tB2))
            - (1-t) sigma_p^{1/p}(lam(A,B1)) - t sigma_p^{1/p}(lam(A,B2))

    Both endpoints must have lam in the closed cone; the combination is
    asserted to stay there (convexity of the matrix cone).
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0,1], got {t}")
    A = _as_matrix(A)
    B1 = _as_matrix(B1)
    B2 = _as_matrix(B2)
    n = A.shape[-1]
    spec = ConeSpec(n, p)

    def root(Bx):
        lam = eigs(Pencil(A, Bx))
        if classify(lam, spec).region not in (INTERIOR, BOUNDARY):
            raise AdmissibilityError(
                f"lam = {lam} is outside the closed cone", lam=lam
            )
        return max(sigma(p, lam), 0.0) ** (1.0 / p)

    v1 = root(B1)
    v2 = root(B2)
    vmid = root((1.0 - t) * B1 + t * B2)
    return float(vmid - (1.0 - t) * v1 - t * v2)
