"""Elementary symmetric polynomials, truncated minors, and their identities.

All operations accept a single n-vector or a batch of them (any leading
shape, entries on the last axis).  Scalars come back for single vectors,
arrays for batches.  Evaluation uses the prefix recurrence

    e_p(mu_1..mu_k) = e_p(mu_1..mu_{k-1}) + mu_k * e_{p-1}(mu_1..mu_{k-1})

in index order, O(n*p) per vector, never subset enumeration.
"""

import numpy as np


def _as_values(mu):
    mu = np.asarray(mu, dtype=float)
    if mu.ndim == 0 or mu.shape[-1] == 0:
        raise ValueError("vector must have length n >= 1")
    if not np.all(np.isfinite(mu)):
        raise ValueError("vector entries must be finite")
    return mu


def sigma_all(mu):
    """All values sigma_0(mu), ..., sigma_n(mu) in one prefix-recurrence pass.

    Returns an array of shape batch + (n+1,).
    """
    mu = _as_values(mu)
    n = mu.shape[-1]
    e = np.zeros(mu.shape[:-1] + (n + 1,))
    e[..., 0] = 1.0
    for k in range(n):
        x = mu[..., k]
        for j in range(min(k + 1, n), 0, -1):
            e[..., j] += x * e[..., j - 1]
    return e


def sigma(p, mu):
    """sigma_p(mu): 1 if p = 0, 0 if p < 0 or p > n, else the p-th
    elementary symmetric polynomial of the entries."""
    mu = _as_values(mu)
    n = mu.shape[-1]
    batch = mu.shape[:-1]
    if p == 0:
        out = np.ones(batch)
    elif p < 0 or p > n:
        out = np.zeros(batch)
    else:
        e = np.zeros(batch + (p + 1,))
        e[..., 0] = 1.0
        for k in range(n):
            x = mu[..., k]
            for j in range(min(k + 1, p), 0, -1):
                e[..., j] += x * e[..., j - 1]
        out = e[..., p]
    return float(out) if out.ndim == 0 else out


def _check_indices(J, n):
    J = [int(j) for j in J]
    for j in J:
        if not 1 <= j <= n:
            raise ValueError(f"index {j} out of range [1, {n}]")
    return J


def sigma_trunc(p, mu, J):
    """sigma_p(mu | j_1 ... j_m) for a 1-based index list J.

    Zero when J repeats an index; otherwise sigma_p of mu with the listed
    entries zeroed, which equals sigma_p over the complementary entries.
    """
    mu = _as_values(mu)
    n = mu.shape[-1]
    J = _check_indices(J, n)
    if len(J) != len(set(J)):
        zero = np.zeros(mu.shape[:-1])
        return float(zero) if zero.ndim == 0 else zero
    masked = mu.copy()
    for j in J:
        masked[..., j - 1] = 0.0
    return sigma(p, masked)


def _residual(lhs, rhs):
    """|lhs - rhs|, relative once either side exceeds 1 in magnitude."""
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    scale = np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
    return np.abs(lhs - rhs) / scale


def identity_residuals(p, mu, expansion_indices=None):
    """Residuals of the full identity family at (p, mu).

    Returns a map name -> residual (scalar for a single vector, array for a
    batch).  Covered identities:

    * ``recurrence_j{j}``      sigma_p = mu_j sigma_{p-1}(mu|j) + sigma_p(mu|j)
    * ``minor_sum``            sum_k sigma_p(mu|k) = (n-p) sigma_p
    * ``weighted_minor_sum``   sum_k mu_k sigma_p(mu|k) = (p+1) sigma_{p+1}
    * ``square_weighted_minor_sum``
        sum_k mu_k^2 sigma_p(mu|k) = sigma_1 sigma_{p+1} - (p+2) sigma_{p+2}
    * ``expansion``            the full multi-index expansion of sigma_p for
                               the supplied distinct index list (default: all
                               of 1..n)
    * ``minor_difference_{j1}_{j2}``
        sigma_{p-1}(mu|j1) - sigma_{p-1}(mu|j2)
            = (mu_{j2} - mu_{j1}) sigma_{p-2}(mu|j1 j2)
    """
    mu = _as_values(mu)
    n = mu.shape[-1]
    single = mu.ndim == 1

    sp = sigma(p, mu)
    out = {}

    for j in range(1, n + 1):
        lhs = sp
        rhs = mu[..., j - 1] * sigma_trunc(p - 1, mu, [j]) + sigma_trunc(p, mu, [j])
        out[f"recurrence_j{j}"] = _residual(lhs, rhs)

    minors = np.stack([sigma_trunc(p, mu, [k]) for k in range(1, n + 1)], axis=-1)
    out["minor_sum"] = _residual(minors.sum(axis=-1), (n - p) * sp)
    out["weighted_minor_sum"] = _residual(
        (mu * minors).sum(axis=-1), (p + 1) * sigma(p + 1, mu)
    )
    out["square_weighted_minor_sum"] = _residual(
        (mu**2 * minors).sum(axis=-1),
        sigma(1, mu) * sigma(p + 1, mu) - (p + 2) * sigma(p + 2, mu),
    )

    if expansion_indices is None:
        idx = list(range(1, n + 1))
    else:
        idx = _check_indices(expansion_indices, n)
        if len(idx) != len(set(idx)):
            raise ValueError("expansion indices must be distinct")
    m = len(idx)
    prod = np.ones(mu.shape[:-1])
    rhs = np.asarray(
        np.prod(mu[..., [j - 1 for j in idx]], axis=-1)
        * sigma_trunc(p - m, mu, idx)
        + sigma_trunc(p, mu, idx[:1]),
        dtype=float,
    )
    for q in range(1, m):
        prod = prod * mu[..., idx[q - 1] - 1]
        rhs = rhs + prod * sigma_trunc(p - q, mu, idx[: q + 1])
    out["expansion"] = _residual(sp, rhs)

    for j1 in range(1, n + 1):
        for j2 in range(j1 + 1, n + 1):
            lhs = sigma_trunc(p - 1, mu, [j1]) - sigma_trunc(p - 1, mu, [j2])
            rhs = (mu[..., j2 - 1] - mu[..., j1 - 1]) * sigma_trunc(
                p - 2, mu, [j1, j2]
            )
            out[f"minor_difference_{j1}_{j2}"] = _residual(lhs, rhs)

    if single:
        out = {k: float(v) for k, v in out.items()}
    return out


def sigma_brute(p, mu):
    """Subset-enumeration oracle for sigma_p; exponential, test use only."""
    from itertools import combinations

    mu = np.asarray(mu, dtype=float)
    n = len(mu)
    if p == 0:
        return 1.0
    if p < 0 or p > n:
        return 0.0
    return float(sum(np.prod([mu[i] for i in c]) for c in combinations(range(n), p)))
