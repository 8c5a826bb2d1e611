"""Concavity inequalities for Hermitian quadratic forms in sigma-minors.

Three modes of one inequality family are covered, all of the shape

    - sum_{j != k} sigma_{r-2}(mu|jk) w_j conj(w_k)
        - (1-tau)/mu_n * sigma_{r-1}(mu|n) |w_n|^2
    >=  - c / sigma_r(mu) * |sum_j sigma_{r-1}(mu|j) w_j|^2
        - sum_{j<n} weight_j * sigma_{r-1}(mu|j) |w_j|^2 / (mu_n + eps - mu_j)

* ``large_mu1``:  r = n-1, c = 1, weight 2a/(n-1); holds unconditionally
  under explicit hypotheses on how negative mu_1 is (see
  ``hypothesis_check``).
* ``small_mu1``:  r = p, c = (p+1)^2, weight (1-tau); holds once mu_n
  exceeds an unspecified threshold M.
* ``theorem``:    r = n-1, c = n^2, weight (1-tau); the combined
  statement, again for mu_n >= M.

``find_threshold`` estimates the unspecified M empirically by bisection
over randomized trials with sigma_r pinned to a band.
"""

from dataclasses import dataclass

import numpy as np

from .cone import ConeSpec, classify, classify_batch
from .errors import AdmissibilityError, SearchFailureError
from .symfun import _as_values, sigma, sigma_trunc

VIOLATION_TOL = -1e-10


@dataclass(frozen=True)
class CVec:
    """Complex n-vector stored as (re, im) pairs of real vectors."""

    re: np.ndarray
    im: np.ndarray

    def __post_init__(self):
        re = _as_values(self.re)
        im = _as_values(self.im)
        if re.shape != im.shape:
            raise ValueError("re and im must have the same shape")
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    @property
    def z(self):
        return self.re + 1j * self.im


def _as_cvec(w, n):
    if isinstance(w, CVec):
        z = w.z
    else:
        z = np.asarray(w, dtype=complex)
    if z.shape[-1] != n:
        raise ValueError(f"w must have length {n}")
    if not np.all(np.isfinite(z)):
        raise ValueError("w entries must be finite")
    return z


@dataclass(frozen=True)
class ConcavityInstance:
    """One (mu, w) evaluation point plus the mode and its parameters."""

    mu: np.ndarray
    w: object          # CVec or any complex array-like
    tau: float
    eps: float
    mode: str          # large_mu1 | small_mu1 | theorem
    a: float = None    # large_mu1 only
    p: int = None      # small_mu1 only


@dataclass(frozen=True)
class ThresholdResult:
    M_hat: float
    trials: int
    worst_residual: float
    seed: int


def _mode_params(inst, n):
    """(order r, leading constant c, per-j weight factor) for the mode."""
    if inst.mode == "large_mu1":
        if n < 3:
            raise ValueError("large_mu1 mode needs n >= 3")
        if not 0.0 <= inst.tau <= 1.0:
            raise ValueError("large_mu1 mode needs tau in [0, 1]")
        beta = (1.0 - inst.tau) / (1.0 + inst.tau)
        if inst.a is None or not beta < inst.a <= n - 1:
            raise ValueError(
                f"large_mu1 mode needs a in ({beta}, {n - 1}]"
            )
        return n - 1, 1.0, 2.0 * inst.a / (n - 1)
    if inst.mode == "small_mu1":
        if inst.p is None or not 1 <= inst.p <= n:
            raise ValueError("small_mu1 mode needs p in {1,...,n}")
        if not 0.0 < inst.tau <= 0.5:
            raise ValueError("small_mu1 mode needs tau in (0, 1/2]")
        return inst.p, float((inst.p + 1) ** 2), 1.0 - inst.tau
    if inst.mode == "theorem":
        if not 0.0 < inst.tau <= 0.5:
            raise ValueError("theorem mode needs tau in (0, 1/2]")
        return n - 1, float(n**2), 1.0 - inst.tau
    raise ValueError(f"unknown mode {inst.mode!r}")


def _evaluate_batch(mu, w, r, c, weight, tau, eps):
    """Both sides of the inequality for batches mu (B,n), w complex (B,n).

    Returns (lhs, rhs) as complex arrays; the imaginary parts are
    roundoff from the Hermitian forms and should be negligible.
    """
    n = mu.shape[-1]
    minors = np.stack(
        [sigma_trunc(r - 1, mu, [j]) for j in range(1, n + 1)], axis=-1
    )
    S = np.zeros(mu.shape[:-1] + (n, n))
    for j in range(n):
        for k in range(j + 1, n):
            pair = sigma_trunc(r - 2, mu, [j + 1, k + 1])
            S[..., j, k] = pair
            S[..., k, j] = pair
    wc = np.conj(w)
    cross = np.einsum("...jk,...j,...k->...", S, w, wc)
    lhs = -cross - (1.0 - tau) / mu[..., -1] * minors[..., -1] * np.abs(
        w[..., -1]
    ) ** 2

    s_r = sigma(r, mu)
    lin = np.einsum("...j,...j->...", minors, w)
    denom = mu[..., -1:] + eps - mu[..., :-1]
    tail = np.sum(
        weight * minors[..., :-1] * np.abs(w[..., :-1]) ** 2 / denom, axis=-1
    )
    rhs = -(c / s_r) * np.abs(lin) ** 2 - tail
    return lhs, rhs


def evaluate(inst):
    """(lhs, rhs, residual = lhs - rhs) of the mode's inequality at inst.

    Preconditions: mu sorted ascending and in the open cone of the mode's
    order; parameters in the mode's ranges.
    """
    mu = _as_values(inst.mu)
    if mu.ndim != 1:
        raise ValueError("mu must be a single vector")
    n = len(mu)
    if np.any(np.diff(mu) < 0):
        raise ValueError("mu must be sorted ascending")
    if inst.eps <= 0:
        raise ValueError("eps must be positive")
    r, c, weight = _mode_params(inst, n)
    if classify(mu, ConeSpec(n, r)).region != "interior":
        raise AdmissibilityError(
            f"mu = {mu} is not in the open cone of order {r}", lam=mu
        )
    w = _as_cvec(inst.w, n)
    lhs, rhs = _evaluate_batch(
        mu[None, :], w[None, :], r, c, weight, inst.tau, inst.eps
    )
    lhs, rhs = complex(lhs[0]), complex(rhs[0])
    if max(abs(lhs.imag), abs(rhs.imag)) > 1e-10 * max(
        1.0, abs(lhs), abs(rhs)
    ):
        raise ArithmeticError("Hermitian form produced a non-real value")
    return lhs.real, rhs.real, lhs.real - rhs.real


def hypothesis_check(inst):
    """True iff the unconditional-mode hypotheses hold at inst:

    mu in Gamma_{n-1} sorted ascending, mu_n >= eps(a+beta)/(a-beta) and
    mu_1 <= -(2 sigma_{n-1}/(a-beta))^{1/(n-1)}, beta = (1-tau)/(1+tau).
    Never raises; any structural failure is just False.
    """
    try:
        mu = _as_values(inst.mu)
        n = len(mu)
        r, _, _ = _mode_params(inst, n)
        if inst.mode != "large_mu1":
            raise ValueError("hypothesis_check applies to large_mu1 mode")
    except ValueError:
        return False
    if mu.ndim != 1 or np.any(np.diff(mu) < 0) or inst.eps <= 0:
        return False
    if classify(mu, ConeSpec(n, n - 1)).region != "interior":
        return False
    beta = (1.0 - inst.tau) / (1.0 + inst.tau)
    if mu[-1] < inst.eps * (inst.a + beta) / (inst.a - beta):
        return False
    bound = (2.0 * sigma(n - 1, mu) / (inst.a - beta)) ** (1.0 / (n - 1))
    return bool(mu[0] <= -bound)


def _cone_distance_batch(mu, spec, iters=60):
    """Vectorized diagonal shift into the open cone for a batch of vectors."""
    hi = spec.n * np.max(np.abs(mu), axis=-1) + 1.0
    lo = np.zeros_like(hi)
    inside = classify_batch(mu, spec) == 2
    hi = np.where(inside, 0.0, hi)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        ok = classify_batch(mu + mid[..., None], spec) == 2
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    return hi


def _draw_trials(n, p, sigma_band, trials, seed):
    """Per-trial randomness, independent of the candidate threshold M.

    Each trial gets its own RNG stream keyed by (seed, index), so trial i
    is identical no matter how many trials run in total; shrinking the
    trial count can only remove potential violations.
    """
    shapes = np.empty((trials, n - 1))
    targets = np.empty(trials)
    tops = np.empty(trials)
    w = np.empty((trials, n), dtype=complex)
    lo_s, hi_s = sigma_band
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        shapes[i] = rng.uniform(-0.5, 1.5, n - 1)
        targets[i] = rng.uniform(lo_s, hi_s)
        tops[i] = rng.uniform()
        z = rng.normal(size=n) + 1j * rng.normal(size=n)
        w[i] = z / np.linalg.norm(z)
    if p >= 2:
        # shift each (n-1)-entry shape into the open cone of order p-1 so
        # appending a large positive top entry keeps the full vector
        # admissible
        shift = _cone_distance_batch(shapes, ConeSpec(n - 1, p - 1))
        shapes = shapes + (shift + 0.05)[:, None]
    else:
        shapes = np.abs(shapes) + 0.05
    return shapes, targets, tops, w


def _solve_scale(shapes, targets, mu_n, p, iters=80):
    """Batched bisection for t > 0 with

        sigma_p(t*shape, mu_n) = t^p sigma_p(shape)
                                 + mu_n t^{p-1} sigma_{p-1}(shape) = target.
    """
    sp = sigma(p, shapes)
    spm1 = sigma(p - 1, shapes)

    def f(t):
        return t**p * sp + mu_n * t ** (p - 1) * spm1 - targets

    hi = np.full_like(targets, 1e-6)
    for _ in range(80):
        bad = f(hi) < 0
        if not np.any(bad):
            break
        hi = np.where(bad, 2 * hi, hi)
    lo = np.zeros_like(hi)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        ok = f(mid) >= 0
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    return hi


def find_threshold(n, p, tau, eps, sigma_band, trials, seed):
    """Empirical threshold M_hat for the mu_n >= M modes by bisection.

    For a candidate M, every trial builds an admissible sorted mu with
    mu_n in [M, 1.5M] and sigma_p(mu) inside sigma_band (a scaled random
    shape for the first n-1 entries), plus a random unit complex w, and
    evaluates the order-p inequality with constant (p+1)^2.  M is bisected
    over [eps, 1e6] for the smallest value with no residual below
    -1e-10.  Deterministic for a fixed seed.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if p < 2:
        # sigma_1(mu) >= mu_n >= M leaves the band unreachable once M
        # exceeds it; the search is ill-posed
        raise ValueError("threshold search needs p >= 2")
    if not 0.0 < tau <= 0.5:
        raise ValueError("tau must lie in (0, 1/2]")
    if eps <= 0:
        raise ValueError("eps must be positive")
    spec_full = ConeSpec(n, p)
    shapes, targets, tops, w = _draw_trials(n, p, sigma_band, trials, seed)
    c = float((p + 1) ** 2)
    weight = 1.0 - tau

    def worst_at(M):
        mu_n = M * (1.0 + 0.5 * tops)
        t = _solve_scale(shapes, targets, mu_n, p)
        mu = np.concatenate([t[:, None] * shapes, mu_n[:, None]], axis=-1)
        mu = np.sort(mu, axis=-1)
        ok = classify_batch(mu, spec_full) == 2
        lhs, rhs = _evaluate_batch(mu, w, p, c, weight, tau, eps)
        res = np.where(ok, (lhs - rhs).real, np.inf)
        i = int(np.argmin(res))
        return float(res[i]), (mu[i], w[i])

    lo, hi = float(eps), 1e6
    worst_hi, witness_hi = worst_at(hi)
    if worst_hi < VIOLATION_TOL:
        raise SearchFailureError(
            f"violations persist at M = {hi:.3e}: worst residual "
            f"{worst_hi:.3e}",
            counterexample=witness_hi,
        )
    worst_lo, _ = worst_at(lo)
    if worst_lo >= VIOLATION_TOL:
        return ThresholdResult(lo, trials, worst_lo, seed)
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        worst_mid, _ = worst_at(mid)
        if worst_mid >= VIOLATION_TOL:
            hi, worst_hi = mid, worst_mid
        else:
            lo = mid
    return ThresholdResult(hi, trials, worst_hi, seed)


def sample_hypothesis_points(n, tau, eps, a, count, rng):
    """Random (mu, w) pairs satisfying the large_mu1 hypotheses.

    mu_n is drawn above its bound, the middle entries above it in
    magnitude-moderate positions, and mu_1 pushed below its (sigma-
    dependent) ceiling by rejection.
    """
    beta = (1.0 - tau) / (1.0 + tau)
    mus = np.empty((count, n))
    ws = np.empty((count, n), dtype=complex)
    k = 0
    while k < count:
        m = count - k
        mu_n = eps * (a + beta) / (a - beta) * (1.0 + rng.uniform(0, 2, m))
        mid = rng.uniform(0.1, 1.0, (m, n - 2)) * mu_n[:, None]
        mu1 = -rng.uniform(0.0, 0.99, m) * np.min(mid, axis=-1)
        mu = np.concatenate([mu1[:, None], mid, mu_n[:, None]], axis=-1)
        mu = np.sort(mu, axis=-1)
        ok = classify_batch(mu, ConeSpec(n, n - 1)) == 2
        bound = np.full(m, np.inf)
        s = sigma(n - 1, mu)
        ok &= s > 0
        bound[ok] = (2.0 * s[ok] / (a - beta)) ** (1.0 / (n - 1))
        ok &= mu[:, 0] <= -bound
        good = mu[ok]
        take = len(good)
        if take:
            mus[k : k + take] = good
            z = rng.normal(size=(take, n)) + 1j * rng.normal(size=(take, n))
            ws[k : k + take] = z / np.linalg.norm(z, axis=-1, keepdims=True)
            k += take
    return mus, ws


def residual_batch(mu, w, mode, tau, eps, a=None, p=None):
    """Batched residuals lhs - rhs without per-instance admissibility
    checks (callers guarantee admissibility, e.g. via the samplers)."""
    mu = _as_values(mu)
    n = mu.shape[-1]
    inst = ConcavityInstance(
        mu=np.zeros(n), w=np.zeros(n), tau=tau, eps=eps, mode=mode, a=a, p=p
    )
    r, c, weight = _mode_params(inst, n)
    lhs, rhs = _evaluate_batch(mu, np.asarray(w, dtype=complex), r, c, weight, tau, eps)
    return (lhs - rhs).real
