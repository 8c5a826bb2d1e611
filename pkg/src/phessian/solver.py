"""Periodic-grid embodiment of the general p-Hessian equation

    sigma_p^{1/p}( lam( A(du, u) + D^2 u ) ) = phi(du, u)

on a flat torus (identity metric, so covariant derivatives are plain
central differences).  The module owns:

* TorusGrid / GridFn and the periodic difference stencils,
* a small catalog of coefficient fields A(alpha, t) and right-hand sides
  phi(alpha, t) with their analytic alpha/t derivatives,
* nodewise residual and admissibility maps,
* a damped Newton iteration with cone-preserving line search, zero-mean
  gauge, and matrix-free Krylov linear solves,
* diagnostic monitors and the auxiliary functions whose maxima the
  a-priori-estimate proofs track,
* pseudo-subsolution / pseudo-supersolution pointwise checkers,
* a contact-set lower bound for the Monge-Ampere mass (generalized
  Alexandrov lemma), and
* CSV/JSON serialization for grid fields and problem descriptions.
"""

import json
from dataclasses import dataclass
from math import gamma, pi

import numpy as np
from scipy.sparse.linalg import LinearOperator, lgmres

from .cone import ConeSpec, classify_batch
from .errors import AdmissibilityError, NonconvergenceError
from .spectral import jacobi_eigh
from .symfun import sigma, sigma_trunc


# ---------------------------------------------------------------------------
# grids and stencils

@dataclass(frozen=True)
class TorusGrid:
    """Uniform periodic grid; nodes at i*h per axis, period 2*pi by default."""

    sizes: tuple
    period: float = 2.0 * pi

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if any(s < 8 for s in sizes):
            raise ValueError("need at least 8 nodes per axis")
        object.__setattr__(self, "sizes", sizes)

    @property
    def d(self):
        return len(self.sizes)

    @property
    def h(self):
        return tuple(self.period / s for s in self.sizes)

    def axes(self):
        return [np.arange(s) * self.period / s for s in self.sizes]

    def meshgrid(self):
        return np.meshgrid(*self.axes(), indexing="ij")


@dataclass(frozen=True)
class GridFn:
    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.sizes:
            raise ValueError(
                f"values shape {v.shape} != grid sizes {self.grid.sizes}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("grid values must be finite")
        object.__setattr__(self, "values", v)


def periodic_grad(f, h):
    """Central first differences, one array per axis, O(h^2)."""
    return np.stack(
        [
            (np.roll(f, -1, axis=m) - np.roll(f, 1, axis=m)) / (2.0 * h[m])
            for m in range(f.ndim)
        ]
    )


def periodic_hess(f, h):
    """Central second differences; shape (d, d) + f.shape, symmetric."""
    d = f.ndim
    H = np.empty((d, d) + f.shape)
    for i in range(d):
        H[i, i] = (
            np.roll(f, -1, axis=i) - 2.0 * f + np.roll(f, 1, axis=i)
        ) / h[i] ** 2
        for j in range(i + 1, d):
            fp = np.roll(f, -1, axis=i)
            fm = np.roll(f, 1, axis=i)
            cross = (
                np.roll(fp, -1, axis=j)
                - np.roll(fp, 1, axis=j)
                - np.roll(fm, -1, axis=j)
                + np.roll(fm, 1, axis=j)
            ) / (4.0 * h[i] * h[j])
            H[i, j] = cross
            H[j, i] = cross
    return H


# ---------------------------------------------------------------------------
# equation catalog

@dataclass(frozen=True)
class EquationSpec:
    """p plus catalog entries for the coefficient field and right side.

    A_field: ("zero",), ("conformal", c), ("paper_example", phi_tilde)
             with A = (1 - e^u - phi_tilde(x) |du|^2) I, or
             ("stored", array of shape sizes+(d,d)).
    rhs:     ("constant", c), ("stored", array over nodes), or
             ("paper_example", base, t_coeff) with
             phi = base(x) e^{t_coeff u} (sin(|du|^{2p-1}) + 2).
    """

    p: int
    A_field: tuple = ("zero",)
    rhs: tuple = ("constant", 1.0)


def _broadcast_field(param, shape):
    arr = np.asarray(param, dtype=float)
    if arr.ndim == 0:
        return float(arr) * np.ones(shape)
    if arr.shape != shape:
        raise ValueError(f"stored field shape {arr.shape} != grid {shape}")
    return arr


def _coefficient_A(spec, u, du):
    """A matrix field plus its t- and alpha-derivatives.

    Returns (A (shape+(d,d)), A_t (shape or None), A_alpha (shape+(d,)
    or None)); the derivative entries multiply the identity (all catalog
    A fields with u-dependence are conformal).
    """
    shape = u.shape
    d = u.ndim
    kind = spec.A_field[0]
    A = np.zeros(shape + (d, d))
    eye = np.arange(d)
    if kind == "zero":
        return A, None, None
    if kind == "conformal":
        A[..., eye, eye] = spec.A_field[1]
        return A, None, None
    if kind == "paper_example":
        phi_tilde = _broadcast_field(spec.A_field[1], shape)
        grad_sq = np.sum(du**2, axis=0)
        psi = 1.0 - np.exp(u) - phi_tilde * grad_sq
        A[..., eye, eye] = psi[..., None]
        A_t = -np.exp(u)
        A_alpha = -2.0 * phi_tilde[..., None] * np.moveaxis(du, 0, -1)
        return A, A_t, A_alpha
    if kind == "stored":
        stored = np.asarray(spec.A_field[1], dtype=float)
        if stored.shape != shape + (d, d):
            raise ValueError("stored A field has the wrong shape")
        return stored.copy(), None, None
    raise ValueError(f"unknown A catalog entry {kind!r}")


def _rhs_phi(spec, u, du):
    """phi plus d(phi)/dt and d(phi)/d(alpha) as node fields."""
    shape = u.shape
    kind = spec.rhs[0]
    if kind == "constant":
        c = float(spec.rhs[1])
        if c <= 0:
            raise ValueError("right-hand side must be positive")
        return np.full(shape, c), None, None
    if kind == "stored":
        phi = _broadcast_field(spec.rhs[1], shape)
        if np.any(phi <= 0):
            raise ValueError("right-hand side must be positive")
        return phi, None, None
    if kind == "paper_example":
        base = _broadcast_field(spec.rhs[1], shape)
        c = float(spec.rhs[2]) if len(spec.rhs) > 2 else 0.0
        if np.any(base <= 0):
            raise ValueError("right-hand side base must be positive")
        r = np.sqrt(np.sum(du**2, axis=0))
        s = r ** (2 * spec.p - 1)
        phi = base * np.exp(c * u) * (np.sin(s) + 2.0)
        phi_t = c * phi
        expo = 2 * spec.p - 3
        with np.errstate(divide="ignore", invalid="ignore"):
            radial = np.where(r > 0, r ** expo, 0.0)
        coeff = base * np.exp(c * u) * np.cos(s) * (2 * spec.p - 1) * radial
        phi_alpha = coeff[..., None] * np.moveaxis(du, 0, -1)
        return phi, phi_t, phi_alpha
    raise ValueError(f"unknown rhs catalog entry {kind!r}")


# ---------------------------------------------------------------------------
# residual, admissibility, linearization data

def _hessian_argument(u_vals, grid, spec):
    h = grid.h
    du = periodic_grad(u_vals, h)
    d2u = periodic_hess(u_vals, h)
    A, A_t, A_alpha = _coefficient_A(spec, u_vals, du)
    B = A + np.moveaxis(d2u, (0, 1), (-2, -1))
    return du, B, A_t, A_alpha


def _lambda_field(B, d):
    flat = B.reshape(-1, d, d)
    return jacobi_eigh(flat)


def admissible(u, spec):
    """(ok, report): ok iff lam(A(du,u)+D^2u) is interior at every node.

    The report names the first violating node (unraveled index) and its
    eigenvalue vector; None when ok.
    """
    grid = u.grid
    _, B, _, _ = _hessian_argument(u.values, grid, spec)
    lam = _lambda_field(B, grid.d)
    codes = classify_batch(lam, ConeSpec(grid.d, spec.p))
    if np.all(codes == 2):
        return True, None
    bad = int(np.argmax(codes != 2))
    return False, {
        "node": np.unravel_index(bad, grid.sizes),
        "lam": lam[bad],
    }


def _require_admissible(u, spec, lam, grid):
    codes = classify_batch(lam, ConeSpec(grid.d, spec.p))
    if np.all(codes == 2):
        return
    bad = int(np.argmax(codes != 2))
    node = np.unravel_index(bad, grid.sizes)
    raise AdmissibilityError(
        f"inadmissible eigenvalues {lam[bad]} at node {node}",
        node=node,
        lam=lam[bad],
    )


def residual_field(u, spec):
    """Nodewise sigma_p^{1/p}(lam(A + D^2 u)) - phi(du, u)."""
    grid = u.grid
    du, B, _, _ = _hessian_argument(u.values, grid, spec)
    lam = _lambda_field(B, grid.d)
    _require_admissible(u, spec, lam, grid)
    lhs = sigma(spec.p, lam) ** (1.0 / spec.p)
    phi, _, _ = _rhs_phi(spec, u.values, du)
    return GridFn(grid, (lhs - phi.ravel()).reshape(grid.sizes))


def _linearization_data(u, spec):
    """Everything Newton needs at the current iterate.

    Returns (residual values, F field shape+(d,d), G field (d,)+shape,
    H field shape) where the Jacobian action on a perturbation s is

        J s = sum_jk F^{jk} d2s_jk + sum_m G_m ds_m + H s.
    """
    grid = u.grid
    d = grid.d
    p = spec.p
    du, B, A_t, A_alpha = _hessian_argument(u.values, grid, spec)
    flat = B.reshape(-1, d, d)
    lam, Q = jacobi_eigh(flat, vectors=True)
    _require_admissible(u, spec, lam, grid)

    sp = sigma(p, lam)
    minors = np.stack(
        [sigma_trunc(p - 1, lam, [j]) for j in range(1, d + 1)], axis=-1
    )
    gdiag = (1.0 / p) * sp[:, None] ** (1.0 / p - 1.0) * minors
    F = np.einsum("njk,nk,nlk->njl", Q, gdiag, Q).reshape(
        grid.sizes + (d, d)
    )

    phi, phi_t, phi_alpha = _rhs_phi(spec, u.values, du)
    res = (sp ** (1.0 / p)).reshape(grid.sizes) - phi

    trace_F = np.einsum("...jj->...", F)
    G = np.zeros((d,) + grid.sizes)
    H = np.zeros(grid.sizes)
    if A_alpha is not None:
        # dA_jk/dalpha_m = A_alpha[..., m] * delta_jk
        G += np.moveaxis(A_alpha, -1, 0) * trace_F
    if A_t is not None:
        H += A_t * trace_F
    if phi_alpha is not None:
        G -= np.moveaxis(phi_alpha, -1, 0)
    if phi_t is not None:
        H -= phi_t
    return res, F, G, H, lam


def _apply_jacobian(s, F, G, H, h):
    ds = periodic_grad(s, h)
    d2s = periodic_hess(s, h)
    out = np.einsum("...jk,jk...->...", F, d2s)
    out += np.einsum("m...,m...->...", G, ds)
    out += H * s
    return out


def _gauge_norm(res):
    """Sup norm of the zero-mean part of the residual.

    The periodic problem is invariant under adding constants whenever the
    coefficients are t-independent, so the mean of the residual is a
    compatibility defect (discretization error of the data) that no
    zero-mean update can remove; Newton drives the projected part to
    zero.
    """
    return float(np.max(np.abs(res - np.mean(res))))


def newton_solve(spec, u0, tol=1e-9, max_iters=30, krylov_rtol=1e-8):
    """Damped Newton with zero-mean gauge and admissibility-preserving
    line search.  Returns (solution GridFn, trace); the trace records the
    gauge-projected and raw residual norms plus the accepted step length
    of every iteration.
    """
    grid = u0.grid
    h = grid.h
    nnodes = int(np.prod(grid.sizes))
    u = u0.values - np.mean(u0.values)
    trace = []

    res, F, G, H, _ = _linearization_data(GridFn(grid, u), spec)
    rnorm = _gauge_norm(res)
    for it in range(max_iters):
        if rnorm <= tol:
            break

        def matvec(x):
            s = x.reshape(grid.sizes)
            s = s - np.mean(s)
            out = _apply_jacobian(s, F, G, H, h)
            return (out - np.mean(out)).ravel()

        op = LinearOperator((nnodes, nnodes), matvec=matvec)
        b = -(res - np.mean(res)).ravel()
        step_dir, _ = lgmres(op, b, rtol=krylov_rtol, atol=0.0, maxiter=2000)
        s = step_dir.reshape(grid.sizes)
        s = s - np.mean(s)

        step = 1.0
        while True:
            cand = u + step * s
            try:
                new_res, new_F, new_G, new_H, _ = _linearization_data(
                    GridFn(grid, cand), spec
                )
            except AdmissibilityError:
                new_res = None
            if new_res is not None:
                new_norm = _gauge_norm(new_res)
                if new_norm <= (1.0 - 1e-4 * step) * rnorm:
                    break
            step *= 0.5
            if step < 1e-12:
                raise NonconvergenceError(
                    "line search stalled", trace=trace
                )
        u = cand
        res, F, G, H = new_res, new_F, new_G, new_H
        rnorm = new_norm
        trace.append(
            {
                "iter": it,
                "residual": rnorm,
                "raw_residual": float(np.max(np.abs(res))),
                "step": step,
            }
        )

    return GridFn(grid, u), trace


# ---------------------------------------------------------------------------
# monitors and auxiliary functions

@dataclass(frozen=True)
class MonitorReport:
    osc_u: float
    max_grad: float
    max_hess: float
    max_lambda_n: float
    min_lambda_1: float


def monitors(u, spec):
    grid = u.grid
    h = grid.h
    du = periodic_grad(u.values, h)
    d2u = periodic_hess(u.values, h)
    _, B, _, _ = _hessian_argument(u.values, grid, spec)
    lam = _lambda_field(B, grid.d)
    return MonitorReport(
        osc_u=float(np.max(u.values) - np.min(u.values)),
        max_grad=float(np.max(np.sqrt(np.sum(du**2, axis=0)))),
        max_hess=float(np.max(np.sqrt(np.sum(d2u**2, axis=(0, 1))))),
        max_lambda_n=float(np.max(lam[:, -1])),
        min_lambda_1=float(np.min(lam[:, 0])),
    )


@dataclass(frozen=True)
class AuxiliarySpec:
    """Catalog entries ("linear", c) with f(t) = c*t or ("exp", c) with
    f(t) = e^{c t}; both need c > 0 so f' > 0."""

    eta: tuple = ("linear", 1.0)
    zeta: tuple = ("linear", 1.0)


def _aux_eval(entry, t):
    kind, c = entry[0], float(entry[1])
    if c <= 0:
        raise ValueError("auxiliary catalog coefficient must be positive")
    if kind == "linear":
        return c * t
    if kind == "exp":
        return np.exp(c * t)
    raise ValueError(f"unknown auxiliary entry {kind!r}")


def auxiliary_field(u, ubar, spec, aux, kind):
    """The proof-tracking auxiliary function and its maximizing node.

    kind="second_order": log(1 + lam_n(A + D^2 u)) + eta(|du|^2)
                          + zeta(ubar - u); requires lam_n > -1.
    kind="first_order":  log(1 + |du|^2) + zeta(u).
    """
    grid = u.grid
    h = grid.h
    du = periodic_grad(u.values, h)
    grad_sq = np.sum(du**2, axis=0)
    if kind == "second_order":
        _, B, _, _ = _hessian_argument(u.values, grid, spec)
        lam_n = _lambda_field(B, grid.d)[:, -1].reshape(grid.sizes)
        if np.any(lam_n <= -1.0):
            bad = np.unravel_index(int(np.argmax(lam_n <= -1.0)), grid.sizes)
            raise ValueError(
                f"lam_n = {lam_n[bad]} <= -1 at node {bad}: log undefined"
            )
        phi = (
            np.log1p(lam_n)
            + _aux_eval(aux.eta, grad_sq)
            + _aux_eval(aux.zeta, ubar.values - u.values)
        )
    elif kind == "first_order":
        phi = np.log1p(grad_sq) + _aux_eval(aux.zeta, u.values)
    else:
        raise ValueError(f"unknown auxiliary kind {kind!r}")
    node = np.unravel_index(int(np.argmax(phi)), grid.sizes)
    return GridFn(grid, phi), node


# ---------------------------------------------------------------------------
# pseudo-solution checks

@dataclass(frozen=True)
class PseudoCheckConfig:
    delta1: float
    M1: float
    delta2: float
    M2: float
    ubar: GridFn

    def __post_init__(self):
        if self.delta1 <= 0 or self.delta2 <= 0:
            raise ValueError("delta1, delta2 must be positive")
        if self.M1 < 0 or self.M2 < 0:
            raise ValueError("M1, M2 must be nonnegative")


@dataclass(frozen=True)
class PseudoReport:
    worst_sub_slack: float
    sub_violations: int
    worst_super_slack: float
    super_violations: int
    super_nodes: int
    note: str = (
        "pointwise necessary-condition check for the supplied constants; "
        "not a certification over all solutions"
    )


def pseudo_check(u, cfg, spec):
    """Evaluate both pseudo-solution inequalities nodewise.

    Subsolution side (every node):
        F^{jk} D_jk(ubar - u) + F^{jk} (dA_jk/dalpha) . d(ubar - u)
            >= delta1 * tr F - M1 * lam_1(F) - M1.
    Supersolution side (only on nodes where lam(D^2(u - ubar)) + delta2*1
    stays in the closed positive cone and |d(u - ubar)| <= delta2):
        sigma_n(lam(delta2 I + D^2(u - ubar))) <= M2.
    """
    grid = u.grid
    d = grid.d
    h = grid.h
    _, F, _, _, lam = _linearization_data(u, spec)
    du_all = periodic_grad(u.values, h)
    _, _, _, A_alpha = _hessian_argument(u.values, grid, spec)

    diff = cfg.ubar.values - u.values
    ddiff = periodic_grad(diff, h)
    d2diff = periodic_hess(diff, h)

    lhs = np.einsum("...jk,jk...->...", F, d2diff)
    if A_alpha is not None:
        trace_F = np.einsum("...jj->...", F)
        lhs += trace_F * np.einsum(
            "...m,m...->...", A_alpha, ddiff
        )
    lam1_F = jacobi_eigh(F.reshape(-1, d, d))[:, 0].reshape(grid.sizes)
    trace_F = np.einsum("...jj->...", F)
    rhs = cfg.delta1 * trace_F - cfg.M1 * lam1_F - cfg.M1
    sub_slack = lhs - rhs

    d2ud = periodic_hess(u.values - cfg.ubar.values, h)
    Hmat = np.moveaxis(d2ud, (0, 1), (-2, -1)).reshape(-1, d, d)
    lam_diff = jacobi_eigh(Hmat)
    shifted = lam_diff + cfg.delta2
    gate_cone = classify_batch(shifted, ConeSpec(d, d)) >= 1
    grad_gate = (
        np.sqrt(np.sum(ddiff**2, axis=0)).ravel() <= cfg.delta2
    )
    mask = gate_cone & grad_gate
    sigma_n = np.prod(shifted, axis=-1)
    super_slack = np.where(mask, cfg.M2 - sigma_n, np.inf)

    return PseudoReport(
        worst_sub_slack=float(np.min(sub_slack)),
        sub_violations=int(np.sum(sub_slack < -1e-10)),
        worst_super_slack=float(np.min(super_slack)) if mask.any() else np.inf,
        super_violations=int(np.sum(super_slack < -1e-10)),
        super_nodes=int(np.sum(mask)),
    )


# ---------------------------------------------------------------------------
# generalized Alexandrov lemma

@dataclass(frozen=True)
class AlexandrovProblem:
    """Ball of radius d around center; w supplied as a callable over
    (N, dim) points, sampled on the bounding-box grid."""

    center: tuple
    d: float
    resolution: int
    w: callable
    eps: float


def unit_ball_volume(n):
    return pi ** (n / 2.0) / gamma(n / 2.0 + 1.0)


def alexandrov_check(prob, quad_tol=0.02):
    """Contact-set lower bound omega_n eps^n / d^n <= integral of
    det D^2 w over the contact set.

    The contact set is computed nodewise: |Dw| < eps/d (strict) plus the
    brute-force global supporting-plane test against every ball node.
    Returns (lhs, rhs, contact_mask over the grid); lhs <= rhs*(1 +
    quad_tol) is asserted.
    """
    center = np.asarray(prob.center, dtype=float)
    n = len(center)
    res = prob.resolution
    axis = np.linspace(-prob.d, prob.d, res)
    h = axis[1] - axis[0]
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1) + center
    dist = np.linalg.norm(pts - center, axis=-1)
    shape = (res,) * n

    wv = prob.w(pts).reshape(shape)
    ring = (dist >= prob.d - h) & (dist <= prob.d + 1e-12)
    w0 = prob.w(center[None, :])[0]
    eps_max = float(np.min(wv.ravel()[ring]) - w0)
    if not 0.0 < prob.eps <= eps_max + 1e-9:
        raise ValueError(
            f"eps must lie in (0, {eps_max:.6g}], got {prob.eps}"
        )

    dw = np.stack(np.gradient(wv, h, edge_order=2)).reshape(n, -1).T
    hess = periodic_hess_box(wv, h)

    in_ball = dist < prob.d
    grad_norm = np.linalg.norm(dw, axis=-1)
    candidates = np.flatnonzero(in_ball & (grad_norm < prob.eps / prob.d))

    ball_idx = np.flatnonzero(in_ball)
    contact = np.zeros(len(pts), dtype=bool)
    if len(candidates):
        y = pts[ball_idx]
        wy = wv.ravel()[ball_idx]
        planes = (
            wv.ravel()[candidates][:, None]
            + np.einsum("cm,cym->cy", dw[candidates], y[None, :, :] - pts[candidates][:, None, :])
        )
        ok = np.all(wy[None, :] >= planes - 1e-10, axis=1)
        contact[candidates[ok]] = True

    dets = np.linalg.det(
        np.moveaxis(hess.reshape(n, n, -1), -1, 0)[contact]
    )
    rhs = float(np.sum(np.maximum(dets, 0.0)) * h**n)
    lhs = float(unit_ball_volume(n) * prob.eps**n / prob.d**n)
    assert lhs <= rhs * (1.0 + quad_tol) + 1e-12, (lhs, rhs)
    return lhs, rhs, contact.reshape(shape)


def periodic_hess_box(f, h):
    """Second differences on a non-periodic box via repeated np.gradient."""
    n = f.ndim
    grads = np.gradient(f, h, edge_order=2)
    if n == 1:
        grads = [grads]
    H = np.empty((n, n) + f.shape)
    for i in range(n):
        gi = np.gradient(grads[i], h, edge_order=2)
        if n == 1:
            gi = [gi]
        for j in range(n):
            H[i, j] = gi[j]
    return 0.5 * (H + np.swapaxes(H, 0, 1))


# ---------------------------------------------------------------------------
# serialization

def save_grid_csv(path, fn):
    """Header `d,sizes...,h...` then row-major node values, 17 sig digits."""
    grid = fn.grid
    header = ",".join(
        [str(grid.d)]
        + [str(s) for s in grid.sizes]
        + [format(x, ".17g") for x in grid.h]
    )
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for v in fn.values.ravel():
            fh.write(format(v, ".17g") + "\n")


def load_grid_csv(path):
    with open(path) as fh:
        head = fh.readline().strip().split(",")
        d = int(head[0])
        sizes = tuple(int(s) for s in head[1 : 1 + d])
        h0 = float(head[1 + d])
        values = np.array([float(line) for line in fh])
    period = h0 * sizes[0]
    grid = TorusGrid(sizes, period=period)
    return GridFn(grid, values.reshape(sizes))


def equation_to_dict(spec):
    def entry(t):
        kind = t[0]
        out = {"kind": kind}
        if kind in ("conformal", "constant"):
            out["value"] = float(t[1])
        elif kind == "paper_example":
            out["param"] = (
                t[1].tolist() if isinstance(t[1], np.ndarray) else t[1]
            )
            if len(t) > 2:
                out["t_coeff"] = float(t[2])
        elif kind == "stored":
            out["values"] = np.asarray(t[1]).tolist()
        return out

    return {"p": spec.p, "A": entry(spec.A_field), "rhs": entry(spec.rhs)}


def equation_from_dict(blob):
    def entry(e, is_rhs):
        kind = e["kind"]
        if kind == "zero":
            return ("zero",)
        if kind in ("conformal", "constant"):
            return (kind, float(e["value"]))
        if kind == "paper_example":
            param = e["param"]
            if isinstance(param, list):
                param = np.asarray(param, dtype=float)
            if is_rhs:
                return (kind, param, float(e.get("t_coeff", 0.0)))
            return (kind, param)
        if kind == "stored":
            return (kind, np.asarray(e["values"], dtype=float))
        raise ValueError(f"unknown catalog entry {kind!r}")

    return EquationSpec(
        p=int(blob["p"]),
        A_field=entry(blob["A"], False),
        rhs=entry(blob["rhs"], True),
    )


def save_problem_json(path, spec):
    with open(path, "w") as fh:
        json.dump(equation_to_dict(spec), fh, indent=1)


def load_problem_json(path):
    with open(path) as fh:
        return equation_from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# manufactured problem

def manufactured_problem(size, p=2, amplitude=0.2):
    """Periodic test problem with known solution u* = a cos x1 cos x2.

    A is the identity (conformal c=1) and the right side is the exact
    sigma_p^{1/p}(lam(I + D^2 u*)) evaluated analytically, so u* solves
    the continuous equation and the discrete residual at u* is O(h^2).
    Returns (spec, grid, u_star GridFn).
    """
    grid = TorusGrid((size, size))
    x1, x2 = grid.meshgrid()
    cc = np.cos(x1) * np.cos(x2)
    ss = np.sin(x1) * np.sin(x2)
    ustar = amplitude * cc
    lam1 = 1.0 - amplitude * cc - amplitude * np.abs(ss)
    lam2 = 1.0 - amplitude * cc + amplitude * np.abs(ss)
    lam = np.stack([lam1, lam2], axis=-1)
    phi = sigma(p, lam.reshape(-1, 2)).reshape(grid.sizes) ** (1.0 / p)
    spec = EquationSpec(p=p, A_field=("conformal", 1.0), rhs=("stored", phi))
    return spec, grid, GridFn(grid, ustar)
