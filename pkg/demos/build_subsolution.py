"""Construct the exponential-bump subsolution v = psi + A(e^{Bu} - 1) on
the unit ball and verify it is admissible with nonnegative slack.

Run with:  python3 demos/build_subsolution.py
"""

import numpy as np

from phessian.subsolution import BallProblem, construct

def u(pts):
    # the distance-squared profile: zero on the boundary, negative inside
    return 0.5 * (np.sum(pts**2, axis=-1) - 1.0)

def psi(pts):
    return np.zeros(len(pts))

prob = BallProblem(
    n=2, radius=1.0, resolution=129, p=2, alpha=0.5,
    psi=psi, phi_tilde=lambda pts, t: np.full(len(pts), 0.1), u=u,
)
out = construct(prob)

print(f"ellipticity constants: eps1 = {out.eps1:.4f}, eps2 = {out.eps2:.4f}")
print(f"bump parameters:       A = {out.A:.4f}, B = {out.B:.4f}")
print(f"worst subsolution slack over the grid: {out.worst_slack:.3e} (>= 0)")

c = prob.resolution // 2
print(f"v at the center = {out.v[c, c]:.4f}  (negative inside the ball)")
