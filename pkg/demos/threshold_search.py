"""Concavity inequality in the large-|mu_1| regime and the eigenvalue
threshold search for the theorem-mode inequality.

Run with:  python3 demos/threshold_search.py
"""

import numpy as np

from phessian.concavity import (
    ConcavityInstance,
    evaluate,
    find_threshold,
    hypothesis_check,
)

# A hand instance satisfying the large-mu_1 hypothesis.
inst = ConcavityInstance(
    mu=[-1.0, 1.3, 5.0], w=[1.0, 0.0, 0.0], tau=0.0, eps=1.0,
    mode="large_mu1", a=2.0,
)
print("hypothesis satisfied:", hypothesis_check(inst))
lhs, rhs, res = evaluate(inst)
print(f"lhs = {lhs:.6f}, rhs = {rhs:.6f}, residual = {res:.6f} (>= 0)")

# Theorem mode needs the top eigenvalue above a threshold M; bisect for
# the smallest M that survives a randomized violation search.
out = find_threshold(3, 2, tau=0.5, eps=1.0, sigma_band=(0.5, 2.0),
                     trials=2000, seed=42)
print(f"\nempirical threshold M_hat = {out.M_hat:.6f}")
print(f"worst residual at M_hat over {out.trials} trials: "
      f"{out.worst_residual:.3e}")

# Spot-check a point just above the threshold with random directions.
rng = np.random.default_rng(1)
mu = np.array([0.5, 1.0, out.M_hat + 1.0])
worst = np.inf
for _ in range(200):
    z = rng.normal(size=3) + 1j * rng.normal(size=3)
    _, _, r = evaluate(ConcavityInstance(
        mu=mu, w=z / np.linalg.norm(z), tau=0.5, eps=1.0, mode="theorem"
    ))
    worst = min(worst, r)
print(f"min residual just above M_hat: {worst:.3e}")
