"""Contact-set measure estimate: the quadratic equality case and a
strictly convex case with slack.

Run with:  python3 demos/contact_set_estimate.py
"""

import numpy as np

from phessian.solver import AlexandrovProblem, alexandrov_check

# w = |x|^2 makes the bound an equality (up to quadrature error).
prob = AlexandrovProblem(
    center=(0.0, 0.0), d=1.0, resolution=129,
    w=lambda pts: np.sum(pts**2, axis=-1), eps=0.9,
)
lhs, rhs, contact = alexandrov_check(prob)
print("quadratic case:")
print(f"  lhs = {lhs:.6f}  rhs = {rhs:.6f}  ratio = {lhs / rhs:.4f}")
print(f"  contact nodes: {contact.sum()}")

# For any smooth strictly convex w the bound is close to equality (the
# Monge-Ampere mass of the contact set is the area of the gradient image);
# a quartic perturbation keeps the inequality with quadrature-level slack.
prob = AlexandrovProblem(
    center=(0.0, 0.0), d=1.0, resolution=129,
    w=lambda pts: np.sum(pts**2, axis=-1) ** 2 + np.sum(pts**2, axis=-1),
    eps=0.5,
)
lhs, rhs, contact = alexandrov_check(prob)
print("\nquartic + quadratic case:")
print(f"  lhs = {lhs:.6f}  rhs = {rhs:.6f}  slack = {rhs - lhs:.6f}")
