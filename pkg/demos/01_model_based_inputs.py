"""
Minimum-energy inputs from a known model
========================================

Two textbook formulas for the cheapest input that moves a plant from
``x0`` to ``xf`` in ``T`` steps, and a check that they agree.
"""

import numpy as np

from minenergy import ControlTask, ctrb_matrix, gramian, me_ctrb, me_gramian, reachable
from minenergy.sysmodel import NOISE_STUDY_XF, noise_study_system

# A three-state, single-input plant and a target in its reachable set.
sys = noise_study_system()
T = 8
task = ControlTask(x0=np.zeros(3), target=NOISE_STUDY_XF, T=T)
print("reachable in", T, "steps:", reachable(sys, task.x0, task.target, T).reachable)

# The controllability matrix maps the stacked input [u(T-1); ...; u(0)]
# to the final state; its Gramian is C_T C_T^T.
C_T = ctrb_matrix(sys, T)
W_T = gramian(sys, T)
print("C_T shape", C_T.shape, "| cond(W_T) =", f"{np.linalg.cond(W_T):.3g}")

# Gramian form: u(t) = B^T (A^T)^(T-t-1) W_T^+ (xf - A^T x0)
g = me_gramian(sys, task)
# Pseudoinverse form: u = C_T^+ (xf - A^T x0)
c = me_ctrb(sys, task)

print("gramian: |u| =", f"{g.input_norm:.6f}", " final error =", f"{g.final_error:.2e}")
print("ctrb:    |u| =", f"{c.input_norm:.6f}", " final error =", f"{c.final_error:.2e}")
print("inputs differ by", f"{np.linalg.norm(g.u.u - c.u.u):.2e}")

# Inputs in time order u(0), ..., u(T-1).
print("u(t):", " ".join(f"{v:.4f}" for v in c.u.chronological().ravel()))
