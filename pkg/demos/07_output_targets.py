"""
Output targets
==============

When only ``y = C x`` is measured, the same formulas run on ``(U, Y)``
and steer the output to ``yf``.
"""

import numpy as np

from minenergy import ControlTask, dd_output, me_ctrb, output_ctrb_matrix, run_experiments
from minenergy.sysmodel import noise_study_system

sys = noise_study_system(C=[[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
T = 8
rng = np.random.default_rng(2)
data = run_experiments(sys, np.zeros(3), rng.standard_normal((T, 12)), T)
yf = np.array([0.5, -0.2])

print("rank C_O,T =", np.linalg.matrix_rank(output_ctrb_matrix(sys, T)), "of", sys.p)
best = me_ctrb(sys, ControlTask(np.zeros(3), yf, T, kind="output"))
print(f"model: |u| = {best.input_norm:.6f}")
for variant in ("kernel", "pinv", "asymptotic"):
    sol = dd_output(data, yf, variant, system=sys)
    print(f"{variant:>10}: |u| = {sol.input_norm:.6f}, y(T) = {np.round(sol.achieved_final, 6)}")
