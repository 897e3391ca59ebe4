"""
The least-squares inverse map ``U X^+``
=======================================

With i.i.d. zero-mean inputs, ``U X^+`` tends to ``C_T^+`` as experiments
accumulate.  At any finite ``N`` with ``rank(X) = n`` it still steers the
plant exactly, only with more energy than necessary.
"""

import numpy as np

from minenergy import ControlTask, ctrb_matrix, dd_asymptotic, me_ctrb, random_system, run_experiments
from minenergy.matops import pinv

sys = random_system(5, 1, seed=4)
T = 10
C_pinv = pinv(ctrb_matrix(sys, T))
xf = np.ones(5)
best = me_ctrb(sys, ControlTask(np.zeros(5), xf, T)).input_norm

rng = np.random.default_rng(4)
U = rng.standard_normal((T, 20_000))
data = run_experiments(sys, np.zeros(5), U, T)

print("     N   |UX^+ - C_T^+|_F   |u|/|u*|   final error")
for N in (10, 30, 100, 300, 1000, 3000, 10_000, 20_000):
    sub = data.subset(N)
    gap = np.linalg.norm(sub.U @ pinv(sub.X) - C_pinv)
    sol = dd_asymptotic(sub, xf, system=sys)
    print(f"{N:6d}   {gap:16.4f}   {sol.input_norm / best:8.4f}   {sol.final_error:.1e}")
