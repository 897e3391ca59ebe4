"""
Experiments that all start from the same unknown state
======================================================

Appending a row of ones to ``X`` (and a 1 to ``xf``) absorbs the drift
``A^T x0`` that every experiment shares.  One experiment beyond ``mT``
is then enough for the exact minimum-energy input.
"""

import numpy as np

from minenergy import (AssumptionViolatedError, ControlTask, dd_kernel_x0, me_ctrb,
                       random_system, run_experiments)
from minenergy.estimators import check_x0_assumptions

rng = np.random.default_rng(0)
sys = random_system(6, 2, seed=1)
T = 4
x0 = rng.standard_normal(6)
xf = rng.standard_normal(6)
ref = me_ctrb(sys, ControlTask(x0, xf, T))

for N in (sys.m * T, sys.m * T + 1, sys.m * T + 5):
    U = rng.standard_normal((sys.m * T, N))
    data = run_experiments(sys, x0, U, T)
    print(f"N={N}:", check_x0_assumptions(U))
    try:
        sol = dd_kernel_x0(data, xf, system=sys)
    except AssumptionViolatedError as exc:
        print("   refused:", exc)
        continue
    print(f"   |u| = {sol.input_norm:.6f} (model {ref.input_norm:.6f}), final error {sol.final_error:.1e}")

# The augmented pinv form also reaches xf, but it additionally asks the
# combination weights to sum to one and therefore spends a bit more energy.
sol = dd_kernel_x0(data, xf, variant="pinv", system=sys)
print(f"pinv form: |u| = {sol.input_norm:.6f}, final error {sol.final_error:.1e}")
