"""
Steering a plant with experiment data only
==========================================

Four experiments on a two-state plant, used one, two, three and four at a
time.  With one experiment the target is out of reach and the state
lands on the projection of ``xf`` onto the span of the measured final
states.  Two or three experiments reach ``xf``, but only when the inputs
span every direction of the input space (four experiments) is the input
the cheapest one.
"""

import numpy as np

from minenergy import benchsuite as bs
from minenergy import dd_kernel, me_ctrb, run_experiments, ControlTask
from minenergy.matops import pinv

sys = bs.demo_system()
T = 4
print("A =\n", sys.A, "\nB =", sys.B.ravel(), " xf =", bs.DEMO_XF)

# Each column of DEMO_INPUTS is one stacked input; X collects the final states.
data = run_experiments(sys, np.zeros(2), bs.DEMO_INPUTS, T)
best = me_ctrb(sys, ControlTask(np.zeros(2), bs.DEMO_XF, T))

for N in range(1, 5):
    sub = data.subset(N)
    sol = dd_kernel(sub, bs.DEMO_XF, system=sys)
    proj = sub.X @ pinv(sub.X) @ bs.DEMO_XF
    print(f"N={N}: |u| = {sol.input_norm:.4f}  x(T) = {np.round(sol.achieved_final, 4)}"
          f"  projection of xf = {np.round(proj, 4)}")

print(f"model-based minimum: |u| = {best.input_norm:.4f}")

# The full trajectories, as returned by the packaged demo.
trajectories, _ = bs.demo_2d()
for N, traj in zip((1, 2, 3, 4), trajectories):
    print(f"N={N}", " -> ".join(f"({x[0]:+.2f},{x[1]:+.2f})" for x in traj.states))
