"""
Numerical reliability as the state dimension grows
==================================================

Random plants with ``T = n`` and ``N = mT + 20`` experiments.  The
Gramian formula squares the conditioning of ``C_T`` and is the first to
lose the target; the data-driven expressions degrade more slowly.  The
trial count here is small; ``minenergy bench vs-n`` runs the full study.
"""

from minenergy import benchsuite as bs

cfg = bs.vs_n_config(sweep=(5, 10, 20, 40, 60, 80, 100), trials=40, master_seed=0)
records = bs.study_vs_n(cfg)

print("   n " + "".join(f"{m:>15}" for m in cfg.methods) + "   (median final error)")
for n in cfg.sweep:
    print(f"{n:4d} " + "".join(f"{bs.median_by(records, m, n=n):15.2e}" for m in cfg.methods))
