"""Seeded numerical studies comparing the model-based and data-driven inputs.

Four studies produce flat :class:`BenchRecord` lists:

``vs_N``
    norm and final-state error of every method as the number of
    experiments grows (random plants, nonzero ``x0``).
``vs_n``
    the same against the state dimension with ``T = n`` and
    ``N = mT + 20``.
``noise_bias``
    noisy copies of one fixed data set; each record holds the deviation
    ``u_hat - u*`` of one realization so the bias ``||mean(u_hat) - u*||``
    can be recomputed from the CSV.
``demo_2d``
    a two-state plant driven by the kernel input for ``N = 1..4``.

Each trial draws from ``derive_rng(master_seed, <sweep point>, trial)``, so
results do not depend on trial order or on ``workers``.  Records are
sorted canonically before they are returned.
"""

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import estimators as est
from .errors import InvalidInputError
from .datagen import NoiseModel, add_noise, derive_rng, derive_seed, random_system, run_experiments
from .sysmodel import (
    LtiSystem,
    NOISE_STUDY_XF,
    noise_study_system,
    simulate,
)

STUDIES = ("vs_N", "vs_n", "noise_bias", "demo_2d")
CSV_HEADER = ["study", "trial", "seed", "n", "m", "T", "N", "method", "input_norm", "final_error", "extra"]
_METHOD_ORDER = {m: i for i, m in enumerate(est.METHODS)}

# Two-state single-input plant and the four experiment inputs (columns)
# used by demo_2d.
DEMO_A = np.array([[0.9, 0.4], [-0.3, 0.8]])
DEMO_B = np.array([[0.0], [1.0]])
DEMO_INPUTS = np.array([
    [1.0, 0.2, -0.5, 0.3],
    [0.5, -1.0, 0.3, 0.2],
    [-0.3, 0.4, 1.0, -0.6],
    [0.2, 0.6, -0.2, 1.0],
])
DEMO_XF = np.array([0.0, 1.0])


@dataclass(frozen=True)
class BenchConfig:
    """Parameters of one study.

    ``sweep`` holds the swept values: ``N`` for ``vs_N``, ``n`` for
    ``vs_n``, the noise standard deviation for ``noise_bias`` and ``N``
    for ``demo_2d``.  For ``noise_bias`` ``trials`` is the number of
    noise realizations averaged per sweep point.
    """

    study: str
    sweep: tuple
    trials: int
    master_seed: int = 0
    n: Optional[int] = None
    m: int = 2
    T: Optional[int] = None
    N: Optional[int] = None
    extra_experiments: int = 20
    methods: tuple = est.METHODS
    rank_rule: str = "stacked"
    workers: int = 1

    def __post_init__(self):
        if self.study not in STUDIES:
            raise ValueError(f"unknown study {self.study!r}; choose from {STUDIES}")
        if len(self.sweep) == 0:
            raise ValueError("sweep must not be empty")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        unknown = set(self.methods) - set(est.METHODS)
        if unknown:
            raise ValueError(f"unknown methods {sorted(unknown)}")
        object.__setattr__(self, "sweep", tuple(self.sweep))
        object.__setattr__(self, "methods", tuple(self.methods))

    def to_dict(self):
        return asdict(self)


def vs_N_config(**kw):
    base = dict(study="vs_N", n=20, m=2, T=40, trials=100,
                sweep=(10, 20, 40, 60, 80, 81, 100, 120, 160, 200))
    base.update(kw)
    return BenchConfig(**base)


def vs_n_config(**kw):
    base = dict(study="vs_n", m=2, trials=1000, sweep=(5, 10, 20, 30, 40, 60, 80, 100))
    base.update(kw)
    return BenchConfig(**base)


def noise_bias_config(**kw):
    base = dict(study="noise_bias", n=3, m=1, T=8, N=10, trials=100,
                sweep=(0.0, 0.001, 0.003, 0.01, 0.03, 0.1, 0.3),
                methods=est.DATA_METHODS)
    base.update(kw)
    return BenchConfig(**base)


def demo_2d_config(**kw):
    base = dict(study="demo_2d", n=2, m=1, T=4, trials=1, sweep=(1, 2, 3, 4),
                methods=("ctrb", "dd-kernel"))
    base.update(kw)
    return BenchConfig(**base)


DEFAULT_CONFIGS = {
    "vs_N": vs_N_config,
    "vs_n": vs_n_config,
    "noise_bias": noise_bias_config,
    "demo_2d": demo_2d_config,
}


@dataclass(frozen=True)
class BenchRecord:
    study: str
    trial: int
    seed: int
    n: int
    m: int
    T: int
    N: int
    method: str
    input_norm: float
    final_error: float
    extra: dict = field(default_factory=dict)

    @property
    def overflow(self):
        return bool(self.extra.get("overflow", False))

    def sort_key(self):
        return (self.study, self.n, self.m, self.T, self.N, self.extra.get("sigma", 0.0),
                self.trial, _METHOD_ORDER.get(self.method, 99), self.method)

    def to_row(self):
        return [self.study, self.trial, self.seed, self.n, self.m, self.T, self.N, self.method,
                repr(float(self.input_norm)), repr(float(self.final_error)),
                json.dumps(self.extra, sort_keys=True, separators=(",", ":"))]

    @classmethod
    def from_row(cls, row):
        return cls(row["study"], int(row["trial"]), int(row["seed"]), int(row["n"]), int(row["m"]),
                   int(row["T"]), int(row["N"]), row["method"], float(row["input_norm"]),
                   float(row["final_error"]), json.loads(row["extra"]) if row["extra"] else {})


# -- per-trial work -------------------------------------------------------------

def _guarded(fn):
    """Run an estimator; map overflow and LAPACK failures to ``None``."""
    try:
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            sol = fn()
    except (np.linalg.LinAlgError, ValueError):
        return None
    if not (np.all(np.isfinite(sol.u.u)) and sol.final_error is not None
            and math.isfinite(sol.final_error)):
        return None
    return sol


def _method_solution(method, sys, task, data, rank_rule):
    if method in est.MODEL_METHODS:
        return est.estimate_from_model(method, sys, task)
    return est.estimate_from_data(method, data, task.target, augmented=True, strict=False,
                                  rank_rule=rank_rule, system=sys)


def _record(cfg, trial, seed, sys, T, N, method, sol, **extra):
    if sol is None:
        return BenchRecord(cfg.study, trial, seed, sys.n, sys.m, T, N, method,
                           float("nan"), float("nan"), {"overflow": True, **extra})
    return BenchRecord(cfg.study, trial, seed, sys.n, sys.m, T, N, method,
                       sol.input_norm, sol.final_error, dict(extra))


def _trial_setup(cfg, n, T, n_pool, trial, point_key):
    seed = derive_seed(cfg.master_seed, point_key, trial)
    sys = random_system(n, cfg.m, seed)
    rng = derive_rng(cfg.master_seed, point_key, trial, 1)
    x0 = rng.standard_normal(n)
    xf = rng.standard_normal(n)
    pool = rng.standard_normal((cfg.m * T, n_pool))
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            full = run_experiments(sys, x0, pool, T, seed=seed)
    except InvalidInputError:
        full = None  # A^T overflowed; data-driven records get the overflow marker
    return seed, sys, est.ControlTask(x0, xf, T), full


def _random_trial(cfg, n, T, Ns, trial, point_key):
    """One random plant, ``x0``, ``xf`` and input pool, evaluated at each ``N``.

    Smaller ``N`` use a prefix of the input pool, so adding experiments
    only ever appends columns.
    """
    seed, sys, task, full = _trial_setup(cfg, n, T, max(Ns), trial, point_key)
    model = {m: _guarded(lambda m=m: _method_solution(m, sys, task, None, cfg.rank_rule))
             for m in cfg.methods if m in est.MODEL_METHODS}
    records = []
    for N in Ns:
        data = None if full is None else full.subset(N)
        for method in cfg.methods:
            if method in model:
                sol = model[method]
            elif full is None:
                sol = None
            else:
                sol = _guarded(lambda: _method_solution(method, sys, task, data, cfg.rank_rule))
            records.append(_record(cfg, trial, seed, sys, T, N, method, sol))
    return records


def replay(cfg, record):
    """Recompute the plant, task and solution behind one random-plant record.

    Records store metrics only; the input itself is rebuilt from the seed
    so it can be re-simulated.  Returns ``(system, task, solution)``.
    """
    if cfg.study == "vs_N":
        point_key, n_pool = 0, max(cfg.sweep)
    elif cfg.study == "vs_n":
        point_key, n_pool = record.n, cfg.m * record.T + cfg.extra_experiments
    else:
        raise ValueError(f"replay covers vs_N and vs_n records, not {cfg.study!r}")
    seed, sys, task, full = _trial_setup(cfg, record.n, record.T, n_pool, record.trial, point_key)
    if seed != record.seed:
        raise ValueError("record does not belong to this configuration")
    data = None if full is None else full.subset(record.N)
    return sys, task, _method_solution(record.method, sys, task, data, cfg.rank_rule)


def _vs_N_trial(args):
    cfg, trial = args
    return _random_trial(cfg, cfg.n, cfg.T, cfg.sweep, trial, 0)


def _vs_n_trial(args):
    cfg, n, trial = args
    T = n
    return _random_trial(cfg, n, T, (cfg.m * T + cfg.extra_experiments,), trial, n)


def _run(fn, jobs, workers):
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        chunks = [fn(j) for j in jobs]
    records = [r for chunk in chunks for r in chunk]
    return sorted(records, key=BenchRecord.sort_key)


def study_vs_N(cfg):
    """Every method against the number of experiments for random plants."""
    if cfg.study != "vs_N":
        raise ValueError(f"expected a vs_N config, got {cfg.study!r}")
    return _run(_vs_N_trial, [(cfg, k) for k in range(cfg.trials)], cfg.workers)


def study_vs_n(cfg):
    """Every method against the state dimension, ``T = n``, ``N = mT + extra``."""
    if cfg.study != "vs_n":
        raise ValueError(f"expected a vs_n config, got {cfg.study!r}")
    jobs = [(cfg, n, k) for n in cfg.sweep for k in range(cfg.trials)]
    return _run(_vs_n_trial, jobs, cfg.workers)


def noise_study_data(cfg, sys=None):
    """Clean data set shared by all noise realizations of a noise-bias run."""
    sys = noise_study_system() if sys is None else sys
    U = derive_rng(cfg.master_seed, 0).standard_normal((sys.m * cfg.T, cfg.N))
    return run_experiments(sys, np.zeros(sys.n), U, cfg.T, seed=cfg.master_seed)


def study_noise_bias(cfg, sys=None, xf=None):
    """Per-realization deviations of each data-driven input under noise.

    ``U`` is drawn once; ``X = C_T U`` from ``x0 = 0``.  For every noise level
    and realization both ``U`` and ``X`` receive fresh Gaussian noise.  Each
    method's deviation from its own noiseless estimate is stored in
    ``extra["du"]``.  For the kernel and pinv forms that reference is
    ``C_T^+ xf``; for the asymptotic form it is ``U X^+ xf``, which differs
    from ``C_T^+ xf`` at finite ``N`` even without noise.  The defaults use
    the three-state plant in :mod:`minenergy.sysmodel`.
    """
    if cfg.study != "noise_bias":
        raise ValueError(f"expected a noise_bias config, got {cfg.study!r}")
    sys = noise_study_system() if sys is None else sys
    xf = NOISE_STUDY_XF if xf is None else np.asarray(xf, dtype=float)
    clean = noise_study_data(cfg, sys)
    methods = [m for m in cfg.methods if m in est.DATA_METHODS]
    reference = {m: est.estimate_from_data(m, clean, xf, augmented=False, rank_rule=cfg.rank_rule).u.u
                 for m in methods}
    records = []
    for i, sigma in enumerate(cfg.sweep):
        for k in range(cfg.trials):
            seed = derive_seed(cfg.master_seed, i + 1, k)
            noisy = add_noise(clean, NoiseModel("gaussian", float(sigma), "both", seed))
            for method in methods:
                sol = _guarded(lambda: est.estimate_from_data(
                    method, noisy, xf, augmented=False, rank_rule=cfg.rank_rule, system=sys))
                du = None if sol is None else (sol.u.u - reference[method]).tolist()
                records.append(_record(cfg, k, seed, sys, cfg.T, cfg.N, method, sol,
                                       sigma=float(sigma), du=du))
    return sorted(records, key=BenchRecord.sort_key)


def demo_system():
    return LtiSystem(DEMO_A, DEMO_B)


def demo_2d(cfg=None):
    """Trajectories of the two-state demo plant under the kernel input.

    Returns ``(trajectories, records)``: one trajectory per ``N`` in
    ``cfg.sweep`` and records for each ``N`` and method.
    """
    cfg = demo_2d_config() if cfg is None else cfg
    sys = demo_system()
    T = DEMO_INPUTS.shape[0]
    x0 = np.zeros(sys.n)
    data = run_experiments(sys, x0, DEMO_INPUTS, T, seed=cfg.master_seed)
    task = est.ControlTask(x0, DEMO_XF, T)
    reference = est.me_ctrb(sys, task)
    trajectories, records = [], []
    for N in cfg.sweep:
        sol = est.dd_kernel(data.subset(N), DEMO_XF, rank_rule=cfg.rank_rule, system=sys)
        trajectories.append(simulate(sys, x0, sol.u))
        for method in cfg.methods:
            s = reference if method == "ctrb" else sol if method == "dd-kernel" else None
            if s is None:
                s = _method_solution(method, sys, task, data.subset(N), cfg.rank_rule)
            records.append(_record(cfg, 0, cfg.master_seed, sys, T, N, method, s))
    return trajectories, sorted(records, key=BenchRecord.sort_key)


def run_study(cfg):
    """Run any study; ``demo_2d`` returns only its records here."""
    if cfg.study == "vs_N":
        return study_vs_N(cfg)
    if cfg.study == "vs_n":
        return study_vs_n(cfg)
    if cfg.study == "noise_bias":
        return study_noise_bias(cfg)
    return demo_2d(cfg)[1]


# -- scalar noise oracle ----------------------------------------------------------

def scalar_bias_closed_form(u1, eps, xf=1.0):
    """Bias of ``(u1 + w)/(u1 + v) * xf`` for ``v ~ U[-eps, eps]`` (``0 < eps < |u1|``)."""
    if not 0 < eps < abs(u1):
        raise ValueError("closed form needs 0 < eps < |u1|")
    return (u1 / (2 * eps) * math.log((u1 + eps) / (u1 - eps)) - 1.0) * xf


def scalar_noise_bias(u1=1.0, xf=1.0, eps=0.5, a=1.0, realizations=10**6, seed=0,
                      applies_to="states"):
    """Monte Carlo bias of the one-step, one-experiment scalar estimate.

    Plant ``x+ = a x + u`` from ``x0 = 0`` with ``T = N = 1``, so the single
    measurement is ``x1 = u1`` and every data-driven formula reduces to
    ``u_hat = (u1 + w) / (x1 + v) * xf``.  Noise is uniform on
    ``[-eps, eps]``.  Returns the mean bias, its standard error and the
    per-realization estimates.
    """
    x1 = a * 0.0 + u1
    noise = NoiseModel("uniform", eps, applies_to, seed)
    w = noise.sample(derive_rng(seed, 0), realizations) if applies_to in ("inputs", "both") \
        else np.zeros(realizations)
    v = noise.sample(derive_rng(seed, 1), realizations) if applies_to in ("states", "both") \
        else np.zeros(realizations)
    u_hat = (u1 + w) / (x1 + v) * xf
    u_star = u1 / x1 * xf
    dev = u_hat - u_star
    return {
        "bias": float(dev.mean()),
        "stderr": float(dev.std(ddof=1) / np.sqrt(realizations)),
        "u_hat": u_hat,
        "w": w,
        "v": v,
    }


# -- output ---------------------------------------------------------------------

def write_csv(records, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in sorted(records, key=BenchRecord.sort_key):
            writer.writerow(r.to_row())


def read_csv(path):
    with open(path, newline="") as fh:
        return [BenchRecord.from_row(row) for row in csv.DictReader(fh)]


def _point_key(r):
    return (r.n, r.m, r.T, r.N, r.extra.get("sigma"))


def summarize(records):
    """Means and medians per (sweep point, method), computed from records only.

    Overflowed records are counted but left out of the statistics.  Noise
    records additionally get ``bias = ||mean(du)||``.
    """
    groups = {}
    for r in records:
        groups.setdefault((r.study, _point_key(r), r.method), []).append(r)
    out = []
    for (study, (n, m, T, N, sigma), method), rs in sorted(
            groups.items(), key=lambda kv: kv[1][0].sort_key()):
        ok = [r for r in rs if not r.overflow]
        norms = np.array([r.input_norm for r in ok])
        errs = np.array([r.final_error for r in ok])
        row = {
            "study": study, "n": n, "m": m, "T": T, "N": N, "method": method,
            "trials": len(rs), "overflow": len(rs) - len(ok),
            "input_norm_mean": float(norms.mean()) if ok else None,
            "input_norm_median": float(np.median(norms)) if ok else None,
            "final_error_mean": float(errs.mean()) if ok else None,
            "final_error_median": float(np.median(errs)) if ok else None,
        }
        if sigma is not None:
            row["sigma"] = sigma
            du = np.array([r.extra["du"] for r in ok]) if ok else None
            row["bias"] = float(np.linalg.norm(du.mean(axis=0))) if ok else None
        out.append(row)
    return out


def write_summary_json(records, cfg, path):
    payload = {"config": cfg.to_dict(), "master_seed": cfg.master_seed,
               "groups": summarize(records)}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def median_by(records, method, **point):
    """Median final error of ``method`` over records matching ``point``."""
    vals = [r.final_error for r in records
            if r.method == method and not r.overflow
            and all(getattr(r, k) == v for k, v in point.items())]
    return float(np.median(vals)) if vals else float("nan")
