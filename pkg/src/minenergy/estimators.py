"""Minimum-energy inputs from a model or from experiment data.

Model-based
    :func:`me_ctrb` (``C_T^+ d``) and :func:`me_gramian`
    (``C_T^T W_T^+ d``), with ``d = xf - A^T x0``.

Data-driven, for data ``(U, X)`` with ``X = C_T U`` (zero initial state)
    :func:`dd_kernel`      ``(I - UK (UK)^+) U X^+ xf``, ``K`` a basis of ``Ker(X)``
    :func:`dd_pinv`        ``(X U^+)^+ xf``
    :func:`dd_asymptotic`  ``U X^+ xf``

The first two are exact as soon as ``U`` has full row rank; the third
reaches ``xf`` whenever ``X`` has full row rank but only tends to minimum
norm as the number of i.i.d. experiments grows.

For an unknown nonzero initial state :func:`dd_kernel_x0` works on the
augmented pair ``Xbar = [X; 1^T]``, ``xbar_f = [xf; 1]``.  Only its kernel
variant is exact at finite ``N``.  The pinv variant
``(Xbar U^+)^+ xbar_f`` also enforces ``1^T U^+ u = 1``, which the
minimum-energy input does not satisfy in general, so its norm sits above
the optimum even with ``N > mT``.  :func:`dd_output` applies the same
formulas to measured outputs ``(U, Y, yf)``.

No estimator raises on an unreachable target.  It returns the input
that reaches the closest point it can, and the caller reads
``final_error``.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import matops
from .errors import (
    AssumptionViolatedError,
    ConfigurationError,
    DimensionError,
    EmptyDataError,
    InvalidHorizonError,
)
from .sysmodel import StackedInput, ctrb_matrix, free_response, gramian, simulate

MODEL_METHODS = ("gramian", "ctrb")
DATA_METHODS = ("dd-kernel", "dd-pinv", "dd-asymptotic")
METHODS = MODEL_METHODS + DATA_METHODS

_VARIANT_OF = {"dd-kernel": "kernel", "dd-pinv": "pinv", "dd-asymptotic": "asymptotic"}


@dataclass(frozen=True, eq=False)
class ControlTask:
    """Steer from ``x0`` to ``target`` in ``T`` steps.

    ``kind`` is ``"state"`` or ``"output"``.
    """

    x0: np.ndarray
    target: np.ndarray
    T: int
    kind: str = "state"

    def __post_init__(self):
        if int(self.T) != self.T or self.T < 1:
            raise InvalidHorizonError(f"horizon must be a positive integer, got {self.T}")
        if self.kind not in ("state", "output"):
            raise ConfigurationError(f"unknown target kind {self.kind!r}")
        object.__setattr__(self, "x0", matops.as_vector(self.x0, "x0"))
        object.__setattr__(self, "target", matops.as_vector(self.target, "target"))


@dataclass(frozen=True, eq=False)
class ControlSolution:
    u: StackedInput
    method: str
    achieved_final: Optional[np.ndarray] = None
    final_error: Optional[float] = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def input_norm(self):
        return float(np.linalg.norm(self.u.u))

    def to_report(self):
        """JSON-friendly summary (the input vector itself is not included)."""
        return {
            "method": self.method,
            "T": self.u.T,
            "m": self.u.m,
            "input_norm": self.input_norm,
            "final_error": self.final_error,
            "achieved_final": None if self.achieved_final is None else self.achieved_final.tolist(),
            "diagnostics": self.diagnostics,
        }


@dataclass(frozen=True, eq=False)
class CombinationWeights:
    """Weights ``alpha`` such that ``U @ alpha`` is the data-driven input."""

    alpha: np.ndarray

    @property
    def N(self):
        return self.alpha.size


def _evaluate(u, method, m, diagnostics, system=None, x0=None, target=None, output=False):
    su = StackedInput(u, m)
    achieved = err = None
    if system is not None:
        xT = simulate(system, x0, su).final_state
        if output:
            if system.C is None:
                raise ConfigurationError("output target needs a system with an output matrix C")
            achieved = system.C @ xT
        else:
            achieved = xT
        err = float(np.linalg.norm(achieved - target))
    return ControlSolution(su, method, achieved, err, diagnostics)


# -- model based ---------------------------------------------------------------

def _displacement(sys, task):
    if task.kind != "state":
        raise ConfigurationError("this method takes a state target")
    xf = matops.as_vector(task.target, "xf", sys.n)
    return xf, xf - free_response(sys, task.x0, task.T)


def me_ctrb(sys, task, tol=None):
    """``u = C_T^+ (xf - A^T x0)``; for output targets ``C_{O,T}^+ (yf - C A^T x0)``."""
    C_T = ctrb_matrix(sys, task.T)
    if task.kind == "output":
        if sys.C is None:
            raise ConfigurationError("output target needs a system with an output matrix C")
        target = matops.as_vector(task.target, "yf", sys.p)
        d = target - sys.C @ free_response(sys, task.x0, task.T)
        C_T = sys.C @ C_T
    else:
        target, d = _displacement(sys, task)
    u = matops.pinv(C_T, tol=tol) @ d
    diag = {"rank_C_T": matops.rank(C_T, tol), "tol": tol}
    return _evaluate(u, "ctrb", sys.m, diag, sys, task.x0, target, task.kind == "output")


def me_gramian(sys, task, tol=None):
    """Per-step Gramian formula ``u(t) = B^T (A^T)^(T-t-1) W_T^+ d``."""
    xf, d = _displacement(sys, task)
    W = gramian(sys, task.T)
    lam = matops.pinv(W, tol=tol) @ d
    blocks = []
    # block k of the stacked input is u(T-1-k) = B^T (A^T)^k lam
    for _ in range(task.T):
        blocks.append(sys.B.T @ lam)
        lam = sys.A.T @ lam
    u = np.concatenate(blocks)
    diag = {"rank_W_T": matops.rank(W, tol), "tol": tol}
    return _evaluate(u, "gramian", sys.m, diag, sys, task.x0, xf)


# -- data driven cores -----------------------------------------------------------

def _uk_rank(U, M, tol):
    """Exact rank of ``U Ker(M)``: ``rank([M; U]) - rank(M)``.

    Both blocks are normalized first so the stacked rank decision is not
    dominated by whichever block has the larger scale.
    """
    def unit(Z):
        s = np.linalg.norm(Z)
        return Z / s if s > 0 else Z

    return matops.rank(np.vstack([unit(M), unit(U)]), tol) - matops.rank(M, tol)


def kernel_input(U, M, target, tol=None, rank_rule="stacked"):
    """``(I - UK (UK)^+) U M^+ target`` with ``K`` a basis of ``Ker(M)``.

    ``rank_rule`` decides how many singular values of ``UK`` are kept.
    ``"tolerance"`` thresholds them like any other pseudoinverse.
    ``"stacked"`` keeps ``rank([M; U]) - rank(M)`` of them, which is the
    dimension of ``U Ker(M)`` in exact arithmetic.  The thresholded variant
    tends to pick up rounding-level singular values of ``UK`` when ``C_T``
    is poorly conditioned, and then projects the answer away.
    """
    K = matops.kernel_basis(M, tol).basis
    UK = U @ K
    if rank_rule == "stacked":
        r = min(max(_uk_rank(U, M, tol), 0), min(UK.shape))
        P = matops.coimage_projector(UK, rank=r)
    elif rank_rule == "tolerance":
        P = matops.coimage_projector(UK, tol=tol)
    else:
        raise ConfigurationError(f"unknown rank rule {rank_rule!r}")
    return P @ (U @ (matops.pinv(M, tol=tol) @ target))


def pinv_input(U, M, target, tol=None):
    """``(M U^+)^+ target``: invert the least-squares estimate of ``C_T``."""
    return matops.pinv(M @ matops.pinv(U, tol=tol), tol=tol) @ target


def asymptotic_input(U, M, target, tol=None):
    """``U M^+ target``: apply the least-squares inverse map."""
    return U @ (matops.pinv(M, tol=tol) @ target)


def _core(variant, U, M, target, tol, rank_rule):
    if variant == "kernel":
        return kernel_input(U, M, target, tol, rank_rule)
    if variant == "pinv":
        return pinv_input(U, M, target, tol)
    if variant == "asymptotic":
        return asymptotic_input(U, M, target, tol)
    raise ConfigurationError(f"unknown data-driven variant {variant!r}")


def _check_data(data, M, target, name):
    if data.N == 0:
        raise EmptyDataError("experiment set is empty")
    return matops.as_vector(target, name, M.shape[0])


def _require_zero_x0(data):
    if not data.x0_known_zero:
        raise AssumptionViolatedError(
            "x0_known_zero",
            "data were not recorded from x0 = 0; use dd_kernel_x0 (augmented data) instead",
        )


def _diagnostics(U, M, tol, **extra):
    rU = matops.rank_info(U, tol)
    return {
        "rank_U": rU.numerical_rank,
        "rank_X": matops.rank(M, tol),
        "full_row_rank_U": rU.full_row_rank,
        "tol": tol,
        **extra,
    }


def _zero_x0_estimate(variant, method, data, xf, tol, rank_rule, system):
    _require_zero_x0(data)
    xf = _check_data(data, data.X, xf, "xf")
    u = _core(variant, data.U, data.X, xf, tol, rank_rule)
    diag = _diagnostics(data.U, data.X, tol, rank_rule=rank_rule if variant == "kernel" else None)
    return _evaluate(u, method, data.m, diag, system, data.x0, xf)


def dd_kernel(data, xf, tol=None, rank_rule="stacked", system=None):
    """Data-driven minimum-energy input from the kernel of ``X``.

    Exact when ``U`` has full row rank.  When ``xf`` is outside ``Im(X)``
    the input reaches the orthogonal projection ``X X^+ xf`` instead.
    ``system`` (the true plant, optional) is only used to report the
    achieved final state.
    """
    return _zero_x0_estimate("kernel", "dd-kernel", data, xf, tol, rank_rule, system)


def dd_pinv(data, xf, tol=None, system=None):
    """``(X U^+)^+ xf``; equal to :func:`dd_kernel` for noiseless data."""
    return _zero_x0_estimate("pinv", "dd-pinv", data, xf, tol, None, system)


def dd_asymptotic(data, xf, tol=None, system=None):
    """``U X^+ xf``; minimum norm only in the limit of many i.i.d. experiments."""
    return _zero_x0_estimate("asymptotic", "dd-asymptotic", data, xf, tol, None, system)


def combination_weights(data, xf, tol=None, rank_rule="stacked"):
    """Weights ``alpha = X^+ xf - K (UK)^+ U X^+ xf`` behind :func:`dd_kernel`."""
    _require_zero_x0(data)
    xf = _check_data(data, data.X, xf, "xf")
    U, X = data.U, data.X
    K = matops.kernel_basis(X, tol).basis
    UK = U @ K
    a0 = matops.pinv(X, tol=tol) @ xf
    if rank_rule == "stacked":
        r = min(max(_uk_rank(U, X, tol), 0), min(UK.shape))
        w = matops.pinv(UK, rank=r) @ (U @ a0)
    else:
        w = matops.pinv(UK, tol=tol) @ (U @ a0)
    return CombinationWeights(a0 - K @ w)


# -- unknown initial state ------------------------------------------------------

def augment(M, target):
    """``([M; 1^T], [target; 1])``."""
    M = np.asarray(M, dtype=float)
    return np.vstack([M, np.ones((1, M.shape[1]))]), np.append(target, 1.0)


def check_x0_assumptions(U, tol=None, assumption_tol=None):
    """Report the two hypotheses of the augmented formula.

    Returns a dict with ``full_row_rank_U`` and ``ones_not_in_rowspace``.
    The second one (some ``w`` with ``U w = 0`` and ``1^T w != 0``) is tested
    as ``||(I - U^+ U) 1|| > assumption_tol``, default ``1e-8 * sqrt(N)``.
    """
    N = U.shape[1]
    if assumption_tol is None:
        assumption_tol = 1e-8 * np.sqrt(N)
    ones = np.ones(N)
    residual = float(np.linalg.norm(ones - matops.pinv(U, tol=tol) @ (U @ ones)))
    return {
        "full_row_rank_U": matops.rank_info(U, tol).full_row_rank,
        "ones_not_in_rowspace": bool(residual > assumption_tol),
        "kernel_ones_residual": residual,
    }


def _augmented_estimate(variant, method, data, M, target, tol, rank_rule, strict,
                        assumption_tol, system, output):
    flags = check_x0_assumptions(data.U, tol, assumption_tol)
    if strict:
        if not flags["full_row_rank_U"]:
            raise AssumptionViolatedError(
                "full_row_rank_U", f"U has rank {matops.rank(data.U, tol)} < mT = {data.U.shape[0]}")
        if not flags["ones_not_in_rowspace"]:
            raise AssumptionViolatedError(
                "kernel_with_nonzero_sum",
                "every w with U w = 0 has zero entry sum; add experiments or change the inputs")
    Mbar, tbar = augment(M, target)
    u = _core(variant, data.U, Mbar, tbar, tol, rank_rule)
    diag = _diagnostics(data.U, Mbar, tol, augmented=True,
                        rank_rule=rank_rule if variant == "kernel" else None, **flags)
    return _evaluate(u, method, data.m, diag, system, data.x0, target, output)


def dd_kernel_x0(data, xf, variant="kernel", tol=None, rank_rule="stacked", strict=True,
                 assumption_tol=None, system=None):
    """Data-driven input when the data start from an unknown ``x0``.

    With ``strict`` the hypotheses of the augmented formula are enforced
    and :class:`AssumptionViolatedError` names the one that fails;
    otherwise they are only recorded in the diagnostics.  ``variant``
    selects the kernel (exact), pinv or asymptotic form on augmented data.
    """
    if data.N == 0:
        raise EmptyDataError("experiment set is empty")
    xf = matops.as_vector(xf, "xf", data.n)
    return _augmented_estimate(variant, f"dd-{variant}", data, data.X, xf, tol, rank_rule,
                               strict, assumption_tol, system, False)


def dd_output(data, yf, variant="kernel", augmented=None, tol=None, rank_rule="stacked",
              strict=True, system=None):
    """Same formulas as the state versions with ``(Y, yf)`` for ``(X, xf)``.

    ``augmented=None`` uses the augmented form exactly when the data were
    not recorded from ``x0 = 0``.
    """
    if data.Y is None:
        raise ConfigurationError("experiment set has no output measurements Y")
    if data.N == 0:
        raise EmptyDataError("experiment set is empty")
    yf = matops.as_vector(yf, "yf", data.p)
    if augmented is None:
        augmented = not data.x0_known_zero
    if augmented:
        return _augmented_estimate(variant, f"dd-{variant}", data, data.Y, yf, tol, rank_rule,
                                   strict, None, system, True)
    _require_zero_x0(data)
    u = _core(variant, data.U, data.Y, yf, tol, rank_rule)
    diag = _diagnostics(data.U, data.Y, tol, rank_rule=rank_rule if variant == "kernel" else None)
    return _evaluate(u, f"dd-{variant}", data.m, diag, system, data.x0, yf, True)


def estimate_from_data(method, data, target, output=False, augmented=None, **kwargs):
    """Dispatch a ``dd-*`` method name to the matching estimator."""
    if method not in DATA_METHODS:
        raise ConfigurationError(f"{method!r} is not a data-driven method; choose from {DATA_METHODS}")
    variant = _VARIANT_OF[method]
    if output:
        return dd_output(data, target, variant, augmented=augmented, **kwargs)
    if augmented is None:
        augmented = not data.x0_known_zero
    if augmented:
        return dd_kernel_x0(data, target, variant, **kwargs)
    kwargs.pop("strict", None)
    if variant == "kernel":
        return dd_kernel(data, target, **kwargs)
    kwargs.pop("rank_rule", None)
    if variant == "pinv":
        return dd_pinv(data, target, **kwargs)
    return dd_asymptotic(data, target, **kwargs)


def estimate_from_model(method, sys, task, tol=None):
    if method == "ctrb":
        return me_ctrb(sys, task, tol)
    if method == "gramian":
        return me_gramian(sys, task, tol)
    raise ConfigurationError(f"{method!r} is not a model-based method; choose from {MODEL_METHODS}")


def check_dimensions(sys, data):
    """Raise if ``data`` could not have come from ``sys``."""
    if data.n != sys.n or data.m != sys.m:
        raise DimensionError(
            f"data have n={data.n}, m={data.m}; system has n={sys.n}, m={sys.m}")
