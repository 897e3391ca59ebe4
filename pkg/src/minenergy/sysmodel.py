"""Discrete-time LTI plants ``x(t+1) = A x(t) + B u(t)``, ``y(t) = C x(t)``.

Input sequences over a horizon ``T`` are stacked newest first::

    u = [u(T-1); u(T-2); ...; u(0)]        (length m*T)

and the controllability matrix is ``C_T = [B, AB, ..., A^(T-1) B]``, so that
``x(T) = A^T x0 + C_T u``.  Block ``k`` of ``C_T`` multiplies ``u(T-1-k)``.
Matrix powers are formed by repeated multiplication.
"""

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import matops
from .errors import ConfigurationError, DimensionError, InvalidHorizonError


@dataclass(frozen=True, eq=False)
class LtiSystem:
    A: np.ndarray
    B: np.ndarray
    C: Optional[np.ndarray] = None

    def __post_init__(self):
        A = matops.as_matrix(self.A, "A")
        B = np.asarray(self.B, dtype=float)
        if B.ndim == 1:
            B = B[:, np.newaxis]
        B = matops.as_matrix(B, "B")
        if A.shape[0] != A.shape[1]:
            raise DimensionError(f"A must be square, got {A.shape}")
        if B.shape[0] != A.shape[0]:
            raise DimensionError(f"B must have {A.shape[0]} rows, got {B.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        if self.C is not None:
            C = matops.as_matrix(self.C, "C")
            if C.shape[1] != A.shape[0]:
                raise DimensionError(f"C must have {A.shape[0]} columns, got {C.shape}")
            object.__setattr__(self, "C", C)

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def m(self):
        return self.B.shape[1]

    @property
    def p(self):
        return None if self.C is None else self.C.shape[0]

    def with_output(self, C):
        return LtiSystem(self.A, self.B, C)


@dataclass(frozen=True, eq=False)
class StackedInput:
    """Inputs over a horizon, stored newest first (see module docstring)."""

    u: np.ndarray
    m: int

    def __post_init__(self):
        u = matops.as_vector(self.u, "u")
        if self.m < 1 or u.size % self.m or u.size == 0:
            raise DimensionError(f"input of length {u.size} is not a multiple of m={self.m}")
        object.__setattr__(self, "u", u)

    @property
    def T(self):
        return self.u.size // self.m

    def at(self, t):
        """Input applied at time ``t`` (0 <= t < T)."""
        k = self.T - 1 - t
        return self.u[k * self.m:(k + 1) * self.m]

    def chronological(self):
        """``(T, m)`` array whose row ``t`` is ``u(t)``."""
        return self.u.reshape(self.T, self.m)[::-1]

    @classmethod
    def from_sequence(cls, seq):
        """Build from a time-ordered ``(T, m)`` array ``[u(0), ..., u(T-1)]``."""
        seq = np.asarray(seq, dtype=float)
        if seq.ndim == 1:
            seq = seq[:, np.newaxis]
        return cls(seq[::-1].reshape(-1), seq.shape[1])


@dataclass(frozen=True, eq=False)
class Trajectory:
    states: np.ndarray  # (T+1, n), row t is x(t)
    inputs: StackedInput

    @property
    def final_state(self):
        return self.states[-1]


class Reachability(NamedTuple):
    reachable: bool
    residual: float


def _check_horizon(T):
    if int(T) != T or T < 1:
        raise InvalidHorizonError(f"horizon must be a positive integer, got {T}")
    return int(T)


def matrix_power(A, T):
    P = np.eye(A.shape[0])
    for _ in range(T):
        P = A @ P
    return P


def ctrb_matrix(sys, T):
    """``[B, AB, ..., A^(T-1) B]``, shape ``(n, m*T)``."""
    T = _check_horizon(T)
    blocks = [sys.B]
    for _ in range(T - 1):
        blocks.append(sys.A @ blocks[-1])
    return np.hstack(blocks)


def gramian(sys, T):
    """T-step controllability Gramian ``sum_t A^t B B^T (A^T)^t``."""
    T = _check_horizon(T)
    W = np.zeros((sys.n, sys.n))
    AkB = sys.B
    for _ in range(T):
        W += AkB @ AkB.T
        AkB = sys.A @ AkB
    return W


def output_ctrb_matrix(sys, T):
    if sys.C is None:
        raise ConfigurationError("system has no output matrix C")
    return sys.C @ ctrb_matrix(sys, T)


def free_response(sys, x0, T):
    """``A^T x0`` by repeated matrix-vector products."""
    T = _check_horizon(T)
    x = matops.as_vector(x0, "x0", sys.n)
    for _ in range(T):
        x = sys.A @ x
    return x


def _as_stacked(sys, u, T=None):
    if isinstance(u, StackedInput):
        if u.m != sys.m:
            raise DimensionError(f"input has m={u.m}, system has m={sys.m}")
        su = u
    else:
        su = StackedInput(u, sys.m)
    if T is not None and su.T != T:
        raise DimensionError(f"input covers {su.T} steps, expected {T}")
    return su


def simulate(sys, x0, u, T=None):
    """Run the plant from ``x0`` under a stacked input.

    ``u`` may be a :class:`StackedInput` or a flat newest-first vector.
    """
    su = _as_stacked(sys, u, T)
    x = matops.as_vector(x0, "x0", sys.n)
    states = np.empty((su.T + 1, sys.n))
    states[0] = x
    for t in range(su.T):
        x = sys.A @ x + sys.B @ su.at(t)
        states[t + 1] = x
    return Trajectory(states, su)


def reachable(sys, x0, xf, T, tol=1e-8):
    """Residual test for ``xf - A^T x0`` lying in the image of ``C_T``.

    Reachable iff ``||(I - C_T C_T^+) d|| <= tol * (1 + ||d||)``.
    """
    d = matops.as_vector(xf, "xf", sys.n) - free_response(sys, x0, T)
    residual = float(np.linalg.norm(matops.coimage_projector(ctrb_matrix(sys, T)) @ d))
    return Reachability(residual <= tol * (1.0 + np.linalg.norm(d)), residual)


# Three-state single-input plant and target used by the noise-bias study.
NOISE_STUDY_A = np.array([[-0.8, 0.0, 0.0], [2.0, 0.1, 0.0], [0.2, 1.0, 0.5]])
NOISE_STUDY_B = np.array([[1.0], [0.0], [0.0]])
NOISE_STUDY_XF = np.array([0.3, 1.0, 0.5])


def noise_study_system(C=None):
    return LtiSystem(NOISE_STUDY_A, NOISE_STUDY_B, C)
