"""Random plants, experiment design, batched experiments and measurement noise.

Randomness is keyed, never sequential: :func:`derive_rng` seeds a generator
from ``SeedSequence([master_seed, *keys])``, so the stream for trial ``k``
(or noise realization ``k``) does not depend on how many other trials ran
before it or in which order.
"""

from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

import numpy as np

from . import matops
from .errors import DimensionError, EmptyDataError, InvalidInputError
from .sysmodel import LtiSystem, ctrb_matrix, free_response


def derive_rng(master_seed, *keys):
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), *map(int, keys)]))


def derive_seed(master_seed, *keys):
    """A 32-bit integer seed determined by ``(master_seed, *keys)``."""
    ss = np.random.SeedSequence([int(master_seed), *map(int, keys)])
    return int(ss.generate_state(1)[0])


@dataclass(frozen=True)
class NoiseModel:
    """Additive measurement noise.

    ``kind`` is ``"none"``, ``"gaussian"`` (``scale`` is the standard
    deviation) or ``"uniform"`` (support ``[-scale, scale]``).  ``applies_to``
    is ``"inputs"``, ``"states"`` or ``"both"``; measured outputs count as
    states.
    """

    kind: str = "none"
    scale: float = 0.0
    applies_to: str = "both"
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("none", "gaussian", "uniform"):
            raise InvalidInputError(f"unknown noise kind {self.kind!r}")
        if self.applies_to not in ("inputs", "states", "both"):
            raise InvalidInputError(f"unknown noise target {self.applies_to!r}")
        if not np.isfinite(self.scale) or self.scale < 0:
            raise InvalidInputError(f"noise scale must be >= 0, got {self.scale}")

    @property
    def silent(self):
        return self.kind == "none" or self.scale == 0.0

    def sample(self, rng, shape):
        if self.kind == "gaussian":
            return rng.normal(0.0, self.scale, size=shape)
        if self.kind == "uniform":
            return rng.uniform(-self.scale, self.scale, size=shape)
        return np.zeros(shape)

    def describe(self):
        return {"kind": self.kind, "scale": self.scale, "applies_to": self.applies_to, "seed": self.seed}


@dataclass(frozen=True)
class InputDesign:
    """How experiment inputs are chosen.

    ``kind`` is ``"iid_gaussian"``, ``"identity_basis"`` or
    ``"user_supplied"`` (then ``matrix`` holds the inputs column-wise).
    """

    kind: str = "iid_gaussian"
    N: Optional[int] = None
    seed: int = 0
    matrix: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in ("iid_gaussian", "identity_basis", "user_supplied"):
            raise InvalidInputError(f"unknown input design {self.kind!r}")
        if self.kind == "user_supplied" and self.matrix is None:
            raise InvalidInputError("user_supplied design needs a matrix")
        if self.N is not None and self.N < 1:
            raise InvalidInputError(f"N must be >= 1, got {self.N}")


class DesignedInputs(NamedTuple):
    U: np.ndarray
    rank: matops.RankInfo

    @property
    def full_row_rank(self):
        return self.rank.full_row_rank


@dataclass(frozen=True, eq=False)
class ExperimentSet:
    """Data from ``N`` experiments over horizon ``T``.

    Column ``i`` of ``U`` is the stacked input of experiment ``i`` and
    column ``i`` of ``X`` (``Y``) the state (output) it produced at time ``T``.
    """

    T: int
    U: np.ndarray
    X: np.ndarray
    x0: np.ndarray
    Y: Optional[np.ndarray] = None
    x0_known_zero: bool = False
    seed: Optional[int] = None
    noise: dict = field(default_factory=lambda: {"kind": "none"})

    def __post_init__(self):
        U = matops.as_matrix(self.U, "U", allow_empty=True)
        X = matops.as_matrix(self.X, "X", allow_empty=True)
        if U.shape[1] == 0 or X.shape[1] == 0:
            raise EmptyDataError("an experiment set needs at least one experiment")
        if 0 in U.shape or 0 in X.shape:
            raise DimensionError(f"U {U.shape} and X {X.shape} must have nonzero rows")
        if U.shape[1] != X.shape[1]:
            raise DimensionError(f"U has {U.shape[1]} experiments but X has {X.shape[1]}")
        if self.T < 1 or U.shape[0] % self.T:
            raise DimensionError(f"U has {U.shape[0]} rows, not a multiple of T={self.T}")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "x0", matops.as_vector(self.x0, "x0", X.shape[0]))
        if self.Y is not None:
            Y = matops.as_matrix(self.Y, "Y")
            if Y.shape[1] != U.shape[1]:
                raise DimensionError(f"Y has {Y.shape[1]} experiments, U has {U.shape[1]}")
            object.__setattr__(self, "Y", Y)

    @property
    def N(self):
        return self.U.shape[1]

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def m(self):
        return self.U.shape[0] // self.T

    @property
    def p(self):
        return None if self.Y is None else self.Y.shape[0]

    def subset(self, N):
        """The first ``N`` experiments."""
        return replace(self, U=self.U[:, :N], X=self.X[:, :N],
                       Y=None if self.Y is None else self.Y[:, :N])


def random_system(n, m, seed):
    """Plant with ``A ~ N(0,1)/sqrt(n)`` and ``B ~ N(0,1)`` entrywise."""
    if n < 1 or m < 1:
        raise InvalidInputError(f"n and m must be >= 1, got n={n}, m={m}")
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n)) / np.sqrt(n)
    B = rng.standard_normal((n, m))
    return LtiSystem(A, B)


def design_inputs(design, m, T):
    """Input matrix of shape ``(m*T, N)`` for the given design."""
    mT = m * T
    if design.kind == "identity_basis":
        if design.N is not None and design.N != mT:
            raise DimensionError(f"identity design needs N = mT = {mT}, got {design.N}")
        U = np.eye(mT)
    elif design.kind == "iid_gaussian":
        if design.N is None:
            raise InvalidInputError("iid_gaussian design needs N")
        U = np.random.default_rng(design.seed).standard_normal((mT, design.N))
    else:
        U = matops.as_matrix(design.matrix, "user inputs")
        if U.shape[0] != mT:
            raise DimensionError(f"user inputs have {U.shape[0]} rows, expected mT = {mT}")
        if design.N is not None and U.shape[1] != design.N:
            raise DimensionError(f"user inputs have {U.shape[1]} columns, expected N = {design.N}")
    return DesignedInputs(U, matops.rank_info(U))


def run_experiments(sys, x0, U, T, seed=None):
    """Apply every column of ``U`` from ``x0`` and record the final states.

    The final states are ``A^T x0 + C_T U``; outputs ``C X`` are added when
    the plant has an output map.
    """
    U = matops.as_matrix(U, "U")
    if U.shape[0] != sys.m * T:
        raise DimensionError(f"U has {U.shape[0]} rows, expected m*T = {sys.m * T}")
    x0 = matops.as_vector(x0, "x0", sys.n)
    X = free_response(sys, x0, T)[:, np.newaxis] + ctrb_matrix(sys, T) @ U
    Y = None if sys.C is None else sys.C @ X
    return ExperimentSet(T=T, U=U, X=X, x0=x0, Y=Y,
                         x0_known_zero=bool(np.all(x0 == 0.0)), seed=seed)


def add_noise(data, noise):
    """Measured copy of ``data`` with additive noise on inputs and/or states.

    Inputs, states and outputs draw from separate keyed streams of
    ``noise.seed``, so adding noise to states does not change the input noise.
    """
    if noise.silent:
        return replace(data, noise=noise.describe())
    U, X, Y = data.U, data.X, data.Y
    if noise.applies_to in ("inputs", "both"):
        U = U + noise.sample(derive_rng(noise.seed, 0), U.shape)
    if noise.applies_to in ("states", "both"):
        X = X + noise.sample(derive_rng(noise.seed, 1), X.shape)
        if Y is not None:
            Y = Y + noise.sample(derive_rng(noise.seed, 2), Y.shape)
    return replace(data, U=U, X=X, Y=Y, noise=noise.describe())
