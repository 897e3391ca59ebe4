"""Dense linear-algebra primitives built on a full SVD.

Every estimator in the package goes through these functions, so the rank
decision is made in exactly one place.  The default cutoff is the usual
least-squares convention::

    tol = max(rows, cols) * eps * sigma_max

Singular values strictly above ``tol`` count towards the numerical rank.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

EPS = np.finfo(np.float64).eps


def as_matrix(M, name="matrix", allow_empty=False):
    """Return ``M`` as a finite 2-D float64 array.

    1-D input is read as a single row.  Zero-sized dimensions are only
    accepted with ``allow_empty`` (kernel bases may have no columns).
    """
    arr = np.asarray(M, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D, got shape {arr.shape}")
    if not allow_empty and 0 in arr.shape:
        raise InvalidInputError(f"{name} must have at least one row and column, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains NaN or Inf entries")
    return arr


def as_vector(v, name="vector", size=None):
    arr = np.asarray(v, dtype=np.float64).reshape(-1)
    if size is not None and arr.size != size:
        raise InvalidInputError(f"{name} must have length {size}, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains NaN or Inf entries")
    return arr


def default_tolerance(shape, sigma_max):
    return max(shape) * EPS * float(sigma_max)


@dataclass(frozen=True)
class RankInfo:
    numerical_rank: int
    singular_values: np.ndarray
    tolerance_used: float
    shape: tuple

    @property
    def full_row_rank(self):
        return self.numerical_rank == self.shape[0]

    @property
    def full_column_rank(self):
        return self.numerical_rank == self.shape[1]


@dataclass(frozen=True)
class KernelBasis:
    """Orthonormal basis of a numerical null space, one vector per column."""

    basis: np.ndarray

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]


def _resolve_tol(shape, s, tol):
    if tol is None:
        return default_tolerance(shape, s[0] if s.size else 0.0)
    if not np.isfinite(tol) or tol <= 0:
        raise InvalidInputError(f"tolerance must be a positive real, got {tol}")
    return float(tol)


def rank_info(M, tol=None):
    """Numerical rank of ``M`` together with its singular values.

    >>> rank_info([[1.0, 1.0], [1.0, 1.0]]).numerical_rank
    1
    """
    M = as_matrix(M, allow_empty=True)
    s = np.linalg.svd(M, compute_uv=False) if M.size else np.zeros(0)
    tol = _resolve_tol(M.shape, s, tol)
    return RankInfo(int(np.count_nonzero(s > tol)), s, tol, M.shape)


def rank(M, tol=None):
    return rank_info(M, tol).numerical_rank


def pinv(M, tol=None, rank=None):
    """Moore-Penrose pseudoinverse from a thin SVD.

    Parameters
    ----------
    M : array_like, shape (r, c)
        Finite real matrix.  A matrix with a zero dimension maps to the
        zero matrix of transposed shape.
    tol : float, optional
        Singular values ``<= tol`` are treated as zero.  Defaults to
        ``max(r, c) * eps * sigma_max``.
    rank : int, optional
        Keep exactly the ``rank`` largest singular values instead of
        thresholding.  Mutually exclusive with ``tol``.

    Returns
    -------
    ndarray, shape (c, r)
    """
    M = as_matrix(M, allow_empty=True)
    if M.size == 0:
        return np.zeros(M.shape[::-1])
    if tol is not None and rank is not None:
        raise InvalidInputError("pass either tol or rank, not both")
    u, s, vh = np.linalg.svd(M, full_matrices=False)
    if rank is None:
        r = int(np.count_nonzero(s > _resolve_tol(M.shape, s, tol)))
    else:
        r = int(min(max(rank, 0), s.size))
    return (vh[:r].T / s[:r]) @ u[:, :r].T


def kernel_basis(M, tol=None):
    """Orthonormal basis of the numerical null space of ``M``.

    The basis vectors are the right singular vectors whose singular
    values fall at or below the tolerance, plus the ones beyond
    ``min(rows, cols)``.  Their sign is whatever LAPACK returns; compare
    bases through projectors only.
    """
    M = as_matrix(M, allow_empty=True)
    cols = M.shape[1]
    if M.size == 0:
        return KernelBasis(np.eye(cols))
    _, s, vh = np.linalg.svd(M, full_matrices=True)
    r = int(np.count_nonzero(s > _resolve_tol(M.shape, s, tol)))
    return KernelBasis(np.ascontiguousarray(vh[r:].T))


def coimage_projector(M, tol=None, rank=None):
    """Orthogonal projector ``I - M M^+`` onto the complement of ``Im(M)``.

    An ``r x 0`` matrix has an empty image, so the result is ``I_r``.
    """
    M = as_matrix(M, allow_empty=True)
    return np.eye(M.shape[0]) - M @ pinv(M, tol=tol, rank=rank)


def image_projector(M, tol=None, rank=None):
    M = as_matrix(M, allow_empty=True)
    return M @ pinv(M, tol=tol, rank=rank)


def mp_residuals(M, P):
    """Frobenius norms of the four Moore-Penrose condition residuals.

    Returns ``(||MPM - M||, ||PMP - P||, ||(MP)^T - MP||, ||(PM)^T - PM||)``.
    """
    M = np.asarray(M, dtype=float)
    P = np.asarray(P, dtype=float)
    MP = M @ P
    PM = P @ M
    return (
        np.linalg.norm(MP @ M - M),
        np.linalg.norm(PM @ P - P),
        np.linalg.norm(MP.T - MP),
        np.linalg.norm(PM.T - PM),
    )
