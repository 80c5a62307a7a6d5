"""SVD-based numeric rank, null spaces and minimum-norm least squares.

Every rank decision in the package goes through :func:`rank_tolerance`. A
singular value counts toward the rank iff

    sigma_i > max(rows, cols) * sigma_max * eps * rank_safety

with ``rank_safety = 1e3`` unless overridden, either per call or through the
``LPVDD_RANK_SAFETY`` environment variable.
"""
import os

import numpy as np

DEFAULT_RANK_SAFETY = 1e3
RANK_SAFETY_ENV = "LPVDD_RANK_SAFETY"


def rank_safety(override=None):
    """Resolve the rank safety factor (argument, then env var, then default)."""
    if override is not None:
        return float(override)
    env = os.environ.get(RANK_SAFETY_ENV)
    if env:
        return float(env)
    return DEFAULT_RANK_SAFETY


def rank_tolerance(sv, shape, safety=None):
    """Absolute singular-value cutoff for a matrix of ``shape`` with singular values ``sv``."""
    sv = np.asarray(sv, dtype=float)
    if sv.size == 0:
        return 0.0
    return max(shape) * sv.max() * np.finfo(float).eps * rank_safety(safety)


def numeric_rank(M, safety=None):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return 0
    sv = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(sv > rank_tolerance(sv, M.shape, safety)))


def null_space(M, safety=None):
    """Orthonormal basis of the kernel of ``M`` as columns (possibly zero columns)."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    n = M.shape[1]
    if M.shape[0] == 0 or M.size == 0:
        return np.eye(n)
    _, sv, Vt = np.linalg.svd(M, full_matrices=True)
    r = int(np.sum(sv > rank_tolerance(sv, M.shape, safety)))
    return Vt[r:].T.copy()


def orth(M, safety=None):
    """Orthonormal basis of the column space of ``M``."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return np.zeros((M.shape[0], 0))
    U, sv, _ = np.linalg.svd(M, full_matrices=False)
    r = int(np.sum(sv > rank_tolerance(sv, M.shape, safety)))
    return U[:, :r]


def pinv(M, safety=None):
    """Moore-Penrose pseudo-inverse truncated at the global rank tolerance."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return np.zeros((M.shape[1], M.shape[0]))
    U, sv, Vt = np.linalg.svd(M, full_matrices=False)
    r = int(np.sum(sv > rank_tolerance(sv, M.shape, safety)))
    return (Vt[:r].T / sv[:r]) @ U[:, :r].T


def lstsq_min_norm(A, b, safety=None):
    """Minimum-norm least-squares solution of ``A x = b``.

    Returns ``(x, residual_norm)``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float)
    x = pinv(A, safety) @ b
    return x, float(np.linalg.norm(A @ x - b))


def singular_gap(sv, rank):
    """Ratio sigma_rank / sigma_{rank+1}; ``inf`` when there is no next value."""
    sv = np.asarray(sv, dtype=float)
    if rank <= 0 or rank >= sv.size:
        return float("inf")
    if sv[rank] == 0.0:
        return float("inf")
    return float(sv[rank - 1] / sv[rank])
