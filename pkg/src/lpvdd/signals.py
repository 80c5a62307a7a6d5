"""Trajectory containers, block-Hankel matrices and scheduling lifts.

Conventions used throughout the package:

* Samples are stored row-wise: a length-N signal of dimension n is an
  ``(N, n)`` array. Time indices exposed to users are 1-based.
* ``vec`` of a window stacks samples time-major (sample 1 on top), which is
  also the column layout of :func:`hankel`.
* Kronecker lifts are p-major: block ``i`` of ``p(k) (x) w(k)`` is
  ``p_i(k) * w(k)``.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import block_diag

from .exceptions import AlignmentError, DepthError, DimensionError


def _as_samples(data, name="signal"):
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be a sequence of vectors, got array of ndim {arr.ndim}")
    return arr


def _frozen(arr):
    arr = np.array(arr, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Trajectory:
    """Manifest signal w = col(u, y) with an input/output split.

    Args:
        samples: array of shape (N, n_u + n_y); columns are u first, then y.
        n_u: number of inputs.
        n_y: number of outputs.
        start_index: time index of the first sample.
    """

    samples: np.ndarray
    n_u: int
    n_y: int
    start_index: int = 1

    def __post_init__(self):
        s = _as_samples(self.samples, "samples")
        if self.n_u < 0 or self.n_y < 1:
            raise DimensionError(f"need n_u >= 0 and n_y >= 1, got n_u={self.n_u}, n_y={self.n_y}")
        if s.shape[0] == 0:
            s = s.reshape(0, self.n_u + self.n_y)
        if s.shape[1] != self.n_u + self.n_y:
            raise DimensionError(
                f"samples have dimension {s.shape[1]} but n_u + n_y = {self.n_u + self.n_y}")
        object.__setattr__(self, "samples", _frozen(s))

    @classmethod
    def from_io(cls, u, y, start_index=1):
        u = _as_samples(u, "u")
        y = _as_samples(y, "y")
        if u.shape[0] != y.shape[0]:
            raise AlignmentError(f"u has {u.shape[0]} samples but y has {y.shape[0]}")
        return cls(np.hstack([u, y]), u.shape[1], y.shape[1], start_index)

    @property
    def n_w(self):
        return self.n_u + self.n_y

    @property
    def u(self):
        return self.samples[:, :self.n_u]

    @property
    def y(self):
        return self.samples[:, self.n_u:]

    def __len__(self):
        return self.samples.shape[0]

    def window(self, first, last):
        """Samples with time indices ``first..last`` (inclusive)."""
        i0 = first - self.start_index
        i1 = last - self.start_index + 1
        if i0 < 0 or i1 > len(self) or i1 < i0:
            raise DepthError(
                f"window [{first},{last}] outside trajectory [{self.start_index},"
                f"{self.start_index + len(self) - 1}]")
        return Trajectory(self.samples[i0:i1], self.n_u, self.n_y, first)

    def vec(self):
        return self.samples.reshape(-1).copy()


@dataclass(frozen=True)
class SchedulingTrajectory:
    """Scheduling signal p, optionally declared to live in a box.

    ``box`` is a pair ``(lower, upper)`` of length-n_p arrays.
    """

    samples: np.ndarray
    start_index: int = 1
    box: tuple = field(default=None, compare=False)

    def __post_init__(self):
        s = _as_samples(self.samples, "scheduling")
        if s.shape[1] < 1:
            raise DimensionError("scheduling dimension must be >= 1")
        if self.box is not None:
            lo, hi = (np.broadcast_to(np.asarray(b, float), (s.shape[1],)) for b in self.box)
            if np.any(s < lo) or np.any(s > hi):
                raise DimensionError("scheduling samples leave the declared scheduling set")
        object.__setattr__(self, "samples", _frozen(s))

    @property
    def n_p(self):
        return self.samples.shape[1]

    def __len__(self):
        return self.samples.shape[0]

    def window(self, first, last):
        i0 = first - self.start_index
        i1 = last - self.start_index + 1
        if i0 < 0 or i1 > len(self) or i1 < i0:
            raise DepthError(
                f"window [{first},{last}] outside scheduling [{self.start_index},"
                f"{self.start_index + len(self) - 1}]")
        return SchedulingTrajectory(self.samples[i0:i1], first, self.box)


@dataclass(frozen=True)
class HankelMatrix:
    """Depth-L block Hankel matrix of a signal with ``block_rows`` channels."""

    entries: np.ndarray
    depth: int
    block_rows: int

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    @property
    def shape(self):
        return self.entries.shape

    def block(self, i, j):
        """Block at block-row ``i``, column ``j`` (both 1-based)."""
        n = self.block_rows
        return self.entries[(i - 1) * n:i * n, j - 1]

    def rows_for(self, first, last):
        """Row slice covering block rows ``first..last`` (1-based, inclusive)."""
        return slice((first - 1) * self.block_rows, last * self.block_rows)


def samples_of(signal):
    """Raw ``(N, n)`` sample array of a trajectory or array-like."""
    if isinstance(signal, (Trajectory, SchedulingTrajectory)):
        return signal.samples
    return _as_samples(signal)


def hankel(signal, L):
    """Block Hankel matrix of depth ``L``.

    Column ``j`` stacks samples ``j .. j+L-1``; the result has shape
    ``(L*n, N-L+1)``.

    >>> hankel([1, 2, 3, 4], 2).entries
    array([[1., 2., 3.],
           [2., 3., 4.]])
    """
    X = samples_of(signal)
    N, n = X.shape
    if L < 1:
        raise DepthError(f"Hankel depth must be positive, got {L}")
    if L > N:
        raise DepthError(f"Hankel depth {L} exceeds data length {N}")
    cols = N - L + 1
    # view with shape (cols, L, n): window j, time offset i
    windows = np.lib.stride_tricks.sliding_window_view(X, (L, n))[:, 0]
    H = windows.reshape(cols, L * n).T.copy()
    return HankelMatrix(H, L, n)


def kron_lift(w, p):
    """Lifted signal ``w^p(k) = p(k) (x) w(k)`` as an ``(N, n_p*n_w)`` array."""
    W = samples_of(w)
    P = samples_of(p)
    if W.shape[0] != P.shape[0]:
        raise AlignmentError(f"w has {W.shape[0]} samples but p has {P.shape[0]}")
    sw = getattr(w, "start_index", None)
    sp = getattr(p, "start_index", None)
    if sw is not None and sp is not None and sw != sp:
        raise AlignmentError(f"w starts at {sw} but p starts at {sp}")
    return (P[:, :, None] * W[:, None, :]).reshape(W.shape[0], -1)


def extended_lift(w, p):
    """Auxiliary signal ``w'(k) = col(1, p(k)) (x) w(k) = col(w(k), p(k) (x) w(k))``."""
    return np.hstack([samples_of(w), kron_lift(w, p)])


def blkdiag_kron(p, n):
    """Block-diagonal operator ``blkdiag(p(1) (x) I_n, ..., p(N) (x) I_n)``.

    Maps ``vec(w)`` of a length-N, n-dimensional window to ``vec(p (x) w)``.
    """
    P = samples_of(p)
    if P.shape[0] == 0:
        raise DimensionError("scheduling window is empty")
    eye = np.eye(n)
    return block_diag(*[np.kron(pk.reshape(-1, 1), eye) for pk in P])


def concat(a, b):
    """Concatenation ``a ^ b``; the result starts where ``a`` starts."""
    if isinstance(a, Trajectory):
        if not isinstance(b, Trajectory) or (a.n_u, a.n_y) != (b.n_u, b.n_y):
            raise DimensionError("cannot concatenate trajectories with different IO splits")
        return Trajectory(np.vstack([a.samples, b.samples]), a.n_u, a.n_y, a.start_index)
    if isinstance(a, SchedulingTrajectory):
        if not isinstance(b, SchedulingTrajectory):
            raise DimensionError("cannot concatenate scheduling with a manifest trajectory")
        if len(a) and len(b) and a.n_p != b.n_p:
            raise DimensionError(f"scheduling dimensions differ: {a.n_p} vs {b.n_p}")
        return SchedulingTrajectory(np.vstack([a.samples, b.samples]), a.start_index)
    A, B = samples_of(a), samples_of(b)
    if A.shape[0] and B.shape[0] and A.shape[1] != B.shape[1]:
        raise DimensionError(f"sample dimensions differ: {A.shape[1]} vs {B.shape[1]}")
    if A.shape[0] == 0:
        return B.copy()
    if B.shape[0] == 0:
        return A.copy()
    return np.vstack([A, B])


def lift_permutation(L, n_w, n_p):
    """Row permutation relating the two stacked Hankel layouts.

    ``np.vstack([hankel(w, L), hankel(kron_lift(w, p), L)])`` equals
    ``hankel(extended_lift(w, p), L)[perm]``.
    """
    block = (1 + n_p) * n_w
    top = [k * block + i for k in range(L) for i in range(n_w)]
    bottom = [k * block + n_w + i for k in range(L) for i in range(n_p * n_w)]
    return np.array(top + bottom, dtype=int)


def io_rows(L, n_u, n_y):
    """Row indices of inputs and outputs inside ``vec`` of a length-L w-window."""
    n_w = n_u + n_y
    u_rows = np.array([k * n_w + i for k in range(L) for i in range(n_u)], dtype=int)
    y_rows = np.array([k * n_w + n_u + i for k in range(L) for i in range(n_y)], dtype=int)
    return u_rows, y_rows
