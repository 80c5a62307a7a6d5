"""Model-based ground truth for shifted-affine LPV systems.

An :class:`LpvIoModel` stores the coefficient tensors of

    y(k) + sum_{i=1}^{n_a} a_i(p(k-i)) y(k-i) = sum_{j=0}^{n_b} b_j(p(k-j)) u(k-j)

with ``a_i(p) = a[i, 0] + sum_j p_j a[i, j]`` (and likewise for ``b``). From it
we build the direct state-space realization, its split into
scheduling-independent and scheduling-dependent parts, the finite-horizon
output matrices, a basis of the restricted behavior for a fixed scheduling
window, and closed-form initial-state recovery. These are the oracles the
data-driven routines are checked against.
"""
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from . import linalg
from .exceptions import DimensionError, InconsistentWindowError, InsufficientWindowError
from .signals import blkdiag_kron, samples_of


@dataclass(frozen=True)
class Complexity:
    """Integer invariants (m, lag, order) of a behavior."""

    m: int
    lag: int
    order: int

    def __post_init__(self):
        if self.m < 0 or self.lag < 1 or self.order < self.lag:
            raise DimensionError(
                f"invalid complexity (m={self.m}, lag={self.lag}, order={self.order})")

    def as_dict(self):
        return {"m": self.m, "lag": self.lag, "order": self.order}


@dataclass(frozen=True)
class LpvIoModel:
    """Shifted-affine LPV input-output model.

    Args:
        a: array (n_a+1, n_p+1, n_y, n_y); ``a[0]`` must be ``(I, 0, ..., 0)``.
        b: array (n_b+1, n_p+1, n_y, n_u).
        complexity: declared (m, lag, order); defaults to the SISO-minimal
            values ``(n_u, n_r, n_y*n_r)``.
    """

    a: np.ndarray
    b: np.ndarray
    complexity: Complexity = None

    def __post_init__(self):
        a = np.array(self.a, dtype=float)
        b = np.array(self.b, dtype=float)
        if a.ndim != 4 or b.ndim != 4:
            raise DimensionError("a and b must be 4-D coefficient tensors")
        n_y = a.shape[2]
        if a.shape[3] != n_y or b.shape[2] != n_y or a.shape[1] != b.shape[1]:
            raise DimensionError(f"inconsistent coefficient shapes {a.shape} and {b.shape}")
        if not np.allclose(a[0, 0], np.eye(n_y)) or np.any(a[0, 1:] != 0):
            raise DimensionError("leading output coefficient must be a_0 = I (scheduling-free)")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if self.complexity is None:
            object.__setattr__(
                self, "complexity", Complexity(self.n_u, self.n_r, self.n_y * self.n_r))

    @property
    def n_y(self):
        return self.a.shape[2]

    @property
    def n_u(self):
        return self.b.shape[3]

    @property
    def n_w(self):
        return self.n_u + self.n_y

    @property
    def n_p(self):
        return self.a.shape[1] - 1

    @property
    def n_a(self):
        return self.a.shape[0] - 1

    @property
    def n_b(self):
        return self.b.shape[0] - 1

    @property
    def n_r(self):
        return max(self.n_a, self.n_b)

    def padded(self):
        """Coefficient tensors zero-padded to common length ``n_r + 1``."""
        a = np.zeros((self.n_r + 1,) + self.a.shape[1:])
        b = np.zeros((self.n_r + 1,) + self.b.shape[1:])
        a[:self.n_a + 1] = self.a
        b[:self.n_b + 1] = self.b
        return a, b

    def a_at(self, i, pk):
        if i > self.n_a:
            return np.zeros((self.n_y, self.n_y))
        return self.a[i, 0] + np.tensordot(pk, self.a[i, 1:], axes=(0, 0))

    def b_at(self, i, pk):
        if i > self.n_b:
            return np.zeros((self.n_y, self.n_u))
        return self.b[i, 0] + np.tensordot(pk, self.b[i, 1:], axes=(0, 0))

    def is_scheduling_free(self):
        return not (np.any(self.a[:, 1:]) or np.any(self.b[:, 1:]))


def _past(block, n_r, width, name):
    if block is None:
        return np.zeros((n_r, width))
    arr = samples_of(block)
    if arr.shape[0] < n_r:
        raise InsufficientWindowError(
            f"{name} init window has {arr.shape[0]} samples, need at least {n_r}")
    if arr.shape[1] != width:
        raise DimensionError(f"{name} init window has dimension {arr.shape[1]}, expected {width}")
    return arr[arr.shape[0] - n_r:]


def simulate_io(model, u, p, u_init=None, y_init=None, p_init=None):
    """Run the input-output recursion.

    ``u_init``, ``y_init``, ``p_init`` are the samples preceding ``u``
    (most recent last); only the last ``n_r`` are used and zeros are assumed
    when omitted. Returns the ``(T, n_y)`` output.
    """
    U = samples_of(u)
    P = samples_of(p)
    if U.shape[0] != P.shape[0]:
        raise DimensionError(f"u has {U.shape[0]} samples but p has {P.shape[0]}")
    n_r = model.n_r
    U = np.vstack([_past(u_init, n_r, model.n_u, "u"), U])
    P = np.vstack([_past(p_init, n_r, model.n_p, "p"), P])
    Y = np.vstack([_past(y_init, n_r, model.n_y, "y"), np.zeros((U.shape[0] - n_r, model.n_y))])
    for k in range(n_r, U.shape[0]):
        acc = model.b_at(0, P[k]) @ U[k]
        for i in range(1, n_r + 1):
            acc += model.b_at(i, P[k - i]) @ U[k - i] - model.a_at(i, P[k - i]) @ Y[k - i]
        Y[k] = acc
    return Y[n_r:]


def kernel_residual(model, u, y, p):
    """Residuals of the IO relation on every time step of a window that has a full past.

    Returns an ``(T - n_r, n_y)`` array; empty if ``T <= n_r``.
    """
    U, Y, P = samples_of(u), samples_of(y), samples_of(p)
    n_r = model.n_r
    out = []
    for k in range(n_r, U.shape[0]):
        r = Y[k] - model.b_at(0, P[k]) @ U[k]
        for i in range(1, n_r + 1):
            r = r + model.a_at(i, P[k - i]) @ Y[k - i] - model.b_at(i, P[k - i]) @ U[k - i]
        out.append(r)
    return np.array(out).reshape(-1, model.n_y)


@dataclass(frozen=True)
class LpvSsModel:
    """State-space model with static scheduling dependence.

    ``A``, ``C``, ``D`` are affine: index 0 is the constant term and index
    ``j`` the coefficient of ``p_j``. ``B`` is affine plus a quadratic part
    ``B2[j, l]`` multiplying ``p_j p_l``; the direct realization needs it
    whenever ``b_0`` depends on the scheduling.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    B2: np.ndarray = None

    def __post_init__(self):
        if self.B2 is None:
            n_p = self.A.shape[0] - 1
            object.__setattr__(
                self, "B2", np.zeros((n_p, n_p) + self.B.shape[1:]))

    @property
    def n_x(self):
        return self.A.shape[1]

    @property
    def n_p(self):
        return self.A.shape[0] - 1

    @property
    def n_u(self):
        return self.B.shape[2]

    @property
    def n_y(self):
        return self.C.shape[1]

    def matrices(self, pk):
        pk = np.asarray(pk, dtype=float)
        A = self.A[0] + np.tensordot(pk, self.A[1:], axes=(0, 0))
        B = (self.B[0] + np.tensordot(pk, self.B[1:], axes=(0, 0))
             + np.einsum("j,l,jlxu->xu", pk, pk, self.B2))
        C = self.C[0] + np.tensordot(pk, self.C[1:], axes=(0, 0))
        D = self.D[0] + np.tensordot(pk, self.D[1:], axes=(0, 0))
        return A, B, C, D


def realize_ss(model):
    """Direct (observable companion) state-space realization of an IO model.

    The state has ``n_x = n_y * n_r`` entries and ``C = [I 0 ... 0]``.
    """
    a, b = model.padded()
    n_r, n_y, n_u, n_p = model.n_r, model.n_y, model.n_u, model.n_p
    n_x = n_y * n_r
    A = np.zeros((n_p + 1, n_x, n_x))
    B = np.zeros((n_p + 1, n_x, n_u))
    B2 = np.zeros((n_p, n_p, n_x, n_u))
    C = np.zeros((n_p + 1, n_y, n_x))
    D = np.zeros((n_p + 1, n_y, n_u))
    for i in range(1, n_r + 1):
        rows = slice((i - 1) * n_y, i * n_y)
        A[:, rows, :n_y] = -a[i]
        if i < n_r:
            A[0, rows, i * n_y:(i + 1) * n_y] = np.eye(n_y)
        # b_i(p) - a_i(p) b_0(p), expanded in powers of p
        B[0, rows] = b[i, 0] - a[i, 0] @ b[0, 0]
        for j in range(1, n_p + 1):
            B[j, rows] = b[i, j] - a[i, 0] @ b[0, j] - a[i, j] @ b[0, 0]
            for l in range(1, n_p + 1):
                B2[j - 1, l - 1, rows] = -a[i, j] @ b[0, l]
    C[0, :, :n_y] = np.eye(n_y)
    D[:] = b[0]
    return LpvSsModel(A, B, C, D, B2)


def state_from_past(model, u_past, y_past, p_past):
    """State of the direct realization right after a past window of length >= n_r.

    Uses the state construction ``x_1 = y - b_0(p) u`` and
    ``x_i(k) = x_{i-1}(k+1) + a_{i-1}(p(k)) y(k) - b_{i-1}(p(k)) u(k)``,
    unrolled so that only past samples appear.
    """
    n_r, n_y = model.n_r, model.n_y
    U = _past(u_past, n_r, model.n_u, "u")
    Y = _past(y_past, n_r, model.n_y, "y")
    P = _past(p_past, n_r, model.n_p, "p")
    x = np.zeros(n_y * n_r)
    # sample index n_r - s (0-based) is time k - s relative to the next step k
    for i in range(1, n_r + 1):
        acc = np.zeros(n_y)
        for j in range(i, n_r + 1):
            t = n_r - 1 - (j - i)
            acc += model.b_at(j, P[t]) @ U[t] - model.a_at(j, P[t]) @ Y[t]
        x[(i - 1) * n_y:i * n_y] = acc
    return x


def simulate_ss(ss, u, p, x0):
    """Simulate ``x+ = A(p)x + B(p)u, y = C(p)x + D(p)u``.

    Returns ``(y, x)`` with ``y`` of shape (T, n_y) and ``x`` of shape
    (T+1, n_x), ``x[0] = x0``.
    """
    U, P = samples_of(u), samples_of(p)
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.size != ss.n_x:
        raise DimensionError(f"x0 has {x0.size} entries, model has n_x={ss.n_x}")
    if U.shape[0] != P.shape[0]:
        raise DimensionError(f"u has {U.shape[0]} samples but p has {P.shape[0]}")
    T = U.shape[0]
    X = np.zeros((T + 1, ss.n_x))
    Y = np.zeros((T, ss.n_y))
    X[0] = x0
    for k in range(T):
        A, B, C, D = ss.matrices(P[k])
        Y[k] = C @ X[k] + D @ U[k]
        X[k + 1] = A @ X[k] + B @ U[k]
    return Y, X


@dataclass(frozen=True)
class StructuredSs:
    """Direct realization split into scheduling-free and scheduling-dependent parts.

    State update in terms of ``x_1`` (first state block):
        x+ = A0 x + B0 u + Ap (p (x) x_1) + Bp (p (x) u) + Bpp (p (x) p (x) u)
    and in terms of the output:
        x+ = A0 x + B0 u + Ap (p (x) y) + Bp_tilde (p (x) u) + Bpp_tilde (p (x) p (x) u)
    with ``y = C x + D0 u + Dp (p (x) u)``.
    """

    A0: np.ndarray
    Ap: np.ndarray
    B0: np.ndarray
    Bp: np.ndarray
    Bpp: np.ndarray
    C: np.ndarray
    D0: np.ndarray
    Dp: np.ndarray

    @property
    def n_x(self):
        return self.A0.shape[0]

    @property
    def n_y(self):
        return self.C.shape[0]

    @property
    def n_u(self):
        return self.B0.shape[1]

    @property
    def n_p(self):
        return self.Ap.shape[1] // self.n_y

    @property
    def Bp_tilde(self):
        return self.Bp - self.Ap @ np.kron(np.eye(self.n_p), self.D0)

    @property
    def Bpp_tilde(self):
        return self.Bpp - self.Ap @ np.kron(np.eye(self.n_p), self.Dp)


def structured_split(ss, model):
    """Split the direct realization ``ss = realize_ss(model)``.

    ``Bp`` and ``Bpp`` are the exact coefficients of ``p (x) u`` and
    ``p (x) p (x) u`` once the ``A(p) x`` scheduling term is written through
    ``x_1``; they include the ``a_i(p) b_0(p)`` cross terms of the realization.
    """
    if ss.n_x != model.n_y * model.n_r or ss.n_p != model.n_p:
        raise DimensionError("state-space model does not come from this IO model")
    n_y, n_p = ss.n_y, ss.n_p
    if np.any(ss.C[1:]) or np.any(ss.A[1:, :, n_y:]):
        raise DimensionError("state-space model is not a direct realization")
    Ap = np.hstack([ss.A[j][:, :n_y] for j in range(1, n_p + 1)])
    Bp = np.hstack([ss.B[j] for j in range(1, n_p + 1)])
    # p (x) p (x) u is ordered with the first scheduling index major
    Bpp = np.hstack([ss.B2[j, l] for j in range(n_p) for l in range(n_p)])
    Dp = np.hstack([ss.D[j] for j in range(1, n_p + 1)])
    return StructuredSs(ss.A[0].copy(), Ap, ss.B[0].copy(), Bp, Bpp, ss.C[0].copy(),
                        ss.D[0].copy(), Dp)


def simulate_structured(s, u, p, x0):
    """Simulate the structured form via its ``x_1`` update. Returns ``(y, x)``."""
    U, P = samples_of(u), samples_of(p)
    T = U.shape[0]
    X = np.zeros((T + 1, s.n_x))
    Y = np.zeros((T, s.n_y))
    X[0] = np.asarray(x0, dtype=float).reshape(-1)
    for k in range(T):
        x, uk, pk = X[k], U[k], P[k]
        pu = np.kron(pk, uk)
        ppu = np.kron(pk, pu)
        Y[k] = s.C @ x + s.D0 @ uk + s.Dp @ pu
        x1 = x[:s.n_y]
        X[k + 1] = s.A0 @ x + s.B0 @ uk + s.Ap @ np.kron(pk, x1) + s.Bp @ pu + s.Bpp @ ppu
    return Y, X


class HorizonMatrices(NamedTuple):
    O: np.ndarray
    T: np.ndarray
    Op: np.ndarray
    Tp: np.ndarray
    Tpp: np.ndarray


def _powers(A0, L):
    out = [np.eye(A0.shape[0])]
    for _ in range(1, L):
        out.append(A0 @ out[-1])
    return out


def _toeplitz(blocks_below, diag, L, n_y):
    """Lower block-Toeplitz: ``diag`` on the diagonal, ``blocks_below[d-1]`` on sub-diagonal d."""
    width = diag.shape[1]
    M = np.zeros((L * n_y, L * width))
    for r in range(L):
        for c in range(r + 1):
            blk = diag if r == c else blocks_below[r - c - 1]
            M[r * n_y:(r + 1) * n_y, c * width:(c + 1) * width] = blk
    return M


def horizon_matrices(s, L):
    """Matrices of the length-L output equation

        vec(y) = O x + T vec(u) + Op vec(y^p) + Tp vec(u^p) + Tpp vec(u^pp).
    """
    if L < 1:
        raise DimensionError(f"horizon must be positive, got {L}")
    n_y = s.n_y
    pw = _powers(s.A0, L)
    O = np.vstack([s.C @ Ak for Ak in pw])
    below = lambda M: [s.C @ pw[d] @ M for d in range(L - 1)]  # noqa: E731
    T = _toeplitz(below(s.B0), s.D0, L, n_y)
    Op = _toeplitz(below(s.Ap), np.zeros_like(s.C @ s.Ap), L, n_y)
    Tp = _toeplitz(below(s.Bp_tilde), s.Dp, L, n_y)
    Tpp = _toeplitz(below(s.Bpp_tilde), np.zeros_like(s.C @ s.Bpp_tilde), L, n_y)
    return HorizonMatrices(O, T, Op, Tp, Tpp)


def scheduling_operators(p, n_u, n_y):
    """``(P^{n_y}, P^{n_u}, P^{n_u n_p})`` for a scheduling window."""
    P = samples_of(p)
    n_p = P.shape[1]
    return blkdiag_kron(P, n_y), blkdiag_kron(P, n_u), blkdiag_kron(P, n_u * n_p)


def _window_equation(s, p):
    """``(I - Op P^{n_y}), O, Q`` such that (I - Op P^{n_y}) vec(y) = O x + Q vec(u)."""
    P = samples_of(p)
    L = P.shape[0]
    hm = horizon_matrices(s, L)
    Py, Pu, Pup = scheduling_operators(P, s.n_u, s.n_y)
    lhs = np.eye(L * s.n_y) - hm.Op @ Py
    Q = hm.T + hm.Tp @ Pu + hm.Tpp @ Pup @ Pu
    return lhs, hm.O, Q


def behavior_basis(model, p):
    """Matrix whose columns span the restricted behavior for scheduling window ``p``.

    Rows follow ``vec(w)`` (time-major, u before y in each sample); columns
    are ``[x; vec(u)]`` so there are ``n_x + n_u*L`` of them.
    """
    s = structured_split(realize_ss(model), model)
    P = samples_of(p)
    L = P.shape[0]
    lhs, O, Q = _window_equation(s, P)
    n_u, n_y, n_x = s.n_u, s.n_y, s.n_x
    # vec(y) = lhs^{-1} [O Q] [x; vec(u)]; lhs is unit lower triangular
    y_part = np.linalg.solve(lhs, np.hstack([O, Q]))
    u_part = np.hstack([np.zeros((L * n_u, n_x)), np.eye(L * n_u)])
    Bp = np.zeros((L * (n_u + n_y), n_x + L * n_u))
    for k in range(L):
        base = k * (n_u + n_y)
        Bp[base:base + n_u] = u_part[k * n_u:(k + 1) * n_u]
        Bp[base + n_u:base + n_u + n_y] = y_part[k * n_y:(k + 1) * n_y]
    return Bp


def observability_rank(s, L, safety=None):
    """Numeric rank of the scheduling-free observability matrix ``O_L``."""
    return linalg.numeric_rank(horizon_matrices(s, L).O, safety)


def _propagation(M, A0, T):
    """``[A0^{T-1} M, ..., A0 M, M]``: contribution of per-step inputs to x(T+1)."""
    pw = _powers(A0, T)
    return np.hstack([pw[T - 1 - t] @ M for t in range(T)])


def first_state(model, u, y, p, tol=1e-8):
    """State at the first sample of a window consistent with ``model``."""
    U, Y, P = samples_of(u), samples_of(y), samples_of(p)
    T = U.shape[0]
    lag = model.complexity.lag
    if T < lag:
        raise InsufficientWindowError(f"window length {T} is shorter than the lag {lag}")
    s = structured_split(realize_ss(model), model)
    lhs, O, Q = _window_equation(s, P)
    rhs = lhs @ Y.reshape(-1) - Q @ U.reshape(-1)
    # any left inverse gives the same state on consistent data; use the SVD one
    x1 = linalg.pinv(O) @ rhs
    residual = float(np.linalg.norm(O @ x1 - rhs))
    if residual > tol * (1.0 + np.linalg.norm(rhs)):
        raise InconsistentWindowError(
            f"window violates the model equations (residual {residual:.3e})", residual)
    return x1


def initial_state(model, u, y, p, tol=1e-8):
    """State right after a window of length ``T >= lag``, in closed form.

    Continuing :func:`simulate_ss` on ``realize_ss(model)`` from the returned
    state extends the window exactly.
    """
    U, Y, P = samples_of(u), samples_of(y), samples_of(p)
    T = U.shape[0]
    x1 = first_state(model, U, Y, P, tol)
    s = structured_split(realize_ss(model), model)
    Py, Pu, Pup = scheduling_operators(P, s.n_u, s.n_y)
    A0T = np.linalg.matrix_power(s.A0, T)
    x_next = (A0T @ x1
              + _propagation(s.Ap, s.A0, T) @ Py @ Y.reshape(-1)
              + _propagation(s.B0, s.A0, T) @ U.reshape(-1)
              + _propagation(s.Bp_tilde, s.A0, T) @ Pu @ U.reshape(-1)
              + _propagation(s.Bpp_tilde, s.A0, T) @ Pup @ Pu @ U.reshape(-1))
    return x_next


# --- example systems -------------------------------------------------------

MSD_PARAMS = {"m": 25.0, "s0": 5.5, "s1": 4.5, "d": 1.0, "Ts": 0.1}


def msd_model(m=25.0, s0=5.5, s1=4.5, d=1.0, Ts=0.1):
    """Euler-discretized mass-spring-damper with scheduling-dependent stiffness."""
    if m <= 0 or Ts <= 0:
        raise ValueError("mass and sampling time must be positive")
    a = np.zeros((3, 2, 1, 1))
    b = np.zeros((3, 2, 1, 1))
    a[0, 0] = 1.0
    a[1, 0] = d * Ts / m - 2.0
    a[2, 0] = 1.0 + (s0 * Ts**2 - d * Ts) / m
    a[2, 1] = s1 * Ts**2 / m
    b[2, 0] = Ts**2 / m
    return LpvIoModel(a, b, Complexity(1, 2, 2))


def example2_model():
    """``y(k) + (1 + p(k-1)) y(k-1) = u(k) + p(k-1) u(k-1)``."""
    a = np.zeros((2, 2, 1, 1))
    b = np.zeros((2, 2, 1, 1))
    a[0, 0] = 1.0
    a[1, 0] = 1.0
    a[1, 1] = 1.0
    b[0, 0] = 1.0
    b[1, 1] = 1.0
    return LpvIoModel(a, b, Complexity(1, 1, 1))


def example2_feedback_input(p, u0=1.0):
    """Input ``u(k) = p(k-1)(1 - u(k-1)) + 2`` for k = 1..N given p(0..N-1)."""
    P = np.asarray(p, dtype=float).reshape(-1)
    u = np.zeros(P.size)
    prev = u0
    for k in range(P.size):
        prev = P[k] * (1.0 - prev) + 2.0
        u[k] = prev
    return u


@dataclass(frozen=True)
class SchedulingMap:
    """Deterministic map ``(u(k), y(k)) -> p(k)``, applied sample-wise."""

    name: str
    n_p: int
    fn: Callable

    def __call__(self, u, y):
        U, Y = samples_of(u), samples_of(y)
        out = np.asarray(self.fn(U, Y), dtype=float).reshape(U.shape[0], self.n_p)
        return out


def _sinc(x, variant):
    if variant == "unnormalized":
        return np.sinc(np.asarray(x) / np.pi)
    if variant == "normalized":
        return np.sinc(x)
    raise ValueError(f"unknown sinc variant {variant!r}")


def nl_scheduling_map(sinc="unnormalized"):
    """``psi(u, y) = (tanh(y), sinc(u) exp(-y^2))``."""
    def fn(U, Y):
        y, u = Y[:, 0], U[:, 0]
        return np.column_stack([np.tanh(y), _sinc(u, sinc) * np.exp(-y**2)])
    return SchedulingMap(f"nl_example[{sinc}]", 2, fn)


def nl_embedding_model():
    """Shifted-affine embedding of the tanh/sinc example under ``psi``.

    a_1 = 0.2 - 0.4 p1, a_2 = -1 + 0.4 p1, b_1 = 1.2 + 0.4 p2.
    """
    a = np.zeros((3, 3, 1, 1))
    b = np.zeros((2, 3, 1, 1))
    a[0, 0] = 1.0
    a[1, 0], a[1, 1] = 0.2, -0.4
    a[2, 0], a[2, 1] = -1.0, 0.4
    b[1, 0], b[1, 2] = 1.2, 0.4
    return LpvIoModel(a, b, Complexity(1, 2, 2))


def nl_simulate(u, u_init=None, y_init=None, term="sin"):
    """Simulate the nonlinear example.

    ``term`` selects the reading of the input nonlinearity:
    ``"sin"`` uses ``0.4 sin(u) e^{-y^2}``, ``"sinc"`` uses ``0.4 sinc(u) e^{-y^2}``.
    Past windows hold (u(k-2), u(k-1)) and (y(k-2), y(k-1)); zeros by default.
    """
    U = np.asarray(u, dtype=float).reshape(-1)
    up = np.zeros(2) if u_init is None else np.asarray(u_init, float).reshape(-1)[-2:]
    yp = np.zeros(2) if y_init is None else np.asarray(y_init, float).reshape(-1)[-2:]
    Uall = np.concatenate([up, U])
    Y = np.concatenate([yp, np.zeros(U.size)])
    if term == "sin":
        g = np.sin
    elif term == "sinc":
        g = lambda v: np.sinc(v / np.pi)  # noqa: E731
    else:
        raise ValueError(f"unknown nonlinear term {term!r}")
    for k in range(2, Y.size):
        y1, y2, u1 = Y[k - 1], Y[k - 2], Uall[k - 1]
        Y[k] = (-(0.2 - 0.4 * np.tanh(y1)) * y1 - np.tanh(y2) * y2 + 1.2 * u1
                + 0.4 * g(u1) * np.exp(-y1**2) + (1.0 + 0.6 * np.tanh(y2)) * y2)
    return Y[2:].reshape(-1, 1)


def nl_example_system(term="sin", sinc="unnormalized"):
    """``(simulator, psi, embedding model)`` for the nonlinear example."""
    def simulator(u, u_init=None, y_init=None):
        return nl_simulate(u, u_init, y_init, term=term)
    return simulator, nl_scheduling_map(sinc), nl_embedding_model()


NL_READINGS = [(t, s) for t in ("sin", "sinc") for s in ("unnormalized", "normalized")]


def embedding_mismatch(term, sinc, u, u_init=None, y_init=None):
    """Max |y_nonlinear - y_embedding| when p is generated from the nonlinear output."""
    sim, psi, model = nl_example_system(term, sinc)
    U = np.asarray(u, float).reshape(-1, 1)
    up = np.zeros((2, 1)) if u_init is None else np.asarray(u_init, float).reshape(-1, 1)
    yp = np.zeros((2, 1)) if y_init is None else np.asarray(y_init, float).reshape(-1, 1)
    Y = sim(U, up, yp)
    P = psi(U, Y)
    p_init = psi(up, yp)
    Y_emb = simulate_io(model, U, P, up, yp, p_init)
    return float(np.max(np.abs(Y - Y_emb)))


def select_nl_reading(rng, steps=100, tol=1e-10):
    """Find the reading of the nonlinear example under which the embedding is exact.

    Returns ``(reading, report)`` where ``report`` maps every reading to its
    mismatch; ``reading`` is ``None`` if none is within ``tol``.
    """
    u = rng.standard_normal(steps)
    up, yp = rng.standard_normal(2), rng.standard_normal(2)
    report = {f"{t}/{s}": embedding_mismatch(t, s, u, up, yp) for t, s in NL_READINGS}
    exact = [(t, s) for t, s in NL_READINGS if report[f"{t}/{s}"] <= tol]
    return (exact[0] if exact else None), report


# --- random systems --------------------------------------------------------

def lti_core_coprime(model, safety=None):
    """Proxy for left-coprimeness: Sylvester matrix of a(., 0), b(., 0) is nonsingular (SISO)."""
    if model.n_u != 1 or model.n_y != 1:
        raise DimensionError("coprimeness proxy is implemented for SISO models")
    a, b = model.padded()
    n = model.n_r
    ac = a[:, 0, 0, 0]
    bc = b[:, 0, 0, 0]
    S = np.zeros((2 * n, 2 * n))
    for r in range(n):
        S[r, r:r + n + 1] = ac
        S[n + r, r:r + n + 1] = bc
    return linalg.numeric_rank(S, safety) == 2 * n


def random_lpv_model(rng, lag, n_p, max_growth=1e3, horizon=100, max_tries=1000):
    """Random SISO model with coefficients i.i.d. uniform in [-1, 1].

    Draws are rejected unless the scheduling-free core passes the
    coprimeness proxy, the leading lag coefficient is nonzero, and a test
    simulation with scheduling in [-1, 1] stays below ``max_growth`` times the
    input amplitude over ``horizon`` steps.
    """
    for _ in range(max_tries):
        a = rng.uniform(-1.0, 1.0, size=(lag + 1, n_p + 1, 1, 1))
        b = rng.uniform(-1.0, 1.0, size=(lag + 1, n_p + 1, 1, 1))
        a[0] = 0.0
        a[0, 0] = 1.0
        model = LpvIoModel(a, b, Complexity(1, lag, lag))
        if not lti_core_coprime(model):
            continue
        u = rng.uniform(-1.0, 1.0, size=(horizon, 1))
        p = rng.uniform(-1.0, 1.0, size=(horizon, n_p))
        y = simulate_io(model, u, p, rng.uniform(-1, 1, (lag, 1)), rng.uniform(-1, 1, (lag, 1)),
                        rng.uniform(-1, 1, (lag, n_p)))
        if np.all(np.isfinite(y)) and np.max(np.abs(y)) <= max_growth:
            return model
    raise RuntimeError("could not draw an admissible random model")
