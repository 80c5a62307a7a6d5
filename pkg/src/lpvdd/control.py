"""Iterative data-driven control of a nonlinear system through its LPV embedding.

Each iteration fixes a scheduling guess ``p_r``, solves

    min_g  vec(y_r)' Q vec(y_r) + vec(u_r)' R vec(u_r)
    s.t.   H_{T_i}(w) g = vec(w_ini),   (Hwp - P_{i,r} Hw) g = 0,

and replaces ``p_r`` by ``psi(u_r, y_r)`` until the scheduling stops moving.
"""
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .exceptions import DimensionError, InfeasibleError
from .models import nl_scheduling_map
from .signals import Trajectory, blkdiag_kron, hankel, io_rows, kron_lift, samples_of

PSI_REGISTRY = {
    "nl_example": nl_scheduling_map("unnormalized"),
}


def _weight(W, size, name):
    if W is None or (isinstance(W, str) and W == "identity"):
        return np.eye(size)
    W = np.asarray(W, dtype=float)
    if W.ndim == 0:
        return float(W) * np.eye(size)
    if W.shape != (size, size):
        raise DimensionError(f"{name} must be {size}x{size}, got {W.shape}")
    if not np.allclose(W, W.T, atol=1e-12 * (1 + np.abs(W).max())):
        raise ValueError(f"{name} must be symmetric")
    if np.linalg.eigvalsh(W).min() < -1e-10 * (1 + np.abs(W).max()):
        raise ValueError(f"{name} must be positive semidefinite")
    return W


class QpBlocks:
    """Hankel blocks of one control problem; only the restriction changes per call."""

    def __init__(self, data, T_i, T_r):
        L = T_i + T_r
        if L > data.N:
            raise DimensionError(f"window length {L} exceeds dictionary length {data.N}")
        self.data, self.T_i, self.T_r, self.L = data, T_i, T_r, L
        self.Hw = hankel(data.w, L).entries
        self.Hwp = hankel(kron_lift(data.w, data.p), L).entries
        u_rows, y_rows = io_rows(L, data.n_u, data.n_y)
        n_ini = T_i * data.n_w
        self.W_ini = self.Hw[:n_ini]
        self.U_r = self.Hw[u_rows[u_rows >= n_ini]]
        self.Y_r = self.Hw[y_rows[y_rows >= n_ini]]

    def constraints(self, w_ini_vec, p_window):
        P = samples_of(p_window)
        if P.shape != (self.L, self.data.n_p):
            raise DimensionError(f"scheduling window must have shape ({self.L}, {self.data.n_p})")
        R = self.Hwp - blkdiag_kron(P, self.data.n_w) @ self.Hw
        E = np.vstack([self.W_ini, R])
        f = np.concatenate([w_ini_vec, np.zeros(R.shape[0])])
        return E, f


def solve_eq_qp(M, E, f, feas_tol=1e-8, safety=None):
    """Minimum-norm minimizer of ``g' M g`` subject to ``E g = f``.

    Null-space method: ``g = g_p + N z`` with ``g_p = E^+ f`` and ``N`` an
    orthonormal kernel basis of ``E``. Since ``g_p`` is orthogonal to ``N``, the
    minimum-norm ``z`` gives the minimum-norm optimizer.
    """
    g_p, res = linalg.lstsq_min_norm(E, f, safety)
    if res > feas_tol * (1.0 + np.linalg.norm(f)):
        raise InfeasibleError(f"equality constraints are inconsistent (residual {res:.3g})", res)
    N = linalg.null_space(E, safety)
    if N.shape[1] == 0:
        return g_p, res
    H = N.T @ M @ N
    z, _ = linalg.lstsq_min_norm(H, -(N.T @ (M @ g_p)), safety)
    return g_p + N @ z, res


def qp_step(data, w_ini, p_ini, p_r, Q=None, R=None, blocks=None, feas_tol=1e-8, safety=None):
    """One quadratic program for a fixed scheduling guess.

    Returns ``(u_r, y_r, g, objective)``. Raises ``InfeasibleError`` when the
    initial trajectory and restriction rows cannot be met.
    """
    p_r = samples_of(p_r)
    T_r = p_r.shape[0]
    w_ini = w_ini if isinstance(w_ini, Trajectory) else Trajectory(samples_of(w_ini), data.n_u,
                                                                   data.n_y)
    p_ini = np.asarray(p_ini, float).reshape(-1, data.n_p)
    if blocks is None:
        blocks = QpBlocks(data, len(w_ini), T_r)
    Q = _weight(Q, T_r * data.n_y, "Q")
    R = _weight(R, T_r * data.n_u, "R")
    E, f = blocks.constraints(w_ini.vec(), np.vstack([p_ini, p_r]))
    M = blocks.Y_r.T @ Q @ blocks.Y_r + blocks.U_r.T @ R @ blocks.U_r
    g, _ = solve_eq_qp(M, E, f, feas_tol, safety)
    y = blocks.Y_r @ g
    u = blocks.U_r @ g
    objective = float(y @ Q @ y + u @ R @ u)
    return u.reshape(T_r, data.n_u), y.reshape(T_r, data.n_y), g, objective


@dataclass
class ControlProblem:
    data: object
    w_ini: Trajectory
    p_ini: np.ndarray
    T_r: int
    psi: object
    Q: object = None
    R: object = None
    p_r_init: np.ndarray = None
    tol: float = 1e-6
    max_iter: int = 100

    def __post_init__(self):
        d = self.data
        if not isinstance(self.w_ini, Trajectory):
            self.w_ini = Trajectory(samples_of(self.w_ini), d.n_u, d.n_y)
        self.p_ini = np.asarray(self.p_ini, float).reshape(-1, d.n_p)
        if len(self.w_ini) != self.p_ini.shape[0]:
            raise DimensionError("w_ini and p_ini have different lengths")
        if self.T_r < 1:
            raise DimensionError("T_r must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if isinstance(self.psi, str):
            self.psi = PSI_REGISTRY[self.psi]
        self.Q = _weight(self.Q, self.T_r * d.n_y, "Q")
        self.R = _weight(self.R, self.T_r * d.n_u, "R")
        if self.p_r_init is None:
            self.p_r_init = np.zeros((self.T_r, d.n_p))
        self.p_r_init = np.asarray(self.p_r_init, float).reshape(self.T_r, d.n_p)


@dataclass
class ControlResult:
    u_r: np.ndarray
    y_r: np.ndarray
    p_r: np.ndarray
    iterations: int
    converged: bool
    history: list = field(default_factory=list)

    @property
    def objective(self):
        return self.history[-1]["objective"] if self.history else float("nan")


def iterate(prob, safety=None):
    """Alternate QP solves and scheduling updates until ``|p_new - p_r|_2 < tol``.

    ``p_r`` in the result is the scheduling the final QP was solved with.
    Hitting ``max_iter`` returns ``converged=False``.
    """
    blocks = QpBlocks(prob.data, len(prob.w_ini), prob.T_r)
    p_r = prob.p_r_init
    history = []
    u_r = y_r = None
    for n in range(1, prob.max_iter + 1):
        u_r, y_r, _, obj = qp_step(prob.data, prob.w_ini, prob.p_ini, p_r, prob.Q, prob.R,
                                   blocks=blocks, safety=safety)
        p_new = prob.psi(u_r, y_r)
        dp = float(np.linalg.norm(p_new - p_r))
        history.append({"iteration": n, "u": u_r, "y": y_r, "p": p_r, "objective": obj,
                        "dp": dp})
        if dp < prob.tol:
            return ControlResult(u_r, y_r, p_r, n, True, history)
        p_r = p_new
    return ControlResult(u_r, y_r, history[-1]["p"], prob.max_iter, False, history)


def nl_initial_window(T_i=3, rng=None, amplitude=1.0, warmup=20):
    """Consistent initial window of the nonlinear example, ``(w_ini, p_ini)``.

    The system is run from rest under N(0, amplitude^2) input for ``warmup``
    steps; the last ``T_i`` samples form the window.
    """
    from .models import nl_simulate

    rng = np.random.default_rng(0) if rng is None else rng
    psi = PSI_REGISTRY["nl_example"]
    u = amplitude * rng.standard_normal((warmup + T_i, 1))
    y = nl_simulate(u)
    w_ini = Trajectory.from_io(u[-T_i:], y[-T_i:])
    return w_ini, psi(u[-T_i:], y[-T_i:])
