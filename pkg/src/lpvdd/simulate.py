"""Data-driven simulation from a recorded dictionary.

Given an initial window ``(w_ini, p_ini)`` and a future input/scheduling pair
``(u_r, p_r)``, find ``g`` with

    [ H_{T_i}(w)         ]       [ vec(w_ini) ]
    [ H_{T_r}(u future)  ] g  =  [ vec(u_r)   ]
    [ Hwp - P_{i,r} Hw   ]       [ 0          ]

and read the response off the future output rows, ``vec(y_r) = H_{T_r}(y future) g``.
"""
from dataclasses import dataclass

import numpy as np

from . import linalg
from .exceptions import DepthError, DimensionError
from .signals import (Trajectory, blkdiag_kron, concat, hankel, io_rows,
                      kron_lift, samples_of)


@dataclass(frozen=True)
class SimProblem:
    data: object
    w_ini: Trajectory
    p_ini: np.ndarray
    u_r: np.ndarray
    p_r: np.ndarray

    def __post_init__(self):
        d = self.data
        w_ini = self.w_ini
        if not isinstance(w_ini, Trajectory):
            w_ini = Trajectory(samples_of(w_ini) if np.size(w_ini) else np.zeros((0, d.n_w)),
                               d.n_u, d.n_y)
            object.__setattr__(self, "w_ini", w_ini)
        p_ini = np.asarray(samples_of(self.p_ini) if np.size(self.p_ini) else np.zeros((0, d.n_p)))
        u_r, p_r = samples_of(self.u_r), samples_of(self.p_r)
        object.__setattr__(self, "p_ini", p_ini.reshape(-1, d.n_p))
        object.__setattr__(self, "u_r", u_r)
        object.__setattr__(self, "p_r", p_r)
        if (w_ini.n_u, w_ini.n_y) != (d.n_u, d.n_y):
            raise DimensionError("initial trajectory IO split differs from the dictionary")
        if len(w_ini) != self.p_ini.shape[0]:
            raise DimensionError("w_ini and p_ini have different lengths")
        if u_r.shape[0] < 1 or u_r.shape[0] != p_r.shape[0]:
            raise DimensionError("u_r and p_r must be non-empty and of equal length")
        if u_r.shape[1] != d.n_u or p_r.shape[1] != d.n_p:
            raise DimensionError("u_r/p_r dimensions differ from the dictionary")

    @property
    def T_i(self):
        return len(self.w_ini)

    @property
    def T_r(self):
        return self.u_r.shape[0]


@dataclass(frozen=True)
class SimResult:
    y_r: np.ndarray
    g: np.ndarray
    residual: float
    freedom: int
    consistent: bool

    @property
    def unique(self):
        return self.freedom == 0

    @property
    def uniqueness(self):
        return "unique" if self.unique else "non_unique"

    def diagnostics(self):
        return {"residual": self.residual, "uniqueness": self.uniqueness,
                "output_freedom": self.freedom, "consistent": self.consistent,
                "g_norm": float(np.linalg.norm(self.g))}


def horizon_blocks(data, T_i, T_r, p_window):
    """Hankel blocks for a window of length ``T_i + T_r``.

    Returns ``(W_ini, U_r, Y_r, R)``: initial w rows, future u rows, future y
    rows and the restriction matrix ``Hwp - P Hw`` for ``p_window``.
    """
    L = T_i + T_r
    if L > data.N:
        raise DepthError(f"window length {L} exceeds dictionary length {data.N}")
    Hw = hankel(data.w, L).entries
    Hwp = hankel(kron_lift(data.w, data.p), L).entries
    P = samples_of(p_window)
    if P.shape != (L, data.n_p):
        raise DimensionError(f"scheduling window must have shape ({L}, {data.n_p})")
    R = Hwp - blkdiag_kron(P, data.n_w) @ Hw
    u_rows, y_rows = io_rows(L, data.n_u, data.n_y)
    n_ini = T_i * data.n_w
    return (Hw[:n_ini], Hw[u_rows[u_rows >= n_ini]], Hw[y_rows[y_rows >= n_ini]], R)


def _system(prob):
    p_window = concat(prob.p_ini, prob.p_r)
    W_ini, U_r, Y_r, R = horizon_blocks(prob.data, prob.T_i, prob.T_r, p_window)
    A = np.vstack([W_ini, U_r, R])
    b = np.concatenate([prob.w_ini.vec(), prob.u_r.reshape(-1), np.zeros(R.shape[0])])
    return A, b, Y_r


def _output_freedom(Y_r, N, safety=None):
    """Directions in ``span(N)`` that move the output, with their singular values."""
    if N.shape[1] == 0:
        return 0, None, None
    M = Y_r @ N
    _, sv, Vt = np.linalg.svd(M, full_matrices=False)
    # absolute cutoff against the size of the output block, not of M itself
    scale = np.linalg.norm(Y_r, 2)
    cut = linalg.rank_tolerance([scale], Y_r.shape, safety) if scale > 0 else 0.0
    r = int(np.sum(sv > max(cut, 1e-10 * scale)))
    return r, sv[:r], Vt[:r]


def dd_simulate(prob, consistency_tol=1e-6, safety=None):
    """Data-driven response of the recorded system to ``(u_r, p_r)`` after ``w_ini``.

    ``g`` is the minimum-norm least-squares solution; ``consistent`` is False
    when the residual exceeds ``consistency_tol * (1 + |rhs|)``.
    """
    A, b, Y_r = _system(prob)
    g, residual = linalg.lstsq_min_norm(A, b, safety)
    N = linalg.null_space(A, safety)
    freedom, _, _ = _output_freedom(Y_r, N, safety)
    y_r = (Y_r @ g).reshape(prob.T_r, prob.data.n_y)
    consistent = residual <= consistency_tol * (1.0 + np.linalg.norm(b))
    return SimResult(y_r, g, residual, freedom, bool(consistent))


def solution_samples(prob, count, rng=None, scale=None, min_separation=1e-3, safety=None,
                     max_draws=1000):
    """Several valid responses of a problem whose output is not pinned down.

    The first sample is the minimum-norm response; the others add random
    combinations of the output-moving null directions of the constraint
    system, with output perturbations of size ``scale`` (default
    ``1 + max|y_r|``). Draws closer than ``min_separation`` (max-abs) to an
    earlier sample are redrawn.
    """
    A, b, Y_r = _system(prob)
    g, _ = linalg.lstsq_min_norm(A, b, safety)
    N = linalg.null_space(A, safety)
    r, sv, Vt = _output_freedom(Y_r, N, safety)
    if r == 0:
        raise ValueError("the response is unique; there is nothing to sample")
    rng = np.random.default_rng(0) if rng is None else rng
    y0 = Y_r @ g
    if scale is None:
        scale = 1.0 + float(np.max(np.abs(y0)))
    dirs = N @ (Vt.T / sv)
    out = [y0.reshape(prob.T_r, prob.data.n_y)]
    draws = 0
    while len(out) < count:
        draws += 1
        if draws > max_draws:
            raise RuntimeError("could not draw well separated samples")
        y = (Y_r @ (g + dirs @ (scale * rng.standard_normal(r)))).reshape(out[0].shape)
        if all(np.max(np.abs(y - o)) >= min_separation for o in out):
            out.append(y)
    return out


def model_problem(model, data, T_i, T_r, rng, scale=0.01):
    """Random consistent problem for ``model`` plus its true response.

    The initial window starts from a random past of amplitude ``scale``;
    inputs and scheduling are i.i.d. N(0,1). Returns ``(problem, y_true)``.
    """
    from .models import simulate_io

    L = T_i + T_r
    u = rng.standard_normal((L, model.n_u))
    p = rng.standard_normal((L, model.n_p))
    n_r = model.n_r
    y = simulate_io(model, u, p, scale * rng.standard_normal((n_r, model.n_u)),
                    scale * rng.standard_normal((n_r, model.n_y)),
                    rng.standard_normal((n_r, model.n_p)))
    w_ini = Trajectory.from_io(u[:T_i], y[:T_i])
    prob = SimProblem(data, w_ini, p[:T_i], u[T_i:], p[T_i:])
    return prob, y[T_i:]
