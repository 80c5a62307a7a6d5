import numpy as np
import pytest

from lpvdd import linalg
from lpvdd.control import (PSI_REGISTRY, ControlProblem, QpBlocks, iterate, nl_initial_window,
                           qp_step)
from lpvdd.datagen import make_rng, msd_dictionary, nl_gpe_dictionary
from lpvdd.ddrep import DataDictionary
from lpvdd.exceptions import InfeasibleError
from lpvdd.models import msd_model, simulate_io
from lpvdd.signals import Trajectory

from .conftest import assert_close

PRINTED_W_INI = np.array([[0.75, 2.84], [-0.26, 7.31], [-0.03, 2.25]])
PRINTED_P_INI = np.array([[0.99, 0.0], [0.99, 0.0], [0.978, 0.006]])


@pytest.fixture(scope="module")
def nl_data():
    data, _ = nl_gpe_dictionary(199, 0, 33)
    return data


def kkt_oracle(Hy, Hu, E, f, Q, R):
    """Dense KKT solve of min g'(Hy'QHy + Hu'RHu)g s.t. Eg = f."""
    M = Hy.T @ Q @ Hy + Hu.T @ R @ Hu
    n, m = M.shape[0], E.shape[0]
    K = np.block([[2 * M, E.T], [E, np.zeros((m, m))]])
    rhs = np.concatenate([np.zeros(n), f])
    sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
    return sol[:n]


def test_zero_initial_window_gives_zero_solution(nl_data, rng):
    w0 = Trajectory(np.zeros((3, 2)), 1, 1)
    u, y, g, obj = qp_step(nl_data, w0, np.zeros((3, 2)), rng.standard_normal((30, 2)))
    assert np.max(np.abs(u)) <= 1e-12 and np.max(np.abs(y)) <= 1e-12 and obj <= 1e-20


def test_lti_reduction_matches_kkt_oracle(rng):
    m = msd_model()
    N = 120
    u_d = rng.standard_normal((N, 1))
    p_d = np.zeros((N, 1))
    data = DataDictionary.from_arrays(u_d, simulate_io(m, u_d, p_d), p_d)
    u0 = rng.standard_normal((4, 1))
    y0 = simulate_io(m, u0, np.zeros((4, 1)), [[0.3], [0.1]], [[0.2], [-0.1]], [[0.0], [0.0]])
    w_ini = Trajectory.from_io(u0, y0)
    T_r = 12
    u, y, g, obj = qp_step(data, w_ini, np.zeros((4, 1)), np.zeros((T_r, 1)))
    blocks = QpBlocks(data, 4, T_r)
    E, f = blocks.constraints(w_ini.vec(), np.zeros((4 + T_r, 1)))
    g_k = kkt_oracle(blocks.Y_r, blocks.U_r, E, f, np.eye(T_r), np.eye(T_r))
    assert_close(u.reshape(-1), blocks.U_r @ g_k, 1e-8)
    assert_close(y.reshape(-1), blocks.Y_r @ g_k, 1e-8)


def test_qp_optimality_conditions(nl_data, rng):
    w_ini, p_ini = nl_initial_window(3, make_rng(5))
    p_r = rng.uniform(-1, 1, (30, 2))
    blocks = QpBlocks(nl_data, 3, 30)
    u, y, g, obj = qp_step(nl_data, w_ini, p_ini, p_r, blocks=blocks)
    E, f = blocks.constraints(w_ini.vec(), np.vstack([p_ini, p_r]))
    M = blocks.Y_r.T @ blocks.Y_r + blocks.U_r.T @ blocks.U_r
    N = linalg.null_space(E)
    scale = 1 + np.linalg.norm(M) * np.linalg.norm(g)
    assert np.linalg.norm(N.T @ (M @ g)) <= 1e-8 * scale
    assert np.linalg.norm(E @ g - f) <= 1e-8 * (1 + np.linalg.norm(f))
    # g is the minimum-norm optimizer: no component along directions that leave the cost unchanged
    Z = N @ linalg.null_space(N.T @ M @ N)
    if Z.shape[1]:
        assert np.linalg.norm(Z.T @ g) <= 1e-8 * (1 + np.linalg.norm(g))
    g_k = kkt_oracle(blocks.Y_r, blocks.U_r, E, f, np.eye(30), np.eye(30))
    assert_close(y.reshape(-1), blocks.Y_r @ g_k, 1e-7)
    assert obj == pytest.approx(float(y.reshape(-1) @ y.reshape(-1) + u.reshape(-1) @ u.reshape(-1)))


def test_printed_initial_window_is_infeasible(nl_data):
    w = Trajectory(PRINTED_W_INI, 1, 1)
    with pytest.raises(InfeasibleError) as exc:
        qp_step(nl_data, w, PRINTED_P_INI, np.zeros((30, 2)))
    assert exc.value.residual > 1e-3


def test_printed_scheduling_window_is_psi_of_its_signals():
    psi = PSI_REGISTRY["nl_example"]
    # printed to two decimals, truncated
    assert_close(psi(PRINTED_W_INI[:, :1], PRINTED_W_INI[:, 1:]), PRINTED_P_INI, 1e-2)


def test_zero_initial_window_iteration(nl_data):
    w0 = Trajectory(np.zeros((3, 2)), 1, 1)
    p0 = np.tile([0.0, 1.0], (3, 1))
    res = iterate(ControlProblem(nl_data, w0, p0, 30, "nl_example"))
    assert res.converged and res.iterations == 2
    assert np.max(np.abs(res.u_r)) <= 1e-12 and np.max(np.abs(res.y_r)) <= 1e-12
    # starting from the fixed point itself, one solve suffices
    res1 = iterate(ControlProblem(nl_data, w0, p0, 30, "nl_example",
                                  p_r_init=np.tile([0.0, 1.0], (30, 1))))
    assert res1.converged and res1.iterations == 1


def test_fixed_point_consistency(nl_data):
    w_ini, p_ini = nl_initial_window(3, make_rng(1, 4), warmup=10)
    prob = ControlProblem(nl_data, w_ini, p_ini, 30, "nl_example", tol=1e-6, max_iter=30)
    res = iterate(prob)
    assert res.converged
    assert np.linalg.norm(prob.psi(res.u_r, res.y_r) - res.p_r) < prob.tol
    assert res.history[-1]["dp"] < prob.tol
    blocks = QpBlocks(nl_data, 3, 30)
    E, f = blocks.constraints(w_ini.vec(), np.vstack([p_ini, res.p_r]))
    g = np.linalg.lstsq(np.vstack([E, blocks.U_r]),
                        np.concatenate([f, res.u_r.reshape(-1)]), rcond=None)[0]
    assert np.linalg.norm(E @ g - f) <= 1e-8 * (1 + np.linalg.norm(f))
    assert_close(blocks.Y_r @ g, res.y_r.reshape(-1), 1e-8)
    assert [h["iteration"] for h in res.history] == list(range(1, res.iterations + 1))


def test_max_iter_gives_unconverged_result(nl_data):
    w_ini, p_ini = nl_initial_window(3, make_rng(1, 4), warmup=10)
    res = iterate(ControlProblem(nl_data, w_ini, p_ini, 30, "nl_example", max_iter=2))
    assert not res.converged and res.iterations == 2 and len(res.history) == 2


def test_problem_validation(nl_data):
    w0 = Trajectory(np.zeros((3, 2)), 1, 1)
    p0 = np.zeros((3, 2))
    with pytest.raises(ValueError):
        ControlProblem(nl_data, w0, p0, 30, "nl_example", tol=0.0)
    bad = np.eye(30)
    bad[0, 1] = 1.0
    with pytest.raises(ValueError):
        ControlProblem(nl_data, w0, p0, 30, "nl_example", Q=bad)
    with pytest.raises(ValueError):
        ControlProblem(nl_data, w0, p0, 30, "nl_example", R=-np.eye(30))
    with pytest.raises(ValueError):
        ControlProblem(nl_data, w0, p0, 30, "nl_example", Q=np.eye(29))
    with pytest.raises(KeyError):
        ControlProblem(nl_data, w0, p0, 30, "no_such_map")


def test_weights_change_the_optimum(nl_data):
    w_ini, p_ini = nl_initial_window(3, make_rng(2, 4), warmup=10)
    p_r = np.zeros((30, 2))
    u1, y1, _, _ = qp_step(nl_data, w_ini, p_ini, p_r)
    u2, y2, _, _ = qp_step(nl_data, w_ini, p_ini, p_r, R=100.0 * np.eye(30))
    assert np.linalg.norm(u2) < np.linalg.norm(u1)


def test_constant_scheduling_map_needs_one_solve(rng):
    data = msd_dictionary(161, seed=0)
    m = msd_model()
    psi = lambda u, y: np.zeros((len(u), 1))  # noqa: E731
    u0 = rng.standard_normal((5, 1))
    y0 = simulate_io(m, u0, np.zeros((5, 1)), [[0.0], [0.0]], [[0.01], [0.02]], [[0.0], [0.0]])
    res = iterate(ControlProblem(data, Trajectory.from_io(u0, y0), np.zeros((5, 1)), 20, psi))
    assert res.converged and res.iterations == 1
    # the plan is a trajectory of the model continuing the initial window
    y_true = simulate_io(m, res.u_r, np.zeros((20, 1)), u0, y0, np.zeros((5, 1)))
    assert_close(res.y_r, y_true, 1e-8)
