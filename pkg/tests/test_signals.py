import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lpvdd.exceptions import AlignmentError, DepthError, DimensionError
from lpvdd.signals import (SchedulingTrajectory, Trajectory, blkdiag_kron, concat,
                           extended_lift, hankel, io_rows, kron_lift, lift_permutation)

finite = st.floats(-1e3, 1e3, allow_nan=False)


def test_hankel_small_oracle():
    H = hankel([1, 2, 3, 4, 5], 3)
    np.testing.assert_array_equal(H.entries, [[1, 2, 3], [2, 3, 4], [3, 4, 5]])
    assert H.shape == (3, 3)


def test_hankel_vector_signal_is_time_major():
    w = np.array([[1, 10], [2, 20], [3, 30]])
    H = hankel(w, 2)
    np.testing.assert_array_equal(H.entries, [[1, 2], [10, 20], [2, 3], [20, 30]])
    np.testing.assert_array_equal(H.block(2, 1), [2, 20])
    assert H.rows_for(2, 2) == slice(2, 4)


def test_hankel_depth_errors():
    with pytest.raises(DepthError):
        hankel(np.zeros(3), 4)
    with pytest.raises(DepthError):
        hankel(np.zeros(3), 0)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 12), st.integers(1, 3), st.data())
def test_hankel_shape_and_entries(N, n, data):
    L = data.draw(st.integers(1, N))
    X = data.draw(arrays(float, (N, n), elements=finite))
    H = hankel(X, L).entries
    assert H.shape == (L * n, N - L + 1)
    for j in range(N - L + 1):
        np.testing.assert_array_equal(H[:, j], X[j:j + L].reshape(-1))


def test_kron_lift_is_p_major():
    w = np.array([[1.0, 2.0]])
    p = np.array([[3.0, 5.0]])
    np.testing.assert_array_equal(kron_lift(w, p), [[3, 6, 5, 10]])
    np.testing.assert_array_equal(kron_lift(w, p)[0], np.kron(p[0], w[0]))


def test_kron_lift_alignment():
    with pytest.raises(AlignmentError):
        kron_lift(np.zeros((3, 1)), np.zeros((4, 1)))
    w = Trajectory(np.zeros((3, 2)), 1, 1, start_index=2)
    p = SchedulingTrajectory(np.zeros((3, 1)), start_index=1)
    with pytest.raises(AlignmentError):
        kron_lift(w, p)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(1, 3), st.integers(1, 3), st.data())
def test_blkdiag_kron_maps_vec_to_lift(L, n_w, n_p, data):
    w = data.draw(arrays(float, (L, n_w), elements=finite))
    p = data.draw(arrays(float, (L, n_p), elements=finite))
    lhs = blkdiag_kron(p, n_w) @ w.reshape(-1)
    np.testing.assert_allclose(lhs, kron_lift(w, p).reshape(-1), rtol=1e-12, atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 10), st.integers(1, 2), st.integers(1, 2), st.data())
def test_stacked_hankel_is_permuted_extended_hankel(N, n_w, n_p, data):
    L = data.draw(st.integers(1, N))
    w = data.draw(arrays(float, (N, n_w), elements=finite))
    p = data.draw(arrays(float, (N, n_p), elements=finite))
    stacked = np.vstack([hankel(w, L).entries, hankel(kron_lift(w, p), L).entries])
    ext = hankel(extended_lift(w, p), L).entries
    np.testing.assert_array_equal(stacked, ext[lift_permutation(L, n_w, n_p)])


def test_trajectory_validation_and_split():
    tr = Trajectory.from_io([[1.0], [2.0]], [[3.0, 4.0], [5.0, 6.0]])
    assert (tr.n_u, tr.n_y, tr.n_w, len(tr)) == (1, 2, 3, 2)
    np.testing.assert_array_equal(tr.y, [[3, 4], [5, 6]])
    np.testing.assert_array_equal(tr.vec(), [1, 3, 4, 2, 5, 6])
    with pytest.raises(DimensionError):
        Trajectory(np.zeros((2, 3)), 1, 1)
    with pytest.raises(AlignmentError):
        Trajectory.from_io(np.zeros(2), np.zeros(3))
    with pytest.raises(ValueError):
        tr.samples[0, 0] = 1.0


def test_window_uses_one_based_inclusive_indices():
    tr = Trajectory.from_io(np.arange(5.0), np.arange(5.0) * 10)
    win = tr.window(2, 4)
    assert win.start_index == 2 and len(win) == 3
    np.testing.assert_array_equal(win.u[:, 0], [1, 2, 3])
    with pytest.raises(DepthError):
        tr.window(0, 2)
    with pytest.raises(DepthError):
        tr.window(3, 6)


def test_scheduling_box():
    SchedulingTrajectory([[0.5], [-0.5]], box=(-1, 1))
    with pytest.raises(DimensionError):
        SchedulingTrajectory([[0.5], [1.5]], box=(-1, 1))


def test_concat_with_empty_is_identity():
    a = Trajectory(np.zeros((0, 2)), 1, 1)
    b = Trajectory.from_io([1.0, 2.0], [3.0, 4.0])
    np.testing.assert_array_equal(concat(a, b).samples, b.samples)
    np.testing.assert_array_equal(concat(b, a).samples, b.samples)
    np.testing.assert_array_equal(concat(np.zeros((0, 2)), np.ones((2, 2))), np.ones((2, 2)))
    with pytest.raises(DimensionError):
        concat(b, Trajectory(np.zeros((1, 3)), 1, 2))


def test_io_rows():
    u, y = io_rows(2, 1, 2)
    np.testing.assert_array_equal(u, [0, 3])
    np.testing.assert_array_equal(y, [1, 2, 4, 5])
