import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import subspace_angles

from lpvdd import linalg
from lpvdd.datagen import example2_dictionary, make_rng, model_dictionary, msd_dictionary
from lpvdd.ddrep import (DataDictionary, build, embedded_pe_check, estimate_order, gpe_check,
                         gpe_required, min_samples, min_samples_report, naive_input_pe_check,
                         restricted_image, restricted_image_rank, restriction_kernel,
                         restriction_matrix)
from lpvdd.exceptions import AlignmentError, DepthError
from lpvdd.models import (Complexity, behavior_basis, kernel_residual, msd_model,
                          nl_embedding_model, random_lpv_model)

MSD_C = Complexity(1, 2, 2)


@pytest.fixture(scope="module")
def msd_data():
    return msd_dictionary(161, seed=0)


def small_systems(count=10, seed=31):
    rng = make_rng(seed)
    out = []
    for k in range(count):
        lag, n_p = 1 + k % 3, 1 + (k // 3) % 2
        m = random_lpv_model(rng, lag, n_p)
        L = lag + 2
        N = min_samples(m.complexity, n_p, 2, L)
        out.append((m, L, model_dictionary(m, N, rng), rng))
    return out


def test_dictionary_validation():
    with pytest.raises(AlignmentError):
        DataDictionary.from_arrays(np.zeros(3), np.zeros(3), np.zeros(4))
    d = DataDictionary.from_arrays(np.zeros(3), np.zeros(3), np.zeros(3))
    assert (d.N, d.n_u, d.n_y, d.n_p, d.n_w) == (3, 1, 1, 1, 2)
    with pytest.raises(DepthError):
        d.truncate(4)


def test_build_shapes(msd_data):
    rep = build(msd_data, 40)
    assert rep.Hw.shape == (80, 122)
    assert rep.Hwp.shape == (80, 122)
    with pytest.raises(DepthError):
        build(msd_data, 162)


def test_build_single_sample_and_zero_scheduling():
    d = DataDictionary.from_arrays([1.0], [2.0], [0.0])
    rep = build(d, 1)
    assert rep.Hw.shape == (2, 1) and rep.Hwp.shape == (2, 1)
    assert not np.any(rep.Hwp.entries)


def test_min_samples_formula():
    assert min_samples(MSD_C, 1, 2, 40) == 161
    assert min_samples(Complexity(0, 1, 1), 1, 1, 1) == 2
    rep = min_samples_report(nl_embedding_model().complexity, 2, 2, 33, 139)
    assert rep["bound"] == 199 and not rep["matches"]
    assert rep["claimed_columns"] < rep["required_rank"]


def test_msd_gpe(msd_data):
    rep = build(msd_data, 40)
    r = gpe_check(rep, MSD_C)
    assert (r.rank, r.required, r.holds, r.over_rank) == (122, 122, True, False)
    assert estimate_order(rep, 1) == 2
    short = gpe_check(build(msd_data.truncate(151), 40), MSD_C)
    assert not short.holds and short.rank == 112


def test_over_rank_is_reported(msd_data):
    # declaring a smaller order than the data shows
    r = gpe_check(build(msd_data, 40), Complexity(1, 1, 1))
    assert r.over_rank and not r.holds


def test_lti_data_fails_lpv_gpe(rng):
    m = msd_model()
    u = rng.standard_normal((161, 1))
    from lpvdd.models import simulate_io
    p = np.zeros((161, 1))
    d = DataDictionary.from_arrays(u, simulate_io(m, u, p), p)
    r = gpe_check(build(d, 40), MSD_C)
    assert not r.holds and r.rank == 2 + 40


def test_gpe_rank_monotone_in_samples():
    d = msd_dictionary(170, seed=3)
    ranks = [gpe_check(build(d.truncate(N), 20), MSD_C).rank for N in range(40, 171, 10)]
    assert all(a <= b for a, b in zip(ranks, ranks[1:]))


def test_own_window_lies_in_kernel(msd_data):
    rep = build(msd_data, 40)
    j = 17
    pq = msd_data.p.samples[j:j + 40]
    R = restriction_matrix(rep, pq)
    assert np.max(np.abs(R[:, j])) <= 1e-10
    N = restriction_kernel(rep, pq)
    e = np.zeros(rep.columns)
    e[j] = 1.0
    assert np.linalg.norm(e - N @ (N.T @ e)) <= 1e-8
    assert np.allclose(N.T @ N, np.eye(N.shape[1]), atol=1e-12)


def test_zero_query_kernel_equals_kernel_of_hwp(msd_data):
    rep = build(msd_data, 10)
    N = restriction_kernel(rep, np.zeros((10, 1)))
    K = linalg.null_space(rep.Hwp.entries)
    assert N.shape[1] == K.shape[1]
    assert np.max(subspace_angles(N, K)) <= 1e-8


def test_restricted_image_rank_msd(msd_data, rng):
    rep = build(msd_data, 40)
    r = restricted_image_rank(rep, rng.standard_normal((40, 1)), MSD_C)
    assert (r.rank, r.required, r.holds) == (42, 42, True)
    rep_s = build(msd_data.truncate(151), 40)
    assert not restricted_image_rank(rep_s, rng.standard_normal((40, 1)), MSD_C).holds


def test_image_inclusion(msd_data, rng):
    m = msd_model()
    rep = build(msd_data, 12)
    pq = rng.standard_normal((12, 1))
    for col in restricted_image(rep, pq).T:
        w = col.reshape(12, 2)
        r = kernel_residual(m, w[:, :1], w[:, 1:], pq)
        assert np.max(np.abs(r)) <= 1e-8 * (1 + np.abs(col).max())


def test_rank_test_equivalence_sampled():
    for m, L, d, rng in small_systems():
        c = m.complexity
        rep = build(d, L)
        assert gpe_check(rep, c).holds
        for _ in range(10):
            pq = rng.uniform(-1, 1, (L, m.n_p))
            assert restricted_image_rank(rep, pq, c).holds
            img = linalg.orth(restricted_image(rep, pq))
            assert np.max(subspace_angles(img, behavior_basis(m, pq))) <= 1e-6
        short = d.truncate(d.N - 1)
        rep_s = build(short, L)
        assert not gpe_check(rep_s, c).holds
        assert not any(restricted_image_rank(rep_s, rng.uniform(-1, 1, (L, m.n_p)), c).holds
                       for _ in range(10))


def test_example2_counterexample():
    for seed in range(5):
        d = example2_dictionary(40, seed)
        c = d.complexity
        naive = naive_input_pe_check(d, c, 10)
        emb = embedded_pe_check(d, c, 10)
        assert (naive.rank, naive.required, naive.holds) == (22, 22, True)
        assert (emb.rank, emb.required, emb.holds) == (24, 33, False)
        assert np.max(np.abs(d.w.y - 1.0)) <= 1e-12


def test_pe_checks_on_generic_and_zero_input(msd_data):
    assert naive_input_pe_check(msd_data, MSD_C, 40).holds
    # depth L + n needs (m + n_w n_p)(L + n) = 126 columns, more than 161 samples give
    long = msd_dictionary(200, seed=0)
    assert gpe_check(build(long, 40), MSD_C).holds
    assert embedded_pe_check(long, MSD_C, 40).holds
    zero = DataDictionary.from_arrays(np.zeros(60), np.zeros(60), np.ones(60))
    r = naive_input_pe_check(zero, MSD_C, 10)
    assert r.rank == 0 and not r.holds
    assert not embedded_pe_check(zero, MSD_C, 10).holds


def test_gpe_required_formula():
    assert gpe_required(MSD_C, 1, 2, 40) == 122


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_min_samples_is_the_column_count_threshold(seed):
    m = random_lpv_model(make_rng(seed), 1 + seed % 2, 1)
    c = m.complexity
    L = c.lag + 1
    N = min_samples(c, 1, 2, L)
    assert N - L + 1 == gpe_required(c, 1, 2, L)


def test_rank_safety_env_override(monkeypatch, msd_data):
    rep = build(msd_data, 40)
    monkeypatch.setenv(linalg.RANK_SAFETY_ENV, "1e14")
    assert gpe_check(rep, MSD_C).rank < 122
    monkeypatch.delenv(linalg.RANK_SAFETY_ENV)
    assert gpe_check(rep, MSD_C).rank == 122
