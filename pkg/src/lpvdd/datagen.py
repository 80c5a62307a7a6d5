"""Seeded data dictionaries for the built-in systems.

All randomness comes from ``numpy.random.Generator(PCG64(seed))``: a fixed,
documented bit generator whose streams are reproducible across platforms.
"""
import numpy as np

from .ddrep import DataDictionary
from .models import (example2_feedback_input, example2_model, msd_model, nl_example_system,
                     simulate_io)


def make_rng(seed, stream=0):
    """PCG64 generator; ``stream > 0`` gives an independent stream for the same seed."""
    if seed is None:
        raise ValueError("a seed is required for randomized generation")
    if stream:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), stream])))
    return np.random.Generator(np.random.PCG64(int(seed)))


def model_dictionary(model, N, rng, provenance="", seed=None):
    """Drive ``model`` with i.i.d. N(0,1) input and scheduling from rest."""
    u = rng.standard_normal((N, model.n_u))
    p = rng.standard_normal((N, model.n_p))
    y = simulate_io(model, u, p)
    return DataDictionary.from_arrays(u, y, p, provenance=provenance, seed=seed,
                                      complexity=model.complexity)


def msd_dictionary(N=161, seed=0):
    return model_dictionary(msd_model(), N, make_rng(seed), "msd gaussian", seed)


def example2_dictionary(N=40, seed=0):
    """Feedback-input dictionary; y(0) = u(0) = p(0) = 1 precede the recorded samples."""
    rng = make_rng(seed)
    model = example2_model()
    p = rng.standard_normal(N)
    p_prev = np.concatenate([[1.0], p[:-1]])
    u = example2_feedback_input(p_prev, u0=1.0)
    y = simulate_io(model, u.reshape(-1, 1), p.reshape(-1, 1),
                    u_init=[[1.0]], y_init=[[1.0]], p_init=[[1.0]])
    return DataDictionary.from_arrays(u, y, p.reshape(-1, 1), provenance="example2 feedback",
                                      seed=seed, complexity=model.complexity)


def example2_gaussian_dictionary(N=40, seed=0):
    return model_dictionary(example2_model(), N, make_rng(seed), "example2 gaussian", seed)


def nl_dictionary(N=199, seed=0):
    """Nonlinear example driven by u ~ N(0,1) from rest; p = psi(u, y)."""
    rng = make_rng(seed)
    sim, psi, model = nl_example_system()
    u = rng.standard_normal((N, 1))
    y = sim(u)
    return DataDictionary.from_arrays(u, y, psi(u, y), provenance="nl_example gaussian",
                                      seed=seed, complexity=model.complexity)


GENERATORS = {
    "msd": msd_dictionary,
    "example2": example2_dictionary,
    "nl_example": nl_dictionary,
}


def nl_gpe_dictionary(N=199, seed=0, L=33, max_tries=1000, safety=None):
    """First nonlinear-example dictionary from ``seed`` upward that passes the rank test.

    The open-loop system is unstable, so many N(0,1) records drift far enough
    for the scheduling to saturate and lose excitation. Returns ``(data, seed_used)``.
    """
    from .ddrep import build, gpe_check

    for s in range(seed, seed + max_tries):
        data = nl_dictionary(N, s)
        if gpe_check(build(data, L), data.complexity, safety).holds:
            return data, s
    raise RuntimeError(f"no admissible dictionary in seeds {seed}..{seed + max_tries - 1}")
