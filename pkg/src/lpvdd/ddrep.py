"""Data-driven representation of shifted-affine LPV behaviors.

A single recorded trajectory ``(w, p)`` of length N_d yields two depth-L
Hankel matrices, ``Hw = H_L(w)`` and ``Hwp = H_L(p (x) w)``. For a scheduling
window ``p_query`` the vectors ``g`` in the kernel of ``Hwp - P Hw`` (with
``P = p_query (x) I_{n_w}`` block-diagonal) generate trajectories
``Hw g`` of the LPV system along ``p_query``. Whether these exhaust the
restricted behavior is decided by one rank test on ``[Hw; Hwp]``.
"""
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .exceptions import AlignmentError, DepthError, DimensionError
from .models import Complexity
from .signals import (HankelMatrix, SchedulingTrajectory, Trajectory, blkdiag_kron, hankel,
                      kron_lift, samples_of)


@dataclass(frozen=True)
class DataDictionary:
    """Recorded manifest and scheduling trajectories of equal length."""

    w: Trajectory
    p: SchedulingTrajectory
    provenance: str = ""
    seed: int = None
    complexity: Complexity = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.w) != len(self.p):
            raise AlignmentError(f"w has {len(self.w)} samples but p has {len(self.p)}")
        if len(self.w) < 1:
            raise DimensionError("a data dictionary needs at least one sample")

    @classmethod
    def from_arrays(cls, u, y, p, **kwargs):
        return cls(Trajectory.from_io(u, y), SchedulingTrajectory(p), **kwargs)

    @property
    def N(self):
        return len(self.w)

    @property
    def n_u(self):
        return self.w.n_u

    @property
    def n_y(self):
        return self.w.n_y

    @property
    def n_w(self):
        return self.w.n_w

    @property
    def n_p(self):
        return self.p.n_p

    def truncate(self, N):
        """Keep the first ``N`` samples."""
        if not 1 <= N <= self.N:
            raise DepthError(f"cannot truncate a length-{self.N} dictionary to {N}")
        return DataDictionary(self.w.window(1, N), self.p.window(1, N),
                              self.provenance, self.seed, self.complexity)


@dataclass(frozen=True)
class DdRepresentation:
    """Hankel pair of a dictionary at depth L, with the SVD of their stack."""

    Hw: HankelMatrix
    Hwp: HankelMatrix
    L: int
    n_u: int
    n_y: int
    n_p: int
    singular_values: np.ndarray

    @property
    def n_w(self):
        return self.n_u + self.n_y

    @property
    def columns(self):
        return self.Hw.shape[1]

    def stacked(self):
        return np.vstack([self.Hw.entries, self.Hwp.entries])


def build(data, L):
    """Build the depth-L representation of a dictionary."""
    if L > data.N:
        raise DepthError(f"Hankel depth {L} exceeds dictionary length {data.N}")
    Hw = hankel(data.w, L)
    Hwp = hankel(kron_lift(data.w, data.p), L)
    sv = np.linalg.svd(np.vstack([Hw.entries, Hwp.entries]), compute_uv=False)
    sv.setflags(write=False)
    return DdRepresentation(Hw, Hwp, L, data.n_u, data.n_y, data.n_p, sv)


@dataclass(frozen=True)
class RankReport:
    """Outcome of a rank condition.

    ``required`` is the rank the condition asks for; ``over_rank`` flags a
    measured rank above it, which valid noise-free data cannot produce.
    """

    rank: int
    required: int
    holds: bool
    over_rank: bool = False
    gap: float = float("inf")
    columns: int = None

    def as_dict(self):
        return {"rank": self.rank, "required": self.required, "holds": self.holds,
                "over_rank": self.over_rank, "gap": self.gap, "columns": self.columns}


def _rank_from_sv(sv, shape, safety=None):
    return int(np.sum(sv > linalg.rank_tolerance(sv, shape, safety)))


def gpe_required(c, n_p, n_w, L):
    return c.order + (c.m + n_p * n_w) * L


def gpe_check(rep, c, safety=None):
    """LPV generalized persistence of excitation: rank [Hw; Hwp] = n + (m + n_p n_w) L."""
    shape = (rep.L * rep.n_w * (1 + rep.n_p), rep.columns)
    rank = _rank_from_sv(rep.singular_values, shape, safety)
    required = gpe_required(c, rep.n_p, rep.n_w, rep.L)
    return RankReport(rank, required, rank == required, rank > required,
                      linalg.singular_gap(rep.singular_values, rank), rep.columns)


def estimate_order(rep, m, safety=None):
    """Order implied by the rank defect when only the input count is asserted.

    Convenience only: assumes the data satisfies the rank condition.
    """
    shape = (rep.L * rep.n_w * (1 + rep.n_p), rep.columns)
    rank = _rank_from_sv(rep.singular_values, shape, safety)
    return rank - (m + rep.n_p * rep.n_w) * rep.L


def min_samples(c, n_p, n_w, L):
    """Smallest N_d for which the rank condition can hold: (1 + n_w n_p + m) L + n - 1."""
    return (1 + n_w * n_p + c.m) * L + c.order - 1


def min_samples_report(c, n_p, n_w, L, claimed):
    """Compare a claimed dictionary length against the recomputed bound."""
    bound = min_samples(c, n_p, n_w, L)
    return {"bound": bound, "claimed": claimed, "matches": bound == claimed,
            "claimed_columns": claimed - L + 1,
            "required_rank": gpe_required(c, n_p, n_w, L)}


def restriction_matrix(rep, p_query):
    """``Hwp - (p_query (x) I_{n_w}) Hw`` for a length-L scheduling window."""
    P = samples_of(p_query)
    if P.shape != (rep.L, rep.n_p):
        raise DimensionError(f"p_query must have shape ({rep.L}, {rep.n_p}), got {P.shape}")
    return rep.Hwp.entries - blkdiag_kron(P, rep.n_w) @ rep.Hw.entries


def restriction_kernel(rep, p_query, safety=None):
    """Orthonormal basis ``N_p`` of the kernel of the restriction matrix."""
    return linalg.null_space(restriction_matrix(rep, p_query), safety)


def restricted_image(rep, p_query, safety=None):
    """``Hw N_p``: its columns are w-windows compatible with ``p_query``."""
    return rep.Hw.entries @ restriction_kernel(rep, p_query, safety)


def restricted_image_rank(rep, p_query, c, safety=None):
    """rank(Hw N_p) against n + m L."""
    M = restricted_image(rep, p_query, safety)
    rank = linalg.numeric_rank(M, safety) if M.shape[1] else 0
    required = c.order + c.m * rep.L
    return RankReport(rank, required, rank == required, rank > required, columns=M.shape[1])


def _pe_rank(blocks, bound, safety):
    M = np.vstack([b.entries for b in blocks])
    rank = linalg.numeric_rank(M, safety)
    return RankReport(rank, bound, rank == bound, rank > bound, columns=M.shape[1])


def naive_input_pe_check(data, c, L, safety=None):
    """Input-only excitation test on [H(u); H(p (x) u)] at depth L + n.

    Kept to demonstrate that it can pass on data that does not represent the
    behavior; do not use it to validate a dictionary.
    """
    depth = L + c.order
    if depth > data.N:
        raise DepthError(f"depth {depth} exceeds dictionary length {data.N}")
    u = data.w.u
    bound = c.m * (1 + data.n_p) * depth
    return _pe_rank([hankel(u, depth), hankel(kron_lift(u, data.p), depth)], bound, safety)


def embedded_pe_check(data, c, L, safety=None):
    """Excitation test on the free variables of the LTI embedding: u, p (x) u, p (x) y."""
    depth = L + c.order
    if depth > data.N:
        raise DepthError(f"depth {depth} exceeds dictionary length {data.N}")
    u, y = data.w.u, data.w.y
    bound = (c.m + data.n_w * data.n_p) * depth
    blocks = [hankel(u, depth), hankel(kron_lift(u, data.p), depth),
              hankel(kron_lift(y, data.p), depth)]
    return _pe_rank(blocks, bound, safety)
