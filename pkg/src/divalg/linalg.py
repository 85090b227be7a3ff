"""Rank and nullspace helpers shared by the structure computations."""

import numpy as np

RANK_RTOL = 1e-8


def nullspace(M, rtol=RANK_RTOL):
    """Orthonormal nullspace basis (as columns), the rank and the spectral gap.

    The rank cut is at ``rtol * sigma_max``.  The gap is sigma_r / sigma_{r+1},
    the ratio across the cut (infinite when the next value is exactly zero or
    when there is nothing on one side of the cut).
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    ncols = M.shape[1]
    if M.size == 0:
        return np.eye(ncols), 0, float("inf")
    _, s, vt = np.linalg.svd(M, full_matrices=True)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > rtol * smax)) if smax > 0 else 0
    # singular values beyond min(m, n) are zero
    padded = np.concatenate([s, np.zeros(max(0, ncols - s.size))])
    gap = gap_at(padded, rank)
    return vt[rank:].T.copy(), rank, gap


def gap_at(s, rank):
    if rank == 0 or rank >= len(s):
        return float("inf")
    nxt = s[rank]
    return float("inf") if nxt == 0 else float(s[rank - 1] / nxt)


def intersect_kernels(maps, rtol=RANK_RTOL):
    return nullspace(np.vstack(maps), rtol)[0]
