"""Hot loops: citation-edge accumulation and per-entity aggregation.

Every kernel has a numba version and a numpy version.  Both accumulate
floating-point sums strictly in input order, so they return bit-identical
results; the public names at the bottom pick one according to
``_accel.USE_NUMBA``.
"""
import numpy as np

from . import _accel
from ._accel import njit


# --------------------------------------------------------------------------
# citation index

@njit
def _citation_counts_numba(ref_offsets, ref_targets, n_papers):
    n_cit = np.zeros(n_papers, dtype=np.int64)
    n_icit = np.zeros(n_papers, dtype=np.float64)
    n_citing = ref_offsets.shape[0] - 1
    for q in range(n_citing):
        start = ref_offsets[q]
        stop = ref_offsets[q + 1]
        if stop == start:
            continue
        w = 1.0 / (stop - start)
        for k in range(start, stop):
            t = ref_targets[k]
            if t >= 0:
                n_cit[t] += 1
                n_icit[t] += w
    return n_cit, n_icit


def _citation_counts_numpy(ref_offsets, ref_targets, n_papers):
    lengths = np.diff(ref_offsets)
    citer = np.repeat(np.arange(lengths.shape[0]), lengths)
    internal = ref_targets >= 0
    targets = ref_targets[internal]
    # bincount accumulates sequentially in array order, like the loop above
    weights = 1.0 / lengths[citer[internal]]
    n_cit = np.bincount(targets, minlength=n_papers).astype(np.int64)
    n_icit = np.bincount(targets, weights=weights, minlength=n_papers)
    return n_cit, n_icit.astype(np.float64)


# --------------------------------------------------------------------------
# per-entity aggregation

@njit
def _group_profiles_numba(offsets, members, n_aut, n_cit, n_icit, weight):
    n_groups = offsets.shape[0] - 1
    n_pap = np.zeros(n_groups, dtype=np.int64)
    n_totcit = np.zeros(n_groups, dtype=np.int64)
    n_fcit = np.zeros(n_groups, dtype=np.float64)
    n_icit_w = np.zeros(n_groups, dtype=np.float64)
    h = np.zeros(n_groups, dtype=np.int64)
    naut_sum = np.zeros(n_groups, dtype=np.float64)
    wpap = np.zeros(n_groups, dtype=np.float64)
    for g in range(n_groups):
        start = offsets[g]
        stop = offsets[g + 1]
        size = stop - start
        n_pap[g] = size
        if size == 0:
            continue
        cits = np.empty(size, dtype=np.int64)
        tot = 0
        f = 0.0
        ic = 0.0
        na = 0.0
        wp = 0.0
        for k in range(start, stop):
            p = members[k]
            c = n_cit[p]
            cits[k - start] = c
            tot += c
            f += c * weight[p]
            ic += n_icit[p] * weight[p]
            na += n_aut[p]
            wp += weight[p]
        n_totcit[g] = tot
        n_fcit[g] = f
        n_icit_w[g] = ic
        naut_sum[g] = na
        wpap[g] = wp
        cits.sort()
        hh = 0
        for r in range(size):
            if cits[size - 1 - r] >= r + 1:
                hh = r + 1
            else:
                break
        h[g] = hh
    return n_pap, n_totcit, n_fcit, n_icit_w, h, naut_sum, wpap


def _group_profiles_numpy(offsets, members, n_aut, n_cit, n_icit, weight):
    n_groups = offsets.shape[0] - 1
    n_pap = np.diff(offsets).astype(np.int64)
    group = np.repeat(np.arange(n_groups), n_pap)
    members = members[offsets[0]:offsets[-1]]
    cits = n_cit[members]
    w = weight[members]

    def _sum(values):
        return np.bincount(group, weights=values, minlength=n_groups)

    n_totcit = np.bincount(group, weights=cits, minlength=n_groups).astype(np.int64)
    n_fcit = _sum(cits * w)
    n_icit_w = _sum(n_icit[members] * w)
    naut_sum = _sum(n_aut[members])
    wpap = _sum(w)

    # h-index: sort each group's citations descending, count ranks r with c_r >= r
    order = np.lexsort((-cits, group))
    rank = np.arange(group.shape[0]) - (offsets[:-1] - offsets[0])[group] + 1
    hits = cits[order] >= rank
    h = np.bincount(group[hits], minlength=n_groups).astype(np.int64)
    return n_pap, n_totcit, n_fcit, n_icit_w, h, naut_sum, wpap


BACKENDS = {"numpy": (_citation_counts_numpy, _group_profiles_numpy)}
if _accel.HAVE_NUMBA:
    BACKENDS["numba"] = (_citation_counts_numba, _group_profiles_numba)

citation_counts, group_profiles = BACKENDS[_accel.backend_name()]
