"""Compiled scalar kernels for the Monte-Carlo estimators.

One jitted loop per estimator. Samples are split into fixed-size chunks;
chunks run under ``prange`` and accumulate integer counts, so results are
identical for any thread count. The draw layout matches
:mod:`ifl.sampling` slot for slot.
"""

import numpy as np
from numba import njit, prange

CHUNK = 4096

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 2.0 ** -53


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX_A
    z = (z ^ (z >> np.uint64(27))) * _MIX_B
    return z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def _stream_key(seed, index):
    return _mix64(seed ^ _mix64((index + np.uint64(1)) * _GOLDEN))


@njit(cache=True, inline="always")
def _slot_u64(key, slot):
    return _mix64(key + (np.uint64(slot) + np.uint64(1)) * _GOLDEN)


@njit(cache=True, inline="always")
def _slot_unit(key, slot):
    return (_slot_u64(key, slot) >> np.uint64(11)) * _INV_2_53


@njit(cache=True, inline="always")
def _draw_wor(key, first_slot, m, t, pool, out):
    # Partial Fisher-Yates over pool[0:t]. `pool` must hold the identity
    # permutation on entry; the swaps are undone in reverse order on exit,
    # which is cheaper than refilling when t >> m.
    for j in range(m):
        u = _slot_u64(key, first_slot + j)
        r = j + np.int64(u % np.uint64(t - j))
        tmp = pool[j]
        pool[j] = pool[r]
        pool[r] = tmp
        out[j] = pool[j]
    for j in range(m - 1, -1, -1):
        u = _slot_u64(key, first_slot + j)
        r = j + np.int64(u % np.uint64(t - j))
        tmp = pool[j]
        pool[j] = pool[r]
        pool[r] = tmp


@njit(cache=True, parallel=True)
def accuracy_counts(seed, n_samples, p_d, t_d, t_r, n_d, n_r, c_d, c_r,
                    pool_d, pool_r, m_d, m_r):
    """Number of samples where the model shares a feature with the datum.

    ``pool_*``/``m_*`` restrict the hypothesis draw (coverage variant);
    the plain estimator passes pool=t and m=c per population.
    """
    n_max = max(n_d, n_r)
    t_max = max(t_d, t_r)
    per_class = c_d + c_r
    hyp_base = 2 + n_max
    n_chunks = (n_samples + CHUNK - 1) // CHUNK
    hits = np.zeros(n_chunks, np.int64)
    for ci in prange(n_chunks):
        lo = ci * CHUNK
        hi = min(n_samples, lo + CHUNK)
        pool = np.empty(t_max, np.int32)
        for idx in range(t_max):
            pool[idx] = idx
        datum = np.empty(max(n_max, 1), np.int32)
        hyp = np.empty(max(per_class, 1), np.int32)
        mark = np.zeros(t_max, np.uint8)
        local = np.int64(0)
        for i in range(lo, hi):
            key = _stream_key(np.uint64(seed), np.uint64(i))
            label = np.int64(_slot_u64(key, 0) & np.uint64(1))
            is_dom = _slot_unit(key, 1) < p_d
            if is_dom:
                t = t_d
                n = n_d
            else:
                t = t_r
                n = n_r
            _draw_wor(key, 2, n, t, pool, datum)
            base = hyp_base + label * per_class
            if is_dom:
                first = base
                m = m_d
                tp = pool_d
            else:
                first = base + c_d
                m = m_r
                tp = pool_r
            if m > 0:
                _draw_wor(key, first, m, tp, pool, hyp)
            for j in range(m):
                mark[hyp[j]] = 1
            hit = False
            for j in range(n):
                if mark[datum[j]] == 1:
                    hit = True
                    break
            for j in range(m):
                mark[hyp[j]] = 0
            if hit:
                local += 1
        hits[ci] = local
    return hits.sum()


@njit(cache=True, parallel=True)
def agreement_counts(seed, n_samples, p_d, t_d, t_r, n_d, n_r, c_d, c_r,
                     zeta, bernoulli):
    """Case counts for the pair-agreement estimator.

    Returns int64[c_half + 3]:
      out[0] = case A, out[1] = case C, out[2 + k] = case B with k shared
      class features (k = 1..c_half). In bernoulli mode out[0] instead
      holds the number of agreeing coin flips and the rest stay zero.
    """
    n_max = max(n_d, n_r)
    t_max = max(t_d, t_r)
    per_class = c_d + c_r
    f_base = 2 + n_max
    g_base = f_base + 2 * per_class
    coin_slot = g_base + 2 * per_class
    c_half = per_class
    n_chunks = (n_samples + CHUNK - 1) // CHUNK
    counts = np.zeros((n_chunks, c_half + 3), np.int64)
    for ci in prange(n_chunks):
        lo = ci * CHUNK
        hi = min(n_samples, lo + CHUNK)
        pool = np.empty(t_max, np.int32)
        for idx in range(t_max):
            pool[idx] = idx
        datum = np.empty(max(n_max, 1), np.int32)
        fd = np.empty(max(c_d, 1), np.int32)
        fr = np.empty(max(c_r, 1), np.int32)
        gd = np.empty(max(c_d, 1), np.int32)
        gr = np.empty(max(c_r, 1), np.int32)
        mark = np.zeros(t_max, np.uint8)
        local = np.zeros(c_half + 3, np.int64)
        for i in range(lo, hi):
            key = _stream_key(np.uint64(seed), np.uint64(i))
            label = np.int64(_slot_u64(key, 0) & np.uint64(1))
            is_dom = _slot_unit(key, 1) < p_d
            if is_dom:
                t = t_d
                n = n_d
            else:
                t = t_r
                n = n_r
            _draw_wor(key, 2, n, t, pool, datum)
            fo = f_base + label * per_class
            go = g_base + label * per_class
            if c_d > 0:
                _draw_wor(key, fo, c_d, t_d, pool, fd)
                _draw_wor(key, go, c_d, t_d, pool, gd)
            if c_r > 0:
                _draw_wor(key, fo + c_d, c_r, t_r, pool, fr)
                _draw_wor(key, go + c_d, c_r, t_r, pool, gr)

            # dominant-pool pass: shared count, f vs datum overlap
            k = 0
            f_hit = False
            g_hit = False
            for j in range(c_d):
                mark[fd[j]] = 1
            for j in range(c_d):
                k += mark[gd[j]]
            if is_dom:
                for j in range(n):
                    if mark[datum[j]] == 1:
                        f_hit = True
                        break
            for j in range(c_d):
                mark[fd[j]] = 0
            # rare-pool pass
            for j in range(c_r):
                mark[fr[j]] = 1
            for j in range(c_r):
                k += mark[gr[j]]
            if not is_dom:
                for j in range(n):
                    if mark[datum[j]] == 1:
                        f_hit = True
                        break
            for j in range(c_r):
                mark[fr[j]] = 0
            # g vs datum overlap in the datum's kind pool
            if is_dom:
                for j in range(c_d):
                    mark[gd[j]] = 1
            else:
                for j in range(c_r):
                    mark[gr[j]] = 1
            for j in range(n):
                if mark[datum[j]] == 1:
                    g_hit = True
                    break
            if is_dom:
                for j in range(c_d):
                    mark[gd[j]] = 0
            else:
                for j in range(c_r):
                    mark[gr[j]] = 0

            if bernoulli:
                if f_hit and g_hit:
                    prob = 1.0
                elif (not f_hit) and (not g_hit) and k >= 1:
                    prob = zeta[k]
                else:
                    prob = 0.5
                if _slot_unit(key, coin_slot) < prob:
                    local[0] += 1
            else:
                if f_hit and g_hit:
                    local[0] += 1
                elif (not f_hit) and (not g_hit) and k >= 1:
                    local[2 + k] += 1
                else:
                    local[1] += 1
        counts[ci] = local
    return counts.sum(axis=0)


def warmup():
    """Compile both kernels on a tiny instance."""
    ztab = np.full(4, 0.5, np.float64)
    accuracy_counts(np.uint64(1), 8, 0.5, 2, 3, 1, 1, 1, 0, 2, 3, 1, 0)
    agreement_counts(np.uint64(1), 8, 0.5, 2, 3, 1, 1, 1, 0, ztab, False)
    agreement_counts(np.uint64(1), 8, 0.5, 2, 3, 1, 1, 1, 0, ztab, True)
