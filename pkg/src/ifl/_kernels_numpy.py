"""Vectorized numpy fallback for the Monte-Carlo kernels.

Same draw layout and counter-based streams as the numba lane, evaluated
batch-wise with array operations. Counts returned here are bit-identical
to :mod:`ifl._kernels_numba` for any batch split, because every sample's
draws depend only on its own stream key and slot indices.
"""

import numpy as np

BATCH = 1 << 15

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_U_GOLDEN = np.uint64(GOLDEN)
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 2.0 ** -53


def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX_A
    z = (z ^ (z >> np.uint64(27))) * _MIX_B
    return z ^ (z >> np.uint64(31))


def _stream_keys(seed, lo, hi):
    idx = np.arange(lo, hi, dtype=np.uint64)
    return _mix64(np.uint64(seed & MASK64) ^ _mix64((idx + np.uint64(1)) * _U_GOLDEN))


def _slot(keys, slot):
    return _mix64(keys + np.uint64(((slot + 1) * GOLDEN) & MASK64))


def _unit(keys, slot):
    return (_slot(keys, slot) >> np.uint64(11)) * _INV_2_53


def _draw_wor_batch(keys, first_slot, m, t):
    """(B, m) feature indices per row; same swaps as the scalar kernel."""
    n_rows = keys.shape[0]
    pool = np.tile(np.arange(t, dtype=np.int32), (n_rows, 1))
    rows = np.arange(n_rows)
    out = np.empty((n_rows, m), np.int32)
    for j in range(m):
        u = _slot(keys, first_slot + j)
        r = j + (u % np.uint64(t - j)).astype(np.int64)
        vals = pool[rows, r]
        pool[rows, r] = pool[:, j]
        pool[:, j] = vals
        out[:, j] = vals
    return out


def _groups(keys, p_d):
    """Split a batch by (datum kind, datum label); offsets differ per group."""
    label = (_slot(keys, 0) & np.uint64(1)).astype(np.int64)
    is_dom = _unit(keys, 1) < p_d
    for dom in (True, False):
        for lab in (0, 1):
            sel = (is_dom == dom) & (label == lab)
            if sel.any():
                yield dom, lab, keys[sel]


def accuracy_counts(seed, n_samples, p_d, t_d, t_r, n_d, n_r, c_d, c_r,
                    pool_d, pool_r, m_d, m_r):
    n_max = max(n_d, n_r)
    per_class = c_d + c_r
    hyp_base = 2 + n_max
    hits = 0
    for lo in range(0, n_samples, BATCH):
        keys = _stream_keys(seed, lo, min(n_samples, lo + BATCH))
        for dom, lab, kg in _groups(keys, p_d):
            t, n = (t_d, n_d) if dom else (t_r, n_r)
            base = hyp_base + lab * per_class
            first, m, tp = (base, m_d, pool_d) if dom else (base + c_d, m_r, pool_r)
            if m == 0:
                continue
            datum = _draw_wor_batch(kg, 2, n, t)
            hyp = _draw_wor_batch(kg, first, m, tp)
            rows = np.arange(kg.shape[0])[:, None]
            present = np.zeros((kg.shape[0], t), bool)
            present[rows, hyp] = True
            hits += int(present[rows, datum].any(axis=1).sum())
    return hits


def agreement_counts(seed, n_samples, p_d, t_d, t_r, n_d, n_r, c_d, c_r,
                     zeta, bernoulli):
    n_max = max(n_d, n_r)
    per_class = c_d + c_r
    f_base = 2 + n_max
    g_base = f_base + 2 * per_class
    coin_slot = g_base + 2 * per_class
    c_half = per_class
    out = np.zeros(c_half + 3, np.int64)
    for lo in range(0, n_samples, BATCH):
        keys = _stream_keys(seed, lo, min(n_samples, lo + BATCH))
        for dom, lab, kg in _groups(keys, p_d):
            t, n = (t_d, n_d) if dom else (t_r, n_r)
            n_rows = kg.shape[0]
            rows = np.arange(n_rows)[:, None]
            datum = _draw_wor_batch(kg, 2, n, t)
            fo = f_base + lab * per_class
            go = g_base + lab * per_class
            k = np.zeros(n_rows, np.int64)
            f_hit = np.zeros(n_rows, bool)
            g_hit = np.zeros(n_rows, bool)
            if c_d > 0:
                fd = _draw_wor_batch(kg, fo, c_d, t_d)
                gd = _draw_wor_batch(kg, go, c_d, t_d)
                pf = np.zeros((n_rows, t_d), bool)
                pf[rows, fd] = True
                k += pf[rows, gd].sum(axis=1)
                if dom:
                    f_hit = pf[rows, datum].any(axis=1)
                    pg = np.zeros((n_rows, t_d), bool)
                    pg[rows, gd] = True
                    g_hit = pg[rows, datum].any(axis=1)
            if c_r > 0:
                fr = _draw_wor_batch(kg, fo + c_d, c_r, t_r)
                gr = _draw_wor_batch(kg, go + c_d, c_r, t_r)
                pf = np.zeros((n_rows, t_r), bool)
                pf[rows, fr] = True
                k += pf[rows, gr].sum(axis=1)
                if not dom:
                    f_hit = pf[rows, datum].any(axis=1)
                    pg = np.zeros((n_rows, t_r), bool)
                    pg[rows, gr] = True
                    g_hit = pg[rows, datum].any(axis=1)
            case_a = f_hit & g_hit
            case_b = (~f_hit) & (~g_hit) & (k >= 1)
            if bernoulli:
                prob = np.where(case_a, 1.0,
                                np.where(case_b, zeta[np.minimum(k, len(zeta) - 1)], 0.5))
                coin = _unit(kg, coin_slot)
                out[0] += int((coin < prob).sum())
            else:
                out[0] += int(case_a.sum())
                out[1] += int((~(case_a | case_b)).sum())
                if case_b.any():
                    out[2:] += np.bincount(k[case_b], minlength=c_half + 1)
    return out
