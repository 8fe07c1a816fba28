"""Pure-numpy accumulation kernel; reference implementation of the contract.

accumulate(out, m1, m2, with_moments, u, y0, pitch, f, lam, t0, norm,
           k1, w1, k2, w2, lossw, profile_kind, width, cut) -> loss

walks the wavelength samples s = 0..N-1 in order and, for each source
column j whose ring band intersects the frame, deposits

    val = norm[s] * p(u[j] + (y_i/f)^2 - t0[s])

into out[i, k1[s, j]] and out[i, k2[s, j]] with weights w1/w2, accumulating
val * lossw[s, j] into the returned off-grid loss. p is a unit-peak gaussian
(profile_kind 0) or sinc^2 (1) of the given width, truncated at |t| <= cut.
With with_moments set, m1 and m2 are likewise accumulated with val * lam[s]
and val * lam[s]^2 (lam holds whatever per-sample value the caller wants
moments of). All arrays are float64 C-order; k1/k2 are pre-clamped int32.

The compiled extension implements the identical contract; the two agree to
float rounding (summation order differs).
"""
from __future__ import annotations

import numpy as np

_FLUSH_ENTRIES = 4_000_000


def _profile_vals(d, profile_kind, width, norm_s):
    if profile_kind == 0:
        z = d / width
        return norm_s * np.exp(-0.5 * z * z)
    return norm_s * np.sinc(d / width) ** 2


def accumulate(out, m1, m2, with_moments, u, y0, pitch, f, lam, t0, norm,
               k1, w1, k2, w2, lossw, profile_kind, width, cut):
    h, w = out.shape
    n = lam.shape[0]
    size = h * w
    out_flat = out.reshape(-1)
    m1_flat = m1.reshape(-1)
    m2_flat = m2.reshape(-1)
    loss = 0.0

    pend_idx = []
    pend_val = []
    pend_lam = []
    pend_count = 0

    def flush():
        nonlocal pend_count
        if not pend_idx:
            return
        idx = np.concatenate(pend_idx)
        val = np.concatenate(pend_val)
        out_flat[:] += np.bincount(idx, weights=val, minlength=size)
        if with_moments:
            le = np.concatenate(pend_lam)
            m1_flat[:] += np.bincount(idx, weights=val * le, minlength=size)
            m2_flat[:] += np.bincount(idx, weights=val * le * le,
                                      minlength=size)
        pend_idx.clear()
        pend_val.clear()
        pend_lam.clear()
        pend_count = 0

    for s in range(n):
        t = t0[s]
        hi = t + cut
        lo = t - cut
        act = np.nonzero(u <= hi)[0]
        if act.size == 0:
            continue
        rhi = f * np.sqrt(hi - u[act])
        dlo = lo - u[act]
        merged = dlo <= 0.0
        rlo = f * np.sqrt(np.where(merged, 0.0, dlo))

        # vertical segments: one through the ring center when the inner
        # radius vanishes, else the two |y| bands of the annulus
        cols = np.concatenate((act[merged], act[~merged], act[~merged]))
        seg_a = np.concatenate((-rhi[merged], rlo[~merged], -rhi[~merged]))
        seg_b = np.concatenate((rhi[merged], rhi[~merged], -rlo[~merged]))

        i0 = np.ceil((seg_a - y0) / pitch).astype(np.int64)
        i1 = np.floor((seg_b - y0) / pitch).astype(np.int64)
        np.clip(i0, 0, h - 1, out=i0)
        np.clip(i1, -1, h - 1, out=i1)
        cnt = i1 - i0 + 1
        keep = cnt > 0
        if not np.any(keep):
            continue
        i0, cnt, cols = i0[keep], cnt[keep], cols[keep]

        total = int(cnt.sum())
        starts = np.zeros(cnt.size, dtype=np.int64)
        np.cumsum(cnt[:-1], out=starts[1:])
        rows = np.repeat(i0 - starts, cnt) + np.arange(total, dtype=np.int64)
        jcols = np.repeat(cols, cnt)

        yv = y0 + pitch * rows
        d = u[jcols] + (yv / f) ** 2 - t
        inside = np.abs(d) <= cut
        rows = rows[inside]
        jcols = jcols[inside]
        d = d[inside]
        if rows.size == 0:
            continue
        val = _profile_vals(d, profile_kind, width, norm[s])

        base = rows * w
        v1 = val * w1[s, jcols]
        v2 = val * w2[s, jcols]
        loss += float(val @ lossw[s, jcols])
        idx = np.concatenate((base + k1[s, jcols], base + k2[s, jcols]))
        vv = np.concatenate((v1, v2))
        pend_idx.append(idx)
        pend_val.append(vv)
        if with_moments:
            pend_lam.append(np.full(vv.size, lam[s]))
        pend_count += vv.size
        if pend_count >= _FLUSH_ENTRIES:
            flush()

    flush()
    return loss
