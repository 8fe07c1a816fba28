# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled accumulation kernel; same contract as _kernels_np.accumulate.

Per wavelength sample, per source column, the ring band's row segments are
enumerated with the same ceil/floor arithmetic as the numpy fallback and
each pixel value is deposited into the two pre-computed destination columns.
"""

from libc.math cimport ceil, exp, floor, sin, sqrt

import numpy as np

cdef double M_PI = 3.141592653589793


def accumulate(double[:, ::1] out, double[:, ::1] m1, double[:, ::1] m2,
               int with_moments, double[::1] u,
               double y0, double pitch, double f,
               double[::1] lam, double[::1] t0, double[::1] norm,
               int[:, ::1] k1, double[:, ::1] w1,
               int[:, ::1] k2, double[:, ::1] w2, double[:, ::1] lossw,
               int profile_kind, double width, double cut):
    cdef Py_ssize_t h = out.shape[0]
    cdef Py_ssize_t w = out.shape[1]
    cdef Py_ssize_t nsrc = u.shape[0]
    cdef Py_ssize_t n = lam.shape[0]
    cdef Py_ssize_t s, j, i, seg, nseg, i0, i1
    cdef double loss = 0.0
    cdef double t, hi, lo, du, dlo, rhi, rlo, a, b
    cdef double yv, vv, d, z, sz, val, ls, nrm
    cdef double seg_a0, seg_b0, seg_a1, seg_b1
    cdef int kk1, kk2
    cdef double ww1, ww2, lw

    with nogil:
        for s in range(n):
            t = t0[s]
            hi = t + cut
            lo = t - cut
            nrm = norm[s]
            ls = lam[s]
            for j in range(nsrc):
                du = hi - u[j]
                if du < 0.0:
                    continue
                rhi = f * sqrt(du)
                dlo = lo - u[j]
                if dlo <= 0.0:
                    nseg = 1
                    seg_a0 = -rhi
                    seg_b0 = rhi
                else:
                    nseg = 2
                    rlo = f * sqrt(dlo)
                    seg_a0 = rlo
                    seg_b0 = rhi
                    seg_a1 = -rhi
                    seg_b1 = -rlo
                kk1 = k1[s, j]
                ww1 = w1[s, j]
                kk2 = k2[s, j]
                ww2 = w2[s, j]
                lw = lossw[s, j]
                for seg in range(nseg):
                    if seg == 0:
                        a = seg_a0
                        b = seg_b0
                    else:
                        a = seg_a1
                        b = seg_b1
                    i0 = <Py_ssize_t>ceil((a - y0) / pitch)
                    i1 = <Py_ssize_t>floor((b - y0) / pitch)
                    if i0 < 0:
                        i0 = 0
                    if i1 > h - 1:
                        i1 = h - 1
                    for i in range(i0, i1 + 1):
                        yv = y0 + pitch * i
                        vv = yv / f
                        vv = vv * vv
                        d = u[j] + vv - t
                        if d > cut or d < -cut:
                            continue
                        z = d / width
                        if profile_kind == 0:
                            val = nrm * exp(-0.5 * z * z)
                        else:
                            if -1e-12 < z < 1e-12:
                                val = nrm
                            else:
                                sz = sin(M_PI * z) / (M_PI * z)
                                val = nrm * sz * sz
                        out[i, kk1] += val * ww1
                        out[i, kk2] += val * ww2
                        loss += val * lw
                        if with_moments:
                            m1[i, kk1] += val * ww1 * ls
                            m1[i, kk2] += val * ww2 * ls
                            m2[i, kk1] += val * ww1 * ls * ls
                            m2[i, kk2] += val * ww2 * ls * ls
    return loss
