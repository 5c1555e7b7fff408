# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: spherical-harmonic evaluation and coupling.

Mirrors _kernels_py; keep signatures in sync.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def sh_eval(const double[::1] coeff, const Py_ssize_t[::1] zpow,
            const Py_ssize_t[::1] kpow, const Py_ssize_t[::1] seg_start,
            const Py_ssize_t[::1] seg_m, const Py_ssize_t[::1] out_pos,
            const Py_ssize_t[::1] out_neg,
            double x, double y, double z, double[::1] out):
    """Evaluate all solid-harmonic components at one point into `out`."""
    cdef Py_ssize_t nseg = seg_m.shape[0]
    cdef Py_ssize_t maxm = 0, s, t, m
    for s in range(nseg):
        if seg_m[s] > maxm:
            maxm = seg_m[s]

    cdef double r2 = x * x + y * y + z * z
    # zp[p] = z**p, r2p[p] = r2**p, re/im[m] = Re/Im((x+iy)**m)
    cdef Py_ssize_t maxz = 0, maxk = 0
    for t in range(zpow.shape[0]):
        if zpow[t] > maxz:
            maxz = zpow[t]
        if kpow[t] > maxk:
            maxk = kpow[t]
    cdef double[::1] zp = np.empty(maxz + 1)
    cdef double[::1] r2p = np.empty(maxk + 1)
    cdef double[::1] re = np.empty(maxm + 1)
    cdef double[::1] im = np.empty(maxm + 1)
    zp[0] = 1.0
    for t in range(1, maxz + 1):
        zp[t] = zp[t - 1] * z
    r2p[0] = 1.0
    for t in range(1, maxk + 1):
        r2p[t] = r2p[t - 1] * r2
    re[0] = 1.0
    im[0] = 0.0
    for m in range(1, maxm + 1):
        re[m] = re[m - 1] * x - im[m - 1] * y
        im[m] = re[m - 1] * y + im[m - 1] * x

    cdef double acc
    for s in range(nseg):
        acc = 0.0
        for t in range(seg_start[s], seg_start[s + 1]):
            acc += coeff[t] * zp[zpow[t]] * r2p[kpow[t]]
        m = seg_m[s]
        out[out_pos[s]] = acc * re[m]
        if out_neg[s] >= 0:
            out[out_neg[s]] = acc * im[m]


def couple_accumulate(const double[:, :, ::1] block, const double[:, ::1] u,
                      const double[:, ::1] v, double[:, ::1] out):
    """out[c, f] += sum_{a, b} block[a, b, c] * u[a, f] * v[b, f]."""
    cdef Py_ssize_t na = block.shape[0], nb = block.shape[1], nc = block.shape[2]
    cdef Py_ssize_t nf = u.shape[1]
    cdef Py_ssize_t a, b, c, f
    cdef double cab
    for a in range(na):
        for b in range(nb):
            for c in range(nc):
                cab = block[a, b, c]
                if cab == 0.0:
                    continue
                for f in range(nf):
                    out[c, f] += cab * u[a, f] * v[b, f]
