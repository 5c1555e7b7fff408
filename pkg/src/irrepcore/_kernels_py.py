"""Pure-numpy fallback implementations of the hot kernels.

Signatures must stay in sync with the compiled versions in _kernels.pyx.
"""

import numpy as np


def sh_eval(coeff, zpow, kpow, seg_start, seg_m, out_pos, out_neg, x, y, z, out):
    """Evaluate all solid-harmonic components at one point into `out`.

    Evaluates the homogeneous polynomials; callers pass a unit vector to
    obtain sphere values.
    """
    r2 = x * x + y * y + z * z
    zp = np.full(int(zpow.max()) + 1, z)
    zp[0] = 1.0
    np.cumprod(zp, out=zp)
    r2p = np.full(int(kpow.max()) + 1, r2)
    r2p[0] = 1.0
    np.cumprod(r2p, out=r2p)
    terms = coeff * zp[zpow] * r2p[kpow]
    seg = np.add.reduceat(terms, seg_start[:-1])
    cp = np.full(int(seg_m.max()) + 1, complex(x, y))
    cp[0] = 1.0
    np.cumprod(cp, out=cp)
    out[out_pos] = seg * cp.real[seg_m]
    has_im = out_neg >= 0
    out[out_neg[has_im]] = seg[has_im] * cp.imag[seg_m[has_im]]


def couple_accumulate(block, u, v, out):
    """out[c, f] += sum_{a, b} block[a, b, c] * u[a, f] * v[b, f]."""
    out += np.einsum("abc,af,bf->cf", block, u, v)
