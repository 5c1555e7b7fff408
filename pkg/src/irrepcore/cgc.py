"""Real-basis Clebsch-Gordan coefficients and single-irrep coupling.

The table is built by solving the intertwiner equations directly in the
real component basis. Rotation generators for each degree are obtained
from the solid-harmonic polynomials by exact monomial algebra (angular
differential operators plus closed-form sphere integrals of monomials),
which pins the component conventions to the same polynomials used by
eval_sh. For every degree pair the Casimir operator of the tensor
product is diagonalized to locate each output-degree subspace, the
unique (up to sign) generator-intertwining alignment onto the canonical
components is found by a small null-space solve, rows are polished to
exact orthonormality, and the sign is fixed so that the coefficient
coupling the three m=0 components is positive; where that entry
vanishes, the first nonzero entry in storage order is made positive
(which reproduces +cross-product/sqrt(2) on the degree-(1,1,1) block).
"""

import hashlib
import struct
from dataclasses import dataclass
from functools import lru_cache
from math import sqrt

import numpy as np

from .backend import get_kernels
from .limits import check_degree
from .sh import monomial_sphere_integral_over_4pi, solid_monomials_exact

BLOB_MAGIC = b"CGCT"
BLOB_VERSION = 1


def _degree_monomials(l: int) -> list:
    return [
        (i, j, l - i - j) for i in range(l, -1, -1) for j in range(l - i, -1, -1)
    ]


@lru_cache(maxsize=None)
def _generators(l: int):
    """Rotation generators (J_x, J_y, J_z) of degree l in the real basis.

    J_a[u', u] is the component of the angular operator for axis a
    applied to harmonic u, expanded in harmonic u'; antisymmetric.
    """
    monos = _degree_monomials(l)
    index = {m: p for p, m in enumerate(monos)}
    n = len(monos)
    dim = 2 * l + 1

    # rows: scaled monomial coefficients of each solid harmonic,
    # ordered m = l, -l, ..., 0 to match the component layout
    basis = np.zeros((dim, n))
    from .sh import sh_index

    for m in range(-l, l + 1):
        poly, q = solid_monomials_exact(l, m)
        row = basis[sh_index(l, m) - l * l]
        scale = 2.0 * sqrt(float(q))
        for key, c in poly.items():
            row[index[key]] = scale * float(c)

    gram = np.zeros((n, n))
    for p, (i1, j1, k1) in enumerate(monos):
        for q_, (i2, j2, k2) in enumerate(monos):
            gram[p, q_] = float(
                monomial_sphere_integral_over_4pi(i1 + i2, j1 + j2, k1 + k2)
            )

    # angular operators on the degree-l monomial space:
    # L_x = z d/dy - y d/dz, L_y = x d/dz - z d/dx, L_z = y d/dx - x d/dy
    def op(plus_var, minus_var, diff_plus, diff_minus):
        t = np.zeros((n, n))
        for p, mono in enumerate(monos):
            for var, dv, sign in ((diff_plus, plus_var, 1.0), (diff_minus, minus_var, -1.0)):
                e = mono[var]
                if e == 0:
                    continue
                new = list(mono)
                new[var] -= 1
                new[dv] += 1
                t[index[tuple(new)], p] += sign * e
        return t

    tx = op(2, 1, 1, 2)  # z d/dy - y d/dz
    ty = op(0, 2, 2, 0)  # x d/dz - z d/dx
    tz = op(1, 0, 0, 1)  # y d/dx - x d/dy

    mats = []
    for t in (tx, ty, tz):
        j = basis @ gram @ t @ basis.T
        mats.append((j - j.T) / 2.0)
    return tuple(mats)


def _align_block(sub_gens, canon_gens, l3: int) -> np.ndarray:
    """Orthogonal Q with Q @ sub_gens_i = canon_gens_i @ Q.

    Q intertwines two realizations of the degree-l3 irrep, so it spans
    the unique invariant line of the representation on d x d matrices,
    which is the eigenspace of the symmetric coupling operator
    sum_i canon_i Q sub_i at eigenvalue -l3*(l3+1); neighboring
    eigenvalues are at least 1 away, making the extraction robust.
    """
    d = 2 * l3 + 1
    phi = sum(np.kron(j, g.T) for j, g in zip(canon_gens, sub_gens))
    evals, evecs = np.linalg.eigh(phi)
    target = -l3 * (l3 + 1)
    sel = np.nonzero(np.abs(evals - target) < 0.25)[0]
    if sel.size != 1:
        raise RuntimeError(
            f"intertwiner space for degree {l3} is {sel.size}-dimensional"
        )
    q = evecs[:, sel[0]].reshape(d, d) * sqrt(d)
    # polish to exactly orthogonal (q q^T is a multiple of the identity
    # up to rounding)
    u, _, vt = np.linalg.svd(q)
    return u @ vt


@dataclass(frozen=True)
class CgcTable:
    """Dense real Clebsch-Gordan coefficients up to a maximum degree.

    data[i1, i2, i3] holds the coefficient coupling components i1 and i2
    into i3, where i = l*l + offset(m) is the flat component index.
    """

    max_degree: int
    data: np.ndarray

    def __post_init__(self):
        n = (self.max_degree + 1) ** 2
        if self.data.shape != (n, n, n):
            raise ValueError(f"expected dense shape {(n, n, n)}, got {self.data.shape}")
        self.data.flags.writeable = False
        object.__setattr__(self, "_block_cache", {})

    def block(self, l1: int, l2: int, l3: int) -> np.ndarray:
        """Contiguous (2*l1+1, 2*l2+1, 2*l3+1) block for one degree triple."""
        for l in (l1, l2, l3):
            if not 0 <= l <= self.max_degree:
                raise ValueError(f"degree {l} outside table range 0..{self.max_degree}")
        cached = self._block_cache.get((l1, l2, l3))
        if cached is None:
            s = [slice(l * l, (l + 1) * (l + 1)) for l in (l1, l2, l3)]
            cached = np.ascontiguousarray(self.data[s[0], s[1], s[2]])
            cached.flags.writeable = False
            self._block_cache[(l1, l2, l3)] = cached
        return cached

    def checksum(self) -> str:
        return hashlib.sha256(self.data.tobytes()).hexdigest()


def build_cgc_table(max_degree: int) -> CgcTable:
    """Build the dense coefficient table for all degrees <= max_degree."""
    check_degree(max_degree, "max degree")
    n = (max_degree + 1) ** 2
    data = np.zeros((n, n, n))
    gens = {l: _generators(l) for l in range(max_degree + 1)}

    for l1 in range(max_degree + 1):
        d1 = 2 * l1 + 1
        for l2 in range(max_degree + 1):
            d2 = 2 * l2 + 1
            big = [
                np.kron(g1, np.eye(d2)) + np.kron(np.eye(d1), g2)
                for g1, g2 in zip(gens[l1], gens[l2])
            ]
            casimir = -sum(g @ g for g in big)
            evals, evecs = np.linalg.eigh(casimir)
            labels = np.rint((np.sqrt(1.0 + 4.0 * evals) - 1.0) / 2.0).astype(int)
            for l3 in range(abs(l1 - l2), min(l1 + l2, max_degree) + 1):
                d3 = 2 * l3 + 1
                sel = labels == l3
                if int(sel.sum()) != d3:
                    raise RuntimeError(
                        f"isotypic dimension mismatch for {(l1, l2, l3)}"
                    )
                b = evecs[:, sel]
                small = [b.T @ g @ b for g in big]
                q = _align_block(small, gens[l3], l3)
                c = q @ b.T
                # polish row orthonormality
                w, u = np.linalg.eigh(c @ c.T)
                c = (u / np.sqrt(w)) @ u.T @ c
                block = np.ascontiguousarray(
                    c.reshape(d3, d1, d2).transpose(1, 2, 0)
                )
                _fix_sign(block, l1, l2, l3)
                data[l1 * l1:(l1 + 1) ** 2, l2 * l2:(l2 + 1) ** 2,
                     l3 * l3:(l3 + 1) ** 2] = block
    return CgcTable(max_degree=max_degree, data=data)


def _fix_sign(block: np.ndarray, l1: int, l2: int, l3: int) -> None:
    """Apply the sign convention to one (l1, l2, l3) block in place."""
    pivot = block[2 * l1, 2 * l2, 2 * l3]  # couples the three m=0 components
    tol = 1e-6 * float(np.abs(block).max())
    if abs(pivot) > tol:
        if pivot < 0:
            block *= -1.0
        return
    # all-zero m=0 coupling: first nonzero entry in (m3, m1, m2) storage
    # order decides
    for i3 in range(2 * l3 + 1):
        for i1 in range(2 * l1 + 1):
            for i2 in range(2 * l2 + 1):
                v = block[i1, i2, i3]
                if abs(v) > tol:
                    if v < 0:
                        block *= -1.0
                    return


def cgc(table: CgcTable, l1: int, m1: int, l2: int, m2: int, l3: int, m3: int) -> float:
    """One stored coefficient; exact zero outside the selection rule."""
    from .sh import sh_index

    for l, m in ((l1, m1), (l2, m2), (l3, m3)):
        if l < 0 or l > table.max_degree:
            raise ValueError(f"degree {l} outside table range 0..{table.max_degree}")
        if abs(m) > l:
            raise ValueError(f"order m={m} out of range for degree l={l}")
    return float(table.data[sh_index(l1, m1), sh_index(l2, m2), sh_index(l3, m3)])


def _infer_degree(vec: np.ndarray, declared, name: str) -> int:
    if vec.ndim != 1:
        raise ValueError(f"{name} must be a flat component vector")
    if declared is None:
        if vec.shape[0] % 2 == 0:
            raise ValueError(f"{name} length {vec.shape[0]} is not 2l+1")
        return (vec.shape[0] - 1) // 2
    if vec.shape[0] != 2 * declared + 1:
        raise ValueError(
            f"{name} declared degree {declared} needs {2 * declared + 1} "
            f"components, got {vec.shape[0]}"
        )
    return declared


def couple(table: CgcTable, u, v, l3: int, l1=None, l2=None) -> np.ndarray:
    """Degree-l3 component of the tensor product of two irreps.

    Returns the zero vector when the selection rule excludes l3.
    """
    u = np.ascontiguousarray(u, dtype=np.float64)
    v = np.ascontiguousarray(v, dtype=np.float64)
    l1 = _infer_degree(u, l1, "u")
    l2 = _infer_degree(v, l2, "v")
    for l, what in ((l1, "u degree"), (l2, "v degree"), (l3, "output degree")):
        if l < 0 or l > table.max_degree:
            raise ValueError(f"{what} {l} outside table range 0..{table.max_degree}")
    out = np.zeros((2 * l3 + 1, 1))
    get_kernels().couple_accumulate(
        table.block(l1, l2, l3), u[:, None], v[:, None], out
    )
    return out[:, 0]


# -- export -------------------------------------------------------------------


def write_csv(table: CgcTable, stream) -> None:
    """All coefficients as l1,m1,l2,m2,l3,m3,value rows (17 significant digits)."""
    from .sh import index_lm

    stream.write("l1,m1,l2,m2,l3,m3,value\n")
    n = (table.max_degree + 1) ** 2
    lm = [index_lm(i) for i in range(n)]
    for i1, (l1, m1) in enumerate(lm):
        for i2, (l2, m2) in enumerate(lm):
            row = table.data[i1, i2]
            for i3, (l3, m3) in enumerate(lm):
                stream.write(f"{l1},{m1},{l2},{m2},{l3},{m3},{row[i3]:.17g}\n")


def write_blob(table: CgcTable, stream) -> None:
    """Self-describing little-endian binary dump of the dense table."""
    stream.write(BLOB_MAGIC)
    stream.write(struct.pack("<II", BLOB_VERSION, table.max_degree))
    stream.write(table.data.astype("<f8", copy=False).tobytes())


def read_blob(stream) -> CgcTable:
    magic = stream.read(4)
    if magic != BLOB_MAGIC:
        raise ValueError(f"bad magic {magic!r}, expected {BLOB_MAGIC!r}")
    version, max_degree = struct.unpack("<II", stream.read(8))
    if version != BLOB_VERSION:
        raise ValueError(f"unsupported blob version {version}")
    n = (max_degree + 1) ** 2
    data = np.frombuffer(stream.read(n * n * n * 8), dtype="<f8").reshape(n, n, n)
    return CgcTable(max_degree=max_degree, data=data.astype(np.float64))
