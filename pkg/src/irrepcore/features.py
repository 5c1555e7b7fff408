"""Irrep feature containers.

Features are stored as arrays of shape (P, (L+1)**2, F): parity axis,
flat degree/order axis (spherical-harmonic component ordering), feature
axis. With P = 2 row 0 holds the even-parity and row 1 the odd-parity
irreps; the compact P = 1 layout stores only proper tensors, i.e. the
degree-l block implicitly has parity (-1)**l and all pseudotensor
components are zero.

Feature values are immutable; every operation returns a new container.
"""

import struct
from dataclasses import dataclass
from math import isqrt

import numpy as np

from .sh import block_slice

BLOB_MAGIC = b"IRRF"
BLOB_VERSION = 1

GENERAL = "general"
COMPACT = "compact"

_PSEUDO_TOL = 1e-12


def _parity_row(parity: int) -> int:
    if parity == 1:
        return 0
    if parity == -1:
        return 1
    raise ValueError(f"parity must be +1 or -1, got {parity}")


@dataclass(frozen=True)
class IrrepFeatures:
    """Immutable (P, (L+1)**2, F) container of O(3) irrep features."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64)
        if arr.ndim != 3:
            raise ValueError(f"feature data must be 3-d, got shape {arr.shape}")
        p, n, f = arr.shape
        if p not in (1, 2):
            raise ValueError(f"parity axis must have size 1 or 2, got {p}")
        if isqrt(n) ** 2 != n or n == 0:
            raise ValueError(f"component axis size {n} is not (L+1)**2")
        if f < 1:
            raise ValueError("need at least one feature channel")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def max_degree(self) -> int:
        return isqrt(self.data.shape[1]) - 1

    @property
    def num_features(self) -> int:
        return self.data.shape[2]

    @property
    def parity_axis(self) -> int:
        return self.data.shape[0]

    @property
    def is_compact(self) -> bool:
        return self.data.shape[0] == 1

    @property
    def layout(self) -> str:
        return COMPACT if self.is_compact else GENERAL

    @classmethod
    def zeros(cls, max_degree: int, num_features: int, layout: str = GENERAL):
        p = {GENERAL: 2, COMPACT: 1}.get(layout)
        if p is None:
            raise ValueError(f"unknown layout {layout!r}")
        return cls(np.zeros((p, (max_degree + 1) ** 2, num_features)))

    def block(self, l: int, parity: int) -> np.ndarray:
        """The (1, 2l+1, F) sub-array of degree l and given parity.

        For compact features the block of parity != (-1)**l is a zero
        array (pseudotensors are implicitly zero).
        """
        if l > self.max_degree:
            raise ValueError(f"degree {l} beyond max degree {self.max_degree}")
        row = _parity_row(parity)
        if self.is_compact:
            if parity != (-1) ** l:
                return np.zeros((1, 2 * l + 1, self.num_features))
            row = 0
        return self.data[row:row + 1, block_slice(l), :]


def slice_degree_parity(x: IrrepFeatures, l: int, parity: int) -> np.ndarray:
    """Block of degree l and parity +-1, shape (1, 2l+1, F)."""
    return x.block(l, parity)


def scalars(x: IrrepFeatures) -> np.ndarray:
    """The even scalar channel, shape (1, 1, F)."""
    return x.block(0, 1)


def to_general(x: IrrepFeatures) -> IrrepFeatures:
    """Embed into the two-row layout (identity if already general)."""
    if not x.is_compact:
        return x
    out = np.zeros((2, x.data.shape[1], x.num_features))
    for l in range(x.max_degree + 1):
        out[_parity_row((-1) ** l), block_slice(l), :] = x.data[0, block_slice(l), :]
    return IrrepFeatures(out)


def to_compact(x: IrrepFeatures, tol: float = _PSEUDO_TOL) -> IrrepFeatures:
    """Drop the (numerically zero) pseudotensor rows.

    Raises ValueError when any pseudotensor component exceeds `tol`,
    reporting the offending degree/parity and its largest magnitude.
    """
    if x.is_compact:
        return x
    out = np.empty((1, x.data.shape[1], x.num_features))
    for l in range(x.max_degree + 1):
        proper = _parity_row((-1) ** l)
        pseudo = x.data[1 - proper, block_slice(l), :]
        worst = float(np.abs(pseudo).max()) if pseudo.size else 0.0
        if worst > tol:
            parity = "+1" if 1 - proper == 0 else "-1"
            raise ValueError(
                f"features have pseudotensor content at degree {l}, parity "
                f"{parity} (max magnitude {worst:.3e} > {tol:.1e}); "
                "cannot convert to the compact layout"
            )
        out[0, block_slice(l), :] = x.data[proper, block_slice(l), :]
    return IrrepFeatures(out)


def transform(x: IrrepFeatures, g, d) -> IrrepFeatures:
    """Apply a group element: Wigner-D rotation plus the parity action.

    `g` is a GroupElement and `d` a WignerDSet built from g's rotation
    part with d.max_degree >= x.max_degree. Odd-parity blocks are
    negated for rotoreflections (g.sign == -1).
    """
    if d.max_degree < x.max_degree:
        raise ValueError(
            f"Wigner-D set of max degree {d.max_degree} cannot transform "
            f"features of max degree {x.max_degree}"
        )
    if x.max_degree >= 1:
        mismatch = float(np.abs(d.matrices[1] - g.rotation).max())
        if mismatch > 1e-10:
            raise ValueError(
                "Wigner-D set does not match the group element's rotation "
                f"(degree-1 deviation {mismatch:.3e})"
            )
    out = np.empty_like(x.data)
    for l in range(x.max_degree + 1):
        rotated = np.einsum("mk,pkf->pmf", d.matrices[l], x.data[:, block_slice(l), :])
        if g.sign == -1:
            if x.is_compact:
                if l % 2 == 1:
                    rotated = -rotated
            else:
                rotated[1] = -rotated[1]
        out[:, block_slice(l), :] = rotated
    return IrrepFeatures(out)


def write_blob(x: IrrepFeatures, stream) -> None:
    """Serialize as magic, version, P, L, F header plus raw float64 data."""
    stream.write(BLOB_MAGIC)
    stream.write(
        struct.pack("<IIII", BLOB_VERSION, x.parity_axis, x.max_degree, x.num_features)
    )
    stream.write(x.data.astype("<f8", copy=False).tobytes())


def read_blob(stream) -> IrrepFeatures:
    magic = stream.read(4)
    if magic != BLOB_MAGIC:
        raise ValueError(f"bad magic {magic!r}, expected {BLOB_MAGIC!r}")
    version, p, max_degree, f = struct.unpack("<IIII", stream.read(16))
    if version != BLOB_VERSION:
        raise ValueError(f"unsupported blob version {version}")
    n = (max_degree + 1) ** 2
    data = np.frombuffer(stream.read(p * n * f * 8), dtype="<f8")
    return IrrepFeatures(data.reshape(p, n, f).astype(np.float64))
