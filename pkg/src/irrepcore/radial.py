"""Radial bases and the displacement-vector featurizer.

A displacement r is encoded as a_k(|r|) * Y_l^m(r/|r|) over K radial
channels, giving compact irrep features with F = K. Both radial
families are smooth and vanish at the cutoff together with their first
derivative, thanks to a quintic envelope 1 - 6t^5 + 15t^4 - 10t^3 with
t = r/cutoff (the complement of the C2 smootherstep).
"""

from dataclasses import dataclass
from math import comb, exp, sqrt

import numpy as np

from .sh import ZERO_NORM2_EPS, eval_sh
from .features import IrrepFeatures

GAUSSIAN = "gaussian"
RECIPROCAL_BERNSTEIN = "reciprocal-bernstein"

_KINDS = (GAUSSIAN, RECIPROCAL_BERNSTEIN)


@dataclass(frozen=True)
class RadialBasisSpec:
    """K radial basis functions of a given family with a hard cutoff."""

    count: int
    kind: str = GAUSSIAN
    cutoff: float = 5.0

    def __post_init__(self):
        if self.count < 1:
            raise ValueError(f"count must be >= 1, got {self.count}")
        if self.kind not in _KINDS:
            raise ValueError(f"unknown radial kind {self.kind!r}; known: {_KINDS}")
        if not self.cutoff > 0:
            raise ValueError(f"cutoff must be positive, got {self.cutoff}")


def envelope(t: float) -> float:
    """Quintic cutoff envelope on t in [0, 1]; 1 at 0, 0 at 1, C2 ends."""
    if t >= 1.0:
        return 0.0
    return 1.0 + t * t * t * (-10.0 + t * (15.0 - 6.0 * t))


def radial_basis(r: float, spec: RadialBasisSpec) -> np.ndarray:
    """Values of the K basis functions at radius r (all zero past cutoff).

    gaussian: exp(-(r - c_k)^2 / (2 w^2)) with centers equally spaced on
    [0, cutoff] and width w equal to the spacing, times the envelope.
    reciprocal-bernstein: Bernstein polynomials of degree K-1 in e^{-r},
    times the envelope. With K = 1 both reduce to the envelope alone.
    """
    r = float(r)
    if r < 0:
        raise ValueError(f"radius must be >= 0, got {r}")
    k = spec.count
    if r >= spec.cutoff:
        return np.zeros(k)
    env = envelope(r / spec.cutoff)
    if k == 1:
        return np.array([env])
    if spec.kind == GAUSSIAN:
        centers = np.linspace(0.0, spec.cutoff, k)
        width = spec.cutoff / (k - 1)
        return env * np.exp(-((r - centers) ** 2) / (2.0 * width * width))
    t = exp(-r)
    return env * np.array(
        [comb(k - 1, i) * t**i * (1.0 - t) ** (k - 1 - i) for i in range(k)]
    )


def featurize(r, spec: RadialBasisSpec, max_degree: int) -> IrrepFeatures:
    """Compact irrep features a_k(|r|) * Y_l^m(r/|r|), F = spec.count.

    The zero vector maps to scalar-only content a_k(0) * Y_0^0 (any
    rotation fixes 0, so all l >= 1 blocks must vanish there).
    """
    v = np.asarray(r, dtype=np.float64)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    norm2 = float(v @ v)
    data = np.zeros((1, (max_degree + 1) ** 2, spec.count))
    if norm2 <= ZERO_NORM2_EPS:
        data[0, 0, :] = radial_basis(0.0, spec) / (2.0 * sqrt(np.pi))
        return IrrepFeatures(data)
    radii = radial_basis(sqrt(norm2), spec)
    data[0] = eval_sh(v, max_degree).values[:, None] * radii[None, :]
    return IrrepFeatures(data)
