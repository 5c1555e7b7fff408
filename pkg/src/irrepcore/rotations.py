"""O(3) group elements, Wigner-D matrices, and the equivariance harness.

Rotations are sampled Haar-uniformly via normalized 4-d Gaussian
quaternions. Wigner-D matrices are built recursively from D1 = R by
coupling D^{l-1} with D^1 through the (l-1, 1, l) coefficient block, so
their sign/phase convention is pinned entirely by the component
ordering and the coupling table.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .limits import CapacityError
from .sh import block_slice

_ORTHO_TOL = 1e-12


@dataclass(frozen=True)
class GroupElement:
    """A proper rotation plus a reflection sign (-1 for rotoreflections)."""

    rotation: np.ndarray
    sign: int = 1

    def __post_init__(self):
        r = np.array(self.rotation, dtype=np.float64)
        if r.shape != (3, 3):
            raise ValueError(f"rotation must be 3x3, got shape {r.shape}")
        if np.abs(r.T @ r - np.eye(3)).max() >= _ORTHO_TOL:
            raise ValueError("rotation matrix is not orthogonal")
        if abs(np.linalg.det(r) - 1.0) >= _ORTHO_TOL:
            raise ValueError("rotation matrix must have determinant +1 "
                             "(reflections are carried by the sign flag)")
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        r.flags.writeable = False
        object.__setattr__(self, "rotation", r)

    @classmethod
    def identity(cls) -> "GroupElement":
        return cls(np.eye(3), 1)

    @classmethod
    def inversion(cls) -> "GroupElement":
        return cls(np.eye(3), -1)


def compose(g2: GroupElement, g1: GroupElement) -> GroupElement:
    """The product g2 o g1 (g1 acts first)."""
    return GroupElement(g2.rotation @ g1.rotation, g2.sign * g1.sign)


def random_rotation(rng: np.random.Generator) -> GroupElement:
    """Haar-uniform rotation from a normalized Gaussian quaternion."""
    while True:
        q = rng.standard_normal(4)
        n2 = q @ q
        if n2 > 1e-12:
            break
    w, x, y, z = q / np.sqrt(n2)
    r = np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
        [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
        [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
    ])
    return GroupElement(r, 1)


@dataclass(frozen=True)
class WignerDSet:
    """Orthogonal (2l+1)x(2l+1) rotation matrices for degrees 0..L."""

    max_degree: int
    matrices: tuple

    def __post_init__(self):
        if len(self.matrices) != self.max_degree + 1:
            raise ValueError("need one matrix per degree 0..max_degree")
        for l, d in enumerate(self.matrices):
            if d.shape != (2 * l + 1, 2 * l + 1):
                raise ValueError(f"degree-{l} matrix has shape {d.shape}")
            d.flags.writeable = False

    def apply_flat(self, values: np.ndarray) -> np.ndarray:
        """Block-diagonal action on a flat (L+1)**2 component vector."""
        out = np.empty_like(values)
        for l in range(self.max_degree + 1):
            out[block_slice(l)] = self.matrices[l] @ values[block_slice(l)]
        return out


def wigner_d(g, max_degree: int, table) -> WignerDSet:
    """Wigner-D matrices of the rotation part of g, degrees 0..max_degree.

    D0 = [1] and D1 = R; higher degrees follow from the coupling
    recursion D^l = C (D^{l-1} (x) D^1) C^T with C the orthonormal
    (l-1, 1, l) coefficient block.
    """
    rotation = g.rotation if isinstance(g, GroupElement) else np.asarray(g, float)
    if max_degree > table.max_degree:
        raise CapacityError(
            f"Wigner-D degree {max_degree} exceeds the coupling table "
            f"degree {table.max_degree}"
        )
    mats = [np.ones((1, 1))]
    if max_degree >= 1:
        if np.array_equal(rotation, np.eye(3)):
            # identity matrices at every degree, exactly
            mats.extend(np.eye(2 * l + 1) for l in range(1, max_degree + 1))
            return WignerDSet(max_degree=max_degree, matrices=tuple(mats))
        mats.append(rotation.copy())
    for l in range(2, max_degree + 1):
        c = table.block(l - 1, 1, l)  # (2l-1, 3, 2l+1)
        cmat = c.reshape((2 * l - 1) * 3, 2 * l + 1).T
        mats.append(cmat @ np.kron(mats[l - 1], mats[1]) @ cmat.T)
    return WignerDSet(max_degree=max_degree, matrices=tuple(mats))


# -- equivariance harness -----------------------------------------------------


def _block_labels(x) -> list:
    labels = []
    for l in range(x.max_degree + 1):
        if x.is_compact:
            labels.append((l, 1 if l % 2 == 0 else -1))
        else:
            labels.extend([(l, 1), (l, -1)])
    return labels


@dataclass
class EquivarianceReport:
    """Max deviation of op(g x) from g op(x) over random group elements."""

    op: str
    trials: int
    seed: int
    max_dev: float
    per_block: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "op": self.op,
                "trials": self.trials,
                "seed": self.seed,
                "max_dev": self.max_dev,
                "per_block": self.per_block,
            }
        )


def check_equivariance(op, l_in: int, l_out: int, trials: int, seed: int, *,
                       table, num_features: int = 8, layout: str = "general",
                       op_name: str = "op") -> EquivarianceReport:
    """Measure max |op(g x) - g op(x)| over Haar-random group elements.

    Each trial draws an independent rotation and feature set from a
    per-trial generator seeded with (seed, trial) and tests both
    reflection signs. Deviations are reported per output (degree,
    parity) block; `op` must be a deterministic IrrepFeatures map.
    """
    from .features import IrrepFeatures, transform

    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    p = 1 if layout == "compact" else 2
    max_dev = 0.0
    per_block: dict = {}
    d_degree = max(l_in, l_out)
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        rot = random_rotation(rng)
        x = IrrepFeatures(
            rng.standard_normal((p, (l_in + 1) ** 2, num_features))
        )
        for sign in (1, -1):
            g = GroupElement(rot.rotation, sign)
            d = wigner_d(g, d_degree, table)
            try:
                lhs = op(transform(x, g, d))
                rhs = transform(op(x), g, d)
            except Exception as exc:
                raise RuntimeError(
                    f"op {op_name!r} failed at trial {trial}, sign {sign}"
                ) from exc
            diff = np.abs(lhs.data - rhs.data)
            max_dev = max(max_dev, float(diff.max()))
            for l, parity in _block_labels(lhs):
                key = f"{l}{'+' if parity == 1 else '-'}"
                block_dev = float(
                    np.abs(lhs.block(l, parity) - rhs.block(l, parity)).max()
                )
                per_block[key] = max(per_block.get(key, 0.0), block_dev)
    return EquivarianceReport(
        op=op_name, trials=trials, seed=seed, max_dev=max_dev,
        per_block=dict(sorted(per_block.items())),
    )
