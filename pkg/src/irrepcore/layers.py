"""Equivariant neural-network building blocks.

Activations gate every component of a feature channel by a scalar
function of its invariant (even scalar) component. Dense layers apply a
separate weight matrix per (degree, parity) block, with a bias on the
even scalar block only. Tensor layers couple two feature sets through
the Clebsch-Gordan table with one trainable weight vector per coupling
path, and tensor-dense layers compose two dense projections with a
tensor coupling.
"""

import struct
from dataclasses import dataclass
from math import sqrt

import numpy as np

from .backend import get_kernels
from .features import COMPACT, GENERAL, IrrepFeatures
from .sh import block_slice

PARAMS_MAGIC = b"E3PR"
PARAMS_VERSION = 1


# -- activations ---------------------------------------------------------------


def _relu_gate(s):
    return np.where(s > 0, 1.0, 0.0)


def _swish_gate(s):
    return 1.0 / (1.0 + np.exp(-s))


_ACTIVATIONS = {
    # name -> (gate g, scalar function sigma) with sigma(x) = g(x) * x
    "relu": (_relu_gate, lambda s: np.maximum(s, 0.0)),
    "swish": (_swish_gate, lambda s: s / (1.0 + np.exp(-s))),
    "identity": (lambda s: np.ones_like(s), lambda s: s),
}


def register_activation(name: str, gate, scalar=None) -> None:
    """Add an activation kind; only the gating function is required."""
    _ACTIVATIONS[name] = (gate, scalar if scalar is not None else
                          (lambda s, g=gate: g(s) * s))


def activation_kinds() -> tuple:
    return tuple(_ACTIVATIONS)


def activation(x: IrrepFeatures, kind: str) -> IrrepFeatures:
    """Gated activation: every channel scaled by g(its scalar component)."""
    try:
        gate, _ = _ACTIVATIONS[kind]
    except KeyError:
        raise ValueError(
            f"unknown activation {kind!r}; registered: {sorted(_ACTIVATIONS)}"
        ) from None
    gates = gate(x.block(0, 1))  # (1, 1, F), broadcasts over all blocks
    return IrrepFeatures(x.data * gates)


def scalar_activation(values: np.ndarray, kind: str) -> np.ndarray:
    """The underlying scalar function sigma, applied elementwise."""
    try:
        _, scalar = _ACTIVATIONS[kind]
    except KeyError:
        raise ValueError(
            f"unknown activation {kind!r}; registered: {sorted(_ACTIVATIONS)}"
        ) from None
    return scalar(np.asarray(values, dtype=np.float64))


# -- dense layers --------------------------------------------------------------


def _dense_keys(max_degree: int, layout: str) -> list:
    if layout == GENERAL:
        return [(l, p) for l in range(max_degree + 1) for p in (1, -1)]
    if layout == COMPACT:
        return [(l, (-1) ** l) for l in range(max_degree + 1)]
    raise ValueError(f"unknown layout {layout!r}")


@dataclass(frozen=True)
class DenseParams:
    """One weight matrix per (degree, parity) block plus a scalar bias."""

    layout: str
    max_degree: int
    f_in: int
    f_out: int
    weights: dict  # (l, parity) -> (f_in, f_out)
    bias: np.ndarray  # (f_out,), added to the even scalar block only

    def __post_init__(self):
        expected = _dense_keys(self.max_degree, self.layout)
        if sorted(self.weights) != sorted(expected):
            raise ValueError(f"weights must cover exactly the blocks {expected}")
        for key, w in self.weights.items():
            if w.shape != (self.f_in, self.f_out):
                raise ValueError(f"weight {key} has shape {w.shape}")
        if self.bias.shape != (self.f_out,):
            raise ValueError(f"bias must have shape ({self.f_out},)")


def dense_init(seed: int, max_degree: int, f_in: int, f_out: int,
               layout: str = GENERAL) -> DenseParams:
    """Deterministic init: uniform weights with variance 1/f_in, zero bias."""
    if f_in < 1 or f_out < 1:
        raise ValueError("feature counts must be positive")
    rng = np.random.default_rng(seed)
    bound = sqrt(3.0 / f_in)
    weights = {
        key: rng.uniform(-bound, bound, size=(f_in, f_out))
        for key in _dense_keys(max_degree, layout)
    }
    return DenseParams(layout=layout, max_degree=max_degree, f_in=f_in,
                       f_out=f_out, weights=weights, bias=np.zeros(f_out))


def dense_apply(params: DenseParams, x: IrrepFeatures) -> IrrepFeatures:
    """Per-block linear map y = x W, with the bias on the even scalars."""
    if x.layout != params.layout or x.max_degree != params.max_degree:
        raise ValueError(
            f"features ({x.layout}, L={x.max_degree}) do not match params "
            f"({params.layout}, L={params.max_degree})"
        )
    if x.num_features != params.f_in:
        raise ValueError(
            f"feature count {x.num_features} does not match f_in {params.f_in}"
        )
    out = np.empty((x.parity_axis, x.data.shape[1], params.f_out))
    for row in range(x.parity_axis):
        for l in range(x.max_degree + 1):
            parity = (-1) ** l if x.is_compact else (1 if row == 0 else -1)
            out[row, block_slice(l), :] = (
                x.data[row, block_slice(l), :] @ params.weights[(l, parity)]
            )
    out[0, 0, :] += params.bias
    return IrrepFeatures(out)


# -- tensor layers ---------------------------------------------------------------


def tensor_paths(l_x: int, l_y: int, l_z: int, layout_x: str = GENERAL,
                 layout_y: str = GENERAL) -> list:
    """All coupling paths (a, alpha, b, beta, c, gamma) in a fixed order."""
    def parities(l, layout):
        return ((-1) ** l,) if layout == COMPACT else (1, -1)

    paths = []
    for a in range(l_x + 1):
        for alpha in parities(a, layout_x):
            for b in range(l_y + 1):
                for beta in parities(b, layout_y):
                    for c in range(abs(a - b), min(a + b, l_z) + 1):
                        paths.append((a, alpha, b, beta, c, alpha * beta))
    return paths


@dataclass(frozen=True)
class TensorParams:
    """One length-F weight vector per valid coupling path."""

    l_x: int
    l_y: int
    l_z: int
    f: int
    layout_x: str
    layout_y: str
    path_weights: dict  # (a, alpha, b, beta, c, gamma) -> (f,)

    def __post_init__(self):
        expected = tensor_paths(self.l_x, self.l_y, self.l_z,
                                self.layout_x, self.layout_y)
        if sorted(self.path_weights) != sorted(expected):
            raise ValueError("path weights must cover exactly the valid paths")
        for key, w in self.path_weights.items():
            if w.shape != (self.f,):
                raise ValueError(f"path weight {key} has shape {w.shape}")


def tensor_init(l_x: int, l_y: int, l_z: int, f: int,
                layout_x: str = GENERAL, layout_y: str = GENERAL) -> TensorParams:
    """Init each path weight to 1/sqrt(#paths feeding its output block)."""
    paths = tensor_paths(l_x, l_y, l_z, layout_x, layout_y)
    fan_in: dict = {}
    for a, alpha, b, beta, c, gamma in paths:
        fan_in[(c, gamma)] = fan_in.get((c, gamma), 0) + 1
    weights = {
        p: np.full(f, 1.0 / sqrt(fan_in[(p[4], p[5])])) for p in paths
    }
    return TensorParams(l_x=l_x, l_y=l_y, l_z=l_z, f=f, layout_x=layout_x,
                        layout_y=layout_y, path_weights=weights)


def tensor_apply(params: TensorParams, table, x: IrrepFeatures,
                 y: IrrepFeatures, l_z: int) -> IrrepFeatures:
    """Weighted per-channel coupling of two feature sets.

    The output is compact when both inputs are compact and every path
    lands on the proper-tensor parity (-1)**c; otherwise it is general.
    """
    if x.num_features != y.num_features:
        raise ValueError(
            f"feature counts differ: {x.num_features} vs {y.num_features}"
        )
    if x.num_features != params.f:
        raise ValueError(f"feature count {x.num_features} != params f {params.f}")
    if (x.layout, y.layout) != (params.layout_x, params.layout_y):
        raise ValueError("input layouts do not match params")
    if (x.max_degree, y.max_degree) != (params.l_x, params.l_y):
        raise ValueError("input degrees do not match params")
    if l_z != params.l_z:
        raise ValueError(f"output degree {l_z} != params degree {params.l_z}")
    if l_z > x.max_degree + y.max_degree:
        raise ValueError(
            f"output degree {l_z} exceeds {x.max_degree} + {y.max_degree}"
        )
    if table.max_degree < max(x.max_degree, y.max_degree, l_z):
        raise ValueError("coupling table degree too small for these features")

    paths = tensor_paths(params.l_x, params.l_y, l_z, x.layout, y.layout)
    compact_out = (
        x.is_compact and y.is_compact
        and all(gamma == (-1) ** c for _, _, _, _, c, gamma in paths)
    )
    p_out = 1 if compact_out else 2
    out = np.zeros((p_out, (l_z + 1) ** 2, params.f))
    kernels = get_kernels()
    for a, alpha, b, beta, c, gamma in paths:
        u = np.ascontiguousarray(x.block(a, alpha)[0])
        v = np.ascontiguousarray(y.block(b, beta)[0])
        coupled = np.zeros((2 * c + 1, params.f))
        kernels.couple_accumulate(table.block(a, b, c), u, v, coupled)
        row = 0 if compact_out else (0 if gamma == 1 else 1)
        out[row, block_slice(c), :] += (
            params.path_weights[(a, alpha, b, beta, c, gamma)] * coupled
        )
    return IrrepFeatures(out)


def tensor_dense_apply(p1: DenseParams, p2: DenseParams, pt: TensorParams,
                       table, x: IrrepFeatures, l_out: int) -> IrrepFeatures:
    """Two dense projections of x coupled by a tensor layer."""
    a = dense_apply(p1, x)
    b = dense_apply(p2, x)
    return tensor_apply(pt, table, a, b, l_out)


# -- serialization ---------------------------------------------------------------


_LAYOUT_CODE = {GENERAL: 0, COMPACT: 1}
_LAYOUT_NAME = {v: k for k, v in _LAYOUT_CODE.items()}


def write_params(params, stream) -> None:
    """Serialize DenseParams or TensorParams with the E3PR header."""
    stream.write(PARAMS_MAGIC)
    if isinstance(params, DenseParams):
        stream.write(struct.pack("<IIiiii", PARAMS_VERSION, 0,
                                 _LAYOUT_CODE[params.layout], params.max_degree,
                                 params.f_in, params.f_out))
        for key in _dense_keys(params.max_degree, params.layout):
            stream.write(params.weights[key].astype("<f8").tobytes())
        stream.write(params.bias.astype("<f8").tobytes())
    elif isinstance(params, TensorParams):
        stream.write(struct.pack("<IIiiiiii", PARAMS_VERSION, 1,
                                 params.l_x, params.l_y, params.l_z, params.f,
                                 _LAYOUT_CODE[params.layout_x],
                                 _LAYOUT_CODE[params.layout_y]))
        for key in tensor_paths(params.l_x, params.l_y, params.l_z,
                                params.layout_x, params.layout_y):
            stream.write(params.path_weights[key].astype("<f8").tobytes())
    else:
        raise ValueError(f"cannot serialize {type(params).__name__}")


def read_params(stream):
    magic = stream.read(4)
    if magic != PARAMS_MAGIC:
        raise ValueError(f"bad magic {magic!r}, expected {PARAMS_MAGIC!r}")
    version, kind = struct.unpack("<II", stream.read(8))
    if version != PARAMS_VERSION:
        raise ValueError(f"unsupported params version {version}")
    if kind == 0:
        layout_code, max_degree, f_in, f_out = struct.unpack("<iiii", stream.read(16))
        layout = _LAYOUT_NAME[layout_code]
        weights = {}
        for key in _dense_keys(max_degree, layout):
            raw = np.frombuffer(stream.read(f_in * f_out * 8), dtype="<f8")
            weights[key] = raw.reshape(f_in, f_out).astype(np.float64)
        bias = np.frombuffer(stream.read(f_out * 8), dtype="<f8").astype(np.float64)
        return DenseParams(layout=layout, max_degree=max_degree, f_in=f_in,
                           f_out=f_out, weights=weights, bias=bias)
    if kind == 1:
        l_x, l_y, l_z, f, cx, cy = struct.unpack("<iiiiii", stream.read(24))
        layout_x, layout_y = _LAYOUT_NAME[cx], _LAYOUT_NAME[cy]
        weights = {}
        for key in tensor_paths(l_x, l_y, l_z, layout_x, layout_y):
            weights[key] = np.frombuffer(stream.read(f * 8), dtype="<f8").astype(np.float64)
        return TensorParams(l_x=l_x, l_y=l_y, l_z=l_z, f=f, layout_x=layout_x,
                            layout_y=layout_y, path_weights=weights)
    raise ValueError(f"unknown params kind {kind}")
