"""Named equivariance-check suites for the CLI and the test harness.

Each suite measures the worst deviation from exact equivariance over
Haar-random rotations (both reflection signs) and reports it with a
per-block breakdown. The broken-demo suite is a deliberately
non-equivariant operation kept as a permanent negative control, so a
vacuously passing harness cannot go unnoticed.
"""

import numpy as np

from . import layers
from .cgc import couple
from .features import IrrepFeatures, transform
from .radial import RadialBasisSpec, featurize
from .rotations import (EquivarianceReport, GroupElement, check_equivariance,
                        random_rotation, wigner_d)
from .sh import eval_sh, sh_index


def _sh_op(max_degree):
    def op(x):
        r = x.block(1, -1)[0, :, 0]
        values = eval_sh(r, max_degree).values
        return IrrepFeatures(values[None, :, None])

    return op


def _suite_sh(table, max_degree, num_features, trials, seed, radial_spec):
    return check_equivariance(
        _sh_op(max_degree), 1, max_degree, trials, seed, table=table,
        num_features=num_features, op_name="sh",
    )


def _suite_couple(table, max_degree, num_features, trials, seed, radial_spec):
    l1, l2 = min(1, max_degree), min(2, max_degree)
    out_parity = (-1) ** (l1 + l2)
    max_dev = 0.0
    per_block = {}
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        rot = random_rotation(rng)
        u = rng.standard_normal(2 * l1 + 1)
        v = rng.standard_normal(2 * l2 + 1)
        d = wigner_d(rot, max_degree, table)
        for sign in (1, -1):
            su = sign**l1 * (d.matrices[l1] @ u)
            sv = sign**l2 * (d.matrices[l2] @ v)
            for l3 in range(abs(l1 - l2), min(l1 + l2, max_degree) + 1):
                lhs = couple(table, su, sv, l3)
                rhs = sign ** (l1 + l2) * (d.matrices[l3] @ couple(table, u, v, l3))
                dev = float(np.abs(lhs - rhs).max())
                key = f"{l3}{'+' if out_parity == 1 else '-'}"
                per_block[key] = max(per_block.get(key, 0.0), dev)
                max_dev = max(max_dev, dev)
    return EquivarianceReport(op="couple", trials=trials, seed=seed,
                              max_dev=max_dev,
                              per_block=dict(sorted(per_block.items())))


def _suite_dense(table, max_degree, num_features, trials, seed, radial_spec):
    params = layers.dense_init(seed, max_degree, num_features, num_features)
    return check_equivariance(
        lambda x: layers.dense_apply(params, x), max_degree, max_degree,
        trials, seed, table=table, num_features=num_features, op_name="dense",
    )


def _suite_tensor(table, max_degree, num_features, trials, seed, radial_spec):
    params = layers.tensor_init(max_degree, max_degree, max_degree, num_features)
    return check_equivariance(
        lambda x: layers.tensor_apply(params, table, x, x, max_degree),
        max_degree, max_degree, trials, seed, table=table,
        num_features=num_features, op_name="tensor",
    )


def _suite_tensor_dense(table, max_degree, num_features, trials, seed, radial_spec):
    p1 = layers.dense_init(seed + 1, max_degree, num_features, num_features)
    p2 = layers.dense_init(seed + 2, max_degree, num_features, num_features)
    pt = layers.tensor_init(max_degree, max_degree, max_degree, num_features)
    return check_equivariance(
        lambda x: layers.tensor_dense_apply(p1, p2, pt, table, x, max_degree),
        max_degree, max_degree, trials, seed, table=table,
        num_features=num_features, op_name="tensor_dense",
    )


def _suite_featurize(table, max_degree, num_features, trials, seed, radial_spec):
    spec = radial_spec or RadialBasisSpec(count=num_features)

    def op(x):
        return featurize(x.block(1, -1)[0, :, 0], spec, max_degree)

    return check_equivariance(
        op, 1, max_degree, trials, seed, table=table,
        num_features=num_features, op_name="featurize",
    )


def _suite_wigner(table, max_degree, num_features, trials, seed, radial_spec):
    max_dev = 0.0
    per_block = {}
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        g1, g2 = random_rotation(rng), random_rotation(rng)
        d1 = wigner_d(g1, max_degree, table)
        d2 = wigner_d(g2, max_degree, table)
        d12 = wigner_d(GroupElement(g1.rotation @ g2.rotation), max_degree, table)
        for l in range(max_degree + 1):
            eye = np.eye(2 * l + 1)
            dev = max(
                float(np.abs(d12.matrices[l] - d1.matrices[l] @ d2.matrices[l]).max()),
                float(np.abs(d1.matrices[l] @ d1.matrices[l].T - eye).max()),
            )
            if l == 1:
                dev = max(dev, float(np.abs(d1.matrices[1] - g1.rotation).max()))
            key = str(l)
            per_block[key] = max(per_block.get(key, 0.0), dev)
            max_dev = max(max_dev, dev)
    return EquivarianceReport(op="wigner", trials=trials, seed=seed,
                              max_dev=max_dev,
                              per_block=dict(sorted(per_block.items())))


def _broken_op(x):
    data = np.array(x.data)
    data[-1, sh_index(1, 1), :] *= -1.0
    return IrrepFeatures(data)


def _suite_broken_demo(table, max_degree, num_features, trials, seed, radial_spec):
    return check_equivariance(
        _broken_op, max(1, max_degree), max(1, max_degree), trials, seed,
        table=table, num_features=num_features, op_name="broken-demo",
    )


SUITES = {
    "sh": _suite_sh,
    "couple": _suite_couple,
    "dense": _suite_dense,
    "tensor": _suite_tensor,
    "tensor_dense": _suite_tensor_dense,
    "featurize": _suite_featurize,
    "wigner": _suite_wigner,
    "broken-demo": _suite_broken_demo,
}

# the negative control is excluded from "all" on purpose
ALL_SUITES = ("sh", "couple", "dense", "tensor", "tensor_dense",
              "featurize", "wigner")


def run_suite(name: str, table, max_degree: int, num_features: int,
              trials: int, seed: int,
              radial_spec: RadialBasisSpec = None) -> EquivarianceReport:
    """Run one named suite and return its deviation report."""
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(
            f"unknown suite {name!r}; known: {sorted(SUITES)} plus 'all'"
        ) from None
    if max_degree < 1:
        raise ValueError("check suites need max degree >= 1")
    return fn(table, max_degree, num_features, trials, seed, radial_spec)
