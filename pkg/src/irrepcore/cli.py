"""Command-line front end: table generation, evaluation, verification,
and micro-benchmarks.

Exit codes: 0 success, 1 verification failure, 2 domain or capacity
error, 64 usage error. All subcommands are deterministic for a fixed
--seed (timings excepted).
"""

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import backend, layers
from .cgc import build_cgc_table, write_blob, write_csv
from .features import IrrepFeatures
from .limits import CapacityError
from .radial import RadialBasisSpec
from .sh import eval_sh, index_lm, sh_tables
from .suites import ALL_SUITES, SUITES, run_suite

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_DOMAIN = 2
EXIT_USAGE = 64


@dataclass(frozen=True)
class RunConfig:
    """Validated common knobs of a verification run."""

    subcommand: str
    max_degree: int
    num_features: int
    seed: int
    trials: int
    tolerance: float
    output_format: str = "json"
    output_path: str = None

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError(f"tolerance must be > 0, got {self.tolerance}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _vector(text: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}")
    try:
        return np.array([float(p) for p in parts])
    except ValueError:
        raise argparse.ArgumentTypeError(f"non-numeric vector {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="irrepcore", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sh = sub.add_parser("sh", parents=[], help="evaluate spherical harmonics")
    p_sh.add_argument("--r", type=_vector, required=True, metavar="X,Y,Z")
    p_sh.add_argument("--L", type=int, required=True)

    p_cgc = sub.add_parser("cgc", help="generate and export the coupling table")
    p_cgc.add_argument("--L", type=int, required=True)
    p_cgc.add_argument("--format", choices=("csv", "blob"), default="csv")
    p_cgc.add_argument("--out", default=None)

    p_check = sub.add_parser("check", help="run equivariance check suites")
    p_check.add_argument("--suite", required=True,
                         choices=sorted(SUITES) + ["all"])
    p_check.add_argument("--L", type=int, default=4)
    p_check.add_argument("--F", type=int, default=8)
    p_check.add_argument("--trials", type=int, default=100)
    p_check.add_argument("--tol", type=float, default=1e-10)
    p_check.add_argument("--seed", type=int, default=0)
    p_check.add_argument("--radial-kind", default="gaussian")
    p_check.add_argument("--radial-count", type=int, default=8)
    p_check.add_argument("--cutoff", type=float, default=4.0)

    p_bench = sub.add_parser("bench",
                             help="micro-benchmarks (all available backends)")
    p_bench.add_argument("--calls", type=int, default=10_000,
                         help="calls per timed loop (default 10000)")
    return parser


def cmd_sh(args) -> int:
    vec = eval_sh(args.r, args.L)
    for i, value in enumerate(vec.values):
        l, m = index_lm(i)
        print(f"{l},{m},{value:.10f}")
    return EXIT_OK


def cmd_cgc(args) -> int:
    table = build_cgc_table(args.L)
    path = args.out or f"cgc_L{args.L}.{args.format}"
    if args.format == "csv":
        with open(path, "w") as fh:
            write_csv(table, fh)
    else:
        with open(path, "wb") as fh:
            write_blob(table, fh)
    with open(path, "rb") as fh:
        digest = hashlib.sha256(fh.read()).hexdigest()
    print(f"sha256 {digest} {path}")
    return EXIT_OK


def cmd_check(args) -> int:
    config = RunConfig(
        subcommand="check", max_degree=args.L, num_features=args.F,
        seed=args.seed, trials=args.trials, tolerance=args.tol,
    )
    radial_spec = RadialBasisSpec(
        count=args.radial_count, kind=args.radial_kind, cutoff=args.cutoff,
    )
    names = list(ALL_SUITES) if args.suite == "all" else [args.suite]
    table = build_cgc_table(config.max_degree)
    worst = 0.0
    for name in names:
        report = run_suite(
            name, table, config.max_degree, config.num_features,
            config.trials, config.seed, radial_spec=radial_spec,
        )
        print(report.to_json())
        worst = max(worst, report.max_dev)
    return EXIT_OK if worst < config.tolerance else EXIT_VERIFICATION


def _bench_eval_sh(calls: int, rng) -> dict:
    sh_tables(8)  # exclude one-time table construction from the timing
    vectors = rng.standard_normal((calls, 3))
    out: dict = {}
    digest = None
    for name in sorted(backend.available_backends()):
        with backend.use(name):
            acc = hashlib.sha256()
            start = time.perf_counter()
            for v in vectors:
                acc.update(eval_sh(v, 8).values.tobytes())
            out[name] = time.perf_counter() - start
            digest = acc.hexdigest()
    return {"seconds": out, "checksum": digest}


def _bench_tensor(calls: int, rng) -> dict:
    table = build_cgc_table(4)
    params = layers.tensor_init(2, 2, 2, 64)
    x = IrrepFeatures(rng.standard_normal((2, 9, 64)))
    y = IrrepFeatures(rng.standard_normal((2, 9, 64)))
    out: dict = {}
    digest = None
    for name in sorted(backend.available_backends()):
        with backend.use(name):
            start = time.perf_counter()
            for _ in range(calls):
                z = layers.tensor_apply(params, table, x, y, 2)
            out[name] = time.perf_counter() - start
            digest = hashlib.sha256(z.data.tobytes()).hexdigest()
    return {"seconds": out, "checksum": digest}


def cmd_bench(args) -> int:
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    table = build_cgc_table(8)
    cgc_seconds = time.perf_counter() - start
    report = {
        "backend": {
            "active": backend.active_backend(),
            "available": sorted(backend.available_backends()),
        },
        "cgc_build_L8": {"seconds": cgc_seconds, "checksum": table.checksum()},
        f"eval_sh_{args.calls}_L8": _bench_eval_sh(args.calls, rng),
        f"tensor_apply_{args.calls}_L2_F64": _bench_tensor(args.calls, rng),
    }
    print(json.dumps(report, indent=2))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = {
        "sh": cmd_sh,
        "cgc": cmd_cgc,
        "check": cmd_check,
        "bench": cmd_bench,
    }[args.command]
    try:
        return handler(args)
    except (CapacityError, ValueError) as exc:
        print(f"irrepcore {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
