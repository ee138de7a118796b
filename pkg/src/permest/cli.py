"""Command-line front end.

Usage::

    permest estimate --matrix m.json --mode absolute --epsilon 0.01 --delta 0.05
    permest exact    --matrix m.json --method ryser
    permest gurvits  --matrix m.json --epsilon 0.1 --delta 0.05
    permest analyze  --matrix m.json [--c auto]
    permest gen      --m 4 --lambda-max 0.9 --seed 1 --output m.json
    permest bench    --sizes 2-8 --family rank-one --lambda-max 0.9 [--table]

Every subcommand except ``gen`` prints a JSON report (or writes it to
``--output``). ``gen`` emits a matrix file. Exit codes: 0 success, 2 invalid
input or configuration, 3 the requested error mode's regime condition fails,
4 numerical failure or sample cap exceeded.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field

from . import __version__
from .bench import FAMILIES, format_table, run_bench
from .errors import InvalidInput, PermestError
from .estimator import DEFAULT_SAMPLE_CAP, ErrorMode, estimate_permanent
from .exact import ExactMethod, permanent
from .gurvits import gurvits_estimate
from .matrixio import dumps, matrix_document, read_matrix_file
from .regimes import analyze
from .spectra import gen_from_spectrum, gen_random_hpsm, spectral_decompose

SEED_ENV = "PERMEST_SEED"
SUBCOMMANDS = ("estimate", "exact", "gurvits", "analyze", "gen", "bench")


@dataclass
class RunConfig:
    subcommand: str
    matrix_path: str | None = None
    epsilon: float = 0.05
    delta: float = 0.05
    mode: str = "absolute"
    c: float | str = "auto"
    seed: int = 0
    workers: int = 1
    method: str = "ryser"
    output_path: str | None = None
    sample_cap: int = DEFAULT_SAMPLE_CAP
    force_rescale: bool = False
    # gen / bench parameters
    m: int | None = None
    lambda_max: float = 0.9
    spectrum: list[float] | None = None
    sizes: list[int] = field(default_factory=lambda: list(range(2, 9)))
    family: str = "rank-one"
    table: bool = False

    def validate(self):
        if self.subcommand not in SUBCOMMANDS:
            raise InvalidInput(f"subcommand check: unknown subcommand {self.subcommand!r}")
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise InvalidInput(f"epsilon check: epsilon = {self.epsilon} must be finite and > 0")
        if not (0.0 < self.delta < 1.0):
            raise InvalidInput(f"delta check: delta = {self.delta} must lie in (0, 1)")
        if self.workers < 1:
            raise InvalidInput(f"workers check: workers = {self.workers} must be >= 1")
        if self.sample_cap < 1:
            raise InvalidInput(f"sample-cap check: sample_cap = {self.sample_cap} must be >= 1")
        if self.method not in {m.value for m in ExactMethod}:
            raise InvalidInput(f"method check: unknown method {self.method!r}")
        if self.seed < 0:
            raise InvalidInput(f"seed check: seed = {self.seed} must be >= 0")
        if self.subcommand in ("estimate", "exact", "gurvits", "analyze") and not self.matrix_path:
            raise InvalidInput(f"matrix check: {self.subcommand} needs --matrix")
        if self.subcommand == "gen" and self.spectrum is None and self.m is None:
            raise InvalidInput("gen check: give --m (with --lambda-max) or --spectrum")


def _digest(mat, path):
    dec = spectral_decompose(mat)
    return {
        "path": path,
        "m": dec.m,
        "lambda_max": dec.lambda_max,
        "lambda_min": dec.lambda_min,
        "mean_lambda": dec.mean_lambda,
    }


def run(config: RunConfig) -> dict:
    """Execute one subcommand and return the report document.

    Raises the library's exceptions; :func:`main` maps them to exit codes.
    """
    config.validate()
    t0 = time.perf_counter()
    cmd = config.subcommand
    digest = None

    if cmd == "gen":
        if config.spectrum is not None:
            mat = gen_from_spectrum(config.spectrum, config.seed)
        else:
            mat = gen_random_hpsm(config.m, config.lambda_max, config.seed)
        return matrix_document(mat)

    if cmd == "bench":
        rows = run_bench(
            config.sizes, config.family, config.lambda_max, config.epsilon,
            config.delta, config.seed, config.workers, config.sample_cap,
        )
        result = {"family": config.family, "rows": rows}
    else:
        mat = read_matrix_file(config.matrix_path)
        digest = _digest(mat, config.matrix_path)
        c = config.c
        if cmd == "estimate":
            mode = ErrorMode.parse(config.mode, config.epsilon)
            result = estimate_permanent(
                mat, mode, config.delta, c=c, seed=config.seed, workers=config.workers,
                force_rescale=config.force_rescale, sample_cap=config.sample_cap,
            )
        elif cmd == "exact":
            method = ExactMethod(config.method)
            value = permanent(mat.entries, method)
            result = {
                "method": method.value,
                "value": value,
                "log_abs_value": math.log(abs(value)) if value != 0 else -math.inf,
            }
        elif cmd == "gurvits":
            result = gurvits_estimate(mat.entries, config.epsilon, config.delta, config.seed, config.workers)
        else:
            result = analyze(mat, c=c, force_rescale=config.force_rescale)

    return {
        "version": __version__,
        "subcommand": cmd,
        "input": digest,
        "config": asdict(config),
        "result": result,
        "wall_seconds": time.perf_counter() - t0,
    }


def _sizes(text):
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out or min(out) < 1:
        raise argparse.ArgumentTypeError(f"invalid size list {text!r}")
    return out


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number list {text!r}") from None


def _c_value(text):
    if text == "auto":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--c expects a number or 'auto', got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="permest", description="Permanents of Hermitian PSD matrices.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, matrix=True, sampling=True):
        if matrix:
            p.add_argument("--matrix", dest="matrix_path", required=True, help="matrix file (JSON)")
        if sampling:
            p.add_argument("--epsilon", type=float, default=0.05)
            p.add_argument("--delta", type=float, default=0.05)
            p.add_argument("--seed", type=int, default=None, help=f"default: ${SEED_ENV} or 0")
            p.add_argument("--workers", type=int, default=1)
        p.add_argument("--output", dest="output_path", default=None)

    p = sub.add_parser("estimate", help="coherent-state Monte Carlo estimate")
    common(p)
    p.add_argument("--mode", default="absolute",
                   help="absolute | gurvits-beating (s1) | exp-decaying (s2) | sqrt-relative (s3)")
    p.add_argument("--c", type=_c_value, default="auto")
    p.add_argument("--force-rescale", action="store_true")
    p.add_argument("--sample-cap", type=int, default=DEFAULT_SAMPLE_CAP)

    p = sub.add_parser("exact", help="exact permanent")
    common(p, sampling=False)
    p.add_argument("--method", choices=[m.value for m in ExactMethod], default="ryser")

    p = sub.add_parser("gurvits", help="Gurvits baseline estimate")
    common(p)

    p = sub.add_parser("analyze", help="regime conditions and permanent bounds")
    common(p, sampling=False)
    p.add_argument("--c", type=_c_value, default="auto")
    p.add_argument("--force-rescale", action="store_true")

    p = sub.add_parser("gen", help="write a random HPSM matrix file")
    common(p, matrix=False, sampling=False)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--lambda-max", type=float, default=0.9)
    p.add_argument("--spectrum", type=_floats, default=None, help="comma-separated eigenvalues")
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("bench", help="compare with Gurvits on a matrix family")
    common(p, matrix=False)
    p.add_argument("--sizes", type=_sizes, default=list(range(2, 9)), help="e.g. 2-8 or 2,4,6")
    p.add_argument("--family", choices=FAMILIES, default="rank-one")
    p.add_argument("--lambda-max", type=float, default=0.9)
    p.add_argument("--sample-cap", type=int, default=DEFAULT_SAMPLE_CAP)
    p.add_argument("--table", action="store_true", help="also print a text table to stderr")
    return parser


def config_from_args(args: argparse.Namespace, environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    values = {k: v for k, v in vars(args).items() if v is not None}
    if "seed" not in values:
        env = environ.get(SEED_ENV)
        if env is not None:
            try:
                values["seed"] = int(env)
            except ValueError:
                raise InvalidInput(f"seed check: ${SEED_ENV} = {env!r} is not an integer") from None
    return RunConfig(**values)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        report = run(config)
    except PermestError as exc:
        print(f"permest: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ArithmeticError, MemoryError) as exc:
        print(f"permest: error: numerical failure: {exc}", file=sys.stderr)
        return 4
    text = dumps(report)
    if config.output_path:
        try:
            with open(config.output_path, "w") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"permest: error: io check: cannot write {config.output_path}: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    if config.table and config.subcommand == "bench":
        print(format_table(report["result"]["rows"]), file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
