"""Command line entry point: ``lyndonlab <command> ...``.

Every command prints JSON on stdout. Exit status is 0 on success, 2 on a
configuration error and 3 when an exhaustive enumeration is over budget.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .blocks import (
    GENERAL,
    LYNDON,
    BlockParams,
    block_decompose,
    is_good_word,
    long_blocks,
    long_runs,
)
from .experiments import (
    EXPERIMENTS,
    STATISTICS,
    BudgetError,
    ConfigError,
    ExperimentConfig,
    exact_small_n,
    run_experiment,
)
from .factorization import duval_factorize, rho_sequence, standard_right_factor
from .laws import parse_law, wasserstein2_samples, wasserstein2_vs_law
from .sampling import LyndonSampleStats, draw_lyndon, draw_word, make_rng
from .words import LetterDistribution, Word, is_lyndon

EXIT_OK, EXIT_CONFIG, EXIT_BUDGET = 0, 2, 3


def _n_list(text: str) -> list[int]:
    try:
        values = [int(float(tok)) for tok in text.replace(" ", "").split(",") if tok]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad --n value {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("--n needs at least one value")
    return values


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, Word):
        return str(obj)
    if isinstance(obj, dict):
        return {str(_jsonable(k)) if not isinstance(k, str) else k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _emit(payload, out: str | None = None):
    text = json.dumps(_jsonable(payload), indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n")
    print(text)


def _params(args) -> BlockParams:
    return BlockParams(args.epsilon, args.alpha)


def cmd_factorize(args):
    w = Word(args.word)
    f = duval_factorize(w)
    right = None
    if len(w) >= 2 and is_lyndon(w):
        sf = standard_right_factor(w)
        right = {"u": str(sf.u), "v": str(sf.v), "r": sf.r}
    return {
        "word": str(w),
        "factors": [str(x) for x in f.factors],
        "rho": list(rho_sequence(f).values),
        "is_lyndon": is_lyndon(w),
        "right_factor": right,
    }


def cmd_blocks(args):
    dist = LetterDistribution.from_spec(args.dist)
    params = _params(args)
    w = Word(args.word, dist.alphabet)
    cyclic = args.mode == LYNDON
    report = is_good_word(w, params, dist, cyclic=cyclic)
    out = {
        "word": str(w),
        "params": {
            "epsilon": params.epsilon,
            "alpha": params.alpha_for(dist),
            "min_run_length": params.min_run_length(len(w), dist),
            "min_block_length": params.min_block_length(len(w), dist),
        },
        "run_stats": report.run_stats.summary(),
        "runs": [[d, m] for d, m in report.run_stats.runs],
        "long_runs": [list(x) for x in long_runs(w, params, dist)],
        "long_blocks": [list(x) for x in long_blocks(w, params, dist, cyclic=cyclic)],
        "good_word": report.to_dict(),
        "decomposition": None,
    }
    if report.is_good:
        try:
            out["decomposition"] = block_decompose(w, params, dist, args.mode).summary()
        except ValueError as exc:
            out["decomposition"] = {"error": str(exc)}
    return out


def cmd_sample(args):
    dist = LetterDistribution.from_spec(args.dist)
    rng = make_rng(args.seed, args.stream)
    words, stats = [], LyndonSampleStats()
    for n in args.n:
        for _ in range(args.count):
            w = draw_lyndon(dist, n, rng, stats) if args.lyndon else draw_word(dist, n, rng)
            words.append(str(w))
    out = {"dist": dist.spec, "seed": args.seed, "stream": args.stream, "words": words}
    if args.lyndon:
        out["rejections"] = stats.rejections
    return out


def cmd_exact(args):
    dist = LetterDistribution.from_spec(args.dist)
    if len(args.n) != 1:
        raise ConfigError("exact takes a single n")
    n = args.n[0]
    law = exact_small_n(dist, n, args.statistic, _params(args))
    return {"dist": dist.spec, "n": n, "statistic": args.statistic, "law": law}


def _read_sample(path: str) -> np.ndarray:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return np.array([float(tok) for tok in text.replace(",", " ").split()])


def cmd_wasserstein(args):
    xs = _read_sample(args.sample)
    if args.other:
        ys = _read_sample(args.other)
        return {"w2": wasserstein2_samples(xs, ys), "size": int(xs.size), "against": args.other}
    law = parse_law(args.law)
    return {"w2": wasserstein2_vs_law(xs, law), "size": int(xs.size), "against": args.law}


def cmd_experiment(args):
    cfg = ExperimentConfig(
        experiment=args.name,
        dist=args.dist,
        n=args.n,
        trials=args.trials,
        seed=args.seed,
        epsilon=args.epsilon,
        alpha=args.alpha,
        shards=args.shards,
        out=args.out,
    )
    return run_experiment(cfg).to_dict()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lyndonlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"lyndonlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dist", default="uniform:2", help="uniform:q | geometric:p | json:[p1,...]")
    common.add_argument("--n", type=_n_list, default=[1000], help="length or comma list of lengths")
    common.add_argument("--trials", type=int, default=1000)
    common.add_argument("--seed", type=_u64, default=0)
    common.add_argument("--epsilon", type=float, default=0.4)
    common.add_argument("--alpha", type=float, default=None)
    common.add_argument("--shards", type=int, default=1)
    common.add_argument("--out", default=None, help="also write the JSON output here")

    p = sub.add_parser("factorize", parents=[common], help="Lyndon factorization of a word")
    p.add_argument("word")
    p.set_defaults(func=cmd_factorize)

    p = sub.add_parser("blocks", parents=[common], help="runs, blocks and good-word conditions")
    p.add_argument("word")
    p.add_argument("--mode", choices=(GENERAL, LYNDON), default=GENERAL)
    p.set_defaults(func=cmd_blocks)

    p = sub.add_parser("sample", parents=[common], help="draw random words")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--lyndon", action="store_true", help="draw Lyndon words instead")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("exact", parents=[common], help="exact law by enumeration")
    p.add_argument("--statistic", choices=STATISTICS, default="primitive-prob")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("wasserstein", parents=[common], help="W2 of a sample against a law or sample")
    p.add_argument("sample", help="file of numbers, or - for stdin")
    p.add_argument("--law", default="uniform01", help="mu:p1=<v> | mu0:p1=<v> | uniform01 | pd1")
    p.add_argument("--other", default=None, help="second sample file (same size)")
    p.set_defaults(func=cmd_wasserstein)

    p = sub.add_parser("experiment", parents=[common], help="run a Monte Carlo experiment")
    p.add_argument("name", choices=EXPERIMENTS)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        payload = args.func(args)
    except BudgetError as exc:
        print(f"lyndonlab: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ConfigError, ValueError, OSError) as exc:
        print(f"lyndonlab: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    # the experiment writes its own report and CSV files
    _emit(payload, None if args.command == "experiment" else args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
