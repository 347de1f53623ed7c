"""Command-line front end.

Subcommands: ``fit``, ``summarize``, ``predict``, ``simulate-bias``.
Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import correlation_quantiles, summarize
from .baseline import BiasScenario, bias_study
from .data import load_csv, write_csv
from .errors import DataError, NumericalError
from .numeric import make_rng
from .posterior import read_posterior, write_posterior
from .predictive import conditional_table, sample_predictive
from .sampler import McmcConfig, PriorSpec, run_chain, run_chains

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

SEED_ENV = "RANKCOP_SEED"

logger = logging.getLogger("rankcop")


class UsageError(Exception):
    pass


def _seed(value):
    if value is not None:
        return value
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 1
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from None


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _write_json(obj, path):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _load_input(args):
    return load_csv(args.input, missing=args.missing, level_orders=args.levels)


def _prior(args, p):
    if args.v0_diag is not None and args.v0_file is not None:
        raise UsageError("give at most one of --v0-diag and --v0-file")
    if args.v0_diag is not None:
        if len(args.v0_diag) != p:
            raise UsageError(f"--v0-diag needs {p} values, got {len(args.v0_diag)}")
        v0 = np.diag(args.v0_diag)
    elif args.v0_file is not None:
        try:
            v0 = np.array(json.loads(Path(args.v0_file).read_text()), dtype=float)
        except (OSError, ValueError) as exc:
            raise DataError(f"cannot read prior scale from {args.v0_file}: {exc}") from None
        if v0.shape != (p, p):
            raise DataError(f"prior scale must be {p}x{p}, got shape {v0.shape}")
    else:
        v0 = np.eye(p)
    nu0 = args.nu0 if args.nu0 is not None else p + 2
    try:
        return PriorSpec(nu0, v0)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_fit(args):
    data = _load_input(args)
    prior = _prior(args, data.p)
    try:
        config = McmcConfig(
            nscan=args.nscan, burnin=args.burnin, thin=args.thin,
            seed=_seed(args.seed), save_latent=False, scale_moves=not args.no_scale_moves,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.chains < 1:
        raise UsageError("--chains must be at least 1")
    out = Path(args.output)
    if args.chains == 1:
        written = [write_posterior(run_chain(data, prior, config), out)]
    else:
        results = run_chains(data, prior, config, chains=args.chains, max_workers=args.workers)
        written = [
            write_posterior(s, out.with_name(f"{out.stem}_chain{k + 1}{out.suffix or '.csv'}"))
            for k, s in enumerate(results)
        ]
    for csv_path, meta_path in written:
        print(f"wrote {csv_path} and {meta_path}")
    return 0


def cmd_summarize(args):
    samples = read_posterior(args.posterior, args.metadata)
    summary = summarize(samples, level=args.graph_level, lag=args.lag)
    summary["graph_level"] = args.graph_level
    _write_json(summary, args.output)
    if args.quantiles_csv:
        import pandas as pd

        pd.DataFrame(correlation_quantiles(samples).to_rows()).to_csv(
            args.quantiles_csv, index=False, lineterminator="\n"
        )
    print(f"wrote {args.output}")
    return 0


def _parse_given(items):
    given = []
    for item in items or []:
        name, sep, level = item.partition("=")
        if not sep or not name:
            raise UsageError(f"--given expects COLUMN=LEVEL, got {item!r}")
        given.append((name, level))
    return given


def cmd_predict(args):
    samples = read_posterior(args.posterior, args.metadata)
    data = _load_input(args)
    if samples.metadata.get("data_sha256") != data.content_hash():
        raise DataError(f"{args.input} is not the data this posterior was fitted to")
    given = _parse_given(args.given)
    for name, _ in given:
        data.column(name)
    if args.target is not None:
        data.column(args.target)
    if args.count < 1:
        raise UsageError("--count must be at least 1")
    rng = make_rng(_seed(args.seed))
    synthetic = sample_predictive(samples, data, rng, args.count)
    if args.target is None:
        if given:
            raise UsageError("--given requires --target")
        write_csv(synthetic, args.output, missing=args.missing)
    else:
        bins = None
        if args.bins:
            try:
                bins = json.loads(Path(args.bins).read_text())
            except (OSError, ValueError) as exc:
                raise DataError(f"cannot read bins from {args.bins}: {exc}") from None
        table = conditional_table(synthetic, args.target, given, bins=bins)
        _write_json(table.to_dict(synthetic.column(args.target).labels), args.output)
    print(f"wrote {args.output}")
    return 0


def cmd_simulate_bias(args):
    try:
        scenario = BiasScenario(
            ns=tuple(args.ns), rho=args.rho, marginals=tuple(args.marginals.split(",")),
            replicates=args.replicates, posterior_replicates=args.posterior_replicates,
            posterior_nscan=args.posterior_nscan,
        )
    except ValueError as exc:
        raise UsageError(f"bad scenario: {exc}") from None
    table = bias_study(scenario, make_rng(_seed(args.seed)))
    table.to_csv(args.output, index=False, lineterminator="\n")
    print(f"wrote {args.output}")
    return 0


def _add_data_args(p):
    p.add_argument("--input", required=True, help="CSV file with a header row")
    p.add_argument("--missing", default="NA", help="missing-value token (default: NA)")
    p.add_argument("--levels", help="JSON sidecar giving level orders for text columns")


def build_parser():
    parser = argparse.ArgumentParser(prog="rankcop", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="run the Gibbs sampler")
    _add_data_args(fit)
    fit.add_argument("--output", required=True, help="posterior CSV path; metadata goes to the .json beside it")
    fit.add_argument("--nscan", type=int, default=25_000)
    fit.add_argument("--burnin", type=int, default=None, help="default: 20%% of --nscan")
    fit.add_argument("--thin", type=int, default=10)
    fit.add_argument("--seed", type=int, default=None, help=f"default: ${SEED_ENV} or 1")
    fit.add_argument("--nu0", type=int, default=None, help="prior degrees of freedom (default p + 2)")
    fit.add_argument("--v0-diag", type=_floats, default=None, help="diagonal prior scale, comma-separated")
    fit.add_argument("--v0-file", default=None, help="JSON file with the full prior scale matrix")
    fit.add_argument("--no-scale-moves", action="store_true",
                     help="plain Gibbs scans without the per-column scale update")
    fit.add_argument("--chains", type=int, default=1)
    fit.add_argument("--workers", type=int, default=None)
    fit.set_defaults(func=cmd_fit)

    summ = sub.add_parser("summarize", help="posterior quantiles, coefficients, graph and diagnostics")
    summ.add_argument("--posterior", required=True)
    summ.add_argument("--metadata", default=None)
    summ.add_argument("--output", required=True)
    summ.add_argument("--graph-level", type=float, default=0.95)
    summ.add_argument("--lag", type=int, default=10)
    summ.add_argument("--quantiles-csv", default=None)
    summ.set_defaults(func=cmd_summarize)

    pred = sub.add_parser("predict", help="posterior-predictive synthetic data or conditional tables")
    pred.add_argument("--posterior", required=True)
    pred.add_argument("--metadata", default=None)
    _add_data_args(pred)
    pred.add_argument("--output", required=True)
    pred.add_argument("--count", type=int, default=10_000)
    pred.add_argument("--seed", type=int, default=None)
    pred.add_argument("--target", default=None)
    pred.add_argument("--given", action="append", metavar="COLUMN=LEVEL")
    pred.add_argument("--bins", default=None, help="JSON mapping target level to [low, high]")
    pred.set_defaults(func=cmd_predict)

    bias = sub.add_parser("simulate-bias", help="normal-scores bias study")
    bias.add_argument("--output", required=True)
    bias.add_argument("--ns", type=_ints, default=[100, 1000, 10000])
    bias.add_argument("--rho", type=float, default=0.5)
    bias.add_argument("--marginals", default="continuous,binary")
    bias.add_argument("--replicates", type=int, default=200)
    bias.add_argument("--posterior-replicates", type=int, default=0)
    bias.add_argument("--posterior-nscan", type=int, default=1000)
    bias.add_argument("--seed", type=int, default=None)
    bias.set_defaults(func=cmd_simulate_bias)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"rankcop {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"rankcop {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"rankcop {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
