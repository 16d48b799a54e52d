"""Command-line entry point: ``tracerecon <subcommand> ...``.

Exit status is 0 on success, 2 on invalid input and 1 on runtime
failure (including a failed verification).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import decks, lcs, oracles
from .channel import delete_direct, delete_geometric_process
from .harness import ExperimentConfig, emit, run_experiment, worst_case_suite
from .reconstruct import (
    RECONSTRUCTORS,
    AlgAParams,
    get_reconstructor,
    zero_trace_alternating,
    zero_trace_bukh_cox,
)
from .strings import BitString, bukh_ma_code, make_periodic, read_strings, write_strings


class VerificationFailed(RuntimeError):
    pass


def _frac_list(text: str) -> list[Fraction]:
    return [Fraction(t) for t in text.split(",") if t]


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t]


def _output(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_input(path: str) -> list[BitString]:
    if path == "-":
        return read_strings(sys.stdin)
    return read_strings(path)


def cmd_generate(args) -> None:
    rng = np.random.default_rng(args.seed)
    n = args.n
    kind = args.kind
    if kind == "random":
        out = [BitString.random(n, rng) for _ in range(args.count)]
    elif kind == "zeros":
        out = [BitString.zeros(n)]
    elif kind == "ones":
        out = [BitString.ones(n)]
    elif kind == "alternating":
        out = [zero_trace_alternating(n).x]
    elif kind == "bukh-cox":
        out = [zero_trace_bukh_cox(n).x]
    elif kind == "periodic":
        out = [make_periodic(args.r, n)]
    else:  # bukh-ma
        out = bukh_ma_code(n, args.inv_eps4, args.ell or n)
    _output(args, write_strings(out))


def cmd_del(args) -> None:
    rng = np.random.default_rng(args.seed)
    traces = []
    for x in _read_input(args.input):
        for _ in range(args.count):
            if args.method == "direct":
                traces.append(delete_direct(x, args.delta, rng).y)
            else:
                traces.append(delete_geometric_process(x, args.delta, rng)[0].y)
    _output(args, write_strings(traces))


def _params(args) -> AlgAParams:
    return AlgAParams(block_width=args.block_width, gamma_ratio=Fraction(args.gamma_ratio))


def cmd_recon(args) -> None:
    rng = np.random.default_rng(args.seed)
    algo = get_reconstructor(args.algo)
    params = _params(args)
    out = [algo(y, args.n, args.delta, rng, params).x for y in _read_input(args.input)]
    _output(args, write_strings(out))


def cmd_experiment(args) -> None:
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg = ExperimentConfig.from_dict(json.load(fh))
    else:
        if args.algo is None or args.n is None or (args.delta is None) == (args.rho is None):
            raise ValueError("need --algo, --n and exactly one of --delta/--rho (or --config)")
        delta = args.delta if args.delta is not None else 1.0 - args.rho
        cfg = ExperimentConfig(
            args.algo, args.n, delta, trials=args.trials, seed=args.seed, source=args.source,
            strings_path=args.strings, params=_params(args),
        )
    res = run_experiment(cfg, threads=args.threads)
    _output(args, emit([res], args.format, per_member=args.per_member))


def cmd_cs_table(args) -> None:
    lines = ["j\tk\tCS"]
    for (j, k), v in oracles.cs_table(args.max_sum).items():
        lines.append(f"{j}\t{k}\t{v.numerator}/{v.denominator}")
    _output(args, "\n".join(lines) + "\n")


def cmd_deck(args) -> None:
    out = [decks.deck_to_json(decks.deck(z, args.k)) for z in _read_input(args.input)]
    _output(args, "\n".join(out) + "\n")


def cmd_mixture_verify(args) -> None:
    if args.preset:
        specs = []
        for r0 in _int_list(args.preset):
            periods, b, _ = decks.loglog_schedule(args.ell, args.k, r0)
            specs.append(decks.solve_mixture(args.ell, args.k, periods, b))
        shared_b = {s.b for s in specs}
        if len(shared_b) != 1:
            # preset moments depend only on r_1..r_{k-1}; differing b means differing tails
            raise ValueError("preset runs produced different moment vectors")
    else:
        if not args.periods or args.b is None:
            raise ValueError("give --periods (one or more sets) and --b, or --preset")
        b = _frac_list(args.b)
        specs = [decks.solve_mixture(args.ell, args.k, _int_list(p), b) for p in args.periods]
    lines = []
    for s in specs:
        ps = ",".join(f"{p.numerator}/{p.denominator}" for p in s.p)
        lines.append(f"periods={','.join(map(str, s.periods))} p={ps} distribution={s.is_distribution}")
    verdict = decks.verify_deck_equality(specs)
    lines.append(f"{'EQUAL' if verdict.ok else 'DIFFERENT'}: {verdict.detail}")
    _output(args, "\n".join(lines) + "\n")
    if not verdict.ok:
        raise VerificationFailed(verdict.detail)


def cmd_cover_eval(args) -> None:
    strings = _read_input(args.input)
    fn = lcs.cover_quality if args.measure == "cover" else lcs.avg_lcs
    res = fn(strings, args.n, args.mode, restarts=args.restarts, seed=args.seed)
    value = res.value
    if isinstance(value, Fraction):
        value = f"{value.numerator}/{value.denominator}"
    if args.format == "json":
        text = json.dumps({"measure": args.measure, "n": args.n, "mode": res.mode,
                           "value": str(value), "witness": str(res.witness)}) + "\n"
    else:
        text = f"measure,n,mode,value,witness\n{args.measure},{args.n},{res.mode},{value},{res.witness}\n"
    _output(args, text)


def cmd_bounds(args) -> None:
    rows = ["delta,series_bound,worst_case_poly,weak_tau"]
    for d in [float(t) for t in args.deltas.split(",")]:
        weak = oracles.weak_upper_bound_coefficient(d) if 0 < d < 0.5 else math.nan
        rows.append(
            f"{d!r},{oracles.series_bound(d, args.max_sum)!r},{oracles.worst_case_polynomial(d)!r},{weak!r}"
        )
    rows.append(f"# c2_upper_bound,{oracles.c2_upper_bound()!r}")
    _output(args, "\n".join(rows) + "\n")


def cmd_suite(args) -> None:
    members = worst_case_suite(args.n, args.seed, labels=True)
    if args.labels:
        _output(args, "".join(f"{label}\t{s}\n" for label, s in members))
    else:
        _output(args, write_strings([s for _, s in members]))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="master seed (default 0)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="tracerecon", description=__doc__.splitlines()[0],
                                parents=[common])
    p.set_defaults(seed=0, out=None, format="csv", threads=1)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_, parents=[common])
        sp.set_defaults(func=fn)
        return sp

    def add_algo_params(sp):
        sp.add_argument("--block-width", type=int, default=2000)
        sp.add_argument("--gamma-ratio", default="1/720000")

    sp = add("generate", cmd_generate, "write source strings")
    sp.add_argument("--kind", required=True,
                    choices=("random", "zeros", "ones", "alternating", "bukh-cox", "periodic", "bukh-ma"))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--r", type=int, default=1)
    sp.add_argument("--inv-eps4", type=int, default=4)
    sp.add_argument("--ell", type=int)

    sp = add("del", cmd_del, "pass strings through the deletion channel")
    sp.add_argument("--input", required=True, help="strings file, '-' for stdin")
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--count", type=int, default=1, help="traces per string")
    sp.add_argument("--method", choices=("direct", "geometric"), default="direct")

    sp = add("recon", cmd_recon, "reconstruct hypotheses from traces")
    sp.add_argument("--algo", required=True, choices=sorted(RECONSTRUCTORS))
    sp.add_argument("--input", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--delta", type=float, required=True)
    add_algo_params(sp)

    sp = add("experiment", cmd_experiment, "Monte Carlo estimate of mean |LCS|")
    sp.add_argument("--config", help="JSON config file (overrides flags)")
    sp.add_argument("--algo", choices=sorted(RECONSTRUCTORS))
    sp.add_argument("--n", type=int)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--rho", type=float)
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--source", choices=("average", "suite", "file"), default="average")
    sp.add_argument("--strings", help="strings file for --source file")
    sp.add_argument("--per-member", action="store_true")
    add_algo_params(sp)

    sp = add("cs-table", cmd_cs_table, "exact CS(j,k) table as TSV")
    sp.add_argument("--max-sum", type=int, default=6)

    sp = add("deck", cmd_deck, "exact k-deck of each input string as JSON")
    sp.add_argument("--input", required=True)
    sp.add_argument("--k", type=int, required=True)

    sp = add("mixture-verify", cmd_mixture_verify, "solve mixtures and compare their decks")
    sp.add_argument("--ell", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--periods", action="append", help="comma-separated periods; repeat per mixture")
    sp.add_argument("--b", help="comma-separated moments, rationals allowed")
    sp.add_argument("--preset", help="comma-separated r0 values for the schedule preset")

    sp = add("cover-eval", cmd_cover_eval, "cover quality or AvgLCS of a string set")
    sp.add_argument("--input", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--mode", choices=("exact", "search"), default="exact")
    sp.add_argument("--measure", choices=("cover", "avg"), default="cover")
    sp.add_argument("--restarts", type=int, default=32)

    sp = add("bounds", cmd_bounds, "series, worst-case and weak bound curves as CSV")
    sp.add_argument("--deltas", default="0.01,0.05,0.1,0.2,0.3")
    sp.add_argument("--max-sum", type=int, default=6)

    sp = add("suite", cmd_suite, "write the worst-case source suite")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--labels", action="store_true")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"tracerecon: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"tracerecon: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
