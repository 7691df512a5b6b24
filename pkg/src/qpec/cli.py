"""Command-line entry point: ``qpec <subcommand> ...``.

Every CSV starts with a schema line and a config line echoing the resolved
arguments (including the seed), then a header row. No timestamps are
written, so identical arguments give byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .channel import QpecParams, bits, capacity, conditional_entropy
from .errors import NumericalFailure, ValidationError
from .gf import make_field
from .ldpc import DegreeDistribution, design_rate, load_dd, load_rho, save_dd

SCHEMA_VERSION = 1
EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3

log = logging.getLogger("qpec")


# -- parsing helpers --

def _float_list(text: str) -> list[float]:
    """``0.5,0.6`` or ``start:stop:step`` (stop included)."""
    try:
        if ":" in text:
            start, stop, step = (float(v) for v in text.split(":"))
            if step <= 0:
                raise ValueError
            count = int(np.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + k * step, 12) for k in range(count)]
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None


def _regular(text: str) -> tuple[int, int]:
    vals = _int_list(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError("--regular takes dv,dc")
    return vals[0], vals[1]


def _dd_from(args) -> DegreeDistribution:
    if getattr(args, "dd", None):
        return load_dd(args.dd)
    dv, dc = args.regular
    return DegreeDistribution.regular(dv, dc)


def _add_dd(p):
    p.add_argument("--dd", help="degree-distribution JSON file")
    p.add_argument("--regular", type=_regular, default=(3, 6), help="dv,dc when --dd is absent (default 3,6)")


def _add_channel(p, eps=True):
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    if eps:
        p.add_argument("--eps", type=float, required=True)


# -- emitters --

def _config(args) -> dict:
    # execution-only knobs do not change results, so they stay out of the echo
    skip = {"func", "workers", "verbose", "out", "log"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _write_csv(args, name: str, columns: list[str], rows) -> None:
    buf = io.StringIO()
    buf.write(f"# schema: qpec-{name}/{SCHEMA_VERSION}\n")
    buf.write("# config: " + json.dumps(_config(args), sort_keys=True, default=str) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_fmt(v) for v in r])
    _emit(args, buf.getvalue())


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def _emit(args, text: str) -> None:
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands --

def cmd_capacity(args) -> int:
    params = QpecParams(make_field(args.q), args.M, args.eps)
    c, h = capacity(params), conditional_entropy(params)
    unit = "bits" if args.per_bit else "q-ary symbols"
    if args.per_bit:
        c, h = bits(c, args.q), bits(h, args.q)
    print(f"C = {c:.6f}  ({unit} per channel use)")
    print(f"H(Y|X) = {h:.6f}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    from .simulation import simulate

    dd = _dd_from(args)
    rows = []
    for n in args.n:
        for eps in args.eps:
            r = simulate(dd, args.q, args.M, eps, n, args.trials, args.max_iters, args.seed,
                         args.batch_size, args.workers)
            rows.append((eps, n, r.trials, r.symbol_failure_rate, r.word_failure_rate, r.mean_iters))
    rows.sort()
    _write_csv(args, "simulate", ["eps", "n", "trials", "symbol_failure_rate", "word_failure_rate",
                                  "mean_iters"], rows)
    return EXIT_OK


def cmd_threshold(args) -> int:
    from .density_evolution.threshold import threshold

    dd = _dd_from(args)
    res = threshold(dd, args.q, args.M, args.model, args.tol, args.max_l)
    print(f"threshold = {res.value:.6f}  (bracket [{res.lo:.6f}, {res.hi:.6f}], model {args.model})")
    return EXIT_OK


def cmd_de_trace(args) -> int:
    dd = _dd_from(args)
    params = QpecParams(make_field(args.q), args.M, args.eps)
    if args.model == "exact-de":
        from .density_evolution.exact import exact_de_run

        trace = exact_de_run(dd, params, args.max_l)
        Z = trace.cardinality_marginals("z")
    else:
        from .density_evolution.cardinality import cardinality_de_run

        trace = cardinality_de_run(dd, params, args.model, args.max_l)
        Z = np.array(trace.Z)
    rows = [(l, *map(float, Z[l]), float(trace.p_e[l])) for l in range(len(trace.p_e))]
    _write_csv(args, "de-trace", ["l"] + [f"Z_{m}" for m in range(1, args.q + 1)] + ["p_e"], rows)
    return EXIT_OK


def cmd_pm_table(args) -> int:
    from .density_evolution.combinatorics import sumset_bounds
    from .density_evolution.pm_models import p_m, p_m_exact

    make_field(args.q)
    if args.model == "exact" and args.rational:
        probs = [str(v) for v in p_m_exact(args.cards, args.q)]
    else:
        probs = [float(v) for v in p_m(args.model, args.cards, args.q)]
    lo, hi, qcond = sumset_bounds(args.cards, args.q)
    log.info("B_L=%d B_U=%d q-condition=%s", lo, hi, qcond)
    _write_csv(args, "pm-table", ["m", "P_m"], [(m, v) for m, v in enumerate(probs, start=1)])
    return EXIT_OK


def cmd_qm_table(args) -> int:
    from .density_evolution.combinatorics import q_m

    make_field(args.q)
    vals = q_m(args.cards, args.M, args.q, exact=args.rational)
    vals = [str(v) if isinstance(v, Fraction) else float(v) for v in vals]
    _write_csv(args, "qm-table", ["m", "Q_m"], [(m, v) for m, v in enumerate(vals, start=1)])
    return EXIT_OK


def _write_log(path, lines) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("".join(line + "\n" for line in lines))


def cmd_design(args) -> int:
    if args.mode == "union":
        from .design.union_lp import union_lp_design

        if not args.lambda_file:
            raise ValidationError("--mode union needs --lambda (the initial degree distribution)")
        if args.eps is None:
            raise ValidationError("--mode union needs --eps (the design erasure probability)")
        dd = load_dd(args.lambda_file)
        if args.rho:
            dd = DegreeDistribution(dd.lambda_coeffs, load_rho(args.rho))
        res = union_lp_design(dd, args.q, args.M, args.eps, args.p_tar, args.delta, args.max_rounds,
                              args.dv, not args.free_rate)
        gaps = [None] + res.disagreements
        lines = [json.dumps({"round": k, "L": L, "rate": r, "prediction_gap": g})
                 for k, (L, r, g) in enumerate(zip(res.horizons, res.rates, gaps))]
        final = res.dd
        off = sum(g > 0.1 for g in res.disagreements)
        print(f"rounds = {res.rounds}  horizon {res.horizons[0]} -> {res.horizons[-1]}")
        if off:
            print(f"{off} round(s) where the linearised p_e was off by more than 10% from DE")
    else:
        from .design.threshold_lp import design_iterate

        if args.target is None or not args.rho:
            raise ValidationError(f"--mode {args.mode} needs --target and --rho")
        res = design_iterate(args.target, load_rho(args.rho), args.dv, args.q, args.M, args.model,
                             args.mode.replace("-", "_"))
        lines = res.log_lines()
        final = res.dd
        print(f"parameter = {res.parameter:.5f}  achieved threshold = {res.achieved:.5f}")
    _write_log(args.log, lines)
    if args.out:
        save_dd(final, args.out)
    print(final)
    print(f"rate = {design_rate(final):.5f}")
    return EXIT_OK


# -- reproduce recipes --

def _recipe_thr429(args) -> list[str]:
    from .density_evolution.threshold import threshold

    res = threshold(DegreeDistribution.regular(3, 6), 8, 8, "union", 1e-4)
    return [f"{res.value:.3f}", f"(3,6) ensemble, q=M=8: threshold {res.value:.5f} (expected 0.429 +/- 0.001)"]


def _recipe_fig5_q4(args) -> None:
    from .density_evolution.threshold import threshold

    dd = DegreeDistribution.regular(3, 6)
    models = ["min", "max", "balls", "union", "exact", "exact-de"]
    rows = []
    for M in range(2, 5):
        rows.append((4, M, *(threshold(dd, 4, M, m, 1e-4).value for m in models)))
    _write_csv(args, "fig5-q4", ["q", "M"] + [f"thr_{m.replace('-', '_')}" for m in models], rows)


def _recipe_table1(args) -> None:
    from .design.threshold_lp import design_iterate

    rows = []
    for q, M in ((3, 2), (4, 3), (8, 5)):
        for mode in ("qpec_star", "bec"):
            res = design_iterate(0.6, {6: 1.0}, 5, q, M, "union", mode)
            lam = json.dumps({str(i): round(v, 4) for i, v in sorted(res.dd.lambda_coeffs.items())})
            rows.append((q, M, mode, res.parameter, res.achieved, res.rate, lam))
    _write_csv(args, "table1", ["q", "M", "mode", "parameter", "achieved_threshold", "rate", "lambda"], rows)


def cmd_reproduce(args) -> int:
    if args.recipe == "thr-429":
        lines = _recipe_thr429(args)
        print(lines[0])
        log.info(lines[1])
    elif args.recipe == "fig5-q4":
        _recipe_fig5_q4(args)
    else:
        _recipe_table1(args)
    return EXIT_OK


# -- parser --

DE_MODELS = ["exact", "min", "max", "balls", "union", "lower_bound", "upper_bound"]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qpec", description="q-ary partial erasure channel toolkit")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capacity", help="channel capacity and H(Y|X)")
    _add_channel(p)
    p.add_argument("--per-bit", action="store_true", help="report in bits instead of q-ary units")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("simulate", help="Monte Carlo decoding of random codes")
    _add_dd(p)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--eps", type=_float_list, required=True, help="list a,b,c or range start:stop:step")
    p.add_argument("--n", type=_int_list, required=True, help="code length(s)")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--max-iters", type=int, default=80)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--batch-size", type=int, default=500)
    p.add_argument("--workers", type=int, default=None, help="process count (default: QPEC_THREADS or CPUs)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("threshold", help="DE threshold by bisection")
    _add_dd(p)
    _add_channel(p, eps=False)
    p.add_argument("--model", choices=DE_MODELS + ["exact-de"], default="union")
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--max-l", type=int, default=2000)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("de-trace", help="per-iteration DE cardinality distributions")
    _add_dd(p)
    _add_channel(p)
    p.add_argument("--model", choices=DE_MODELS + ["exact-de"], default="union")
    p.add_argument("--max-l", type=int, default=200)
    p.add_argument("--out")
    p.set_defaults(func=cmd_de_trace)

    p = sub.add_parser("pm-table", help="sumset cardinality distribution P_m")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--M", type=int, help="accepted for symmetry with other commands; unused")
    p.add_argument("--cards", type=_int_list, required=True)
    p.add_argument("--model", choices=DE_MODELS, default="union")
    p.add_argument("--rational", action="store_true", help="exact fractions (model exact only)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_pm_table)

    p = sub.add_parser("qm-table", help="intersection cardinality distribution Q_m")
    _add_channel(p, eps=False)
    p.add_argument("--cards", type=_int_list, required=True)
    p.add_argument("--rational", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_qm_table)

    p = sub.add_parser("design", help="LP degree-distribution design")
    p.add_argument("--mode", choices=["qpec-star", "bec", "union"], required=True)
    p.add_argument("--rho", help="JSON file with a 'rho' key")
    p.add_argument("--lambda", dest="lambda_file", help="initial degree distribution (union mode)")
    p.add_argument("--dv", type=int, default=5)
    _add_channel(p, eps=False)
    p.add_argument("--target", type=float, help="target threshold (qpec-star, bec)")
    p.add_argument("--model", choices=DE_MODELS, default="union")
    p.add_argument("--eps", type=float, help="design erasure probability (union)")
    p.add_argument("--p-tar", type=float, default=1e-6)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--max-rounds", type=int, default=50)
    p.add_argument("--free-rate", action="store_true", help="drop the rate-preserving constraint (union)")
    p.add_argument("--out", help="write the designed distribution as JSON")
    p.add_argument("--log", help="write the run log as JSON lines")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("reproduce", help="named reproduction recipes")
    p.add_argument("recipe", choices=["fig5-q4", "table1", "thr-429"])
    p.add_argument("--out")
    p.set_defaults(func=cmd_reproduce)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"qpec: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (OSError, json.JSONDecodeError) as exc:
        print(f"qpec: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalFailure as exc:
        print(f"qpec: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
