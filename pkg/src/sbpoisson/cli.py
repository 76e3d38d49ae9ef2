"""Command-line interface for reproducible bound-vs-empirical experiments.

Subcommands surface the engines as tables: ``pattern-info``, ``bound-graph``,
``simulate``, ``rate-sweep``, ``bound-urn``, ``verify-coupling``.  Output is
CSV (primary) or JSON (full diagnostics); identical configurations and seeds
produce byte-identical output.  Exit codes: 2 usage, 3 resource cap,
4 invariant breach.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .errors import InvariantError, ParameterError, ResourceError
from . import ermoments, ersim, hypergeom
from .patterns import (
    automorphism_count,
    density_and_balance,
    gamma_eta,
    parse_pattern_list,
    shared_edge_stats,
)
from .sizebias import independent_bernoulli_model, verify_size_biased_exact

EXIT_USAGE = 2
EXIT_RESOURCE = 3
EXIT_INVARIANT = 4


def _emit(rows, fieldnames, args, footer_rows=()):
    """Write rows as CSV or JSON to --out or stdout."""
    if args.format == "json":
        text = json.dumps({"rows": rows, "footer": list(footer_rows)}, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
        for line in footer_rows:
            buf.write(f"# {line}\n")
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def cmd_pattern_info(args) -> None:
    patterns = parse_pattern_list(args.patterns)
    rows = []
    for idx, H in enumerate(patterns):
        density, balanced, _ = density_and_balance(H)
        ge = gamma_eta(H, args.alpha if args.alpha else H.density)
        rows.append(
            {
                "pattern": idx,
                "v": H.v,
                "e": H.e,
                "automorphisms": automorphism_count(H),
                "density": _fmt(density),
                "strictly_balanced": balanced,
                "gamma_subgraph": _fmt(ge.gamma_subgraph),
            }
        )
    footers = []
    for i in range(len(patterns)):
        for j in range(i + 1):
            stats = shared_edge_stats(patterns[i], patterns[j])
            ell = ",".join(f"{k}:{stats.ell[k]}" for k in sorted(stats.K))
            footers.append(f"pair ({i},{j}): M={stats.M} ell[{ell}] K={sorted(stats.K)}")
    _emit(rows, list(rows[0].keys()), args, footers)


def _graph_spec_rows(args):
    patterns = parse_pattern_list(args.patterns)
    if args.n_list:
        ns = [int(x) for x in args.n_list.split(",")]
    elif args.n:
        ns = [args.n]
    else:
        raise ParameterError("one of --n or --n-list is required")
    specs = []
    for n in ns:
        if args.p is not None:
            if args.c is not None or args.alpha is not None:
                raise ParameterError("give either --p or the pair --c/--alpha, not both")
            p = args.p
        elif args.c is not None and args.alpha is not None:
            p = ermoments.scaling_probability(args.c, args.alpha, n)
        else:
            raise ParameterError("give either --p or the pair --c/--alpha")
        specs.append(ermoments.GraphEnsembleSpec(n, p, patterns))
    return specs


def cmd_bound_graph(args) -> None:
    rows = []
    for spec in _graph_spec_rows(args):
        mom = ermoments.moments(spec)
        t4 = ermoments.bound_t4(spec, mom)
        row = {"n": spec.n, "p": _fmt(spec.p), "mode": "exact"}
        for i in range(spec.d):
            row[f"lambda_{i}"] = _fmt(mom.lam[i])
            row[f"var_{i}"] = _fmt(mom.var[i])
        for i in range(1, spec.d):
            for j in range(i):
                row[f"cov_{i}{j}"] = _fmt(mom.cov[i, j])
        row["bound_t4"] = _fmt(t4.total)
        row["bracket_t5"] = _fmt(ermoments.corollary_t5_bracket(spec))
        rows.append(row)
    _emit(rows, list(rows[0].keys()), args)


def cmd_simulate(args) -> None:
    rows = []
    for spec in _graph_spec_rows(args):
        dist = ersim.mc_empirical_distance(spec, args.trials, args.seed, args.eps_trunc)
        report = ersim.mc_coupling_terms(spec, args.trials, args.seed)
        row = {
            "n": spec.n,
            "p": _fmt(spec.p),
            "mode": "mc",
            "trials": args.trials,
            "dw_empirical": _fmt(dist.dw),
            "dw_3se": _fmt(3.0 * dist.dw_se),
            "dtv_empirical": _fmt(dist.dtv),
            "dtv_3se": _fmt(3.0 * dist.dtv_se),
            "budget": _fmt(dist.truncation_budget),
            "bound_t1_mc": _fmt(report.total),
            "bound_t4": _fmt(ermoments.bound_t4(spec).total),
        }
        for i in range(spec.d):
            row[f"diag_{i}"] = _fmt(report.diag_terms[i])
            row[f"diag_{i}_3se"] = _fmt(3.0 * report.diag_stderr[i])
        rows.append(row)
    _emit(rows, list(rows[0].keys()), args)


def cmd_rate_sweep(args) -> None:
    patterns = parse_pattern_list(args.patterns)
    if not args.n_list:
        raise ParameterError("--n-list is required")
    if args.c is None or args.alpha is None:
        raise ParameterError("--c and --alpha are required")
    ns = [int(x) for x in args.n_list.split(",")]
    result = ersim.rate_sweep(
        patterns, args.c, args.alpha, ns, args.trials, args.seed, args.eps_trunc
    )
    rows = [
        {
            "n": r.n,
            "p": _fmt(r.p),
            "mode": "mc",
            "trials": r.trials,
            "dw_empirical": _fmt(r.dw),
            "dw_3se": _fmt(3.0 * r.dw_se),
            "budget": _fmt(r.truncation_budget),
            "bracket_t5": _fmt(r.bracket),
            "bound_t4": _fmt(r.bound_t4),
        }
        for r in result.rows
    ]
    footer = [f"slope={_fmt(result.slope)} slope_se={_fmt(result.slope_se)}"]
    _emit(rows, list(rows[0].keys()), args, footer)


def _parse_urn(args) -> hypergeom.UrnSpec:
    if not args.colors:
        raise ParameterError("--colors is required")
    colors = tuple(int(x) for x in args.colors.split(","))
    n_total = args.N if args.N else sum(colors)
    return hypergeom.UrnSpec(n_total, colors, args.m)


def cmd_bound_urn(args) -> None:
    urn = _parse_urn(args)
    bound = hypergeom.theorem_bound_urn(urn)
    mom = hypergeom.moments(urn)
    row = {
        "N": urn.N,
        "m": urn.m,
        "d": urn.d,
        "mode": "exact",
        "bound": _fmt(bound.total),
        "cross_statement": _fmt(bound.cross_statement),
        "cross_proof": _fmt(bound.cross_proof),
        "vacuous": bound.vacuous,
    }
    for i in range(urn.d):
        row[f"lambda_{i}"] = _fmt(mom.lam[i])
    footer = []
    if args.eps_trunc and urn.N <= 40:
        dist = hypergeom.exact_dw_urn(urn, args.eps_trunc)
        row["dw_exact"] = _fmt(dist.dw)
        row["budget"] = _fmt(dist.truncation_budget)
    _emit([row], list(row.keys()), args, footer)


def cmd_verify_coupling(args) -> None:
    if args.model == "urn":
        urn = _parse_urn(args)
        violation = max(hypergeom.exhaustive_h2_urn(urn, i) for i in range(urn.d))
        label = f"urn N={urn.N} m={urn.m}"
    elif args.model == "graph":
        patterns = parse_pattern_list(args.patterns)
        if args.n is None or args.p is None:
            raise ParameterError("--n and --p are required for graph verification")
        violation = max(
            ersim.exhaustive_h2_graph(args.n, patterns, i, args.p)
            for i in range(len(patterns))
        )
        label = f"graph n={args.n} p={args.p}"
    elif args.model == "binomial":
        if args.n is None or args.p is None:
            raise ParameterError("--n and --p are required for binomial verification")
        model = independent_bernoulli_model([[args.p] * args.n])
        violation = verify_size_biased_exact(model)
        label = f"binomial n={args.n} p={args.p}"
    else:
        raise ParameterError(f"unknown model {args.model!r}")
    text = f"{label}: max (h2) violation: {_fmt(violation)}\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if violation > 1e-12:
        raise InvariantError(f"size-biasing identity violated by {violation}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sbpoisson",
        description="Multivariate Poisson approximation bounds from size-biased couplings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser):
        p.add_argument("--config", help="JSON file whose keys pre-fill the flags")
        p.add_argument("--patterns", help="comma-separated pattern specs")
        p.add_argument("--n", type=int)
        p.add_argument("--n-list", dest="n_list")
        p.add_argument("--p", type=float)
        p.add_argument("--c", type=float)
        p.add_argument("--alpha", type=float)
        p.add_argument("--trials", type=int, default=10_000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--eps-trunc", dest="eps_trunc", type=float, default=1e-9)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out")
        p.add_argument("--N", type=int)
        p.add_argument("--m", type=int)
        p.add_argument("--colors")
        return p

    common(sub.add_parser("pattern-info")).set_defaults(func=cmd_pattern_info)
    common(sub.add_parser("bound-graph")).set_defaults(func=cmd_bound_graph)
    common(sub.add_parser("simulate")).set_defaults(func=cmd_simulate)
    common(sub.add_parser("rate-sweep")).set_defaults(func=cmd_rate_sweep)
    common(sub.add_parser("bound-urn")).set_defaults(func=cmd_bound_urn)
    verify = common(sub.add_parser("verify-coupling"))
    verify.add_argument("--model", choices=("urn", "graph", "binomial"), default="graph")
    verify.set_defaults(func=cmd_verify_coupling)
    return parser


def _apply_config(args) -> None:
    if not getattr(args, "config", None):
        return
    with open(args.config) as fh:
        config = json.load(fh)
    for key, value in config.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise ParameterError(f"unknown config key {key!r}")
        if getattr(args, attr) in (None, parserless_default(attr)):
            setattr(args, attr, value)


def parserless_default(attr: str):
    # Flags the user did not pass keep argparse defaults; config overrides those.
    return {"trials": 10_000, "seed": 0, "eps_trunc": 1e-9, "format": "csv"}.get(attr)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except InvariantError as exc:
        print(f"invariant breach: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    return 0


if __name__ == "__main__":
    sys.exit(main())
