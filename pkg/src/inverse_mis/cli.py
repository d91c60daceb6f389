"""Command-line entry point: ``inverse-mis <subcommand> ...``.

Exit codes: 0 success, 1 validation failure, 2 usage error (argparse),
3 a solve ran out of budget before proving optimality.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import graph as graphmod
from .cycle_census import census, census_to_csv, walk_census
from .numtheory import NotPrimeError, is_prime, require_prime
from .refutation import (
    Certificate,
    CertificateError,
    a_of,
    ncc_lower_bound,
    search_certificate,
    verify_certificate,
)
from .solver import LoopPolicy, solve_exact, solve_naive, verify_independent
from .spectral import CapacityError, spectral_report

log = logging.getLogger("inverse_mis")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NOT_PROVEN = 3

SOLVE_SCHEMA = "solve-v1"
SPECTRAL_SCHEMA = "spectral-v1"
SWEEP_SCHEMA = "sweep-v1"


class ValidationError(Exception):
    pass


def fmt(v) -> str:
    """Fixed 12-significant-digit rendering for floats."""
    if isinstance(v, Fraction):
        v = float(v)
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, bool):
        return "true" if v else "false"
    return "" if v is None else str(v)


def parse_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None


def primes_of(args) -> list[int]:
    """Primes selected by --p / positional p / --range; composites in a range
    are skipped with a warning, an explicit composite p is an error."""
    ps = []
    single = getattr(args, "p", None)
    if single is not None:
        require_prime(single)
        ps.append(single)
    rng = getattr(args, "range", None)
    if rng is not None:
        lo, hi = rng
        for n in range(max(lo, 3), hi + 1):
            if is_prime(n):
                ps.append(n)
            else:
                log.warning("skipping composite %d", n)
    return ps


def emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def write_csv(schema: str, header: list[str], rows) -> str:
    buf = io.StringIO()
    buf.write(f"#schema={schema}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def load_graph(path: str) -> graphmod.Graph:
    text = Path(path).read_text(encoding="utf-8")
    if path.endswith(".json"):
        return graphmod.from_json(text)
    return graphmod.from_dimacs(text)


def graph_of(args) -> graphmod.Graph:
    if getattr(args, "graph", None):
        return load_graph(args.graph)
    if args.p is None:
        raise ValidationError("give a graph file or --p")
    return graphmod.build_inverse_graph(args.p)


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(args) -> int:
    g = graphmod.build_inverse_graph(args.p)
    if args.format == "json":
        emit(args, graphmod.to_json(g) + "\n")
    else:
        emit(args, graphmod.to_dimacs(g, comment=f"inverse graph p={args.p}"))
    return EXIT_OK


def cmd_census(args) -> int:
    rows = []
    for p in primes_of(args):
        part = census(p, args.max_len)
        if args.cross_check:
            if p > 101:
                raise ValidationError(f"--cross-check is limited to p <= 101, got {p}")
            brute = walk_census(p, args.max_len)
            for r in part:
                if tuple(sorted(r.starts)) != brute[r.sequence]:
                    raise ValidationError(
                        f"p={p} {r.sequence}: census {r.starts} != walk {brute[r.sequence]}"
                    )
        rows.extend(part)
    if args.format == "json":
        doc = [
            {
                "p": r.p,
                "sequence": str(r.sequence),
                "congruence": r.congruence(),
                "classification": r.classification.kind.value,
                "solutions": list(r.solutions),
                "starts": list(r.starts),
            }
            for r in rows
        ]
        emit(args, json.dumps(doc, ensure_ascii=False) + "\n")
    else:
        emit(args, census_to_csv(rows))
    return EXIT_OK


def cmd_refute(args) -> int:
    if args.bound_formula:
        p, kp = args.bound_formula
        value = ncc_lower_bound(p, kp)
        doc = {"p": p, "kp": kp, "a": a_of(kp), "ncc_lower_bound": str(value),
               "value": fmt(float(value)), "ratio": fmt(float(value / p))}
        emit(args, json.dumps(doc, sort_keys=True) + "\n")
        return EXIT_OK
    g = graph_of(args)
    if args.search:
        res = search_certificate(g, m_max=args.m_max, len_max=args.max_len, budget_secs=args.budget_secs)
        cert, bound = res.certificate, res.bound
        extra = {"exhaustive": res.exhaustive, "notes": res.notes, "certificate": json.loads(cert.to_json())}
    else:
        if not args.cert:
            raise ValidationError("give a certificate file or --search")
        cert = Certificate.from_json(Path(args.cert).read_text(encoding="utf-8"))
        bound = verify_certificate(g, cert)
        extra = {}
    doc = {
        "valid": True,
        "n": g.n,
        "m": cert.m,
        "numerator": bound.numerator,
        "denominator": bound.denominator,
        "ratio": str(bound.ratio),
        "bound": bound.bound,
        **extra,
    }
    emit(args, json.dumps(doc, sort_keys=True) + "\n")
    return EXIT_OK


def _solve_one(g, args):
    policy = LoopPolicy(args.loop_policy)
    res = solve_exact(g, policy, budget_secs=args.budget_secs)
    if not verify_independent(g, res.witness, policy):
        raise ValidationError("solver returned a non-independent witness")
    if args.naive:
        ref = solve_naive(g, policy)
        if ref.n_star != res.n_star:
            raise ValidationError(f"naive oracle gives {ref.n_star}, exact solver {res.n_star}")
    if args.timing:
        log.warning("n=%d solved in %.3fs", g.n, res.wall_time)
    return res


def cmd_solve(args) -> int:
    proven = True
    if args.range is not None:
        rows = []
        for p in primes_of(args):
            res = _solve_one(graphmod.build_inverse_graph(p), args)
            proven &= res.proven
            rows.append([p, p, res.n_star, res.ratio(p), res.proven, res.nodes_explored])
        emit(args, write_csv(SOLVE_SCHEMA, ["p", "N", "n_star", "ratio", "proven", "nodes"], rows))
    else:
        g = graph_of(args)
        res = _solve_one(g, args)
        proven = res.proven
        doc = {
            "n": g.n,
            "n_star": res.n_star,
            "ratio": fmt(res.ratio(g.n)),
            "proven": res.proven,
            "nodes": res.nodes_explored,
            "policy": res.policy.value,
        }
        if args.witness:
            doc["witness"] = sorted(res.witness)
        emit(args, json.dumps(doc, sort_keys=True) + "\n")
    return EXIT_OK if proven else EXIT_NOT_PROVEN


SPECTRAL_HEADER = ["p", "N", "d", "lambda_1", "lambda_2", "lambda_N", "lambda", "hoffman", "regular", "max_residual"]


def cmd_spectral(args) -> int:
    reports = [spectral_report(p) for p in primes_of(args)]
    for r in reports:
        if not r.lam < 1 - 1e-4:
            log.warning("p=%d: lambda=%s is not below 1 - 1e-4", r.p, fmt(r.lam))
    if args.format == "json":
        emit(args, "".join(r.to_json() + "\n" for r in reports))
    else:
        rows = [
            [r.p, r.n, r.d, r.lambda_1, r.lambda_2, r.lambda_n, r.lam, r.hoffman, r.regular, r.max_residual]
            for r in reports
        ]
        emit(args, write_csv(SPECTRAL_SCHEMA, SPECTRAL_HEADER, rows))
    return EXIT_OK


SWEEP_HEADER = [
    "p", "N", "n_star", "proven", "ratio", "hoffman", "lambda_N", "lambda",
    "census_cycles", "cycles_by_length", "kp", "ncc_lower_bound", "ncc_ratio", "gap",
]


def sweep_row(p: int, max_len: int, kp: int, policy: str, budget_secs) -> list:
    g = graphmod.build_inverse_graph(p)
    res = solve_exact(g, LoopPolicy(policy), budget_secs=budget_secs)
    rep = spectral_report(p)
    by_len: dict[int, int] = {}
    for row in census(p, max_len):
        by_len[row.sequence.length] = by_len.get(row.sequence.length, 0) + row.count
    ratio = Fraction(res.n_star, p)
    if p > a_of(kp):
        ncc = ncc_lower_bound(p, kp)
        ncc_ratio = ncc / p
        gap = ncc_ratio - ratio
    else:
        ncc = ncc_ratio = gap = None
    return [
        p, p, res.n_star, res.proven, ratio, rep.hoffman, rep.lambda_n, rep.lam,
        sum(by_len.values()), ";".join(f"{k}:{v}" for k, v in sorted(by_len.items())),
        kp, ncc, ncc_ratio, gap,
    ]


def cmd_sweep(args) -> int:
    ps = primes_of(args)
    jobs = [(p, args.max_len, args.kp, args.loop_policy, args.budget_secs) for p in ps]
    if args.threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            rows = list(pool.map(sweep_row, *zip(*jobs)))
    else:
        rows = [sweep_row(*job) for job in jobs]
    emit(args, write_csv(SWEEP_SCHEMA, SWEEP_HEADER, rows))
    return EXIT_OK if all(r[3] for r in rows) else EXIT_NOT_PROVEN


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="inverse-mis", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, formats=None, default_format=None):
        sp.add_argument("--out", help="write to this file instead of stdout")
        sp.add_argument("--threads", type=int, default=1)
        if formats:
            sp.add_argument("--format", choices=formats, default=default_format)

    def prime_args(sp, allow_range=True):
        sp.add_argument("p_pos", nargs="?", type=int, metavar="P")
        sp.add_argument("--p", type=int)
        if allow_range:
            sp.add_argument("--range", type=parse_range, metavar="A..B")

    sp = sub.add_parser("gen", help="emit the inverse graph for a prime")
    prime_args(sp, allow_range=False)
    common(sp, ["dimacs", "json"], "dimacs")
    sp.set_defaults(func=cmd_gen, need_p=True)

    sp = sub.add_parser("census", help="tabulate short odd cycles by symbol sequence")
    prime_args(sp)
    sp.add_argument("max_len_pos", nargs="?", type=int, metavar="MAX_LEN")
    sp.add_argument("--max-len", type=int, default=9)
    sp.add_argument("--cross-check", action="store_true", help="compare against brute-force walks")
    common(sp, ["csv", "json"], "csv")
    sp.set_defaults(func=cmd_census)

    sp = sub.add_parser("refute", help="verify or search a cycle-chain certificate")
    sp.add_argument("graph", nargs="?", help="DIMACS (or .json) graph file")
    sp.add_argument("cert", nargs="?", help="certificate JSON file")
    sp.add_argument("--p", type=int, help="use the inverse graph instead of a file")
    sp.add_argument("--search", action="store_true")
    sp.add_argument("--m-max", type=int, default=2)
    sp.add_argument("--max-len", type=int, default=9)
    sp.add_argument("--budget-secs", type=float)
    sp.add_argument("--bound-formula", nargs=2, type=int, metavar=("P", "KP"))
    common(sp)
    sp.set_defaults(func=cmd_refute)

    sp = sub.add_parser("solve", help="exact maximum independent set")
    sp.add_argument("graph", nargs="?", help="DIMACS (or .json) graph file")
    sp.add_argument("--p", type=int)
    sp.add_argument("--range", type=parse_range, metavar="A..B")
    sp.add_argument("--loop-policy", choices=[p.value for p in LoopPolicy], default="exclude")
    sp.add_argument("--budget-secs", type=float)
    sp.add_argument("--naive", action="store_true", help="cross-check with the exhaustive oracle")
    sp.add_argument("--witness", action="store_true")
    sp.add_argument("--timing", action="store_true", help="log wall time to stderr")
    common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("spectral", help="normalised adjacency extremes and Hoffman bound")
    prime_args(sp)
    common(sp, ["csv", "json"], "csv")
    sp.set_defaults(func=cmd_spectral)

    sp = sub.add_parser("sweep", help="combined per-prime table")
    prime_args(sp)
    sp.add_argument("--max-len", type=int, default=9)
    sp.add_argument("--kp", type=int, default=5)
    sp.add_argument("--loop-policy", choices=[p.value for p in LoopPolicy], default="exclude")
    sp.add_argument("--budget-secs", type=float)
    common(sp)
    sp.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    if getattr(args, "p_pos", None) is not None:
        if args.p is not None and args.p != args.p_pos:
            parser.error("conflicting values for p")
        args.p = args.p_pos
    if getattr(args, "max_len_pos", None) is not None:
        args.max_len = args.max_len_pos
    if getattr(args, "need_p", False) and args.p is None:
        parser.error("a prime p is required")
    if args.command in ("census", "spectral", "sweep") and args.p is None and args.range is None:
        parser.error("give P, --p or --range")
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        return args.func(args)
    except (NotPrimeError, ValidationError, CertificateError, CapacityError,
            graphmod.DimacsParseError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
