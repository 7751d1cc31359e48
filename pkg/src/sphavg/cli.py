"""Command line front end.

Subcommands: validate, admissible, goodsub, tailcheck, converge.
Exit codes: 0 ok, 1 invalid input data, 2 I/O or parse failure,
3 not admissible / nothing found, 4 property-suite or oracle failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import admissibility, operators, tailmaps
from .action import (
    FiniteAction,
    builtin_parity,
    builtin_zmod,
    load_action,
)
from .chain import MarkovSystem, builtin_surface, builtin_uniform, load_chain
from .freegroup import FormatError

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2
EXIT_NOT_ADMISSIBLE = 3
EXIT_SUITE_FAILED = 4


def _uint64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _rng(seed: int):
    # counter-based generator keyed on the one explicit seed
    return np.random.Generator(np.random.Philox(seed))


def _resolve_chain(source: str) -> MarkovSystem:
    if source.startswith("builtin:"):
        parts = source.split(":")
        if parts[1] == "uniform" and len(parts) == 3:
            try:
                r = int(parts[2])
            except ValueError:
                raise FormatError(f"bad rank in {source!r}") from None
            return builtin_uniform(r)
        if parts[1] == "surface" and len(parts) == 2:
            return builtin_surface()
        raise FormatError(f"unknown builtin chain {source!r}")
    return load_chain(source)


def _resolve_action(source: str, m: MarkovSystem) -> FiniteAction:
    if source.startswith("builtin:"):
        parts = source.split(":")
        if parts[1] == "parity" and len(parts) == 2:
            return builtin_parity(m.rank, m.generators)
        if parts[1] == "zmod" and len(parts) == 3:
            try:
                n = int(parts[2])
            except ValueError:
                raise FormatError(f"bad modulus in {source!r}") from None
            return builtin_zmod(n, m.rank, m.generators)
        raise FormatError(f"unknown builtin action {source!r}")
    a = load_action(source)
    if a.rank != m.rank:
        raise ValueError(
            f"action has {a.rank} generators, chain has rank {m.rank}"
        )
    if set(a.generator_names) == set(m.generators) and a.generator_names != m.generators:
        # align file order with the chain's generator order
        perm = [a.generator_names.index(g) for g in m.generators]
        a = FiniteAction(
            a.points,
            a.measure,
            m.generators,
            tuple(a.generator_maps[i] for i in perm),
        )
    elif set(a.generator_names) != set(m.generators):
        raise ValueError(
            f"action generators {a.generator_names} do not match chain "
            f"generators {m.generators}"
        )
    return a


def _resolve_f(source: str, a: FiniteAction) -> tuple[Fraction, ...]:
    if source.startswith("indicator:"):
        point = source.split(":", 1)[1]
        idx = a.point_index(point)
        return tuple(
            Fraction(1) if i == idx else Fraction(0)
            for i in range(len(a.points))
        )
    try:
        values = tuple(Fraction(part.strip()) for part in source.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad observable {source!r}: {exc}") from None
    if len(values) != len(a.points):
        raise ValueError(
            f"observable lists {len(values)} values for {len(a.points)} points"
        )
    return values


def _validated_chain(args) -> MarkovSystem | None:
    m = _resolve_chain(args.chain)
    problems = m.validate()
    if problems:
        for p in problems:
            print(f"chain: {p}", file=sys.stderr)
        return None
    return m


def cmd_validate(args) -> int:
    if args.chain is None and args.action is None:
        print("nothing to validate: pass --chain and/or --action", file=sys.stderr)
        return EXIT_INVALID
    ok = True
    m = None
    if args.chain is not None:
        m = _resolve_chain(args.chain)
        problems = m.validate()
        for p in problems:
            print(f"chain: {p}")
        ok &= not problems
        if not problems:
            print("chain: ok")
    if args.action is not None:
        if m is None:
            a = load_action(args.action) if not args.action.startswith(
                "builtin:"
            ) else _resolve_action(args.action, builtin_uniform(2))
        else:
            a = _resolve_action(args.action, m)
        problems = a.validate()
        for p in problems:
            print(f"action: {p}")
        ok &= not problems
        if not problems:
            print("action: ok")
    return EXIT_OK if ok else EXIT_INVALID


def cmd_admissible(args) -> int:
    m = _validated_chain(args)
    if m is None:
        return EXIT_INVALID
    report = admissibility.check_admissible(m, k_max=args.k_max)
    print(json.dumps(report.to_dict(m.generators), indent=2))
    if report.certificate is not None and args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report.certificate.to_dict(), fh, indent=2)
            fh.write("\n")
    return EXIT_OK if report.admissible else EXIT_NOT_ADMISSIBLE


def cmd_goodsub(args) -> int:
    m = _validated_chain(args)
    if m is None:
        return EXIT_INVALID
    orders = [args.k] if args.k else range(1, args.k_max + 1)
    for k in orders:
        cert = admissibility.find_good_subgraph(m, k)
        if cert is not None:
            print(json.dumps(cert.to_dict(), indent=2))
            if args.out:
                with open(args.out, "w", encoding="utf-8") as fh:
                    json.dump(cert.to_dict(), fh, indent=2)
                    fh.write("\n")
            return EXIT_OK
    print("no good subgraph found", file=sys.stderr)
    return EXIT_NOT_ADMISSIBLE


def _certificate_for(args, m: MarkovSystem):
    if getattr(args, "cert", None):
        with open(args.cert, "r", encoding="utf-8") as fh:
            cert = admissibility.GoodSubgraphCertificate.from_dict(json.load(fh))
        problems = admissibility.validate_certificate(m, cert)
        if problems:
            for p in problems:
                print(f"certificate: {p}", file=sys.stderr)
            return None
        return cert
    for k in range(1, args.k_max + 1):
        cert = admissibility.find_good_subgraph(m, k)
        if cert is not None:
            return cert
    return None


def cmd_tailcheck(args) -> int:
    m = _validated_chain(args)
    if m is None:
        return EXIT_INVALID
    if not admissibility.is_strongly_connected(m):
        print("chain is not strongly connected", file=sys.stderr)
        return EXIT_NOT_ADMISSIBLE
    cert = _certificate_for(args, m)
    if cert is None:
        if getattr(args, "cert", None):
            return EXIT_INVALID
        print(f"no good subgraph of order <= {args.k_max}", file=sys.stderr)
        return EXIT_NOT_ADMISSIBLE
    nu = m.stationary_distribution()
    rng = _rng(args.seed)
    passed = failed = resampled = 0
    failures = []
    for _ in range(args.trials):
        for _attempt in range(200):
            word = tailmaps.sample_word(m, cert, rng)
            n = tailmaps.eligible_occurrence(word, cert)
            if n is None:
                resampled += 1
                continue
            report = tailmaps.check_tail_maps(m, cert, word, n, nu)
            if not report.passed and report.failed_checks() == ["occurrence_stable"]:
                # outside the stable domain of the swap at this position
                resampled += 1
                continue
            break
        else:
            print("could not sample a checkable word", file=sys.stderr)
            return EXIT_SUITE_FAILED
        if report.passed:
            passed += 1
        else:
            failed += 1
            if len(failures) < 5:
                failures.append(report.to_dict())
    print(f"trials: {args.trials}  passed: {passed}  failed: {failed}  "
          f"resampled: {resampled}")
    if args.out:
        summary = {
            "trials": args.trials,
            "passed": passed,
            "failed": failed,
            "resampled": resampled,
            "certificate": cert.to_dict(),
            "ratio_bound": str(tailmaps.weight_ratio_bound(m, cert)),
            "failures": failures,
        }
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
    return EXIT_OK if failed == 0 else EXIT_SUITE_FAILED


def cmd_converge(args) -> int:
    m = _validated_chain(args)
    if m is None:
        return EXIT_INVALID
    a = _resolve_action(args.action, m)
    problems = a.validate()
    if problems:
        for p in problems:
            print(f"action: {p}", file=sys.stderr)
        return EXIT_INVALID
    f = _resolve_f(args.f, a)
    if args.k:
        k = args.k
    else:
        report = admissibility.check_admissible(m, k_max=args.k_max)
        if not report.admissible:
            print(
                f"chain is not admissible within k_max={args.k_max}; "
                "pass --k to force a window",
                file=sys.stderr,
            )
            return EXIT_NOT_ADMISSIBLE
        k = report.order
    nu = m.stationary_distribution()
    if args.oracle:
        for n in range(1, min(args.oracle_cap, args.n_max) + 1):
            fast = operators.spherical(m, nu, a, f, n)
            direct = operators.spherical_direct(
                m, nu, a, f, n, cap=args.oracle_cap
            )
            if fast != direct:
                print(
                    f"oracle mismatch at n={n}: operator {fast} vs "
                    f"path sum {direct}",
                    file=sys.stderr,
                )
                return EXIT_SUITE_FAILED
    series = operators.convergence_series(
        m, a, f, k=k, n_max=args.n_max, exact_cap=args.exact_cap
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            series.write_csv(fh)
    else:
        series.write_csv(sys.stdout)
    if args.plot:
        from .plotting import plot_convergence

        plot_convergence(
            series, args.plot, title=f"window 2k={2 * k} over {args.chain}"
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sphavg",
        description="Markovian spherical averages: validation, admissibility, "
        "tail-map checks, and convergence experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_chain(p):
        p.add_argument(
            "--chain",
            required=True,
            help="chain file path, builtin:uniform:R, or builtin:surface",
        )

    p = sub.add_parser("validate", help="check chain and action invariants")
    p.add_argument("--chain", help="chain file or builtin")
    p.add_argument("--action", help="action file or builtin")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("admissible", help="full admissibility report")
    add_chain(p)
    p.add_argument("--k-max", type=int, default=3, help="largest order tried")
    p.add_argument("--out", help="write the certificate JSON here")
    p.set_defaults(func=cmd_admissible)

    p = sub.add_parser("goodsub", help="search for a good subgraph only")
    add_chain(p)
    p.add_argument("--k", type=int, help="exact order to search")
    p.add_argument("--k-max", type=int, default=3)
    p.add_argument("--out", help="write the certificate JSON here")
    p.set_defaults(func=cmd_goodsub)

    p = sub.add_parser("tailcheck", help="randomized tail-map identity suite")
    add_chain(p)
    p.add_argument("--cert", help="certificate JSON to use instead of searching")
    p.add_argument("--k-max", type=int, default=3)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=_uint64, default=0)
    p.add_argument("--out", help="write a JSON report here")
    p.set_defaults(func=cmd_tailcheck)

    p = sub.add_parser("converge", help="windowed convergence experiment (CSV)")
    add_chain(p)
    p.add_argument(
        "--action",
        required=True,
        help="action file path, builtin:parity, or builtin:zmod:N",
    )
    p.add_argument(
        "--f",
        required=True,
        help="comma-separated rational values, or indicator:POINT",
    )
    p.add_argument("--k", type=int, help="window parameter (else from certificate)")
    p.add_argument("--k-max", type=int, default=3)
    p.add_argument("--n-max", type=int, default=50)
    p.add_argument("--exact-cap", type=int, default=32,
                   help="largest n computed in exact rationals")
    p.add_argument("--oracle", action="store_true",
                   help="cross-check the operator against the literal path sum")
    p.add_argument("--oracle-cap", type=int, default=8)
    p.add_argument("--seed", type=_uint64, default=0)
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.add_argument("--plot", help="also render the error curve to this file")
    p.set_defaults(func=cmd_converge)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except json.JSONDecodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
