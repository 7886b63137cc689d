"""Command-line interface: ``qblock {construct,verify,bounds,coeffs,stats,selftest}``.

Exit codes: 0 success or blocked, 1 falsified, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys

from . import bounds, constructions, pgspace, verifier
from .gfq import FieldError, field_make, prime_power

EXIT_OK, EXIT_FALSIFIED, EXIT_INPUT = 0, 1, 2

RULES = ("improved", "trivial", "basic", "explicit", "spread", "bose-burton", "beutel")


class InputError(Exception):
    pass


def _field_order(text: str) -> int:
    try:
        q = int(text)
        prime_power(q)
        field_make(q)
    except (ValueError, FieldError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return q


def _schedule(text: str) -> dict[int, int]:
    """Parse ``"5:1,6:2"`` into {5: 1, 6: 2}."""
    out = {}
    try:
        for part in filter(None, text.split(",")):
            m, k = part.split(":")
            out[int(m)] = int(k)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad schedule {text!r}, expected n:k,n:k") from None
    return out


def _require(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise InputError(f"rule {args.rule!r} needs {', '.join(missing)}")


def _build(args) -> constructions.LineSet:
    n, q = args.n, args.q
    rule = args.rule
    if rule == "improved":
        return constructions.improved_21(n, q, args.k_schedule)
    if rule == "trivial":
        return constructions.trivial_21(n, q)
    if rule == "basic":
        _require(args, "k")
        inner = constructions.improved_21(n - args.k - 1, q)
        return constructions.basic_21(n, q, args.k, inner)
    if rule == "explicit":
        _require(args, "s", "t")
        return constructions.explicit_st(n, args.s, args.t, q, 0 if args.k is None else args.k)
    if rule == "spread":
        return constructions.spread(n, 1 if args.t is None else args.t, q)
    if rule == "bose-burton":
        _require(args, "s")
        return constructions.bose_burton(n, args.s, q)
    _require(args, "s", "t")
    return constructions.beutel_blocking(n, args.s, args.t, q)


def cmd_construct(args) -> int:
    B = _build(args)
    text = B.dumps()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    info = sys.stderr if not args.out else sys.stdout
    print(f"{B.construction}: {len(B)} members", file=info)
    if args.rule == "improved" and not args.k_schedule:
        fs = bounds.f_star(args.n, args.q) if args.n >= -1 else 0
        print(f"f*({args.n},{args.q}) = {fs}", file=info)
        if args.n >= 5:
            fo, sched = bounds.f_opt(args.n, args.q)
            if fo < fs:
                print(f"note: schedule {sched} gives {fo} < f*", file=info)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        B = constructions.LineSet.load(args.inp)
    except OSError as exc:
        raise InputError(str(exc)) from None
    s = args.s
    if not B.t <= s <= B.n:
        raise InputError(f"need t <= s <= n, got t={B.t}, s={s}, n={B.n}")
    report = verifier.is_blocking(B, s, workers=args.workers)
    text = json.dumps(report.to_json(), indent=2)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK if report.blocked else EXIT_FALSIFIED


def _emit_rows(records: list[dict], fields, fmt: str, out):
    if fmt == "json":
        json.dump(records, out, indent=2)
        out.write("\n")
    elif fmt == "csv":
        w = csv.DictWriter(out, fieldnames=list(fields), lineterminator="\n")
        w.writeheader()
        w.writerows(records)
    else:
        widths = {f: max(len(f), *(len(str(r[f])) for r in records)) for f in fields}
        out.write("  ".join(f.rjust(widths[f]) for f in fields) + "\n")
        for r in records:
            out.write("  ".join(str(r[f]).rjust(widths[f]) for f in fields) + "\n")


def cmd_bounds(args) -> int:
    if args.nmax < 4:
        raise InputError("--nmax must be >= 4")
    rows = bounds.bounds_table(args.q, args.nmax)
    _emit_rows([r.as_record() for r in rows], bounds.CSV_FIELDS, args.format, sys.stdout)
    bad = [f"n={r.n}: lower {r.lower_schonheim} > upper {r.upper_fopt}"
           for r in rows if r.lower_schonheim > r.upper_fopt]
    if args.check_reference_bounds:
        if args.q not in bounds.REFERENCE_BOUNDS or args.nmax < 9:
            raise InputError("--check-table1 needs --q 2 or 3 and --nmax >= 9")
        bad += bounds.check_reference_bounds(rows)
    for line in bad:
        print("MISMATCH " + line, file=sys.stderr)
    if args.check_reference_bounds and not bad:
        print(f"table check passed for q={args.q}", file=sys.stderr)
    return EXIT_FALSIFIED if bad else EXIT_OK


def cmd_coeffs(args) -> int:
    if args.nmax < 2:
        raise InputError("--nmax must be >= 2")
    bad = []
    for n in range(2, args.nmax + 1):
        seq = bounds.coefficient_sequence(n)
        print(f"{n}: " + ",".join(map(str, seq)))
        if args.check and n in bounds.COEFFICIENT_TABLE and seq != bounds.COEFFICIENT_TABLE[n]:
            bad.append(n)
    if args.check:
        if bad:
            print(f"MISMATCH in rows {bad}", file=sys.stderr)
            return EXIT_FALSIFIED
        print("coefficient check passed", file=sys.stderr)
    return EXIT_OK


def cmd_stats(args) -> int:
    try:
        B = constructions.LineSet.load(args.inp)
    except OSError as exc:
        raise InputError(str(exc)) from None
    layer = args.layer
    if layer != "points":
        try:
            layer = int(layer)
        except ValueError:
            raise InputError(f"--layer must be 'points' or an integer, got {layer!r}") from None
        if not 0 <= layer <= B.n:
            raise InputError(f"--layer must lie in [0, {B.n}]")
    prof = verifier.degree_profile(B, layer)
    print(json.dumps(prof.to_json(), indent=2))
    return EXIT_OK if prof.consistent else EXIT_FALSIFIED


# -- selftest ---------------------------------------------------------------------------

def _random_subspace(rng: random.Random, n: int, q: int, d: int) -> pgspace.Subspace:
    while True:
        vecs = [tuple(rng.randrange(q) for _ in range(n + 1)) for _ in range(d + 1)]
        Y = pgspace.canonicalize(vecs, q, n)
        if Y.dim == d:
            return Y


def selftest(seed: int = 0, trials: int = 200, out=None) -> list[str]:
    """Randomised invariant checks; returns the list of failures."""
    out = out or io.StringIO()
    rng = random.Random(seed)
    failures = []

    def check(name, ok):
        print(f"{'ok  ' if ok else 'FAIL'} {name}", file=out)
        if not ok:
            failures.append(name)

    # pullback round trip
    ok = True
    for n, q in ((5, 2), (4, 3)):
        for _ in range(trials):
            k = rng.randrange(-1, n)
            K = _random_subspace(rng, n, q, k)
            frame = pgspace.QuotientFrame(K)
            T1 = pgspace.SubspaceFrame(K).from_inner(
                _random_subspace(rng, k, q, rng.randrange(-1, k + 1)))
            m = n - k - 1
            T2 = frame.lift(_random_subspace(rng, m, q, rng.randrange(-1, m + 1)))
            T = pgspace.pullback_delta(K, frame.N, T1, T2)
            ok &= pgspace.map_rho(K, T) == T1 and pgspace.map_pi(K, T) == T2
    check("pullback round trip", ok)

    # subspace counts
    ok = all(sum(1 for _ in pgspace.grassmann_enumerate(n, q, d)) ==
             pgspace.gaussian_binomial(n + 1, d + 1, q)
             for n in range(0, 4) for q in (2, 3) for d in range(-1, n + 1))
    check("gaussian binomial counts", ok)

    # double counts and blocking on small constructions
    for B, s in ((constructions.improved_21(4, 2), 2), (constructions.spread(3, 1, 3), 2),
                 (constructions.trivial_21(4, 2), 2), (constructions.beutel_blocking(5, 4, 1, 2), 4)):
        rep = verifier.is_blocking(B, s)
        check(f"{B.construction} blocks {s}-spaces", rep.blocked)
        for layer in ("points", 2):
            check(f"{B.construction} incidence count on layer {layer}",
                  verifier.degree_profile(B, layer).consistent)
    return failures


def cmd_selftest(args) -> int:
    failures = selftest(seed=args.seed, trials=args.trials, out=sys.stdout)
    return EXIT_FALSIFIED if failures else EXIT_OK


# -- parser -------------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_INPUT)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qblock", description="Blocking sets of subspaces in PG(n, q).")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("construct", help="build a blocking set and write it as JSON")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--q", type=_field_order, required=True)
    c.add_argument("--s", type=int)
    c.add_argument("--t", type=int)
    c.add_argument("--k", type=int, help="recursion step for basic/explicit")
    c.add_argument("--rule", choices=RULES, default="improved")
    c.add_argument("--k-schedule", type=_schedule, help="step overrides, e.g. 5:1,6:2")
    c.add_argument("--out", help="output path (default: stdout)")
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", help="exhaustively check a blocking set")
    v.add_argument("--in", dest="inp", required=True)
    v.add_argument("--s", type=int, required=True)
    v.add_argument("--report", help="write the JSON report here instead of stdout")
    v.add_argument("--workers", type=int, help="processes (default $QBLOCK_THREADS or 1)")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bounds", help="upper and lower bounds on f(n, q)")
    b.add_argument("--q", type=_field_order, required=True)
    b.add_argument("--nmax", type=int, default=9)
    b.add_argument("--format", choices=("csv", "json", "text"), default="csv")
    b.add_argument("--check-table1", dest="check_reference_bounds", action="store_true",
                   help="compare against the reference values for q = 2, 3")
    b.set_defaults(func=cmd_bounds)

    k = sub.add_parser("coeffs", help="coefficient sequences of f*(n, q)")
    k.add_argument("--nmax", type=int, default=9)
    k.add_argument("--check", action="store_true")
    k.set_defaults(func=cmd_coeffs)

    s = sub.add_parser("stats", help="degree profile of a blocking set")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--layer", default="points")
    s.set_defaults(func=cmd_stats)

    t = sub.add_parser("selftest", help="randomised invariant checks")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--trials", type=int, default=200)
    t.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, constructions.ConstructionError, pgspace.GeometryError,
            bounds.BoundsError, FieldError) as exc:
        print(f"qblock: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
