"""Command line interface.

verify: run the full hypothesis and condition checks on one (curve, D, p).
table: verify every bundled (or supplied) golden row and compare columns.

Exit codes: 0 all pass, 2 any Fail, 3 any Inconclusive, 4 golden column
mismatch, 1 usage error.
"""

from __future__ import annotations

import argparse
import sys

from .verifier import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    RowInput,
    bundled_path,
    emit_report,
    load_curves,
    load_golden,
    run_table,
    verify_row,
)

EXIT_PASS = 0
EXIT_USAGE = 1
EXIT_FAIL = 2
EXIT_INCONCLUSIVE = 3
EXIT_GOLDEN = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("error: %s\n" % message)
        raise SystemExit(EXIT_USAGE)


def _resolve_curve(spec):
    """(label, ainvs) from a label or a comma-separated coefficient list."""
    if "," in spec:
        parts = [int(x) for x in spec.split(",")]
        if len(parts) != 5:
            raise ValueError("expected five coefficients a1,a2,a3,a4,a6")
        return None, tuple(parts)
    with bundled_path("curves.csv").open(encoding="utf-8") as fh:
        curves = load_curves(fh)
    if spec not in curves:
        raise ValueError(
            "unknown label %r (bundled: %s)" % (spec, ", ".join(sorted(curves)))
        )
    return spec, curves[spec]


def _status_exit(statuses):
    if any(s == FAIL for s in statuses):
        return EXIT_FAIL
    if any(s == INCONCLUSIVE for s in statuses):
        return EXIT_INCONCLUSIVE
    return EXIT_PASS


def main(argv=None):
    parser = _Parser(prog="heegnercert")
    sub = parser.add_subparsers(dest="command", required=True)

    pv = sub.add_parser("verify", help="verify one (curve, D, p) triple")
    pv.add_argument("--curve", required=True,
                    help="curve label or a1,a2,a3,a4,a6")
    pv.add_argument("--disc", required=True, type=int,
                    help="fundamental discriminant D < 0")
    pv.add_argument("--prime", required=True, type=int)
    pv.add_argument("--precision", type=int, default=40)
    pv.add_argument("--ell-max", type=int, default=1000)
    pv.add_argument("--aux-bound", type=int, default=10000)
    pv.add_argument("--format", choices=("text", "machine"), default="text")

    pt = sub.add_parser("table", help="verify the bundled table")
    pt.add_argument("--input", help="curves CSV (default: bundled)")
    pt.add_argument("--golden", help="golden CSV (default: bundled)")
    pt.add_argument("--precision", type=int, default=40)
    pt.add_argument("--ell-max", type=int, default=1000)
    pt.add_argument("--aux-bound", type=int, default=10000)
    pt.add_argument("--format", choices=("text", "machine"), default="text")

    args = parser.parse_args(argv)

    if args.command == "verify":
        try:
            label, ainvs = _resolve_curve(args.curve)
            row = RowInput(label, ainvs, args.disc, args.prime,
                           precision=args.precision, ell_max=args.ell_max,
                           aux_bound=args.aux_bound)
            report = verify_row(row)
        except (ValueError, KeyError) as err:
            sys.stderr.write("error: %s\n" % err)
            return EXIT_USAGE
        sys.stdout.write(emit_report(report, args.format))
        return _status_exit([report.overall()])

    curves = load_curves(args.input) if args.input else None
    golden = load_golden(args.golden) if args.golden else None
    try:
        reports, mismatches = run_table(
            curves, golden, precision=args.precision,
            ell_max=args.ell_max, aux_bound=args.aux_bound,
        )
    except (ValueError, KeyError) as err:
        sys.stderr.write("error: %s\n" % err)
        return EXIT_USAGE
    sys.stdout.write(emit_report(reports, args.format))
    if mismatches:
        for m in mismatches:
            sys.stderr.write(
                "golden mismatch %(label)s D=%(D)d p=%(p)d: "
                "expected %(expected)s got %(got)s\n" % m
            )
        return EXIT_GOLDEN
    return _status_exit([r.overall() for r in reports])


if __name__ == "__main__":
    raise SystemExit(main())
