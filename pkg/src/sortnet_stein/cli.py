"""``sortnet-stein`` command line.

Exit status: 0 when everything checked holds, 2 when a mathematical check
fails, 1 on usage errors (including enumeration beyond the size cap).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import continuous as cl
from . import exact as ex
from . import reduced_words as rw
from . import wasserstein as ws

OUTDIR_ENV = "SORTNET_STEIN_OUTDIR"

EXIT_OK, EXIT_USAGE, EXIT_CHECK = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_n_spec(text: str) -> list[int]:
    """``"7"`` or ``"2..64"`` (inclusive)."""
    lo, sep, hi = text.partition("..")
    try:
        a = int(lo)
        b = int(hi) if sep else a
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or A..B, got {text!r}") from None
    if b < a:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return list(range(a, b + 1))


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _cell(v) -> str:
    if isinstance(v, Fraction):
        return ex.format_rational(v)
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else str(v)


def _jsonable(v):
    if isinstance(v, Fraction):
        return ex.format_rational(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def render(rows: list[dict], columns: list[str], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([{c: _jsonable(r.get(c)) for c in columns} for r in rows], indent=2) + "\n"
    cells = [[_cell(r.get(c)) for c in columns] for r in rows]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        w.writerows(cells)
        return buf.getvalue()
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.rjust(wd) for c, wd in zip(columns, widths))]
    lines.append("  ".join("-" * wd for wd in widths))
    lines += ["  ".join(x.rjust(wd) for x, wd in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def _destination(args) -> Path | None:
    if args.out:
        return Path(args.out)
    outdir = os.environ.get(OUTDIR_ENV)
    if outdir:
        ext = {"table": "txt", "csv": "csv", "json": "json"}[args.format]
        return Path(outdir) / f"{args.command}.{ext}"
    return None


def write_output(args, text: str) -> None:
    dest = _destination(args)
    if dest is None:
        sys.stdout.write(text)
        return
    dest.parent.mkdir(parents=True, exist_ok=True)
    dest.write_text(text, encoding="utf-8", newline="\n")


# ---------------------------------------------------------------------------
# Commands; each returns (text, ok)
# ---------------------------------------------------------------------------


def _ns(args, default: str) -> list[int]:
    return args.n_range or args.n or parse_n_spec(default)


def cmd_pmf(args):
    rows, ok = [], True
    for n in _ns(args, "4"):
        law = ex.pmf(n)
        ok &= ex.exact_sum(law.probs) == 1 and law.is_symmetric()
        for k, p in enumerate(law.probs, start=1):
            rows.append({"n": n, "k": k, "p_num": p.numerator, "p_den": p.denominator,
                         "p_float64": float(p)})
    return render(rows, ["n", "k", "p_num", "p_den", "p_float64"], args.format), ok


def cmd_moments(args):
    rows, ok = [], True
    for n in _ns(args, "4"):
        ew, ew2 = ex.moments(n)
        expected = Fraction(5, 16) - Fraction(2 + n, 16 * n * n)
        good = ew == Fraction(1, 2) and ew2 == expected
        ok &= good
        rows.append({"n": n, "EW": ew, "EW2": ew2, "E_half_W2": ew2 / 2,
                     "expected_EW2": expected, "ok": good})
    cols = ["n", "EW", "EW2", "E_half_W2", "expected_EW2", "ok"]
    return render(rows, cols, args.format), ok


def cmd_stein_check(args):
    rng = random.Random(args.seed)
    draws = args.samples or 100
    rows, ok = [], True
    for n in _ns(args, "3..50"):
        if n < 2:
            raise UsageError("stein-check needs n >= 2")
        triple = ex.first_letter_triple(n)
        law = triple.law
        worst_c = worst_char = worst_resc = Fraction(0)
        for _ in range(draws):
            f = ex.random_test_function(rng, 0, n - 1)
            worst_c = max(worst_c, abs(ex.check_identity_prop21(triple, f)))
            worst_char = max(worst_char, abs(ex.check_characterization(law, f)))
            grid = {Fraction(k, n): f(k) for k in range(n)}
            worst_resc = max(worst_resc, abs(ex.rescaled_identity_residual(n, grid)))
        good = worst_c == worst_char == worst_resc == 0
        ok &= good
        rows.append({"n": n, "draws": draws, "c_identity": worst_c,
                     "characterization": worst_char, "rescaled": worst_resc, "ok": good})
    cols = ["n", "draws", "c_identity", "characterization", "rescaled", "ok"]
    return render(rows, cols, args.format), ok


_DIST_COLS = ["n", "target", "distance", "abs_error_bound", "lower_paper",
              "lower_witness", "upper_paper", "n_times_distance", "pass", "scaling_gap"]


def _dist_row(r: ws.DistanceReport) -> dict:
    d = r.as_dict()
    d["pass"] = r.passed and r.witness_ok and r.scaling_ok is not False
    return d


def cmd_wasserstein(args):
    rows, ok = [], True
    for beta, semi in ws.paired_sweep(_ns(args, "10"), args.tolerance):
        for r in (beta, semi):
            row = _dist_row(r)
            ok &= row["pass"]
            rows.append(row)
    return render(rows, _DIST_COLS, args.format), ok


def cmd_bounds_sweep(args):
    reports = ws.bounds_sweep(_ns(args, "2..64"), slack=args.tolerance)
    ok = all(r.passed and r.witness_ok for r in reports)
    if args.format == "csv":
        return ws.sweep_csv(reports), ok
    cols = ["n", "distance", "lower_paper", "lower_witness", "upper_paper",
            "n_times_distance", "pass"]
    rows = [{**r.as_dict(), "pass": r.passed} for r in reports]
    return render(rows, cols, args.format), ok


def cmd_enumerate(args):
    ns = _ns(args, "4")
    if args.format == "json":
        body = {str(n): rw.word_array(n).tolist() for n in ns}
        return json.dumps(body) + "\n", True
    return "".join(rw.words_text(n) for n in ns), True


def cmd_count(args):
    rows, ok = [], True
    for n in _ns(args, "5"):
        stanley = rw.stanley_count(n)
        enumerated = len(rw.word_array(n)) if n <= rw.ENUMERATION_CAP else None
        good = enumerated is None or enumerated == stanley
        ok &= good
        rows.append({"n": n, "count": stanley, "enumerated": enumerated, "ok": good})
    if args.format == "table" and len(rows) == 1:
        return f"{rows[0]['count']}\n", ok
    return render(rows, ["n", "count", "enumerated", "ok"], args.format), ok


def cmd_first_letter_hist(args):
    rows, ok = [], True
    for n in _ns(args, "4"):
        hist = rw.first_letter_histogram(n)
        exact_law = ex.pmf(n)
        total = len(rw.word_array(n))
        for k in hist.support:
            good = hist[k] == exact_law[k]
            ok &= good
            rows.append({"n": n, "k": k, "count": int(hist[k] * total), "words": total,
                         "frequency": hist[k], "pmf": exact_law[k], "match": good})
    cols = ["n", "k", "count", "words", "frequency", "pmf", "match"]
    return render(rows, cols, args.format), ok


def cmd_yb_stats(args):
    ns = _ns(args, "3..6")
    stats = [rw.yb_stats(n) for n in ns]
    ok = all(s.mean == 1 for s in stats)
    if args.format == "csv":
        if len(stats) == 1:
            return stats[0].histogram_csv(), ok
        rows = [{"n": s.n, "count": j, "prob_num": p.numerator, "prob_den": p.denominator}
                for s in stats for j, p in sorted(s.histogram.items())]
        return render(rows, ["n", "count", "prob_num", "prob_den"], "csv"), ok
    rows = [{"n": s.n, "mean": s.mean, "variance": s.variance,
             "conjectured_variance": s.conjectured_variance,
             "agrees": s.variance_agrees, "tv_to_poisson1": s.tv_to_poisson1,
             "histogram": s.histogram} for s in stats]
    cols = ["n", "mean", "variance", "conjectured_variance", "agrees", "tv_to_poisson1"]
    if args.format == "json":
        cols.append("histogram")
    return render(rows, cols, args.format), ok


def cmd_sample(args):
    count = args.samples or 100_000
    rows, ok = [], True
    for n in _ns(args, "3"):
        draws = rw.sample_first_letter(n, args.seed, count)
        law = ex.pmf(n)
        for k in law.support:
            p = float(law[k])
            freq = float((draws == k).sum()) / count
            sd = (p * (1 - p) / count) ** 0.5
            z = 0.0 if sd == 0 else (freq - p) / sd
            good = abs(z) <= 4.0
            ok &= good
            rows.append({"n": n, "k": k, "frequency": freq, "pmf": p, "z": z, "ok": good})
    return render(rows, ["n", "k", "frequency", "pmf", "z", "ok"], args.format), ok


def cmd_stein_solve(args):
    family = cl.lipschitz_family()
    names = list(family) if args.h == "all" else [args.h]
    rows, ok, grids = [], True, []
    for name in names:
        sol = cl.solve_stein_equation(family[name], 1.5, 1.5, args.grid_size)
        good = (sol.sup_f <= 2 / 3 + 1e-6 and sol.sup_fprime <= 8 + 1e-4
                and sol.max_residual <= 1e-8)
        ok &= good
        rows.append({"h": name, "Bh": sol.bh, "sup_f": sol.sup_f,
                     "sup_fprime": sol.sup_fprime, "max_residual": sol.max_residual,
                     "ok": good})
        grids.append(sol)
    if args.format == "csv":
        if len(grids) != 1:
            raise UsageError("CSV grid dump needs a single --h")
        return grids[0].to_csv(), ok
    return render(rows, ["h", "Bh", "sup_f", "sup_fprime", "max_residual", "ok"], args.format), ok


def cmd_report(args):
    from . import report

    ns = _ns(args, "2..1000")
    crits = report.run_all(n_max=max(ns), progress=lambda s: print(s, file=sys.stderr))
    summary = {
        "passed": all(c.passed for c in crits if c.hard),
        "criteria": [
            {"number": c.number, "name": c.name, "passed": bool(c.passed), "hard": c.hard,
             "detail": _jsonable(c.detail)}
            for c in crits
        ],
    }
    return json.dumps(summary, indent=2, default=float) + "\n", summary["passed"]


COMMANDS = {
    "pmf": cmd_pmf,
    "moments": cmd_moments,
    "stein-check": cmd_stein_check,
    "wasserstein": cmd_wasserstein,
    "bounds-sweep": cmd_bounds_sweep,
    "enumerate": cmd_enumerate,
    "count": cmd_count,
    "first-letter-hist": cmd_first_letter_hist,
    "yb-stats": cmd_yb_stats,
    "sample": cmd_sample,
    "stein-solve": cmd_stein_solve,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--n", type=parse_n_spec, help="N or A..B")
    common.add_argument("--n-range", type=parse_n_spec, help="A..B (overrides --n)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, help="draws / random test functions")
    common.add_argument("--format", choices=["table", "csv", "json"], default="table")
    common.add_argument("--out", help=f"output file (default: stdout, or ${OUTDIR_ENV})")
    common.add_argument("--tolerance", type=float, default=ws.SLACK,
                        help="slack added to numerical error bounds in bound checks")
    parser = _Parser(prog="sortnet-stein", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "stein-solve":
            p.add_argument("--h", default="w", choices=["all", *cl.lipschitz_family()])
            p.add_argument("--grid-size", type=int, default=401)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text, ok = COMMANDS[args.command](args)
    except (UsageError, ex.DomainError, rw.CapacityError) as exc:
        print(f"sortnet-stein {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    write_output(args, text)
    if not ok:
        print(f"sortnet-stein {args.command}: a checked identity or bound failed",
              file=sys.stderr)
    return EXIT_OK if ok else EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
