"""Command-line front end: ``tmrvote <verb> ...``.

Exit status is 0 on success, 1 on a failed verification or a runtime error,
and 2 on bad usage.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import sys
import warnings
from importlib import resources

from . import analysis, faultsim
from .gatelib import default_cell_table, load_cell_table
from .netlist import export_netlist, parse_netlist
from .report import FORMATS, render_table, round_half_up
from .voters import VoterId, build_voter, check_majority, verify_voter


def bundled_table1() -> str:
    return resources.files("tmrvote").joinpath("data/table1.csv").read_text(encoding="utf-8")


def _voter_arg(text: str) -> VoterId:
    try:
        return VoterId.parse(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"unknown voter {text!r} (run 'tmrvote list' for the ids)"
        ) from None


def _voter_or_all(text: str):
    return "all" if text.lower() == "all" else _voter_arg(text)


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value % (1 << 64) == 0:
        raise argparse.ArgumentTypeError("seed must be nonzero")
    return value


def _select(ids) -> list[VoterId]:
    if not ids or "all" in ids:
        return list(VoterId)
    return sorted(set(ids), key=lambda v: v.position)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="text", help="report format")
    common.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true", help="show warnings")

    proxy = argparse.ArgumentParser(add_help=False)
    proxy.add_argument("--cells", metavar="FILE", help="cell parameter overrides")
    proxy.add_argument("--allow-override", action="store_true",
                       help="permit changing the fixed complex-gate transistor counts")
    proxy.add_argument("--seed", type=_seed, default=analysis.DEFAULT_SEED)
    proxy.add_argument("--vectors", type=_positive_int, default=analysis.DEFAULT_VECTORS)
    proxy.add_argument("--jobs", type=_positive_int, default=1, help="worker processes")

    parser = argparse.ArgumentParser(
        prog="tmrvote", description="Majority voter netlists, fault injection and FOM ranking."
    )
    sub = parser.add_subparsers(dest="verb", metavar="VERB", required=True)

    sub.add_parser("list", parents=[common], help="print the voter ids")

    p = sub.add_parser("verify", parents=[common], help="exhaustive equivalence with majority")
    p.add_argument("ids", nargs="*", type=_voter_or_all, metavar="ID|all")
    p.add_argument("--netlist", metavar="FILE", help="verify a netlist file instead")

    p = sub.add_parser("export", parents=[common], help="print a canonical voter netlist")
    p.add_argument("id", type=_voter_arg)

    p = sub.add_parser("analyze", parents=[common, proxy], help="proxy power/delay/area and FOM")
    p.add_argument("ids", nargs="*", type=_voter_or_all, metavar="ID|all")

    p = sub.add_parser("rank", parents=[common], help="rank measured voters by FOM")
    p.add_argument("--csv", metavar="FILE",
                   help="name,power_uW,delay_ns,area_um2 measurements (default: bundled Table 1)")
    p.add_argument("--ratios", action="store_true", help="append the pairwise FOM ratio table")

    p = sub.add_parser("inject", parents=[common], help="single-net SET sensitivity of a voter")
    p.add_argument("id", nargs="?", type=_voter_arg)
    p.add_argument("--netlist", metavar="FILE", help="inject into a voter netlist file")
    p.add_argument("--models", default="flip",
                   help="comma separated fault models (stuck0, stuck1, flip)")
    p.add_argument("--module", metavar="FILE",
                   help="also run single-module faults on a TMR system built from this module")

    p = sub.add_parser("campaign", parents=[common, proxy], help="sensitivity vs. proxy FOM table")
    p.add_argument("ids", nargs="*", type=_voter_or_all, metavar="ID|all")
    p.add_argument("--with-fom", action="store_true", help="add power and FOM proxy columns")
    return parser


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _cell_table(args):
    if args.cells:
        return load_cell_table(args.cells, allow_override=args.allow_override)
    return default_cell_table()


def _fmt_opt(x):
    return "n/a" if x is None else round_half_up(x, 2)


def cmd_list(args, out):
    for v in VoterId:
        print(v.value, file=out)
    return 0


def cmd_verify(args, out):
    if args.netlist:
        reports = [check_majority(parse_netlist(_read(args.netlist)), args.netlist)]
    else:
        reports = [verify_voter(v) for v in _select(args.ids)]
    rows = []
    for r in reports:
        cex = " ".join("".join(map(str, v)) for v in r.counterexamples)
        rows.append([r.name, "equivalent" if r.equivalent else "MISMATCH", cex or "-"])
    out.write(render_table(["voter", "status", "counterexamples(XYZ)"], rows, args.format))
    ok = sum(r.equivalent for r in reports)
    if args.format != "csv":
        print(f"{ok}/{len(reports)} equivalent", file=out)
    return 0 if ok == len(reports) else 1


def cmd_export(args, out):
    out.write(export_netlist(build_voter(args.id)))
    return 0


def cmd_analyze(args, out):
    records = analysis.analyze_voters(
        _select(args.ids), _cell_table(args), args.vectors, args.seed, args.jobs
    )
    rows = []
    for r in records:
        e = r.estimate
        rows.append([e.name, round_half_up(e.power, 4), round_half_up(e.delay, 2),
                     e.area, _fmt_opt(r.fom if e.power > 0 else None)])
    cols = ["voter", "power_proxy", "delay_proxy", "area_proxy", "fom_proxy"]
    out.write(render_table(cols, rows, args.format))
    return 0


def cmd_rank(args, out):
    source = io.StringIO(bundled_table1()) if args.csv is None else args.csv
    estimates = analysis.ingest_measurements(source)
    report = analysis.rank_and_classify(analysis.FomRecord.from_estimate(e) for e in estimates)
    rows = []
    for r in report.ranked:
        e = r.record.estimate
        rows.append([r.rank, e.name, f"{e.power:g}", f"{e.delay:g}", f"{e.area:g}",
                     round_half_up(r.record.fom, 2), "above" if r.above_mean else "below"])
    cols = ["rank", "voter", "power_uW", "delay_ns", "area_um2", "fom", "class"]
    out.write(render_table(cols, rows, args.format))
    if args.format != "csv":
        print(f"\nmean FOM: {round_half_up(report.mean, 2)}", file=out)
        print(f"above mean: {', '.join(report.above)}", file=out)
    if args.ratios:
        names = [r.record.name for r in report.ranked]
        ratio_rows = [[n] + [round_half_up(x, 2) for x in row]
                      for n, row in zip(names, report.ratio_table())]
        if args.format != "csv":
            print("\nFOM ratio (row / column):", file=out)
        else:
            print(file=out)
        out.write(render_table(["voter"] + names, ratio_rows, args.format))
    return 0


def cmd_inject(args, out):
    if (args.id is None) == (args.netlist is None):
        raise _Usage("inject needs exactly one of ID or --netlist")
    models = [m.strip() for m in args.models.split(",") if m.strip()]
    bad = [m for m in models if m not in faultsim.FAULT_MODELS]
    if bad or not models:
        raise _Usage(f"unknown fault model(s): {', '.join(bad) or '(none)'}")
    voter = build_voter(args.id) if args.id else parse_netlist(_read(args.netlist))
    label = args.id.value if args.id else args.netlist
    report = faultsim.voter_set_sensitivity(voter, models)
    rows = []
    for s in report.per_site:
        site = s.sites[0]
        rows.append([voter.names[site.index], site.model, s.cases, s.propagated,
                     round_half_up(s.propagated / s.cases, 4)])
    out.write(render_table(["net", "model", "cases", "propagated", "sensitivity"], rows, args.format))
    if args.format != "csv":
        print(f"\n{label}: {report.propagated}/{report.total_cases} propagated, "
              f"sensitivity {round_half_up(report.sensitivity, 4)}", file=out)
    if args.module:
        system = faultsim.compose_tmr(parse_netlist(_read(args.module)), voter)
        mrep = faultsim.module_fault_masking(system)
        if args.format != "csv":
            print(f"module faults: {mrep.propagated}/{mrep.total_cases} propagated "
                  f"({mrep.masked} masked)", file=out)
    return 0


def cmd_campaign(args, out):
    rows_data = faultsim.campaign(
        _select(args.ids), _cell_table(args), args.vectors, args.seed, workers=args.jobs
    )
    cols = list(faultsim.CAMPAIGN_COLUMNS)
    if args.with_fom:
        cols += ["power_proxy", "fom_proxy"]
    rows = []
    for r in rows_data:
        row = [r.voter, r.nets, r.cases, r.propagated, round_half_up(r.sensitivity, 4),
               r.area_proxy, round_half_up(r.delay_proxy, 2)]
        if args.with_fom:
            row += [round_half_up(r.power_proxy, 4), _fmt_opt(r.fom_proxy)]
        rows.append(row)
    out.write(render_table(cols, rows, args.format))
    return 0


class _Usage(Exception):
    pass


COMMANDS = {
    "list": cmd_list,
    "verify": cmd_verify,
    "export": cmd_export,
    "analyze": cmd_analyze,
    "rank": cmd_rank,
    "inject": cmd_inject,
    "campaign": cmd_campaign,
}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    buf = io.StringIO()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            status = COMMANDS[args.verb](args, buf)
        except _Usage as exc:
            parser.print_usage(stderr)
            print(f"tmrvote {args.verb}: error: {exc}", file=stderr)
            return 2
        except (OSError, ValueError, KeyError) as exc:
            print(f"tmrvote {args.verb}: error: {exc}", file=stderr)
            return 1
    if args.verbose:
        for w in caught:
            print(f"warning: {w.message}", file=stderr)

    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(buf.getvalue())
    else:
        stdout.write(buf.getvalue())
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
