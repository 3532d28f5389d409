"""Command-line interface: ``analyze``, ``table1``, ``sweep`` and ``threshold``.

Exit codes: 0 success, 1 quantitative check failed or no crossing, 2 usage or
domain error, 3 internal invariant violation.
"""

import argparse
import csv
import io
import json
import sys
import time

from tomoqkd.errors import ConstructionError, InvariantError, NoCrossingError, ValidationError
from tomoqkd.scenarios import SweepSpec, ThresholdQuery, analyze, bracket_threshold, sweep
from tomoqkd.source import Basis, SourceParams

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3

# published values at R/T = 1.1: (g, V, i_ab_z, i_ae_z, yield_z, i_ab_xy, i_ae_xy, yield_xy, overall)
TABLE1_RATIO = 1.1
TABLE1 = (
    (0.1, 0.6, 0.3478, 0.6070, -0.2592, 0.1872, 0.4320, -0.2448, 0.0),
    (0.02, 0.4, 0.7598, 0.7550, 0.0048, 0.1085, 0.1088, -0.0003, 0.0016),
    (0.1, 0.84, 0.3478, 0.3528, -0.005, 0.3869, 0.3755, 0.0114, 0.0076),
    (0.1, 0.9, 0.3478, 0.2845, 0.0633, 0.4525, 0.3321, 0.1204, 0.1014),
)
TABLE1_COLUMNS = ("i_ab_z", "i_ae_z", "yield_z", "i_ab_xy", "i_ae_xy", "yield_xy", "overall")
# acceptance bands per column
TABLE1_TOL = {"i_ab_z": 5e-4, "i_ab_xy": 5e-4, "i_ae_z": 2e-3, "i_ae_xy": 2e-3,
              "yield_z": 2e-3, "yield_xy": 2e-3, "overall": 2e-3}

SWEEP_COLUMNS = ("ratio", "g", "V", "F", "i_ab_z", "i_ae_z", "yield_z",
                 "i_ab_xy", "i_ae_xy", "yield_xy", "overall_yield")
TABLE1_CSV_COLUMNS = ("row", "g", "V") + TABLE1_COLUMNS + ("paper_overall", "residual")

FLAG_FOR = {"ratio": "--ratio", "g": "--g", "V": "--v", "F": "--noise"}


class UsageError(Exception):
    pass


def _params(args, **override):
    values = {"ratio": args.ratio, "g": args.g, "V": getattr(args, "v", None), "F": args.noise}
    values.update(override)
    for name, value in values.items():
        if value is None:
            raise UsageError(f"{FLAG_FOR[name]} is required")
    ratio, g, v, f = values["ratio"], values["g"], values["V"], values["F"]
    # name the offending flag rather than the field
    if not ratio > 0:
        raise UsageError(f"--ratio must be > 0, got {ratio}")
    if not g >= 0:
        raise UsageError(f"--g must be >= 0, got {g}")
    if not 0 <= v <= 1:
        raise UsageError(f"--v ∈ [0,1] required, got {v}")
    if not 0 <= f <= 1:
        raise UsageError(f"--noise ∈ [0,1] required, got {f}")
    return SourceParams(ratio, g, v, f)


def _row_values(report):
    z, x = report.reports[Basis.Z], report.reports[Basis.X]
    return {
        "i_ab_z": z.i_ab, "i_ae_z": z.i_ae_max, "yield_z": z.yield_,
        "i_ab_xy": x.i_ab, "i_ae_xy": x.i_ae_max, "yield_xy": x.yield_,
        "overall": report.overall_yield,
    }


def _fmt6(v):
    s = f"{v:.6f}"
    return "0.000000" if s == "-0.000000" else s


def _write_csv(out, header, rows):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, (int, str)) else _fmt6(v) for v in row])


def _table(out, header, rows, fmt="{:.4f}"):
    cells = [list(header)] + [[v if isinstance(v, str) else fmt.format(v) for v in r] for r in rows]
    widths = [max(len(str(r[i])) for r in cells) for i in range(len(header))]
    for r in cells:
        out.write("  ".join(str(v).rjust(wd) for v, wd in zip(r, widths)) + "\n")


def cmd_analyze(args, out):
    params = _params(args)
    report = analyze(params)
    if args.format == "json":
        doc = report.to_dict()
        if args.oracle:
            doc["oracle"] = _oracle_check(report, args.seed)
        out.write(json.dumps(doc, indent=2) + "\n")
        return EXIT_OK
    rows = []
    for basis in (Basis.Z, Basis.X, Basis.Y):
        r = report.reports[basis]
        rows.append([basis.value, r.i_ab, r.i_ae_max, r.yield_])
    if args.format == "csv":
        _write_csv(out, ("basis", "i_ab", "i_ae_max", "yield"), rows)
        out.write(f"overall,,,{report.overall_yield:.6f}\n")
    else:
        c = report.coefficients
        out.write(f"R/T={params.ratio:g} g={params.g:g} V={params.V:g} F={params.F:g}\n")
        out.write(f"alpha={c.alpha:.6f} beta1={c.beta1:.6f} beta2={c.beta2:.6f} gamma={c.gamma:.6f}"
                  f" entangled={'yes' if report.entangled else 'no'}\n")
        _table(out, ("basis", "I(A;B)", "max I(A;E)", "yield"), rows)
        out.write(f"overall yield {report.overall_yield:.4f}\n")
        if args.oracle:
            for basis, (structured, oracle) in _oracle_check(report, args.seed).items():
                out.write(f"oracle {basis}: structured {structured:.6f}, oracle {oracle:.6f}\n")
    return EXIT_OK


def _oracle_check(report, seed):
    from tomoqkd.adversary import ensemble
    from tomoqkd.optimizer import OracleConfig, accessible_info_oracle

    cfg = OracleConfig(seed=seed)
    result = {}
    for basis in (Basis.Z, Basis.X):
        e = ensemble(report.coefficients, basis)
        result[basis.value] = (report.reports[basis].i_ae_max, accessible_info_oracle(e, cfg).best_value)
    return result


def table1_rows():
    """(row, published, computed, residual) dicts for the four published rows."""
    rows = []
    for i, (g, v, *published) in enumerate(TABLE1, start=1):
        computed = _row_values(analyze(SourceParams(TABLE1_RATIO, g, v)))
        published = dict(zip(TABLE1_COLUMNS, published))
        residual = {k: abs(computed[k] - published[k]) for k in TABLE1_COLUMNS}
        rows.append({"row": i, "g": g, "V": v, "published": published, "computed": computed, "residual": residual})
    return rows


def table1_pass(row):
    return all(row["residual"][k] <= TABLE1_TOL[k] for k in TABLE1_COLUMNS)


def cmd_table1(args, out):
    start = time.perf_counter()
    rows = table1_rows()
    ok = all(table1_pass(r) for r in rows)
    if args.format == "csv":
        _write_csv(out, TABLE1_CSV_COLUMNS, [
            [r["row"], r["g"], r["V"], *(r["computed"][k] for k in TABLE1_COLUMNS),
             r["published"]["overall"], max(r["residual"].values())]
            for r in rows
        ])
    elif args.format == "json":
        out.write(json.dumps({"ratio": TABLE1_RATIO, "rows": rows, "pass": ok}, indent=2) + "\n")
    else:
        header = ("row", "g", "V") + TABLE1_COLUMNS
        body = []
        for r in rows:
            lead = [str(r["row"]), f"{r['g']:g}", f"{r['V']:g}"]
            body.append(lead[:1] + ["computed", ""] + [r["computed"][k] for k in TABLE1_COLUMNS])
            body.append(["", lead[1], lead[2]] + [r["published"][k] for k in TABLE1_COLUMNS])
            body.append(["", "residual", "PASS" if table1_pass(r) else "FAIL"]
                        + [r["residual"][k] for k in TABLE1_COLUMNS])
        out.write(f"R/T = {TABLE1_RATIO}: computed, published and |residual| per cell\n")
        _table(out, header, body)
        out.write(f"{'all rows within tolerance' if ok else 'residual beyond tolerance'}"
                  f" ({time.perf_counter() - start:.1f} s)\n")
    return EXIT_OK if ok else EXIT_CHECK


def parse_axis(text):
    """``name=lo:hi:steps`` -> (name, lo, hi, steps)."""
    try:
        name, rng = text.split("=", 1)
        lo, hi, steps = rng.split(":")
        return name.strip(), float(lo), float(hi), int(steps)
    except ValueError:
        raise UsageError(f"--axis expects name=lo:hi:steps, got {text!r}") from None


def cmd_sweep(args, out):
    if not args.axis:
        raise UsageError("--axis is required (e.g. --axis v=0:1:101)")
    axes = tuple(parse_axis(a) for a in args.axis)
    moving = {a[0].lower() for a in axes}
    # flags for swept axes may be omitted; fill placeholders validated by SweepSpec
    fill = {key: 0.0 for key, flag in (("g", "g"), ("V", "v"), ("F", "f")) if flag in moving}
    if "ratio" in moving:
        fill["ratio"] = 1.0
    values = {"ratio": args.ratio, "g": args.g, "V": args.v, "F": args.noise}
    fixed = _params(args, **{k: fill[k] if values[k] is None and k in fill else values[k] for k in values})
    try:
        spec = SweepSpec(fixed, axes, args.seed)
    except ValidationError as exc:
        raise UsageError(f"--axis: {exc}") from None
    rows = [[r.as_dict()[k] for k in SWEEP_COLUMNS] for r in sweep(spec)]
    if args.format == "json":
        text = json.dumps([dict(zip(SWEEP_COLUMNS, r)) for r in rows], indent=2) + "\n"
    else:
        buf = io.StringIO()
        _write_csv(buf, SWEEP_COLUMNS, rows)
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_threshold(args, out):
    moving = args.moving.upper()
    override = {"V": 0.0} if moving == "V" else {"F": 0.0, "V": args.v if args.v is not None else 0.0}
    fixed = _params(args, **override)
    q = ThresholdQuery(moving, fixed, args.lo, args.hi, args.tolerance)
    try:
        res = bracket_threshold(q)
    except NoCrossingError as exc:
        out.write(f"no crossing for {moving} in [{exc.lo:g}, {exc.hi:g}]\n")
        out.write(f"yield({exc.lo:g}) = {exc.yield_lo:.6f}\n")
        out.write(f"yield({exc.hi:g}) = {exc.yield_hi:.6f}\n")
        return EXIT_CHECK
    out.write(f"{res.crossing:.4f}\n")
    a, b = res.bracket
    out.write(f"bracket [{a:.6f}, {b:.6f}]; yield({q.lo:g}) = {res.yield_lo:.6f},"
              f" yield({q.hi:g}) = {res.yield_hi:.6f}\n")
    return EXIT_OK


def _fixed_flags(p, v_required):
    p.add_argument("--ratio", type=float, required=True, help="beamsplitter ratio R/T")
    p.add_argument("--g", type=float, required=True, help="two-photon correlation g")
    p.add_argument("--v", type=float, required=v_required, default=None, help="wave-packet overlap V")
    p.add_argument("--noise", type=float, default=0.0, help="white-noise fraction F (default 0)")
    p.add_argument("--seed", type=int, default=0)


def build_parser():
    parser = argparse.ArgumentParser(prog="tomoqkd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="yields at one parameter point")
    _fixed_flags(p, v_required=True)
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.add_argument("--oracle", action="store_true", help="cross-check I(A;E) with the unstructured search")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("table1", help="reproduce the published R/T = 1.1 table")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("sweep", help="yields on a 1- or 2-axis grid")
    p.add_argument("--ratio", type=float, default=None)
    p.add_argument("--g", type=float, default=None)
    p.add_argument("--v", type=float, default=None)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--axis", action="append", help="name=lo:hi:steps, name one of ratio, g, v, f")
    p.add_argument("--out", help="write to this file instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("threshold", help="where the overall yield drops to zero")
    p.add_argument("--moving", choices=("v", "f", "V", "F"), required=True)
    _fixed_flags(p, v_required=False)
    p.add_argument("--lo", type=float, default=0.0)
    p.add_argument("--hi", type=float, default=1.0)
    p.add_argument("--tolerance", type=float, default=1e-4)
    p.set_defaults(func=cmd_threshold)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except (UsageError, ValidationError) as exc:
        print(f"tomoqkd {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvariantError, ConstructionError) as exc:
        print(f"tomoqkd {args.command}: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
