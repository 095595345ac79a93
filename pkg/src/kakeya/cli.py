"""Command-line front end: ``kakeya <subcommand> ...`` (or ``python -m kakeya``)."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import besicovitch as bz
from . import finite, markov
from .field import gf_q
from .ring import RingSpec

if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)


class CommandError(Exception):
    pass


def _dec(x) -> str:
    return format(float(x), ".15g")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _table(header, rows) -> str:
    cells = [list(map(str, header))] + [[str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "".join("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() + "\n" for r in cells)


def _tabular(args, header, rows, records=None) -> str:
    if args.format == "json":
        data = records if records is not None else [dict(zip(header, r)) for r in rows]
        return json.dumps(data, indent=2) + "\n"
    if args.format == "table":
        return _table(header, rows)
    return _csv(header, rows)


def _series_spec(args) -> RingSpec:
    spec = RingSpec.parse(args.ring)
    if spec.kind != "series":
        raise CommandError("this command needs a series ring")
    return spec


# -- subcommands: each returns (output text, success flag) -----------------------

def cmd_star(args):
    spec = _series_spec(args)
    a = spec.parse_element(args.coeffs)
    out = bz.star(a)
    return RingSpec.series(spec.p, out.k, spec.m).format_element(out) + "\n", True


def cmd_member(args):
    spec = _series_spec(args)
    x, y = spec.parse_element(args.x), spec.parse_element(args.y)
    if args.set == "K":
        ok = bz.KSet(bz.HSet(spec.field)).contains(x, y)
        return f"{str(ok).lower()}\n", True
    s = bz.count_solutions_elim(x, y)
    return f"{str(bool(s)).lower()} s_{spec.k - 1}={s.value}\n", True


def cmd_measure(args):
    field = gf_q(args.q)
    h = bz.HSet(field)
    rows, prev, ok = [], None, True
    for k in range(1, args.k_max + 1):
        count = h.count(k)
        measure = Fraction(count, args.q ** (2 * k))
        if prev is not None and measure > prev:
            ok = False
        prev = measure
        rows.append([k, count, str(measure), _dec(measure)])
    return _tabular(args, ["k", "count", "measure", "measure_decimal"], rows), ok


def cmd_markov(args):
    dists = markov.evolve(args.q, args.steps)
    ok = all(d.total() == 1 for d in dists)
    if args.format == "json":
        return json.dumps([d.to_json() for d in dists], indent=2) + "\n", ok
    rows = []
    for d in dists:
        for state, p in sorted(d.as_counts().items()):
            rows.append([d.step, state, str(p), _dec(p)])
    return _tabular(args, ["n", "state", "probability", "probability_decimal"], rows), ok


def cmd_decay(args):
    rows = []
    for row in markov.alive_mass_decay(args.q, args.n_max, args.level_cap):
        exact = str(row.alive) if args.exact else ""
        overflow = str(row.dist.overflow) if args.exact else ""
        ratio = "" if row.ratio is None else _dec(row.ratio)
        rows.append([row.n, exact, _dec(row.alive_float), overflow, ratio])
    return _tabular(args, ["n", "alive_mass", "alive_decimal", "overflow", "ratio"], rows), True


def cmd_crossval(args):
    cv = markov.cross_validate(args.q, args.n, samples=args.samples, seed=args.seed)
    rows = []
    for s in cv.states:
        census, chain = cv.census.get(s, Fraction(0)), cv.chain.get(s, Fraction(0))
        row = [s, str(census), str(chain)]
        if not cv.exact:
            lo, hi = cv.intervals[s]
            row += [_dec(lo), _dec(hi)]
        rows.append(row)
    header = ["state", "census", "chain"] + ([] if cv.exact else ["ci_low", "ci_high"])
    text = _tabular(args, header, rows)
    if args.format != "json":
        text += f"# {'exact' if cv.exact else 'sampled'} samples={cv.samples} match={str(cv.matches).lower()}\n"
    return text, cv.matches


def _load_pointset(path) -> finite.PointSet:
    return finite.PointSet.from_json(json.loads(Path(path).read_text()))


def _dump_pointset(E) -> str:
    return json.dumps(E.to_json(), indent=1) + "\n"


def cmd_kakeya(args):
    if args.action == "verify":
        if not args.file:
            raise CommandError("kakeya verify needs --file")
        E = _load_pointset(args.file)
        check = finite.is_kakeya(E)
        if check.ok:
            return f"true |E|={len(E)}\n", True
        d = check.failing
        fmt = E.spec.format_element
        return f"false missing direction ({fmt(E.spec.element(d[0]))})|({fmt(E.spec.element(d[1]))})\n", False
    if args.action == "greedy":
        E = finite.greedy_kakeya(RingSpec.parse(args.ring), args.seed)
        return _dump_pointset(E), bool(finite.is_kakeya(E))
    if args.action == "minimal":
        spec = RingSpec.parse(args.ring)
        size, witness = finite.minimal_kakeya_bruteforce(spec)
        bound = Fraction(spec.size ** 2, 2 * spec.k)
        if args.witness:
            Path(args.witness).write_text(_dump_pointset(witness))
        ok = size >= bound and bool(finite.is_kakeya(witness))
        if args.format == "json":
            return json.dumps({"ring": str(spec), "minimum": size, "bound": str(bound),
                               "witness": witness.to_json()}, indent=1) + "\n", ok
        return f"minimum {size} bound {bound} holds {str(size >= bound).lower()}\n", ok
    if args.action == "bound":
        if args.file:
            E = _load_pointset(args.file)
            if args.ring and RingSpec.parse(args.ring) != E.spec:
                raise CommandError(f"--ring {args.ring} does not match file ring {E.spec}")
        elif args.ring:
            E = finite.greedy_kakeya(RingSpec.parse(args.ring), args.seed)
        else:
            raise CommandError("kakeya bound needs --ring or --file")
        report = finite.lower_bound_ledger(E)
        ok = report.ordered and report.satisfied
        if args.format == "json":
            return json.dumps(report.to_json(), indent=1) + "\n", ok
        return report.table() + "\n", ok
    raise CommandError(f"unknown kakeya action {args.action}")


def cmd_dimension(args):
    field = gf_q(args.q)
    sets = {"H": lambda: bz.HSet(field), "K": lambda: bz.KSet(bz.HSet(field)),
            "plane": lambda: bz.FullPlane(field)}
    rows, ok = [], True
    for row in finite.dimension_trace(sets[args.set](), args.k_max):
        ok &= row.above_bound
        rows.append([row.k, row.count, _dec(row.dim), _dec(row.bound.value),
                     str(row.above_bound).lower()])
    return _tabular(args, ["k", "count", "dim", "lower_bound", "above_bound"], rows), ok


# -- goldens ------------------------------------------------------------------------

GOLDEN_KEYS = {
    "measure": lambda a: f"measure_q{a.q}_k{a.k_max}",
    "markov": lambda a: f"markov_q{a.q}_n{a.steps}",
    "decay": lambda a: f"decay_q{a.q}_n{a.n_max}",
    "crossval": lambda a: f"crossval_q{a.q}_n{a.n}",
}


def golden_path(args) -> Path:
    ext = "json" if args.format == "json" else ("txt" if args.format == "table" else "csv")
    base = Path(args.goldens_dir) if args.goldens_dir else Path(str(resources.files("kakeya") / "goldens"))
    return base / f"{GOLDEN_KEYS[args.command](args)}.{ext}"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["csv", "json", "table"])
    common.add_argument("--out", help="write output here instead of stdout")
    goldens = argparse.ArgumentParser(add_help=False)
    goldens.add_argument("--check-goldens", action="store_true",
                         help="compare output byte-for-byte with the stored golden file")
    goldens.add_argument("--update-goldens", action="store_true", help=argparse.SUPPRESS)
    goldens.add_argument("--goldens-dir")

    parser = argparse.ArgumentParser(prog="kakeya", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("star", parents=[common], help="coefficient map a -> a*")
    p.add_argument("--ring", required=True)
    p.add_argument("--coeffs", required=True)
    p.set_defaults(func=cmd_star)

    p = sub.add_parser("member", parents=[common], help="membership in H_k or K_k")
    p.add_argument("--ring", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--set", choices=["H", "K"], default="H")
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("measure", parents=[common, goldens], help="census of |H_k| q^-2k")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("markov", parents=[common, goldens], help="exact chain trajectory")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.set_defaults(func=cmd_markov)

    p = sub.add_parser("decay", parents=[common, goldens], help="alive mass and ln(n)/n ratio")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--level-cap", type=int, default=markov.DECAY_LEVEL_CAP)
    p.add_argument("--exact", action=argparse.BooleanOptionalAction, default=True,
                   help="include exact fraction columns (large for big n)")
    p.set_defaults(func=cmd_decay)

    p = sub.add_parser("crossval", parents=[common, goldens], help="chain vs census")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_crossval)

    p = sub.add_parser("kakeya", parents=[common], help="finite-ring Kakeya sets")
    p.add_argument("action", choices=["verify", "greedy", "minimal", "bound"])
    p.add_argument("--ring")
    p.add_argument("--file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--witness", help="(minimal) write the minimising set here")
    p.set_defaults(func=cmd_kakeya)

    p = sub.add_parser("dimension", parents=[common], help="per-level dimension trace")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--set", choices=["H", "K", "plane"], default="K")
    p.set_defaults(func=cmd_dimension)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "kakeya" and args.action in ("greedy", "minimal", "bound") and not (args.ring or args.file):
        parser.error(f"kakeya {args.action} needs --ring")
    if args.format is None:
        if args.command != "kakeya":
            args.format = "csv"
        else:
            args.format = "json" if args.action == "greedy" else "table"
    try:
        text, ok = args.func(args)
    except (ValueError, CommandError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if getattr(args, "update_goldens", False):
        path = golden_path(args)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    if getattr(args, "check_goldens", False):
        path = golden_path(args)
        if not path.exists():
            print(f"golden mismatch: {path} does not exist", file=sys.stderr)
            ok = False
        elif path.read_bytes() != text.encode():
            print(f"golden mismatch: output differs from {path}", file=sys.stderr)
            ok = False
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
