"""Command-line front end: ``signedwhole {generate,stats,embed,classify,report}``.

Exit codes: 0 success, 2 usage/config error, 3 data error, 4 capacity error.
"""
from __future__ import annotations

import argparse
import csv
import logging
import os
import subprocess
import sys
from collections import defaultdict
from pathlib import Path

import numpy as np

from . import __version__
from .balance import CapacityError
from .data import (ConfigError, GeneratorConfig, LoadError, collection_stats, generate_planted, load_collection,
                   save_collection, write_planted_info)
from .embedding import read_embeddings, write_embeddings
from .evaluation import DEFAULT_CS, cross_validate
from .methods import METHODS, canonical_method, embed

log = logging.getLogger("signedwhole")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CAPACITY = 0, 2, 3, 4

SCORE_FIELDS = ["dataset", "method", "depth", "macro_f", "macro_precision", "macro_recall", "accuracy",
                "majority_rate", "seconds_per_graph", "n_graphs"]


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


def _build_id() -> str:
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"], capture_output=True, text=True,
                             cwd=Path(__file__).parent, timeout=5)
        if out.returncode == 0 and out.stdout.strip():
            return out.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def read_config_file(path: str) -> dict[str, str]:
    cfg = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            k, v = line.split("=", 1)
            cfg[k.strip().replace("-", "_")] = v.strip()
    return cfg


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in str(text).split(",") if x.strip())


# -- commands --------------------------------------------------------------------

def cmd_generate(args) -> int:
    cfg = GeneratorConfig(n_graphs=args.n_graphs, n_min=args.n_min, n_max=args.n_max, k_min=args.k_min,
                          k_max=args.k_max, rho_min=args.rho_min, rho_max=args.rho_max,
                          noise_levels=_floats(args.noise), class_rule=args.class_rule, seed=args.seed)
    try:
        coll = generate_planted(cfg)
    except ConfigError as exc:
        raise UsageError(str(exc)) from None
    out = Path(args.out)
    save_collection(coll, out)
    write_planted_info(coll, out / "planted.csv")
    print(f"wrote {len(coll)} graphs to {out}")
    return EXIT_OK


def cmd_stats(args) -> int:
    coll = load_collection(args.collection)
    st = collection_stats(coll, seed=args.seed, solver=args.solver)
    if args.out:
        st.write_csv(args.out)
    rows = [[r["statistic"], _fmt(r["mean"]), _fmt(r["std"]), _fmt(r["min"]), _fmt(r["max"])] for r in st.rows()]
    print(format_table(["statistic", "mean", "std", "min", "max"], rows))
    return EXIT_OK


def cmd_embed(args) -> int:
    try:
        method = canonical_method(args.method)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    coll = load_collection(args.collection)
    res = embed(coll, method, depth=args.depth, d=args.dim, epochs=args.epochs, seed=args.seed,
                threads=args.threads)
    prov = {"method": method, "depth": args.depth, "dim": res.embedding.d, "epochs": args.epochs or "default",
            "seed": args.seed, "collection": coll.name, "build": _build_id(),
            "seconds": f"{res.seconds:.3f}"}
    write_embeddings(args.out, res.embedding, prov)
    if res.graph_meta and method.startswith(("wsgcn", "sgcn")):
        with open(str(args.out) + ".meta.csv", "w", newline="") as fh:
            w = csv.DictWriter(fh, ["graph_id", "scheme", "k", "partition_checksum", "frustration",
                                    "partition_solver"])
            w.writeheader()
            for m in res.graph_meta:
                w.writerow(m)
    print(f"{method} depth={args.depth}: {len(res.embedding)} x {res.embedding.d} -> {args.out} "
          f"({res.seconds:.1f}s)")
    return EXIT_OK


def cmd_classify(args) -> int:
    coll = load_collection(args.collection)
    label_of = dict(zip(coll.ids, coll.labels))
    rows = []
    for path in args.embeddings:
        emb = read_embeddings(path)
        missing = sorted(set(emb.ids) - set(label_of))
        absent = sorted(set(label_of) - set(emb.ids))
        if missing or absent:
            raise DataError(f"{path}: ids not in manifest: {missing[:10]}; manifest ids missing: {absent[:10]}")
        y = np.array([label_of[i] for i in emb.ids])
        rep = cross_validate(emb.vectors, y, k=args.folds, seed=args.seed, Cs=_floats(args.C))
        seconds = float(emb.meta.get("seconds", "nan") or "nan")
        rows.append({"dataset": args.dataset or coll.name, "method": emb.meta.get("method", Path(path).stem),
                     "depth": emb.meta.get("depth", ""), "macro_f": rep.macro_f,
                     "macro_precision": rep.macro_precision, "macro_recall": rep.macro_recall,
                     "accuracy": rep.accuracy, "majority_rate": rep.majority_rate,
                     "seconds_per_graph": seconds / max(len(emb), 1), "n_graphs": len(emb)})
        if rep.degenerate:
            log.warning("%s: classifier no better than majority voting", path)
    if args.out:
        write_scores(args.out, rows)
    print(score_table(rows))
    return EXIT_OK


def cmd_report(args) -> int:
    rows = []
    for path in args.scores:
        rows.extend(read_scores(path))
    if not rows:
        raise DataError("no score rows found")
    text, table = comparison_table(rows)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            for r in table:
                w.writerow(r)
    print(text)
    return EXIT_OK


# -- tables ----------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.2f}" if abs(x) >= 0.01 or x == 0 else f"{x:.4g}"
    return str(x)


def format_table(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(str(c)) for c in col) for col in zip(header, *rows)]
    line = lambda r: "  ".join(str(c).rjust(w) if i else str(c).ljust(w) for i, (c, w) in enumerate(zip(r, widths)))  # noqa: E731
    return "\n".join([line(header), line(["-" * w for w in widths])] + [line(r) for r in rows])


def write_scores(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, SCORE_FIELDS)
        w.writeheader()
        for r in rows:
            w.writerow({k: (f"{v:.4f}" if isinstance(v, float) else v) for k, v in r.items()})


def read_scores(path) -> list[dict]:
    with open(path, newline="") as fh:
        out = []
        for r in csv.DictReader(fh):
            for k in ("macro_f", "macro_precision", "macro_recall", "accuracy", "majority_rate", "seconds_per_graph"):
                if k in r and r[k] != "":
                    r[k] = float(r[k])
            out.append(r)
        return out


def score_table(rows: list[dict]) -> str:
    """Wide macro-F layout: one row per (dataset, method), one column per depth."""
    depths = sorted({str(r["depth"]) for r in rows}, key=lambda x: (x == "", int(x) if x.isdigit() else 0))
    cells: dict = defaultdict(dict)
    for r in rows:
        cells[(r["dataset"], r["method"])][str(r["depth"])] = r["macro_f"]
    header = ["dataset", "method"] + [f"{d} it." if d else "-" for d in depths]
    body = [[ds, m] + [_fmt(c[d]) if d in c else "" for d in depths] for (ds, m), c in cells.items()]
    return format_table(header, body)


def comparison_table(rows: list[dict]) -> tuple[str, list[list[str]]]:
    """Best macro-F per method and dataset; the best method of each dataset is starred in bold."""
    datasets = list(dict.fromkeys(r["dataset"] for r in rows))
    methods = list(dict.fromkeys(r["method"] for r in rows))
    best: dict = {}
    timing: dict = defaultdict(list)
    for r in rows:
        key = (r["method"], r["dataset"])
        if key not in best or r["macro_f"] > best[key]:
            best[key] = r["macro_f"]
        t = r.get("seconds_per_graph")
        if isinstance(t, float) and np.isfinite(t):
            timing[r["method"]].append(t)
    col_max = {ds: max(best[(m, ds)] for m in methods if (m, ds) in best) for ds in datasets}
    header = ["method"] + datasets + ["sec/graph"]
    table = [header]
    text_rows = []
    for m in methods:
        row = [m]
        for ds in datasets:
            if (m, ds) not in best:
                row.append("")
                continue
            v = f"{best[(m, ds)]:.2f}"
            row.append(f"**{v}**" if best[(m, ds)] >= col_max[ds] - 1e-9 else v)
        row.append(f"{np.mean(timing[m]):.4f}" if timing[m] else "")
        table.append(row)
        text_rows.append(row)
    return format_table(header, text_rows), table


# -- argument parsing ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="signedwhole", description="Whole-graph embeddings of signed graphs.")
    p.add_argument("--config", help="key=value file; command-line flags take precedence")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=int(os.environ.get("SIGNEDWHOLE_THREADS", "1")))

    g = sub.add_parser("generate", help="write a planted-partition collection")
    common(g)
    g.add_argument("--out", required=True)
    g.add_argument("--n-graphs", type=int, default=1000)
    g.add_argument("--n-min", type=int, default=16)
    g.add_argument("--n-max", type=int, default=40)
    g.add_argument("--k-min", type=int, default=2)
    g.add_argument("--k-max", type=int, default=3)
    g.add_argument("--rho-min", type=float, default=0.4)
    g.add_argument("--rho-max", type=float, default=1.0)
    g.add_argument("--noise", default="0.05,0.15", help="comma-separated sign-flip probabilities")
    g.add_argument("--class-rule", default="cluster_count", choices=["cluster_count", "noise_band"])
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("stats", help="collection statistics")
    common(s)
    s.add_argument("--collection", required=True)
    s.add_argument("--out")
    s.add_argument("--solver", default="auto", choices=["auto", "exact", "local"],
                   help="frustration solver; 'exact' fails on graphs past the enumeration caps")
    s.set_defaults(func=cmd_stats)

    e = sub.add_parser("embed", help="embed every graph of a collection")
    common(e)
    e.add_argument("--collection", required=True)
    e.add_argument("--method", required=True, help="one of: " + ", ".join(METHODS))
    e.add_argument("--depth", type=int, default=3)
    e.add_argument("--dim", type=int)
    e.add_argument("--epochs", type=int)
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_embed)

    c = sub.add_parser("classify", help="10-fold CV of one or more embedding files")
    common(c)
    c.add_argument("--collection", required=True)
    c.add_argument("--embeddings", nargs="+", required=True)
    c.add_argument("--folds", type=int, default=10)
    c.add_argument("--C", default=",".join(str(x) for x in DEFAULT_CS))
    c.add_argument("--dataset")
    c.add_argument("--out")
    c.set_defaults(func=cmd_classify)

    r = sub.add_parser("report", help="merge score CSVs into a best-per-method table")
    r.add_argument("scores", nargs="+")
    r.add_argument("--out")
    r.set_defaults(func=cmd_report)
    return p


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config:
        return args
    cfg = read_config_file(args.config)
    sub = parser._subparsers._group_actions[0].choices[args.command]  # type: ignore[union-attr]
    known = {a.dest: a for a in sub._actions}
    defaults = {}
    for k, v in cfg.items():
        if k not in known:
            raise UsageError(f"{args.config}: unknown key {k!r} for '{args.command}'")
        act = known[k]
        defaults[k] = act.type(v) if act.type else v
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _apply_config(parser, argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    except (UsageError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (DataError, LoadError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
