"""Command-line entry point: ``daestruct analyze|dm|gen|bench``.

Exit codes: 0 success, 1 structurally ill-posed input, 2 input error,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .bench import RNG_ALGORITHM, GenConfig, bench_csv, generate_sigma, run_bench
from .dm import (
    IncidenceGraph,
    btf,
    coarse_decompose,
    connected_components,
    maximum_matching,
)
from .errors import (
    DaeStructError,
    InputError,
    NotOptimalTransversal,
    NotPerfectlyMatched,
    StructurallyIllPosed,
)
from .frontend import build_signature, parse_model
from .offsets import AnalysisReport, InternalInvariantError, analyze, analyze_unblocked
from .sigma import SignatureMatrix, permute, read_sigma_file, write_sigma_file

EXIT_OK = 0
EXIT_ILLPOSED = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3

TEXT_MATRIX_LIMIT = 60


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def load_matrix(path: str, fmt: str = "auto", sentinel: int | None = None) -> SignatureMatrix:
    """Read a matrix from an exchange-format or DAE source file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise _Fail(EXIT_INPUT, f"cannot read {path}: {exc}") from None
    if fmt == "auto":
        fmt = "dae" if path.endswith(".dae") else "sigma"
    if fmt == "dae":
        return build_signature(parse_model(text))
    return read_sigma_file(text, sentinel=sentinel)


def _dump(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2)


def _labels(m: SignatureMatrix) -> dict:
    return {
        "rows": [m.row_name(i) for i in range(1, m.n + 1)],
        "cols": [m.col_name(j) for j in range(1, m.n + 1)],
    }


def _blocks_doc(fb) -> list[dict]:
    return [
        {"rows": sorted(fb.block_rows(k)), "cols": sorted(fb.block_cols(k))}
        for k in range(fb.n_blocks)
    ]


def report_document(rep: AnalysisReport, timing: bool = False) -> dict:
    """JSON-ready view of a report; all indices are 1-based original positions."""
    m = rep.matrix
    doc: dict = {"n": m.n, "method": rep.method, "wellposed": rep.wellposed, "labels": _labels(m)}
    if rep.wellposed:
        fb = rep.btf
        doc.update(
            blocks=_blocks_doc(fb),
            permutation={
                "rows": list(fb.permutation.row_perm),
                "cols": list(fb.permutation.col_perm),
            },
            transversal=[list(p) for p in rep.transversal.pairs()],
            transversal_value=rep.transversal.value,
            c=list(rep.offsets.c),
            d=list(rep.offsets.d),
            structural_index=rep.structural_index,
            jacobian_pattern=[list(p) for p in sorted(rep.jacobian_pattern)],
            iterations_q=rep.iterations_q,
        )
    else:
        doc["witness"] = rep.witness.as_dict()
    if timing:
        doc["timing"] = dict(rep.timings)
    return doc


def render_matrix(m: SignatureMatrix, fb) -> str:
    """Permuted matrix as an ASCII table with rules between diagonal blocks."""
    if m.n > TEXT_MATRIX_LIMIT:
        return f"(matrix display omitted: n = {m.n} exceeds {TEXT_MATRIX_LIMIT})"
    pm = permute(m, fb.permutation)
    row_names = [pm.row_name(i) for i in range(1, m.n + 1)]
    col_names = [pm.col_name(j) for j in range(1, m.n + 1)]
    w = max(2, max(len(s) for s in col_names))
    lw = max(len(s) for s in row_names)
    col_cuts = {r.start for _, r in fb.blocks[1:]}
    row_cuts = {r.start for r, _ in fb.blocks[1:]}

    def line(label, cells):
        parts = []
        for j, cell in enumerate(cells, 1):
            if j in col_cuts:
                parts.append("|")
            parts.append(cell.rjust(w))
        return label.ljust(lw) + " | " + " ".join(parts)

    rule = "-" * len(line("", [""] * m.n))
    out = [line("", col_names), rule]
    for i in range(1, m.n + 1):
        if i in row_cuts:
            out.append(rule)
        cells = [("" if s is None else str(s)) for s in
                 (pm.get(i, j) for j in range(1, m.n + 1))]
        out.append(line(row_names[i - 1], cells))
    return "\n".join(out)


def report_text(rep: AnalysisReport, timing: bool = False) -> str:
    m = rep.matrix
    if not rep.wellposed:
        w = rep.witness
        return (
            f"structurally ill-posed (n = {m.n})\n"
            f"  rows:    {' '.join(m.row_name(i) for i in sorted(w.rows))}\n"
            f"  columns: {' '.join(m.col_name(j) for j in sorted(w.columns)) or '-'}"
        )
    o = rep.offsets
    lines = [
        f"n = {m.n}, method = {rep.method}, blocks = {rep.btf.n_blocks}",
        render_matrix(m, rep.btf),
        "",
        "transversal: " + ", ".join(
            f"({m.row_name(i)},{m.col_name(j)})" for i, j in rep.transversal.pairs()
        ) + f"  value {rep.transversal.value}",
        "c: " + " ".join(f"{m.row_name(i)}={o.c[i - 1]}" for i in range(1, m.n + 1)),
        "d: " + " ".join(f"{m.col_name(j)}={o.d[j - 1]}" for j in range(1, m.n + 1)),
        f"structural index: {rep.structural_index}",
        f"fixed-point sweeps: {rep.iterations_q}",
        f"jacobian pattern ({len(rep.jacobian_pattern)} entries): " + " ".join(
            f"({m.row_name(i)},{m.col_name(j)})" for i, j in sorted(rep.jacobian_pattern)
        ),
    ]
    if timing:
        lines.append("timing: " + ", ".join(f"{k} {v:.6f}s" for k, v in sorted(rep.timings.items())))
    return "\n".join(lines)


def cmd_analyze(args, out) -> int:
    m = load_matrix(args.path, args.format, args.sentinel)
    rep = analyze_unblocked(m) if args.no_btf else analyze(m)
    if args.output == "json":
        out.write(_dump(report_document(rep, args.timing)) + "\n")
    else:
        out.write(report_text(rep, args.timing) + "\n")
    if not rep.wellposed:
        print("error: structurally ill-posed; see witness", file=sys.stderr)
        return EXIT_ILLPOSED
    return EXIT_OK


def dm_document(m: SignatureMatrix) -> dict:
    g = IncidenceGraph.from_matrix(m)
    comps = connected_components(g)
    mm = maximum_matching(g)
    cd = coarse_decompose(g, mm)
    doc = {
        "n": m.n,
        "labels": _labels(m),
        "components": [{"rows": sorted(r), "cols": sorted(c)} for r, c in comps],
        "matching_size": mm.size,
        "coarse": cd.as_dict(),
    }
    try:
        fb = btf(m)
    except StructurallyIllPosed as exc:
        doc.update(wellposed=False, witness=exc.witness.as_dict(), blocks=None, permutation=None)
    else:
        doc.update(
            wellposed=True,
            blocks=_blocks_doc(fb),
            permutation={
                "rows": list(fb.permutation.row_perm),
                "cols": list(fb.permutation.col_perm),
            },
        )
    return doc


def cmd_dm(args, out) -> int:
    m = load_matrix(args.path, args.format, args.sentinel)
    doc = dm_document(m)
    if args.output == "json":
        out.write(_dump(doc) + "\n")
        return EXIT_OK
    names_r = doc["labels"]["rows"]
    names_c = doc["labels"]["cols"]

    def fmt(rows, cols):
        return "{" + ",".join(names_r[i - 1] for i in rows) + "} x {" + \
            ",".join(names_c[j - 1] for j in cols) + "}"

    lines = [f"n = {m.n}, maximum matching size = {doc['matching_size']}", "components:"]
    lines += ["  " + fmt(c["rows"], c["cols"]) for c in doc["components"]]
    lines.append("coarse decomposition:")
    lines += [f"  {k}: {' '.join(names_r[i - 1] if k.endswith('F') else names_c[i - 1] for i in v) or '-'}"
              for k, v in doc["coarse"].items()]
    if doc["wellposed"]:
        lines.append(f"fine blocks ({len(doc['blocks'])}):")
        lines += ["  " + fmt(b["rows"], b["cols"]) for b in doc["blocks"]]
        lines.append("row order: " + " ".join(names_r[i - 1] for i in doc["permutation"]["rows"]))
        lines.append("col order: " + " ".join(names_c[j - 1] for j in doc["permutation"]["cols"]))
    else:
        lines.append("no fine decomposition: the pattern has no perfect matching")
    out.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_gen(args, out) -> int:
    try:
        cfg = GenConfig(N=args.N, p=args.p, seed=args.seed)
    except ValueError as exc:
        raise _Fail(EXIT_INPUT, str(exc)) from None
    m = generate_sigma(cfg)
    header = f"# generated N={cfg.N} p={cfg.p} seed={cfg.seed} rng={RNG_ALGORITHM}"
    if args.sentinel is not None:
        header += f" sentinel={args.sentinel}"
    text = header + "\n" + write_sigma_file(m, sentinel=args.sentinel)
    if args.out in (None, "-"):
        out.write(text)
    else:
        try:
            Path(args.out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise _Fail(EXIT_INPUT, f"cannot write {args.out}: {exc}") from None
    return EXIT_OK


def _sizes(text: str) -> list[int]:
    try:
        sizes = [int(s) for s in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid size list {text!r}") from None
    if not sizes or any(s < 1 for s in sizes):
        raise argparse.ArgumentTypeError("sizes must be positive integers")
    return sizes


def cmd_bench(args, out) -> int:
    methods = ["esmm", "smm"] if args.method == "both" else [args.method]
    bad = [n for n in args.sizes if n % args.N]
    if bad:
        raise _Fail(EXIT_INPUT, f"sizes {bad} are not multiples of N={args.N}")
    if len(set(args.sizes)) < 3:
        raise _Fail(EXIT_INPUT, "at least 3 distinct sizes are needed for the fit")
    results = [
        run_bench(meth, args.N, sorted(set(args.sizes)), trials=args.trials, seed=args.seed)
        for meth in methods
    ]
    text = bench_csv(results)
    if args.csv:
        try:
            Path(args.csv).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise _Fail(EXIT_INPUT, f"cannot write {args.csv}: {exc}") from None
    for r in results:
        out.write(f"{r.method} N={r.N} mu={r.fitted_mu:.6g} nu={r.fitted_nu:.4f}\n")
        for n, t in r.points:
            out.write(f"  n={n} median={t:.6f}s\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="daestruct", description="Structural analysis of DAE systems.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add_input(sp):
        sp.add_argument("path", help="exchange-format (.sig) or DAE source (.dae) file")
        sp.add_argument("--format", choices=["auto", "sigma", "dae"], default="auto",
                        help="input format (default: by file extension)")
        sp.add_argument("--sentinel", type=int, default=None,
                        help="order value that marks an absent entry in dense files")
        sp.add_argument("--output", choices=["json", "text"], default="json")

    a = sub.add_parser("analyze", help="offsets, structural index and Jacobian pattern")
    add_input(a)
    a.add_argument("--no-btf", action="store_true",
                   help="skip block triangularization (plain global method)")
    a.add_argument("--timing", action="store_true", help="include per-phase timings")
    a.set_defaults(func=cmd_analyze)

    d = sub.add_parser("dm", help="Dulmage-Mendelsohn and block triangular decomposition")
    add_input(d)
    d.set_defaults(func=cmd_dm)

    g = sub.add_parser("gen", help="generate a random block-structured signature matrix")
    g.add_argument("--p", type=int, required=True, help="number of diagonal blocks")
    g.add_argument("--N", type=int, required=True, help="block size")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=None, help="output file (default: standard output)")
    g.add_argument("--sentinel", type=int, default=None,
                   help="write a dense file with this value in absent cells")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="time esmm/smm on generated instances and fit mu*n^nu")
    b.add_argument("--method", choices=["esmm", "smm", "both"], default="both")
    b.add_argument("--N", type=int, default=10)
    b.add_argument("--sizes", type=_sizes, default=[400, 800, 1200, 1600],
                   help="comma-separated sizes, each a multiple of N")
    b.add_argument("--trials", type=int, default=3)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--csv", default=None, help="write per-trial timings to this CSV file")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    if getattr(args, "trials", 1) < 1 or getattr(args, "N", 1) < 1:
        print("error: N and trials must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args, out)
    except _Fail as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except InputError as exc:
        print(f"error: {args.path if hasattr(args, 'path') else 'input'}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except StructurallyIllPosed as exc:
        print(_dump({"wellposed": False, "witness": exc.witness.as_dict()}), file=out)
        return EXIT_ILLPOSED
    except (InternalInvariantError, NotOptimalTransversal, NotPerfectlyMatched) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except DaeStructError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
