"""``wl-ladder`` command line: gen, dress, delta, wl, compare, iso, reproduce.

Graph arguments accept a file in the text format or a named family such as
``complete:5``, ``cycle:6``, ``prism`` or ``k33``.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__
from ._backend import BACKEND
from .cfi import CfiSpec, cfi_build, resolve_graph
from .delta import Mode, SweepConfig, compare_delta, default_workers, delta_sweep
from .dress import DEFAULT_EPS, DEFAULT_MAX_ITER, dress_fixpoint
from .fingerprint import (
    DEFAULT_BIN_WIDTH,
    Verdict,
    compare_histograms,
    digest,
    quantize,
    sorted_fingerprint,
)
from .graph import GraphError, are_isomorphic_bruteforce, write_graph
from .repro import mismatches, render_table, reproduce
from .wl import WlResourceError, wl_distinguish, wl_signature

EXIT_ERROR = 1
EXIT_MISMATCH = 3
EXIT_DISTINGUISHED = 10
EXIT_NOT_DISTINGUISHED = 11


class CliError(Exception):
    pass


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, ensure_ascii=False)
    sys.stdout.write("\n")


def _write_text(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _sweep_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eps", type=float, default=DEFAULT_EPS, help="convergence tolerance")
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    p.add_argument("--bin-width", type=float, default=DEFAULT_BIN_WIDTH)
    p.add_argument("--workers", type=int, default=None, help="default: $WL_LADDER_WORKERS or CPU count")


def cmd_gen(args) -> int:
    if args.family == "cfi":
        if not args.base:
            raise CliError("gen cfi needs --base, e.g. --base complete:4")
        base = resolve_graph(args.base)
        twist = frozenset([base.edges[0]]) if args.twisted and base.m else frozenset()
        G, _ = cfi_build(CfiSpec(base, twist))
    else:
        if not args.name:
            raise CliError("gen named needs a graph name, e.g. prism or complete:5")
        G = resolve_graph(args.name)
    _write_text(write_graph(G), args.out)
    return 0


def cmd_dress(args) -> int:
    G = resolve_graph(args.graph)
    d, rep = dress_fixpoint(G, args.eps, args.max_iter)
    fp = sorted_fingerprint(d, include_loops=args.include_loops)
    h = quantize(fp, args.bin_width)
    out = {
        "graph": args.graph,
        "n": G.n,
        "m": G.m,
        "iterations": rep.iterations,
        "final_delta": rep.final_delta,
        "converged": rep.converged,
        "histogram": h.to_json(),
        "digest": digest(h),
    }
    if args.values:
        out["fingerprint"] = list(fp.values)
    _emit(out)
    return 0


def cmd_delta(args) -> int:
    G = resolve_graph(args.graph)
    cfg = SweepConfig(
        k=args.k, eps=args.eps, max_iter=args.max_iter, bin_width=args.bin_width,
        workers=args.workers or default_workers(), mode=Mode(args.mode), verify=args.verify,
    )
    res = delta_sweep(G, cfg)
    out = {
        "graph": args.graph,
        "k": cfg.k,
        "mode": cfg.mode.value,
        "subsets": res.report.subsets,
        "nonconverged": res.report.nonconverged,
    }
    if res.histogram is not None:
        out["histogram"] = res.histogram.to_json()
    if res.deck is not None:
        out["deck_digest"] = res.deck.digest()
    out["wall_seconds"] = round(res.report.wall_seconds, 3)
    _emit(out)
    return 0


def cmd_wl(args) -> int:
    G = resolve_graph(args.graph)
    sig = wl_signature(
        G, args.j, individualize=args.individualize,
        mem_cap=args.mem_cap, allow_high_dim=args.allow_high_dim,
    )
    _emit({
        "j": sig.j,
        "rounds": sig.rounds,
        "color_classes": sig.color_classes,
        "signature_digest": sig.digest,
    })
    return 0


def _parse_method(text: str) -> tuple[str, int]:
    name, _, num = text.partition(":")
    if name == "dress" and not num:
        return "dress", 0
    if name in ("delta", "wl") and num.isdigit():
        return name, int(num)
    raise CliError(f"bad --method {text!r}; use dress, delta:K or wl:J")


def cmd_compare(args) -> int:
    method, param = _parse_method(args.method)
    G, H = resolve_graph(args.a), resolve_graph(args.b)
    t0 = time.perf_counter()
    out = {"a": args.a, "b": args.b, "method": args.method}
    if method == "wl":
        verdict = wl_distinguish(G, H, param, mem_cap=args.mem_cap, allow_high_dim=args.allow_high_dim)
    elif method == "dress":
        hs = []
        for X in (G, H):
            d, _ = dress_fixpoint(X, args.eps, args.max_iter)
            hs.append(quantize(sorted_fingerprint(d), args.bin_width))
        verdict = compare_histograms(*hs)
    else:
        cfg = SweepConfig(
            k=param, eps=args.eps, max_iter=args.max_iter, bin_width=args.bin_width,
            workers=args.workers or default_workers(), mode=Mode(args.mode),
        )
        cmp = compare_delta(G, H, cfg)
        verdict = cmp.verdict
        out["mode"] = cfg.mode.value
        if cmp.pooled is not None:
            out["pooled"] = cmp.pooled.value
        if cmp.multiset is not None:
            out["multiset"] = cmp.multiset.value
        out["nonconverged"] = sum(r.report.nonconverged for r in cmp.results)
    out["verdict"] = verdict.value
    out["wall_seconds"] = round(time.perf_counter() - t0, 3)
    _emit(out)
    return EXIT_DISTINGUISHED if verdict == Verdict.DISTINGUISHED else EXIT_NOT_DISTINGUISHED


def cmd_iso(args) -> int:
    G, H = resolve_graph(args.a), resolve_graph(args.b)
    _emit({"a": args.a, "b": args.b, "isomorphic": are_isomorphic_bruteforce(G, H, args.limit)})
    return 0


def cmd_reproduce(args) -> int:
    def progress(row, cell):
        print(f"  {row.base_name} Δ{cell.k}: {cell.outcome} ({cell.wall_seconds:.1f}s)", file=sys.stderr)

    rows = reproduce(
        args.tier, cluster=args.i_have_a_cluster, workers=args.workers or default_workers(),
        cell_timeout=args.cell_timeout, bin_width=args.bin_width, progress=progress,
    )
    bad = mismatches(rows)
    print(render_table(rows))
    if bad:
        for base, k, got, want in bad:
            print(f"MISMATCH {base} Δ{k}: got {got}, expected {want}")
    else:
        print("verdict matrix matches the expected matrix on every executed cell")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump({
                "tier": args.tier,
                "backend": BACKEND,
                "rows": [r.to_json() for r in rows],
                "mismatches": [list(m) for m in bad],
            }, fh, indent=2, ensure_ascii=False)
            fh.write("\n")
    return EXIT_MISMATCH if bad else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wl-ladder", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({BACKEND} kernel)")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a named or CFI graph")
    g.add_argument("family", choices=["cfi", "named"])
    g.add_argument("name", nargs="?", help="named graph, e.g. prism, complete:5")
    g.add_argument("--base", help="CFI base graph (name or file)")
    g.add_argument("--twisted", action="store_true", help="twist the first base edge")
    g.add_argument("-o", "--out", help="output file (default stdout)")
    g.set_defaults(func=cmd_gen)

    d = sub.add_parser("dress", help="DRESS fixed point and fingerprint of one graph")
    d.add_argument("--graph", required=True)
    d.add_argument("--eps", type=float, default=DEFAULT_EPS)
    d.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    d.add_argument("--bin-width", type=float, default=DEFAULT_BIN_WIDTH)
    d.add_argument("--include-loops", action="store_true")
    d.add_argument("--values", action="store_true", help="also print the sorted values")
    d.set_defaults(func=cmd_dress)

    dl = sub.add_parser("delta", help="Delta^k sweep over all k-vertex deletions")
    dl.add_argument("--graph", required=True)
    dl.add_argument("-k", type=int, required=True)
    dl.add_argument("--mode", choices=[m.value for m in Mode], default="both")
    dl.add_argument("--verify", action="store_true", help="keep full card sequences (n <= 40)")
    _sweep_args(dl)
    dl.set_defaults(func=cmd_delta)

    w = sub.add_parser("wl", help="stable j-WL signature")
    w.add_argument("--graph", required=True)
    w.add_argument("-j", type=int, required=True)
    w.add_argument("--individualize", type=int, default=None)
    w.add_argument("--mem-cap", type=int, default=None, help="bytes; default $WL_LADDER_MEM_CAP or 2 GiB")
    w.add_argument("--allow-high-dim", action="store_true", help="permit j >= 4")
    w.set_defaults(func=cmd_wl)

    c = sub.add_parser("compare", help="verdict for a pair; exit 10 distinguished, 11 not")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--method", default="dress", help="dress | delta:K | wl:J")
    c.add_argument("--mode", choices=[m.value for m in Mode], default="pooled")
    c.add_argument("--mem-cap", type=int, default=None)
    c.add_argument("--allow-high-dim", action="store_true")
    _sweep_args(c)
    c.set_defaults(func=cmd_compare)

    i = sub.add_parser("iso", help="exact isomorphism by backtracking (small graphs)")
    i.add_argument("a")
    i.add_argument("b")
    i.add_argument("--limit", type=int, default=16)
    i.set_defaults(func=cmd_iso)

    r = sub.add_parser("reproduce", help="CFI(K_n) verdict matrix against the expected values")
    r.add_argument("--tier", choices=["core", "extended"], default="core")
    r.add_argument("--out", help="write the JSON report here")
    r.add_argument("--workers", type=int, default=None)
    r.add_argument("--cell-timeout", type=float, default=None, help="seconds; late cells are skipped")
    r.add_argument("--bin-width", type=float, default=DEFAULT_BIN_WIDTH)
    r.add_argument("--i-have-a-cluster", action="store_true",
                   help="add CFI(K7) up to Delta^3 and CFI(K8..K10) Delta^0..1")
    r.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, GraphError, WlResourceError, ValueError, OSError) as exc:
        print(f"wl-ladder: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
