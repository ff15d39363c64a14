"""Command line: ``analyze``, ``verify``, ``lattice`` and ``list-corpus``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .corpus import (
    FromFile,
    _split_selectors,
    builtin_corpus,
    builtin_entry,
    directory_corpus,
    parse_selectors,
    partitions_for,
)
from .errors import GroupError, ParseError, ValidationError
from .group import Group, load_group_file, prime_factors
from .lattice import is_soluble, lattice_of, rank
from .sigma import (
    SigmaPartition,
    group_blocks,
    hall_subgroups,
    is_sigma_nilpotent,
    is_sigma_soluble,
    l_sigma,
    load_partition_file,
    sigma_block_label,
    sigma_residual,
)
from .subnormal import analysis
from .verifier import CHECK_IDS, MARKS, VerifyConfig, export_dot, verify_corpus

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def load_group(arg: str) -> Group:
    if arg.startswith("builtin:"):
        return builtin_entry(arg[len("builtin:"):]).build()
    return load_group_file(arg)


def _selectors(text: str):
    sels = parse_selectors(text)
    if not sels:
        raise ValidationError("empty --sigma")
    for s in sels:
        if isinstance(s, FromFile):
            load_partition_file(s.path)  # surface file errors before any work starts
    return sels


def hall_rank(G: Group, sigma: SigmaPartition):
    """max over blocks of the least rank of a Hall σ_i-subgroup; None when
    G is insoluble or trivial."""
    if G.order == 1 or not is_soluble(G):
        return None
    r = 0
    for b in group_blocks(sigma, G):
        r = max(r, min(rank(h) for h in hall_subgroups(G, {b}, sigma)))
    return r


def analyze_row(G: Group, sigma: SigmaPartition) -> dict:
    s = analysis(G, sigma)
    inv = s.invariants()
    lat = s.lat
    soluble = is_soluble(G)
    ssol = is_sigma_soluble(G, sigma)
    return {
        "group": G.name,
        "sigma": sigma.describe(),
        "order": G.order,
        "pi": sorted(prime_factors(G.order)),
        "sigma_G": [sigma_block_label(sigma, b) for b in group_blocks(sigma, G)],
        "subgroups": len(lat),
        "subgroup_orders": sorted(set(lat.orders)),
        "sigma_subnormal": s.sn_bits().bit_count(),
        "sigma_quasinormal": s.qn_bits().bit_count(),
        "soluble": soluble,
        "sigma_soluble": ssol,
        "sigma_nilpotent": is_sigma_nilpotent(G, sigma),
        "m_sigma": inv.m_sigma,
        "m_sigma_q": inv.m_sigma_q,
        "h_sigma": inv.spencer_height if G.order > 1 else None,
        "l_sigma": l_sigma(G, sigma) if ssol else None,
        "r": hall_rank(G, sigma),
        "rank": rank(G) if soluble and G.order > 1 else None,
        "sigma_residual_order": sigma_residual(G, sigma).order,
        "no_complete_hall_set": inv.no_complete_hall_set,
    }


def cmd_analyze(args) -> int:
    G = load_group(args.group)
    rows = [analyze_row(G, sp) for sp in partitions_for(G, _selectors(args.sigma))]
    if args.json:
        print(json.dumps(rows, indent=1, sort_keys=True, ensure_ascii=False))
    else:
        for row in rows:
            print(f"{row['group']}  σ={row['sigma']}")
            for k, v in row.items():
                if k not in ("group", "sigma"):
                    print(f"  {k:22s} {v}")
    return EXIT_OK


def cmd_verify(args) -> int:
    sels = _selectors(args.sigma)
    if args.corpus == "builtin":
        entries = builtin_corpus(include_optional=args.include_optional, with_tags=False)
    elif args.corpus.startswith("dir:"):
        entries = directory_corpus(args.corpus[len("dir:"):])
    else:
        raise ValidationError(f"unknown corpus {args.corpus!r}")
    checks = None
    if args.checks:
        checks = tuple(c.strip() for c in args.checks.split(",") if c.strip())
        bad = [c for c in checks if c not in CHECK_IDS]
        if bad:
            raise ValidationError(f"unknown check id(s): {', '.join(bad)}")
    cfg = VerifyConfig(max_order=args.max_order, jobs=args.jobs, checks=checks,
                       selectors=tuple(_split_selectors(args.sigma)),
                       corpus=args.corpus, timestamp=not args.no_timestamp)
    report = verify_corpus(entries, sels, cfg)
    text = report.to_json()
    if args.report:
        try:
            Path(args.report).write_text(text)
        except OSError as exc:
            raise ParseError(f"{args.report}: {exc}") from exc
    summ = report.summary
    print(" ".join(f"{k}={summ[k]}" for k in ("total", "pass", "fail", "skipped", "capped", "errors")))
    for r in report.results:
        if r.status == "fail":
            print(f"FAIL {r.check} {r.group} σ={r.sigma} {json.dumps(r.witness, sort_keys=True)}")
    for e in report.errors:
        print(f"ERROR {e['entry']}: {e['error']}", file=sys.stderr)
    return EXIT_FAIL if report.failed() else EXIT_OK


def cmd_lattice(args) -> int:
    G = load_group(args.group)
    parts = partitions_for(G, _selectors(args.sigma))
    if len(parts) != 1:
        raise ValidationError("lattice export needs a selector naming exactly one partition")
    mark = [m.strip() for m in args.mark.split(",") if m.strip()] if args.mark else []
    unknown = [m for m in mark if m not in MARKS]
    if unknown:
        raise ValidationError(f"unknown mark(s): {', '.join(unknown)}")
    dot = export_dot(G, parts[0], mark)
    try:
        Path(args.dot).write_text(dot)
    except OSError as exc:
        raise ParseError(f"{args.dot}: {exc}") from exc
    print(f"{len(lattice_of(G))} subgroups written to {args.dot}")
    return EXIT_OK


def cmd_list_corpus(args) -> int:
    entries = builtin_corpus(include_optional=True)
    rows = [{"name": e.name, "order": e.order or e.build().order, "optional": e.optional,
             "tags": sorted(e.tags)} for e in entries]
    if args.json:
        print(json.dumps(rows, indent=1, sort_keys=True))
    else:
        for r in rows:
            opt = " (optional)" if r["optional"] else ""
            print(f"{r['name']:12s} {r['order']:4d}  {','.join(r['tags'])}{opt}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sigmasub", description=__doc__)
    p.add_argument("--version", action="version", version=f"sigmasub {__version__}")
    sub = p.add_subparsers(dest="cmd", required=True)

    a = sub.add_parser("analyze", help="invariants of one group")
    a.add_argument("group", help="group file or builtin:NAME")
    a.add_argument("--sigma", default="finest")
    a.add_argument("--json", action="store_true")
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify", help="run the check catalogue over a corpus")
    v.add_argument("--corpus", default="builtin", help="builtin or dir:<path>")
    v.add_argument("--sigma", default="finest,all-two-blocks")
    v.add_argument("--max-order", type=int, default=120)
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--report")
    v.add_argument("--checks", help="comma separated check ids (default all)")
    v.add_argument("--include-optional", action="store_true", help="also run optional entries (S5)")
    v.add_argument("--no-timestamp", action="store_true")
    v.set_defaults(func=cmd_verify)

    lt = sub.add_parser("lattice", help="export the subgroup lattice as DOT")
    lt.add_argument("group", help="group file or builtin:NAME")
    lt.add_argument("--dot", required=True)
    lt.add_argument("--mark", default="")
    lt.add_argument("--sigma", default="finest")
    lt.set_defaults(func=cmd_lattice)

    lc = sub.add_parser("list-corpus", help="list the builtin groups")
    lc.add_argument("--json", action="store_true")
    lc.set_defaults(func=cmd_list_corpus)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GroupError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
