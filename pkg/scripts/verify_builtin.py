"""Run the full check catalogue on the builtin corpus and print a per-check
coverage table.

    python3 scripts/verify_builtin.py --jobs 4 --report report.json
"""
import argparse
import collections
import sys
import time

from sigmasub.corpus import _split_selectors, builtin_corpus, parse_selectors
from sigmasub.verifier import CHECK_IDS, VerifyConfig, verify_corpus


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sigma", default="finest,all-two-blocks")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--include-optional", action="store_true")
    ap.add_argument("--report")
    args = ap.parse_args()

    t0 = time.perf_counter()
    entries = builtin_corpus(include_optional=args.include_optional, with_tags=False)
    cfg = VerifyConfig(jobs=args.jobs, selectors=tuple(_split_selectors(args.sigma)), timestamp=False)
    rep = verify_corpus(entries, parse_selectors(args.sigma), cfg)
    dt = time.perf_counter() - t0

    table = collections.defaultdict(collections.Counter)
    for r in rep.results:
        table[r.check][r.status] += 1
    print(f"{'check':12s} {'pass':>5s} {'fail':>5s} {'skip':>5s} {'cap':>5s}")
    for c in CHECK_IDS:
        t = table[c]
        print(f"{c:12s} {t['pass']:5d} {t['fail']:5d} {t['skipped']:5d} {t['capped']:5d}")
    print(f"{len(entries)} groups, {len(rep.results)} results, {dt:.1f}s")
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(rep.to_json())
    sys.exit(1 if rep.failed() else 0)


if __name__ == "__main__":
    main()
