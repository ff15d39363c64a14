"""Tabulate |π(G)| - m_σ(G) and |π(G)| - h_σ(G) across the corpus.

Only a table; nothing here tries to settle whether these gaps are bounded.
"""
import argparse

from sigmasub.corpus import builtin_corpus, parse_selectors, partitions_for
from sigmasub.verifier import invariant_row


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sigma", default="finest,all-two-blocks")
    ap.add_argument("--include-optional", action="store_true")
    ap.add_argument("--soluble-only", action="store_true")
    args = ap.parse_args()

    sels = parse_selectors(args.sigma)
    hdr = f"{'group':12s} {'sigma':16s} {'|G|':>4s} {'|pi|':>4s} {'m':>3s} {'mq':>3s} {'h':>3s} {'l':>3s} {'pi-m':>5s} {'pi-h':>5s}"
    print(hdr)
    print("-" * len(hdr))
    for e in builtin_corpus(include_optional=args.include_optional, with_tags=False):
        G = e.build()
        if G.order == 1:
            continue
        for sp in partitions_for(G, sels):
            r = invariant_row(G, sp)
            if args.soluble_only and not r["soluble"]:
                continue
            l = "-" if r["l_sigma"] is None else r["l_sigma"]
            print(f"{r['group']:12s} {r['sigma']:16s} {r['order']:4d} {len(r['pi']):4d} "
                  f"{r['m_sigma']:3d} {r['m_sigma_q']:3d} {r['h_sigma']:3d} {l:>3} "
                  f"{r['pi_minus_m_sigma']:5d} {r['pi_minus_h_sigma']:5d}")


if __name__ == "__main__":
    main()
