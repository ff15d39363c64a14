"""Write DOT Hasse diagrams for a few builtin groups, σ-subnormal subgroups marked.

    python3 scripts/hasse.py --out dots/ S3 A4 S4
"""
import argparse
from pathlib import Path

from sigmasub.corpus import builtin_entry, parse_selector, partitions_for
from sigmasub.verifier import export_dot


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("groups", nargs="*", default=["S3", "A4", "S4"])
    ap.add_argument("--sigma", default="finest")
    ap.add_argument("--out", default="dots")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in args.groups:
        G = builtin_entry(name).build()
        (sp,) = partitions_for(G, [parse_selector(args.sigma)])
        path = out / f"{name.replace('/', '_')}.dot"
        path.write_text(export_dot(G, sp, ["sigma-subnormal", "sigma-quasinormal"]))
        print(path)


if __name__ == "__main__":
    main()
