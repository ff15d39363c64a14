"""Builtin group catalogue, external corpora and partition selection."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Union

from .errors import ParseError, ValidationError
from .group import (
    Alternating,
    CayleyFile,
    Cyclic,
    Dicyclic,
    Dihedral,
    DirectProduct,
    Group,
    InversionAction,
    PermGens,
    PowerAction,
    Semidirect,
    Symmetric,
    construct,
    prime_factors,
    spec_order,
)
from .lattice import is_abelian, is_nilpotent, is_schmidt, is_soluble, is_supersoluble, lattice_of
from .sigma import SigmaPartition, load_partition_file

BUILTIN_MAX_ORDER = 120


@dataclass
class CorpusEntry:
    name: str
    spec: object
    optional: bool = False
    tags: frozenset = field(default_factory=frozenset)

    def build(self, order_cap: int = 2000) -> Group:
        return construct(self.spec, order_cap=order_cap, name=self.name)

    @property
    def order(self) -> Optional[int]:
        return spec_order(self.spec)


def _sl23_generators() -> tuple[tuple[int, ...], ...]:
    """SL(2,3) acting on the 8 nonzero vectors of F_3^2."""
    vecs = [(a, b) for a in range(3) for b in range(3) if (a, b) != (0, 0)]
    pos = {v: i for i, v in enumerate(vecs)}

    def perm(m):
        (a, b), (c, d) = m
        return tuple(pos[((a * x + b * y) % 3, (c * x + d * y) % 3)] for x, y in vecs)
    return perm(((1, 1), (0, 1))), perm(((1, 0), (1, 1)))


def _catalogue() -> list[tuple[str, object, bool]]:
    C = Cyclic
    out: list[tuple[str, object, bool]] = []
    for n in (2, 3, 4, 5, 6, 7, 8, 9, 12, 15, 30):
        out.append((f"C{n}", C(n), False))
    out += [
        ("C2xC2", DirectProduct(C(2), C(2)), False),
        ("V4", PermGens(4, ((1, 0, 3, 2), (2, 3, 0, 1))), False),
        ("C2^3", DirectProduct(C(2), DirectProduct(C(2), C(2))), False),
        ("C3xC3", DirectProduct(C(3), C(3)), False),
        ("C2xC4", DirectProduct(C(2), C(4)), False),
    ]
    for m in (4, 5, 6, 8, 9, 10, 12, 15):
        out.append((f"D{2 * m}", Dihedral(m), False))
    out += [
        ("Q8", Dicyclic(2), False),
        ("Dic16", Dicyclic(4), False),
        ("C3:C4", Semidirect(C(3), C(4), InversionAction()), False),
        ("S3", Symmetric(3), False),
        ("S4", Symmetric(4), False),
        ("A4", Alternating(4), False),
        ("A5", Alternating(5), False),
        ("SL(2,3)", PermGens(8, _sl23_generators()), False),
        ("C5:C4", Semidirect(C(5), C(4), PowerAction(2)), False),
        ("F20", PermGens(5, ((1, 2, 3, 4, 0), (0, 2, 4, 1, 3))), False),
        ("C7:C3", Semidirect(C(7), C(3), PowerAction(2)), False),
        ("C13:C3", Semidirect(C(13), C(3), PowerAction(3)), False),
        ("C7:C6", Semidirect(C(7), C(6), PowerAction(3)), False),
        ("C11:C5", Semidirect(C(11), C(5), PowerAction(3)), False),
        ("C2xA4", DirectProduct(C(2), Alternating(4)), False),
        ("C3xS3", DirectProduct(C(3), Symmetric(3)), False),
        ("S3xC5", DirectProduct(Symmetric(3), C(5)), False),
        ("(C3xC3):C2", Semidirect(DirectProduct(C(3), C(3)), C(2), InversionAction()), False),
        ("S5", Symmetric(5), True),
    ]
    return out


def compute_tags(G: Group) -> frozenset:
    tags = set()
    if is_soluble(G):
        tags.add("soluble")
        if is_supersoluble(G):
            tags.add("supersoluble")
    if is_nilpotent(G):
        tags.add("nilpotent")
    if is_abelian(G):
        tags.add("abelian")
    if is_schmidt(G):
        tags.add("schmidt")
    if G.order > 1 and not is_abelian(G):
        lat = lattice_of(G)
        if len(lat.normal_indices()) == 2:
            tags.add("simple")
    if len(prime_factors(G.order)) == 1 and G.order > 1:
        tags.add("p-group")
    return frozenset(tags)


def builtin_corpus(include_optional: bool = False, with_tags: bool = True) -> list[CorpusEntry]:
    """The curated corpus.  Entries flagged optional (S5) are left out
    unless asked for."""
    out = []
    for name, spec, optional in _catalogue():
        if optional and not include_optional:
            continue
        e = CorpusEntry(name, spec, optional)
        if with_tags:
            e.tags = compute_tags(e.build())
        out.append(e)
    return out


def builtin_entry(name: str) -> CorpusEntry:
    for n, spec, optional in _catalogue():
        if n == name:
            e = CorpusEntry(n, spec, optional)
            e.tags = compute_tags(e.build())
            return e
    raise ValidationError(f"no builtin group named {name!r}")


def directory_corpus(path) -> list[CorpusEntry]:
    """Every ``*.json`` group file of a directory (sorted by file name).
    Files are only read when the entry is built."""
    p = Path(path)
    if not p.is_dir():
        raise ParseError(f"{p}: not a directory")
    return [CorpusEntry(f.stem, CayleyFile(str(f))) for f in sorted(p.glob("*.json"))]


# ---------------------------------------------------------------------------
# partition selectors


@dataclass(frozen=True)
class Finest:
    pass


@dataclass(frozen=True)
class OneBlock:
    pass


@dataclass(frozen=True)
class TwoBlock:
    pi: frozenset

    def __post_init__(self):
        if not self.pi:
            raise ValidationError("two-block selector needs a nonempty prime set")


@dataclass(frozen=True)
class AllTwoBlocks:
    pass


@dataclass(frozen=True)
class FromFile:
    path: str


PartitionSelector = Union[Finest, OneBlock, TwoBlock, AllTwoBlocks, FromFile]


def parse_selector(text: str) -> PartitionSelector:
    t = text.strip()
    if t == "finest":
        return Finest()
    if t == "one-block":
        return OneBlock()
    if t == "all-two-blocks":
        return AllTwoBlocks()
    if t.startswith("two-block:"):
        try:
            primes = frozenset(int(x) for x in t[len("two-block:"):].split(",") if x.strip())
        except ValueError as exc:
            raise ValidationError(f"bad prime list in selector {text!r}") from exc
        SigmaPartition.two_block(primes)  # validates primality
        return TwoBlock(primes)
    if t.startswith("file:"):
        return FromFile(t[len("file:"):])
    raise ValidationError(f"unknown partition selector {text!r}")


def parse_selectors(text: str) -> list[PartitionSelector]:
    return [parse_selector(part) for part in _split_selectors(text)]


def _split_selectors(text: str) -> list[str]:
    # "two-block:2,3" contains commas, so a comma only separates selectors
    # when the next piece starts a new selector keyword
    heads = ("finest", "one-block", "all-two-blocks", "two-block:", "file:")
    parts: list[str] = []
    for piece in text.split(","):
        if parts and not piece.strip().startswith(heads):
            parts[-1] += "," + piece
        else:
            parts.append(piece)
    return [p for p in (x.strip() for x in parts) if p]


def _bipartitions(primes: list[int]) -> list[SigmaPartition]:
    primes = sorted(primes)
    if len(primes) < 2:
        return []
    if len(primes) <= 3:
        first, rest = primes[0], primes[1:]
        out = []
        for k in range(len(rest)):
            for extra in itertools.combinations(rest, k):
                out.append(SigmaPartition.two_block((first,) + extra))
        return out
    return [SigmaPartition.two_block((p,)) for p in primes]


def expand_selector(sel: PartitionSelector, primes: Iterable[int]) -> list[SigmaPartition]:
    if isinstance(sel, Finest):
        return [SigmaPartition.finest()]
    if isinstance(sel, OneBlock):
        return [SigmaPartition.one_block()]
    if isinstance(sel, TwoBlock):
        return [SigmaPartition.two_block(sel.pi)]
    if isinstance(sel, AllTwoBlocks):
        return _bipartitions(list(primes))
    if isinstance(sel, FromFile):
        return [load_partition_file(sel.path)]
    raise ValidationError(f"unknown selector {sel!r}")


def partitions_for(G: Group, selectors: Iterable[PartitionSelector]) -> list[SigmaPartition]:
    """Expand selectors for G, keeping the first partition of each induced
    block structure on π(G).  The trivial group only gets the finest one."""
    primes = sorted(prime_factors(G.order))
    if not primes:
        return [SigmaPartition.finest()]
    seen = set()
    out = []
    for sel in selectors:
        for sp in expand_selector(sel, primes):
            key = sp.induced(primes)
            if key not in seen:
                seen.add(key)
                out.append(sp)
    return out
