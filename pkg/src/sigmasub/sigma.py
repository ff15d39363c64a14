"""Partitions of the primes and the classifiers built on them.

A :class:`SigmaPartition` lists some explicit blocks; every prime not listed
is either its own singleton block or, when ``rest_block`` is set, lives in a
single complementary block.  Block ids are the least prime of the block, with
0 reserved for the complementary block.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import reduce
from pathlib import Path
from typing import Iterable, Iterator

from .errors import (
    HallSetCapExceeded,
    NotChiefFactor,
    NotSigmaSoluble,
    ParseError,
    ValidationError,
)
from .group import Group, is_prime, iter_bits, prime_factors, quotient
from .lattice import (
    GroupLike,
    Subgroup,
    _split,
    as_group,
    centralizer_of_section,
    chief_factor_orders,
    lattice_of,
    whole,
)

BlockId = int
REST = 0
HALL_SET_CAP = 10 ** 6


@dataclass(frozen=True)
class SigmaPartition:
    blocks: tuple[frozenset, ...] = ()
    rest_block: bool = False

    def __post_init__(self):
        seen: set[int] = set()
        for b in self.blocks:
            if not b:
                raise ValidationError("empty block")
            for p in b:
                if not isinstance(p, int) or not is_prime(p):
                    raise ValidationError(f"{p!r} is not a prime")
                if p in seen:
                    raise ValidationError(f"prime {p} listed in two blocks")
                seen.add(p)

    # constructors
    @classmethod
    def finest(cls) -> "SigmaPartition":
        return cls()

    @classmethod
    def one_block(cls) -> "SigmaPartition":
        return cls((), True)

    @classmethod
    def two_block(cls, pi: Iterable[int]) -> "SigmaPartition":
        pi = frozenset(pi)
        if not pi:
            raise ValidationError("two-block partition needs a nonempty prime set")
        return cls((pi,), True)

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]]) -> "SigmaPartition":
        bl = [frozenset(b) for b in blocks]
        if not all(bl):
            raise ValidationError("empty block")
        bl.sort(key=min)
        return cls(tuple(bl), False)

    def block_of(self, p: int) -> BlockId:
        for b in self.blocks:
            if p in b:
                return min(b)
        return REST if self.rest_block else p

    def induced(self, primes: Iterable[int]) -> tuple[tuple[int, ...], ...]:
        """The partition this induces on a finite prime set (canonical form)."""
        groups: dict[int, list[int]] = {}
        for p in sorted(primes):
            groups.setdefault(self.block_of(p), []).append(p)
        return tuple(sorted(tuple(v) for v in groups.values()))

    def describe(self) -> str:
        if not self.blocks:
            return "one-block" if self.rest_block else "finest"
        body = "|".join(",".join(map(str, sorted(b))) for b in self.blocks)
        if self.rest_block and len(self.blocks) == 1:
            return f"two-block:{body}"
        return f"blocks:{body}" + ("|rest" if self.rest_block else "")

    def __str__(self):
        return self.describe()


def load_partition_file(path) -> SigmaPartition:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict) or not isinstance(data.get("blocks"), list):
        raise ValidationError(f"{path}: expected an object with a 'blocks' list")
    blocks = []
    for k, b in enumerate(data["blocks"]):
        if not isinstance(b, list) or not all(isinstance(p, int) for p in b):
            raise ValidationError(f"{path}: blocks[{k}] must be a list of integers")
        blocks.append(b)
    try:
        return SigmaPartition.from_blocks(blocks)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# numbers


def sigma_of(sigma: SigmaPartition, n: int) -> frozenset:
    if n < 1:
        raise ValueError("n must be positive")
    return frozenset(sigma.block_of(p) for p in prime_factors(n))


def sigma_of_group(sigma: SigmaPartition, X: GroupLike) -> frozenset:
    return sigma_of(sigma, _order(X))


def _order(X) -> int:
    if isinstance(X, int):
        return X
    return X.order


def is_sigma_primary(sigma: SigmaPartition, X) -> bool:
    return len(sigma_of(sigma, _order(X))) <= 1


def is_pi_number(sigma: SigmaPartition, n: int, Pi) -> bool:
    return sigma_of(sigma, n) <= frozenset(Pi)


def pi_part(sigma: SigmaPartition, n: int, Pi) -> int:
    out = 1
    for p, e in prime_factors(n).items():
        if sigma.block_of(p) in Pi:
            out *= p ** e
    return out


def is_sigma_coprime(sigma: SigmaPartition, m: int, n: int) -> bool:
    return not (sigma_of(sigma, m) & sigma_of(sigma, n))


def is_sigma_fiber(X: GroupLike, sigma: SigmaPartition) -> bool:
    n = _order(X)
    return len(sigma_of(sigma, n)) == len(prime_factors(n))


def group_blocks(sigma: SigmaPartition, X) -> list[BlockId]:
    """Blocks of σ(X) ordered by the least prime of |X| they contain."""
    first: dict[int, int] = {}
    for p in sorted(prime_factors(_order(X))):
        first.setdefault(sigma.block_of(p), p)
    return sorted(first, key=first.get)


# ---------------------------------------------------------------------------
# Hall subgroups


def _hall_indices(lat, top: int, Pi, sigma) -> list[int]:
    n = lat.orders[top]
    want = pi_part(sigma, n, Pi)
    return [j for j in iter_bits(lat.below[top]) if lat.orders[j] == want]


def hall_subgroups(X: GroupLike, Pi, sigma: SigmaPartition) -> list[Subgroup]:
    """Hall Π-subgroups of X.  The order of a Hall Π-subgroup is forced to be
    the Π-part of |X|, so this is an order filter on the lattice."""
    G, m = _split(X)
    lat = lattice_of(G)
    return [lat.sub(j) for j in _hall_indices(lat, lat.index[m], frozenset(Pi), sigma)]


def iter_complete_hall_sets(G: Group, sigma: SigmaPartition) -> Iterator[tuple[Subgroup, ...]]:
    per_block = [hall_subgroups(G, {b}, sigma) for b in group_blocks(sigma, G)]
    return itertools.product(*per_block)


def count_complete_hall_sets(G: Group, sigma: SigmaPartition) -> int:
    return reduce(lambda a, b: a * b,
                  (len(hall_subgroups(G, {b}, sigma)) for b in group_blocks(sigma, G)), 1)


def complete_hall_sigma_sets(G: Group, sigma: SigmaPartition,
                             cap: int = HALL_SET_CAP) -> list[tuple[Subgroup, ...]]:
    """One Hall σ_i-subgroup per block of σ(G); the trivial group gives the
    single empty set."""
    total = count_complete_hall_sets(G, sigma)
    if total > cap:
        raise HallSetCapExceeded(f"{total} complete Hall sets exceed cap {cap}")
    return list(iter_complete_hall_sets(G, sigma))


def has_complete_hall_set(G: Group, sigma: SigmaPartition) -> bool:
    return all(hall_subgroups(G, {b}, sigma) for b in group_blocks(sigma, G))


def sigma_basis_sets(G: Group, sigma: SigmaPartition,
                     limit: int | None = None) -> list[tuple[Subgroup, ...]]:
    """Complete Hall σ-sets whose members pairwise permute (backtracking)."""
    lat = lattice_of(G)
    choices = [[lat.idx(h) for h in hall_subgroups(G, {b}, sigma)]
               for b in group_blocks(sigma, G)]
    out: list[tuple[Subgroup, ...]] = []

    def rec(k, picked):
        if limit is not None and len(out) >= limit:
            return
        if k == len(choices):
            out.append(tuple(lat.sub(i) for i in picked))
            return
        for c in choices[k]:
            if all(lat.permutes(c, q) for q in picked):
                picked.append(c)
                rec(k + 1, picked)
                picked.pop()
    rec(0, [])
    return out


# ---------------------------------------------------------------------------
# classifiers


def _block_elements(G: Group, m: int, sigma: SigmaPartition, b: BlockId) -> int:
    orders = G.element_orders
    out = 0
    for x in iter_bits(m):
        if all(sigma.block_of(p) == b for p in prime_factors(orders[x])):
            out |= 1 << x
    return out


def is_sigma_nilpotent(X: GroupLike, sigma: SigmaPartition) -> bool:
    """For every block the σ_i-elements form a subgroup of the σ_i-part order
    (so a normal Hall σ_i-subgroup), making X the direct product of them."""
    G, m = _split(X)
    n = m.bit_count()
    for b in group_blocks(sigma, n):
        s = _block_elements(G, m, sigma, b)
        if s.bit_count() != pi_part(sigma, n, {b}) or not G.is_closed(s):
            return False
    return True


def is_sigma_soluble(X: GroupLike, sigma: SigmaPartition) -> bool:
    H = as_group(X)
    return all(is_sigma_primary(sigma, f) for f in chief_factor_orders(H))


def _is_chief_factor(G: Group, H: Subgroup, K: Subgroup) -> bool:
    lat = lattice_of(G)
    if H.mask not in lat.index or K.mask not in lat.index:
        return False
    h, k = lat.idx(H), lat.idx(K)
    if not (lat.normal[h] and lat.normal[k]) or h == k or not lat.contained(k, h):
        return False
    return not any(lat.normal[j] and j not in (h, k) and lat.contained(k, j)
                   for j in iter_bits(lat.below[h]))


def is_sigma_central(G: Group, sigma: SigmaPartition, H: Subgroup, K: Subgroup) -> bool:
    """σ-primariness of (H/K) ⋊ (G/C_G(H/K)), decided from its order."""
    if not _is_chief_factor(G, H, K):
        raise NotChiefFactor("H/K is not a chief factor of G")
    C = centralizer_of_section(G, H, K)
    return is_sigma_primary(sigma, (H.order // K.order) * (G.order // C.order))


def all_chief_factors_sigma_central(G: Group, sigma: SigmaPartition) -> bool:
    from .lattice import chief_series
    if G.order == 1:
        return True
    ch = chief_series(G).chain
    return all(is_sigma_central(G, sigma, b, a) for a, b in zip(ch, ch[1:]))


# ---------------------------------------------------------------------------
# characteristic subgroups


def O_Pi(X: GroupLike, Pi, sigma: SigmaPartition) -> Subgroup:
    """Largest normal Π-subgroup of X (X may be a subgroup of its group)."""
    G, m = _split(X)
    lat = lattice_of(G)
    top = lat.index[m]
    Pi = frozenset(Pi)
    acc = 1
    for j in iter_bits(lat.below[top]):
        if is_pi_number(sigma, lat.orders[j], Pi) and lat.is_normal_in(j, top):
            acc |= lat.masks[j]
    acc = G.closure(iter_bits(acc))
    assert is_pi_number(sigma, acc.bit_count(), Pi)
    return Subgroup(G, acc)


def O_upper(G: Group, block: BlockId, sigma: SigmaPartition) -> Subgroup:
    """Smallest normal N with G/N a σ_i-group."""
    lat = lattice_of(G)
    m = G.full_mask
    for j in lat.normal_indices():
        if is_pi_number(sigma, G.order // lat.orders[j], {block}):
            m &= lat.masks[j]
    return Subgroup(G, m)


def is_pi_closed(X: GroupLike, Pi, sigma: SigmaPartition) -> bool:
    _, m = _split(X)
    return O_Pi(X, Pi, sigma).order == pi_part(sigma, m.bit_count(), frozenset(Pi))


def F_sigma(G: Group, sigma: SigmaPartition) -> Subgroup:
    """σ-Fitting subgroup: the product of the O_{σ_i}(G)."""
    acc = 1
    for b in group_blocks(sigma, G):
        acc |= O_Pi(G, {b}, sigma).mask
    acc = G.closure(iter_bits(acc))
    return Subgroup(G, acc)


def F_sigma_by_scan(G: Group, sigma: SigmaPartition) -> Subgroup:
    """Join of every normal σ-nilpotent subgroup (independent route)."""
    lat = lattice_of(G)
    acc = 1
    for j in lat.normal_indices():
        if is_sigma_nilpotent(lat.sub(j), sigma):
            acc |= lat.masks[j]
    return Subgroup(G, G.closure(iter_bits(acc)))


def _preimage(G: Group, proj: tuple[int, ...], qmask: int) -> int:
    m = 0
    for g in range(G.order):
        if (qmask >> proj[g]) & 1:
            m |= 1 << g
    return m


def upper_sigma_series(G: Group, sigma: SigmaPartition) -> list[Subgroup]:
    """``1 = F_0 < F_1 < ... = G`` with F_{i+1}/F_i = F_σ(G/F_i)."""
    series = [Subgroup(G, 1)]
    cur = 1
    while cur != G.full_mask:
        Q, proj = quotient(G, cur)
        nxt = _preimage(G, proj, F_sigma(Q, sigma).mask)
        if nxt == cur:
            raise NotSigmaSoluble(f"{G.name} is not σ-soluble for {sigma}")
        series.append(Subgroup(G, nxt))
        cur = nxt
    return series


def l_sigma(G: Group, sigma: SigmaPartition) -> int:
    if not is_sigma_soluble(G, sigma):
        raise NotSigmaSoluble(f"{G.name} is not σ-soluble for {sigma}")
    return len(upper_sigma_series(G, sigma)) - 1


def sigma_residual(G: Group, sigma: SigmaPartition) -> Subgroup:
    lat = lattice_of(G)
    m = G.full_mask
    for j in lat.normal_indices():
        Q, _ = quotient(G, lat.masks[j])
        if is_sigma_nilpotent(Q, sigma):
            m &= lat.masks[j]
    return Subgroup(G, m)


def sigma_block_label(sigma: SigmaPartition, b: BlockId) -> str:
    if b == REST:
        return "rest"
    for bl in sigma.blocks:
        if b in bl:
            return "{" + ",".join(map(str, sorted(bl))) + "}"
    return "{" + str(b) + "}"


__all__ = [
    "BlockId", "SigmaPartition", "load_partition_file", "sigma_of", "sigma_of_group",
    "is_sigma_primary", "is_pi_number", "pi_part", "is_sigma_coprime", "is_sigma_fiber",
    "group_blocks", "hall_subgroups", "iter_complete_hall_sets", "count_complete_hall_sets",
    "complete_hall_sigma_sets", "has_complete_hall_set", "sigma_basis_sets",
    "is_sigma_nilpotent", "is_sigma_soluble", "is_sigma_central",
    "all_chief_factors_sigma_central", "O_Pi", "O_upper", "is_pi_closed", "F_sigma",
    "F_sigma_by_scan", "upper_sigma_series", "l_sigma", "sigma_residual", "whole",
]
