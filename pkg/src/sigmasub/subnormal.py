"""σ-subnormality, σ-quasinormality and the chain-depth invariants.

All work for a fixed (group, partition) pair happens in a
:class:`SigmaAnalysis` session, which memoises over lattice indices.  Sets of
subgroups are bitsets over lattice indices (bit i = ``lattice.masks[i]``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import NotContained, TrivialGroup
from .group import Group, iter_bits
from .lattice import GroupLike, Lattice, Subgroup, _split, core, is_normal, lattice_of
from .sigma import (
    SigmaPartition,
    group_blocks,
    hall_subgroups,
    is_sigma_primary,
    sigma_of,
)

NORMAL = "normal"


@dataclass(frozen=True)
class ChainWitness:
    """``chain[0] = B > chain[1] > ... > chain[-1] = H`` as element masks.

    ``step_kinds[i]`` describes the step ``chain[i+1] < chain[i]``: either
    ``"normal"`` or ``"primary:<block id>"`` (the index over the core is a
    σ_i-number for that block).
    """
    chain: tuple[int, ...]
    step_kinds: tuple[str, ...]

    def validate(self, G: Group, sigma: SigmaPartition) -> bool:
        """Re-check every step from scratch (no lattice, no memo)."""
        if len(self.step_kinds) != len(self.chain) - 1:
            return False
        for big, small, kind in zip(self.chain, self.chain[1:], self.step_kinds):
            if not (G.is_closed(big) and G.is_closed(small)):
                return False
            if small & ~big or small == big:
                return False
            B, C = Subgroup(G, big), Subgroup(G, small)
            if kind == NORMAL:
                if not is_normal(C, B):
                    return False
            else:
                idx = B.order // core(C, B).order
                blocks = sigma_of(sigma, idx)
                if len(blocks) != 1 or kind != f"primary:{min(blocks)}":
                    return False
        return True

    def to_json(self) -> dict:
        return {"chain": [hex(m) for m in self.chain], "steps": list(self.step_kinds)}


@dataclass(frozen=True)
class MaximalityInvariants:
    m_sigma: int
    m_sigma_q: int
    spencer_height: int
    monotonicity_flag: bool
    m_sigma_monotone: bool = True
    m_sigma_q_monotone: bool = True
    no_complete_hall_set: bool = False


@dataclass
class QuasinormalResult:
    value: bool
    hall_set: Optional[tuple[Subgroup, ...]] = None
    diagnostic: Optional[str] = None

    def __iter__(self):
        yield self.value
        yield self.hall_set


class SigmaAnalysis:
    """Memoised σ-subnormality / σ-quasinormality for one group and σ."""

    def __init__(self, G: Group, sigma: SigmaPartition):
        self.group = G
        self.sigma = sigma
        self.lat: Lattice = lattice_of(G)
        self._sn: dict[int, int] = {}
        self._step: dict[tuple[int, int], Optional[str]] = {}
        self._qn: Optional[int] = None
        self._qn_witness: dict[int, tuple[int, ...]] = {}
        self._hall_classes: Optional[list[list[list[int]]]] = None

    # -- σ-subnormality ---------------------------------------------------

    def step_kind(self, c: int, b: int) -> Optional[str]:
        """Kind of the step c < b (lattice indices), or None if it fails."""
        key = (c, b)
        if key in self._step:
            return self._step[key]
        lat = self.lat
        kind: Optional[str] = None
        if lat.is_normal_in(c, b):
            kind = NORMAL
        else:
            idx = lat.orders[b] // lat.orders[lat.core_in(c, b)]
            blocks = sigma_of(self.sigma, idx)
            if len(blocks) <= 1:
                kind = f"primary:{min(blocks)}"
        self._step[key] = kind
        return kind

    def sn_bits(self, b: Optional[int] = None) -> int:
        """Bitset of the subgroups σ-subnormal in subgroup b (default G)."""
        if b is None:
            b = self.lat.top
        hit = self._sn.get(b)
        if hit is not None:
            return hit
        lat = self.lat
        # children first, so the recursion depth stays bounded by the lattice height
        todo = [b]
        order = []
        seen = set()
        while todo:
            k = todo.pop()
            if k in seen or k in self._sn:
                continue
            seen.add(k)
            order.append(k)
            for c in iter_bits(lat.below[k] & ~(1 << k)):
                if c not in seen and c not in self._sn:
                    todo.append(c)
        for k in sorted(order, key=lambda i: lat.orders[i]):
            acc = 1 << k
            for c in iter_bits(lat.below[k] & ~(1 << k)):
                if self.step_kind(c, k) is not None:
                    acc |= self._sn[c]
            self._sn[k] = acc
        return self._sn[b]

    def is_sn(self, h: int, b: Optional[int] = None) -> bool:
        return bool((self.sn_bits(b) >> h) & 1)

    def witness(self, h: int, b: Optional[int] = None) -> Optional[ChainWitness]:
        lat = self.lat
        if b is None:
            b = lat.top
        if not self.is_sn(h, b):
            return None
        chain = [lat.masks[b]]
        kinds = []
        cur = b
        while cur != h:
            # prefer the largest qualifying intermediate subgroup
            cands = [c for c in iter_bits(lat.below[cur] & ~(1 << cur))
                     if lat.contained(h, c) and self.step_kind(c, cur) is not None
                     and self.is_sn(h, c)]
            nxt = max(cands, key=lambda c: (lat.orders[c], c))
            kinds.append(self.step_kind(nxt, cur))
            chain.append(lat.masks[nxt])
            cur = nxt
        return ChainWitness(tuple(chain), tuple(kinds))

    # -- σ-quasinormality -------------------------------------------------

    def hall_classes(self) -> list[list[list[int]]]:
        """Per block of σ(G): the conjugacy classes of Hall σ_i-subgroups."""
        if self._hall_classes is None:
            lat = self.lat
            out = []
            for blk in group_blocks(self.sigma, self.group):
                idxs = [lat.idx(h) for h in hall_subgroups(self.group, {blk}, self.sigma)]
                seen: set[int] = set()
                classes = []
                for i in idxs:
                    c = lat.class_of[i]
                    if c not in seen:
                        seen.add(c)
                        classes.append(lat.classes[c])
                out.append(classes)
            self._hall_classes = out
        return self._hall_classes

    @property
    def has_complete_hall_set(self) -> bool:
        return all(self.hall_classes())

    def qn_bits(self) -> int:
        """Bitset of σ-quasinormal subgroups of G.

        H qualifies iff for each block some whole conjugacy class of Hall
        σ_i-subgroups permutes with H (members of a complete Hall set are
        chosen independently per block)."""
        if self._qn is not None:
            return self._qn
        lat = self.lat
        classes = self.hall_classes()
        acc = 0
        if all(classes):
            for h in range(len(lat)):
                pick = []
                for per_block in classes:
                    for cls in per_block:
                        if all(lat.permutes(h, a) for a in cls):
                            pick.append(cls[0])
                            break
                    else:
                        break
                else:
                    acc |= 1 << h
                    self._qn_witness[h] = tuple(pick)
        self._qn = acc
        return acc

    def is_qn(self, h: int) -> QuasinormalResult:
        if not self.has_complete_hall_set:
            return QuasinormalResult(False, None, "NoCompleteHallSet")
        if (self.qn_bits() >> h) & 1:
            wit = tuple(self.lat.sub(i) for i in self._qn_witness[h])
            return QuasinormalResult(True, wit)
        return QuasinormalResult(False)

    # -- invariants -------------------------------------------------------

    def _least_level(self, good: int) -> tuple[int, bool]:
        """Least n >= 1 with every n-maximal subgroup in ``good``; plus
        whether every deeper level is also inside ``good``."""
        levels = self.lat.levels
        n = 1
        while n < len(levels) and levels[n] & ~good:
            n += 1
        monotone = all(levels[k] & ~good == 0 for k in range(n, len(levels)))
        return n, monotone

    def m_sigma(self) -> int:
        return self._least_level(self.sn_bits())[0]

    def m_sigma_q(self) -> int:
        return self._least_level(self.qn_bits())[0]

    def free_levels(self) -> list[int]:
        """``free[n]``: bottoms of maximal chains of length n none of whose
        proper entries is σ-subnormal (``free[0]`` = {G})."""
        lat = self.lat
        sn = self.sn_bits()
        free = [1 << lat.top]
        while free[-1]:
            nxt = 0
            for i in iter_bits(free[-1]):
                nxt |= lat.maximal_bits[i]
            free.append(nxt & ~sn)
        return free

    def spencer_height(self) -> tuple[int, bool]:
        if self.group.order == 1:
            raise TrivialGroup("h_σ needs a nontrivial group")
        free = self.free_levels()
        f = [None] + [free[n] == 0 if n < len(free) else True
                      for n in range(1, self.lat.height + 2)]
        h = next(n for n in range(1, len(f)) if f[n])
        monotone = all(f[n] for n in range(h, len(f)))
        return h, monotone

    def invariants(self) -> MaximalityInvariants:
        m, m_mono = self._least_level(self.sn_bits())
        q, q_mono = self._least_level(self.qn_bits())
        if self.group.order == 1:
            h, h_mono = 1, True
        else:
            h, h_mono = self.spencer_height()
        return MaximalityInvariants(m, q, h, h_mono, m_mono, q_mono,
                                    not self.has_complete_hall_set)


def analysis(G: Group, sigma: SigmaPartition) -> SigmaAnalysis:
    """Session cached on the group, one per partition."""
    cache = G._cache.setdefault("sigma_sessions", {})
    key = (sigma.blocks, sigma.rest_block)
    s = cache.get(key)
    if s is None:
        s = SigmaAnalysis(G, sigma)
        cache[key] = s
    return s


def is_sigma_subnormal(H: Subgroup, G: GroupLike, sigma: SigmaPartition):
    """``(bool, ChainWitness or None)``; G may be a subgroup of H's group."""
    amb, m = _split(G)
    if H.group is not amb or H.mask & ~m:
        raise NotContained("H is not a subgroup of G")
    s = analysis(amb, sigma)
    b = s.lat.index[m]
    h = s.lat.index[H.mask]
    w = s.witness(h, b)
    return w is not None, w


def sigma_subnormal_set(G: Group, sigma: SigmaPartition) -> frozenset:
    s = analysis(G, sigma)
    return frozenset(s.lat.sub(i) for i in iter_bits(s.sn_bits()))


def is_sigma_quasinormal(H: Subgroup, G: Group, sigma: SigmaPartition) -> QuasinormalResult:
    if H.group is not G:
        raise NotContained("H is not a subgroup of G")
    s = analysis(G, sigma)
    return s.is_qn(s.lat.idx(H))


def sigma_quasinormal_set(G: Group, sigma: SigmaPartition) -> frozenset:
    s = analysis(G, sigma)
    return frozenset(s.lat.sub(i) for i in iter_bits(s.qn_bits()))


def m_sigma(G: Group, sigma: SigmaPartition) -> int:
    return analysis(G, sigma).m_sigma()


def m_sigma_q(G: Group, sigma: SigmaPartition) -> int:
    return analysis(G, sigma).m_sigma_q()


def spencer_height(G: Group, sigma: SigmaPartition) -> tuple[int, bool]:
    return analysis(G, sigma).spencer_height()


def maximality_invariants(G: Group, sigma: SigmaPartition) -> MaximalityInvariants:
    return analysis(G, sigma).invariants()


def chains_without_sn_entry(G: Group, sigma: SigmaPartition, n: int):
    """Explicit maximal chains of length n with no proper σ-subnormal entry
    (lattice indices, G first).  Used to build witnesses."""
    s = analysis(G, sigma)
    lat = s.lat
    sn = s.sn_bits()

    def walk(path):
        if len(path) == n + 1:
            yield tuple(path)
            return
        for j in lat.maximal[path[-1]]:
            if not (sn >> j) & 1:
                path.append(j)
                yield from walk(path)
                path.pop()
    yield from walk([lat.top])
