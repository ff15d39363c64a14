"""Check catalogue over (group, σ) pairs, corpus reports and DOT export.

Every check is an implication evaluated on one group and one partition.
When its hypothesis fails the result is ``skipped`` and names the
precondition predicate (a key of :data:`PRECONDITIONS`) that came out false;
a check never passes vacuously.
"""
from __future__ import annotations

import datetime as _dt
import itertools
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import cached_property
from math import gcd
from typing import Callable, Iterable, Optional

from . import __version__
from .corpus import CorpusEntry, PartitionSelector, partitions_for
from .errors import GroupError, HallSetCapExceeded, SubgroupCapExceeded
from .group import Group, build_from_cayley, iter_bits, prime_factors, quotient, subgroup_as_group
from .lattice import (
    Subgroup,
    chief_factor_orders,
    complements,
    is_abelian,
    is_cyclic,
    is_elementary_abelian,
    is_nilpotent,
    is_schmidt,
    is_soluble,
    is_subnormal,
    is_supersoluble,
    normalizer,
    rank,
    sylow_bases,
    frattini,
)
from .sigma import (
    F_sigma,
    O_Pi,
    O_upper,
    SigmaPartition,
    _is_chief_factor,
    all_chief_factors_sigma_central,
    group_blocks,
    hall_subgroups,
    is_pi_closed,
    is_pi_number,
    is_sigma_fiber,
    is_sigma_nilpotent,
    is_sigma_primary,
    is_sigma_soluble,
    l_sigma,
    sigma_basis_sets,
    sigma_of,
    sigma_residual,
)
from .subnormal import SigmaAnalysis, analysis

SCHEMA = 1
STATUSES = ("pass", "fail", "skipped", "capped")
SYLOW_BASIS_BUDGET = 10 ** 6

CHECK_IDS = (
    "P2.5", "C2.6", "L2.2.9",
    "P3.2.i", "P3.2.ii", "P3.2.iii", "P3.2.iv", "P3.2.v",
    "P3.4", "L3.6", "L3.7", "C3.9",
    "L4.1.4", "L4.1.5", "TB-quotient", "L4.2.1",
    "T1.2.i", "T1.2.ii", "T1.2.iii", "T1.4.i", "T1.4.ii",
    "C1.7", "C1.8", "C1.9", "T1.10.fwd", "T1.10.conv",
    "T7.1.i", "T7.1.ii",
)


class BudgetExceeded(GroupError):
    pass


@dataclass
class CheckResult:
    check: str
    group: str
    sigma: str
    status: str
    witness: Optional[dict] = None
    precondition: Optional[str] = None
    details: Optional[dict] = None

    def to_json(self) -> dict:
        d = {"check": self.check, "group": self.group, "sigma": self.sigma,
             "status": self.status}
        if self.witness is not None:
            d["witness"] = self.witness
        if self.precondition is not None:
            d["precondition"] = self.precondition
        if self.details is not None:
            d["details"] = self.details
        return d


@dataclass
class Outcome:
    ok: bool
    data: Optional[dict] = None


class Skip(Exception):
    def __init__(self, precondition: str):
        super().__init__(precondition)
        self.precondition = precondition


def _hex(mask: int) -> str:
    return hex(mask)


# ---------------------------------------------------------------------------
# per-pair context


class Context:
    """Lazily computed facts about one (group, σ) pair, shared by checks."""

    def __init__(self, G: Group, sigma: SigmaPartition):
        self.G = G
        self.sigma = sigma
        self.s: SigmaAnalysis = analysis(G, sigma)
        self.lat = self.s.lat

    # basic classifiers
    @cached_property
    def pi(self) -> list[int]:
        return sorted(prime_factors(self.G.order))

    @cached_property
    def blocks(self) -> list[int]:
        return group_blocks(self.sigma, self.G)

    @cached_property
    def finest(self) -> bool:
        return all(len(b) == 1 for b in self.sigma.induced(self.pi))

    @cached_property
    def soluble(self) -> bool:
        return is_soluble(self.G)

    @cached_property
    def sigma_soluble(self) -> bool:
        return is_sigma_soluble(self.G, self.sigma)

    @cached_property
    def sigma_nilpotent(self) -> bool:
        return is_sigma_nilpotent(self.G, self.sigma)

    @cached_property
    def nilpotent(self) -> bool:
        return is_nilpotent(self.G)

    @cached_property
    def supersoluble(self) -> bool:
        return is_supersoluble(self.G)

    @cached_property
    def schmidt(self) -> bool:
        return is_schmidt(self.G)

    # subgroup sets (bitsets over lattice indices)
    @cached_property
    def sn(self) -> int:
        return self.s.sn_bits()

    @cached_property
    def qn(self) -> int:
        return self.s.qn_bits()

    def is_sn(self, i: int) -> bool:
        return bool((self.sn >> i) & 1)

    # invariants
    @cached_property
    def m(self) -> int:
        return self.s.m_sigma()

    @cached_property
    def mq(self) -> int:
        return self.s.m_sigma_q()

    @cached_property
    def h(self) -> Optional[int]:
        return None if self.G.order == 1 else self.s.spencer_height()[0]

    @cached_property
    def l(self) -> Optional[int]:
        return l_sigma(self.G, self.sigma) if self.sigma_soluble else None

    def f(self, n: int) -> bool:
        """Every maximal chain of length n has a proper σ-subnormal entry."""
        free = self.s.free_levels()
        return n >= len(free) or free[n] == 0

    # helpers
    def sylows(self, p: int, within: Optional[int] = None) -> list[int]:
        lat = self.lat
        top = lat.top if within is None else within
        n = lat.orders[top]
        pe = p ** prime_factors(n).get(p, 0)
        return [j for j in iter_bits(lat.below[top]) if lat.orders[j] == pe]

    def g_permutes(self, a: int, b: int) -> bool:
        """A permutes with some G-conjugate of B."""
        lat = self.lat
        return any(lat.permutes(a, c) for c in lat.classes[lat.class_of[b]])

    def halls(self, Pi) -> list[int]:
        return [self.lat.idx(h) for h in hall_subgroups(self.G, Pi, self.sigma)]

    def nonempty_pis(self) -> list[frozenset]:
        bl = self.blocks
        return [frozenset(c) for k in range(1, len(bl) + 1) for c in itertools.combinations(bl, k)]

    def block_label(self, b: int) -> str:
        return "rest" if b == 0 else str(b)

    # cached searches used by several predicates
    @cached_property
    def l36_triples(self) -> list[tuple[frozenset, tuple[int, int, int]]]:
        """(Π, triple of proper Π-closed subgroups with pairwise σ-coprime
        indices), one triple per Π that admits one."""
        lat = self.lat
        if len(self.blocks) < 3:
            return []
        out = []
        proper = range(lat.top)
        idx_blocks = {i: sigma_of(self.sigma, self.G.order // lat.orders[i]) for i in proper}
        for Pi in self.nonempty_pis():
            closed = [i for i in proper if is_pi_closed(lat.sub(i), Pi, self.sigma)]
            # one representative per index-block set is enough
            reps: dict[frozenset, int] = {}
            for i in closed:
                reps.setdefault(idx_blocks[i], i)
            keys = sorted(reps, key=lambda k: (len(k), sorted(k)))
            found = None
            for a, b, c in itertools.combinations(keys, 3):
                if not (a & b or a & c or b & c):
                    found = (reps[a], reps[b], reps[c])
                    break
            if found:
                out.append((Pi, found))
        return out

    @cached_property
    def sylow_basis_list(self) -> list[tuple[int, ...]]:
        out = []
        for basis in sylow_bases(self.G, limit=SYLOW_BASIS_BUDGET + 1):
            out.append(tuple(self.lat.idx(x) for x in basis))
        if len(out) > SYLOW_BASIS_BUDGET:
            raise BudgetExceeded("Sylow basis enumeration budget exhausted")
        return out

    @cached_property
    def t110(self) -> dict:
        return _classify_t110(self)


# ---------------------------------------------------------------------------
# precondition predicates


def _has_sn_sigma_nilpotent(ctx: Context) -> bool:
    return any(is_sigma_nilpotent(ctx.lat.sub(i), ctx.sigma) for i in iter_bits(ctx.sn) if i)


def _qn_sigma_primary(ctx: Context) -> list[int]:
    return [i for i in iter_bits(ctx.qn) if i and is_sigma_primary(ctx.sigma, ctx.lat.orders[i])]


def _minimal_non_sigma_nilpotent(ctx: Context) -> bool:
    lat = ctx.lat
    return (not ctx.sigma_nilpotent
            and all(is_sigma_nilpotent(lat.sub(j), ctx.sigma) for j in lat.maximal[lat.top]))


def _sylows_abelian(ctx: Context) -> bool:
    return all(is_abelian(ctx.lat.sub(ctx.sylows(p)[0])) for p in ctx.pi)


def _c17_right(ctx: Context) -> bool:
    return ctx.schmidt and _sylows_abelian(ctx) and is_sigma_fiber(ctx.G, ctx.sigma)


def _c18_right(ctx: Context) -> bool:
    return ctx.supersoluble and ctx.m == 2


PRECONDITIONS: dict[str, Callable[[Context], bool]] = {
    "sigma_soluble": lambda c: c.sigma_soluble,
    "soluble_not_sigma_nilpotent": lambda c: c.soluble and not c.sigma_nilpotent,
    "sigma_soluble_nontrivial": lambda c: c.sigma_soluble and c.G.order > 1,
    "partition_finest": lambda c: c.finest,
    "sn_sigma_nilpotent_subgroup_exists": _has_sn_sigma_nilpotent,
    "sigma_soluble_with_coprime_pi_closed_triple": lambda c: c.sigma_soluble and bool(c.l36_triples),
    "finest_and_schmidt": lambda c: c.finest and c.schmidt,
    "sigma_soluble_minimal_non_sigma_nilpotent":
        lambda c: c.sigma_soluble and _minimal_non_sigma_nilpotent(c),
    "sigma_soluble_with_qn_sigma_primary_subgroup":
        lambda c: c.sigma_soluble and bool(_qn_sigma_primary(c)),
    "every_length3_chain_has_sn_entry": lambda c: c.f(3),
    "m_sigma_between_2_and_3": lambda c: 1 < c.m <= 3,
    "c17_either_side": lambda c: c.m == 2 or _c17_right(c),
    "c18_either_side": lambda c: c.mq == 2 or _c18_right(c),
    "finest_and_2max_quasinormal":
        lambda c: c.finest and all(
            (c.qn >> i) & 1 for i in iter_bits(c.lat.levels[2] if len(c.lat.levels) > 2 else 0)),
    "soluble_and_m_sigma_eq_pi": lambda c: c.soluble and c.G.order > 1 and c.m == len(c.pi),
    "soluble_and_type_i_or_ii":
        lambda c: c.soluble and (c.t110["type_i"] or c.t110["type_ii"]),
}


# ---------------------------------------------------------------------------
# the checks


def _pairs_closed(lat, bits: int) -> Optional[dict]:
    idx = list(iter_bits(bits))
    for a, b in itertools.combinations(idx, 2):
        for op, r in (("join", lat.join(a, b)), ("meet", lat.meet(a, b))):
            if not (bits >> r) & 1:
                return {"op": op, "a": _hex(lat.masks[a]), "b": _hex(lat.masks[b]),
                        "result": _hex(lat.masks[r])}
    return None


def check_p25(ctx: Context) -> Outcome:
    w = _pairs_closed(ctx.lat, ctx.sn)
    return Outcome(w is None, w)


def subnormal_bits(G: Group) -> int:
    """Classical subnormal subgroups via normal-closure descent."""
    hit = G._cache.get("subnormal_bits")
    if hit is None:
        from .lattice import lattice_of, whole
        lat = lattice_of(G)
        W = whole(G)
        hit = sum(1 << i for i in range(len(lat)) if is_subnormal(lat.sub(i), W))
        G._cache["subnormal_bits"] = hit
    return hit


def check_c26(ctx: Context) -> Outcome:
    if not ctx.finest:
        raise Skip("partition_finest")
    w = _pairs_closed(ctx.lat, subnormal_bits(ctx.G))
    return Outcome(w is None, w)


def check_l229(ctx: Context) -> Outcome:
    if not _has_sn_sigma_nilpotent(ctx):
        raise Skip("sn_sigma_nilpotent_subgroup_exists")
    lat, sigma = ctx.lat, ctx.sigma
    F = F_sigma(ctx.G, sigma).mask
    for i in iter_bits(ctx.sn):
        if i == 0:
            continue
        m = lat.masks[i]
        bl = sigma_of(sigma, lat.orders[i])
        if len(bl) == 1:
            (b,) = bl
            O = O_Pi(ctx.G, {b}, sigma).mask
            if m & ~O:
                return Outcome(False, {"subgroup": _hex(m), "block": ctx.block_label(b),
                                       "O_sigma_i": _hex(O)})
        if is_sigma_nilpotent(lat.sub(i), sigma) and m & ~F:
            return Outcome(False, {"subgroup": _hex(m), "F_sigma": _hex(F)})
    return Outcome(True)


def _require_sigma_soluble(ctx: Context):
    if not ctx.sigma_soluble:
        raise Skip("sigma_soluble")


def check_p32i(ctx: Context) -> Outcome:
    _require_sigma_soluble(ctx)
    lat = ctx.lat
    for j in lat.maximal[lat.top]:
        if not is_sigma_primary(ctx.sigma, ctx.G.order // lat.orders[j]):
            return Outcome(False, {"maximal": _hex(lat.masks[j])})
    return Outcome(True)


def check_p32ii(ctx: Context) -> Outcome:
    _require_sigma_soluble(ctx)
    lat = ctx.lat
    for b in ctx.blocks:
        if not any(is_pi_number(ctx.sigma, ctx.G.order // lat.orders[j], {b})
                   for j in lat.maximal[lat.top]):
            return Outcome(False, {"block": ctx.block_label(b)})
    return Outcome(True)


def _sylow_members(ctx: Context, h: int) -> list[int]:
    out = []
    for p in prime_factors(ctx.lat.orders[h]):
        out.extend(ctx.sylows(p, within=h))
    return out


def check_p32iii(ctx: Context) -> Outcome:
    _require_sigma_soluble(ctx)
    lat = ctx.lat
    bases = [tuple(lat.idx(x) for x in b) for b in sigma_basis_sets(ctx.G, ctx.sigma)]
    if not bases:
        return Outcome(False, {"reason": "no σ-basis"})
    good = None
    for basis in bases:
        ok = True
        for a, b in itertools.permutations(basis, 2):
            sa, sb = _sylow_members(ctx, a), _sylow_members(ctx, b)
            if not all(ctx.g_permutes(x, y) for x in sa for y in sb):
                ok = False
                break
        if ok:
            good = basis
            break
    if good is None:
        return Outcome(False, {"reason": "no σ-basis with G-permuting Sylow members",
                               "bases": len(bases)})
    # bonus: members forming an irreducible pair force an elementary abelian Sylow
    for basis in bases:
        for a, b in itertools.permutations(basis, 2):
            j = lat.join(a, b)
            if a in lat.maximal[j]:
                hb = lat.sub(b)
                n = lat.orders[b]
                pf = prime_factors(n)
                sylow = len(pf) == 1 and ctx.G.order % (n * next(iter(pf))) != 0
                if not (sylow and is_elementary_abelian(hb)):
                    return Outcome(False, {"irreducible_pair": [_hex(lat.masks[a]), _hex(lat.masks[b])],
                                           "reason": "second member not an elementary abelian Sylow"})
    return Outcome(True, {"basis": [_hex(lat.masks[i]) for i in good], "bases": len(bases)})


def _g_permutes_every_sylow(ctx: Context, h: int) -> Optional[int]:
    """A prime p such that H permutes with no Sylow p-subgroup, else None."""
    for p in ctx.pi:
        if not any(ctx.lat.permutes(h, s) for s in ctx.sylows(p)):
            return p
    return None


def check_p32iv(ctx: Context) -> Outcome:
    _require_sigma_soluble(ctx)
    lat = ctx.lat
    for Pi in ctx.nonempty_pis():
        halls = ctx.halls(Pi)
        if not halls:
            return Outcome(False, {"Pi": sorted(ctx.block_label(b) for b in Pi), "reason": "no Hall subgroup"})
        for h in halls:
            p = _g_permutes_every_sylow(ctx, h)
            if p is not None:
                return Outcome(False, {"hall": _hex(lat.masks[h]), "prime": p})
    return Outcome(True)


def check_p32v(ctx: Context) -> Outcome:
    _require_sigma_soluble(ctx)
    lat = ctx.lat
    for Pi in ctx.nonempty_pis():
        halls = ctx.halls(Pi)
        pisubs = [i for i in range(len(lat)) if is_pi_number(ctx.sigma, lat.orders[i], Pi)]
        found = False
        for e in halls:
            conj = lat.classes[lat.class_of[e]]
            covers = all(any(lat.contained(k, c) for c in conj) for k in pisubs)
            if covers and _g_permutes_every_sylow(ctx, e) is None:
                found = True
                break
        if not found:
            return Outcome(False, {"Pi": sorted(ctx.block_label(b) for b in Pi),
                                   "halls": len(halls)})
    return Outcome(True)


def check_p34(ctx: Context) -> Outcome:
    lat = ctx.lat
    s = ctx.s
    hall_sn = bool(ctx.blocks) is False or all(
        any(ctx.is_sn(lat.idx(h)) for h in hall_subgroups(ctx.G, {b}, ctx.sigma))
        for b in ctx.blocks)
    conds = {
        "sigma_nilpotent": ctx.sigma_nilpotent,
        "chief_factors_sigma_central": all_chief_factors_sigma_central(ctx.G, ctx.sigma),
        "hall_set_sigma_subnormal": hall_sn,
        "all_subgroups_sigma_subnormal": ctx.sn == (1 << len(lat)) - 1,
        "all_maximal_sigma_subnormal": all(ctx.is_sn(j) for j in lat.maximal[lat.top]),
    }
    ok = len(set(conds.values())) == 1
    return Outcome(ok, conds)


def check_l36(ctx: Context) -> Outcome:
    if not (ctx.sigma_soluble and ctx.l36_triples):
        raise Skip("sigma_soluble_with_coprime_pi_closed_triple")
    lat = ctx.lat
    for Pi, triple in ctx.l36_triples:
        if not is_pi_closed(ctx.G, Pi, ctx.sigma):
            return Outcome(False, {"Pi": sorted(ctx.block_label(b) for b in Pi),
                                   "triple": [_hex(lat.masks[i]) for i in triple]})
    return Outcome(True, {"instances": len(ctx.l36_triples)})


def check_l37(ctx: Context) -> Outcome:
    if not (ctx.finest and ctx.schmidt):
        raise Skip("finest_and_schmidt")
    G, lat = ctx.G, ctx.lat
    P = sigma_residual(G, SigmaPartition.finest())
    problems = []
    pf = prime_factors(P.order)
    if len(ctx.pi) != 2 or len(pf) != 1:
        return Outcome(False, {"reason": "nilpotent residual is not a p-group of a two-prime group",
                               "residual": _hex(P.mask)})
    (p,) = pf
    (q,) = [r for r in ctx.pi if r != p]
    if P.order != p ** prime_factors(G.order)[p]:
        problems.append("residual is not a Sylow subgroup")
    Qs = ctx.sylows(q)
    if not all(is_cyclic(lat.sub(j)) for j in Qs):
        problems.append("Sylow q-subgroup not cyclic")
    else:
        Q = lat.masks[Qs[0]]
        x = next(e for e in iter_bits(Q) if G.element_orders[e] == Q.bit_count())
        xq = x
        for _ in range(q - 1):
            xq = G.mul[xq][x]
        if G.cyclic_mask(xq) & ~frattini(G).mask:
            problems.append("<x^q> not in Φ(G)")
        if P.mask & Q != 1:
            problems.append("P ∩ Q != 1")
    phiP = frattini(P)
    if not _is_chief_factor(G, P, phiP):
        problems.append("P/Φ(P) not a chief factor")
    exp = max(G.element_orders[e] for e in iter_bits(P.mask))
    abelian = is_abelian(P)
    if not (exp == p or (p == 2 and not abelian and exp == 4)):
        problems.append(f"exponent {exp}")
    if abelian and phiP.order != 1:
        problems.append("P abelian but Φ(P) != 1")
    if problems:
        return Outcome(False, {"problems": problems, "P": _hex(P.mask)})
    return Outcome(True, {"p": p, "q": q, "P_order": P.order})


def check_c39(ctx: Context) -> Outcome:
    if not (ctx.sigma_soluble and _minimal_non_sigma_nilpotent(ctx)):
        raise Skip("sigma_soluble_minimal_non_sigma_nilpotent")
    fiber = is_sigma_fiber(ctx.G, ctx.sigma)
    ok = ctx.schmidt and fiber
    return Outcome(ok, None if ok else {"schmidt": ctx.schmidt, "sigma_fiber": fiber})


def check_l414(ctx: Context) -> Outcome:
    _require_sigma_soluble(ctx)
    bad = ctx.qn & ~ctx.sn
    if bad:
        i = next(iter_bits(bad))
        return Outcome(False, {"subgroup": _hex(ctx.lat.masks[i])})
    return Outcome(True)


def check_l415(ctx: Context) -> Outcome:
    cands = _qn_sigma_primary(ctx) if ctx.sigma_soluble else []
    if not cands:
        raise Skip("sigma_soluble_with_qn_sigma_primary_subgroup")
    lat = ctx.lat
    for i in cands:
        (b,) = sigma_of(ctx.sigma, lat.orders[i])
        O = O_upper(ctx.G, b, ctx.sigma).mask
        N = normalizer(ctx.G, lat.sub(i)).mask
        if O & ~N:
            return Outcome(False, {"subgroup": _hex(lat.masks[i]), "O_upper": _hex(O),
                                   "normalizer": _hex(N)})
    return Outcome(True, {"instances": len(cands)})


def check_tb_quotient(ctx: Context) -> Outcome:
    _require_sigma_soluble(ctx)
    lat, G = ctx.lat, ctx.G
    for i in iter_bits(ctx.qn):
        m = lat.masks[i]
        core = lat.masks[lat.core_in(i, lat.top)]
        H, emb = subgroup_as_group(G, m)
        local = 0
        for k, g in enumerate(emb):
            if (core >> g) & 1:
                local |= 1 << k
        Q, _ = quotient(H, local)
        if not is_sigma_nilpotent(Q, ctx.sigma):
            return Outcome(False, {"subgroup": _hex(m), "core": _hex(core)})
    return Outcome(True)


def check_l421(ctx: Context) -> Outcome:
    return Outcome(ctx.m <= ctx.mq, {"m_sigma": ctx.m, "m_sigma_q": ctx.mq})


def _require_soluble_non_sigma_nilpotent(ctx: Context):
    if not (ctx.soluble and not ctx.sigma_nilpotent):
        raise Skip("soluble_not_sigma_nilpotent")


def check_t12i(ctx: Context) -> Outcome:
    _require_soluble_non_sigma_nilpotent(ctx)
    lat = ctx.lat
    r = 0
    for b in ctx.blocks:
        classes = {lat.class_of[lat.idx(h)]: lat.idx(h)
                   for h in hall_subgroups(ctx.G, {b}, ctx.sigma)}
        # the trivial group would have rank 0; Hall members are never trivial here
        ranks = [rank(lat.sub(h)) for h in classes.values()]
        r = max(r, min(ranks))
    rG = rank(ctx.G)
    data = {"rank_G": rG, "r": r, "m_sigma_q": ctx.mq}
    return Outcome(rG <= ctx.mq + r - 2, data)


def check_t12ii(ctx: Context) -> Outcome:
    _require_sigma_soluble(ctx)
    return Outcome(ctx.l <= ctx.m, {"l_sigma": ctx.l, "m_sigma": ctx.m})


def check_t12iii(ctx: Context) -> Outcome:
    _require_soluble_non_sigma_nilpotent(ctx)
    return Outcome(len(ctx.pi) <= ctx.m, {"pi": len(ctx.pi), "m_sigma": ctx.m})


def check_t14i(ctx: Context) -> Outcome:
    if not ctx.f(3):
        raise Skip("every_length3_chain_has_sn_entry")
    return Outcome(ctx.sigma_soluble, None if ctx.sigma_soluble else {"sigma_soluble": False})


def check_t14ii(ctx: Context) -> Outcome:
    if not 1 < ctx.m <= 3:
        raise Skip("m_sigma_between_2_and_3")
    return Outcome(ctx.soluble, {"m_sigma": ctx.m})


def check_c17(ctx: Context) -> Outcome:
    left, right = ctx.m == 2, _c17_right(ctx)
    if not (left or right):
        raise Skip("c17_either_side")
    return Outcome(left == right, {"m_sigma_is_2": left, "schmidt_abelian_sylows_fiber": right})


def check_c18(ctx: Context) -> Outcome:
    left, right = ctx.mq == 2, _c18_right(ctx)
    if not (left or right):
        raise Skip("c18_either_side")
    return Outcome(left == right, {"m_sigma_q_is_2": left, "supersoluble_m_sigma_2": right})


def check_c19(ctx: Context) -> Outcome:
    if not PRECONDITIONS["finest_and_2max_quasinormal"](ctx):
        raise Skip("finest_and_2max_quasinormal")
    ok = ctx.supersoluble and (len(ctx.pi) <= 2 or ctx.nilpotent)
    return Outcome(ok, None if ok else {"supersoluble": ctx.supersoluble, "nilpotent": ctx.nilpotent})


def _irreducible(lat, a: int, b: int) -> bool:
    j = lat.join(a, b)
    return lat.permutes(a, b) and a in lat.maximal[j]


def _classify_t110(ctx: Context) -> dict:
    """Structure clauses of the m_σ = |π(G)| classification."""
    G, lat, sigma = ctx.G, ctx.lat, ctx.sigma
    out = {"type_i": G.order > 1 and len(ctx.pi) == 1, "type_ii": False, "type_ii_exists": False}
    if G.order == 1:
        return out
    clauses: dict = {}
    D = sigma_residual(G, sigma)
    clauses["D_abelian"] = is_abelian(D)
    clauses["D_hall"] = gcd(D.order, G.order // D.order) == 1
    comps = complements(G, D) if clauses["D_hall"] else []
    clauses["complement"] = bool(comps)
    nonsn = {p: [j for j in ctx.sylows(p) if not ctx.is_sn(j)] for p in ctx.pi}
    nonsn_primes = [p for p in ctx.pi if nonsn[p]]
    nonsn_all = [j for p in nonsn_primes for j in nonsn[p]]

    # (a) cyclic non-σ-subnormal Sylows with σ-subnormal maximal subgroup
    clauses["a_cyclic"] = all(is_cyclic(lat.sub(j)) and all(ctx.is_sn(k) for k in lat.maximal[j])
                              for j in nonsn_all)
    nonsn_set = set(nonsn_all)

    def basis_ok(basis) -> bool:
        for p1 in basis:
            if p1 not in nonsn_set:
                continue
            for pj in basis:
                if pj != p1 and not (is_elementary_abelian(lat.sub(pj)) and _irreducible(lat, p1, pj)):
                    return False
        return True
    bases = ctx.sylow_basis_list
    verdicts = [basis_ok(b) for b in bases]
    clauses["a_basis_all"] = all(verdicts)
    clauses["a_basis_exists"] = any(verdicts)
    hall_ok = True
    for b in ctx.blocks:
        for h in hall_subgroups(G, {b}, sigma):
            hi = lat.idx(h)
            big = [j for j in nonsn_all if lat.contained(j, hi)
                   and sum(prime_factors(lat.orders[j]).values()) > 1]
            if big:
                for b2 in ctx.blocks:
                    if b2 != b and not all(lat.normal[lat.idx(x)] for x in hall_subgroups(G, {b2}, sigma)):
                        hall_ok = False
    clauses["a_hall"] = hall_ok

    # (b) M has a non-σ-subnormal Sylow and acts irreducibly on each Sylow of D
    if comps:
        M = lat.idx(comps[0])
        msyl = [j for p in prime_factors(lat.orders[M]) for j in ctx.sylows(p, within=M)]
        clauses["b_nonsn_sylow"] = any(not ctx.is_sn(j) for j in msyl)
        mg = lat.gens(M)
        Di = lat.idx(D)
        irred = True
        for p in prime_factors(D.order):
            (Dp,) = ctx.sylows(p, within=Di)
            for k in iter_bits(lat.below[Dp]):
                if k != 0 and k != Dp and all(lat.conj(k, g) == k for g in mg):
                    irred = False
        clauses["b_irreducible"] = irred
    else:
        clauses["b_nonsn_sylow"] = clauses["b_irreducible"] = False

    # (c) two non-σ-subnormal Sylows for different primes force prime orders
    clauses["c"] = len(nonsn_primes) < 2 or all(lat.orders[j] in nonsn_primes for j in nonsn_all)

    # (d) normaliser index of the maximal subgroup of a non-σ-subnormal Sylow
    d_ok = True
    for j in nonsn_all:
        (p,) = prime_factors(lat.orders[j])
        b = sigma.block_of(p)
        for v in lat.maximal[j]:
            idx = G.order // normalizer(G, lat.sub(v)).order
            if not is_pi_number(sigma, idx, {b}):
                d_ok = False
    clauses["d"] = d_ok

    common = all(clauses[k] for k in ("D_abelian", "D_hall", "complement", "a_cyclic", "a_hall",
                                      "b_nonsn_sylow", "b_irreducible", "c", "d"))
    out["type_ii"] = common and clauses["a_basis_all"]
    out["type_ii_exists"] = common and clauses["a_basis_exists"]
    out["clauses"] = clauses
    out["sylow_bases"] = len(bases)
    return out


def check_t110_fwd(ctx: Context) -> Outcome:
    if not (ctx.soluble and ctx.G.order > 1 and ctx.m == len(ctx.pi)):
        raise Skip("soluble_and_m_sigma_eq_pi")
    c = ctx.t110
    ok = c["type_i"] or c["type_ii"]
    data = {"type_i": c["type_i"], "type_ii": c["type_ii"],
            "type_ii_exists_reading": c["type_ii_exists"], "clauses": c.get("clauses")}
    return Outcome(ok, data)


def check_t110_conv(ctx: Context) -> Outcome:
    if not ctx.soluble or not (ctx.t110["type_i"] or ctx.t110["type_ii"]):
        raise Skip("soluble_and_type_i_or_ii")
    ok = ctx.m == len(ctx.pi)
    c = ctx.t110
    data = {"m_sigma": ctx.m, "pi": len(ctx.pi), "type_i": c["type_i"], "type_ii": c["type_ii"],
            "exists_reading_consistent": (not c["type_ii_exists"]) or ok}
    return Outcome(ok, data)


def check_t71i(ctx: Context) -> Outcome:
    if not (ctx.sigma_soluble and ctx.G.order > 1):
        raise Skip("sigma_soluble_nontrivial")
    return Outcome(ctx.l <= ctx.h, {"l_sigma": ctx.l, "h_sigma": ctx.h})


def check_t71ii(ctx: Context) -> Outcome:
    _require_soluble_non_sigma_nilpotent(ctx)
    return Outcome(len(ctx.pi) <= ctx.h, {"pi": len(ctx.pi), "h_sigma": ctx.h})


CHECKS: dict[str, Callable[[Context], Outcome]] = {
    "P2.5": check_p25,
    "C2.6": check_c26,
    "L2.2.9": check_l229,
    "P3.2.i": check_p32i,
    "P3.2.ii": check_p32ii,
    "P3.2.iii": check_p32iii,
    "P3.2.iv": check_p32iv,
    "P3.2.v": check_p32v,
    "P3.4": check_p34,
    "L3.6": check_l36,
    "L3.7": check_l37,
    "C3.9": check_c39,
    "L4.1.4": check_l414,
    "L4.1.5": check_l415,
    "TB-quotient": check_tb_quotient,
    "L4.2.1": check_l421,
    "T1.2.i": check_t12i,
    "T1.2.ii": check_t12ii,
    "T1.2.iii": check_t12iii,
    "T1.4.i": check_t14i,
    "T1.4.ii": check_t14ii,
    "C1.7": check_c17,
    "C1.8": check_c18,
    "C1.9": check_c19,
    "T1.10.fwd": check_t110_fwd,
    "T1.10.conv": check_t110_conv,
    "T7.1.i": check_t71i,
    "T7.1.ii": check_t71ii,
}
assert tuple(CHECKS) == CHECK_IDS


def run_check(check: str, ctx: Context, fn: Optional[Callable] = None) -> CheckResult:
    fn = fn or CHECKS[check]
    base = dict(check=check, group=ctx.G.name, sigma=ctx.sigma.describe())
    try:
        out = fn(ctx)
    except Skip as sk:
        return CheckResult(status="skipped", precondition=sk.precondition, **base)
    except (HallSetCapExceeded, SubgroupCapExceeded, BudgetExceeded) as exc:
        return CheckResult(status="capped", details={"reason": str(exc)}, **base)
    if out.ok:
        return CheckResult(status="pass", details=out.data, **base)
    return CheckResult(status="fail", witness=out.data or {}, **base)


def verify_group(G: Group, sigma: SigmaPartition,
                 checks: Optional[Iterable[str]] = None) -> list[CheckResult]:
    ctx = Context(G, sigma)
    ids = list(checks) if checks is not None else list(CHECK_IDS)
    return sorted((run_check(c, ctx) for c in ids), key=lambda r: r.check)


def revalidate(result: CheckResult, G: Group, sigma: SigmaPartition,
               fn: Optional[Callable] = None) -> bool:
    """Rebuild the group from its multiplication table alone, rerun the
    check and confirm it fails again with the same witness."""
    fresh = build_from_cayley([list(r) for r in G.mul], name=G.name)
    again = run_check(result.check, Context(fresh, sigma), fn)
    return again.status == "fail" and again.witness == result.witness


def precondition_holds(name: str, G: Group, sigma: SigmaPartition) -> bool:
    return PRECONDITIONS[name](Context(G, sigma))


# ---------------------------------------------------------------------------
# invariants table


def invariant_row(G: Group, sigma: SigmaPartition) -> dict:
    ctx = Context(G, sigma)
    inv = ctx.s.invariants()
    npi = len(ctx.pi)
    row = {
        "group": G.name, "sigma": sigma.describe(), "order": G.order, "pi": ctx.pi,
        "sigma_G": len(ctx.blocks),
        "soluble": ctx.soluble, "sigma_soluble": ctx.sigma_soluble,
        "sigma_nilpotent": ctx.sigma_nilpotent,
        "m_sigma": inv.m_sigma, "m_sigma_q": inv.m_sigma_q, "h_sigma": inv.spencer_height,
        "l_sigma": ctx.l, "h_monotone": inv.monotonicity_flag,
        "m_sigma_q_monotone": inv.m_sigma_q_monotone,
        "no_complete_hall_set": inv.no_complete_hall_set,
        "pi_minus_m_sigma": npi - inv.m_sigma, "pi_minus_h_sigma": npi - inv.spencer_height,
    }
    return row


# ---------------------------------------------------------------------------
# corpus runs


@dataclass
class VerifyConfig:
    max_order: int = 120
    jobs: int = 1
    checks: Optional[tuple[str, ...]] = None
    selectors: tuple[str, ...] = ("finest",)
    corpus: str = "builtin"
    timestamp: bool = True


@dataclass
class Report:
    version: str
    config: dict
    results: list[CheckResult]
    invariants: list[dict]
    errors: list[dict]
    excluded: list[dict]
    timestamp: Optional[str] = None

    @property
    def summary(self) -> dict:
        counts = {s: 0 for s in STATUSES}
        for r in self.results:
            counts[r.status] += 1
        counts["errors"] = len(self.errors)
        counts["total"] = len(self.results)
        return counts

    def failed(self) -> bool:
        return any(r.status == "fail" for r in self.results)

    def to_dict(self, with_timestamp: bool = True) -> dict:
        d = {
            "schema": SCHEMA,
            "tool": "sigmasub",
            "version": self.version,
            "config": self.config,
            "summary": self.summary,
            "results": [r.to_json() for r in self.results],
            "invariants": self.invariants,
            "errors": self.errors,
            "excluded": self.excluded,
        }
        if with_timestamp and self.timestamp is not None:
            d["timestamp"] = self.timestamp
        return d

    def to_json(self, with_timestamp: bool = True) -> str:
        return json.dumps(self.to_dict(with_timestamp), sort_keys=True, indent=1,
                          ensure_ascii=False) + "\n"


def _verify_entry(entry: CorpusEntry, selectors: tuple, max_order: int,
                  checks: Optional[tuple[str, ...]]) -> dict:
    try:
        G = entry.build()
    except GroupError as exc:
        return {"error": {"entry": entry.name, "error": f"{type(exc).__name__}: {exc}"}}
    if G.order > max_order:
        return {"excluded": {"entry": entry.name, "order": G.order}}
    try:
        results, rows = [], []
        for sp in partitions_for(G, selectors):
            results.extend(verify_group(G, sp, checks))
            rows.append(invariant_row(G, sp))
    except GroupError as exc:
        return {"error": {"entry": entry.name, "error": f"{type(exc).__name__}: {exc}"}}
    return {"results": results, "rows": rows}


def verify_corpus(entries: list[CorpusEntry], selectors: list[PartitionSelector],
                  config: Optional[VerifyConfig] = None) -> Report:
    config = config or VerifyConfig()
    sel = tuple(selectors)
    args = [(e, sel, config.max_order, config.checks) for e in entries]
    if config.jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            outs = list(pool.map(_verify_entry, *zip(*args)))
    else:
        outs = [_verify_entry(*a) for a in args]
    results: list[CheckResult] = []
    rows, errors, excluded = [], [], []
    for o in outs:
        if "error" in o:
            errors.append(o["error"])
        elif "excluded" in o:
            excluded.append(o["excluded"])
        else:
            results.extend(o["results"])
            rows.extend(o["rows"])
    results.sort(key=lambda r: (r.group, r.sigma, r.check))
    rows.sort(key=lambda r: (r["group"], r["sigma"]))
    errors.sort(key=lambda e: e["entry"])
    excluded.sort(key=lambda e: e["entry"])
    cfg = asdict(config)
    cfg.pop("jobs")  # worker count must not change the report
    cfg.pop("timestamp")
    cfg["checks"] = list(config.checks) if config.checks else None
    cfg["selectors"] = list(config.selectors)
    stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds") if config.timestamp else None
    return Report(__version__, cfg, results, rows, errors, excluded, stamp)


# ---------------------------------------------------------------------------
# DOT export

MARKS = ("normal", "sigma-subnormal", "sigma-quasinormal")


def export_dot(G: Group, sigma: SigmaPartition, mark: Iterable[str] = ()) -> str:
    """Hasse diagram.  Node labels are ``order:count-index``: the subgroup
    order, how many subgroups have that order, and the 1-based position of
    this one among them (lattice order)."""
    mark = set(mark)
    unknown = mark - set(MARKS)
    if unknown:
        raise ValueError(f"unknown mark(s): {', '.join(sorted(unknown))}")
    s = analysis(G, sigma)
    lat = s.lat
    flags = {
        "normal": sum(1 << i for i in range(len(lat)) if lat.normal[i]),
        "sigma-subnormal": s.sn_bits() if "sigma-subnormal" in mark else 0,
        "sigma-quasinormal": s.qn_bits() if "sigma-quasinormal" in mark else 0,
    }
    per_order: dict[int, int] = {}
    for o in lat.orders:
        per_order[o] = per_order.get(o, 0) + 1
    seen: dict[int, int] = {}
    lines = [f'digraph "{G.name}" {{', "  rankdir=BT;", "  node [shape=box];"]
    for i, o in enumerate(lat.orders):
        seen[o] = seen.get(o, 0) + 1
        classes = [f for f in MARKS if f in mark and (flags[f] >> i) & 1]
        attrs = [f'label="{o}:{per_order[o]}-{seen[o]}"']
        if classes:
            attrs.append(f'class="{" ".join(classes)}"')
            attrs.append("penwidth=2")
        lines.append(f"  n{i} [{', '.join(attrs)}];")
    for i in range(len(lat)):
        for j in lat.maximal[i]:
            lines.append(f"  n{j} -> n{i};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def marked_nodes(dot: str, flag: str) -> int:
    """Number of nodes of an exported diagram carrying the given mark."""
    n = 0
    for line in dot.splitlines():
        if 'class="' in line:
            n += flag in line.split('class="', 1)[1].split('"', 1)[0].split()
    return n
