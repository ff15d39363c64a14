"""Subgroup lattice enumeration and classical subgroup calculus.

Everything here works on bit-masks over the element indices of a
:class:`~sigmasub.group.Group`; :class:`Subgroup` is a thin handle pairing
a mask with its ambient group.  The :class:`Lattice` of a group is built
once and cached on the group (see :func:`lattice_of`).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Union

from .errors import (
    NotContained,
    NotFound,
    NotNormal,
    NotNormalSection,
    NotSoluble,
    SubgroupCapExceeded,
    TrivialGroup,
)
from .group import Group, iter_bits, prime_factors, subgroup_as_group

DEFAULT_SUBGROUP_CAP = 20000


@dataclass(frozen=True, eq=False)
class Subgroup:
    group: Group = field(repr=False)
    mask: int

    @property
    def order(self) -> int:
        return self.mask.bit_count()

    def __eq__(self, other):
        return (isinstance(other, Subgroup) and other.group is self.group
                and other.mask == self.mask)

    def __hash__(self):
        return hash((id(self.group), self.mask))

    def __contains__(self, x: int) -> bool:
        return bool((self.mask >> x) & 1)

    def __le__(self, other: "Subgroup") -> bool:
        return self.mask & ~other.mask == 0

    def __lt__(self, other: "Subgroup") -> bool:
        return self <= other and self.mask != other.mask

    def elements(self) -> list[int]:
        return list(iter_bits(self.mask))

    def __repr__(self):
        return f"Subgroup(order={self.order}, mask={self.mask:#x})"


GroupLike = Union[Group, Subgroup]


def _split(X: GroupLike) -> tuple[Group, int]:
    if isinstance(X, Subgroup):
        return X.group, X.mask
    return X, X.full_mask


def whole(G: Group) -> Subgroup:
    return Subgroup(G, G.full_mask)


def trivial(G: Group) -> Subgroup:
    return Subgroup(G, 1)


def as_group(X: GroupLike) -> Group:
    """Materialise a subgroup as a standalone group (groups pass through)."""
    if isinstance(X, Group):
        return X
    if X.mask == X.group.full_mask:
        return X.group
    return subgroup_as_group(X.group, X.mask)[0]


# ---------------------------------------------------------------------------
# the lattice


class Lattice:
    """All subgroups of a group, sorted by ``(order, mask)``.

    Attributes
    ----------
    masks : list of int
        subgroup masks; index 0 is the trivial subgroup, the last is G.
    maximal : list of list of int
        ``maximal[i]`` are the indices of the maximal subgroups of subgroup i
        (the Hasse edges below i).
    normal : list of bool
    classes : list of list of int
        conjugacy classes of subgroups (under G).
    """

    def __init__(self, G: Group, masks: list[int], gens: dict[int, tuple[int, ...]]):
        self.group = G
        masks = sorted(masks, key=lambda m: (m.bit_count(), m))
        self.masks = masks
        self.orders = [m.bit_count() for m in masks]
        self.index = {m: i for i, m in enumerate(masks)}
        self._gens = gens
        n = len(masks)

        # below[i]: bitset over subgroup indices contained in subgroup i
        below = [0] * n
        for i, m in enumerate(masks):
            b = 1 << i
            for j in range(i):
                if masks[j] & ~m == 0:
                    b |= 1 << j
            below[i] = b
        self.below = below

        maximal: list[list[int]] = []
        for i, m in enumerate(masks):
            found: list[int] = []
            cand = sorted(iter_bits(below[i] & ~(1 << i)), key=lambda j: -self.orders[j])
            for j in cand:
                mj = masks[j]
                if not any(mj & ~masks[k] == 0 for k in found):
                    found.append(j)
            maximal.append(sorted(found))
        self.maximal = maximal
        self.maximal_bits = [sum(1 << j for j in mx) for mx in maximal]

        self._conj_cache: dict[tuple[int, int], int] = {}
        self._join_cache: dict[tuple[int, int], int] = {}
        ggens = G.generators_of(G.full_mask)
        class_of = [-1] * n
        classes: list[list[int]] = []
        for i in range(n):
            if class_of[i] >= 0:
                continue
            orbit = self._orbit(i, ggens)
            for j in orbit:
                class_of[j] = len(classes)
            classes.append(sorted(orbit))
        self.classes = classes
        self.class_of = class_of
        self.normal = [len(classes[class_of[i]]) == 1 for i in range(n)]

    def __len__(self):
        return len(self.masks)

    @property
    def top(self) -> int:
        return len(self.masks) - 1

    def sub(self, i: int) -> Subgroup:
        return Subgroup(self.group, self.masks[i])

    def subgroups(self) -> list[Subgroup]:
        return [self.sub(i) for i in range(len(self.masks))]

    def idx(self, X) -> int:
        mask = X if isinstance(X, int) else X.mask
        return self.index[mask]

    def gens(self, i: int) -> tuple[int, ...]:
        m = self.masks[i]
        g = self._gens.get(m)
        if g is None:
            g = self.group.generators_of(m)
            self._gens[m] = g
        return g

    def conj(self, i: int, g: int) -> int:
        key = (i, g)
        j = self._conj_cache.get(key)
        if j is None:
            j = self.index[self.group.conjugate_mask(self.masks[i], g)]
            self._conj_cache[key] = j
        return j

    def _orbit(self, i: int, gens) -> list[int]:
        seen = {i}
        queue = [i]
        for a in queue:
            for g in gens:
                b = self.conj(a, g)
                if b not in seen:
                    seen.add(b)
                    queue.append(b)
        return queue

    def orbit_under(self, i: int, k: int) -> list[int]:
        """Conjugates of subgroup i under elements of subgroup k."""
        return self._orbit(i, self.gens(k))

    def is_normal_in(self, i: int, k: int) -> bool:
        return all(self.conj(i, g) == i for g in self.gens(k))

    def core_in(self, i: int, k: int) -> int:
        m = self.group.full_mask
        for j in self.orbit_under(i, k):
            m &= self.masks[j]
        return self.index[m]

    def join(self, i: int, j: int) -> int:
        if i > j:
            i, j = j, i
        key = (i, j)
        k = self._join_cache.get(key)
        if k is None:
            k = self._scan_join(i, j)
            self._join_cache[key] = k
        return k

    def _scan_join(self, i: int, j: int) -> int:
        # subgroups are sorted by order, so the first one above both is the join
        want = self.masks[i] | self.masks[j]
        for k in range(j, len(self.masks)):
            if want & ~self.masks[k] == 0:
                return k
        raise AssertionError("unreachable: G contains everything")

    def permutes(self, i: int, j: int) -> bool:
        """AB = BA iff |<A, B>| |A ∩ B| = |A| |B|."""
        return (self.orders[self.join(i, j)] * self.orders[self.meet(i, j)]
                == self.orders[i] * self.orders[j])

    def meet(self, i: int, j: int) -> int:
        return self.index[self.masks[i] & self.masks[j]]

    def contained(self, i: int, k: int) -> bool:
        return bool((self.below[k] >> i) & 1)

    # n-maximal levels
    @property
    def levels(self) -> list[int]:
        """``levels[n]`` is the bitset of n-maximal subgroups (``levels[0]``
        is {G}); the list stops before the first empty level."""
        lv = getattr(self, "_levels", None)
        if lv is None:
            lv = [1 << self.top]
            while True:
                nxt = 0
                for i in iter_bits(lv[-1]):
                    nxt |= self.maximal_bits[i]
                if not nxt:
                    break
                lv.append(nxt)
            self._levels = lv
        return lv

    @property
    def height(self) -> int:
        """Length of the longest maximal chain of G."""
        return len(self.levels) - 1

    def normal_indices(self) -> list[int]:
        return [i for i in range(len(self.masks)) if self.normal[i]]


def enumerate_subgroups(G: Group, cap: int = DEFAULT_SUBGROUP_CAP) -> Lattice:
    """All subgroups of G: cyclic subgroups, closed under joining with a
    cyclic subgroup until nothing new appears."""
    cyclic: dict[int, int] = {}
    for x in range(G.order):
        cyclic.setdefault(G.cyclic_mask(x), x)
    cyc = sorted(cyclic.items(), key=lambda t: (t[0].bit_count(), t[0]))
    found: dict[int, tuple[int, ...]] = {m: ((x,) if x else ()) for m, x in cyc}
    if len(found) > cap:
        raise SubgroupCapExceeded(f"more than {cap} subgroups")
    queue = list(found)
    while queue:
        h = queue.pop()
        hg = found[h]
        for cm, c in cyc:
            if cm & ~h == 0:
                continue
            j = G.closure(hg + (c,), h)
            if j not in found:
                found[j] = hg + (c,)
                queue.append(j)
                if len(found) > cap:
                    raise SubgroupCapExceeded(f"more than {cap} subgroups")
    return Lattice(G, list(found), dict(found))


def lattice_of(G: Group) -> Lattice:
    lat = G._cache.get("lattice")
    if lat is None:
        lat = enumerate_subgroups(G)
        G._cache["lattice"] = lat
    return lat


def subgroups_by_subset_filter(G: Group) -> set[int]:
    """Independent oracle: test every subset containing the identity for
    closure.  Only usable for tiny groups (2**(n-1) subsets)."""
    out = set()
    rest = G.order - 1
    for bits in range(1 << rest):
        mask = (bits << 1) | 1
        if G.is_closed(mask):
            out.add(mask)
    return out


# ---------------------------------------------------------------------------
# subgroup calculus


def _require_le(H: Subgroup, K: Subgroup):
    if not H <= K:
        raise NotContained(f"{H} is not contained in {K}")


def _sub_gens(S: Subgroup) -> tuple[int, ...]:
    return S.group.generators_of(S.mask)


def is_normal(H: Subgroup, K: Subgroup) -> bool:
    _require_le(H, K)
    G = H.group
    return all(G.conjugate_mask(H.mask, k) == H.mask for k in _sub_gens(K))


def _orbit_masks(G: Group, mask: int, gens) -> list[int]:
    seen = {mask}
    queue = [mask]
    for m in queue:
        for g in gens:
            c = G.conjugate_mask(m, g)
            if c not in seen:
                seen.add(c)
                queue.append(c)
    return queue


def core(H: Subgroup, K: Subgroup) -> Subgroup:
    """Largest normal subgroup of K inside H."""
    _require_le(H, K)
    m = H.mask
    for c in _orbit_masks(H.group, H.mask, _sub_gens(K)):
        m &= c
    return Subgroup(H.group, m)


def normal_closure(H: Subgroup, K: Subgroup) -> Subgroup:
    _require_le(H, K)
    G = H.group
    m = 0
    for c in _orbit_masks(G, H.mask, _sub_gens(K)):
        m |= c
    return Subgroup(G, G.closure(iter_bits(m)))


def normalizer(G: Group, H: Subgroup) -> Subgroup:
    m = 0
    for g in range(G.order):
        if G.conjugate_mask(H.mask, g) == H.mask:
            m |= 1 << g
    return Subgroup(G, m)


def centralizer(G: Group, H: Subgroup) -> Subgroup:
    gens = _sub_gens(H)
    m = 0
    for g in range(G.order):
        if all(G.mul[g][h] == G.mul[h][g] for h in gens):
            m |= 1 << g
    return Subgroup(G, m)


def centralizer_of_section(G: Group, H: Subgroup, K: Subgroup) -> Subgroup:
    """``C_G(H/K) = {g : [g, h] in K for all h in H}``."""
    if not K <= H or not is_normal(K, H):
        raise NotNormalSection("K must be a normal subgroup of H")
    helems = H.elements()
    m = 0
    for g in range(G.order):
        if all((K.mask >> G.commutator(g, h)) & 1 for h in helems):
            m |= 1 << g
    return Subgroup(G, m)


def product_set(A: Subgroup, B: Subgroup) -> int:
    G = A.group
    out = 0
    bel = B.elements()
    for a in A.elements():
        row = G.mul[a]
        for b in bel:
            out |= 1 << row[b]
    return out


def product_and_permutes(A: Subgroup, B: Subgroup) -> tuple[int, bool]:
    """``(mask of AB, AB == BA)``."""
    ab = product_set(A, B)
    return ab, ab == product_set(B, A)


def join(A: Subgroup, B: Subgroup) -> Subgroup:
    G = A.group
    return Subgroup(G, G.closure(_sub_gens(B), A.mask))


def meet(A: Subgroup, B: Subgroup) -> Subgroup:
    return Subgroup(A.group, A.mask & B.mask)


def permutes(A: Subgroup, B: Subgroup) -> bool:
    return join(A, B).order * meet(A, B).order == A.order * B.order


def n_maximal_subgroups(lat: Lattice, n: int) -> list[Subgroup]:
    if n < 1:
        raise ValueError("n must be >= 1")
    lv = lat.levels
    if n >= len(lv):
        return []
    return [lat.sub(i) for i in iter_bits(lv[n])]


def count_maximal_chains(lat: Lattice, n: int) -> int:
    """Number of maximal chains of length n from G (memoised per node)."""
    memo: dict[tuple[int, int], int] = {}

    def count(i, k):
        if k == 0:
            return 1
        key = (i, k)
        if key not in memo:
            memo[key] = sum(count(j, k - 1) for j in lat.maximal[i])
        return memo[key]
    return count(lat.top, n)


def maximal_chains(lat: Lattice, n: int) -> list[tuple[int, ...]]:
    return list(iter_maximal_chains(lat, n))


def iter_maximal_chains(lat: Lattice, n: int) -> Iterator[tuple[int, ...]]:
    """Lazily yield every chain ``G = M_0 > M_1 > ... > M_n`` (as lattice
    indices, ``M_0`` first) whose steps are maximal subgroups."""
    if n < 0:
        return

    def walk(path):
        if len(path) == n + 1:
            yield tuple(path)
            return
        for j in lat.maximal[path[-1]]:
            path.append(j)
            yield from walk(path)
            path.pop()
    yield from walk([lat.top])


# ---- normal structure ------------------------------------------------------


def normal_subgroups(G: Group) -> list[Subgroup]:
    lat = lattice_of(G)
    return [lat.sub(i) for i in lat.normal_indices()]


def minimal_normal_subgroups(G: Group) -> list[Subgroup]:
    lat = lattice_of(G)
    nrm = [i for i in lat.normal_indices() if i != 0]
    out = []
    for i in nrm:
        if not any(j != i and lat.contained(j, i) for j in nrm):
            out.append(lat.sub(i))
    return out


@dataclass(frozen=True)
class ChiefSeries:
    chain: tuple[Subgroup, ...]

    @property
    def factor_orders(self) -> tuple[int, ...]:
        return tuple(b.order // a.order for a, b in zip(self.chain, self.chain[1:]))


def chief_series(G: Group, pick: str = "first") -> ChiefSeries:
    """Ascending chief series ``1 = N_0 < ... < N_r = G``.

    Each step picks a minimal normal subgroup of G strictly above the current
    term; ``pick="last"`` takes the last candidate in lattice order instead of
    the first, which gives a second, independently chosen series.
    """
    if G.order == 1:
        raise TrivialGroup("the trivial group has no chief factors")
    lat = lattice_of(G)
    nrm = lat.normal_indices()
    cur = 0
    chain = [cur]
    while cur != lat.top:
        above = [j for j in nrm if j != cur and lat.contained(cur, j)]
        minimal = [j for j in above
                   if not any(k != j and lat.contained(k, j) for k in above)]
        cur = minimal[0] if pick == "first" else minimal[-1]
        chain.append(cur)
    return ChiefSeries(tuple(lat.sub(i) for i in chain))


def chief_factor_orders(G: Group) -> tuple[int, ...]:
    if G.order == 1:
        return ()
    key = "chief_orders"
    hit = G._cache.get(key)
    if hit is None:
        hit = chief_series(G).factor_orders
        G._cache[key] = hit
    return hit


def _commutator_mask(G: Group, a: int, b: int) -> int:
    """Mask of [A, B] for subgroup masks a, b."""
    comms = set()
    ael, bel = list(iter_bits(a)), list(iter_bits(b))
    for x in ael:
        for y in bel:
            comms.add(G.commutator(x, y))
    return G.closure(comms)


def derived_subgroup(X: GroupLike) -> Subgroup:
    G, m = _split(X)
    return Subgroup(G, _commutator_mask(G, m, m))


def derived_series(X: GroupLike) -> list[Subgroup]:
    G, m = _split(X)
    out = [Subgroup(G, m)]
    while True:
        d = _commutator_mask(G, m, m)
        if d == m:
            return out
        out.append(Subgroup(G, d))
        m = d


def is_soluble(X: GroupLike) -> bool:
    return derived_series(X)[-1].mask == 1


def _p_elements(G: Group, m: int, p: int) -> int:
    orders = G.element_orders
    return sum(1 for x in iter_bits(m) if set(prime_factors(orders[x])) <= {p})


def is_nilpotent(X: GroupLike) -> bool:
    """Every Sylow subgroup is normal, i.e. the p-elements of X number
    exactly |X|_p for every prime p."""
    G, m = _split(X)
    n = m.bit_count()
    for p, e in prime_factors(n).items():
        if _p_elements(G, m, p) != p ** e:
            return False
    return True


def is_abelian(X: GroupLike) -> bool:
    G, m = _split(X)
    gens = G.generators_of(m)
    return all(G.mul[a][b] == G.mul[b][a] for a, b in itertools.combinations(gens, 2))


def is_cyclic(X: GroupLike) -> bool:
    G, m = _split(X)
    n = m.bit_count()
    return any(G.element_orders[x] == n for x in iter_bits(m))


def is_elementary_abelian(X: GroupLike) -> bool:
    G, m = _split(X)
    n = m.bit_count()
    if n == 1:
        return True
    pf = prime_factors(n)
    if len(pf) != 1:
        return False
    (p,) = pf
    return is_abelian(X) and all(G.element_orders[x] == p for x in iter_bits(m) if x)


def is_p_group(X: GroupLike) -> bool:
    _, m = _split(X)
    return len(prime_factors(m.bit_count())) <= 1


def is_supersoluble(X: GroupLike) -> bool:
    """All chief factors of prime order (classical criterion)."""
    H = as_group(X)
    return all(len(prime_factors(f)) == 1 and sum(prime_factors(f).values()) == 1
               for f in chief_factor_orders(H))


def center(X: GroupLike) -> Subgroup:
    G, m = _split(X)
    gens = G.generators_of(m)
    z = 0
    for x in iter_bits(m):
        if all(G.mul[x][g] == G.mul[g][x] for g in gens):
            z |= 1 << x
    return Subgroup(G, z)


def frattini(X: GroupLike) -> Subgroup:
    G, m = _split(X)
    lat = lattice_of(G)
    i = lat.index[m]
    out = m
    for j in lat.maximal[i]:
        out &= lat.masks[j]
    return Subgroup(G, out)


def sylow_subgroups(X: GroupLike, p: int) -> list[Subgroup]:
    G, m = _split(X)
    lat = lattice_of(G)
    n = m.bit_count()
    pe = p ** prime_factors(n).get(p, 0)
    i = lat.index[m]
    return [lat.sub(j) for j in iter_bits(lat.below[i]) if lat.orders[j] == pe]


def sylow_bases(G: Group, limit: int | None = None) -> Iterator[tuple[Subgroup, ...]]:
    """Every family of one Sylow subgroup per prime of |G| that pairwise
    permute, by backtracking (primes ascending)."""
    lat = lattice_of(G)
    primes = sorted(prime_factors(G.order))
    choices = [[lat.idx(s) for s in sylow_subgroups(G, p)] for p in primes]
    produced = 0

    def rec(k, picked):
        nonlocal produced
        if limit is not None and produced >= limit:
            return
        if k == len(choices):
            produced += 1
            yield tuple(lat.sub(i) for i in picked)
            return
        for c in choices[k]:
            if all(lat.permutes(c, q) for q in picked):
                picked.append(c)
                yield from rec(k + 1, picked)
                picked.pop()
    yield from rec(0, [])


def sylow_basis(G: Group) -> list[Subgroup]:
    for basis in sylow_bases(G, limit=1):
        return list(basis)
    raise NotFound(f"{G.name} has no Sylow basis")


def complements(G: Group, N: Subgroup) -> list[Subgroup]:
    if not is_normal(N, whole(G)):
        raise NotNormal("complements needs a normal subgroup")
    lat = lattice_of(G)
    want = G.order // N.order
    return [lat.sub(i) for i in range(len(lat)) if lat.orders[i] == want
            and lat.masks[i] & N.mask == 1]


def rank(X: GroupLike) -> int:
    H = as_group(X)
    if H.order == 1:
        raise TrivialGroup("rank of the trivial group is undefined")
    if not is_soluble(H):
        raise NotSoluble(f"{H.name} is not soluble")
    return max(sum(prime_factors(f).values()) for f in chief_factor_orders(H))


def is_schmidt(X: GroupLike) -> bool:
    G, m = _split(X)
    if is_nilpotent(X):
        return False
    lat = lattice_of(G)
    return all(is_nilpotent(lat.sub(j)) for j in lat.maximal[lat.index[m]])


def is_irreducible_pair(A: Subgroup, B: Subgroup) -> bool:
    lat = lattice_of(A.group)
    a, b = lat.idx(A), lat.idx(B)
    j = lat.join(a, b)
    if lat.orders[j] * lat.orders[lat.meet(a, b)] != lat.orders[a] * lat.orders[b]:
        return False
    return a in lat.maximal[j]


def is_subnormal(H: Subgroup, K: GroupLike) -> bool:
    """Normal-closure descent: K = H0 >= H1 >= ... with H_{i+1} the normal
    closure of H in H_i; H is subnormal iff the descent reaches H."""
    if isinstance(K, Group):
        K = whole(K)
    _require_le(H, K)
    cur = K
    while True:
        nxt = normal_closure(H, cur)
        if nxt == H:
            return True
        if nxt == cur:
            return False
        cur = nxt
