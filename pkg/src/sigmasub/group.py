"""Finite groups as validated multiplication tables.

Elements are dense indices ``0..n-1`` with the identity always at 0.
Subsets of a group are Python ints used as bit-masks (bit ``x`` set means
element ``x`` is present); most hot loops in the package work on masks.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import (
    InvalidAction,
    InvalidPermutation,
    MalformedTable,
    NoIdentity,
    NoInverse,
    NotAssociative,
    NotNormal,
    OrderCapExceeded,
    ParseError,
    ValidationError,
)

DEFAULT_ORDER_CAP = 2000


def iter_bits(mask: int):
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def prime_factors(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_prime(n: int) -> bool:
    return n >= 2 and prime_factors(n) == {n: 1}


class Group:
    """A finite group given by its Cayley table.

    Instances are treated as immutable.  Derived data (element orders,
    conjugation table, the subgroup lattice, ...) is cached on the instance.
    """

    def __init__(self, mul: Sequence[Sequence[int]], name: str = "G"):
        self.mul: tuple[tuple[int, ...], ...] = tuple(tuple(row) for row in mul)
        self.order = len(self.mul)
        self.name = name
        self.identity = 0
        inv = [0] * self.order
        for x, row in enumerate(self.mul):
            inv[x] = row.index(0)
        self.inv: tuple[int, ...] = tuple(inv)
        # per-instance memo for analyses living in other modules
        self._cache: dict = {}

    def __repr__(self):
        return f"Group({self.name!r}, order={self.order})"

    def __len__(self):
        return self.order

    @property
    def full_mask(self) -> int:
        return (1 << self.order) - 1

    @cached_property
    def element_orders(self) -> tuple[int, ...]:
        out = []
        for x in range(self.order):
            k, y = 1, x
            while y != 0:
                y = self.mul[y][x]
                k += 1
            out.append(k)
        return tuple(out)

    @cached_property
    def conj_table(self) -> tuple[tuple[int, ...], ...]:
        """``conj_table[g][x] == g * x * g^-1``."""
        mul, inv = self.mul, self.inv
        return tuple(
            tuple(mul[mul[g][x]][inv[g]] for x in range(self.order))
            for g in range(self.order)
        )

    def commutator(self, g: int, h: int) -> int:
        mul, inv = self.mul, self.inv
        return mul[mul[g][h]][mul[inv[g]][inv[h]]]

    @cached_property
    def is_abelian(self) -> bool:
        return all(self.mul[a][b] == self.mul[b][a]
                   for a in range(self.order) for b in range(a))

    # ---- mask helpers -------------------------------------------------

    def elements(self, mask: int) -> list[int]:
        return list(iter_bits(mask))

    def closure(self, gens: Iterable[int], start: int = 1) -> int:
        """Mask of the subgroup generated by ``gens`` together with the
        elements of ``start`` (which must itself be a subgroup mask)."""
        gens = [g for g in gens if g != 0 and not (start >> g) & 1]
        if not gens:
            return start
        if start != 1:
            # right multiplication by gens alone would only give start*<gens>
            gens += self.generators_of(start)
        mul = self.mul
        seen = start
        frontier = list(iter_bits(start))
        i = 0
        while i < len(frontier):
            x = frontier[i]
            i += 1
            row = mul[x]
            for g in gens:
                y = row[g]
                if not (seen >> y) & 1:
                    seen |= 1 << y
                    frontier.append(y)
        return seen

    def generators_of(self, mask: int) -> tuple[int, ...]:
        """A small generating set of the subgroup ``mask`` (greedy by
        descending element order)."""
        key = ("gens", mask)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        orders = self.element_orders
        cand = sorted(iter_bits(mask), key=lambda x: (-orders[x], x))
        gens: list[int] = []
        cur = 1
        for x in cand:
            if cur == mask:
                break
            if not (cur >> x) & 1:
                gens.append(x)
                cur = self.closure(gens)
        out = tuple(gens)
        self._cache[key] = out
        return out

    def conjugate_mask(self, mask: int, g: int) -> int:
        row = self.conj_table[g]
        out = 0
        for x in iter_bits(mask):
            out |= 1 << row[x]
        return out

    def is_closed(self, mask: int) -> bool:
        if not mask & 1:
            return False
        mul = self.mul
        elems = list(iter_bits(mask))
        for a in elems:
            row = mul[a]
            for b in elems:
                if not (mask >> row[b]) & 1:
                    return False
        return True

    def cyclic_mask(self, x: int) -> int:
        m, y = 1, x
        while y != 0:
            m |= 1 << y
            y = self.mul[y][x]
        return m


# ---------------------------------------------------------------------------
# construction from tables


def build_from_cayley(table, name: str = "G", *, check_associative: bool = True) -> Group:
    """Validate a square multiplication table and return a :class:`Group`.

    The identity is relabelled to index 0 (swapping labels with whatever
    element previously held 0).
    """
    try:
        arr = np.asarray(table, dtype=np.int64)
    except (TypeError, ValueError) as exc:
        raise MalformedTable(f"table is not a rectangular integer array: {exc}") from None
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise MalformedTable(f"table must be square and non-empty, got shape {arr.shape}")
    n = arr.shape[0]
    bad = np.argwhere((arr < 0) | (arr >= n))
    if len(bad):
        r, c = bad[0]
        raise MalformedTable(f"entry ({r},{c}) = {arr[r, c]} outside [0, {n})")

    rng = np.arange(n)
    ident = None
    for e in range(n):
        if np.array_equal(arr[e], rng) and np.array_equal(arr[:, e], rng):
            ident = e
            break
    if ident is None:
        raise NoIdentity("no element acts as a two-sided identity")

    for x in range(n):
        right = np.flatnonzero(arr[x] == ident)
        if not any(arr[y, x] == ident for y in right):
            raise NoInverse(x)

    if check_associative:
        for a in range(n):
            # (a*b)*c vs a*(b*c) for all b, c
            lhs = arr[arr[a]]          # row b -> (a*b)*c over c
            rhs = arr[a][arr]          # [b, c] -> a*(b*c)
            diff = np.argwhere(lhs != rhs)
            if len(diff):
                b, c = diff[0]
                raise NotAssociative((a, int(b), int(c)))

    if ident != 0:
        perm = np.arange(n)
        perm[0], perm[ident] = ident, 0      # new label -> old label
        relabel = np.empty(n, dtype=np.int64)
        relabel[perm] = np.arange(n)         # old label -> new label
        arr = relabel[arr[np.ix_(perm, perm)]]
    return Group(arr.tolist(), name)


# ---------------------------------------------------------------------------
# permutations


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        imgs = tuple(int(i) for i in self.images)
        object.__setattr__(self, "images", imgs)
        if sorted(imgs) != list(range(len(imgs))):
            raise InvalidPermutation(f"{list(imgs)} is not a bijection on [0, {len(imgs)})")

    @property
    def degree(self) -> int:
        return len(self.images)

    @classmethod
    def from_cycles(cls, degree: int, *cycles: Sequence[int]) -> "Permutation":
        img = list(range(degree))
        for cyc in cycles:
            for i, a in enumerate(cyc):
                if not 0 <= a < degree:
                    raise InvalidPermutation(f"point {a} outside degree {degree}")
                img[a] = cyc[(i + 1) % len(cyc)]
        return cls(tuple(img))


def _compose(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    # apply p first, then q
    return tuple(q[i] for i in p)


def generate_from_permutations(degree: int, gens: Iterable, name: str = "G",
                               order_cap: int = DEFAULT_ORDER_CAP) -> Group:
    """Close ``gens`` under composition and return the Cayley table group.

    Element 0 is the identity permutation; the remaining elements are listed
    in breadth-first discovery order.
    """
    perms = []
    for g in gens:
        p = g if isinstance(g, Permutation) else Permutation(tuple(g))
        if p.degree != degree:
            raise InvalidPermutation(f"generator {list(p.images)} has degree {p.degree}, expected {degree}")
        perms.append(p.images)
    ident = tuple(range(degree))
    elems = [ident]
    index = {ident: 0}
    i = 0
    while i < len(elems):
        x = elems[i]
        i += 1
        for g in perms:
            y = _compose(x, g)
            if y not in index:
                if len(elems) >= order_cap:
                    raise OrderCapExceeded(f"generated group exceeds order cap {order_cap}")
                index[y] = len(elems)
                elems.append(y)
    table = [[index[_compose(x, y)] for y in elems] for x in elems]
    grp = Group(table, name)
    grp._cache["permutations"] = tuple(elems)
    return grp


# ---------------------------------------------------------------------------
# specs


@dataclass(frozen=True)
class Cyclic:
    n: int


@dataclass(frozen=True)
class Dihedral:
    m: int  # order 2m


@dataclass(frozen=True)
class Symmetric:
    k: int


@dataclass(frozen=True)
class Alternating:
    k: int


@dataclass(frozen=True)
class Dicyclic:
    m: int  # order 4m


@dataclass(frozen=True)
class DirectProduct:
    left: "GroupSpec"
    right: "GroupSpec"


@dataclass(frozen=True)
class TrivialAction:
    pass


@dataclass(frozen=True)
class InversionAction:
    """The generator (element 1) of a cyclic acting group inverts every
    element of an abelian normal group."""


@dataclass(frozen=True)
class PowerAction:
    """The generator of a cyclic acting group maps ``x -> x**k``; on
    ``Cyclic(n)`` that is ``i -> k*i mod n``."""
    k: int


@dataclass(frozen=True)
class GeneratorImages:
    """Explicit action: pairs ``(acting element, image array on N)``; the
    acting elements must generate the acting group."""
    images: tuple[tuple[int, tuple[int, ...]], ...]


Action = Union[TrivialAction, InversionAction, PowerAction, GeneratorImages]


@dataclass(frozen=True)
class Semidirect:
    normal: "GroupSpec"
    acting: "GroupSpec"
    action: Action = TrivialAction()


@dataclass(frozen=True)
class PermGens:
    degree: int
    generators: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class CayleyFile:
    path: str


GroupSpec = Union[Cyclic, Dihedral, Symmetric, Alternating, Dicyclic, DirectProduct,
                  Semidirect, PermGens, CayleyFile]


def _cyclic(n: int) -> Group:
    return Group([[(i + j) % n for j in range(n)] for i in range(n)], f"C{n}")


def _dihedral(m: int) -> Group:
    # r^i s^e  <->  i + m*e ;  s r^j = r^-j s
    def mul(a, b):
        i, e = a % m, a // m
        j, f = b % m, b // m
        if e == 0:
            return (i + j) % m + m * f
        return (i - j) % m + m * (1 - f)
    n = 2 * m
    return Group([[mul(a, b) for b in range(n)] for a in range(n)], f"D{n}")


def _dicyclic(m: int) -> Group:
    # a^i x^e  <->  i + 2m*e ;  x^2 = a^m, x a = a^-1 x
    k = 2 * m

    def mul(p, q):
        i, e = p % k, p // k
        j, f = q % k, q // k
        if e == 0:
            return (i + j) % k + k * f
        if f == 0:
            return (i - j) % k + k
        return (i - j + m) % k
    n = 4 * m
    return Group([[mul(a, b) for b in range(n)] for a in range(n)], f"Dic{n}")


def _direct(g: Group, h: Group) -> Group:
    n2 = h.order
    n = g.order * n2
    table = [[g.mul[a // n2][b // n2] * n2 + h.mul[a % n2][b % n2] for b in range(n)]
             for a in range(n)]
    return Group(table, f"{g.name}x{h.name}")


def _is_automorphism(N: Group, img: Sequence[int]) -> bool:
    if sorted(img) != list(range(N.order)):
        return False
    mul = N.mul
    return all(img[mul[a][b]] == mul[img[a]][img[b]]
               for a in range(N.order) for b in range(N.order))


def _resolve_action(N: Group, H: Group, acting_spec, action) -> list[tuple[int, ...]]:
    """Return ``phi[h]`` (an image array on N) for every element h of H."""
    ident = tuple(range(N.order))
    if isinstance(action, TrivialAction):
        return [ident] * H.order
    if isinstance(action, (InversionAction, PowerAction)):
        if not isinstance(acting_spec, Cyclic):
            raise InvalidAction(f"{type(action).__name__} needs a cyclic acting group")
        if isinstance(action, InversionAction):
            gen_img = N.inv
        else:
            gen_img = _power_map(N, action.k)
        pairs = [(1 % H.order, tuple(gen_img))] if H.order > 1 else []
    elif isinstance(action, GeneratorImages):
        pairs = [(int(h), tuple(img)) for h, img in action.images]
    else:
        raise InvalidAction(f"unknown action {action!r}")

    for h, img in pairs:
        if not 0 <= h < H.order:
            raise InvalidAction(f"acting element {h} outside acting group")
        if not _is_automorphism(N, img):
            raise InvalidAction(f"image of acting element {h} is not an automorphism of N")

    phi: list = [None] * H.order
    phi[0] = ident
    queue = [0]
    for x in queue:
        for h, img in pairs:
            y = H.mul[x][h]
            # phi(x*h)(n) = phi(x)(phi(h)(n))
            px = phi[x]
            val = tuple(px[img[i]] for i in range(N.order))
            if phi[y] is None:
                phi[y] = val
                queue.append(y)
            elif phi[y] != val:
                raise InvalidAction(f"action is not a homomorphism (conflict at acting element {y})")
    if any(p is None for p in phi):
        raise InvalidAction("acting elements with given images do not generate the acting group")
    return phi


def _power_map(N: Group, k: int) -> tuple[int, ...]:
    """x -> x**k for every element."""
    out = []
    for x in range(N.order):
        y = 0
        for _ in range(k % max(N.element_orders[x], 1)):
            y = N.mul[y][x]
        out.append(y)
    return tuple(out)


def _semidirect(N: Group, H: Group, phi: list[tuple[int, ...]]) -> Group:
    n1 = N.order
    n = n1 * H.order
    Nm, Hm = N.mul, H.mul

    def mul(a, b):
        x1, h1 = a % n1, a // n1
        x2, h2 = b % n1, b // n1
        return Nm[x1][phi[h1][x2]] + n1 * Hm[h1][h2]
    return Group([[mul(a, b) for b in range(n)] for a in range(n)], f"{N.name}:{H.name}")


def _check_cap(n: int, cap: int):
    if n > cap:
        raise OrderCapExceeded(f"group order {n} exceeds cap {cap}")


def spec_order(spec) -> int | None:
    if isinstance(spec, Cyclic):
        return spec.n
    if isinstance(spec, Dihedral):
        return 2 * spec.m
    if isinstance(spec, Dicyclic):
        return 4 * spec.m
    if isinstance(spec, Symmetric):
        return math.factorial(spec.k)
    if isinstance(spec, Alternating):
        return max(math.factorial(spec.k) // 2, 1)
    if isinstance(spec, (DirectProduct, Semidirect)):
        a = spec_order(spec.left if isinstance(spec, DirectProduct) else spec.normal)
        b = spec_order(spec.right if isinstance(spec, DirectProduct) else spec.acting)
        return None if a is None or b is None else a * b
    return None


def construct(spec, order_cap: int = DEFAULT_ORDER_CAP, name: str | None = None) -> Group:
    """Build the group described by ``spec``."""
    n = spec_order(spec)
    if n is not None:
        _check_cap(n, order_cap)
    if isinstance(spec, Cyclic):
        if spec.n < 1:
            raise ValidationError("Cyclic(n) needs n >= 1")
        g = _cyclic(spec.n)
    elif isinstance(spec, Dihedral):
        if spec.m < 1:
            raise ValidationError("Dihedral(m) needs m >= 1")
        g = _dihedral(spec.m)
    elif isinstance(spec, Dicyclic):
        if spec.m < 1:
            raise ValidationError("Dicyclic(m) needs m >= 1")
        g = _dicyclic(spec.m)
    elif isinstance(spec, Symmetric):
        k = spec.k
        gens = []
        if k >= 2:
            gens = [Permutation.from_cycles(k, (0, 1)), Permutation.from_cycles(k, tuple(range(k)))]
        g = generate_from_permutations(max(k, 1), gens, f"S{k}", order_cap)
    elif isinstance(spec, Alternating):
        k = spec.k
        gens = [Permutation.from_cycles(k, (0, 1, i)) for i in range(2, k)]
        g = generate_from_permutations(max(k, 1), gens, f"A{k}", order_cap)
    elif isinstance(spec, DirectProduct):
        g = _direct(construct(spec.left, order_cap), construct(spec.right, order_cap))
    elif isinstance(spec, Semidirect):
        N = construct(spec.normal, order_cap)
        H = construct(spec.acting, order_cap)
        phi = _resolve_action(N, H, spec.acting, spec.action)
        g = _semidirect(N, H, phi)
    elif isinstance(spec, PermGens):
        g = generate_from_permutations(spec.degree, spec.generators, "G", order_cap)
    elif isinstance(spec, CayleyFile):
        g = load_group_file(spec.path, order_cap=order_cap)
    else:
        raise ValidationError(f"unknown group spec {spec!r}")
    if name is not None:
        g.name = name
    return g


# ---------------------------------------------------------------------------
# derived groups


def quotient(G: Group, N) -> tuple[Group, tuple[int, ...]]:
    """``G/N`` on coset representatives plus the projection ``G -> G/N``.

    ``N`` may be a Subgroup or a mask.  Cosets are numbered by their least
    element, so the identity coset is 0.
    """
    mask = N if isinstance(N, int) else N.mask
    if not G.is_closed(mask):
        raise NotNormal("quotient needs a subgroup mask")
    gens = G.generators_of(G.full_mask)
    if any(G.conjugate_mask(mask, g) != mask for g in gens):
        raise NotNormal("quotient needs a normal subgroup")
    nelems = list(iter_bits(mask))
    proj = [-1] * G.order
    reps = []
    for x in range(G.order):
        if proj[x] < 0:
            c = len(reps)
            reps.append(x)
            for k in nelems:
                proj[G.mul[x][k]] = c
    table = [[proj[G.mul[a][b]] for b in reps] for a in reps]
    Q = Group(table, f"{G.name}/N{mask.bit_count()}")
    return Q, tuple(proj)


def subgroup_as_group(G: Group, mask: int) -> tuple[Group, tuple[int, ...]]:
    """The subgroup ``mask`` as a standalone group, plus the embedding
    (new index -> element of G).  Identity stays at 0."""
    key = ("as_group", mask)
    hit = G._cache.get(key)
    if hit is not None:
        return hit
    elems = list(iter_bits(mask))
    pos = {x: i for i, x in enumerate(elems)}
    table = [[pos[G.mul[a][b]] for b in elems] for a in elems]
    out = (Group(table, f"{G.name}[{len(elems)}]"), tuple(elems))
    G._cache[key] = out
    return out


def order_fingerprint(G: Group) -> tuple[int, ...]:
    return tuple(sorted(G.element_orders))


def primes_of(G_or_n) -> frozenset[int]:
    n = G_or_n if isinstance(G_or_n, int) else G_or_n.order
    return frozenset(prime_factors(n))


# ---------------------------------------------------------------------------
# JSON group files


def group_to_dict(G: Group) -> dict:
    return {"name": G.name, "kind": "cayley", "table": [list(r) for r in G.mul]}


def group_from_dict(data, where: str = "<data>", order_cap: int = DEFAULT_ORDER_CAP) -> Group:
    if not isinstance(data, dict):
        raise ValidationError(f"{where}: top level must be an object")
    kind = data.get("kind")
    name = data.get("name", "G")
    if not isinstance(name, str):
        raise ValidationError(f"{where}: 'name' must be a string")
    try:
        if kind == "cayley":
            table = data.get("table")
            if not isinstance(table, list):
                raise ValidationError(f"{where}: 'table' must be a list of rows")
            _check_cap(len(table), order_cap)
            return build_from_cayley(table, name)
        if kind == "permgens":
            degree = data.get("degree")
            gens = data.get("generators", [])
            if not isinstance(degree, int) or degree < 1:
                raise ValidationError(f"{where}: 'degree' must be a positive integer")
            if not isinstance(gens, list):
                raise ValidationError(f"{where}: 'generators' must be a list of image arrays")
            return generate_from_permutations(degree, gens, name, order_cap)
    except (MalformedTable, NoIdentity, NoInverse, NotAssociative, InvalidPermutation) as exc:
        raise ValidationError(f"{where}: {exc}") from exc
    raise ValidationError(f"{where}: unknown kind {kind!r} (expected 'cayley' or 'permgens')")


def load_group_file(path, order_cap: int = DEFAULT_ORDER_CAP) -> Group:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return group_from_dict(data, str(path), order_cap)


def save_group_file(G: Group, path) -> None:
    Path(path).write_text(json.dumps(group_to_dict(G)))


def element_order_counts(G: Group) -> Counter:
    return Counter(G.element_orders)
