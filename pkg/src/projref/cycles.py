"""Colored cycle decomposition, splitting index, and conjugacy tests.

An element of G(r,n) factors uniquely into disjoint colored cycles: either a
permutation cycle carrying all the colors on its support, or a diagonal
element with a single nonzero color.  The multiset of (length, color) pairs
decides conjugacy in G(r,n); the splitting index s_p refines it to decide
conjugacy in the subgroup G(r,p,n).
"""

from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass, field
from functools import reduce

from .errors import ParamMismatch
from .group_core import Elem, Group


@dataclass(frozen=True)
class ColoredCycle:
    indices: tuple[int, ...]  # cycle orbit (i1,...,il), or a single fixed index
    colors: tuple[int, ...]  # colors along the orbit, z_{i_j}
    length: int
    color: int  # total color a = sum of colors mod r
    s: int  # sum of j * z_{i_j} mod gcd(a, length, r)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(self.indices)


@dataclass
class CycleData:
    group: Group
    element: Elem
    cycles: list[ColoredCycle]
    d_p: int
    s_p: int

    def cycle_type(self) -> Counter:
        return Counter((c.length, c.color) for c in self.cycles)


def _perm_cycles(perm: tuple[int, ...]) -> list[tuple[int, ...]]:
    """Cycles of a permutation anchored at their smallest element."""
    seen = [False] * len(perm)
    out = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        orbit = [start]
        seen[start] = True
        j = perm[start]
        while j != start:
            orbit.append(j)
            seen[j] = True
            j = perm[j]
        out.append(tuple(orbit))
    return out


def decompose(G: Group, g: Elem) -> CycleData:
    """Colored cycle data of g viewed in G(r,p,n); uses the stored lift."""
    r, p = G.r, G.p
    perm, x = g
    cycles = []
    for orbit in _perm_cycles(perm):
        if len(orbit) >= 2:
            cols = tuple(x[i] for i in orbit)
            a = sum(cols) % r
            m = reduce(math.gcd, (a, len(orbit), r))
            s = sum((j + 1) * c for j, c in enumerate(cols)) % m if m > 1 else 0
            cycles.append(ColoredCycle(orbit, cols, len(orbit), a, s))
        elif x[orbit[0]] != 0:
            i = orbit[0]
            cycles.append(ColoredCycle((i,), (x[i],), 1, x[i] % r, 0))
    d_p = reduce(math.gcd, [c.length for c in cycles] + [c.color for c in cycles], p)
    s_p = sum(c.s for c in cycles) % d_p if d_p > 1 else 0
    return CycleData(G, g, cycles, d_p, s_p)


def reassemble(G: Group, data: CycleData) -> Elem:
    """Product of the colored cycles; equals the decomposed element."""
    n = G.n
    perm = list(range(n))
    colors = [0] * n
    for c in data.cycles:
        for j, i in enumerate(c.indices):
            colors[i] = c.colors[j]
            if c.length >= 2:
                perm[i] = c.indices[(j + 1) % c.length]
    return G.canon(tuple(perm), tuple(colors))


def conjugate_in_Grn(G: Group, g: Elem, h: Elem) -> bool:
    """Same colored cycle type, i.e. conjugacy in the ambient G(r,n)."""
    if G.n != len(g[0]) or G.n != len(h[0]):
        raise ParamMismatch("rank mismatch")
    return decompose(G, g).cycle_type() == decompose(G, h).cycle_type()


def conjugate_in_Grpn(G: Group, g: Elem, h: Elem) -> bool:
    """Conjugacy criterion in G(r,p,n): same G(r,n) class and equal s_p."""
    dg, dh = decompose(G, g), decompose(G, h)
    return dg.cycle_type() == dh.cycle_type() and dg.s_p == dh.s_p


def conjugate_in_quotient(G: Group, g: Elem, h: Elem) -> bool:
    """Conjugacy in G(r,p,q,n): some lift of h meets the class of a lift of g."""
    L = G.lift_group()
    g0 = g  # any fixed lift; canonical colors are one
    return any(conjugate_in_Grpn(L, g0, hk) for hk in G.lifts(h))


def conjugate_brute(G: Group, g: Elem, h: Elem, cap: int | None = None) -> bool:
    """Oracle: orbit closure of g under conjugation by generators."""
    G.check_cap(cap)
    if g == h:
        return True
    gens = G.gens()
    gens = gens + [G.inv(x) for x in gens]
    seen = {g}
    queue = deque([g])
    while queue:
        cur = queue.popleft()
        for x in gens:
            nxt = G.conj(x, cur)
            if nxt == h:
                return True
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return False


@dataclass
class ConjugacyClasses:
    group: Group
    reps: list[Elem]
    sizes: list[int]
    class_of: dict[Elem, int] = field(repr=False)

    def __len__(self):
        return len(self.reps)

    def pairs(self) -> list[tuple[Elem, int]]:
        return list(zip(self.reps, self.sizes))


def conjugacy_classes(G: Group, cap: int | None = None) -> ConjugacyClasses:
    """Class partition by orbit closure under conjugation by generators."""
    key = "classes"
    if key in G.cache:
        return G.cache[key]
    elements = G.elements(cap)
    gens = G.gens()
    gens = gens + [G.inv(x) for x in gens]
    class_of: dict[Elem, int] = {}
    reps, sizes = [], []
    for g in elements:
        if g in class_of:
            continue
        cid = len(reps)
        orbit = [g]
        class_of[g] = cid
        queue = deque([g])
        while queue:
            cur = queue.popleft()
            for x in gens:
                nxt = G.conj(x, cur)
                if nxt not in class_of:
                    class_of[nxt] = cid
                    orbit.append(nxt)
                    queue.append(nxt)
        reps.append(g)
        sizes.append(len(orbit))
    result = ConjugacyClasses(G, reps, sizes, class_of)
    assert sum(sizes) == G.order
    G.cache[key] = result
    return result
