"""Subgroup closure, abelian duals, and generator-image homomorphism search.

These are the combinatorial engines shared by the isomorphism, automorphism
and model-search modules.  Everything works on explicit element lists inside
an ambient Group, so subgroups never need their own arithmetic.
"""

from __future__ import annotations

import itertools
from collections import deque

import numpy as np

from .errors import NotASubgroup, NumericalFailure
from .group_core import Elem, Group


def close_subgroup(G: Group, gens) -> set[Elem]:
    """Subgroup generated by gens (BFS closure under multiplication)."""
    seen = {G.identity}
    queue = deque([G.identity])
    gens = [g for g in gens if g != G.identity]
    while queue:
        cur = queue.popleft()
        for g in gens:
            nxt = G.mul(cur, g)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def subgroup_generators(G: Group, H) -> list[Elem]:
    """A small generating list for the subgroup given as an element set."""
    Hset = set(H)
    gens: list[Elem] = []
    span = {G.identity}
    for h in sorted(Hset):
        if h not in span:
            gens.append(h)
            span = close_subgroup(G, gens)
            if len(span) == len(Hset):
                break
    if len(span) != len(Hset):
        raise NotASubgroup("element set is not closed under multiplication")
    return gens


def commutator_subgroup(G: Group, H=None) -> set[Elem]:
    """Derived subgroup of H (default: of G): normal closure of commutators."""
    elems = list(H) if H is not None else G.elements()
    gens = subgroup_generators(G, elems) if H is not None else G.gens()
    comms = set()
    for a, b in itertools.product(gens, repeat=2):
        c = G.mul(G.mul(a, b), G.inv(G.mul(b, a)))
        if c != G.identity:
            comms.add(c)
    # close under multiplication and conjugation by the subgroup generators
    seen = close_subgroup(G, comms)
    changed = True
    while changed:
        changed = False
        for x in gens:
            for d in list(seen):
                c = G.conj(x, d)
                if c not in seen:
                    seen = close_subgroup(G, set(seen) | {c})
                    changed = True
    return seen


def coset_quotient(G: Group, H, D) -> tuple[list[Elem], dict[Elem, int], list[list[int]]]:
    """Cosets of D in H plus the quotient multiplication table.

    Returns (coset representatives, element -> coset id, Cayley table).
    """
    Dlist = list(D)
    coset_of: dict[Elem, int] = {}
    reps: list[Elem] = []
    for h in sorted(H):
        if h in coset_of:
            continue
        cid = len(reps)
        reps.append(h)
        for d in Dlist:
            coset_of[G.mul(h, d)] = cid
    table = [
        [coset_of[G.mul(a, b)] for b in reps]
        for a in reps
    ]
    return reps, coset_of, table


def abelian_characters(table: list[list[int]], tries: int = 12) -> np.ndarray:
    """All irreducible (linear) characters of an abelian group.

    ``table[a][b]`` is the Cayley table on indices; index 0 need not be the
    identity.  Returns an (m, m) complex array, one character per row,
    indexed by group element.  Uses a random combination of translation
    matrices; characters are its eigenvectors.
    """
    m = len(table)
    tab = np.array(table)
    ident = next(a for a in range(m) if all(tab[a][b] == b for b in range(m)))
    rng = np.random.default_rng(20260801)
    for _ in range(tries):
        t = rng.uniform(1.0, 2.0, size=m)
        M = np.zeros((m, m))
        for g in range(m):
            # (P_g)[a, table[g][a]] = 1; characters are eigenvectors of sum
            M[np.arange(m), tab[g]] += t[g]
        _, vecs = np.linalg.eig(M.T)
        chars = vecs.T / vecs.T[:, ident][:, None]
        # multiplicativity check: chi(ga) = chi(g) chi(a)
        ok = all(
            np.allclose(row[tab], np.outer(row, row), atol=1e-8) for row in chars
        )
        good = np.allclose(np.abs(chars), 1.0, atol=1e-8)
        if ok and good and len({tuple(np.round(r, 6)) for r in chars}) == m:
            return chars
    raise NumericalFailure("could not separate characters of abelian quotient")


def linear_characters(G: Group, H) -> list[dict[Elem, complex]]:
    """All linear characters of the subgroup H, as element -> value dicts."""
    Hlist = sorted(H)
    D = commutator_subgroup(G, Hlist)
    reps, coset_of, table = coset_quotient(G, Hlist, D)
    chars = abelian_characters(table)
    return [
        {h: row[coset_of[h]] for h in Hlist}
        for row in chars
    ]


# -- generator-image homomorphism search -------------------------------------


def extend_hom(Gsrc: Group, Gdst: Group, gens, images) -> dict[Elem, Elem] | None:
    """Extend gen -> image to a homomorphism on <gens>, or None if inconsistent.

    BFS over the subgroup generated; a conflict between two derivations of the
    same element means no homomorphism exists with the given images.
    """
    hom = {Gsrc.identity: Gdst.identity}
    queue = deque([Gsrc.identity])
    pairs = list(zip(gens, images))
    while queue:
        a = queue.popleft()
        fa = hom[a]
        for g, h in pairs:
            a2 = Gsrc.mul(a, g)
            f2 = Gdst.mul(fa, h)
            known = hom.get(a2)
            if known is None:
                hom[a2] = f2
                queue.append(a2)
            elif known != f2:
                return None
    return hom


def _profiles(G: Group):
    """Bucket elements by (order, conjugacy class size)."""
    from .cycles import conjugacy_classes

    key = "profiles"
    if key in G.cache:
        return G.cache[key]
    classes = conjugacy_classes(G)
    order_of: dict[Elem, int] = {}
    for rep, _size in classes.pairs():
        o = G.element_order(rep)
        order_of[rep] = o
    buckets: dict[tuple[int, int], list[Elem]] = {}
    for g in G.elements():
        cid = classes.class_of[g]
        prof = (order_of[classes.reps[cid]], classes.sizes[cid])
        buckets.setdefault(prof, []).append(g)
    G.cache[key] = (classes, buckets)
    return G.cache[key]


def iso_search(Gsrc: Group, Gdst: Group, require=None):
    """Yield isomorphisms Gsrc -> Gdst as dicts by generator-image backtracking.

    ``require(hom)`` may veto completed candidates (used for automorphism
    filtering).  Candidates are pruned by order/class-size profiles and by
    pairwise product orders before the closure check.
    """
    if Gsrc.order != Gdst.order:
        return
    gens = Gsrc.gens()
    src_classes, _ = _profiles(Gsrc)
    dst_classes, dst_buckets = _profiles(Gdst)

    gen_info = []
    for g in gens:
        cid = src_classes.class_of[g]
        prof = (Gsrc.element_order(g), src_classes.sizes[cid])
        pool = dst_buckets.get(prof, [])
        gen_info.append((g, pool))
    # fix the most-constrained generators first
    gen_info.sort(key=lambda t: len(t[1]))
    gens = [g for g, _ in gen_info]
    pools = [pool for _, pool in gen_info]

    pair_orders = {
        (i, j): Gsrc.element_order(Gsrc.mul(gens[i], gens[j]))
        for i in range(len(gens))
        for j in range(i)
    }

    chosen: list[Elem] = []

    def backtrack(level: int):
        if level == len(gens):
            hom = extend_hom(Gsrc, Gdst, gens, chosen)
            if hom is not None and len(hom) == Gsrc.order:
                if len(set(hom.values())) == Gsrc.order:
                    if require is None or require(hom):
                        yield dict(hom)
            return
        for cand in pools[level]:
            ok = True
            for j in range(level):
                prod = Gdst.mul(cand, chosen[j])
                if Gdst.element_order(Gdst.mul(chosen[j], cand)) != pair_orders[(level, j)] \
                        or Gdst.element_order(prod) != pair_orders[(level, j)]:
                    ok = False
                    break
            if not ok:
                continue
            chosen.append(cand)
            # consistency of the partial subgroup map prunes most branches
            partial = extend_hom(Gsrc, Gdst, gens[: level + 1], chosen)
            if partial is not None and len(set(partial.values())) == len(partial):
                yield from backtrack(level + 1)
            chosen.pop()

    yield from backtrack(0)
