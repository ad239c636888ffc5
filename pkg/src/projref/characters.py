"""Character tables, induction/restriction, rank-2 closed forms, split tests.

The generic engine is the numeric class-matrix method: the vectors
omega_chi = (h_j chi(g_j)/chi(1))_j are the common eigenvectors of the class
structure matrices, so a random real combination of those matrices has them
as its eigenvectors.  Degrees follow from the orthogonality relation, and the
finished table is validated against both orthogonality relations before it is
returned.  All values are complex doubles; inner products are rounded to
integers at tolerance 1e-6 and anything farther than 1e-3 from an integer is
a hard failure.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cycles import ConjugacyClasses, conjugacy_classes
from .errors import CapExceeded, InvalidParameters, NotASubgroup, NumericalFailure
from .group_core import Elem, Group, make_group
from .search import linear_characters as _linear_characters
from .search import subgroup_generators

TABLE_ORDER_CAP = 20_000
CLASS_CAP = 300
ROUND_TOL = 1e-6
HARD_TOL = 1e-3


def round_int(value, tol: float = ROUND_TOL) -> int:
    """Round a supposed integer, failing loudly when it is not one."""
    if abs(value.imag if isinstance(value, complex) else 0.0) > HARD_TOL:
        raise NumericalFailure(f"non-real inner product {value}")
    x = value.real if isinstance(value, complex) else float(value)
    k = round(x)
    if abs(x - k) > HARD_TOL:
        raise NumericalFailure(f"{value} is not an integer")
    return int(k)


@dataclass
class CharacterTable:
    group: Group
    classes: ConjugacyClasses
    values: np.ndarray  # rows are irreducible characters, columns classes
    degrees: np.ndarray

    def __len__(self):
        return len(self.degrees)

    def sum_of_degrees(self) -> int:
        return int(self.degrees.sum())

    def inner(self, f, g) -> int:
        """Rounded inner product of two class functions."""
        h = np.array(self.classes.sizes)
        val = np.dot(f * h, np.conj(g)) / self.group.order
        return round_int(val)

    def restrict(self, row: int, H) -> dict[Elem, complex]:
        cls = self.classes.class_of
        return {h: self.values[row][cls[h]] for h in H}


def _class_mix_matrix(G: Group, classes: ConjugacyClasses, weights) -> np.ndarray:
    """Random combination of class structure matrices (one K*N pass)."""
    K = len(classes)
    elements = G.elements()
    cls = classes.class_of
    inv = [G.inv(x) for x in elements]
    M = np.zeros((K, K))
    tvals = [weights[cls[x]] for x in elements]
    for k, zk in enumerate(classes.reps):
        col = np.zeros(K)
        for xi, tx in zip(inv, tvals):
            col[cls[G.mul(xi, zk)]] += tx
        M[:, k] = col
    return M


def character_table(
    G: Group,
    cap: int = TABLE_ORDER_CAP,
    class_cap: int = CLASS_CAP,
    tries: int = 8,
) -> CharacterTable:
    """Irreducible character table of G by the class-matrix method."""
    key = "character_table"
    if key in G.cache:
        return G.cache[key]
    if G.order > cap:
        raise CapExceeded(f"|{G}| = {G.order} exceeds character cap {cap}")
    classes = conjugacy_classes(G)
    K = len(classes)
    if K > class_cap:
        raise CapExceeded(f"{K} classes exceeds class cap {class_cap}")
    id_class = classes.class_of[G.identity]
    sizes = np.array(classes.sizes, dtype=float)
    rng = np.random.default_rng(987654321)
    last_error = None
    for _ in range(tries):
        weights = rng.uniform(1.0, 2.0, size=K)
        M = _class_mix_matrix(G, classes, weights)
        _, vecs = np.linalg.eig(M)
        try:
            table = _table_from_eigenvectors(G, classes, vecs, id_class, sizes)
        except NumericalFailure as exc:
            last_error = exc
            continue
        G.cache[key] = table
        return table
    raise NumericalFailure(f"character table of {G} failed: {last_error}")


def _table_from_eigenvectors(G, classes, vecs, id_class, sizes) -> CharacterTable:
    K = len(classes)
    order = G.order
    rows = []
    degrees = []
    for idx in range(K):
        v = vecs[:, idx]
        if abs(v[id_class]) < 1e-9:
            raise NumericalFailure("eigenvector vanishes on the identity class")
        omega = v / v[id_class]
        norm = float(np.sum(np.abs(omega) ** 2 / sizes).real)
        deg = math.sqrt(order / norm)
        d = round(deg)
        if d < 1 or abs(deg - d) > 1e-4:
            raise NumericalFailure(f"degree {deg} is not a positive integer")
        rows.append(d * omega / sizes)
        degrees.append(d)
    values = np.array(rows)
    degrees = np.array(degrees)
    if int((degrees**2).sum()) != order:
        raise NumericalFailure("sum of squared degrees mismatch")
    # row orthonormality
    gram = (values * sizes) @ np.conj(values.T) / order
    if not np.allclose(gram, np.eye(K), atol=ROUND_TOL):
        raise NumericalFailure("row orthogonality failed")
    # column orthogonality
    col = np.conj(values.T) @ values
    expected = np.diag(order / sizes)
    if not np.allclose(col, expected, atol=1e-5 * order):
        raise NumericalFailure("column orthogonality failed")
    # deterministic row order: by degree, then lexicographic rounded values
    def sort_key(i):
        r = np.round(values[i], 6)
        return (degrees[i], tuple(zip(r.real.tolist(), r.imag.tolist())))

    perm = sorted(range(K), key=sort_key)
    return CharacterTable(G, classes, values[perm], degrees[perm])


def sum_of_degrees(G: Group, **kw) -> int:
    return character_table(G, **kw).sum_of_degrees()


# -- subgroup characters, induction and restriction ---------------------------


def linear_characters(G: Group, H) -> list[dict[Elem, complex]]:
    """All linear characters of the subgroup H of G."""
    return _linear_characters(G, H)


def multiplicity_matrix(table: CharacterTable, H, lin_chars) -> np.ndarray:
    """Integer matrix m[a, i] = <lambda_a, Res irr_i>_H (Frobenius reciprocity)."""
    G = table.group
    Hlist = list(H)
    cls = table.classes.class_of
    idx = [cls[h] for h in Hlist]
    Psi = table.values[:, idx]  # K x |H|
    L = np.array([[lam[h] for h in Hlist] for lam in lin_chars])
    raw = L @ np.conj(Psi.T) / len(Hlist)
    out = np.zeros(raw.shape, dtype=int)
    for a, row in enumerate(raw):
        for i, val in enumerate(row):
            out[a, i] = round_int(val)
    return out


def induce(table: CharacterTable, H, f: dict[Elem, complex]) -> np.ndarray:
    """Induced class function Ind_H^G f as values on the classes of G."""
    if not set(f) >= set(H):
        raise NotASubgroup("class function must be defined on all of H")
    G = table.group
    mults = multiplicity_matrix(table, H, [f])[0]
    return mults @ table.values


def induce_direct(G: Group, classes: ConjugacyClasses, H, f) -> np.ndarray:
    """Induction by the defining sum over the whole group (test oracle)."""
    Hset = set(H)
    vals = []
    for rep in classes.reps:
        total = 0j
        for x in G.elements():
            y = G.conj(x, rep)
            if y in Hset:
                total += f[y]
        vals.append(total / len(Hset))
    return np.array(vals)


def inner_product(table: CharacterTable, f, g) -> int:
    return table.inner(np.asarray(f), np.asarray(g))


# -- closed-form rank-2 characters (p in {1,2}) --------------------------------


def _zeta_pow(r: int, e: int) -> complex:
    return complex(np.exp(2j * np.pi * (e % r) / r))


def rank2_chi(G: Group, x: int, y: int) -> np.ndarray:
    """Degree-2 character chi^{x,y} of G(r,p,q,2) for p in {1,2}."""
    if G.n != 2 or G.p not in (1, 2):
        raise InvalidParameters("chi^{x,y} lives on G(r,1,q,2) or G(r,2,q,2)")
    if (x + y) % G.q != 0:
        raise InvalidParameters(f"x+y={x + y} must be divisible by q={G.q}")
    if (x - y) % (G.r // G.p) == 0:
        raise InvalidParameters("x = y mod r/p gives a reducible function")
    classes = conjugacy_classes(G)
    out = []
    for rep in classes.reps:
        perm, (a, b) = rep
        if perm == (0, 1):
            out.append(_zeta_pow(G.r, a * x + b * y) + _zeta_pow(G.r, a * y + b * x))
        else:
            out.append(0j)
    return np.array(out)


def rank2_lambda(G: Group, z: int, eps: int) -> np.ndarray:
    """Linear character lambda^{z,eps} of G(r,2,q,2), q even."""
    if G.n != 2 or G.p != 2 or G.q % 2 != 0:
        raise InvalidParameters("lambda^{z,eps} lives on G(r,2,q,2) with q even")
    if z % (G.q // 2) != 0:
        raise InvalidParameters(f"z={z} must be a multiple of q/2={G.q // 2}")
    classes = conjugacy_classes(G)
    out = []
    for rep in classes.reps:
        perm, (a, b) = rep
        sgn = 1 if perm == (0, 1) else -1
        out.append(_zeta_pow(G.r, (a + b) * z) * (sgn**eps))
    return np.array(out)


def rank2_nu(G: Group, w: int, eps: int) -> np.ndarray:
    """Linear character nu^{w,eps} of G(r,2,q,2); needs zeta_{q/2}^w = (-1)^{r/q}."""
    if G.n != 2 or G.p != 2 or G.q % 2 != 0:
        raise InvalidParameters("nu^{w,eps} lives on G(r,2,q,2) with q even")
    q, r = G.q, G.r
    rq = r // q
    if rq % 2 == 0:
        if w % (q // 2) != 0:
            raise InvalidParameters("r/q even needs w a multiple of q/2")
    else:
        if q % 4 != 0 or w % (q // 4) != 0 or (w // (q // 4)) % 2 == 0:
            raise InvalidParameters("r/q odd needs q/2 even and w an odd multiple of q/4")
    classes = conjugacy_classes(G)
    out = []
    for rep in classes.reps:
        perm, (a, b) = rep
        sgn = 1 if perm == (0, 1) else -1
        out.append(((-1) ** a) * _zeta_pow(r, (a + b) * w) * (sgn**eps))
    return np.array(out)


def rank2_character(G: Group, kind: str, params: tuple[int, ...]) -> np.ndarray:
    if kind == "chi":
        return rank2_chi(G, *params)
    if kind == "lambda":
        return rank2_lambda(G, *params)
    if kind == "nu":
        return rank2_nu(G, *params)
    raise InvalidParameters(f"unknown rank-2 character kind {kind!r}")


# -- partition-tuple indexing of Irr(G(r,1,q,n)) -------------------------------


@lru_cache(maxsize=None)
def partitions(n: int) -> tuple[tuple[int, ...], ...]:
    """All partitions of n as non-increasing tuples."""
    if n == 0:
        return ((),)
    out = []

    def build(remaining, mx, acc):
        if remaining == 0:
            out.append(tuple(acc))
            return
        for part in range(min(mx, remaining), 0, -1):
            build(remaining - part, part, acc + [part])

    build(n, n, [])
    return tuple(out)


def partition_tuples(r: int, n: int):
    """All r-tuples of partitions with total size n."""
    if r == 1:
        for lam in partitions(n):
            yield (lam,)
        return
    for k in range(n + 1):
        for head in partitions(k):
            for rest in partition_tuples(r - 1, n - k):
                yield (head,) + rest


def irr_partition_index(r: int, q: int, n: int) -> list[tuple]:
    """Indices of Irr(G(r,1,q,n)): r-tuples with q | sum(i * |lambda_i|)."""
    out = []
    for tup in partition_tuples(r, n):
        if sum(i * sum(lam) for i, lam in enumerate(tup)) % q == 0:
            out.append(tup)
    return out


def is_split(index: tuple, p: int, r: int) -> bool:
    """True when restriction to G(r,p,q,n) splits: lambda_i = lambda_{i+r/d}."""
    for d in range(2, p + 1):
        if p % d == 0:
            shift = r // d
            if all(index[i] == index[(i + shift) % r] for i in range(r)):
                return True
    return False


def has_split_representations(G: Group) -> bool:
    """Exhaustive over the partition-tuple index of the covering group."""
    return any(
        is_split(idx, G.p, G.r) for idx in irr_partition_index(G.r, G.q, G.n)
    )


def split_criterion(G: Group) -> bool:
    """Closed form: split representations exist unless gcd(p,n)=1 or the
    gcd is 2 with r=p=q=n=2 mod 4."""
    g = math.gcd(G.p, G.n)
    if g == 1:
        return False
    if g == 2 and all(v % 4 == 2 for v in (G.r, G.p, G.q, G.n)):
        return False
    return True


def has_split_by_restriction(G: Group, cap: int = TABLE_ORDER_CAP) -> bool:
    """Oracle via restriction multiplicities from G(r,1,q,n) tables."""
    parent = make_group(G.r, 1, G.q, G.n)
    tab_g = character_table(G, cap=cap)
    tab_p = character_table(parent, cap=cap)
    cls_g = tab_g.classes
    sizes = np.array(cls_g.sizes)
    parent_cls = tab_p.classes.class_of
    idx = [parent_cls[rep] for rep in cls_g.reps]
    for row in tab_p.values:
        res = row[idx]
        mults = [
            round_int(np.dot(res * sizes, np.conj(chi)) / G.order)
            for chi in tab_g.values
        ]
        if sum(1 for m in mults if m > 0) > 1:
            return True
    return False


def count_linear_characters(G: Group) -> int:
    """Number of linear characters, |G/[G,G]|, straight from the table."""
    return int((character_table(G).degrees == 1).sum())
