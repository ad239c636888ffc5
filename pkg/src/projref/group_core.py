"""Exact arithmetic in G(r,p,n) and its central quotients G(r,p,q,n).

Elements are pairs ``(perm, colors)`` of tuples: ``perm`` is a permutation of
``range(n)`` in one-line image form (``perm[i]`` is the image of ``i``) and
``colors`` is a vector of residues mod ``r``.  The pair encodes the monomial
matrix whose column ``i`` carries ``zeta_r**colors[i]`` in row ``perm[i]``.
Composition is ``(pi sigma)(i) = pi(sigma(i))``, which makes the product rule

    (pi, x) * (sigma, y) = (pi sigma, sigma^{-1}(x) + y)

where permutations act on vectors by permuting coordinates.

In the quotient G(r,p,q,n) = G(r,p,n)/C_q an element has q color vectors
representing it, differing by multiples of (r/q, ..., r/q); we store the
lexicographically smallest one, so equality of canonical pairs is equality
in the group.
"""

from __future__ import annotations

import itertools
import math
import os
import threading
from functools import reduce

from .errors import CapExceeded, DivisibilityError, ParamMismatch

Elem = tuple[tuple[int, ...], tuple[int, ...]]

DEFAULT_ENUM_CAP = int(os.environ.get("PROJREF_ORDER_CAP", 200_000))


def _gcd(*values: int) -> int:
    return reduce(math.gcd, values, 0)


def perm_sign(perm: tuple[int, ...]) -> int:
    """Sign of a permutation in one-line form (+1 or -1)."""
    n = len(perm)
    seen = [False] * n
    sign = 1
    for i in range(n):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


class Group:
    """Validated parameters (r,p,q,n) together with element arithmetic."""

    def __init__(self, r: int, p: int, q: int, n: int):
        if min(r, p, q, n) < 1:
            raise DivisibilityError(f"parameters must be positive, got {(r, p, q, n)}")
        if r % p != 0:
            raise DivisibilityError(f"p={p} does not divide r={r}")
        if r % q != 0:
            raise DivisibilityError(f"q={q} does not divide r={r}")
        if (r * n) % (p * q) != 0:
            raise DivisibilityError(f"pq={p * q} does not divide rn={r * n}")
        self.r, self.p, self.q, self.n = r, p, q, n
        self.order = r**n * math.factorial(n) // (p * q)
        self.d0 = _gcd(p, q, n)
        self.shift = r // q
        self.identity = (tuple(range(n)), (0,) * n)
        self._lock = threading.Lock()
        self._elements: list[Elem] | None = None
        self._index: dict[Elem, int] | None = None
        self.cache: dict = {}  # scratch for higher modules (tables, classes)

    @property
    def params(self) -> tuple[int, int, int, int]:
        return (self.r, self.p, self.q, self.n)

    def dual(self) -> "Group":
        """The dual group G* = G(r,q,p,n)."""
        return make_group(self.r, self.q, self.p, self.n)

    def __repr__(self):
        return f"G{self.params}"

    def __eq__(self, other):
        return isinstance(other, Group) and self.params == other.params

    def __hash__(self):
        return hash(self.params)

    # -- canonical form ----------------------------------------------------

    def canon(self, perm: tuple[int, ...], colors) -> Elem:
        """Canonical representative: lex-least among the q central shifts."""
        r = self.r
        colors = tuple(c % r for c in colors)
        if self.q > 1:
            shift = self.shift
            best = colors
            for k in range(1, self.q):
                cand = tuple((c + k * shift) % r for c in colors)
                if cand < best:
                    best = cand
            colors = best
        return (perm, colors)

    def contains(self, g: Elem) -> bool:
        perm, colors = g
        return (
            sorted(perm) == list(range(self.n))
            and len(colors) == self.n
            and sum(colors) % self.p == 0
            and all(0 <= c < self.r for c in colors)
            and self.canon(perm, colors) == g
        )

    def lifts(self, g: Elem) -> list[Elem]:
        """All q color-vector representatives of g, as elements of G(r,p,n)."""
        perm, colors = g
        r, shift = self.r, self.shift
        return [
            (perm, tuple((c + k * shift) % r for c in colors)) for k in range(self.q)
        ]

    def lift_group(self) -> "Group":
        """The covering group G(r,p,1,n)."""
        return make_group(self.r, self.p, 1, self.n)

    # -- arithmetic --------------------------------------------------------

    def mul(self, g: Elem, h: Elem) -> Elem:
        gp, gc = g
        hp, hc = h
        r = self.r
        perm = tuple(gp[i] for i in hp)
        colors = tuple((gc[hp[i]] + hc[i]) % r for i in range(self.n))
        return self.canon(perm, colors)

    def inv(self, g: Elem) -> Elem:
        gp, gc = g
        r, n = self.r, self.n
        perm = [0] * n
        colors = [0] * n
        for i in range(n):
            perm[gp[i]] = i
            colors[gp[i]] = (-gc[i]) % r
        return self.canon(tuple(perm), tuple(colors))

    def conj(self, h: Elem, g: Elem) -> Elem:
        """h * g * h^{-1}."""
        return self.mul(self.mul(h, g), self.inv(h))

    def power(self, g: Elem, k: int) -> Elem:
        if k < 0:
            return self.power(self.inv(g), -k)
        result = self.identity
        base = g
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def element_order(self, g: Elem) -> int:
        k = 1
        h = g
        while h != self.identity:
            h = self.mul(h, g)
            k += 1
        return k

    # -- homomorphisms and the standard involution --------------------------

    def delta(self, g: Elem) -> int:
        """Color sum of the canonical representative, reduced mod r.

        On the quotient this is only well-defined modulo
        ``gcd(r, n*r/q)`` (adding the central shift changes the sum by n*r/q).
        """
        return sum(g[1]) % self.r

    @property
    def delta_modulus(self) -> int:
        return math.gcd(self.r, self.n * self.r // self.q)

    def proj(self, g: Elem) -> tuple[int, ...]:
        """The underlying permutation |g|."""
        return g[0]

    def tau(self, g: Elem) -> Elem:
        """Inverse-transpose automorphism (pi, x) -> (pi, -x)."""
        perm, colors = g
        return self.canon(perm, tuple(-c for c in colors))

    # -- generators ----------------------------------------------------------

    def gen_si(self, i: int) -> Elem:
        """Simple transposition s_i = (i, i+1), 1-based, as a group element."""
        if not 1 <= i <= self.n - 1:
            raise ParamMismatch(f"s_{i} undefined for n={self.n}")
        perm = list(range(self.n))
        perm[i - 1], perm[i] = perm[i], perm[i - 1]
        return (tuple(perm), (0,) * self.n)

    def gen_s(self) -> Elem:
        """s = (1, e1 - e2); requires n >= 2."""
        if self.n < 2:
            raise ParamMismatch("s undefined for n=1")
        colors = [0] * self.n
        colors[0], colors[1] = 1 % self.r, (-1) % self.r
        return self.canon(tuple(range(self.n)), tuple(colors))

    def gen_t(self) -> Elem:
        """t = (1, e1) as an element of the ambient G(r,1,q,n)."""
        colors = [0] * self.n
        colors[0] = 1 % self.r
        return self.canon(tuple(range(self.n)), tuple(colors))

    def gen_c(self) -> Elem:
        """Central element c = (1, e1 + ... + en)."""
        return self.canon(tuple(range(self.n)), (1 % self.r,) * self.n)

    def gens(self) -> list[Elem]:
        """Standard generating set: s_1..s_{n-1}, s, t^p (dedup, no identity)."""
        out = [self.gen_si(i) for i in range(1, self.n)]
        if self.n >= 2:
            out.append(self.gen_s())
        out.append(self.power(self.gen_t(), self.p))
        seen = set()
        gens = []
        for g in out:
            if g != self.identity and g not in seen:
                seen.add(g)
                gens.append(g)
        return gens if gens else [self.identity]

    # -- enumeration ---------------------------------------------------------

    def check_cap(self, cap: int | None = None):
        cap = DEFAULT_ENUM_CAP if cap is None else cap
        if self.order > cap:
            raise CapExceeded(f"|{self}| = {self.order} exceeds cap {cap}")

    def _diagonal_colors(self) -> list[tuple[int, ...]]:
        """Canonical color vectors with sum divisible by p (the subgroup N)."""
        r, p, n = self.r, self.p, self.n
        seen = set()
        out = []
        for head in itertools.product(range(r), repeat=n - 1):
            s = sum(head)
            for last in range((-s) % p, r, p):
                v = self.canon(self.identity[0], head + (last,))[1]
                if v not in seen:
                    seen.add(v)
                    out.append(v)
        out.sort()
        return out

    def elements(self, cap: int | None = None) -> list[Elem]:
        if self._elements is None:
            self.check_cap(cap)
            diag = self._diagonal_colors()
            elems = [
                (perm, v)
                for perm in itertools.permutations(range(self.n))
                for v in diag
            ]
            assert len(elems) == self.order, (len(elems), self.order)
            with self._lock:
                if self._elements is None:
                    self._elements = elems
        return self._elements

    def index(self, cap: int | None = None) -> dict[Elem, int]:
        if self._index is None:
            idx = {g: i for i, g in enumerate(self.elements(cap))}
            with self._lock:
                if self._index is None:
                    self._index = idx
        return self._index

    def subgroup_N(self, cap: int | None = None) -> list[Elem]:
        """N(r,p,q,n) = diagonal elements; order r^n/(pq)."""
        self.check_cap(cap)
        e = self.identity[0]
        return [(e, v) for v in self._diagonal_colors()]

    def subgroup_C(self, cap: int | None = None) -> list[Elem]:
        """C(r,p,q,n) = scalar elements c^i; cyclic of order (r/pq)*gcd(p,n)."""
        self.check_cap(cap)
        c = self.gen_c()
        out = []
        g = self.identity
        while True:
            out.append(g)
            g = self.mul(g, c)
            if g == self.identity:
                break
            if len(out) > self.r:
                raise AssertionError("scalar subgroup failed to close")
        # keep only the powers that actually lie in G (color sum divisible by p)
        return sorted(g for g in out if sum(g[1]) % self.p == 0)

    # -- textual element syntax ----------------------------------------------

    def format(self, g: Elem) -> str:
        perm, colors = g
        ps = " ".join(str(i + 1) for i in perm)
        cs = " ".join(str(c) for c in colors)
        return f"({ps} | {cs})"

    def parse(self, text: str) -> Elem:
        body = text.strip()
        if not (body.startswith("(") and body.endswith(")")):
            raise ValueError(f"element must be parenthesized: {text!r}")
        left, _, right = body[1:-1].partition("|")
        if not _:
            raise ValueError(f"missing '|' separator: {text!r}")
        perm = tuple(int(v) - 1 for v in left.split())
        colors = tuple(int(v) for v in right.split())
        if sorted(perm) != list(range(self.n)) or len(colors) != self.n:
            raise ValueError(f"not a permutation/color pair of rank {self.n}: {text!r}")
        g = self.canon(perm, colors)
        if sum(g[1]) % self.p != 0:
            raise ValueError(f"color sum not divisible by p={self.p}: {text!r}")
        return g


_GROUP_CACHE: dict[tuple[int, int, int, int], Group] = {}
_CACHE_LOCK = threading.Lock()


def make_group(r: int, p: int, q: int, n: int) -> Group:
    """Validated, cached Group for the parameters (r,p,q,n)."""
    key = (r, p, q, n)
    grp = _GROUP_CACHE.get(key)
    if grp is None:
        grp = Group(r, p, q, n)
        with _CACHE_LOCK:
            grp = _GROUP_CACHE.setdefault(key, grp)
    return grp
