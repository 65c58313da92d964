"""Buchberger's algorithm over Q with packed monomials.

Internally a monomial is a pair ``(key, packed)``.  ``packed`` stores one
exponent per 16-bit field (bit 15 of each field is a guard bit used for
the divisibility test) and ``key`` is an integer that is linear in the
exponent vector and strictly monotone for the active term order, so
comparing monomials is comparing ints and multiplying them is adding.

Pair handling uses the Gebauer-Moeller criteria; pairs are selected by
least sugar, then least lcm, then index, so results are reproducible
bit-for-bit.  The output of :func:`groebner_basis` is the reduced, monic
basis sorted by increasing leading monomial.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Optional, Sequence

import gmpy2
from gmpy2 import mpq

from .polyring import Polynomial

FIELD = 16
MAX_EXP = (1 << (FIELD - 1)) - 1


@dataclass(frozen=True)
class TermOrder:
    """Degree reverse lexicographic order, optionally weighted or blocked.

    ``block=m`` gives the elimination order comparing first the degrevlex
    order on ``T1..Tm`` and then on the remaining variables.
    """

    nvars: int
    kind: str = "degrevlex"
    block: int = 0
    weights: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in ("degrevlex", "block"):
            raise ValueError(f"unknown term order {self.kind!r}")
        if self.kind == "block" and not 0 < self.block < self.nvars:
            raise ValueError("block size must split the variables")
        if self.weights is not None and any(w <= 0 for w in self.weights):
            raise ValueError("weights must be positive")

    @cached_property
    def wts(self) -> tuple:
        return tuple(self.weights) if self.weights else (1,) * self.nvars

    @cached_property
    def coefficients(self) -> tuple:
        n = self.nvars
        S = FIELD * n
        w = self.wts
        if self.kind == "degrevlex":
            return tuple((w[i] << S) - (1 << (FIELD * i)) for i in range(n))
        big = 1 << (S + 32)
        return tuple(
            ((w[i] << S) - (1 << (FIELD * i))) * big if i < self.block else (w[i] << S) - (1 << (FIELD * i))
            for i in range(n)
        )

    def key(self, exp: Sequence[int]) -> int:
        return sum(e * c for e, c in zip(exp, self.coefficients))


def _pack(exp: Sequence[int]) -> int:
    p = 0
    for i, e in enumerate(exp):
        if e > MAX_EXP:
            raise OverflowError("exponent too large for packed monomials")
        p |= e << (FIELD * i)
    return p


def _unpack(p: int, n: int) -> tuple:
    mask = (1 << FIELD) - 1
    return tuple((p >> (FIELD * i)) & mask for i in range(n))


class _Engine:
    """Shared state for one Groebner computation in a fixed ring and order."""

    def __init__(self, order: TermOrder):
        self.order = order
        self.n = order.nvars
        self.guard = sum(1 << (FIELD * i + FIELD - 1) for i in range(self.n))
        self.coef = order.coefficients
        self.wts = order.wts
        self.fmask = (1 << FIELD) - 1

    # conversions ---------------------------------------------------------
    def from_poly(self, f: Polynomial) -> list:
        terms = []
        for e, c in f.items():
            terms.append((self.order.key(e), _pack(e), mpq(c.numerator, c.denominator)))
        terms.sort(key=lambda t: t[0], reverse=True)
        return terms

    def to_poly(self, terms: list) -> Polynomial:
        return Polynomial(self.n, {_unpack(p, self.n): Fraction(int(c.numerator), int(c.denominator)) for _, p, c in terms})

    # monomial helpers ----------------------------------------------------
    def divides(self, a: int, b: int) -> bool:
        g = self.guard
        return ((b | g) - a) & g == g

    def lcm(self, a: int, b: int) -> int:
        out = 0
        m = self.fmask
        for i in range(self.n):
            s = FIELD * i
            x, y = (a >> s) & m, (b >> s) & m
            out |= (x if x > y else y) << s
        return out

    def mkey(self, p: int) -> int:
        m = self.fmask
        return sum(((p >> (FIELD * i)) & m) * c for i, c in enumerate(self.coef))

    def wdeg(self, p: int) -> int:
        m = self.fmask
        return sum(((p >> (FIELD * i)) & m) * w for i, w in enumerate(self.wts))

    # reduction -----------------------------------------------------------
    def reduce(self, acc: dict, heap: list, basis: list, full: bool = True) -> list:
        """Reduce the accumulated polynomial; ``basis`` holds monic polys."""
        divides = self.divides
        result = []
        heappop, heappush = heapq.heappop, heapq.heappush
        while heap:
            k = -heappop(heap)
            ent = acc.pop(k, None)
            if ent is None:
                continue
            p, c = ent
            if not c:
                continue
            red = None
            for g in basis:
                if divides(g[0][1], p):
                    red = g
                    break
            if red is None:
                result.append((k, p, c))
                if not full:
                    # move everything else across untouched
                    while heap:
                        k2 = -heappop(heap)
                        e2 = acc.pop(k2, None)
                        if e2 is not None and e2[1]:
                            result.append((k2, e2[0], e2[1]))
                    break
                continue
            dk = k - red[0][0]
            dp = p - red[0][1]
            for gk, gp, gc in red[1:]:
                nk = gk + dk
                e = acc.get(nk)
                if e is None:
                    acc[nk] = [gp + dp, -c * gc]
                    heappush(heap, -nk)
                else:
                    e[1] -= c * gc
        return result

    def normal_form(self, f: list, basis: list) -> list:
        acc = {k: [p, c] for k, p, c in f}
        heap = [-k for k in acc]
        heapq.heapify(heap)
        r = self.reduce(acc, heap, basis)
        return r

    def spoly_nf(self, f: list, g: list, lcm: int, basis: list) -> list:
        """Normal form of ``S(f, g)`` for monic ``f``, ``g``."""
        lk = self.mkey(lcm)
        df_k, df_p = lk - f[0][0], lcm - f[0][1]
        dg_k, dg_p = lk - g[0][0], lcm - g[0][1]
        acc: dict = {}
        for k, p, c in f[1:]:
            acc[k + df_k] = [p + df_p, c]
        for k, p, c in g[1:]:
            nk = k + dg_k
            e = acc.get(nk)
            if e is None:
                acc[nk] = [p + dg_p, -c]
            else:
                e[1] -= c
        heap = [-k for k in acc]
        heapq.heapify(heap)
        return self.reduce(acc, heap, basis)

    @staticmethod
    def monic(f: list) -> list:
        lc = f[0][2]
        if lc == 1:
            return f
        inv = 1 / lc
        return [(k, p, c * inv) for k, p, c in f]

    # Buchberger ------------------------------------------------------------
    def buchberger(self, polys: list, stop_on_unit: bool = False) -> list:
        polys = [self.monic(f) for f in polys if f]
        for f in polys:
            if f[0][1] == 0:
                return [[(0, 0, mpq(1))]]
        # inter-reduce input a little: sort by leading key, drop duplicates
        polys.sort(key=lambda f: f[0][0])
        G: list = []  # all polys ever added
        sugar: list = []
        active: list[int] = []
        pairs: list = []  # heap of (sugar, lcmkey, i, j, lcm)
        divides = self.divides

        def basis_list():
            return [G[i] for i in active]

        def add(h: list, s: int) -> None:
            nonlocal active, pairs
            hi = len(G)
            G.append(h)
            sugar.append(s)
            hp = h[0][1]
            # Gebauer-Moeller update
            C = [(gi, self.lcm(hp, G[gi][0][1])) for gi in active]
            D = []
            while C:
                gi, L = C.pop(0)
                coprime = L == hp + G[gi][0][1]
                if coprime or not (any(divides(L2, L) for _, L2 in C) or any(divides(L2, L) for _, L2, _ in D)):
                    D.append((gi, L, coprime))
            newpairs = []
            for item in pairs:
                L = item[4]
                if divides(hp, L):
                    if self.lcm(G[item[2]][0][1], hp) != L and self.lcm(G[item[3]][0][1], hp) != L:
                        continue
                newpairs.append(item)
            for gi, L, coprime in D:
                if coprime:
                    continue
                g = G[gi]
                s_new = max(sugar[gi] + self.wdeg(L - g[0][1]), s + self.wdeg(L - hp))
                newpairs.append((s_new, self.mkey(L), gi, hi, L))
            heapq.heapify(newpairs)
            pairs = newpairs
            active = [gi for gi in active if not divides(hp, G[gi][0][1])] + [hi]

        for f in polys:
            nf = self.normal_form(f, basis_list())
            if not nf:
                continue
            nf = self.monic(nf)
            if nf[0][1] == 0:
                return [[(0, 0, mpq(1))]]
            add(nf, max(self.wdeg(p) for _, p, _ in nf))

        while pairs:
            s0, _, i, j, L = heapq.heappop(pairs)
            h = self.spoly_nf(G[i], G[j], L, basis_list())
            if not h:
                continue
            h = self.monic(h)
            if h[0][1] == 0:
                return [[(0, 0, mpq(1))]]
            add(h, s0)

        # reduced basis
        basis = [G[i] for i in active]
        basis.sort(key=lambda f: f[0][0])
        minimal = []
        for f in basis:
            if not any(divides(g[0][1], f[0][1]) for g in minimal):
                minimal.append(f)
        reduced = []
        for idx, f in enumerate(minimal):
            others = minimal[:idx] + minimal[idx + 1:]
            tail = self.normal_form(f[1:], others) if len(f) > 1 else []
            reduced.append([f[0]] + sorted(tail, key=lambda t: t[0], reverse=True))
        reduced.sort(key=lambda f: f[0][0])
        return reduced


def _clean(polys: Iterable[Polynomial], nvars: int) -> list[Polynomial]:
    out = []
    for f in polys:
        if f.nvars != nvars:
            raise ValueError("generator in a different ring")
        if not f.is_zero():
            out.append(f)
    return out


def groebner_basis(polys: Sequence[Polynomial], order: Optional[TermOrder] = None, nvars: Optional[int] = None) -> list[Polynomial]:
    """Reduced monic Groebner basis (empty list for the zero ideal)."""
    if nvars is None:
        if not polys:
            raise ValueError("cannot infer the ring of an empty generator list")
        nvars = polys[0].nvars
    order = order or TermOrder(nvars)
    eng = _Engine(order)
    gens = [eng.from_poly(f) for f in _clean(polys, nvars)]
    return [eng.to_poly(g) for g in eng.buchberger(gens)]


def normal_form(f: Polynomial, basis: Sequence[Polynomial], order: Optional[TermOrder] = None) -> Polynomial:
    """Remainder of ``f`` modulo a Groebner basis (monic or not)."""
    order = order or TermOrder(f.nvars)
    eng = _Engine(order)
    B = [eng.monic(eng.from_poly(g)) for g in basis if not g.is_zero()]
    return eng.to_poly(eng.normal_form(eng.from_poly(f), B))


def leading_exponent(f: Polynomial, order: Optional[TermOrder] = None) -> tuple:
    order = order or TermOrder(f.nvars)
    return max(f.exponents(), key=order.key)


def contains_one(polys: Sequence[Polynomial], nvars: int, order: Optional[TermOrder] = None) -> bool:
    """Decide ``1 in <polys>``."""
    gens = _clean(polys, nvars)
    if not gens:
        return False
    eng = _Engine(order or TermOrder(nvars))
    G = eng.buchberger([eng.from_poly(f) for f in gens], stop_on_unit=True)
    return len(G) == 1 and G[0][0][1] == 0


def _monomial_product(nvars: int, F: Iterable[int], extra: int = 0) -> tuple:
    e = [0] * nvars
    for i in F:
        e[i - 1 + extra] += 1
    return tuple(e)


def rabinowitsch(polys: Sequence[Polynomial], nvars: int, F: Iterable[int]) -> list[Polynomial]:
    """Generators ``I + <Y * prod_{i in F} T_i - 1>`` with ``Y`` as first variable."""
    n1 = nvars + 1
    gens = [f.embed(n1, 1) for f in polys]
    m = _monomial_product(n1, F, extra=1)
    m = (1,) + m[1:]
    gens.append(Polynomial(n1, {m: 1, (0,) * n1: -1}))
    return gens


def saturate(polys: Sequence[Polynomial], nvars: int, F: Iterable[int]) -> list[Polynomial]:
    """Reduced Groebner basis (degrevlex) of ``I : (prod_{i in F} T_i)^inf``.

    Adjoins ``Y`` with ``Y * prod T_i - 1`` and eliminates ``Y`` through a
    block order.
    """
    F = sorted(set(F))
    if not F:
        raise ValueError("saturation needs a nonempty variable set")
    gens = _clean(polys, nvars)
    if not gens:
        return []
    gens = rabinowitsch(gens, nvars, F)
    G = groebner_basis(gens, TermOrder(nvars + 1, "block", 1), nvars + 1)
    out = []
    for g in G:
        if all(e[0] == 0 for e in g.exponents()):
            out.append(Polynomial(nvars, {e[1:]: c for e, c in g.items()}))
    return groebner_basis(out, TermOrder(nvars), nvars) if out else []


def saturation_is_proper(polys: Sequence[Polynomial], nvars: int, F: Iterable[int]) -> bool:
    """True iff ``I : (prod_{i in F} T_i)^inf`` is a proper ideal.

    Equivalently ``V(I)`` meets the torus of the coordinates in ``F``.  Only
    the unit test is needed, so no elimination order is used.
    """
    F = sorted(set(F))
    gens = _clean(polys, nvars)
    if not gens:
        return True
    if not F:
        return not contains_one(gens, nvars)
    return not contains_one(rabinowitsch(gens, nvars, F), nvars + 1)


def dimension_from_leading(lead: Sequence[tuple], nvars: int) -> int:
    """Krull dimension from the leading exponents of a Groebner basis.

    Maximum size of a variable set containing the support of no leading
    monomial.
    """
    supports = [frozenset(i for i, x in enumerate(e) if x) for e in lead]
    if any(not s for s in supports):
        raise ValueError("unit ideal has no dimension")
    # minimal supports suffice
    supports = sorted(set(supports), key=len)
    mins = []
    for s in supports:
        if not any(t <= s for t in mins):
            mins.append(s)
    best = 0

    def search(i: int, chosen: frozenset, size: int) -> None:
        nonlocal best
        if size + (nvars - i) <= best:
            return
        if i == nvars:
            best = max(best, size)
            return
        with_i = chosen | {i}
        if not any(s <= with_i for s in mins):
            search(i + 1, with_i, size + 1)
        search(i + 1, chosen, size)

    search(0, frozenset(), 0)
    return best


class Ideal:
    """An ideal of ``Q[T1..Tn]`` with cached Groebner data."""

    def __init__(self, gens: Iterable[Polynomial], nvars: int):
        self.nvars = nvars
        self.gens = tuple(_clean(gens, nvars))
        self._gb: dict = {}

    def groebner(self, order: Optional[TermOrder] = None) -> list[Polynomial]:
        order = order or TermOrder(self.nvars)
        if order not in self._gb:
            self._gb[order] = groebner_basis(self.gens, order, self.nvars)
        return self._gb[order]

    def contains_one(self) -> bool:
        if not self.gens:
            return False
        if TermOrder(self.nvars) in self._gb:
            G = self._gb[TermOrder(self.nvars)]
            return len(G) == 1 and G[0].is_constant()
        return contains_one(self.gens, self.nvars)

    def normal_form(self, f: Polynomial) -> Polynomial:
        return normal_form(f, self.groebner(), TermOrder(self.nvars))

    def __contains__(self, f: Polynomial) -> bool:
        return self.normal_form(f).is_zero()

    def saturate(self, F: Iterable[int]) -> "Ideal":
        return Ideal(saturate(self.gens, self.nvars, F), self.nvars)

    def saturation_is_proper(self, F: Iterable[int]) -> bool:
        return saturation_is_proper(self.gens, self.nvars, F)

    def krull_dimension(self) -> int:
        if not self.gens:
            return self.nvars
        G = self.groebner()
        if len(G) == 1 and G[0].is_constant():
            raise ValueError("the unit ideal has undefined dimension")
        order = TermOrder(self.nvars)
        return dimension_from_leading([leading_exponent(g, order) for g in G], self.nvars)

    def restrict(self, keep: Iterable[int]) -> "Ideal":
        keep = set(keep)
        return Ideal([g.restrict(keep) for g in self.gens], self.nvars)

    def __add__(self, other) -> "Ideal":
        extra = other.gens if isinstance(other, Ideal) else tuple(other)
        return Ideal(self.gens + tuple(extra), self.nvars)

    def __repr__(self) -> str:
        return f"Ideal({[str(g) for g in self.gens]}, nvars={self.nvars})"


def jacobian(gens: Sequence[Polynomial], nvars: int) -> list[list[Polynomial]]:
    return [[g.derivative(j + 1) for j in range(nvars)] for g in gens]


def determinant(M: Sequence[Sequence[Polynomial]], nvars: int) -> Polynomial:
    """Determinant of a small polynomial matrix by Laplace expansion with memo."""
    n = len(M)
    if n == 0:
        return Polynomial.constant(nvars, 1)
    memo: dict = {}

    def rec(row: int, cols: tuple) -> Polynomial:
        if row == n:
            return Polynomial.constant(nvars, 1)
        key = (row, cols)
        if key in memo:
            return memo[key]
        total = Polynomial(nvars)
        for idx, c in enumerate(cols):
            a = M[row][c]
            if a.is_zero():
                continue
            sub = rec(row + 1, cols[:idx] + cols[idx + 1:])
            if sub.is_zero():
                continue
            term = a * sub
            total = total + term if idx % 2 == 0 else total - term
        memo[key] = total
        return total

    return rec(0, tuple(range(n)))


def jacobian_minor_ideal(gens: Sequence[Polynomial], nvars: int, c: int) -> list[Polynomial]:
    """Generators ``I + (c x c minors of the Jacobian)``."""
    J = jacobian(gens, nvars)
    out = list(_clean(gens, nvars))
    if c <= 0:
        return out + [Polynomial.constant(nvars, 1)]
    rows = [i for i in range(len(J)) if any(not x.is_zero() for x in J[i])]
    cols = [j for j in range(nvars) if any(not J[i][j].is_zero() for i in rows)]
    seen = set()
    for R in combinations(rows, c):
        for C in combinations(cols, c):
            d = determinant([[J[i][j] for j in C] for i in R], nvars)
            if not d.is_zero() and d not in seen:
                seen.add(d)
                out.append(d)
    return out
