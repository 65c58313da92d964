"""Polynomials over Q in variables ``T1..Tr`` and graded rings.

The text grammar (whitespace ignored)::

    expr   := term (('+'|'-') term)*
    term   := [coef '*'] factor ('*' factor)*  |  coef
    coef   := ['-'] digits ['/' digits]
    factor := 'T' index ['^' digits]

``T[3]`` is accepted as a synonym of ``T3``.  Printing uses the same grammar
with terms in descending degrevlex order (``T1 > T2 > ... > Tr``).
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence, Union

from . import exactlin as el
from .abgroup import AbelianGroup, GroupHom, create_group, create_hom

Number = Union[int, Fraction]


class PolynomialSyntaxError(ValueError):
    def __init__(self, text: str, pos: int, msg: str):
        super().__init__(f"{msg} at position {pos} in {text!r}")
        self.text = text
        self.pos = pos


class HomogeneityError(ValueError):
    """A relation is not homogeneous with respect to the grading."""


class FormatError(ValueError):
    """Matrix data not in the expected standard form."""


def degrevlex_key(exp: Sequence[int]) -> tuple:
    return (sum(exp), tuple(-e for e in reversed(exp)))


class Polynomial:
    """Immutable sparse polynomial with exact rational coefficients."""

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Optional[Mapping[tuple, Number]] = None):
        self.nvars = nvars
        clean = {}
        if terms:
            for e, c in terms.items():
                if c:
                    e = tuple(e)
                    if len(e) != nvars:
                        raise ValueError(f"exponent {e} has wrong length for {nvars} variables")
                    clean[e] = c if isinstance(c, Fraction) else Fraction(c)
        self._terms = clean
        self._hash = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def variable(cls, nvars: int, i: int) -> "Polynomial":
        """The variable ``T_i`` (1-based)."""
        if not 1 <= i <= nvars:
            raise ValueError(f"variable index {i} out of range 1..{nvars}")
        e = [0] * nvars
        e[i - 1] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def constant(cls, nvars: int, c: Number) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def monomial(cls, exp: Sequence[int], c: Number = 1) -> "Polynomial":
        return cls(len(exp), {tuple(exp): c})

    @classmethod
    def parse(cls, text: str, nvars: int) -> "Polynomial":
        return parse_polynomial(text, nvars)

    # -- basic protocol ---------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and not any(next(iter(self._terms))))

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == Polynomial.constant(self.nvars, other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError("polynomials in different rings")
            return other
        return Polynomial.constant(self.nvars, other)

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        t = dict(self._terms)
        for e, c in other._terms.items():
            t[e] = t.get(e, 0) + c
        return Polynomial(self.nvars, t)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            c = Fraction(other)
            return Polynomial(self.nvars, {e: c * v for e, v in self._terms.items()})
        other = self._coerce(other)
        t: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return Polynomial(self.nvars, t)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power")
        out = Polynomial.constant(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- structure --------------------------------------------------------
    def exponents(self) -> list[tuple]:
        return list(self._terms)

    def sorted_terms(self) -> list[tuple[tuple, Fraction]]:
        """Terms in descending degrevlex order."""
        return sorted(self._terms.items(), key=lambda t: degrevlex_key(t[0]), reverse=True)

    def leading_term(self) -> tuple[tuple, Fraction]:
        return max(self._terms.items(), key=lambda t: degrevlex_key(t[0]))

    def support(self) -> set[int]:
        """1-based indices of variables occurring in the polynomial."""
        s = set()
        for e in self._terms:
            s.update(i + 1 for i, x in enumerate(e) if x)
        return s

    def total_degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def derivative(self, i: int) -> "Polynomial":
        """Partial derivative with respect to ``T_i`` (1-based)."""
        k = i - 1
        t = {}
        for e, c in self._terms.items():
            if e[k]:
                ne = list(e)
                ne[k] -= 1
                t[tuple(ne)] = c * e[k]
        return Polynomial(self.nvars, t)

    def restrict(self, keep: Iterable[int]) -> "Polynomial":
        """Set ``T_j = 0`` for every ``j`` not in ``keep`` (1-based)."""
        drop = [j for j in range(self.nvars) if (j + 1) not in set(keep)]
        return Polynomial(self.nvars, {e: c for e, c in self._terms.items() if not any(e[j] for j in drop)})

    def evaluate(self, point: Sequence[Number]) -> Fraction:
        total = Fraction(0)
        for e, c in self._terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v *= Fraction(x) ** k
            total += v
        return total

    def embed(self, nvars: int, offset: int = 0) -> "Polynomial":
        """Same polynomial in a ring with ``nvars`` variables, shifted by ``offset``."""
        pre, post = offset, nvars - offset - self.nvars
        if post < 0:
            raise ValueError("target ring too small")
        return Polynomial(nvars, {(0,) * pre + e + (0,) * post: c for e, c in self._terms.items()})

    def __str__(self) -> str:
        return format_polynomial(self)

    def __repr__(self) -> str:
        return f"Polynomial({self.nvars}, {format_polynomial(self)!r})"


def _format_coef(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_polynomial(f: Polynomial) -> str:
    if f.is_zero():
        return "0"
    parts = []
    for e, c in f.sorted_terms():
        factors = []
        for i, k in enumerate(e):
            if k == 1:
                factors.append(f"T{i + 1}")
            elif k > 1:
                factors.append(f"T{i + 1}^{k}")
        mag = abs(c)
        if not factors:
            body = _format_coef(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = _format_coef(mag) + "*" + "*".join(factors)
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


_TOKEN = re.compile(r"\s*(?:(\d+)|(T\[\s*\d+\s*\]|T\d+)|(.))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else pos
        if m.group(1) is not None:
            toks.append(("num", m.group(1), start))
        elif m.group(2) is not None:
            idx = re.sub(r"[^\d]", "", m.group(2))
            toks.append(("var", idx, start))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch.isspace():
                pass
            elif ch in "+-*/^":
                toks.append((ch, ch, start))
            else:
                raise PolynomialSyntaxError(text, start, f"unexpected character {ch!r}")
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


def parse_polynomial(text: str, nvars: int) -> Polynomial:
    """Parse ``text`` into a polynomial in ``T1..T{nvars}``."""
    toks = _tokenize(text)
    i = 0

    def peek():
        return toks[i]

    def take(kind):
        nonlocal i
        t = toks[i]
        if t[0] != kind:
            raise PolynomialSyntaxError(text, t[2], f"expected {kind}, found {t[1] or 'end of input'!r}")
        i += 1
        return t

    def parse_coef() -> Fraction:
        num = int(take("num")[1])
        if peek()[0] == "/":
            take("/")
            t = take("num")
            den = int(t[1])
            if den == 0:
                raise PolynomialSyntaxError(text, t[2], "zero denominator")
            return Fraction(num, den)
        return Fraction(num)

    def parse_factor(exp: list) -> None:
        t = take("var")
        k = int(t[1])
        if not 1 <= k <= nvars:
            raise PolynomialSyntaxError(text, t[2], f"unknown variable T{k} (ring has {nvars} variables)")
        power = 1
        if peek()[0] == "^":
            take("^")
            power = int(take("num")[1])
        exp[k - 1] += power

    def parse_term(sign: int) -> tuple[tuple, Fraction]:
        coef = Fraction(sign)
        exp = [0] * nvars
        if peek()[0] == "-":
            take("-")
            coef = -coef
        if peek()[0] == "num":
            coef *= parse_coef()
            if peek()[0] != "*":
                return tuple(exp), coef
            take("*")
        parse_factor(exp)
        while peek()[0] == "*":
            take("*")
            if peek()[0] == "num":
                coef *= parse_coef()
            else:
                parse_factor(exp)
        return tuple(exp), coef

    terms: dict = {}
    sign = 1
    if peek()[0] in "+-" and peek()[0] != "end":
        if peek()[0] == "-":
            sign = -1
        i += 1
    while True:
        e, c = parse_term(sign)
        terms[e] = terms.get(e, 0) + c
        kind = peek()[0]
        if kind == "end":
            break
        if kind not in "+-":
            t = peek()
            raise PolynomialSyntaxError(text, t[2], f"unexpected {t[1]!r}")
        sign = 1 if kind == "+" else -1
        i += 1
    return Polynomial(nvars, terms)


# ---------------------------------------------------------------------------
# graded rings


class GradedRing:
    """``K[T1..Tr] / <g1..gs>`` graded by ``Q: Z^r -> K``."""

    def __init__(self, relations: Sequence[Polynomial], grading: GroupHom):
        self.grading = grading
        self.relations = tuple(relations)

    @property
    def r(self) -> int:
        return self.grading.source.rank

    @property
    def s(self) -> int:
        return len(self.relations)

    @property
    def K(self) -> AbelianGroup:
        return self.grading.target

    def degree(self, exp: Sequence[int]):
        return self.grading(exp)

    def var_degree(self, i: int):
        """Degree of ``T_i`` (1-based)."""
        return self.grading.column(i - 1)

    def relation_degree(self, g: Polynomial):
        return self.grading(next(iter(g.exponents())))

    @property
    def free_degrees(self) -> list[tuple]:
        """Free parts ``q_1..q_r`` of the generator degrees."""
        return [self.grading.column(j).free for j in range(self.r)]

    @cached_property
    def ideal(self):
        from .groebner import Ideal

        return Ideal(self.relations, self.r)

    @cached_property
    def krull_dimension(self) -> int:
        return self.ideal.krull_dimension()

    def is_homogeneous(self) -> bool:
        try:
            check_homogeneous(self.relations, self.grading)
        except HomogeneityError:
            return False
        return True

    def __str__(self) -> str:
        K = self.K
        return f"GR({self.r}, {self.s}, [{K.rank}, [{', '.join(map(str, K.torsion))}]])"

    def __repr__(self) -> str:
        return str(self)


def check_homogeneous(relations: Sequence[Polynomial], Q: GroupHom) -> None:
    for idx, g in enumerate(relations, 1):
        degs = {}
        for e in g.exponents():
            degs.setdefault(Q(e), e)
        if len(degs) > 1:
            (d1, e1), (d2, e2) = list(degs.items())[:2]
            m1 = format_polynomial(Polynomial.monomial(e1))
            m2 = format_polynomial(Polynomial.monomial(e2))
            raise HomogeneityError(
                f"relation {idx} ({format_polynomial(g)}) is not homogeneous: "
                f"deg({m1}) = {d1} but deg({m2}) = {d2}"
            )


def create_graded_ring(relations: Sequence[Union[str, Polynomial]], r: int, Q: GroupHom, check: bool = True) -> GradedRing:
    """Build a graded ring; ``check=False`` mirrors the session's ``'nocheck'``."""
    if Q.source.rank != r or Q.source.torsion:
        raise ValueError(f"degree map source must be Z^{r}, got {Q.source}")
    polys = [parse_polynomial(g, r) if isinstance(g, str) else g for g in relations]
    for g in polys:
        if g.nvars != r:
            raise ValueError(f"relation {g} lives in {g.nvars} variables, expected {r}")
    if check:
        for idx, g in enumerate(polys, 1):
            if g.is_constant() and not g.is_zero():
                raise HomogeneityError(f"relation {idx} is a unit")
        check_homogeneous(polys, Q)
    return GradedRing(polys, Q)


def _complexity_one_blocks(P: Sequence[Sequence[int]], m: int) -> tuple[list[int], list[list[int]], list[list[int]]]:
    """Split the columns of ``P`` into blocks 0..m; returns (block0, blocks, exponents)."""
    r = len(P[0])
    row0 = P[0]
    block0 = [j for j in range(r) if row0[j] < 0]
    if not block0:
        raise FormatError("row 1 has no negative entries (expected -l0 on block 0)")
    l0 = [row0[j] for j in block0]
    blocks = [block0]
    exps = [[-x for x in l0]]
    used = set(block0)
    for i in range(m):
        row = P[i]
        neg = [j for j in range(r) if row[j] < 0]
        if neg != block0 or [row[j] for j in block0] != l0:
            raise FormatError(f"row {i + 1} does not carry -l0 on block 0")
        pos = [j for j in range(r) if row[j] > 0]
        if not pos or used.intersection(pos):
            raise FormatError(f"row {i + 1} has no fresh positive block")
        blocks.append(pos)
        exps.append([row[j] for j in pos])
        used.update(pos)
    return block0, blocks, exps


def ring_from_AP(P: Sequence[Sequence[int]], A: Sequence[Sequence[int]]) -> GradedRing:
    """Complexity-one Cox ring from the pair ``(A, P)``.

    ``A`` lists ``m + 1`` pairwise independent vectors ``a_0..a_m`` in Q^2,
    the first ``m`` rows of ``P`` have the shape ``[-l0, l1, 0, ...]``,
    ``[-l0, 0, l2, ...]``, ... and the remaining rows are arbitrary.
    """
    P = el.as_matrix(P)
    A = [tuple(a) for a in A]
    m = len(A) - 1
    if m < 1 or any(len(a) != 2 for a in A):
        raise FormatError("A must consist of at least two vectors in Q^2")
    for i in range(len(A)):
        for j in range(i + 1, len(A)):
            if A[i][0] * A[j][1] - A[i][1] * A[j][0] == 0:
                raise FormatError(f"columns {i + 1} and {j + 1} of A are linearly dependent")
    if len(P) < m:
        raise FormatError(f"P needs at least {m} rows")
    r = len(P[0])
    _, blocks, exps = _complexity_one_blocks(P, m)

    def block_monomial(i: int) -> Polynomial:
        e = [0] * r
        for j, l in zip(blocks[i], exps[i]):
            e[j] = l
        return Polynomial.monomial(e)

    rels = []
    for i in range(m - 1):
        f = [block_monomial(i + k) for k in range(3)]
        a = [A[i + k] for k in range(3)]
        # cofactor expansion along the monomial row
        c0 = a[1][0] * a[2][1] - a[2][0] * a[1][1]
        c1 = a[0][0] * a[2][1] - a[2][0] * a[0][1]
        c2 = a[0][0] * a[1][1] - a[1][0] * a[0][1]
        rels.append(f[0] * c0 - f[1] * c1 + f[2] * c2)

    Q = _quotient_by_rows(P)
    ring = GradedRing(rels, Q)
    check_homogeneous(rels, Q)
    return ring


def _quotient_by_rows(P: Sequence[Sequence[int]]) -> GroupHom:
    """Projection ``Z^r -> Z^r / (row space of P)`` in invariant-factor coordinates."""
    r = len(P[0])
    M = el.transpose(P)  # r x n, columns span the relation lattice
    S, U, _ = el.smith_normal_form(M)
    diag = [S[i][i] if i < len(S[0]) else 0 for i in range(r)]
    free_rows = [U[i] for i in range(r) if diag[i] == 0]
    tors = [(diag[i], U[i]) for i in range(r) if diag[i] > 1]
    if free_rows:
        H, _ = el.hermite_normal_form(el.transpose(free_rows))
        free_rows = list(el.transpose(H))
    K = create_group(len(free_rows), [d for d, _ in tors])
    rows = free_rows + [tuple(x % d for x in row) for d, row in tors]
    return create_hom(create_group(r), K, rows)
