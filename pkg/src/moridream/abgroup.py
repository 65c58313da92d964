"""Finitely generated abelian groups ``Z^k + Z/d1 + ... + Z/dt``.

A group element is a coordinate vector: ``k`` free integers followed by
``t`` residues.  Subgroups are stored through their preimage lattice in
``Z^(k+t)`` (which always contains the torsion relations ``d_j e_(k+j)``);
the Hermite basis of that lattice is the canonical form, so two subgroups
are equal exactly when their canonical forms agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import exactlin as el


class GroupError(ValueError):
    """Invalid group data (torsion orders, ill-defined homomorphisms)."""


def _fmt_list(xs: Iterable[int]) -> str:
    return "[" + ", ".join(str(x) for x in xs) + "]"


@dataclass(frozen=True)
class AbelianGroup:
    rank: int
    torsion: tuple[int, ...] = ()

    @property
    def ngens(self) -> int:
        return self.rank + len(self.torsion)

    @property
    def orders(self) -> tuple:
        """Order of each coordinate generator (0 stands for infinite)."""
        return (0,) * self.rank + self.torsion

    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    def order(self):
        """Group order, ``math.inf`` for infinite groups."""
        if self.rank:
            return math.inf
        return math.prod(self.torsion)

    def element(self, coords: Sequence[int]) -> "GroupElement":
        coords = tuple(int(c) for c in coords)
        if len(coords) == self.rank and self.torsion:
            coords = coords + (0,) * len(self.torsion)
        if len(coords) != self.ngens:
            raise GroupError(f"element {list(coords)} does not fit {self}")
        return GroupElement(self, self.reduce(coords))

    def zero(self) -> "GroupElement":
        return GroupElement(self, (0,) * self.ngens)

    def gens(self) -> list["GroupElement"]:
        return [self.element([1 if i == j else 0 for i in range(self.ngens)]) for j in range(self.ngens)]

    def reduce(self, coords: Sequence[int]) -> tuple:
        k = self.rank
        return tuple(coords[:k]) + tuple(c % d for c, d in zip(coords[k:], self.torsion))

    def relation_columns(self) -> list[tuple]:
        n = self.ngens
        cols = []
        for j, d in enumerate(self.torsion):
            v = [0] * n
            v[self.rank + j] = d
            cols.append(tuple(v))
        return cols

    def full(self) -> "Subgroup":
        return Subgroup.generated(self, self.gens())

    def trivial_subgroup(self) -> "Subgroup":
        return Subgroup.generated(self, [])

    def to_json(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}

    @classmethod
    def from_json(cls, data: dict) -> "AbelianGroup":
        return create_group(data["rank"], data.get("torsion", []))

    def __str__(self) -> str:
        return f"AG({self.rank}, {_fmt_list(self.torsion)})"


def create_group(rank: int, torsion: Sequence[int] = ()) -> AbelianGroup:
    """Group ``Z^rank`` plus cyclic factors, put into invariant-factor form."""
    if rank < 0:
        raise GroupError("negative rank")
    for d in torsion:
        if int(d) <= 1:
            raise GroupError(f"invalid torsion order {d}; orders must be >= 2")
    torsion = [int(d) for d in torsion]
    if torsion:
        diag = tuple(tuple(d if i == j else 0 for j in range(len(torsion))) for i, d in enumerate(torsion))
        torsion = [d for d in el.smith_diagonal(diag) if d > 1]
    return AbelianGroup(rank, tuple(torsion))


@dataclass(frozen=True)
class GroupElement:
    parent: AbelianGroup
    coords: tuple

    def _check(self, other: "GroupElement") -> None:
        if other.parent != self.parent:
            raise GroupError("elements of different groups")

    def __add__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        return GroupElement(self.parent, self.parent.reduce([a + b for a, b in zip(self.coords, other.coords)]))

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        return GroupElement(self.parent, self.parent.reduce([a - b for a, b in zip(self.coords, other.coords)]))

    def __neg__(self) -> "GroupElement":
        return GroupElement(self.parent, self.parent.reduce([-a for a in self.coords]))

    def __mul__(self, n: int) -> "GroupElement":
        return GroupElement(self.parent, self.parent.reduce([n * a for a in self.coords]))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coords)

    @property
    def free(self) -> tuple:
        return self.coords[: self.parent.rank]

    @property
    def tors(self) -> tuple:
        return self.coords[self.parent.rank:]

    def __str__(self) -> str:
        return _fmt_list(self.coords)


@dataclass(frozen=True)
class GroupHom:
    """Homomorphism given by an integer matrix acting on coordinates.

    Rows ``1..k_tgt`` give free coordinates, the remaining rows are read
    modulo the torsion orders of the target.
    """

    source: AbelianGroup
    target: AbelianGroup
    matrix: tuple

    def __call__(self, x) -> GroupElement:
        coords = x.coords if isinstance(x, GroupElement) else tuple(x)
        if len(coords) == self.source.rank and self.source.torsion:
            coords = tuple(coords) + (0,) * len(self.source.torsion)
        return GroupElement(self.target, self.target.reduce(el.matvec(self.matrix, coords)))

    def column(self, j: int) -> GroupElement:
        return GroupElement(self.target, tuple(row[j] for row in self.matrix))

    def images(self) -> list[GroupElement]:
        return [self.column(j) for j in range(self.source.ngens)]

    @property
    def free_matrix(self) -> tuple:
        """Free rows only: the induced map to ``K (x) Q``."""
        return self.matrix[: self.target.rank]

    def __str__(self) -> str:
        s, t = self.source, self.target
        return f"AGH([{s.rank}, {_fmt_list(s.torsion)}], [{t.rank}, {_fmt_list(t.torsion)}])"


def create_hom(source: AbelianGroup, target: AbelianGroup, matrix: Sequence[Sequence[int]]) -> GroupHom:
    """Validate shape and well-definedness on torsion, then build the hom."""
    rows = [tuple(int(x) for x in r) for r in matrix]
    if len(rows) != target.ngens or any(len(r) != source.ngens for r in rows):
        raise GroupError(
            f"matrix shape {len(rows)}x{len(rows[0]) if rows else 0} does not match "
            f"{target.ngens}x{source.ngens}"
        )
    k = target.rank
    rows = rows[:k] + [tuple(x % d for x in r) for r, d in zip(rows[k:], target.torsion)]
    for j, d in enumerate(source.torsion):
        col = source.rank + j
        img = [d * rows[i][col] for i in range(len(rows))]
        if any(img[:k]) or any(v % dt for v, dt in zip(img[k:], target.torsion)):
            raise GroupError(
                f"homomorphism ill-defined: generator {col + 1} has order {d} "
                f"but {d} times its image is nonzero"
            )
    return GroupHom(source, target, tuple(rows))


# ---------------------------------------------------------------------------
# subgroups via preimage lattices


def _lattice_contains(basis: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    """Membership in a lattice given by a column-HNF basis."""
    v = list(v)
    n = len(v)
    for col in basis:
        p = next(i for i in range(n) if col[i])
        if any(v[i] for i in range(p)):
            return False
        q, rem = divmod(v[p], col[p])
        if rem:
            return False
        if q:
            v = [a - q * b for a, b in zip(v, col)]
    return not any(v)


@dataclass(frozen=True, eq=False)
class Subgroup:
    parent: AbelianGroup
    generators: tuple
    canonical_form: tuple = field(repr=False)

    @classmethod
    def generated(cls, parent: AbelianGroup, elements: Iterable) -> "Subgroup":
        gens = []
        for e in elements:
            if not isinstance(e, GroupElement):
                e = parent.element(e)
            elif e.parent != parent:
                raise GroupError("generator outside the parent group")
            gens.append(e)
        cols = [g.coords for g in gens] + parent.relation_columns()
        return cls(parent, tuple(gens), el.hnf_columns(cols, parent.ngens))

    @classmethod
    def from_lattice(cls, parent: AbelianGroup, cols: Iterable[Sequence[int]]) -> "Subgroup":
        cols = [tuple(c) for c in cols] + parent.relation_columns()
        basis = el.hnf_columns(cols, parent.ngens)
        gens = tuple(GroupElement(parent, parent.reduce(c)) for c in basis)
        gens = tuple(g for g in gens if not g.is_zero())
        return cls(parent, gens, basis)

    def __eq__(self, other) -> bool:
        return isinstance(other, Subgroup) and self.parent == other.parent and self.canonical_form == other.canonical_form

    def __hash__(self) -> int:
        return hash((self.parent, self.canonical_form))

    def __contains__(self, e) -> bool:
        coords = e.coords if isinstance(e, GroupElement) else self.parent.element(e).coords
        return _lattice_contains(self.canonical_form, coords)

    def is_subgroup_of(self, other: "Subgroup") -> bool:
        return all(_lattice_contains(other.canonical_form, c) for c in self.canonical_form)

    def structure(self) -> AbelianGroup:
        """Isomorphism type of the subgroup itself."""
        B = self.canonical_form
        m = len(B)
        n = self.parent.ngens
        if m == 0:
            return AbelianGroup(0, ())
        # coordinates of the torsion relations in the lattice basis
        coords = []
        Bm = el.from_columns(B, n)
        for d in self.parent.relation_columns():
            c = el.rational_solve(Bm, d)
            coords.append(tuple(int(x) for x in c))
        if not coords:
            return AbelianGroup(m, ())
        C = el.from_columns(coords, m)
        diag = el.smith_diagonal(C)
        return AbelianGroup(m - len(diag), tuple(d for d in diag if d > 1))

    def __str__(self) -> str:
        return str(self.structure())


def image(h: GroupHom) -> Subgroup:
    return Subgroup.generated(h.target, h.images())


def kernel(h: GroupHom) -> Subgroup:
    src, tgt = h.source, h.target
    rel = tgt.relation_columns()
    n_src = src.ngens
    A = [list(row) + [-r[i] for r in rel] for i, row in enumerate(h.matrix)]
    if not A:
        return src.full()
    K = el.integer_kernel(el.as_matrix(A), n_src + len(rel))
    cols = [c[:n_src] for c in el.transpose(K)] if K and K[0] else []
    return Subgroup.from_lattice(src, cols)


def subgroup_from_hom_columns(h: GroupHom, indices: Iterable[int]) -> Subgroup:
    """Image of the coordinate sublattice spanned by ``e_i``, ``i in indices``."""
    return Subgroup.generated(h.target, [h.column(i) for i in indices])


def factor_group(G: AbelianGroup, S: Subgroup) -> AbelianGroup:
    """Invariant factors of ``G / S``."""
    if S.parent != G:
        raise GroupError("subgroup of a different group")
    n = G.ngens
    B = S.canonical_form
    if not B:
        return create_group(n, [])
    diag = el.smith_diagonal(el.from_columns(B, n))
    return AbelianGroup(n - len(diag), tuple(d for d in diag if d > 1))


def intersect(*subgroups: Subgroup) -> Subgroup:
    """Intersection of subgroups of one parent group."""
    if not subgroups:
        raise GroupError("nothing to intersect")
    parent = subgroups[0].parent
    n = parent.ngens
    cur = subgroups[0].canonical_form
    for S in subgroups[1:]:
        if S.parent != parent:
            raise GroupError("subgroups of different groups")
        B1, B2 = cur, S.canonical_form
        if not B1 or not B2:
            cur = ()
            continue
        a = len(B1)
        M = el.from_columns(list(B1) + [tuple(-x for x in c) for c in B2], n)
        K = el.integer_kernel(M)
        cols = []
        if K and K[0]:
            for kc in el.transpose(K):
                x = kc[:a]
                cols.append(tuple(sum(x[j] * B1[j][i] for j in range(a)) for i in range(n)))
        cur = el.hnf_columns(cols, n)
    return Subgroup.from_lattice(parent, cur)


def is_full(S: Subgroup) -> bool:
    return factor_group(S.parent, S).is_trivial()


def element_order_mod(e: GroupElement, S: Subgroup):
    """Least ``l >= 1`` with ``l*e`` in ``S``; ``math.inf`` if none exists."""
    if e.parent != S.parent:
        raise GroupError("element and subgroup live in different groups")
    n = e.parent.ngens
    B = S.canonical_form
    if not B:
        return 1 if e.is_zero() else math.inf
    Smat, U, _ = el.smith_normal_form(el.from_columns(B, n))
    x = el.matvec(U, e.coords)
    order = 1
    for i in range(n):
        d = Smat[i][i] if i < len(Smat[0]) else 0
        if d == 0:
            if x[i]:
                return math.inf
            continue
        order = math.lcm(order, d // math.gcd(d, x[i]))
    return order
