"""Mori dream spaces given by a graded ring and an ample class.

A :class:`MoriDreamSpace` is either *projective* (the free part of ``w``
is nonzero and ``w`` is generic) or *affine* (``w = 0``, every a-face is
relevant; this is the mode for finite class groups).  Faces are 1-based
index tuples naming the coordinates that are nonzero on a stratum.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from typing import Iterable, Optional, Sequence

from . import abgroup as ag
from . import exactlin as el
from .convexgeom import ConeError, Fan, RationalCone, cone_from_rays, fan_assemble, fiber_polytope, normalized_volume
from .gitfan import a_faces, chamber, eff_cone, mov_cone, orbit_cone
from .groebner import jacobian, saturation_is_proper
from .polyring import GradedRing, Polynomial, create_graded_ring

log = logging.getLogger(__name__)


class DomainError(ValueError):
    """A well-formed request the mathematics does not support."""


class NonGenericClassError(DomainError):
    pass


class NotCoxRingError(DomainError):
    """Warning-level: ``w`` outside the moving cone."""


class UnsupportedPresentationError(DomainError):
    pass


def _face(F: Iterable[int]) -> tuple:
    return tuple(sorted(set(F)))


def format_face(F: Sequence[int]) -> str:
    return "{" + ", ".join(map(str, F)) + "}"


def format_faces(faces: Iterable[Sequence[int]]) -> str:
    return "[" + ", ".join(format_face(F) for F in faces) + "]"


class MoriDreamSpace:
    def __init__(self, ring: GradedRing, w: ag.GroupElement):
        self.ring = ring
        self.w = w

    # basic data ------------------------------------------------------------
    @property
    def K(self) -> ag.AbelianGroup:
        return self.ring.K

    @property
    def Q(self) -> ag.GroupHom:
        return self.ring.grading

    @property
    def r(self) -> int:
        return self.ring.r

    @property
    def affine(self) -> bool:
        return not any(self.w.free)

    @cached_property
    def dim(self) -> int:
        return self.ring.krull_dimension - self.K.rank

    @cached_property
    def chamber(self) -> Optional[RationalCone]:
        if self.affine:
            return None
        return chamber(self.ring, self.w.free)

    @cached_property
    def relevant_faces(self) -> list[tuple]:
        faces = a_faces(self.ring)
        if self.affine:
            return list(faces)
        w = self.w.free
        return [F for F in faces if orbit_cone(self.ring, F).contains(w)]

    @cached_property
    def covering_collection(self) -> list[tuple]:
        rel = sorted(self.relevant_faces, key=lambda F: (len(F), F))
        out: list[tuple] = []
        for F in rel:
            s = set(F)
            if not any(set(G) <= s for G in out):
                out.append(F)
        return sorted(out, key=lambda F: (len(F), F))

    def __str__(self) -> str:
        K = self.K
        return f"MDS({self.r}, {self.ring.s}, {self.dim}, [{K.rank}, [{', '.join(map(str, K.torsion))}]])"

    __repr__ = __str__

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "relations": [str(g) for g in self.ring.relations],
            "grading": {"free_rank": self.K.rank, "torsion": list(self.K.torsion), "matrix": [list(row) for row in self.Q.matrix]},
            "ample": None if self.affine else list(self.w.coords),
        }

    # cones -----------------------------------------------------------------
    def eff(self) -> RationalCone:
        return eff_cone(self.ring)

    def mov(self) -> RationalCone:
        return mov_cone(self.ring)

    def sample(self) -> RationalCone:
        """Semiample cone: the closure of the ample chamber."""
        if self.affine:
            raise DomainError("the semiample cone needs a projective space")
        return self.chamber

    # groups ----------------------------------------------------------------
    def face_subgroup(self, F: Iterable[int]) -> ag.Subgroup:
        return ag.subgroup_from_hom_columns(self.Q, [i - 1 for i in F])

    def pic(self) -> ag.Subgroup:
        return ag.intersect(*[self.face_subgroup(F) for F in self.covering_collection])

    def _check_relevant(self, F) -> tuple:
        F = _face(F)
        if F not in set(self.relevant_faces):
            raise DomainError(f"face {format_face(F)} is not relevant")
        return F

    def local_class_group(self, F: Iterable[int]) -> ag.AbelianGroup:
        F = self._check_relevant(F)
        return ag.factor_group(self.K, self.face_subgroup(F))

    def is_factorial(self) -> bool:
        return all(self.local_class_group(F).is_trivial() for F in self.covering_collection)

    def is_qfactorial(self) -> bool:
        return all(self.local_class_group(F).rank == 0 for F in self.covering_collection)

    # singularities ---------------------------------------------------------
    @cached_property
    def codim(self) -> int:
        return self.r - self.ring.krull_dimension

    def total_space_singular_on(self, F: Iterable[int]) -> bool:
        """Does the stratum of ``F`` meet the singular locus of ``V(I)``?"""
        return stratum_meets_singular_locus(self.ring, _face(F), self.codim)

    @cached_property
    def _sing_flags(self) -> dict:
        out = {}
        for F in self.relevant_faces:
            a = self.total_space_singular_on(F)
            b = not self.local_class_group(F).is_trivial()
            out[F] = (a, b)
        return out

    def sing(self) -> "SingularLocus":
        strata = sorted((F for F, (a, b) in self._sing_flags.items() if a or b), key=lambda F: (len(F), F))
        return SingularLocus(self.ring, self.codim, strata)

    def is_quasismooth(self) -> bool:
        return not any(a for a, _ in self._sing_flags.values())

    def is_smooth(self) -> bool:
        return not any(a or b for a, b in self._sing_flags.values())

    # canonical class -------------------------------------------------------
    def _require_ci(self) -> None:
        if self.ring.krull_dimension != self.r - self.ring.s:
            raise UnsupportedPresentationError(
                f"{self.ring.s} relations but codimension {self.codim}: not a complete intersection presentation"
            )

    def anticanonical(self) -> ag.GroupElement:
        self._require_ci()
        total = self.K.zero()
        for i in range(1, self.r + 1):
            total = total + self.ring.var_degree(i)
        for g in self.ring.relations:
            total = total - self.ring.relation_degree(g)
        return total

    def canonical(self) -> ag.GroupElement:
        return -self.anticanonical()

    def gorenstein_order(self):
        return ag.element_order_mod(self.canonical(), self.pic())

    def is_qgorenstein(self) -> bool:
        return self.gorenstein_order() != math.inf

    def is_gorenstein(self) -> bool:
        return self.gorenstein_order() == 1

    def gorenstein_index(self) -> int:
        order = self.gorenstein_order()
        if order == math.inf:
            raise DomainError("X is not Q-Gorenstein")
        return int(order)

    def is_fano(self) -> bool:
        if self.affine:
            return False
        if not self.is_qgorenstein():
            return False
        return self.chamber.contains_relint(self.anticanonical().free)

    # toric ambient ---------------------------------------------------------
    @cached_property
    def degree_lattice(self) -> tuple:
        """Columns spanning ``M = ker Q``."""
        return ag.kernel(self.Q).canonical_form

    def canonical_ambient_fan(self) -> Fan:
        if self.affine:
            raise DomainError("the canonical ambient fan is defined for projective spaces")
        B = self.degree_lattice
        n = len(B)
        rays = [tuple(col[i] for col in B) for i in range(self.r)]
        cones = []
        for F in self.covering_collection:
            gens = [rays[i] for i in range(self.r) if i + 1 not in F]
            cones.append(cone_from_rays(gens, n))
        return fan_assemble(cones)

    def irrelevant_ideal(self) -> list[Polynomial]:
        out = []
        for F in self.covering_collection:
            e = [0] * self.r
            for i in F:
                e[i - 1] = 1
            out.append(Polynomial.monomial(e))
        return out

    # intersection theory ---------------------------------------------------
    @cached_property
    def toric_chamber(self) -> RationalCone:
        """A maximal chamber of the toric GIT fan inside the ample chamber."""
        if self.affine:
            raise DomainError("intersection numbers need a projective space")
        return toric_chamber(self.ring.free_degrees, self.K.rank, self.chamber.relint_point())

    def _class_vector(self, c) -> tuple:
        if isinstance(c, ag.GroupElement):
            return tuple(c.free)
        c = tuple(c)
        return c[: self.K.rank]

    def intersection_number(self, classes: Sequence, base: Optional[Sequence[int]] = None, extra_doublings: int = 0) -> Fraction:
        """Top intersection ``(u_1 ... u_dim)`` on ``X``.

        ``base`` and ``extra_doublings`` change the nef decomposition; the
        result does not depend on them.
        """
        if self.affine:
            raise DomainError("intersection numbers need a projective space")
        self._require_ci()
        if len(classes) != self.dim:
            raise DomainError(f"need {self.dim} classes, got {len(classes)}")
        vecs = [self._class_vector(c) for c in classes]
        vecs += [tuple(self.ring.relation_degree(g).free) for g in self.ring.relations]
        return toric_intersection(self.Q, self.toric_chamber, vecs, base, extra_doublings)

    def self_intersections(self) -> list[Fraction]:
        self._require_dim2()
        q = self.ring.free_degrees
        return [self.intersection_number([q[i], q[i]]) for i in range(self.r)]

    def _require_dim2(self) -> None:
        if self.dim != 2:
            raise DomainError(f"intersection graphs need a surface, dim X = {self.dim}")

    def intersection_matrix(self) -> list[list[Fraction]]:
        self._require_dim2()
        q = self.ring.free_degrees
        n = self.r
        M = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                M[i][j] = M[j][i] = self.intersection_number([q[i], q[j]])
        return M

    def intersection_graph(self) -> list[tuple]:
        M = self.intersection_matrix()
        return [(i + 1, j + 1) for i, j in combinations(range(self.r), 2) if M[i][j] > 0]


@dataclass
class SingularLocus:
    ring: GradedRing
    codim: int
    strata: list

    def ideal_generators(self, limit: Optional[int] = None) -> list[Polynomial]:
        """Relations plus the ``codim x codim`` Jacobian minors (raw list)."""
        from .groebner import jacobian_minor_ideal

        if limit is not None and self.minor_count() > limit:
            raise DomainError(f"{self.minor_count()} minors exceed the limit {limit}")
        return jacobian_minor_ideal(self.ring.relations, self.ring.r, self.codim)

    def minor_count(self) -> int:
        return math.comb(self.ring.s, self.codim) * math.comb(self.ring.r, self.codim)

    def __str__(self) -> str:
        return format_faces(self.strata)


# ---------------------------------------------------------------------------
# singular strata via Fitting ideals in the localization at T_F


def _is_unit(p: Polynomial, F: set) -> bool:
    if not p.is_monomial():
        return False
    (e,) = p.exponents()
    return all(x == 0 or i + 1 in F for i, x in enumerate(e))


def stratum_meets_singular_locus(R: GradedRing, F: tuple, c: int) -> bool:
    """Test whether ``V(I) cap {T_j = 0 (j not in F), T_i != 0 (i in F)}`` has a point where the Jacobian rank drops below ``c``.

    Entries that are monomials in the ``T_i``, ``i in F``, are units on the
    stratum, and pivoting on a unit lowers the size of the Fitting ideal
    by one.  Only what is left after pivoting goes into a Groebner test.
    """
    keep = set(F)
    r = R.r
    rels = [g.restrict(keep) for g in R.relations]
    rels = [g for g in rels if not g.is_zero()]
    if c <= 0:
        return False
    J = [[e.restrict(keep) for e in row] for row in jacobian(R.relations, r)]
    while c > 0:
        J = [row for row in J if any(not x.is_zero() for x in row)]
        if not J:
            # the Fitting ideal vanishes on the stratum
            return _stratum_nonempty(rels, r, F)
        ncols = len(J[0])
        J = [[row[j] for j in range(ncols) if any(not rw[j].is_zero() for rw in J)] for row in J]
        piv = None
        for i, row in enumerate(J):
            for j, x in enumerate(row):
                if _is_unit(x, keep) and (piv is None or (x.is_constant() and not J[piv[0]][piv[1]].is_constant())):
                    piv = (i, j)
            if piv is not None and J[piv[0]][piv[1]].is_constant():
                break
        if piv is None:
            break
        pi, pj = piv
        p = J[pi][pj]
        prow = J[pi]
        newJ = []
        for i, row in enumerate(J):
            if i == pi:
                continue
            a = row[pj]
            if a.is_zero():
                newJ.append([x for j, x in enumerate(row) if j != pj])
            else:
                newJ.append([p * x - a * prow[j] for j, x in enumerate(row) if j != pj])
        J = newJ
        c -= 1
    if c == 0:
        return False
    if len(J) < c or len(J[0]) < c:
        # too few rows or columns: the Fitting ideal is zero
        return _stratum_nonempty(rels, r, F)
    from .groebner import determinant

    minors = []
    for rows in combinations(range(len(J)), c):
        for cols in combinations(range(len(J[0])), c):
            d = determinant([[J[i][j] for j in cols] for i in rows], r)
            if not d.is_zero():
                if _is_unit(d, keep):
                    return False
                minors.append(d)
    return _stratum_nonempty(rels + minors, r, F)


def _stratum_nonempty(gens, r: int, F: tuple) -> bool:
    if not gens:
        return True
    if not F:
        from .groebner import contains_one

        return not contains_one(gens, r)
    return saturation_is_proper(gens, r, F)


# ---------------------------------------------------------------------------
# toric intersection numbers


def _simplicial_facets(vectors: Sequence[Sequence[int]]) -> Optional[list]:
    k = len(vectors)
    M = el.from_columns(vectors, k)
    d = el.det(M)
    if d == 0:
        return None
    inv = el.rational_inverse(M)
    return [el.integral_primitive(row) for row in inv]


def toric_chamber(q: Sequence[Sequence[int]], k: int, p: Sequence[int]) -> RationalCone:
    """Toric GIT chamber of ``q_1..q_r`` containing ``p + eps*e_1 + eps^2*e_2 + ...``.

    Only simplicial cones are needed: any cone containing a generic point
    contains a simplicial subcone containing it.
    """
    vecs = [tuple(p)] + [tuple(1 if i == j else 0 for j in range(k)) for i in range(k)]
    ineqs = set()
    for B in combinations(range(len(q)), k):
        fac = _simplicial_facets([q[i] for i in B])
        if fac is None:
            continue
        ok = True
        for f in fac:
            for v in vecs:
                x = sum(a * b for a, b in zip(f, v))
                if x > 0:
                    break
                if x < 0:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            ineqs.update(fac)
    return RationalCone.from_inequalities(sorted(ineqs), k)


def toric_intersection(Q: ag.GroupHom, sigma: RationalCone, classes: Sequence[Sequence], base=None, extra_doublings: int = 0) -> Fraction:
    """``(c_1 ... c_n)`` on the toric variety of the full-dimensional chamber ``sigma``.

    Each class is written as ``t*a - (t*a - c)`` with both parts nef, the
    product is expanded multilinearly and each product of nef classes is
    a normalized mixed volume of fiber polytopes.
    """
    n = len(classes)
    a = tuple(base) if base is not None else sigma.relint_point()
    if not sigma.contains_relint(a):
        raise ConeError("base point must lie in the interior of the chamber")
    parts = []
    for c in classes:
        t = 1
        while not sigma.contains(tuple(t * x - y for x, y in zip(a, c))):
            t *= 2
        t <<= extra_doublings
        ta = tuple(t * x for x in a)
        parts.append((ta, tuple(x - y for x, y in zip(ta, c))))
    vol_cache: dict = {}

    def nvol(u: tuple) -> Fraction:
        if u not in vol_cache:
            vol_cache[u] = normalized_volume(fiber_polytope(Q, u))
        return vol_cache[u]

    def nef_product(nefs: Sequence[tuple]) -> Fraction:
        total = Fraction(0)
        for m in range(1, n + 1):
            for S in combinations(range(n), m):
                u = tuple(sum(nefs[i][j] for i in S) for j in range(len(a)))
                total += (-1) ** (n - m) * nvol(u)
        return total / math.factorial(n)

    result = Fraction(0)
    memo: dict = {}
    for choice in product((0, 1), repeat=n):
        nefs = tuple(sorted(parts[i][choice[i]] for i in range(n)))
        if nefs not in memo:
            memo[nefs] = nef_product(nefs)
        result += (-1) ** sum(choice) * memo[nefs]
    return result


# ---------------------------------------------------------------------------
# construction and file format


def create_mds(R: GradedRing, w, strict: bool = True) -> MoriDreamSpace:
    """Build ``X`` from ``R`` and an ample class ``w`` (``w = 0``: affine mode)."""
    K = R.K
    if w is None:
        w = K.zero()
    elif not isinstance(w, ag.GroupElement):
        w = tuple(w)
        if len(w) == 1 and K.rank == 0 and w[0] == 0:
            w = K.zero()
        else:
            w = K.element(w)
    X = MoriDreamSpace(R, w)
    if X.affine:
        return X
    free = tuple(w.free)
    if not X.eff().contains(free):
        raise NonGenericClassError(f"class {list(free)} is not effective")
    lam = X.chamber
    if not lam.is_full_dimensional():
        raise NonGenericClassError(f"class {list(free)} lies on a wall of the GIT fan")
    if not X.mov().contains_relint(free):
        msg = f"class {list(free)} is not in the interior of the moving cone: R is not the Cox ring of X"
        if strict:
            raise NotCoxRingError(msg)
        warnings.warn(msg)
    return X


def ring_from_spacefile(data: dict, check: bool = True) -> GradedRing:
    import re

    r = data.get("vars", data.get("r"))
    relations = list(data.get("relations", []))
    if isinstance(r, list):
        names = [str(x) for x in r]
        subst = {name: f"T{i + 1}" for i, name in enumerate(names)}
        pattern = re.compile("|".join(re.escape(nm) for nm in sorted(names, key=len, reverse=True)))
        relations = [pattern.sub(lambda m: subst[m.group(0)], s) for s in relations]
        r = len(names)
    if not isinstance(r, int) or r < 0:
        raise ValueError("'vars' must be a variable count or a list of names")
    g = data["grading"]
    K = ag.create_group(g.get("free_rank", 0), g.get("torsion", []))
    if list(K.torsion) != sorted(g.get("torsion", [])) and g.get("torsion"):
        raise ag.GroupError(f"torsion {g['torsion']} is not in invariant-factor form (expected {list(K.torsion)})")
    Q = ag.create_hom(ag.create_group(r, []), K, g["matrix"])
    return create_graded_ring(relations, r, Q, check=check)


def mds_from_spacefile(data: dict, check: bool = True, strict: bool = True) -> MoriDreamSpace:
    R = ring_from_spacefile(data, check)
    return create_mds(R, data.get("ample"), strict=strict)


# ---------------------------------------------------------------------------
# graph export


def _labels(weights: Optional[Sequence], r: int) -> list[str]:
    return [f"T{i + 1}" + (f" ({weights[i]})" if weights is not None else "") for i in range(r)]


def graph_to_dot(edges: Sequence[tuple], r: int, weights: Optional[Sequence] = None) -> str:
    lines = ["graph intersections {"]
    for i, lab in enumerate(_labels(weights, r)):
        lines.append(f'  T{i + 1} [label="{lab}"];')
    for i, j in edges:
        lines.append(f"  T{i} -- T{j};")
    lines.append("}")
    return "\n".join(lines)


def graph_to_tikz(edges: Sequence[tuple], r: int, weights: Optional[Sequence] = None) -> str:
    """TikZ fragment with the vertices on a circle."""
    lines = ["\\begin{tikzpicture}"]
    for i in range(r):
        ang = 90 - 360 * i / r
        x, y = 3 * math.cos(math.radians(ang)), 3 * math.sin(math.radians(ang))
        lab = f"$T_{{{i + 1}}}$" + (f"\\,$({weights[i]})$" if weights is not None else "")
        lines.append(f"  \\node[circle,draw] (T{i + 1}) at ({x:.3f},{y:.3f}) {{{lab}}};")
    for i, j in edges:
        lines.append(f"  \\draw (T{i}) -- (T{j});")
    lines.append("\\end{tikzpicture}")
    return "\n".join(lines)
