"""Exact rational polyhedral cones, fans and lattice polytopes.

Everything is built on one double description routine, :func:`dd`, which
turns a system of homogeneous inequalities into lineality generators and
extreme rays.  Cones keep both representations in canonical form:

* rays and facet normals are primitive integer vectors, sorted
  lexicographically; for non-pointed cones rays are taken orthogonal to
  the lineality space and facet normals orthogonal to the equations,
* lineality and equation bases come from the rational RREF, scaled to
  primitive integer rows.

With this normalization two cones are equal iff their data are equal.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import factorial, gcd
from typing import Iterable, Optional, Sequence

from .exactlin import (
    integer_kernel,
    integral_primitive,
    primitive,
    rank,
    rational_rref,
    rational_solve,
    transpose,
)


class ConeError(ValueError):
    pass


def _dot(a, b) -> int:
    return sum(x * y for x, y in zip(a, b))


def dd(ineqs: Sequence[Sequence[int]], dim: int) -> tuple[list, list]:
    """Double description of ``{x : a.x >= 0 for a in ineqs}``.

    Returns ``(lineality, rays)`` as lists of primitive integer vectors;
    rays are extreme modulo the lineality space.
    """
    lin = [tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim)]
    rays: list[tuple] = []
    zs: list[int] = []  # bitmask of tight inequalities per ray
    seen = set()
    k = 0
    for a in ineqs:
        a = primitive(tuple(a))
        if not any(a) or a in seen:
            continue
        seen.add(a)
        bit = 1 << k
        k += 1
        vals = [_dot(a, l) for l in lin]
        piv = next((i for i, v in enumerate(vals) if v), None)
        if piv is not None:
            l = lin[piv]
            al = vals[piv]
            if al < 0:
                l = tuple(-x for x in l)
                al = -al
            newlin = []
            for i, l2 in enumerate(lin):
                if i == piv:
                    continue
                v = vals[i]
                newlin.append(primitive(tuple(al * x - v * y for x, y in zip(l2, l))) if v else l2)
            newrays = []
            for r in rays:
                v = _dot(a, r)
                newrays.append(primitive(tuple(al * x - v * y for x, y in zip(r, l))) if v else r)
            zs = [z | bit for z in zs]
            rays = newrays + [l]
            zs.append(bit - 1)
            lin = newlin
            continue
        s = [_dot(a, r) for r in rays]
        pos = [i for i, v in enumerate(s) if v > 0]
        neg = [i for i, v in enumerate(s) if v < 0]
        if not neg:
            zs = [z | bit if s[i] == 0 else z for i, z in enumerate(zs)]
            continue
        zero = [i for i, v in enumerate(s) if v == 0]
        nr = [rays[i] for i in pos] + [rays[i] for i in zero]
        nz = [zs[i] for i in pos] + [zs[i] | bit for i in zero]
        nrays = len(rays)
        for p in pos:
            zp = zs[p]
            for n in neg:
                common = zp & zs[n]
                adjacent = True
                for j in range(nrays):
                    if j != p and j != n and (zs[j] & common) == common:
                        adjacent = False
                        break
                if adjacent:
                    sp, sn = s[p], -s[n]
                    nr.append(primitive(tuple(sp * x + sn * y for x, y in zip(rays[n], rays[p]))))
                    nz.append(common | bit)
        rays, zs = nr, nz
    return lin, rays


def _rref_basis(vectors: Sequence[Sequence], dim: int) -> tuple:
    if not vectors:
        return ()
    R, piv = rational_rref(vectors, dim)
    return tuple(integral_primitive(R[i]) for i in range(len(piv)))


def _project_out(v: Sequence, basis: Sequence[Sequence]) -> tuple:
    """Orthogonal projection of ``v`` onto the complement of ``span(basis)``, made primitive."""
    if not basis:
        return primitive(tuple(v))
    B = [list(map(Fraction, b)) for b in basis]
    G = [[sum(x * y for x, y in zip(b1, b2)) for b2 in B] for b1 in B]
    rhs = [sum(x * y for x, y in zip(b, v)) for b in B]
    c = rational_solve(G, rhs)
    w = [Fraction(x) - sum(ci * b[j] for ci, b in zip(c, B)) for j, x in enumerate(v)]
    if not any(w):
        return tuple(0 for _ in v)
    return integral_primitive(w)


class RationalCone:
    """A polyhedral cone in ``Q^n`` in canonical V- and H-form."""

    __slots__ = ("ambient_dim", "rays", "lineality", "_h", "__dict__")

    def __init__(self, ambient_dim: int, rays: Iterable, lineality: Iterable = (), _h=None):
        self.ambient_dim = ambient_dim
        self.lineality = tuple(lineality)
        self.rays = tuple(rays)
        self._h = _h

    # construction --------------------------------------------------------
    @classmethod
    def from_rays(cls, vectors: Iterable[Sequence[int]], dim: Optional[int] = None, lineality: Iterable = ()) -> "RationalCone":
        vectors = [tuple(integral_primitive(v)) if any(v) else tuple(v) for v in vectors]
        lineality = [tuple(integral_primitive(v)) for v in lineality if any(v)]
        if dim is None:
            if not vectors and not lineality:
                raise ConeError("cannot infer the ambient dimension")
            dim = len((vectors or lineality)[0])
        if any(len(v) != dim for v in vectors + lineality):
            raise ConeError("generators of different dimensions")
        gens = [v for v in vectors if any(v)]
        sys = gens + lineality + [tuple(-x for x in v) for v in lineality]
        eqs, fac = dd(sys, dim)
        C = cls._from_h(dim, fac, eqs)
        eqs = _rref_basis(eqs, dim)
        C._h = (tuple(sorted({_project_out(f, eqs) for f in fac})), eqs)
        return C

    @classmethod
    def from_inequalities(cls, ineqs: Iterable[Sequence[int]], dim: int, equations: Iterable = ()) -> "RationalCone":
        ineqs = [integral_primitive(a) for a in ineqs if any(a)]
        equations = [integral_primitive(e) for e in equations if any(e)]
        return cls._from_h(dim, ineqs, equations)

    @classmethod
    def _from_h(cls, dim: int, ineqs: list, eqs: list) -> "RationalCone":
        sys = list(ineqs) + list(eqs) + [tuple(-x for x in e) for e in eqs]
        sys.sort()
        lin, rays = dd(sys, dim)
        lin = _rref_basis(lin, dim)
        rays = sorted({_project_out(r, lin) for r in rays})
        return cls(dim, rays, lin)

    # H-representation ----------------------------------------------------
    def _hrep(self) -> tuple:
        if self._h is None:
            sys = list(self.rays) + list(self.lineality) + [tuple(-x for x in v) for v in self.lineality]
            eqs, fac = dd(sys, self.ambient_dim)
            eqs = _rref_basis(eqs, self.ambient_dim)
            fac = tuple(sorted({_project_out(f, eqs) for f in fac}))
            self._h = (fac, eqs)
        return self._h

    @property
    def facets(self) -> tuple:
        return self._hrep()[0]

    @property
    def equations(self) -> tuple:
        return self._hrep()[1]

    @cached_property
    def dim(self) -> int:
        return self.ambient_dim - len(self.equations)

    @property
    def lineality_dim(self) -> int:
        return len(self.lineality)

    def is_pointed(self) -> bool:
        return not self.lineality

    def is_full_dimensional(self) -> bool:
        return self.dim == self.ambient_dim

    def descriptor(self) -> tuple:
        return (self.ambient_dim, self.dim, self.lineality_dim, len(self.rays), len(self.facets))

    def __str__(self) -> str:
        return "CONE({}, {}, {}, {}, {})".format(*self.descriptor())

    __repr__ = __str__

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RationalCone)
            and self.ambient_dim == other.ambient_dim
            and self.rays == other.rays
            and self.lineality == other.lineality
        )

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self.rays, self.lineality))

    # queries -------------------------------------------------------------
    def contains(self, v: Sequence) -> bool:
        return all(_dot(e, v) == 0 for e in self.equations) and all(_dot(f, v) >= 0 for f in self.facets)

    def contains_relint(self, v: Sequence) -> bool:
        return all(_dot(e, v) == 0 for e in self.equations) and all(_dot(f, v) > 0 for f in self.facets)

    def contains_lex(self, vecs: Sequence[Sequence]) -> bool:
        """Membership of the symbolic point ``v0 + eps*v1 + eps^2*v2 + ...``."""
        for e in self.equations:
            if any(_dot(e, v) for v in vecs):
                return False
        for f in self.facets:
            for v in vecs:
                x = _dot(f, v)
                if x > 0:
                    break
                if x < 0:
                    return False
        return True

    def contains_cone(self, other: "RationalCone") -> bool:
        return all(self.contains(r) for r in other.rays) and all(
            self.contains(l) and self.contains(tuple(-x for x in l)) for l in other.lineality
        )

    def relint_point(self) -> tuple:
        p = [0] * self.ambient_dim
        for r in self.rays + self.lineality:
            for i, x in enumerate(r):
                p[i] += x
        return tuple(p)

    def dual(self) -> "RationalCone":
        fac, eqs = self._hrep()
        return RationalCone.from_rays(fac, self.ambient_dim, lineality=eqs)

    def intersect(self, other: "RationalCone") -> "RationalCone":
        return intersect(self, other)

    def face(self, normals: Iterable[Sequence[int]]) -> "RationalCone":
        """Face cut out by the given facet normals (set to zero)."""
        normals = list(normals)
        rays = [r for r in self.rays if all(_dot(f, r) == 0 for f in normals)]
        return RationalCone.from_rays(rays, self.ambient_dim, lineality=self.lineality)

    def facet_cones(self) -> list:
        return [self.face([f]) for f in self.facets]

    def faces(self, d: int) -> list:
        """All faces of dimension ``d``, each as a cone, sorted by ray list."""
        if d > self.dim or d < self.lineality_dim:
            return []
        top = frozenset(range(len(self.rays)))
        incid = [frozenset(i for i, r in enumerate(self.rays) if _dot(f, r) == 0) for f in self.facets]
        level = {top}
        cur = self.dim
        while cur > d:
            nxt = set()
            for S in level:
                cands = {S & T for T in incid if not S <= T}
                for c in cands:
                    if self._face_dim(c) == cur - 1:
                        nxt.add(c)
            level = nxt
            cur -= 1
        out = [RationalCone.from_rays([self.rays[i] for i in sorted(S)], self.ambient_dim, lineality=self.lineality) for S in level]
        return sorted(out, key=lambda c: (c.rays, c.lineality))

    def _face_dim(self, S) -> int:
        vecs = [self.rays[i] for i in S] + list(self.lineality)
        return rank(vecs) if vecs else 0

    def is_face_of(self, other: "RationalCone") -> bool:
        if not other.contains_cone(self):
            return False
        p = self.relint_point()
        tight = [f for f in other.facets if _dot(f, p) == 0]
        return other.face(tight) == self

    def to_json(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "dim": self.dim,
            "lineality_dim": self.lineality_dim,
            "rays": [list(r) for r in self.rays],
            "lineality": [list(l) for l in self.lineality],
            "n_facets": len(self.facets),
        }

    @classmethod
    def from_json(cls, data: dict) -> "RationalCone":
        return cls.from_rays(data["rays"], data["ambient_dim"], lineality=data.get("lineality", ()))


def cone_from_rays(vectors: Iterable[Sequence[int]], dim: Optional[int] = None) -> RationalCone:
    return RationalCone.from_rays(vectors, dim)


def dual(C: RationalCone) -> RationalCone:
    return C.dual()


def intersect(*cones: RationalCone) -> RationalCone:
    if not cones:
        raise ConeError("nothing to intersect")
    dim = cones[0].ambient_dim
    if any(c.ambient_dim != dim for c in cones):
        raise ConeError("ambient dimensions differ")
    ineqs, eqs = [], []
    for c in cones:
        ineqs.extend(c.facets)
        eqs.extend(c.equations)
    return RationalCone.from_inequalities(sorted(set(ineqs)), dim, equations=eqs)


def contains(C: RationalCone, v: Sequence) -> bool:
    return C.contains(v)


def contains_cone(C1: RationalCone, C2: RationalCone) -> bool:
    return C1.contains_cone(C2)


def faces(C: RationalCone, d: int) -> list:
    return C.faces(d)


def facets(C: RationalCone) -> list:
    return C.facet_cones()


def relint_point(C: RationalCone) -> tuple:
    return C.relint_point()


def descriptor(C: RationalCone) -> tuple:
    return C.descriptor()


# ---------------------------------------------------------------------------
# fans


class Fan:
    """A collection of cones given by a global ray list and index sets."""

    def __init__(self, ambient_dim: int, rays: Sequence, max_cones: Sequence, lineality: Sequence = ()):
        self.ambient_dim = ambient_dim
        self.rays = tuple(tuple(r) for r in rays)
        self.lineality = tuple(tuple(l) for l in lineality)
        self.max_cones = tuple(sorted(tuple(sorted(c)) for c in max_cones))
        self.extra: dict = {}

    @cached_property
    def cones(self) -> list[RationalCone]:
        return [RationalCone.from_rays([self.rays[i] for i in c], self.ambient_dim, lineality=self.lineality) for c in self.max_cones]

    def f_descriptor(self) -> tuple:
        counts = [0] * self.ambient_dim
        for c in self.cones:
            if c.dim > 0:
                counts[c.dim - 1] += 1
        return (self.ambient_dim, len(self.lineality), counts)

    def __str__(self) -> str:
        a, l, counts = self.f_descriptor()
        return f"FAN({a}, {l}, [{', '.join(map(str, counts))}])"

    __repr__ = __str__

    def __len__(self) -> int:
        return len(self.max_cones)

    def __eq__(self, other) -> bool:
        return isinstance(other, Fan) and set(map(_cone_key, self.cones)) == set(map(_cone_key, other.cones))

    def __hash__(self) -> int:
        return hash(frozenset(map(_cone_key, self.cones)))

    def to_json(self) -> dict:
        out = {
            "ambient_dim": self.ambient_dim,
            "rays": [list(r) for r in self.rays],
            "max_cones": [list(c) for c in self.max_cones],
        }
        if self.lineality:
            out["lineality"] = [list(l) for l in self.lineality]
        out.update(self.extra)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Fan":
        return cls(data["ambient_dim"], [tuple(r) for r in data["rays"]], data["max_cones"], data.get("lineality", ()))


def _cone_key(c: RationalCone) -> tuple:
    return (c.rays, c.lineality)


def fan_assemble(cones: Iterable[RationalCone]) -> Fan:
    cones = list(cones)
    if not cones:
        raise ConeError("empty fan")
    dim = cones[0].ambient_dim
    if any(c.ambient_dim != dim for c in cones):
        raise ConeError("ambient dimensions differ")
    lin = cones[0].lineality
    rays = sorted({r for c in cones for r in c.rays})
    index = {r: i for i, r in enumerate(rays)}
    keys = set()
    maxc = []
    for c in cones:
        k = _cone_key(c)
        if k in keys:
            continue
        keys.add(k)
        maxc.append([index[r] for r in c.rays])
    return Fan(dim, rays, maxc, lin)


def is_fan(F: Fan) -> bool:
    """Every pairwise intersection is a face of both cones."""
    cones = F.cones
    for i, j in combinations(range(len(cones)), 2):
        a, b = cones[i], cones[j]
        # a common separating facet normal certifies a proper intersection quickly
        D = intersect(a, b)
        if not D.is_face_of(a) or not D.is_face_of(b):
            return False
    return True


def f_descriptor(F: Fan) -> tuple:
    return F.f_descriptor()


# ---------------------------------------------------------------------------
# lattice polytopes


class LatticePolytope:
    """A polytope in ``Q^n`` given by vertices in lattice coordinates."""

    def __init__(self, n: int, vertices: Iterable[Sequence]):
        self.n = n
        self.vertices = tuple(sorted({tuple(Fraction(x) for x in v) for v in vertices}))

    @classmethod
    def hull(cls, n: int, points: Iterable[Sequence]) -> "LatticePolytope":
        points = [tuple(Fraction(x) for x in p) for p in points]
        if not points:
            raise ConeError("empty polytope")
        C = RationalCone.from_rays([integral_primitive((1,) + p) for p in points], n + 1)
        return cls._from_cone(n, C)

    @classmethod
    def _from_cone(cls, n: int, C: RationalCone) -> "LatticePolytope":
        if C.lineality or any(r[0] <= 0 for r in C.rays):
            raise ConeError("the polyhedron is unbounded")
        P = cls(n, [tuple(Fraction(x, r[0]) for x in r[1:]) for r in C.rays])
        P.__dict__["_cone"] = C
        return P

    @cached_property
    def _cone(self) -> RationalCone:
        return RationalCone.from_rays([integral_primitive((1,) + v) for v in self.vertices], self.n + 1)

    @cached_property
    def dim(self) -> int:
        if len(self.vertices) <= 1:
            return 0
        v0 = self.vertices[0]
        return rank([[a - b for a, b in zip(v, v0)] for v in self.vertices[1:]])

    def __add__(self, other: "LatticePolytope") -> "LatticePolytope":
        return minkowski_sum(self, other)

    def scale(self, t) -> "LatticePolytope":
        t = Fraction(t)
        return LatticePolytope(self.n, [[t * x for x in v] for v in self.vertices])

    def __eq__(self, other) -> bool:
        return isinstance(other, LatticePolytope) and self.n == other.n and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash((self.n, self.vertices))

    def __repr__(self) -> str:
        return f"LatticePolytope(n={self.n}, vertices={len(self.vertices)})"


def minkowski_sum(P: LatticePolytope, Q: LatticePolytope) -> LatticePolytope:
    if P.n != Q.n:
        raise ConeError("polytopes live in different lattices")
    return LatticePolytope.hull(P.n, [tuple(a + b for a, b in zip(p, q)) for p in P.vertices for q in Q.vertices])


def _simplex_nvol(pts: Sequence[Sequence[Fraction]]) -> Fraction:
    v0 = pts[0]
    M = [[a - b for a, b in zip(p, v0)] for p in pts[1:]]
    # exact determinant by fraction-free elimination
    n = len(M)
    M = [row[:] for row in M]
    d = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            d = -d
        d *= M[c][c]
        for r in range(c + 1, n):
            if M[r][c]:
                f = M[r][c] / M[c][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return abs(d)


def normalized_volume(P: LatticePolytope) -> Fraction:
    """``n!`` times the Euclidean volume in lattice coordinates."""
    if P.dim < P.n:
        return Fraction(0)
    C = P._cone
    verts = [tuple(Fraction(x, r[0]) for x in r[1:]) for r in C.rays]
    incid = [frozenset(i for i, r in enumerate(C.rays) if _dot(f, r) == 0) for f in C.facets]

    def affdim(S) -> int:
        S = sorted(S)
        if len(S) <= 1:
            return 0
        v0 = verts[S[0]]
        return rank([[a - b for a, b in zip(verts[i], v0)] for i in S[1:]])

    def triangulate(S: frozenset, k: int) -> list:
        # pulling triangulation of the face with vertex set S and dimension k
        if len(S) == k + 1:
            return [sorted(S)]
        apex = min(S, key=lambda i: verts[i])
        out = []
        subs = {S & T for T in incid if not S <= T}
        for G in subs:
            if apex in G or affdim(G) != k - 1:
                continue
            for simplex in triangulate(G, k - 1):
                out.append([apex] + simplex)
        return out

    total = Fraction(0)
    for s in triangulate(frozenset(range(len(verts))), P.n):
        total += _simplex_nvol([verts[i] for i in s])
    return total


def mixed_volume(*polys: LatticePolytope) -> Fraction:
    """Normalized mixed volume with ``MV(P, ..., P) = normalized_volume(P)``."""
    n = len(polys)
    if n == 0 or any(p.n != n for p in polys):
        raise ConeError("mixed volume needs exactly n polytopes in an n-dimensional lattice")
    total = Fraction(0)
    for k in range(1, n + 1):
        for S in combinations(range(n), k):
            P = polys[S[0]]
            for i in S[1:]:
                P = P + polys[i]
            total += (-1) ** (n - k) * normalized_volume(P)
    return total / factorial(n)


def degree_lattice(Q) -> tuple:
    """Basis (as columns) of ``M = ker Q`` for a :class:`GroupHom` ``Q``."""
    from .abgroup import kernel

    K = kernel(Q)
    B = K.canonical_form
    return tuple(tuple(c) for c in B)


def fiber_polytope(Q, u: Sequence) -> LatticePolytope:
    """``{x >= 0 : Q_free x = u}`` in coordinates of the lattice ``M = ker Q``.

    ``u`` is the free part of a class (rational entries allowed).
    """
    basis = degree_lattice(Q)
    r = Q.source.rank
    n = len(basis)
    free = [row for row in Q.free_matrix]
    u = tuple(Fraction(x) for x in u)
    if len(u) != len(free):
        raise ConeError("class has the wrong number of free coordinates")
    if not free:
        x0 = tuple(Fraction(0) for _ in range(r))
    else:
        x0 = rational_solve(free, u)
        if x0 is None:
            raise ConeError("class is not in the span of the degrees")
    # x = x0 + B m >= 0, homogenized by t >= 0
    den = 1
    for x in x0:
        den = den * x.denominator // gcd(den, x.denominator)
    ineqs = [(1,) + (0,) * n]
    for i in range(r):
        ineqs.append((int(x0[i] * den),) + tuple(b[i] for b in basis))
    C = RationalCone.from_inequalities(ineqs, n + 1)
    if C.lineality or any(ray[0] == 0 for ray in C.rays) or not C.rays:
        if not C.rays and not C.lineality:
            raise ConeError("empty fiber")
        raise ConeError("fiber polytope is unbounded: Eff is not pointed or a degree vanishes")
    return LatticePolytope(n, [tuple(Fraction(x, ray[0] * den) for x in ray[1:]) for ray in C.rays])
