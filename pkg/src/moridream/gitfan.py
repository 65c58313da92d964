"""a-faces, orbit cones and GIT fans of graded rings.

Faces are 1-based index tuples ``F`` naming the coordinates that are
allowed to be nonzero.  ``F`` is an a-face when the torus stratum
``{z : z_i != 0 iff i in F}`` meets ``V(I)``; the test sets ``T_j = 0``
for ``j`` outside ``F`` and saturates by ``prod_{i in F} T_i``.

Chambers are computed in ``K (x) Q`` (torsion is dropped).  The traversal
moves across walls with a symbolic perturbation: a point ``p`` in the
relative interior of a wall together with the outward normal ``d`` and the
unit vectors gives the formal point ``p + eps*d + eps^2*e_1 + ...``; it lies
off every hyperplane, so it picks out a unique maximal chamber.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .convexgeom import ConeError, Fan, RationalCone, cone_from_rays, fan_assemble
from .groebner import saturation_is_proper
from .polyring import GradedRing

log = logging.getLogger(__name__)


def _term_masks(R: GradedRing) -> list[list[int]]:
    out = []
    for g in R.relations:
        masks = []
        for e in g.exponents():
            m = 0
            for i, x in enumerate(e):
                if x:
                    m |= 1 << i
            masks.append(m)
        out.append(masks)
    return out


def _quick_verdict(masks: list[list[int]], F_mask: int) -> Optional[bool]:
    """Decide the a-face test from monomial supports alone, if possible."""
    all_zero = True
    for ms in masks:
        alive = sum(1 for m in ms if m & ~F_mask == 0)
        if alive == 1:
            return False
        if alive:
            all_zero = False
    return True if all_zero else None


def is_a_face(R: GradedRing, F: Iterable[int]) -> bool:
    F = tuple(sorted(F))
    mask = sum(1 << (i - 1) for i in F)
    quick = _quick_verdict(_term_masks(R), mask)
    if quick is not None:
        return quick
    return _saturation_test(R.relations, R.r, F)


def _saturation_test(relations, r: int, F: tuple) -> bool:
    keep = set(F)
    rest = [g.restrict(keep) for g in relations]
    rest = [g for g in rest if not g.is_zero()]
    return saturation_is_proper(rest, r, F)


def _worker(args):
    relations, r, F = args
    return F, _saturation_test(relations, r, F)


def a_faces(R: GradedRing, threads: int = 1) -> list[tuple]:
    """All a-faces, by increasing size then lexicographically.  Cached on ``R``."""
    cached = getattr(R, "_a_faces", None)
    if cached is not None:
        return cached
    r = R.r
    masks = _term_masks(R)
    verdict: dict = {}
    pending = []
    for k in range(r + 1):
        for F in combinations(range(1, r + 1), k):
            q = _quick_verdict(masks, sum(1 << (i - 1) for i in F))
            if q is None:
                pending.append(F)
            else:
                verdict[F] = q
    log.info("a-faces: %d candidates need a saturation test", len(pending))
    if threads > 1 and len(pending) > 8:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            for F, ok in ex.map(_worker, [(R.relations, r, F) for F in pending], chunksize=16):
                verdict[F] = ok
    else:
        for F in pending:
            verdict[F] = _saturation_test(R.relations, r, F)
    out = [F for k in range(r + 1) for F in combinations(range(1, r + 1), k) if verdict[F]]
    R._a_faces = out
    return out


def orbit_cone(R: GradedRing, F: Iterable[int]) -> RationalCone:
    q = R.free_degrees
    k = R.K.rank
    return cone_from_rays([q[i - 1] for i in F], k) if k else RationalCone(0, ())


def orbit_cones(R: GradedRing, threads: int = 1) -> dict:
    """Map a-face -> orbit cone (cached on ``R``)."""
    cached = getattr(R, "_orbit_cones", None)
    if cached is not None:
        return cached
    memo: dict = {}
    out = {}
    q = R.free_degrees
    for F in a_faces(R, threads):
        key = frozenset(tuple(q[i - 1]) for i in F)
        if key not in memo:
            memo[key] = orbit_cone(R, F)
        out[F] = memo[key]
    R._orbit_cones = out
    return out


def distinct_orbit_cones(R: GradedRing, full_only: bool = False) -> list[RationalCone]:
    seen = {}
    for F, c in orbit_cones(R).items():
        if full_only and not c.is_full_dimensional():
            continue
        seen.setdefault(id(c), c)
    uniq = {}
    for c in seen.values():
        uniq.setdefault((c.rays, c.lineality), c)
    return [uniq[k] for k in sorted(uniq)]


def eff_cone(R: GradedRing) -> RationalCone:
    k = R.K.rank
    return cone_from_rays(R.free_degrees, k) if k else RationalCone(0, ())


def mov_cone(R: GradedRing) -> RationalCone:
    from .convexgeom import intersect

    k = R.K.rank
    if not k:
        return RationalCone(0, ())
    q = R.free_degrees
    cones = [cone_from_rays([q[j] for j in range(R.r) if j != i], k) for i in range(R.r)]
    return intersect(*cones)


def _as_free(R: GradedRing, w) -> tuple:
    if hasattr(w, "free"):
        return tuple(w.free)
    w = tuple(w)
    if len(w) < R.K.rank:
        raise ConeError(f"class {list(w)} has fewer than {R.K.rank} free coordinates")
    return w[: R.K.rank]


def chamber(R: GradedRing, w) -> RationalCone:
    """``lambda(w)``: intersection of all orbit cones containing ``w``."""
    from .convexgeom import intersect

    w = _as_free(R, w)
    if not eff_cone(R).contains(w):
        raise ConeError(f"class {list(w)} is not effective")
    cones = [c for c in distinct_orbit_cones(R) if c.contains(w)]
    return intersect(*cones)


def _lex_chamber(cones: Sequence[RationalCone], vecs: Sequence[Sequence[int]], k: int) -> RationalCone:
    ineqs = set()
    for c in cones:
        if c.contains_lex(vecs):
            ineqs.update(c.facets)
    return RationalCone.from_inequalities(sorted(ineqs), k)


def _units(k: int) -> list[tuple]:
    return [tuple(1 if i == j else 0 for j in range(k)) for i in range(k)]


class GitFan:
    """The GIT fan: maximal chambers plus the orbit cones they came from."""

    def __init__(self, ring: GradedRing, chambers: Sequence[RationalCone], orbit_cone_count: int):
        self.ring = ring
        self.chambers = sorted(chambers, key=lambda c: c.rays)
        self.orbit_cone_count = orbit_cone_count
        k = ring.K.rank
        if self.chambers:
            self.fan = fan_assemble(self.chambers)
        else:
            self.fan = Fan(k, (), ())
        self.fan.extra["orbit_cone_count"] = orbit_cone_count

    def __len__(self) -> int:
        return len(self.chambers)

    def __str__(self) -> str:
        return str(self.fan)

    __repr__ = __str__

    def to_json(self) -> dict:
        return self.fan.to_json()

    def chamber_of(self, w) -> Optional[RationalCone]:
        """Maximal chamber containing ``w`` in its interior, if any."""
        for c in self.chambers:
            if c.contains_relint(w):
                return c
        return None


def git_fan(R: GradedRing, start=None, threads: int = 1) -> GitFan:
    """Traverse the maximal GIT chambers of ``R`` across interior walls."""
    k = R.K.rank
    eff = eff_cone(R)
    if k == 0:
        return GitFan(R, [], 0)
    if not eff.is_full_dimensional():
        raise ConeError("the effective cone is not full-dimensional")
    orbit_cones(R, threads)
    full = distinct_orbit_cones(R, full_only=True)
    units = _units(k)
    p0 = tuple(start) if start is not None else eff.relint_point()
    first = _lex_chamber(full, [p0] + units, k)
    chambers = [first]
    keys = {first.rays}
    queue = [first]
    while queue:
        C = queue.pop(0)
        for f in C.facets:
            wall = C.face([f])
            p = wall.relint_point()
            if any(sum(a * b for a, b in zip(g, p)) == 0 for g in eff.facets):
                continue
            vecs = [p, tuple(-x for x in f)] + units
            if any(D.contains_lex(vecs) for D in chambers):
                continue
            N = _lex_chamber(full, vecs, k)
            if N.rays in keys:
                continue
            keys.add(N.rays)
            chambers.append(N)
            queue.append(N)
    log.info("git fan: %d chambers from %d full-dimensional orbit cones", len(chambers), len(full))
    return GitFan(R, chambers, len(distinct_orbit_cones(R)))


def chambers_within(G: GitFan, C: RationalCone) -> list[RationalCone]:
    return [c for c in G.chambers if C.contains_cone(c)]
