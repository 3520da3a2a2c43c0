"""Betweenness and collinearity structure on finite planar point sets.

A FiniteConfig owns an ordered list of pairwise-distinct points and caches,
at construction, every collinear triple and every strict-betweenness triple.
All queries (intervals, extreme points, collinear closure, line traces) are
answered from the cache, so repeated questions are mutually consistent and
cheap.  Intended scale is a few hundred points at most; the cache costs one
segment-distance evaluation per (ordered pair, third point).
"""

from __future__ import annotations

import numpy as np

from .geom_core import DEFAULT_TOL, ToleranceConfig, as_point

Ids = tuple[int, ...]


class FiniteConfig:
    """Indexed finite point set with cached incidence relations.

    Cached relations:
        collinear_triples -- frozenset of index triples (i, j, k), i < j < k,
            whose twice-signed area is within eps_sign of zero;
        between_triples   -- frozenset of (x, y, z) with x < z and point y
            strictly between points x and z (within eps_metric).

    Points must be pairwise farther apart than eps_metric; merging near
    duplicates silently would corrupt every cardinality-based question asked
    downstream, so construction refuses them instead.
    """

    def __init__(self, points, tol: ToleranceConfig = DEFAULT_TOL):
        pts = [as_point(p) for p in points]
        if not pts:
            raise ValueError("a configuration needs at least one point")
        self.tol = tol
        self._pts = np.asarray(pts, dtype=float)
        self._check_distinct()
        self._build_cache()

    # -- construction helpers -------------------------------------------

    def _check_distinct(self):
        pts = self._pts
        eps = self.tol.eps_metric
        for i in range(len(pts) - 1):
            d = pts[i + 1 :] - pts[i]
            dd = np.sqrt(d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1])
            j = int(np.argmin(dd))
            if dd[j] <= eps:
                raise ValueError(
                    f"points {i} and {i + 1 + j} coincide within eps_metric ({dd[j]:.3e})"
                )

    def _build_cache(self):
        # Mirrors geom_core.signed_area2 / geom_core.segment_distance with the
        # middle point vectorised; operation order kept identical so cached
        # verdicts equal the scalar predicates bit for bit.
        pts = self._pts
        n = len(pts)
        eps_sign = self.tol.eps_sign
        eps_metric = self.tol.eps_metric

        collinear = set()
        between = set()
        middles_by_pair: dict[tuple[int, int], Ids] = {}
        line_members: dict[tuple[int, int], Ids] = {}

        idx = np.arange(n)
        for i in range(n):
            xi = pts[i]
            for k in range(i + 1, n):
                xk = pts[k]
                dx = xk[0] - xi[0]
                dy = xk[1] - xi[1]
                relx = pts[:, 0] - xi[0]
                rely = pts[:, 1] - xi[1]
                area = dx * rely - dy * relx
                l2 = dx * dx + dy * dy
                t = np.minimum(1.0, np.maximum(0.0, (relx * dx + rely * dy) / l2))
                ex = relx - t * dx
                ey = rely - t * dy
                seg_dist = np.sqrt(ex * ex + ey * ey)

                others = (idx != i) & (idx != k)
                col = others & (np.abs(area) <= eps_sign)
                bet = others & (seg_dist <= eps_metric)
                if col.any():
                    members = [i, k]
                    for j in idx[col]:
                        collinear.add(tuple(sorted((i, int(j), k))))
                        members.append(int(j))
                    line_members[(i, k)] = tuple(sorted(members))
                if bet.any():
                    mids = tuple(int(j) for j in idx[bet])
                    middles_by_pair[(i, k)] = mids
                    for j in mids:
                        between.add((i, j, k))

        self.collinear_triples = frozenset(collinear)
        self.between_triples = frozenset(between)
        self._middles_by_pair = middles_by_pair
        self._line_members = line_members
        self._middles = frozenset(j for (_, j, _) in between)

    # -- basic accessors --------------------------------------------------

    @property
    def n(self) -> int:
        return len(self._pts)

    def point(self, i: int):
        self._check_id(i)
        return (float(self._pts[i, 0]), float(self._pts[i, 1]))

    def points(self) -> list:
        return [self.point(i) for i in range(self.n)]

    def _check_id(self, i: int):
        if not (isinstance(i, (int, np.integer)) and 0 <= i < self.n):
            raise ValueError(f"invalid point id {i!r} for configuration of size {self.n}")

    def _check_ids(self, ids) -> frozenset:
        out = frozenset(int(i) for i in ids)
        for i in out:
            self._check_id(i)
        return out

    # -- queries -----------------------------------------------------------

    def interval(self, x: int, z: int, open: bool = True) -> Ids:
        """Ids of points between x and z: open excludes the endpoints.

        Because all points are pairwise distinct, the open interval equals
        the cached strict middles of the pair.
        """
        self._check_id(x)
        self._check_id(z)
        if x == z:
            return () if open else (x,)
        key = (min(x, z), max(x, z))
        mids = self._middles_by_pair.get(key, ())
        if open:
            return tuple(sorted(mids))
        return tuple(sorted(set(mids) | {x, z}))

    def extreme_points(self) -> Ids:
        """Ids that are strictly between no two other points of the set."""
        return tuple(i for i in range(self.n) if i not in self._middles)

    def is_collinearly_closed(self, ids) -> bool:
        """True iff every set point collinear with two distinct members is a member."""
        members = self._check_ids(ids)
        ordered = sorted(members)
        for a_pos, a in enumerate(ordered):
            for b in ordered[a_pos + 1 :]:
                on_line = self._line_members.get((a, b))
                if on_line and not members.issuperset(on_line):
                    return False
        return True

    def collinear_hull(self, ids) -> Ids:
        """Least superset of ids closed under adding collinear set points.

        Closure iteration: repeatedly trace the line of every member pair and
        absorb what it hits, until nothing new appears.
        """
        current = set(self._check_ids(ids))
        frontier = set(current)
        while frontier:
            added = set()
            snapshot = sorted(current)
            for a in sorted(frontier):
                for b in snapshot:
                    if a == b:
                        continue
                    on_line = self._line_members.get((min(a, b), max(a, b)))
                    if on_line:
                        for m in on_line:
                            if m not in current:
                                added.add(m)
            current |= added
            frontier = added
        return tuple(sorted(current))

    def line_trace(self, p: int, q: int) -> Ids:
        """All set points on the line through p and q (p, q included)."""
        self._check_id(p)
        self._check_id(q)
        if p == q:
            raise ValueError("line_trace needs two distinct point ids")
        return self._line_members.get((min(p, q), max(p, q)), tuple(sorted((p, q))))

    def fixed_point_set(self, selfmap) -> Ids:
        """Fixed ids of a bijective self-map given as a sequence or dict."""
        mapping = normalize_bijection(selfmap, self.n)
        return tuple(i for i in range(self.n) if mapping[i] == i)

    # -- serialization ------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "points": [[float(x), float(y)] for x, y in self._pts],
            "eps_sign": self.tol.eps_sign,
            "eps_metric": self.tol.eps_metric,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "FiniteConfig":
        if "points" not in data:
            raise ValueError("configuration JSON needs a 'points' field")
        tol = ToleranceConfig(
            eps_sign=float(data.get("eps_sign", DEFAULT_TOL.eps_sign)),
            eps_metric=float(data.get("eps_metric", DEFAULT_TOL.eps_metric)),
        )
        return cls(data["points"], tol=tol)

    def __repr__(self):
        return f"FiniteConfig(n={self.n}, |collinear|={len(self.collinear_triples)}, |between|={len(self.between_triples)})"


def normalize_bijection(mapping, n: int) -> tuple[int, ...]:
    """Validate a self-map of range(n) given as sequence/dict and return it
    as a tuple; raises ValueError when it is not a bijection."""
    if isinstance(mapping, dict):
        seq = [mapping.get(i) for i in range(n)]
    else:
        seq = list(mapping)
    if len(seq) != n:
        raise ValueError(f"self-map must cover all {n} ids, got {len(seq)} entries")
    out = []
    for i, v in enumerate(seq):
        if not isinstance(v, (int, np.integer)) or not 0 <= int(v) < n:
            raise ValueError(f"self-map sends {i} to invalid id {v!r}")
        out.append(int(v))
    if len(set(out)) != n:
        raise ValueError("self-map is not a bijection")
    return tuple(out)
