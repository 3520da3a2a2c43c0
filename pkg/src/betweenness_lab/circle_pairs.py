"""Unions of two circles: arcs, cover invariants, isomorphism, tangent chords.

For a concentric pair S (radii rho < rho_prime around one center) the central
objects are the open outer-circle arcs whose endpoint chord is tangent to the
inner circle.  Their half-width is arccos(rho/rho_prime), which drives two
invariants of the betweenness structure:

    m(S) -- the least number of such arcs covering the outer circle,
    M(S) -- the infimum of n/k over n-arc families covering it k-fold,
            which evaluates to pi / arccos(rho/rho_prime).

Two concentric pairs are betweenness isomorphic exactly when their radius
ratios agree, and then a translate-rescale-translate map realises the
isomorphism.  Non-concentric pairs split into five cases by the distance of
the centers; nested ones support tangent-chord iteration (Poncelet style)
and a generalized arc construction.  Finally, commensurate finite samplings
turn the continuous incidence structure into FiniteConfig instances whose
betweenness relations are guaranteed, not accidental.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional, Union

import numpy as np

from .finite_config import FiniteConfig
from .geom_core import (
    DEFAULT_TOL,
    Point,
    ScaledIsometry,
    SimilarityFit,
    ToleranceConfig,
    as_point,
    dist,
    fit_similarity,
    _norm_angle,
)

TWO_PI = 2.0 * math.pi

CaseLabel = Literal["a", "b", "c", "d", "e"]


def circle_point(center: Point, radius: float, theta: float) -> Point:
    return (center[0] + radius * math.cos(theta), center[1] + radius * math.sin(theta))


def circ_dist(a: float, b: float) -> float:
    """Shorter angular distance between two angles, in [0, pi]."""
    return abs((a - b + math.pi) % TWO_PI - math.pi)


@dataclass(frozen=True)
class ConcentricPair:
    """Union of two concentric circles with radii rho < rho_prime."""

    center: Point
    rho: float
    rho_prime: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if not (0.0 < self.rho < self.rho_prime and math.isfinite(self.rho_prime)):
            raise ValueError(
                f"need 0 < rho < rho_prime, got rho={self.rho}, rho_prime={self.rho_prime}"
            )

    def circles(self):
        return ((self.center, self.rho), (self.center, self.rho_prime))

    def to_json_dict(self) -> dict:
        return {
            "center": [self.center[0], self.center[1]],
            "rho": self.rho,
            "rho_prime": self.rho_prime,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ConcentricPair":
        for key in ("center", "rho", "rho_prime"):
            if key not in data:
                raise ValueError(f"concentric pair JSON needs field '{key}'")
        return cls(tuple(data["center"]), float(data["rho"]), float(data["rho_prime"]))


@dataclass(frozen=True)
class NonConcentricPair:
    """Union of two circles with distinct centers."""

    c1: Point
    r1: float
    c2: Point
    r2: float

    def __post_init__(self):
        object.__setattr__(self, "c1", as_point(self.c1))
        object.__setattr__(self, "c2", as_point(self.c2))
        if not (self.r1 > 0 and self.r2 > 0):
            raise ValueError("both radii must be positive")
        if dist(self.c1, self.c2) <= DEFAULT_TOL.eps_metric:
            raise ValueError("centers coincide; use ConcentricPair instead")

    def circles(self):
        return ((self.c1, self.r1), (self.c2, self.r2))

    def to_json_dict(self) -> dict:
        return {
            "c1": [self.c1[0], self.c1[1]],
            "r1": self.r1,
            "c2": [self.c2[0], self.c2[1]],
            "r2": self.r2,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "NonConcentricPair":
        for key in ("c1", "r1", "c2", "r2"):
            if key not in data:
                raise ValueError(f"non-concentric pair JSON needs field '{key}'")
        return cls(tuple(data["c1"]), float(data["r1"]), tuple(data["c2"]), float(data["r2"]))


CirclePair = Union[ConcentricPair, NonConcentricPair]


def radius_ratio(pair: ConcentricPair) -> float:
    """rho / rho_prime, always in (0, 1)."""
    return pair.rho / pair.rho_prime


def arc_half_width(pair: ConcentricPair, double: bool = False) -> float:
    a = math.acos(radius_ratio(pair))
    return 2.0 * a if double else a


# ---------------------------------------------------------------------------
# Arcs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Arc:
    """Open arc of the outer circle, centered at angle alpha.

    Single arcs (half_width = arccos(rho/rho_prime)) have the defining
    property that the chord of their endpoints is tangent to the inner
    circle; double arcs take twice that angular half-width.
    """

    pair: ConcentricPair
    alpha: float
    half_width: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", _norm_angle(self.alpha))
        if not 0.0 < self.half_width < math.pi:
            raise ValueError("arc half-width must lie in (0, pi)")

    @property
    def is_double(self) -> bool:
        return self.half_width > arc_half_width(self.pair) * 1.5


def arc(pair: ConcentricPair, alpha: float, double: bool = False) -> Arc:
    return Arc(pair, alpha, arc_half_width(pair, double))


def arc_endpoints(a: Arc) -> tuple[Point, Point]:
    """Endpoints at angles alpha -/+ half_width on the outer circle."""
    c, rp = a.pair.center, a.pair.rho_prime
    return (
        circle_point(c, rp, a.alpha - a.half_width),
        circle_point(c, rp, a.alpha + a.half_width),
    )


def arc_tangency_point(a: Arc) -> Point:
    """Where the endpoint chord of a single arc touches the inner circle."""
    return circle_point(a.pair.center, a.pair.rho, a.alpha)


def arc_contains(a: Arc, theta: float, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Open membership with an eps-wide exclusion band at the endpoints.

    The band makes boundary decisions stable: an angle computed to be an arc
    endpoint through a different float route still counts as excluded.
    """
    return circ_dist(theta, a.alpha) < a.half_width - tol.eps_metric


# ---------------------------------------------------------------------------
# Line / circle incidence
# ---------------------------------------------------------------------------


def _line_circle_hits(p: Point, q: Point, center: Point, radius: float,
                      tol: ToleranceConfig) -> list[tuple[float, Point]]:
    """Intersections of line p->q with a circle as (parameter, point) pairs.

    A discriminant within eps_sign * (|pq|^2 * radius)^... of zero counts as
    tangency and yields a single point, snapped back onto the circle so that
    downstream on-circle checks see an exact member.
    """
    dx = q[0] - p[0]
    dy = q[1] - p[1]
    fx = p[0] - center[0]
    fy = p[1] - center[1]
    a = dx * dx + dy * dy
    if a == 0.0:
        raise ValueError("line through two identical points is undefined")
    b = 2.0 * (fx * dx + fy * dy)
    c = fx * fx + fy * fy - radius * radius
    disc = b * b - 4.0 * a * c
    # Tangency threshold: two roots closer than ~sqrt(eps_sign)*radius in
    # space collapse to one touch point.
    thresh = tol.eps_sign * a * radius * radius
    if disc <= thresh:
        if disc < -thresh:
            return []
        t = -b / (2.0 * a)
        pt = (p[0] + t * dx, p[1] + t * dy)
        return [(t, _snap_to_circle(pt, center, radius))]
    root = math.sqrt(disc)
    out = []
    for t in ((-b - root) / (2.0 * a), (-b + root) / (2.0 * a)):
        out.append((t, (p[0] + t * dx, p[1] + t * dy)))
    return out


def _snap_to_circle(pt: Point, center: Point, radius: float) -> Point:
    d = dist(pt, center)
    if d == 0.0:
        return (center[0] + radius, center[1])
    s = radius / d
    return (center[0] + (pt[0] - center[0]) * s, center[1] + (pt[1] - center[1]) * s)


def _on_circles(pair: CirclePair, p: Point, tol: ToleranceConfig) -> bool:
    return any(abs(dist(p, c) - r) <= 10.0 * tol.eps_metric for c, r in pair.circles())


def line_trace_pair(
    pair: CirclePair, p, q, tol: ToleranceConfig = DEFAULT_TOL
) -> list[Point]:
    """All points of the two-circle union on the line through p and q.

    Both p and q must lie on the union; the result (at most four points,
    tangencies counted once) is ordered along the line and de-duplicated,
    since a point shared by both circles is a single point of the union.
    """
    p = as_point(p)
    q = as_point(q)
    if dist(p, q) <= tol.eps_metric:
        raise ValueError("need two distinct points to define a line")
    for pt in (p, q):
        if not _on_circles(pair, pt, tol):
            raise ValueError(f"point {pt} does not lie on the circle pair")
    hits: list[tuple[float, Point]] = []
    for center, radius in pair.circles():
        hits.extend(_line_circle_hits(p, q, center, radius, tol))
    hits.sort(key=lambda h: h[0])
    out: list[Point] = []
    for _, pt in hits:
        if not out or dist(out[-1], pt) > tol.eps_metric:
            out.append(pt)
    return out


def interval_card(pair: CirclePair, x, z, tol: ToleranceConfig = DEFAULT_TOL) -> int:
    """Number of union points strictly between x and z (both excluded)."""
    x = as_point(x)
    z = as_point(z)
    trace = line_trace_pair(pair, x, z, tol)
    span = dist(x, z)
    count = 0
    for pt in trace:
        t = ((pt[0] - x[0]) * (z[0] - x[0]) + (pt[1] - x[1]) * (z[1] - x[1])) / (span * span)
        if t * span > tol.eps_metric and (1.0 - t) * span > tol.eps_metric:
            count += 1
    return count


# ---------------------------------------------------------------------------
# Arc identification from hull-cardinality structure
# ---------------------------------------------------------------------------


class ArcCharacterizationError(AssertionError):
    """The sweep-based arc characterization disagreed with the direct one."""


def identify_arc_from_inner(
    pair: ConcentricPair,
    u,
    tol: ToleranceConfig = DEFAULT_TOL,
    sweep_samples: int = 3600,
) -> Arc:
    """Recover the single arc attached to an inner-circle point two ways.

    Directly the arc is centered at u's angle.  Independently, an outer point
    s belongs to it iff the line through s and u meets the union in four
    points and no union point lies strictly between s and u; the two answers
    must agree up to the sweep resolution.  Endpoints are cross-checked to
    give three-point line traces (the tangent line at u).
    """
    u = as_point(u)
    c = pair.center
    if abs(dist(u, c) - pair.rho) > 10.0 * tol.eps_metric:
        raise ValueError("point is not on the inner circle")
    alpha = math.atan2(u[1] - c[1], u[0] - c[0])
    direct = arc(pair, alpha)

    step = TWO_PI / sweep_samples
    margin = 2.0 * step
    for i in range(sweep_samples):
        theta = i * step
        s = circle_point(c, pair.rho_prime, theta)
        characterized = (
            len(line_trace_pair(pair, s, u, tol)) == 4
            and interval_card(pair, s, u, tol) == 0
        )
        gap = circ_dist(theta, direct.alpha) - direct.half_width
        if gap < -margin and not characterized:
            raise ArcCharacterizationError(
                f"angle {theta:.6f} inside the arc fails the trace characterization"
            )
        if gap > margin and characterized:
            raise ArcCharacterizationError(
                f"angle {theta:.6f} outside the arc passes the trace characterization"
            )

    for endpoint in arc_endpoints(direct):
        if len(line_trace_pair(pair, endpoint, u, tol)) != 3:
            raise ArcCharacterizationError("arc endpoint does not give a 3-point trace")
    return direct


def identify_double_arc_from_outer(
    pair: ConcentricPair,
    u,
    tol: ToleranceConfig = DEFAULT_TOL,
    sweep_samples: int = 3600,
) -> Arc:
    """Recover the double arc attached to an outer-circle point two ways.

    Outer points s of the double arc around u are exactly those (other than
    u) whose chord to u misses the inner circle, i.e. the line trace through
    s and u has two points.
    """
    u = as_point(u)
    c = pair.center
    if abs(dist(u, c) - pair.rho_prime) > 10.0 * tol.eps_metric:
        raise ValueError("point is not on the outer circle")
    alpha = math.atan2(u[1] - c[1], u[0] - c[0])
    direct = arc(pair, alpha, double=True)

    step = TWO_PI / sweep_samples
    margin = 2.0 * step
    for i in range(sweep_samples):
        theta = i * step
        if circ_dist(theta, direct.alpha) <= margin:
            continue  # u itself: no line to trace
        s = circle_point(c, pair.rho_prime, theta)
        characterized = len(line_trace_pair(pair, s, u, tol)) == 2
        gap = circ_dist(theta, direct.alpha) - direct.half_width
        if gap < -margin and not characterized:
            raise ArcCharacterizationError(
                f"angle {theta:.6f} inside the double arc has a trace of cardinality != 2"
            )
        if gap > margin and characterized:
            raise ArcCharacterizationError(
                f"angle {theta:.6f} outside the double arc has a 2-point trace"
            )
    return direct


# ---------------------------------------------------------------------------
# Cover invariants
# ---------------------------------------------------------------------------


def m_invariant(pair: ConcentricPair) -> int:
    """Least number of single arcs covering the outer circle.

    n open arcs of angular length 2a cover the circle iff n*a exceeds pi
    strictly (equality leaves the shared endpoints uncovered), so the value
    is floor(pi / arccos(radius_ratio)) + 1.  When pi/arccos(r) is an exact
    integer this strictness argument pins the value one above it; the sweep
    oracle in the test suite confirms the formula numerically.
    """
    a = math.acos(radius_ratio(pair))
    return int(math.floor(math.pi / a)) + 1


def M_invariant(pair: ConcentricPair) -> float:
    """Infimum of n/k over n-arc k-covers of the outer circle."""
    return math.pi / math.acos(radius_ratio(pair))


@dataclass(frozen=True)
class CoverCertificate:
    """Candidate k-cover: arc center angles plus the claimed multiplicity."""

    alphas: tuple[float, ...]
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("claimed multiplicity k must be at least 1")
        object.__setattr__(self, "alphas", tuple(_norm_angle(float(a)) for a in self.alphas))

    def to_json_dict(self) -> dict:
        return {"alphas": list(self.alphas), "k": self.k}

    @classmethod
    def from_json_dict(cls, data: dict) -> "CoverCertificate":
        for key in ("alphas", "k"):
            if key not in data:
                raise ValueError(f"cover certificate JSON needs field '{key}'")
        return cls(tuple(float(a) for a in data["alphas"]), int(data["k"]))


def verify_cover(
    pair: ConcentricPair,
    cert: CoverCertificate,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> int:
    """Exact minimum coverage of the outer circle by the certificate's arcs.

    Coverage by open arcs is piecewise constant between consecutive arc
    endpoints, so evaluating at every endpoint and at one interior witness
    per gap is exhaustive.  Endpoints are excluded from their own arcs,
    which is what makes ratios at the infimum unattainable.
    """
    if not cert.alphas:
        return 0
    half = arc_half_width(pair)
    alphas = np.asarray(cert.alphas, dtype=float)

    events = np.concatenate([(alphas - half) % TWO_PI, (alphas + half) % TWO_PI])
    events = np.sort(events)
    keep = np.ones(len(events), dtype=bool)
    keep[1:] = np.diff(events) > 1e-12
    events = events[keep]

    gaps = np.diff(np.concatenate([events, [events[0] + TWO_PI]]))
    mids = (events + gaps / 2.0) % TWO_PI
    eval_pts = np.concatenate([events, mids[gaps > 1e-12]])

    delta = np.abs((eval_pts[:, None] - alphas[None, :] + math.pi) % TWO_PI - math.pi)
    coverage = (delta < half - tol.eps_metric).sum(axis=1)
    return int(coverage.min())


def cover_lower_bound_ok(pair: ConcentricPair, n: int, k: int) -> bool:
    """Necessary measure condition for an n-arc k-cover: n*arccos(r) >= k*pi.

    False guarantees that no k-cover with n arcs exists, because the total
    arc length would fall short of k times the circumference.
    """
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive")
    return n * math.acos(radius_ratio(pair)) >= k * math.pi - 1e-12


class CoverBoundError(ValueError):
    """Requested cover ratio is not achievable."""


def construct_cover(
    pair: ConcentricPair,
    target_ratio: float,
    tol: ToleranceConfig = DEFAULT_TOL,
    margin: float = 1e-6,
    k_max: int = 100_000,
) -> CoverCertificate:
    """Build a verified k-cover with n/k at most target_ratio.

    Arc centers advance by (2a - eps) for a small eps > 0 until they wrap k
    full turns; n and k are chosen as the smallest multiplicity for which
    the wrap count fits under the target ratio with a safety margin, so the
    verification sweep has genuine overlap to find.  Ratios at or below the
    invariant M are rejected (the measure bound forbids them); ratios within
    ~margin above M are rejected as numerically unconstructible.
    """
    a = math.acos(radius_ratio(pair))
    big_m = math.pi / a
    if target_ratio <= big_m:
        raise CoverBoundError(
            f"no cover with ratio {target_ratio} exists: the invariant M is {big_m}"
        )
    for k in range(1, k_max + 1):
        n = math.floor(2.0 * k * math.pi / (2.0 * a - margin)) + 1
        if n <= math.floor(target_ratio * k + 1e-9):
            slack = 2.0 * a - 2.0 * k * math.pi / n
            eps = slack / 2.0
            cert = CoverCertificate(tuple(i * (2.0 * a - eps) for i in range(1, n + 1)), k)
            achieved = verify_cover(pair, cert, tol)
            if achieved < k:
                raise RuntimeError(
                    f"internal error: constructed cover verifies at {achieved} < k={k}"
                )
            return cert
    raise CoverBoundError(
        f"target ratio {target_ratio} is too close to the invariant M={big_m} "
        f"to construct at margin {margin}"
    )


# ---------------------------------------------------------------------------
# Isomorphism of concentric pairs
# ---------------------------------------------------------------------------


class RatioMismatchError(ValueError):
    """The two pairs have different radius ratios, hence different invariants."""

    def __init__(self, m_source: float, m_target: float):
        self.m_source = m_source
        self.m_target = m_target
        super().__init__(
            f"radius ratios differ: invariant M is {m_source} vs {m_target}"
        )


def decide_isomorphic(
    pair_s: ConcentricPair,
    pair_r: ConcentricPair,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> bool:
    """Betweenness isomorphic iff the radius ratios agree."""
    return abs(radius_ratio(pair_s) - radius_ratio(pair_r)) <= tol.eps_metric


def canonical_isomorphism(
    pair_s: ConcentricPair,
    pair_r: ConcentricPair,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> ScaledIsometry:
    """The translate-rescale-translate map sending pair_s onto pair_r.

    Centers map to centers and the scale is the ratio of outer radii, so
    outer circle goes to outer circle and (by ratio equality) inner to
    inner.  Raises RatioMismatchError when the pairs are not isomorphic.
    """
    if not decide_isomorphic(pair_s, pair_r, tol):
        raise RatioMismatchError(M_invariant(pair_s), M_invariant(pair_r))
    scale = pair_r.rho_prime / pair_s.rho_prime
    c = pair_s.center
    d = pair_r.center
    return ScaledIsometry(
        scale=scale,
        translation=(d[0] - scale * c[0], d[1] - scale * c[1]),
    )


def chord_orbit(
    pair: ConcentricPair, theta0: float, sign: int = 1, steps: int = 1
) -> list[float]:
    """Angles reached from theta0 by repeated tangent-chord steps.

    Each step advances by sign * 2*arccos(r); consecutive orbit angles are
    the endpoints of one single arc.  Returns steps + 1 normalized angles,
    starting with theta0.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if steps < 0:
        raise ValueError("steps must be non-negative")
    step = 2.0 * math.acos(radius_ratio(pair))
    return [_norm_angle(theta0 + sign * k * step) for k in range(steps + 1)]


@dataclass(frozen=True)
class SimilarityExtension:
    """Similarity fitted to a sampled map between two circle pairs.

    residual         -- worst pointwise defect over the samples;
    on_circle_defect -- worst distance of an image from the nearest target
                        circle.  Both below eps_metric certify that the
                        sampled map is the restriction of one similarity.
    """

    map: ScaledIsometry
    residual: float
    on_circle_defect: float


def extend_to_similarity(
    pair_s: ConcentricPair,
    pair_r: ConcentricPair,
    sampled_map,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> SimilarityExtension:
    """Fit one similarity to samples of a map from pair_s onto pair_r.

    Both orientations are tried; a large residual reports that the sampled
    map is not the restriction of any similarity (it is not an error).
    """
    if not decide_isomorphic(pair_s, pair_r, tol):
        raise RatioMismatchError(M_invariant(pair_s), M_invariant(pair_r))
    samples = [(as_point(src), as_point(dst)) for src, dst in sampled_map]
    for src, dst in samples:
        if not _on_circles(pair_s, src, tol):
            raise ValueError(f"source sample {src} is not on the source pair")
        if not _on_circles(pair_r, dst, tol):
            raise ValueError(f"target sample {dst} is not on the target pair")
    fit = fit_similarity(samples, allow_reflection=True, tol=tol)
    defect = 0.0
    d = pair_r.center
    for src, _ in samples:
        image = fit.map.apply(src)
        gap = min(
            abs(dist(image, d) - pair_r.rho), abs(dist(image, d) - pair_r.rho_prime)
        )
        defect = max(defect, gap)
    return SimilarityExtension(fit.map, fit.residual, defect)


# ---------------------------------------------------------------------------
# Non-concentric classification and tangent chords
# ---------------------------------------------------------------------------


def classify(pair: NonConcentricPair, tol: ToleranceConfig = DEFAULT_TOL) -> CaseLabel:
    """One of the five mutual positions of two non-concentric circles.

    a: one strictly inside the other      (d < |r1 - r2|)
    b: internally tangent                 (d = |r1 - r2|)
    c: crossing at two points             (|r1 - r2| < d < r1 + r2)
    d: externally tangent                 (d = r1 + r2)
    e: strictly outside each other        (d > r1 + r2)

    The tangency equalities are tested within eps_metric first, so a pair on
    the boundary classifies as tangent.
    """
    d = dist(pair.c1, pair.c2)
    inner_gap = abs(pair.r1 - pair.r2)
    outer_gap = pair.r1 + pair.r2
    if abs(d - inner_gap) <= tol.eps_metric:
        return "b"
    if abs(d - outer_gap) <= tol.eps_metric:
        return "d"
    if d < inner_gap:
        return "a"
    if d > outer_gap:
        return "e"
    return "c"


def _nested_circles(pair: CirclePair, tol: ToleranceConfig):
    """(outer_center, outer_radius, inner_center, inner_radius) for a nested pair.

    Concentric pairs qualify trivially; non-concentric ones must classify as
    case (a), with the larger circle taken as outer.
    """
    if isinstance(pair, ConcentricPair):
        return pair.center, pair.rho_prime, pair.center, pair.rho
    if classify(pair, tol) != "a":
        raise ValueError("tangent-chord geometry needs one circle strictly inside the other")
    if pair.r1 > pair.r2:
        return pair.c1, pair.r1, pair.c2, pair.r2
    return pair.c2, pair.r2, pair.c1, pair.r1


def tangent_chord_step(
    pair: CirclePair,
    theta: float,
    orientation: Literal["ccw", "cw"] = "ccw",
    tol: ToleranceConfig = DEFAULT_TOL,
) -> tuple[float, Point]:
    """One tangent-chord step around a nested circle pair.

    From the outer-circle point at angle theta, follow the tangent line to
    the inner circle whose chord advances in the requested orientation (the
    inner center lies left of the directed chord for ccw, right for cw) and
    return the angle of its second outer intersection plus the tangency
    point.  On a concentric pair the ccw step is exactly +2*arccos(r).
    """
    if orientation not in ("ccw", "cw"):
        raise ValueError("orientation must be 'ccw' or 'cw'")
    co, big_r, ci, small_r = _nested_circles(pair, tol)
    p = circle_point(co, big_r, theta)
    lx = ci[0] - p[0]
    ly = ci[1] - p[1]
    ell = math.sqrt(lx * lx + ly * ly)
    phi = math.atan2(-ly, -lx)  # direction from inner center toward p
    psi = math.acos(small_r / ell)
    want_ccw = orientation == "ccw"
    for s in (1, -1):
        t_pt = circle_point(ci, small_r, phi + s * psi)
        hits = _line_circle_hits(p, t_pt, co, big_r, tol)
        second = max(hits, key=lambda h: abs(h[0]))[1]
        cross = (second[0] - p[0]) * (ci[1] - p[1]) - (second[1] - p[1]) * (ci[0] - p[0])
        if (cross > 0.0) == want_ccw:
            next_theta = math.atan2(second[1] - co[1], second[0] - co[0])
            return _norm_angle(next_theta), t_pt
    raise RuntimeError("no tangent chord matched the requested orientation")


def generalized_arc(
    pair: CirclePair, u, tol: ToleranceConfig = DEFAULT_TOL
) -> tuple[float, float]:
    """Outer-circle arc cut off by the tangent line at an inner-circle point.

    Returns (start, end) angles with start in [0, 2*pi) and end in
    (start, start + 2*pi); the open ccw arc from start to end is the piece
    of the outer circle on the far side of the tangent line from the inner
    center.  For a concentric pair and u at inner angle alpha this is the
    single arc (alpha - arccos r, alpha + arccos r).
    """
    co, big_r, ci, small_r = _nested_circles(pair, tol)
    u = as_point(u)
    if abs(dist(u, ci) - small_r) > 10.0 * tol.eps_metric:
        raise ValueError("point is not on the inner circle")
    # Tangent line at u: passes through u, perpendicular to the inner radius.
    tx = -(u[1] - ci[1])
    ty = u[0] - ci[0]
    q = (u[0] + tx, u[1] + ty)
    hits = _line_circle_hits(u, q, co, big_r, tol)
    if len(hits) != 2:
        raise RuntimeError("tangent line unexpectedly fails to cross the outer circle twice")
    th = sorted(
        math.atan2(pt[1] - co[1], pt[0] - co[0]) for _, pt in hits
    )

    def line_side(p: Point) -> float:
        return (q[0] - u[0]) * (p[1] - u[1]) - (q[1] - u[1]) * (p[0] - u[0])

    side_inner = line_side(ci)
    for start, end in ((th[0], th[1]), (th[1], th[0] + TWO_PI)):
        mid = circle_point(co, big_r, (start + end) / 2.0)
        if line_side(mid) * side_inner < 0.0:
            start_n = _norm_angle(start)
            return start_n, start_n + (end - start)
    raise RuntimeError("could not orient the tangent-line arc")


# ---------------------------------------------------------------------------
# Commensurate finite samplings
# ---------------------------------------------------------------------------


class AccidentalIncidenceError(ValueError):
    """A sampled configuration carries collinearities beyond the designed ones."""


def sample_configuration(
    pair: ConcentricPair,
    n_outer: int,
    p: int,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> FiniteConfig:
    """Sample 2*n points carrying the pair's tangency and diameter incidences.

    Outer ids 0..n-1 sit at angles 2*pi*j/n on the outer circle, inner ids
    n..2n-1 at the same angles on the inner circle.  Commensurability
    r = cos(2*pi*p/n) makes each chord between outer j and outer j+2p
    tangent to the inner circle exactly at inner j+p, and n even puts both
    inner j and inner j+n/2 on the diameter between outer j and outer
    j+n/2.  Construction re-derives the full incidence relation and fails
    loudly if anything beyond these designed triples shows up near the
    collinearity threshold.
    """
    n = n_outer
    if n < 4 or n % 2 != 0:
        raise ValueError("n_outer must be an even count of at least 4")
    if p < 1 or not 0.0 < TWO_PI * p / n < math.pi / 2.0:
        raise ValueError("need 0 < 2*pi*p/n < pi/2")
    r = radius_ratio(pair)
    want = math.cos(TWO_PI * p / n)
    if abs(r - want) > tol.eps_metric:
        raise ValueError(
            f"radius ratio {r} is not commensurate: cos(2*pi*{p}/{n}) = {want}"
        )

    c = pair.center
    points = [circle_point(c, pair.rho_prime, TWO_PI * j / n) for j in range(n)] + [
        circle_point(c, pair.rho, TWO_PI * j / n) for j in range(n)
    ]
    cfg = FiniteConfig(points, tol=tol)

    expected_collinear = set()
    expected_between = set()
    for j in range(n):
        o1, mid, o2 = j, n + (j + p) % n, (j + 2 * p) % n
        expected_collinear.add(tuple(sorted((o1, mid, o2))))
        expected_between.add((min(o1, o2), mid, max(o1, o2)))
    for j in range(n // 2):
        o1, o2 = j, j + n // 2
        i1, i2 = n + j, n + j + n // 2
        quad = (o1, o2, i1, i2)
        for skip in range(4):
            triple = tuple(sorted(q for t, q in enumerate(quad) if t != skip))
            expected_collinear.add(triple)
        # Along the diameter the order is o1, i1, i2, o2.
        for ends, mid in (
            ((o1, o2), i1),
            ((o1, o2), i2),
            ((o1, i2), i1),
            ((i1, o2), i2),
        ):
            expected_between.add((min(ends), mid, max(ends)))

    _verify_designed_incidence(cfg, expected_collinear, expected_between, tol)
    return cfg


def _verify_designed_incidence(cfg, expected_collinear, expected_between, tol):
    pts = np.asarray(cfg.points())
    n = len(pts)
    loose = set()
    for i in range(n):
        for k in range(i + 1, n):
            dx = pts[k, 0] - pts[i, 0]
            dy = pts[k, 1] - pts[i, 1]
            area = dx * (pts[:, 1] - pts[i, 1]) - dy * (pts[:, 0] - pts[i, 0])
            for j in np.nonzero(np.abs(area) <= 10.0 * tol.eps_sign)[0]:
                j = int(j)
                if j != i and j != k:
                    loose.add(tuple(sorted((i, j, k))))
    stray = loose - expected_collinear
    if stray:
        raise AccidentalIncidenceError(
            f"unintended near-collinear triples in sampling: {sorted(stray)[:5]}"
        )
    missing = expected_collinear - set(cfg.collinear_triples)
    if missing:
        raise AccidentalIncidenceError(
            f"designed collinear triples not realised: {sorted(missing)[:5]}"
        )
    missing_between = expected_between - set(cfg.between_triples)
    if missing_between:
        raise AccidentalIncidenceError(
            f"designed betweenness triples not realised: {sorted(missing_between)[:5]}"
        )
