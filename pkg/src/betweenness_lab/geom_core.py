"""Planar primitives with an explicit tolerance policy.

Everything downstream reduces to three predicates on points (orientation,
collinearity, betweenness) and to similarities of the plane (maps that
multiply all distances by a fixed positive constant).  Coordinates are
double-precision floats; each sign decision carries a tolerance so that
configurations built from nested square roots still classify cleanly.

Conventions:
    - orientation is positive for counterclockwise triples;
    - the orthogonal part of a similarity is "optionally reflect across the
      x-axis, then rotate by ``rotation``".
"""

from __future__ import annotations

import math
from dataclasses import dataclass

Point = tuple[float, float]


def as_point(obj) -> Point:
    """Coerce a length-2 sequence to a finite ``(x, y)`` tuple.

    Raises ValueError on wrong arity or non-finite coordinates.
    """
    try:
        x, y = float(obj[0]), float(obj[1])
    except (TypeError, IndexError, ValueError) as exc:
        raise ValueError(f"not a planar point: {obj!r}") from exc
    if len(obj) != 2:
        raise ValueError(f"point needs exactly two coordinates, got {obj!r}")
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"point coordinates must be finite, got {obj!r}")
    return (x, y)


@dataclass(frozen=True)
class ToleranceConfig:
    """Thresholds for the two kinds of approximate decisions.

    eps_sign   -- a twice-signed triangle area of magnitude <= eps_sign is
                  treated as zero (collinear);
    eps_metric -- two points closer than eps_metric coincide, and a point
                  within eps_metric of a segment lies on it.
    """

    eps_sign: float = 1e-9
    eps_metric: float = 1e-9

    def __post_init__(self):
        if not (self.eps_sign > 0 and math.isfinite(self.eps_sign)):
            raise ValueError("eps_sign must be a positive finite number")
        if not (self.eps_metric > 0 and math.isfinite(self.eps_metric)):
            raise ValueError("eps_metric must be a positive finite number")


DEFAULT_TOL = ToleranceConfig()


def dist(p: Point, q: Point) -> float:
    dx = q[0] - p[0]
    dy = q[1] - p[1]
    return math.sqrt(dx * dx + dy * dy)


def signed_area2(p: Point, q: Point, r: Point) -> float:
    """Twice the signed area of triangle pqr (positive = counterclockwise)."""
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def orient(p: Point, q: Point, r: Point, tol: ToleranceConfig = DEFAULT_TOL) -> int:
    """Orientation sign of the triple: +1 ccw, -1 cw, 0 within tolerance."""
    a = signed_area2(p, q, r)
    if abs(a) <= tol.eps_sign:
        return 0
    return 1 if a > 0.0 else -1


def collinear(p: Point, q: Point, r: Point, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    return orient(p, q, r, tol) == 0


def segment_distance(y: Point, x: Point, z: Point) -> float:
    """Distance from y to the closed segment [x, z].

    The incidence caches in finite_config replicate this computation
    vectorised; keep the operation order in sync with that code path.
    """
    dx = z[0] - x[0]
    dy = z[1] - x[1]
    l2 = dx * dx + dy * dy
    if l2 == 0.0:
        return dist(y, x)
    relx = y[0] - x[0]
    rely = y[1] - x[1]
    t = min(1.0, max(0.0, (relx * dx + rely * dy) / l2))
    ex = relx - t * dx
    ey = rely - t * dy
    return math.sqrt(ex * ex + ey * ey)


def between(
    x: Point,
    y: Point,
    z: Point,
    strict: bool = False,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> bool:
    """Does y lie on the segment [x, z]?

    True when y is within eps_metric of the set {l*x + (1-l)*z : l in [0,1]}.
    With ``strict`` y must additionally be farther than eps_metric from both
    endpoints, so endpoints themselves never qualify.
    """
    if strict and (dist(y, x) <= tol.eps_metric or dist(y, z) <= tol.eps_metric):
        return False
    return segment_distance(y, x, z) <= tol.eps_metric


def _norm_angle(theta: float) -> float:
    """Reduce an angle to [0, 2*pi)."""
    theta = theta % (2.0 * math.pi)
    # Python's % keeps the divisor's sign but can still return 2*pi after
    # rounding for tiny negative inputs.
    if theta >= 2.0 * math.pi:
        theta -= 2.0 * math.pi
    return theta


@dataclass(frozen=True)
class ScaledIsometry:
    """Similarity of the plane: p -> translation + scale * R(rotation) * F(p).

    F reflects across the x-axis when ``reflect`` is set, otherwise it is the
    identity; distances are multiplied by ``scale`` exactly.
    """

    scale: float
    rotation: float = 0.0
    reflect: bool = False
    translation: Point = (0.0, 0.0)

    def __post_init__(self):
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError("scale must be a positive finite number")
        object.__setattr__(self, "rotation", _norm_angle(float(self.rotation)))
        object.__setattr__(self, "translation", as_point(self.translation))

    # -- constructors -------------------------------------------------

    @classmethod
    def identity(cls) -> "ScaledIsometry":
        return cls(1.0)

    @classmethod
    def rescale(cls, scale: float) -> "ScaledIsometry":
        """p -> scale * p about the origin."""
        return cls(scale)

    @classmethod
    def translate(cls, u) -> "ScaledIsometry":
        return cls(1.0, translation=as_point(u))

    @classmethod
    def rotate(cls, beta: float) -> "ScaledIsometry":
        """Rotation by beta about the origin."""
        return cls(1.0, rotation=beta)

    @classmethod
    def reflect_then_rotate(cls, beta: float) -> "ScaledIsometry":
        """Reflection across the x-axis followed by rotation by beta."""
        return cls(1.0, rotation=beta, reflect=True)

    # -- action --------------------------------------------------------

    def linear(self) -> tuple[float, float, float, float]:
        """Entries (a, b, c, d) of the linear part [[a, b], [c, d]]."""
        c = math.cos(self.rotation)
        s = math.sin(self.rotation)
        if self.reflect:
            return (self.scale * c, self.scale * s, self.scale * s, -self.scale * c)
        return (self.scale * c, -self.scale * s, self.scale * s, self.scale * c)

    def apply(self, p) -> Point:
        x, y = float(p[0]), float(p[1])
        a, b, c, d = self.linear()
        tx, ty = self.translation
        return (a * x + b * y + tx, c * x + d * y + ty)

    def compose(self, other: "ScaledIsometry") -> "ScaledIsometry":
        """self after other: (self.compose(other)).apply(p) == self.apply(other.apply(p))."""
        rotation = (
            self.rotation - other.rotation
            if self.reflect
            else self.rotation + other.rotation
        )
        return ScaledIsometry(
            scale=self.scale * other.scale,
            rotation=rotation,
            reflect=self.reflect ^ other.reflect,
            translation=self.apply(other.translation),
        )

    def invert(self) -> "ScaledIsometry":
        inv_scale = 1.0 / self.scale
        rotation = self.rotation if self.reflect else -self.rotation
        inv = ScaledIsometry(scale=inv_scale, rotation=rotation, reflect=self.reflect)
        a, b, c, d = inv.linear()
        tx, ty = self.translation
        return ScaledIsometry(
            scale=inv_scale,
            rotation=rotation,
            reflect=self.reflect,
            translation=(-(a * tx + b * ty), -(c * tx + d * ty)),
        )


@dataclass(frozen=True)
class SimilarityFit:
    """Similarity determined by two anchor correspondences plus the worst
    pointwise residual over the whole correspondence list."""

    map: ScaledIsometry
    residual: float


class DegenerateSourceError(ValueError):
    """All source points of a correspondence coincide within tolerance."""


def _similarity_from_complex(a: complex, b: complex, reflect: bool) -> ScaledIsometry | None:
    scale = abs(a)
    if scale <= 0.0 or not math.isfinite(scale):
        return None
    return ScaledIsometry(
        scale=scale,
        rotation=math.atan2(a.imag, a.real),
        reflect=reflect,
        translation=(b.real, b.imag),
    )


def fit_similarity(
    correspondence,
    allow_reflection: bool = True,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> SimilarityFit:
    """Fit a similarity to a list of (source, target) point pairs.

    The map is pinned down by the first pair together with the first later
    pair whose source is farther than eps_metric from the first source; a
    similarity either realises the remaining pairs or it does not, so the
    leftover disagreement is reported as the max residual instead of being
    spread by least squares.  With ``allow_reflection`` both orientations are
    tried and the one with the smaller residual wins.

    Raises DegenerateSourceError when no well-separated source pair exists.
    """
    pairs = [(as_point(src), as_point(dst)) for src, dst in correspondence]
    if len(pairs) < 2:
        raise DegenerateSourceError("need at least two correspondence pairs")
    z = [complex(*src) for src, _ in pairs]
    w = [complex(*dst) for _, dst in pairs]

    anchor = None
    for j in range(1, len(z)):
        if abs(z[j] - z[0]) > tol.eps_metric:
            anchor = j
            break
    if anchor is None:
        raise DegenerateSourceError(
            "all source points coincide within eps_metric; similarity undetermined"
        )

    dz = z[anchor] - z[0]
    dw = w[anchor] - w[0]

    candidates = []
    direct = _similarity_from_complex(dw / dz, w[0] - (dw / dz) * z[0], reflect=False)
    if direct is not None:
        candidates.append(direct)
    if allow_reflection:
        a = dw / dz.conjugate()
        mirrored = _similarity_from_complex(a, w[0] - a * z[0].conjugate(), reflect=True)
        if mirrored is not None:
            candidates.append(mirrored)
    if not candidates:
        # Targets collapse to a point: no genuine similarity exists, report
        # the defect against a unit placeholder rather than erroring out.
        candidates.append(ScaledIsometry.identity())

    best = None
    for cand in candidates:
        residual = max(dist(cand.apply(src), dst) for src, dst in pairs)
        if best is None or residual < best.residual:
            best = SimilarityFit(cand, residual)
    return best
