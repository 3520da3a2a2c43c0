"""Isomorphism decision for the betweenness / collinearity structure of
finite planar configurations.

Two configurations are betweenness (collinearity) isomorphic when a bijection
of their indices preserves the strict-betweenness (collinearity) triples in
both directions.  The search is a plain backtracking over index bijections,
pruned by per-point signatures; refutations either name a mismatched
invariant that anyone can recompute, or state that the pruned space was
exhausted.  A node budget turns runaway instances into an explicit
"inconclusive" outcome rather than a silent refutation.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Literal, Optional

from .finite_config import FiniteConfig, normalize_bijection

IsoKind = Literal["betweenness", "collinearity"]

DEFAULT_NODE_LIMIT = 10_000_000


def _check_kind(kind: str) -> str:
    if kind not in ("betweenness", "collinearity"):
        raise ValueError(f"unknown isomorphism kind {kind!r}")
    return kind


def relation_set(cfg: FiniteConfig, kind: IsoKind) -> frozenset:
    """The normalized triple set defining the structure of the given kind."""
    _check_kind(kind)
    if kind == "betweenness":
        return cfg.between_triples  # (end, middle, end) with end ids sorted
    return cfg.collinear_triples  # sorted index triples


@dataclass(frozen=True)
class PointSignature:
    """Bijection-invariant profile of one point.

    Any relation-preserving bijection matches points with equal signatures:
    extremeness and the middle/end counts are defined by the betweenness
    triples themselves, and the collinear count by the collinearity triples
    (which the betweenness triples determine, as three distinct collinear
    points always have one of them between the other two).
    """

    is_extreme: bool
    middle_count: int
    end_count: int
    collinear_count: int

    def key(self, kind: IsoKind) -> tuple:
        if kind == "collinearity":
            return (self.collinear_count,)
        return (self.is_extreme, self.middle_count, self.end_count, self.collinear_count)


def point_signatures(cfg: FiniteConfig) -> list[PointSignature]:
    mid = Counter()
    end = Counter()
    col = Counter()
    for x, y, z in cfg.between_triples:
        mid[y] += 1
        end[x] += 1
        end[z] += 1
    for t in cfg.collinear_triples:
        for i in t:
            col[i] += 1
    extremes = set(cfg.extreme_points())
    return [
        PointSignature(i in extremes, mid[i], end[i], col[i]) for i in range(cfg.n)
    ]


@dataclass(frozen=True)
class Certificate:
    """Reason for a refutation.

    For invariant mismatches, ``value_a``/``value_b`` are the two unequal
    values as recomputed from the inputs; ``search_exhausted`` certificates
    only witness that the pruned bijection space contained no isomorphism.
    """

    invariant: str
    value_a: object = None
    value_b: object = None

    def describe(self) -> str:
        if self.invariant == "search_exhausted":
            return "exhaustive signature-pruned search found no isomorphism"
        return f"{self.invariant}: {self.value_a!r} vs {self.value_b!r}"


@dataclass(frozen=True)
class SearchResult:
    outcome: Literal["found", "refuted", "inconclusive"]
    bijections: tuple[tuple[int, ...], ...] = ()
    certificate: Optional[Certificate] = None
    nodes_explored: int = 0


def verify_map(
    cfg_a: FiniteConfig,
    cfg_b: FiniteConfig,
    mapping,
    kind: IsoKind = "betweenness",
):
    """Check a bijection preserves the relation in both directions.

    Returns (True, None) or (False, violating_triple) where the triple is in
    cfg_a's ids: either a related triple whose image is unrelated, or the
    preimage of a related cfg_b triple that is unrelated in cfg_a.
    """
    _check_kind(kind)
    if cfg_a.n != cfg_b.n:
        raise ValueError(f"size mismatch: {cfg_a.n} vs {cfg_b.n}")
    f = normalize_bijection(mapping, cfg_a.n)
    rel_a = relation_set(cfg_a, kind)
    rel_b = relation_set(cfg_b, kind)

    def push(t):
        if kind == "collinearity":
            return tuple(sorted((f[t[0]], f[t[1]], f[t[2]])))
        x, y, z = f[t[0]], f[t[1]], f[t[2]]
        return (min(x, z), y, max(x, z))

    for t in rel_a:
        if push(t) not in rel_b:
            return False, t
    inv = [0] * cfg_a.n
    for i, v in enumerate(f):
        inv[v] = i

    def pull(t):
        if kind == "collinearity":
            return tuple(sorted((inv[t[0]], inv[t[1]], inv[t[2]])))
        x, y, z = inv[t[0]], inv[t[1]], inv[t[2]]
        return (min(x, z), y, max(x, z))

    for t in rel_b:
        back = pull(t)
        if back not in rel_a:
            return False, back
    return True, None


def _invariant_mismatch(cfg_a, cfg_b, kind) -> Optional[Certificate]:
    if cfg_a.n != cfg_b.n:
        return Certificate("point_count", cfg_a.n, cfg_b.n)
    if kind == "betweenness":
        ea, eb = len(cfg_a.extreme_points()), len(cfg_b.extreme_points())
        if ea != eb:
            return Certificate("extreme_point_count", ea, eb)
    sig_a = sorted(s.key(kind) for s in point_signatures(cfg_a))
    sig_b = sorted(s.key(kind) for s in point_signatures(cfg_b))
    if sig_a != sig_b:
        return Certificate("signature_multiset", tuple(sig_a), tuple(sig_b))
    return None


class _Search:
    def __init__(self, cfg_a, cfg_b, kind, mode, node_limit):
        self.kind = kind
        self.mode = mode
        self.node_limit = node_limit
        self.nodes = 0
        self.found: list[tuple[int, ...]] = []
        self.n = cfg_a.n
        self.rel_a = relation_set(cfg_a, kind)
        self.rel_b = relation_set(cfg_b, kind)

        sigs_a = point_signatures(cfg_a)
        sigs_b = point_signatures(cfg_b)
        by_key: dict[tuple, list[int]] = {}
        for j, s in enumerate(sigs_b):
            by_key.setdefault(s.key(kind), []).append(j)
        self.candidates = [sorted(by_key.get(s.key(kind), [])) for s in sigs_a]
        # Most-constrained-first: small candidate classes early, id as tiebreak.
        self.order = sorted(range(self.n), key=lambda i: (len(self.candidates[i]), i))

    def _related_a(self, x, y, z) -> bool:
        if self.kind == "collinearity":
            return tuple(sorted((x, y, z))) in self.rel_a
        return (min(x, z), y, max(x, z)) in self.rel_a

    def _related_b(self, x, y, z) -> bool:
        if self.kind == "collinearity":
            return tuple(sorted((x, y, z))) in self.rel_b
        return (min(x, z), y, max(x, z)) in self.rel_b

    def _consistent(self, assigned: list[int], s: int, t: int, image: list) -> bool:
        # Check every triple formed by s with two already-assigned sources,
        # in all middle positions for betweenness (collinearity is symmetric
        # so one arrangement suffices).
        for ia, a in enumerate(assigned):
            fa = image[a]
            for b in assigned[ia + 1 :]:
                fb = image[b]
                if self.kind == "collinearity":
                    if self._related_a(a, b, s) != self._related_b(fa, fb, t):
                        return False
                else:
                    if self._related_a(a, s, b) != self._related_b(fa, t, fb):
                        return False
                    if self._related_a(s, a, b) != self._related_b(t, fa, fb):
                        return False
                    if self._related_a(a, b, s) != self._related_b(fa, fb, t):
                        return False
        return True

    def run(self) -> SearchResult:
        image: list = [None] * self.n
        used = [False] * self.n
        assigned: list[int] = []

        def backtrack(depth: int) -> bool:
            """Returns True when the search should stop early."""
            if depth == self.n:
                self.found.append(tuple(image))
                return self.mode == "first"
            s = self.order[depth]
            for t in self.candidates[s]:
                if used[t]:
                    continue
                self.nodes += 1
                if self.nodes > self.node_limit:
                    return True
                if not self._consistent(assigned, s, t, image):
                    continue
                image[s] = t
                used[t] = True
                assigned.append(s)
                stop = backtrack(depth + 1)
                assigned.pop()
                used[t] = False
                image[s] = None
                if stop:
                    return True
            return False

        backtrack(0)
        if self.nodes > self.node_limit:
            return SearchResult(
                "inconclusive",
                tuple(sorted(self.found)),
                None,
                self.nodes,
            )
        if self.found:
            return SearchResult("found", tuple(sorted(self.found)), None, self.nodes)
        return SearchResult(
            "refuted", (), Certificate("search_exhausted"), self.nodes
        )


def find_isomorphism(
    cfg_a: FiniteConfig,
    cfg_b: FiniteConfig,
    kind: IsoKind = "betweenness",
    mode: Literal["first", "all"] = "first",
    node_limit: int = DEFAULT_NODE_LIMIT,
) -> SearchResult:
    """Decide whether the configurations are isomorphic for the given kind.

    Outcomes: ``found`` with one (or, in mode 'all', every) bijection;
    ``refuted`` with a certificate; ``inconclusive`` when the node budget ran
    out (bijections found before the cutoff are still reported).
    """
    _check_kind(kind)
    if mode not in ("first", "all"):
        raise ValueError(f"unknown search mode {mode!r}")
    cert = _invariant_mismatch(cfg_a, cfg_b, kind)
    if cert is not None:
        return SearchResult("refuted", (), cert, 0)
    return _Search(cfg_a, cfg_b, kind, mode, node_limit).run()


def enumerate_automorphisms(
    cfg: FiniteConfig,
    kind: IsoKind = "betweenness",
    node_limit: int = DEFAULT_NODE_LIMIT,
) -> tuple[tuple[int, ...], ...]:
    """All relation-preserving self-bijections, in lexicographic order.

    The result always contains the identity and is closed under composition
    and inverse.  Raises RuntimeError if the node budget is exhausted, since
    a partial automorphism list is worse than none.
    """
    result = find_isomorphism(cfg, cfg, kind, mode="all", node_limit=node_limit)
    if result.outcome == "inconclusive":
        raise RuntimeError(
            f"automorphism enumeration exceeded {node_limit} nodes; raise the limit"
        )
    return result.bijections
