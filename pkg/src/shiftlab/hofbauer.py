"""Piecewise monotonic interval maps, itinerary coding, and the Markov
diagram of follower sets with truncation to a finite graph.

Interval endpoints are exact rationals.  Rational map parameters keep every
follower interval exact, so vertex deduplication is exact equality.
Irrational parameters (e.g. the golden ratio) are carried as high-precision
dyadic rationals with arithmetic re-rounded to a fixed grid; endpoints that
agree to within the carried precision are merged, endpoints that differ by
less than the dedup tolerance 1e-12 but more than the precision floor raise
:class:`ToleranceCollisionError`.

Diagram construction is sequential; the resulting diagram is immutable and
safe to query concurrently.
"""

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

from .words import Alphabet, Word, LanguageOracle
from .errors import (InvalidSpecError, NoComponentError,
                     ToleranceCollisionError, TruncationIncompleteWarning)
from .graphs import EdgeGraph, Edge, perron_value

DEDUP_TOLERANCE = Fraction(1, 10 ** 12)


def golden_ratio(bits: int = 200) -> Fraction:
    """(1 + sqrt(5)) / 2 as a dyadic rational with ``bits`` fractional bits."""
    root5 = math.isqrt(5 << (2 * bits))
    return Fraction((1 << bits) + root5, 1 << (bits + 1))


@dataclass(frozen=True)
class Branch:
    lo: Fraction
    hi: Fraction
    slope: Fraction
    intercept: Fraction

    def apply(self, x: Fraction) -> Fraction:
        return self.slope * x + self.intercept

    def image(self) -> tuple[Fraction, Fraction]:
        a, b = self.apply(self.lo), self.apply(self.hi)
        return (a, b) if a <= b else (b, a)


class PiecewiseMonotoneMap:
    """Finitely many affine monotone branches covering [0,1].

    ``dyadic_bits`` switches interval arithmetic to fixed-precision dyadic
    rounding (for irrational parameters); ``None`` keeps exact rationals.
    """

    def __init__(self, branches: list[Branch], dyadic_bits: int | None = None,
                 label: str = ""):
        if not branches:
            raise InvalidSpecError("need at least one branch")
        branches = sorted(branches, key=lambda b: b.lo)
        if branches[0].lo != 0 or branches[-1].hi != 1:
            raise InvalidSpecError("branch domains must cover [0,1]")
        for prev, cur in zip(branches, branches[1:]):
            if prev.hi != cur.lo:
                raise InvalidSpecError("branch domains must abut")
        for b in branches:
            if b.slope == 0:
                raise InvalidSpecError("branch slope must be nonzero")
            if b.lo >= b.hi:
                raise InvalidSpecError("branch domain is degenerate")
            img = b.image()
            if img[0] < -DEDUP_TOLERANCE or img[1] > 1 + DEDUP_TOLERANCE:
                raise InvalidSpecError("branch image leaves [0,1]")
        self.branches = branches
        self.k = len(branches)
        self.dyadic_bits = dyadic_bits
        self.label = label or f"pwm({self.k} branches)"

    def _round(self, x: Fraction) -> Fraction:
        if self.dyadic_bits is None:
            return x
        scale = 1 << self.dyadic_bits
        num = x.numerator * scale
        den = x.denominator
        return Fraction((num + den // 2) // den, scale)

    def precision_floor(self) -> Fraction:
        """Merge threshold attributable to carried-precision rounding."""
        if self.dyadic_bits is None:
            return Fraction(0)
        return Fraction(1, 10 ** 30)

    def branch_of_interior(self, x: Fraction) -> int | None:
        """1-based branch index when x lies in a branch interior, else None."""
        for i, b in enumerate(self.branches):
            if b.lo < x < b.hi:
                return i + 1
        return None

    def branch_image(self, branch_index: int, lo: Fraction, hi: Fraction):
        b = self.branches[branch_index - 1]
        a, c = b.apply(lo), b.apply(hi)
        if a > c:
            a, c = c, a
        return self._round(a), self._round(c)


def alpha_beta_map(alpha, beta, dyadic_bits: int | None = None) -> PiecewiseMonotoneMap:
    """T(x) = beta*x + alpha mod 1 (alpha in [0,1), beta > 1)."""
    alpha, beta = Fraction(alpha), Fraction(beta)
    if not (0 <= alpha < 1) or beta <= 1:
        raise InvalidSpecError("need alpha in [0,1) and beta > 1")
    cuts = [Fraction(0)]
    i = 1
    while True:
        x = (i - alpha) / beta
        if x >= 1:
            break
        if x > 0:
            cuts.append(x)
        i += 1
    cuts.append(Fraction(1))
    branches = []
    for lo, hi in zip(cuts, cuts[1:]):
        mid = (lo + hi) / 2
        k = math.floor(beta * mid + alpha)
        branches.append(Branch(lo, hi, beta, alpha - k))
    return PiecewiseMonotoneMap(branches, dyadic_bits,
                                label=f"alphabeta(alpha={alpha}, beta={float(beta):.6g})")


def neg_beta_map(beta, dyadic_bits: int | None = None) -> PiecewiseMonotoneMap:
    """T(x) = -beta*x + floor(beta*x) + 1 (beta > 1); orientation reversing."""
    beta = Fraction(beta)
    if beta <= 1:
        raise InvalidSpecError("need beta > 1")
    cuts = [Fraction(0)]
    i = 1
    while True:
        x = Fraction(i) / beta
        if x >= 1:
            break
        cuts.append(x)
        i += 1
    cuts.append(Fraction(1))
    branches = []
    for idx, (lo, hi) in enumerate(zip(cuts, cuts[1:])):
        branches.append(Branch(lo, hi, -beta, Fraction(idx + 1)))
    return PiecewiseMonotoneMap(branches, dyadic_bits, label=f"negbeta({float(beta):.6g})")


def map_from_branch_table(rows, dyadic_bits: int | None = None) -> PiecewiseMonotoneMap:
    """Branches given as (lo, hi, slope, intercept) rows."""
    branches = [Branch(Fraction(lo), Fraction(hi), Fraction(s), Fraction(c))
                for lo, hi, s, c in rows]
    return PiecewiseMonotoneMap(branches, dyadic_bits)


def code_point(tmap: PiecewiseMonotoneMap, x, n: int) -> Word | None:
    """Itinerary of x under the first n iterates, or None (undefined) when
    some iterate hits a partition endpoint."""
    if n < 1:
        raise InvalidSpecError("need n >= 1")
    x = Fraction(x)
    out = []
    for _ in range(n):
        j = tmap.branch_of_interior(x)
        if j is None:
            return None
        out.append(j)
        x = tmap.branches[j - 1].apply(x)
    return tuple(out)


# ---------------------------------------------------------------------------
# the Markov diagram
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiagramVertex:
    vid: int
    symbol: int
    lo: Fraction
    hi: Fraction
    depth: int          # recursion step at which the vertex first appeared


class MarkovDiagram:
    """Truncated follower-set diagram of a piecewise monotonic map."""

    def __init__(self, tmap, vertices, edges, depth, complete):
        self.tmap = tmap
        self.vertices: list[DiagramVertex] = vertices
        self.edges: list[tuple[int, int, int]] = edges   # (src, label, dst)
        self.depth = depth
        self.complete = complete
        self._succ = {}
        for src, label, dst in edges:
            self._succ[(src, label)] = dst
        self._roots = {v.symbol: v.vid for v in vertices if v.depth == 0}

    def __repr__(self):
        return (f"MarkovDiagram({self.tmap.label}, vertices={len(self.vertices)}, "
                f"depth={self.depth}, complete={self.complete})")

    def successor(self, vid: int, label: int) -> int | None:
        return self._succ.get((vid, label))

    def vertex_graph(self) -> EdgeGraph:
        edges = [Edge(src, dst, label=label) for src, label, dst in self.edges]
        return EdgeGraph(len(self.vertices), edges)

    def vertices_up_to(self, depth_cut: int) -> frozenset[int]:
        return frozenset(v.vid for v in self.vertices if v.depth <= depth_cut)

    def language(self, horizon: int | None = None) -> "DiagramLanguage":
        return DiagramLanguage(self, horizon)


def build_diagram(tmap: PiecewiseMonotoneMap, max_depth: int) -> MarkovDiagram:
    """Run the successor recursion D_{n+1} = D_n + successors(D_n) for at most
    ``max_depth`` steps, deduplicating vertices by interval identity."""
    if max_depth < 0:
        raise InvalidSpecError("max_depth must be >= 0")
    floor_eps = tmap.precision_floor()
    vertices: list[DiagramVertex] = []
    by_symbol: dict[int, list[int]] = {}
    edges: list[tuple[int, int, int]] = []

    dyadic = floor_eps > 0

    def find_or_add(symbol, lo, hi, depth):
        for vid in by_symbol.get(symbol, ()):
            v = vertices[vid]
            gap = max(abs(v.lo - lo), abs(v.hi - hi))
            if gap <= floor_eps:
                return vid, False
            # in exact mode distinct rationals are provably distinct; in
            # dyadic mode a sub-tolerance gap above the precision floor is
            # genuinely ambiguous
            if dyadic and gap < DEDUP_TOLERANCE:
                raise ToleranceCollisionError(
                    f"vertex intervals differ by {float(gap):.3e}, below the dedup "
                    f"tolerance but above the carried precision")
        vid = len(vertices)
        vertices.append(DiagramVertex(vid, symbol, lo, hi, depth))
        by_symbol.setdefault(symbol, []).append(vid)
        return vid, True

    for i, b in enumerate(tmap.branches, start=1):
        find_or_add(i, b.lo, b.hi, 0)
    frontier = list(range(len(vertices)))

    complete = False
    depth_reached = max_depth
    for step in range(1, max_depth + 1):
        new_frontier = []
        for vid in frontier:
            v = vertices[vid]
            img_lo, img_hi = tmap.branch_image(v.symbol, v.lo, v.hi)
            for j, b in enumerate(tmap.branches, start=1):
                lo = max(img_lo, b.lo)
                hi = min(img_hi, b.hi)
                width = hi - lo
                if width <= floor_eps:
                    continue
                if dyadic and width < DEDUP_TOLERANCE:
                    raise ToleranceCollisionError(
                        f"successor interval width {float(width):.3e} is ambiguous")
                dst, added = find_or_add(j, lo, hi, step)
                edges.append((vid, j, dst))
                if added:
                    new_frontier.append(dst)
        if not new_frontier:
            complete, depth_reached = True, step
            break
        frontier = new_frontier
    return MarkovDiagram(tmap, vertices, edges, depth_reached, complete)


class DiagramLanguage(LanguageOracle):
    """Language read along diagram paths starting in D_0.

    The diagram is right-resolving (at most one successor per symbol), so
    the follower automaton is a DFA on vertex ids.  For an incomplete
    diagram the language is exact up to ``depth + 1`` only.
    """

    _INIT = ("init",)

    def __init__(self, diagram: MarkovDiagram, horizon: int | None = None):
        exact_limit = None if diagram.complete else diagram.depth + 1
        if horizon is None:
            horizon = 64 if exact_limit is None else exact_limit
        if exact_limit is not None and horizon > exact_limit:
            raise InvalidSpecError(
                f"incomplete diagram is only exact up to length {exact_limit}")
        super().__init__(Alphabet(diagram.tmap.k), horizon)
        self.diagram = diagram

    def initial_state(self):
        return self._INIT

    def step(self, state, symbol):
        if state is self._INIT or state == self._INIT:
            return self.diagram._roots.get(symbol)
        return self.diagram.successor(state, symbol)


def direct_language_member(tmap: PiecewiseMonotoneMap, w: Word) -> bool:
    """Independent membership test by interval iteration: w is admissible iff
    the set of points whose first |w| iterates stay in the prescribed branch
    interiors is a nondegenerate interval."""
    if not w:
        return True
    floor_eps = tmap.precision_floor()
    cur = tmap.branches[w[0] - 1]
    lo, hi = cur.lo, cur.hi
    sym = w[0]
    for s in w[1:]:
        img_lo, img_hi = tmap.branch_image(sym, lo, hi)
        nxt = tmap.branches[s - 1]
        lo, hi = max(img_lo, nxt.lo), min(img_hi, nxt.hi)
        if hi - lo <= floor_eps:
            return False
        sym = s
    return True


class ClosedComponent:
    """A successor-closed strongly connected vertex set with its Perron data."""

    def __init__(self, vertex_ids: frozenset[int], perron: float,
                 bracket: tuple[float, float], certified_closed: bool):
        self.vertex_ids = vertex_ids
        self.perron = perron
        self.bracket = bracket
        self.certified_closed = certified_closed

    def __repr__(self):
        return (f"ClosedComponent(size={len(self.vertex_ids)}, "
                f"perron={self.perron:.6f}, closed={self.certified_closed})")


def closed_component(diagram: MarkovDiagram) -> ClosedComponent:
    """Perron-maximal strongly connected component that is successor-closed
    within the truncated diagram (Lemma 4.2 witness).

    At a finite truncation closedness cannot be certified for components
    touching the frontier; such components are flagged, not rejected.
    """
    graph = diagram.vertex_graph()
    if not diagram.vertices:
        raise NoComponentError("empty diagram")
    frontier_depth = diagram.depth if not diagram.complete else None
    best = None
    for comp in graph.strongly_connected_components():
        cset = set(comp)
        internal = [e for e in graph.edges if e.src in cset and e.dst in cset]
        if not internal:
            continue
        if not graph.component_is_closed(comp):
            continue
        sub, _ = graph.subgraph(comp)
        rho, lo, hi, _, _ = perron_value(sub)
        if best is None or rho > best[1]:
            best = (comp, rho, (lo, hi))
    if best is None:
        raise NoComponentError("no successor-closed component with a cycle")
    comp, rho, bracket = best
    touches_frontier = (frontier_depth is not None and
                        any(diagram.vertices[v].depth >= frontier_depth for v in comp))
    return ClosedComponent(frozenset(comp), math.log(rho) if rho > 0 else 0.0,
                           (math.log(bracket[0]) if bracket[0] > 0 else float("-inf"),
                            math.log(bracket[1]) if bracket[1] > 0 else float("-inf")),
                           certified_closed=not touches_frontier)


def diagram_decomposition(diagram: MarkovDiagram, component: ClosedComponent,
                          depth_cut: int):
    """Proposition 4.1-style decomposition with empty prefixes: cores are
    path words with both endpoint vertices in D_N ∩ C, suffixes are path
    words through C \\ D_N.  Imported lazily to avoid a module cycle."""
    from .decomp import HofbauerDecomposition

    if depth_cut > diagram.depth:
        raise InvalidSpecError("depth cut exceeds the diagram depth")
    if not diagram.complete:
        warnings.warn("diagram is truncated; decomposition carries a caveat",
                      TruncationIncompleteWarning, stacklevel=2)
    return HofbauerDecomposition(diagram, component, depth_cut)
