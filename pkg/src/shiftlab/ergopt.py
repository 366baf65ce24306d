"""Ergodic optimization on SFT approximations: maximal ergodic averages via
Karp's maximum-mean-cycle algorithm, maximizing cycle measures, typical-word
selection, the word-gluing subshift constructions, and truncated distance
potentials.

For locally constant functions on an SFT the maximal ergodic average equals
the maximum mean-weight cycle of the block graph; that identity is the
module's foundation (standard fact, independent of any particular source).
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .words import Word, EMPTY_WORD, Alphabet, LanguageOracle
from .graphs import EdgeGraph, Edge, simple_cycles, cycle_mean, perron_value
from .thermo import (LocallyConstantPotential, MarkovMeasure,
                     edge_potential_values, zero_temperature_path)
from .entropy import EntropyEstimate, perron_entropy
from .errors import (InvalidSpecError, NoCycleError, NoConnectorError,
                     EmptySelectionError, ReducibleError)


def _edge_weight_fn(graph: EdgeGraph, f: LocallyConstantPotential | None):
    if f is None:
        return lambda e: e.weight
    vals = edge_potential_values(graph, f)
    # Fraction(float) is exact, so rational cycle means stay exact
    exact = {id(e): Fraction(float(v)) for e, v in zip(graph.edges, vals)}
    return lambda e: exact[id(e)]


@dataclass
class CycleMeasure:
    """Periodic-orbit measure supported on one cycle of the graph."""

    cycle_edges: list[int]
    mean: object                   # Fraction or float
    graph: EdgeGraph = field(repr=False)

    def length(self) -> int:
        return len(self.cycle_edges)

    def word(self) -> Word:
        labels = []
        for eidx in self.cycle_edges:
            e = self.graph.edges[eidx]
            labels.append(e.label if e.label is not None else e.word[-1])
        return tuple(labels)

    def measure(self) -> MarkovMeasure:
        """Shift-invariant measure of the periodic orbit (entropy 0)."""
        probs = np.zeros(len(self.graph.edges))
        stationary = np.zeros(self.graph.n)
        for eidx in self.cycle_edges:
            probs[eidx] = 1.0
            stationary[self.graph.edges[eidx].src] += 1.0 / len(self.cycle_edges)
        return MarkovMeasure(self.graph, probs, stationary)


def brute_force_max_cycle(graph: EdgeGraph, f: LocallyConstantPotential | None = None):
    """Exhaustive maximum over vertex-simple cycles; oracle for Karp."""
    weight_of = _edge_weight_fn(graph, f)
    best = None
    for cyc in simple_cycles(graph):
        mean = cycle_mean(graph, cyc, weight_of)
        if best is None or mean > best[0]:
            best = (mean, cyc)
    if best is None:
        raise NoCycleError("graph has no cycle")
    return best


def max_ergodic_average(graph: EdgeGraph, f: LocallyConstantPotential | None = None
                        ) -> dict:
    """Maximum mean-weight cycle by Karp's algorithm; equals the maximal
    ergodic average of f on the SFT for locally constant f.

    Returns {"value", "cycle"} where the cycle is an optimal
    :class:`CycleMeasure` (lexicographically least edge word of minimal
    length among optimal cycles for graphs small enough to enumerate).
    """
    weight_of = _edge_weight_fn(graph, f)
    value = _karp_value(graph, weight_of)
    cycle = _optimal_cycle(graph, weight_of, value)
    return {"value": value, "cycle": CycleMeasure(cycle, value, graph)}


def _karp_value(graph: EdgeGraph, weight_of):
    n = graph.n
    if not graph.edges:
        raise NoCycleError("graph has no edges")
    zero = Fraction(0)
    neg_inf = None
    # d[k][v] = max weight of a k-edge walk ending at v (from any start)
    prev = [zero] * n
    table = [list(prev)]
    for _ in range(n):
        cur = [neg_inf] * n
        for eidx, e in enumerate(graph.edges):
            w = prev[e.src]
            if w is None:
                continue
            cand = w + weight_of(e)
            if cur[e.dst] is None or cand > cur[e.dst]:
                cur[e.dst] = cand
        table.append(cur)
        prev = cur
    best = None
    for v in range(n):
        if table[n][v] is None:
            continue
        worst = None
        for k in range(n):
            if table[k][v] is None:
                continue
            mean = (table[n][v] - table[k][v]) / (n - k)
            if worst is None or mean < worst:
                worst = mean
        if worst is not None and (best is None or worst > best):
            best = worst
    if best is None:
        raise NoCycleError("graph has no cycle")
    return best


def _optimal_cycle(graph: EdgeGraph, weight_of, value):
    """An optimal cycle: exhaustive with full tie-break on small graphs,
    otherwise any cycle of the tight subgraph of reduced weights."""
    if graph.n <= 10:
        best = None
        for cyc in simple_cycles(graph):
            if cycle_mean(graph, cyc, weight_of) != value:
                continue
            labels = tuple(
                (graph.edges[i].label if graph.edges[i].label is not None else 0)
                for i in cyc)
            key = (len(cyc), labels, tuple(cyc))
            if best is None or key < best[0]:
                best = (key, cyc)
        if best is None:
            raise NoCycleError("no cycle attains the Karp value")
        return best[1]
    return _tight_subgraph_cycle(graph, weight_of, value)


def _tight_subgraph_cycle(graph: EdgeGraph, weight_of, value):
    # longest-path potentials for reduced weights w - value (no positive cycles)
    n = graph.n
    exact = isinstance(value, Fraction)
    slack = Fraction(0) if exact else 1e-15
    pot = [Fraction(0) if exact else 0.0] * n
    for _ in range(n + 1):
        changed = False
        for e in graph.edges:
            cand = pot[e.src] + weight_of(e) - value
            if cand > pot[e.dst] + slack:
                pot[e.dst] = cand
                changed = True
        if not changed:
            break
    if exact:
        tight = [i for i, e in enumerate(graph.edges)
                 if pot[e.src] + weight_of(e) - value == pot[e.dst]]
    else:
        tight = [i for i, e in enumerate(graph.edges)
                 if abs(pot[e.src] + weight_of(e) - value - pot[e.dst]) <= 1e-12]
    sub_edges = {i: graph.edges[i] for i in tight}
    succ: dict[int, list[int]] = {}
    for i, e in sub_edges.items():
        succ.setdefault(e.src, []).append(i)
    # walk the tight subgraph until a vertex repeats
    start = next(iter(sub_edges.values())).src
    seen = {start: 0}
    path = []
    v = start
    while True:
        eidx = succ[v][0]
        path.append(eidx)
        v = graph.edges[eidx].dst
        if v in seen:
            return path[seen[v]:]
        seen[v] = len(path)


# ---------------------------------------------------------------------------
# typical-word selection
# ---------------------------------------------------------------------------

@dataclass
class TypicalWordSet:
    k: int
    words: list[Word]
    epsilon: float
    entropy: float
    count: int
    selected_mass: float
    count_window: tuple[float, float]
    window_satisfied: bool
    means: dict = field(default_factory=dict)

    def is_empty(self) -> bool:
        return self.count == 0


def select_typical_words(measure: MarkovMeasure, fs, epsilon: float, k: int,
                         lang: LanguageOracle | None = None,
                         count_only: bool = False) -> TypicalWordSet:
    """Length-k words whose exact cylinder mass lies in the entropy window
    e^{-k(h+eps)} <= mu([w]) <= e^{-k(h-eps)} and whose Birkhoff averages of
    every supplied potential stay within eps/2 of the space average, over
    every point of the cylinder.

    The count window is reported with mu(Sigma_0) replaced by the achieved
    selected mass.  An empty selection is reported, not fatal.
    """
    if epsilon <= 0:
        raise InvalidSpecError("epsilon must be positive")
    if measure.graph.n > 1 and not measure.graph.is_irreducible():
        raise ReducibleError("typical-word selection needs an ergodic measure")
    h = measure.entropy()
    lo_mass = math.exp(-k * (h + epsilon))
    hi_mass = math.exp(-k * (h - epsilon))
    integrals = [measure.expectation(f) for f in fs]
    kept: list[Word] = []
    kept_mass = 0.0
    count = 0
    words = lang.iter_words(k) if lang is not None else _graph_words(measure, k)
    for w in words:
        mass = measure.cylinder_mass(w)
        if not (lo_mass <= mass <= hi_mass):
            continue
        ok = True
        for f, avg in zip(fs, integrals):
            lo_b, hi_b = _birkhoff_range(measure, w, f)
            if max(abs(lo_b / k - avg), abs(hi_b / k - avg)) >= epsilon / 2:
                ok = False
                break
        if ok:
            count += 1
            kept_mass += mass
            if not count_only:
                kept.append(w)
    window = (kept_mass * math.exp((h - epsilon) * k), math.exp((h + epsilon) * k))
    ws = TypicalWordSet(
        k=k, words=kept, epsilon=epsilon, entropy=h, count=count,
        selected_mass=kept_mass, count_window=window,
        window_satisfied=window[0] <= count <= window[1],
        means={i: v for i, v in enumerate(integrals)},
    )
    return ws


def _graph_words(measure: MarkovMeasure, k: int):
    """Words of length k read along the measure's block graph."""
    graph = measure.graph
    block = measure.block_length()
    if block == 0:
        raise InvalidSpecError("measure graph carries no block words")
    out = set()
    for start, state_word in enumerate(graph.state_words):
        stack = [(start, state_word)]
        while stack:
            v, w = stack.pop()
            if len(w) >= k:
                out.add(w[:k])
                continue
            for eidx in graph.out[v]:
                e = graph.edges[eidx]
                stack.append((e.dst, w + (e.word[-1],)))
    return sorted(out)


def _birkhoff_range(measure: MarkovMeasure, w: Word, f: LocallyConstantPotential):
    """[min, max] over x in [w] of S_k f(x) (trailing windows maximized and
    minimized over legal extensions)."""
    n = len(w)
    ext = f.r - 1
    head = sum(f.table[w[i:i + f.r]] for i in range(n - f.r + 1)) if n >= f.r else 0.0
    if ext == 0:
        return head, head
    graph = measure.graph
    k = measure.block_length()
    index, _ = measure._tables()
    state = index.get(w[-k:])
    if state is None:
        raise InvalidSpecError("word leaves the measure's block graph")
    lo, hi = math.inf, -math.inf

    def rec(word, st, remaining):
        nonlocal lo, hi
        if remaining == 0:
            tail = sum(f.table[word[i:i + f.r]] for i in range(max(n - f.r + 1, 0), n))
            lo, hi = min(lo, head + tail), max(hi, head + tail)
            return
        for eidx in graph.out[st]:
            e = graph.edges[eidx]
            rec(word + (e.word[-1],), e.dst, remaining - 1)

    rec(w, state, ext)
    return lo, hi


# ---------------------------------------------------------------------------
# gluing constructions
# ---------------------------------------------------------------------------

class GluedShift(LanguageOracle):
    """Sofic sub-language generated by alternate concatenations of the given
    words with connectors of length <= t, intersected with the ambient
    language.  ``presentation_graph`` exposes the right-resolving
    presentation whose Perron value is the exact entropy of the glued
    subshift."""

    def __init__(self, blocks: list[Word], connectors: dict, ambient: LanguageOracle,
                 horizon: int | None = None):
        super().__init__(ambient.alphabet,
                         ambient.horizon if horizon is None else horizon)
        self.ambient = ambient
        self.blocks = blocks
        # nodes: (block index, position) for 0 <= position < len(block); the
        # state after reading block i fans out through each connector word
        nodes = {}
        for i, b in enumerate(blocks):
            for p in range(len(b)):
                nodes[(i, p)] = len(nodes)
        conn_nodes = {}
        edges = []
        for i, b in enumerate(blocks):
            for p in range(len(b) - 1):
                edges.append(Edge(nodes[(i, p)], nodes[(i, p + 1)], label=b[p + 1]))
        for (i, j), conn_words in connectors.items():
            src_last = nodes[(i, len(blocks[i]) - 1)]
            dst_first = nodes[(j, 0)]
            for w in conn_words:
                prev = src_last
                for q, s in enumerate(w):
                    key = (i, j, w, q)
                    if key not in conn_nodes:
                        conn_nodes[key] = len(nodes) + len(conn_nodes)
                    cur = conn_nodes[key]
                    edges.append(Edge(prev, cur, label=s))
                    prev = cur
                edges.append(Edge(prev, dst_first, label=blocks[j][0]))
        self.presentation_graph = EdgeGraph(len(nodes) + len(conn_nodes), edges)
        self._by_label: dict[int, list] = {}
        for e in self.presentation_graph.edges:
            self._by_label.setdefault(e.label, []).append(e)

    def initial_state(self):
        return (frozenset(range(self.presentation_graph.n)),
                self.ambient.initial_state())

    def step(self, state, symbol):
        node_set, amb = state
        amb2 = self.ambient.step(amb, symbol)
        if amb2 is None:
            return None
        nxt = frozenset(e.dst for e in self._by_label.get(symbol, ())
                        if e.src in node_set)
        if not nxt:
            return None
        return (nxt, amb2)


def glue_subshift(words, lang: LanguageOracle, t: int,
                  horizon: int | None = None) -> GluedShift:
    """Oracle for the subshift of alternate concatenations of ``words`` (a
    TypicalWordSet, a list, or a single word) with legal connectors of
    length <= t inside ``lang``.  Raises :class:`NoConnectorError` with the
    offending pair when some ordered pair cannot be glued."""
    if isinstance(words, TypicalWordSet):
        blocks = list(words.words)
    elif isinstance(words, tuple) and words and isinstance(words[0], int):
        blocks = [words]
    else:
        blocks = [tuple(w) for w in words]
    if not blocks or any(len(b) == 0 for b in blocks):
        raise InvalidSpecError("need non-empty words to glue")
    symbols = list(lang.alphabet.symbols())
    connectors: dict = {}
    for i, b1 in enumerate(blocks):
        state = lang.right_state(b1)
        if state is None:
            raise InvalidSpecError(f"word {b1} is not in the ambient language")
        for j, b2 in enumerate(blocks):
            found = []
            frontier = [(EMPTY_WORD, state)]
            for length in range(0, t + 1):
                nxt = []
                for w, st in frontier:
                    ok_state = st
                    good = True
                    for s in b2:
                        ok_state = lang.step(ok_state, s)
                        if ok_state is None:
                            good = False
                            break
                    if good:
                        found.append(w)
                    if length < t:
                        for s in symbols:
                            st2 = lang.step(st, s)
                            if st2 is not None:
                                nxt.append((w + (s,), st2))
                frontier = nxt
            if not found:
                raise NoConnectorError(f"no connector of length <= {t} glues "
                                       f"{b1} to {b2}")
            connectors[(i, j)] = found
    return GluedShift(blocks, connectors, lang, horizon)


def glued_entropy(glued: GluedShift, tol: float = 1e-12) -> EntropyEstimate:
    """Exact entropy of the glued subshift: Perron value of its presentation."""
    return perron_entropy(glued.presentation_graph, tol)


# ---------------------------------------------------------------------------
# distance potential
# ---------------------------------------------------------------------------

def distance_potential(target: LanguageOracle, ambient: LanguageOracle,
                       m: int) -> LocallyConstantPotential:
    """Depth-m truncation of f(x) = -min d(x, y) over target points, with the
    one-sided metric d(x, y) = 2^{-min{i >= 0 : x_i != y_i}}.

    On the cylinder of a length-m word w the value is 0 when w is a target
    word and -2^{-j(w)} otherwise, where j(w) is the longest target-member
    prefix of w; f <= 0 with equality exactly on target cylinders.
    """
    target._check_length(m)
    ambient._check_length(m)
    table = {}
    for w in ambient.iter_words(m):
        if target.is_word(w):
            table[w] = 0.0
        else:
            j = 0
            state = target.initial_state()
            for s in w:
                state = target.step(state, s)
                if state is None:
                    break
                j += 1
            table[w] = -(2.0 ** (-j))
    return LocallyConstantPotential(m, table)


# ---------------------------------------------------------------------------
# zero-temperature / maximizing-measure profile
# ---------------------------------------------------------------------------

def optimal_subgraph(graph: EdgeGraph, f: LocallyConstantPotential | None,
                     value) -> EdgeGraph:
    """Union of all vertex-simple cycles of mean weight equal to ``value``
    (brute force; intended for graphs of at most ~10 vertices)."""
    weight_of = _edge_weight_fn(graph, f)
    edges = set()
    for cyc in simple_cycles(graph):
        if cycle_mean(graph, cyc, weight_of) == value:
            edges.update(cyc)
    kept = [graph.edges[i] for i in sorted(edges)]
    return EdgeGraph(graph.n, kept, graph.state_words)


def maximizer_entropy_profile(graph: EdgeGraph, f: LocallyConstantPotential,
                              betas) -> dict:
    """Zero-temperature diagnostics against the maximizing-cycle data:
    integral of f along the schedule versus the Karp value, the entropy
    trend, and (for small graphs) the Perron entropy of the subgraph of
    optimal cycles, which the limit entropy should attain."""
    top = max_ergodic_average(graph, f)
    path = zero_temperature_path(graph, f, betas)
    report = {
        "max_average": float(top["value"]),
        "cycle_word": top["cycle"].word(),
        "path": [p.to_dict() for p in path],
        "final_entropy": path[-1].entropy,
        "integral_gaps": [float(top["value"]) - p.integral for p in path],
    }
    if graph.n <= 10:
        sub = optimal_subgraph(graph, f, top["value"])
        report["optimal_subgraph_edges"] = len(sub.edges)
        report["optimal_subgraph_entropy"] = perron_entropy(sub).value
    return report
