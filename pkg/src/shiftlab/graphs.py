"""Finite directed multigraphs shared by the entropy, thermodynamics and
optimization modules: block-graph presentations of languages, strongly
connected components, and certified spectral radii via power iteration with
Collatz-Wielandt brackets.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .words import Word, LanguageOracle
from .errors import NonConvergenceError, NoCycleError

MAX_POWER_ITERATIONS = 10 ** 6


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    label: int | None = None      # symbol read along the edge
    weight: object = 0.0          # float or Fraction
    word: Word | None = None      # block word of the edge, when built from a language


class EdgeGraph:
    """Vertices 0..n-1 with labeled, weighted parallel edges."""

    def __init__(self, n_vertices: int, edges, state_words=None):
        self.n = n_vertices
        self.edges = list(edges)
        self.state_words = state_words  # optional Word per vertex
        self.out = [[] for _ in range(n_vertices)]
        for idx, e in enumerate(self.edges):
            if not (0 <= e.src < n_vertices and 0 <= e.dst < n_vertices):
                raise ValueError("edge endpoint out of range")
            self.out[e.src].append(idx)

    def __repr__(self):
        return f"EdgeGraph(n={self.n}, edges={len(self.edges)})"

    def adjacency_counts(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for e in self.edges:
            a[e.src, e.dst] += 1.0
        return a

    def weighted_matrix(self, weight_of) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for e in self.edges:
            a[e.src, e.dst] += weight_of(e)
        return a

    def strongly_connected_components(self) -> list[list[int]]:
        if self.n == 0:
            return []
        rows = [e.src for e in self.edges] or [0]
        cols = [e.dst for e in self.edges] or [0]
        data = [1] * len(rows)
        mat = csr_matrix((data, (rows, cols)), shape=(self.n, self.n))
        n_comp, labels = connected_components(mat, directed=True, connection="strong")
        comps: list[list[int]] = [[] for _ in range(n_comp)]
        for v, lab in enumerate(labels):
            comps[lab].append(v)
        return comps

    def component_is_closed(self, comp) -> bool:
        """No edge leaves the vertex set (sink in the condensation)."""
        cset = set(comp)
        return all(e.dst in cset for e in self.edges if e.src in cset)

    def subgraph(self, vertices) -> tuple["EdgeGraph", dict[int, int]]:
        vmap = {v: i for i, v in enumerate(sorted(vertices))}
        edges = [Edge(vmap[e.src], vmap[e.dst], e.label, e.weight, e.word)
                 for e in self.edges if e.src in vmap and e.dst in vmap]
        words = None
        if self.state_words is not None:
            words = [self.state_words[v] for v in sorted(vertices)]
        return EdgeGraph(len(vmap), edges, words), vmap

    def is_irreducible(self) -> bool:
        comps = self.strongly_connected_components()
        if len(comps) != 1:
            return False
        # a single vertex must carry a self-loop to count as irreducible
        return bool(self.edges) if self.n == 1 else True


def block_graph(lang: LanguageOracle, k: int) -> EdgeGraph:
    """k-block presentation: vertices are the length-k members, one edge per
    member of length k+1.  Exact presentation of the language when the shift
    is an SFT of memory <= k+1; an over-approximation otherwise.
    """
    states = lang.enumerate_words(k)
    index = {w: i for i, w in enumerate(states)}
    edges = []
    for w in lang.iter_words(k + 1):
        edges.append(Edge(index[w[:k]], index[w[1:]], label=w[-1], word=w))
    return EdgeGraph(len(states), edges, state_words=states)


def certified_spectral_radius(matrix: np.ndarray, tol: float = 1e-12):
    """Spectral radius of a non-negative irreducible matrix with certified
    Collatz-Wielandt brackets, computed on the primitive shift ``I + M``.

    Returns ``(rho, lower, upper, right_vector)``.
    """
    n = matrix.shape[0]
    if n == 1:
        v = float(matrix[0, 0])
        return v, v, v, np.ones(1)
    shifted = matrix + np.eye(n)
    x = np.ones(n) / n
    lo_best, hi_best = 0.0, float("inf")
    for _ in range(MAX_POWER_ITERATIONS):
        y = shifted @ x
        ratios = y / x
        lo, hi = float(ratios.min()), float(ratios.max())
        lo_best = max(lo_best, lo)
        hi_best = min(hi_best, hi)
        if hi_best - lo_best <= tol * max(hi_best, 1.0):
            rho = 0.5 * (lo_best + hi_best) - 1.0
            return max(rho, 0.0), max(lo_best - 1.0, 0.0), hi_best - 1.0, x / x.sum()
        x = y / y.sum()
    raise NonConvergenceError("power iteration did not certify the spectral radius")


def perron_value(graph: EdgeGraph, weight_of=None, tol: float = 1e-12):
    """Max spectral radius over strongly connected components.

    Returns ``(rho, lower, upper, component_vertices, acyclic_flag)`` where
    the flag is True when the graph has no cycle at all (radius 0).
    """
    if graph.n == 0 or not graph.edges:
        return 0.0, 0.0, 0.0, [], True
    if weight_of is None:
        weight_of = lambda e: 1.0
    best = None
    for comp in graph.strongly_connected_components():
        cset = set(comp)
        internal = [e for e in graph.edges if e.src in cset and e.dst in cset]
        if not internal:
            continue
        sub, vmap = graph.subgraph(comp)
        mat = sub.weighted_matrix(weight_of)
        rho, lo, hi, _ = certified_spectral_radius(mat, tol)
        if best is None or rho > best[0]:
            best = (rho, lo, hi, comp)
    if best is None:
        return 0.0, 0.0, 0.0, [], True
    rho, lo, hi, comp = best
    return rho, lo, hi, comp, False


def require_cycle(graph: EdgeGraph):
    _, _, _, comp, acyclic = perron_value(graph)
    if acyclic:
        raise NoCycleError("graph is acyclic")
    return comp


def simple_cycles(graph: EdgeGraph, max_len: int | None = None):
    """Yield vertex-simple cycles as edge-index sequences.  Each cycle is
    produced once, rooted at its smallest vertex.  Exponential; intended for
    small oracle graphs."""
    if max_len is None:
        max_len = graph.n
    for root in range(graph.n):
        stack = [(root, [])]
        while stack:
            v, path = stack.pop()
            for eidx in graph.out[v]:
                e = graph.edges[eidx]
                if e.dst == root:
                    yield path + [eidx]
                elif e.dst > root and len(path) + 1 < max_len:
                    if all(graph.edges[i].dst != e.dst for i in path):
                        stack.append((e.dst, path + [eidx]))


def cycle_mean(graph: EdgeGraph, cycle_edges, weight_of=None):
    if weight_of is None:
        weight_of = lambda e: e.weight
    total = sum(weight_of(graph.edges[i]) for i in cycle_edges)
    if isinstance(total, Fraction):
        return total / len(cycle_edges)
    return total / float(len(cycle_edges))
