"""Thermodynamic formalism at SFT scale: partition sums, pressure via
transfer matrices, Gibbs-Markov equilibrium measures from left/right Perron
eigenvectors, measure entropy, weak-Gibbs ratio audits, and finite
zero-temperature schedules.

Large inverse temperatures are handled by shifting the potential maximum out
of the exponential, so transfer weights stay in [0, 1]; power iterations run
on the primitive shift I + M, which converges for periodic graphs too.
"""

import math
from dataclasses import dataclass

import numpy as np

from .words import Word, LanguageOracle, format_word
from .graphs import EdgeGraph, certified_spectral_radius, perron_value
from .errors import InvalidSpecError, NoCycleError, ReducibleError

STATIONARITY_TOL = 1e-12


@dataclass(frozen=True)
class LocallyConstantPotential:
    """Real function depending on the first ``r`` coordinates, tabulated on
    the length-r words of the underlying language."""

    r: int
    table: dict  # Word -> float

    def __post_init__(self):
        if self.r < 1:
            raise InvalidSpecError("potential range must be >= 1")
        for w in self.table:
            if len(w) != self.r:
                raise InvalidSpecError("potential table keys must have length r")

    def value(self, word: Word) -> float:
        """Value on the cylinder of ``word`` (first r symbols are used)."""
        if len(word) < self.r:
            raise InvalidSpecError("word shorter than the potential range")
        return self.table[word[:self.r]]

    def birkhoff_sum(self, word: Word) -> float:
        """Sum of the potential over all full windows inside ``word``."""
        return sum(self.table[word[i:i + self.r]]
                   for i in range(len(word) - self.r + 1))

    @staticmethod
    def constant(c: float, r: int, lang: LanguageOracle) -> "LocallyConstantPotential":
        return LocallyConstantPotential(r, {w: c for w in lang.iter_words(r)})

    @staticmethod
    def from_file(path: str) -> "LocallyConstantPotential":
        table = {}
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                toks = line.split()
                table[tuple(int(t) for t in toks[:-1])] = float(toks[-1])
        if not table:
            raise InvalidSpecError("empty potential file")
        r = len(next(iter(table)))
        return LocallyConstantPotential(r, table)

    def to_file(self, path: str):
        with open(path, "w", encoding="utf-8") as fh:
            for w in sorted(self.table):
                fh.write(f"{format_word(w)} {self.table[w]!r}\n")


def edge_potential_values(graph: EdgeGraph, phi: LocallyConstantPotential) -> np.ndarray:
    """phi evaluated on each edge's block word (first r symbols)."""
    if graph.state_words is None:
        raise InvalidSpecError("graph must carry block words on its edges")
    k = len(graph.state_words[0]) if graph.state_words else 0
    if phi.r > k + 1:
        raise InvalidSpecError(
            f"potential range {phi.r} exceeds edge word length {k + 1}; "
            f"build the block graph with k >= r - 1")
    return np.array([phi.value(e.word) for e in graph.edges])


# ---------------------------------------------------------------------------
# Markov measures
# ---------------------------------------------------------------------------

class MarkovMeasure:
    """Stationary Markov chain on an SFT graph: per-edge transition
    probabilities plus the stationary row vector on vertices."""

    def __init__(self, graph: EdgeGraph, edge_probs, stationary):
        self.graph = graph
        self.edge_probs = np.asarray(edge_probs, dtype=float)
        self.stationary = np.asarray(stationary, dtype=float)
        res = self.stationarity_residual()
        if res > STATIONARITY_TOL:
            raise InvalidSpecError(f"stationarity residual {res:.2e} too large")
        self._index = None
        self._edge_lookup = None

    def stationarity_residual(self) -> float:
        flow = np.zeros(self.graph.n)
        for e, p in zip(self.graph.edges, self.edge_probs):
            flow[e.dst] += self.stationary[e.src] * p
        return float(np.abs(flow - self.stationary).max())

    def block_length(self) -> int:
        return len(self.graph.state_words[0]) if self.graph.state_words else 0

    def _tables(self):
        if self._index is None:
            self._index = {w: i for i, w in enumerate(self.graph.state_words)}
            lookup = {}
            for e, p in zip(self.graph.edges, self.edge_probs):
                key = (e.src, e.word)
                lookup[key] = lookup.get(key, 0.0) + float(p)
            self._edge_lookup = lookup
        return self._index, self._edge_lookup

    def cylinder_mass(self, word: Word) -> float:
        """Measure of the cylinder of ``word`` over the original alphabet."""
        k = self.block_length()
        if k == 0:
            raise InvalidSpecError("measure graph carries no block words")
        index, edge_lookup = self._tables()
        if len(word) <= k:
            return float(sum(self.stationary[i]
                             for w, i in index.items() if w[:len(word)] == word))
        state = index.get(word[:k])
        if state is None:
            return 0.0
        mass = float(self.stationary[state])
        for i in range(len(word) - k):
            block = word[i:i + k + 1]
            p = edge_lookup.get((state, block))
            if not p:
                return 0.0
            mass *= p
            state = index[block[1:]]
        return mass

    def entropy(self) -> float:
        h = 0.0
        for e, p in zip(self.graph.edges, self.edge_probs):
            if p > 0.0:
                h -= self.stationary[e.src] * p * math.log(p)
        return max(float(h), 0.0)

    def expectation(self, phi: LocallyConstantPotential) -> float:
        vals = edge_potential_values(self.graph, phi)
        return float(sum(self.stationary[e.src] * p * v
                         for e, p, v in zip(self.graph.edges, self.edge_probs, vals)))

    def transition_matrix(self) -> np.ndarray:
        trans = np.zeros((self.graph.n, self.graph.n))
        for e, p in zip(self.graph.edges, self.edge_probs):
            trans[e.src, e.dst] += p
        return trans


def measure_entropy(measure: MarkovMeasure) -> float:
    """Entropy rate -sum pi(src) p(e) log p(e); non-negative."""
    return measure.entropy()


# ---------------------------------------------------------------------------
# partition sums and pressure
# ---------------------------------------------------------------------------

def partition_sum(lang: LanguageOracle, collection, phi: LocallyConstantPotential,
                  n: int) -> float:
    """Lambda_n(D, phi) = sum over the length-n words of D of sup over the
    cylinder of exp(S_n phi); the sup is exact, maximizing the trailing
    windows over legal (r-1)-extensions."""
    lang._check_length(n + phi.r - 1)
    if callable(collection):
        words = collection(n)
    elif isinstance(collection, LanguageOracle):
        words = collection.iter_words(n)
    else:
        words = (w for w in collection if len(w) == n)
    return math.fsum(math.exp(sup_birkhoff(lang, w, phi)) for w in words)


def sup_birkhoff(lang: LanguageOracle, w: Word, phi: LocallyConstantPotential) -> float:
    """sup over the cylinder [w] of S_{|w|} phi, exact for locally constant
    potentials via legal right extensions."""
    n = len(w)
    ext = phi.r - 1
    if ext == 0:
        return phi.birkhoff_sum(w)
    state = lang.right_state(w)
    if state is None:
        raise InvalidSpecError(f"word {w} is not in the language")
    symbols = list(lang.alphabet.symbols())
    best = -math.inf

    def rec(word, st, remaining):
        nonlocal best
        if remaining == 0:
            total = sum(phi.table[word[i:i + phi.r]] for i in range(n))
            best = max(best, total)
            return
        for sym in symbols:
            st2 = lang.step(st, sym)
            if st2 is not None:
                rec(word + (sym,), st2, remaining - 1)

    rec(w, state, ext)
    if best == -math.inf:
        raise InvalidSpecError(f"word {w} has no legal extension of length {ext}")
    return best


@dataclass
class PressureReport:
    value: float
    method: str
    beta: float | None = None
    bracket: tuple[float, float] | None = None

    def to_dict(self) -> dict:
        out = {"value": self.value, "method": self.method}
        if self.beta is not None:
            out["beta"] = self.beta
        if self.bracket is not None:
            out["bracket_lo"], out["bracket_hi"] = self.bracket
        return out


def _edge_weights(graph: EdgeGraph, phi, beta):
    vals = edge_potential_values(graph, phi)
    shift = float(vals.max()) if len(vals) else 0.0
    weights = np.exp(beta * (vals - shift))
    return weights, shift


def pressure(graph: EdgeGraph, phi: LocallyConstantPotential, beta: float = 1.0,
             tol: float = 1e-12) -> PressureReport:
    """P(beta*phi) = log spectral radius of the transfer matrix, computed
    per strongly connected component so reducibility (e.g. from underflowed
    weights at extreme beta) stays certified."""
    if not graph.edges:
        raise NoCycleError("graph has no edges")
    _, shift = _edge_weights(graph, phi, beta)

    def weight_of(e):
        return math.exp(beta * (phi.value(e.word) - shift))

    rho, lo, hi, _, acyclic = perron_value(graph, weight_of, tol)
    if acyclic or rho <= 0.0:
        raise NoCycleError("transfer graph has no cycle of positive weight")
    return PressureReport(
        beta * shift + math.log(rho), "transfer-matrix", beta,
        (beta * shift + (math.log(lo) if lo > 0 else -math.inf),
         beta * shift + math.log(hi)))


def equilibrium_markov(graph: EdgeGraph, phi: LocallyConstantPotential,
                       beta: float = 1.0) -> MarkovMeasure:
    """Gibbs-Markov equilibrium of beta*phi: p(e) = w(e) r(dst)/(rho r(src)),
    stationary pi = l * r normalized; satisfies the variational identity
    h(mu) + beta * integral(phi) = P(beta phi) up to iteration tolerance.

    Raises :class:`ReducibleError` unless the positive-weight transfer graph
    is a single communicating class spanning all vertices.
    """
    weights, _ = _edge_weights(graph, phi, beta)
    keep = [i for i, w in enumerate(weights) if w > 0.0]
    pruned = len(keep) < len(graph.edges)
    work_graph = EdgeGraph(graph.n, [graph.edges[i] for i in keep],
                           graph.state_words) if pruned else graph
    if not work_graph.is_irreducible():
        raise ReducibleError(
            "transfer graph is not irreducible; restrict to one component")
    work_weights = weights[keep] if pruned else weights

    n = graph.n
    mat = np.zeros((n, n))
    for e, w in zip(work_graph.edges, work_weights):
        mat[e.src, e.dst] += w
    rho, _, _, right = certified_spectral_radius(mat, 1e-13)
    shifted = mat + np.eye(n)
    left = np.ones(n) / n
    right = np.asarray(right)
    for _ in range(500000):
        r_new = shifted @ right
        r_new /= r_new.sum()
        l_new = left @ shifted
        l_new /= l_new.sum()
        delta = max(np.abs(r_new - right).max(), np.abs(l_new - left).max())
        right, left = r_new, l_new
        if delta < 1e-16:
            break

    probs = np.array([w * right[e.dst] / (rho * right[e.src])
                      for e, w in zip(work_graph.edges, work_weights)])
    row_sum = np.zeros(n)
    for e, p in zip(work_graph.edges, probs):
        row_sum[e.src] += p
    probs = np.array([p / row_sum[e.src]
                      for e, p in zip(work_graph.edges, probs)])

    stationary = left * right
    stationary = stationary / stationary.sum()
    trans = np.zeros((n, n))
    for e, p in zip(work_graph.edges, probs):
        trans[e.src, e.dst] += p
    mix = 0.5 * (trans + np.eye(n))
    for _ in range(500000):
        nxt = stationary @ mix
        nxt /= nxt.sum()
        if np.abs(nxt - stationary).max() < 1e-17:
            stationary = nxt
            break
        stationary = nxt
    return MarkovMeasure(work_graph, probs, stationary)


def equilibrium_for_beta(graph: EdgeGraph, f: LocallyConstantPotential,
                         beta: float) -> MarkovMeasure:
    """Like :func:`equilibrium_markov` but, when extreme beta drives weights
    to numerical zero and disconnects the graph, restricts to the
    Perron-maximal successor-closed communicating class."""
    try:
        return equilibrium_markov(graph, f, beta)
    except ReducibleError:
        weights, shift = _edge_weights(graph, f, beta)
        keep = [i for i, w in enumerate(weights) if w > 0.0]
        positive = EdgeGraph(graph.n, [graph.edges[i] for i in keep],
                             graph.state_words)

        def weight_of(e):
            return math.exp(beta * (f.value(e.word) - shift))

        best = None
        for comp in positive.strongly_connected_components():
            cset = set(comp)
            if not any(e.src in cset and e.dst in cset for e in positive.edges):
                continue
            if not positive.component_is_closed(comp):
                continue
            sub, _ = positive.subgraph(comp)
            rho, _, _, _, _ = perron_value(sub, weight_of)
            if best is None or rho > best[0]:
                best = (rho, comp)
        if best is None:
            raise NoCycleError("no communicating class survives at this beta")
        sub, _ = positive.subgraph(best[1])
        return equilibrium_markov(sub, f, beta)


# ---------------------------------------------------------------------------
# weak-Gibbs audit
# ---------------------------------------------------------------------------

def weak_gibbs_audit(measure: MarkovMeasure, phi: LocallyConstantPotential,
                     beta: float, pressure_value: float, words,
                     lang: LanguageOracle | None = None) -> dict:
    """Extreme ratios mu([w]) / exp(-P n + sup_[w] S_n(beta phi)) over the
    supplied words, grouped by length so bounded-away-from-zero trends are
    visible.  ``lang`` supplies legal extensions for the trailing windows;
    it defaults to walking the measure's own block graph."""
    by_n: dict[int, list[float]] = {}
    for w in words:
        n = len(w)
        mass = measure.cylinder_mass(w)
        if mass <= 0.0:
            continue
        if lang is not None:
            sup = sup_birkhoff(lang, w, phi)
        else:
            sup = _sup_birkhoff_on_graph(measure, w, phi)
        ratio = mass / math.exp(-pressure_value * n + beta * sup)
        by_n.setdefault(n, []).append(ratio)
    flat = [r for rs in by_n.values() for r in rs]
    if not flat:
        raise InvalidSpecError("no supplied word has positive mass")
    return {
        "min_ratio": min(flat),
        "max_ratio": max(flat),
        "per_length": {n: (min(rs), max(rs)) for n, rs in sorted(by_n.items())},
    }


def _sup_birkhoff_on_graph(measure: MarkovMeasure, w: Word,
                           phi: LocallyConstantPotential) -> float:
    n = len(w)
    ext = phi.r - 1
    if ext == 0:
        return phi.birkhoff_sum(w)
    graph = measure.graph
    k = measure.block_length()
    if n < k:
        raise InvalidSpecError("word shorter than the block length")
    index, _ = measure._tables()
    state = index.get(w[-k:])
    if state is None:
        raise InvalidSpecError("word leaves the measure's block graph")
    best = -math.inf

    def rec(word, st, remaining):
        nonlocal best
        if remaining == 0:
            total = sum(phi.table[word[i:i + phi.r]] for i in range(n))
            best = max(best, total)
            return
        for eidx in graph.out[st]:
            e = graph.edges[eidx]
            rec(word + (e.word[-1],), e.dst, remaining - 1)

    rec(w, state, ext)
    return best


# ---------------------------------------------------------------------------
# zero-temperature schedules
# ---------------------------------------------------------------------------

@dataclass
class ZeroTempPoint:
    beta: float
    measure: MarkovMeasure
    entropy: float
    integral: float
    pressure: float

    def to_dict(self) -> dict:
        return {"beta": self.beta, "entropy": self.entropy,
                "integral": self.integral, "pressure": self.pressure}


def zero_temperature_path(graph: EdgeGraph, f: LocallyConstantPotential,
                          betas) -> list[ZeroTempPoint]:
    """Equilibrium states along an increasing finite beta schedule with the
    Lemma-style convergence diagnostics: integral of f (increasing toward
    the maximal ergodic average) and entropy trend."""
    betas = list(betas)
    if not betas or any(b2 <= b1 for b1, b2 in zip(betas, betas[1:])):
        raise InvalidSpecError("beta schedule must be finite and increasing")
    out = []
    for beta in betas:
        measure = equilibrium_for_beta(graph, f, beta)
        out.append(ZeroTempPoint(
            beta, measure, measure.entropy(), measure.expectation(f),
            pressure(graph, f, beta).value))
    return out


def geometric_schedule(start: float, factor: float, stop: float) -> list[float]:
    """start, start*factor, ... up to and including the last value <= stop."""
    if start <= 0 or factor <= 1 or stop < start:
        raise InvalidSpecError("need start > 0, factor > 1, stop >= start")
    out = [float(start)]
    while out[-1] * factor <= stop * (1 + 1e-12):
        out.append(out[-1] * factor)
    return out
