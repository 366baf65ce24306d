"""Language decompositions L = C^p G C^s: natural decompositions of coded
shifts, Hofbauer-diagram decompositions, fattened cores, (W)-specification
certificates, obstruction-entropy upper bounds, left/right constraints, and
the counting apparatus behind the positive-obstruction-entropy example
(A_n^k tables and the fiber-multiplicity report).
"""

import math
import random
from dataclasses import dataclass, field
from itertools import product

from .words import Word, EMPTY_WORD, LanguageOracle
from .shifts import GapShift, CodedShift, GapSetSpec
from .entropy import EntropyEstimate, growth_estimate_from_counts, generator_series
from .errors import (FactorizeIncompleteError, InvalidSpecError,
                     NotCodedError, HorizonExceededError)


class Decomposition:
    """Prefix/core/suffix membership oracles plus a deterministic factorizer.

    ``factorize(w)`` returns ``(p, c, s)`` with ``p + c + s == w`` and the
    three memberships; ties are broken by maximal core length, then minimal
    prefix length, which fixes the factorization once and for all.
    """

    kind = "abstract"

    def __init__(self, lang: LanguageOracle):
        self.lang = lang

    def prefix_member(self, w: Word) -> bool:
        raise NotImplementedError

    def core_member(self, w: Word) -> bool:
        raise NotImplementedError

    def suffix_member(self, w: Word) -> bool:
        raise NotImplementedError

    def factorize(self, w: Word) -> tuple[Word, Word, Word]:
        """Maximal-core, then minimal-prefix scan over all splits."""
        n = len(w)
        for core_len in range(n, -1, -1):
            for a in range(0, n - core_len + 1):
                p, c, s = w[:a], w[a:a + core_len], w[a + core_len:]
                if self.prefix_member(p) and self.core_member(c) and self.suffix_member(s):
                    return p, c, s
        raise FactorizeIncompleteError(f"cannot factor word {w}")

    # counting hooks; subclasses override with closed forms where available
    def count_prefix_words(self, n: int) -> int:
        return sum(1 for w in self.lang.iter_words(n) if self.prefix_member(w))

    def count_suffix_words(self, n: int) -> int:
        return sum(1 for w in self.lang.iter_words(n) if self.suffix_member(w))

    def count_obstruction_words(self, n: int) -> int:
        """#(C^p_n ∪ C^s_n), exact."""
        return sum(1 for w in self.lang.iter_words(n)
                   if self.prefix_member(w) or self.suffix_member(w))


# ---------------------------------------------------------------------------
# natural decompositions of coded shifts (n-dec)
# ---------------------------------------------------------------------------
#
# Prefixes are proper suffixes of generator words, cores are finite
# concatenations of generator words, suffixes are proper prefixes of
# generator words.  "Proper" (extracted only from generator words strictly
# longer than the fragment) matches the counts stated for S-gap shifts,
# where #C^p_n = 1 = #C^s_n for every n.


class GapNaturalDecomposition(Decomposition):
    """Natural decomposition of a (fat) S-gap shift, in closed form.

    C^p_n = {v1 : v in {2..N}^{n-1}} and C^s_n = {2..N}^n whenever S has an
    element >= n; cores are the concatenations g1 g1 ... g1 with all gaps in
    S (equivalently: end in 1, no illegal complete gap, head gap in S).
    """

    kind = "natural-gap"

    def __init__(self, lang: GapShift):
        super().__init__(lang)
        self.gaps = lang.gaps
        self.n_symbols = lang.alphabet.size

    def prefix_member(self, w: Word) -> bool:
        if w == EMPTY_WORD:
            return True
        if w[-1] != 1 or any(s == 1 for s in w[:-1]):
            return False
        return self.gaps.has_ge(len(w))

    def suffix_member(self, w: Word) -> bool:
        if w == EMPTY_WORD:
            return True
        if any(s == 1 for s in w):
            return False
        return self.gaps.has_ge(len(w))

    def core_member(self, w: Word) -> bool:
        if w == EMPTY_WORD:
            return True
        if w[-1] != 1:
            return False
        run = 0
        for s in w:
            if s == 1:
                if not self.gaps.contains(run):
                    return False
                run = 0
            else:
                run += 1
        return True

    def count_prefix_words(self, n: int) -> int:
        if n == 0:
            return 1
        return (self.n_symbols - 1) ** (n - 1) if self.gaps.has_ge(n) else 0

    def count_suffix_words(self, n: int) -> int:
        if n == 0:
            return 1
        return (self.n_symbols - 1) ** n if self.gaps.has_ge(n) else 0

    def count_obstruction_words(self, n: int) -> int:
        if n == 0:
            return 1
        # prefixes end in 1, suffixes are 1-free: disjoint families
        return self.count_prefix_words(n) + self.count_suffix_words(n)


class CodedNaturalDecomposition(Decomposition):
    """Natural decomposition of a generic coded shift, from the generator
    words materialized up to the oracle's witness horizon."""

    kind = "natural-coded"

    def __init__(self, lang: CodedShift):
        super().__init__(lang)
        gen_words = lang.generator_words()
        self._words = gen_words
        self._lengths = sorted({len(h) for h in gen_words})
        self._proper_suffixes = {h[i:] for h in gen_words for i in range(1, len(h))}
        self._proper_prefixes = {h[:i] for h in gen_words for i in range(1, len(h))}
        self._gen_set = set(gen_words)

    def prefix_member(self, w: Word) -> bool:
        return w == EMPTY_WORD or w in self._proper_suffixes

    def suffix_member(self, w: Word) -> bool:
        return w == EMPTY_WORD or w in self._proper_prefixes

    def core_member(self, w: Word) -> bool:
        if w == EMPTY_WORD:
            return True
        n = len(w)
        reach = [False] * (n + 1)
        reach[0] = True
        for i in range(n):
            if not reach[i]:
                continue
            for length in self._lengths:
                j = i + length
                if j <= n and w[i:j] in self._gen_set:
                    reach[j] = True
        return reach[n]


def natural_coded_decomposition(lang: LanguageOracle) -> Decomposition:
    """The (n-dec) decomposition for an oracle built from a generator."""
    if isinstance(lang, GapShift):
        return GapNaturalDecomposition(lang)
    if isinstance(lang, CodedShift):
        return CodedNaturalDecomposition(lang)
    raise NotCodedError("oracle does not expose a coded-shift generator")


# ---------------------------------------------------------------------------
# Hofbauer-diagram decomposition (empty prefixes)
# ---------------------------------------------------------------------------

class HofbauerDecomposition(Decomposition):
    """C^p = {empty}; cores are path words with both endpoints in D_N ∩ C;
    suffixes are path words staying in C \\ D_N (first vertex in D_{N+1}).

    The factorizer follows a path from a start vertex in D_N ∩ C and splits
    after the last visit to D_N, maximizing that split point over start
    vertices.
    """

    kind = "hofbauer"

    def __init__(self, diagram, component, depth_cut: int):
        super().__init__(diagram.language())
        self.diagram = diagram
        self.component = component
        self.depth_cut = depth_cut
        self._dn = diagram.vertices_up_to(depth_cut)
        self._dn1 = diagram.vertices_up_to(depth_cut + 1)
        self._comp = component.vertex_ids
        self._core_starts = self._dn & self._comp
        self._suffix_universe = self._comp - self._dn

    def prefix_member(self, w: Word) -> bool:
        return w == EMPTY_WORD

    def core_member(self, w: Word) -> bool:
        if w == EMPTY_WORD:
            return True
        states = {v for v in self._core_starts
                  if self.diagram.vertices[v].symbol == w[0]}
        for s in w[1:]:
            states = {t for v in states
                      if (t := self.diagram.successor(v, s)) is not None}
            if not states:
                return False
        return bool(states & self._core_starts)

    def suffix_member(self, w: Word) -> bool:
        if w == EMPTY_WORD:
            return True
        states = {v for v in (self._dn1 & self._suffix_universe)
                  if self.diagram.vertices[v].symbol == w[0]}
        for s in w[1:]:
            states = {t for v in states
                      if (t := self.diagram.successor(v, s)) is not None
                      and t in self._suffix_universe}
            if not states:
                return False
        return True

    def factorize(self, w: Word) -> tuple[Word, Word, Word]:
        if w == EMPTY_WORD:
            return EMPTY_WORD, EMPTY_WORD, EMPTY_WORD
        best_split = None
        for start in sorted(self._core_starts):
            if self.diagram.vertices[start].symbol != w[0]:
                continue
            path = [start]
            ok = True
            for s in w[1:]:
                nxt = self.diagram.successor(path[-1], s)
                if nxt is None or nxt not in self._comp:
                    ok = False
                    break
                path.append(nxt)
            if not ok:
                continue
            in_dn = [i for i, v in enumerate(path) if v in self._dn]
            if not in_dn:
                continue
            j0 = in_dn[-1]
            if best_split is None or j0 > best_split:
                best_split = j0
        if best_split is None:
            raise FactorizeIncompleteError(
                f"no path from D_{self.depth_cut} ∩ C spells {w}; "
                f"increase the depth cut or the diagram depth")
        core = w[:best_split + 1]
        return EMPTY_WORD, core, w[best_split + 1:]

    def count_suffix_words(self, n: int) -> int:
        if n == 0:
            return 1
        # distinct words along suffixes-universe paths: DFS over state sets
        from functools import lru_cache
        succ = self.diagram.successor
        universe = self._suffix_universe
        start_syms: dict[int, frozenset] = {}
        for v in (self._dn1 & universe):
            sym = self.diagram.vertices[v].symbol
            start_syms.setdefault(sym, set()).add(v)  # type: ignore[arg-type]
        alphabet = list(self.lang.alphabet.symbols())

        @lru_cache(maxsize=None)
        def count_from(states: frozenset, remaining: int) -> int:
            if remaining == 0:
                return 1
            total = 0
            for s in alphabet:
                nxt = frozenset(t for v in states
                                if (t := succ(v, s)) is not None and t in universe)
                if nxt:
                    total += count_from(nxt, remaining - 1)
            return total

        total = 0
        for sym in alphabet:
            states = frozenset(start_syms.get(sym, ()))
            if states:
                total += count_from(states, n - 1)
        return total

    def count_prefix_words(self, n: int) -> int:
        return 1 if n == 0 else 0

    def count_obstruction_words(self, n: int) -> int:
        if n == 0:
            return 1
        return self.count_suffix_words(n)


# ---------------------------------------------------------------------------
# fattened cores and (W)-specification certificates
# ---------------------------------------------------------------------------

def is_fattened_core_member(d: Decomposition, fattening: int, w: Word) -> bool:
    """w in G^M: some split u v s with u in C^p, v in G, s in C^s and
    |u|, |s| <= M."""
    n = len(w)
    for a in range(0, min(fattening, n) + 1):
        if not d.prefix_member(w[:a]):
            continue
        for b in range(0, min(fattening, n - a) + 1):
            if d.suffix_member(w[n - b:]) and d.core_member(w[a:n - b]):
                return True
    return False


def fattened_core(d: Decomposition, fattening: int, n: int) -> list[Word]:
    """All length-n members of the fattened core G^M."""
    d.lang._check_length(n)
    return [w for w in d.lang.iter_words(n)
            if is_fattened_core_member(d, fattening, w)]


@dataclass
class SpecCertificate:
    fattening: int                 # M
    gap: int | None                # minimal uniform connector bound t
    checked_length: int            # L
    status: str                    # verified | counterexample | inconclusive
    counterexample: tuple[Word, Word] | None = None
    words_checked: int = 0
    pairs_checked: int = 0
    triple_checks: int = 0
    seed: int = 0

    def to_dict(self) -> dict:
        out = {"M": self.fattening, "t": self.gap, "L": self.checked_length,
               "status": self.status, "words": self.words_checked,
               "pairs": self.pairs_checked, "triples": self.triple_checks,
               "seed": self.seed}
        if self.counterexample:
            out["counterexample"] = [list(w) for w in self.counterexample]
        return out


def _connector_search(lang: LanguageOracle, state_after_v1, v2: Word, t_max: int):
    """Smallest |w| <= t_max with v1 w v2 legal, given the follower state of
    v1; None when no such connector exists."""
    symbols = list(lang.alphabet.symbols())

    def accepts_from(state, word):
        for s in word:
            state = lang.step(state, s)
            if state is None:
                return False
        return True

    frontier = [state_after_v1]
    if accepts_from(state_after_v1, v2):
        return 0
    for t in range(1, t_max + 1):
        nxt = []
        seen = set()
        for st in frontier:
            for s in symbols:
                t_state = lang.step(st, s)
                if t_state is None or t_state in seen:
                    continue
                seen.add(t_state)
                nxt.append(t_state)
        for st in nxt:
            if accepts_from(st, v2):
                return t
        if not nxt:
            return None
        frontier = nxt
    return None


def check_w_specification(d: Decomposition, fattening: int, t_max: int,
                          length: int, seed: int = 0,
                          triple_samples: int = 100) -> SpecCertificate:
    """Pairwise gluing check for G^M-words of length <= ``length``.

    Searches, for every ordered pair (v1, v2), a connector w with
    |w| <= t_max and v1 w v2 legal; reports the minimal uniform t.  m-fold
    gluing follows inductively from the pairwise case and is additionally
    spot-checked on random triples.  The certificate records t per M: the
    gap size is allowed to depend on the fattening level.
    """
    lang = d.lang
    if 2 * length + t_max > lang.horizon:
        raise HorizonExceededError(
            "horizon too small for pairwise gluing at this length")
    words = []
    for n in range(1, length + 1):
        words.extend(fattened_core(d, fattening, n))
    if not words:
        return SpecCertificate(fattening, 0, length, "verified", None, 0, 0, 0, seed)

    # collapse v1 by follower state and cache per (state, v2)
    states = {}
    for w in words:
        states.setdefault(lang.right_state(w), w)
    cache: dict[tuple, int | None] = {}
    worst_t = 0
    worst_pair = None
    pairs = 0
    for st, v1_repr in states.items():
        for v2 in words:
            pairs += 1
            key = (st, v2)
            if key not in cache:
                cache[key] = _connector_search(lang, st, v2, t_max)
            t_found = cache[key]
            if t_found is None:
                return SpecCertificate(fattening, None, length, "inconclusive",
                                       (v1_repr, v2), len(words), pairs, 0, seed)
            if t_found > worst_t:
                worst_t, worst_pair = t_found, (v1_repr, v2)

    # m = 3 spot check (skipped when the triple length would pass the horizon)
    rng = random.Random(seed)
    triples = 0
    if 3 * length + 2 * worst_t <= lang.horizon and words:
        for _ in range(triple_samples):
            v1, v2, v3 = (rng.choice(words) for _ in range(3))
            st = lang.right_state(v1)
            glued = None
            for w_mid in _words_of_length_upto(lang, st, worst_t):
                candidate = v1 + w_mid + v2
                if lang.is_word(candidate):
                    st2 = lang.right_state(candidate)
                    if _connector_search(lang, st2, v3, worst_t) is not None:
                        glued = candidate
                        break
            if glued is None:
                return SpecCertificate(fattening, None, length, "inconclusive",
                                       (v1, v3), len(words), pairs, triples, seed)
            triples += 1
    return SpecCertificate(fattening, worst_t, length, "verified", worst_pair,
                           len(words), pairs, triples, seed)


def _words_of_length_upto(lang: LanguageOracle, state, t_max: int):
    """Connector candidates (words over the alphabet, legal after ``state``)
    in order of increasing length."""
    symbols = list(lang.alphabet.symbols())
    frontier = [(EMPTY_WORD, state)]
    yield EMPTY_WORD
    for _ in range(t_max):
        nxt = []
        for w, st in frontier:
            for s in symbols:
                t_state = lang.step(st, s)
                if t_state is not None:
                    nxt.append((w + (s,), t_state))
        for w, _ in nxt:
            yield w
        frontier = nxt


def check_w_specification_at(d: Decomposition, fattening: int, t: int,
                             length: int) -> SpecCertificate:
    """Definitive fixed-t probe: verified, or a counterexample pair that
    admits no connector of length <= t."""
    lang = d.lang
    words = []
    for n in range(1, length + 1):
        words.extend(fattened_core(d, fattening, n))
    pairs = 0
    for v1 in words:
        st = lang.right_state(v1)
        for v2 in words:
            pairs += 1
            if _connector_search(lang, st, v2, t) is None:
                return SpecCertificate(fattening, t, length, "counterexample",
                                       (v1, v2), len(words), pairs, 0, 0)
    return SpecCertificate(fattening, t, length, "verified", None,
                           len(words), pairs, 0, 0)


# ---------------------------------------------------------------------------
# obstruction-entropy upper bound
# ---------------------------------------------------------------------------

def obstruction_upper_bound(d: Decomposition, n_max: int,
                            certificates: list[SpecCertificate] | None = None
                            ) -> EntropyEstimate:
    """Growth rate of C^p ∪ C^s: an upper-bound witness for the obstruction
    entropy, contingent on the attached specification certificates.  Never a
    lower bound: the infimum over all decompositions is not searched."""
    counts = [d.count_obstruction_words(n) for n in range(n_max + 1)]
    est = growth_estimate_from_counts(counts, n_max)
    est.method = "growth"
    est.extras["collection"] = "prefixes-and-suffixes"
    est.extras["prefix_counts"] = [d.count_prefix_words(n) for n in range(1, n_max + 1)]
    est.extras["suffix_counts"] = [d.count_suffix_words(n) for n in range(1, n_max + 1)]
    if certificates is not None:
        est.extras["specification_certificates"] = [c.to_dict() for c in certificates]
    return est


# ---------------------------------------------------------------------------
# left / right constraints
# ---------------------------------------------------------------------------

def enumerate_left_constraints(lang: LanguageOracle, n: int, ext_horizon: int
                               ) -> list[tuple[Word, Word]]:
    """Length-n words w admitting v with w2..wn v legal but w v illegal;
    the witness v (shortest, lexicographically first) is attached."""
    if n < 1:
        raise InvalidSpecError("need n >= 1")
    lang._check_length(n + ext_horizon)
    out = []
    for w in lang.iter_words(n):
        tail_state = lang.right_state(w[1:])
        full_state = lang.right_state(w)
        witness = _extension_gap(lang, tail_state, full_state, ext_horizon)
        if witness is not None:
            out.append((w, witness))
    return out


def enumerate_right_constraints(lang: LanguageOracle, n: int, ext_horizon: int
                                ) -> list[tuple[Word, Word]]:
    """Mirror image: v w1..w_{n-1} legal but v w illegal."""
    if n < 1:
        raise InvalidSpecError("need n >= 1")
    lang._check_length(n + ext_horizon)
    out = []
    for w in lang.iter_words(n):
        witness = None
        for t in range(1, ext_horizon + 1):
            for v in lang.iter_words(t):
                if lang.is_word(v + w[:-1]) and not lang.is_word(v + w):
                    witness = v
                    break
            if witness is not None:
                break
        if witness is not None:
            out.append((w, witness))
    return out


def _extension_gap(lang, weak_state, strong_state, ext_horizon):
    """Shortest v with weak_state·v alive but strong_state·v dead."""
    if weak_state is None:
        return None
    symbols = list(lang.alphabet.symbols())
    frontier = [(EMPTY_WORD, weak_state, strong_state)]
    for _ in range(ext_horizon):
        nxt = []
        for v, wk, st in frontier:
            for s in symbols:
                wk2 = lang.step(wk, s)
                if wk2 is None:
                    continue
                st2 = lang.step(st, s) if st is not None else None
                if st2 is None:
                    return v + (s,)
                nxt.append((v + (s,), wk2, st2))
        frontier = nxt
    return None


# ---------------------------------------------------------------------------
# A_n^k table (fat S-gap counting)
# ---------------------------------------------------------------------------

@dataclass
class AnkTable:
    """A_n^k = number of k-fold generator concatenations of total length n,
    from the closed form A_n^1 = (N-1)^{n-1} [n-1 in S] and the convolution
    A_n^{k+l} = sum A_{n-m}^k A_m^l, in exact integers."""

    gaps: GapSetSpec
    n_symbols: int
    n_max: int
    k_max: int
    entries: list[list[int]] = field(repr=False)   # entries[n][k], 0-padded
    row_sums_ok: bool = True
    word_counts: list[int] = field(default_factory=list, repr=False)

    def a(self, n: int, k: int) -> int:
        return self.entries[n][k]


def ank_table(gaps: GapSetSpec, n_symbols: int, n_max: int, k_max: int,
              lang: GapShift | None = None) -> AnkTable:
    """Build the A_n^k table and verify sum_k A_n^k <= #L_n exactly."""
    if n_symbols < 2:
        raise InvalidSpecError("need N >= 2")
    width = max(k_max, n_max) + 1
    a = [[0] * (width + 1) for _ in range(n_max + 1)]
    for n in range(1, n_max + 1):
        if gaps.contains(n - 1):
            a[n][1] = (n_symbols - 1) ** (n - 1)
    for k in range(2, width + 1):
        for n in range(1, n_max + 1):
            a[n][k] = sum(a[n - m][k - 1] * a[m][1] for m in range(1, n))
    if lang is None:
        lang = GapShift(gaps, n_symbols, horizon=max(n_max, 1))
    counts = lang.count_sequence(n_max)
    ok = all(sum(a[n][k] for k in range(1, n + 1)) <= counts[n]
             for n in range(1, n_max + 1))
    return AnkTable(gaps, n_symbols, n_max, k_max, a, ok, counts)


def f1_partial_at_root(gaps: GapSetSpec, n_symbols: int, x0: float,
                       cut: int = 4096) -> tuple[float, float]:
    """Certified partial sum of F_1 at the characteristic root (must be ~1)."""
    return generator_series(gaps, n_symbols, x0, cut)


# ---------------------------------------------------------------------------
# Theorem-C style multiplicity report
# ---------------------------------------------------------------------------

class Case1FatGapDecomposition(Decomposition):
    """Synthetic decomposition of a fat S-gap shift with a 1-free core:
    C^p = legal words ending in 1 (plus the empty word), G = 1-free legal
    words, C^s = {empty}.  Exercises the injective counting map; it does not
    claim (W)-specification."""

    kind = "case1-fat-gap"
    core_is_one_free = True

    def prefix_member(self, w: Word) -> bool:
        return w == EMPTY_WORD or (w[-1] == 1 and self.lang.is_word(w))

    def core_member(self, w: Word) -> bool:
        return all(s != 1 for s in w) and self.lang.is_word(w)

    def suffix_member(self, w: Word) -> bool:
        return w == EMPTY_WORD

    def factorize(self, w: Word):
        last_one = max((i for i, s in enumerate(w) if s == 1), default=-1)
        p, c = w[:last_one + 1], w[last_one + 1:]
        if not (self.prefix_member(p) and self.core_member(c)):
            raise FactorizeIncompleteError(f"cannot factor {w}")
        return p, c, EMPTY_WORD


class WidenedGapDecomposition(GapNaturalDecomposition):
    """Natural fat S-gap decomposition with the prefix collection widened by
    all 1-free words.  Still a decomposition of the same language; its
    maximal-core factorizations place the isolated 1 of w1w inside the core,
    exercising the prefix-length window of the multiplicity bound."""

    kind = "natural-gap-widened-prefix"
    core_is_one_free = False

    def prefix_member(self, w: Word) -> bool:
        if GapNaturalDecomposition.prefix_member(self, w):
            return True
        return all(s != 1 for s in w) and self.gaps.has_ge(len(w))


@dataclass
class TheoremCReport:
    case: int
    ell: int
    a_ell: int | None                 # domain word length (case 2), else 2^ell
    domain_size: int
    max_multiplicity: int
    bound: int
    injective: bool
    witness_fiber: list[Word]
    image_lengths_ok: bool
    esti_windows_ok: bool
    prefix_window_ok: bool            # Lemma 5.2 window when 1 lands in the core
    al2_satisfied: bool | None
    gap_size: int | None
    u_word: Word | None

    def to_dict(self) -> dict:
        return {
            "case": self.case, "ell": self.ell, "a_ell": self.a_ell,
            "domain_size": self.domain_size,
            "max_multiplicity": self.max_multiplicity, "bound": self.bound,
            "injective": self.injective,
            "witness_fiber": [list(w) for w in self.witness_fiber],
            "image_lengths_ok": self.image_lengths_ok,
            "esti_windows_ok": self.esti_windows_ok,
            "prefix_window_ok": self.prefix_window_ok,
            "al2_satisfied": self.al2_satisfied,
            "gap_size": self.gap_size,
            "u_word": list(self.u_word) if self.u_word else None,
        }


def theoremc_multiplicity(gaps: GapSetSpec, n_symbols: int, d: Decomposition,
                          ell: int, case: str = "auto",
                          u_word: Word | None = None,
                          gap_size: int | None = None) -> TheoremCReport:
    """Exhaustive evaluation of the palindromic-word counting map.

    For every filler word w the word w 1 w is factored by ``d``; the map
    sends w to the factor (suffix if it contains the 1, else prefix).  The
    report compares the maximal fiber against (N-1)^(2^(ell-1)), checks the
    fragment-length windows (|r| <= |w| without the 1, |w|+1 <= |r| <= 2|w|+1
    with it), and, in case 2, the prefix-length window when the 1 falls in
    the core.
    """
    if ell < 1:
        raise InvalidSpecError("need ell >= 1")
    lang = d.lang
    fillers = range(2, n_symbols + 1)

    # classify the decomposition core
    if case == "auto":
        case_num = 1 if getattr(d, "core_is_one_free", False) else 2
    else:
        case_num = int(case)

    if case_num == 1:
        domain_len = 2 ** ell
        a_ell = None
        bound = (n_symbols - 1) ** (2 ** (ell - 1))
        lo_img, hi_img = 2 ** ell + 1, 2 ** (ell + 1) + 1
        al2 = None
    else:
        if u_word is None:
            u_word, gap_size = default_case2_parameters(d, gaps, n_symbols)
        if gap_size is None:
            raise InvalidSpecError("case 2 needs the gap size t")
        if sum(1 for s in u_word if s == 1) < 2:
            raise InvalidSpecError("case-2 word u must contain the symbol 1 at least twice")
        if not d.core_member(u_word):
            raise InvalidSpecError("case-2 word u must lie in the core")
        # |u^(k)| = trailing 1-free run of u
        trailing = 0
        for s in reversed(u_word):
            if s == 1:
                break
            trailing += 1
        a_ell = 2 ** ell - 2 * gap_size - trailing - 1
        if a_ell < 1:
            raise InvalidSpecError("ell too small for these case-2 parameters")
        domain_len = a_ell
        bound = (n_symbols - 1) ** (2 ** (ell - 1))
        lo_img, hi_img = a_ell - 2 ** (ell - 1), 2 * a_ell + 1
        al2 = 2 * a_ell / 3 > 2 ** (ell - 1)

    needed = 2 * domain_len + 1
    if needed > lang.horizon:
        raise HorizonExceededError(
            f"need horizon >= {needed} for ell = {ell}")

    fibers: dict[Word, list[Word]] = {}
    lengths_ok = True
    esti_ok = True
    prefix_window_ok = True
    for w in product(fillers, repeat=domain_len):
        x = w + (1,) + w
        p, c, s = d.factorize(x)
        one_in_s = 1 in s
        one_in_p = 1 in p
        one_in_c = 1 in c
        value = s if one_in_s else p
        fibers.setdefault(value, []).append(w)
        for frag, has_one in ((p, one_in_p), (s, one_in_s)):
            if has_one:
                if not (domain_len + 1 <= len(frag) <= 2 * domain_len + 1):
                    esti_ok = False
            else:
                if not (0 <= len(frag) <= domain_len):
                    esti_ok = False
        if not (lo_img <= len(value) <= hi_img):
            lengths_ok = False
        if case_num == 2 and one_in_c:
            if not (a_ell - 2 ** (ell - 1) <= len(p) <= a_ell):
                prefix_window_ok = False
        if case_num == 1 and one_in_c:
            raise InvalidSpecError("case-1 decomposition produced a core containing 1")

    max_fiber = max(len(v) for v in fibers.values())
    witness = max(fibers.values(), key=len)
    return TheoremCReport(
        case=case_num, ell=ell, a_ell=a_ell, domain_size=(n_symbols - 1) ** domain_len,
        max_multiplicity=max_fiber, bound=bound,
        injective=(max_fiber == 1),
        witness_fiber=[tuple(w) for w in witness[:4]],
        image_lengths_ok=lengths_ok, esti_windows_ok=esti_ok,
        prefix_window_ok=prefix_window_ok, al2_satisfied=al2,
        gap_size=gap_size, u_word=u_word,
    )


def default_case2_parameters(d: Decomposition, gaps: GapSetSpec,
                             n_symbols: int) -> tuple[Word, int]:
    """A core word u with >= 2 ones and the gap size of the unfattened core.

    For natural (fat) S-gap decompositions two generator words concatenate
    directly, so the gap size is 0 and u = g1 g1 with g the smallest gap."""
    smallest = None
    for m in gaps.enumerate_up_to(64):
        smallest = m
        break
    if smallest is None:
        raise InvalidSpecError("gap set has no small member")
    g = (2,) * smallest + (1,)
    u = g + g
    if not d.core_member(u):
        raise InvalidSpecError("default case-2 word is not in this core")
    return u, 0
