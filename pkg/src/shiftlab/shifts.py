"""Constructors for the shift families: full shifts, SFTs, coded shifts,
(fat) S-gap shifts and the 1^i 2^i family.

Oracles built here are immutable and thread-safe; see :mod:`shiftlab.words`
for the shared query engine.
"""

from dataclasses import dataclass, field
from typing import Callable

from .words import Alphabet, Word, EMPTY_WORD, LanguageOracle, parse_word
from .errors import InvalidSpecError


def default_horizon(n_symbols: int) -> int:
    """Horizon defaults keeping exhaustive suites fast: 24 / 16 / 12 symbols."""
    if n_symbols <= 2:
        return 24
    if n_symbols == 3:
        return 16
    return 12


# ---------------------------------------------------------------------------
# full shifts
# ---------------------------------------------------------------------------

class FullShift(LanguageOracle):
    """Every word over 1..N is legal."""

    def __init__(self, n_symbols: int, horizon: int | None = None):
        if horizon is None:
            horizon = default_horizon(n_symbols)
        super().__init__(Alphabet(n_symbols), horizon)

    def initial_state(self):
        return 0

    def step(self, state, symbol):
        return 0

    def count_words(self, n: int) -> int:
        self._check_length(n)
        return self.alphabet.size ** n


def build_full(n_symbols: int, horizon: int | None = None) -> FullShift:
    return FullShift(n_symbols, horizon)


# ---------------------------------------------------------------------------
# shifts of finite type
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SftSpec:
    """Forbidden-word presentation of an SFT.

    Construction prunes any forbidden word that contains another one as a
    subword, so the stored family is minimal.
    """

    alphabet: Alphabet
    forbidden: tuple[Word, ...]

    @staticmethod
    def make(n_symbols: int, forbidden) -> "SftSpec":
        words = [tuple(w) for w in forbidden]
        if any(len(w) == 0 for w in words):
            raise InvalidSpecError("forbidden words must have length >= 1")
        alphabet = Alphabet(n_symbols)
        for w in words:
            if any(s < 1 or s > n_symbols for s in w):
                raise InvalidSpecError(f"forbidden word {w} leaves the alphabet")
        # minimality: drop words with a proper forbidden subword
        def has_other_sub(w, others):
            for u in others:
                if u == w or len(u) > len(w):
                    continue
                if any(w[i:i + len(u)] == u for i in range(len(w) - len(u) + 1)):
                    return True
            return False
        kept = tuple(sorted({w for w in words if not has_other_sub(w, words)}))
        return SftSpec(alphabet, kept)


class SftShift(LanguageOracle):
    """Words containing no forbidden subword; follower state is the recent suffix."""

    def __init__(self, spec: SftSpec, horizon: int | None = None):
        self.spec = spec
        self.memory = max((len(w) for w in spec.forbidden), default=1)
        if horizon is None:
            horizon = default_horizon(spec.alphabet.size)
        if horizon < self.memory:
            raise InvalidSpecError("horizon must be >= max forbidden length")
        super().__init__(spec.alphabet, horizon)
        self._forbidden = set(spec.forbidden)
        self._lengths = sorted({len(w) for w in spec.forbidden})

    def initial_state(self):
        return EMPTY_WORD

    def step(self, state, symbol):
        w = state + (symbol,)
        for length in self._lengths:
            if len(w) >= length and w[-length:] in self._forbidden:
                return None
        if len(w) >= self.memory:
            w = w[-(self.memory - 1):] if self.memory > 1 else EMPTY_WORD
        return w


def build_sft(spec: SftSpec, horizon: int | None = None) -> SftShift:
    """Oracle accepting exactly the words with no forbidden subword."""
    return SftShift(spec, horizon)


# ---------------------------------------------------------------------------
# gap sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GapSetSpec:
    """A representable set S of non-negative integers.

    ``kind`` is one of ``finite-list``, ``all-nonneg``, ``powers-of-k``,
    ``arithmetic``; membership and enumeration agree by construction.
    """

    kind: str
    contains: Callable[[int], bool] = field(compare=False)
    enumerate_up_to: Callable[[int], list[int]] = field(compare=False)
    infinite: bool = True
    max_member: int | None = None
    label: str = ""

    def has_ge(self, m: int) -> bool:
        """Is there an element of S that is >= m?"""
        if self.infinite:
            return True
        return self.max_member is not None and self.max_member >= m

    def __repr__(self):
        return f"GapSetSpec({self.label or self.kind})"


def gapset_all() -> GapSetSpec:
    return GapSetSpec(
        kind="all-nonneg",
        contains=lambda m: m >= 0,
        enumerate_up_to=lambda bound: list(range(0, bound + 1)),
        infinite=True,
        label="N∪{0}",
    )


def gapset_finite(members) -> GapSetSpec:
    mem = tuple(sorted(set(int(m) for m in members)))
    if not mem or mem[0] < 0:
        raise InvalidSpecError("finite gap set must be a non-empty set of non-negative integers")
    return GapSetSpec(
        kind="finite-list",
        contains=lambda m, _s=frozenset(mem): m in _s,
        enumerate_up_to=lambda bound, _m=mem: [x for x in _m if x <= bound],
        infinite=False,
        max_member=mem[-1],
        label="{" + ",".join(map(str, mem)) + "}",
    )


def gapset_powers(k: int) -> GapSetSpec:
    if k < 2:
        raise InvalidSpecError("powers-of-k needs k >= 2")

    def contains(m, _k=k):
        if m < _k:
            return False
        while m % _k == 0:
            m //= _k
        return m == 1

    def enum(bound, _k=k):
        out, p = [], _k
        while p <= bound:
            out.append(p)
            p *= _k
        return out

    return GapSetSpec("powers-of-k", contains, enum, True, None, f"{{{k}^n}}")


def gapset_arith(a: int, d: int) -> GapSetSpec:
    if a < 0 or d < 1:
        raise InvalidSpecError("arithmetic gap set needs a >= 0, d >= 1")
    return GapSetSpec(
        kind="arithmetic",
        contains=lambda m: m >= a and (m - a) % d == 0,
        enumerate_up_to=lambda bound: list(range(a, bound + 1, d)),
        infinite=True,
        label=f"{{{a}+{d}k}}",
    )


# ---------------------------------------------------------------------------
# (fat) S-gap shifts
# ---------------------------------------------------------------------------

class GapShift(LanguageOracle):
    """Fat S-gap shift on symbols 1..N: runs of non-1 symbols between
    consecutive 1's have lengths in S.  ``N = 2`` is the classical S-gap
    shift.

    A finite word is legal iff every complete internal run lies in S and
    each boundary run fits below some element of S (automatic when S is
    infinite).  The follower state is ``(anchored, current_run)``.
    """

    def __init__(self, gaps: GapSetSpec, n_symbols: int = 2,
                 horizon: int | None = None):
        if n_symbols < 2:
            raise InvalidSpecError("fat S-gap shift needs N >= 2")
        if horizon is None:
            horizon = default_horizon(n_symbols)
        super().__init__(Alphabet(n_symbols), horizon)
        self.gaps = gaps

    def initial_state(self):
        return (False, 0)

    def step(self, state, symbol):
        anchored, run = state
        if symbol == 1:
            if not anchored:
                return (True, 0)
            return (True, 0) if self.gaps.contains(run) else None
        run += 1
        return (anchored, run) if self.gaps.has_ge(run) else None


def build_sgap(gaps: GapSetSpec, horizon: int | None = None) -> GapShift:
    """The S-gap shift on {1, 2}."""
    return GapShift(gaps, 2, horizon)


def build_fat_sgap(gaps: GapSetSpec, n_symbols: int,
                   horizon: int | None = None) -> GapShift:
    """The fat S-gap shift on {1..N}; coincides with build_sgap for N = 2."""
    if n_symbols < 2:
        raise InvalidSpecError("fat S-gap shift needs N >= 2")
    return GapShift(gaps, n_symbols, horizon)


# ---------------------------------------------------------------------------
# coded shifts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeneratorSpec:
    """Countable generator set, materialized through ``enumerate_up_to``.

    ``enumerate_up_to(L)`` returns every generator word of length <= L
    (including the empty word), deterministically and monotonically in L.
    """

    alphabet: Alphabet
    enumerate_up_to: Callable[[int], list[Word]] = field(compare=False)
    label: str = ""

    def validate(self):
        words0 = self.enumerate_up_to(0)
        if EMPTY_WORD not in words0:
            raise InvalidSpecError("generator must contain the empty word")


def generator_from_words(n_symbols: int, words, label="") -> GeneratorSpec:
    """Finite generator; the empty word is added if missing."""
    fixed = sorted({tuple(w) for w in words} | {EMPTY_WORD}, key=lambda w: (len(w), w))
    for w in fixed:
        if any(s < 1 or s > n_symbols for s in w):
            raise InvalidSpecError(f"generator word {w} leaves the alphabet")
    return GeneratorSpec(
        Alphabet(n_symbols),
        lambda bound, _w=tuple(fixed): [w for w in _w if len(w) <= bound],
        label or f"{len(fixed) - 1} words",
    )


def kucherenko_generator(index_set: GapSetSpec) -> GeneratorSpec:
    """Generator {1^i 2^i : i in I} for an index set I of positive integers."""

    def enum(bound, _ix=index_set):
        out = [EMPTY_WORD]
        for i in _ix.enumerate_up_to(bound // 2 if bound >= 2 else 0):
            if i >= 1 and 2 * i <= bound:
                out.append((1,) * i + (2,) * i)
        return out

    return GeneratorSpec(Alphabet(2), enum, f"{{1^i 2^i : i in {index_set.label}}}")


def fat_gap_generator(gaps: GapSetSpec, n_symbols: int) -> GeneratorSpec:
    """Generator {w1 : w in {2..N}^n, n in S}.  Enumeration is exponential in
    the bound; intended for small-horizon cross-checks of :class:`GapShift`."""
    from itertools import product

    def enum(bound, _g=gaps, _n=n_symbols):
        out = [EMPTY_WORD]
        for m in _g.enumerate_up_to(max(bound - 1, 0)):
            if m + 1 <= bound:
                for w in product(range(2, _n + 1), repeat=m):
                    out.append(tuple(w) + (1,))
        return out

    return GeneratorSpec(Alphabet(n_symbols), enum, f"fat-gap({gaps.label}, N={n_symbols})")


# parser items: ('A', i, pos) interior fragment of word i ending before pos,
# ('C', i, pos) partial generator word matched up to pos, ('B',) at a clean
# concatenation boundary.  Every live state is accepting (the language is
# factorial), so membership is aliveness.
_BOUNDARY = ("B",)


class CodedShift(LanguageOracle):
    """Coded shift: subwords of finite concatenations of generator words.

    Membership is decided by dynamic programming over parse positions
    inside generator words, requiring the parse to be extendable on both
    sides: a member is either an interior factor of a single generator word
    or (proper suffix)(concatenation)(proper prefix).  Exactness up to the
    horizon relies on boundary fragments being witnessed by generator words
    of length <= ``witness_horizon`` (default ``2 * horizon + 2``, enough for
    the shipped families).
    """

    def __init__(self, generator: GeneratorSpec, horizon: int,
                 witness_horizon: int | None = None):
        generator.validate()
        super().__init__(generator.alphabet, horizon)
        self.generator = generator
        if witness_horizon is None:
            witness_horizon = 2 * horizon + 2
        self.witness_horizon = witness_horizon
        self._words = tuple(w for w in generator.enumerate_up_to(witness_horizon) if w)
        if not self._words:
            raise InvalidSpecError("generator has no non-empty word within the witness horizon")
        self._starts: dict[int, list[tuple[int, int]]] = {}
        for i, h in enumerate(self._words):
            self._starts.setdefault(h[0], []).append((i, len(h)))

    def generator_words(self) -> tuple[Word, ...]:
        """Non-empty generator words up to the witness horizon."""
        return self._words

    def initial_state(self):
        items = [_BOUNDARY]
        for i, h in enumerate(self._words):
            for p in range(1, len(h)):
                items.append(("A", i, p))
        return frozenset(items)

    def step(self, state, symbol):
        out = set()
        words = self._words
        for item in state:
            if item[0] == "B":
                for i, length in self._starts.get(symbol, ()):
                    out.add(_BOUNDARY if length == 1 else ("C", i, 1))
            else:
                tag, i, p = item
                h = words[i]
                if h[p] == symbol:
                    p += 1
                    out.add(_BOUNDARY if p == len(h) else (tag, i, p))
        return frozenset(out) if out else None


def build_coded(generator: GeneratorSpec, horizon: int,
                witness_horizon: int | None = None) -> CodedShift:
    """Oracle for the coded shift generated by ``generator``."""
    return CodedShift(generator, horizon, witness_horizon)


def build_kucherenko(index_set: GapSetSpec, horizon: int = 20) -> CodedShift:
    """Coded shift generated by {1^i 2^i : i in I}."""
    return build_coded(kucherenko_generator(index_set), horizon)


# ---------------------------------------------------------------------------
# CLI shift-spec strings
# ---------------------------------------------------------------------------

def parse_gapset(parts: list[str]) -> GapSetSpec:
    if not parts:
        raise InvalidSpecError("missing gap-set specification")
    head = parts[0]
    if head == "all":
        return gapset_all()
    if head == "powers":
        if len(parts) != 2:
            raise InvalidSpecError("powers gap set: powers:<k>")
        return gapset_powers(int(parts[1]))
    if head == "arith":
        if len(parts) != 2 or "," not in parts[1]:
            raise InvalidSpecError("arithmetic gap set: arith:<a>,<d>")
        a, d = parts[1].split(",")
        return gapset_arith(int(a), int(d))
    if head == "finite":
        if len(parts) != 2:
            raise InvalidSpecError("finite gap set: finite:<m1>,<m2>,...")
        return gapset_finite(int(tok) for tok in parts[1].split(","))
    raise InvalidSpecError(f"unknown gap set kind {head!r}")


def parse_shift_spec(spec: str, horizon: int | None = None) -> LanguageOracle:
    """Build an oracle from a CLI spec string.

    Grammar: ``full:N``, ``sft:N:forbid=11,212``, ``sgap:<gapset>``,
    ``fatsgap:N=3:<gapset>``, ``coded:file=<path>``,
    ``kucherenko:<gapset>`` with gap sets ``all``, ``powers:k``,
    ``arith:a,d``, ``finite:m1,m2,...``.
    """
    parts = spec.split(":")
    kind = parts[0]
    if kind == "full":
        if len(parts) != 2:
            raise InvalidSpecError("full shift spec: full:<N>")
        return build_full(int(parts[1]), horizon)
    if kind == "sft":
        if len(parts) != 3 or not parts[2].startswith("forbid="):
            raise InvalidSpecError("sft spec: sft:<N>:forbid=<w1>,<w2>,...")
        n = int(parts[1])
        forb = []
        for tok in parts[2][len("forbid="):].split(","):
            tok = tok.strip()
            if not tok:
                continue
            forb.append(tuple(int(ch) for ch in tok))
        return build_sft(SftSpec.make(n, forb), horizon)
    if kind == "sgap":
        return build_sgap(parse_gapset(parts[1:]), horizon)
    if kind == "fatsgap":
        if len(parts) < 3 or not parts[1].startswith("N="):
            raise InvalidSpecError("fat S-gap spec: fatsgap:N=<n>:<gapset>")
        n = int(parts[1][2:])
        return build_fat_sgap(parse_gapset(parts[2:]), n, horizon)
    if kind == "coded":
        if len(parts) != 2 or not parts[1].startswith("file="):
            raise InvalidSpecError("coded spec: coded:file=<path>")
        path = parts[1][len("file="):]
        with open(path, "r", encoding="utf-8") as fh:
            words = [parse_word(line) for line in fh if line.strip()]
        n = max((max(w) for w in words if w), default=1)
        gen = generator_from_words(n, words, label=path)
        return build_coded(gen, horizon if horizon is not None else default_horizon(n))
    if kind == "kucherenko":
        index = parse_gapset(parts[1:]) if len(parts) > 1 else gapset_all()
        return build_kucherenko(index, horizon if horizon is not None else 20)
    raise InvalidSpecError(f"unknown shift kind {kind!r}")
