"""Words, alphabets and the language-oracle engine.

A word is a tuple of symbols from ``1..N``; the empty word is ``()`` and is
a first-class value (identity for concatenation).  A :class:`LanguageOracle`
answers membership for the language of a subshift exactly up to a declared
``horizon`` and fails loudly beyond it.

Every concrete oracle only implements a deterministic follower automaton
(``initial_state`` / ``step``); membership, lexicographic enumeration and
exact integer counting are derived here once.  Oracles are immutable after
construction and all queries are pure, so instances are safe to share
across threads.
"""

from dataclasses import dataclass
from .errors import HorizonExceededError, InvalidSpecError

Word = tuple[int, ...]

EMPTY_WORD: Word = ()

EMPTY_TOKEN = "-"


@dataclass(frozen=True)
class Alphabet:
    """Symbols are identified with the integers 1..size."""

    size: int

    def __post_init__(self):
        if self.size < 1:
            raise InvalidSpecError("alphabet size must be >= 1")

    def symbols(self) -> range:
        return range(1, self.size + 1)

    def __iter__(self):
        return iter(self.symbols())


def as_word(symbols) -> Word:
    return tuple(int(s) for s in symbols)


def format_word(w: Word) -> str:
    """Serialize a word: decimal symbols separated by single spaces, '-' for the empty word."""
    if not w:
        return EMPTY_TOKEN
    return " ".join(str(s) for s in w)


def parse_word(text: str) -> Word:
    """Inverse of :func:`format_word`."""
    text = text.strip()
    if text == EMPTY_TOKEN or text == "":
        return EMPTY_WORD
    return tuple(int(tok) for tok in text.split())


def subwords(w: Word):
    """All contiguous subwords of ``w``, including the empty word once."""
    yield EMPTY_WORD
    n = len(w)
    for i in range(n):
        for j in range(i + 1, n + 1):
            yield w[i:j]


class LanguageOracle:
    """Queryable language of a subshift, exact up to ``horizon``.

    Subclasses implement a deterministic follower automaton:

    * ``initial_state()`` -- state of the empty word;
    * ``step(state, symbol)`` -- follower state of ``w + (symbol,)``, or
      ``None`` if no member has that prefix.

    The automaton state must determine legality of every extension, which
    makes the derived enumeration and counting exact.
    """

    def __init__(self, alphabet: Alphabet, horizon: int):
        if horizon < 0:
            raise InvalidSpecError("horizon must be non-negative")
        self.alphabet = alphabet
        self.horizon = horizon

    # -- automaton interface -------------------------------------------------

    def initial_state(self):
        raise NotImplementedError

    def step(self, state, symbol: int):
        raise NotImplementedError

    # -- derived operations --------------------------------------------------

    def _check_length(self, n: int):
        if n < 0:
            raise InvalidSpecError("word length must be non-negative")
        if n > self.horizon:
            raise HorizonExceededError(
                f"length {n} exceeds oracle horizon {self.horizon}")

    def right_state(self, w: Word):
        """Follower-automaton state of ``w`` (``None`` if ``w`` is not a member)."""
        state = self.initial_state()
        for s in w:
            state = self.step(state, s)
            if state is None:
                return None
        return state

    def is_word(self, w: Word) -> bool:
        self._check_length(len(w))
        return self.right_state(w) is not None

    def iter_words(self, n: int):
        """Yield the members of length ``n`` in lexicographic order."""
        self._check_length(n)
        symbols = list(self.alphabet.symbols())

        def rec(prefix, state, remaining):
            if remaining == 0:
                yield prefix
                return
            for s in symbols:
                nxt = self.step(state, s)
                if nxt is not None:
                    yield from rec(prefix + (s,), nxt, remaining - 1)

        yield from rec(EMPTY_WORD, self.initial_state(), n)

    def enumerate_words(self, n: int) -> list[Word]:
        """Exactly the members of length ``n``, lexicographic, no duplicates."""
        return list(self.iter_words(n))

    def count_words(self, n: int) -> int:
        """#members of length ``n``; exact arbitrary-precision integer."""
        self._check_length(n)
        symbols = list(self.alphabet.symbols())
        counts = {self.initial_state(): 1}
        for _ in range(n):
            nxt: dict = {}
            for state, c in counts.items():
                for s in symbols:
                    t = self.step(state, s)
                    if t is not None:
                        nxt[t] = nxt.get(t, 0) + c
            counts = nxt
            if not counts:
                return 0
        return sum(counts.values())

    def count_sequence(self, n_max: int) -> list[int]:
        """``[count_words(n) for n in 0..n_max]`` computed in one DP sweep."""
        self._check_length(n_max)
        symbols = list(self.alphabet.symbols())
        counts = {self.initial_state(): 1}
        out = [1]
        for _ in range(n_max):
            nxt: dict = {}
            for state, c in counts.items():
                for s in symbols:
                    t = self.step(state, s)
                    if t is not None:
                        nxt[t] = nxt.get(t, 0) + c
            counts = nxt
            out.append(sum(counts.values()))
        return out


def is_word(lang: LanguageOracle, w: Word) -> bool:
    """Membership of ``w`` in the oracle's language."""
    return lang.is_word(w)


def enumerate_words(lang: LanguageOracle, n: int) -> list[Word]:
    """Members of length ``n`` in lexicographic order."""
    return lang.enumerate_words(n)


def count_words(lang: LanguageOracle, n: int) -> int:
    """Exact number of members of length ``n``."""
    return lang.count_words(n)
