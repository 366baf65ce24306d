"""Topological entropy estimators by three independent routes: word-count
growth, Perron eigenvalue of finite graphs, and characteristic-series roots
for (fat) S-gap shifts.  All values are in nats.
"""

import math
from dataclasses import dataclass, field

from .words import LanguageOracle
from .shifts import GapSetSpec
from .graphs import EdgeGraph, perron_value
from .errors import InvalidSpecError, NonConvergenceError


@dataclass
class EntropyEstimate:
    value: float
    method: str                     # growth | perron | root
    n_used: int | None = None
    tolerance: float | None = None
    upper_hint: float | None = None
    bracket: tuple[float, float] | None = None
    per_n: list[dict] | None = None
    aitken: float | None = None
    flags: tuple[str, ...] = ()
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"method": self.method, "value": self.value}
        if self.n_used is not None:
            out["n_used"] = self.n_used
        if self.tolerance is not None:
            out["tolerance"] = self.tolerance
        if self.upper_hint is not None:
            out["upper_hint"] = self.upper_hint
        if self.bracket is not None:
            out["bracket_lo"], out["bracket_hi"] = self.bracket
        if self.per_n is not None:
            out["per_n"] = self.per_n
        if self.aitken is not None:
            out["aitken"] = self.aitken
        if self.flags:
            out["flags"] = list(self.flags)
        out.update(self.extras)
        return out


def growth_estimate_from_counts(counts: list[int], n_max: int) -> EntropyEstimate:
    """Shared growth-rate report from exact counts ``counts[n]`` for n = 0..n_max.

    The headline value is the final-n subadditive statistic
    ``(1/n_max) log counts[n_max]``; Aitken extrapolation and the last
    consecutive-ratio are advisory only.
    """
    if len(counts) < n_max + 1:
        raise InvalidSpecError("need counts up to n_max")
    per_n = []
    rates: list[float | None] = []
    for n in range(1, n_max + 1):
        c = counts[n]
        rate = math.log(c) / n if c >= 1 else None
        rates.append(rate)
        per_n.append({"n": n, "count": int(c), "rate": rate})
    final = counts[n_max]
    flags = ()
    if final >= 1:
        value = math.log(final) / n_max
    else:
        value, flags = 0.0, ("empty-at-n-max",)
    extras = {}
    if n_max >= 2 and counts[n_max] >= 1 and counts[n_max - 1] >= 1:
        extras["last_ratio"] = math.log(counts[n_max] / counts[n_max - 1])
    aitken = None
    tail = [r for r in rates[-3:] if r is not None]
    if len(tail) == 3:
        d1, d2 = tail[1] - tail[0], tail[2] - tail[1]
        dd = d2 - d1
        if abs(dd) > 1e-14:
            aitken = tail[2] - d2 * d2 / dd
    return EntropyEstimate(
        value=value, method="growth", n_used=n_max, upper_hint=value,
        per_n=per_n, aitken=aitken, flags=flags, extras=extras,
    )


def growth_entropy(lang: LanguageOracle, n_max: int) -> EntropyEstimate:
    """(1/n_max) log #L_{n_max}; over-estimates h_top by Fekete subadditivity."""
    if n_max < 1:
        raise InvalidSpecError("n_max must be >= 1")
    counts = lang.count_sequence(n_max)
    return growth_estimate_from_counts(counts, n_max)


def perron_entropy(graph: EdgeGraph, tol: float = 1e-12) -> EntropyEstimate:
    """log of the adjacency spectral radius, with Collatz-Wielandt brackets.

    An acyclic graph yields value 0 flagged ``acyclic`` rather than an error.
    """
    rho, lo, hi, comp, acyclic = perron_value(graph, tol=tol)
    if acyclic:
        return EntropyEstimate(0.0, "perron", tolerance=tol, flags=("acyclic",))
    log_lo = math.log(lo) if lo > 0 else float("-inf")
    return EntropyEstimate(
        value=math.log(rho), method="perron", tolerance=tol,
        bracket=(log_lo, math.log(hi)),
        extras={"spectral_radius": rho, "component_size": len(comp)},
    )


# ---------------------------------------------------------------------------
# characteristic-series root for (fat) S-gap shifts
# ---------------------------------------------------------------------------

def generator_series(gaps: GapSetSpec, n_symbols: int, x: float, cut: int):
    """Certified evaluation of F_1(x) = sum_{m in S} (N-1)^m x^{m+1}.

    Returns ``(lower, upper)`` enclosing the full series, using terms with
    m <= cut plus a geometric tail bound (zero tail for finite S).
    """
    base = (n_symbols - 1) * x
    partial = 0.0
    for m in gaps.enumerate_up_to(cut):
        partial += x * base ** m
    if not gaps.infinite or base <= 0.0:
        return partial, partial
    if base >= 1.0:
        return partial, float("inf")
    tail = x * base ** (cut + 1) / (1.0 - base)
    return partial, partial + tail


def gap_entropy_root(gaps: GapSetSpec, n_symbols: int = 2,
                     tail_bound: int = 10 ** 6, tol: float = 1e-10) -> EntropyEstimate:
    """Entropy log(1/x0) where F_1(x0) = 1, by certified bisection.

    For N = 2 this is the S-gap characteristic equation 1 = sum x^{n+1};
    the equivalent paper normalization is N-1 = sum ((N-1) x)^{n+1}.  The
    returned bracket certifies ``|value - true| <= tol``.
    """
    if n_symbols < 2:
        raise InvalidSpecError("need N >= 2")
    if tol <= 0:
        raise InvalidSpecError("tol must be positive")
    members = gaps.enumerate_up_to(0 if gaps.infinite else gaps.max_member)
    if not gaps.infinite and not members:
        raise InvalidSpecError("gap set is empty")

    # series cut grows adaptively until every evaluation is decisive
    cut = 64
    if gaps.infinite:
        hi = 1.0 / (n_symbols - 1)
        lo = 0.0
    else:
        hi = 1.0
        lo = 0.0

    def decide(x):
        """-1 root left of x, +1 root right of x, None undecided at current cut."""
        nonlocal cut
        while True:
            f_lo, f_hi = generator_series(gaps, n_symbols, x, cut)
            if f_lo >= 1.0:
                return -1
            if f_hi < 1.0:
                return +1
            if cut >= tail_bound:
                return None
            cut = min(cut * 2, tail_bound)

    # F_1 is increasing, F_1(0) = 0 and the series diverges at the radius
    # (infinite S) or reaches sum (N-1)^m >= 1 at x = 1 (finite S), so a root
    # exists in (lo, hi]; bisect until the log-bracket is below tol.
    for _ in range(10 ** 6):
        if lo > 0 and math.log(hi / lo) <= tol:
            break
        mid = 0.5 * (lo + hi)
        side = decide(mid)
        if side is None:
            raise NonConvergenceError(
                "series cut exhausted before the bracket reached the tolerance")
        if side > 0:
            lo = mid
        else:
            hi = mid
    else:
        raise NonConvergenceError("bisection iteration limit reached")

    value_lo = math.log(1.0 / hi)
    value_hi = math.log(1.0 / lo)
    value = 0.5 * (value_lo + value_hi)
    return EntropyEstimate(
        value=value, method="root", tolerance=tol,
        bracket=(value_lo, value_hi),
        extras={"x0": 0.5 * (lo + hi), "series_cut": cut,
                "delta_over_log_base": value - math.log(n_symbols - 1)},
    )
