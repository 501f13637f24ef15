"""Digit sequences driven by a sliding window of beta base-q letters.

A :class:`SequenceDef` is the pair (window increment table, initial values).
For n >= q^(beta-1),

    a(n) = a(top beta-1 digits of n) + sum of g over every length-beta
           window of the base-q expansion of n,

and below q^(beta-1) the value is read from the initial table.  Two
evaluators are kept on purpose: :func:`evaluate` uses the window sum above,
:func:`evaluate_by_recursion` feeds digits one at a time from the top using
the one-step recursion a(n) = a(n // q) + g(n mod q^beta).
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from numbers import Real
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import RangeError, UsageError
from .words import Word, words_of_length

KINDS = (
    "table",
    "rudin-shapiro",
    "beta-delta",
    "b-d",
    "block-additive",
    "block-additive-finite",
    "occurrence",
    "digit-polynomial",
)


@dataclass(frozen=True)
class SequenceDef:
    """Base q, window length beta, increment table g and initial values.

    ``g[v]`` is the increment of the length-beta word whose value is v, so
    ``len(g) == q**beta``; ``initial[n]`` gives a(n) for n < q**(beta-1).
    """

    q: int
    beta: int
    g: tuple[int, ...]
    initial: tuple[int, ...]
    kind: str = "table"
    params: Mapping = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.q < 2:
            raise UsageError(f"q must be >= 2, got {self.q}")
        if self.beta < 2:
            raise UsageError(f"beta must be >= 2, got {self.beta}")
        g = tuple(int(x) for x in self.g)
        initial = tuple(int(x) for x in self.initial)
        if len(g) != self.q**self.beta:
            raise UsageError(
                f"g needs {self.q ** self.beta} entries, got {len(g)}"
            )
        if len(initial) != self.q ** (self.beta - 1):
            raise UsageError(
                f"initial needs {self.q ** (self.beta - 1)} entries, got {len(initial)}"
            )
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "initial", initial)

    @property
    def window(self) -> int:
        """q**beta, the modulus that extracts the lowest window."""
        return self.q**self.beta

    @property
    def threshold(self) -> int:
        """q**(beta-1); below it values come from the initial table."""
        return self.q ** (self.beta - 1)

    def g_of(self, w: Word | str) -> int:
        if isinstance(w, str):
            w = Word.parse(w, self.q)
        if w.base != self.q or len(w) != self.beta:
            raise RangeError(f"g is defined on words of length {self.beta} in base {self.q}")
        return self.g[w.value]

    def g_word_table(self) -> dict[str, int]:
        return {str(w): self.g[w.value] for w in words_of_length(self.beta, self.q)}

    def __call__(self, n: int) -> int:
        return evaluate(self, n)


def evaluate(seq: SequenceDef, n: int) -> int:
    """a(n) through the closed window sum."""
    if n < 0:
        raise RangeError("sequence is indexed by nonnegative integers")
    if n < seq.threshold:
        return seq.initial[n]
    q, W = seq.q, seq.window
    # T_q(n) + 1 digits; windows start at positions 0 .. T_q(n) - beta + 1
    ndigits = 0
    m = n
    while m:
        m //= q
        ndigits += 1
    nwin = ndigits - seq.beta + 1
    total = 0
    m = n
    for _ in range(nwin):
        total += seq.g[m % W]
        m //= q
    return seq.initial[m] + total


def evaluate_by_recursion(seq: SequenceDef, n: int) -> int:
    """a(n) by replaying the defining recursion from the most significant digit.

    Independent of :func:`evaluate`: the top beta-1 digits seed the value,
    then each further digit d turns m into q*m + d and adds g of the lowest
    beta digits of the new m.
    """
    if n < 0:
        raise RangeError("sequence is indexed by nonnegative integers")
    q = seq.q
    digits = []
    m = n
    while m:
        m, r = divmod(m, q)
        digits.append(r)
    digits.reverse()
    if len(digits) < seq.beta:
        return seq.initial[n]
    head = 0
    for d in digits[: seq.beta - 1]:
        head = head * q + d
    value = seq.initial[head]
    m = head
    for d in digits[seq.beta - 1 :]:
        m = m * q + d
        value += seq.g[m % seq.window]
    return value


def eval_table(seq: SequenceDef, limit: int) -> np.ndarray:
    """Array of a(n) for 0 <= n < limit (int64), built one digit-length at a time."""
    if limit < 0:
        raise RangeError("limit must be nonnegative")
    q = seq.q
    out = np.empty(max(limit, 0), dtype=np.int64)
    init = np.asarray(seq.initial, dtype=np.int64)
    g = np.asarray(seq.g, dtype=np.int64)
    head = min(limit, seq.threshold)
    out[:head] = init[:head]
    # out[n] only reads out[n // q] < lo, so any chunking of [lo, limit) works
    lo = seq.threshold
    while lo < limit:
        hi = min(lo * q, limit, lo + 2**22)
        idx = np.arange(lo, hi, dtype=np.int64)
        out[lo:hi] = out[idx // q] + g[idx % seq.window]
        lo = hi
    return out


def eval_many(seq: SequenceDef, ns: Iterable[int] | np.ndarray) -> np.ndarray:
    """Vectorised window sum for an arbitrary array of indices."""
    ns = np.asarray(ns, dtype=np.int64)
    if ns.size and ns.min() < 0:
        raise RangeError("sequence is indexed by nonnegative integers")
    q, W = seq.q, seq.window
    init = np.asarray(seq.initial, dtype=np.int64)
    g = np.asarray(seq.g, dtype=np.int64)
    total = np.zeros(ns.shape, dtype=np.int64)
    m = ns.copy()
    active = m >= seq.threshold
    while active.any():
        total[active] += g[m[active] % W]
        m[active] //= q
        active = m >= seq.threshold
    return init[m] + total


def truncate_eval(seq: SequenceDef, lam: int, n: int) -> int:
    """a(n mod q^lambda)."""
    if lam < 0:
        raise RangeError("truncation level must be >= 0")
    return evaluate(seq, n % seq.q**lam)


# --- the unit-circle function ----------------------------------------------


_QUARTER_TURNS = {Fraction(0): 1 + 0j, Fraction(1, 4): 1j, Fraction(1, 2): -1 + 0j, Fraction(3, 4): -1j}


def e(x) -> complex:
    """exp(2 i pi x), with x reduced mod 1 first (exactly, for Fractions)."""
    if isinstance(x, (int, Fraction)):
        x = Fraction(x) % 1
        if x in _QUARTER_TURNS:
            return _QUARTER_TURNS[x]
    else:
        x = math.fmod(float(x), 1.0)
    return cmath.exp(2j * math.pi * float(x))


def rational_alpha(alpha, max_denominator: int = 10**6) -> Fraction | None:
    """alpha as an exact fraction when it is one (ints, Fractions and binary
    floats such as 0.5); ``None`` for values that only approximate a ratio."""
    if isinstance(alpha, (int, Fraction)):
        return Fraction(alpha)
    f = Fraction(alpha).limit_denominator(max_denominator)
    return f if float(f) == float(alpha) else None


@dataclass(frozen=True)
class AssociatedFunction:
    """n -> e(alpha * a(n)) for a digit sequence a."""

    seq: SequenceDef
    alpha: Real

    def __call__(self, n: int) -> complex:
        return f_value(self, n)

    def phase(self, values) -> np.ndarray:
        """Vectorised e(alpha * values) for an integer array."""
        values = np.asarray(values, dtype=np.int64)
        frac = rational_alpha(self.alpha)
        if frac is not None:
            r = np.mod(values * frac.numerator, frac.denominator) / frac.denominator
        else:
            r = np.mod(values * float(self.alpha), 1.0)
        return np.exp(2j * np.pi * r)


def f_value(fn: AssociatedFunction, n: int) -> complex:
    return e(_times(fn.alpha, evaluate(fn.seq, n)))


def f_trunc_value(fn: AssociatedFunction, lam: int, n: int) -> complex:
    return e(_times(fn.alpha, truncate_eval(fn.seq, lam, n)))


def _times(alpha, k: int):
    frac = rational_alpha(alpha)
    return frac * k if frac is not None else float(alpha) * k


# --- constructors ------------------------------------------------------------


def _window_table(q: int, beta: int, fn: Callable[[tuple[int, ...]], int]) -> tuple[int, ...]:
    """Tabulate fn over letter tuples (most significant first) of length beta."""
    return tuple(int(fn(letters)) for letters in product(range(q), repeat=beta))


def from_table(q: int, beta: int, g: Mapping[str, int] | Sequence[int],
               initial: Mapping[int, int] | Sequence[int] | None = None) -> SequenceDef:
    """Explicit sequence; g keyed by word strings or given as a flat list."""
    if isinstance(g, Mapping):
        table = [None] * q**beta
        for key, val in g.items():
            w = key if isinstance(key, Word) else Word.parse(str(key), q)
            if len(w) != beta:
                raise UsageError(f"word {w} has length {len(w)}, expected {beta}")
            table[w.value] = int(val)
        missing = [str(Word.from_int(i, q, beta)) for i, v in enumerate(table) if v is None]
        if missing:
            raise UsageError(f"g missing entries: {', '.join(missing[:8])}")
    else:
        table = list(g)
    init = [0] * q ** (beta - 1)
    if isinstance(initial, Mapping):
        for k, v in initial.items():
            if not 0 <= int(k) < len(init):
                raise RangeError(f"initial index {k} outside [0, {len(init)})")
            init[int(k)] = int(v)
    elif initial is not None:
        init = list(initial)
    return SequenceDef(q, beta, tuple(table), tuple(init), "table")


def beta_delta(delta: int, q: int = 2) -> SequenceDef:
    """sum_l eps_l(n) * eps_{l+delta}(n)."""
    if delta < 1:
        raise UsageError("delta must be >= 1")
    beta = delta + 1
    g = _window_table(q, beta, lambda w: w[0] * w[-1])
    return SequenceDef(q, beta, g, (0,) * q ** (beta - 1), "beta-delta", {"delta": delta})


def rudin_shapiro(q: int = 2) -> SequenceDef:
    """sum_i eps_i(n) * eps_{i+1}(n); parity is the Rudin-Shapiro sequence when q = 2."""
    seq = beta_delta(1, q)
    return SequenceDef(q, 2, seq.g, seq.initial, "rudin-shapiro")


def b_d(d: int, q: int = 2) -> SequenceDef:
    """sum_l eps_l(n) eps_{l+1}(n) ... eps_{l+d}(n)."""
    if d < 1:
        raise UsageError("d must be >= 1")
    beta = d + 1
    g = _window_table(q, beta, math.prod)
    return SequenceDef(q, beta, g, (0,) * q ** (beta - 1), "b-d", {"d": d})


def _g_from_spec(q: int, beta: int, g) -> tuple[int, ...]:
    if callable(g):
        return _window_table(q, beta, g)
    return from_table(q, beta, g).g


def block_additive(q: int, beta: int, g) -> SequenceDef:
    """a(n) = sum over all i >= 0 of g(eps_{i+beta-1}(n) ... eps_i(n)), windows
    running past the leading digit into the implicit zeros.  Needs g(0^beta) = 0."""
    table = _g_from_spec(q, beta, g)
    if table[0] != 0:
        raise UsageError("block-additive sequences need g(0...0) = 0")
    init = []
    for m in range(q ** (beta - 1)):
        total, x = 0, m
        for _ in range(beta - 1):
            total += table[x % q**beta]
            x //= q
        init.append(total)
    return SequenceDef(q, beta, table, tuple(init), "block-additive")


def block_additive_finite(q: int, beta: int, g) -> SequenceDef:
    """Only windows lying entirely inside the expansion of n are counted."""
    table = _g_from_spec(q, beta, g)
    return SequenceDef(q, beta, table, (0,) * q ** (beta - 1), "block-additive-finite")


def occurrence(words: Iterable[str | Word], q: int = 2) -> SequenceDef:
    """Number of occurrences of the given words (all of one length >= 2)."""
    ws = [w if isinstance(w, Word) else Word.parse(w, q) for w in words]
    if not ws:
        raise UsageError("occurrence needs at least one word")
    lengths = {len(w) for w in ws}
    if len(lengths) != 1:
        raise UsageError("occurrence words must share one length")
    beta = lengths.pop()
    if beta < 2:
        raise UsageError("occurrence words must have length >= 2")
    g = [0] * q**beta
    for w in set(ws):
        if w.base != q:
            raise UsageError(f"word {w} is not in base {q}")
        g[w.value] = 1
    seq = SequenceDef(q, beta, tuple(g), (0,) * q ** (beta - 1), "occurrence",
                      {"B": sorted(str(w) for w in set(ws))})
    return seq


# --- polynomials in the window letters --------------------------------------

_TERM = re.compile(r"([+-]?)\s*([^+-]+)")
_FACTOR = re.compile(r"^X(\d+)(?:\^(\d+))?$")


class DigitPolynomial:
    """Integer polynomial in X_k, ..., X_0 (X_k is the leftmost window letter).

    ``terms`` maps an exponent tuple ordered (e_k, ..., e_0) to its coefficient.
    """

    def __init__(self, k: int, terms: Mapping[tuple[int, ...], int]):
        if k < 1:
            raise UsageError("k must be >= 1")
        self.k = k
        clean = {}
        for exps, c in terms.items():
            exps = tuple(int(x) for x in exps)
            if len(exps) != k + 1 or min(exps) < 0:
                raise UsageError(f"bad exponent tuple {exps} for k = {k}")
            if c:
                clean[exps] = clean.get(exps, 0) + int(c)
        self.terms = {e: c for e, c in clean.items() if c}

    @classmethod
    def parse(cls, text: str, k: int) -> DigitPolynomial:
        """Parse e.g. ``"X2*X0 - X1 + 3*X1^2*X0"``; ``"0"`` is the zero polynomial."""
        terms: dict[tuple[int, ...], int] = {}
        src = text.replace(" ", "")
        if not src:
            raise UsageError("empty polynomial")
        pos = 0
        for m in _TERM.finditer(src):
            if m.start() != pos:
                raise UsageError(f"cannot parse polynomial {text!r}")
            pos = m.end()
            sign = -1 if m.group(1) == "-" else 1
            coef = 1
            exps = [0] * (k + 1)
            for factor in m.group(2).split("*"):
                if factor.isdigit():
                    coef *= int(factor)
                    continue
                fm = _FACTOR.match(factor)
                if not fm:
                    raise UsageError(f"bad factor {factor!r} in polynomial {text!r}")
                i = int(fm.group(1))
                if i > k:
                    raise UsageError(f"variable X{i} exceeds X{k}")
                exps[k - i] += int(fm.group(2) or 1)
            key = tuple(exps)
            terms[key] = terms.get(key, 0) + sign * coef
        if pos != len(src):
            raise UsageError(f"cannot parse polynomial {text!r}")
        return cls(k, terms)

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def __call__(self, letters: Sequence[int]) -> int:
        """Evaluate at (x_k, ..., x_0)."""
        total = 0
        for exps, c in self.terms.items():
            total += c * math.prod(x**p for x, p in zip(letters, exps))
        return total

    def split_corner(self) -> tuple[DigitPolynomial, DigitPolynomial]:
        """Write P = X_k X_0 P1 + P2 with no monomial of P2 divisible by X_k X_0."""
        p1, p2 = {}, {}
        for exps, c in self.terms.items():
            if exps[0] >= 1 and exps[-1] >= 1:
                reduced = (exps[0] - 1,) + exps[1:-1] + (exps[-1] - 1,)
                p1[reduced] = c
            else:
                p2[exps] = c
        return DigitPolynomial(self.k, p1), DigitPolynomial(self.k, p2)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exps, c in sorted(self.terms.items(), reverse=True):
            factors = [
                f"X{self.k - i}" + (f"^{p}" if p > 1 else "")
                for i, p in enumerate(exps) if p
            ]
            body = "*".join(([str(abs(c))] if abs(c) != 1 or not factors else []) + factors)
            parts.append(("-" if c < 0 else "+") + body)
        s = "".join(parts)
        return s[1:] if s.startswith("+") else s


def digit_polynomial(poly: DigitPolynomial | str, k: int | None = None, q: int = 2) -> SequenceDef:
    """a(n) = sum_{i=0}^{T_q(n)-k} P(eps_{i+k}(n), ..., eps_i(n)), window beta = k+1."""
    if isinstance(poly, str):
        if k is None:
            raise UsageError("k is required when the polynomial is given as text")
        poly = DigitPolynomial.parse(poly, k)
    if k is not None and k != poly.k:
        raise UsageError(f"polynomial built for k = {poly.k}, not {k}")
    beta = poly.k + 1
    g = _window_table(q, beta, poly)
    return SequenceDef(q, beta, g, (0,) * q ** (beta - 1), "digit-polynomial",
                       {"k": poly.k, "poly": str(poly)})


def builtin_sequence(kind: str, q: int = 2, **params) -> SequenceDef:
    """Build one of the named families; ``params`` are the family parameters."""
    try:
        if kind == "rudin-shapiro":
            return rudin_shapiro(q)
        if kind == "beta-delta":
            return beta_delta(int(params["delta"]), q)
        if kind == "b-d":
            return b_d(int(params["d"]), q)
        if kind == "block-additive":
            return block_additive(q, int(params["beta"]), params["g"])
        if kind == "block-additive-finite":
            return block_additive_finite(q, int(params["beta"]), params["g"])
        if kind == "occurrence":
            return occurrence(params["B"], q)
        if kind == "digit-polynomial":
            return digit_polynomial(params["poly"], params.get("k"), q)
        if kind == "table":
            return from_table(q, int(params["beta"]), params["g"], params.get("initial"))
    except KeyError as exc:
        raise UsageError(f"kind {kind!r} needs parameter {exc.args[0]!r}") from None
    raise UsageError(f"unknown sequence kind {kind!r}; expected one of {', '.join(KINDS)}")
