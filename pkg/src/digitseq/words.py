"""Finite words over the alphabet {0, ..., q-1}.

Letters are stored most-significant first, so ``Word((2, 8, 0), 11)`` reads
"280".  Positional access through :meth:`Word.letter` counts from the right:
``letter(0)`` is the last (least significant) letter.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterator

from .errors import RangeError, UsageError


@dataclass(frozen=True)
class Word:
    letters: tuple[int, ...]
    base: int

    def __post_init__(self):
        if self.base < 2:
            raise UsageError(f"base must be >= 2, got {self.base}")
        letters = tuple(int(x) for x in self.letters)
        for x in letters:
            if not 0 <= x < self.base:
                raise RangeError(f"letter {x} out of range for base {self.base}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def empty(cls, base: int) -> Word:
        return cls((), base)

    @classmethod
    def parse(cls, text: str, base: int) -> Word:
        """Read the serialized form: one digit character per letter, or
        comma-separated integers (needed once letters reach 10).
        ``""`` is the empty word."""
        text = text.strip()
        if not text:
            return cls.empty(base)
        if "," in text:
            parts = [p.strip() for p in text.split(",")]
        else:
            parts = list(text)
        try:
            letters = tuple(int(p) for p in parts)
        except ValueError:
            raise UsageError(f"cannot parse word {text!r} in base {base}") from None
        return cls(letters, base)

    @classmethod
    def from_int(cls, n: int, base: int, length: int | None = None) -> Word:
        """Base-q expansion of n, left-padded with zeros to ``length``."""
        if n < 0:
            raise RangeError("negative integers have no digit word")
        digits = []
        while n:
            n, r = divmod(n, base)
            digits.append(r)
        if length is not None:
            if len(digits) > length:
                raise RangeError(f"{len(digits)} digits do not fit in length {length}")
            digits.extend([0] * (length - len(digits)))
        return cls(tuple(reversed(digits)), base)

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        if self.base > 10:
            return ",".join(str(x) for x in self.letters)
        return "".join(str(x) for x in self.letters)

    def __repr__(self) -> str:
        return f"Word({str(self)!r}, base={self.base})"

    def __add__(self, other: Word) -> Word:
        return concat(self, other)

    def letter(self, i: int) -> int:
        """The i-th letter read from the right."""
        if not 0 <= i < len(self.letters):
            raise RangeError(f"letter index {i} out of range for length {len(self)}")
        return self.letters[-1 - i]

    def prefix(self, k: int) -> Word:
        if not 0 <= k <= len(self):
            raise RangeError(f"prefix length {k} out of range for length {len(self)}")
        return Word(self.letters[:k], self.base)

    def suffix(self, k: int) -> Word:
        if not 0 <= k <= len(self):
            raise RangeError(f"suffix length {k} out of range for length {len(self)}")
        return Word(self.letters[len(self) - k:], self.base)

    @property
    def value(self) -> int:
        return word_value(self)


def word_value(w: Word) -> int:
    """Integer whose base-q digits are the letters of ``w`` (empty word -> 0)."""
    v = 0
    for x in w.letters:
        v = v * w.base + x
    return v


def split(w: Word, k: int) -> tuple[Word, Word]:
    """Cut ``w`` into (prefix, suffix) with a suffix of length k."""
    if not 0 <= k <= len(w):
        raise RangeError(f"split position {k} out of range for length {len(w)}")
    cut = len(w) - k
    return Word(w.letters[:cut], w.base), Word(w.letters[cut:], w.base)


def concat(a: Word, b: Word) -> Word:
    if a.base != b.base:
        raise UsageError(f"cannot concatenate words in bases {a.base} and {b.base}")
    return Word(a.letters + b.letters, a.base)


def words_of_length(k: int, base: int) -> Iterator[Word]:
    """All words of length exactly k in lexicographic order."""
    for letters in product(range(base), repeat=k):
        yield Word(letters, base)


class WordEnum:
    """Bijection between {0, ..., D-1} and the words of length < beta.

    Shorter words come first; words of equal length are ordered
    lexicographically, left to right.  Index 0 is the empty word and
    D = 1 + q + ... + q^(beta-1).
    """

    def __init__(self, beta: int, base: int):
        if beta < 2:
            raise UsageError(f"beta must be >= 2, got {beta}")
        if base < 2:
            raise UsageError(f"base must be >= 2, got {base}")
        self.beta = beta
        self.base = base
        self.table: tuple[Word, ...] = tuple(
            w for k in range(beta) for w in words_of_length(k, base)
        )
        self._index = {w: i for i, w in enumerate(self.table)}

    @property
    def size(self) -> int:
        return len(self.table)

    def __len__(self) -> int:
        return len(self.table)

    def __iter__(self) -> Iterator[Word]:
        return iter(self.table)

    def word(self, index: int) -> Word:
        if not 0 <= index < len(self.table):
            raise RangeError(f"index {index} out of range [0, {len(self.table)})")
        return self.table[index]

    def index(self, w: Word) -> int:
        if w.base != self.base:
            raise UsageError(f"word in base {w.base}, enumeration in base {self.base}")
        try:
            return self._index[w]
        except KeyError:
            raise RangeError(f"word {w} longer than {self.beta - 1}") from None

    @staticmethod
    def index_of_length(k: int, base: int) -> int:
        """Index of the first word of length k, i.e. the zero word 0^k."""
        return (base**k - 1) // (base - 1)


def enum_word(e: WordEnum, index: int) -> Word:
    return e.word(index)


def word_index(e: WordEnum, w: Word) -> int:
    return e.index(w)
