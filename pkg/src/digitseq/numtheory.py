"""Sieve tables and arithmetic statistics of digit sequences along primes.

Everything here is exact enumeration up to a sieve limit: Mobius and von
Mangoldt weighted sums, prime counts in residue classes split by a(p) mod m',
and Weyl sums of alpha * a(p) over primes in a progression.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, TextIO

import numpy as np

from .errors import BudgetExceeded, UsageError
from .sequences import SequenceDef, eval_many, eval_table, rational_alpha

DEFAULT_SIEVE_LIMIT = 10**7
MAX_SIEVE_LIMIT = 10**8
ENV_LIMIT = "DIGITSEQ_SIEVE_LIMIT"


def configured_limit() -> int:
    raw = os.environ.get(ENV_LIMIT)
    if not raw:
        return DEFAULT_SIEVE_LIMIT
    try:
        return int(float(raw))
    except ValueError:
        raise UsageError(f"{ENV_LIMIT}={raw!r} is not a number") from None


class SieveTables:
    """Smallest-prime-factor table on [0, limit] with derived lookups.

    spf[0] = spf[1] = 0.  Mobius and von Mangoldt arrays are built on first use.
    """

    def __init__(self, limit: int, max_limit: int = MAX_SIEVE_LIMIT):
        if limit < 2:
            raise UsageError("sieve limit must be >= 2")
        if limit > max_limit:
            raise BudgetExceeded(f"sieve limit {limit} exceeds the cap {max_limit}")
        self.limit = int(limit)
        spf = np.zeros(self.limit + 1, dtype=np.int32)
        for p in range(2, math.isqrt(self.limit) + 1):
            if spf[p]:
                continue
            view = spf[p * p :: p]
            view[view == 0] = p
        idx = np.arange(self.limit + 1, dtype=np.int32)
        unset = spf == 0
        unset[:2] = False
        spf[unset] = idx[unset]
        self.spf = spf
        self._primes = None
        self._mobius = None
        self._mangoldt = None

    def _check(self, n: int):
        if not 1 <= n <= self.limit:
            raise UsageError(f"{n} outside sieve range [1, {self.limit}]")

    @property
    def primes(self) -> np.ndarray:
        if self._primes is None:
            idx = np.arange(self.limit + 1)
            self._primes = np.flatnonzero((self.spf == idx) & (idx >= 2)).astype(np.int64)
        return self._primes

    def primes_upto(self, x: int) -> np.ndarray:
        return self.primes[: np.searchsorted(self.primes, x, side="right")]

    def is_prime(self, n: int) -> bool:
        return 2 <= n <= self.limit and self.spf[n] == n

    def factorize(self, n: int) -> list[tuple[int, int]]:
        """[(p, k), ...] in increasing p."""
        self._check(n)
        out = []
        while n > 1:
            p = int(self.spf[n])
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            out.append((p, k))
        return out

    def mobius(self, n: int) -> int:
        self._check(n)
        fac = self.factorize(n)
        if any(k > 1 for _, k in fac):
            return 0
        return -1 if len(fac) % 2 else 1

    def prime_power(self, n: int) -> tuple[int, int] | None:
        """(p, k) when n = p^k with k >= 1, else None."""
        self._check(n)
        fac = self.factorize(n)
        return fac[0] if len(fac) == 1 else None

    def mangoldt(self, n: int) -> float:
        pp = self.prime_power(n)
        return math.log(pp[0]) if pp else 0.0

    def mobius_array(self) -> np.ndarray:
        """mu(n) for 0 <= n <= limit (mu(0) set to 0), int8."""
        if self._mobius is None:
            mu = np.ones(self.limit + 1, dtype=np.int8)
            mu[0] = 0
            for p in self.primes:
                p = int(p)
                mu[p :: p] *= -1
                if p * p <= self.limit:
                    mu[p * p :: p * p] = 0
            self._mobius = mu
        return self._mobius

    def prime_powers_upto(self, x: int) -> tuple[np.ndarray, np.ndarray]:
        """(n, p) for every prime power n = p^k <= x, sorted by n."""
        if x > self.limit:
            raise UsageError(f"x = {x} exceeds sieve limit {self.limit}")
        ps = self.primes_upto(x)
        ns = [ps]
        bases = [ps]
        small = ps[ps <= math.isqrt(x)]
        power = small * small
        cur = small
        while cur.size:
            keep = power <= x
            cur, power = cur[keep], power[keep]
            ns.append(power)
            bases.append(cur)
            power = power * cur
        n = np.concatenate(ns)
        p = np.concatenate(bases)
        order = np.argsort(n, kind="stable")
        return n[order], p[order]

    def pi(self, x: int, a: int = 0, m: int = 1) -> int:
        """Number of primes p <= x with p = a mod m."""
        ps = self.primes_upto(x)
        return int(np.count_nonzero(ps % m == a % m))


def sieve_build(N: int) -> SieveTables:
    return SieveTables(N)


def _need(sieve: SieveTables | None, x: int) -> SieveTables:
    if sieve is None:
        limit = configured_limit()
        if x > limit:
            raise UsageError(f"x = {x} exceeds sieve limit {limit} (set {ENV_LIMIT})")
        return SieveTables(max(x, 2))
    if x > sieve.limit:
        raise UsageError(f"x = {x} exceeds sieve limit {sieve.limit}")
    return sieve


@dataclass
class StatReport:
    """Table of result rows with a fixed column schema; writes CSV."""

    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise UsageError(f"row has {len(values)} values, schema has {len(self.columns)}")
        self.rows.append(tuple(values))

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def to_csv(self, stream: TextIO | None = None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_value(v) for v in row])
        text = buf.getvalue()
        if stream is not None:
            stream.write(text)
        return text

    @classmethod
    def from_csv(cls, text: str) -> StatReport:
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        rep = cls(tuple(header))
        for row in reader:
            rep.rows.append(tuple(_parse_value(v) for v in row))
        return rep


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, Fraction):
        v = float(v)
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def _parse_value(s: str):
    for conv in (int, float):
        try:
            return conv(s)
        except ValueError:
            pass
    return s


# --- statistics ------------------------------------------------------------------


def mobius_correlation(seq: SequenceDef, N: int, mprime: int = 2, j: int = 1,
                       sieve: SieveTables | None = None) -> complex:
    """(1/N) sum_{n <= N} mu(n) e(j a(n) / m').  For m' = 2, j = 1 this is
    the average of mu(n) (-1)^a(n)."""
    return mobius_correlation_series(seq, [N], mprime, j, sieve)[0]


def mobius_correlation_series(seq: SequenceDef, Ns: Sequence[int], mprime: int = 2, j: int = 1,
                              sieve: SieveTables | None = None) -> list[complex]:
    """:func:`mobius_correlation` at several N from one pass over [1, max N]."""
    if mprime < 1:
        raise UsageError("m' must be >= 1")
    if not Ns or min(Ns) < 1:
        raise UsageError("N must be >= 1")
    top = max(Ns)
    sieve = _need(sieve, top)
    mu = sieve.mobius_array()[: top + 1]
    classes = np.mod(eval_table(seq, top + 1), mprime)
    out = []
    prev = 0
    running = np.zeros(mprime, dtype=np.int64)
    for N in sorted(set(Ns)):
        seg = slice(prev + 1, N + 1)
        running += np.bincount(classes[seg], weights=mu[seg], minlength=mprime).astype(np.int64)
        prev = N
        total = sum(int(running[c]) * _root(j * c, mprime) for c in range(mprime))
        out.append((N, total / N))
    lookup = dict(out)
    return [lookup[N] for N in Ns]


def _root(k: int, m: int) -> complex:
    """e(k / m) with exact reduction of k mod m."""
    k %= m
    if k == 0:
        return 1 + 0j
    if 2 * k == m:
        return -1 + 0j
    return complex(np.exp(2j * np.pi * k / m))


def lambda_weighted_sum(seq: SequenceDef, alpha, theta, x: int,
                        sieve: SieveTables | None = None) -> complex:
    """sum_{n <= x} Lambda(n) e(alpha a(n) + theta n) over prime powers n."""
    sieve = _need(sieve, x)
    n, p = sieve.prime_powers_upto(x)
    logs = np.log(p.astype(float))
    a = eval_many(seq, n)
    frac = rational_alpha(alpha)
    if theta == 0 and frac is not None:
        den = frac.denominator
        classes = np.mod(a * frac.numerator, den)
        total = 0j
        for c in range(den):
            w = math.fsum(logs[classes == c])
            if w:
                total += w * _root(c, den)
        return total
    if frac is not None:
        ap = np.mod(a * frac.numerator, frac.denominator) / frac.denominator
    else:
        ap = np.mod(a * float(alpha), 1.0)
    tp = np.mod(n * float(theta), 1.0)
    z = logs * np.exp(2j * np.pi * np.mod(ap + tp, 1.0))
    return complex(math.fsum(z.real), math.fsum(z.imag))


def chebyshev_psi(x: int, sieve: SieveTables | None = None) -> float:
    sieve = _need(sieve, x)
    _, p = sieve.prime_powers_upto(x)
    return math.fsum(np.log(p.astype(float)))


def _primes_in_class(sieve: SieveTables, x: int, a: int, m: int) -> np.ndarray:
    if m < 1:
        raise UsageError("m must be >= 1")
    if math.gcd(a, m) != 1:
        raise UsageError(f"gcd(a, m) = gcd({a}, {m}) must be 1")
    ps = sieve.primes_upto(x)
    return ps[ps % m == a % m]


def residue_counts(seq: SequenceDef, x: int, a: int, m: int, mprime: int,
                   sieve: SieveTables | None = None) -> StatReport:
    """Primes p <= x, p = a mod m, split by a(p) mod m'; expected share is pi/m'."""
    if mprime < 1:
        raise UsageError("m' must be >= 1")
    sieve = _need(sieve, x)
    ps = _primes_in_class(sieve, x, a, m)
    counts = np.bincount(np.mod(eval_many(seq, ps), mprime), minlength=mprime)
    total = len(ps)
    expected = total / mprime
    report = StatReport(("x", "a", "m", "aprime", "count", "expected", "deviation"))
    for c in range(mprime):
        dev = (int(counts[c]) - expected) / expected if expected else 0.0
        report.add(x, a, m, c, int(counts[c]), expected, dev)
    return report


def weyl_sums(seq: SequenceDef, alpha, x: int, a: int, m: int, H: int,
              sieve: SieveTables | None = None) -> StatReport:
    """(1/pi(x; a, m)) sum_{p} e(h alpha a(p)) for h = 1..H."""
    if H < 1:
        raise UsageError("H must be >= 1")
    sieve = _need(sieve, x)
    ps = _primes_in_class(sieve, x, a, m)
    vals = eval_many(seq, ps)
    # distinct a-values are few; sum multiplicities per value
    uniq, mult = np.unique(vals, return_counts=True)
    frac = rational_alpha(alpha)
    report = StatReport(("h", "re", "im", "modulus"))
    for h in range(1, H + 1):
        if frac is not None:
            r = np.mod(uniq * (h * frac.numerator), frac.denominator) / frac.denominator
        else:
            r = np.mod(uniq * (h * float(alpha)), 1.0)
        s = (mult * np.exp(2j * np.pi * r)).sum() / len(ps) if len(ps) else 0j
        report.add(h, s.real, s.imag, abs(s))
    return report


def prime_theorem_constants(q: int) -> tuple[float, float]:
    """(c1(q), c2(q)) of the von Mangoldt estimate, as formulas only:

    c2 = 4 + log(q)/4 + max(omega(q), 2)/4,
    c1 = max(tau(q) log q, log(q)^10)^(1/4) * log(q)^(2 - 2 c2).
    """
    if q < 2:
        raise UsageError("q must be >= 2")
    fac = []
    n, p = q, 2
    while p * p <= n:
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            fac.append(k)
        p += 1
    if n > 1:
        fac.append(1)
    tau = math.prod(k + 1 for k in fac)
    omega = len(fac)
    lq = math.log(q)
    c2 = 4 + lq / 4 + max(omega, 2) / 4
    c1 = max(tau * lq, lq**10) ** 0.25 * lq ** (2 - 2 * c2)
    return c1, c2
