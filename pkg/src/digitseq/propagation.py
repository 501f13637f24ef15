"""Counting where truncation changes increments of f.

For l < q^lambda the question is whether some k1, k2 < q^kappa give

    f(l q^kappa + k1 + k2) / f(l q^kappa + k1)
        != f_trunc(l q^kappa + k1 + k2) / f_trunc(l q^kappa + k1)

with truncation at kappa + rho digits.  :func:`exceptional_set` answers it by
enumeration; :func:`structured_sets` builds the three digit-pattern sets that
cover the exceptional l and compares their sizes with closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded, UsageError
from .sequences import AssociatedFunction, eval_table, rational_alpha

DEFAULT_BUDGET = 2**30
PHASE_TOL = 1e-9


@dataclass(frozen=True)
class PropagationQuery:
    fn: AssociatedFunction
    lam: int
    kappa: int
    rho: int
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.kappa < 1:
            raise UsageError("kappa must be >= 1")
        if not 0 <= self.rho < self.lam:
            raise UsageError("need 0 <= rho < lambda")
        q = self.fn.seq.q
        if q ** (self.lam + 2 * self.kappa) > self.budget:
            raise BudgetExceeded(
                f"q^(lambda + 2 kappa) = {q ** (self.lam + 2 * self.kappa)} exceeds budget {self.budget}"
            )


@dataclass
class PropagationReport:
    exceptional_count: int
    cardA: int
    cardB: int
    cardC: int
    bound: float
    closed_A: int
    closed_B: int
    exceptional: frozenset = field(default_factory=frozenset, repr=False)
    A: frozenset = field(default_factory=frozenset, repr=False)
    B: frozenset = field(default_factory=frozenset, repr=False)
    C: frozenset = field(default_factory=frozenset, repr=False)
    bound_scale: float = 0.0

    @property
    def covered(self) -> bool:
        return self.exceptional <= (self.A | self.B | self.C)

    @property
    def fitted_constant(self) -> float:
        """exceptional_count / q^(lambda - rho + ln rho), the empirical constant."""
        return self.exceptional_count / self.bound_scale if self.bound_scale else 0.0


def growth_bound(q: int, beta: int, lam: int, rho: int) -> float:
    """q^beta * q^(lambda - rho + ln rho); ln 0 is read as 0."""
    log_rho = math.log(rho) if rho > 0 else 0.0
    return q**beta * q ** (lam - rho + log_rho)


def _equal_phases(fn: AssociatedFunction, diff: np.ndarray) -> np.ndarray:
    """True where e(alpha * diff) == 1."""
    frac = rational_alpha(fn.alpha)
    if frac is not None:
        return np.mod(diff * frac.numerator, frac.denominator) == 0
    x = np.mod(diff * float(fn.alpha), 1.0)
    return np.minimum(x, 1.0 - x) < PHASE_TOL


def exceptional_set(query: PropagationQuery) -> frozenset[int]:
    """All l < q^lambda for which some (k1, k2) breaks the truncation identity."""
    fn, lam, kappa, rho = query.fn, query.lam, query.kappa, query.rho
    q = fn.seq.q
    Qk = q**kappa
    mod = q ** (kappa + rho)
    a = eval_table(fn.seq, q ** (lam + kappa) + 2 * Qk)
    k = np.arange(Qk, dtype=np.int64)
    k1 = k[:, None]
    k2 = k[None, :]
    bad = []
    # one l at a time keeps memory at q^(2 kappa); chunk l for speed
    chunk = max(1, 2**20 // (Qk * Qk))
    ls = np.arange(q**lam, dtype=np.int64)
    for s in range(0, ls.size, chunk):
        lc = ls[s : s + chunk, None, None]
        n1 = lc * Qk + k1
        n2 = n1 + k2
        full = a[n2] - a[n1]
        trunc = a[n2 % mod] - a[n1 % mod]
        ok = _equal_phases(fn, full - trunc).all(axis=(1, 2))
        bad.extend(int(x) for x in ls[s : s + chunk][~ok])
    return frozenset(bad)


def exceptional_count(query: PropagationQuery) -> int:
    return len(exceptional_set(query))


def _digits(ls: np.ndarray, q: int, count: int) -> np.ndarray:
    """(len(ls), count) array of the lowest ``count`` base-q digits."""
    return (ls[:, None] // q ** np.arange(count, dtype=np.int64)) % q


def covering_sets(q: int, beta: int, lam: int, rho: int) -> tuple[frozenset, frozenset, frozenset]:
    """The sets A, B, C of l covering every exceptional l.

    A: q^rho <= l < q^lambda with digits 0 .. rho-beta+1 all equal to q-1.
    B: q^rho <= l < q^lambda whose first digit below q-1 sits at some
       i <= rho-beta+1 and whose digits i+beta-1 .. rho-1 are all 0.
    C: {q^rho - 1, q^rho}.
    """
    if rho < beta - 1:
        raise UsageError("need rho >= beta - 1")
    if lam <= rho:
        raise UsageError("need lambda > rho")
    ls = np.arange(q**rho, q**lam, dtype=np.int64)
    d = _digits(ls, q, rho)
    top = q - 1
    width = rho - beta + 2
    in_A = (d[:, :width] == top).all(axis=1)
    # index of first digit != q-1 (rho if none)
    not_top = d != top
    first = np.where(not_top.any(axis=1), not_top.argmax(axis=1), rho)
    in_B = np.zeros(ls.size, dtype=bool)
    for i in range(width):
        zeros = (d[:, i + beta - 1 : rho] == 0).all(axis=1)
        in_B |= (first == i) & zeros
    A = frozenset(int(x) for x in ls[in_A])
    B = frozenset(int(x) for x in ls[in_B])
    C = frozenset({q**rho - 1, q**rho})
    return A, B, C


def closed_form_A(q: int, beta: int, lam: int, rho: int) -> int:
    return q ** (beta - 2) * (q ** (lam - rho) - 1)


def closed_form_B(q: int, beta: int, lam: int, rho: int) -> int:
    """(rho - beta + 2) q^(beta-1) (q^(lambda-rho) - 1).

    This counts each slice B_i without its "digit i differs from q-1" clause,
    so it bounds |B| from above; the exact size is :func:`exact_size_B`.
    """
    return (rho - beta + 2) * q ** (beta - 1) * (q ** (lam - rho) - 1)


def exact_size_B(q: int, beta: int, lam: int, rho: int) -> int:
    """(rho - beta + 2) (q-1) q^(beta-2) (q^(lambda-rho) - 1)."""
    return (rho - beta + 2) * (q - 1) * q ** (beta - 2) * (q ** (lam - rho) - 1)


def structured_sets(query: PropagationQuery) -> PropagationReport:
    fn, lam, kappa, rho = query.fn, query.lam, query.kappa, query.rho
    q, beta = fn.seq.q, fn.seq.beta
    A, B, C = covering_sets(q, beta, lam, rho)
    exc = exceptional_set(query)
    scale = q ** (lam - rho + (math.log(rho) if rho > 0 else 0.0))
    return PropagationReport(
        exceptional_count=len(exc),
        cardA=len(A),
        cardB=len(B),
        cardC=len(C),
        bound=growth_bound(q, beta, lam, rho),
        closed_A=closed_form_A(q, beta, lam, rho),
        closed_B=closed_form_B(q, beta, lam, rho),
        exceptional=exc,
        A=A,
        B=B,
        C=C,
        bound_scale=scale,
    )
