"""Transfer matrices over the descent graph of short digit words.

States are the D = (q^beta - 1)/(q - 1) words of length < beta, indexed by
:class:`~digitseq.words.WordEnum`.  Reading one more low digit l moves a
state w to l.w while |w| < beta - 1, and to l.(w without its last letter)
once |w| = beta - 1, in which case the step also picks up the phase
e(alpha * g(l.w)).

Two independent routes give the infinity norm of the beta-step product:
:func:`norm_inf_direct` multiplies the matrices, :func:`norm_inf_graph`
sums path phases written directly in terms of words.  All matrix routines
accept an array of t values and then return a leading batch axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator

import numpy as np

from .errors import UsageError
from .sequences import (
    AssociatedFunction,
    DigitPolynomial,
    SequenceDef,
    eval_many,
    rational_alpha,
)
from .words import Word, WordEnum, words_of_length


def dist_to_int(x):
    """Distance from x to the nearest integer; exact for ints and Fractions."""
    if isinstance(x, (int, Fraction)):
        r = Fraction(x) % 1
        return min(r, 1 - r)
    r = math.fmod(abs(float(x)), 1.0)
    return min(r, 1.0 - r)


def _phase(x) -> np.ndarray:
    return np.exp(2j * np.pi * np.mod(x, 1.0))


def _alpha_phase(alpha, k) -> np.ndarray:
    """e(alpha * k) for an integer array k, exact reduction when alpha is rational."""
    k = np.asarray(k, dtype=np.int64)
    frac = rational_alpha(alpha)
    if frac is not None:
        return _phase(np.mod(k * frac.numerator, frac.denominator) / frac.denominator)
    return _phase(k * float(alpha))


@dataclass(frozen=True)
class TransferMatrix:
    entries: np.ndarray
    alpha: float
    t: float

    def norm_inf(self) -> float:
        return float(np.abs(self.entries).sum(axis=-1).max(axis=-1))


class GenealogyContext:
    """Descent-graph data for one associated function.

    ``target[l, i]`` is the state reached from state i by digit l and
    ``increment[l, i]`` the g value collected on that step (0 for short states).
    """

    def __init__(self, fn: AssociatedFunction):
        self.fn = fn
        seq = fn.seq
        self.seq = seq
        self.q = seq.q
        self.beta = seq.beta
        self.enum = WordEnum(seq.beta, seq.q)
        self.D = len(self.enum)
        q, D = self.q, self.D
        self.target = np.zeros((q, D), dtype=np.int64)
        self.increment = np.zeros((q, D), dtype=np.int64)
        for i, w in enumerate(self.enum):
            for l in range(q):
                lw = Word((l,), q) + w
                if len(w) < self.beta - 1:
                    self.target[l, i] = self.enum.index(lw)
                else:
                    self.target[l, i] = self.enum.index(lw.prefix(self.beta - 1))
                    self.increment[l, i] = seq.g[lw.value]
        rows = np.arange(D)
        self._alpha_steps = np.zeros((q, D, D), dtype=complex)
        phases = _alpha_phase(fn.alpha, self.increment)
        for l in range(q):
            self._alpha_steps[l, rows, self.target[l]] = phases[l]

    @property
    def alpha(self):
        return self.fn.alpha

    def zero_word_index(self, k: int) -> int:
        return WordEnum.index_of_length(k, self.q)


def genealogical_vector(ctx: GenealogyContext, n: int) -> np.ndarray:
    """V_n[i] = f(q^|w| n + value(w)) for the i-th short word w."""
    q = ctx.q
    idx = np.array([q ** len(w) * n + w.value for w in ctx.enum], dtype=np.int64)
    return ctx.fn.phase(eval_many(ctx.seq, idx))


def step_matrix(ctx: GenealogyContext, l: int, t):
    """Matrix carrying V_n e(qnt) to V_{qn+l} e((qn+l)t)."""
    if not 0 <= l < ctx.q:
        raise UsageError(f"digit {l} out of range for base {ctx.q}")
    tt = np.asarray(t, dtype=float)
    entries = _phase(l * tt)[..., None, None] * ctx._alpha_steps[l]
    return _wrap(ctx, entries, t)


def _transfer_entries(ctx: GenealogyContext, t) -> np.ndarray:
    tt = np.asarray(t, dtype=float)
    weights = _phase(np.multiply.outer(tt, np.arange(ctx.q)))
    return np.tensordot(weights, ctx._alpha_steps, axes=([-1], [0]))


def transfer_matrix(ctx: GenealogyContext, t):
    """Sum of the q step matrices."""
    return _wrap(ctx, _transfer_entries(ctx, t), t)


def _genealogical_entries(ctx: GenealogyContext, t) -> np.ndarray:
    tt = np.asarray(t, dtype=float)
    # k increasing left to right: M(t) M(qt) ... M(q^(beta-1) t)
    out = _transfer_entries(ctx, tt)
    for k in range(1, ctx.beta):
        out = out @ _transfer_entries(ctx, tt * ctx.q**k)
    return out


def genealogical_matrix(ctx: GenealogyContext, t):
    """Ordered product of transfer matrices at t, qt, ..., q^(beta-1) t."""
    return _wrap(ctx, _genealogical_entries(ctx, t), t)


def _wrap(ctx, entries, t):
    if np.ndim(t) == 0:
        return TransferMatrix(entries, ctx.alpha, float(t))
    return entries


def norm_inf_direct(ctx: GenealogyContext, t):
    """Maximum absolute row sum of the genealogical matrix."""
    norms = np.abs(_genealogical_entries(ctx, t)).sum(axis=-1).max(axis=-1)
    return float(norms) if np.ndim(t) == 0 else norms


class _PathTable:
    """Integer data for the closed-form norm: for each start word gamma, end
    word w of length beta-1 and final letter k, the total g collected."""

    def __init__(self, ctx: GenealogyContext):
        q, beta, seq = ctx.q, ctx.beta, ctx.seq
        ends = list(words_of_length(beta - 1, q))
        self.coef = np.array(
            [[k + q * w.value for k in range(q)] for w in ends], dtype=np.int64
        )
        G = np.zeros((ctx.D, len(ends), q), dtype=np.int64)
        for gi, gamma in enumerate(ctx.enum):
            for wi, w in enumerate(ends):
                for k in range(q):
                    kw = Word((k,), q)
                    G[gi, wi, k] = sum(
                        seq.g_of(w.suffix(len(w) - m) + kw + gamma.prefix(m))
                        for m in range(len(gamma) + 1)
                    )
        self.G = G


def _path_table(ctx: GenealogyContext) -> _PathTable:
    table = getattr(ctx, "_path_table", None)
    if table is None:
        table = _PathTable(ctx)
        ctx._path_table = table
    return table


def norm_inf_graph(ctx: GenealogyContext, t):
    """Closed-form infinity norm from path encodings.

    For each start word gamma (|gamma| < beta) the row sum is
    sum over end words w of | sum_k e(t (k + q value(w)) + alpha * G) |,
    with G = sum_{m=0}^{|gamma|} g(last beta-1-m letters of w . k . first m
    letters of gamma); the norm is the largest row sum.
    """
    table = _path_table(ctx)
    tt = np.asarray(t, dtype=float)
    tphase = _phase(np.multiply.outer(tt, table.coef))  # (..., W, q)
    aphase = _alpha_phase(ctx.alpha, table.G)  # (D, W, q)
    inner = np.abs((tphase[..., None, :, :] * aphase).sum(axis=-1))  # (..., D, W)
    norms = inner.sum(axis=-1).max(axis=-1)
    return float(norms) if np.ndim(t) == 0 else norms


def path_encoding(ctx: GenealogyContext, gamma: Word | str, omega: Word | str,
                  steps: int, t: float) -> complex:
    """Sum of e(argument) over all descent paths from gamma to omega in
    ``steps`` steps.  Step j (1-based) with digit l adds l q^(j-1) t, plus
    alpha g(l.w) when it leaves a word w of length beta-1."""
    q, beta = ctx.q, ctx.beta
    gamma = Word.parse(gamma, q) if isinstance(gamma, str) else gamma
    omega = Word.parse(omega, q) if isinstance(omega, str) else omega
    frac = rational_alpha(ctx.alpha)
    total = 0j
    for digits in product(range(q), repeat=steps):
        w = gamma
        tpart = 0.0
        gsum = 0
        for j, l in enumerate(digits):
            lw = Word((l,), q) + w
            tpart += l * q**j * t
            if len(w) < beta - 1:
                w = lw
            else:
                gsum += ctx.seq.g_of(lw)
                w = lw.prefix(beta - 1)
        if w == omega:
            apart = float((frac * gsum) % 1) if frac is not None else float(ctx.alpha) * gsum
            total += complex(np.exp(2j * np.pi * (tpart + apart)))
    return total


# --- the second-difference invariant -----------------------------------------


@dataclass(frozen=True)
class KWitness:
    """Words w1, w2 of length beta-1 agreeing except in their first letter,
    distinct letters k1, k2, and K = g(w1 k1) - g(w1 k2) - g(w2 k1) + g(w2 k2)."""

    omega1: Word
    omega2: Word
    k1: int
    k2: int
    K: int

    def distance(self, alpha):
        """||alpha K||, the distance of alpha*K to the nearest integer."""
        frac = rational_alpha(alpha)
        return dist_to_int(frac * self.K if frac is not None else float(alpha) * self.K)


def k_value(seq: SequenceDef, omega1: Word | str, omega2: Word | str, k1: int, k2: int) -> int:
    q, beta = seq.q, seq.beta
    w1 = Word.parse(omega1, q) if isinstance(omega1, str) else omega1
    w2 = Word.parse(omega2, q) if isinstance(omega2, str) else omega2
    if len(w1) != beta - 1 or len(w2) != beta - 1:
        raise UsageError(f"omega1, omega2 must have length {beta - 1}")
    if w1 == w2:
        raise UsageError("omega1 and omega2 must differ")
    if w1.suffix(beta - 2) != w2.suffix(beta - 2):
        raise UsageError(f"omega1 and omega2 must share their last {beta - 2} letters")
    if k1 == k2 or not (0 <= k1 < q and 0 <= k2 < q):
        raise UsageError("k1, k2 must be distinct letters")
    c1, c2 = Word((k1,), q), Word((k2,), q)
    return seq.g_of(w1 + c1) - seq.g_of(w1 + c2) - seq.g_of(w2 + c1) + seq.g_of(w2 + c2)


def admissible_witnesses(seq: SequenceDef) -> Iterator[KWitness]:
    """All admissible (w1, w2, k1, k2), in (index of w1, index of w2, k1, k2) order."""
    q, beta = seq.q, seq.beta
    ends = list(words_of_length(beta - 1, q))
    for w1 in ends:
        for w2 in ends:
            if w1 == w2 or w1.suffix(beta - 2) != w2.suffix(beta - 2):
                continue
            for k1 in range(q):
                for k2 in range(q):
                    if k1 != k2:
                        yield KWitness(w1, w2, k1, k2, k_value(seq, w1, w2, k1, k2))


def best_k(fn: AssociatedFunction) -> KWitness:
    """Admissible witness maximising ||alpha K||; the first one wins ties."""
    best, best_d = None, None
    for wit in admissible_witnesses(fn.seq):
        d = wit.distance(fn.alpha)
        if best is None or d > best_d:
            best, best_d = wit, d
    return best


def occurrence_witness(words, q: int = 2) -> KWitness | None:
    """Witness with K = 1 for an occurrence counter, when some w in the set
    admits letters l1, l2 with l1.w[1:], w[:-1].l2 and l1.w[1:-1].l2 all
    outside the set."""
    B = {w if isinstance(w, Word) else Word.parse(w, q) for w in words}
    if not B:
        return None
    k = len(next(iter(B)))
    for w in sorted(B, key=lambda x: x.letters):
        middle = Word(w.letters[1:-1], q)
        for l1 in range(q):
            if Word((l1,), q) + w.suffix(k - 1) in B:
                continue
            for l2 in range(q):
                if w.prefix(k - 1) + Word((l2,), q) in B:
                    continue
                if Word((l1,), q) + middle + Word((l2,), q) in B:
                    continue
                w1 = w.prefix(k - 1)
                w2 = Word((l1,), q) + middle
                g = {x.value for x in B}
                K = sum(
                    s * (v.value in g)
                    for s, v in (
                        (1, w1 + Word((w.letter(0),), q)),
                        (-1, w1 + Word((l2,), q)),
                        (-1, w2 + Word((w.letter(0),), q)),
                        (1, w2 + Word((l2,), q)),
                    )
                )
                return KWitness(w1, w2, w.letter(0), l2, K)
    return None


def kalai_witness(poly: DigitPolynomial, q: int = 2) -> KWitness | None:
    """Witness for P = X_k X_0 P1 + P2: pick x with P1(1, x, 1) = 1 and take
    w1 = 1.x, w2 = 0.x, k1 = 1, k2 = 0.  ``None`` when no such x exists or P
    does not have the required shape."""
    if poly.degree > poly.k + 1:
        return None
    p1, _ = poly.split_corner()
    k = poly.k
    for x in product(range(q), repeat=k - 1):
        if p1((1, *x, 1)) == 1:
            w1 = Word((1, *x), q)
            w2 = Word((0, *x), q)
            K = poly((1, *x, 1)) - poly((1, *x, 0)) - poly((0, *x, 1)) + poly((0, *x, 0))
            return KWitness(w1, w2, 1, 0, K)
    return None


def pair_bound(delta) -> float:
    """4 - 8 sin^2(pi ||delta|| / 4): bound on |e(x+a)+e(x)| + |e(x'+xi)+e(x')|
    when xi - a = delta."""
    return 4.0 - 8.0 * math.sin(math.pi * float(dist_to_int(delta)) / 4.0) ** 2


def contraction_bound(fn: AssociatedFunction, witness: KWitness) -> float:
    """Uniform-in-t bound q^beta - 8 sin^2(pi ||alpha K|| / 4) on the norm."""
    seq = fn.seq
    return seq.q**seq.beta - 4.0 + pair_bound(witness.distance(fn.alpha))


def decay_rate(fn: AssociatedFunction) -> float:
    """Per-digit exponent log_q(q^beta / B) / beta with B the best contraction bound."""
    seq = fn.seq
    wit = best_k(fn)
    if wit is None:
        return 0.0
    bound = contraction_bound(fn, wit)
    full = seq.q**seq.beta
    if bound >= full:
        return 0.0
    return math.log(full / bound, seq.q) / seq.beta


def uniform_fourier_bound(fn: AssociatedFunction, N: int) -> float:
    """(B / q^beta)^floor(N / beta), valid for every real t."""
    seq = fn.seq
    wit = best_k(fn)
    full = seq.q**seq.beta
    bound = contraction_bound(fn, wit) if wit is not None else full
    return (bound / full) ** (N // seq.beta)


# --- Fourier sums --------------------------------------------------------------


def kappa_shift(seq: SequenceDef, kappa: int) -> tuple[int, int]:
    """(kappa', c) with a(q^kappa n) = a(q^kappa' n) + c for n >= 1 and kappa' < beta."""
    if kappa < seq.beta:
        return kappa, 0
    return seq.beta - 1, (kappa - seq.beta + 1) * seq.g[0]


def _fourier_coefficients(fn: AssociatedFunction, N: int, kappa: int) -> np.ndarray:
    if N < 1 or kappa < 0:
        raise UsageError("need N >= 1 and kappa >= 0")
    q = fn.seq.q
    n = np.arange(q**N, dtype=np.int64) * q**kappa
    return fn.phase(eval_many(fn.seq, n))


def fourier_sum(fn: AssociatedFunction, N: int, kappa: int, t):
    """(1/q^N) sum_{n < q^N} f(q^kappa n) e(-n t), by direct summation."""
    c = _fourier_coefficients(fn, N, kappa)
    n = np.arange(c.size, dtype=float)
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty(tt.shape, dtype=complex)
    chunk = max(1, 2**22 // c.size)
    flat = tt.ravel()
    res = out.ravel()
    for s in range(0, flat.size, chunk):
        ts = flat[s : s + chunk]
        res[s : s + chunk] = _phase(-np.multiply.outer(ts, n)) @ c / c.size
    out = res.reshape(tt.shape)
    return complex(out[0]) if np.ndim(t) == 0 else out


def fourier_sum_grid(fn: AssociatedFunction, N: int, kappa: int, gridsize: int) -> np.ndarray:
    """fourier_sum at t = j / gridsize for j < gridsize, via one FFT."""
    c = _fourier_coefficients(fn, N, kappa)
    folded = np.zeros(gridsize, dtype=complex)
    np.add.at(folded, np.arange(c.size) % gridsize, c)
    return np.fft.fft(folded) / c.size


def empirical_sup(fn: AssociatedFunction, N: int, kappa: int, gridsize: int) -> float:
    """Largest |fourier_sum| over the uniform grid of ``gridsize`` points."""
    return float(np.abs(fourier_sum_grid(fn, N, kappa, gridsize)).max())


def matrix_fourier_bound(ctx: GenealogyContext, N: int, t):
    """q^(-beta m) prod_{i<m} ||Mtilde(alpha, -q^(i beta) t)||, m = floor(N/beta).

    The Fourier sum carries e(-nt), so the genealogical matrices are taken at -t.
    """
    q, beta = ctx.q, ctx.beta
    tt = np.asarray(t, dtype=float)
    m = N // beta
    out = np.ones(tt.shape)
    for i in range(m):
        out = out * norm_inf_direct(ctx, -tt * q ** (i * beta)) / q**beta
    return float(out) if np.ndim(t) == 0 else out
