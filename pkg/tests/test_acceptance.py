"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run under pytest (lines appear in the terminal output) or directly with
``python tests/test_acceptance.py``.
"""

import math
import sys
import time
from fractions import Fraction
from itertools import combinations, product
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))
import oracles  # noqa: E402

from digitseq.genealogy import (  # noqa: E402
    GenealogyContext,
    admissible_witnesses,
    best_k,
    contraction_bound,
    fourier_sum,
    fourier_sum_grid,
    k_value,
    matrix_fourier_bound,
    norm_inf_direct,
    norm_inf_graph,
)
from digitseq.numtheory import (  # noqa: E402
    chebyshev_psi,
    lambda_weighted_sum,
    mobius_correlation_series,
    residue_counts,
    sieve_build,
)
from digitseq.propagation import (  # noqa: E402
    PropagationQuery,
    closed_form_A,
    closed_form_B,
    covering_sets,
    exact_size_B,
    exceptional_set,
)
from digitseq.sequences import (  # noqa: E402
    AssociatedFunction,
    DigitPolynomial,
    builtin_sequence,
    digit_polynomial,
    eval_many,
    eval_table,
    evaluate,
    evaluate_by_recursion,
    from_table,
    occurrence,
    rudin_shapiro,
)
from digitseq.words import Word, words_of_length  # noqa: E402

HALF = Fraction(1, 2)
RS = rudin_shapiro()
CRITERIA = {}


def criterion(number, title):
    def register(fn):
        CRITERIA[number] = (title, fn)
        return fn
    return register


def random_table(q, beta, seed):
    rng = np.random.default_rng(seed)
    return from_table(q, beta, rng.integers(-3, 4, q**beta).tolist(),
                      rng.integers(-3, 4, q ** (beta - 1)).tolist())


def builtin_families(q):
    """One representative per constructor (and a few parameter choices) in base q."""
    ba = [0] * q**2
    ba[q] = 1  # g("10") = 1
    fams = [
        ("rudin-shapiro", rudin_shapiro(q)),
        ("beta-delta d=2", builtin_sequence("beta-delta", q, delta=2)),
        ("beta-delta d=3", builtin_sequence("beta-delta", q, delta=3)),
        ("b-d d=2", builtin_sequence("b-d", q, d=2)),
        ("block-additive", builtin_sequence("block-additive", q, beta=2, g=ba)),
        ("block-additive-finite", builtin_sequence("block-additive-finite", q, beta=2, g=ba)),
        ("occurrence 101", occurrence(["101"], q)),
        ("occurrence 00,11", occurrence(["00", "11"], q)),
        ("polynomial X2*X0-X1", digit_polynomial("X2*X0 - X1", 2, q)),
        ("polynomial X1+X0", digit_polynomial("X1 + X0", 1, q)),
    ]
    if q == 3:
        fams.append(("occurrence 12,21", occurrence(["12", "21"], 3)))
    return fams


# --- 1 ---------------------------------------------------------------------------------


@criterion(1, "norm formula equivalence")
def check_norm_formula():
    start = time.perf_counter()
    worst = 0.0
    pairs = 0
    for q, beta in product((2, 3), (2, 3)):
        seq = random_table(q, beta, 100 * q + beta)
        rng = np.random.default_rng(1000 * q + beta)
        for alpha, t in rng.random((100, 2)):
            ctx = GenealogyContext(AssociatedFunction(seq, float(alpha)))
            worst = max(worst, abs(norm_inf_graph(ctx, float(t)) - norm_inf_direct(ctx, float(t))))
            pairs += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 30
    return ok, f"max |graph - direct| = {worst:.3g} over {pairs} pairs, {elapsed:.1f} s"


# --- 2 ---------------------------------------------------------------------------------


@criterion(2, "uniform contraction bound on a 4096-point grid")
def check_contraction():
    ts = np.arange(4096) / 4096
    cases = [("rudin-shapiro q=2 alpha=1/2", RS, HALF)]
    cases += [(f"{name} q=2 alpha=1/2", seq, HALF) for name, seq in builtin_families(2)]
    cases += [(f"{name} q=3 alpha=1/3", seq, Fraction(1, 3)) for name, seq in builtin_families(3)]
    checked, skipped, failures = 0, [], []
    rs_bound = None
    for name, seq, alpha in cases:
        fn = AssociatedFunction(seq, alpha)
        wit = best_k(fn)
        if wit.distance(alpha) == 0:
            skipped.append(name)
            continue
        bound = contraction_bound(fn, wit)
        if seq is RS:
            rs_bound = bound
        top = norm_inf_direct(GenealogyContext(fn), ts).max()
        checked += 1
        if top > bound + 1e-9:
            failures.append(f"{name}: {top} > {bound}")
    expected_rs = 4 - 8 * math.sin(math.pi / 8) ** 2
    ok = not failures and rs_bound is not None and abs(rs_bound - expected_rs) < 1e-12
    detail = (f"{checked} families within bound, RS bound {rs_bound:.6f}; "
              f"skipped (||alpha K|| = 0): {', '.join(skipped)}")
    return ok, detail + (f"; violations: {failures}" if failures else "")


# --- 3 ---------------------------------------------------------------------------------


@criterion(3, "Fourier sum below the matrix-product bound")
def check_fourier_bound():
    start = time.perf_counter()
    fn = AssociatedFunction(RS, HALF)
    ctx = GenealogyContext(fn)
    G = 2**14
    ts = np.arange(G) / G
    bound = matrix_fourier_bound(ctx, 12, ts)
    worst_margin = -np.inf
    for kappa in range(4):
        s = np.abs(fourier_sum_grid(fn, 12, kappa, G))
        # spot-check the FFT against direct summation
        sample = np.arange(0, G, 257)
        direct = np.abs(fourier_sum(fn, 12, kappa, ts[sample]))
        if np.abs(direct - s[sample]).max() > 1e-12:
            return False, f"FFT and direct sums disagree at kappa={kappa}"
        worst_margin = max(worst_margin, float((s - bound).max()))
    elapsed = time.perf_counter() - start
    ok = worst_margin <= 1e-9 and elapsed < 120
    return ok, f"max(|S| - bound) = {worst_margin:.3g} over 4 x {G} points, {elapsed:.1f} s"


# --- 4 ---------------------------------------------------------------------------------


@criterion(4, "evaluator equals recursion oracle; definition recursions hold")
def check_engine_oracle():
    start = time.perf_counter()
    mismatches = []
    count = 0
    for q in (2, 3):
        limit = q**10
        for name, seq in builtin_families(q):
            table = eval_table(seq, limit)
            many = eval_many(seq, np.arange(limit))
            oracle = [evaluate_by_recursion(seq, n) for n in range(limit)]
            closed = [evaluate(seq, n) for n in range(limit)]
            if not (table.tolist() == oracle == closed == many.tolist()):
                mismatches.append(f"{name} q={q}")
            count += 1
    # recursions (1) and (2) exhaustively for n < q^4
    rec_fail = []
    seqs = [(f"random q={q} beta={b}", random_table(q, b, 7 * q + b)) for q in (2, 3) for b in (2, 3)]
    seqs += [(f"{name} q={q}", s) for q in (2, 3) for name, s in builtin_families(q)]
    for name, seq in seqs:
        q, beta = seq.q, seq.beta
        for w in words_of_length(beta, q):
            gw = seq.g_of(w)
            head = w.prefix(beta - 1).value
            for n in range(1, q**4):
                if evaluate(seq, q**beta * n + w.value) - evaluate(seq, q ** (beta - 1) * n + head) != gw:
                    rec_fail.append(f"{name} eq1 n={n} w={w}")
                    break
            if w.letters[0] and evaluate(seq, w.value) - evaluate(seq, head) != gw:
                rec_fail.append(f"{name} eq2 w={w}")
    elapsed = time.perf_counter() - start
    ok = not mismatches and not rec_fail
    return ok, (f"{count} family/base pairs up to q^10, recursions on {len(seqs)} sequences, {elapsed:.1f} s"
                + (f"; mismatches {mismatches} {rec_fail[:5]}" if not ok else ""))


# --- 5 ---------------------------------------------------------------------------------


@criterion(5, "propagation covering sets and their closed forms")
def check_propagation():
    start = time.perf_counter()
    q = 2
    families = {
        2: [RS, builtin_sequence("block-additive", 2, beta=2, g=[0, 0, 1, 0])],
        3: [builtin_sequence("beta-delta", 2, delta=2), occurrence(["101"]),
            digit_polynomial("X2*X0 - X1", 2)],
    }
    bad_A, bad_B, bad_C, uncovered, exact_B_bad = [], [], [], [], []
    cases = 0
    for beta in (2, 3):
        for lam in range(6, 11):
            for rho in range(beta - 1, lam):
                A, B, C = covering_sets(q, beta, lam, rho)
                if len(A) != closed_form_A(q, beta, lam, rho):
                    bad_A.append((beta, lam, rho))
                if len(B) != closed_form_B(q, beta, lam, rho):
                    bad_B.append((beta, lam, rho, len(B), closed_form_B(q, beta, lam, rho)))
                if len(B) != exact_size_B(q, beta, lam, rho):
                    exact_B_bad.append((beta, lam, rho))
                if len(C) != 2:
                    bad_C.append((beta, lam, rho))
                cover = A | B | C
                for kappa in (1, 2, 3):
                    for seq in families[beta]:
                        exc = exceptional_set(PropagationQuery(AssociatedFunction(seq, HALF), lam, kappa, rho))
                        cases += 1
                        if not exc <= cover:
                            uncovered.append((seq.kind, beta, lam, kappa, rho, sorted(exc - cover)[:3]))
    elapsed = time.perf_counter() - start
    ok = not (bad_A or bad_B or bad_C or uncovered) and elapsed < 120
    parts = [
        f"cardA {'ok' if not bad_A else f'mismatch {bad_A[:3]}'}",
        f"cardC {'ok' if not bad_C else 'mismatch'}",
        f"covering {'ok' if not uncovered else f'fails {uncovered[:3]}'} on {cases} queries",
        (f"cardB = (rho-beta+2) q^(beta-1) (q^(lambda-rho)-1) fails on {len(bad_B)} cases, "
         f"e.g. (beta, lambda, rho, enumerated, formula) = {bad_B[0]}" if bad_B else "cardB ok"),
        f"enumerated cardB equals (rho-beta+2)(q-1)q^(beta-2)(q^(lambda-rho)-1) "
        f"{'everywhere' if not exact_B_bad else f'except {exact_B_bad[:3]}'}",
        f"{elapsed:.1f} s",
    ]
    return ok, "; ".join(parts)


# --- 6 ---------------------------------------------------------------------------------


def _occurrence_conditions(B, q):
    """(w, l1, l2) meeting the three non-membership conditions, or None."""
    for w in sorted(B):
        for l1 in range(q):
            if str(l1) + w[1:] in B:
                continue
            for l2 in range(q):
                if w[:-1] + str(l2) in B or str(l1) + w[1:-1] + str(l2) in B:
                    continue
                return w, l1, l2
    return None


@criterion(6, "K values of the standard examples")
def check_k_values():
    problems = []
    n_occ = 0
    for q, k in ((2, 2), (2, 3), (3, 2)):
        words = ["".join(map(str, t)) for t in product(range(q), repeat=k)]
        for size in range(1, len(words) + 1):
            for B in combinations(words, size):
                found = _occurrence_conditions(set(B), q)
                if found is None:
                    continue
                w, l1, l2 = found
                n_occ += 1
                seq = occurrence(B, q)
                K = k_value(seq, w[:-1], str(l1) + w[1:-1], int(w[-1]), l2)
                if K != 1:
                    problems.append(f"occurrence {B}: K = {K}")
    double = occurrence(["00", "11"])
    ks = {abs(w.K) for w in admissible_witnesses(double)}
    if ks != {2}:
        problems.append(f"00/11 counter |K| values {ks}")
    linear = digit_polynomial("X1 + X0", 1)
    if {w.K for w in admissible_witnesses(linear)} != {0}:
        problems.append("X1 + X0 has nonzero K")
    n_kalai = 0
    rng = np.random.default_rng(6)
    for q, k in ((2, 2), (2, 3), (3, 2), (3, 3)):
        tries = 0
        while tries < 40:
            terms = {}
            for _ in range(4):
                exps = tuple(int(x) for x in rng.integers(0, 3, k + 1))
                terms[exps] = int(rng.integers(-2, 3))
            poly = DigitPolynomial(k, terms)
            if poly.degree > k + 1:
                continue
            p1, _ = poly.split_corner()
            sols = [x for x in product(range(q), repeat=k - 1) if p1((1, *x, 1)) == 1]
            if not sols:
                continue
            tries += 1
            x = sols[0]
            seq = digit_polynomial(poly, q=q)
            K = k_value(seq, Word((1, *x), q), Word((0, *x), q), 1, 0)
            n_kalai += 1
            if K != 1:
                problems.append(f"polynomial {poly} q={q}: K = {K}")
    ok = not problems
    detail = (f"{n_occ} occurrence sets with K = 1, 00/11 counter |K| = 2, X1+X0 K = 0, "
              f"{n_kalai} admissible polynomials with K = 1")
    return ok, detail + (f"; problems: {problems[:5]}" if problems else "")


# --- 7 and 8 (share one sieve) ----------------------------------------------------


_SIEVE = {}


def desk_sieve():
    if "tables" not in _SIEVE:
        start = time.perf_counter()
        _SIEVE["tables"] = sieve_build(10**7)
        _SIEVE["seconds"] = time.perf_counter() - start
    return _SIEVE["tables"], _SIEVE["seconds"]


@criterion(7, "Moebius correlation trend up to 10^7")
def check_mobius():
    sieve, sieve_seconds = desk_sieve()
    start = time.perf_counter()
    Ns = [10**4, 10**5, 10**6, 10**7]
    vals = mobius_correlation_series(RS, Ns, sieve=sieve)
    scan = time.perf_counter() - start
    mods = [abs(v) for v in vals]
    ok = mods[-1] < 0.02 and mods[-1] < mods[0] and sieve_seconds < 10 and scan < 60
    listing = ", ".join(f"{N:.0e}: {m:.3g}" for N, m in zip(Ns, mods))
    return ok, f"|corr| {listing}; sieve {sieve_seconds:.1f} s, scan {scan:.1f} s"


@criterion(8, "prime residue equidistribution at 10^7")
def check_residues():
    sieve, _ = desk_sieve()
    rep = residue_counts(RS, 10**7, 1, 1, 2, sieve)
    total = sum(rep.column("count"))
    dev = max(abs(c / total - 0.5) for c in rep.column("count"))
    return dev < 0.01, f"counts {rep.column('count')} of pi(10^7) = {total}; max |share - 1/2| = {dev:.3g}"


# --- 9 ---------------------------------------------------------------------------------


@criterion(9, "psi and residue partition sanity")
def check_arithmetic():
    X = 10**5
    sieve = sieve_build(X)
    pps = oracles.prime_powers(X)
    xs = list(range(2, 300)) + [997, 1000, 4096, 12345, 65536, 99991, X]
    worst = 0.0
    for x in xs:
        direct = math.fsum(math.log(p) for n, p in pps if n <= x)
        worst = max(worst, abs(lambda_weighted_sum(RS, 0, 0, x, sieve).real - direct),
                    abs(chebyshev_psi(x, sieve) - direct))
    primes = [n for n, p in pps if n == p]
    partition_bad = []
    for x, a, m, mprime in [(10**5, 1, 1, 2), (10**5, 3, 4, 3), (54321, 2, 7, 5), (1000, 1, 10, 4), (97, 5, 6, 2)]:
        rep = residue_counts(RS, x, a, m, mprime, sieve)
        truth = sum(1 for p in primes if p <= x and p % m == a % m)
        if sum(rep.column("count")) != truth:
            partition_bad.append((x, a, m, mprime))
    ok = worst <= 1e-9 and not partition_bad
    return ok, f"max psi error {worst:.3g} over {len(xs)} values of x; partitions exact: {not partition_bad}"


# --- runners ---------------------------------------------------------------------


def run_criterion(number):
    title, fn = CRITERIA[number]
    start = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # report, then let pytest see the failure
        ok, detail = False, f"raised {type(exc).__name__}: {exc}"
    line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail} ({time.perf_counter() - start:.1f} s)"
    return ok, line


_SLOW = {7, 8}


@pytest.mark.parametrize("number", [pytest.param(n, marks=pytest.mark.slow) if n in _SLOW else n
                                    for n in sorted(CRITERIA)])
def test_criterion(number, capsys):
    ok, line = run_criterion(number)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [run_criterion(n) for n in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
