import math
from fractions import Fraction

import pytest

import oracles
from digitseq.errors import BudgetExceeded, UsageError
from digitseq.propagation import (
    PropagationQuery,
    closed_form_A,
    closed_form_B,
    covering_sets,
    exact_size_B,
    exceptional_count,
    exceptional_set,
    growth_bound,
    structured_sets,
)
from digitseq.sequences import AssociatedFunction, builtin_sequence, occurrence, rudin_shapiro

RS = rudin_shapiro()
HALF = Fraction(1, 2)


def brute_exceptional(seq, alpha, lam, kappa, rho, q=2):
    """l < q^lam where some k1, k2 break the truncated-increment identity,
    using the bit-string oracle for a and exact phases for alpha = p/r."""
    a = {}

    def val(n):
        if n not in a:
            a[n] = oracle(n)
        return a[n]

    oracle = ORACLES[seq]
    Qk = q**kappa
    mod = q ** (kappa + rho)
    frac = Fraction(alpha)
    bad = set()
    for l in range(q**lam):
        for k1 in range(Qk):
            n1 = l * Qk + k1
            for k2 in range(Qk):
                n2 = n1 + k2
                diff = (val(n2) - val(n1)) - (val(n2 % mod) - val(n1 % mod))
                if (frac * diff).denominator != 1:
                    bad.add(l)
                    break
            if l in bad:
                break
    return bad


ORACLES = {
    RS: oracles.rudin_shapiro_count,
    occurrence(["101"]): lambda n: oracles.occurrences(n, ["101"]),
}


@pytest.mark.parametrize("seq", list(ORACLES), ids=["rs", "occ101"])
@pytest.mark.parametrize("lam,kappa,rho", [(6, 1, 3), (6, 2, 2), (7, 2, 4), (5, 3, 3)])
def test_exceptional_set_against_bit_oracle(seq, lam, kappa, rho):
    if rho < seq.beta - 1:
        pytest.skip("rho below beta - 1")
    q = PropagationQuery(AssociatedFunction(seq, HALF), lam, kappa, rho)
    assert exceptional_set(q) == brute_exceptional(seq, HALF, lam, kappa, rho)


def test_alpha_zero_has_no_exceptions():
    q = PropagationQuery(AssociatedFunction(RS, 0), 7, 2, 3)
    assert exceptional_count(q) == 0


def test_inactive_modulus_has_no_exceptions():
    # whenever l q^kappa + 2 (q^kappa - 1) < q^(kappa + rho) for all l < q^lambda
    fn = AssociatedFunction(RS, HALF)
    lam, kappa = 4, 2
    for rho in range(lam):
        worst = (2**lam - 1) * 2**kappa + 2 * (2**kappa - 1)
        if worst < 2 ** (kappa + rho):
            assert exceptional_count(PropagationQuery(fn, lam, kappa, rho)) == 0


def test_irrational_alpha_uses_phase_tolerance():
    fn = AssociatedFunction(RS, (1 + 5**0.5) / 2)
    q = PropagationQuery(fn, 6, 2, 3)
    exc = exceptional_set(q)
    A, B, C = covering_sets(2, 2, 6, 3)
    assert exc <= A | B | C


def test_query_validation():
    fn = AssociatedFunction(RS, HALF)
    with pytest.raises(UsageError):
        PropagationQuery(fn, 6, 0, 3)
    with pytest.raises(UsageError):
        PropagationQuery(fn, 6, 2, 6)
    with pytest.raises(BudgetExceeded):
        PropagationQuery(fn, 20, 6, 3)
    PropagationQuery(fn, 20, 6, 3, budget=2**32)
    with pytest.raises(UsageError):
        covering_sets(2, 3, 6, 1)
    with pytest.raises(UsageError):
        covering_sets(2, 2, 4, 4)


def _digit(l, i, q):
    return (l // q**i) % q


def brute_sets(q, beta, lam, rho):
    """A, B, C written straight from their digit conditions."""
    A, B = set(), set()
    for l in range(q**rho, q**lam):
        if all(_digit(l, i, q) == q - 1 for i in range(rho - beta + 2)):
            A.add(l)
        for i in range(rho - beta + 2):
            if (_digit(l, i, q) != q - 1
                    and all(_digit(l, m, q) == q - 1 for m in range(i))
                    and all(_digit(l, j, q) == 0 for j in range(i + beta - 1, rho))):
                B.add(l)
    return A, B, {q**rho - 1, q**rho}


@pytest.mark.parametrize("q,beta,lam,rho", [(2, 2, 6, 3), (2, 3, 7, 4), (3, 2, 5, 2), (3, 3, 5, 3), (2, 2, 8, 1)])
def test_covering_sets_match_digit_conditions(q, beta, lam, rho):
    A, B, C = covering_sets(q, beta, lam, rho)
    bA, bB, bC = brute_sets(q, beta, lam, rho)
    assert (A, B, C) == (bA, bB, bC)
    assert len(A) == closed_form_A(q, beta, lam, rho)
    assert len(B) == exact_size_B(q, beta, lam, rho)
    assert len(B) <= closed_form_B(q, beta, lam, rho)
    assert len(B) * q == closed_form_B(q, beta, lam, rho) * (q - 1)


def test_small_closed_form_values():
    assert closed_form_A(2, 2, 6, 3) == 7
    assert closed_form_B(2, 2, 6, 3) == 42
    assert exact_size_B(2, 2, 6, 3) == 21


@pytest.mark.parametrize("kind,params,q", [
    ("rudin-shapiro", {}, 2), ("beta-delta", {"delta": 2}, 2), ("b-d", {"d": 2}, 2),
    ("occurrence", {"B": ["00", "11"]}, 2), ("digit-polynomial", {"poly": "X2*X0 - X1", "k": 2}, 2),
    ("rudin-shapiro", {}, 3),
])
def test_exceptions_are_covered(kind, params, q):
    seq = builtin_sequence(kind, q, **params)
    fn = AssociatedFunction(seq, Fraction(1, 3))
    lam = 7 if q == 2 else 5
    for kappa in (1, 2):
        for rho in range(seq.beta - 1, lam):
            rep = structured_sets(PropagationQuery(fn, lam, kappa, rho))
            assert rep.covered
            assert rep.exceptional_count <= rep.cardA + rep.cardB + rep.cardC
            assert rep.exceptional_count <= rep.bound


def test_report_fields():
    rep = structured_sets(PropagationQuery(AssociatedFunction(RS, HALF), 8, 2, 4))
    assert rep.cardA == rep.closed_A == 15
    assert rep.cardC == 2
    assert rep.bound == pytest.approx(4 * 2 ** (4 + math.log(4)))
    assert rep.fitted_constant == pytest.approx(rep.exceptional_count / 2 ** (4 + math.log(4)))
    assert growth_bound(2, 2, 8, 0) == 4 * 2**8
