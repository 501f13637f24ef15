"""Command-line frontend.

Every command writes one CSV table to standard output.  The sequence comes
from ``--seq FILE`` (see :mod:`digitseq.seqfile`) or from ``--kind NAME`` with
``--param key=value`` pairs; without either, the Rudin-Shapiro sequence in
base 2 is used.

Exit codes: 0 ok, 2 usage or validation error, 3 budget exceeded,
4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from fractions import Fraction

_THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS")

_NAMED = {
    "phi": (1 + math.sqrt(5)) / 2,
    "golden": (1 + math.sqrt(5)) / 2,
    "sqrt2": math.sqrt(2),
    "pi": math.pi,
    "e": math.e,
}


def real_value(text: str):
    """Exact Fraction for '1/3' or '0.25', float for named constants like 'phi'."""
    s = text.strip()
    if s.lower() in _NAMED:
        return _NAMED[s.lower()]
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        pass
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a real number: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return v


def _alpha_value(alpha):
    """Fractions with small denominators stay exact; the rest become floats."""
    if isinstance(alpha, Fraction) and alpha.denominator > 10**6:
        return float(alpha)
    return alpha


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        try:
            f = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        if not f.is_integer():
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        v = int(f)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def nonneg_int(text: str) -> int:
    if text.strip() == "0":
        return 0
    return positive_int(text)


# --- sequence selection ------------------------------------------------------------


def load_sequence(args):
    from .seqfile import parse_seqdef, parse_seqdef_text

    if args.seq and args.kind:
        raise _usage("give either --seq or --kind, not both")
    if args.seq:
        if args.param:
            raise _usage("--param only applies with --kind")
        return parse_seqdef(args.seq)
    kind = args.kind or "rudin-shapiro"
    lines = ["[sequence]", f"kind = {kind}", f"q = {args.q}"]
    for item in args.param or []:
        if "=" not in item:
            raise _usage(f"--param expects key=value, got {item!r}")
        lines.append(item)
    return parse_seqdef_text("\n".join(lines) + "\n", "<command line>")


def _usage(msg):
    from .errors import UsageError

    return UsageError(msg)


# --- commands ------------------------------------------------------------------


def cmd_eval(args, seq):
    from .numtheory import StatReport
    from .sequences import eval_table

    stop = args.stop if args.stop is not None else seq.q**8
    if stop <= args.start:
        raise _usage("need start < stop")
    _check_budget(stop, args.budget, "stop")
    values = eval_table(seq, stop)
    rep = StatReport(("n", "a"))
    for n in range(args.start, stop):
        rep.add(n, int(values[n]))
    return rep


def cmd_oracle_diff(args, seq):
    from .errors import InvariantViolation
    from .numtheory import StatReport
    from .sequences import eval_many, evaluate_by_recursion

    limit = args.limit if args.limit is not None else seq.q**10
    _check_budget(limit, args.budget, "limit")
    fast = eval_many(seq, range(limit))
    bad = [n for n in range(limit) if int(fast[n]) != evaluate_by_recursion(seq, n)]
    rep = StatReport(("limit", "checked", "mismatches", "first_mismatch"))
    rep.add(limit, limit, len(bad), bad[0] if bad else -1)
    if bad:
        rep.to_csv(sys.stdout)
        raise InvariantViolation(f"{len(bad)} mismatches, first at n = {bad[0]}")
    return rep


def cmd_truncate_check(args, seq):
    from .errors import InvariantViolation
    from .numtheory import StatReport
    from .sequences import eval_table, truncate_eval

    lam = args.lam
    period = seq.q**lam
    limit = args.limit if args.limit is not None else 2 * period
    _check_budget(limit, args.budget, "limit")
    values = eval_table(seq, max(limit, period))
    bad = 0
    for n in range(limit):
        if truncate_eval(seq, lam, n) != int(values[n % period]):
            bad += 1
    rep = StatReport(("lambda", "checked", "mismatches"))
    rep.add(lam, limit, bad)
    if bad:
        rep.to_csv(sys.stdout)
        raise InvariantViolation(f"{bad} truncation mismatches")
    return rep


def _context(args, seq):
    from .genealogy import GenealogyContext
    from .sequences import AssociatedFunction

    return GenealogyContext(AssociatedFunction(seq, _alpha_value(args.alpha)))


def _bound(ctx) -> float:
    from .genealogy import best_k, contraction_bound

    wit = best_k(ctx.fn)
    return contraction_bound(ctx.fn, wit) if wit is not None else float(ctx.q**ctx.beta)


def cmd_matrix_norm(args, seq):
    from .genealogy import norm_inf_direct, norm_inf_graph
    from .numtheory import StatReport

    ctx = _context(args, seq)
    t = float(args.t)
    rep = StatReport(("alpha", "t", "norm_direct", "norm_graph", "bound"))
    rep.add(args.alpha, t, norm_inf_direct(ctx, t), norm_inf_graph(ctx, t), _bound(ctx))
    return rep


def cmd_norm_sweep(args, seq):
    import numpy as np

    from .genealogy import norm_inf_direct, norm_inf_graph
    from .numtheory import StatReport

    ctx = _context(args, seq)
    if args.seed is None:
        ts = np.arange(args.grid) / args.grid
    else:
        ts = np.sort(np.random.default_rng(args.seed).random(args.grid))
    direct = norm_inf_direct(ctx, ts)
    graph = norm_inf_graph(ctx, ts)
    bound = _bound(ctx)
    rep = StatReport(("t", "norm_direct", "norm_graph", "bound"))
    for row in zip(ts, direct, graph):
        rep.add(*row, bound)
    return rep


def cmd_decay(args, seq):
    import numpy as np

    from .genealogy import fourier_sum_grid, matrix_fourier_bound, uniform_fourier_bound
    from .numtheory import StatReport

    ctx = _context(args, seq)
    ts = np.arange(args.grid) / args.grid
    rep = StatReport(("N", "kappa", "sup_grid", "matrix_bound", "uniform_bound", "violations"))
    for N in args.N:
        _check_budget(seq.q**N, args.budget, "q^N")
        bound = matrix_fourier_bound(ctx, N, ts)
        uniform = uniform_fourier_bound(ctx.fn, N)
        for kappa in args.kappa:
            s = np.abs(fourier_sum_grid(ctx.fn, N, kappa, args.grid))
            violations = int((s > bound + 1e-9).sum())
            rep.add(N, kappa, float(s.max()), float(bound.max()), uniform, violations)
    return rep


def cmd_k_search(args, seq):
    from .genealogy import best_k, contraction_bound, decay_rate
    from .numtheory import StatReport

    ctx = _context(args, seq)
    wit = best_k(ctx.fn)
    rep = StatReport(("omega1", "omega2", "k1", "k2", "K", "distance", "bound", "decay_rate"))
    if wit is None:
        rep.add("", "", "", "", "", 0.0, float(seq.q**seq.beta), 0.0)
    else:
        rep.add(str(wit.omega1), str(wit.omega2), wit.k1, wit.k2, wit.K,
                float(wit.distance(ctx.alpha)), contraction_bound(ctx.fn, wit), decay_rate(ctx.fn))
    return rep


def cmd_prop_count(args, seq):
    from .numtheory import StatReport
    from .propagation import PropagationQuery, structured_sets
    from .sequences import AssociatedFunction

    fn = AssociatedFunction(seq, _alpha_value(args.alpha))
    query = PropagationQuery(fn, args.lam, args.kappa, args.rho, budget=args.budget)
    r = structured_sets(query)
    rep = StatReport(("lambda", "kappa", "rho", "exceptional", "cardA", "cardB", "cardC",
                      "bound", "fitted_constant", "closed_A", "closed_B", "covered"))
    rep.add(args.lam, args.kappa, args.rho, r.exceptional_count, r.cardA, r.cardB, r.cardC,
            r.bound, r.fitted_constant, r.closed_A, r.closed_B, r.covered)
    return rep


def cmd_mobius(args, seq):
    from .numtheory import StatReport, mobius_correlation_series

    Ns = sorted(args.N)
    vals = mobius_correlation_series(seq, Ns, mprime=args.mprime, j=args.j)
    rep = StatReport(("N", "correlation_re", "correlation_im"))
    for N, c in zip(Ns, vals):
        rep.add(N, c.real, c.imag)
    return rep


def cmd_lambda_sum(args, seq):
    from .numtheory import StatReport, chebyshev_psi, lambda_weighted_sum, sieve_build

    sieve = sieve_build(args.x)
    s = lambda_weighted_sum(seq, _alpha_value(args.alpha), args.theta, args.x, sieve)
    rep = StatReport(("x", "alpha", "theta", "re", "im", "modulus", "psi"))
    rep.add(args.x, args.alpha, args.theta, s.real, s.imag, abs(s), chebyshev_psi(args.x, sieve))
    return rep


def cmd_residues(args, seq):
    from .numtheory import residue_counts

    return residue_counts(seq, args.x, args.a, args.m, args.mprime)


def cmd_weyl(args, seq):
    from .numtheory import weyl_sums

    return weyl_sums(seq, _alpha_value(args.alpha), args.x, args.a, args.m, args.H)


def _check_budget(size: int, budget: int, what: str):
    if size > budget:
        from .errors import BudgetExceeded

        raise BudgetExceeded(f"{what} = {size} exceeds budget {budget} (raise --budget)")


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("sequence")
    src.add_argument("--seq", metavar="FILE", help="sequence-definition file")
    src.add_argument("--kind", help="builtin family (default rudin-shapiro)")
    src.add_argument("--q", type=positive_int, default=2, help="base for --kind (default 2)")
    src.add_argument("--param", action="append", metavar="KEY=VALUE",
                     help="family parameter for --kind, e.g. delta=3, B=101, poly=X2*X0")
    run = common.add_argument_group("execution")
    run.add_argument("--threads", type=positive_int, default=None,
                     help="cap on worker threads used by numerical libraries")
    run.add_argument("--budget", type=positive_int, default=2**30,
                     help="cap on enumeration sizes (default 2^30)")

    parser = argparse.ArgumentParser(prog="digitseq", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    p = add("eval", cmd_eval, "sequence values a(n) for start <= n < stop")
    p.add_argument("--start", type=nonneg_int, default=0)
    p.add_argument("--stop", type=positive_int, default=None, help="default q^8")

    p = add("oracle-diff", cmd_oracle_diff, "compare the evaluator with the recursion oracle")
    p.add_argument("--limit", type=positive_int, default=None, help="default q^10")

    p = add("truncate-check", cmd_truncate_check, "check a^(lambda)(n) = a(n mod q^lambda)")
    p.add_argument("--lambda", dest="lam", type=nonneg_int, required=True)
    p.add_argument("--limit", type=positive_int, default=None, help="default 2 q^lambda")

    p = add("matrix-norm", cmd_matrix_norm, "infinity norm of the genealogical matrix at one t")
    p.add_argument("--alpha", type=real_value, required=True)
    p.add_argument("--t", type=real_value, required=True)

    p = add("norm-sweep", cmd_norm_sweep, "norms on a uniform t-grid")
    p.add_argument("--alpha", type=real_value, default=Fraction(1, 2))
    p.add_argument("--grid", type=positive_int, default=1024)
    p.add_argument("--seed", type=int, default=None, help="sample t at random instead of a grid")

    p = add("decay", cmd_decay, "Fourier sums against the matrix-product bound")
    p.add_argument("--alpha", type=real_value, default=Fraction(1, 2))
    p.add_argument("--N", type=positive_int, nargs="+", default=[12])
    p.add_argument("--kappa", type=nonneg_int, nargs="+", default=[0])
    p.add_argument("--grid", type=positive_int, default=4096)

    p = add("k-search", cmd_k_search, "admissible K witness maximising ||alpha K||")
    p.add_argument("--alpha", type=real_value, default=Fraction(1, 2))

    p = add("prop-count", cmd_prop_count, "exceptional set size and covering sets")
    p.add_argument("--alpha", type=real_value, default=Fraction(1, 2))
    p.add_argument("--lambda", dest="lam", type=positive_int, required=True)
    p.add_argument("--kappa", type=positive_int, required=True)
    p.add_argument("--rho", type=nonneg_int, required=True)

    p = add("mobius", cmd_mobius, "Moebius correlation (1/N) sum mu(n) e(j a(n)/m')")
    p.add_argument("--N", type=positive_int, nargs="+", default=[10**4, 10**5, 10**6])
    p.add_argument("--mprime", type=positive_int, default=2)
    p.add_argument("--j", type=int, default=1)

    p = add("lambda-sum", cmd_lambda_sum, "von Mangoldt weighted exponential sum")
    p.add_argument("--alpha", type=real_value, required=True)
    p.add_argument("--theta", type=real_value, default=Fraction(0))
    p.add_argument("--x", type=positive_int, required=True)

    p = add("residues", cmd_residues, "prime counts by a(p) mod m'")
    p.add_argument("--x", type=positive_int, required=True)
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--m", type=positive_int, default=1)
    p.add_argument("--mprime", type=positive_int, default=2)

    p = add("weyl", cmd_weyl, "normalised Weyl sums over primes")
    p.add_argument("--alpha", type=real_value, required=True)
    p.add_argument("--x", type=positive_int, required=True)
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--m", type=positive_int, default=1)
    p.add_argument("--H", type=positive_int, default=5)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None:
        for var in _THREAD_VARS:
            os.environ[var] = str(args.threads)
    from .errors import DigitSeqError

    try:
        seq = load_sequence(args)
        report = args.func(args, seq)
    except DigitSeqError as exc:
        print(f"digitseq {args.command}: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except MemoryError:
        print(f"digitseq {args.command}: error: out of memory", file=sys.stderr)
        return 3
    report.to_csv(sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
