"""Identity and property checks run by ``fourterm checks``.

Each check returns a :class:`CheckResult` carrying the worst error seen and
the tolerance it was held to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from . import analysis as an
from .locus import LocusFunction, Membership, on_curve
from .polycore import Poly, poly_derivative, poly_mul, poly_sum, shifted_derivative_expansion
from .rootfind import find_roots
from .tablegen import (
    CoefficientTriple,
    build_H_table,
    build_R_table,
    build_table,
    collapse_sequences,
    q_closed_form,
    q_closed_form_int,
    q_series_oracle,
    r_entry_from_h,
    trinomial_series_value,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    params: str
    max_error: float
    tolerance: float
    passed: bool

    def row(self):
        return (self.name, self.params, float(self.max_error), float(self.tolerance), self.passed)


HEADER = ["check", "parameters", "max_error", "tolerance", "pass"]


def _result(name, params, err, tol):
    return CheckResult(name, params, err, tol, bool(err <= tol))


def rel_coeff_error(p: Poly, q: Poly) -> float:
    n = max(len(p), len(q))
    a = np.zeros(n, complex)
    b = np.zeros(n, complex)
    a[: len(p)] = p.coeffs
    b[: len(q)] = q.coeffs
    scale = max(np.abs(a).max(initial=0.0), np.abs(b).max(initial=0.0))
    return float(np.abs(a - b).max(initial=0.0) / scale) if scale else 0.0


def recurrence_residual(table, triple: CoefficientTriple) -> float:
    worst = 0.0
    for m in range(table.M + 1):
        for n in range(table.N + 1):
            if m == 0 and n == 0:
                continue
            terms = [table[m, n], poly_mul(triple.A, table[m - 1, n]),
                     poly_mul(triple.B, table[m, n - 1]), poly_mul(triple.C, table[m - 1, n - 1])]
            scale = max(t.norm() for t in terms) or 1.0
            res = poly_sum(terms)
            worst = max(worst, res.norm() / scale)
    return worst


def check_q_closed_form(max_sum: int = 40) -> CheckResult:
    err = max(rel_coeff_error(q_closed_form(m, s - m), q_series_oracle(m, s - m))
              for s in range(max_sum + 1) for m in range(s + 1))
    return _result("q_closed_form_vs_series", f"m+n<={max_sum}", err, 1e-12)


def _mp_eval(coeffs, z):
    return mp.polyval([mp.mpc(complex(c)) if not isinstance(c, int) else c for c in coeffs[::-1]], z)


def lemma_hq_error(max_index: int = 15, samples: int = 100, seed: int = 0, dps: int = 50) -> float:
    """``H[m, n](z)`` against ``z^m / n! * Q[m+n, n]^(n)(1/z)`` at random points.

    Both sides are evaluated in ``dps``-digit arithmetic from exact integer
    coefficients, so what remains is the identity's own error rather than
    cancellation near the zeros.
    """
    rng = np.random.default_rng(seed)
    H = build_H_table(max_index, max_index)
    worst = 0.0
    with mp.workdps(dps):
        for m in range(max_index + 1):
            for n in range(max_index + 1):
                q = q_closed_form_int(m + n, n)
                # Q^(n) / n! has coefficients C(k, n) q_k
                dq = [math.comb(k, n) * q[k] for k in range(n, len(q))]
                h = [int(c.real) for c in H[m, n].coeffs]
                r = np.exp(rng.uniform(np.log(0.1), np.log(10.0), samples))
                z = r * np.exp(2j * np.pi * rng.uniform(size=samples))
                for zk in z:
                    w = mp.mpc(complex(zk))
                    lhs = _mp_eval(h, w)
                    rhs = w**m * _mp_eval(dq, 1 / w)
                    worst = max(worst, float(abs(lhs - rhs) / max(abs(lhs), abs(rhs))))
    return worst


def check_lemma_hq(max_index: int = 15, samples: int = 100, seed: int = 0) -> CheckResult:
    return _result("H_from_Q_derivative", f"m,n<={max_index}; {samples} z/pair",
                   lemma_hq_error(max_index, samples, seed), 1e-8)


def check_legendre_coefficients(max_m: int = 20) -> CheckResult:
    H = build_H_table(max_m, max_m)
    err = max(an.diagonal_coefficient_residual(m, H) for m in range(max_m + 1))
    return _result("diagonal_vs_legendre_coeffs", f"m<={max_m}", err, 1e-10)


def check_legendre_zeros(max_m: int = 30) -> CheckResult:
    H = build_H_table(max_m, max_m)
    worst = 0.0
    for m in range(1, max_m + 1):
        u = an.legendre_zeros(m).roots
        h = find_roots(H[m, m], evaluator=H.evaluator(m, m)).roots
        worst = max(worst, an.hausdorff(2 / (1 + u), h))
    return _result("diagonal_zeros_vs_legendre_zeros", f"m<={max_m}", worst, 1e-6)


def check_shifted_derivative(seed: int = 0, trials: int = 5) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        deg = int(rng.integers(0, 9))
        f = Poly(rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1))
        for n in range(6):
            for m in range(n + 1):
                direct = poly_derivative(f, n).shift(m)
                worst = max(worst, rel_coeff_error(shifted_derivative_expansion(f, m, n), direct))
    return _result("shifted_derivative_identity", "deg f<=8; 0<=m<=n<=5", worst, 1e-9)


def check_derivative_structure(max_ab: int = 8) -> CheckResult:
    worst = 0.0
    degree_ok = True
    for a in range(max_ab + 1):
        for b in range(max_ab + 1):
            for k in range(min(a, b) + 1):
                rem, qdeg = an.derivative_structure_residual(a, b, k)
                worst = max(worst, rem)
                degree_ok &= qdeg <= k
    return _result("derivative_of_(z-1)^a z^b", f"min(a,b)<={max_ab}",
                   worst if degree_ok else math.inf, 1e-9)


def check_nonreal_bound(n_specs: int = 50, seed: int = 0,
                        pairs=((6, 6), (10, 7), (12, 12)), pairing_tol: float = 1e-6) -> CheckResult:
    rng = np.random.default_rng(seed)
    specs = [an.random_numerator_spec(rng) for _ in range(n_specs)]
    rows = an.nonreal_sweep(specs, list(pairs), pairing_tol)
    excess = max(r.count - r.bound for r in rows)
    ok = all(r.passed and r.converged for r in rows)
    return CheckResult("nonreal_zero_bound", f"{n_specs} specs; pairs {list(pairs)}",
                       float(max(excess, 0)), 0.0, ok)


def check_delannoy(max_index: int = 10) -> CheckResult:
    z = Poly([0.0, 1.0])
    T = build_table(CoefficientTriple(z, z, z), max_index, max_index)
    worst = 0.0
    for m in range(max_index + 1):
        for n in range(max_index + 1):
            worst = max(worst, abs(T[m, n](-1.0) - an.delannoy_oracle(m, n)))
    return _result("delannoy_specialization", f"m,n<={max_index}", worst, 0.0)


def check_binomial(max_index: int = 12) -> CheckResult:
    T = build_table(CoefficientTriple(Poly([-1.0]), Poly([-1.0]), Poly([0.0, 1.0])), max_index, max_index)
    worst = 0.0
    for m in range(max_index + 1):
        for n in range(max_index + 1):
            worst = max(worst, abs(T[m, n](0.0) - math.comb(m + n, m)))
    return _result("binomial_specialization", f"m,n<={max_index}", worst, 0.0)


def check_generating_function(triple: CoefficientTriple, max_index: int = 8, samples: int = 5,
                              seed: int = 0) -> CheckResult:
    rng = np.random.default_rng(seed)
    T = build_table(triple, max_index, max_index)
    worst = 0.0
    for z in rng.normal(size=samples) + 1j * rng.normal(size=samples):
        a, b, c = triple.A(z), triple.B(z), triple.C(z)
        for m in range(max_index + 1):
            for n in range(max_index + 1):
                ref = trinomial_series_value(a, b, c, m, n)
                got = T[m, n](z)
                scale = max(abs(ref), abs(got), 1e-300)
                worst = max(worst, abs(ref - got) / scale)
    return _result("generating_function_series", f"m,n<={max_index}", worst, 1e-9)


def check_table_recurrence(triple: CoefficientTriple, M: int, N: int) -> CheckResult:
    T = build_table(triple, M, N)
    return _result("table_recurrence_residual", f"M={M},N={N}", recurrence_residual(T, triple), 1e-10)


def check_h_reduction(triple: CoefficientTriple, max_index: int = 10, samples: int = 20,
                      seed: int = 0, dps: int = 50) -> CheckResult:
    """``P[m, n] = A^m B^n H[m, n](C / (A B))`` at random points, in ``dps``-digit arithmetic."""
    rng = np.random.default_rng(seed)
    T = build_table(triple, max_index, max_index)
    H = build_H_table(max_index, max_index)
    worst = 0.0
    with mp.workdps(dps):
        for m in range(max_index + 1):
            for n in range(max_index + 1):
                for zk in rng.normal(size=samples) + 1j * rng.normal(size=samples):
                    w = mp.mpc(complex(zk))
                    a, b, c = (_mp_eval(p.coeffs, w) for p in (triple.A, triple.B, triple.C))
                    lhs = _mp_eval(T[m, n].coeffs, w)
                    rhs = a**m * b**n * _mp_eval(H[m, n].coeffs, c / (a * b))
                    scale = max(abs(lhs), abs(rhs))
                    if scale:
                        worst = max(worst, float(abs(lhs - rhs) / scale))
    return _result("reduction_to_H", f"m,n<={max_index}", worst, 1e-8)


def check_h_reality(max_index: int = 25) -> CheckResult:
    H = build_H_table(max_index, max_index)
    worst = 0.0
    for m in range(max_index + 1):
        for n in range(max_index + 1):
            p = H[m, n]
            if p.degree < 1:
                continue
            r = find_roots(p, evaluator=H.evaluator(m, n)).roots
            worst = max(worst, float(np.max(np.abs(r.imag) / (1e-7 * (1 + np.abs(r))))),
                        float(np.max((1 - r.real) / 1e-6)))
    return _result("H_zeros_real_and_>=1", f"m,n<={max_index} (error in units of tol)", worst, 1.0)


def check_r_convolution(seed: int = 0, trials: int = 5, max_index: int = 10) -> CheckResult:
    rng = np.random.default_rng(seed)
    H = build_H_table(max_index, max_index)
    worst = 0.0
    for _ in range(trials):
        spec = an.random_numerator_spec(rng)
        R = build_R_table(spec, max_index, max_index)
        for m in range(max_index + 1):
            for n in range(max_index + 1):
                worst = max(worst, rel_coeff_error(R[m, n], r_entry_from_h(spec, H, m, n)))
    return _result("R_table_vs_H_convolution", f"m,n<={max_index}", worst, 1e-10)


def collapsed_residuals(triple: CoefficientTriple, N: int, table=None) -> list[tuple[int, float, float, float]]:
    """Recurrence residuals of the collapsed sequences for ``k = 1..N``.

    Rows are ``(k, s_residual, r_residual, naive)``.  The first two divide by
    the size of the data each term was summed from: ``S[j]`` and ``R[j]``
    add table entries that can exceed the result by many orders of magnitude,
    and their rounding is inherited by the sequence.  ``naive`` divides by
    the largest recurrence term alone.
    """
    T = table if table is not None else build_table(triple, N, N)
    S, R = collapse_sequences(T, N)
    sigma_s = [max([S[j].norm()] + [T[j - 2 * i, i].norm() for i in range(j // 2 + 1)]) for j in range(N + 1)]
    sigma_r = [max([R[j].norm()] + [T[j - i, i].norm() for i in range(j + 1)]) for j in range(N + 1)]
    rows = []
    for k in range(1, N + 1):
        out, naive = [], 0.0
        for seq, sigma, coefs in ((S, sigma_s, (triple.A, triple.B, triple.C)), (R, sigma_r, (triple.D, triple.C))):
            terms = [seq[k]] + [poly_mul(c, seq[k - i]) for i, c in enumerate(coefs, 1) if k - i >= 0]
            res = poly_sum(terms).norm()
            scale = max([sigma[k]] + [float(np.abs(c.coeffs).sum()) * sigma[k - i]
                                      for i, c in enumerate(coefs, 1) if k - i >= 0]) or 1.0
            out.append(res / scale)
            naive = max(naive, res / (max(t.norm() for t in terms) or 1.0))
        rows.append((k, out[0], out[1], naive))
    return rows


def check_collapsed(triple: CoefficientTriple, N: int = 30) -> CheckResult:
    rows = collapsed_residuals(triple, N)
    worst = max((max(r[1], r[2]) for r in rows), default=0.0)
    return _result("collapsed_sequence_recurrences", f"N<={N}", worst, 1e-10)


def check_theorem_sweep(triple: CoefficientTriple, max_index: int, tol: float = 1e-6) -> CheckResult:
    T = build_table(triple, max_index, max_index)
    lf = LocusFunction(triple)
    failures = 0
    for m in range(max_index + 1):
        for n in range(max_index + 1):
            p = T[m, n]
            if p.is_zero() or p.degree < 1:
                continue
            rs = find_roots(p, evaluator=T.evaluator(m, n))
            for r, ok in zip(rs.roots, rs.converged):
                if ok and on_curve(lf, r, tol) is Membership.OFF:
                    failures += 1
    return CheckResult("zeros_on_locus", f"m,n<={max_index}; tol={tol}", float(failures), 0.0, failures == 0)


def run_all(triple: CoefficientTriple, seed: int = 0, sweep: int = 12) -> list[CheckResult]:
    return [
        check_q_closed_form(),
        check_lemma_hq(seed=seed),
        check_legendre_coefficients(),
        check_legendre_zeros(),
        check_shifted_derivative(seed=seed),
        check_derivative_structure(),
        check_nonreal_bound(seed=seed),
        check_r_convolution(seed=seed),
        check_delannoy(),
        check_binomial(),
        check_generating_function(triple, seed=seed),
        check_table_recurrence(triple, 12, 12),
        check_h_reduction(triple, seed=seed),
        check_h_reality(),
        check_collapsed(triple),
        check_theorem_sweep(triple, sweep),
    ]
