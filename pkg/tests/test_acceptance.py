"""Acceptance gate: one test per criterion, each at its stated tolerance.

Every test records a PASS/FAIL line; the lines are printed together at the
end of the pytest run (see ``conftest.py``) and immediately with ``-s``.
"""

import math
import time
from pathlib import Path

import numpy as np

from fourterm import analysis as an
from fourterm import checks
from fourterm.cli import main
from fourterm.locus import LocusFunction, Membership, on_curve, three_term_curve_membership
from fourterm.polycore import Poly, poly_derivative, shifted_derivative_expansion
from fourterm.rootfind import find_roots
from fourterm.tablegen import (
    WORKED_EXAMPLE,
    CoefficientTriple,
    ThreeTermEvaluator,
    build_H_table,
    build_table,
    collapse_sequences,
    q_closed_form,
    q_series_oracle,
)

RESULTS: dict[int, str] = {}
CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def record(n: int, title: str, ok: bool, detail: str):
    line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


def distance_to_worked_example_set(z: np.ndarray) -> np.ndarray:
    """Euclidean distance to [1, 2] x {0} union {x^2 + y^2 = 2, x >= 1}."""
    seg = np.hypot(np.clip(z.real, 1, 2) - z.real, z.imag)
    ang = np.angle(z)
    inside = np.abs(ang) <= math.pi / 4
    arc = np.where(inside, np.abs(np.abs(z) - math.sqrt(2)),
                   np.minimum(np.abs(z - (1 + 1j)), np.abs(z - (1 - 1j))))
    return np.minimum(seg, arc)


def random_triple(rng) -> CoefficientTriple:
    def poly(nonzero):
        while True:
            deg = int(rng.integers(0, 3))
            p = Poly(rng.integers(-3, 4, size=deg + 1).astype(float))
            if not nonzero or not p.is_zero():
                return p
    return CoefficientTriple(poly(True), poly(True), poly(False))


def test_criterion_01_worked_example_figure():
    t0 = time.perf_counter()
    T = build_table(WORKED_EXAMPLE, 50, 30)
    rs = find_roots(T[50, 30], evaluator=T.evaluator(50, 30))
    z = rs.roots[rs.converged]
    lf = LocusFunction(WORKED_EXAMPLE)
    status = [on_curve(lf, w, 1e-6) for w in z]
    dist = float(distance_to_worked_example_set(z).max()) if z.size else math.inf
    elapsed = time.perf_counter() - t0
    on = sum(s is Membership.ON for s in status)
    ok = z.size > 0 and on == z.size and dist <= 1e-5 and elapsed < 30
    record(1, "zeros of P[50,30] on the locus", ok,
           f"{z.size}/{len(rs)} converged, {on} on the locus at 1e-6, "
           f"max distance to segment+arc {dist:.2e}, {elapsed:.1f}s")


def test_criterion_02_random_triple_sweep():
    rng = np.random.default_rng(2024)
    checked = off = excluded = unconverged = 0
    for _ in range(10):
        triple = random_triple(rng)
        lf = LocusFunction(triple)
        T = build_table(triple, 12, 12)
        for m in range(13):
            for n in range(13):
                p = T[m, n]
                if p.is_zero() or p.degree < 1:
                    continue
                rs = find_roots(p, evaluator=T.evaluator(m, n))
                unconverged += int((~rs.converged).sum())
                for w in rs.roots[rs.converged]:
                    s = on_curve(lf, w, 1e-6)
                    if s is Membership.INDETERMINATE:
                        excluded += 1
                        continue
                    checked += 1
                    off += s is Membership.OFF
    record(2, "random triples, m,n <= 12", checked > 0 and off == 0,
           f"{checked - off}/{checked} non-excluded converged roots on the locus "
           f"({excluded} excluded, {unconverged} unconverged)")


def test_criterion_03_h_table_reality():
    H = build_H_table(25, 25)
    worst_im = worst_re = 0.0
    bad = 0
    for m in range(26):
        for n in range(26):
            p = H[m, n]
            if p.degree < 1:
                continue
            r = find_roots(p, evaluator=H.evaluator(m, n)).roots
            im = np.abs(r.imag) / (1 + np.abs(r))
            worst_im = max(worst_im, float(im.max()))
            worst_re = max(worst_re, float((1 - r.real).max()))
            bad += int(np.sum((im > 1e-7) | (r.real < 1 - 1e-6)))
    record(3, "zeros of H[m,n] real and >= 1, m,n <= 25", bad == 0,
           f"max |Im|/(1+|z|) {worst_im:.1e}, max (1 - Re) {worst_re:.1e}")


def test_criterion_04_q_closed_form():
    worst = max(checks.rel_coeff_error(q_closed_form(m, s - m), q_series_oracle(m, s - m))
                for s in range(41) for m in range(s + 1))
    record(4, "Q closed form vs series, m+n <= 40", worst <= 1e-12, f"max relative error {worst:.1e}")


def test_criterion_05_h_from_q_derivative():
    err = checks.lemma_hq_error(max_index=15, samples=100, seed=5)
    record(5, "H[m,n] vs z^m/n! Q[m+n,n]^(n)(1/z), m,n <= 15", err <= 1e-8,
           f"max relative error {err:.1e} over 100 points per pair")


def test_criterion_06_diagonal_legendre():
    H = build_H_table(30, 30)
    coef = max(an.diagonal_coefficient_residual(m, H) for m in range(21))
    haus = 0.0
    for m in range(1, 31):
        u = an.legendre_zeros(m).roots
        h = find_roots(H[m, m], evaluator=H.evaluator(m, m)).roots
        haus = max(haus, an.hausdorff(2 / (1 + u), h))
    record(6, "diagonal vs Legendre", coef <= 1e-10 and haus <= 1e-6,
           f"coefficient error {coef:.1e} (m <= 20), zero-set Hausdorff {haus:.1e} (m <= 30)")


def test_criterion_07_density():
    t0 = time.perf_counter()
    gap = an.validate_mu_cdf()
    H = build_H_table(150, 150)
    rs = find_roots(H[150, 150], evaluator=H.evaluator(150, 150))
    ks = an.ks_distance(rs, an.MU)
    elapsed = time.perf_counter() - t0
    ok = rs.all_converged and ks <= 0.06 and gap <= 1e-8 and elapsed < 60
    record(7, "KS distance of H[150,150] zeros", ok,
           f"KS {ks:.4f}, closed-form CDF vs quadrature {gap:.1e}, {elapsed:.1f}s")


def test_criterion_08_nonreal_bound():
    rng = np.random.default_rng(8)
    specs = [an.random_numerator_spec(rng) for _ in range(50)]
    rows = an.nonreal_sweep(specs, [(6, 6), (10, 7), (12, 12)], pairing_tol=1e-6)
    fails = [r for r in rows if not r.passed]
    unconverged = sum(not r.converged for r in rows)
    worst = max(r.count - r.bound for r in rows)
    record(8, "nonreal zeros <= I+J+2K", not fails,
           f"{len(rows) - len(fails)}/{len(rows)} cases within bound, max count-bound {worst}, "
           f"{unconverged} cases with unconverged roots")


def test_criterion_09_operator_identities():
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(20):
        deg = int(rng.integers(0, 9))
        f = Poly(rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1))
        for n in range(6):
            for m in range(n + 1):
                worst = max(worst, checks.rel_coeff_error(shifted_derivative_expansion(f, m, n),
                                                          poly_derivative(f, n).shift(m)))
    rem, deg_ok = 0.0, True
    for a in range(13):
        for b in range(13):
            if min(a, b) > 8:
                continue
            for k in range(min(a, b) + 1):
                r, qd = an.derivative_structure_residual(a, b, k)
                rem = max(rem, r)
                deg_ok &= qd <= k
    ok = worst <= 1e-9 and rem <= 1e-9 and deg_ok
    record(9, "shifted derivative expansion and divisibility", ok,
           f"expansion error {worst:.1e}, divisibility remainder {rem:.1e}, quotient degrees ok: {deg_ok}")


def test_criterion_10_specializations():
    z = Poly([0.0, 1.0])
    T = build_table(CoefficientTriple(z, z, z), 10, 10)
    delannoy_bad = [(m, n) for m in range(11) for n in range(11)
                    if T[m, n](-1.0) != an.delannoy_oracle(m, n)]
    B = build_table(CoefficientTriple(Poly([-1.0]), Poly([-1.0]), z), 12, 12)
    binom_bad = [(m, n) for m in range(13) for n in range(13)
                 if B[m, n](0.0) != math.factorial(m + n) // (math.factorial(m) * math.factorial(n))]
    ok = not delannoy_bad and not binom_bad and T[2, 2](-1.0) == 13 and T[3, 3](-1.0) == 63
    record(10, "Delannoy and binomial specializations", ok,
           f"Delannoy mismatches {len(delannoy_bad)}/121, binomial mismatches {len(binom_bad)}/169")


def test_criterion_11_collapsed_sequences():
    triples = [CoefficientTriple(Poly([1.0]), Poly([-1.0, 1.0]), Poly([0.0, 1.0])), WORKED_EXAMPLE]
    rng = np.random.default_rng(11)
    triples_rec = triples + [random_triple(rng) for _ in range(3)]
    worst = naive = 0.0
    for tr in triples_rec:
        rows = checks.collapsed_residuals(tr, 30)
        worst = max([worst] + [max(r[1], r[2]) for r in rows])
        naive = max([naive] + [r[3] for r in rows])
    on = off = skipped = unconverged = 0
    for tr in triples:
        _, R = collapse_sequences(build_table(tr, 40, 40), 40)
        c_roots = find_roots(tr.C).roots
        for k in range(1, 41):
            if R[k].degree < 1:
                continue
            rs = find_roots(R[k], evaluator=ThreeTermEvaluator(tr.D, tr.C, k))
            unconverged += int((~rs.converged).sum())
            for w in rs.roots[rs.converged]:
                s = three_term_curve_membership(tr.D, tr.C, w, 1e-6, c_roots)
                on += s is Membership.ON
                off += s is Membership.OFF
                skipped += s is Membership.INDETERMINATE
    ok = worst <= 1e-10 and off == 0 and on > 0
    record(11, "collapsed sequences", ok,
           f"recurrence residual {worst:.1e} relative to summed data, {naive:.1e} relative to "
           f"recurrence terms alone (N <= 30); {on} zeros of R_N on the three-term curve, "
           f"{off} off, {skipped} at zeros of C, {unconverged} unconverged (N <= 40)")


def test_criterion_12_determinism(tmp_path):
    argv = ["run", "--config", str(CONFIGS / "worked_example.json")]
    codes = [main(argv + ["--out", str(tmp_path / d)]) for d in ("first", "second")]
    a = (tmp_path / "first" / "manifest.json").read_bytes()
    b = (tmp_path / "second" / "manifest.json").read_bytes()
    record(12, "byte-identical manifests", codes == [0, 0] and a == b,
           f"exit codes {codes}, manifests {'identical' if a == b else 'differ'}")
