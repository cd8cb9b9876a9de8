"""Tables of polynomials defined by the four-term contiguous relation.

The general table is generated by ``1 / (1 + A s + B t + C s t)``, i.e.

    P[m, n] + A P[m-1, n] + B P[m, n-1] + C P[m-1, n-1] = 0,   P[0, 0] = 1,

with entries at negative indices equal to zero.  ``H`` is the case
``A = B = 1, C = z``; ``R`` keeps the ``H`` denominator but takes an
arbitrary numerator ``N(s, t, z) = sum a[i, j, k] s^i t^j z^k``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _sweep
from .polycore import ONE, ZERO, Z, Poly, horner_with_derivative, poly_mul, poly_sum

DEFAULT_MAX_COEFFS = 2**28


class TableTooLarge(MemoryError):
    """Raised when a table would exceed its coefficient budget."""


class DegenerateTripleWarning(UserWarning):
    pass


class TableKind(str, enum.Enum):
    GENERAL_P = "GeneralP"
    SPECIAL_H = "SpecialH"
    GENERAL_R = "GeneralR"


@dataclass(frozen=True)
class CoefficientTriple:
    A: Poly
    B: Poly
    C: Poly

    def is_degenerate(self) -> bool:
        return self.A.is_zero() and self.B.is_zero() and self.C.is_zero()

    @property
    def D(self) -> Poly:
        """``A + B``, the middle coefficient of the collapsed three-term sequence."""
        return self.A + self.B


H_TRIPLE = CoefficientTriple(ONE, ONE, Z)
WORKED_EXAMPLE = CoefficientTriple(ONE, Poly([2.0, -2.0, 1.0]), Z)


@dataclass(frozen=True)
class NumeratorSpec:
    """Coefficients ``a[i, j, k]`` of ``N(s, t, z)``, shape ``(I+1, J+1, K+1)``."""

    a: np.ndarray

    def __post_init__(self):
        arr = np.array(self.a, dtype=np.float64)
        if arr.ndim != 3 or 0 in arr.shape:
            raise ValueError("numerator coefficients must form a nonempty 3-D array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("numerator coefficients must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "a", arr)

    @property
    def bounds(self) -> tuple[int, int, int]:
        I, J, K = self.a.shape
        return I - 1, J - 1, K - 1

    @property
    def nonreal_bound(self) -> int:
        I, J, K = self.bounds
        return I + J + 2 * K

    def tight(self) -> "NumeratorSpec":
        """Shrink the bounds until the last slice along every axis is nonzero."""
        nz = np.argwhere(self.a != 0)
        if nz.size == 0:
            return NumeratorSpec(np.zeros((1, 1, 1)))
        I, J, K = nz.max(axis=0)
        return NumeratorSpec(self.a[: I + 1, : J + 1, : K + 1])

    def is_tight(self) -> bool:
        return self.tight().a.shape == self.a.shape

    def term(self, i: int, j: int) -> Poly:
        """``sum_k a[i, j, k] z^k``; zero outside the bounds."""
        I, J, _ = self.bounds
        if i < 0 or j < 0 or i > I or j > J:
            return ZERO
        return Poly(self.a[i, j, :])

    @classmethod
    def unit(cls) -> "NumeratorSpec":
        return cls(np.ones((1, 1, 1)))


@dataclass(frozen=True)
class PolyTable:
    """Memoized entries ``rows[m][n]`` for ``0 <= m <= M, 0 <= n <= N``."""

    rows: tuple
    kind: TableKind
    spec: CoefficientTriple | NumeratorSpec

    @property
    def M(self) -> int:
        return len(self.rows) - 1

    @property
    def N(self) -> int:
        return len(self.rows[0]) - 1

    def __getitem__(self, idx: tuple[int, int]) -> Poly:
        m, n = idx
        if m < 0 or n < 0:
            return ZERO
        if m > self.M or n > self.N:
            raise IndexError(f"entry ({m}, {n}) outside table {self.M}x{self.N}")
        return self.rows[m][n]

    def total_coeffs(self) -> int:
        return sum(len(p) for row in self.rows for p in row)

    def evaluator(self, m: int, n: int) -> "RecurrenceEvaluator":
        """Pointwise value/derivative of entry (m, n) computed through the recurrence."""
        if m > self.M or n > self.N:
            raise IndexError(f"entry ({m}, {n}) outside table {self.M}x{self.N}")
        if self.kind is TableKind.GENERAL_R:
            return RecurrenceEvaluator.for_numerator(self.spec, m, n)
        return RecurrenceEvaluator.for_triple(self.spec, m, n)


class RecurrenceEvaluator:
    """Evaluate one table entry at points by running the recurrence numerically.

    Avoids the monomial coefficients entirely, whose conditioning is far
    worse than the recurrence itself for large entries.  ``__call__``
    returns value and derivative sharing one power-of-two scale per point,
    which is all a Newton-type correction needs.
    """

    def __init__(self, abc, forcing, m: int, n: int):
        self._abc = abc
        self._forcing = forcing
        self.m = m
        self.n = n

    @classmethod
    def for_triple(cls, triple: CoefficientTriple, m: int, n: int) -> "RecurrenceEvaluator":
        def forcing(z):
            f = np.ones((1, 1, z.size), dtype=np.complex128)
            return f, np.zeros_like(f)

        polys = (triple.A.coeffs, triple.B.coeffs, triple.C.coeffs)
        return cls(polys, forcing, m, n)

    @classmethod
    def for_numerator(cls, num: NumeratorSpec, m: int, n: int) -> "RecurrenceEvaluator":
        a = num.a.astype(np.complex128)

        def forcing(z):
            f = np.zeros(a.shape[:2] + (z.size,), dtype=np.complex128)
            df = np.zeros_like(f)
            for i in range(a.shape[0]):
                for j in range(a.shape[1]):
                    f[i, j], df[i, j] = horner_with_derivative(a[i, j], z)
            return f, df

        return cls((ONE.coeffs, ONE.coeffs, Z.coeffs), forcing, m, n)

    def _run(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
        (a, da), (b, db), (c, dc) = (horner_with_derivative(p, z) for p in self._abc)
        f, df = self._forcing(z)
        return _sweep.sweep(a, b, c, da, db, dc, f, df, self.m, self.n)

    def __call__(self, z):
        v, d, _ = self._run(z)
        return v, d

    def value(self, z):
        """True values of the entry (may overflow to inf for huge entries)."""
        scalar = np.ndim(z) == 0
        v, _, e = self._run(z)
        out = np.array([complex(math.ldexp(x.real, int(k)), math.ldexp(x.imag, int(k)))
                        if np.isfinite(x) else x for x, k in zip(v, e)])
        return complex(out[0]) if scalar else out


def _entry(terms) -> Poly:
    return -poly_sum(terms)


def _build(M: int, N: int, step, kind: TableKind, spec, max_coeffs: int) -> PolyTable:
    if M < 0 or N < 0:
        raise ValueError(f"table size must be nonnegative, got M={M}, N={N}")
    rows: list[list[Poly]] = []
    used = 0
    for m in range(M + 1):
        row: list[Poly] = []
        for n in range(N + 1):
            p = step(rows, row, m, n)
            used += max(len(p), 1)
            if used > max_coeffs:
                raise TableTooLarge(
                    f"table {M}x{N} exceeds the budget of {max_coeffs} coefficients at entry ({m}, {n})"
                )
            row.append(p)
        rows.append(row)
    return PolyTable(tuple(tuple(r) for r in rows), kind, spec)


def _neighbors(rows, row, m, n):
    up = rows[m - 1][n] if m > 0 else ZERO
    left = row[n - 1] if n > 0 else ZERO
    diag = rows[m - 1][n - 1] if m > 0 and n > 0 else ZERO
    return up, left, diag


def build_table(spec: CoefficientTriple, M: int, N: int, *,
                max_coeffs: int = DEFAULT_MAX_COEFFS,
                kind: TableKind = TableKind.GENERAL_P) -> PolyTable:
    """Entries ``P[m, n]`` for the triple ``spec`` up to ``(M, N)``."""
    if spec.is_degenerate() and M + N > 0:
        warnings.warn("A = B = C = 0: every entry beyond (0, 0) is zero", DegenerateTripleWarning,
                      stacklevel=2)

    def step(rows, row, m, n):
        if m == 0 and n == 0:
            return ONE
        up, left, diag = _neighbors(rows, row, m, n)
        return _entry([poly_mul(spec.A, up), poly_mul(spec.B, left), poly_mul(spec.C, diag)])

    return _build(M, N, step, kind, spec, max_coeffs)


def build_H_table(M: int, N: int, *, max_coeffs: int = DEFAULT_MAX_COEFFS) -> PolyTable:
    return build_table(H_TRIPLE, M, N, max_coeffs=max_coeffs, kind=TableKind.SPECIAL_H)


def build_R_table(num: NumeratorSpec, M: int, N: int, *,
                  max_coeffs: int = DEFAULT_MAX_COEFFS) -> PolyTable:
    """Entries ``R[m, n]`` for numerator ``num`` over the denominator ``1 + s + t + z s t``."""

    def step(rows, row, m, n):
        up, left, diag = _neighbors(rows, row, m, n)
        forcing = num.term(m, n)
        return poly_sum([forcing, -up, -left, -diag.shift(1)])

    return _build(M, N, step, TableKind.GENERAL_R, num, max_coeffs)


def r_entry_from_h(num: NumeratorSpec, H: PolyTable, m: int, n: int) -> Poly:
    """``R[m, n] = sum a[i, j, k] z^k H[m-i, n-j]``: the coefficient-extraction route."""
    I, J, _ = num.bounds
    terms = []
    for i in range(min(I, m) + 1):
        for j in range(min(J, n) + 1):
            t = num.term(i, j)
            if not t.is_zero():
                terms.append(poly_mul(t, H[m - i, n - j]))
    return poly_sum(terms) if terms else ZERO


def q_closed_form_int(m: int, n: int) -> list[int]:
    """Exact integer coefficients (ascending) of ``Q[m, n]``, the ``s^m`` coefficient of ``(1+s)^n / (1+zs)``."""
    if m < 0 or n < 0:
        raise ValueError("indices must be nonnegative")
    c = [0] * (m + 1)
    if m < n:
        for k in range(m + 1):
            c[m - k] = (-1) ** (m + k) * math.comb(n, k)
    else:
        # (-1)^m (z-1)^n z^(m-n)
        for j in range(n + 1):
            c[m - n + j] = (-1) ** m * math.comb(n, j) * (-1) ** (n - j)
    return c


def q_closed_form(m: int, n: int) -> Poly:
    """``Q[m, n]`` in closed form as a :class:`Poly`."""
    return Poly([float(x) for x in q_closed_form_int(m, n)])


def q_series_oracle(m: int, n: int) -> Poly:
    """Same polynomial from ``z Q[k-1] + Q[k] = C(n, k)`` (zero for ``k > n``), ``Q[0] = 1``."""
    if m < 0 or n < 0:
        raise ValueError("indices must be nonnegative")
    q = ONE
    for k in range(1, m + 1):
        rhs = Poly([float(math.comb(n, k))]) if k <= n else ZERO
        q = rhs - q.shift(1)
    return q


def collapse_sequences(table: PolyTable, N: int) -> tuple[list[Poly], list[Poly]]:
    """``S[k] = sum_{m+2n=k} P[m, n]`` and ``R[k] = sum_{m+n=k} P[m, n]`` for ``k <= N``."""
    if table.M < N or table.N < N:
        raise ValueError(f"table {table.M}x{table.N} too small to collapse up to {N}")
    S, R = [], []
    for k in range(N + 1):
        S.append(poly_sum([table[k - 2 * j, j] for j in range(k // 2 + 1)]))
        R.append(poly_sum([table[k - j, j] for j in range(k + 1)]))
    return S, R


def trinomial_series_value(a: complex, b: complex, c: complex, m: int, n: int) -> complex:
    """Coefficient of ``s^m t^n`` in ``1/(1 + a s + b t + c s t)`` at numeric a, b, c.

    Expands ``sum_k (-(a s + b t + c s t))^k`` with the trinomial theorem, so it
    shares nothing with the row-by-row recurrence.
    """
    total = 0j
    for l in range(min(m, n) + 1):
        i, j = m - l, n - l
        coef = math.factorial(i + j + l) // (math.factorial(i) * math.factorial(j) * math.factorial(l))
        total += (-1) ** (i + j + l) * coef * a**i * b**j * c**l
    return total


class ThreeTermEvaluator:
    """Evaluate ``R[N]`` from ``R[k] = -(D R[k-1] + C R[k-2])``, ``R[0] = 1``, at points.

    Value and derivative share a power-of-two scale per point, as with
    :class:`RecurrenceEvaluator`.
    """

    def __init__(self, D: Poly, C: Poly, N: int):
        if N < 0:
            raise ValueError("N must be nonnegative")
        self.D, self.C, self.N = D, C, N

    def __call__(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
        d, dd = horner_with_derivative(self.D.coeffs, z)
        c, dc = horner_with_derivative(self.C.coeffs, z)
        r1, dr1 = np.ones_like(z), np.zeros_like(z)
        r2, dr2 = np.zeros_like(z), np.zeros_like(z)
        for _ in range(self.N):
            r = -(d * r1 + c * r2)
            dr = -(dd * r1 + d * dr1 + dc * r2 + c * dr2)
            big = np.maximum(np.abs(r), np.abs(r1))
            _, e = np.frexp(np.where(big > 0, big, 1.0))
            f = np.ldexp(1.0, -e)
            r2, dr2, r1, dr1 = r1 * f, dr1 * f, r * f, dr * f
        return r1, dr1
