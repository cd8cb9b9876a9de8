"""Legendre reduction of the diagonal, limiting zero densities, nonreal-zero
counts for general numerators, and integer specializations."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import integrate

from .polycore import ONE, Poly, Z, poly_derivative, poly_mul, poly_sum, synthetic_divide
from .rootfind import RootConfig, RootSet, find_roots
from .tablegen import NumeratorSpec, PolyTable, build_H_table, build_R_table

DEFAULT_PAIRING_TOL = 1e-6


class NonRealZeroError(ValueError):
    pass


# ---------------------------------------------------------------- Legendre

def legendre(m: int) -> Poly:
    """``L_m`` from ``(k+1) L_{k+1} = (2k+1) z L_k - k L_{k-1}``."""
    if m < 0:
        raise ValueError("degree must be nonnegative")
    prev, cur = ONE, Z
    if m == 0:
        return prev
    for k in range(1, m):
        prev, cur = cur, poly_sum([cur.shift(1) * ((2 * k + 1) / (k + 1)), prev * (-k / (k + 1))])
    return cur


def legendre_values(m: int, u):
    """``L_m(u)`` and ``L_m'(u)`` by the three-term recurrence, vectorized in ``u``."""
    u = np.asarray(u, dtype=np.complex128)
    p0, d0 = np.ones_like(u), np.zeros_like(u)
    if m == 0:
        return p0, d0
    p1, d1 = u.copy(), np.ones_like(u)
    for k in range(1, m):
        p2 = ((2 * k + 1) * u * p1 - k * p0) / (k + 1)
        d2 = ((2 * k + 1) * (p1 + u * d1) - k * d0) / (k + 1)
        p0, d0, p1, d1 = p1, d1, p2, d2
    return p1, d1


def legendre_zeros(m: int, cfg: RootConfig | None = None) -> RootSet:
    return find_roots(legendre(m), cfg, evaluator=lambda u: legendre_values(m, u))


def diagonal_from_legendre(m: int) -> Poly:
    """Expand ``z^m L_m(2/z - 1) = sum_k l_k z^(m-k) (2 - z)^k`` into monomials."""
    lc = legendre(m).coeffs
    two_minus_z = Poly([2.0, -1.0])
    terms = []
    power = ONE
    for k in range(m + 1):
        if k < lc.size and lc[k] != 0:
            terms.append(poly_mul(power, Poly([lc[k]])).shift(m - k))
        power = power * two_minus_z
    return poly_sum(terms)


def diagonal_identity_residual(m: int, samples: int = 100, seed: int = 0,
                               H: PolyTable | None = None) -> float:
    """Max relative gap between ``H[m, m](z)`` and ``z^m L_m(2/z - 1)`` at random ``z``.

    ``H`` is evaluated through its recurrence and ``L_m`` through its own
    three-term recurrence, so the two sides share no code path.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    r = np.exp(rng.uniform(np.log(0.2), np.log(5.0), samples))
    z = r * np.exp(2j * np.pi * rng.uniform(size=samples))
    H = H if H is not None and H.M >= m and H.N >= m else build_H_table(m, m)
    lhs = H.evaluator(m, m).value(z)
    rhs = z**m * legendre_values(m, 2 / z - 1)[0]
    scale = np.maximum(np.abs(lhs), np.abs(rhs))
    scale[scale == 0] = 1.0
    return float(np.max(np.abs(lhs - rhs) / scale))


def diagonal_coefficient_residual(m: int, H: PolyTable | None = None) -> float:
    """Coefficient-level version: ``max|diff| / max|H coeffs|``."""
    H = H if H is not None and H.M >= m and H.N >= m else build_H_table(m, m)
    lhs = H[m, m].coeffs
    rhs = diagonal_from_legendre(m).coeffs
    n = max(lhs.size, rhs.size)
    diff = np.zeros(n, complex)
    diff[: lhs.size] += lhs
    diff[: rhs.size] -= rhs
    return float(np.abs(diff).max() / np.abs(lhs).max())


def hausdorff(a, b) -> float:
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size == 0 and b.size == 0:
        return 0.0
    if a.size == 0 or b.size == 0:
        return math.inf
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


# ---------------------------------------------------------------- densities

class DensityKind(str, enum.Enum):
    OMEGA_ARCSINE = "omega_arcsine"
    MU_TRANSFORMED = "mu_transformed"


def omega_pdf(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = 1.0 / (np.pi * np.sqrt(1.0 - x**2))
    return np.where(np.abs(x) < 1, out, 0.0)


def omega_cdf(x):
    x = np.clip(np.asarray(x, dtype=float), -1.0, 1.0)
    return 0.5 + np.arcsin(x) / np.pi


def mu_pdf(x):
    """Density ``2 / (pi x^2 sqrt(1 - (2/x - 1)^2))`` on ``(1, inf)``.

    Evaluated as the equal form ``1 / (pi x sqrt(x - 1))``, which avoids the
    cancellation in ``1 - (2/x - 1)^2`` next to ``x = 1``.
    """
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = 1.0 / (np.pi * x * np.sqrt(x - 1.0))
    return np.where(x > 1, out, 0.0)


def mu_cdf(x):
    """``1/2 - arcsin(2/x - 1)/pi`` for ``x >= 1``; zero to the left of the support."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        u = np.clip(2.0 / np.maximum(x, 1.0) - 1.0, -1.0, 1.0)
    out = 0.5 - np.arcsin(u) / np.pi
    out = np.where(x < 1, 0.0, out)
    return float(out) if out.ndim == 0 else out


def mu_quantile(q):
    q = np.asarray(q, dtype=float)
    return 2.0 / (1.0 + np.cos(np.pi * q))


def omega_quantile(q):
    return np.sin(np.pi * (np.asarray(q, dtype=float) - 0.5))


@dataclass(frozen=True)
class DensityModel:
    kind: DensityKind

    @property
    def support(self) -> tuple[float, float]:
        return (-1.0, 1.0) if self.kind is DensityKind.OMEGA_ARCSINE else (1.0, math.inf)

    def pdf(self, x):
        return omega_pdf(x) if self.kind is DensityKind.OMEGA_ARCSINE else mu_pdf(x)

    def cdf(self, x):
        return omega_cdf(x) if self.kind is DensityKind.OMEGA_ARCSINE else mu_cdf(x)

    def quantile(self, q):
        return omega_quantile(q) if self.kind is DensityKind.OMEGA_ARCSINE else mu_quantile(q)

    def total_mass(self) -> float:
        lo, hi = self.support
        if self.kind is DensityKind.MU_TRANSFORMED:
            # split at 2 so each piece has one endpoint singularity / the infinite tail
            a = integrate.quad(self.pdf, 1.0, 2.0, epsabs=1e-13, limit=200)[0]
            b = integrate.quad(self.pdf, 2.0, math.inf, epsabs=1e-13, limit=200)[0]
            return a + b
        a = integrate.quad(self.pdf, -1.0, 0.0, epsabs=1e-13, limit=200)[0]
        b = integrate.quad(self.pdf, 0.0, 1.0, epsabs=1e-13, limit=200)[0]
        return a + b


MU = DensityModel(DensityKind.MU_TRANSFORMED)
OMEGA = DensityModel(DensityKind.OMEGA_ARCSINE)


def mu_cdf_quadrature(x: float) -> float:
    """``F_mu(x)`` by tanh-sinh quadrature of the literal density at 30 digits.

    Serves as the independent reference for :func:`mu_cdf`; the endpoint
    singularity at 1 is what tanh-sinh handles natively.
    """
    if x <= 1:
        return 0.0
    with mpmath.workdps(30):
        def pdf(t):
            gap = 1 - (2 / t - 1) ** 2
            # nodes can round onto the endpoint itself, where the weight is negligible
            return 2 / (mpmath.pi * t**2 * mpmath.sqrt(gap)) if gap > 0 else mpmath.mpf(0)

        return float(mpmath.quad(pdf, [1, mpmath.mpf(x)]))


def validate_mu_cdf(xs=None) -> float:
    """Max abs gap between the closed form and quadrature on a grid over ``[1, 100]``."""
    if xs is None:
        xs = np.concatenate([1 + np.geomspace(1e-8, 1, 40), np.linspace(2, 100, 99)])
    return float(max(abs(mu_cdf(x) - mu_cdf_quadrature(x)) for x in xs))


def _real_parts(zeros, pairing_tol: float) -> np.ndarray:
    z = zeros.roots if isinstance(zeros, RootSet) else np.asarray(zeros, dtype=complex)
    z = np.asarray(z, dtype=complex).ravel()
    off = np.abs(z.imag) > pairing_tol * (1 + np.abs(z))
    if off.any():
        raise NonRealZeroError(f"{int(off.sum())} zero(s) lie off the real line, e.g. {z[off][0]}")
    return np.sort(z.real)


def ks_distance(zeros, model: DensityModel, pairing_tol: float = DEFAULT_PAIRING_TOL) -> float:
    """Sup distance between the empirical CDF of the (real) zeros and the model CDF."""
    x = _real_parts(zeros, pairing_tol)
    n = x.size
    if n == 0:
        raise ValueError("no zeros to compare")
    F = model.cdf(x)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def density_report(zeros, model: DensityModel, pairing_tol: float = DEFAULT_PAIRING_TOL):
    """Rows ``(x, empirical_cdf, model_cdf, diff)`` at each sorted zero."""
    x = _real_parts(zeros, pairing_tol)
    n = x.size
    emp = np.arange(1, n + 1) / n
    F = model.cdf(x)
    return [(float(a), float(e), float(f), float(e - f)) for a, e, f in zip(x, emp, F)]


# ---------------------------------------------------------------- nonreal zeros

@dataclass(frozen=True)
class NonrealCount:
    count: int
    pairing_tol: float
    bound: int | None = None

    @property
    def ok(self) -> bool:
        return self.bound is None or self.count <= self.bound


def count_nonreal(roots, pairing_tol: float = DEFAULT_PAIRING_TOL, bound: int | None = None) -> NonrealCount:
    if pairing_tol <= 0:
        raise ValueError("pairing_tol must be positive")
    z = roots.roots if isinstance(roots, RootSet) else np.asarray(roots, dtype=complex)
    z = np.asarray(z, dtype=complex).ravel()
    count = int(np.sum(np.abs(z.imag) > pairing_tol * (1 + np.abs(z))))
    return NonrealCount(count, pairing_tol, bound)


def random_numerator_spec(rng: np.random.Generator, max_bound: int = 2, coef_range: int = 3) -> NumeratorSpec:
    """Random integer numerator with tight bounds ``I, J, K <= max_bound``."""
    while True:
        I, J, K = rng.integers(0, max_bound + 1, size=3)
        a = rng.integers(-coef_range, coef_range + 1, size=(I + 1, J + 1, K + 1)).astype(float)
        spec = NumeratorSpec(a)
        if spec.is_tight():
            return spec


@dataclass(frozen=True)
class NonrealRow:
    m: int
    n: int
    I: int
    J: int
    K: int
    count: int
    bound: int
    converged: bool

    @property
    def passed(self) -> bool:
        return self.count <= self.bound


def nonreal_sweep(specs, pairs, pairing_tol: float = DEFAULT_PAIRING_TOL,
                  cfg: RootConfig | None = None) -> list[NonrealRow]:
    """Nonreal-zero counts of ``R[m, n]`` for each tightened spec and index pair."""
    rows = []
    Mmax = max(m for m, _ in pairs)
    Nmax = max(n for _, n in pairs)
    for spec in specs:
        spec = spec.tight()
        I, J, K = spec.bounds
        R = build_R_table(spec, Mmax, Nmax)
        for m, n in pairs:
            p = R[m, n]
            if p.is_zero() or p.degree < 1:
                rows.append(NonrealRow(m, n, I, J, K, 0, spec.nonreal_bound, True))
                continue
            rs = find_roots(p, cfg, evaluator=R.evaluator(m, n))
            c = count_nonreal(rs, pairing_tol, spec.nonreal_bound)
            rows.append(NonrealRow(m, n, I, J, K, c.count, spec.nonreal_bound, rs.all_converged))
    return rows


# ---------------------------------------------------------------- integers

def delannoy_oracle(m: int, n: int) -> int:
    """Exact Delannoy number by the lattice-path recurrence."""
    if m < 0 or n < 0:
        raise ValueError("indices must be nonnegative")
    row = [1] * (n + 1)
    for _ in range(m):
        new = [1] * (n + 1)
        for j in range(1, n + 1):
            new[j] = new[j - 1] + row[j] + row[j - 1]
        row = new
    return row[n]


def derivative_structure_residual(a: int, b: int, k: int) -> tuple[float, int]:
    """Divide ``D^k((z-1)^a z^b)`` by ``(z-1)^(a-k) z^(b-k)``.

    Returns the remainder relative to the dividend's norm and the quotient degree.
    """
    if k > min(a, b):
        raise ValueError("need k <= min(a, b)")
    f = poly_mul(Poly([-1.0, 1.0]) ** a, Z ** b)
    g = poly_derivative(f, k)
    q, rem0 = synthetic_divide(g, 0.0, b - k)
    q, rem1 = synthetic_divide(q, 1.0, a - k)
    scale = g.norm() or 1.0
    return max(rem0, rem1) / scale, int(q.degree)
