"""All complex zeros of a polynomial by Aberth-Ehrlich simultaneous iteration.

The coefficients fix the degree, the starting radii and the residual
certificates.  The corrections themselves can come from any evaluator that
returns ``(p(z), p'(z))`` up to a common per-point factor; table entries
pass a recurrence-based evaluator because their monomial coefficients are
far too ill-conditioned to locate zeros accurately.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .polycore import Poly, horner_with_derivative

Evaluator = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class RootConfig:
    tol: float = 1e-12
    """Residual certificate a root must meet to be flagged converged."""
    step_tol: float = 1e-14
    """A root is frozen once its correction is below ``step_tol * max(1, |z|)``."""
    max_iters: int = 500
    seed: int = 0
    polish: bool = True

    def __post_init__(self):
        if self.tol <= 0 or self.step_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


@dataclass(frozen=True)
class RootSet:
    roots: np.ndarray
    residuals: np.ndarray
    converged: np.ndarray
    source_degree: int
    iterations: int = 0

    def __len__(self):
        return self.roots.size

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))

    @property
    def max_residual(self) -> float:
        return float(self.residuals.max()) if self.residuals.size else 0.0

    @classmethod
    def empty(cls, degree: int = 0) -> "RootSet":
        return cls(np.zeros(0, complex), np.zeros(0), np.zeros(0, bool), degree)


def _horner_evaluator(coeffs: np.ndarray) -> Evaluator:
    """Scaled Horner; uses the reversed polynomial outside the unit disk to avoid overflow."""
    rev = coeffs[::-1].copy()
    deg = coeffs.size - 1

    def ev(z):
        z = np.asarray(z, dtype=np.complex128)
        v = np.empty_like(z)
        d = np.empty_like(z)
        inner = np.abs(z) <= 1
        if inner.any():
            v[inner], d[inner] = horner_with_derivative(coeffs, z[inner])
        outer = ~inner
        if outer.any():
            w = 1.0 / z[outer]
            rv, rd = horner_with_derivative(rev, w)
            # p(z) = z^deg rev(1/z); both returned values carry the factor z^-deg
            v[outer] = rv
            d[outer] = deg * w * rv - w * w * rd
        return v, d

    return ev


def _abs_horner(coeffs: np.ndarray, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``p(z)`` and ``sum |c_k| |z|^k``, both divided by ``max(1, |z|)^deg`` to stay finite."""
    z = np.asarray(z, dtype=np.complex128)
    val = np.empty(z.shape, dtype=np.complex128)
    mag = np.empty(z.shape)
    inner = np.abs(z) <= 1
    a = np.abs(coeffs)
    acc = np.zeros(inner.sum(), dtype=np.complex128)
    accm = np.zeros(inner.sum())
    r = np.abs(z[inner])
    for ck, ak in zip(coeffs[::-1], a[::-1]):
        acc = acc * z[inner] + ck
        accm = accm * r + ak
    val[inner], mag[inner] = acc, accm
    w = 1.0 / z[~inner]
    rw = np.abs(w)
    acc = np.zeros(w.size, dtype=np.complex128)
    accm = np.zeros(w.size)
    for ck, ak in zip(coeffs, a):
        acc = acc * w + ck
        accm = accm * rw + ak
    val[~inner], mag[~inner] = acc, accm
    return val, mag


def scaled_residuals(p: Poly, z: np.ndarray) -> np.ndarray:
    """Componentwise backward error ``|p(z)| / sum |c_k| |z|^k``, evaluated without overflow."""
    val, mag = _abs_horner(p.coeffs / p.norm(), z)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.abs(val) / mag
    return np.where(mag > 0, out, 0.0)


HORNER_COND_MAX = 1e4
"""Where Horner's condition number is below this, it beats a supplied evaluator."""


def _hybrid_evaluator(coeffs: np.ndarray, ev: Evaluator) -> Evaluator:
    """Use ``ev`` except where Horner on ``coeffs`` is well conditioned.

    A recurrence evaluator can lose all accuracy far from the zeros, where
    its intermediate terms dwarf the result; there the leading coefficients
    dominate and Horner is reliable.  Only the ratio ``p / p'`` matters to
    the iteration, so the two sources may be mixed point by point.
    """
    horner = _horner_evaluator(coeffs)

    def hybrid(z):
        z = np.asarray(z, dtype=np.complex128)
        v, d = ev(z)
        v, d = np.array(v, dtype=np.complex128), np.array(d, dtype=np.complex128)
        val, mag = _abs_horner(coeffs, z)
        with np.errstate(invalid="ignore", divide="ignore"):
            good = mag <= HORNER_COND_MAX * np.abs(val)
        if good.any():
            vh, dh = horner(z[good])
            v[good], d[good] = vh, dh
        return v, d

    return hybrid


def initial_guesses(coeffs: np.ndarray, seed: int = 0) -> np.ndarray:
    """Starting points on circles whose radii come from the Newton polygon of ``log|c_k|``.

    Each edge of the upper convex hull from ``k1`` to ``k2`` contributes
    ``k2 - k1`` equispaced points; one seeded angle offset applies to all.
    """
    n = coeffs.size - 1
    with np.errstate(divide="ignore"):
        lg = np.log(np.abs(coeffs))
    pts = [k for k in range(n + 1) if np.isfinite(lg[k])]
    hull: list[int] = []
    for k in pts:
        while len(hull) >= 2:
            k1, k2 = hull[-2], hull[-1]
            if (lg[k2] - lg[k1]) * (k - k1) <= (lg[k] - lg[k1]) * (k2 - k1):
                hull.pop()
            else:
                break
        hull.append(k)
    offset = np.random.default_rng(seed).uniform(0.0, 2 * np.pi)
    out = []
    for k1, k2 in zip(hull[:-1], hull[1:]):
        cnt = k2 - k1
        r = np.exp((lg[k1] - lg[k2]) / cnt)
        ang = 2 * np.pi * np.arange(cnt) / cnt + offset + 2 * np.pi * k1 / n
        out.append(r * np.exp(1j * ang))
    return np.concatenate(out)


def _aberth(z: np.ndarray, ev: Evaluator, cfg: RootConfig, fixed_zero: int) -> tuple[np.ndarray, int]:
    n = z.size
    active = np.ones(n, dtype=bool)
    rng = np.random.default_rng(cfg.seed + 1)
    it = 0
    for it in range(1, cfg.max_iters + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            it -= 1
            break
        zi = z[idx]
        v, d = ev(zi)
        diff = zi[:, None] - z[None, :]
        diff[np.arange(idx.size), idx] = 1.0
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / diff
            inv[np.arange(idx.size), idx] = 0.0
            s = inv.sum(axis=1)
            if fixed_zero:
                s = s + fixed_zero / zi
            w = v / (d - v * s)
        w = np.where(v == 0, 0.0, w)
        bad = ~np.isfinite(w)
        if bad.any():
            # collision or overflow: nudge and retry next sweep
            w[bad] = -1e-3 * (1 + np.abs(zi[bad])) * np.exp(2j * np.pi * rng.uniform(size=bad.sum()))
        z[idx] = zi - w
        small = np.abs(w) <= cfg.step_tol * np.maximum(1.0, np.abs(zi))
        active[idx[small]] = False
    return z, it


def _polish(z: np.ndarray, ev: Evaluator, fixed_zero: int, steps: int = 2) -> np.ndarray:
    """Newton steps accepted only while they stay well inside the gap to the nearest other root."""
    if z.size == 0:
        return z
    z = z.copy()
    for _ in range(steps):
        v, d = ev(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            if fixed_zero:
                w = v / (d - v * fixed_zero / z)
            else:
                w = v / d
        gap = np.abs(z[:, None] - z[None, :])
        np.fill_diagonal(gap, np.inf)
        if fixed_zero:
            gap = np.minimum(gap, np.abs(z)[:, None])
        ok = np.isfinite(w) & (np.abs(w) < 0.1 * gap.min(axis=1))
        z[ok] -= w[ok]
    return z


def find_roots(p: Poly, cfg: RootConfig | None = None, *, evaluator: Evaluator | None = None) -> RootSet:
    """Every zero of ``p`` with multiplicity, plus per-root residual certificates.

    ``evaluator`` replaces Horner on the coefficients when given; it must
    describe the same polynomial.  Zeros at the origin are split off exactly
    from the trailing zero coefficients and appended at the end.
    """
    cfg = cfg or RootConfig()
    if p.is_zero():
        raise ValueError("the zero polynomial has no isolated roots")
    deg = int(p.degree)
    if deg == 0:
        return RootSet.empty(0)
    c = p.coeffs / p.norm()
    nzero = int(np.flatnonzero(c)[0])
    core = c[nzero:]
    if core.size == 1:
        roots = np.zeros(deg, dtype=complex)
        return RootSet(roots, np.zeros(deg), np.ones(deg, bool), deg)
    if evaluator is not None:
        ev, fixed = _hybrid_evaluator(c, evaluator), nzero
    else:
        ev, fixed = _horner_evaluator(core), 0
    z0 = initial_guesses(core, cfg.seed)
    z, iters = _aberth(z0, ev, cfg, fixed)
    if cfg.polish:
        z = _polish(z, ev, fixed)
    roots = np.concatenate([z, np.zeros(nzero, dtype=complex)])
    res = np.concatenate([scaled_residuals(p, z), np.zeros(nzero)])
    return RootSet(roots, res, res <= cfg.tol, deg, iters)


def polish_root(p: Poly, approx: complex, *, others=(), max_steps: int = 50) -> complex:
    """Newton iteration from ``approx``.

    When ``|p'|`` falls off the cliff near a multiple root, one Maehly step
    deflating ``others`` is taken instead and iteration stops.
    """
    z = complex(approx)
    dp = p.derivative()
    pn = p.norm()
    others = np.asarray(others, dtype=complex)
    for _ in range(max_steps):
        v = p(z)
        if v == 0:
            break
        d = dp(z)
        if abs(d) < 1e-300 * pn:
            s = np.sum(1.0 / (z - others)) if others.size else 0.0
            den = d - v * s
            if den != 0:
                z = z - v / den
            break
        step = v / d
        if step == 0 or not np.isfinite(step):
            break
        z -= step
    return z
