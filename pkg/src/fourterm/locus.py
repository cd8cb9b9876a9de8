"""The zero locus ``{z : Im phi(z) = 0, Re phi(z) >= 1}`` with ``phi = C / (A B)``.

Membership tests, a marching-squares tracer for plotting, and the analogous
test for the collapsed three-term sequence (``D^2 / C`` real in ``[0, 4]``).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .polycore import Poly, horner_with_derivative
from .rootfind import find_roots
from .tablegen import CoefficientTriple

TRACE_TOL = 1e-10


class DomainError(ValueError):
    """``phi`` evaluated at a zero of ``A B``."""


class Membership(str, enum.Enum):
    ON = "on"
    OFF = "off"
    INDETERMINATE = "indeterminate"

    def __bool__(self):
        return self is Membership.ON


def _poly_roots(p: Poly) -> np.ndarray:
    if p.is_zero() or p.degree < 1:
        return np.zeros(0, dtype=complex)
    return find_roots(p).roots


@dataclass(frozen=True)
class LocusFunction:
    triple: CoefficientTriple

    @cached_property
    def excluded_points(self) -> np.ndarray:
        """Zeros of ``A`` and of ``B`` (each listed once per multiplicity)."""
        return np.concatenate([_poly_roots(self.triple.A), _poly_roots(self.triple.B)])

    def numerator_denominator(self, z):
        z = np.asarray(z, dtype=np.complex128)
        return self.triple.C(z), self.triple.A(z) * self.triple.B(z)

    def phi_array(self, z) -> np.ndarray:
        """Vectorized ``phi``; NaN where ``A B`` vanishes."""
        num, den = self.numerator_denominator(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = num / den
        return np.where(den == 0, np.nan + 0j, out)

    def distance_to_excluded(self, z) -> np.ndarray | float:
        ex = self.excluded_points
        z = np.asarray(z, dtype=np.complex128)
        if ex.size == 0:
            return np.full(z.shape, np.inf) if z.ndim else np.inf
        d = np.abs(z[..., None] - ex).min(axis=-1)
        return d if z.ndim else float(d)


def phi(lf: LocusFunction, z: complex) -> complex:
    num, den = lf.numerator_denominator(complex(z))
    if den == 0:
        raise DomainError(f"A(z)B(z) = 0 at z = {z}")
    return complex(num / den)


def _member(w: complex, tol: float) -> bool:
    return abs(w.imag) <= tol * (1 + abs(w)) and w.real >= 1 - tol


def on_curve(lf: LocusFunction, z: complex, tol: float) -> Membership:
    if tol <= 0:
        raise ValueError("tol must be positive")
    if lf.distance_to_excluded(complex(z)) <= tol:
        return Membership.INDETERMINATE
    try:
        w = phi(lf, z)
    except DomainError:
        return Membership.INDETERMINATE
    return Membership.ON if _member(w, tol) else Membership.OFF


def on_curve_many(lf: LocusFunction, zs, tol: float) -> list[Membership]:
    return [on_curve(lf, z, tol) for z in np.asarray(zs, dtype=complex).ravel()]


def three_term_curve_membership(D: Poly, C: Poly, z: complex, tol: float,
                                c_roots: np.ndarray | None = None) -> Membership:
    """Is ``D(z)^2 / C(z)`` real and within ``[0, 4]`` (up to ``tol``)?"""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if c_roots is None:
        c_roots = _poly_roots(C)
    if c_roots.size and np.abs(z - c_roots).min() <= tol:
        return Membership.INDETERMINATE
    cz = C(z)
    if cz == 0:
        return Membership.INDETERMINATE
    w = D(z) ** 2 / cz
    ok = abs(w.imag) <= tol * (1 + abs(w)) and -tol <= w.real <= 4 + tol
    return Membership.ON if ok else Membership.OFF


@dataclass(frozen=True)
class BBox:
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self):
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ValueError(f"degenerate bounding box {self}")

    def contains(self, z: complex, pad: float = 0.0) -> bool:
        return (self.xmin - pad <= z.real <= self.xmax + pad
                and self.ymin - pad <= z.imag <= self.ymax + pad)

    def as_tuple(self):
        return (self.xmin, self.xmax, self.ymin, self.ymax)


@dataclass(frozen=True)
class CurvePolyline:
    segments: list = field(default_factory=list)
    bbox: BBox | None = None
    grid_step: float = 0.0

    def points(self) -> np.ndarray:
        if not self.segments:
            return np.zeros(0, dtype=complex)
        return np.concatenate([np.asarray(s, dtype=complex) for s in self.segments])

    def is_empty(self) -> bool:
        return not self.segments


def _imag_field(lf: LocusFunction, z):
    """``Im(C conj(A B))``: same sign as ``Im phi`` and smooth through the poles."""
    num, den = lf.numerator_denominator(z)
    return (num * np.conj(den)).imag


def _bisect_edge(lf: LocusFunction, z0: complex, z1: complex, g0: float, steps: int = 60) -> complex:
    for _ in range(steps):
        zm = 0.5 * (z0 + z1)
        if zm == z0 or zm == z1:
            break
        gm = float(_imag_field(lf, zm))
        if gm == 0:
            return zm
        if (gm > 0) == (g0 > 0):
            z0, g0 = zm, gm
        else:
            z1 = zm
    return 0.5 * (z0 + z1)


def _phi_and_derivative(lf: LocusFunction, z: complex):
    (a, da), (b, db), (c, dc) = (horner_with_derivative(p.coeffs, np.array([z]))
                                 for p in (lf.triple.A, lf.triple.B, lf.triple.C))
    den = a * b
    dden = da * b + a * db
    w = c / den
    dw = (dc * den - c * dden) / den**2
    return complex(w[0]), complex(dw[0])


def _endpoint(lf: LocusFunction, inside: complex, outside: complex) -> complex | None:
    """Point on the contour between two traced vertices where ``Re phi`` crosses 1."""
    lo, hi = inside, outside
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        w = lf.phi_array(mid)
        if np.isnan(w) or w.real >= 1:
            lo = mid
        else:
            hi = mid
    z = lo
    for _ in range(8):
        w, dw = _phi_and_derivative(lf, z)
        if dw == 0 or not np.isfinite(dw):
            break
        # move along grad(Im phi) = (Im phi', Re phi') back onto Im phi = 0
        z = z - w.imag * complex(dw.imag, dw.real) / abs(dw) ** 2
    return z


def _accept(lf: LocusFunction, z: complex, tol: float) -> bool:
    w = lf.phi_array(z)
    return bool(np.isfinite(w)) and abs(w.imag) <= tol * (1 + abs(w)) and w.real >= 1 - tol


# edges of a cell: 0 bottom (v00-v10), 1 right (v10-v11), 2 top (v01-v11), 3 left (v00-v01)
_CASES = {
    1: [(3, 0)], 2: [(0, 1)], 3: [(3, 1)], 4: [(1, 2)], 6: [(0, 2)], 7: [(3, 2)],
    8: [(2, 3)], 9: [(2, 0)], 11: [(2, 1)], 12: [(1, 3)], 13: [(1, 0)], 14: [(0, 3)],
}


def trace_curve(lf: LocusFunction, bbox: BBox, grid_step: float, tol: float = TRACE_TOL) -> CurvePolyline:
    """Marching squares on ``Im phi = 0`` over ``bbox``, kept where ``Re phi >= 1``.

    Cell-edge crossings are refined by bisection; cells holding a zero of
    ``A B`` are skipped.  Output order follows row-major cell order.
    """
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    nx = max(1, int(np.ceil((bbox.xmax - bbox.xmin) / grid_step)))
    ny = max(1, int(np.ceil((bbox.ymax - bbox.ymin) / grid_step)))
    xs = np.linspace(bbox.xmin, bbox.xmax, nx + 1)
    ys = np.linspace(bbox.ymin, bbox.ymax, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    G = _imag_field(lf, X + 1j * Y)
    pos = G > 0

    skip = np.zeros((ny, nx), dtype=bool)
    hx, hy = xs[1] - xs[0], ys[1] - ys[0]
    for e in lf.excluded_points:
        # every closed cell containing the point: one, or up to four on grid lines
        fi, fj = (e.imag - bbox.ymin) / hy, (e.real - bbox.xmin) / hx
        rows = range(int(np.floor(fi - 1e-9)), int(np.floor(fi + 1e-9)) + 1)
        cols = range(int(np.floor(fj - 1e-9)), int(np.floor(fj + 1e-9)) + 1)
        for ii in rows:
            for jj in cols:
                if 0 <= ii < ny and 0 <= jj < nx:
                    skip[ii, jj] = True

    vertex_cache: dict = {}

    def edge_point(i, j, e):
        # canonical key: horizontal edge ('h', row, col) or vertical ('v', row, col)
        if e == 0:
            key = ("h", i, j)
        elif e == 2:
            key = ("h", i + 1, j)
        elif e == 3:
            key = ("v", i, j)
        else:
            key = ("v", i, j + 1)
        if key not in vertex_cache:
            kind, r, c = key
            z0 = complex(xs[c], ys[r])
            z1 = complex(xs[c + 1], ys[r]) if kind == "h" else complex(xs[c], ys[r + 1])
            g0 = G[r, c]
            g1 = G[r, c + 1] if kind == "h" else G[r + 1, c]
            if g0 == 0:
                vertex_cache[key] = z0
            elif g1 == 0:
                vertex_cache[key] = z1
            else:
                vertex_cache[key] = _bisect_edge(lf, z0, z1, float(g0))
        return key

    links: dict = {}
    order: list = []
    for i in range(ny):
        for j in range(nx):
            if skip[i, j]:
                continue
            idx = (pos[i, j] * 1) | (pos[i, j + 1] * 2) | (pos[i + 1, j + 1] * 4) | (pos[i + 1, j] * 8)
            if idx in (0, 15):
                continue
            if idx in (5, 10):
                centre = complex(xs[j] + xs[j + 1], ys[i] + ys[i + 1]) / 2
                c_pos = _imag_field(lf, centre) > 0
                if idx == 5:
                    pairs = [(3, 2), (1, 0)] if c_pos else [(3, 0), (1, 2)]
                else:
                    pairs = [(0, 3), (2, 1)] if c_pos else [(0, 1), (2, 3)]
            else:
                pairs = _CASES[idx]
            for ea, eb in pairs:
                ka, kb = edge_point(i, j, ea), edge_point(i, j, eb)
                for k in (ka, kb):
                    if k not in links:
                        links[k] = []
                        order.append(k)
                links[ka].append(kb)
                links[kb].append(ka)

    # chain shared edge points into polylines
    seen = set()
    chains = []
    for start in order:
        if start in seen:
            continue
        # walk to one end first so open chains are emitted whole
        end, prev = start, None
        visited = {start}
        while True:
            nxt = [k for k in links[end] if k != prev and k not in visited]
            if not nxt:
                break
            prev, end = end, nxt[0]
            visited.add(end)
        chain = [end]
        seen.add(end)
        prev, cur = None, end
        while True:
            nxt = [k for k in links[cur] if k != prev and k not in seen]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            seen.add(cur)
            chain.append(cur)
        chains.append([vertex_cache[k] for k in chain])

    segments = []
    for pts in chains:
        current: list = []
        prev_pt, prev_ok = None, False
        for z in pts:
            ok = _accept(lf, z, tol)
            if ok and not prev_ok and prev_pt is not None:
                zend = _endpoint(lf, z, prev_pt)
                if zend is not None and _accept(lf, zend, tol):
                    current.append(zend)
            if not ok and prev_ok:
                zend = _endpoint(lf, prev_pt, z)
                if zend is not None and _accept(lf, zend, tol):
                    current.append(zend)
                if len(current) > 1:
                    segments.append(current)
                current = []
            if ok:
                current.append(z)
            prev_pt, prev_ok = z, ok
        if len(current) > 1:
            segments.append(current)
    # a refined endpoint can coincide with the grid vertex next to it
    segments = [[z for k, z in enumerate(seg) if k == 0 or abs(z - seg[k - 1]) > 1e-14 * (1 + abs(z))]
                for seg in segments]
    return CurvePolyline([seg for seg in segments if len(seg) > 1], bbox, grid_step)
