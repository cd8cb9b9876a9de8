"""Dense univariate polynomials with complex double coefficients.

Coefficients are stored in ascending order: ``coeffs[k]`` multiplies ``z**k``.
The zero polynomial has no coefficients and degree ``-inf``.
"""

from __future__ import annotations

import math
from numbers import Number
from typing import Iterable, Sequence

import numpy as np

TRIM_RTOL = 1e-14
ZERO_DEGREE = -math.inf


def _as_array(coeffs) -> np.ndarray:
    arr = np.array(coeffs, dtype=np.complex128, copy=True).reshape(-1)
    return arr


def _trim_exact(arr: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(arr)
    if nz.size == 0:
        return arr[:0]
    return arr[: nz[-1] + 1]


def _trim_cancelled(arr: np.ndarray, ref: np.ndarray, rtol: float = TRIM_RTOL) -> np.ndarray:
    """Drop trailing coefficients that are cancellation noise.

    ``ref[k]`` is the magnitude of the terms that were combined into
    ``arr[k]``; a trailing coefficient goes when ``|arr[k]| <= rtol * ref[k]``.
    """
    end = arr.size
    while end > 0 and abs(arr[end - 1]) <= rtol * ref[end - 1]:
        end -= 1
    return arr[:end]


class Poly:
    """Immutable dense polynomial ``sum_k coeffs[k] z**k``."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[complex] | np.ndarray = ()):
        arr = _trim_exact(_as_array(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs))
        if not np.all(np.isfinite(arr)):
            raise ValueError("polynomial coefficients must be finite")
        arr.flags.writeable = False
        self._c = arr

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "Poly":
        p = cls.__new__(cls)
        arr = np.ascontiguousarray(arr, dtype=np.complex128)
        arr.flags.writeable = False
        p._c = arr
        return p

    @classmethod
    def constant(cls, c: complex) -> "Poly":
        return cls([c])

    @classmethod
    def monomial(cls, k: int, c: complex = 1.0) -> "Poly":
        arr = np.zeros(k + 1, dtype=np.complex128)
        arr[k] = c
        return cls(arr)

    @classmethod
    def from_roots(cls, roots: Sequence[complex]) -> "Poly":
        p = cls([1.0])
        for r in roots:
            p = p * cls([-r, 1.0])
        return p

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int | float:
        return self._c.size - 1 if self._c.size else ZERO_DEGREE

    def is_zero(self) -> bool:
        return self._c.size == 0

    def norm(self) -> float:
        """Max-modulus of the coefficients (0 for the zero polynomial)."""
        return float(np.abs(self._c).max()) if self._c.size else 0.0

    def leading(self) -> complex:
        return complex(self._c[-1]) if self._c.size else 0j

    def is_real(self) -> bool:
        return bool(np.all(self._c.imag == 0))

    def __call__(self, z):
        return poly_eval(self, z)

    def __add__(self, other):
        return poly_add(self, _coerce(other))

    __radd__ = __add__

    def __neg__(self):
        return Poly._wrap(-self._c)

    def __sub__(self, other):
        return poly_add(self, -_coerce(other))

    def __rsub__(self, other):
        return poly_add(_coerce(other), -self)

    def __mul__(self, other):
        if isinstance(other, Number):
            return scale(self, other)
        return poly_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = Poly([1.0])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self._c.shape == other._c.shape and bool(np.all(self._c == other._c))

    __hash__ = None

    def __len__(self):
        return self._c.size

    def __repr__(self):
        return f"Poly({[complex(c) for c in self._c]!r})"

    def derivative(self, order: int = 1) -> "Poly":
        return poly_derivative(self, order)

    def shift(self, k: int) -> "Poly":
        """Multiply by ``z**k``."""
        if self.is_zero() or k == 0:
            return self
        return Poly._wrap(np.concatenate([np.zeros(k, dtype=np.complex128), self._c]))


def _coerce(x) -> Poly:
    if isinstance(x, Poly):
        return x
    if isinstance(x, Number):
        return Poly([x])
    return Poly(x)


ZERO = Poly()
ONE = Poly([1.0])
Z = Poly([0.0, 1.0])


def poly_add(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    out = np.zeros(n, dtype=np.complex128)
    ref = np.zeros(n)
    out[: len(p)] += p.coeffs
    out[: len(q)] += q.coeffs
    ref[: len(p)] += np.abs(p.coeffs)
    ref[: len(q)] += np.abs(q.coeffs)
    return Poly._wrap(_trim_cancelled(out, ref))


def poly_sum(terms: Sequence[Poly]) -> Poly:
    """Sum several polynomials, trimming cancellation against all terms at once."""
    n = max((len(t) for t in terms), default=0)
    out = np.zeros(n, dtype=np.complex128)
    ref = np.zeros(n)
    for t in terms:
        out[: len(t)] += t.coeffs
        ref[: len(t)] += np.abs(t.coeffs)
    return Poly._wrap(_trim_cancelled(out, ref))


def poly_mul(p: Poly, q: Poly) -> Poly:
    if p.is_zero() or q.is_zero():
        return ZERO
    return Poly._wrap(_trim_exact(np.convolve(p.coeffs, q.coeffs)))


def scale(p: Poly, c: complex) -> Poly:
    if c == 0 or p.is_zero():
        return ZERO
    return Poly._wrap(_trim_exact(p.coeffs * c))


def poly_eval(p: Poly, z):
    """Horner evaluation; accepts a scalar or an array of points."""
    z = np.asarray(z, dtype=np.complex128)
    acc = np.zeros_like(z)
    for c in p.coeffs[::-1]:
        acc = acc * z + c
    return complex(acc) if acc.ndim == 0 else acc


def horner_with_derivative(coeffs: np.ndarray, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Value and first derivative of the polynomial with ``coeffs`` at ``z``."""
    v = np.zeros_like(z)
    d = np.zeros_like(z)
    for c in coeffs[::-1]:
        d = d * z + v
        v = v * z + c
    return v, d


def poly_derivative(p: Poly, order: int = 1) -> Poly:
    if order < 0:
        raise ValueError("derivative order must be nonnegative")
    c = p.coeffs
    if order == 0:
        return p
    if order >= c.size:
        return ZERO
    k = np.arange(order, c.size)
    factor = np.array([falling_factorial(int(j), order) for j in k], dtype=np.float64)
    return Poly._wrap(_trim_exact(c[order:] * factor))


def falling_factorial(n: int, i: int) -> int:
    """Exact ``n (n-1) ... (n-i+1)``; ``(n)_0 = 1`` and zero once ``i > n``."""
    if n < 0 or i < 0:
        raise ValueError("falling factorial needs nonnegative arguments")
    return math.perm(n, i) if i <= n else 0


def shifted_derivative_expansion(f: Poly, m: int, n: int) -> Poly:
    """Right-hand side of ``z^m D^n f = sum_i C(m,i) (-1)^i (n)_i D^(n-i)(z^(m-i) f)``."""
    if m < 0 or n < 0:
        raise ValueError("m and n must be nonnegative")
    if n < m:
        raise ValueError(f"need n >= m so every derivative order is nonnegative (m={m}, n={n})")
    terms = []
    for i in range(m + 1):
        weight = math.comb(m, i) * (-1) ** i * falling_factorial(n, i)
        if weight:
            terms.append(poly_derivative(f.shift(m - i), n - i) * float(weight))
    return poly_sum(terms)


def synthetic_divide(p: Poly, root: complex, times: int = 1) -> tuple[Poly, float]:
    """Divide ``p`` by ``(z - root)**times``.

    Returns the quotient and the max-modulus of the accumulated remainders.
    Division by ``z`` itself only shifts coefficients, so the remainder there
    is exactly the dropped low-order coefficients.
    """
    c = np.array(p.coeffs)
    rem = 0.0
    for _ in range(times):
        if c.size == 0:
            break
        if root == 0:
            rem = max(rem, abs(c[0]))
            c = c[1:]
            continue
        q = np.empty(c.size - 1, dtype=np.complex128)
        acc = 0j
        for k in range(c.size - 1, 0, -1):
            acc = acc * root + c[k]
            q[k - 1] = acc
        rem = max(rem, abs(acc * root + c[0]))
        c = q
    return Poly(c), rem


def to_pairs(p: Poly) -> list[list[float]]:
    return [[float(c.real), float(c.imag)] for c in p.coeffs]


def from_pairs(data) -> Poly:
    """Inverse of :func:`to_pairs`; bare numbers are accepted as real coefficients."""
    out = []
    for item in data:
        if isinstance(item, (list, tuple)):
            if len(item) != 2:
                raise ValueError(f"coefficient pair must have two entries, got {item!r}")
            out.append(complex(float(item[0]), float(item[1])))
        elif isinstance(item, Number) and not isinstance(item, bool):
            out.append(complex(item))
        else:
            raise ValueError(f"bad coefficient {item!r}")
    return Poly(out)
