"""Compiled pointwise evaluation of the contiguous recurrence.

For each point the table

    X[m, n] = F[m, n] - (a X[m-1, n] + b X[m, n-1] + c X[m-1, n-1])

is swept row by row together with its z-derivative.  Rows are rescaled by
exact powers of two so large tables neither overflow nor lose bits; the
returned exponent restores the true magnitude.
"""

import math

import numba
import numpy as np

_BIG = 2.0**400


@numba.njit(cache=True)
def _absmax(v, d):
    mx = 0.0
    for i in range(v.size):
        t = max(abs(v[i].real), abs(v[i].imag), abs(d[i].real), abs(d[i].imag))
        if t > mx:
            mx = t
    return mx


@numba.njit(cache=True)
def sweep(a, b, c, da, db, dc, f, df, M, N):
    k = a.shape[0]
    F0 = f.shape[0]
    F1 = f.shape[1]
    val = np.empty(k, np.complex128)
    der = np.empty(k, np.complex128)
    exps = np.zeros(k, np.int64)
    prev_v = np.zeros(N + 1, np.complex128)
    prev_d = np.zeros(N + 1, np.complex128)
    cur_v = np.zeros(N + 1, np.complex128)
    cur_d = np.zeros(N + 1, np.complex128)
    for p in range(k):
        ap = a[p]
        bp = b[p]
        cp = c[p]
        dap = da[p]
        dbp = db[p]
        dcp = dc[p]
        prev_v[:] = 0
        prev_d[:] = 0
        e = 0
        for m in range(M + 1):
            for n in range(N + 1):
                v = 0j
                d = 0j
                if m < F0 and n < F1:
                    s = math.ldexp(1.0, -e)
                    v = f[m, n, p] * s
                    d = df[m, n, p] * s
                if m > 0:
                    u = prev_v[n]
                    w = prev_d[n]
                    v -= ap * u
                    d -= dap * u + ap * w
                if n > 0:
                    u = cur_v[n - 1]
                    w = cur_d[n - 1]
                    v -= bp * u
                    d -= dbp * u + bp * w
                    if m > 0:
                        u = prev_v[n - 1]
                        w = prev_d[n - 1]
                        v -= cp * u
                        d -= dcp * u + cp * w
                cur_v[n] = v
                cur_d[n] = d
                t = max(abs(v.real), abs(v.imag), abs(d.real), abs(d.imag))
                if t > _BIG:
                    sh = math.frexp(t)[1]
                    s = math.ldexp(1.0, -sh)
                    for j in range(N + 1):
                        cur_v[j] *= s
                        cur_d[j] *= s
                        prev_v[j] *= s
                        prev_d[j] *= s
                    e += sh
            mx = _absmax(cur_v, cur_d)
            if mx > 0.0 and mx == mx:
                sh = math.frexp(mx)[1]
                if sh != 0:
                    s = math.ldexp(1.0, -sh)
                    for j in range(N + 1):
                        cur_v[j] *= s
                        cur_d[j] *= s
                    e += sh
            for j in range(N + 1):
                prev_v[j] = cur_v[j]
                prev_d[j] = cur_d[j]
        val[p] = prev_v[N]
        der[p] = prev_d[N]
        exps[p] = e
    return val, der, exps
