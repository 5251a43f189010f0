"""Numba kernels for lattice enumeration.

Both kernels work in integer coordinates. With Gram = R^T R (R upper
triangular) and u = y G^{-1}, the squared distance from y to zG is
||R (z - u)^T||^2, which decomposes level by level from the last
coordinate down (Fincke-Pohst / Schnorr-Euchner).
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _zigzag(z0, s, i):
    if i == 0:
        return z0
    m = (i + 1) // 2
    if i % 2 == 1:
        return z0 + m * s
    return z0 - m * s


@njit(cache=True, nogil=True)
def _center(R, u, z, k, n):
    c = u[k]
    for j in range(k + 1, n):
        c -= R[k, j] / R[k, k] * (z[j] - u[j])
    return c


@njit(cache=True, nogil=True)
def closest_one(R, u, out):
    """Schnorr-Euchner search for the z minimizing ||R(z-u)||; ties -> lexicographically smallest z.

    Writes the winner into ``out`` and returns its squared distance.
    """
    n = u.shape[0]
    z = np.empty(n, np.int64)
    z0 = np.empty(n, np.int64)
    s = np.empty(n, np.int64)
    cnt = np.zeros(n, np.int64)
    cen = np.empty(n)
    dist = np.zeros(n + 1)

    # Babai rounding point seeds the radius
    best = 0.0
    for i in range(n - 1, -1, -1):
        out[i] = np.int64(np.floor(u[i] + 0.5))
    for i in range(n):
        acc = 0.0
        for j in range(i, n):
            acc += R[i, j] * (out[j] - u[j])
        best += acc * acc
    tol = 1e-12 * (1.0 + best)

    k = n - 1
    cen[k] = u[k]
    z0[k] = np.int64(np.floor(cen[k] + 0.5))
    s[k] = 1 if cen[k] >= z0[k] else -1
    cnt[k] = 0
    while True:
        zk = _zigzag(z0[k], s[k], cnt[k])
        diff = zk - cen[k]
        d = dist[k + 1] + R[k, k] * R[k, k] * diff * diff
        if d <= best + tol:
            z[k] = zk
            if k == 0:
                if d < best - tol:
                    best = d
                    tol = 1e-12 * (1.0 + best)
                    for i in range(n):
                        out[i] = z[i]
                else:
                    smaller = False
                    for i in range(n):
                        if z[i] != out[i]:
                            smaller = z[i] < out[i]
                            break
                    if smaller:
                        for i in range(n):
                            out[i] = z[i]
                    if d < best:
                        best = d
                cnt[k] += 1
            else:
                dist[k] = d
                k -= 1
                cen[k] = _center(R, u, z, k, n)
                z0[k] = np.int64(np.floor(cen[k] + 0.5))
                s[k] = 1 if cen[k] >= z0[k] else -1
                cnt[k] = 0
        else:
            k += 1
            if k == n:
                break
            cnt[k] += 1
    return best


@njit(cache=True, nogil=True)
def closest_batch(R, U):
    m, n = U.shape
    Z = np.empty((m, n), np.int64)
    D = np.empty(m)
    row = np.empty(n, np.int64)
    for i in range(m):
        D[i] = closest_one(R, U[i], row)
        for j in range(n):
            Z[i, j] = row[j]
    return Z, D


@njit(cache=True, nogil=True)
def enumerate_ball(R, u, r2, cap):
    """All z with ||R(z-u)||^2 <= r2. Returns (Z, D, overflow)."""
    n = u.shape[0]
    size = 64
    Z = np.empty((size, n), np.int64)
    D = np.empty(size)
    found = 0
    z = np.empty(n, np.int64)
    z0 = np.empty(n, np.int64)
    s = np.empty(n, np.int64)
    cnt = np.zeros(n, np.int64)
    cen = np.empty(n)
    dist = np.zeros(n + 1)

    k = n - 1
    cen[k] = u[k]
    z0[k] = np.int64(np.floor(cen[k] + 0.5))
    s[k] = 1 if cen[k] >= z0[k] else -1
    cnt[k] = 0
    while True:
        zk = _zigzag(z0[k], s[k], cnt[k])
        diff = zk - cen[k]
        d = dist[k + 1] + R[k, k] * R[k, k] * diff * diff
        if d <= r2:
            z[k] = zk
            if k == 0:
                if found == cap:
                    return Z[:found], D[:found], True
                if found == size:
                    size *= 2
                    Z2 = np.empty((size, n), np.int64)
                    D2 = np.empty(size)
                    Z2[:found] = Z[:found]
                    D2[:found] = D[:found]
                    Z = Z2
                    D = D2
                for i in range(n):
                    Z[found, i] = z[i]
                D[found] = d
                found += 1
                cnt[k] += 1
            else:
                dist[k] = d
                k -= 1
                cen[k] = _center(R, u, z, k, n)
                z0[k] = np.int64(np.floor(cen[k] + 0.5))
                s[k] = 1 if cen[k] >= z0[k] else -1
                cnt[k] = 0
        else:
            k += 1
            if k == n:
                break
            cnt[k] += 1
    return Z[:found], D[:found], False
