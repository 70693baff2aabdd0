"""Compiled inner loop for Kloosterman sums.

Every term phase of S(m, n, c, nu) for the supported multipliers is an
integer K over L = 24c. The loop works on int64 numerators only; per modulus
it builds the unit mask, the inverse table (batch inversion), the Jacobi
character d -> (d/c') for the odd part c' of c, and a two-level table of
L-th roots of unity, so a term costs a few table lookups and one complex
multiply. Multiplier exponents are reduced mod 24 before any product is
formed; nothing overflows for c < 10**8.
"""

import math

import numba
import numpy as np

BASE_TRIVIAL = 0
BASE_ETA = 1
BASE_THETA = 2


@numba.njit(cache=True, nogil=True)
def _jacobi(a, n):
    # n odd, positive
    a %= n
    s = 1
    while a != 0:
        while a % 2 == 0:
            a //= 2
            r = n % 8
            if r == 3 or r == 5:
                s = -s
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            s = -s
        a %= n
    return s if n == 1 else 0


@numba.njit(cache=True, nogil=True)
def _inverse(d, c):
    # inverse of d mod c in [0, c); 0 if not a unit
    r0, r1 = c, d % c
    t0, t1 = 0, 1
    while r1 != 0:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if r0 != 1:
        return 0
    return t0 % c


@numba.njit(cache=True, nogil=True)
def _prime_factors(n):
    ps = np.zeros(16, dtype=np.int64)
    es = np.zeros(16, dtype=np.int64)
    k = 0
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            ps[k] = p
            es[k] = e
            k += 1
        p += 1
    if n > 1:
        ps[k] = n
        es[k] = 1
        k += 1
    return ps[:k], es[:k]


@numba.njit(cache=True, nogil=True)
def _tables(c):
    """units mask, inverse table, and (d/c') for the odd part c' of c."""
    ps, es = _prime_factors(c)
    unit = np.ones(c, dtype=np.bool_)
    if c == 1:
        inv = np.zeros(1, dtype=np.int64)
        chi = np.ones(1, dtype=np.int8)
        return unit, inv, chi
    unit[0] = False
    for p in ps:
        for j in range(0, c, p):
            unit[j] = False
    # batch inversion over the units
    us = np.nonzero(unit)[0]
    nu_ = us.shape[0]
    pre = np.empty(nu_, dtype=np.int64)
    acc = 1
    for i in range(nu_):
        acc = acc * us[i] % c
        pre[i] = acc
    inv = np.zeros(c, dtype=np.int64)
    t = _inverse(acc, c)
    for i in range(nu_ - 1, 0, -1):
        inv[us[i]] = t * pre[i - 1] % c
        t = t * us[i] % c
    inv[us[0]] = t
    # Jacobi character of the odd part: product of Legendre symbols (d/p)
    # over odd primes with odd exponent.
    chi = np.ones(c, dtype=np.int8)
    for i in range(ps.shape[0]):
        p = ps[i]
        if p == 2 or es[i] % 2 == 0:
            continue
        leg = -np.ones(p, dtype=np.int8)
        leg[0] = 0
        for x in range(1, (p + 1) // 2):
            leg[x * x % p] = 1
        r = 0
        for d in range(c):
            chi[d] *= leg[r]
            r += 1
            if r == p:
                r = 0
    return unit, inv, chi


@numba.njit(cache=True, nogil=True)
def _sym_c_over_d(c, codd, s2, d, chi_d):
    # (c/d) for odd d > 0 with c = 2^s2 * codd: (2/d)^s2 (d/codd) (-1)^{(codd-1)/2 (d-1)/2}
    s = chi_d
    if s2 % 2 == 1:
        r = d % 8
        if r == 3 or r == 5:
            s = -s
    if codd % 4 == 3 and d % 4 == 3:
        s = -s
    return s


@numba.njit(cache=True, nogil=True)
def sums_for_c(c, base, conj, twist_tab, ms, ns, out_re, out_im):
    """S(m_j, n_j, c, nu) for every pair j.

    ms[j], ns[j] are 24*(m - alpha) and 24*(n - alpha). twist_tab[r] is the
    twisting character at d = r mod len(twist_tab). Returns
    (term_count, skipped) and writes the sums into out_re/out_im.
    """
    npairs = ms.shape[0]
    L = 24 * c
    unit, inv, chi = _tables(c)
    codd = c
    s2 = 0
    while codd % 2 == 0:
        codd //= 2
        s2 += 1
    # e(K/L) = hi[K // B] * lo[K % B]
    B = int(math.sqrt(L)) + 1
    nh = L // B + 1
    lo_re = np.empty(B)
    lo_im = np.empty(B)
    for j in range(B):
        th = 2.0 * math.pi * j / L
        lo_re[j] = math.cos(th)
        lo_im[j] = math.sin(th)
    hi_re = np.empty(nh)
    hi_im = np.empty(nh)
    for h in range(nh):
        th = 2.0 * math.pi * (h * B) / L
        hi_re[h] = math.cos(th)
        hi_im[h] = math.sin(th)
    msl = np.empty(npairs, dtype=np.int64)
    nsl = np.empty(npairs, dtype=np.int64)
    for j in range(npairs):
        msl[j] = ms[j] % L
        nsl[j] = ns[j] % L
    re = np.zeros(npairs)
    im = np.zeros(npairs)
    cre = np.zeros(npairs)
    cim = np.zeros(npairs)
    ntw = twist_tab.shape[0]
    c24 = c % 24
    cc = (c24 * c24 - 1) % 24
    count = 0
    skipped = 0
    for d in range(c):
        if not unit[d]:
            continue
        a = inv[d]
        b = (a * d - 1) // c
        # phase of nu(gamma) in 24ths
        p = 0
        if base == BASE_ETA:
            a24 = a % 24
            b24 = b % 24
            d24 = d % 24
            if c % 2 == 1:
                sym = chi[d]
                num = (a24 + d24) * c24 - b24 * d24 % 24 * cc - 3 * c24
            else:
                sym = _sym_c_over_d(c, codd, s2, d, chi[d])
                num = (a24 + d24) * c24 - b24 * d24 % 24 * cc + 3 * d24 - 3 - 3 * c24 * d24
            p = num % 24
            if sym == -1:
                p += 12
        elif base == BASE_THETA:
            if _sym_c_over_d(c, codd, s2, d, chi[d]) == -1:
                p += 12
            if d % 4 == 3:
                p -= 6
        if conj:
            p = -p
        t = twist_tab[d % ntw]
        if t == 0:
            skipped += 1
            continue
        if t == -1:
            p += 12
        p %= 24
        count += 1
        k0 = (L - p * c) % L
        for j in range(npairs):
            k = (k0 + msl[j] * a + nsl[j] * d) % L
            h = k // B
            l = k - h * B
            xr = hi_re[h] * lo_re[l] - hi_im[h] * lo_im[l]
            xi = hi_re[h] * lo_im[l] + hi_im[h] * lo_re[l]
            # Neumaier steps
            s = re[j]
            tt = s + xr
            if abs(s) >= abs(xr):
                cre[j] += (s - tt) + xr
            else:
                cre[j] += (xr - tt) + s
            re[j] = tt
            s = im[j]
            tt = s + xi
            if abs(s) >= abs(xi):
                cim[j] += (s - tt) + xi
            else:
                cim[j] += (xi - tt) + s
            im[j] = tt
    for j in range(npairs):
        out_re[j] = re[j] + cre[j]
        out_im[j] = im[j] + cim[j]
    return count, skipped


@numba.njit(cache=True, nogil=True)
def sweep(cs, base, conj, twist_tab, ms, ns, out_re, out_im, counts, skipped):
    """Evaluate sums_for_c for every modulus in cs (rows of the outputs)."""
    npairs = ms.shape[0]
    row_re = np.empty(npairs)
    row_im = np.empty(npairs)
    for i in range(cs.shape[0]):
        cnt, sk = sums_for_c(cs[i], base, conj, twist_tab, ms, ns, row_re, row_im)
        counts[i] = cnt
        skipped[i] = sk
        for j in range(npairs):
            out_re[i, j] = row_re[j]
            out_im[i, j] = row_im[j]
