#!/usr/bin/env python3
"""Generate classical modular polynomials Phi_N(X, Y) from q-expansions.

The roots of Phi_N(X, j(tau)) are j(N tau) and j((tau + k)/N), k = 0..N-1.
Power sums of the roots are integral q-series; Newton's identities give the
elementary symmetric functions, each of which is rewritten as a polynomial
in j by peeling off leading terms.

Usage: gen_modpoly.py OUTDIR [N ...]
"""
import hashlib
import sys

import gmpy2
from gmpy2 import mpz


def divisor_sigma3(n):
    s = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            s += d ** 3
            if d * d != n:
                s += (n // d) ** 3
        d += 1
    return s


def mul_trunc(a, b, n):
    """Product of two coefficient lists, truncated to n terms (signed, naive)."""
    out = [mpz(0)] * n
    for i, x in enumerate(a[:n]):
        if x == 0:
            continue
        for j, y in enumerate(b[: n - i]):
            out[i + j] += x * y
    return out


def pack(a, width):
    r = mpz(0)
    for c in reversed(a):
        r = (r << width) + c
    return r


def unpack(r, width, n):
    mask = (mpz(1) << width) - 1
    out = []
    for _ in range(n):
        out.append(r & mask)
        r >>= width
    return out


def mul_positive(a, b, n):
    """Kronecker product of nonnegative coefficient lists, truncated to n terms."""
    a, b = a[:n], b[:n]
    bound = max(a) * max(b) * min(len(a), len(b))
    width = int(gmpy2.bit_length(bound)) + 1
    return unpack(pack(a, width) * pack(b, width), width, n)


def j_series(n):
    """Coefficients of q * j(q) = E4^3 / prod (1 - q^k)^24, n terms."""
    e4 = [mpz(1)] + [mpz(240 * divisor_sigma3(k)) for k in range(1, n)]
    e4_3 = mul_trunc(mul_trunc(e4, e4, n), e4, n)
    eta = [mpz(0)] * n
    eta[0] = mpz(1)
    for k in range(1, n):
        # multiply by (1 - q^k)^24
        for _ in range(24):
            for i in range(n - 1, k - 1, -1):
                eta[i] -= eta[i - k]
    out = [mpz(0)] * n
    for i in range(n):
        s = e4_3[i] - sum(eta[k] * out[i - k] for k in range(1, i + 1))
        out[i] = s
    return out


class Laurent:
    """Series sum c_k q^(val + k), known for exponents < prec."""

    def __init__(self, val, coeffs, prec):
        self.val = val
        self.prec = prec
        self.c = coeffs[: max(0, prec - val)]

    def coeff(self, e):
        k = e - self.val
        return self.c[k] if 0 <= k < len(self.c) else mpz(0)

    def mul(self, other):
        val = self.val + other.val
        prec = min(self.prec + other.val, other.prec + self.val)
        n = max(0, prec - val)
        return Laurent(val, mul_trunc(self.c, other.c, n), prec)

    def add(self, other, k=1):
        val = min(self.val, other.val)
        prec = min(self.prec, other.prec)
        coeffs = [self.coeff(e) + k * other.coeff(e) for e in range(val, prec)]
        return Laurent(val, coeffs, prec)


def modular_poly(n_level, bound):
    N = n_level
    deg = N + 1
    length = N * bound + deg + 2
    J = j_series(length)
    powers = [[mpz(1)]]
    for m in range(1, deg + 1):
        powers.append(mul_positive(powers[-1], J, length))
    # j^m as a Laurent series in q
    jpow = [Laurent(-m, powers[m], length - m) for m in range(deg + 1)]
    S = [None]
    for m in range(1, deg + 1):
        # j(N tau)^m
        first = {}
        for k, c in enumerate(powers[m]):
            e = N * (k - m)
            if e >= bound:
                break
            first[e] = c
        # sum_k j((tau + k)/N)^m = N * sum_n c_{Nn}(j^m) q^n
        for e in range(-(m // N), bound):
            c = jpow[m].coeff(N * e)
            if c:
                first[e] = first.get(e, 0) + N * c
        val = min(first)
        S.append(Laurent(val, [mpz(first.get(e, 0)) for e in range(val, bound)], bound))
    E = [Laurent(0, [mpz(1)], 10 ** 9)]
    for m in range(1, deg + 1):
        acc = Laurent(0, [], 10 ** 9)
        for k in range(1, m + 1):
            acc = acc.add(E[m - k].mul(S[k]), 1 if k % 2 == 1 else -1)
        coeffs = []
        for c in acc.c:
            assert c % m == 0
            coeffs.append(c // m)
        E.append(Laurent(acc.val, coeffs, acc.prec))
    table = {}
    for m in range(deg + 1):
        e = E[m]
        if e.prec < 1:
            raise RuntimeError("insufficient precision for N=%d (bound %d)" % (N, bound))
        poly = {}
        for d in range(deg, -1, -1):
            a = e.coeff(-d)
            if a:
                poly[d] = a
                e = e.add(jpow[d], -a)
        for x in range(e.val, e.prec):
            if e.coeff(x) != 0:
                raise RuntimeError("residual term q^%d for N=%d" % (x, N))
        sign = -1 if m % 2 else 1
        for d, a in poly.items():
            table[(deg - m, d)] = sign * a
    return table


def render(N, table):
    lines = ["PHI N %d" % N]
    for (i, j) in sorted(table):
        lines.append("%d %d %d" % (i, j, table[(i, j)]))
    body = "\n".join(lines) + "\n"
    digest = hashlib.sha256(body.encode()).hexdigest()
    return body + "sha256 %s\n" % digest


def main():
    out = sys.argv[1]
    levels = [int(a) for a in sys.argv[2:]] or [2, 3, 5, 7, 13]
    for N in levels:
        bound = N * (N + 1) + 8
        table = modular_poly(N, bound)
        for (i, j), c in table.items():
            assert table.get((j, i)) == c, "asymmetric coefficient"
        with open("%s/phi_%d.txt" % (out, N), "w") as f:
            f.write(render(N, table))
        print("N=%d: %d terms" % (N, len(table)))


if __name__ == "__main__":
    main()
