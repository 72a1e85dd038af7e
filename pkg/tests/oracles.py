"""Slow, independent reference implementations used only by the tests.

Everything here works on plain tuples with Python integers and ``cmath``;
nothing is shared with the package under test.
"""
from __future__ import annotations

import cmath
import itertools
import math


def vecs(p, d):
    return list(itertools.product(range(p), repeat=d))


def dot(a, b, p):
    return sum(x * y for x, y in zip(a, b)) % p


def matmul(a, b, p):
    d = len(a)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(d)) % p for j in range(d)) for i in range(d))


def matvec(a, x, p):
    return tuple(sum(a[i][k] * x[k] for k in range(len(x))) % p for i in range(len(a)))


def transpose(a):
    return tuple(zip(*a))


def identity(d):
    return tuple(tuple(int(i == j) for j in range(d)) for i in range(d))


def closure(gens, p):
    d = len(gens[0])
    seen = {identity(d)}
    frontier = [identity(d)]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                x = matmul(g, h, p)
                if x not in seen:
                    seen.add(x)
                    nxt.append(x)
        frontier = nxt
    return seen


def exp_sum(points, xi, p):
    return abs(sum(cmath.exp(2j * math.pi * dot(xi, x, p) / p) for x in points))


def max_hyperplane_hit(points, p, d):
    """Scan every (normal, offset) with normal != 0, no deduplication."""
    best = 0
    for n in vecs(p, d):
        if not any(n):
            continue
        for c in range(p):
            best = max(best, sum(1 for x in points if dot(n, x, p) == c))
    return best


def distinct_hyperplanes(p, d):
    """Hyperplanes as frozensets of points, deduplicated."""
    out = set()
    pts = vecs(p, d)
    for n in vecs(p, d):
        if not any(n):
            continue
        for c in range(p):
            out.add(frozenset(x for x in pts if dot(n, x, p) == c))
    return out


def span(rows, p, d):
    out = {tuple([0] * d)}
    for r in rows:
        out = {tuple((x[i] + k * r[i]) % p for i in range(d)) for x in out for k in range(p)}
    return frozenset(out)


def perp(space, p, d):
    return frozenset(y for y in vecs(p, d) if all(dot(x, y, p) == 0 for x in space))


def aff_mul(g, h, p):
    (m1, t1), (m2, t2) = g, h
    return matmul(m1, m2, p), tuple((a + b) % p for a, b in zip(matvec(m1, t2, p), t1))


def aff_inv(g, p):
    m, t = g
    d = len(m)
    # brute-force inverse: search GL entries
    for cand in itertools.product(range(p), repeat=d * d):
        mi = tuple(tuple(cand[i * d : (i + 1) * d]) for i in range(d))
        if matmul(m, mi, p) == identity(d):
            return mi, tuple((-x) % p for x in matvec(mi, t, p))
    raise ValueError("singular")


def product_set(A, B, p):
    return {aff_mul(a, b, p) for a in A for b in B}
