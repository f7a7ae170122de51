"""Independent brute-force oracles used by the tests.

None of these call into the Smith-form or solver code under test: they
enumerate finite groups element by element, or compute minors with
rational arithmetic.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from math import gcd


def det_fraction(rows: list[list[int]]) -> int:
    """Determinant by Gaussian elimination over Q."""
    a = [[Fraction(x) for x in r] for r in rows]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            for k in range(c, n):
                a[r][k] -= f * a[c][k]
    return int(det)


def determinant_divisors(rows: list[list[int]]) -> list[int]:
    """d_k = gcd of all k x k minors, for k = 1 .. min(m, n)."""
    m = len(rows)
    n = len(rows[0]) if rows else 0
    out = []
    for k in range(1, min(m, n) + 1):
        g = 0
        for rs in combinations(range(m), k):
            for cs in combinations(range(n), k):
                g = gcd(g, det_fraction([[rows[i][j] for j in cs] for i in rs]))
        out.append(g)
    return out


def invariant_factors_by_minors(rows: list[list[int]]) -> list[int]:
    d = determinant_divisors(rows)
    out = []
    prev = 1
    for dk in d:
        if dk == 0:
            out.append(0)
            prev = 0
            continue
        out.append(dk // prev)
        prev = dk
    return out


# ---------------------------------------------------------------------------
# Finite modules over Z/n as explicit sets


def span(vectors, n: int, g: int) -> frozenset:
    """Subgroup of (Z/n)^g generated by the vectors, by closure."""
    zero = (0,) * g
    seen = {zero}
    frontier = [zero]
    gens = [tuple(x % n for x in v) for v in vectors]
    while frontier:
        nxt = []
        for x in frontier:
            for v in gens:
                y = tuple((a + b) % n for a, b in zip(x, v))
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


def module_order(ngens: int, relations, n: int) -> int:
    return n ** ngens // len(span(relations, n, ngens))


def hom_order(src_gens: int, src_rels, tgt_gens: int, tgt_rels, n: int) -> int:
    """|Hom(M, N)| by trying every assignment of generator images."""
    S = span(tgt_rels, n, tgt_gens)
    count = 0
    for imgs in product(product(range(n), repeat=tgt_gens), repeat=src_gens):
        ok = True
        for r in src_rels:
            v = tuple(sum(r[i] * imgs[i][j] for i in range(src_gens)) % n for j in range(tgt_gens))
            if v not in S:
                ok = False
                break
        count += ok
    return count // len(S) ** src_gens


def cosets(ngens: int, relations, n: int) -> list[tuple]:
    """One representative per element of (Z/n)^g / span(relations)."""
    S = span(relations, n, ngens)
    seen, reps = set(), []
    for x in product(range(n), repeat=ngens):
        if x in seen:
            continue
        reps.append(x)
        for s in S:
            seen.add(tuple((a + b) % n for a, b in zip(x, s)))
    return reps


def apply(mat: list[list[int]], x, n: int) -> tuple:
    return tuple(sum(a * b for a, b in zip(row, x)) % n for row in mat)


def kernel_order(mat, src_gens: int, src_rels, tgt_gens: int, tgt_rels, n: int) -> int:
    S = span(tgt_rels, n, tgt_gens)
    return sum(apply(mat, x, n) in S for x in cosets(src_gens, src_rels, n))


def image_order(mat, src_gens: int, src_rels, tgt_gens: int, tgt_rels, n: int) -> int:
    S = span(tgt_rels, n, tgt_gens)
    imgs = set()
    for x in cosets(src_gens, src_rels, n):
        y = apply(mat, x, n)
        imgs.add(min(tuple((a + b) % n for a, b in zip(y, s)) for s in S))
    return len(imgs)


def homology_order(C, k: int) -> int:
    """|H_k C| = |ker d_k| / |im d_{k+1}| for a complex over Z/n, by enumeration."""
    n = C.ring.modulus
    M = C.module(k)
    rels = M.relations.data
    if M.ngens == 0:
        return 1
    lower = C.module(k - 1)
    upper = C.module(k + 1)
    dk = C.d(k).matrix.data if lower.ngens else [[0] * M.ngens]
    ker = kernel_order(dk, M.ngens, rels, max(lower.ngens, 1), lower.relations.data if lower.ngens else [], n)
    if upper.ngens == 0:
        im = 1
    else:
        im = image_order(C.d(k + 1).matrix.data, upper.ngens, upper.relations.data, M.ngens, rels, n)
    return ker // im
