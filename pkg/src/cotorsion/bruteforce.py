"""Brute-force enumeration of module extensions over Z/n for small modules.

Used as an independent oracle for ``ext1_module``.  Nothing here touches
Smith forms or Hom presentations: groups are explicit sets of tuples.
"""

from __future__ import annotations

from collections import Counter
from itertools import product
from typing import Sequence

Cyc = tuple[int, ...]  # orders of a direct sum of cyclic groups


def small_modules(n: int, max_size: int) -> list[Cyc]:
    """All Z/n-modules with at most ``max_size`` elements, as sums of cyclics
    Z/d_1 + ... with d_1 | d_2 | ... and every d_i dividing n."""
    divs = [d for d in range(2, n + 1) if n % d == 0]
    out: list[Cyc] = [()]

    def grow(prefix: Cyc, size: int):
        for d in divs:
            if prefix and d % prefix[-1]:
                continue
            if size * d > max_size:
                continue
            new = prefix + (d,)
            out.append(new)
            grow(new, size * d)

    grow((), 1)
    return out


def _elements(orders: Cyc):
    return list(product(*(range(m) for m in orders)))


def _add(x, y, orders):
    return tuple((a + b) % m for a, b, m in zip(x, y, orders))


def _scale(k, x, orders):
    return tuple((k * a) % m for a, m in zip(x, orders))


class CocycleExtension:
    """E_a = N x M with (x, y) + (x', y') = (x + x' + Σ carry_i a_i, y + y')."""

    def __init__(self, N: Cyc, M: Cyc, a: Sequence[tuple]):
        self.N, self.M, self.a = N, M, list(a)

    def add(self, u, v):
        x, y = u
        x2, y2 = v
        s = _add(x, x2, self.N)
        ys = []
        for i, m in enumerate(self.M):
            t = y[i] + y2[i]
            if t >= m:
                s = _add(s, self.a[i], self.N)
                t -= m
            ys.append(t)
        return s, tuple(ys)

    def times(self, k: int, u):
        z = (tuple(0 for _ in self.N), tuple(0 for _ in self.M))
        for _ in range(k):
            z = self.add(z, u)
        return z

    def zero(self):
        return (tuple(0 for _ in self.N), tuple(0 for _ in self.M))

    def elements(self):
        return [(x, y) for x in _elements(self.N) for y in _elements(self.M)]

    def annihilated_by(self, n: int) -> bool:
        z = self.zero()
        return all(self.times(n, u) == z for u in self.elements())

    def splits(self) -> bool:
        """Is there a section M -> E_a, i.e. lifts (b_i, e_i) of order dividing m_i?"""
        z = self.zero()
        k = len(self.M)
        for b in product(_elements(self.N), repeat=k):
            ok = True
            for i, m in enumerate(self.M):
                e = tuple(int(j == i) for j in range(k))
                if self.times(m, (b[i], e)) != z:
                    ok = False
                    break
            if ok:
                return True
        return False


def ext_order_spectrum(M: Cyc, N: Cyc, n: int) -> Counter:
    """Element orders of Ext^1_{Z/n}(M, N), by enumerating all extensions.

    Every extension of M by N is equivalent to some E_a.  The valid data are
    those where E_a is a Z/n-module; two data give equivalent extensions when
    their difference gives a split one.
    """
    k = len(M)
    data = list(product(_elements(N), repeat=k))
    valid = [a for a in data if CocycleExtension(N, M, a).annihilated_by(n)]
    split = {a for a in valid if CocycleExtension(N, M, a).splits()}

    def vadd(a, b):
        return tuple(_add(x, y, N) for x, y in zip(a, b))

    def vscale(t, a):
        return tuple(_scale(t, x, N) for x in a)

    # classes of valid / split; pick one representative per coset
    seen = set()
    spectrum: Counter = Counter()
    for a in valid:
        if a in seen:
            continue
        coset = {vadd(a, s) for s in split}
        seen |= coset
        t = 1
        while vscale(t, a) not in split:
            t += 1
        spectrum[t] += 1
    return spectrum


def spectrum_of_orders(orders: Sequence[int]) -> Counter:
    """Element-order counts of ⊕ Z/d for the given (finite) orders."""
    from math import gcd

    spectrum: Counter = Counter()
    for x in product(*(range(d) for d in orders)):
        t = 1
        for xi, d in zip(x, orders):
            o = d // gcd(xi, d)
            t = t * o // gcd(t, o)
        spectrum[t] += 1
    return spectrum
