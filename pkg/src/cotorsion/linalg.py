"""Exact integer matrix arithmetic over Z and Z/n.

Everything here works on Python integers; no floating point is used
anywhere.  Computations over Z/n are routed through Z, either by lifting
and normalising (Smith form) or by adjoining n times the identity as extra
columns (linear solving).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence


@dataclass(frozen=True)
class Ring:
    """Coefficient ring: the integers (``modulus == 0``) or Z/modulus."""

    modulus: int = 0

    def __post_init__(self):
        if self.modulus < 0 or self.modulus == 1:
            raise ValueError(f"modulus must be 0 (integers) or >= 2, got {self.modulus}")

    @property
    def is_integers(self) -> bool:
        return self.modulus == 0

    def reduce(self, x: int) -> int:
        return x % self.modulus if self.modulus else x

    def divisors(self) -> list[int]:
        """Positive divisors of the modulus, largest first."""
        if self.is_integers:
            raise ValueError("Z has infinitely many ideals")
        n = self.modulus
        return sorted((d for d in range(1, n + 1) if n % d == 0), reverse=True)

    def __str__(self):
        return "Z" if self.is_integers else f"Z/{self.modulus}"

    def to_json(self) -> dict:
        if self.is_integers:
            return {"kind": "Z"}
        return {"kind": "Zmod", "n": self.modulus}

    @classmethod
    def from_json(cls, obj) -> "Ring":
        kind = obj.get("kind")
        if kind == "Z":
            return cls(0)
        if kind == "Zmod":
            return cls(int(obj["n"]))
        raise ValueError(f"unknown ring kind {kind!r}")

    @classmethod
    def parse(cls, text: str) -> "Ring":
        """Parse ``Z`` or ``Zmod:<n>``."""
        text = text.strip()
        if text == "Z":
            return cls(0)
        if text.startswith("Zmod:"):
            return cls(int(text[5:]))
        raise ValueError(f"cannot parse ring {text!r}; expected Z or Zmod:<n>")


ZZ = Ring(0)


def Zmod(n: int) -> Ring:
    return Ring(n)


@dataclass(frozen=True)
class Mat:
    """Immutable integer matrix with explicit shape (so 0 x k and k x 0 are distinct)."""

    rows: int
    cols: int
    data: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.data) != self.rows or any(len(r) != self.cols for r in self.data):
            raise ValueError("matrix data does not match its shape")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "Mat":
        rows = [tuple(int(x) for x in r) for r in rows]
        if cols is None:
            if not rows:
                raise ValueError("column count required for a matrix with no rows")
            cols = len(rows[0])
        return cls(len(rows), cols, tuple(rows))

    @classmethod
    def from_cols(cls, cols: Sequence[Sequence[int]], rows: int) -> "Mat":
        data = [tuple(int(c[i]) for c in cols) for i in range(rows)]
        return cls(rows, len(cols), tuple(data))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Mat":
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> "Mat":
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def diag(cls, entries: Sequence[int]) -> "Mat":
        n = len(entries)
        return cls(n, n, tuple(tuple(entries[i] if i == j else 0 for j in range(n)) for i in range(n)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.data[i]

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.data)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.col(j) for j in range(self.cols)]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.data]

    @property
    def T(self) -> "Mat":
        return Mat(self.cols, self.rows, tuple(zip(*self.data)) if self.rows else tuple(() for _ in range(self.cols)))

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        if self.cols == 0:
            return Mat.zeros(self.rows, other.cols)
        ocols = tuple(zip(*other.data))
        data = tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in ocols) for r in self.data)
        return Mat(self.rows, other.cols, data)

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self.data)

    def __add__(self, other: "Mat") -> "Mat":
        if self.shape != other.shape:
            raise ValueError("shape mismatch in addition")
        return Mat(self.rows, self.cols, tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.data, other.data)))

    def __sub__(self, other: "Mat") -> "Mat":
        return self + (-other)

    def __neg__(self) -> "Mat":
        return self.scale(-1)

    def scale(self, k: int) -> "Mat":
        return Mat(self.rows, self.cols, tuple(tuple(k * a for a in r) for r in self.data))

    def mod(self, n: int) -> "Mat":
        if not n:
            return self
        return Mat(self.rows, self.cols, tuple(tuple(a % n for a in r) for r in self.data))

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.data for a in r)

    def hstack(self, other: "Mat") -> "Mat":
        if self.rows != other.rows:
            raise ValueError("row mismatch in hstack")
        return Mat(self.rows, self.cols + other.cols, tuple(a + b for a, b in zip(self.data, other.data)))

    def vstack(self, other: "Mat") -> "Mat":
        if self.cols != other.cols:
            raise ValueError("column mismatch in vstack")
        return Mat(self.rows + other.rows, self.cols, self.data + other.data)

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> "Mat":
        rows, cols = list(rows), list(cols)
        return Mat(len(rows), len(cols), tuple(tuple(self.data[i][j] for j in cols) for i in rows))

    def __repr__(self):
        return f"Mat({self.rows}x{self.cols}, {self.tolist()})"


def block_diag(blocks: Sequence[Mat]) -> Mat:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    out = [[0] * cols for _ in range(rows)]
    r0 = c0 = 0
    for b in blocks:
        for i in range(b.rows):
            out[r0 + i][c0:c0 + b.cols] = b.data[i]
        r0 += b.rows
        c0 += b.cols
    return Mat(rows, cols, tuple(tuple(r) for r in out))


def block_matrix(grid: Sequence[Sequence[Mat]]) -> Mat:
    """Assemble a matrix from a rectangular grid of blocks."""
    out = None
    for brow in grid:
        line = brow[0]
        for b in brow[1:]:
            line = line.hstack(b)
        out = line if out is None else out.vstack(line)
    return out


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithForm:
    """``U @ A @ V == S`` with ``S`` diagonal and ``d_1 | d_2 | ...``."""

    S: Mat
    U: Mat
    V: Mat
    V_inv: Mat
    rank: int

    @property
    def diagonal(self) -> list[int]:
        return [self.S[i, i] for i in range(min(self.S.rows, self.S.cols))]


def _snf_core(a: list[list[int]], m: int, n: int):
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    Vi = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        rs, rd = a[src], a[dst]
        for k in range(n):
            if rs[k]:
                rd[k] += q * rs[k]
        us, ud = U[src], U[dst]
        for k in range(m):
            if us[k]:
                ud[k] += q * us[k]

    def add_col(dst, src, q):
        # col_dst += q * col_src; inverse update is row_src -= q * row_dst on Vi
        for r in a:
            if r[src]:
                r[dst] += q * r[src]
        for r in V:
            if r[src]:
                r[dst] += q * r[src]
        vd, vs = Vi[dst], Vi[src]
        for k in range(n):
            if vd[k]:
                vs[k] -= q * vd[k]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            swap_rows(t, pi)
        if pj != t:
            swap_cols(t, pj)
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
                    if a[t][j]:
                        dirty = True
            if dirty:
                # smallest remaining entry in the pivot row/column becomes the pivot
                cand = [(abs(a[i][t]), i, t) for i in range(t + 1, m) if a[i][t]]
                cand += [(abs(a[t][j]), t, j) for j in range(t + 1, n) if a[t][j]]
                _, ci, cj = min(cand)
                if ci != t:
                    swap_rows(t, ci)
                if cj != t:
                    swap_cols(t, cj)
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if a[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return t, U, V, Vi


def smith_normal_form(A: Mat, modulus: int = 0) -> SmithForm:
    """Smith normal form with unimodular transforms, ``U @ A @ V == S``.

    Over Z/n (``modulus > 0``) the matrix is lifted to Z, diagonalised there,
    and each diagonal entry ``d`` is rescaled by a unit to ``gcd(d, n)``; the
    identity then holds after reduction mod n.
    """
    m, n = A.shape
    a = [list(r) for r in A.data]
    if modulus:
        a = [[x % modulus for x in r] for r in a]
    rank, U, V, Vi = _snf_core(a, m, n)
    if modulus:
        for i in range(rank):
            d = a[i][i]
            g = gcd(d, modulus)
            u = _unit_taking(d, g, modulus)
            a[i] = [(u * x) % modulus for x in a[i]]
            U[i] = [(u * x) % modulus for x in U[i]]
        U = [[x % modulus for x in r] for r in U]
        rank = sum(1 for i in range(rank) if a[i][i] % modulus)
        # entries equal to n are zero mod n; keep nonzero diagonal first
    mk = lambda rows, c: Mat(len(rows), c, tuple(tuple(r) for r in rows))
    return SmithForm(mk(a, n), mk(U, m), mk(V, n), mk(Vi, n), rank)


def _unit_taking(d: int, g: int, n: int) -> int:
    """A unit u mod n with u*d == g (mod n), where g = gcd(d, n)."""
    if g == n:
        return 1
    m = n // g
    dd = (d // g) % m
    u = pow(dd, -1, m) if m > 1 else 1
    while gcd(u, n) != 1:
        u += m
    return u


def determinant(A: Mat) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = A.rows
    if n != A.cols:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    M = [list(r) for r in A.data]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if M[i][k]), None)
            if sw is None:
                return 0
            M[k], M[sw] = M[sw], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Solving and kernels


class Solver:
    """Precomputed Smith data for repeatedly solving ``A x = b`` over Z or Z/n."""

    def __init__(self, A: Mat, modulus: int = 0):
        self.A = A
        self.modulus = modulus
        self.ncols = A.cols
        work = A.mod(modulus).hstack(Mat.identity(A.rows).scale(modulus)) if modulus else A
        self._work = work
        self._snf = smith_normal_form(work)

    def solve(self, b: Sequence[int]) -> tuple[int, ...] | None:
        """One solution of ``A x = b``, or None.  Over Z/n the result is reduced."""
        snf = self._snf
        if len(b) != self.A.rows:
            raise ValueError(f"right-hand side has length {len(b)}, expected {self.A.rows}")
        c = snf.U.apply(tuple(b))
        y = [0] * self._work.cols
        for i, ci in enumerate(c):
            if i < snf.rank:
                d = snf.S[i, i]
                if ci % d:
                    return None
                y[i] = ci // d
            elif ci:
                return None
        x = snf.V.apply(y)[: self.ncols]
        if self.modulus:
            x = tuple(v % self.modulus for v in x)
        return tuple(x)

    def kernel(self) -> Mat:
        """Columns generating the kernel of A (over Z, or over Z/n)."""
        snf = self._snf
        k = self._work.cols
        cols = []
        for j in range(snf.rank, k):
            v = snf.V.col(j)[: self.ncols]
            if self.modulus:
                v = tuple(x % self.modulus for x in v)
            if any(v):
                cols.append(v)
        return Mat.from_cols(cols, self.ncols)


def solve(A: Mat, b: Sequence[int], modulus: int = 0) -> tuple[tuple[int, ...] | None, Mat]:
    """Particular solution of ``A x = b`` (or None) together with kernel generators."""
    if len(b) != A.rows:
        raise ValueError(f"dimension mismatch: A is {A.shape}, b has length {len(b)}")
    s = Solver(A, modulus)
    x = s.solve(b)
    if x is not None:
        r = A.apply(x)
        assert all((ri - bi) % modulus == 0 if modulus else ri == bi for ri, bi in zip(r, b))
    return x, s.kernel()


def kernel_gens(A: Mat, modulus: int = 0) -> Mat:
    """Columns generating ``ker A``."""
    return Solver(A, modulus).kernel()


def echelon_rows(rows: Sequence[Sequence[int]], width: int, limit: int | None = None) -> list[list[int]]:
    """Integer row echelon form (unimodular row operations only).

    Pivot search is restricted to the first ``limit`` columns; rows whose
    first ``limit`` entries vanish are kept at the bottom.
    """
    R = [list(r) for r in rows]
    limit = width if limit is None else limit
    r = 0
    for col in range(limit):
        if r >= len(R):
            break
        while True:
            nz = [i for i in range(r, len(R)) if R[i][col]]
            if not nz:
                break
            p = min(nz, key=lambda i: (abs(R[i][col]), i))
            R[r], R[p] = R[p], R[r]
            pr = R[r]
            done = True
            for i in range(r + 1, len(R)):
                x = R[i][col]
                if x:
                    q = x // pr[col]
                    ri = R[i]
                    for k in range(col, width):
                        if pr[k]:
                            ri[k] -= q * pr[k]
                    if ri[col]:
                        done = False
            if done:
                break
        if r < len(R) and R[r][col]:
            r += 1
    return R


def lattice_basis(gens: Sequence[Sequence[int]], dim: int) -> list[list[int]]:
    """A basis (as rows) of the Z-span of the given vectors."""
    R = echelon_rows(gens, dim)
    return [row for row in R if any(row)]


def integer_kernel(A: Mat) -> Mat:
    """Basis (as columns) of ``{x in Z^k : A x = 0}``."""
    m, k = A.shape
    aug = [list(A.col(j)) + [int(i == j) for i in range(k)] for j in range(k)]
    R = echelon_rows(aug, m + k, limit=m)
    basis = [row[m:] for row in R if not any(row[:m])]
    return Mat.from_cols(basis, k)
