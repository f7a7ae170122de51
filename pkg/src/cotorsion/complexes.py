"""Bounded chain complexes of finitely presented modules.

A complex stores modules for degrees ``lo..hi`` and differentials
``diffs[i]: C_{lo+i+1} -> C_{lo+i}``.  Everything outside the window is zero.
Homotopies follow the convention ``f = δ s + s δ``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Mapping, Sequence

from .linalg import Mat, Ring, block_diag, block_matrix
from .modules import (
    FpModule,
    HomGroup,
    ModuleHom,
    ModuleSolver,
    RingMismatch,
    _json_int,
    cokernel_of_hom,
    direct_sum,
    find_section,
    hom_module,
    image_of_hom,
    kernel_of_hom,
    random_hom,
    random_module,
    random_unimodular,
    same_ring,
)


class ComplexError(ValueError):
    """Invalid complex data; ``degree`` names the offending degree when known."""

    def __init__(self, message: str, degree: int | None = None):
        super().__init__(message)
        self.degree = degree


@dataclass(frozen=True)
class ChainComplex:
    ring: Ring
    lo: int
    hi: int
    modules: tuple[FpModule, ...]
    diffs: tuple[ModuleHom, ...]

    def __post_init__(self):
        if self.hi < self.lo - 1:
            raise ComplexError("window must satisfy lo <= hi (or be empty)")
        if len(self.modules) != self.hi - self.lo + 1:
            raise ComplexError("one module per degree required")
        if len(self.diffs) != max(0, self.hi - self.lo):
            raise ComplexError("one differential per adjacent pair of degrees required")
        for k, m in enumerate(self.modules):
            if m.ring != self.ring:
                raise RingMismatch(f"module in degree {self.lo + k} is over {m.ring}, complex over {self.ring}")
        for k, d in enumerate(self.diffs):
            n = self.lo + k + 1
            if d.source is not self.modules[k + 1] and d.source != self.modules[k + 1]:
                raise ComplexError(f"differential {n} has the wrong source", n)
            if d.target is not self.modules[k] and d.target != self.modules[k]:
                raise ComplexError(f"differential {n} has the wrong target", n)

    # -- construction -------------------------------------------------------

    @classmethod
    def zero(cls, ring: Ring) -> "ChainComplex":
        return cls(ring, 0, -1, (), ())

    @classmethod
    def build(cls, ring: Ring, lo: int, modules: Sequence[FpModule], matrices: Sequence[Mat]) -> "ChainComplex":
        """Assemble from modules and bare differential matrices."""
        modules = tuple(modules)
        hi = lo + len(modules) - 1
        diffs = tuple(ModuleHom(modules[k + 1], modules[k], matrices[k]) for k in range(len(modules) - 1))
        return cls(ring, lo, hi, modules, diffs)

    # -- access ----------------------------------------------------------------

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def module(self, n: int) -> FpModule:
        if self.lo <= n <= self.hi:
            return self.modules[n - self.lo]
        return FpModule.zero(self.ring)

    def d(self, n: int) -> ModuleHom:
        """The differential C_n -> C_{n-1}."""
        if self.lo < n <= self.hi:
            return self.diffs[n - self.lo - 1]
        return ModuleHom.zero(self.module(n), self.module(n - 1))

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.modules)

    def total_gens(self) -> int:
        return sum(m.ngens for m in self.modules)

    def widen(self, lo: int, hi: int) -> "ChainComplex":
        """Same complex on a larger window (padding with zero modules)."""
        if self.lo - 1 == self.hi and lo <= hi:
            mods = [FpModule.zero(self.ring) for _ in range(lo, hi + 1)]
            return ChainComplex.build(self.ring, lo, mods, [Mat.zeros(0, 0)] * (hi - lo))
        lo, hi = min(lo, self.lo), max(hi, self.hi)
        mods = [self.module(n) for n in range(lo, hi + 1)]
        return ChainComplex.build(self.ring, lo, mods, [self.d(n).matrix for n in range(lo + 1, hi + 1)])

    def trimmed(self) -> "ChainComplex":
        """Drop zero-generator modules at both ends of the window."""
        degs = [n for n in self.degrees() if self.module(n).ngens]
        if not degs:
            return ChainComplex.zero(self.ring)
        lo, hi = degs[0], degs[-1]
        mods = [self.module(n) for n in range(lo, hi + 1)]
        return ChainComplex.build(self.ring, lo, mods, [self.d(n).matrix for n in range(lo + 1, hi + 1)])

    def __str__(self):
        if self.hi < self.lo:
            return "0"
        parts = [f"[{n}] {self.module(n)}" for n in range(self.hi, self.lo - 1, -1)]
        return " -> ".join(parts)

    # -- serialization ------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "ring": self.ring.to_json(),
            "lo": self.lo,
            "hi": self.hi,
            "modules": [{k: v for k, v in m.to_json().items() if k != "ring"} for m in self.modules],
            "differentials": [[[_json_int(x) for x in r] for r in d.matrix.tolist()] for d in self.diffs],
        }

    @classmethod
    def from_json(cls, obj) -> "ChainComplex":
        try:
            ring = Ring.from_json(obj["ring"])
            lo, hi = int(obj["lo"]), int(obj["hi"])
            mods_raw = obj["modules"]
            diffs_raw = obj.get("differentials", [])
        except (KeyError, TypeError) as e:
            raise ComplexError(f"malformed complex literal: missing or bad field {e}") from None
        if hi < lo - 1:
            raise ComplexError(f"window lo={lo}, hi={hi} is not valid")
        if len(mods_raw) != hi - lo + 1:
            raise ComplexError(f"expected {hi - lo + 1} modules for window [{lo}, {hi}], got {len(mods_raw)}")
        if len(diffs_raw) != max(0, hi - lo):
            raise ComplexError(f"expected {max(0, hi - lo)} differentials, got {len(diffs_raw)}")
        mods = []
        for k, m in enumerate(mods_raw):
            try:
                mods.append(FpModule.from_json(m, ring))
            except RingMismatch:
                raise
            except (ValueError, KeyError, TypeError) as e:
                raise ComplexError(f"degree {lo + k}: bad module literal ({e})", lo + k) from None
        mats = []
        for k, rows in enumerate(diffs_raw):
            n = lo + k + 1
            src, tgt = mods[k + 1], mods[k]
            rows = [[int(x) for x in r] for r in rows]
            if len(rows) != tgt.ngens or any(len(r) != src.ngens for r in rows):
                raise ComplexError(
                    f"degree {n}: differential must be {tgt.ngens}x{src.ngens}", n
                )
            mats.append(Mat.from_rows(rows, src.ngens))
        C = cls.build(ring, lo, mods, mats)
        validate_complex(C)
        return C


def validate_complex(C: ChainComplex) -> None:
    """Raise ComplexError naming the first degree where the data is inconsistent."""
    for n in range(C.lo + 1, C.hi + 1):
        if not C.d(n).is_valid():
            raise ComplexError(f"degree {n}: differential is not a module homomorphism", n)
    for n in range(C.lo + 2, C.hi + 1):
        if not (C.d(n - 1) @ C.d(n)).is_zero():
            raise ComplexError(f"degree {n}: d_{n - 1} ∘ d_{n} is not zero", n)


def is_valid_complex(C: ChainComplex) -> bool:
    try:
        validate_complex(C)
    except ComplexError:
        return False
    return True


# ---------------------------------------------------------------------------
# Maps


@dataclass(frozen=True)
class ChainMap:
    source: ChainComplex
    target: ChainComplex
    comps: Mapping[int, ModuleHom] = field(hash=False)

    def __call__(self, n: int) -> ModuleHom:
        f = self.comps.get(n)
        if f is None:
            return ModuleHom.zero(self.source.module(n), self.target.module(n))
        return f

    def window(self) -> range:
        lo = min(self.source.lo, self.target.lo)
        hi = max(self.source.hi, self.target.hi)
        return range(lo, hi + 1)

    @classmethod
    def from_matrices(cls, X: ChainComplex, Y: ChainComplex, mats: Mapping[int, Mat]) -> "ChainMap":
        return cls(X, Y, {n: ModuleHom(X.module(n), Y.module(n), A) for n, A in mats.items()})

    @classmethod
    def identity(cls, X: ChainComplex) -> "ChainMap":
        return cls(X, X, {n: ModuleHom.identity(X.module(n)) for n in X.degrees()})

    @classmethod
    def zero(cls, X: ChainComplex, Y: ChainComplex) -> "ChainMap":
        return cls(X, Y, {})

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        degs = set(self.comps) & set(other.comps)
        return ChainMap(other.source, self.target, {n: self(n) @ other(n) for n in degs})

    def __add__(self, other: "ChainMap") -> "ChainMap":
        degs = set(self.comps) | set(other.comps)
        return ChainMap(self.source, self.target, {n: self(n) + other(n) for n in degs})

    def __neg__(self) -> "ChainMap":
        return ChainMap(self.source, self.target, {n: -f for n, f in self.comps.items()})

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        return self + (-other)

    def is_valid(self) -> bool:
        for n in self.window():
            if not self(n).is_valid():
                return False
        for n in range(self.window().start, self.window().stop + 1):
            lhs = self.target.d(n) @ self(n)
            rhs = self(n - 1) @ self.source.d(n)
            if not lhs.equals(rhs):
                return False
        return True

    def is_zero(self) -> bool:
        return all(f.is_zero() for f in self.comps.values())

    def equals(self, other: "ChainMap") -> bool:
        return (self - other).is_zero()

    def is_mono(self) -> bool:
        return all(self(n).is_injective() for n in self.source.degrees())

    def is_epi(self) -> bool:
        return all(self(n).is_surjective() for n in self.target.degrees())

    def is_iso(self) -> bool:
        return self.is_mono() and self.is_epi()


@dataclass(frozen=True)
class Homotopy:
    """Maps ``s_n: X_n -> Y_{n+1}``."""

    source: ChainComplex
    target: ChainComplex
    comps: Mapping[int, ModuleHom] = field(hash=False)

    def __call__(self, n: int) -> ModuleHom:
        s = self.comps.get(n)
        if s is None:
            return ModuleHom.zero(self.source.module(n), self.target.module(n + 1))
        return s

    def boundary(self) -> ChainMap:
        """The null-homotopic map ``δ s + s δ``."""
        X, Y = self.source, self.target
        lo = min(X.lo, Y.lo - 1)
        hi = max(X.hi, Y.hi)
        comps = {n: Y.d(n + 1) @ self(n) + self(n - 1) @ X.d(n) for n in range(lo, hi + 1)}
        return ChainMap(X, Y, comps)


@dataclass(frozen=True)
class ShortExactSeqCh:
    """``0 -> A -i-> B -p-> C -> 0``."""

    A: ChainComplex
    B: ChainComplex
    C: ChainComplex
    i: ChainMap
    p: ChainMap

    def validate(self) -> None:
        if not (self.i.is_valid() and self.p.is_valid()):
            raise ComplexError("maps in the sequence are not chain maps")
        lo = min(self.A.lo, self.B.lo, self.C.lo)
        hi = max(self.A.hi, self.B.hi, self.C.hi)
        for n in range(lo, hi + 1):
            if not is_short_exact(self.i(n), self.p(n)):
                raise ComplexError(f"degree {n}: sequence is not short exact", n)

    def is_valid(self) -> bool:
        try:
            self.validate()
        except ComplexError:
            return False
        return True


def is_short_exact(i: ModuleHom, p: ModuleHom) -> bool:
    if not (p @ i).is_zero():
        return False
    if not (i.is_injective() and p.is_surjective()):
        return False
    K, inc = kernel_of_hom(p)
    solver = ModuleSolver(i.target, i.matrix)
    return all(solver.solve(c) is not None for c in inc.matrix.columns())


# ---------------------------------------------------------------------------
# Basic constructions


def sphere(n: int, M: FpModule) -> ChainComplex:
    """S^n(M): M in degree n, zero elsewhere."""
    return ChainComplex(M.ring, n, n, (M,), ())


def disk(n: int, M: FpModule) -> ChainComplex:
    """D^n(M): M in degrees n and n-1 joined by the identity."""
    return ChainComplex(M.ring, n - 1, n, (M, M), (ModuleHom.identity(M),))


def suspension(C: ChainComplex, k: int = 1) -> ChainComplex:
    """Σ^k C: degrees shifted up by k, differentials multiplied by (-1)^k."""
    sign = -1 if k % 2 else 1
    return ChainComplex(C.ring, C.lo + k, C.hi + k, C.modules, tuple(ModuleHom(d.source, d.target, d.matrix.scale(sign)) for d in C.diffs))


def direct_sum_complex(cs: Sequence[ChainComplex], ring: Ring | None = None):
    """Direct sum with inclusion and projection chain maps."""
    if not cs:
        if ring is None:
            raise ValueError("ring required for an empty direct sum")
        Z = ChainComplex.zero(ring)
        return Z, [], []
    r = same_ring(*cs)
    live = [c for c in cs if c.hi >= c.lo]
    if not live:
        Z = ChainComplex.zero(r)
        return Z, [ChainMap.zero(c, Z) for c in cs], [ChainMap.zero(Z, c) for c in cs]
    lo = min(c.lo for c in live)
    hi = max(c.hi for c in live)
    mods, incs, projs = [], [{} for _ in cs], [{} for _ in cs]
    for n in range(lo, hi + 1):
        S, ins, prs = direct_sum([c.module(n) for c in cs], r)
        mods.append(S)
        for k in range(len(cs)):
            incs[k][n] = ins[k]
            projs[k][n] = prs[k]
    mats = [block_diag([c.d(n).matrix for c in cs]) for n in range(lo + 1, hi + 1)]
    S = ChainComplex.build(r, lo, mods, mats)
    inc_maps = [ChainMap(c, S, {n: ModuleHom(c.module(n), S.module(n), incs[k][n].matrix) for n in range(lo, hi + 1)}) for k, c in enumerate(cs)]
    proj_maps = [ChainMap(S, c, {n: ModuleHom(S.module(n), c.module(n), projs[k][n].matrix) for n in range(lo, hi + 1)}) for k, c in enumerate(cs)]
    return S, inc_maps, proj_maps


def prune_complex(C: ChainComplex) -> tuple[ChainComplex, ChainMap, ChainMap]:
    """Isomorphic complex with diagonal modules, plus the isomorphisms both ways."""
    if C.hi < C.lo:
        return C, ChainMap.identity(C), ChainMap.identity(C)
    data = [C.module(n).pruned() for n in C.degrees()]
    mods = [d[0] for d in data]
    mats = []
    for n in range(C.lo + 1, C.hi + 1):
        to = data[n - 1 - C.lo][1]
        frm = data[n - C.lo][2]
        mats.append(to.matrix @ C.d(n).matrix @ frm.matrix)
    P = ChainComplex.build(C.ring, C.lo, mods, mats)
    f = ChainMap.from_matrices(C, P, {n: data[n - C.lo][1].matrix for n in C.degrees()})
    g = ChainMap.from_matrices(P, C, {n: data[n - C.lo][2].matrix for n in C.degrees()})
    return P, f, g


# ---------------------------------------------------------------------------
# Homology


def cycles(C: ChainComplex, n: int) -> tuple[FpModule, ModuleHom]:
    """Z_n C with its inclusion into C_n."""
    return kernel_of_hom(C.d(n))


def boundaries(C: ChainComplex, n: int) -> tuple[FpModule, ModuleHom]:
    """B_n C with its inclusion into C_n."""
    return image_of_hom(C.d(n + 1))


@dataclass(frozen=True)
class HomologyData:
    H: FpModule
    Z: FpModule
    z_inc: ModuleHom        # Z -> C_n
    boundary_in_z: Mat      # C_{n+1} -> Z (columns in Z coordinates)
    to_h: Mat               # Z coordinates -> H coordinates
    from_h: Mat             # H coordinates -> a representative in Z


def homology_data(C: ChainComplex, n: int) -> HomologyData:
    Z, inc = cycles(C, n)
    d = C.d(n + 1)
    solver = ModuleSolver(C.module(n), inc.matrix)
    cols = []
    for col in d.matrix.columns():
        c = solver.solve(col)
        if c is None:
            raise ComplexError(f"degree {n + 1}: boundaries are not cycles", n + 1)
        cols.append(c)
    B = Mat.from_cols(cols, Z.ngens)
    Q, _ = cokernel_of_hom(ModuleHom(d.source, Z, B))
    H, to, frm = Q.pruned()
    return HomologyData(H, Z, inc, B, to.matrix, frm.matrix)


def homology(C: ChainComplex, n: int) -> FpModule:
    return homology_data(C, n).H


def is_exact(C: ChainComplex) -> bool:
    """Homology vanishes in every degree (only the window can contribute)."""
    return all(homology(C, n).is_zero() for n in range(C.lo - 1, C.hi + 2))


def first_nonexact_degree(C: ChainComplex) -> int | None:
    for n in range(C.lo, C.hi + 1):
        if not homology(C, n).is_zero():
            return n
    return None


# ---------------------------------------------------------------------------
# Hom complex


class HomComplex:
    """Hom(X, Y) built lazily degree by degree.

    Degree n is the product of Hom(X_i, Y_{i+n}); elements are coordinate
    tuples, and ``decode`` turns them into ``{i: matrix}``.
    """

    def __init__(self, X: ChainComplex, Y: ChainComplex):
        self.ring = same_ring(X, Y)
        self.X, self.Y = X, Y
        if X.hi < X.lo or Y.hi < Y.lo:
            self.lo, self.hi = 0, -1
        else:
            self.lo, self.hi = Y.lo - X.hi, Y.hi - X.lo
        self._blocks: dict[int, list[tuple[int, HomGroup, int]]] = {}
        self._modules: dict[int, FpModule] = {}
        self._diffs: dict[int, Mat] = {}

    def blocks(self, n: int) -> list[tuple[int, HomGroup, int]]:
        """``(i, Hom(X_i, Y_{i+n}), offset)`` for every overlapping i."""
        if n not in self._blocks:
            out, off = [], 0
            if self.lo <= n <= self.hi:
                for i in range(max(self.X.lo, self.Y.lo - n), min(self.X.hi, self.Y.hi - n) + 1):
                    h = hom_module(self.X.module(i), self.Y.module(i + n))
                    out.append((i, h, off))
                    off += h.module.ngens
            self._blocks[n] = out
        return self._blocks[n]

    def module(self, n: int) -> FpModule:
        if n not in self._modules:
            orders = [e[3] for _, h, _ in self.blocks(n) for e in h.entries]
            self._modules[n] = FpModule.diagonal(self.ring, orders)
        return self._modules[n]

    def decode(self, n: int, c: Sequence[int]) -> dict[int, Mat]:
        out = {}
        for i, h, off in self.blocks(n):
            out[i] = h.decode(c[off:off + h.module.ngens])
        return out

    def encode(self, n: int, family: Mapping[int, Mat]) -> tuple[int, ...]:
        out: list[int] = []
        for i, h, _ in self.blocks(n):
            A = family.get(i)
            if A is None:
                out += [0] * h.module.ngens
            else:
                out += h.encode(A)
        return tuple(out)

    def apply_d(self, n: int, family: Mapping[int, Mat]) -> dict[int, Mat]:
        """(δ_n f)_i = δ^Y_{i+n} f_i − (−1)^n f_{i−1} δ^X_i, on matrices."""
        X, Y = self.X, self.Y
        sign = -1 if n % 2 else 1
        out = {}
        for i, h, _ in self.blocks(n - 1):
            A = Mat.zeros(Y.module(i + n - 1).ngens, X.module(i).ngens)
            if i in family:
                A = A + Y.d(i + n).matrix @ family[i]
            if i - 1 in family:
                A = A - (family[i - 1] @ X.d(i).matrix).scale(sign)
            out[i] = A
        return out

    def d(self, n: int) -> Mat:
        """Matrix of δ_n: Hom_n -> Hom_{n-1} in coordinates."""
        if n not in self._diffs:
            src, tgt = self.module(n), self.module(n - 1)
            cols = []
            for k in range(src.ngens):
                e = [int(j == k) for j in range(src.ngens)]
                cols.append(self.encode(n - 1, self.apply_d(n, self.decode(n, e))))
            self._diffs[n] = Mat.from_cols(cols, tgt.ngens)
        return self._diffs[n]

    def d_hom(self, n: int) -> ModuleHom:
        return ModuleHom(self.module(n), self.module(n - 1), self.d(n))

    def complex(self) -> ChainComplex:
        if self.hi < self.lo:
            return ChainComplex.zero(self.ring)
        mods = [self.module(n) for n in range(self.lo, self.hi + 1)]
        mats = [self.d(n) for n in range(self.lo + 1, self.hi + 1)]
        return ChainComplex.build(self.ring, self.lo, mods, mats)

    def homology_data(self, n: int) -> HomologyData:
        """H_n of the Hom complex, computing only degrees n-1, n, n+1."""
        local = ChainComplex.build(
            self.ring, n - 1,
            [self.module(n - 1), self.module(n), self.module(n + 1)],
            [self.d(n), self.d(n + 1)],
        )
        return homology_data(local, n)

    def chain_map(self, c: Sequence[int]) -> ChainMap:
        return ChainMap.from_matrices(self.X, self.Y, self.decode(0, c))


def hom_complex(X: ChainComplex, Y: ChainComplex) -> ChainComplex:
    return HomComplex(X, Y).complex()


@dataclass
class ChainMapGroup:
    """Hom_Ch(X, Y) as the degree-0 cycles of Hom(X, Y)."""

    hom: HomComplex
    module: FpModule
    z_inc: ModuleHom  # module -> Hom_0

    def generators(self) -> list[ChainMap]:
        return [self.hom.chain_map(c) for c in self.z_inc.matrix.columns()]

    def element(self, c: Sequence[int]) -> ChainMap:
        return self.hom.chain_map(self.z_inc(c))

    def order(self) -> int | None:
        return self.module.order()


def chain_map_group(X: ChainComplex, Y: ChainComplex) -> ChainMapGroup:
    H = HomComplex(X, Y)
    Z, inc = kernel_of_hom(H.d_hom(0))
    return ChainMapGroup(H, Z, inc)


def find_null_homotopy(f: ChainMap, hom: HomComplex | None = None) -> Homotopy | None:
    """A homotopy s with f = δs + sδ, verified by substitution, or None."""
    X, Y = f.source, f.target
    H = hom or HomComplex(X, Y)
    target = H.encode(0, {n: g.matrix for n, g in f.comps.items()})
    c = ModuleSolver(H.module(0), H.d(1)).solve(target)
    if c is None:
        return None
    fam = H.decode(1, c)
    s = Homotopy(X, Y, {i: ModuleHom(X.module(i), Y.module(i + 1), A) for i, A in fam.items()})
    if not s.boundary().equals(f):
        raise AssertionError("homotopy failed substitution check")
    return s


def is_null_homotopic(f: ChainMap) -> bool:
    return find_null_homotopy(f) is not None


# ---------------------------------------------------------------------------
# Kernels, cokernels, pullbacks, pushouts


def kernel_complex(f: ChainMap) -> tuple[ChainComplex, ChainMap]:
    X = f.source
    if X.hi < X.lo:
        return X, ChainMap.identity(X)
    data = {n: kernel_of_hom(f(n)) for n in X.degrees()}
    mats = []
    for n in range(X.lo + 1, X.hi + 1):
        K_n, inc_n = data[n]
        _, inc_m = data[n - 1]
        solver = ModuleSolver(X.module(n - 1), inc_m.matrix)
        cols = []
        for col in (X.d(n).matrix @ inc_n.matrix).columns():
            c = solver.solve(col)
            if c is None:
                raise ComplexError(f"degree {n}: map is not a chain map", n)
            cols.append(c)
        mats.append(Mat.from_cols(cols, data[n - 1][0].ngens))
    K = ChainComplex.build(X.ring, X.lo, [data[n][0] for n in X.degrees()], mats)
    return K, ChainMap.from_matrices(K, X, {n: data[n][1].matrix for n in X.degrees()})


def cokernel_complex(f: ChainMap) -> tuple[ChainComplex, ChainMap, dict[int, Mat]]:
    """Cokernel with its projection and, per degree, a lift Q_n -> generators of Y_n.

    A map out of Y that kills the image of f induces ``u_n @ lift[n]`` on Q.
    """
    Y = f.target
    if Y.hi < Y.lo:
        return Y, ChainMap.identity(Y), {}
    mods = [cokernel_of_hom(f(n))[0] for n in Y.degrees()]
    Q0 = ChainComplex.build(Y.ring, Y.lo, mods, [Y.d(n).matrix for n in range(Y.lo + 1, Y.hi + 1)])
    Q, to, frm = prune_complex(Q0)
    proj = ChainMap.from_matrices(Y, Q, {n: to(n).matrix for n in Y.degrees()})
    return Q, proj, {n: frm(n).matrix for n in Y.degrees()}


def pullback(f: ChainMap, g: ChainMap) -> tuple[ChainComplex, ChainMap, ChainMap]:
    """Pullback of ``A -f-> Z <-g- B`` with projections to A and B."""
    if f.target != g.target:
        raise ComplexError("pullback needs a common target")
    A, B, Z = f.source, g.source, f.target
    S, (ia, ib), (pa, pb) = direct_sum_complex([A, B])
    diff = ChainMap(S, Z, {n: f(n) @ pa(n) - g(n) @ pb(n) for n in S.degrees()})
    P, inc = kernel_complex(diff)
    return P, pa @ inc, pb @ inc


@dataclass(frozen=True)
class Pushout:
    """Pushout Q of ``A <-f- Z -g-> B`` with the maps ``ja: A -> Q``, ``jb: B -> Q``."""

    Q: ChainComplex
    ja: ChainMap
    jb: ChainMap
    lift_a: Mapping[int, Mat] = field(hash=False)
    lift_b: Mapping[int, Mat] = field(hash=False)

    def induced(self, u: ChainMap, v: ChainMap) -> ChainMap:
        """The map Q -> T determined by u: A -> T and v: B -> T (assumed compatible)."""
        T = u.target
        mats = {}
        for n in self.Q.degrees():
            m = u(n).matrix @ self.lift_a[n] + v(n).matrix @ self.lift_b[n]
            mats[n] = m
        return ChainMap.from_matrices(self.Q, T, mats)


def pushout(f: ChainMap, g: ChainMap) -> Pushout:
    if f.source != g.source:
        raise ComplexError("pushout needs a common source")
    A, B, Z = f.target, g.target, f.source
    S, (ia, ib), (pa, pb) = direct_sum_complex([A, B])
    diff = ChainMap(Z, S, {n: ia(n) @ f(n) - ib(n) @ g(n) for n in Z.degrees()})
    Q, q, lift = cokernel_complex(diff)
    la = {n: pa(n).matrix @ lift[n] for n in Q.degrees()}
    lb = {n: pb(n).matrix @ lift[n] for n in Q.degrees()}
    return Pushout(Q, q @ ia, q @ ib, la, lb)


# ---------------------------------------------------------------------------
# Disk covers and envelopes


def disk_sum(C: ChainComplex, free: bool = False) -> tuple[ChainComplex, ChainMap, dict[int, int]]:
    """E = ⊕_n D^n(F_n) mapping onto C, where F_n = C_n or a free cover of it.

    E_k = F_k ⊕ F_{k+1} with differential (a, b) -> (0, a) and the map to C
    sending (a, b) to a + δ_{k+1} b.  Returns E, the map and the offsets of the
    F_{k+1} summand in each degree.
    """
    ring = C.ring
    if C.hi < C.lo:
        return C, ChainMap.identity(C), {}

    def F(n: int) -> FpModule:
        M = C.module(n)
        return FpModule.free(ring, M.ngens) if free else M

    lo, hi = C.lo - 1, C.hi
    mods, offs = [], {}
    for k in range(lo, hi + 1):
        S, _, _ = direct_sum([F(k), F(k + 1)], ring)
        mods.append(S)
        offs[k] = F(k).ngens
    mats = []
    for k in range(lo + 1, hi + 1):
        a, b = F(k).ngens, F(k + 1).ngens
        a1 = F(k - 1).ngens
        # (a, b) in E_k -> (0, a) in E_{k-1} = F_{k-1} ⊕ F_k
        mats.append(block_matrix([[Mat.zeros(a1, a), Mat.zeros(a1, b)], [Mat.identity(a), Mat.zeros(a, b)]]))
    E = ChainComplex.build(ring, lo, mods, mats)
    pi = {}
    for k in range(lo, hi + 1):
        pi[k] = Mat.identity(C.module(k).ngens).hstack(C.d(k + 1).matrix)
    return E, ChainMap.from_matrices(E, C, pi), offs


def canonical_disk_cover(C: ChainComplex, free: bool = False) -> ShortExactSeqCh:
    """0 -> K -> ⊕ D^n(C_n) -> C -> 0 (or with free modules when ``free``)."""
    E, pi, _ = disk_sum(C, free)
    K, inc = kernel_complex(pi)
    return ShortExactSeqCh(K, E, C, inc, pi)


def degreewise_section(seq: ShortExactSeqCh) -> dict[int, ModuleHom] | None:
    """Module sections of the epimorphism in every degree, or None."""
    out = {}
    for n in seq.C.degrees():
        s = find_section(seq.p(n))
        if s is None:
            return None
        out[n] = s
    return out


def cone_envelope(H: ChainComplex) -> tuple[ChainComplex, ChainMap, ChainComplex, ChainMap]:
    """0 -> H -> E -> ΣH -> 0 with E = ⊕ D^{n+1}(H_n) contractible.

    E_n = H_n ⊕ H_{n-1}, δ(a, b) = (b, 0), H -> E is h -> (h, δh) and E -> ΣH is
    (a, b) -> b - δa.
    """
    ring = H.ring
    if H.hi < H.lo:
        return H, ChainMap.identity(H), H, ChainMap.identity(H)
    lo, hi = H.lo, H.hi + 1
    mods = [direct_sum([H.module(n), H.module(n - 1)], ring)[0] for n in range(lo, hi + 1)]
    mats = []
    for n in range(lo + 1, hi + 1):
        a, b = H.module(n).ngens, H.module(n - 1).ngens
        a1, b1 = H.module(n - 1).ngens, H.module(n - 2).ngens
        mats.append(block_matrix([[Mat.zeros(a1, a), Mat.identity(b)], [Mat.zeros(b1, a), Mat.zeros(b1, b)]]))
    E = ChainComplex.build(ring, lo, mods, mats)
    iota = {n: Mat.identity(H.module(n).ngens).vstack(H.d(n).matrix) for n in H.degrees()}
    SH = suspension(H, 1)
    q = {}
    for n in range(lo, hi + 1):
        a, b = H.module(n).ngens, H.module(n - 1).ngens
        q[n] = (-H.d(n).matrix).hstack(Mat.identity(b))
    return E, ChainMap.from_matrices(H, E, iota), SH, ChainMap.from_matrices(E, SH, q)


# ---------------------------------------------------------------------------
# Random sampling


def _as_rng(seed_or_rng) -> random.Random:
    if isinstance(seed_or_rng, random.Random):
        return seed_or_rng
    return random.Random(seed_or_rng)


def random_complex(
    ring: Ring,
    window: tuple[int, int],
    max_gens: int = 2,
    seed=0,
    free: bool = False,
    module_sampler: Callable[[random.Random], FpModule] | None = None,
) -> ChainComplex:
    """Random complex with each δ_{n+1} drawn as a map into the cycles Z_n.

    Deterministic in ``seed``.  ``free`` restricts the degrees to free modules.
    """
    rng = _as_rng(seed)
    lo, hi = window
    if hi < lo:
        return ChainComplex.zero(ring)

    def sample() -> FpModule:
        if module_sampler is not None:
            return module_sampler(rng)
        if free:
            return FpModule.free(ring, rng.randint(0, max_gens))
        return random_module(ring, rng, max_gens)

    mods = [sample()]
    mats = []
    Z, zinc = mods[0], ModuleHom.identity(mods[0])
    for n in range(lo + 1, hi + 1):
        M = sample()
        h = random_hom(M, Z, rng)
        mats.append(zinc.matrix @ h.matrix)
        mods.append(M)
        d = ModuleHom(M, mods[-2], mats[-1])
        Z, zinc = kernel_of_hom(d)
    return ChainComplex.build(ring, lo, mods, mats)


def _relaxed_cover(M: FpModule, rng: random.Random) -> tuple[FpModule, Mat]:
    """A module on M's generators with a random subset of its relations."""
    rels = [r for r in M.relations.data if rng.random() < 0.5]
    return FpModule.presented(M.ring, M.ngens, rels), Mat.identity(M.ngens)


def random_exact_complex(ring: Ring, window: tuple[int, int], max_gens: int = 2, seed=0) -> ChainComplex:
    """Random exact complex supported in the window, built from the bottom up.

    Each new degree is a relaxed cover of the current cycles plus a random
    extra summand; the top degree is the module of cycles itself.
    """
    rng = _as_rng(seed)
    lo, hi = window
    if hi < lo:
        return ChainComplex.zero(ring)
    if hi == lo:
        return sphere(lo, FpModule.zero(ring))
    mods = [random_module(ring, rng, max_gens)]
    mats = []
    Z, zinc = mods[0], ModuleHom.identity(mods[0])
    for n in range(lo + 1, hi + 1):
        if n == hi:
            M, A = Z, zinc.matrix
        else:
            cov, p = _relaxed_cover(Z, rng)
            W = random_module(ring, rng, max(0, max_gens - 1))
            h = random_hom(W, Z, rng)
            M, _, _ = direct_sum([cov, W], ring)
            A = zinc.matrix @ p.hstack(h.matrix)
        mods.append(M)
        mats.append(A)
        Z, zinc = kernel_of_hom(ModuleHom(M, mods[-2], A))
    return ChainComplex.build(ring, lo, mods, mats)


def random_contractible_projective(ring: Ring, window: tuple[int, int], max_gens: int = 2, seed=0) -> ChainComplex:
    """An exact complex with free degrees: disks on free modules in random bases."""
    rng = _as_rng(seed)
    lo, hi = window
    if hi < lo:
        return ChainComplex.zero(ring)
    disks = [disk(n, FpModule.free(ring, rng.randint(0, max_gens))) for n in range(lo + 1, hi + 1)]
    if not disks:
        return sphere(lo, FpModule.zero(ring))
    S, _, _ = direct_sum_complex(disks)
    bases = {n: random_unimodular(S.module(n).ngens, rng) for n in S.degrees()}
    mats = []
    for n in range(S.lo + 1, S.hi + 1):
        P_lo, _ = bases[n - 1]
        _, Pinv = bases[n]
        mats.append(P_lo @ S.d(n).matrix @ Pinv)
    return ChainComplex.build(ring, S.lo, list(S.modules), mats)
