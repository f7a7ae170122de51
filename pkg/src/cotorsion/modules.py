"""Finitely presented modules over Z and Z/n.

A module is a cokernel ``Z^g / L`` where ``L`` is spanned by the relation
rows (plus ``n * e_i`` for every generator when the ring is Z/n).  Elements
are integer columns in generator coordinates; two columns are equal in the
module when their difference lies in ``L``.  Every module carries a cached
canonical form ``Z/d_1 + ... + Z/d_k`` computed from its Smith form, which
makes equality testing and Hom groups cheap and exact.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import product
from math import gcd, prod
from typing import Sequence

from .linalg import Mat, Ring, Solver, block_diag, lattice_basis, smith_normal_form


@dataclass(frozen=True)
class InvariantFactors:
    """``R^free_rank + R/(d_1) + ...`` with ``d_1 | d_2 | ...``."""

    free_rank: int
    torsion: tuple[int, ...]

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def order(self) -> int | None:
        return None if self.free_rank else prod(self.torsion)

    def __str__(self):
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " ⊕ ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}


@dataclass(frozen=True)
class Canonical:
    """Isomorphism data ``M ≅ ⊕ Z/orders[i]`` (order 0 means Z)."""

    orders: tuple[int, ...]
    to_canon: Mat    # k x g
    from_canon: Mat  # g x k


@dataclass(frozen=True, eq=True)
class FpModule:
    ring: Ring
    ngens: int
    relations: Mat = field(compare=True)

    def __post_init__(self):
        if self.relations.cols != self.ngens:
            raise ValueError(
                f"relation matrix has {self.relations.cols} columns but the module has {self.ngens} generators"
            )

    # -- constructors -----------------------------------------------------

    @classmethod
    def presented(cls, ring: Ring, ngens: int, relations: Sequence[Sequence[int]] = ()) -> "FpModule":
        rows = [[ring.reduce(int(x)) for x in r] for r in relations]
        return cls(ring, ngens, Mat.from_rows(rows, ngens))

    @classmethod
    def zero(cls, ring: Ring) -> "FpModule":
        return cls(ring, 0, Mat.zeros(0, 0))

    @classmethod
    def free(cls, ring: Ring, rank: int) -> "FpModule":
        return cls(ring, rank, Mat.zeros(0, rank))

    @classmethod
    def cyclic(cls, ring: Ring, d: int) -> "FpModule":
        """R/(d).  ``d == 0`` gives R itself."""
        return cls.diagonal(ring, [d])

    @classmethod
    def diagonal(cls, ring: Ring, orders: Sequence[int]) -> "FpModule":
        rows = []
        k = len(orders)
        for i, d in enumerate(orders):
            if d:
                rows.append(tuple(d if j == i else 0 for j in range(k)))
        return cls(ring, k, Mat.from_rows(rows, k))

    # -- canonical form ---------------------------------------------------

    @cached_property
    def zrelations(self) -> Mat:
        """Relations over Z, including ``n * e_i`` rows for Z/n."""
        if self.ring.modulus:
            return self.relations.vstack(Mat.identity(self.ngens).scale(self.ring.modulus))
        return self.relations

    @cached_property
    def canon(self) -> Canonical:
        g = self.ngens
        R = self.zrelations
        if R.rows == 0:
            I = Mat.identity(g)
            return Canonical((0,) * g, I, I)
        snf = smith_normal_form(R)
        diag = snf.diagonal + [0] * (g - min(R.rows, g))
        keep = [i for i in range(g) if diag[i] != 1]
        orders = tuple(diag[i] for i in keep)
        to_canon = Mat.from_rows([snf.V.col(i) for i in keep], g)
        from_canon = Mat.from_cols([snf.V_inv.row(i) for i in keep], g)
        return Canonical(orders, to_canon, from_canon)

    def invariant_factors(self) -> InvariantFactors:
        orders = self.canon.orders
        return InvariantFactors(sum(1 for d in orders if d == 0), tuple(d for d in orders if d))

    def is_zero(self) -> bool:
        return not self.canon.orders

    def order(self) -> int | None:
        """Number of elements, or None when infinite."""
        return self.invariant_factors().order()

    def is_diagonal(self) -> bool:
        return self.canon.to_canon == Mat.identity(self.ngens) and self.canon.from_canon == Mat.identity(self.ngens)

    # -- elements -----------------------------------------------------------

    def reduce(self, x: Sequence[int]) -> tuple[int, ...]:
        """Canonical coordinates of the element with generator coordinates ``x``."""
        c = self.canon.to_canon.apply(tuple(x))
        return tuple(ci % d if d else ci for ci, d in zip(c, self.canon.orders))

    def is_zero_element(self, x: Sequence[int]) -> bool:
        return not any(self.reduce(x))

    def equal_elements(self, x: Sequence[int], y: Sequence[int]) -> bool:
        return self.is_zero_element([a - b for a, b in zip(x, y)])

    def element_from_canonical(self, c: Sequence[int]) -> tuple[int, ...]:
        return self.canon.from_canon.apply(tuple(c))

    def elements(self):
        """Iterate over all elements (generator coordinates) of a finite module."""
        orders = self.canon.orders
        if any(d == 0 for d in orders):
            raise ValueError("module is infinite")
        for c in product(*(range(d) for d in orders)):
            yield self.element_from_canonical(c)

    def is_zero_map_into(self, A: Mat) -> bool:
        """True when every column of ``A`` is zero in this module."""
        return all(self.is_zero_element(c) for c in A.columns())

    # -- misc -------------------------------------------------------------------

    def pruned(self) -> tuple["FpModule", "ModuleHom", "ModuleHom"]:
        """Diagonal isomorphic copy with the isomorphisms in both directions."""
        c = self.canon
        D = FpModule.diagonal(self.ring, c.orders)
        return D, ModuleHom(self, D, c.to_canon), ModuleHom(D, self, c.from_canon)

    def __str__(self):
        return str(self.invariant_factors())

    def to_json(self) -> dict:
        return {
            "ring": self.ring.to_json(),
            "generators": self.ngens,
            "relations": [[_json_int(x) for x in r] for r in self.relations.data],
        }

    @classmethod
    def from_json(cls, obj, ring: Ring | None = None) -> "FpModule":
        r = Ring.from_json(obj["ring"]) if "ring" in obj else ring
        if r is None:
            raise ValueError("module literal has no ring")
        if ring is not None and r != ring:
            raise RingMismatch(f"module over {r} inside a complex over {ring}")
        g = int(obj["generators"])
        rels = [[int(x) for x in row] for row in obj.get("relations", [])]
        for row in rels:
            if len(row) != g:
                raise ValueError(f"relation {row} does not have {g} entries")
        return cls.presented(r, g, rels)


class RingMismatch(ValueError):
    """Raised when objects over different coefficient rings are combined."""


def _json_int(x: int):
    return x if abs(x) < 2**53 else str(x)


def same_ring(*objs) -> Ring:
    rings = {o.ring for o in objs}
    if len(rings) != 1:
        raise RingMismatch(f"ring mismatch: {sorted(map(str, rings))}")
    return rings.pop()


def diagonal_orders(M: FpModule) -> tuple[int, ...]:
    """Orders of the generators of a module presented by a diagonal relation matrix."""
    orders = [0] * M.ngens
    for r in M.relations.data:
        nz = [(i, x) for i, x in enumerate(r) if x]
        if len(nz) > 1:
            raise ValueError("module is not diagonal")
        if nz:
            i, x = nz[0]
            orders[i] = gcd(orders[i], abs(x))
    if M.ring.modulus:
        orders = [gcd(d, M.ring.modulus) for d in orders]
    return tuple(orders)


def invariant_factors(M: FpModule) -> InvariantFactors:
    return M.invariant_factors()


def isomorphic(M: FpModule, N: FpModule) -> bool:
    return M.ring == N.ring and M.invariant_factors() == N.invariant_factors()


# ---------------------------------------------------------------------------
# Homomorphisms


@dataclass(frozen=True)
class ModuleHom:
    """Module map given by its matrix on generator columns (target.ngens x source.ngens)."""

    source: FpModule
    target: FpModule
    matrix: Mat

    def __post_init__(self):
        if self.matrix.shape != (self.target.ngens, self.source.ngens):
            raise ValueError(
                f"hom matrix has shape {self.matrix.shape}, expected {(self.target.ngens, self.source.ngens)}"
            )

    @classmethod
    def identity(cls, M: FpModule) -> "ModuleHom":
        return cls(M, M, Mat.identity(M.ngens))

    @classmethod
    def zero(cls, M: FpModule, N: FpModule) -> "ModuleHom":
        return cls(M, N, Mat.zeros(N.ngens, M.ngens))

    def __call__(self, x: Sequence[int]) -> tuple[int, ...]:
        return self.matrix.apply(tuple(x))

    def __matmul__(self, other: "ModuleHom") -> "ModuleHom":
        """Composition ``self ∘ other``."""
        return ModuleHom(other.source, self.target, self.matrix @ other.matrix)

    def __add__(self, other: "ModuleHom") -> "ModuleHom":
        return ModuleHom(self.source, self.target, self.matrix + other.matrix)

    def __neg__(self) -> "ModuleHom":
        return ModuleHom(self.source, self.target, -self.matrix)

    def __sub__(self, other: "ModuleHom") -> "ModuleHom":
        return self + (-other)

    def is_valid(self) -> bool:
        """Every relation of the source maps into the relations of the target."""
        return all(self.target.is_zero_element(self.matrix.apply(r)) for r in self.source.zrelations.data)

    def is_zero(self) -> bool:
        return self.target.is_zero_map_into(self.matrix)

    def equals(self, other: "ModuleHom") -> bool:
        return (self - other).is_zero()

    def is_injective(self) -> bool:
        return kernel_of_hom(self)[0].is_zero()

    def is_surjective(self) -> bool:
        return cokernel_of_hom(self)[0].is_zero()

    def is_iso(self) -> bool:
        return self.is_injective() and self.is_surjective()


class ModuleSolver:
    """Solve ``A c == v`` inside a module N, for a fixed matrix A into N."""

    def __init__(self, N: FpModule, A: Mat):
        if A.rows != N.ngens:
            raise ValueError("matrix rows must match target generators")
        self.N = N
        self.A = A
        can = N.canon
        B = can.to_canon @ A
        rel_cols = [tuple(d if j == i else 0 for j in range(len(can.orders))) for i, d in enumerate(can.orders) if d]
        self._k = A.cols
        self._M = B.hstack(Mat.from_cols(rel_cols, len(can.orders)))
        self._solver = Solver(self._M)

    def solve(self, v: Sequence[int]) -> tuple[int, ...] | None:
        w = self.N.canon.to_canon.apply(tuple(v))
        x = self._solver.solve(w)
        return None if x is None else x[: self._k]

    def kernel(self) -> Mat:
        """Columns generating ``{c : A c == 0 in N}``."""
        K = self._solver.kernel()
        return K.submatrix(range(self._k), range(K.cols))


def module_solve(N: FpModule, A: Mat, v: Sequence[int]) -> tuple[int, ...] | None:
    return ModuleSolver(N, A).solve(v)


def kernel_of_hom(f: ModuleHom) -> tuple[FpModule, ModuleHom]:
    """Kernel as a pruned module together with its inclusion into the source."""
    M = f.source
    gens = ModuleSolver(f.target, f.matrix).kernel()
    basis = lattice_basis(gens.columns(), M.ngens)
    B = Mat.from_cols(basis, M.ngens)
    solver = Solver(B)
    rels = []
    for r in M.zrelations.data:
        c = solver.solve(r)
        if c is None:
            raise ValueError("map is not a module homomorphism (relations escape the kernel)")
        rels.append(c)
    K0 = FpModule(M.ring, B.cols, Mat.from_rows(rels, B.cols))
    K, _, frm = K0.pruned()
    return K, ModuleHom(K, M, B @ frm.matrix)


def cokernel_of_hom(f: ModuleHom) -> tuple[FpModule, ModuleHom]:
    """Cokernel presented on the target's generators; the projection is the identity matrix."""
    N = f.target
    Q = FpModule(N.ring, N.ngens, N.relations.vstack(f.matrix.T))
    return Q, ModuleHom(N, Q, Mat.identity(N.ngens))


def image_of_hom(f: ModuleHom) -> tuple[FpModule, ModuleHom]:
    """Image presented as source/kernel (pruned), with its inclusion into the target."""
    M = f.source
    gens = ModuleSolver(f.target, f.matrix).kernel()
    basis = lattice_basis(gens.columns(), M.ngens)
    I0 = FpModule(M.ring, M.ngens, Mat.from_rows(basis, M.ngens))
    I, _, frm = I0.pruned()
    return I, ModuleHom(I, f.target, f.matrix @ frm.matrix)


def direct_sum(mods: Sequence[FpModule], ring: Ring | None = None):
    """Direct sum with lists of inclusions and projections."""
    if not mods:
        if ring is None:
            raise ValueError("ring required for an empty direct sum")
        return FpModule.zero(ring), [], []
    r = same_ring(*mods)
    S = FpModule(r, sum(m.ngens for m in mods), block_diag([m.relations for m in mods]))
    incs, projs = [], []
    off = 0
    for m in mods:
        e = Mat.from_cols([tuple(int(i == off + j) for i in range(S.ngens)) for j in range(m.ngens)], S.ngens)
        incs.append(ModuleHom(m, S, e))
        projs.append(ModuleHom(S, m, e.T))
        off += m.ngens
    return S, incs, projs


# ---------------------------------------------------------------------------
# Hom groups


@dataclass(frozen=True)
class HomGroup:
    """The group Hom(M, N) presented as a diagonal module, with encode/decode.

    ``decode`` turns coordinates into a matrix on the original generators;
    ``encode`` turns the matrix of any homomorphism M -> N into coordinates.
    """

    source: FpModule
    target: FpModule
    module: FpModule
    entries: tuple[tuple[int, int, int, int], ...]  # (j, i, scale, order)

    def decode(self, c: Sequence[int]) -> Mat:
        q, p = len(self.target.canon.orders), len(self.source.canon.orders)
        Ac = [[0] * p for _ in range(q)]
        for (j, i, scale, _), ck in zip(self.entries, c):
            Ac[j][i] = ck * scale
        Ac = Mat(q, p, tuple(tuple(r) for r in Ac))
        return self.target.canon.from_canon @ Ac @ self.source.canon.to_canon

    def decode_hom(self, c: Sequence[int]) -> ModuleHom:
        return ModuleHom(self.source, self.target, self.decode(c))

    def encode(self, A: Mat) -> tuple[int, ...]:
        Ac = self.target.canon.to_canon @ A @ self.source.canon.from_canon
        b = self.target.canon.orders
        a = self.source.canon.orders
        covered = set()
        out = []
        for j, i, scale, order in self.entries:
            v = Ac[j, i] % b[j] if b[j] else Ac[j, i]
            if v % scale:
                raise ValueError("matrix is not a homomorphism")
            v //= scale
            out.append(v % order if order else v)
            covered.add((j, i))
        for j in range(len(b)):
            for i in range(len(a)):
                if (j, i) not in covered:
                    v = Ac[j, i] % b[j] if b[j] else Ac[j, i]
                    if v:
                        raise ValueError("matrix is not a homomorphism")
        return tuple(out)

    def gens(self) -> list[Mat]:
        k = self.module.ngens
        return [self.decode([int(t == s) for t in range(k)]) for s in range(k)]


def hom_module(M: FpModule, N: FpModule) -> HomGroup:
    """Presentation of Hom_R(M, N)."""
    ring = same_ring(M, N)
    a = M.canon.orders
    b = N.canon.orders
    entries = []
    for j, bj in enumerate(b):
        for i, ai in enumerate(a):
            if bj == 0:
                if ai == 0:
                    entries.append((j, i, 1, 0))
                continue
            g = gcd(ai, bj)
            if g == 1:
                continue
            entries.append((j, i, bj // g, g))
    module = FpModule.diagonal(ring, [e[3] for e in entries])
    return HomGroup(M, N, module, tuple(entries))


def induced_map(src: HomGroup, dst: HomGroup, fn) -> Mat:
    """Matrix of a group map Hom -> Hom given on decoded matrices by ``fn``."""
    cols = [dst.encode(fn(A)) for A in src.gens()]
    return Mat.from_cols(cols, dst.module.ngens)


# ---------------------------------------------------------------------------
# Ext and projectivity


def free_cover(M: FpModule) -> tuple[FpModule, ModuleHom]:
    """R^g -> M sending basis vectors to generators."""
    F = FpModule.free(M.ring, M.ngens)
    return F, ModuleHom(F, M, Mat.identity(M.ngens))


def ext1_module(M: FpModule, N: FpModule) -> FpModule:
    """Ext^1_R(M, N) from one syzygy step: coker(Hom(F0, N) -> Hom(K, N))."""
    same_ring(M, N)
    F0, pi = free_cover(M)
    K, inc = kernel_of_hom(pi)
    hF = hom_module(F0, N)
    hK = hom_module(K, N)
    restrict = induced_map(hF, hK, lambda A: A @ inc.matrix)
    Q, _ = cokernel_of_hom(ModuleHom(hF.module, hK.module, restrict))
    return Q.pruned()[0]


def find_section(p: ModuleHom) -> ModuleHom | None:
    """A map s with ``p ∘ s == id`` on p's target, or None if p does not split."""
    B, C = p.source, p.target
    hCB = hom_module(C, B)
    hCC = hom_module(C, C)
    P = induced_map(hCB, hCC, lambda A: p.matrix @ A)
    c = module_solve(hCC.module, P, hCC.encode(Mat.identity(C.ngens)))
    if c is None:
        return None
    s = ModuleHom(C, B, hCB.decode(c))
    assert (p @ s).equals(ModuleHom.identity(C))
    return s


def find_retraction(i: ModuleHom) -> ModuleHom | None:
    """A map r with ``r ∘ i == id`` on i's source, or None."""
    A, B = i.source, i.target
    hBA = hom_module(B, A)
    hAA = hom_module(A, A)
    P = induced_map(hBA, hAA, lambda R: R @ i.matrix)
    c = module_solve(hAA.module, P, hAA.encode(Mat.identity(A.ngens)))
    if c is None:
        return None
    return ModuleHom(B, A, hBA.decode(c))


def splits_off_free(M: FpModule) -> bool:
    """Whether the canonical epimorphism R^g -> M splits (solved directly)."""
    _, pi = free_cover(M)
    return find_section(pi) is not None


@lru_cache(maxsize=None)
def _cyclic_projective(ring: Ring, d: int) -> bool:
    return splits_off_free(FpModule.cyclic(ring, d))


def is_projective(M: FpModule) -> bool:
    """Projectivity via the canonical decomposition M ≅ ⊕ R/(d_i).

    A direct sum is projective exactly when every summand is, so the splitting
    problem is solved once per distinct cyclic summand.
    """
    return all(_cyclic_projective(M.ring, d) for d in set(M.canon.orders))


def is_injective(M: FpModule) -> bool:
    """Baer criterion over Z/n; over Z only the zero module qualifies among f.p. modules."""
    if M.ring.is_integers:
        return M.is_zero()
    return all(ext1_module(FpModule.cyclic(M.ring, d), M).is_zero() for d in M.ring.divisors())


# ---------------------------------------------------------------------------
# Random sampling


def random_module(ring: Ring, rng: random.Random, max_gens: int = 2, min_gens: int = 0) -> FpModule:
    """A module with a deliberately non-canonical presentation."""
    g = rng.randint(min_gens, max_gens)
    if ring.modulus:
        n = ring.modulus
        nrel = rng.randint(0, g)
        rels = []
        for _ in range(nrel):
            row = [0] * g
            i = rng.randrange(g)
            row[i] = rng.choice(ring.divisors())
            for j in range(g):
                if j != i and rng.random() < 0.3:
                    row[j] = rng.randrange(n)
            rels.append(row)
    else:
        nrel = rng.randint(0, g)
        rels = [[rng.randint(-3, 3) for _ in range(g)] for _ in range(nrel)]
    return FpModule.presented(ring, g, rels)


def random_hom(M: FpModule, N: FpModule, rng: random.Random) -> ModuleHom:
    h = hom_module(M, N)
    orders = [e[3] for e in h.entries]
    c = [rng.randrange(o) if o else rng.randint(-2, 2) for o in orders]
    return h.decode_hom(c)


def random_unimodular(k: int, rng: random.Random, steps: int = 6) -> tuple[Mat, Mat]:
    """A random unimodular integer matrix and its inverse."""
    P = [[int(i == j) for j in range(k)] for i in range(k)]
    Q = [[int(i == j) for j in range(k)] for i in range(k)]
    if k > 1:
        for _ in range(steps):
            i, j = rng.sample(range(k), 2)
            q = rng.choice([-2, -1, 1, 2])
            # P <- E P with E = I + q e_i e_j^T ; Q <- Q E^{-1}
            P[i] = [a + q * b for a, b in zip(P[i], P[j])]
            for r in Q:
                r[j] -= q * r[i]
    if k and rng.random() < 0.5:
        i = rng.randrange(k)
        P[i] = [-a for a in P[i]]
        for r in Q:
            r[i] = -r[i]
    mk = lambda A: Mat(k, k, tuple(tuple(r) for r in A))
    return mk(P), mk(Q)


def rebase(M: FpModule, P: Mat, P_inv: Mat) -> tuple[FpModule, ModuleHom]:
    """Same module in new coordinates y = P x (P unimodular, inverse ``P_inv``).

    Returns the new module and the isomorphism old -> new (matrix P).
    """
    if P @ P_inv != Mat.identity(M.ngens):
        raise ValueError("P_inv is not the inverse of P")
    rels = M.relations @ P.T
    N = FpModule.presented(M.ring, M.ngens, rels.data) if M.ngens else M
    return N, ModuleHom(M, N, P)
