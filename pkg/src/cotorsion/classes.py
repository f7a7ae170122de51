"""Module-class oracles, complex classes built from them, and the
characterization tests for orthogonal classes of complexes.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .complexes import (
    ChainComplex,
    ChainMap,
    chain_map_group,
    cycles,
    disk,
    find_null_homotopy,
    first_nonexact_degree,
    homology,
    is_exact,
    sphere,
)
from .linalg import Mat, Ring
from .modules import (
    FpModule,
    ModuleHom,
    ModuleSolver,
    cokernel_of_hom,
    hom_module,
    induced_map,
    is_injective,
    is_projective,
    isomorphic,
)

KINDS = ("projective", "injective", "all", "zero", "list")
_LETTERS = {"P": "projective", "I": "injective", "M": "all", "0": "zero"}


class NoInjectiveCogenerator(ValueError):
    """Raised over Z, where no finitely presented injective cogenerator exists."""


class ClassInclusionError(ValueError):
    """A module lies in the degree class but not in the cycle class."""


@dataclass(frozen=True)
class ClassOracle:
    kind: str
    members: tuple[FpModule, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown class kind {self.kind!r}")

    def __str__(self):
        if self.kind == "list":
            return "{" + ", ".join(str(m) for m in self.members) + "}"
        return self.kind

    @classmethod
    def from_json(cls, obj, ring: Ring | None = None) -> "ClassOracle":
        spec = obj["class"] if isinstance(obj, dict) and "class" in obj else obj
        if isinstance(spec, str):
            return cls(spec)
        if isinstance(spec, dict) and "list" in spec:
            return cls("list", tuple(FpModule.from_json(m, ring) for m in spec["list"]))
        raise ValueError(f"unknown class literal {obj!r}")


PROJECTIVE = ClassOracle("projective")
INJECTIVE = ClassOracle("injective")
ALL = ClassOracle("all")
ZERO = ClassOracle("zero")


def oracle_member(M: FpModule, o: ClassOracle) -> bool:
    if o.kind == "all":
        return True
    if o.kind == "zero":
        return M.is_zero()
    if o.kind == "projective":
        return is_projective(M)
    if o.kind == "injective":
        return is_injective(M)
    return any(isomorphic(M, A) for A in o.members)


@dataclass(frozen=True)
class PairSpec:
    """A cotorsion pair of module classes with a set that cogenerates it."""

    left: ClassOracle
    right: ClassOracle
    cogenerators: tuple[FpModule, ...]


def projective_pair(ring: Ring) -> PairSpec:
    """(projectives, all modules), cogenerated by R."""
    return PairSpec(PROJECTIVE, ALL, (FpModule.free(ring, 1),))


def injective_pair(ring: Ring) -> PairSpec:
    """(all modules, injectives), cogenerated by the cyclic modules R/(d)."""
    if ring.is_integers:
        raise NoInjectiveCogenerator("over Z there is no finitely presented cogenerating set for the injectives")
    return PairSpec(ALL, INJECTIVE, tuple(FpModule.cyclic(ring, d) for d in ring.divisors()))


# ---------------------------------------------------------------------------
# Complex classes


@dataclass(frozen=True)
class ComplexClassId:
    """dw / ex / tilde / rel classes of complexes built from module classes.

    dw: degrees in ``degree``; ex: additionally exact; tilde: exact with cycles
    in ``cycle``; rel: exact, degrees in ``degree`` and cycles in ``cycle``.
    """

    flavor: str
    degree: ClassOracle | None = None
    cycle: ClassOracle | None = None

    def __post_init__(self):
        if self.flavor not in ("dw", "ex", "tilde", "rel"):
            raise ValueError(f"unknown flavor {self.flavor!r}")
        if self.flavor in ("dw", "ex", "rel") and self.degree is None:
            raise ValueError(f"{self.flavor} needs a degree class")
        if self.flavor in ("tilde", "rel") and self.cycle is None:
            raise ValueError(f"{self.flavor} needs a cycle class")

    def __str__(self):
        if self.flavor == "rel":
            return f"rel({self.degree}, {self.cycle})"
        return f"{self.flavor}({self.degree if self.flavor != 'tilde' else self.cycle})"

    @classmethod
    def parse(cls, text: str) -> "ComplexClassId":
        """``dwP``, ``exI``, ``tildeP``, ``relPM`` (letters P, I, M = all, 0 = zero)."""
        m = re.fullmatch(r"(dw|ex|tilde)([PIM0])|rel([PIM0])([PIM0])", text)
        if not m:
            raise ValueError(f"unknown class spec {text!r}")
        if m.group(1):
            o = ClassOracle(_LETTERS[m.group(2)])
            return cls(m.group(1), None if m.group(1) == "tilde" else o, o if m.group(1) == "tilde" else None)
        return cls("rel", ClassOracle(_LETTERS[m.group(3)]), ClassOracle(_LETTERS[m.group(4)]))


@dataclass(frozen=True)
class Membership:
    member: bool
    witness: str | None = None
    degree: int | None = None

    def __bool__(self):
        return self.member


def _degrees_in(C: ChainComplex, o: ClassOracle) -> Membership | None:
    for n in C.degrees():
        if not oracle_member(C.module(n), o):
            return Membership(False, f"degree {n}: {C.module(n)} is not in class {o}", n)
    return None


def _cycles_in(C: ChainComplex, o: ClassOracle) -> Membership | None:
    for n in C.degrees():
        Z, _ = cycles(C, n)
        if not oracle_member(Z, o):
            return Membership(False, f"cycle Z_{n} = {Z} is not in class {o}", n)
    return None


def _exactness(C: ChainComplex) -> Membership | None:
    n = first_nonexact_degree(C)
    if n is not None:
        return Membership(False, f"not exact: H_{n} = {homology(C, n)}", n)
    return None


def check_inclusion(C: ChainComplex, degree: ClassOracle, cycle: ClassOracle) -> None:
    """Every degree module in the degree class must lie in the cycle class."""
    for n in C.degrees():
        M = C.module(n)
        if oracle_member(M, degree) and not oracle_member(M, cycle):
            raise ClassInclusionError(f"{M} (degree {n}) is in {degree} but not in {cycle}")


def member_class(C: ChainComplex, cls: ComplexClassId) -> Membership:
    if cls.flavor == "rel":
        check_inclusion(C, cls.degree, cls.cycle)
    checks: list[Callable[[], Membership | None]] = []
    if cls.flavor in ("dw", "ex", "rel"):
        checks.append(lambda: _degrees_in(C, cls.degree))
    if cls.flavor in ("ex", "tilde", "rel"):
        checks.append(lambda: _exactness(C))
    if cls.flavor in ("tilde", "rel"):
        checks.append(lambda: _cycles_in(C, cls.cycle))
    for chk in checks:
        r = chk()
        if r is not None:
            return r
    return Membership(True)


# ---------------------------------------------------------------------------
# Characterizations by null-homotopy


@dataclass(frozen=True)
class Verdict:
    status: str           # "PASS", "PASS_SAMPLED" or "FAIL"
    witness: str | None = None
    cases: int = 0
    evidence: str = "exact"

    @property
    def passed(self) -> bool:
        return self.status != "FAIL"

    def __str__(self):
        if self.status == "FAIL":
            return f"FAIL ({self.witness})"
        if self.status == "PASS_SAMPLED":
            return f"PASS-SAMPLED ({self.cases} cases)"
        return "PASS"


def _all_maps_null(A: ChainComplex, B: ChainComplex) -> str | None:
    """None if every chain map A -> B is null-homotopic, else a description.

    Null-homotopic maps form a subgroup, so checking generators of the group
    of chain maps decides the question exactly.
    """
    G = chain_map_group(A, B)
    for k, f in enumerate(G.generators()):
        if find_null_homotopy(f, G.hom) is None:
            return f"chain map generator {k} is not null-homotopic"
    return None


def _is_contractible(C: ChainComplex) -> bool:
    return find_null_homotopy(ChainMap.identity(C)) is not None


def rhs_characterization(
    V: ChainComplex,
    cls: ComplexClassId,
    right_class: ClassOracle,
    sampler: Callable[[random.Random], ChainComplex],
    trials: int = 10,
    rng: random.Random | None = None,
) -> Verdict:
    """Degrees of V in ``right_class`` and every map U -> V null-homotopic for U in ``cls``.

    U ranges over ``trials`` complexes drawn from ``sampler`` that lie in ``cls``.
    """
    fail = _degrees_in(V, right_class)
    if fail is not None:
        return Verdict("FAIL", fail.witness, 0)
    if V.is_zero() or _is_contractible(V):
        return Verdict("PASS", None, 0, "exact")
    rng = rng or random.Random(0)
    cases = 0
    for _ in range(trials):
        U = sampler(rng)
        if not member_class(U, cls):
            continue
        cases += 1
        bad = _all_maps_null(U, V)
        if bad is not None:
            return Verdict("FAIL", f"map from {U}: {bad}", cases, "sampled")
    return Verdict("PASS_SAMPLED", None, cases, "sampled")


def lhs_characterization(
    X: ChainComplex,
    cls: ComplexClassId,
    left_class: ClassOracle,
    sampler: Callable[[random.Random], ChainComplex],
    trials: int = 10,
    rng: random.Random | None = None,
) -> Verdict:
    """Degrees of X in ``left_class`` and every map X -> Y null-homotopic for Y in ``cls``."""
    fail = _degrees_in(X, left_class)
    if fail is not None:
        return Verdict("FAIL", fail.witness, 0)
    if X.is_zero() or _is_contractible(X):
        return Verdict("PASS", None, 0, "exact")
    rng = rng or random.Random(0)
    cases = 0
    for _ in range(trials):
        Y = sampler(rng)
        if not member_class(Y, cls):
            continue
        cases += 1
        bad = _all_maps_null(X, Y)
        if bad is not None:
            return Verdict("FAIL", f"map to {Y}: {bad}", cases, "sampled")
    return Verdict("PASS_SAMPLED", None, cases, "sampled")


# ---------------------------------------------------------------------------
# Lifting test


@dataclass(frozen=True)
class LiftingResult:
    lifts_all: bool
    exact: bool
    witness: str | None = None


def lifting_exactness_test(X: ChainComplex, J: FpModule) -> LiftingResult:
    """Do all chain maps X -> S^n(J) lift over D^n(J) -> S^n(J)?

    A map X -> S^n(J) is a map X_n / B_n -> J; it lifts exactly when it
    factors as g ∘ δ_n for some g: X_{n-1} -> J.
    """
    if X.ring.is_integers:
        raise NoInjectiveCogenerator("no f.p. injective cogenerator over Z; lifting test unavailable")
    witness = None
    for n in X.degrees():
        Q, _ = cokernel_of_hom(X.d(n + 1))
        alphas = hom_module(Q, J).gens()
        if not alphas:
            continue
        h_src = hom_module(X.module(n - 1), J)
        h_tgt = hom_module(X.module(n), J)
        dn = X.d(n).matrix
        P = induced_map(h_src, h_tgt, lambda g: g @ dn)
        solver = ModuleSolver(h_tgt.module, P)
        for k, a in enumerate(alphas):
            if solver.solve(h_tgt.encode(a)) is None:
                witness = f"degree {n}: map generator {k} of Hom(X_{n}/B_{n}, J) does not lift"
                break
        if witness:
            break
    return LiftingResult(witness is None, is_exact(X), witness)


# ---------------------------------------------------------------------------
# Cogenerating sets


def cogenerating_set(pair_u: PairSpec, pair_x: PairSpec, window: tuple[int, int]) -> list[ChainComplex]:
    """S^n(R), S^n(A_i) and D^n(B_j) for n in the window widened by one on each side."""
    lo, hi = window
    if hi < lo:
        hi = lo - 1
    ring = (pair_u.cogenerators or pair_x.cogenerators)[0].ring
    R = FpModule.free(ring, 1)
    out: list[ChainComplex] = []
    seen = set()
    for n in range(lo - 1, hi + 2):
        cands = [sphere(n, R)] + [sphere(n, A) for A in pair_u.cogenerators] + [disk(n, B) for B in pair_x.cogenerators]
        for C in cands:
            if C.is_zero() or C in seen:
                continue
            seen.add(C)
            out.append(C)
    return out


def disk_generators(ring: Ring, window: tuple[int, int]) -> list[ChainComplex]:
    """D^n(R) for n in the window widened by one."""
    R = FpModule.free(ring, 1)
    return [disk(n, R) for n in range(window[0] - 1, window[1] + 2)]


def dw_generators(ring: Ring, window: tuple[int, int]) -> list[ChainComplex]:
    """S^n(R) and D^n(R) for n in the window widened by one."""
    R = FpModule.free(ring, 1)
    out = []
    for n in range(window[0] - 1, window[1] + 2):
        out += [sphere(n, R), disk(n, R)]
    return out
