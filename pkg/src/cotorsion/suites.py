"""Seeded verification suites.

Each suite runs a batch of independent checks and reports one line per
check.  The CLI ``verify`` command and the acceptance tests both call these.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable

from .approx import et_run, thm39_forward, validate_filtration
from .bruteforce import ext_order_spectrum, small_modules, spectrum_of_orders
from .classes import (
    ALL,
    INJECTIVE,
    PROJECTIVE,
    ZERO,
    ComplexClassId,
    cogenerating_set,
    injective_pair,
    lifting_exactness_test,
    member_class,
    projective_pair,
    rhs_characterization,
)
from .complexes import (
    ChainComplex,
    disk,
    random_complex,
    random_contractible_projective,
    random_exact_complex,
)
from .ext import ext1_ch, lemma21_sides, perp_member, verify_disk_iso, verify_sphere_iso
from .linalg import ZZ, Mat, Ring, Zmod, determinant, smith_normal_form
from .modules import FpModule, ext1_module, random_module, random_unimodular, rebase


@dataclass
class SuiteConfig:
    ring: Ring | None = None
    seed: int = 42
    trials: int | None = None
    window: tuple[int, int] | None = None
    max_gens: int = 2


@dataclass
class Check:
    ok: bool
    text: str


@dataclass
class SuiteResult:
    name: str
    seed: int
    checks: list[Check] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    stats: dict[str, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return len(self.checks)

    @property
    def passed(self) -> int:
        return sum(c.ok for c in self.checks)

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    def add(self, ok: bool, text: str) -> None:
        self.checks.append(Check(bool(ok), text))

    def lines(self) -> list[str]:
        out = [f"{self.name} {k} {'PASS' if c.ok else 'FAIL'} {c.text}" for k, c in enumerate(self.checks)]
        out += [f"note: {n}" for n in self.notes]
        out.append(self.summary())
        return out

    def summary(self) -> str:
        return f"{self.passed}/{self.total} pass"

    def to_json(self) -> dict:
        return {
            "suite": self.name,
            "seed": self.seed,
            "passed": self.passed,
            "total": self.total,
            "checks": [{"ok": c.ok, "text": c.text} for c in self.checks],
            "notes": list(self.notes),
            "stats": dict(self.stats),
        }


def _draw_window(rng: random.Random, max_width: int) -> tuple[int, int]:
    lo = rng.randint(-1, 1)
    return lo, lo + rng.randint(1, max_width) - 1


# ---------------------------------------------------------------------------


def suite_snf(cfg: SuiteConfig) -> SuiteResult:
    """Smith normal form soundness over Z on random small matrices."""
    res = SuiteResult("snf", cfg.seed)
    rng = random.Random(cfg.seed)
    for _ in range(cfg.trials or 500):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        A = Mat.from_rows([[rng.randint(-9, 9) for _ in range(n)] for _ in range(m)])
        F = smith_normal_form(A)
        diag = F.diagonal
        ok = (F.U @ A @ F.V).data == F.S.data
        ok &= abs(determinant(F.U)) == 1 and abs(determinant(F.V)) == 1
        ok &= all(F.S.data[i][j] == 0 for i in range(m) for j in range(n) if i != j)
        ok &= all(d >= 0 for d in diag)
        ok &= all(diag[i + 1] % diag[i] == 0 if diag[i] else diag[i + 1] == 0 for i in range(len(diag) - 1))
        res.add(ok, f"{m}x{n} diag={list(diag)}")
    return res


def suite_ext_mod(cfg: SuiteConfig) -> SuiteResult:
    """ext1_module against brute-force extension enumeration for modules of size ≤ 8."""
    ring = cfg.ring or Zmod(4)
    if ring.is_integers:
        raise ValueError("ext-mod needs a finite ring Z/n")
    res = SuiteResult("ext-mod", cfg.seed)
    rng = random.Random(cfg.seed)
    shapes = small_modules(ring.modulus, 8)

    def present(orders):
        M = FpModule.diagonal(ring, orders)
        P, Pinv = random_unimodular(M.ngens, rng)
        return rebase(M, P, Pinv)[0]

    for a in shapes:
        for b in shapes:
            E = ext1_module(present(a), present(b))
            want = ext_order_spectrum(a, b, ring.modulus)
            got = spectrum_of_orders(E.invariant_factors().torsion)
            res.add(got == want, f"Ext({_cyc(a)}, {_cyc(b)}) = {E.invariant_factors()}")
    return res


def _cyc(orders) -> str:
    return " ⊕ ".join(f"Z/{d}" for d in orders) or "0"


def suite_lemma21(cfg: SuiteConfig) -> SuiteResult:
    """Degreewise Ext against homology of the Hom complex."""
    rings = [cfg.ring] if cfg.ring else [Zmod(4), Zmod(6)]
    res = SuiteResult("lemma21", cfg.seed)
    rng = random.Random(cfg.seed)
    for k in range(cfg.trials or 200):
        ring = rings[k % len(rings)]
        n = (-1, 0, 1)[k % 3]
        if cfg.window:
            wX = wY = cfg.window
        else:
            # overlap the windows near the shift n so that both sides are often nonzero
            a = rng.randint(-1, 0)
            wX = (a, a + rng.randint(1, 3))
            b = a + n - rng.randint(0, 1)
            wY = (b, b + rng.randint(1, 3))
        X = random_complex(ring, wX, cfg.max_gens, rng.getrandbits(32))
        Y = random_complex(ring, wY, cfg.max_gens, rng.getrandbits(32))
        left, right = lemma21_sides(X, Y, n)
        ok = left.invariant_factors() == right.invariant_factors()
        res.add(ok, f"ring={ring} n={n} dw={left.invariant_factors()} H={right.invariant_factors()}")
    return res


def suite_disk_iso(cfg: SuiteConfig) -> SuiteResult:
    ring = cfg.ring or Zmod(4)
    res = SuiteResult("disk-iso", cfg.seed)
    rng = random.Random(cfg.seed)
    for _ in range(cfg.trials or 100):
        w = cfg.window or _draw_window(rng, 3)
        C = random_complex(ring, w, cfg.max_gens, rng.getrandbits(32))
        A = random_module(ring, rng, cfg.max_gens)
        n = rng.randint(w[0] - 1, w[1] + 1)
        res.add(verify_disk_iso(A, n, C), f"A={A} n={n} C={C}")
    return res


def suite_sphere_iso(cfg: SuiteConfig) -> SuiteResult:
    ring = cfg.ring or Zmod(4)
    res = SuiteResult("sphere-iso", cfg.seed)
    rng = random.Random(cfg.seed)
    for _ in range(cfg.trials or 100):
        w = cfg.window or _draw_window(rng, 4)
        U = random_exact_complex(ring, w, cfg.max_gens, rng.getrandbits(32))
        Y = random_module(ring, rng, cfg.max_gens)
        n = rng.randint(w[0] - 1, w[1] + 1)
        res.add(verify_sphere_iso(U, n, Y), f"Y={Y} n={n} U={U}")
    return res


EX_P = ComplexClassId("ex", PROJECTIVE)


def _corrupt(W: ChainComplex, n: int, M: FpModule) -> ChainComplex:
    """W with degree n replaced by M and both adjacent differentials zero."""
    mods = list(W.modules)
    mods[n - W.lo] = M
    mats = []
    for j in range(W.lo + 1, W.hi + 1):
        if n in (j, j - 1):
            mats.append(Mat.zeros(mods[j - 1 - W.lo].ngens, mods[j - W.lo].ngens))
        else:
            mats.append(W.d(j).matrix)
    return ChainComplex.build(W.ring, W.lo, mods, mats)


def suite_thm33(cfg: SuiteConfig) -> SuiteResult:
    """Orthogonality of exact projective complexes against complexes of
    injectives passing the right-hand characterization, plus corruptions."""
    ring = cfg.ring or Zmod(4)
    if ring.is_integers:
        raise ValueError("thm33 suite needs Z/n (injective degrees)")
    res = SuiteResult("thm33", cfg.seed)
    rng = random.Random(cfg.seed)
    trials = cfg.trials or 100
    n_corrupt = max(1, trials // 5)
    window = cfg.window or (0, 2)
    half = FpModule.cyclic(ring, _smallest_prime(ring.modulus))

    def sampler(r: random.Random) -> ChainComplex:
        return random_contractible_projective(ring, window, cfg.max_gens, r.getrandbits(32))

    disks = [G for G in cogenerating_set(projective_pair(ring), injective_pair(ring), window) if _is_disk(G)]
    for k in range(trials):
        U = random_contractible_projective(ring, window, cfg.max_gens, rng.getrandbits(32))
        W = random_complex(ring, window, cfg.max_gens, rng.getrandbits(32), free=True)
        v = rhs_characterization(W, EX_P, INJECTIVE, sampler, trials=3, rng=random.Random(k))
        G = ext1_ch(U, W)
        ok = bool(member_class(U, EX_P)) and v.passed and G.is_zero()
        res.add(ok, f"pair rhs={v} Ext={G.invariant_factors()}")
    for k in range(n_corrupt):
        W = random_complex(ring, window, cfg.max_gens, rng.getrandbits(32), free=True)
        n = rng.randint(window[0], window[1])
        W2 = _corrupt(W, n, half)
        v = rhs_characterization(W2, EX_P, INJECTIVE, sampler, trials=1)
        wit = next((G for G in disks if not ext1_ch(G, W2).is_zero()), None)
        clean = all(ext1_ch(G, W).is_zero() for G in disks)
        ok = wit is not None and clean and not v.passed
        res.add(ok, f"corrupted degree {n}: rhs={v.status} witness={_disk_label(wit)}")
    return res


def _smallest_prime(n: int) -> int:
    p = 2
    while n % p:
        p += 1
    return p


def _is_disk(C: ChainComplex) -> bool:
    return C.hi == C.lo + 1 and C.module(C.lo).ngens > 0 and C.d(C.hi).matrix.data == Mat.identity(C.module(C.lo).ngens).data


def _disk_label(C: ChainComplex | None) -> str:
    if C is None:
        return "none"
    return f"D^{C.hi}({C.module(C.hi)})"


def corpus(seed: int = 42, size: int = 500, max_gens: int = 2) -> list[ChainComplex]:
    """Mixed seeded corpus over Z, Z/4, Z/6, Z/8 and Z/9.

    Four generators are cycled: arbitrary complexes, complexes of free
    modules, exact complexes and contractible complexes of free modules.
    """
    rng = random.Random(seed)
    rings = [ZZ, Zmod(4), Zmod(6), Zmod(8), Zmod(9)]
    out = []
    for k in range(size):
        ring = rings[k % len(rings)]
        w = _draw_window(rng, 3)
        s = rng.getrandbits(32)
        kind = (k // len(rings)) % 4
        if kind == 0:
            C = random_complex(ring, w, max_gens, s)
        elif kind == 1:
            C = random_complex(ring, w, max_gens, s, free=True)
        elif kind == 2:
            C = random_exact_complex(ring, w, max_gens, s)
        else:
            C = random_contractible_projective(ring, w, max_gens, s)
        out.append(C)
    return out


def suite_cor36(cfg: SuiteConfig) -> SuiteResult:
    """REL(U, U) = TILDE(U) and REL(U, All) = EX(U) on the corpus."""
    res = SuiteResult("cor36", cfg.seed)
    positives: Counter = Counter()
    oracles = {"P": PROJECTIVE, "I": INJECTIVE, "M": ALL, "0": ZERO}
    for k, C in enumerate(corpus(cfg.seed, cfg.trials or 500, cfg.max_gens)):
        bad = []
        for name, o in oracles.items():
            a = bool(member_class(C, ComplexClassId("rel", o, o)))
            b = bool(member_class(C, ComplexClassId("tilde", o, o)))
            c = bool(member_class(C, ComplexClassId("rel", o, ALL)))
            d = bool(member_class(C, ComplexClassId("ex", o, o)))
            positives[f"tilde{name}"] += b
            positives[f"ex{name}"] += d
            if a != b:
                bad.append(f"rel{name}{name}!=tilde{name}")
            if c != d:
                bad.append(f"rel{name}M!=ex{name}")
        res.add(not bad, f"ring={C.ring} {' '.join(bad) or 'agree'}")
    res.notes.append("positives " + " ".join(f"{k}={v}" for k, v in sorted(positives.items())))
    return res


def suite_prop312(cfg: SuiteConfig) -> SuiteResult:
    """Exact complexes of injectives = perp of the cogenerating set."""
    rings = [cfg.ring] if cfg.ring else [Zmod(4), Zmod(6)]
    res = SuiteResult("prop312", cfg.seed)
    rng = random.Random(cfg.seed)
    window = cfg.window or (0, 2)
    cls = ComplexClassId("rel", INJECTIVE, ALL)
    gens = {R: cogenerating_set(projective_pair(R), injective_pair(R), window) for R in rings}
    positives = 0
    for R in rings:
        for k in range(cfg.trials or 100):
            s = rng.getrandbits(32)
            kind = k % 3
            if kind == 0:
                Y = random_contractible_projective(R, window, cfg.max_gens, s)
            else:
                Y = random_complex(R, window, cfg.max_gens, s, free=kind == 1)
            a = bool(member_class(Y, cls))
            b = perp_member(Y, gens[R])
            positives += a
            res.add(a == b, f"ring={R} member={a} perp={b}")
    res.notes.append(f"{positives} members")
    res.stats["members"] = positives
    return res


def suite_lemma31(cfg: SuiteConfig) -> SuiteResult:
    """Lifting over D^n(R) -> S^n(R) detects exactness."""
    ring = cfg.ring or Zmod(4)
    res = SuiteResult("lemma31", cfg.seed)
    rng = random.Random(cfg.seed)
    window = cfg.window or (0, 3)
    J = FpModule.free(ring, 1)
    nonexact = 0
    for k in range(cfg.trials or 100):
        s = rng.getrandbits(32)
        X = random_exact_complex(ring, window, cfg.max_gens, s) if k % 3 == 0 else random_complex(ring, window, cfg.max_gens, s)
        r = lifting_exactness_test(X, J)
        nonexact += not r.exact
        res.add(r.lifts_all == r.exact, f"lifts={r.lifts_all} exact={r.exact}")
    res.notes.append(f"{nonexact} non-exact inputs")
    res.stats["nonexact"] = nonexact
    return res


def suite_thm39(cfg: SuiteConfig) -> SuiteResult:
    """Forward approximation pipeline on random complexes."""
    ring = cfg.ring or Zmod(4)
    res = SuiteResult("thm39", cfg.seed)
    rng = random.Random(cfg.seed)
    window = cfg.window or (0, 2)
    for _ in range(cfg.trials or 50):
        C = random_complex(ring, window, cfg.max_gens, rng.getrandbits(32))
        a = thm39_forward(C)
        failed = [c.line() for c in a.claims if not c.holds] + [s.name for s in a.steps if not s.valid]
        res.add(a.ok(), f"C={C} U'={a.sequence.B} steps={len(a.steps)} {'; '.join(failed) or 'all claims ok'}")
    return res


def suite_et(cfg: SuiteConfig) -> SuiteResult:
    """Eklof-Trlifaj runs: Complete runs land in the perp with a valid filtration."""
    ring = cfg.ring or Zmod(4)
    res = SuiteResult("et", cfg.seed)
    rng = random.Random(cfg.seed)
    window = cfg.window or (0, 2)
    S = cogenerating_set(projective_pair(ring), injective_pair(ring), window)
    status: Counter = Counter()
    trivial = et_run(disk(window[0] + 1, FpModule.free(ring, 1)), S)
    res.add(trivial.status == "Complete" and trivial.steps == 0, f"trivial input: {trivial.status} in {trivial.steps} steps")
    for _ in range(cfg.trials or 30):
        Y = random_complex(ring, window, cfg.max_gens, rng.getrandbits(32))
        r = et_run(Y, S)
        status[r.status] += 1
        if r.status == "Complete":
            ok = perp_member(r.final, S) and validate_filtration(r.filtration, S)
        else:
            ok = True  # nothing is claimed about runs that stop early
        res.add(ok, f"{r.status} after {r.steps} steps")
    res.notes.append("status " + " ".join(f"{k}={v}" for k, v in sorted(status.items())))
    res.stats.update(status)
    return res


SUITES: dict[str, Callable[[SuiteConfig], SuiteResult]] = {
    "lemma21": suite_lemma21,
    "disk-iso": suite_disk_iso,
    "sphere-iso": suite_sphere_iso,
    "thm33": suite_thm33,
    "prop312": suite_prop312,
    "lemma31": suite_lemma31,
    "thm39": suite_thm39,
    "et": suite_et,
    "snf": suite_snf,
    "ext-mod": suite_ext_mod,
    "cor36": suite_cor36,
}


def run_suite(name: str, cfg: SuiteConfig | None = None) -> SuiteResult:
    return SUITES[name](cfg or SuiteConfig())
