"""Approximation sequences, the pullback/pushout transfer pipelines, and a
finite Eklof-Trlifaj filtration engine.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Sequence

from .classes import (
    ComplexClassId,
    INJECTIVE,
    PROJECTIVE,
    ALL,
    disk_generators,
    dw_generators,
    member_class,
)
from .complexes import (
    ChainComplex,
    ChainMap,
    ShortExactSeqCh,
    canonical_disk_cover,
    chain_map_group,
    cokernel_complex,
    cone_envelope,
    disk_sum,
    is_exact,
    kernel_complex,
    pullback,
    pushout,
)
from .ext import ext1_ch, perp_witness, splits
from .linalg import Mat, Ring, block_matrix
from .modules import FpModule, ModuleHom, ModuleSolver, direct_sum

log = logging.getLogger(__name__)

EX_P = ComplexClassId("ex", PROJECTIVE)
DW_P = ComplexClassId("dw", PROJECTIVE)
EX_I = ComplexClassId("ex", INJECTIVE)
DW_I = ComplexClassId("dw", INJECTIVE)


@dataclass(frozen=True)
class Claim:
    subject: str
    statement: str
    holds: bool
    evidence: str  # "exact", "perp-window" or "sampled"
    detail: str | None = None

    def line(self) -> str:
        mark = "ok" if self.holds else "FAILED"
        extra = f" ({self.detail})" if self.detail else ""
        return f"{self.subject}: {self.statement} [{self.evidence}] {mark}{extra}"


@dataclass
class Step:
    name: str
    sequence: ShortExactSeqCh
    valid: bool


@dataclass
class ApproxSequence:
    sequence: ShortExactSeqCh
    side: str  # "EnoughProjectives" or "EnoughInjectives"
    claims: list[Claim] = field(default_factory=list)
    steps: list[Step] = field(default_factory=list)

    def splits(self) -> bool:
        return splits(self.sequence)

    def ok(self) -> bool:
        return all(c.holds for c in self.claims) and all(s.valid for s in self.steps)

    def claim(self, subject: str, statement: str) -> Claim:
        for c in self.claims:
            if c.subject == subject and c.statement == statement:
                return c
        raise KeyError((subject, statement))

    def report(self) -> list[str]:
        out = []
        for k, s in enumerate(self.steps, 1):
            seq = s.sequence
            out.append(f"step {k} {s.name}: 0 -> {seq.A} => {seq.B} => {seq.C} -> 0 [{'verified' if s.valid else 'INVALID'}]")
        out += [c.line() for c in self.claims]
        return out

    def to_json(self) -> dict:
        return {
            "side": self.side,
            "steps": [
                {"name": s.name, "valid": s.valid, "A": str(s.sequence.A), "B": str(s.sequence.B), "C": str(s.sequence.C)}
                for s in self.steps
            ],
            "claims": [
                {"subject": c.subject, "statement": c.statement, "holds": c.holds, "evidence": c.evidence, "detail": c.detail}
                for c in self.claims
            ],
        }


def _window(*cs: ChainComplex) -> tuple[int, int]:
    live = [c for c in cs if c.hi >= c.lo]
    if not live:
        return (0, -1)
    return min(c.lo for c in live), max(c.hi for c in live)


def _membership_claim(subject: str, C: ChainComplex, cls: ComplexClassId) -> Claim:
    m = member_class(C, cls)
    return Claim(subject, f"in {cls}", m.member, "exact", m.witness)


def _perp_claim(subject: str, C: ChainComplex, gens: Sequence[ChainComplex], label: str) -> Claim:
    k = perp_witness(C, gens)
    detail = None if k is None else f"Ext^1 against {gens[k]} is nonzero"
    return Claim(subject, f"Ext^1(G, -) = 0 for {len(gens)} {label} generators", k is None, "perp-window", detail)


def _left_perp_claim(subject: str, C: ChainComplex, gens: Sequence[ChainComplex], label: str) -> Claim:
    bad = None
    for G in gens:
        if not ext1_ch(C, G).is_zero():
            bad = G
            break
    detail = None if bad is None else f"Ext^1 into {bad} is nonzero"
    return Claim(subject, f"Ext^1(-, G) = 0 for {len(gens)} {label} generators", bad is None, "perp-window", detail)


def _exact_claim(subject: str, C: ChainComplex) -> Claim:
    return Claim(subject, "exact", is_exact(C), "exact")


def _ses(A, B, C, i, p) -> ShortExactSeqCh:
    return ShortExactSeqCh(A, B, C, i, p)


def _step(name: str, seq: ShortExactSeqCh) -> Step:
    return Step(name, seq, seq.is_valid())


def _require_zmod(ring: Ring) -> None:
    if ring.is_integers:
        raise ValueError("this pipeline needs coefficients Z/n")


# ---------------------------------------------------------------------------
# Precovers and preenvelopes


def special_precover_projective(C: ChainComplex) -> ApproxSequence:
    """0 -> V -> P -> C -> 0 with P a sum of disks on free modules."""
    seq = canonical_disk_cover(C, free=True)
    # V is orthogonal to the disks D^n(R); it need not be exact, so no sphere claim is made
    gens = disk_generators(C.ring, _window(C))
    a = ApproxSequence(seq, "EnoughProjectives", steps=[_step("disk cover on free modules", seq)])
    a.claims.append(_membership_claim("P", seq.B, DW_P))
    a.claims.append(_perp_claim("V", seq.A, gens, "D^n(R)"))
    return a


def injective_preenvelope(C: ChainComplex) -> ShortExactSeqCh:
    """0 -> C -> W -> L -> 0 with W = ⊕ D^{n+1}(J_n), J_n free over Z/n.

    C_n embeds in a free module via its canonical form: the generator of order d
    goes to (n/d) times a basis vector.
    """
    ring = C.ring
    _require_zmod(ring)
    N = ring.modulus
    if C.hi < C.lo:
        return _ses(C, C, C, ChainMap.identity(C), ChainMap.identity(C))
    eps, J = {}, {}
    for n in C.degrees():
        can = C.module(n).canon
        J[n] = FpModule.free(ring, len(can.orders))
        eps[n] = Mat.diag([N // d for d in can.orders]) @ can.to_canon
    def Jm(n):
        return J.get(n, FpModule.free(ring, 0))

    def E(n):
        return eps.get(n, Mat.zeros(0, C.module(n).ngens))

    lo, hi = C.lo, C.hi + 1
    mods = [direct_sum([Jm(n), Jm(n - 1)], ring)[0] for n in range(lo, hi + 1)]
    mats = []
    for n in range(lo + 1, hi + 1):
        a, b = Jm(n).ngens, Jm(n - 1).ngens
        a1, b1 = Jm(n - 1).ngens, Jm(n - 2).ngens
        mats.append(block_matrix([[Mat.zeros(a1, a), Mat.identity(b)], [Mat.zeros(b1, a), Mat.zeros(b1, b)]]))
    W = ChainComplex.build(ring, lo, mods, mats)
    iota = {n: E(n).vstack(E(n - 1) @ C.d(n).matrix) for n in C.degrees()}
    i = ChainMap.from_matrices(C, W, iota)
    L, q, _ = cokernel_complex(i)
    return _ses(C, W, L, i, q)


# ---------------------------------------------------------------------------
# Transfer pipelines


def thm39_forward(C: ChainComplex) -> ApproxSequence:
    """Build 0 -> Y -> U' -> C -> 0 with U' exact and degreewise projective.

    1. 0 -> V -> U -> C -> 0, a disk cover on free modules.
    2. 0 -> I -> E -> U -> 0, the canonical disk cover of U (E exact).
    3. X = pullback of V -> U <- E, giving 0 -> X -> E -> C -> 0.
    4. 0 -> V' -> U' -> E -> 0 precovers E; Y = pullback of X -> E <- U'
       gives 0 -> Y -> U' -> C -> 0.
    """
    _require_zmod(C.ring)
    s1 = canonical_disk_cover(C, free=True)
    V, U, v_inc, u_pi = s1.A, s1.B, s1.i, s1.p
    s2 = canonical_disk_cover(U)
    E, e_pi = s2.B, s2.p
    X, x_to_v, x_to_e = pullback(v_inc, e_pi)
    e_to_c = u_pi @ e_pi
    s3 = _ses(X, E, C, x_to_e, e_to_c)
    s4a = canonical_disk_cover(E, free=True)
    Vp, Up, up_pi = s4a.A, s4a.B, s4a.p
    Y, y_to_x, y_to_up = pullback(x_to_e, up_pi)
    s4 = _ses(Y, Up, C, y_to_up, e_to_c @ up_pi)

    a = ApproxSequence(s4, "EnoughProjectives")
    a.steps = [
        _step("disk cover of C on free modules", s1),
        _step("canonical disk cover of U", s2),
        _step("pullback along V -> U", s3),
        _step("precover of E and second pullback", s4),
    ]
    w = _window(C, Up)
    a.claims += [
        _exact_claim("E", E),
        _membership_claim("U'", Up, EX_P),
        _exact_claim("V'", Vp),
        _perp_claim("Y", Y, disk_generators(C.ring, w), "D^n(R)"),
    ]
    return a


def thm39_backward(C: ChainComplex) -> ApproxSequence:
    """Start from the forward output 0 -> H -> G -> C -> 0 and push out along
    an exact envelope of H.

    0 -> H -> E0 -> ΣH -> 0 is the cone envelope; E is its pullback along the
    projective cover Q -> ΣH, so 0 -> H -> E -> Q -> 0.  D is the pushout of
    G <- H -> E, giving 0 -> E -> D -> C -> 0.
    """
    _require_zmod(C.ring)
    fwd = thm39_forward(C)
    H, G, h_inc, g_pi = fwd.sequence.A, fwd.sequence.B, fwd.sequence.i, fwd.sequence.p
    E0, h_to_e0, SH, q = cone_envelope(H)
    Q, q_pi, _ = disk_sum(SH, free=True)
    E, e_to_e0, e_to_q = pullback(q, q_pi)
    # H -> E induced by (h_to_e0, 0)
    h_to_e = _lift_into_pullback(h_to_e0, ChainMap.zero(H, Q), E, e_to_e0, e_to_q)
    s1 = _ses(H, E, Q, h_to_e, e_to_q)
    po = pushout(h_inc, h_to_e)
    D = po.Q
    d_to_c = po.induced(g_pi, ChainMap.zero(E, C))
    s2 = _ses(E, D, C, po.jb, d_to_c)

    a = ApproxSequence(s2, "EnoughProjectives")
    a.steps = list(fwd.steps) + [
        _step("envelope of H pulled back to a projective cover", s1),
        _step("pushout along H -> E", s2),
    ]
    w = _window(C, D)
    a.claims += [
        _membership_claim("B", D, DW_P),
        _exact_claim("H'", E),
        _perp_claim("H'", E, dw_generators(C.ring, w), "sphere/disk on R"),
    ]
    return a


def thm311_forward(C: ChainComplex) -> ApproxSequence:
    """Dual pipeline: 0 -> C -> W' -> Y -> 0 with W' exact and degreewise injective.

    1. 0 -> C -> W -> L -> 0, an injective preenvelope by disks.
    2. 0 -> W -> E -> L2 -> 0, the cone envelope of W (E exact).
    3. X = pushout of L <- W -> E, giving 0 -> C -> E -> X -> 0.
    4. 0 -> E -> W' -> L' -> 0 preenvelopes E; Y = pushout of X <- E -> W'
       gives 0 -> C -> W' -> Y -> 0.
    """
    _require_zmod(C.ring)
    s1 = injective_preenvelope(C)
    W, L, c_inc, w_q = s1.B, s1.C, s1.i, s1.p
    E, w_to_e, L2, e_q = cone_envelope(W)
    s2 = _ses(W, E, L2, w_to_e, e_q)
    poX = pushout(w_q, w_to_e)
    X = poX.Q
    c_to_e = w_to_e @ c_inc
    s3 = _ses(C, E, X, c_to_e, poX.jb)
    s4a = injective_preenvelope(E)
    Wp, e_to_wp = s4a.B, s4a.i
    poY = pushout(poX.jb, e_to_wp)
    Y = poY.Q
    s4 = _ses(C, Wp, Y, e_to_wp @ c_to_e, poY.jb)

    a = ApproxSequence(s4, "EnoughInjectives")
    a.steps = [
        _step("injective preenvelope of C", s1),
        _step("cone envelope of W", s2),
        _step("pushout along W -> L", s3),
        _step("preenvelope of E and second pushout", s4),
    ]
    w = _window(C, Wp)
    a.claims += [
        _exact_claim("E", E),
        _membership_claim("W'", Wp, EX_I),
        _left_perp_claim("Y", Y, disk_generators(C.ring, w), "D^n(R)"),
    ]
    return a


def _lift_into_pullback(u: ChainMap, v: ChainMap, P: ChainComplex, pa: ChainMap, pb: ChainMap) -> ChainMap:
    """The map T -> P with components u, v into a pullback with projections pa, pb."""
    T = u.source
    mats = {}
    for n in P.degrees():
        A = pa(n).matrix.vstack(pb(n).matrix)
        target = u(n).matrix.vstack(v(n).matrix)
        S = _sum_module(pa.target.module(n), pb.target.module(n))
        solver = ModuleSolver(S, A)
        cols = []
        for col in target.columns():
            c = solver.solve(col)
            if c is None:
                raise AssertionError("map does not factor through the pullback")
            cols.append(c)
        mats[n] = Mat.from_cols(cols, P.module(n).ngens)
    return ChainMap.from_matrices(T, P, mats)


def _sum_module(A: FpModule, B: FpModule) -> FpModule:
    return direct_sum([A, B], A.ring)[0]


# ---------------------------------------------------------------------------
# Isomorphism of complexes


def complexes_isomorphic(A: ChainComplex, B: ChainComplex, limit: int = 4096) -> bool | None:
    """Decide A ≅ B by searching the group of chain maps; None when it is too large."""
    if A.ring != B.ring:
        return False
    lo, hi = _window(A, B)
    for n in range(lo, hi + 1):
        if A.module(n).invariant_factors() != B.module(n).invariant_factors():
            return False
    G = chain_map_group(A, B)
    orders = G.module.canon.orders
    if any(d == 0 for d in orders):
        return None
    total = 1
    for d in orders:
        total *= d
    if total > limit:
        return None
    F = G.module.canon.from_canon
    for c in itertools.product(*(range(d) for d in orders)):
        f = G.element(F.apply(c))
        if f.is_iso():
            return True
    return False


# ---------------------------------------------------------------------------
# Eklof-Trlifaj


@dataclass
class Filtration:
    terms: list[ChainComplex]        # X_0 = 0, X_1, ..., X_m
    inclusions: list[ChainMap]       # X_j -> X_{j+1}
    quotient_idx: list[int]          # which generator each step adds
    target: ChainComplex


@dataclass
class ETStep:
    Y: ChainComplex
    embedding: ChainMap
    idx: int
    sequence: ShortExactSeqCh


@dataclass
class ETResult:
    final: ChainComplex
    filtration: Filtration
    status: str  # "Complete", "MaxSteps" or "Stalled"
    steps: int
    log: list[str]


def et_step(Y: ChainComplex, S: Sequence[ChainComplex], monotone: bool = True, notes: list[str] | None = None) -> ETStep | None:
    """Extend Y by the first generator s with Ext^1(s, Y) != 0.

    With ``monotone`` a candidate extension Y' is accepted only when
    |Ext^1(s, Y')| < |Ext^1(s, Y)|; other classes and generators are tried in
    order.  Returns None when Y is in the perp of S.  Raises StopIteration
    when obstructions exist but every candidate was rejected.
    """
    notes = notes if notes is not None else []
    obstructed = False
    for k, s in enumerate(S):
        G = ext1_ch(s, Y)
        if G.is_zero():
            continue
        obstructed = True
        before = G.order()
        for c in G.generators():
            seq = G.decode(c)
            if monotone:
                after = ext1_ch(s, seq.B).order()
                if before is not None and after is not None and not after < before:
                    notes.append(f"rejected generator {k} class {c}: |Ext| {before} -> {after}")
                    log.info(notes[-1])
                    continue
            return ETStep(seq.B, seq.i, k, seq)
    if obstructed:
        raise StopIteration("every candidate extension was rejected")
    return None


def et_run(Y: ChainComplex, S: Sequence[ChainComplex], max_steps: int = 20, monotone: bool = True) -> ETResult:
    """Iterate et_step, recording the filtration of final / Y by members of S."""
    notes: list[str] = []
    cur = Y
    embs = [ChainMap.identity(Y)]   # Y -> Y^j
    steps: list[ChainMap] = []      # Y^j -> Y^{j+1}
    idxs: list[int] = []
    status = "Complete"
    while True:
        try:
            st = et_step(cur, S, monotone, notes)
        except StopIteration:
            status = "Stalled"
            break
        if st is None:
            break
        if len(idxs) == max_steps:
            status = "MaxSteps"
            break
        idxs.append(st.idx)
        steps.append(st.embedding)
        embs.append(st.embedding @ embs[-1])
        cur = st.Y
        notes.append(f"step {len(idxs)}: added generator {st.idx}")
    return ETResult(cur, _filtration(embs, steps, idxs), status, len(idxs), notes)


def _filtration(embs: list[ChainMap], steps: list[ChainMap], idxs: list[int]) -> Filtration:
    """X_j = Y^j / Y with the inclusions induced by the step embeddings."""
    quots = [cokernel_complex(e) for e in embs]
    terms = [q[0] for q in quots]
    incs = []
    for j, st in enumerate(steps):
        Qj, _, lift = quots[j]
        _, proj, _ = quots[j + 1]
        mats = {n: proj(n).matrix @ st(n).matrix @ lift[n] for n in Qj.degrees()}
        incs.append(ChainMap.from_matrices(Qj, terms[j + 1], mats))
    return Filtration(terms, incs, list(idxs), terms[-1])


def validate_filtration(f: Filtration, S: Sequence[ChainComplex]) -> bool:
    """Finite-length S-filtration conditions: X_0 = 0, monomorphic inclusions,
    consecutive quotients isomorphic to members of S, last term = target."""
    if not f.terms or not f.terms[0].is_zero():
        return False
    if len(f.inclusions) != len(f.terms) - 1:
        return False
    for j, inc in enumerate(f.inclusions):
        if not inc.is_valid() or not inc.is_mono():
            return False
        Q, _, _ = cokernel_complex(inc)
        cands = [f.quotient_idx[j]] if j < len(f.quotient_idx) else range(len(S))
        if not any(complexes_isomorphic(Q, S[k]) for k in cands):
            return False
    return complexes_isomorphic(f.terms[-1], f.target) is not False
