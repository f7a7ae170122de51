from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from cotorsion.complexes import (
    ChainComplex,
    ChainMap,
    ComplexError,
    Homotopy,
    HomComplex,
    canonical_disk_cover,
    chain_map_group,
    cone_envelope,
    cycles,
    direct_sum_complex,
    disk,
    find_null_homotopy,
    homology,
    hom_complex,
    is_exact,
    is_null_homotopic,
    kernel_complex,
    prune_complex,
    pullback,
    pushout,
    random_complex,
    random_contractible_projective,
    random_exact_complex,
    sphere,
    suspension,
    validate_complex,
)
from cotorsion.ext import splits
from cotorsion.linalg import Mat, ZZ, Zmod
from cotorsion.modules import FpModule, ModuleHom, hom_module, isomorphic, kernel_of_hom, random_hom

import oracles
from strategies import complexes, exact_complexes, finite_rings, seeds

Z4 = Zmod(4)


def H(C, n):
    return str(homology(C, n).invariant_factors())


# -- spheres, disks, suspension ------------------------------------------------


def test_sphere_examples():
    C = sphere(0, FpModule.cyclic(ZZ, 2))
    assert H(C, 0) == "Z/2"
    assert sphere(3, FpModule.zero(ZZ)).is_zero()
    assert not is_exact(sphere(1, FpModule.free(ZZ, 1)))


def test_disk_examples():
    D = disk(1, FpModule.cyclic(ZZ, 2))
    assert all(homology(D, k).is_zero() for k in range(-2, 4))
    assert disk(4, FpModule.zero(ZZ)).is_zero()
    D2 = disk(2, FpModule.free(Z4, 1))
    assert is_exact(D2)


def test_direct_sum_of_disks_is_exact():
    S, _, _ = direct_sum_complex([disk(1, FpModule.cyclic(Z4, 2)), disk(2, FpModule.free(Z4, 2))])
    assert is_exact(S)


def test_suspension_examples():
    M = FpModule.cyclic(Z4, 2)
    assert suspension(sphere(0, M)) == sphere(1, M)
    C = random_complex(Z4, (0, 2), 2, 7)
    assert suspension(suspension(C, 1), -1) == C
    assert suspension(C, 2).d(3).matrix == C.d(1).matrix


@settings(max_examples=60, deadline=None)
@given(complexes(), st.integers(-2, 2))
def test_suspension_shifts_homology(C, k):
    S = suspension(C, k)
    for n in range(C.lo - 1, C.hi + 2):
        assert homology(S, n + k).invariant_factors() == homology(C, n).invariant_factors()


def test_homology_of_multiplication_by_two():
    R = FpModule.free(ZZ, 1)
    C = ChainComplex.build(ZZ, 0, [R, R], [Mat.from_rows([[2]])])
    assert H(C, 0) == "Z/2"
    assert H(C, 1) == "0"


@settings(max_examples=60, deadline=None)
@given(complexes(finite_rings, max_width=3))
def test_homology_order_matches_enumeration(C):
    for n in C.degrees():
        assert homology(C, n).order() == oracles.homology_order(C, n)


# -- random generators ----------------------------------------------------------


def test_random_complex_is_deterministic():
    assert random_complex(Z4, (0, 3), 2, 11) == random_complex(Z4, (0, 3), 2, 11)
    assert random_complex(Z4, (1, 0), 2, 11).is_zero()


def test_random_complexes_validate():
    rings = [ZZ, Z4, Zmod(6), Zmod(9)]
    for s in range(1000):
        validate_complex(random_complex(rings[s % 4], (0, 2), 2, s))


@settings(max_examples=40, deadline=None)
@given(exact_complexes())
def test_random_exact_complex_is_exact(C):
    assert is_exact(C)


@settings(max_examples=30, deadline=None)
@given(finite_rings, seeds)
def test_random_contractible_projective(ring, seed):
    C = random_contractible_projective(ring, (0, 2), 2, seed)
    assert all(not C.module(n).canon.orders or set(C.module(n).canon.orders) == {ring.modulus} for n in C.degrees())
    assert is_null_homotopic(ChainMap.identity(C))


# -- serialization ----------------------------------------------------------------


def test_json_roundtrip():
    C = random_complex(Zmod(6), (-1, 2), 2, 3)
    assert ChainComplex.from_json(C.to_json()) == C


def test_bad_differential_is_reported_with_degree():
    obj = {"ring": {"kind": "Z"}, "lo": 0, "hi": 2,
           "modules": [{"generators": 1}] * 3, "differentials": [[[1]], [[1]]]}
    with pytest.raises(ComplexError) as e:
        ChainComplex.from_json(obj)
    assert e.value.degree == 2


def test_malformed_literals():
    with pytest.raises(ComplexError):
        ChainComplex.from_json({"ring": {"kind": "Z"}, "lo": 0, "hi": 1, "modules": [{"generators": 1}]})
    with pytest.raises(ComplexError):
        ChainComplex.from_json({"ring": {"kind": "Z"}, "lo": 0, "hi": 1,
                                "modules": [{"generators": 1}, {"generators": 2}], "differentials": [[[1]]]})
    # Z/2 -> Z is not a homomorphism
    with pytest.raises(ComplexError):
        ChainComplex.from_json({"ring": {"kind": "Z"}, "lo": 0, "hi": 1,
                                "modules": [{"generators": 1}, {"generators": 1, "relations": [[2]]}],
                                "differentials": [[[1]]]})


# -- Hom complex ------------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(complexes(max_width=3), complexes(max_width=3))
def test_hom_complex_squares_to_zero(X, Y):
    if X.ring != Y.ring:
        return
    Hc = HomComplex(X, Y)
    for n in range(Hc.lo, Hc.hi + 3):
        assert Hc.module(n - 2).is_zero_map_into(Hc.d(n - 1) @ Hc.d(n))


def test_hom_of_spheres():
    M, N = FpModule.cyclic(Z4, 2), FpModule.free(Z4, 1)
    Hc = hom_complex(sphere(0, M), sphere(0, N))
    assert isomorphic(Hc.module(0), hom_module(M, N).module)
    assert all(Hc.module(n).is_zero() for n in Hc.degrees() if n != 0)


def test_hom_sphere_degree_shift_over_Z():
    A = FpModule.cyclic(ZZ, 2)
    Hc = hom_complex(sphere(0, A), sphere(1, A))
    assert str(Hc.module(1)) == "Z/2"
    assert all(Hc.module(n).is_zero() for n in Hc.degrees() if n != 1)


@settings(max_examples=30, deadline=None)
@given(complexes(st.just(Z4), max_width=3))
def test_hom_out_of_free_disk_is_exact(Y):
    assert is_exact(hom_complex(disk(1, FpModule.free(Z4, 1)), Y))


@settings(max_examples=30, deadline=None)
@given(complexes(finite_rings, max_width=2), seeds)
def test_chain_map_group_elements_are_chain_maps(X, seed):
    Y = random_complex(X.ring, (X.lo, X.lo + 1), 2, seed)
    G = chain_map_group(X, Y)
    for f in G.generators():
        assert f.is_valid()


# -- homotopies -------------------------------------------------------------------


def test_null_homotopy_examples():
    M = FpModule.cyclic(Z4, 2)
    S = sphere(0, M)
    assert find_null_homotopy(ChainMap.zero(S, S)) is not None
    assert not is_null_homotopic(ChainMap.identity(S))
    D = disk(1, M)
    s = find_null_homotopy(ChainMap.identity(D))
    assert s is not None and s.boundary().equals(ChainMap.identity(D))


@settings(max_examples=30, deadline=None)
@given(complexes(finite_rings, max_width=3), seeds)
def test_boundaries_of_homotopies_are_null(X, seed):
    rng = random.Random(seed)
    Y = random_complex(X.ring, (X.lo, X.hi + 1), 2, rng.getrandbits(32))
    s = Homotopy(X, Y, {n: random_hom(X.module(n), Y.module(n + 1), rng) for n in X.degrees()})
    f = s.boundary()
    assert f.is_valid()
    assert is_null_homotopic(f)


# -- limits, covers, envelopes ---------------------------------------------------


def test_pullback_along_identity():
    C = random_complex(Z4, (0, 2), 2, 5)
    Y = random_complex(Z4, (0, 2), 2, 6)
    g = chain_map_group(Y, C).generators()
    g = g[0] if g else ChainMap.zero(Y, C)
    P, pa, pb = pullback(ChainMap.identity(C), g)
    assert pb.is_iso()


def test_pullback_from_zero_is_kernel():
    Y = random_complex(Z4, (0, 2), 2, 8)
    C = random_complex(Z4, (0, 2), 2, 9)
    gens = chain_map_group(Y, C).generators()
    g = gens[0] if gens else ChainMap.zero(Y, C)
    Z0 = ChainComplex.zero(Z4)
    P, _, pb = pullback(ChainMap.zero(Z0, C), g)
    K, _ = kernel_complex(g)
    for n in Y.degrees():
        assert isomorphic(P.module(n), K.module(n))


def test_pushout_square_commutes():
    C = random_complex(Z4, (0, 2), 2, 12)
    seq = canonical_disk_cover(C)
    po = pushout(seq.i, seq.i)
    assert (po.ja @ seq.i).equals(po.jb @ seq.i)


def test_disk_cover_of_sphere():
    M = FpModule.cyclic(Z4, 2)
    seq = canonical_disk_cover(sphere(0, M))
    seq.validate()
    assert (seq.B.lo, seq.B.hi) == (-1, 0) and is_exact(seq.B)
    K = seq.A.trimmed()
    assert (K.lo, K.hi) == (-1, -1) and isomorphic(K.module(-1), M)


def test_disk_cover_of_disk_splits():
    seq = canonical_disk_cover(disk(1, FpModule.cyclic(Z4, 2)))
    seq.validate()
    assert splits(seq)
    assert is_exact(seq.A)


def test_disk_cover_of_zero():
    seq = canonical_disk_cover(ChainComplex.zero(Z4))
    assert seq.B.is_zero()


@settings(max_examples=30, deadline=None)
@given(complexes(max_width=3), st.booleans())
def test_disk_cover_is_short_exact(C, free):
    seq = canonical_disk_cover(C, free)
    seq.validate()
    assert is_exact(seq.B)


@settings(max_examples=30, deadline=None)
@given(complexes(max_width=3))
def test_cone_envelope(C):
    E, iota, SH, q = cone_envelope(C)
    assert iota.is_valid() and q.is_valid()
    assert is_exact(E)
    assert iota.is_mono() and q.is_epi()


@settings(max_examples=30, deadline=None)
@given(complexes(max_width=3))
def test_prune_complex_is_iso(C):
    P, f, g = prune_complex(C)
    assert f.is_valid() and g.is_valid()
    assert (g @ f).equals(ChainMap.identity(C))


def test_cycles_of_disk():
    D = disk(1, FpModule.free(Z4, 1))
    Z1, _ = cycles(D, 1)
    Z0, _ = cycles(D, 0)
    assert Z1.is_zero() and str(Z0) == "Z/4"


def test_large_integers_roundtrip_as_strings():
    big = 2**70
    R = FpModule.free(ZZ, 1)
    C = ChainComplex.build(ZZ, 0, [R, FpModule.presented(ZZ, 1, [[big]])], [Mat.from_rows([[0]])])
    obj = C.to_json()
    assert obj["modules"][1]["relations"] == [[str(big)]]
    assert ChainComplex.from_json(obj) == C
    S = ChainComplex.build(ZZ, 0, [R, R], [Mat.from_rows([[big]])])
    assert S.to_json()["differentials"] == [[[str(big)]]]
    assert H(ChainComplex.from_json(S.to_json()), 0) == f"Z/{big}"
