"""Hypothesis strategies that draw seeded objects from the library samplers."""

from __future__ import annotations

import random

from hypothesis import strategies as st

from cotorsion.complexes import random_complex, random_exact_complex
from cotorsion.linalg import ZZ, Zmod
from cotorsion.modules import random_module

finite_rings = st.sampled_from([Zmod(2), Zmod(4), Zmod(6), Zmod(8), Zmod(9)])
rings = st.one_of(st.just(ZZ), finite_rings)
seeds = st.integers(0, 2**32 - 1)


@st.composite
def modules(draw, ring_strategy=rings, max_gens=3):
    ring = draw(ring_strategy)
    return random_module(ring, random.Random(draw(seeds)), max_gens)


@st.composite
def windows(draw, max_width=3):
    lo = draw(st.integers(-2, 2))
    return lo, lo + draw(st.integers(0, max_width - 1))


@st.composite
def complexes(draw, ring_strategy=rings, max_width=3, max_gens=2):
    return random_complex(draw(ring_strategy), draw(windows(max_width)), max_gens, draw(seeds))


@st.composite
def exact_complexes(draw, ring_strategy=finite_rings, max_width=4, max_gens=2):
    return random_exact_complex(draw(ring_strategy), draw(windows(max_width)), max_gens, draw(seeds))
