from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ampletheta.degeneration import ApPoint, DegenerationModel, fs_distance, phi_sections
from ampletheta.diagnostics import (
    base_locus_search,
    degree_divisibility_scan,
    elliptic_independence_check,
    immersion_check,
    injectivity_search,
    numerical_rank,
    product_construction_check,
    product_residual,
    random_e_points,
)
from ampletheta.report import FAIL, INCONCLUSIVE, INFO, PASS

TAU_G = 0.4 + 1.1j


def model(g: int, d: int) -> DegenerationModel:
    dp = [0.21 + 0.38j, 0.13 + 0.59j][: g - 1]
    off = [0.31 + 0.27j] if g == 3 else []
    return DegenerationModel.from_offdiag(g, d, TAU_G, dp, off)


# ------------------------------------------------------------------- rank

def test_rank_examples():
    assert numerical_rank(np.eye(3)).rank == 3
    assert numerical_rank([[1, 2], [2, 4]]).rank == 1
    assert numerical_rank(np.zeros((2, 3))).rank == 0
    assert numerical_rank([[1, 0], [1, 1e-12]]).rank == 1
    # rows are normalized, so a small row still counts
    assert numerical_rank([[1, 0], [0, 1e-12]]).rank == 2
    assert numerical_rank(np.eye(2)).smallest_ratio == 1.0


def test_rank_rejects_bad_input():
    with pytest.raises(ValueError):
        numerical_rank([[np.nan, 1]])
    with pytest.raises(ValueError):
        numerical_rank(np.eye(2), tol_rel=0)


mats = st.integers(1, 5).flatmap(lambda r: st.integers(1, 5).flatmap(
    lambda c: st.lists(st.floats(-10, 10, allow_subnormal=False), min_size=r * c, max_size=r * c).map(
        lambda xs: np.array(xs).reshape(r, c))))


@settings(max_examples=60, deadline=None)
@given(mats, st.floats(1e-3, 1e3), st.data())
def test_rank_row_scaling_invariant(m, s, data):
    i = data.draw(st.integers(0, m.shape[0] - 1))
    scaled = m.copy()
    scaled[i] *= s
    assert numerical_rank(scaled).rank == numerical_rank(m).rank


@settings(max_examples=60, deadline=None)
@given(mats, st.data())
def test_rank_monotone_under_appending(m, data):
    row = np.array(data.draw(st.lists(st.floats(-10, 10), min_size=m.shape[1],
                                      max_size=m.shape[1])))
    assert numerical_rank(np.vstack([m, row])).rank >= numerical_rank(m).rank


# ---------------------------------------------------------- independence

def test_independence_example_points():
    m = model(1, 5)
    r = elliptic_independence_check(m, [0, 0.7, 1.9, 3.1])
    assert r.rank == 4 and r.full


def test_independence_random_subsets_d5():
    m = model(1, 5)
    rng = np.random.default_rng(0)
    for _ in range(20):
        r = elliptic_independence_check(m, random_e_points(m, 4, rng))
        assert r.full and r.smallest_ratio > 1e-7


def test_independence_rejects_close_points():
    with pytest.raises(ValueError):
        elliptic_independence_check(model(1, 5), [0.2, 0.2 + 1e-5])


def test_d_points_are_dependent():
    # d sections restricted to d + 1 points can span at most d dimensions
    m = model(1, 3)
    r = elliptic_independence_check(m, [0.1, 0.9, 1.6, 2.3])
    assert r.rank <= 3


# --------------------------------------------------------------- base locus

def test_bpf_g1_d1_hits_zero():
    m = model(1, 1)
    r = base_locus_search(m, samples=256, refine_starts=2, iterations=200,
                          rng=np.random.default_rng(0))
    assert r.verdict == INFO and r.minimum < 1e-6


def test_bpf_g2_d2_is_informational():
    r = base_locus_search(model(2, 2), samples=128, refine_starts=2, iterations=100,
                          rng=np.random.default_rng(0))
    assert r.verdict == INFO


def test_bpf_g2_d3_passes():
    r = base_locus_search(model(2, 3), samples=256, refine_starts=2, iterations=200,
                          rng=np.random.default_rng(1))
    assert r.verdict == PASS and r.minimum > 1e-6
    assert set(r.per_stratum) == {0, 1}


# ------------------------------------------------------------------ product

def test_product_residual_vanishes_at_half_periods():
    # for d = 2, vartheta_0(tau, .) vanishes at 1/2 + tau/2 and vartheta_1(tau, .)
    # at 1/2, so (1/2 + tau_1/2, 1/2) kills both products
    tau1, tau2 = 0.3 + 1.0j, -0.2 + 0.9j
    zs = np.array([[0.5 + tau1 / 2, 0.5], [0.1, 0.2 + 0.1j]])
    vals = product_residual([tau1, tau2], 2, zs)
    assert vals[0] < 1e-12 and vals[1] > 1e-3


def test_product_g2_d2_finds_zero():
    r = product_construction_check(2, 2, [0.3 + 1.0j, -0.2 + 0.9j], samples=512,
                                   refine_starts=4, iterations=600,
                                   rng=np.random.default_rng(0))
    assert r.expected_zero and r.verdict == PASS and r.minimum < 1e-8
    assert product_residual([0.3 + 1.0j, -0.2 + 0.9j], 2, [r.witness])[0] < 1e-8


def test_product_g2_d3_no_zero():
    r = product_construction_check(2, 3, [0.3 + 1.0j, -0.2 + 0.9j], samples=512,
                                   refine_starts=2, iterations=300,
                                   rng=np.random.default_rng(0))
    assert not r.expected_zero and r.verdict == PASS and r.minimum > 1e-6


def test_product_rejects_bad_input():
    with pytest.raises(ValueError):
        product_construction_check(2, 2, [1j])
    with pytest.raises(ValueError):
        product_construction_check(1, 2, [-1j])


# --------------------------------------------------------------- injectivity

def test_injectivity_smoke_g2_d5():
    r = injectivity_search(model(2, 5), restarts=300, iterations=20,
                           rng=np.random.default_rng(0), structured=50)
    assert r.verdict in (PASS, FAIL, INCONCLUSIVE)
    assert r.coverage["restarts"] == 300
    assert r.verdict == PASS and not r.witnesses


def test_injectivity_witnesses_are_verified():
    r = injectivity_search(model(3, 8), restarts=200, iterations=20,
                           rng=np.random.default_rng(2), structured=50)
    assert r.coverage["restarts"] == 200
    for w in r.witnesses:
        assert w.refined_fs_distance < 1e-8 and w.separation > 1e-3
        assert fs_distance(phi_sections(model(3, 8), w.p).values,
                           phi_sections(model(3, 8), w.q).values) < 1e-7


# ----------------------------------------------------------------- immersion

def test_immersion_g2_d5():
    r = immersion_check(model(2, 5), points_per_stratum=10, rng=np.random.default_rng(0))
    assert r.claimed and r.verdict == PASS
    assert {h: set(v) for h, v in r.ranks.items()} == {0: {3}, 1: {4}}


def test_immersion_informational_at_boundary():
    r = immersion_check(model(2, 4), points_per_stratum=4, rng=np.random.default_rng(0))
    assert r.verdict == INFO


def test_immersion_rejects_non_morphism():
    with pytest.raises(ValueError):
        immersion_check(model(2, 2))


# -------------------------------------------------------------- divisibility

def _oracle(g_max):
    out = []
    for g in range(1, g_max + 1):
        fact = Fraction(math.prod(range(1, g + 1)))
        for d in range(g + 1, 2 * g + 2):
            binom = Fraction(math.prod(range(d - g, d + 1)), math.prod(range(1, g + 2)))
            if (binom / fact).denominator == 1:
                out.append((g, d))
    return out


def test_divisibility_examples():
    assert degree_divisibility_scan(6) == [(1, 2), (1, 3), (2, 4), (2, 5)]
    assert (2, 3) not in degree_divisibility_scan(2)


@pytest.mark.parametrize("g_max", range(1, 11))
def test_divisibility_matches_oracle(g_max):
    assert degree_divisibility_scan(g_max) == _oracle(g_max)


def test_divisibility_rejects_zero():
    with pytest.raises(ValueError):
        degree_divisibility_scan(0)


def test_point_helper_roundtrip():
    p = ApPoint.affine(0.1, [0.2])
    assert p.stratum == 0
