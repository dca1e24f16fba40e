from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ampletheta.degeneration import (
    ApPoint,
    DegenerationModel,
    GenericityError,
    c_coefficient,
    chart_separation,
    fs_distance,
    glue_normalize,
    limit_consistency,
    phi_affine,
    phi_jet,
    phi_sections,
    tangent_family,
    theta_vector_family,
    translate_set_I,
)
from ampletheta.diagnostics import numerical_rank
from ampletheta.theta import e_of, vartheta, vartheta_table

TAU_G = 0.4 + 1.1j


def model(g: int, d: int = 5) -> DegenerationModel:
    dp = [0.21 + 0.38j, 0.13 + 0.59j, 0.47 + 0.44j][: g - 1]
    off = {1: [], 2: [], 3: [0.31 + 0.27j], 4: [0.31 + 0.27j, 0.12 + 0.33j, 0.05 + 0.41j]}[g]
    return DegenerationModel.from_offdiag(g, d, TAU_G, dp, off)


def random_point(m: DegenerationModel, rng, allow_inf=True) -> ApPoint:
    z = complex(rng.uniform(0, m.d) + rng.uniform(0, 1) * m.tau_g)
    ws = [math.inf if allow_inf and rng.uniform() < 0.3 else
          complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(m.g - 1)]
    return ApPoint.affine(z, ws)


# -------------------------------------------------------------- the model

def test_model_rejects_relation():
    # 2 a_1 = d vanishes on E
    with pytest.raises(GenericityError):
        DegenerationModel.from_offdiag(2, 4, TAU_G, [2.0 + 0j])


def test_model_rejects_bad_tau():
    with pytest.raises(ValueError):
        DegenerationModel.from_offdiag(2, 5, 0.3 - 1j, [0.2 + 0.3j])
    with pytest.raises(ValueError):
        DegenerationModel.from_offdiag(2, 5, TAU_G, [])


def test_nomes():
    m = model(3, 5)
    assert m.t_last[0] == pytest.approx(e_of((0.21 + 0.38j) / 5))
    assert m.t_prime[0, 1] == pytest.approx(e_of(0.31 + 0.27j))


# --------------------------------------------------------- c coefficients

def test_c_coefficient_examples():
    assert c_coefficient([0], model(2)) == 1
    assert c_coefficient([1], model(2)) == 1
    m3 = model(3)
    assert c_coefficient([1, 1], m3) == pytest.approx(m3.t_prime[0, 1])
    assert c_coefficient([1, 0], m3) == 1
    m4 = model(4)
    t = m4.t_prime
    assert c_coefficient([1, 1, 1], m4) == pytest.approx(t[0, 1] * t[0, 2] * t[1, 2])


def test_c_coefficient_rejects_outside_s():
    with pytest.raises(ValueError):
        c_coefficient([2, 0], model(3))
    with pytest.raises(ValueError):
        c_coefficient([1], model(3))


# ----------------------------------------------------------------- points

def test_point_validation_and_stratum():
    with pytest.raises(ValueError):
        ApPoint(0.1, [[0, 0]])
    p = ApPoint.affine(0.3, [0, math.inf, 0.5])
    assert p.stratum == 2 and p.zeros == (0,) and p.infinite == (1,)
    assert p.order == (0, 1, 2)


def test_glue_identity_on_reduced_point():
    m = model(3)
    p = ApPoint.affine(0.7 + 0.2j, [0.3, -0.5j])
    assert glue_normalize(m, p) is p


def test_glue_g2_infinity():
    m = model(2)
    z = 0.7 + 0.2j
    q = glue_normalize(m, ApPoint.affine(z, [math.inf]))
    red, _, n_tau = m.reduce(z + m.tau_dprime[0])
    assert q.z == pytest.approx(complex(red))
    assert q.zeros == (0,) and int(n_tau) == 0


@pytest.mark.parametrize("g", [2, 3])
def test_glue_idempotent_and_projective(g):
    m = model(g)
    rng = np.random.default_rng(g)
    for _ in range(40):
        p = random_point(m, rng)
        q = glue_normalize(m, p)
        assert not q.infinite
        assert glue_normalize(m, q) is q
        assert fs_distance(phi_sections(m, p).values, phi_sections(m, q).values) < 1e-9


def test_chart_separation_zero_for_glued_pair():
    m = model(3)
    p = ApPoint.affine(0.4 + 0.3j, [math.inf, 0.2])
    assert chart_separation(m, p, glue_normalize(m, p)) < 1e-12


# --------------------------------------------------------------- sections

def test_phi_g1_is_vartheta():
    m = model(1, 4)
    z = 0.3 + 0.4j
    vals = phi_sections(m, ApPoint(z, np.zeros((0, 2)))).values
    for k in range(4):
        assert vals[k] == pytest.approx(vartheta(TAU_G, z, k, 4).value, abs=1e-12)


def test_phi_g2_formula():
    m = model(2)
    z, w = 0.3 + 0.4j, 0.6 - 0.2j
    got = phi_affine(m, z, [w])
    for k in range(5):
        want = vartheta(TAU_G, z, k, 5).value + vartheta(TAU_G, z + m.tau_dprime[0], k, 5).value * w
        assert got[k] == pytest.approx(want, abs=1e-11)
    assert np.allclose(phi_affine(m, z, [0]), vartheta_table(TAU_G, [z], 5)[0][0], atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(0, 1), st.integers(0, 1))
def test_phi_multilinear(a, b, c, s, slot):
    m = model(3)
    z = 0.8 + 0.3j
    w = [complex(a, b), complex(c, -a)]
    lo, hi = list(w), list(w)
    lo[slot], hi[slot] = 0.0, 1.0
    mid = list(w)
    mid[slot] = s
    f0, f1, fs = (phi_affine(m, z, x) for x in (lo, hi, mid))
    assert np.allclose(fs, (1 - s) * f0 + s * f1, atol=1e-11)


def test_phi_jet_matches_finite_differences():
    m = model(3)
    z = 1.3 + 0.4j
    pairs = np.array([[[0.3 + 0.1j, 1], [-0.4j, 0.8]]])
    jet = phi_jet(m, [z], pairs)
    h = 1e-6

    def f(zz, pr):
        return phi_affine(m, zz, pr[:, 0] / pr[:, 1]) * np.prod(pr[:, 1])

    dz = (f(z + h, pairs[0]) - f(z - h, pairs[0])) / (2 * h)
    assert np.allclose(jet.dz[0], dz, atol=1e-7)
    for i in range(2):
        for j, arr in ((0, jet.du), (1, jet.dv)):
            up, dn = pairs[0].copy(), pairs[0].copy()
            up[i, j] += h
            dn[i, j] -= h
            assert np.allclose(arr[0, i], (f(z, up) - f(z, dn)) / (2 * h), atol=1e-7)


def test_sections_quasi_periodic_in_d():
    # z_g -> z_g + d leaves every vartheta_k fixed
    m = model(2)
    p = ApPoint.affine(0.3 + 0.2j, [0.4])
    q = ApPoint.affine(0.3 + 0.2j + 5, [0.4])
    assert np.allclose(phi_sections(m, p).values, phi_sections(m, q).values, atol=1e-11)


# ------------------------------------------------------------ translates

def test_translate_set_sizes():
    assert len(translate_set_I(model(1), 0.2)) == 1
    pts = translate_set_I(model(2), 0.2)
    assert len(pts) == 2 and model(2).e_distance(pts[0], pts[1]) > 1e-3
    m3 = model(3)
    pts = translate_set_I(m3, 0.2 + 0.1j)
    assert len(pts) == 4
    assert min(m3.e_distance(pts[i], pts[j]) for i in range(4) for j in range(i + 1, 4)) > 1e-3


def test_translate_set_detects_coincidence():
    m = DegenerationModel.from_offdiag(2, 5, TAU_G, [1e-5 + 0j], n_rel=1)
    with pytest.raises(GenericityError):
        translate_set_I(m, 0.1)


# -------------------------------------------------------- tangent vectors

def test_tangent_family_first_rows():
    m = model(2)
    z, v = 0.9 + 0.3j, 0.5 - 0.1j
    rows = tangent_family(m, ApPoint.affine(z, [v]))
    assert rows.shape == (3, 5)
    assert np.allclose(rows[0], phi_affine(m, z, [v]), atol=1e-11)
    dv = vartheta_table(TAU_G, [z, z + m.tau_dprime[0]], 5, deriv=True)[0]
    assert np.allclose(rows[1], dv[0] + v * dv[1], atol=1e-10)
    assert np.allclose(rows[2], v * vartheta_table(TAU_G, [z + m.tau_dprime[0]], 5)[0][0],
                       atol=1e-11)


@pytest.mark.parametrize("g,h", [(2, 1), (3, 0), (3, 1), (3, 2)])
def test_tangent_family_shape(g, h):
    m = model(g, 9)
    ws = [0.0] * h + [0.3 + 0.2j] * (g - 1 - h)
    assert tangent_family(m, ApPoint.affine(0.5 + 0.5j, ws)).shape == (g + h + 1, 9)


def test_theta_vector_family_g1():
    m = model(1, 3)
    rows = theta_vector_family(m, 0.2 + 0.1j, 0)
    assert rows.shape == (2, 3)
    with pytest.raises(ValueError):
        theta_vector_family(m, 0.2, 1)


def test_theta_vector_family_warns_when_too_many_rows():
    with pytest.warns(UserWarning):
        theta_vector_family(model(3, 5), 0.2, 0)


# ------------------------------------------------------------------ limit

@pytest.mark.parametrize("g", [2, 3])
def test_limit_deviation_decreases(g):
    m = model(g)
    coarse = limit_consistency(m, 1e-2, samples=4, rng=np.random.default_rng(0))
    fine = limit_consistency(m, 1e-4, samples=4, rng=np.random.default_rng(0))
    assert fine < coarse


def test_limit_rejects_scale():
    with pytest.raises(ValueError):
        limit_consistency(model(2), 1.5)


# ------------------------------------------------------------ fs distance

cvec = st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), min_size=3, max_size=3).map(
    lambda xs: np.array([complex(a, b) for a, b in xs]))


@given(cvec, cvec, st.floats(0.1, 10), st.floats(0, 6.28))
def test_fs_distance_properties(u, v, r, phase):
    if np.linalg.norm(u) < 1e-3 or np.linalg.norm(v) < 1e-3:
        return
    d = fs_distance(u, v)
    assert 0 <= d <= 1 + 1e-12
    assert d == pytest.approx(fs_distance(v, u), abs=1e-12)
    assert fs_distance(u, r * np.exp(1j * phase) * u) < 1e-7
    assert fs_distance(r * u, v) == pytest.approx(d, abs=1e-12)


def test_fs_distance_examples():
    assert fs_distance([1, 0], [0, 1]) == pytest.approx(1.0)
    assert fs_distance([1, 0], [1, 1]) == pytest.approx(math.sqrt(0.5))
    with pytest.raises(ValueError):
        fs_distance([0, 0], [1, 0])


@pytest.mark.parametrize("seed", range(4))
def test_tangent_family_spans_both_branch_jets(seed):
    # at a stratum-1 point the tangent family spans the same space as the
    # values and first derivatives on the two branches meeting there
    m = model(3, 9)
    rng = np.random.default_rng(seed)
    z = complex(rng.uniform(0, 9) + rng.uniform(0, 1) * m.tau_g)
    v = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
    p = ApPoint.affine(z, [0.0, v])
    q = ApPoint.affine(z - m.tau_dprime[0], [math.inf, v / m.t_prime[0, 1]])
    ja = phi_jet(m, [p.z], p.w[None])
    jb = phi_jet(m, [q.z], q.w[None])
    jets = np.array([ja.values[0], ja.dz[0], ja.du[0, 0], ja.du[0, 1],
                     jb.values[0], jb.dz[0], jb.dv[0, 0], jb.du[0, 1]])
    tf = tangent_family(m, p)
    r_tf = numerical_rank(tf, 1e-13).rank
    assert r_tf == 5
    assert numerical_rank(jets, 1e-13).rank == 5
    assert numerical_rank(np.vstack([tf, jets]), 1e-13).rank == 5
