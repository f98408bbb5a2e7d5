import json

import numpy as np
import pytest

from weyl_lab import hmg as H
from weyl_lab import projection as P
from weyl_lab import quat as Q
from weyl_lab.gridsets import GridSet
from weyl_lab.numerics import TruncationConfig, gauss_grid_4d

TWO_PI = 2 * np.pi
CFG = TruncationConfig()
A_HMG = GridSet.box(2, 0.4, (-1, -1), (1, 2))  # m(A) = 0.96
A_QUAT = GridSet.box(4, 0.25, (-1, -1, 0, 0), (1, 1, 1, 1))  # m(A) = 4 / 256


@pytest.fixture(scope="module")
def hmg_pair():
    return P.ProjectionPair("hmg", A_HMG, 3, CFG)


@pytest.fixture(scope="module")
def quat_pair():
    return P.ProjectionPair("quat", A_QUAT, 3, CFG)


def test_pair_validation():
    with pytest.raises(ValueError):
        P.ProjectionPair("other", A_HMG, 1)
    with pytest.raises(ValueError):
        P.ProjectionPair("hmg", A_QUAT, 1)
    with pytest.raises(ValueError):
        P.ProjectionPair("quat", A_QUAT, -1)


@pytest.mark.parametrize("backend", ["hmg", "quat"])
def test_model_projectors(backend, hmg_pair, quat_pair):
    pair = hmg_pair if backend == "hmg" else quat_pair
    m = pair.model()
    for X in (m.E, m.F):
        np.testing.assert_allclose(X @ X, X, atol=1e-10)
        np.testing.assert_allclose(X, X.conj().T, atol=1e-12)
    assert np.trace(m.F).real == pytest.approx(pair.N * m.cols, rel=1e-10)


@pytest.mark.parametrize("N", [1, 3])
def test_hs_identity_hmg(N):
    pair = P.ProjectionPair("hmg", A_HMG, N, CFG)
    hs = P.hs_norm_EAFN(pair)
    expected = 0.96 * N / TWO_PI
    assert hs.predicted_linear == pytest.approx(expected, rel=1e-12)
    assert hs.frobenius_path == pytest.approx(expected, rel=1e-6)
    assert hs.kernel_path == pytest.approx(expected, rel=1e-6)
    assert hs.agreement < 1e-6


def test_hs_identity_quat(quat_pair):
    hs = P.hs_norm_EAFN(quat_pair)
    expected = (4 / np.pi**2) * (4 / 256) * 3
    assert hs.frobenius_path == pytest.approx(expected, rel=1e-6)
    assert hs.kernel_path == pytest.approx(expected, rel=1e-6)


def test_kernel_diagonal_counts_range_dimension(hmg_pair, quat_pair):
    # K(p, p) = factor * N on A (the representation is unitary on the range), zero off A
    p_in, p_out = H.HMGPoint(0.1 + 0.2j, 0.3), H.HMGPoint(3.0 + 0.0j, 0.3)
    assert P.kernel_EAFN(hmg_pair, p_in, p_in) == pytest.approx(3 / TWO_PI, rel=1e-10)
    assert P.kernel_EAFN(hmg_pair, p_out, p_in) == 0
    q = np.array([0.1, 0.05, 0.1, 0.1])
    assert P.kernel_EAFN(quat_pair, q, q) == pytest.approx(quat_pair.factor * 3, rel=1e-10)


def test_apply_operators_on_sampled_functions(small_cfg, rng):
    ctx = H.HMGContext.from_config(small_cfg)
    pair = P.ProjectionPair("hmg", A_HMG, 2, small_cfg)
    n = ctx.trusted
    g = H.sector_function(ctx, {0: rng.normal(size=(n, n)) + 0j})
    fg = P.apply_FN(g, pair, ctx)
    w, wf = (H.weyl_transform(ctx, x, 0).entries[:n, :n] for x in (g, fg))
    np.testing.assert_allclose(wf[:2], w[:2], atol=1e-4 * np.linalg.norm(w))
    np.testing.assert_allclose(wf[2:], 0, atol=1e-4 * np.linalg.norm(w))
    eg = P.apply_EA(g, pair)
    assert eg.norm_sq() < g.norm_sq()
    assert P.apply_EA(eg, pair).norm_sq() == pytest.approx(eg.norm_sq(), rel=1e-14)
    with pytest.raises(TypeError):
        P.apply_EA(np.zeros(3), pair)


def test_apply_FN_quat(quat_pair, rng):
    grid = gauss_grid_4d(12, 1.0)
    g = Q.SampledFunction4.from_callable(Q.GaussPoly.random(rng, 2, 1.0), grid)
    fg = P.apply_FN(g, quat_pair)
    basis = Q.FockBasis(CFG.fock_degree, quat_pair.param, 12)
    w, wf = Q.weyl_a(g, basis).entries, Q.weyl_a(fg, basis).entries
    np.testing.assert_allclose(wf[:3], w[:3], atol=1e-9)
    np.testing.assert_allclose(wf[3:], 0, atol=1e-9)


@pytest.mark.parametrize("backend", ["hmg", "quat"])
def test_intersection_and_decay(backend, hmg_pair, quat_pair):
    pair = hmg_pair if backend == "hmg" else quat_pair
    r = P.intersection_projection(pair)
    assert 0 < r.sigma_max < 1
    assert r.rank == 0
    assert r.ratio_error < 0.05
    assert r.sigma_max**2 == pytest.approx(np.linalg.eigvalsh(pair.model().G).max(), rel=1e-8)


@pytest.mark.parametrize("backend", ["hmg", "quat"])
def test_annihilation_constant_and_checks(backend, hmg_pair, quat_pair):
    pair = hmg_pair if backend == "hmg" else quat_pair
    model = pair.model()
    C = P.annihilating_constant(pair, model)
    sig = P.intersection_projection(pair, model=model).sigma_max
    # for two projections the infimum of E^perp + F^perp on the model is 1 - sigma_max
    assert C == pytest.approx(1 / (1 - sig), rel=1e-6)
    assert P.annihilation_checks(pair, 50, model=model).violations == 0
    assert P.support_form_checks(pair, 10, model=model).violations == 0
    cert = P.bab_certificate(pair, model=model)
    assert cert["bound_holds"] and cert["decays"]


def test_truncation_breakdown_when_A_covers_the_mass():
    big = GridSet.box(2, 1.0, (-8, -8), (8, 8))
    with pytest.raises(P.TruncationBreakdown):
        P.annihilating_constant(P.ProjectionPair("hmg", big, 1, CFG))


@pytest.mark.parametrize("backend", ["hmg", "quat"])
def test_independent_family_rank(backend, hmg_pair, quat_pair):
    pair = hmg_pair if backend == "hmg" else quat_pair
    fam = P.independent_family(pair, 3)
    assert fam.rank == 4
    assert len(fam.translates) == 4 and all(a > 0 for a in fam.added)


def test_certificate_json_is_deterministic(hmg_pair):
    a, b = P.certificate(hmg_pair).to_json(), P.certificate(hmg_pair).to_json()
    assert a == b
    d = json.loads(a)
    assert d["passes_sigma"] and d["passes_hs"] and d["passes_rank"]
