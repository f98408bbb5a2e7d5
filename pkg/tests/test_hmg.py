import math

import mpmath as mp
import numpy as np
import pytest
from scipy.special import eval_hermite

from weyl_lab import hmg as H
from weyl_lab.numerics import eps_rank

TWO_PI = 2 * np.pi


def displacement_oracle(z, k, j):
    """<D(alpha) phi_j, phi_k> with alpha = i z / sqrt 2, via the Laguerre closed form in mpmath."""
    mp.mp.dps = 30
    a = mp.mpc(0, 1) * mp.mpc(z.real, z.imag) / mp.sqrt(2)
    x = abs(a) ** 2
    if k >= j:
        v = mp.sqrt(mp.factorial(j) / mp.factorial(k)) * a ** (k - j) * mp.laguerre(j, k - j, x)
    else:
        v = mp.sqrt(mp.factorial(k) / mp.factorial(j)) * (-mp.conj(a)) ** (j - k) * mp.laguerre(k, j - k, x)
    return complex(v * mp.exp(-x / 2))


@pytest.fixture(scope="module")
def ctx(small_cfg):
    return H.HMGContext.from_config(small_cfg)


def test_hermite_functions_match_scipy():
    x = np.linspace(-6, 6, 41)
    tab = H.hermite_table(20, x)
    for k in (0, 1, 7, 19):
        ref = eval_hermite(k, x) * np.exp(-x * x / 2) / math.sqrt(2**k * math.factorial(k) * math.sqrt(math.pi))
        np.testing.assert_allclose(tab[k], ref, atol=1e-12)
    assert H.hermite_eval(3, 0.7) == pytest.approx(tab[3][np.argmin(abs(x - 0.7))] * 0 + H.hermite_table(4, 0.7)[3])
    with pytest.raises(IndexError):
        H.hermite_eval(5, 0.0, cutoff=5)


@pytest.mark.parametrize("z", [0.3 - 0.2j, 1.5 + 2.0j, -4.0 + 3.0j])
def test_displacement_matches_laguerre_closed_form(z):
    M = 12
    d = H.schrodinger_matrix(z, M).entries
    ref = np.array([[displacement_oracle(z, k, j) for j in range(M)] for k in range(M)])
    np.testing.assert_allclose(d, ref, atol=1e-12)


def test_displacement_matches_quadrature():
    z = 1.1 - 0.7j
    closed = H.schrodinger_matrix(z, 10).entries
    quad = H.schrodinger_matrix(z, 10, method="quadrature").entries
    np.testing.assert_allclose(closed, quad, atol=1e-10)
    with pytest.raises(ValueError):
        H.schrodinger_matrix(z, 4, method="nope")


def test_displacement_stack_is_stable_at_large_modes():
    z = 3.0 + 2.0j
    d = H.displacement_stack(np.array([z]), 60)[:, :, 0]
    assert np.all(np.isfinite(d))
    # columns of a unitary: low columns keep unit norm once M covers the coherent-state spread
    np.testing.assert_allclose(np.linalg.norm(d[:, :5], axis=0), 1.0, atol=1e-10)
    for k, j in [(59, 0), (45, 40), (3, 57)]:
        assert d[k, j] == pytest.approx(displacement_oracle(z, k, j), abs=1e-13)


def test_representation_and_intertwining(rng):
    M, n = 40, 6
    for _ in range(10):
        z, w = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
        t1, t2 = rng.uniform(0, TWO_PI, 2)
        m = int(rng.integers(-3, 4))
        a = H.rho_matrix(m, H.HMGPoint(z, t1), M).entries
        b = H.rho_matrix(m, H.HMGPoint(w, t2), M).entries
        c = H.rho_matrix(m, H.HMGPoint(z + np.exp(1j * t1) * w, t1 + t2), M).entries
        ph = np.exp(-0.5j * (np.exp(1j * t1) * w * np.conj(z)).imag)
        np.testing.assert_allclose((a @ b)[:n, :n], ph * c[:n, :n], atol=1e-10)
    mu = H.metaplectic_diag(0.4, M).entries
    lhs = H.schrodinger_matrix(np.exp(0.4j) * (1 + 1j), M).entries
    np.testing.assert_allclose(lhs, mu @ H.schrodinger_matrix(1 + 1j, M).entries @ mu.conj().T, atol=1e-12)


def test_hmg_point_wraps_theta_and_center_phase():
    p = H.HMGPoint(0, 3 * np.pi, t=0.5)
    assert p.theta == pytest.approx(np.pi)
    r = H.rho_matrix(0, p, 4).entries
    np.testing.assert_allclose(r, np.exp(0.5j) * np.diag(np.exp(1j * np.pi * np.arange(4))), atol=1e-14)


def test_fourier_wigner_point_value(rng):
    zeta, eta = rng.normal(size=4) + 0j, rng.normal(size=4) + 1j
    p = H.HMGPoint(0.4 + 0.1j, 1.0)
    ref = np.vdot(eta, H.rho_matrix(2, p, 4).entries @ zeta)
    assert H.fourier_wigner(zeta, eta, p, 2) == pytest.approx(ref)


def test_fourier_wigner_gram_matches_sampled_inner_products(ctx, rng):
    n = ctx.trusted
    pairs = [(rng.normal(size=n) + 1j * rng.normal(size=n), rng.normal(size=n) + 0j) for _ in range(3)]
    gram = H.fourier_wigner_gram(ctx, pairs, 1)
    vs = H.sample_fourier_wigner(ctx, pairs, 1)
    direct = np.array([[vs[j].inner(vs[i]) for j in range(3)] for i in range(3)])
    np.testing.assert_allclose(gram, direct.T, rtol=1e-10, atol=1e-10)
    # orthogonality relation
    (z1, e1), (z2, e2) = pairs[0], pairs[1]
    expected = TWO_PI * np.vdot(z2, z1) * np.conj(np.vdot(e2, e1))
    assert abs(gram[0, 1] - expected) <= 1e-5 * abs(expected)


def test_plancherel_and_inversion_on_band_limited(ctx, rng):
    n = ctx.trusted
    coeffs = {m: rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) for m in (-2, 0, 3)}
    g = H.synthesize(ctx, coeffs)
    ws = H.weyl_transforms(ctx, [g], sorted(coeffs))[0]
    rhs = sum(np.sum(abs(w.entries) ** 2) for w in ws.values()) / TWO_PI
    assert g.norm_sq() == pytest.approx(rhs, rel=1e-4)
    rec = H.inversion_on_grid(ctx, {m: w.entries[:n, :n] for m, w in ws.items()})
    assert np.sqrt((rec - g).norm_sq() / g.norm_sq()) < 1e-4
    p = H.HMGPoint(ctx.z[1234], ctx.thetas[5])
    assert H.inversion_reconstruct(ws, p, n) == pytest.approx(g.values[1234, 5], abs=1e-4 * np.sqrt(g.norm_sq()))


def test_sector_function_has_prescribed_transform(ctx, rng):
    n = ctx.trusted
    c = rng.normal(size=(n, n)) + 0j
    w = H.weyl_transform(ctx, H.sector_function(ctx, {1: c}), 1)
    np.testing.assert_allclose(w.entries[:n, :n], TWO_PI * c, atol=1e-4 * np.linalg.norm(c))


def test_peter_weyl_projection(ctx, rng):
    n = ctx.trusted
    parts = H.synthesize_batch(ctx, [{0: rng.normal(size=(n, n)) + 0j}, {1: rng.normal(size=(n, n)) + 0j}])
    g = parts[0] + parts[1]
    p = H.peter_weyl_project(ctx, g, 0)
    scale = np.sqrt(g.norm_sq())
    assert np.sqrt((p - parts[0]).norm_sq()) < 1e-5 * scale
    assert np.sqrt((H.peter_weyl_project(ctx, p, 0) - p).norm_sq()) < 1e-6 * scale


def test_sampled_function_serialisation(ctx, rng, tmp_path):
    g = H.synthesize(ctx, {0: np.eye(2)})
    back = H.SampledFunction2.from_bytes(g.to_bytes())
    assert np.array_equal(back.values, g.values)
    g.save(tmp_path / "g.bin")
    assert np.array_equal(H.SampledFunction2.load(tmp_path / "g.bin").values, g.values)
    with pytest.raises(ValueError):
        H.SampledFunction2.from_bytes(b"garbage header\n1234")


def test_partial_fourier_t_of_gaussian(ctx):
    t = np.linspace(-10, 10, 2001)
    f = np.ones((ctx.grid.size, ctx.T, 1)) * np.exp(-t * t)[None, None, :]
    out = H.partial_fourier_t(ctx, f, t, 1.5)
    assert out.values[0, 0] == pytest.approx(np.sqrt(np.pi) * np.exp(-1.5**2 / 4), rel=1e-8)


def test_twisted_translate_keeps_rank_and_norm(ctx, rng):
    n = ctx.trusted
    zeta, eta = np.zeros(n, complex), np.zeros(n, complex)
    zeta[:2], eta[:2] = rng.normal(size=2), rng.normal(size=2)
    g = H.sector_function(ctx, {0: np.outer(eta, zeta.conj())})
    w = complex(3, -2) * ctx.spacing
    gw = H.twisted_translate(ctx, g, w)
    assert gw.norm_sq() == pytest.approx(g.norm_sq(), rel=1e-6)
    W0, W1 = (x[0].entries[:n, :n] for x in H.weyl_transforms(ctx, [g, gw], [0]))
    assert eps_rank(W0, 1e-6) == eps_rank(W1, 1e-6) == 1
    # the translate multiplies W on the right, so its range stays within the first two modes
    assert np.linalg.norm(W1[2:, :]) < 1e-5 * np.linalg.norm(W1)
    with pytest.raises(H.SupportOverflow):
        H.twisted_translate(ctx, g, 7.5 + 0j)
