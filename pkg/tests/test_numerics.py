import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weyl_lab.numerics import (
    ConvergenceError,
    OperatorMatrix,
    TruncationConfig,
    dump_config,
    eps_rank,
    gauss_grid_4d,
    gauss_legendre_cells,
    hs_norm,
    load_config,
    min_eigen_sym,
    op_norm,
    parse_key_values,
    planar_grid,
    stable_sum,
)


def test_config_defaults_and_trusted():
    cfg = TruncationConfig()
    assert (cfg.hermite_cutoff, cfg.buffer, cfg.theta_samples) == (32, 27, 64)
    assert cfg.trusted == 5


@pytest.mark.parametrize(
    "bad",
    [dict(hermite_cutoff=2), dict(buffer=40), dict(theta_samples=4), dict(quad_radius=-1.0), dict(seed=-3)],
)
def test_config_rejects_invalid(bad):
    with pytest.raises(ValueError):
        TruncationConfig(**bad)


def test_config_round_trip(tmp_path):
    cfg = TruncationConfig(seed=7, quad_radius=6.5)
    path = tmp_path / "c.cfg"
    dump_config(cfg, path)
    with open(path, "a") as fh:
        fh.write("hmg_sets = a.txt  # comment\n")
    back, extras = load_config(path)
    assert back == cfg
    assert extras == {"hmg_sets": "a.txt"}


def test_parse_key_values_errors():
    assert parse_key_values("# only comment\n\n a = 1 ") == {"a": "1"}
    with pytest.raises(ValueError):
        parse_key_values("novalue")
    with pytest.raises(KeyError):
        TruncationConfig.from_mapping({"nonsense": "1"})


def test_operator_matrix_shape_checks():
    with pytest.raises(ValueError):
        OperatorMatrix(np.zeros(3))
    m = OperatorMatrix(np.arange(4).reshape(2, 2))
    assert m.rows == m.cols == 2
    np.testing.assert_allclose(m.adjoint().entries, m.entries.T)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12), st.integers(1, 12), st.integers(0, 2**31))
def test_norms_match_svd(r, c, seed):
    a = np.random.default_rng(seed).normal(size=(r, c)) + 1j * np.random.default_rng(seed + 1).normal(size=(r, c))
    s = np.linalg.svd(a, compute_uv=False)
    assert hs_norm(a) == pytest.approx(np.sqrt(np.sum(s**2)), rel=1e-12)
    assert op_norm(a, tol=1e-13) == pytest.approx(s[0], rel=1e-6)
    assert op_norm(a, seed=3, tol=1e-13) == pytest.approx(op_norm(a, seed=3, tol=1e-13), rel=0, abs=0)


def test_op_norm_edge_cases():
    assert op_norm(np.zeros((3, 3))) == 0.0
    with pytest.raises(ValueError):
        op_norm(np.eye(2), tol=0)
    # two nearly equal top singular values converge slowly
    with pytest.raises(ConvergenceError):
        op_norm(np.diag([1.0, 1.0 - 1e-9, 0.5]), tol=1e-15, max_iter=5)


def test_min_eigen_and_rank(rng):
    q, _ = np.linalg.qr(rng.normal(size=(6, 6)))
    h = q @ np.diag([3, 2, 1, 1e-3, 1e-9, 0]) @ q.T
    assert min_eigen_sym(h) == pytest.approx(0.0, abs=1e-12)
    assert eps_rank(h, 1e-6) == 4
    assert eps_rank(np.zeros((3, 3))) == 0


def test_stable_sum_is_order_fixed_and_accurate():
    vals = np.array([1e16, 1.0, -1e16, 1.0] * 8)
    assert stable_sum(vals) == pytest.approx(np.sum(vals), abs=16)
    assert stable_sum([]) == 0.0
    x = np.random.default_rng(1).normal(size=(1001, 3))
    np.testing.assert_allclose(stable_sum(x), x.sum(axis=0), rtol=1e-12)
    assert np.array_equal(stable_sum(x), stable_sum(x.copy()))


def test_planar_grid_integrates_gaussian():
    g = planar_grid(8.0, 120)
    val = g.integrate(np.exp(-np.sum(g.nodes**2, axis=1)))
    assert val == pytest.approx(np.pi, rel=1e-12)


def test_gauss_grid_4d_moments():
    g = gauss_grid_4d(6, 0.5)
    # weight exp(-|q|^2): total mass pi^2, second moment of one coordinate pi^2/2
    assert g.integrate(np.ones(g.size), lebesgue=False) == pytest.approx(np.pi**2, rel=1e-13)
    assert g.integrate(g.nodes[:, 0] ** 2, lebesgue=False) == pytest.approx(np.pi**2 / 2, rel=1e-13)
    # Lebesgue weights turn the rule back into plain integration
    f = g.nodes[:, 1] ** 4 * np.exp(-np.sum(g.nodes**2, axis=1))
    assert g.integrate(f) == pytest.approx(0.75 * np.pi**2, rel=1e-12)


def test_gauss_legendre_cells_exact_for_polynomials():
    nodes, w = gauss_legendre_cells(np.array([[0.0, 0.0], [1.0, -1.0]]), 0.5, 4)
    assert w.sum() == pytest.approx(0.5, rel=1e-14)
    # int x^3 y^2 over both cells
    exact = (0.5**4 / 4) * (0.5**3 / 3) + ((1.5**4 - 1) / 4) * ((1 - 0.5**3) / 3)
    assert np.sum(w * nodes[:, 0] ** 3 * nodes[:, 1] ** 2) == pytest.approx(exact, rel=1e-13)
