import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from opbmo.dyadic import ROOT, DyadicIndex, TreeConfig
from opbmo.norms import bmo_para, sbmo
from opbmo.operators import operator_norm, paraproduct_matrix
from opbmo.sweep import (
    UndefinedRatioError,
    bilinear_delta,
    bootstrap_check,
    iterated_sweep,
    maindelta_checks,
    mainteo_ratio,
    projected_sweep_check,
    rho,
    sweep,
    verify_product_identity,
    verify_sweep_identity,
)
from opbmo.symbol import gaussian_symbol

from .conftest import A_MAT, root_times
from .strategies import symbol_pairs, symbols


def test_zero_and_single_mode():
    B = gaussian_symbol(TreeConfig(2, 2), 0)
    assert np.all(bilinear_delta(B, B * 0).step.cells == 0)
    S = sweep(root_times(A_MAT))
    np.testing.assert_allclose(S.step.cells, np.broadcast_to(A_MAT.conj().T @ A_MAT, (4, 2, 2)))


def test_sweep_support_shrinks():
    B = gaussian_symbol(TreeConfig(4, 2), 1)
    S = sweep(B)
    # constant on level d-1 cells: coefficients vanish from level d-1 on
    assert np.abs(S.haar.coeffs[7:]).max() < 1e-12
    for m, top in [(2, 3), (3, 1), (4, 0)]:
        H = iterated_sweep(B, m).haar
        assert np.abs(H.coeffs[top:]).max() < 1e-9 * (1 + np.abs(H.mean).max())
    with pytest.raises(ValueError):
        iterated_sweep(B, -1)


@given(symbols())
def test_sweep_positive_and_mean(B):
    S = sweep(B)
    cells = S.step.cells
    np.testing.assert_allclose(cells, np.conj(np.swapaxes(cells, -1, -2)), atol=1e-12 * (1 + np.abs(cells).max()))
    assert np.linalg.eigvalsh(cells).min() >= -1e-12 * (1 + np.abs(cells).max())
    total = np.einsum("iqp,iqr->pr", B.coeffs.conj(), B.coeffs)
    np.testing.assert_allclose(S.haar.mean, total, atol=1e-10 * (1 + np.abs(total).max()))


@given(symbol_pairs())
def test_identities(pair):
    B, F = pair
    assert verify_sweep_identity(B) < 1e-9
    r = verify_product_identity(B, F)
    assert r["residual"] < 1e-9 and r["d_bound_ok"]


@given(symbol_pairs(), st.data())
def test_projected_sweep(pair, data):
    B, F = pair
    I = DyadicIndex.from_bfs(data.draw(st.integers(0, B.cfg.n_intervals - 1)))
    assert projected_sweep_check(B, F, I) < 1e-11


def test_delta_l1_single_mode():
    B = root_times(A_MAT / 2)  # ||A|| = 1
    r = maindelta_checks(B, B)
    assert r["ii_ok"] and r["iii_ok"] and r["i_ok"]
    assert r["ii_normalized_ratio"] <= 0.5 + 1e-12


@given(symbol_pairs())
@settings(max_examples=20)
def test_delta_bounds(pair):
    B, F = pair
    r = maindelta_checks(B, F)
    assert r["iii_ok"] and r["ii_ok"] and r["i_ok"]


@given(symbols())
def test_para_dominates_sbmo(B):
    assert sbmo(B).value <= 2 * bmo_para(B).value * (1 + 1e-12)
    assert sbmo(B).value <= bmo_para(B).value * (1 + 1e-9) + 1e-12


def test_rho_single_mode():
    B = root_times(A_MAT)
    # sbmo(B) = 2 and the sweep is constant
    assert rho(B) == pytest.approx(2)
    assert rho(B, N=0) == pytest.approx(2)


def test_mainteo_ratio():
    assert mainteo_ratio(root_times(A_MAT)) == pytest.approx((0 + 4) / 4)
    with pytest.raises(UndefinedRatioError):
        mainteo_ratio(gaussian_symbol(TreeConfig(2, 2), 0) * 0)
    for seed in range(10):
        r = mainteo_ratio(gaussian_symbol(TreeConfig(3, 2), seed))
        assert 0.125 <= r <= 8


def test_bootstrap():
    for seed in range(10):
        r = bootstrap_check(gaussian_symbol(TreeConfig(3, 3), seed))
        assert r["ok"] and r["bmo_para"] <= 3 * r["C"] * r["rho"]
        assert r["c1"] >= r["c1_sbmo"] and r["C_sbmo"] <= r["C"]
    z = bootstrap_check(gaussian_symbol(TreeConfig(2, 2), 0) * 0)
    assert z["ok"] and z["rho"] == 0


def test_paraproduct_norm_at_root():
    B = gaussian_symbol(TreeConfig(3, 2), 4)
    assert operator_norm(paraproduct_matrix(B)) >= np.linalg.norm(B.coeff(ROOT), 2) - 1e-12
