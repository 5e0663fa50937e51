import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from opbmo.dyadic import DyadicIndex, TreeConfig
from opbmo.norms import (
    KINDS,
    all_norms,
    bmo_mult,
    bmo_norm,
    bmo_so,
    bmo_vector,
    gram_sbmo,
    interval_bmo_norm,
    interval_sbmo,
    interval_wbmo,
    sbmo,
    wbmo,
)
from opbmo.symbol import HaarSymbol, adjoint_symbol, column_embed, conjugate, gaussian_symbol, project, to_step

from .conftest import A_MAT, root_times
from .strategies import seeds, symbols, unitaries


def test_root_mode_values():
    reps = all_norms(root_times(A_MAT))
    assert set(reps) == set(KINDS)
    for kind in ("bmo_norm", "sbmo", "wbmo", "bmo_mult", "bmo_para"):
        assert reps[kind].value == pytest.approx(2, abs=1e-12), kind
    assert reps["bmo_so"].value == pytest.approx(4, abs=1e-12)
    assert reps["gram_sbmo"].value == pytest.approx(4, abs=1e-12)
    assert not reps["wbmo"].exact and reps["wbmo"].upper == pytest.approx(2)


def test_constant_symbol_is_zero():
    cfg = TreeConfig(3, 2)
    A = HaarSymbol(cfg, A_MAT, np.zeros((7, 2, 2)))
    assert bmo_norm(A).value == 0 and sbmo(A).value == 0 and bmo_mult(A).value == 0


def test_scalar_matches_classical_bmo():
    B = gaussian_symbol(TreeConfig(4, 1), 2)
    b = HaarSymbol(B.cfg, B.mean[0, 0], B.coeffs[:, 0, 0])
    assert bmo_norm(B).value == pytest.approx(bmo_vector(b), rel=1e-12)
    assert wbmo(B).value == bmo_norm(B).value


def test_hermitian_so():
    B = gaussian_symbol(TreeConfig(3, 3), 1)
    H = B + adjoint_symbol(B)
    assert bmo_so(H).value == pytest.approx(2 * sbmo(H).value, rel=1e-12)


def test_column_embed_so_exceeds_sbmo():
    B = column_embed(gaussian_symbol(TreeConfig(3, 3), 4, kind="vector"))
    assert bmo_so(B).value > sbmo(B).value * (1 + 1e-3)


def test_diagonal_symbol_wbmo():
    cfg = TreeConfig(3, 3)
    rng = np.random.default_rng(1)
    diag = rng.standard_normal((7, 3)) + 1j * rng.standard_normal((7, 3))
    B = HaarSymbol(cfg, np.zeros((3, 3)), np.einsum("ip,pq->ipq", diag, np.eye(3)))
    per = [bmo_vector(HaarSymbol(cfg, np.zeros(()), diag[:, i])) for i in range(3)]
    assert wbmo(B).value == pytest.approx(max(per), rel=1e-9)


@given(symbols())
def test_norm_chain(B):
    w, s, b = wbmo(B).value, sbmo(B).value, bmo_norm(B).value
    assert w <= s * (1 + 1e-9) + 1e-12
    assert s <= b * (1 + 1e-9) + 1e-12
    so = bmo_so(B)
    assert s <= so.value * (1 + 1e-12) and so.extra["sbmo_adjoint"] <= so.value * (1 + 1e-12)
    assert bmo_mult(B).value == pytest.approx(bmo_mult(adjoint_symbol(B)).value, rel=1e-10, abs=1e-12)


@given(symbols())
def test_witnesses_reproduce(B):
    r = bmo_norm(B)
    assert interval_bmo_norm(B, r.witness.interval) == pytest.approx(r.value, rel=1e-8, abs=1e-12)
    r = sbmo(B)
    assert interval_sbmo(B, r.witness.interval, r.witness.e) == pytest.approx(r.value, rel=1e-8, abs=1e-12)
    r = wbmo(B)
    w = r.witness
    assert interval_wbmo(B, w.interval, w.e, w.f) == pytest.approx(r.value, rel=1e-8, abs=1e-12)


@given(symbols())
def test_gram_relation(B):
    s, g = sbmo(B).value, gram_sbmo(B)
    # the two sides coincide; the [1/4, 4] bracket is the looser policy
    assert s**2 == pytest.approx(g.value, rel=1e-10, abs=1e-14)
    if g.value > 0:
        assert 0.25 <= s**2 / g.value <= 4
    I, e = g.witness.interval, g.witness.e
    P = project(B, I)
    energy = np.sum(np.abs(P.coeffs @ e) ** 2) / I.measure
    assert energy == pytest.approx(g.value, rel=1e-10, abs=1e-14)


@given(symbols(), st.data())
@settings(max_examples=25)
def test_unitary_invariance(B, data):
    U = data.draw(unitaries(B.cfg.dim))
    V = conjugate(B, U)
    a, b = all_norms(B), all_norms(V)
    for kind in KINDS:
        assert abs(a[kind].value - b[kind].value) < 1e-8 * (1 + a[kind].value), kind


@given(symbols(), st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3, allow_nan=False, allow_infinity=False))
@settings(max_examples=20)
def test_homogeneity(B, lam):
    a, b = all_norms(B), all_norms(B * lam)
    for kind in KINDS:
        power = 2 if kind == "gram_sbmo" else 1
        assert b[kind].value == pytest.approx(abs(lam) ** power * a[kind].value, rel=1e-8, abs=1e-12), kind


def test_step_and_haar_inputs_agree():
    B = gaussian_symbol(TreeConfig(3, 2), 0)
    assert sbmo(B).value == pytest.approx(sbmo(to_step(B)).value, rel=1e-14)


def test_wbmo_is_deterministic():
    B = gaussian_symbol(TreeConfig(3, 4), 3)
    assert wbmo(B, seed=1).value == wbmo(B, seed=1).value


def test_operator_required():
    v = gaussian_symbol(TreeConfig(2, 2), 0, kind="vector")
    with pytest.raises(ValueError):
        sbmo(v)
    assert bmo_vector(v) > 0


def test_json_reports():
    r = sbmo(root_times(A_MAT)).to_json()
    assert r["witness"]["level"] == 0 and len(r["witness"]["e"]) == 2 and r["exact"]


def test_deeper_intervals_see_constant():
    # coefficient on a finest-level interval only: every norm sees a single mode
    cfg = TreeConfig(3, 2)
    c = np.zeros((7, 2, 2), dtype=complex)
    I = DyadicIndex(2, 1)
    c[I.bfs] = A_MAT
    B = HaarSymbol(cfg, np.zeros((2, 2)), c)
    assert sbmo(B).witness.interval == I
    assert sbmo(B).value == pytest.approx(2 / np.sqrt(I.measure))
