"""Tests for barred quantities, M1 quadratic forms and the semi-orthogonal transform."""

import numpy as np
import pytest

from walsnb.errors import (
    DimensionMismatch,
    NotPositiveDefinite,
    SingularFocusBlock,
)
from walsnb.types import Dataset, Nb2Params
from walsnb.wals import (
    FocusBlock,
    alpha_from_predictor,
    build_transforms,
    compute_bars,
    focus_block,
    m1_quadratic_form,
    symmetric_roots,
)


@pytest.fixture(scope="module")
def shifted_start(ml_start):
    """A start away from the ML optimum, so one-step updates are not trivial."""
    beta = ml_start.params.beta + np.linspace(0.02, -0.03, ml_start.params.beta.shape[0])
    return Nb2Params(beta=beta, alpha=ml_start.params.alpha - 0.1)


@pytest.fixture(scope="module")
def bars(nb2_dataset, shifted_start):
    return compute_bars(nb2_dataset, shifted_start)


def _dense_m1(bars):
    n = bars.n
    G = np.eye(n) + bars.a * np.outer(bars.r, bars.r)
    F = bars.X1_bar
    GF = G @ F
    return G - GF @ np.linalg.solve(F.T @ GF, GF.T)


class TestBars:
    def test_shapes(self, bars, nb2_dataset):
        assert bars.n == nb2_dataset.n
        assert bars.X1_bar.shape == nb2_dataset.X1.shape
        assert bars.X2_bar.shape == nb2_dataset.X2.shape

    def test_weighted_design(self, bars, nb2_dataset):
        np.testing.assert_allclose(bars.X1_bar, np.sqrt(bars.psi_bar)[:, None] * nb2_dataset.X1)

    def test_alpha_equation_holds_at_start_when_score_is_zero(self, nb2_dataset, ml_start):
        # at the ML optimum the dispersion equation returns the starting value
        at_ml = compute_bars(nb2_dataset, ml_start.params)
        alpha = alpha_from_predictor(at_ml, at_ml.eta_bar)
        assert alpha == pytest.approx(ml_start.params.alpha, abs=1e-4)

    def test_wrong_start_length(self, nb2_dataset):
        with pytest.raises(DimensionMismatch):
            compute_bars(nb2_dataset, Nb2Params(beta=np.zeros(3), alpha=0.0))


class TestM1:
    def test_matches_dense_matrix(self, bars):
        dense = bars.X2_bar.T @ _dense_m1(bars) @ bars.X2_bar
        np.testing.assert_allclose(
            m1_quadratic_form(bars, bars.X2_bar, bars.X2_bar), dense, rtol=1e-8, atol=1e-9 * np.abs(dense).max()
        )

    def test_vector_arguments(self, bars):
        w = bars.w
        dense = float(w @ _dense_m1(bars) @ w)
        assert float(m1_quadratic_form(bars, w, w)) == pytest.approx(dense, rel=1e-8)

    def test_annihilates_focus_columns(self, bars):
        out = m1_quadratic_form(bars, bars.X1_bar, bars.X2_bar)
        scale = np.abs(bars.X1_bar.T @ bars.X2_bar).max()
        assert np.abs(out).max() < 1e-9 * scale

    def test_block_reused(self, bars):
        block = focus_block(bars)
        a = m1_quadratic_form(bars, bars.X2_bar, bars.X2_bar, block)
        b = m1_quadratic_form(bars, bars.X2_bar, bars.X2_bar)
        np.testing.assert_allclose(a, b)

    def test_solve_inverts_gram(self, bars):
        block = FocusBlock(bars.X1_bar, bars.r, bars.a)
        gram = block.cross(bars.X1_bar, bars.X1_bar)
        np.testing.assert_allclose(gram @ block.solve(np.eye(gram.shape[0])), np.eye(gram.shape[0]), atol=1e-10)

    def test_singular_focus_block(self, bars):
        F = bars.X1_bar.copy()
        F[:, 1] = 0.0
        with pytest.raises(SingularFocusBlock):
            FocusBlock(F, bars.r, bars.a)


class TestTransforms:
    def test_auxiliary_block_is_semi_orthogonal(self, bars, nb2_dataset):
        t = build_transforms(nb2_dataset, bars)
        product = m1_quadratic_form(bars, t.Z2_bar, t.Z2_bar) / nb2_dataset.n
        np.testing.assert_allclose(product, np.eye(nb2_dataset.k2), atol=1e-8)

    def test_focus_scaling(self, bars, nb2_dataset):
        t = build_transforms(nb2_dataset, bars)
        diag = np.diag(t.Z1_bar.T @ t.Z1_bar) / nb2_dataset.n
        np.testing.assert_allclose(diag, 1.0, rtol=1e-12)

    def test_xi_has_unit_diagonal(self, bars, nb2_dataset):
        t = build_transforms(nb2_dataset, bars)
        np.testing.assert_allclose(np.diag(t.Xi), 1.0, rtol=1e-10)
        np.testing.assert_allclose(t.Xi_half @ t.Xi_neg_half, np.eye(nb2_dataset.k2), atol=1e-10)

    def test_predictor_preserved(self, bars, nb2_dataset):
        t = build_transforms(nb2_dataset, bars)
        beta = np.array([0.2, -0.1, 0.3, 0.05, -0.2])
        gamma1 = beta[:2] / t.Delta1
        gamma2 = t.Xi_half @ (beta[2:] / t.Delta2)
        np.testing.assert_allclose(t.Z1 @ gamma1 + t.Z2 @ gamma2, nb2_dataset.X @ beta, atol=1e-10)

    def test_symmetric_roots_rejects_singular(self):
        with pytest.raises(NotPositiveDefinite) as excinfo:
            symmetric_roots(np.array([[1.0, 1.0], [1.0, 1.0]]))
        assert excinfo.value.min_eigenvalue == pytest.approx(0.0, abs=1e-12)

    def test_collinear_auxiliary_fails(self, nb2_dataset, ml_start):
        X2 = np.column_stack([nb2_dataset.X2, nb2_dataset.X2[:, 0] + nb2_dataset.X1[:, 1]])
        data = Dataset(y=nb2_dataset.y, X1=nb2_dataset.X1, X2=X2)
        beta = np.concatenate([ml_start.params.beta, [0.0]])
        b = compute_bars(data, Nb2Params(beta=beta, alpha=ml_start.params.alpha))
        with pytest.raises(NotPositiveDefinite):
            build_transforms(data, b)
