"""Tests for prior posterior means."""

import itertools
import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import norm

from walsnb.config.schema import PriorSpec
from walsnb.errors import DomainError
from walsnb.types import PriorFamily
from walsnb.wals import posterior_mean, posterior_means
from walsnb.wals.priors import laplace_posterior_mean, weibull_posterior_mean

XS = [-6.0, -2.5, -0.4, 0.05, 0.7, 1.5, 3.0, 8.0]


def _laplace_by_quadrature(x: float, c: float) -> float:
    def weight(d: float) -> float:
        return norm.pdf(x - d) * 0.5 * c * math.exp(-c * abs(d))

    breaks = sorted({0.0, x})
    lo, hi = breaks[0] - 40.0, breaks[-1] + 40.0
    edges = [lo, *breaks, hi]
    num = sum(quad(lambda d: d * weight(d), a, b, epsabs=1e-13, epsrel=1e-12)[0] for a, b in itertools.pairwise(edges))
    den = sum(quad(weight, a, b, epsabs=1e-13, epsrel=1e-12)[0] for a, b in itertools.pairwise(edges))
    return num / den


def _weibull_by_quadrature(x: float, q: float, c: float) -> float:
    def weight(d: float) -> float:
        return abs(d) ** (q - 1) * math.exp(-c * abs(d) ** q - (x - d) ** 2 / 2)

    breaks = sorted({0.0, x})
    edges = [breaks[0] - 40.0, *breaks, breaks[-1] + 40.0]
    opts = {"epsabs": 1e-13, "epsrel": 1e-12, "limit": 200}
    num = sum(quad(lambda d: d * weight(d), a, b, **opts)[0] for a, b in itertools.pairwise(edges))
    den = sum(quad(weight, a, b, **opts)[0] for a, b in itertools.pairwise(edges))
    return num / den


class TestLaplace:
    @pytest.mark.parametrize("x", XS)
    def test_closed_form_matches_quadrature(self, x):
        c = math.log(2.0)
        assert laplace_posterior_mean(x, c) == pytest.approx(_laplace_by_quadrature(x, c), abs=1e-6)

    def test_zero_maps_to_zero(self):
        assert laplace_posterior_mean(0.0, 0.7) == pytest.approx(0.0, abs=1e-15)

    def test_large_x_shrinks_by_c(self):
        c = math.log(2.0)
        assert laplace_posterior_mean(30.0, c) == pytest.approx(30.0 - c, abs=1e-8)

    def test_monotone(self):
        grid = np.linspace(-10, 10, 201)
        values = [laplace_posterior_mean(float(x), 0.7) for x in grid]
        assert np.all(np.diff(values) > 0)


class TestWeibull:
    @pytest.mark.parametrize("x", [0.3, 1.0, 2.2, 4.0])
    def test_matches_quadrature(self, x, weibull_prior):
        q, c = weibull_prior.hyperparameters["q"], weibull_prior.hyperparameters["c"]
        assert weibull_posterior_mean(x, q, c) == pytest.approx(_weibull_by_quadrature(x, q, c), rel=1e-6)

    def test_large_argument_is_finite(self, weibull_prior):
        value = posterior_mean(12.0, weibull_prior)
        assert math.isfinite(value)
        assert 0.0 < value < 12.0


class TestPosteriorMean:
    @pytest.mark.parametrize("family", list(PriorFamily))
    def test_odd_symmetry(self, family):
        prior = PriorSpec.default(family)
        for x in [0.2, 1.3, 4.5]:
            assert posterior_mean(-x, prior) == pytest.approx(-posterior_mean(x, prior), abs=1e-12)

    @pytest.mark.parametrize("family", [PriorFamily.LAPLACE, PriorFamily.WEIBULL])
    def test_shrinks_toward_zero(self, family):
        prior = PriorSpec.default(family)
        for x in XS:
            ratio = posterior_mean(x, prior) / x
            assert 0.0 <= ratio <= 1.0

    def test_identity_prior_is_identity(self):
        prior = PriorSpec(family=PriorFamily.IDENTITY)
        np.testing.assert_array_equal(posterior_means(XS, prior), XS)

    def test_weibull_zero(self, weibull_prior):
        assert posterior_mean(0.0, weibull_prior) == 0.0

    def test_vectorized_matches_scalar(self, laplace_prior):
        out = posterior_means(np.array(XS), laplace_prior)
        assert out.shape == (len(XS),)
        assert out[3] == posterior_mean(XS[3], laplace_prior)

    @pytest.mark.parametrize("bad", [math.inf, math.nan])
    def test_rejects_non_finite(self, bad, laplace_prior):
        with pytest.raises(DomainError, match="finite"):
            posterior_mean(bad, laplace_prior)
