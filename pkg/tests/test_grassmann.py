import json
import os

import numpy as np
import pytest
from numpy.testing import assert_allclose

from great_circles import fibration, grassmann, linalg, models

from .context import HOPF_F, RANK_ONE_F, RANK_TWO_F, random_phi, random_rotation, surfaces

TEST_PREFIX = os.path.join(os.path.dirname(__file__), "test_data/surface")


def arc_surface(stretch, count=30):
    """Points along a great circle arc of xiMinus mapped to an arc of xiPlus."""
    t = np.linspace(0.0, 0.5, count)
    return models.BaseSurfaceSample(
        lambdas=np.zeros((count, 2)),
        xi_minus=np.column_stack((np.cos(t), np.sin(t), np.zeros(count))),
        xi_plus=np.column_stack((np.cos(stretch * t), np.zeros(count), np.sin(stretch * t))))


@pytest.mark.usefixtures("surfaces")
class TestBaseSurface(object):

    def test_hopf_factor_constant(self):
        s = self.hopf_surface
        assert len(s) == 500
        assert np.max(np.abs(s.xi_plus - s.xi_plus[0])) < 1e-10
        assert np.max(np.linalg.norm(s.xi_minus - s.xi_minus[0], axis=1)) > 1.0

    def test_reversed_hopf_factor_constant(self):
        s = grassmann.base_surface(fibration.GreatCircleFibration.special_basis(-HOPF_F), 50)
        assert np.max(np.abs(s.xi_minus - s.xi_minus[0])) < 1e-10

    def test_skew_neither_constant(self):
        s = self.rank_one_surface
        for name in grassmann.FACTORS:
            assert np.max(np.linalg.norm(s.factor(name) - s.factor(name)[0], axis=1)) > 1e-3

    def test_unit_factors(self):
        for s in (self.hopf_surface, self.rank_two_surface):
            assert_allclose(np.linalg.norm(s.xi_minus, axis=1), 1.0)
            assert_allclose(np.linalg.norm(s.xi_plus, axis=1), 1.0)

    def test_lambdas(self):
        s = grassmann.base_surface(fibration.GreatCircleFibration.special_basis(RANK_ONE_F), 20)
        for l3, l4 in s.lambdas:
            P = fibration.phi_fiber(RANK_ONE_F, l3, l4)
            Q = grassmann.surface_from_base_points(
                fibration.GreatCircleFibration.special_basis(RANK_ONE_F), [P.u])
            assert_allclose(Q.lambdas[0], [l3, l4], atol=1e-9)

    def test_duplicate_base_points(self):
        f = fibration.GreatCircleFibration.hopf()
        t = 0.7
        points = [[1.0, 0.0, 0.0, 0.0], [np.cos(t), np.sin(t), 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]]
        s = grassmann.surface_from_base_points(f, points)
        assert len(s) == 2

    def test_too_few_samples(self):
        with pytest.raises(ValueError):
            grassmann.base_surface(fibration.GreatCircleFibration.hopf(), 3)

    def test_seeded(self):
        f = fibration.GreatCircleFibration.special_basis(RANK_ONE_F)
        assert grassmann.base_surface(f, 40, seed=5) == grassmann.base_surface(f, 40, seed=5)
        assert grassmann.base_surface(f, 40, seed=5) != grassmann.base_surface(f, 40, seed=6)


    def test_rotation_equivariance(self):
        rng = np.random.default_rng(23)
        for F in (HOPF_F, RANK_ONE_F, RANK_TWO_F):
            R = random_rotation(rng)
            s = grassmann.base_surface(fibration.GreatCircleFibration.special_basis(F), 120, seed=9)
            r = grassmann.base_surface(fibration.GreatCircleFibration.special_basis(F, basis=R), 120, seed=9)
            assert len(r) == len(s)
            assert_allclose(r.lambdas, s.lambdas, atol=1e-9)
            for name in grassmann.FACTORS:
                assert_allclose(linalg.pairwise_spherical_distances(r.factor(name)),
                                linalg.pairwise_spherical_distances(s.factor(name)), atol=1e-9)


@pytest.mark.usefixtures("surfaces")
class TestGraphDomain(object):

    def test_hopf(self):
        assert grassmann.graph_domain(self.hopf_surface) == "xiMinus"

    def test_skew_hopf(self):
        assert grassmann.graph_domain(self.rank_one_surface) in grassmann.FACTORS
        assert grassmann.graph_domain(self.rank_two_surface) in grassmann.FACTORS

    def test_not_a_graph(self):
        with open(os.path.join(TEST_PREFIX, "two_valued_surface.json"), "r") as resp:
            s = models.BaseSurfaceSample.from_json(json.loads(resp.read()))
        assert np.isinf(s.lambdas[4]).all()
        with pytest.raises(grassmann.NotAGraph):
            grassmann.graph_domain(s)

    def test_prefers_distance_decreasing_factor(self):
        assert grassmann.graph_domain(arc_surface(2.0)) == "xiPlus"
        assert grassmann.graph_domain(arc_surface(0.5)) == "xiMinus"


@pytest.mark.usefixtures("surfaces")
class TestLipschitz(object):

    def test_hopf(self):
        report = grassmann.lipschitz_check(self.hopf_surface)
        assert report.domain_factor == "xiMinus"
        assert report.max_ratio < 1e-8
        assert report.passed()

    def test_skew_hopf(self):
        for s in (self.rank_one_surface, self.rank_two_surface):
            report = grassmann.lipschitz_check(s)
            assert report.max_ratio <= 1.0 + 1e-6
            assert report.pairs_checked > 0

    def test_random_skew_hopf(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            f = fibration.GreatCircleFibration.special_basis(random_phi(rng, 1e-2), basis=random_rotation(rng))
            s = grassmann.base_surface(f, 500, seed=int(rng.integers(1000)))
            assert grassmann.lipschitz_check(s).passed()

    def test_stretched_surface(self):
        report = grassmann.lipschitz_check(arc_surface(2.0), "xiMinus")
        assert report.max_ratio == pytest.approx(2.0)
        assert not report.passed()
        i, j = report.witness
        assert i != j

    def test_collapsed_domain(self):
        s = arc_surface(1.0, count=5)
        s.xi_minus = np.tile(s.xi_minus[0], (5, 1))
        with pytest.raises(grassmann.DomainCollapse):
            grassmann.lipschitz_check(s, "xiMinus")


@pytest.mark.usefixtures("surfaces")
class TestGageDecomposition(object):

    def test_hopf_degenerate(self):
        d = grassmann.gage_decompose(self.hopf_surface)
        assert d.rank == 0
        assert d.degenerate
        assert_allclose(d.L, 0.0)
        assert d.residual < 1e-10

    def test_rank_one(self):
        d = grassmann.gage_decompose(self.rank_one_surface)
        assert d.rank == 1
        assert d.residual < 1e-6
        assert d.image_in_hemisphere
        assert d.operator_norm == pytest.approx(0.6, abs=1e-6)

    def test_rank_two(self):
        d = grassmann.gage_decompose(self.rank_two_surface)
        assert d.rank == 2
        assert d.operator_norm <= 1.0 + 1e-8
        assert_allclose(np.linalg.svd(d.L, compute_uv=False),
                        [(4.0 + np.sqrt(5.0)) / 11.0, (4.0 - np.sqrt(5.0)) / 11.0], atol=1e-6)

    def test_held_out_points(self):
        f = fibration.GreatCircleFibration.special_basis([[1.0, -3.0], [2.0, -1.0]])
        d = grassmann.gage_decompose(self.rank_two_surface)
        held_out = grassmann.base_surface(f, 97, seed=1234)
        X = held_out.factor(d.domain_factor)
        Y = held_out.factor(held_out.other(d.domain_factor))
        assert np.max(np.linalg.norm(d.predict(X) - Y, axis=1)) < 1e-6

    def test_random_fits(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            f = fibration.GreatCircleFibration.special_basis(random_phi(rng, 1e-2), basis=random_rotation(rng))
            d = grassmann.gage_decompose(grassmann.base_surface(f, 500, seed=int(rng.integers(1000))))
            held_out = grassmann.base_surface(f, 101, seed=int(rng.integers(1000, 2000)))
            X = held_out.factor(d.domain_factor)
            Y = held_out.factor(held_out.other(d.domain_factor))
            assert np.sqrt(np.mean(linalg.spherical_distance(d.predict(X), Y) ** 2)) < 1e-6
            assert d.operator_norm <= 1.0 + 1e-8

    def test_too_few_points(self):
        with pytest.raises(grassmann.FitFailed):
            grassmann.gage_decompose(self.rank_one_surface.subset(np.arange(10)))
