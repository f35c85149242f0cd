import numpy as np
import pytest
from numpy.testing import assert_allclose

from great_circles import fibration, linalg

from .context import HOPF_F, RANK_ONE_F, RANK_TWO_F, hopf, random_phi, random_real_phi, random_rotation, skew

E = np.eye(4)


def same_plane(P, Q, tol=1e-10):
    return linalg.principal_angles(P, Q)[1] < tol


class TestStructures(object):

    def test_hopf_structure(self):
        J = fibration.hopf_structure()
        assert_allclose(J.matrix.dot(E[0]), E[1])
        assert_allclose(J.matrix.dot(E[2]), E[3])
        assert_allclose(J.matrix.dot(J.matrix), -E)
        assert J.is_block_form()

    def test_hopf_round_trip(self):
        assert_allclose(fibration.structure_to_phi(fibration.hopf_structure()).matrix, HOPF_F)
        assert fibration.phi_to_structure(HOPF_F) == fibration.hopf_structure()

    def test_phi_to_structure_entries(self):
        J = fibration.phi_to_structure(RANK_ONE_F).matrix
        assert J[0, 0] == 0.0
        assert J[0, 1] == pytest.approx(-2.0)
        assert J[1, 0] == pytest.approx(0.5)
        assert J[2, 2] == 0.0
        assert J[2, 3] == pytest.approx(-2.0)
        assert J[3, 2] == pytest.approx(0.5)
        assert_allclose(J.dot(J), -E, atol=1e-12)

    def test_round_trip(self):
        phi = fibration.structure_to_phi(fibration.phi_to_structure(RANK_TWO_F))
        assert_allclose(phi.matrix, RANK_TWO_F, atol=1e-12)

    def test_random_round_trips(self):
        rng = np.random.default_rng(2)
        for _ in range(1000):
            F = random_phi(rng, 1e-2, bound=5.0)
            J = fibration.phi_to_structure(F)
            assert np.max(np.abs(J.matrix.dot(J.matrix) + E)) <= 1e-10
            assert np.max(np.abs(fibration.structure_to_phi(J).matrix - F)) <= 1e-12

    def test_nearly_real_eigenvalues(self):
        F = np.array([[5.0, -1.0], [1e-7, 5.0]])
        J = fibration.phi_to_structure(F)
        assert J.is_block_form()
        assert np.max(np.abs(J.matrix)) > 1e4
        assert J.square_error() <= 1e-10 * np.max(np.abs(J.matrix)) ** 2

    def test_real_eigenvalues(self):
        with pytest.raises(fibration.RealEigenvalues):
            fibration.phi_to_structure(np.eye(2))
        with pytest.raises(fibration.RealEigenvalues):
            fibration.PhiMap([[1.0, 2.0], [3.0, 1.0]])
        with pytest.raises(fibration.RealEigenvalues):
            fibration.phi_to_structure(fibration.PhiMap.forced(np.eye(2)))

    def test_not_block_form(self):
        Q = random_rotation(np.random.default_rng(4))
        with pytest.raises(fibration.NotBlockForm):
            fibration.structure_to_phi(fibration.hopf_structure().conjugated(Q))

    def test_not_a_complex_structure(self):
        with pytest.raises(fibration.NotAComplexStructure):
            fibration.AlmostComplexStructure(np.eye(4))
        J = np.zeros((4, 4))
        J[0, 1], J[1, 0] = -10.0, 0.1 + 1e-10
        J[2, 3], J[3, 2] = -1.0, 1.0
        with pytest.raises(fibration.NotAComplexStructure):
            fibration.AlmostComplexStructure(J)

    def test_forced_map(self):
        phi = fibration.PhiMap.forced([[2.0, 0.0], [0.0, 1.0]])
        assert not phi.checked
        k, v = phi.real_eigenvector()
        assert_allclose(phi.matrix.dot(v), k * v)
        assert fibration.PhiMap(HOPF_F).real_eigenvector() is None


@pytest.mark.usefixtures("hopf", "skew")
class TestFibers(object):

    def test_hopf_fibers(self):
        assert same_plane(fibration.fiber_through(self.hopf, E[0]), linalg.gram_schmidt_plane(E[0], E[1]))
        assert same_plane(fibration.fiber_through(self.hopf, E[2]), linalg.gram_schmidt_plane(E[2], E[3]))

    def test_fiber_needs_unit_vector(self):
        with pytest.raises(linalg.GeometryError):
            fibration.fiber_through(self.hopf, 2 * E[0])

    def test_phi_fiber(self):
        assert same_plane(fibration.phi_fiber(HOPF_F, 0.0, 0.0), linalg.gram_schmidt_plane(E[0], E[1]))
        expected = linalg.gram_schmidt_plane([1, 0, 1, 0], [0, 1, 0, 1])
        assert same_plane(fibration.phi_fiber(HOPF_F, 1.0, 0.0), expected)

    def test_phi_fiber_matches_structure(self):
        rng = np.random.default_rng(6)
        for f in (self.rank_one, self.rank_two):
            for l3, l4 in rng.standard_normal((100, 2)):
                x = linalg.unit([1.0, 0.0, l3, l4])
                assert same_plane(fibration.phi_fiber(f.phi, l3, l4), fibration.fiber_through(f, x))

    def test_fiber_same_from_every_point(self):
        rng = np.random.default_rng(7)
        for f in (self.hopf, self.rank_one, self.rank_two):
            for x in rng.standard_normal((20, 4)):
                P = fibration.fiber_through(f, linalg.unit(x))
                for t in rng.uniform(0.0, 2.0 * np.pi, 5):
                    Q = fibration.fiber_through(f, np.cos(t) * P.u + np.sin(t) * P.v)
                    assert same_plane(P, Q)
                    assert_allclose(linalg.plucker_coordinates(Q), linalg.plucker_coordinates(P), atol=1e-10)

    def test_hopf_fibers_isoclinic(self):
        rng = np.random.default_rng(5)
        points = rng.standard_normal((200, 4))
        for x, y in zip(points[::2], points[1::2]):
            P = fibration.fiber_through(self.hopf, linalg.unit(x))
            Q = fibration.fiber_through(self.hopf, linalg.unit(y))
            first, second = linalg.principal_angles(P, Q)
            assert first == pytest.approx(second, abs=1e-8)

    def test_fiber_bases_vectorized(self):
        rng = np.random.default_rng(8)
        points = rng.standard_normal((10, 4))
        points /= np.linalg.norm(points, axis=1)[:, None]
        bases = fibration.fiber_bases(self.rank_two, points)
        for x, B in zip(points, bases):
            P = linalg.OrientedPlane2(B[:, 0], B[:, 1], tol=1e-12)
            assert same_plane(P, fibration.fiber_through(self.rank_two, x))

    def test_basis_conjugation(self):
        Q = random_rotation(np.random.default_rng(9))
        f = fibration.GreatCircleFibration.hopf(basis=Q)
        assert same_plane(fibration.fiber_through(f, Q[:, 0]), linalg.gram_schmidt_plane(Q[:, 0], Q[:, 1]))

    def test_ill_conditioned_basis(self):
        M = np.diag([1.0, 1.0, 1.0, 1e-9])
        with pytest.raises(fibration.IllConditionedBasis):
            fibration.GreatCircleFibration.hopf(basis=M)

    def test_ambient_structure_needs_structure(self):
        f = fibration.GreatCircleFibration.special_basis(fibration.PhiMap.forced([[2.0, 0.0], [0.0, 1.0]]))
        assert f.structure is None
        with pytest.raises(fibration.RealEigenvalues):
            f.ambient_structure()


@pytest.mark.usefixtures("hopf", "skew")
class TestVerifyFibration(object):

    def test_hopf_clean(self):
        report = fibration.verify_fibration(self.hopf, 1000, seed=1)
        assert report.clean
        assert report.pairs == 1000
        assert report.witness is None
        assert report.min_separation_sv > 1e-8

    def test_skew_clean(self):
        assert fibration.verify_fibration(self.rank_one, 1000).clean

    def test_random_skew_hopf_clean(self):
        rng = np.random.default_rng(10)
        for _ in range(20):
            f = fibration.GreatCircleFibration.special_basis(random_phi(rng, 1e-2), basis=random_rotation(rng))
            report = fibration.verify_fibration(f, 10 ** 4, seed=int(rng.integers(1000)))
            assert report.clean
            assert report.min_separation_sv > 1e-8

    def test_real_eigenvalues_violate(self):
        f = fibration.GreatCircleFibration.special_basis(fibration.PhiMap.forced([[2.0, 0.0], [0.0, 1.0]]))
        report = fibration.verify_fibration(f, 1000)
        assert not report.clean
        x, y = np.array(report.witness)
        P = fibration.phi_fiber(f.phi, *(x[2:] / x[0]))
        Q = fibration.phi_fiber(f.phi, *(y[2:] / y[0]))
        assert np.linalg.svd(np.column_stack((P.basis(), Q.basis())), compute_uv=False)[-1] < 1e-8

    def test_random_real_maps_violate(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            f = fibration.GreatCircleFibration.special_basis(fibration.PhiMap.forced(random_real_phi(rng)))
            assert not fibration.verify_fibration(f, 50).clean

    def test_deterministic(self):
        assert fibration.verify_fibration(self.rank_two, 200, seed=3) == fibration.verify_fibration(
            self.rank_two, 200, seed=3)

    def test_needs_samples(self):
        with pytest.raises(ValueError):
            fibration.verify_fibration(self.hopf, 0)


@pytest.mark.usefixtures("hopf", "skew")
class TestOrthogonalPair(object):

    def test_hopf(self):
        P, Q, residual = fibration.orthogonal_fiber_pair(self.hopf)
        assert residual < 1e-8
        assert same_plane(P, linalg.gram_schmidt_plane(E[0], E[1]))
        assert same_plane(Q, linalg.gram_schmidt_plane(E[2], E[3]))

    def test_special_basis(self):
        for f in (self.rank_one, self.rank_two):
            P, Q, residual = fibration.orthogonal_fiber_pair(f)
            assert residual < 1e-8
            assert same_plane(P, linalg.gram_schmidt_plane(E[0], E[1]))
            assert same_plane(Q, linalg.gram_schmidt_plane(E[2], E[3]))

    def test_rotated(self):
        R = random_rotation(np.random.default_rng(14))
        f = fibration.GreatCircleFibration.special_basis(RANK_TWO_F, basis=R)
        P, Q, residual = fibration.orthogonal_fiber_pair(f)
        assert residual < 1e-8
        assert same_plane(P, linalg.gram_schmidt_plane(R[:, 0], R[:, 1]))
        assert same_plane(Q, linalg.gram_schmidt_plane(R[:, 2], R[:, 3]))
        assert linalg.principal_angles(P, Q)[0] == pytest.approx(np.pi / 2, abs=1e-8)

    def test_skew_hopf_structure(self):
        rng = np.random.default_rng(15)
        J = fibration.hopf_structure().conjugated(random_rotation(rng))
        _, _, residual = fibration.orthogonal_fiber_pair(fibration.GreatCircleFibration.skew_hopf(J))
        assert residual < 1e-4


class TestRankStratum(object):

    def test_hopf(self):
        assert fibration.rank_stratum(HOPF_F) == 0

    def test_reversed_hopf(self):
        assert fibration.rank_stratum(-HOPF_F) == 0

    def test_rank_one(self):
        assert fibration.rank_stratum(RANK_ONE_F) == 1

    def test_rank_two(self):
        assert fibration.rank_stratum(RANK_TWO_F) == 2
