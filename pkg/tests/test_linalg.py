import numpy as np
import pytest
from numpy.testing import assert_allclose

from great_circles import linalg

E = np.eye(4)


def plane(u, v):
    return linalg.gram_schmidt_plane(u, v)


class TestGramSchmidt(object):

    def test_orthonormal_input_unchanged(self):
        P = plane(E[0], E[1])
        assert_allclose(P.u, E[0])
        assert_allclose(P.v, E[1])

    def test_removes_parallel_component(self):
        P = plane(E[0], E[0] + E[1])
        assert_allclose(P.v, E[1], atol=1e-15)

    def test_scaled_input(self):
        P = plane(2 * E[0], 3 * E[0] + 5 * E[2])
        assert_allclose(P.u, E[0])
        assert_allclose(P.v, E[2], atol=1e-15)

    def test_dependent_vectors(self):
        with pytest.raises(linalg.DegeneratePlane):
            plane(E[0], 2 * E[0])
        with pytest.raises(linalg.DegeneratePlane):
            plane(E[0], E[0] + 1e-12 * E[1])

    def test_bad_shapes(self):
        with pytest.raises(ValueError):
            linalg.as_vec4([1.0, 2.0, 3.0])
        with pytest.raises(ValueError):
            linalg.as_mat2([[1.0, np.nan], [0.0, 1.0]])

    def test_unit_zero_vector(self):
        with pytest.raises(linalg.GeometryError):
            linalg.unit(np.zeros(4))

    def test_random_pairs_orthonormal(self):
        rng = np.random.default_rng(3)
        for u, v in rng.standard_normal((50, 2, 4)):
            P = plane(u, v)
            assert abs(np.dot(P.u, P.v)) < 1e-12
            assert np.linalg.norm(P.u) == pytest.approx(1.0, abs=1e-12)
            assert np.linalg.norm(P.v) == pytest.approx(1.0, abs=1e-12)

    def test_plane_requires_orthonormal_basis(self):
        with pytest.raises(linalg.DegeneratePlane):
            linalg.OrientedPlane2(E[0], E[0] + E[1])


class TestPrincipalAngles(object):

    def test_identical_planes(self):
        P = plane(E[0], E[1])
        assert linalg.principal_angles(P, P) == (0.0, 0.0)

    def test_orthogonal_planes(self):
        alpha = linalg.principal_angles(plane(E[0], E[1]), plane(E[2], E[3]))
        assert_allclose(alpha, (np.pi / 2, np.pi / 2))

    def test_single_rotation(self):
        theta = 0.3
        Q = plane(np.cos(theta) * E[0] + np.sin(theta) * E[2], E[1])
        assert_allclose(linalg.principal_angles(plane(E[0], E[1]), Q), (0.0, theta), atol=1e-15)

    def test_symmetric_and_orientation_free(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            P = plane(*rng.standard_normal((2, 4)))
            Q = plane(*rng.standard_normal((2, 4)))
            forward = linalg.principal_angles(P, Q)
            assert_allclose(linalg.principal_angles(Q, P), forward, atol=1e-12)
            assert_allclose(linalg.principal_angles(P.reversed(), Q), forward, atol=1e-12)
            assert 0.0 <= forward[0] <= forward[1] <= np.pi / 2

    def test_rotated_basis_same_plane(self):
        P = plane([1.0, 2.0, 0.0, -1.0], [0.0, 1.0, 3.0, 1.0])
        assert_allclose(linalg.principal_angles(P, P.rotated(1.1)), (0.0, 0.0), atol=1e-14)

    def test_matches_svd_oracle(self):
        rng = np.random.default_rng(7)
        P = plane(*rng.standard_normal((2, 4)))
        Q = plane(*rng.standard_normal((2, 4)))
        cosines = np.linalg.svd(P.basis().T.dot(Q.basis()), compute_uv=False)
        assert_allclose(linalg.principal_angles(P, Q), np.arccos(cosines), atol=1e-10)


class TestPluckerSplit(object):

    def test_first_coordinate_plane(self):
        split = linalg.plucker_split(plane(E[0], E[1]))
        assert_allclose(split.xi_plus, [0.0, 0.0, 1.0])
        assert_allclose(split.xi_minus, [0.0, 0.0, 1.0])

    def test_second_coordinate_plane(self):
        split = linalg.plucker_split(plane(E[2], E[3]))
        assert_allclose(split.xi_plus, [0.0, 0.0, 1.0])
        assert_allclose(split.xi_minus, [0.0, 0.0, -1.0])

    def test_reversal_negates(self):
        P = plane([1.0, 0.5, -0.2, 0.3], [0.1, -1.0, 0.4, 2.0])
        split = linalg.plucker_split(P)
        reversed_split = linalg.plucker_split(P.reversed())
        assert_allclose(reversed_split.xi_plus, -split.xi_plus, atol=1e-15)
        assert_allclose(reversed_split.xi_minus, -split.xi_minus, atol=1e-15)

    def test_unit_factors(self):
        rng = np.random.default_rng(11)
        for u, v in rng.standard_normal((30, 2, 4)):
            split = linalg.plucker_split(plane(u, v))
            assert np.linalg.norm(split.factor("xiMinus")) == pytest.approx(1.0)
            assert np.linalg.norm(split.factor("xiPlus")) == pytest.approx(1.0)

    def test_coordinates_order(self):
        assert_allclose(linalg.plucker_coordinates(plane(E[0], E[2])), [0, 1, 0, 0, 0, 0])
        assert_allclose(linalg.plucker_coordinates(plane(E[2], E[3])), [0, 0, 0, 0, 0, 1])

    def test_in_plane_rotation(self):
        rng = np.random.default_rng(12)
        for u, v in rng.standard_normal((30, 2, 4)):
            P = plane(u, v)
            split = linalg.plucker_split(P)
            for t in rng.uniform(0.0, 2.0 * np.pi, 4):
                rotated = linalg.plucker_split(P.rotated(t))
                assert_allclose(rotated.xi_minus, split.xi_minus, atol=1e-12)
                assert_allclose(rotated.xi_plus, split.xi_plus, atol=1e-12)

    def test_unknown_factor(self):
        with pytest.raises(KeyError):
            linalg.plucker_split(plane(E[0], E[1])).factor("xi")


class TestDiscriminant(object):

    def test_rotation(self):
        assert linalg.eig2_discriminant([[0, -1], [1, 0]]) == -4.0

    def test_identity(self):
        assert linalg.eig2_discriminant(np.eye(2)) == 0.0

    def test_real_eigenvalues(self):
        assert linalg.eig2_discriminant([[1, 2], [3, 1]]) == 24.0

    def test_matches_quadratic_formula(self):
        rng = np.random.default_rng(13)
        checked = 0
        for F in rng.uniform(-5.0, 5.0, (1000, 2, 2)):
            D = linalg.eig2_discriminant(F)
            trace, det = np.trace(F), np.linalg.det(F)
            assert D == pytest.approx(trace ** 2 - 4.0 * det, abs=1e-10)
            if abs(D) < 1e-6:
                continue
            complex_pair = bool(np.any(np.linalg.eigvals(F).imag != 0.0))
            assert (D < 0.0) == complex_pair
            checked += 1
        assert checked > 990


class TestSphereHelpers(object):

    def test_spherical_distance(self):
        x = np.array([1.0, 0.0, 0.0])
        assert linalg.spherical_distance(x, [0.0, 1.0, 0.0]) == pytest.approx(np.pi / 2)
        assert linalg.spherical_distance(x, -x) == pytest.approx(np.pi)
        assert linalg.spherical_distance(x, [np.cos(1e-9), np.sin(1e-9), 0.0]) == pytest.approx(1e-9, rel=1e-6)

    def test_pairwise_distances(self):
        D = linalg.pairwise_spherical_distances(np.eye(3))
        assert_allclose(D, np.pi / 2 * (1.0 - np.eye(3)))

    def test_fibonacci_sphere(self):
        points = linalg.fibonacci_sphere(200)
        assert points.shape == (200, 3)
        assert_allclose(np.linalg.norm(points, axis=1), 1.0)
        assert np.linalg.norm(points.mean(axis=0)) < 0.05

    def test_fibonacci_hemisphere(self):
        points = linalg.fibonacci_sphere(100, rotation=17.5, semi=True)
        assert_allclose(np.linalg.norm(points, axis=1), 1.0)
        assert np.all(points[:, 2] > 0.0)

    def test_complement_frame(self):
        rng = np.random.default_rng(13)
        for n in rng.standard_normal((10, 3)):
            frame = linalg.complement_frame(n)
            assert_allclose(frame.T.dot(frame), np.eye(2), atol=1e-14)
            assert_allclose(frame.T.dot(n), 0.0, atol=1e-14)
            assert np.linalg.det(np.column_stack((frame, n))) > 0.0
