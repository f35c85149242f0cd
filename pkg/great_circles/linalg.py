"""Small fixed-dimension linear algebra for planes in R^4.

Vectors and matrices are plain :mod:`numpy` arrays of fixed shape:
(4,) for points of R^4, (2, 2) for the maps ``F`` and (4, 4) for
complex structures. :func:`as_vec4`, :func:`as_mat2` and :func:`as_mat4`
validate them at the boundaries of the package.

Oriented 2-planes are carried by :class:`OrientedPlane2`. Their points in
the Grassmannian G(2,4) = S^2 x S^2 come from :func:`plucker_split`, which
separates the unit bivector ``u ^ v`` into its anti-self-dual and self-dual
parts.

The ``*_rows`` helpers are the same computations vectorized over stacks of
planes, shaped ``(N, 4, 2)``.

"""

import logging

import numpy as np
import scipy.linalg

from great_circles import constants

log = logging.getLogger(__name__)

SQRT_HALF = np.sqrt(0.5)

# Index pairs (i, j), i < j, of the Pluecker coordinates p_ij, 0-based.
BIVECTOR_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def _as_array(value, shape, name):
    array = np.array(value, dtype=float)
    if array.shape != shape:
        raise ValueError("{} must have shape {}, got {}".format(name, shape, array.shape))
    if not np.all(np.isfinite(array)):
        raise ValueError("{} has non-finite entries".format(name))
    return array


def as_vec4(x):
    """Return ``x`` as a finite float array of shape (4,)."""
    return _as_array(x, (4,), "Vec4")


def as_mat2(F):
    """Return ``F`` as a finite float array of shape (2, 2)."""
    return _as_array(F, (2, 2), "Mat2")


def as_mat4(J):
    """Return ``J`` as a finite float array of shape (4, 4)."""
    return _as_array(J, (4, 4), "Mat4")


def unit(x):
    """Return ``x`` scaled to unit Euclidean length.

    Raises:
        GeometryError: if ``x`` is the zero vector.

    """
    x = np.asarray(x, dtype=float)
    norm = np.linalg.norm(x)
    if norm == 0.0:
        raise GeometryError("cannot normalize the zero vector")
    return x / norm


class OrientedPlane2(object):
    """An oriented 2-plane of R^4 carried by an ordered orthonormal basis.

    Reversing the basis order reverses the orientation. Rotating the basis
    within the plane changes neither the plane nor its orientation.

    Attributes:
        u (numpy.ndarray): First basis vector.
        v (numpy.ndarray): Second basis vector, orthogonal to ``u``.

    """

    def __init__(self, u, v, tol=constants.EXACT_TOL):
        """Create a plane from an orthonormal pair.

        Use :func:`gram_schmidt_plane` to build one from an arbitrary
        independent pair.

        Args:
            u (array_like): First basis vector.
            v (array_like): Second basis vector.
            tol (float, optional): Allowed deviation from orthonormality.

        Raises:
            DegeneratePlane: if ``(u, v)`` is not orthonormal within ``tol``.

        """
        self.u = as_vec4(u)
        self.v = as_vec4(v)
        if (abs(np.linalg.norm(self.u) - 1.0) > tol or
                abs(np.linalg.norm(self.v) - 1.0) > tol or
                abs(np.dot(self.u, self.v)) > tol):
            raise DegeneratePlane("plane basis is not orthonormal")

    def basis(self):
        """Return the 4x2 matrix with columns ``u`` and ``v``."""
        return np.column_stack((self.u, self.v))

    def reversed(self):
        """Return the same plane with the opposite orientation."""
        return OrientedPlane2(self.v, self.u)

    def rotated(self, angle):
        """Return the same oriented plane with its basis rotated by ``angle``."""
        c, s = np.cos(angle), np.sin(angle)
        return OrientedPlane2(c * self.u + s * self.v, -s * self.u + c * self.v)

    def transformed(self, matrix):
        """Return the image of the plane under an invertible 4x4 ``matrix``."""
        matrix = as_mat4(matrix)
        return gram_schmidt_plane(matrix.dot(self.u), matrix.dot(self.v))

    def __repr__(self):
        """Show the basis vectors."""
        return "OrientedPlane2(u={}, v={})".format(self.u.tolist(), self.v.tolist())


class BivectorSplit(object):
    """The point of G(2,4) = S^2 x S^2 determined by an oriented plane.

    Attributes:
        xi_minus (numpy.ndarray): Unit anti-self-dual part of ``u ^ v``.
        xi_plus (numpy.ndarray): Unit self-dual part of ``u ^ v``.

    """

    def __init__(self, xi_minus, xi_plus):  # noqa: D107
        self.xi_minus = np.asarray(xi_minus, dtype=float)
        self.xi_plus = np.asarray(xi_plus, dtype=float)

    def factor(self, name):
        """Return the factor called ``"xiMinus"`` or ``"xiPlus"``."""
        if name == "xiMinus":
            return self.xi_minus
        if name == "xiPlus":
            return self.xi_plus
        raise KeyError(name)

    def __repr__(self):
        """Show both factors."""
        return "BivectorSplit(xiMinus={}, xiPlus={})".format(self.xi_minus.tolist(),
                                                            self.xi_plus.tolist())


def gram_schmidt_plane(u, v, tol=constants.DEGENERATE_PLANE_TOL):
    """Orthonormalize an independent pair into an oriented plane.

    The first basis vector of the result is parallel to ``u`` and the
    orientation is the one of ``(u, v)``.

    Args:
        u (array_like): First spanning vector.
        v (array_like): Second spanning vector.
        tol (float, optional): Smallest admissible second singular value of
            the 4x2 matrix ``[u v]``.

    Returns:
        OrientedPlane2: Orthonormal basis of ``span(u, v)``.

    Raises:
        DegeneratePlane: if ``u`` and ``v`` are nearly dependent.

    Example:
        >>> gram_schmidt_plane([2, 0, 0, 0], [3, 0, 5, 0]).v
        array([0., 0., 1., 0.])

    """
    u = as_vec4(u)
    v = as_vec4(v)
    if scipy.linalg.svdvals(np.column_stack((u, v)))[1] <= tol:
        raise DegeneratePlane("vectors are linearly dependent")
    e1 = u / np.linalg.norm(u)
    w = v - np.dot(e1, v) * e1
    # One reorthogonalization pass keeps <e1, e2> at roundoff level.
    w = w - np.dot(e1, w) * e1
    return OrientedPlane2(e1, w / np.linalg.norm(w))


def orthonormal_planes(U, V, tol=constants.DEGENERATE_PLANE_TOL):
    """Vectorized :func:`gram_schmidt_plane` over rows of ``U`` and ``V``.

    Args:
        U (numpy.ndarray): First spanning vectors, shape (N, 4).
        V (numpy.ndarray): Second spanning vectors, shape (N, 4).
        tol (float, optional): Smallest admissible length of the
            component of a normalized ``V`` row orthogonal to ``U``.

    Returns:
        numpy.ndarray: Orthonormal bases, shape (N, 4, 2).

    Raises:
        DegeneratePlane: if any pair is nearly dependent.

    """
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    E1 = U / np.linalg.norm(U, axis=1)[:, None]
    W = V - np.sum(E1 * V, axis=1)[:, None] * E1
    W = W - np.sum(E1 * W, axis=1)[:, None] * E1
    lengths = np.linalg.norm(W, axis=1)
    if np.any(lengths <= tol * np.linalg.norm(V, axis=1)):
        raise DegeneratePlane("vectors are linearly dependent")
    return np.stack((E1, W / lengths[:, None]), axis=2)


def principal_angles_rows(P, Q):
    """Principal angles between stacks of planes.

    Cosines come from the singular values of ``P^T Q`` and sines from the
    singular values of ``Q - P P^T Q``. Each angle is taken from whichever
    of the two is better conditioned, so nearly equal planes give angles
    at roundoff level.

    Args:
        P (numpy.ndarray): Orthonormal bases, shape (N, 4, 2).
        Q (numpy.ndarray): Orthonormal bases, shape (N, 4, 2).

    Returns:
        numpy.ndarray: Shape (N, 2), columns ``alphaMin`` and ``alphaMax``.

    """
    C = np.einsum("nki,nkj->nij", P, Q)
    cosines = np.clip(np.linalg.svd(C, compute_uv=False), 0.0, 1.0)
    residual = Q - np.einsum("nki,nij->nkj", P, C)
    sines = np.clip(np.linalg.svd(residual, compute_uv=False)[:, ::-1], 0.0, 1.0)
    return np.where(cosines ** 2 >= 0.5, np.arcsin(sines), np.arccos(cosines))


def principal_angles(P, Q):
    """Return the smallest and largest principal angles between two planes.

    The result is symmetric in ``P`` and ``Q`` and does not depend on the
    orientation of either plane.

    Args:
        P (OrientedPlane2): First plane.
        Q (OrientedPlane2): Second plane.

    Returns:
        tuple: ``(alpha_min, alpha_max)`` in radians, within ``[0, pi/2]``.

    """
    angles = principal_angles_rows(P.basis()[None], Q.basis()[None])[0]
    return float(angles[0]), float(angles[1])


def plucker_coordinates(P):
    """Return the Pluecker coordinates ``p_ij = u_i v_j - u_j v_i``.

    The order follows :data:`BIVECTOR_PAIRS`: (12, 13, 14, 23, 24, 34).

    """
    u, v = P.u, P.v
    return np.array([u[i] * v[j] - u[j] * v[i] for i, j in BIVECTOR_PAIRS])


def plucker_split_rows(B):
    """Unnormalized anti-self-dual and self-dual parts of stacked planes.

    Args:
        B (numpy.ndarray): Orthonormal bases, shape (N, 4, 2).

    Returns:
        tuple: ``(minus, plus)``, each of shape (N, 3). For a genuine plane
        both rows have norm ``1/sqrt(2)``.

    """
    u = B[:, :, 0]
    v = B[:, :, 1]
    p = dict(((i, j), u[:, i] * v[:, j] - u[:, j] * v[:, i]) for i, j in BIVECTOR_PAIRS)
    p12, p13, p14 = p[0, 1], p[0, 2], p[0, 3]
    p23, p24, p34 = p[1, 2], p[1, 3], p[2, 3]
    plus = np.stack((p23 + p14, -p13 + p24, p12 + p34), axis=1) * SQRT_HALF
    minus = np.stack((p23 - p14, -p13 - p24, p12 - p34), axis=1) * SQRT_HALF
    return minus, plus


def plucker_split(P, tol=constants.COMPOSED_TOL):
    """Map an oriented plane to its point of S^2 x S^2.

    Reversing the orientation of ``P`` negates both factors.

    Args:
        P (OrientedPlane2): The plane.
        tol (float, optional): Allowed deviation of the unnormalized parts
            from norm ``1/sqrt(2)``.

    Returns:
        BivectorSplit: The unit anti-self-dual and self-dual parts.

    Raises:
        DegeneratePlane: if the Pluecker relation fails beyond ``tol``.

    """
    minus, plus = plucker_split_rows(P.basis()[None])
    minus, plus = minus[0], plus[0]
    norms = np.array([np.linalg.norm(minus), np.linalg.norm(plus)])
    if np.any(np.abs(norms - SQRT_HALF) > tol):
        raise DegeneratePlane("bivector is not a unit simple bivector: norms {}".format(norms))
    return BivectorSplit(minus / norms[0], plus / norms[1])


def eig2_discriminant(F):
    """Return ``D = (a - d)^2 + 4bc`` for ``F = [[a, b], [c, d]]``.

    ``D < 0`` exactly when ``F`` has no real eigenvalues.

    """
    (a, b), (c, d) = as_mat2(F)
    return float((a - d) ** 2 + 4.0 * b * c)


def spherical_distance(x, y):
    """Arc distance between unit vectors of S^2, vectorized over rows.

    Computed as ``atan2(|x cross y|, <x, y>)``, which is accurate for both
    nearby and nearly antipodal points.

    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.arctan2(np.linalg.norm(np.cross(x, y), axis=-1), np.sum(x * y, axis=-1))


def pairwise_spherical_distances(X):
    """Return the (N, N) matrix of arc distances between rows of ``X``."""
    X = np.asarray(X, dtype=float)
    return spherical_distance(X[:, None, :], X[None, :, :])


def fibonacci_sphere(samples, rotation=1.0, semi=False):
    """Spiral point set on the unit 2-sphere.

    Args:
        samples (int): Number of points.
        rotation (float, optional): Offset of the spiral index; seeded
            callers pass a random value in ``[0, samples)`` as jitter.
        semi (bool, optional): If ``True``, cover only the hemisphere with
            positive third coordinate.

    Returns:
        numpy.ndarray: Unit vectors, shape (samples, 3).

    """
    offset = 2.0 / samples
    increment = np.pi * (3.0 - np.sqrt(5.0))
    if semi:
        offset *= 0.5
        increment *= 0.5
    index = np.arange(samples)
    y = (index * offset - 1.0) + offset / 2.0
    r = np.sqrt(1.0 - y ** 2)
    phi = np.mod(index + rotation, samples) * increment
    x = np.cos(phi) * r
    z = np.sin(phi) * r
    if semi:
        return np.column_stack((x, z, -y))
    return np.column_stack((x, y, z))


def complement_frame(n):
    """Return a deterministic orthonormal frame of the plane orthogonal to ``n``.

    Args:
        n (array_like): Nonzero 3-vector.

    Returns:
        numpy.ndarray: Shape (3, 2); columns ``e1``, ``e2`` with
        ``(e1, e2, n)`` positively oriented.

    """
    n = unit(n)
    helper = np.zeros(3)
    helper[np.argmin(np.abs(n))] = 1.0
    e1 = unit(helper - np.dot(n, helper) * n)
    return np.column_stack((e1, np.cross(n, e1)))


class GeometryError(ValueError):
    """Base class of the domain errors raised by this package."""

    pass


class DegeneratePlane(GeometryError):
    """Raised when two vectors do not span a plane."""

    pass
