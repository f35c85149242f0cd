"""Hopf and skew-Hopf fibrations of the 3-sphere.

A fibration is described by one of:

* the canonical Hopf structure ``J e1 = e2, J e3 = e4``,
* an arbitrary almost complex structure ``J`` (``J^2 = -1``),
* a linear map ``F`` without real eigenvalues in a special basis, where the
  fiber through ``(1, 0, l3, l4)`` also contains ``(0, 1, F (l3, l4))``.

Each description may be expressed in a frame ``M`` (the columns of an
invertible 4x4 matrix). Fibers are always returned in ambient
coordinates: the ambient structure is ``M J M^-1``.

:func:`phi_to_structure` and :func:`structure_to_phi` convert between the
``F`` and ``J`` descriptions.

"""

import logging

import numpy as np
import scipy.optimize

from great_circles import constants, linalg, models
from great_circles.linalg import GeometryError

log = logging.getLogger(__name__)

HOPF_PHI = np.array([[0.0, -1.0], [1.0, 0.0]])


class AlmostComplexStructure(object):
    """A linear map ``J`` of R^4 with ``J^2 = -1``.

    Attributes:
        matrix (numpy.ndarray): The 4x4 matrix of ``J``.

    """

    def __init__(self, matrix, tol=constants.COMPOSED_TOL):
        """Wrap and validate a 4x4 matrix.

        Args:
            matrix (array_like): The matrix of ``J``.
            tol (float, optional): Allowed entrywise deviation of ``J^2``
                from ``-1``.

        Raises:
            NotAComplexStructure: if ``J^2 != -1`` within ``tol``.

        """
        self.matrix = linalg.as_mat4(matrix)
        if self.square_error() > tol:
            raise NotAComplexStructure("J^2 + 1 has entries up to {}".format(self.square_error()))

    def square_error(self):
        """Return the largest entry of ``J^2 + 1``."""
        return float(np.max(np.abs(self.matrix.dot(self.matrix) + np.eye(4))))

    def is_block_form(self, tol=constants.BLOCK_FORM_TOL):
        """Check that ``J`` preserves span(e1, e2) and span(e3, e4)."""
        return (np.max(np.abs(self.matrix[:2, 2:])) <= tol and
                np.max(np.abs(self.matrix[2:, :2])) <= tol)

    def conjugated(self, basis):
        """Return ``M J M^-1`` for the frame matrix ``M``.

        ``J^2 = -1`` is rechecked up to the rounding of the product, so the
        tolerance grows with the squared size of the conjugate.

        """
        basis = linalg.as_mat4(basis)
        matrix = basis.dot(np.linalg.solve(basis.T, self.matrix.T).T)
        return AlmostComplexStructure(matrix, tol=_rounding_tol(matrix))

    def __eq__(self, other):
        """Compare matrices exactly."""
        return type(self) == type(other) and np.array_equal(self.matrix, other.matrix)

    def __repr__(self):
        """Show the matrix."""
        return "AlmostComplexStructure({})".format(self.matrix.tolist())


class PhiMap(object):
    """The linear map ``(l3, l4) -> (h3, h4)`` of a skew-Hopf fibration.

    Attributes:
        matrix (numpy.ndarray): ``F = [[a, b], [c, d]]``.
        checked (bool): ``False`` for maps built with :meth:`forced`.

    """

    def __init__(self, matrix, tol=constants.DISCRIMINANT_TOL):
        """Wrap ``F`` and check that it has no real eigenvalues.

        Raises:
            RealEigenvalues: if the discriminant is not below ``-tol``.

        """
        self.matrix = linalg.as_mat2(matrix)
        self.checked = True
        if self.discriminant >= -tol:
            raise RealEigenvalues("F has real eigenvalues (D = {})".format(self.discriminant))

    @classmethod
    def forced(cls, matrix):
        """Build a map without the discriminant check, for probing verifiers."""
        phi = cls.__new__(cls)
        phi.matrix = linalg.as_mat2(matrix)
        phi.checked = False
        return phi

    @property
    def a(self):  # noqa: D102
        return float(self.matrix[0, 0])

    @property
    def b(self):  # noqa: D102
        return float(self.matrix[0, 1])

    @property
    def c(self):  # noqa: D102
        return float(self.matrix[1, 0])

    @property
    def d(self):  # noqa: D102
        return float(self.matrix[1, 1])

    @property
    def discriminant(self):
        """``D = (a - d)^2 + 4bc``."""
        return linalg.eig2_discriminant(self.matrix)

    def real_eigenvector(self):
        """Return ``(k, v)`` for a real eigenvalue ``k``, or ``None``."""
        values, vectors = np.linalg.eig(self.matrix)
        for k in range(2):
            if abs(np.imag(values[k])) <= constants.EXACT_TOL:
                return float(np.real(values[k])), linalg.unit(np.real(vectors[:, k]))
        return None

    def __eq__(self, other):
        """Compare matrices exactly."""
        return type(self) == type(other) and np.array_equal(self.matrix, other.matrix)

    def __repr__(self):
        """Show the matrix."""
        return "PhiMap({})".format(self.matrix.tolist())


class GreatCircleFibration(object):
    """A Hopf or skew-Hopf fibration of S^3.

    Use the :meth:`hopf`, :meth:`skew_hopf` and :meth:`special_basis`
    constructors.

    Attributes:
        kind (str): ``"hopf"``, ``"skewHopf"`` or ``"specialBasis"``.
        structure (AlmostComplexStructure): ``J`` in frame coordinates, or
            ``None`` for a special basis whose map has real eigenvalues.
        phi (PhiMap): ``F`` for special-basis fibrations, else ``None``.
        basis (numpy.ndarray): Frame matrix ``M``; frame point ``y`` is the
            ambient point ``M y``.

    """

    def __init__(self, kind, structure=None, phi=None, basis=None):  # noqa: D107
        self.kind = kind
        self.structure = structure
        self.phi = phi
        self.basis = np.eye(4) if basis is None else linalg.as_mat4(basis)
        if np.linalg.cond(self.basis) >= constants.CONDITION_LIMIT:
            raise IllConditionedBasis("basis condition number exceeds {}".format(constants.CONDITION_LIMIT))
        self._ambient = None

    @classmethod
    def hopf(cls, basis=None):
        """The canonical Hopf fibration, optionally in the frame ``basis``."""
        return cls("hopf", structure=hopf_structure(), basis=basis)

    @classmethod
    def skew_hopf(cls, J, basis=None):
        """The fibration cut out by the complex lines of ``J``."""
        if not isinstance(J, AlmostComplexStructure):
            J = AlmostComplexStructure(J)
        return cls("skewHopf", structure=J, basis=basis)

    @classmethod
    def special_basis(cls, F, basis=None):
        """The skew-Hopf fibration of the map ``F`` in the frame ``basis``.

        ``F`` may be a forced :class:`PhiMap`; such a fibration has no
        complex structure and only :func:`verify_fibration` accepts it.

        """
        phi = F if isinstance(F, PhiMap) else PhiMap(F)
        structure = phi_to_structure(phi) if phi.discriminant < -constants.DISCRIMINANT_TOL else None
        return cls("specialBasis", structure=structure, phi=phi, basis=basis)

    def ambient_structure(self):
        """Return the 4x4 matrix ``M J M^-1``.

        Raises:
            RealEigenvalues: if the fibration was built from a map with real
                eigenvalues.

        """
        if self.structure is None:
            raise RealEigenvalues("fibration has no complex structure")
        if self._ambient is None:
            self._ambient = self.structure.conjugated(self.basis).matrix
        return self._ambient

    def to_ambient(self, points):
        """Map frame coordinates (rows or a single vector) to ambient ones."""
        return np.asarray(points, dtype=float).dot(self.basis.T)

    def __repr__(self):
        """Show the description."""
        return "GreatCircleFibration(kind={}, structure={}, phi={})".format(self.kind, self.structure, self.phi)


def hopf_structure():
    """Return the canonical structure ``J e1 = e2, J e2 = -e1, J e3 = e4, J e4 = -e3``."""
    J = np.zeros((4, 4))
    J[1, 0] = J[3, 2] = 1.0
    J[0, 1] = J[2, 3] = -1.0
    return AlmostComplexStructure(J)


def _as_phi(F):
    return F if isinstance(F, PhiMap) else PhiMap(F)


def _rounding_tol(matrix):
    return constants.COMPOSED_TOL * max(1.0, float(np.max(np.abs(matrix))) ** 2)


def phi_to_structure(F):
    """Return the block-form complex structure of a skew-Hopf map.

    With ``s = sqrt(-D)`` the blocks are::

        A = [[-(a + d), 2(bc - ad)], [2, a + d]] / s
        B = [[a - d, 2b], [2c, d - a]] / s

    Both blocks are trace free with determinant 1, so ``J^2 = -1``. The
    entries grow like ``1 / s``, so the check allows rounding of that size.

    Args:
        F (PhiMap or array_like): The map ``F``.

    Returns:
        AlmostComplexStructure: ``J = diag(A, B)``.

    Raises:
        RealEigenvalues: if ``D >= -1e-12``.

    """
    phi = _as_phi(F)
    D = phi.discriminant
    if D >= -constants.DISCRIMINANT_TOL:
        raise RealEigenvalues("F has real eigenvalues (D = {})".format(D))
    a, b, c, d = phi.a, phi.b, phi.c, phi.d
    root = np.sqrt(-D)
    J = np.zeros((4, 4))
    J[0, 0] = -(a + d) / root
    J[1, 1] = (a + d) / root
    J[0, 1] = 2.0 * (b * c - a * d) / root
    J[1, 0] = 2.0 / root
    J[2, 2] = (a - d) / root
    J[3, 3] = (d - a) / root
    J[2, 3] = 2.0 * b / root
    J[3, 2] = 2.0 * c / root
    return AlmostComplexStructure(J, tol=_rounding_tol(J))


def structure_to_phi(J, tol=constants.BLOCK_FORM_TOL):
    """Read the map ``F`` off a block-form complex structure.

    A real 2x2 block with ``a21 = 0`` is triangular and cannot square to
    ``-1``, so :class:`DegenerateBlock` only signals an invalid input.

    Args:
        J (AlmostComplexStructure or array_like): Block-form structure.
        tol (float, optional): Largest admissible off-diagonal block entry.

    Returns:
        PhiMap: ``[[(a33 - a11)/a21, a34/a21], [a43/a21, (a44 - a11)/a21]]``.

    Raises:
        NotBlockForm: if the off-diagonal blocks do not vanish.
        DegenerateBlock: if ``|a21| < 1e-12``.

    """
    if not isinstance(J, AlmostComplexStructure):
        J = AlmostComplexStructure(J)
    if not J.is_block_form(tol):
        raise NotBlockForm("J mixes span(e1, e2) with span(e3, e4)")
    m = J.matrix
    a21 = m[1, 0]
    if abs(a21) < constants.EXACT_TOL:
        raise DegenerateBlock("a21 vanishes")
    return PhiMap([[(m[2, 2] - m[0, 0]) / a21, m[2, 3] / a21],
                   [m[3, 2] / a21, (m[3, 3] - m[0, 0]) / a21]])


def fiber_through(f, x, tol=constants.UNIT_TOL):
    """Return the fiber plane ``span(x, J x)`` through a unit vector ``x``.

    Args:
        f (GreatCircleFibration): The fibration.
        x (array_like): Unit vector of R^4, ambient coordinates.
        tol (float, optional): Allowed deviation of ``|x|`` from 1.

    Returns:
        OrientedPlane2: The fiber, oriented by ``(x, J x)``.

    """
    x = linalg.as_vec4(x)
    if abs(np.linalg.norm(x) - 1.0) > tol:
        raise GeometryError("base point must be a unit vector")
    # J has no real eigenvalues, so J x is never parallel to x.
    return linalg.gram_schmidt_plane(x, f.ambient_structure().dot(x))


def fiber_bases(f, points):
    """Vectorized :func:`fiber_through`.

    Args:
        f (GreatCircleFibration): The fibration.
        points (numpy.ndarray): Unit base points, shape (N, 4).

    Returns:
        numpy.ndarray: Orthonormal fiber bases, shape (N, 4, 2).

    """
    points = np.asarray(points, dtype=float)
    return linalg.orthonormal_planes(points, points.dot(f.ambient_structure().T))


def phi_fiber(F, lambda3, lambda4):
    """Return the plane spanned by ``(1, 0, l3, l4)`` and ``(0, 1, F (l3, l4))``.

    ``F`` is used as given, so forced maps are accepted.

    """
    F = F.matrix if isinstance(F, PhiMap) else linalg.as_mat2(F)
    h3, h4 = F.dot([lambda3, lambda4])
    return linalg.gram_schmidt_plane([1.0, 0.0, lambda3, lambda4], [0.0, 1.0, h3, h4])


def _phi_fiber_rows(F, lambdas):
    n = len(lambdas)
    first = np.column_stack((np.ones(n), np.zeros(n), lambdas))
    second = np.column_stack((np.zeros(n), np.ones(n), lambdas.dot(F.T)))
    return linalg.orthonormal_planes(first, second)


def _sample_phi_pairs(f, pair_samples, rng):
    """Fiber pairs of a fibration known only through its (possibly invalid) map."""
    F = f.phi.matrix
    lambdas = rng.standard_normal((2 * pair_samples, 2))
    first, second = lambdas[:pair_samples], lambdas[pair_samples:]
    eigen = f.phi.real_eigenvector()
    if eigen is not None:
        # Fibers at v and 2v share (-k, 1, 0, 0) for F v = k v.
        _, v = eigen
        log.debug("adding eigenvector witness pair along %s", v)
        first = np.vstack((v, first))
        second = np.vstack((2.0 * v, second))
    P = _phi_fiber_rows(F, first)
    Q = _phi_fiber_rows(F, second)
    if not np.array_equal(f.basis, np.eye(4)):
        P = linalg.orthonormal_planes(f.to_ambient(P[:, :, 0]), f.to_ambient(P[:, :, 1]))
        Q = linalg.orthonormal_planes(f.to_ambient(Q[:, :, 0]), f.to_ambient(Q[:, :, 1]))
    return P, Q, P[:, :, 0], Q[:, :, 0]


def verify_fibration(f, pair_samples, seed=constants.DEFAULT_SEED,
                     separation_tol=constants.SEPARATION_TOL,
                     coincidence_tol=constants.COINCIDENCE_TOL):
    """Check that sampled fibers meet only at the origin.

    Two fibers pass if their stacked 4x4 basis matrix has smallest
    singular value above ``separation_tol`` or if they coincide (both
    principal angles below ``coincidence_tol``).

    Fibrations with a complex structure are sampled at uniform base points
    of S^3. A special-basis fibration with a forced map is sampled in
    its ``(l3, l4)`` parameters, and a map with a real eigenvector gets the
    intersecting pair along that eigenvector added first.

    Args:
        f (GreatCircleFibration): Fibration to check.
        pair_samples (int): Number of random fiber pairs.
        seed (int, optional): Seed of the sampler.
        separation_tol (float, optional): Separation threshold.
        coincidence_tol (float, optional): Coincidence threshold.

    Returns:
        FibrationReport: Findings, with a witness pair of base points if
        any two fibers intersect.

    """
    if pair_samples < 1:
        raise ValueError("pair_samples must be at least 1")
    rng = np.random.default_rng(seed)
    if f.structure is None:
        P, Q, x, y = _sample_phi_pairs(f, pair_samples, rng)
    else:
        points = rng.standard_normal((2 * pair_samples, 4))
        points /= np.linalg.norm(points, axis=1)[:, None]
        x, y = points[:pair_samples], points[pair_samples:]
        P, Q = fiber_bases(f, x), fiber_bases(f, y)

    angles = linalg.principal_angles_rows(P, Q)
    coincide = angles[:, 1] < coincidence_tol
    separation = np.linalg.svd(np.concatenate((P, Q), axis=2), compute_uv=False)[:, -1]
    violating = np.flatnonzero(~coincide & (separation <= separation_tol))
    distinct = separation[~coincide]

    witness = None
    if len(violating):
        k = violating[0]
        witness = [linalg.unit(x[k]).tolist(), linalg.unit(y[k]).tolist()]
    report = models.FibrationReport(clean=not len(violating),
                                    pairs=len(P),
                                    min_separation_sv=float(distinct.min()) if len(distinct) else None,
                                    witness=witness)
    log.info("checked %d fiber pairs: clean=%s, min separation %s", len(P), report.clean,
             report.min_separation_sv)
    return report


def _slice_points(angles):
    """Points (cos t, 0, sin t cos p, sin t sin p) of the slice x2 = 0."""
    theta, phi = angles[..., 0], angles[..., 1]
    return np.stack((np.cos(theta), np.zeros_like(theta),
                     np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi)), axis=-1)


def _slice_angles(points):
    return np.column_stack((np.arccos(np.clip(points[:, 0], -1.0, 1.0)),
                            np.arctan2(points[:, 3], points[:, 2])))


def _fibers_of_frame_points(f, frame_points):
    ambient = f.to_ambient(frame_points)
    ambient /= np.linalg.norm(ambient, axis=1)[:, None]
    return fiber_bases(f, ambient), ambient


def orthogonal_fiber_pair(f, search_grid=constants.SEARCH_GRID, tol=constants.ORTHOGONAL_PAIR_TOL):
    """Find two orthogonal fibers.

    Every fiber meets the 2-sphere ``x2 = 0`` of the frame, so fibers are
    parametrized by two angles there. The frame points ``e1`` and ``e3``
    are tried first, then all pairs of a spiral grid; the best pair is
    refined by Nelder-Mead on ``|P^T Q|_F^2`` over the four angles.

    Args:
        f (GreatCircleFibration): A fibration with a complex structure.
        search_grid (int, optional): Number of grid points on the slice.
        tol (float, optional): Largest accepted residual.

    Returns:
        tuple: ``(P, Q, residual)`` with ``residual = pi/2 - alphaMin``.

    Raises:
        SearchFailed: if the residual exceeds ``tol`` after refinement.

    """
    grid = linalg.fibonacci_sphere(search_grid)
    candidates = np.vstack(([[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]],
                            np.column_stack((grid[:, 0], np.zeros(search_grid), grid[:, 1], grid[:, 2]))))
    bases, _ = _fibers_of_frame_points(f, candidates)
    overlap = np.einsum("aki,bkj->abij", bases, bases)
    objective = np.sum(overlap ** 2, axis=(2, 3))
    np.fill_diagonal(objective, np.inf)
    i, j = np.unravel_index(np.argmin(objective), objective.shape)
    best_points = candidates[[i, j]]
    best_value = objective[i, j]
    log.debug("grid search: best pair (%d, %d) with overlap %g", i, j, best_value)

    # Orthogonal pairs form a continuum; an exact grid hit is kept as is.
    if best_value > constants.EXACT_TOL ** 2:
        def overlap_of(params):
            bases, _ = _fibers_of_frame_points(f, _slice_points(params.reshape(2, 2)))
            return float(np.sum(bases[0].T.dot(bases[1]) ** 2))

        start = _slice_angles(best_points).ravel()
        result = scipy.optimize.minimize(overlap_of, start, method="Nelder-Mead",
                                         options={"xatol": 1e-12, "fatol": 1e-20, "maxiter": 4000})
        log.debug("refinement: %s after %d evaluations, overlap %g", result.message, result.nfev, result.fun)
        if result.fun < best_value:
            best_points = _slice_points(result.x.reshape(2, 2))

    _, ambient = _fibers_of_frame_points(f, best_points)
    P = fiber_through(f, ambient[0])
    Q = fiber_through(f, ambient[1])
    residual = np.pi / 2.0 - linalg.principal_angles(P, Q)[0]
    if residual > tol:
        raise SearchFailed("best fiber pair is {} rad from orthogonal".format(residual))
    return P, Q, float(residual)


def rank_stratum(F, samples=constants.SURFACE_SAMPLES, seed=constants.DEFAULT_SEED,
                 rank_tol=constants.RANK_TOL):
    """Return the rank (0, 1 or 2) of the linear part of the fitted decomposition.

    Rank 0 is the Hopf fibration and its orientation reversal.

    Args:
        F (PhiMap or array_like): The map ``F``.
        samples (int, optional): Base surface sample size.
        seed (int, optional): Sampling seed.
        rank_tol (float, optional): Singular value threshold.

    """
    from great_circles import grassmann

    surface = grassmann.base_surface(GreatCircleFibration.special_basis(_as_phi(F)), samples, seed)
    return grassmann.gage_decompose(surface, rank_tol=rank_tol).rank


class RealEigenvalues(GeometryError):
    """Raised when a map ``F`` has real eigenvalues."""

    pass


class NotAComplexStructure(GeometryError):
    """Raised when a matrix does not square to minus the identity."""

    pass


class NotBlockForm(GeometryError):
    """Raised when a structure does not preserve span(e1, e2) and span(e3, e4)."""

    pass


class DegenerateBlock(GeometryError):
    """Raised when the entry a21 of a block-form structure vanishes."""

    pass


class IllConditionedBasis(GeometryError):
    """Raised when a frame matrix is numerically singular."""

    pass


class SearchFailed(GeometryError):
    """Raised when no pair of orthogonal fibers is found."""

    pass
