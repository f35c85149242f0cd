"""Algebraic curvature tensors on R^4 built from skew-Hopf fibrations.

A tensor with the curvature symmetries is a symmetric operator on the
6-dimensional space of bivectors; :class:`CurvatureTensor4` stores exactly
that 6x6 matrix in the basis ``e_i ^ e_j`` ordered as
:data:`great_circles.linalg.BIVECTOR_PAIRS`. Pair symmetry and
antisymmetry therefore hold exactly, while the first Bianchi identity is a
single linear condition that is checked.

:func:`build_tensor` produces, for a map ``F`` and ``gamma, beta < 0``, a
tensor whose sectional curvature is maximal (equal to 1) exactly on the
fiber planes of ``F``; :func:`recover_fibration` reads ``F`` back from the
kernel of the form :func:`q_form`.

Component indices in this module are 1-based, as in ``R1234``, unless a
docstring says otherwise.

"""

import logging
from functools import wraps

import numpy as np
import scipy.linalg

from great_circles import constants, fibration, linalg, models
from great_circles.linalg import GeometryError

log = logging.getLogger(__name__)

_PAIR_INDEX = np.zeros((4, 4), dtype=int)
_PAIR_SIGN = np.zeros((4, 4))
for _k, (_i, _j) in enumerate(linalg.BIVECTOR_PAIRS):
    _PAIR_INDEX[_i, _j] = _PAIR_INDEX[_j, _i] = _k
    _PAIR_SIGN[_i, _j] = 1.0
    _PAIR_SIGN[_j, _i] = -1.0

# R1423 is fixed by R1234 and R1342 through the first Bianchi identity.
_DEPENDENT = (linalg.BIVECTOR_PAIRS.index((0, 3)), linalg.BIVECTOR_PAIRS.index((1, 2)))


def _label(I, J):
    (i, j), (k, l) = linalg.BIVECTOR_PAIRS[I], linalg.BIVECTOR_PAIRS[J]
    return "R{}{}{}{}".format(i + 1, j + 1, k + 1, l + 1)


def _bivector(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.array([x[i] * y[j] - x[j] * y[i] for i, j in linalg.BIVECTOR_PAIRS])


class CurvatureTensor4(object):
    """An algebraic curvature tensor on R^4.

    Attributes:
        matrix (numpy.ndarray): The symmetric 6x6 operator on bivectors.
        kappa_max (float): Extremal sectional curvature of the tensor's
            fiber planes.

    """

    def __init__(self, matrix, kappa_max=1.0):
        """Wrap a symmetric 6x6 matrix.

        Raises:
            ValueError: if ``matrix`` is not a finite symmetric 6x6 matrix.

        """
        matrix = np.array(matrix, dtype=float)
        if matrix.shape != (6, 6) or not np.all(np.isfinite(matrix)):
            raise ValueError("curvature operator must be a finite 6x6 matrix")
        if np.max(np.abs(matrix - matrix.T)) > constants.EXACT_TOL:
            raise ValueError("curvature operator must be symmetric")
        self.matrix = 0.5 * (matrix + matrix.T)
        self.kappa_max = float(kappa_max)

    @classmethod
    def from_components(cls, components, kappa_max=1.0):
        """Build a tensor from some components, extended by symmetry.

        Args:
            components (dict): Maps 1-based tuples ``(i, j, k, l)`` to values.
                Components not reached from these by the symmetries are zero.
            kappa_max (float, optional): Extremal curvature normalization.

        Raises:
            ValueError: if two entries assign different values to one slot,
                or a component with ``i = j`` or ``k = l`` is nonzero.

        """
        matrix = np.zeros((6, 6))
        assigned = {}
        for (i, j, k, l), value in components.items():
            i, j, k, l = i - 1, j - 1, k - 1, l - 1
            if i == j or k == l:
                if value != 0.0:
                    raise ValueError("R{}{}{}{} must vanish".format(i + 1, j + 1, k + 1, l + 1))
                continue
            I, J = sorted((_PAIR_INDEX[i, j], _PAIR_INDEX[k, l]))
            value = float(value) * _PAIR_SIGN[i, j] * _PAIR_SIGN[k, l]
            if (I, J) in assigned and abs(assigned[I, J] - value) > constants.EXACT_TOL:
                raise ValueError("conflicting values for {}".format(_label(I, J)))
            assigned[I, J] = value
            matrix[I, J] = matrix[J, I] = value
        return cls(matrix, kappa_max)

    @classmethod
    def from_array(cls, array, kappa_max=1.0):
        """Build a tensor from a 0-based (4, 4, 4, 4) array.

        Raises:
            ValueError: if the array lacks the pair symmetries.

        """
        array = np.asarray(array, dtype=float)
        matrix = np.zeros((6, 6))
        for I, (i, j) in enumerate(linalg.BIVECTOR_PAIRS):
            for J, (k, l) in enumerate(linalg.BIVECTOR_PAIRS):
                matrix[I, J] = array[i, j, k, l]
        tensor = cls(matrix, kappa_max)
        if np.max(np.abs(tensor.array() - array)) > constants.EXACT_TOL:
            raise ValueError("array does not have the curvature symmetries")
        return tensor

    def component(self, i, j, k, l):
        """Return ``R(e_i, e_j, e_k, e_l)`` for 1-based indices."""
        i, j, k, l = i - 1, j - 1, k - 1, l - 1
        return float(_PAIR_SIGN[i, j] * _PAIR_SIGN[k, l] *
                     self.matrix[_PAIR_INDEX[i, j], _PAIR_INDEX[k, l]])

    def array(self):
        """Return all components as a 0-based (4, 4, 4, 4) array."""
        signs = _PAIR_SIGN[:, :, None, None] * _PAIR_SIGN[None, None, :, :]
        return signs * self.matrix[_PAIR_INDEX[:, :, None, None], _PAIR_INDEX[None, None, :, :]]

    def __call__(self, x, y, z, w):
        """Evaluate ``R(x, y, z, w)``."""
        return float(_bivector(x, y).dot(self.matrix).dot(_bivector(z, w)))

    def bianchi_residual(self):
        """Largest ``|R(x,y,z,w) + R(z,x,y,w) + R(y,z,x,w)|`` over basis vectors."""
        T = self.array()
        cycled = T + np.einsum("kijl->ijkl", T) + np.einsum("jkil->ijkl", T)
        return float(np.max(np.abs(cycled)))

    def with_component(self, i, j, k, l, value):
        """Return a copy with one component (and its symmetric partners) replaced."""
        i, j, k, l = i - 1, j - 1, k - 1, l - 1
        I, J = _PAIR_INDEX[i, j], _PAIR_INDEX[k, l]
        matrix = self.matrix.copy()
        matrix[I, J] = matrix[J, I] = value * _PAIR_SIGN[i, j] * _PAIR_SIGN[k, l]
        return CurvatureTensor4(matrix, self.kappa_max)

    def to_json(self):
        """Return the 20 independent components with labels."""
        components = []
        for I in range(6):
            for J in range(I, 6):
                if (I, J) != _DEPENDENT:
                    components.append({"label": _label(I, J), "value": float(self.matrix[I, J]) + 0.0})
        return {"components": components, "kappaMax": self.kappa_max}

    @classmethod
    def from_json(cls, tensor_json):
        """Rebuild a tensor, restoring R1423 from the first Bianchi identity."""
        index = dict((_label(I, J), (I, J)) for I in range(6) for J in range(I, 6))
        matrix = np.zeros((6, 6))
        for entry in tensor_json["components"]:
            I, J = index[entry["label"]]
            matrix[I, J] = matrix[J, I] = entry["value"]
        tensor = cls(matrix, tensor_json.get("kappaMax", 1.0))
        # R1423 = -(R1234 + R1342)
        dependent = -(tensor.component(1, 2, 3, 4) + tensor.component(1, 3, 4, 2))
        I, J = _DEPENDENT
        tensor.matrix[I, J] = tensor.matrix[J, I] = dependent
        return tensor

    def __eq__(self, other):
        """Compare operators exactly."""
        return (type(self) == type(other) and np.array_equal(self.matrix, other.matrix) and
                self.kappa_max == other.kappa_max)

    def __repr__(self):
        """Show the independent components."""
        return "CurvatureTensor4({})".format(self.to_json())


class QForm(object):
    """A quadratic form in the variables ``(l3, l4, h3, h4)``.

    Attributes:
        matrix (numpy.ndarray): Symmetric 4x4 matrix of the form.

    """

    def __init__(self, matrix):  # noqa: D107
        matrix = linalg.as_mat4(matrix)
        if np.max(np.abs(matrix - matrix.T)) > constants.EXACT_TOL:
            raise ValueError("quadratic form matrix must be symmetric")
        self.matrix = 0.5 * (matrix + matrix.T)

    def __call__(self, v):
        """Evaluate the form at ``v``."""
        v = linalg.as_vec4(v)
        return float(v.dot(self.matrix).dot(v))

    def singular_values(self):
        """Singular values in decreasing order."""
        return np.linalg.svd(self.matrix, compute_uv=False)

    def kernel(self, tol=constants.KERNEL_TOL):
        """Return an orthonormal basis of the numerical kernel, shape (4, k)."""
        _, singular, vt = np.linalg.svd(self.matrix)
        return vt[singular <= tol].T

    def __repr__(self):  # noqa: D105
        return "QForm({})".format(self.matrix.tolist())


def negative_parameters(func):
    """Decorate constructors taking ``(F, gamma, beta)`` that need ``gamma, beta < 0``.

    Raises:
        InvalidCurvatureParameters: if ``gamma`` or ``beta`` is not negative.

    """
    @wraps(func)
    def checked(F, gamma, beta, *args, **kwargs):
        if not (gamma < 0.0 and beta < 0.0):
            raise InvalidCurvatureParameters("gamma and beta must be negative, got {} and {}".format(gamma, beta))
        return func(F, gamma, beta, *args, **kwargs)
    return checked


@negative_parameters
def build_tensor(F, gamma, beta):
    """Build the curvature tensor attached to a skew-Hopf map.

    With ``F = [[a, b], [c, d]]`` the nonzero components, up to symmetry,
    are::

        R1212 = R3434 = 1
        R1313 = 1 + gamma          R1414 = 1 + beta
        R2323 = 1 + a^2 gamma + c^2 beta
        R2424 = 1 + b^2 gamma + d^2 beta
        R1323 = a gamma            R1424 = d beta
        R2324 = ab gamma + cd beta
        R1234 = (b gamma - c beta) / 3
        R2431 = -(2b gamma + c beta) / 3
        R2341 = -(2c beta + b gamma) / 3

    The remaining components vanish, including the families
    ``R121i = delta_i2``, ``R212i = delta_i1`` and ``R343i = delta_i4``.

    Args:
        F (PhiMap or array_like): The map ``F``.
        gamma (float): Negative curvature parameter.
        beta (float): Negative curvature parameter.

    Returns:
        CurvatureTensor4: The tensor, normalized to ``kappa_max = 1``.

    Raises:
        InvalidCurvatureParameters: if ``gamma >= 0`` or ``beta >= 0``.
        BianchiViolation: if the result fails the first Bianchi identity.

    """
    phi = F if isinstance(F, fibration.PhiMap) else fibration.PhiMap(F)
    a, b, c, d = phi.a, phi.b, phi.c, phi.d
    components = {
        (1, 2, 1, 2): 1.0,
        (3, 4, 3, 4): 1.0,
        (1, 2, 1, 3): 0.0,
        (1, 2, 1, 4): 0.0,
        (2, 1, 2, 3): 0.0,
        (2, 1, 2, 4): 0.0,
        (3, 4, 3, 1): 0.0,
        (3, 4, 3, 2): 0.0,
        (1, 3, 1, 3): 1.0 + gamma,
        (1, 4, 1, 4): 1.0 + beta,
        (2, 4, 2, 4): 1.0 + b * b * gamma + d * d * beta,
        (2, 3, 2, 3): 1.0 + a * a * gamma + c * c * beta,
        (1, 3, 2, 3): a * gamma,
        (2, 3, 2, 4): a * b * gamma + c * d * beta,
        (1, 4, 2, 4): d * beta,
        (1, 3, 1, 4): 0.0,
        (1, 2, 3, 4): (b * gamma - c * beta) / 3.0,
        (2, 4, 3, 1): -(2.0 * b * gamma + c * beta) / 3.0,
        (2, 3, 4, 1): -(2.0 * c * beta + b * gamma) / 3.0,
    }
    tensor = CurvatureTensor4.from_components(components)
    residual = tensor.bianchi_residual()
    if residual > constants.EXACT_TOL:
        raise BianchiViolation("first Bianchi identity fails by {}".format(residual))
    return tensor


def fubini_study_tensor(J=None):
    """Return the complex projective model tensor of holomorphic curvature 1.

    ``R(x,y,z,w) = 1/4 [<x,z><y,w> - <x,w><y,z> + <Jx,z><Jy,w> - <Jx,w><Jy,z>
    + 2 <Jx,y><Jz,w>]`` for an orthogonal complex structure ``J``, by
    default the Hopf structure.

    """
    J = fibration.hopf_structure().matrix if J is None else linalg.as_mat4(getattr(J, "matrix", J))
    G = J.T
    eye = np.eye(4)
    T = 0.25 * (np.einsum("ik,jl->ijkl", eye, eye) - np.einsum("il,jk->ijkl", eye, eye) +
                np.einsum("ik,jl->ijkl", G, G) - np.einsum("il,jk->ijkl", G, G) +
                2.0 * np.einsum("ij,kl->ijkl", G, G))
    return CurvatureTensor4.from_array(T)


def sectional(R, x, y):
    """Return the sectional curvature of ``R`` on ``span(x, y)``.

    Raises:
        DegeneratePlane: if ``|x|^2 |y|^2 - <x,y>^2 <= 1e-12``.

    """
    p = _bivector(linalg.as_vec4(x), linalg.as_vec4(y))
    area = float(p.dot(p))
    if area <= constants.EXACT_TOL:
        raise linalg.DegeneratePlane("x and y do not span a plane")
    return float(p.dot(R.matrix).dot(p)) / area


def q_form(R):
    """Assemble the form ``Q`` over ``(l3, l4, h3, h4)``.

    Blocks, for ``i, k, j, p`` in {3, 4}: ``R2i2k - delta_ik`` on the
    ``l`` variables, ``R1j1p - delta_jp`` on the ``h`` variables and
    ``R12ij + R2ij1`` between ``l_i`` and ``h_j``.

    """
    T = R.array()
    idx = (2, 3)
    lam = np.array([[T[1, i, 1, k] for k in idx] for i in idx]) - np.eye(2)
    h = np.array([[T[0, j, 0, p] for p in idx] for j in idx]) - np.eye(2)
    cross = np.array([[T[0, 1, i, j] + T[1, i, j, 0] for j in idx] for i in idx])
    return QForm(np.block([[lam, cross], [cross.T, h]]))


def _jacobi_operator(T, x):
    """The symmetric matrix of ``y -> R(x, y, x, y)``."""
    operator = np.einsum("abcd,a,c->bd", T, x, x)
    return 0.5 * (operator + operator.T)


def verify_r2_r3(R, F, samples, seed=constants.DEFAULT_SEED, sectional_tol=constants.COMPOSED_TOL,
                 angle_tol=constants.PLANE_ANGLE_TOL, uniqueness_gap=constants.UNIQUENESS_GAP,
                 trials=16):
    """Check that the fiber planes of ``F`` are the unique extremal planes of ``R``.

    For sampled ``(l3, l4)``:

    * R3: the sectional curvature on the fiber plane, in a randomly rotated
      basis, equals ``kappa_max``.
    * R2: for ``x = (1, 0, l3, l4) / norm`` the maximum of ``R(x, y, x, y)``
      over unit ``y`` orthogonal to ``x`` is the top eigenvalue of the Jacobi
      operator restricted to ``x^perp``. It must be separated from the next
      eigenvalue, its plane ``span(x, y)`` must be the fiber plane and no
      sampled ``y`` may exceed ``kappa_max``.

    Args:
        R (CurvatureTensor4): The tensor.
        F (PhiMap or array_like): The map whose fibers are checked.
        samples (int): Number of sampled fiber parameters.
        seed (int, optional): Sampling seed.
        sectional_tol (float, optional): Sectional curvature tolerance.
        angle_tol (float, optional): Largest principal angle between the
            extremal plane and the fiber plane.
        uniqueness_gap (float, optional): Smallest eigenvalue separation.
        trials (int, optional): Random ``y`` per sample for the extremality
            check.

    Returns:
        PropertyReport: The findings.

    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    rng = np.random.default_rng(seed)
    phi = F.matrix if isinstance(F, fibration.PhiMap) else linalg.as_mat2(F)
    T = R.array()
    bianchi = R.bianchi_residual()

    worst_r3 = worst_angle = 0.0
    worst_excess = -np.inf
    min_gap = np.inf
    for lam in rng.standard_normal((samples, 2)):
        fiber = fibration.phi_fiber(phi, lam[0], lam[1]).rotated(rng.uniform(0.0, 2.0 * np.pi))
        worst_r3 = max(worst_r3, abs(sectional(R, fiber.u, fiber.v) - R.kappa_max))

        x = linalg.unit([1.0, 0.0, lam[0], lam[1]])
        frame = scipy.linalg.null_space(x[None, :])
        operator = _jacobi_operator(T, x)
        values, vectors = np.linalg.eigh(frame.T.dot(operator).dot(frame))
        min_gap = min(min_gap, values[-1] - values[-2])
        extremal = linalg.gram_schmidt_plane(x, frame.dot(vectors[:, -1]))
        worst_angle = max(worst_angle, linalg.principal_angles(extremal, fiber)[1])

        directions = rng.standard_normal((trials, 3))
        ys = (directions / np.linalg.norm(directions, axis=1)[:, None]).dot(frame.T)
        trial_values = np.einsum("bd,nb,nd->n", operator, ys, ys)
        worst_excess = max(worst_excess, float(trial_values.max()) - R.kappa_max,
                           float(values[-1]) - R.kappa_max)

    r1 = bianchi <= constants.EXACT_TOL
    r2 = bool(min_gap > uniqueness_gap and worst_angle < angle_tol and worst_excess <= sectional_tol)
    r3 = bool(worst_r3 <= sectional_tol)
    report = models.PropertyReport(
        r1=r1, r2_passed=r2, r2_worst_angle=worst_angle, r2_min_gap=float(min_gap),
        r2_worst_excess=worst_excess, r2_samples=samples, r3_passed=r3, r3_worst_residual=worst_r3,
        r3_samples=samples, worst_residual=max(bianchi, worst_r3, worst_angle, worst_excess, 0.0))
    log.info("curvature properties: R1=%s R2=%s R3=%s, worst residual %g", r1, r2, r3,
             report.worst_residual)
    return report


def recover_fibration(R, kernel_tol=constants.KERNEL_TOL, kernel_gap=constants.KERNEL_GAP):
    """Read the map ``F`` off the kernel of :func:`q_form`.

    The kernel of ``Q`` consists of the vectors ``(l, F l)``. With a kernel
    basis split into its ``l`` rows ``Lam`` and ``h`` rows ``H``,
    ``F = H Lam^-1``.

    Args:
        R (CurvatureTensor4): The tensor.
        kernel_tol (float, optional): Kernel singular value threshold.
        kernel_gap (float, optional): Smallest admissible nonzero singular
            value.

    Returns:
        PhiMap: The recovered map.

    Raises:
        KernelDimension: if ``Q`` does not have a clean 2-dimensional
            kernel that is a graph over the ``l`` variables.
        RealEigenvalues: if the recovered map has real eigenvalues.

    """
    Q = q_form(R)
    singular = Q.singular_values()
    if not (singular[2] < kernel_tol and singular[1] > kernel_gap):
        raise KernelDimension("Q has singular values {}".format(singular.tolist()))
    basis = Q.kernel(kernel_tol)
    lam, h = basis[:2], basis[2:]
    if abs(np.linalg.det(lam)) < constants.EXACT_TOL:
        raise KernelDimension("kernel of Q is not a graph over (l3, l4)")
    F = np.linalg.solve(lam.T, h.T).T
    log.debug("recovered F = %s", F.tolist())
    return fibration.PhiMap(F)


class BianchiViolation(GeometryError):
    """Raised when a built tensor fails the first Bianchi identity."""

    pass


class KernelDimension(GeometryError):
    """Raised when the form Q does not have a 2-dimensional kernel."""

    pass


class InvalidCurvatureParameters(GeometryError):
    """Raised when gamma or beta is not negative."""

    pass
