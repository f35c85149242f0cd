"""Volumes of the compact rank one symmetric model spaces.

The models are the projective spaces ``KP^n`` of real dimension ``an`` over
``K`` with ``a = dim K`` in {1, 2, 4, 8}, normalized to sectional curvature
between 1 and 4 (the round sphere of curvature 4 for ``n = 1``). Along a
unit speed geodesic from any point the volume density in polar coordinates
is ``f(t) = sin(t)^(an - a) |sin(2t) / 2|^(a - 1)``.

Everything is computed twice where possible: double integrals by composite
Gauss-Legendre quadrature, whose panels are split at the kinks of
``|sin 2t|``, and the same quantities in closed form through Euler's Beta
function.

Curvatures here are normalized to a maximum of 4, unlike the tensors of
:mod:`great_circles.curvature`.

"""

import logging
from functools import wraps

import numpy as np
from scipy import special
from scipy.integrate import solve_ivp

from great_circles import constants, models
from great_circles.linalg import GeometryError

log = logging.getLogger(__name__)

HALF_PI = 0.5 * np.pi

# Outer nodes per block when evaluating double integrals.
_OUTER_CHUNK = 1024


class ModelSpaceParams(object):
    """The model ``KP^n`` with ``a = dim K``.

    Attributes:
        a (int): 1, 2, 4 or 8.
        n (int): Projective dimension; must be 2 when ``a = 8``.

    """

    def __init__(self, a, n):
        """Validate the parameters.

        Raises:
            InvalidModelSpace: if ``a`` is not 1, 2, 4 or 8, ``n < 1``,
                ``a = 8`` with ``n != 2``, or ``an < 2``.

        """
        if a not in (1, 2, 4, 8) or int(a) != a:
            raise InvalidModelSpace("a must be one of 1, 2, 4, 8, got {}".format(a))
        if int(n) != n or n < 1:
            raise InvalidModelSpace("n must be a positive integer, got {}".format(n))
        if a == 8 and n != 2:
            raise InvalidModelSpace("the octonionic model only exists for n = 2")
        if a * n < 2:
            raise InvalidModelSpace("an must be at least 2")
        self.a = int(a)
        self.n = int(n)

    @property
    def dimension(self):
        """Real dimension ``an``."""
        return self.a * self.n

    @property
    def holder_order(self):
        """The exponent ``an - a`` of ``sin t`` in the volume density."""
        return self.a * self.n - self.a

    def __eq__(self, other):  # noqa: D105
        return type(self) == type(other) and (self.a, self.n) == (other.a, other.n)

    def __repr__(self):  # noqa: D105
        return "ModelSpaceParams(a={}, n={})".format(self.a, self.n)


class QuadratureConfig(object):
    """Settings of the composite Gauss-Legendre rules.

    Attributes:
        panels (int): Panels per axis before any doubling.
        nodes (int): Gauss-Legendre nodes per panel.
        rel_tol (float): Target relative change under panel doubling.
        max_doublings (int): Doublings tried before giving up.

    """

    def __init__(self, panels=constants.QUADRATURE_PANELS, nodes=constants.QUADRATURE_NODES,
                 rel_tol=constants.QUADRATURE_REL_TOL, max_doublings=constants.QUADRATURE_MAX_DOUBLINGS):
        if panels < 1 or nodes < 2 or not rel_tol > 0.0 or max_doublings < 1:
            raise ValueError("need panels >= 1, nodes >= 2, rel_tol > 0 and max_doublings >= 1")
        self.panels = int(panels)
        self.nodes = int(nodes)
        self.rel_tol = float(rel_tol)
        self.max_doublings = int(max_doublings)

    def __repr__(self):  # noqa: D105
        return "QuadratureConfig(panels={}, nodes={}, rel_tol={}, max_doublings={})".format(
            self.panels, self.nodes, self.rel_tol, self.max_doublings)


def model_space(func):
    """Decorate functions whose first argument is a model space.

    A plain ``(a, n)`` pair is accepted in place of a
    :class:`ModelSpaceParams` and validated.

    """
    @wraps(func)
    def with_params(p, *args, **kwargs):
        if not isinstance(p, ModelSpaceParams):
            p = ModelSpaceParams(*p)
        return func(p, *args, **kwargs)
    return with_params


def _check_angle(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < -constants.EXACT_TOL) or np.any(t > np.pi + constants.EXACT_TOL):
        raise ValueError("t must lie in [0, pi]")
    return t


def jacobi_fiber_factor(a, t):
    """Return ``|sin(2t) / 2|^(a - 1)``.

    These are the Jacobi fields along the ``a - 1`` directions tangent to the
    totally geodesic spheres of curvature 4 through the geodesic.

    """
    t = _check_angle(t)
    return np.abs(0.5 * np.sin(2.0 * t)) ** (a - 1)


def _density(p, t):
    return np.maximum(np.sin(t), 0.0) ** p.holder_order * np.abs(0.5 * np.sin(2.0 * t)) ** (p.a - 1)


@model_space
def model_volume_form(p, t):
    """Return the volume density ``sin(t)^(an - a) |sin(2t) / 2|^(a - 1)``.

    Args:
        p (ModelSpaceParams): The model.
        t (float or numpy.ndarray): Geodesic parameter in ``[0, pi]``.

    """
    t = _check_angle(t)
    return _density(p, t)


@model_space
def jacobi_determinant(p, t):
    """Integrate the Jacobi equation of the model and return ``|det Y(t)|``.

    ``Y'' + K Y = 0`` with ``Y(0) = 0``, ``Y'(0) = 1`` is solved for ``K = 1``
    (the ``an - a`` directions) and ``K = 4`` (the ``a - 1`` fiber
    directions) with :func:`scipy.integrate.solve_ivp`.

    """
    t = float(_check_angle(t))
    state = np.array([0.0, 1.0, 0.0, 1.0])
    if t > 0.0:
        def jacobi(_, y):
            return [y[1], -y[0], y[3], -4.0 * y[2]]

        solution = solve_ivp(jacobi, (0.0, t), state, method="DOP853", rtol=1e-12, atol=1e-14)
        state = solution.y[:, -1]
    return abs(state[0]) ** p.holder_order * abs(state[2]) ** (p.a - 1)


def _composite_rule(panels, nodes):
    """Composite Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = special.roots_legendre(nodes)
    width = 1.0 / panels
    left = np.arange(panels) * width
    points = (left[:, None] + 0.5 * (x[None, :] + 1.0) * width).ravel()
    weights = np.tile(0.5 * w * width, panels)
    return points, weights


def _double_integral(integrand, inner_limits, inner_kink, panels, nodes):
    """Integrate ``integrand(x, y)`` over ``0 <= x <= pi``, ``y`` between ``inner_limits(x)``.

    The outer axis is split at ``pi/2`` and the inner range at
    ``inner_kink(x)``; each piece gets ``ceil(panels / 2)`` panels.

    """
    half = -(-panels // 2)
    t, w = _composite_rule(half, nodes)
    xs = np.concatenate((HALF_PI * t, HALF_PI + HALF_PI * t))
    wx = np.concatenate((HALF_PI * w, HALF_PI * w))
    total = 0.0
    for start in range(0, len(xs), _OUTER_CHUNK):
        x = xs[start:start + _OUTER_CHUNK]
        lo, hi = inner_limits(x)
        kink = np.clip(inner_kink(x), lo, hi)
        inner = np.zeros_like(x)
        for a, b in ((lo, kink), (kink, hi)):
            span = b - a
            y = a[:, None] + span[:, None] * t[None, :]
            inner += integrand(x[:, None], y).dot(w) * span
        total += np.dot(wx[start:start + _OUTER_CHUNK], inner)
    return float(total)


def _triangle_integral(profile_of_t, panels, nodes):
    """Integrate ``g(t)`` over ``0 <= x <= pi``, ``0 <= t <= pi - x``."""
    return _double_integral(lambda x, t: profile_of_t(t),
                            lambda x: (np.zeros_like(x), np.pi - x),
                            lambda x: np.full_like(x, HALF_PI), panels, nodes)


def _converged(evaluate, cfg, label):
    """Double panels until the relative change drops to ``cfg.rel_tol``.

    Returns:
        tuple: ``(value, errors)`` with one relative change per doubling.

    Raises:
        NoConvergence: if ``cfg.max_doublings`` doublings are not enough.

    """
    value = evaluate(cfg.panels)
    errors = []
    for doubling in range(1, cfg.max_doublings + 1):
        panels = cfg.panels * 2 ** doubling
        refined = evaluate(panels)
        errors.append(abs(refined - value) / abs(refined) if refined != 0.0 else abs(refined - value))
        value = refined
        log.debug("%s: %d panels, relative change %g", label, panels, errors[-1])
        if errors[-1] <= cfg.rel_tol:
            return value, errors
    raise NoConvergence("{} did not converge to {} after {} doublings (last change {})".format(
        label, cfg.rel_tol, cfg.max_doublings, errors[-1]))


def _beta_with_errors(p, cfg):
    def evaluate(panels):
        return _double_integral(lambda x, y: _density(p, y - x),
                                lambda x: (x, np.full_like(x, np.pi)),
                                lambda x: x + HALF_PI, panels, cfg.nodes)
    return _converged(evaluate, cfg, "beta{}".format((p.a, p.n)))


@model_space
def beta_quadrature(p, cfg=None):
    """Evaluate ``beta(a, n) = int_0^pi int_x^pi f(y - x) dy dx`` by quadrature.

    Args:
        p (ModelSpaceParams): The model.
        cfg (QuadratureConfig, optional): Quadrature settings.

    Raises:
        NoConvergence: if panel doubling does not reach ``cfg.rel_tol``.

    """
    value, errors = _beta_with_errors(p, cfg or QuadratureConfig())
    log.info("beta%s = %.17g after %d doublings", (p.a, p.n), value, len(errors))
    return value


@model_space
def panel_doubling_errors(p, cfg=None):
    """Return the relative changes of :func:`beta_quadrature` under panel doubling."""
    return _beta_with_errors(p, cfg or QuadratureConfig())[1]


@model_space
def beta_closed_form(p):
    """Return ``beta(a, n) = (pi / 2) B(an / 2, a / 2)``.

    Example:
        >>> beta_closed_form((2, 2)) == np.pi / 4
        True

    """
    return float(HALF_PI * special.beta(0.5 * p.dimension, 0.5 * p.a))


def sphere_volume(N):
    """Return the volume ``2 pi^((N+1)/2) / Gamma((N+1)/2)`` of the unit sphere S^N."""
    if int(N) != N or N < 1:
        raise ValueError("N must be a positive integer, got {}".format(N))
    return float(2.0 * np.pi ** (0.5 * (N + 1)) / special.gamma(0.5 * (N + 1)))


@model_space
def cross_volume(p):
    """Return the volume ``beta(a, n) V(S^(an-1)) / pi`` of the model."""
    return beta_closed_form(p) * sphere_volume(p.dimension - 1) / np.pi


@model_space
def unit_bundle_residual(p, cfg=None):
    """Relative gap in ``pi V(M)^2 = V(UM) J`` for the model ``M``.

    ``V(UM) = V(S^(an-1)) V(M)`` is the volume of the unit tangent bundle and
    ``J = int_0^pi int_0^(pi-x) f(t) dt dx`` is integrated by quadrature.

    Raises:
        NoConvergence: if the quadrature does not converge.

    """
    cfg = cfg or QuadratureConfig()
    J, _ = _converged(lambda panels: _triangle_integral(lambda t: _density(p, t), panels, cfg.nodes),
                      cfg, "J{}".format((p.a, p.n)))
    volume = cross_volume(p)
    lhs = np.pi * volume ** 2
    return float(abs(lhs - sphere_volume(p.dimension - 1) * volume * J) / lhs)


def perturbed_profile(coefficients):
    """Return the profile ``t -> sin t (1 + sum_k c_k sin(t)^(2k))``, ``k >= 1``."""
    coefficients = np.asarray(coefficients, dtype=float)

    def profile(t):
        s = np.asarray(np.sin(t))
        powers = s[..., None] ** (2 * np.arange(1, len(coefficients) + 1))
        return s * (1.0 + powers.dot(coefficients))
    return profile


@model_space
def holder_sides(p, cfg=None, profile=np.sin):
    """Return both sides of the Hoelder inequality of order ``q = an - a``.

    With the weight ``w(t) = |sin(2t) / 2|^(a - 1)`` and all integrals over
    ``0 <= x <= pi``, ``0 <= t <= pi - x``::

        J     = int phi^q w
        bound = (int phi sin^(q-1) w)^q / (int sin^q w)^(q-1)

    ``J >= bound``, with equality exactly when ``phi`` is a multiple of
    ``sin``.

    Args:
        p (ModelSpaceParams): Model with ``an - a >= 2``.
        cfg (QuadratureConfig, optional): Quadrature settings.
        profile (callable, optional): Positive profile ``phi``.

    Returns:
        tuple: ``(J, bound)``.

    Raises:
        InvalidModelSpace: if ``an - a < 2``.

    """
    order = p.holder_order
    if order < 2:
        raise InvalidModelSpace("the Hoelder order an - a must be at least 2, got {}".format(order))
    cfg = cfg or QuadratureConfig()

    def weight(t):
        return np.abs(0.5 * np.sin(2.0 * t)) ** (p.a - 1)

    def integral(g, label):
        return _converged(lambda panels: _triangle_integral(g, panels, cfg.nodes), cfg, label)[0]

    J = integral(lambda t: np.abs(profile(t)) ** order * weight(t), "holder lhs")
    mixed = integral(lambda t: profile(t) * np.maximum(np.sin(t), 0.0) ** (order - 1) * weight(t),
                     "holder mixed")
    reference = integral(lambda t: np.maximum(np.sin(t), 0.0) ** order * weight(t), "holder reference")
    return J, mixed ** order / reference ** (order - 1)


@model_space
def holder_equality_residual(p, cfg=None, epsilon=0.0):
    """Return ``(J - bound) / J`` for the profile ``sin t (1 + epsilon sin^2 t)``."""
    profile = perturbed_profile([epsilon]) if epsilon else np.sin
    J, bound = holder_sides(p, cfg, profile)
    return float((J - bound) / J)


@model_space
def volume_record(p, cfg=None):
    """Compute all volume constants of a model.

    Returns:
        VolumeRecord: The record; ``holder_residual`` is ``None`` when
        ``an - a < 2``.

    """
    cfg = cfg or QuadratureConfig()
    quadrature = beta_quadrature(p, cfg)
    closed = beta_closed_form(p)
    return models.VolumeRecord(
        a=p.a, n=p.n, beta_quadrature=quadrature, beta_closed_form=closed,
        beta_relative_error=abs(quadrature - closed) / closed, cross_volume=cross_volume(p),
        sphere_volume=sphere_volume(p.dimension - 1), unit_bundle_residual=unit_bundle_residual(p, cfg),
        holder_residual=holder_equality_residual(p, cfg) if p.holder_order >= 2 else None)


def berger_report(s, boundary_tol=constants.BERGER_BOUNDARY_TOL):
    """Curvature bounds of the Berger metric with Hopf circles of length ``2 pi s``.

    Raises:
        InvalidModelSpace: if ``s`` is not in ``(0, 1]``.

    """
    s = float(s)
    if not 0.0 < s <= 1.0:
        raise InvalidModelSpace("s must lie in (0, 1], got {}".format(s))
    k_min = s * s
    k_max = 4.0 - 3.0 * k_min
    inj_bound = np.pi / np.sqrt(k_max)
    return models.BergerMetricReport(
        s=s, k_min=k_min, k_max=k_max, fiber_length=2.0 * np.pi * s, pinch=k_min / k_max,
        inj_bound=float(inj_bound), inj_less_than_bound=bool(np.pi * s < inj_bound),
        boundary=bool(abs(k_min - 1.0 / 3.0) < boundary_tol))


def berger_sweep(s_min, s_max, steps, boundary_tol=constants.BERGER_BOUNDARY_TOL):
    """Return :func:`berger_report` for ``steps`` evenly spaced values of ``s``."""
    if steps < 1 or s_min > s_max:
        raise ValueError("need steps >= 1 and s_min <= s_max")
    return [berger_report(s, boundary_tol) for s in np.linspace(s_min, s_max, int(steps))]


class InvalidModelSpace(GeometryError):
    """Raised when model space or Berger metric parameters are out of range."""

    pass


class NoConvergence(GeometryError):
    """Raised when quadrature does not reach its tolerance."""

    pass
