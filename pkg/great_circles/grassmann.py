"""Base surfaces of fibrations in G(2,4) = S^2 x S^2.

Every fiber of a great circle fibration is an oriented plane, hence a point
``(xiMinus, xiPlus)`` of the Grassmannian. The set of these points is the
base surface of the fibration. For a fibration it is the graph of a distance
decreasing map from one factor to the other (constant for Hopf fibrations),
and for skew-Hopf fibrations that map is an orthogonal projection to a
plane, followed by a linear map and a lift back to a hemisphere.

"""

import logging

import numpy as np
import scipy.optimize
from scipy.spatial import cKDTree

from great_circles import constants, fibration, linalg, models
from great_circles.linalg import GeometryError

log = logging.getLogger(__name__)

FACTORS = ("xiMinus", "xiPlus")


def _fiber_parameters(f, bases):
    """Return ``(l3, l4)`` of the frame line where each fiber meets ``x2 = 0``."""
    frame = np.einsum("ij,njk->nik", np.linalg.inv(f.basis), bases)
    u, v = frame[:, :, 0], frame[:, :, 1]
    w = u * v[:, 1:2] - v * u[:, 1:2]
    with np.errstate(divide="ignore", invalid="ignore"):
        lambdas = w[:, 2:] / w[:, :1]
    return np.where(np.isfinite(lambdas), lambdas, np.inf)


def surface_from_base_points(f, points, dedup_tol=constants.COINCIDENCE_TOL):
    """Compute the base surface points of the fibers through ``points``.

    Fibers are oriented by ``(x, J x)``, so base points on a common fiber give
    the same Grassmannian point; those duplicates are merged, keeping the
    first occurrence.

    Args:
        f (GreatCircleFibration): The fibration.
        points (numpy.ndarray): Nonzero points of R^4 in ambient
            coordinates, shape (N, 4). They are normalized first.
        dedup_tol (float, optional): Distance in R^6 below which two surface
            points are merged.

    Returns:
        BaseSurfaceSample: One row per distinct fiber.

    """
    points = np.asarray(points, dtype=float)
    points = points / np.linalg.norm(points, axis=1)[:, None]
    bases = fibration.fiber_bases(f, points)
    minus, plus = linalg.plucker_split_rows(bases)
    norms = np.column_stack((np.linalg.norm(minus, axis=1), np.linalg.norm(plus, axis=1)))
    if np.any(np.abs(norms - linalg.SQRT_HALF) > constants.UNIT_TOL):
        raise linalg.DegeneratePlane("fiber bivector is not a unit simple bivector")
    minus /= norms[:, :1]
    plus /= norms[:, 1:]

    keep = np.ones(len(points), dtype=bool)
    pairs = cKDTree(np.hstack((minus, plus))).query_pairs(r=dedup_tol, output_type="ndarray")
    if len(pairs):
        keep[pairs.max(axis=1)] = False
        log.debug("merged %d base points lying on repeated fibers", len(points) - keep.sum())
    return models.BaseSurfaceSample(lambdas=_fiber_parameters(f, bases[keep]),
                                    xi_minus=minus[keep], xi_plus=plus[keep])


def base_surface(f, sample_count, seed=constants.DEFAULT_SEED, dedup_tol=constants.COINCIDENCE_TOL):
    """Sample the base surface of a fibration.

    Every fiber meets the hemisphere ``x1 > 0`` of the frame 2-sphere
    ``S^3 n {x2 = 0}`` exactly once, so a spiral point set on that
    hemisphere, turned by a seeded random offset, samples the fibers evenly.

    Args:
        f (GreatCircleFibration): The fibration.
        sample_count (int): Number of base points, at least 4.
        seed (int, optional): Seed of the spiral offset.
        dedup_tol (float, optional): See :func:`surface_from_base_points`.

    Returns:
        BaseSurfaceSample: The sampled surface.

    """
    if sample_count < 4:
        raise ValueError("sample_count must be at least 4")
    rng = np.random.default_rng(seed)
    spiral = linalg.fibonacci_sphere(sample_count, rotation=rng.uniform(0.0, sample_count), semi=True)
    frame_points = np.column_stack((spiral[:, 2], np.zeros(sample_count), spiral[:, 0], spiral[:, 1]))
    return surface_from_base_points(f, f.to_ambient(frame_points), dedup_tol)


def _spread(points):
    return float(np.max(np.linalg.norm(points - points[0], axis=1)))


def _single_valued(domain, image, tol):
    pairs = cKDTree(domain).query_pairs(r=tol, output_type="ndarray")
    if not len(pairs):
        return True
    return not np.any(np.linalg.norm(image[pairs[:, 0]] - image[pairs[:, 1]], axis=1) > tol)


def _distance_ratios(domain, image, skip):
    rows, cols = np.triu_indices(len(domain), 1)
    separation = linalg.spherical_distance(domain[rows], domain[cols])
    kept = separation >= skip
    ratios = linalg.spherical_distance(image[rows[kept]], image[cols[kept]]) / separation[kept]
    return ratios, rows[kept], cols[kept]


def graph_domain(s, tol=constants.GRAPH_TOL, skip=constants.LIPSCHITZ_SKIP,
                 lipschitz_tol=constants.LIPSCHITZ_TOL):
    """Choose the factor over which the base surface is a graph.

    A constant factor is the image and the other one the domain. Otherwise
    each factor over which the sample is single valued is a candidate, and
    a candidate over which the map is distance decreasing is preferred. Ties
    go to the factor whose points spread more (smaller norm of their mean),
    then to the smaller distance ratio.

    Args:
        s (BaseSurfaceSample): Sample with at least 4 points.
        tol (float, optional): Coincidence threshold of points and spread
            threshold of constant factors.
        skip (float, optional): Domain distance below which pairs are not
            used for distance ratios.
        lipschitz_tol (float, optional): Slack of the distance decreasing test.

    Returns:
        str: ``"xiMinus"`` or ``"xiPlus"``.

    Raises:
        NotAGraph: if the sample is single valued over neither factor.

    """
    if len(s) < 4:
        raise ValueError("graph_domain needs at least 4 points")
    spreads = dict((name, _spread(s.factor(name))) for name in FACTORS)
    for name in FACTORS:
        if spreads[name] < tol and spreads[s.other(name)] >= tol:
            log.debug("factor %s is constant", name)
            return s.other(name)

    candidates = []
    for name in FACTORS:
        domain, image = s.factor(name), s.factor(s.other(name))
        if not _single_valued(domain, image, tol):
            log.debug("sample is multivalued over %s", name)
            continue
        ratios, _, _ = _distance_ratios(domain, image, skip)
        max_ratio = float(ratios.max()) if len(ratios) else 0.0
        mean_norm = float(np.linalg.norm(domain.mean(axis=0)))
        candidates.append((max_ratio > 1.0 + lipschitz_tol, mean_norm, max_ratio, name))
    if not candidates:
        raise NotAGraph("sample is multivalued over both factors")
    decreasing = [c for c in candidates if not c[0]]
    if decreasing:
        return min(decreasing, key=lambda c: c[1])[3]
    return min(candidates, key=lambda c: c[2])[3]


def lipschitz_check(s, domain_factor=None, skip=constants.LIPSCHITZ_SKIP):
    """Measure how much the graph map of a base surface stretches distances.

    Args:
        s (BaseSurfaceSample): The sample.
        domain_factor (str, optional): Domain factor; chosen with
            :func:`graph_domain` if not given.
        skip (float, optional): Pairs closer than this in the domain are
            skipped.

    Returns:
        LipschitzReport: Largest ratio of image to domain arc distance.

    Raises:
        DomainCollapse: if no two domain points are ``skip`` apart.

    """
    if len(s) < 2:
        raise ValueError("lipschitz_check needs at least 2 points")
    if domain_factor is None:
        domain_factor = graph_domain(s)
    ratios, rows, cols = _distance_ratios(s.factor(domain_factor),
                                          s.factor(s.other(domain_factor)), skip)
    if not len(ratios):
        raise DomainCollapse("all domain points coincide")
    k = int(np.argmax(ratios))
    report = models.LipschitzReport(max_ratio=float(ratios[k]), witness=[int(rows[k]), int(cols[k])],
                                    domain_factor=domain_factor, pairs_checked=len(ratios))
    log.info("max distance ratio over %s: %.12g (%d pairs)", domain_factor, report.max_ratio,
             report.pairs_checked)
    return report


def _fit_normal(X, Y, m):
    """Best linear part for the image normal ``m`` and the fit residuals."""
    if np.dot(Y.mean(axis=0), m) < 0.0:
        m = -m
    tangential = Y - np.outer(Y.dot(m), m)
    At = np.linalg.lstsq(X, tangential, rcond=None)[0]
    predicted = X.dot(At)
    height = np.sqrt(np.clip(1.0 - np.sum(predicted ** 2, axis=1), 0.0, None))
    residuals = np.concatenate(((predicted - tangential).ravel(), Y.dot(m) - height))
    return residuals, At.T, m


def _fit_from(X, Y, start):
    chart = linalg.complement_frame(start)

    def normal(t):
        return linalg.unit(start + chart.dot(t))

    result = scipy.optimize.least_squares(lambda t: _fit_normal(X, Y, normal(t))[0], np.zeros(2),
                                          method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    residuals, A, m = _fit_normal(X, Y, normal(result.x))
    return float(np.dot(residuals, residuals)), A, m


def _rms_arc(predicted, Y):
    return float(np.sqrt(np.mean(linalg.spherical_distance(predicted, Y) ** 2)))


def gage_decompose(s, domain_factor=None, restarts=constants.FIT_RESTARTS, seed=constants.DEFAULT_SEED,
                   fit_tol=constants.FIT_TOL, rank_tol=constants.RANK_TOL):
    """Fit the base surface as projection, linear map and inverse projection.

    The model is ``y = A x + sqrt(1 - |A x|^2) m`` with ``A`` linear into
    the plane normal to ``m``. ``A`` enters linearly, so for each trial
    ``m`` it is solved by linear least squares and only ``m`` is searched,
    with Levenberg-Marquardt, from several starts: the normalized image
    mean and seeded perturbations of it. The lowest cost wins; ties go to
    the earliest start.

    Args:
        s (BaseSurfaceSample): Sample with at least 20 points.
        domain_factor (str, optional): Domain factor; chosen with
            :func:`graph_domain` if not given.
        restarts (int, optional): Number of starts.
        seed (int, optional): Seed of the perturbed starts.
        fit_tol (float, optional): Largest accepted RMS arc residual.
        rank_tol (float, optional): Singular value threshold for the rank.

    Returns:
        GageDecomposition: The fitted decomposition.

    Raises:
        FitFailed: if the sample has fewer than 20 points, or the RMS arc
            residual is not below ``fit_tol``.

    """
    if len(s) < 20:
        raise FitFailed("gage_decompose needs at least 20 points, got {}".format(len(s)))
    if domain_factor is None:
        domain_factor = graph_domain(s)
    X = s.factor(domain_factor)
    Y = s.factor(s.other(domain_factor))
    center = linalg.unit(Y.mean(axis=0))

    if _spread(Y) < constants.GRAPH_TOL:
        decomposition = models.GageDecomposition(
            plane_normal=[0.0, 0.0, 1.0], image_normal=center, L=np.zeros((2, 2)), rank=0,
            operator_norm=0.0, degenerate=True, image_in_hemisphere=True, residual=0.0,
            domain_factor=domain_factor)
        decomposition.residual = _rms_arc(decomposition.predict(X), Y)
        log.info("constant image: rank 0")
        return decomposition

    rng = np.random.default_rng(seed)
    starts = [center] + [linalg.unit(center + 0.3 * rng.standard_normal(3)) for _ in range(restarts - 1)]
    best = None
    for index, start in enumerate(starts):
        cost, A, m = _fit_from(X, Y, start)
        log.debug("restart %d: cost %g", index, cost)
        if best is None or cost < best[0]:
            best = (cost, A, m)
    _, A, m = best

    _, _, vt = np.linalg.svd(A)
    plane_normal = vt[2]
    if plane_normal[np.argmax(np.abs(plane_normal))] < 0.0:
        plane_normal = -plane_normal
    L = linalg.complement_frame(m).T.dot(A).dot(linalg.complement_frame(plane_normal))
    singular = np.linalg.svd(L, compute_uv=False)
    rank = int(np.sum(singular > rank_tol))
    decomposition = models.GageDecomposition(
        plane_normal=plane_normal, image_normal=m, L=L, rank=rank, operator_norm=float(singular[0]),
        degenerate=rank == 0, image_in_hemisphere=bool(np.all(Y.dot(m) > 0.0)), residual=0.0,
        domain_factor=domain_factor)
    decomposition.residual = _rms_arc(decomposition.predict(X), Y)
    if not decomposition.residual < fit_tol:
        raise FitFailed("RMS arc residual {} exceeds {}".format(decomposition.residual, fit_tol))
    log.info("decomposition over %s: rank %d, operator norm %.12g, residual %g", domain_factor, rank,
             decomposition.operator_norm, decomposition.residual)
    return decomposition


class NotAGraph(GeometryError):
    """Raised when a base surface is a graph over neither factor."""

    pass


class DomainCollapse(GeometryError):
    """Raised when all domain points of a base surface coincide."""

    pass


class FitFailed(GeometryError):
    """Raised when the decomposition fit does not reach its tolerance."""

    pass
