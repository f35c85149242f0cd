"""Serializable records produced by the library.

The records here are plain containers. Each class lists in ``attrs`` how its
attributes map to keys of its JSON representation; a tuple is a path into
nested objects. Records are rebuilt from JSON with ``from_json``.

For example, :class:`PropertyReport` stores ``r2_passed`` under
``{"r2": {"passed": ...}}``.

Arrays are converted to nested lists and floats are written with their
shortest round-trip representation. Negative zero is written as ``0.0`` so
that equal reports serialize to identical bytes.

"""

import csv

import numpy as np

from great_circles import constants, linalg


def plain(value):
    """Convert numpy values, recursively, into JSON-ready python values."""
    if isinstance(value, dict):
        return dict((k, plain(v)) for k, v in value.items())
    if isinstance(value, np.ndarray):
        return [plain(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not np.isfinite(value):
            return None
        return value + 0.0
    return value


class Record(object):
    """Base class for the serializable results of the library.

    Subclasses define ``attrs`` (attribute name to JSON key or key path) and
    may name in ``arrays`` the attributes that are held as numpy arrays.

    """

    attrs = {}
    arrays = ()

    def __init__(self, **kwargs):  # noqa: D107
        unknown = set(kwargs) - set(self.attrs)
        if unknown:
            raise TypeError("unexpected fields: {}".format(", ".join(sorted(unknown))))
        for key in self.attrs:
            self._set(key, kwargs.get(key))

    def _set(self, key, value):
        if key in self.arrays and value is not None:
            value = np.asarray(value, dtype=float)
        setattr(self, key, value)

    @classmethod
    def from_json(cls, model_json):
        """Rebuild a record from its JSON representation."""
        record = cls.__new__(cls)
        record._build(model_json)
        return record

    def _build(self, model_json):
        """Assemble the record from a JSON representation.

        Uses ``self.attrs`` to pull values from ``model_json``. Keys missing
        from ``model_json`` become ``None``.

        """
        for key, path in self.attrs.items():
            try:
                self._set(key, Record._get_from_dict(model_json, path))
            except KeyError:
                self._set(key, None)

    @staticmethod
    def _get_from_dict(data_dict, map_list):
        """Retrieve the value corresponding to ``map_list`` in ``data_dict``.

        Args:
            data_dict (dict): The dictionary to retrieve value from.
            map_list (list, tuple or str): A key, or a path of keys.

        """
        if isinstance(map_list, (list, tuple)):
            for k in map_list:
                data_dict = data_dict[k]
        else:
            data_dict = data_dict[map_list]
        return data_dict

    @staticmethod
    def _set_in_dict(data_dict, map_list, value):
        if isinstance(map_list, (list, tuple)):
            for k in map_list[:-1]:
                data_dict = data_dict.setdefault(k, {})
            map_list = map_list[-1]
        data_dict[map_list] = value

    def to_json(self):
        """Return the JSON representation as a dictionary."""
        model_json = {}
        for key, path in self.attrs.items():
            Record._set_in_dict(model_json, path, plain(getattr(self, key)))
        return model_json

    def __eq__(self, other):
        """Records are equal if they have the same type and serialize alike."""
        return type(self) == type(other) and self.to_json() == other.to_json()

    def __ne__(self, other):  # noqa: D105
        return not self == other

    def __repr__(self):
        """Nicer printing of records."""
        return "{}({})".format(type(self).__name__, self.to_json())


class FibrationReport(Record):
    """Findings of :func:`great_circles.fibration.verify_fibration`.

    Attributes:
        clean (bool): No two sampled fibers intersect outside the origin.
        pairs (int): Number of fiber pairs checked.
        min_separation_sv (float): Smallest separation singular value over
            non-coincident pairs, or ``None`` if every pair coincided.
        witness (list): Two base points whose fibers intersect, or ``None``.

    """

    attrs = {
        "clean": "clean",
        "pairs": "pairs",
        "min_separation_sv": "minSeparationSV",
        "witness": "witness",
    }


class BaseSurfaceSample(Record):
    """Sampled points of the base surface of a fibration in S^2 x S^2.

    Attributes:
        lambdas (numpy.ndarray): Fiber parameters ``(l3, l4)``, shape (N, 2).
            A fiber inside the frame hyperplane ``x1 = 0`` has infinite
            parameters.
        xi_minus (numpy.ndarray): Unit anti-self-dual parts, shape (N, 3).
        xi_plus (numpy.ndarray): Unit self-dual parts, shape (N, 3).

    """

    attrs = {
        "lambdas": "lambda",
        "xi_minus": "xiMinus",
        "xi_plus": "xiPlus",
    }
    arrays = ("lambdas", "xi_minus", "xi_plus")
    csv_header = ("lambda3", "lambda4", "xm1", "xm2", "xm3", "xp1", "xp2", "xp3")

    def __len__(self):  # noqa: D105
        return len(self.xi_minus)

    def factor(self, name):
        """Return the factor ``"xiMinus"`` or ``"xiPlus"`` as an (N, 3) array."""
        if name == "xiMinus":
            return self.xi_minus
        if name == "xiPlus":
            return self.xi_plus
        raise KeyError(name)

    @staticmethod
    def other(name):
        """Return the name of the other factor."""
        return {"xiMinus": "xiPlus", "xiPlus": "xiMinus"}[name]

    def subset(self, indices):
        """Return the sample restricted to ``indices``."""
        return BaseSurfaceSample(lambdas=self.lambdas[indices],
                                 xi_minus=self.xi_minus[indices],
                                 xi_plus=self.xi_plus[indices])

    def to_json(self):
        """Return ``{"points": [{"lambda", "xiMinus", "xiPlus"}, ...]}``."""
        return {"points": [{"lambda": plain(l), "xiMinus": plain(m), "xiPlus": plain(p)}
                           for l, m, p in zip(self.lambdas, self.xi_minus, self.xi_plus)]}

    def _build(self, model_json):
        points = model_json["points"]
        for key, path in self.attrs.items():
            values = [[np.inf if v is None else v for v in point[path]] for point in points]
            self._set(key, np.reshape(values, (len(points), -1)))

    def csv_rows(self):
        """Yield the CSV header followed by one row per point."""
        yield self.csv_header
        for l, m, p in zip(self.lambdas, self.xi_minus, self.xi_plus):
            yield tuple(repr(float(v) + 0.0) for v in np.concatenate((l, m, p)))

    def write_csv(self, stream):
        """Write :meth:`csv_rows` to a text stream."""
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerows(self.csv_rows())


class LipschitzReport(Record):
    """Result of :func:`great_circles.grassmann.lipschitz_check`.

    Attributes:
        max_ratio (float): Largest ratio of image to domain arc distance.
        witness (list): Indices of the pair attaining ``max_ratio``.
        domain_factor (str): ``"xiMinus"`` or ``"xiPlus"``.
        pairs_checked (int): Number of pairs with separated domain points.

    """

    attrs = {
        "max_ratio": "maxRatio",
        "witness": "witness",
        "domain_factor": "domainFactor",
        "pairs_checked": "pairsChecked",
    }

    def passed(self, tol=constants.LIPSCHITZ_TOL):
        """Return ``True`` if the sampled map is distance decreasing."""
        return self.max_ratio <= 1.0 + tol


class GageDecomposition(Record):
    """A base surface written as projection, linear map and inverse projection.

    A domain point ``x`` is projected to the plane with normal
    ``plane_normal``, mapped by ``L`` into the plane with normal
    ``image_normal`` and lifted back to the hemisphere around
    ``image_normal``.

    Attributes:
        plane_normal (numpy.ndarray): Normal of the projection plane.
        image_normal (numpy.ndarray): Center of the image hemisphere.
        L (numpy.ndarray): 2x2 matrix of the linear map in the frames
            :func:`great_circles.linalg.complement_frame` gives the planes.
        rank (int): Number of singular values of ``L`` above the rank tolerance.
        operator_norm (float): Largest singular value of ``L``.
        degenerate (bool): ``True`` when ``L = 0``; ``plane_normal`` is then
            arbitrary.
        image_in_hemisphere (bool): All sampled images lie in the open
            hemisphere around ``image_normal``.
        residual (float): Root mean square arc distance of the fit.
        domain_factor (str): The factor used as domain.

    """

    attrs = {
        "plane_normal": "planeNormal",
        "image_normal": "imageNormal",
        "L": "L",
        "rank": "rank",
        "operator_norm": "operatorNorm",
        "degenerate": "degenerate",
        "image_in_hemisphere": "imageInHemisphere",
        "residual": "residual",
        "domain_factor": "domainFactor",
    }
    arrays = ("plane_normal", "image_normal", "L")

    def linear_part(self):
        """Return the 3x3 matrix ``E_image L E_plane^T``."""
        return (linalg.complement_frame(self.image_normal)
                .dot(self.L).dot(linalg.complement_frame(self.plane_normal).T))

    def predict(self, points):
        """Evaluate the decomposition on domain points, shape (N, 3)."""
        tangent = np.asarray(points, dtype=float).dot(self.linear_part().T)
        height = np.sqrt(np.clip(1.0 - np.sum(tangent ** 2, axis=1), 0.0, None))
        return tangent + height[:, None] * self.image_normal[None, :]


class PropertyReport(Record):
    """Result of :func:`great_circles.curvature.verify_r2_r3`.

    ``r1`` covers the symmetries and the first Bianchi identity, ``r2`` the
    unique extremal plane through sampled directions and ``r3`` the
    extremal curvature on fiber planes.

    """

    attrs = {
        "r1": "r1",
        "r2_passed": ("r2", "passed"),
        "r2_worst_angle": ("r2", "worstAngle"),
        "r2_min_gap": ("r2", "minGap"),
        "r2_worst_excess": ("r2", "worstExcess"),
        "r2_samples": ("r2", "samples"),
        "r3_passed": ("r3", "passed"),
        "r3_worst_residual": ("r3", "worstResidual"),
        "r3_samples": ("r3", "samples"),
        "worst_residual": "worstResidual",
    }

    @property
    def passed(self):
        """``True`` if R1, R2 and R3 all hold."""
        return bool(self.r1 and self.r2_passed and self.r3_passed)


class VolumeRecord(Record):
    """Volume constants of one model space.

    ``holder_residual`` is ``None`` when the Hoelder order ``an - a`` is
    below 2.

    """

    attrs = {
        "a": "a",
        "n": "n",
        "beta_quadrature": "betaQuadrature",
        "beta_closed_form": "betaClosedForm",
        "beta_relative_error": "betaRelativeError",
        "cross_volume": "crossVolume",
        "sphere_volume": "sphereVolume",
        "unit_bundle_residual": "lemma27Residual",
        "holder_residual": "holderResidual",
    }


class BergerMetricReport(Record):
    """Curvature data of the Berger metric shrinking Hopf circles to length 2 pi s.

    Attributes:
        s (float): Shrinking parameter in ``(0, 1]``.
        k_min (float): Smallest sectional curvature ``s^2``.
        k_max (float): Largest sectional curvature ``4 - 3 s^2``.
        fiber_length (float): ``2 pi s``.
        pinch (float): ``k_min / k_max``.
        inj_bound (float): ``pi / sqrt(k_max)``.
        inj_less_than_bound (bool): ``pi s < inj_bound``.
        boundary (bool): ``s^2`` lies within the boundary band around 1/3.

    """

    attrs = {
        "s": "s",
        "k_min": "kMin",
        "k_max": "kMax",
        "fiber_length": "fiberLength",
        "pinch": "pinch",
        "inj_bound": "injBound",
        "inj_less_than_bound": "injLessThanBound",
        "boundary": "boundary",
    }
    csv_header = ("s", "kMin", "kMax", "fiberLength", "pinch", "injBound", "injLessThanBound", "boundary")

    def csv_row(self):
        """Return the CSV row, floats in shortest round-trip form."""
        row = []
        for key in self.csv_header:
            value = plain(self.to_json()[key])
            row.append(("true" if value else "false") if isinstance(value, bool) else repr(value))
        return tuple(row)
