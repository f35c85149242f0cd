import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
from great_circles import curvature, fibration, grassmann  # noqa: E402

HOPF_F = np.array([[0.0, -1.0], [1.0, 0.0]])
RANK_ONE_F = np.array([[0.0, -4.0], [1.0, 0.0]])
RANK_TWO_F = np.array([[1.0, -3.0], [2.0, -1.0]])


def random_rotation(rng):
    """A random element of SO(4)."""
    q, r = np.linalg.qr(rng.standard_normal((4, 4)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0.0:
        q[:, 0] = -q[:, 0]
    return q


def random_phi(rng, margin=1e-6, bound=3.0):
    """A random 2x2 matrix without real eigenvalues, entries in [-bound, bound]."""
    while True:
        F = rng.uniform(-bound, bound, (2, 2))
        if (F[0, 0] - F[1, 1]) ** 2 + 4.0 * F[0, 1] * F[1, 0] < -margin:
            return F


def random_real_phi(rng):
    """A random 2x2 matrix with distinct real eigenvalues."""
    while True:
        F = rng.uniform(-3.0, 3.0, (2, 2))
        if (F[0, 0] - F[1, 1]) ** 2 + 4.0 * F[0, 1] * F[1, 0] > 1e-3:
            return F


@pytest.fixture(scope="class")
def hopf(request):
    request.cls.hopf = fibration.GreatCircleFibration.hopf()
    yield


@pytest.fixture(scope="class")
def skew(request):
    request.cls.rank_one = fibration.GreatCircleFibration.special_basis(RANK_ONE_F)
    request.cls.rank_two = fibration.GreatCircleFibration.special_basis(RANK_TWO_F)
    yield


@pytest.fixture(scope="class")
def surfaces(request):
    request.cls.hopf_surface = grassmann.base_surface(fibration.GreatCircleFibration.hopf(), 500)
    request.cls.rank_one_surface = grassmann.base_surface(
        fibration.GreatCircleFibration.special_basis(RANK_ONE_F), 500)
    request.cls.rank_two_surface = grassmann.base_surface(
        fibration.GreatCircleFibration.special_basis(RANK_TWO_F), 500)
    yield


@pytest.fixture(scope="class")
def tensors(request):
    request.cls.hopf_tensor = curvature.build_tensor(HOPF_F, -1.0, -1.0)
    request.cls.skew_tensor = curvature.build_tensor(RANK_TWO_F, -0.5, -2.0)
    yield
