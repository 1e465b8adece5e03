"""R^n with the arithmetic average."""

from __future__ import annotations

import numpy as np

from ..core import Space
from ..errors import DomainError


def _check_dims(x, y):
    if np.shape(x) != np.shape(y):
        raise DomainError("dimension mismatch", shapes=(np.shape(x), np.shape(y)))


def euclid_distance(x, y) -> float:
    _check_dims(x, y)
    return float(np.linalg.norm(np.atleast_1d(np.subtract(y, x))))


def euclid_average(w: float, x, y):
    _check_dims(x, y)
    return (1.0 - w) * np.asarray(x, dtype=float) + w * np.asarray(y, dtype=float)


class EuclideanSpace(Space):
    name = "euclidean"
    intrinsic = True
    euclidean_embedded = True

    def __init__(self, tol: float = 1e-9):
        self.tol = tol

    def distance(self, x, y) -> float:
        return euclid_distance(x, y)

    def average(self, w, x, y):
        return euclid_average(w, x, y)

    def embed(self, x):
        return np.atleast_1d(np.asarray(x, dtype=float))
