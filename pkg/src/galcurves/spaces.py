"""Metric primitives of Galilean space G3 and pseudo-Galilean space G3^1.

Vectors are triples ``(x, y, z)`` where ``x`` is the non-isotropic coordinate.
Anything indexable with three finite reals is accepted.
"""

from __future__ import annotations

import enum
import math
from typing import NamedTuple

from .errors import DegenerateVectorError

TOL = 1e-9


class Vec3(NamedTuple):
    x: float
    y: float
    z: float

    def __add__(self, other):
        return Vec3(self.x + other[0], self.y + other[1], self.z + other[2])

    def __sub__(self, other):
        return Vec3(self.x - other[0], self.y - other[1], self.z - other[2])

    def __mul__(self, c):
        return Vec3(c * self.x, c * self.y, c * self.z)

    __rmul__ = __mul__

    def __neg__(self):
        return Vec3(-self.x, -self.y, -self.z)


def vec3(v):
    x, y, z = (float(c) for c in v)
    if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(z)):
        raise ValueError(f"vector components must be finite, got {v!r}")
    return Vec3(x, y, z)


class VectorClass(str, enum.Enum):
    NON_ISOTROPIC = "NonIsotropic"
    SPACELIKE = "SpacelikeIsotropic"
    TIMELIKE = "TimelikeIsotropic"
    LIGHTLIKE = "Lightlike"
    ZERO = "Zero"

    def __str__(self):
        return self.value


def galilean_distance(p1, p2):
    """Distance between points of G3: |x2 - x1|, or the Euclidean (y, z) distance
    when the points lie in the same isotropic plane."""
    p1, p2 = vec3(p1), vec3(p2)
    if p1.x != p2.x:
        return abs(p2.x - p1.x)
    return math.hypot(p2.y - p1.y, p2.z - p1.z)


def pg_scalar_product(v1, v2):
    v1, v2 = vec3(v1), vec3(v2)
    if v1.x != 0 or v2.x != 0:
        return v1.x * v2.x
    return v1.y * v2.y - v1.z * v2.z


def pg_norm(v):
    """Pseudo-Galilean norm.

    For a non-isotropic vector this is ``x`` itself, sign included; callers
    that need a magnitude should take ``abs`` explicitly.
    """
    v = vec3(v)
    if v.x != 0:
        return v.x
    return math.sqrt(abs(v.y * v.y - v.z * v.z))


def classify_vector(v, tol=TOL):
    v = vec3(v)
    if abs(v.x) > tol:
        return VectorClass.NON_ISOTROPIC
    if abs(v.y) <= tol and abs(v.z) <= tol:
        return VectorClass.ZERO
    q = v.y * v.y - v.z * v.z
    if abs(q) <= tol * (v.y * v.y + v.z * v.z):
        return VectorClass.LIGHTLIKE
    return VectorClass.SPACELIKE if q > 0 else VectorClass.TIMELIKE


def _require_isotropic(*vs, tol=TOL):
    for v in vs:
        if abs(v.x) > tol:
            raise ValueError(f"expected an isotropic vector (x = 0), got {tuple(v)!r}")


def iso_inner_g3(v1, v2, tol=TOL):
    """Euclidean product of the (y, z) parts of two isotropic vectors of G3."""
    v1, v2 = vec3(v1), vec3(v2)
    _require_isotropic(v1, v2, tol=tol)
    return v1.y * v2.y + v1.z * v2.z


def parallel_residual(v1, v2, tol=TOL):
    """|sin| of the Euclidean angle between two isotropic vectors; 0 iff parallel.

    Blind to orientation: ``parallel_residual(v, -w) == parallel_residual(v, w)``.
    """
    v1, v2 = vec3(v1), vec3(v2)
    _require_isotropic(v1, v2, tol=tol)
    n1 = math.hypot(v1.y, v1.z)
    n2 = math.hypot(v2.y, v2.z)
    if n1 < tol or n2 < tol:
        raise DegenerateVectorError("parallel_residual of a (near) zero vector")
    return abs(v1.y * v2.z - v1.z * v2.y) / (n1 * n2)
