"""Curvature, torsion and Frenet frames in G3 and G3^1 (Type I and Type II).

Frames are computed as jets: the frame vectors, curvature and torsion are
built with jet arithmetic from the coordinate jets, so their derivatives
(needed for the Frenet equations and for torsion derivatives) come for free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import expr as ex
from . import jets as jt
from .curves import Curve, SampledCurve, Space
from .errors import (
    GeometryDomainError,
    InputError,
    LightlikeAccelerationError,
    PhiDegenerateError,
    VanishingCurvatureError,
)
from .jets import Jet
from .spaces import Vec3

OK, VANISHING, LIGHTLIKE, PHI_DEGENERATE = 0, 1, 2, 3
_REASONS = {
    VANISHING: (VanishingCurvatureError, "vanishing curvature, torsion undefined"),
    LIGHTLIKE: (LightlikeAccelerationError, "lightlike acceleration, frame undefined"),
    PHI_DEGENERATE: (PhiDegenerateError, "sinh(phi) vanishes, torsion undefined"),
}


@dataclass(frozen=True)
class FrenetSample:
    s: float
    T: Vec3
    N: Vec3
    B: Vec3
    kappa: float
    tau: float
    phi: float | None = None


@dataclass(frozen=True)
class FrameJets:
    """Frame fields as jets over a batch of parameter values.

    ``T``, ``N``, ``B`` are (x, y, z) triples of jets; ``tau`` is one order
    below ``N``.  Entries flagged in ``status`` carry placeholder values.
    """

    space: Space
    s: np.ndarray
    T: tuple
    N: tuple
    B: tuple
    kappa: Jet
    tau: Jet
    phi: Jet | None
    status: np.ndarray
    raw_kappa: np.ndarray
    coords: tuple = ()

    @property
    def ok(self):
        return self.status == OK


def _raise_for_status(status, s):
    bad = np.flatnonzero(np.asarray(status).ravel() != OK)
    if bad.size:
        i = bad[0]
        cls, msg = _REASONS[int(np.asarray(status).ravel()[i])]
        raise cls(msg, np.asarray(s).ravel()[i])


def frame_jets(curve: Curve, s=None, order=0, strict=True) -> FrameJets:
    """Frame jets of ``curve`` at ``s`` (default: its grid); ``tau`` has order ``order``.

    With ``strict=False`` degenerate points are flagged in ``status`` instead of
    raising.
    """
    s = curve.grid() if s is None else np.asarray(s, dtype=float)
    y, z, phi = curve.coordinate_jets(s, order + 3)
    fj = _frame_from_coordinates(curve.space, s, y, z, phi, curve.curvature_tol)
    if strict:
        _raise_for_status(fj.status, s)
    return fj


def _frame_from_coordinates(space, s, y, z, phi, tol):
    shape = np.shape(s)
    dy = y.derivative()
    dz = z.derivative()
    d2y = dy.derivative()
    d2z = dz.derivative()
    k = d2y.order

    def const(v, order=k):
        return Jet.constant(v, order, shape)

    T = (const(1.0, dy.order), dy, dz)

    if space is Space.PG3_II:
        a2 = jt.cosh(phi)
        a3 = jt.sinh(phi)
        status = np.where(np.abs(a3.value) <= tol, PHI_DEGENERATE, OK)
        a3_safe = a3.where(status != OK, 1.0)
        tau = a2.derivative() / a3_safe
        zero = const(0.0, a2.order)
        return FrameJets(space, s, T, (zero, a2, a3), (zero, a3, a2), d2y, tau, phi, status,
                         np.array(d2y.value, dtype=float), (y, z))

    y2v, z2v = d2y.value, d2z.value
    if space is Space.G3:
        kv = np.hypot(y2v, z2v)
        status = np.where(kv <= tol, VANISHING, OK)
    else:
        q = y2v * y2v - z2v * z2v
        kv = np.sqrt(np.abs(q))
        light = np.hypot(y2v, z2v) > tol
        status = np.where(kv <= tol, np.where(light, LIGHTLIKE, VANISHING), OK)
    bad = status != OK
    if np.any(bad):
        d2y = d2y.where(bad, 1.0)
        d2z = d2z.where(bad, 0.0)
    d3y = d2y.derivative()
    d3z = d2z.derivative()

    if space is Space.G3:
        kappa = jt.sqrt(d2y * d2y + d2z * d2z)
    else:
        kappa = jt.sqrt(jt.absolute(d2y * d2y - d2z * d2z))
    # Cofactor expansion along the first column: alpha' = (1, ., .), alpha'', alpha''' isotropic.
    det = d2y * d3z - d2z * d3y
    tau = det / (kappa * kappa)
    zero = const(0.0)
    N = (zero, d2y / kappa, d2z / kappa)
    if space is Space.G3:
        B = (zero, -(d2z / kappa), d2y / kappa)
    else:
        B = (zero, d2z / kappa, d2y / kappa)
    return FrameJets(space, s, T, N, B, kappa, tau, None, status, np.array(kv, dtype=float), (y, z))


def _vec(triple, i=None):
    vals = [np.asarray(c.value, dtype=float) for c in triple]
    if i is None:
        return Vec3(*(float(v) for v in vals))
    return Vec3(*(float(v.ravel()[i]) for v in vals))


def _require_space(curve, *spaces):
    if curve.space not in spaces:
        names = " or ".join(sp.value for sp in spaces)
        raise InputError(f"expected a {names} curve, got {curve.space.value}")


def _sample(fj):
    return FrenetSample(
        s=float(fj.s),
        T=_vec(fj.T),
        N=_vec(fj.N),
        B=_vec(fj.B),
        kappa=float(fj.kappa.value),
        tau=float(fj.tau.value),
        phi=None if fj.phi is None else float(fj.phi.value),
    )


def invariants_g3(curve, s):
    """Curvature and torsion of a G3 curve at ``s``."""
    _require_space(curve, Space.G3)
    fj = frame_jets(curve, float(s))
    return float(fj.kappa.value), float(fj.tau.value)


def invariants_pg1(curve, s):
    """Curvature and torsion of a Type I pseudo-Galilean curve at ``s``."""
    _require_space(curve, Space.PG3_I)
    fj = frame_jets(curve, float(s))
    return float(fj.kappa.value), float(fj.tau.value)


def invariants_pg2(curve, s):
    """Curvature, torsion and frame angle phi of a Type II curve at ``s``.

    Curvature is y'' and torsion a2'/a3 with a2 = cosh(phi), a3 = sinh(phi).
    """
    _require_space(curve, Space.PG3_II)
    fj = frame_jets(curve, float(s))
    return float(fj.kappa.value), float(fj.tau.value), float(fj.phi.value)


def invariants(curve, s):
    fn = {Space.G3: invariants_g3, Space.PG3_I: invariants_pg1, Space.PG3_II: invariants_pg2}
    return fn[curve.space](curve, s)


def frame_g3(curve, s):
    _require_space(curve, Space.G3)
    return _sample(frame_jets(curve, float(s)))


def frame_pg1(curve, s):
    _require_space(curve, Space.PG3_I)
    return _sample(frame_jets(curve, float(s)))


def frame_pg2(curve, s):
    _require_space(curve, Space.PG3_II)
    return _sample(frame_jets(curve, float(s)))


def frame(curve, s):
    return _sample(frame_jets(curve, float(s)))


@dataclass(frozen=True)
class FrameTable:
    """Frame data over a grid; rows with ``status != OK`` hold NaN."""

    space: Space
    s: np.ndarray
    T: np.ndarray
    N: np.ndarray
    B: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray
    phi: np.ndarray | None
    status: np.ndarray

    @property
    def ok(self):
        return self.status == OK

    def sample(self, i):
        return FrenetSample(
            float(self.s[i]), Vec3(*self.T[i]), Vec3(*self.N[i]), Vec3(*self.B[i]),
            float(self.kappa[i]), float(self.tau[i]),
            None if self.phi is None else float(self.phi[i]),
        )

    def __len__(self):
        return self.s.size


def _stack(triple):
    return np.column_stack([np.broadcast_to(c.value, np.shape(triple[1].value)) for c in triple])


def frame_table(curve, s=None, strict=False, order=0):
    s = curve.grid() if s is None else np.atleast_1d(np.asarray(s, dtype=float))
    fj = frame_jets(curve, s, order=order, strict=strict)
    bad = ~fj.ok
    kappa = fj.raw_kappa.copy()
    tau = np.array(fj.tau.value, dtype=float)
    N, B = _stack(fj.N), _stack(fj.B)
    tau[bad] = np.nan
    if fj.space is not Space.PG3_II:
        N[bad] = np.nan
        B[bad] = np.nan
    return FrameTable(
        curve.space, s, _stack(fj.T), N, B, kappa, tau,
        None if fj.phi is None else np.array(fj.phi.value, dtype=float),
        fj.status,
    )


@dataclass(frozen=True)
class ResidualTable:
    s: np.ndarray
    residual_T: np.ndarray
    residual_N: np.ndarray
    residual_B: np.ndarray

    def max(self):
        return float(max(self.residual_T.max(), self.residual_N.max(), self.residual_B.max()))

    def rows(self):
        return zip(self.s, self.residual_T, self.residual_N, self.residual_B)


def _d(triple):
    return np.column_stack([np.broadcast_to(c.derivative().value, np.shape(triple[1].value))
                            if c.order else np.zeros(np.shape(triple[1].value)) for c in triple])


def frenet_residuals(curve, s=None):
    """Magnitudes of the Frenet-equation defects at every grid point.

    G3:      T' - k N,  N' - t B,  B' + t N
    Type I:  T' - k N,  N' - t B,  B' - t N
    Type II: T' - k (cosh(phi) N - sinh(phi) B),  N' - t B,  B' - t N
    """
    s = curve.grid() if s is None else np.atleast_1d(np.asarray(s, dtype=float))
    fj = frame_jets(curve, s, order=0, strict=True)
    N, B = _stack(fj.N), _stack(fj.B)
    dT, dN, dB = _d(fj.T), _d(fj.N), _d(fj.B)
    kappa = fj.kappa.value[:, None]
    tau = fj.tau.value[:, None]
    if fj.space is Space.PG3_II:
        ch = np.cosh(fj.phi.value)[:, None]
        sh = np.sinh(fj.phi.value)[:, None]
        rT = dT - kappa * (ch * N - sh * B)
    else:
        rT = dT - kappa * N
    rN = dN - tau * B
    rB = dB + tau * N if fj.space is Space.G3 else dB - tau * N
    return ResidualTable(s, *(np.linalg.norm(r, axis=1) for r in (rT, rN, rB)))


@dataclass(frozen=True)
class SynthesisSpec:
    """Data for rebuilding a curve from prescribed curvature and torsion.

    The principal normal is written N = (0, C(theta), S(theta)) with
    (C, S) = (cos, sin) in G3 and (cosh, sinh) in Type I, so that theta' = tau
    and (y'', z'') = kappa * (C(theta), S(theta)).
    """

    space: Space
    kappa: ex.Expression
    tau: ex.Expression
    domain: tuple
    step: float = 1e-3
    theta0: float = 0.0
    y0: float = 0.0
    z0: float = 0.0
    y1: float = 0.0
    z1: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "space", Space.parse(self.space))
        object.__setattr__(self, "kappa", ex.as_expression(self.kappa))
        object.__setattr__(self, "tau", ex.as_expression(self.tau))
        object.__setattr__(self, "domain", tuple(float(v) for v in self.domain))


def synthesize(spec: SynthesisSpec) -> SampledCurve:
    """Integrate the reduced Frenet system with classical RK4.

    State is (y, y', z, z', theta).  The result stores y, y', y'' (and the same
    for z) at every node.
    """
    if spec.space is Space.PG3_II:
        raise InputError("synthesis is defined for G3 and PG3-I curves only")
    a, b = spec.domain
    if not b > a:
        raise InputError(f"domain must satisfy s_min < s_max, got {spec.domain!r}")
    if not spec.step > 0 or spec.step > (b - a) / 100 * (1 + 1e-12):
        raise InputError(
            f"step must be positive and at most (s_max - s_min)/100 = {(b - a) / 100!r}"
        )
    n = int(math.ceil((b - a) / spec.step - 1e-9))
    h = (b - a) / n
    s = a + h * np.arange(n + 1)
    s[-1] = b
    mid = s[:-1] + 0.5 * h
    k_nodes = ex.evaluate(spec.kappa, s)
    k_mid = ex.evaluate(spec.kappa, mid)
    t_nodes = ex.evaluate(spec.tau, s)
    t_mid = ex.evaluate(spec.tau, mid)
    for vals, pts in ((k_nodes, s), (k_mid, mid)):
        bad = np.flatnonzero(vals <= 0)
        if bad.size:
            raise GeometryDomainError(f"curvature must be positive, kappa <= 0 at s={float(pts[bad[0]])!r}")

    if spec.space is Space.G3:
        C, S = math.cos, math.sin
    else:
        C, S = math.cosh, math.sinh

    def rhs(k, t, u):
        _, p, _, q, th = u
        return (p, k * C(th), q, k * S(th), t)

    state = np.empty((n + 1, 5))
    u = (spec.y0, spec.y1, spec.z0, spec.z1, spec.theta0)
    state[0] = u
    for i in range(n):
        k1 = rhs(k_nodes[i], t_nodes[i], u)
        k2 = rhs(k_mid[i], t_mid[i], [ui + 0.5 * h * di for ui, di in zip(u, k1)])
        k3 = rhs(k_mid[i], t_mid[i], [ui + 0.5 * h * di for ui, di in zip(u, k2)])
        k4 = rhs(k_nodes[i + 1], t_nodes[i + 1], [ui + h * di for ui, di in zip(u, k3)])
        u = tuple(ui + h / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4)
                  for ui, a1, a2, a3, a4 in zip(u, k1, k2, k3, k4))
        state[i + 1] = u
    y, p, z, q, theta = state.T
    if spec.space is Space.G3:
        ypp, zpp = k_nodes * np.cos(theta), k_nodes * np.sin(theta)
    else:
        ypp, zpp = k_nodes * np.cosh(theta), k_nodes * np.sinh(theta)
    curve = SampledCurve(spec.space, s, [y, p, ypp], [z, q, zpp], origin="synthesized")
    curve.theta = theta
    curve.spec = spec
    return curve
