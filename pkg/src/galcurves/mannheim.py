"""Mannheim curves and their partners in G3 and G3^1.

A curve is tested for the Mannheim relation through the grid function

    G3:       c(s) =  kappa / tau^2
    Type I:   c(s) = -kappa / tau^2
    Type II:  c(s) = -kappa * cosh(phi) / tau^2

which must be constant.  Partners are built as isotropic offsets
``alpha + lambda * N_alpha``, so they keep x = s and correspond to the
original curve at equal parameter values.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson

from .curves import EDGE, Curve, SampledCurve, Space, fmt
from .errors import IngestError, InputError
from .frames import OK, frame_jets, frame_table

LAMBDA_SWEEP = (-2.0, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 2.0)
SWEEP_FAIL_LEVEL = 0.1


class Verdict(str, enum.Enum):
    MANNHEIM = "Mannheim"
    NOT_MANNHEIM = "NotMannheim"
    DEGENERATE = "Degenerate"

    def __str__(self):
        return self.value


def _json_float(v):
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else None


def _relative_spread(values, center):
    return float(np.max(np.abs(values - center)) / max(1.0, abs(center)))


@dataclass(frozen=True)
class MannheimReport:
    space: Space
    c_estimate: float | None
    c_residual: float | None
    verdict: Verdict
    lam: float | None
    tolerance: float
    n_grid: int

    def to_dict(self):
        return {
            "space": self.space.value,
            "c_estimate": _json_float(self.c_estimate),
            "c_residual": _json_float(self.c_residual),
            "verdict": self.verdict.value,
            "lambda": _json_float(self.lam),
            "tolerance": self.tolerance,
            "n_grid": self.n_grid,
        }


def mannheim_function(curve, s=None):
    """Grid values ``(s, c(s), tau(s))``; c is NaN where |tau| is below tolerance."""
    fj = frame_jets(curve, s, order=0, strict=True)
    kappa = np.atleast_1d(fj.kappa.value)
    tau = np.atleast_1d(fj.tau.value)
    small = np.abs(tau) <= curve.curvature_tol
    tau2 = np.where(small, 1.0, tau * tau)
    if curve.space is Space.G3:
        c = kappa / tau2
    elif curve.space is Space.PG3_I:
        c = -kappa / tau2
    else:
        c = -kappa * np.cosh(np.atleast_1d(fj.phi.value)) / tau2
    c = np.where(small, np.nan, c)
    return np.atleast_1d(fj.s), c, tau


def mannheim_constant(curve: Curve, tol=None, s=None) -> MannheimReport:
    """Estimate the Mannheim constant and decide whether ``curve`` is Mannheim.

    ``lam`` in the report is the offset that builds the partner: the relation
    forces lambda = c in all three normal forms.
    """
    tol = curve.mannheim_tol if tol is None else float(tol)
    grid, c, _ = mannheim_function(curve, s)
    if np.any(np.isnan(c)):
        return MannheimReport(curve.space, None, None, Verdict.DEGENERATE, None, tol, grid.size)
    c_est = float(np.median(c))
    resid = _relative_spread(c, c_est)
    verdict = Verdict.MANNHEIM if resid <= tol else Verdict.NOT_MANNHEIM
    return MannheimReport(curve.space, c_est, resid, verdict, c_est, tol, grid.size)


def partner_space(space):
    return Space.PG3_I if space is Space.PG3_II else space


class OffsetCurve(Curve):
    """``alpha + lam * N_alpha`` evaluated exactly through the parent's jets."""

    source = "partner"

    def __init__(self, parent: Curve, lam: float):
        self.parent = parent
        self.lam = float(lam)
        self.space = partner_space(parent.space)
        self.curvature_tol = parent.curvature_tol
        self.mannheim_tol = parent.mannheim_tol
        self.max_order = None if parent.max_order is None else parent.max_order - 2

    def __repr__(self):
        return f"OffsetCurve({self.parent!r}, lam={self.lam!r})"

    @property
    def domain(self):
        return self.parent.domain

    def grid(self):
        return self.parent.grid()

    def accepts(self, s):
        return self.parent.accepts(s)

    def coordinate_jets(self, s, order):
        self._check_order(order)
        if order < 1:
            raise ValueError("partner jets need order >= 1")
        fj = frame_jets(self.parent, s, order=order - 1,
                        strict=self.parent.space is not Space.PG3_II)
        y, z = fj.coords
        y1 = (y + self.lam * fj.N[1]).truncate(order)
        z1 = (z + self.lam * fj.N[2]).truncate(order)
        return y1, z1, None


def offset_curve(curve: Curve, lam: float) -> Curve:
    """Partner curve ``alpha + lam * N_alpha``.

    Jet-backed parents give an exact :class:`OffsetCurve`.  Sampled parents give
    a sampled partner on their interior nodes, storing the offset position and
    its first two derivatives.
    """
    if not isinstance(curve, SampledCurve):
        return OffsetCurve(curve, lam)
    s = curve.grid()
    if s.size < 9:
        raise IngestError("sampled curve too short to carry a partner")
    fj = frame_jets(curve, s, order=1, strict=True)
    y, z = fj.coords
    y1 = (y + lam * fj.N[1]).truncate(2)
    z1 = (z + lam * fj.N[2]).truncate(2)
    return SampledCurve(partner_space(curve.space), s, list(y1.coeffs), list(z1.coeffs),
                        origin="partner")


@dataclass(frozen=True)
class PairReport:
    coincidence_residual: float | None
    lam: float
    partner: Curve = field(repr=False)
    degenerate: bool
    n_degenerate: int
    n_grid: int
    tolerance: float
    lambda_residual: float | None = None
    offset_residual: float | None = None
    warnings: tuple = ()

    @property
    def accepted(self):
        return (not self.degenerate and self.coincidence_residual is not None
                and self.coincidence_residual <= self.tolerance)

    def to_dict(self):
        out = {
            "coincidence_residual": _json_float(self.coincidence_residual),
            "lambda": _json_float(self.lam),
            "partner": {
                "space": self.partner.space.value,
                "source": self.partner.source,
                "domain": [float(v) for v in self.partner.domain],
            },
            "degenerate": self.degenerate,
            "n_degenerate": self.n_degenerate,
            "n_grid": self.n_grid,
            "tolerance": self.tolerance,
            "accepted": self.accepted,
        }
        if self.lambda_residual is not None:
            out["lambda_residual"] = _json_float(self.lambda_residual)
        if self.offset_residual is not None:
            out["offset_residual"] = _json_float(self.offset_residual)
        out["warnings"] = list(self.warnings)
        return out


def _parallel(a, b):
    """Row-wise |sin| of the angle between the (y, z) parts of two vector arrays."""
    cross = np.abs(a[:, 1] * b[:, 2] - a[:, 2] * b[:, 1])
    return cross / (np.hypot(a[:, 1], a[:, 2]) * np.hypot(b[:, 1], b[:, 2]))


def _coincidence(alpha_table, partner_table):
    ok = alpha_table.ok & partner_table.ok
    if not np.any(ok):
        return None
    return float(np.max(_parallel(alpha_table.N[ok], partner_table.B[ok])))


def construct_partner(curve: Curve, lam: float, tol=None) -> PairReport:
    """Offset ``curve`` by ``lam`` along its principal normal and check the pair."""
    lam = float(lam)
    tol = curve.mannheim_tol if tol is None else float(tol)
    partner = offset_curve(curve, lam)
    s = partner.grid()
    alpha_t = frame_table(curve, s, strict=curve.space is not Space.PG3_II)
    partner_t = frame_table(partner, s, strict=False)
    bad = ~partner_t.ok
    warnings = []
    if np.all(bad):
        warnings.append("partner curvature vanishes on the whole grid: the partner is a straight line")
    elif np.any(bad):
        warnings.append(f"partner frame undefined at {int(bad.sum())} grid points")
    return PairReport(
        coincidence_residual=_coincidence(alpha_t, partner_t),
        lam=lam,
        partner=partner,
        degenerate=bool(np.any(bad)),
        n_degenerate=int(bad.sum()),
        n_grid=int(s.size),
        tolerance=tol,
        warnings=tuple(warnings),
    )


def common_grid(alpha: Curve, alpha1: Curve):
    s = alpha.grid()
    keep = np.array([alpha1.accepts(v) for v in s], dtype=bool)
    if not np.any(keep):
        raise InputError("the two curves share no grid points")
    return s[keep]


def verify_pair(alpha: Curve, alpha1: Curve, tol=None) -> PairReport:
    """Measure how well ``alpha1`` is a Mannheim partner of ``alpha``.

    Points correspond at equal parameter s.  The offset constant is recovered
    by projecting ``alpha1 - alpha`` on N_alpha (Euclidean on the isotropic part
    in G3, pseudo-Galilean in G3^1).
    """
    if partner_space(alpha.space) is not alpha1.space:
        raise InputError(
            f"a {alpha.space.value} curve cannot have a {alpha1.space.value} partner"
        )
    tol = max(alpha.mannheim_tol, alpha1.mannheim_tol) if tol is None else float(tol)
    s = common_grid(alpha, alpha1)
    alpha_t = frame_table(alpha, s, strict=alpha.space is not Space.PG3_II)
    partner_t = frame_table(alpha1, s, strict=False)
    d = alpha1.positions(s) - alpha.positions(s)
    d = d[:, 1:]  # drop the parameter column; d[:, 0] is the x difference
    if np.max(np.abs(d[:, 0])) > 1e-9:
        raise InputError("curves are not both in arclength normal form x = s")
    N = alpha_t.N
    if alpha.space is Space.G3:
        lam_s = d[:, 1] * N[:, 1] + d[:, 2] * N[:, 2]
    else:
        lam_s = (d[:, 1] * N[:, 1] - d[:, 2] * N[:, 2]) / (N[:, 1] ** 2 - N[:, 2] ** 2)
    warnings = []
    dn = np.hypot(d[:, 1], d[:, 2])
    tiny = dn <= alpha.curvature_tol
    if np.all(tiny):
        lam = 0.0
        lam_res = 0.0
        off_res = None
        warnings.append("zero offset: the curves coincide, lambda = 0 is degenerate")
    else:
        lam = float(np.median(lam_s))
        lam_res = _relative_spread(lam_s, lam)
        off_res = float(np.max(_parallel(d[~tiny], N[~tiny])))
    bad = ~partner_t.ok
    if np.any(bad):
        warnings.append(f"partner frame undefined at {int(bad.sum())} grid points")
    return PairReport(
        coincidence_residual=_coincidence(alpha_t, partner_t),
        lam=lam,
        partner=alpha1,
        degenerate=bool(np.any(bad)),
        n_degenerate=int(bad.sum()),
        n_grid=int(s.size),
        tolerance=tol,
        lambda_residual=lam_res,
        offset_residual=off_res,
        warnings=tuple(warnings),
    )


@dataclass(frozen=True)
class TheoremResidualReport:
    space: Space
    lam: float
    tolerance: float
    s: np.ndarray = field(repr=False)
    ode_residual: float | None = None
    theta_series: np.ndarray | None = field(default=None, repr=False)
    closed_form_residual_tan: float | None = None
    closed_form_residual_tanh: float | None = None
    c0: float | None = None
    c0_tanh: float | None = None
    epsilon: int | None = None
    tan_masked: int = 0
    notes: tuple = ()

    @property
    def passed(self):
        if self.ode_residual is None:
            return None
        return self.ode_residual <= self.tolerance

    def to_dict(self):
        out = {
            "space": self.space.value,
            "lambda": self.lam,
            "ode_residual": _json_float(self.ode_residual),
        }
        if self.theta_series is not None:
            out["theta_series"] = [[float(a), float(b)] for a, b in zip(self.s, self.theta_series)]
        if self.epsilon is not None:
            out["epsilon"] = self.epsilon
            out["closed_form_residual_tan"] = _json_float(self.closed_form_residual_tan)
            out["closed_form_residual_tanh"] = _json_float(self.closed_form_residual_tanh)
            out["c0"] = _json_float(self.c0)
            out["c0_tanh"] = _json_float(self.c0_tanh)
            out["tan_masked"] = self.tan_masked
        out["tolerance"] = self.tolerance
        out["pass"] = self.passed
        out["notes"] = list(self.notes)
        return out


def _ode_sign(space):
    return 1.0 if space is Space.G3 else -1.0


def _check_space(alpha1, space):
    if space is None:
        return alpha1.space
    space = Space.parse(space)
    if space is not alpha1.space:
        raise InputError(f"space {space.value} does not match the {alpha1.space.value} curve")
    if space is Space.PG3_II:
        raise InputError("partner curves are G3 or PG3-I curves")
    return space


def partner_ode_residual(kappa1, tau1, dtau1, lam, space):
    """Pointwise defect of tau1' = (kappa1 / lam) (lam^2 tau1^2 +- 1); + in G3."""
    if lam == 0:
        raise InputError("lambda must be nonzero")
    sign = _ode_sign(Space.parse(space))
    return np.abs(dtau1 - kappa1 / lam * (lam * lam * tau1 * tau1 + sign))


def theta_series(s, kappa1, tau1, lam):
    """Angle with theta' = -kappa1 and lam * tau1 = -tan(theta) at the first point."""
    integral = cumulative_simpson(kappa1, x=s, initial=0.0)
    return -math.atan(lam * tau1[0]) - integral


def _invariant_arrays(alpha1, order):
    fj = frame_jets(alpha1, order=order, strict=True)
    return (np.atleast_1d(fj.s), np.atleast_1d(fj.kappa.value),
            np.atleast_1d(fj.tau.value), fj)


def verify_partner_ode(alpha1: Curve, lam: float, space=None, tol=None) -> TheoremResidualReport:
    """Grid maximum of the partner ODE defect (+1 in G3, -1 in G3^1)."""
    space = _check_space(alpha1, space)
    lam = float(lam)
    if lam == 0:
        raise InputError("lambda must be nonzero")
    tol = alpha1.mannheim_tol if tol is None else float(tol)
    s, k1, t1, fj = _invariant_arrays(alpha1, order=1)
    dt1 = np.atleast_1d(fj.tau.coeffs[1])
    res = partner_ode_residual(k1, t1, dt1, lam, space)
    theta = theta_series(s, k1, t1, lam) if space is Space.G3 else None
    return TheoremResidualReport(space, lam, tol, s, ode_residual=float(res.max()),
                                 theta_series=theta)


TAN_POLE_EPS = 1e-6


def closed_form_residuals(s, kappa1, tau1, lam, epsilon, space):
    """Compare tau1 with the tan and tanh closed forms on a uniform grid.

    Pseudo-Galilean: tau1 = -(eps/lam) f(eps * I + c0) with I = int kappa1 ds,
    exactly as printed.  Galilean: the angle runs backwards (theta' = -kappa1,
    lam * tau1 = -tan(theta)), giving tau1 = -(eps/lam) f(eps * (c0 - I)).
    c0 is fitted at the first grid point.

    Returns ``(res_tan, res_tanh, c0_tan, c0_tanh, n_masked)``; a residual is
    None when the form cannot match the first point at all.
    """
    if epsilon not in (1, -1):
        raise InputError("epsilon must be +1 or -1")
    if lam == 0:
        raise InputError("lambda must be nonzero")
    space = Space.parse(space)
    s = np.asarray(s, dtype=float)
    kappa1 = np.asarray(kappa1, dtype=float)
    tau1 = np.asarray(tau1, dtype=float)
    integral = cumulative_simpson(kappa1, x=s, initial=0.0)
    target = -epsilon * lam * tau1[0]
    galilean = space is Space.G3

    def argument(c0):
        return epsilon * (c0 - integral) if galilean else epsilon * integral + c0

    def c0_from(inv):
        return epsilon * inv if galilean else inv

    c0_tan = c0_from(math.atan(target))
    arg = argument(c0_tan)
    keep = np.abs(np.cos(arg)) >= TAN_POLE_EPS
    form = -(epsilon / lam) * np.tan(arg[keep])
    res_tan = float(np.max(np.abs(tau1[keep] - form))) if np.any(keep) else None
    n_masked = int((~keep).sum())

    if abs(target) < 1.0:
        c0_tanh = c0_from(math.atanh(target))
        form_h = -(epsilon / lam) * np.tanh(argument(c0_tanh))
        res_tanh = float(np.max(np.abs(tau1 - form_h)))
    else:
        c0_tanh = None
        res_tanh = None
    return res_tan, res_tanh, c0_tan, c0_tanh, n_masked


def closed_form_check(alpha1: Curve, lam: float, epsilon: int = 1, space=None,
                      tol=None) -> TheoremResidualReport:
    """Report both closed-form residuals (tan and tanh) plus the ODE residual."""
    space = _check_space(alpha1, space)
    lam = float(lam)
    tol = alpha1.mannheim_tol if tol is None else float(tol)
    s, k1, t1, fj = _invariant_arrays(alpha1, order=1)
    dt1 = np.atleast_1d(fj.tau.coeffs[1])
    ode = float(partner_ode_residual(k1, t1, dt1, lam, space).max())
    res_tan, res_tanh, c0, c0h, masked = closed_form_residuals(s, k1, t1, lam, int(epsilon), space)
    notes = []
    if masked:
        notes.append(f"{masked} samples within {TAN_POLE_EPS:g} of a tan pole were masked")
    if res_tanh is None:
        notes.append("tanh form cannot match the first sample (|lambda * tau1| >= 1)")
    return TheoremResidualReport(
        space, lam, tol, s, ode_residual=ode,
        theta_series=theta_series(s, k1, t1, lam) if space is Space.G3 else None,
        closed_form_residual_tan=res_tan, closed_form_residual_tanh=res_tanh,
        c0=c0, c0_tanh=c0h, epsilon=int(epsilon), tan_masked=masked, notes=tuple(notes),
    )


@dataclass(frozen=True)
class HelixReport:
    mannheim: MannheimReport
    is_helix: bool | None
    ratio_residual: float | None
    partner_degenerate: bool | None = None
    partner_planarity_residual: float | None = None
    tolerance: float = 0.0

    @property
    def proposition_satisfied(self):
        if not self.is_helix or self.partner_degenerate is None:
            return None
        if self.partner_degenerate:
            return True
        return self.partner_planarity_residual <= self.tolerance

    def to_dict(self):
        return {
            "is_helix": self.is_helix,
            "ratio_residual": _json_float(self.ratio_residual),
            "partner_degenerate": self.partner_degenerate,
            "partner_planarity_residual": _json_float(self.partner_planarity_residual),
            "proposition_satisfied": self.proposition_satisfied,
            "tolerance": self.tolerance,
            "pass": self.proposition_satisfied,
            "mannheim": self.mannheim.to_dict(),
        }


def helix_planar_check(alpha: Curve, tol=None) -> HelixReport:
    """For a Mannheim generalized helix (constant tau/kappa), check the partner is planar.

    A partner whose curvature vanishes everywhere is a straight line and counts
    as planar; otherwise planarity is measured by the largest partner torsion.
    """
    tol = alpha.mannheim_tol if tol is None else float(tol)
    report = mannheim_constant(alpha, tol)
    table = frame_table(alpha, strict=True)
    ratio = table.tau / table.kappa
    center = float(np.median(ratio))
    ratio_res = _relative_spread(ratio, center)
    is_helix = ratio_res <= tol
    if report.verdict is not Verdict.MANNHEIM or not is_helix:
        return HelixReport(report, is_helix, ratio_res, tolerance=tol)
    pair = construct_partner(alpha, report.lam, tol)
    partner_t = frame_table(pair.partner, strict=False)
    ok = partner_t.ok
    if not np.any(ok):
        return HelixReport(report, True, ratio_res, True, None, tol)
    planarity = float(np.max(np.abs(partner_t.tau[ok])))
    return HelixReport(report, True, ratio_res, bool(np.any(~ok)), planarity, tol)


@dataclass(frozen=True)
class CharacterizationReport:
    """Both directions of the Mannheim characterization on one curve."""

    mannheim: MannheimReport
    pair: PairReport | None
    sweep: dict

    @property
    def passed(self):
        v = self.mannheim.verdict
        if v is Verdict.MANNHEIM:
            return self.pair.degenerate or self.pair.accepted
        if v is Verdict.NOT_MANNHEIM:
            return all(r is not None and r >= SWEEP_FAIL_LEVEL for r in self.sweep.values())
        return None

    def to_dict(self):
        return {
            "mannheim": self.mannheim.to_dict(),
            "partner": None if self.pair is None else self.pair.to_dict(),
            "lambda_sweep": {fmt(k): _json_float(v) for k, v in self.sweep.items()},
            "pass": self.passed,
        }


def lambda_sweep(curve, lambdas=LAMBDA_SWEEP):
    """Coincidence residual of the offset partner for each trial lambda."""
    return {float(l): construct_partner(curve, l).coincidence_residual for l in lambdas}


def characterize(curve: Curve, tol=None, lambdas=LAMBDA_SWEEP) -> CharacterizationReport:
    report = mannheim_constant(curve, tol)
    if report.verdict is Verdict.MANNHEIM:
        return CharacterizationReport(report, construct_partner(curve, report.lam, tol), {})
    if report.verdict is Verdict.NOT_MANNHEIM:
        return CharacterizationReport(report, None, lambda_sweep(curve, lambdas))
    return CharacterizationReport(report, None, {})
