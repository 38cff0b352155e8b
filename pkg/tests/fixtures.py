"""Curves shared by several test modules.

Each expression fixture pairs the coordinate strings fed to the package with
mpmath callables for the oracle.  Type I fixtures keep y''^2 > z''^2 (spacelike
principal normal) on their domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp

from galcurves import ExpressionCurve, SynthesisSpec, synthesize


@dataclass(frozen=True)
class Fixture:
    name: str
    space: str
    y: str
    second: str  # z for G3 / PG3-I, phi for PG3-II
    domain: tuple
    fy: object
    fsecond: object

    def curve(self, n_samples=201):
        if self.space == "PG3-II":
            return ExpressionCurve(self.space, self.y, phi=self.second, domain=self.domain,
                                   n_samples=n_samples)
        return ExpressionCurve(self.space, self.y, self.second, domain=self.domain,
                               n_samples=n_samples)

    def document(self):
        key = "phi" if self.space == "PG3-II" else "z"
        return {"space": self.space, "y": self.y, key: self.second, "domain": list(self.domain)}


def _log_helix_y(s):
    return -(mp.cos(mp.log(s)) + mp.sin(mp.log(s))) / 2


def _log_helix_z(s):
    return (mp.cos(mp.log(s)) - mp.sin(mp.log(s))) / 2


G3_FIXTURES = [
    Fixture("circle", "G3", "cos(s)", "sin(s)", (0.0, 6.28), mp.cos, mp.sin),
    Fixture("parabola", "G3", "s^2/2", "0", (-1.0, 1.0), lambda s: s**2 / 2, lambda s: 0 * s),
    Fixture("cubic", "G3", "s^3/6", "s^2/2", (-1.0, 1.0), lambda s: s**3 / 6, lambda s: s**2 / 2),
    Fixture("log_helix", "G3", "-(cos(log(s))+sin(log(s)))/2", "(cos(log(s))-sin(log(s)))/2",
            (0.5, 3.0), _log_helix_y, _log_helix_z),
    Fixture("sin_square", "G3", "sin(2*s)", "s^2", (-1.0, 1.0),
            lambda s: mp.sin(2 * s), lambda s: s**2),
    Fixture("exp_sin", "G3", "exp(0.5*s)", "sin(s)", (0.0, 2.0),
            lambda s: mp.exp(s / 2), mp.sin),
]

PG1_FIXTURES = [
    Fixture("hyperbola", "PG3-I", "cosh(s)", "sinh(s)", (0.0, 2.0), mp.cosh, mp.sinh),
    Fixture("parabola", "PG3-I", "s^2/2", "0", (-1.0, 1.0), lambda s: s**2 / 2, lambda s: 0 * s),
    Fixture("cubic", "PG3-I", "s^3/6", "s^2/2", (1.5, 3.0), lambda s: s**3 / 6, lambda s: s**2 / 2),
    Fixture("log_type1", "PG3-I", "(s*log(s)-s)/2+1/(4*s)", "(s*log(s)-s)/2-1/(4*s)", (0.5, 3.0),
            lambda s: (s * mp.log(s) - s) / 2 + 1 / (4 * s),
            lambda s: (s * mp.log(s) - s) / 2 - 1 / (4 * s)),
    Fixture("cosh2", "PG3-I", "cosh(2*s)", "s^2/2", (0.25, 1.5),
            lambda s: mp.cosh(2 * s), lambda s: s**2 / 2),
    Fixture("exp_sin", "PG3-I", "exp(s)", "sin(s)/2", (0.0, 2.0),
            mp.exp, lambda s: mp.sin(s) / 2),
    Fixture("wide_hyperbola", "PG3-I", "2*cosh(s)", "sinh(s)", (-1.0, 1.0),
            lambda s: 2 * mp.cosh(s), mp.sinh),
]

PG2_FIXTURES = [
    Fixture("parabola_phi_s", "PG3-II", "s^2/2", "s", (0.5, 2.0), lambda s: s**2 / 2, lambda s: s),
    Fixture("parabola_phi_2s", "PG3-II", "s^2/2", "2*s", (0.25, 1.5),
            lambda s: s**2 / 2, lambda s: 2 * s),
    Fixture("cubic_phi_s", "PG3-II", "s^3/6", "s", (0.5, 2.5), lambda s: s**3 / 6, lambda s: s),
    Fixture("hyperbola_asinh", "PG3-II", "sqrt(1+s^2)", "log(s+sqrt(s^2+1))", (0.5, 2.0),
            lambda s: mp.sqrt(1 + s**2), mp.asinh),
    Fixture("cos_square", "PG3-II", "cos(s)", "s^2", (0.5, 2.0), mp.cos, lambda s: s**2),
    Fixture("exp_sin", "PG3-II", "exp(s)", "1+sin(s)", (0.0, 2.0),
            mp.exp, lambda s: 1 + mp.sin(s)),
]

ALL_FIXTURES = G3_FIXTURES + PG1_FIXTURES + PG2_FIXTURES


def by_name(space, name):
    return next(f for f in ALL_FIXTURES if f.space == space and f.name == name)


# Curves whose Mannheim function c(s) is analytically constant or varying.
CONSTANT_C = [("G3", "circle"), ("G3", "log_helix"), ("PG3-I", "hyperbola"),
              ("PG3-I", "log_type1"), ("PG3-II", "hyperbola_asinh")]
VARYING_C = [("G3", "cubic"), ("G3", "sin_square"), ("G3", "exp_sin"),
             ("PG3-I", "cubic"), ("PG3-I", "cosh2"), ("PG3-I", "exp_sin"), ("PG3-I", "wide_hyperbola"),
             ("PG3-II", "parabola_phi_s"), ("PG3-II", "cubic_phi_s"), ("PG3-II", "cos_square")]


# Synthesized partner fixtures.
def tan_fixture():
    """G3 curve with kappa = 1, tau = tan(s): solves the G3 partner ODE for lambda = 1."""
    return synthesize(SynthesisSpec("G3", "1", "tan(s)", (0.1, 1.2)))


def tanh_fixture():
    """Type I curve with kappa = 1, tau = -tanh(s): solves the pseudo partner ODE for lambda = 1."""
    return synthesize(SynthesisSpec("PG3-I", "1", "-tanh(s)", (0.2, 2.0)))


def wrong_fixture():
    """G3 curve with kappa = 1, tau = s: solves neither ODE."""
    return synthesize(SynthesisSpec("G3", "1", "s", (0.1, 1.2)))


def g3_nonconstant_mannheim():
    """kappa = s^2/2, tau = s: kappa / tau^2 = 1/2 although neither invariant is constant."""
    return synthesize(SynthesisSpec("G3", "0.5*s^2", "s", (0.5, 2.0)))


def pg1_nonconstant_mannheim():
    """Type I analogue: -kappa / tau^2 = -1/2."""
    return synthesize(SynthesisSpec("PG3-I", "0.5*s^2", "s", (0.5, 2.0)))


# Initial data reproducing the helices from (kappa, tau) = (1, 1).
CIRCLE_START = dict(theta0=math.pi, y0=1.0, y1=0.0, z0=0.0, z1=1.0)
HYPERBOLA_START = dict(theta0=0.0, y0=1.0, y1=0.0, z0=0.0, z1=1.0)
