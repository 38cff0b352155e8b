"""Frenet frames and Mannheim partner curves in Galilean and pseudo-Galilean 3-space."""

__version__ = "0.1.0"

from .curves import ExpressionCurve, SampledCurve, Space, ingest_samples, read_curve_csv
from .errors import GeometryDomainError, InputError
from .expr import Expression, parse_expression
from .frames import (
    FrenetSample,
    SynthesisSpec,
    frame,
    frame_table,
    frenet_residuals,
    invariants,
    synthesize,
)
from .jets import Jet, eval_jet
from .mannheim import (
    MannheimReport,
    PairReport,
    TheoremResidualReport,
    Verdict,
    characterize,
    closed_form_check,
    construct_partner,
    helix_planar_check,
    mannheim_constant,
    verify_pair,
    verify_partner_ode,
)
from .spaces import VectorClass, classify_vector, galilean_distance, pg_norm, pg_scalar_product

__all__ = [
    "Expression", "ExpressionCurve", "FrenetSample", "GeometryDomainError", "InputError",
    "Jet", "MannheimReport", "PairReport", "SampledCurve", "Space", "SynthesisSpec",
    "TheoremResidualReport", "VectorClass", "Verdict", "characterize", "classify_vector",
    "closed_form_check", "construct_partner", "eval_jet", "frame", "frame_table",
    "frenet_residuals", "galilean_distance", "helix_planar_check", "ingest_samples",
    "invariants", "mannheim_constant", "parse_expression", "pg_norm", "pg_scalar_product",
    "read_curve_csv", "synthesize", "verify_pair", "verify_partner_ode",
]
