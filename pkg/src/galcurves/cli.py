"""Command-line front end.

Every command prints a JSON envelope ``{command, inputs, result, status, error}``.
Commands that produce a table write it to ``--out``; without ``--out`` the
table goes to stdout and the envelope to stderr, so tables can be piped.

Exit codes: 0 success (negative verdicts included), 2 bad input, 3 a
mathematical quantity is undefined.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import jsonschema
import numpy as np

from . import __version__
from .curves import (
    CSV_HEADER,
    DEFAULT_SAMPLES,
    ExpressionCurve,
    SampledCurve,
    Space,
    parse_curve_csv,
    write_table,
)
from .errors import InputError
from .frames import SynthesisSpec, frame_table, frenet_residuals, synthesize
from .mannheim import (
    Verdict,
    characterize,
    closed_form_check,
    construct_partner,
    helix_planar_check,
    mannheim_constant,
    verify_pair,
    verify_partner_ode,
)
from .spaces import classify_vector, pg_norm, vec3

EXIT_OK, EXIT_INPUT, EXIT_DOMAIN = 0, 2, 3

_EXPR = {"type": "string", "minLength": 1}
_DOMAIN = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}

CURVE_FILE_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["space", "y", "domain"],
    "properties": {
        "space": {"enum": ["G3", "PG3-I", "PG3-II"]},
        "y": _EXPR,
        "z": _EXPR,
        "phi": _EXPR,
        "domain": _DOMAIN,
        "samples": {"type": "integer", "minimum": 9},
    },
}

SYNTHESIS_FILE_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["space", "kappa", "tau", "domain"],
    "properties": {
        "space": {"enum": ["G3", "PG3-I"]},
        "kappa": _EXPR,
        "tau": _EXPR,
        "domain": _DOMAIN,
        "step": {"type": "number", "exclusiveMinimum": 0},
        "theta0": {"type": "number"},
        "y0": {"type": "number"},
        "z0": {"type": "number"},
        "y1": {"type": "number"},
        "z1": {"type": "number"},
    },
}

INPUT_SCHEMA = {"oneOf": [CURVE_FILE_SCHEMA, SYNTHESIS_FILE_SCHEMA]}

THEOREMS = ("3.3", "4.2", "4.3", "4.4", "4.5", "prop")


class UsageError(InputError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _clean(obj):
    """Make ``obj`` JSON-ready: numpy scalars to Python, non-finite floats to null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def dumps(obj):
    return json.dumps(_clean(obj), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def _floats(text, n, what):
    parts = text.split(",")
    if len(parts) != n:
        raise UsageError(f"{what} needs {n} comma-separated numbers, got {text!r}")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"{what}: cannot parse {text!r} as numbers") from None
    if not all(math.isfinite(v) for v in vals):
        raise UsageError(f"{what}: values must be finite")
    return vals


# ---- curve input -------------------------------------------------------------

def _read_text(path, stdin):
    if path == "-":
        return stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as err:
        raise InputError(f"cannot read {path}: {err.strerror}") from None


def curve_from_document(doc, samples=None):
    try:
        jsonschema.validate(doc, INPUT_SCHEMA)
    except jsonschema.ValidationError as err:
        raise InputError(f"invalid curve file: {err.message}") from None
    if "kappa" in doc:
        spec = SynthesisSpec(
            doc["space"], doc["kappa"], doc["tau"], tuple(doc["domain"]),
            **{k: doc[k] for k in ("step", "theta0", "y0", "z0", "y1", "z1") if k in doc},
        )
        return synthesize(spec)
    n = samples if samples is not None else doc.get("samples", DEFAULT_SAMPLES)
    return ExpressionCurve(doc["space"], doc["y"], doc.get("z"), doc.get("phi"),
                           tuple(doc["domain"]), n)


def load_curve(path, space=None, samples=None, stdin=None):
    """Read a curve from a JSON curve file or an ``s,x,y,z`` CSV table."""
    text = _read_text(path, stdin or sys.stdin)
    if text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as err:
            raise InputError(f"{path}: invalid JSON ({err.msg} at line {err.lineno})") from None
        curve = curve_from_document(doc, samples)
        if space is not None and Space.parse(space) is not curve.space:
            raise InputError(f"--space {space} contradicts the file's space {curve.space.value}")
        return curve
    return parse_curve_csv(text, Space.parse(space or "G3"))


# ---- commands ----------------------------------------------------------------

class Outcome:
    """What a command produced: a JSON result and optionally a CSV table."""

    def __init__(self, result, table=None):
        self.result = result
        self.table = table


def _curve_inputs(args):
    return {"curve": args.curve, "space": args.space, "samples": args.samples}


def cmd_classify(args, stdin):
    v = vec3(_floats(args.vector, 3, "--vector"))
    cls = classify_vector(v)
    norm = pg_norm(v)
    return {"vector": list(v)}, Outcome(
        {"class": cls.value, "norm": norm, "negative_norm": norm < 0}
    )


def _invariant_rows(table):
    has_phi = table.phi is not None
    rows = []
    for i in range(len(table)):
        tau = None if not table.ok[i] else table.tau[i]
        row = [table.s[i], table.kappa[i], tau]
        if has_phi:
            row.append(table.phi[i])
        rows.append(row)
    return rows


def cmd_invariants(args, stdin):
    curve = load_curve(args.curve, args.space, args.samples, stdin)
    table = frame_table(curve, strict=False)
    header = ("s", "kappa", "tau") + (("phi",) if table.phi is not None else ())
    n_bad = int((~table.ok).sum())
    result = {"space": curve.space.value, "n_rows": len(table), "warnings": n_bad}
    return _curve_inputs(args), Outcome(result, (header, _invariant_rows(table)))


def cmd_residuals(args, stdin):
    curve = load_curve(args.curve, args.space, args.samples, stdin)
    res = frenet_residuals(curve)
    result = {"space": curve.space.value, "n_rows": int(res.s.size), "max_residual": res.max()}
    header = ("s", "residual_T", "residual_N", "residual_B")
    return _curve_inputs(args), Outcome(result, (header, list(res.rows())))


def cmd_mannheim(args, stdin):
    curve = load_curve(args.curve, args.space, args.samples, stdin)
    report = mannheim_constant(curve, args.tolerance)
    return _curve_inputs(args) | {"tolerance": args.tolerance}, Outcome(report.to_dict())


def _partner_rows(partner):
    if isinstance(partner, SampledCurve):
        return partner.sample_table()
    return partner.positions()


def cmd_partner(args, stdin):
    curve = load_curve(args.curve, args.space, args.samples, stdin)
    lam = args.lam
    if lam is None:
        report = mannheim_constant(curve, args.tolerance)
        if report.verdict is not Verdict.MANNHEIM:
            raise InputError(
                f"--lambda is required: the curve is {report.verdict.value} "
                f"(c_residual={report.c_residual!r}), so no offset is implied"
            )
        lam = report.lam
    if lam == 0:
        raise InputError("--lambda must be nonzero")
    pair = construct_partner(curve, lam, args.tolerance)
    inputs = _curve_inputs(args) | {"lambda": lam, "tolerance": args.tolerance}
    return inputs, Outcome(pair.to_dict(), (CSV_HEADER, _partner_rows(pair.partner)))


_THEOREM_SPACES = {
    "3.3": (Space.G3,),
    "4.4": (Space.PG3_I,),
    "4.5": (Space.G3, Space.PG3_I),
    "4.2": (Space.PG3_I,),
    "4.3": (Space.PG3_II,),
    "prop": (Space.G3, Space.PG3_I, Space.PG3_II),
}


# spaces allowed for the first curve of a pair; the partner space follows from it
_PAIR_FIRST_SPACES = {
    "3.3": (Space.G3,),
    "4.4": (Space.PG3_I, Space.PG3_II),
    "4.5": (Space.G3, Space.PG3_I, Space.PG3_II),
    "4.2": (Space.PG3_I,),
    "4.3": (Space.PG3_II,),
}


def _require(curve, theorem, role="curve"):
    allowed = _THEOREM_SPACES[theorem]
    if curve.space not in allowed:
        names = " or ".join(s.value for s in allowed)
        raise InputError(
            f"--theorem {theorem} needs a {names} {role}, got {curve.space.value}"
        )


def cmd_verify(args, stdin):
    if len(args.curves) > 2:
        raise UsageError("verify takes one curve file or a pair of files")
    curves = [load_curve(p, args.space, args.samples, stdin) for p in args.curves]
    th = args.theorem
    inputs = {
        "curves": args.curves, "theorem": th, "space": args.space, "samples": args.samples,
        "lambda": args.lam, "epsilon": args.epsilon, "tolerance": args.tolerance,
    }
    if args.epsilon not in (1, -1):
        raise UsageError("--epsilon must be 1 or -1")

    if len(curves) == 2:
        alpha, alpha1 = curves
        if th == "prop":
            raise UsageError("--theorem prop takes a single curve")
        allowed = _PAIR_FIRST_SPACES[th]
        if alpha.space not in allowed:
            names = " or ".join(s.value for s in allowed)
            raise InputError(f"--theorem {th} needs a {names} first curve, got {alpha.space.value}")
        pair = verify_pair(alpha, alpha1, args.tolerance)
        result = {"pair": pair.to_dict()}
        if th in ("4.2", "4.3"):
            result["pass"] = pair.accepted
            return inputs, Outcome(result)
        lam = pair.lam if args.lam is None else args.lam
        if lam == 0:
            raise InputError("recovered lambda is zero: the curves coincide")
        partner = alpha1
    else:
        (curve,) = curves
        _require(curve, th)
        if th in ("4.2", "4.3"):
            return inputs, Outcome(characterize(curve, args.tolerance).to_dict())
        if th == "prop":
            return inputs, Outcome(helix_planar_check(curve, args.tolerance).to_dict())
        if args.lam is None:
            raise UsageError(f"--theorem {th} on a single partner curve needs --lambda")
        lam = args.lam
        partner = curve
        result = {}

    _require(partner, th, "partner")
    if th == "4.5":
        report = closed_form_check(partner, lam, args.epsilon, tol=args.tolerance)
    else:
        report = verify_partner_ode(partner, lam, tol=args.tolerance)
    result |= report.to_dict()
    return inputs, Outcome(result)


def cmd_synthesize(args, stdin):
    a, b = _floats(args.domain, 2, "--domain")
    spec = SynthesisSpec(args.space, args.kappa, args.tau, (a, b), args.step,
                         args.theta0, args.y0, args.z0, args.y1, args.z1)
    curve = synthesize(spec)
    inputs = {
        "space": spec.space.value, "kappa": str(spec.kappa), "tau": str(spec.tau),
        "domain": [a, b], "step": args.step, "theta0": args.theta0,
        "y0": args.y0, "z0": args.z0, "y1": args.y1, "z1": args.z1,
    }
    result = {"space": spec.space.value, "n_samples": curve.n_samples,
              "step": curve.h, "domain": list(curve.domain)}
    return inputs, Outcome(result, (CSV_HEADER, curve.sample_table()))


# ---- argument parsing ----------------------------------------------------------

def _add_curve_args(p):
    p.add_argument("curve", help="curve JSON file or s,x,y,z CSV table ('-' for stdin)")
    p.add_argument("--space", choices=[s.value for s in Space],
                   help="space of a CSV table (default G3)")
    p.add_argument("--samples", type=int, help="grid size for expression curves")


def _add_out(p):
    p.add_argument("--out", help="CSV output path (default: stdout, envelope to stderr)")


def build_parser():
    parser = _Parser(prog="galcurves", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", help="classify a vector of G3^1")
    p.add_argument("--vector", required=True, help="x,y,z (write --vector=-1,2,3 for negatives)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("invariants", help="curvature and torsion table")
    _add_curve_args(p)
    _add_out(p)
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("residuals", help="Frenet equation residual table")
    _add_curve_args(p)
    _add_out(p)
    p.set_defaults(func=cmd_residuals)

    p = sub.add_parser("mannheim", help="test the Mannheim relation")
    _add_curve_args(p)
    p.add_argument("--tolerance", type=float)
    p.set_defaults(func=cmd_mannheim)

    p = sub.add_parser("partner", help="build the offset partner curve")
    _add_curve_args(p)
    p.add_argument("--lambda", dest="lam", type=float, help="offset along N (default: c)")
    p.add_argument("--tolerance", type=float)
    _add_out(p)
    p.set_defaults(func=cmd_partner)

    p = sub.add_parser("verify", help="numerical theorem checks")
    p.add_argument("curves", nargs="+", metavar="curve",
                   help="one curve, or a curve and its candidate partner")
    p.add_argument("--theorem", required=True, choices=THEOREMS)
    p.add_argument("--space", choices=[s.value for s in Space])
    p.add_argument("--samples", type=int)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--epsilon", type=int, default=1)
    p.add_argument("--tolerance", type=float)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("synthesize", help="integrate a curve from curvature and torsion")
    p.add_argument("--space", required=True, choices=[Space.G3.value, Space.PG3_I.value])
    p.add_argument("--kappa", required=True)
    p.add_argument("--tau", required=True)
    p.add_argument("--domain", required=True, help="a,b (write --domain=-1,1 for negatives)")
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--theta0", type=float, default=0.0, help="initial normal angle")
    for name in ("y0", "z0", "y1", "z1"):
        p.add_argument(f"--{name}", type=float, default=0.0)
    _add_out(p)
    p.set_defaults(func=cmd_synthesize)
    return parser


def _command_name(argv):
    for a in argv:
        if not a.startswith("-"):
            return a
    return None


def main(argv=None, stdout=None, stderr=None, stdin=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    stdin = stdin or sys.stdin
    envelope = {"command": _command_name(argv), "inputs": {"argv": argv}, "result": None,
                "status": "ok", "error": None}
    out_stream = stdout
    code = EXIT_OK
    try:
        args = build_parser().parse_args(argv)
        envelope["command"] = args.command
        out_path = getattr(args, "out", None)
        inputs, outcome = args.func(args, stdin)
        envelope["inputs"] = inputs
        if outcome.table is not None:
            header, rows = outcome.table
            if out_path:
                write_table(out_path, header, rows)
                envelope["inputs"]["out"] = out_path
            else:
                write_table(stdout, header, rows)
                out_stream = stderr
        envelope["result"] = outcome.result
    except ValueError as err:
        code = EXIT_INPUT
        envelope.update(status="error", error=str(err), result=None)
    except ArithmeticError as err:
        code = EXIT_DOMAIN
        envelope.update(status="error", error=str(err), result=None)
    except OSError as err:
        code = EXIT_INPUT
        envelope.update(status="error", error=f"{err.filename}: {err.strerror}", result=None)
    out_stream.write(dumps(envelope))
    return code


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
