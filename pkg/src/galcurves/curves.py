"""Curve representations in arclength normal form ``(s, y(s), z(s))``.

Every curve answers one question: what are the jets of its coordinate
functions at a set of parameter values.  Expression curves answer exactly by
jet arithmetic; sampled curves answer at interior grid nodes with central
finite differences.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import expr as ex
from .errors import IngestError, InputError
from .jets import Jet, eval_jet

MIN_SAMPLES = 9
DEFAULT_SAMPLES = 201

# Tolerances for curves whose derivatives come from jets vs. finite differences.
JET_CURVATURE_TOL = 1e-9
SAMPLED_CURVATURE_TOL = 1e-5
JET_MANNHEIM_TOL = 1e-6
SAMPLED_MANNHEIM_TOL = 1e-3


class Space(str, enum.Enum):
    G3 = "G3"
    PG3_I = "PG3-I"
    PG3_II = "PG3-II"

    @classmethod
    def parse(cls, value):
        if isinstance(value, Space):
            return value
        key = str(value).strip().upper().replace("_", "-")
        aliases = {
            "G3": cls.G3,
            "PG3-I": cls.PG3_I,
            "PG3-TYPEI": cls.PG3_I,
            "PG3-II": cls.PG3_II,
            "PG3-TYPEII": cls.PG3_II,
        }
        try:
            return aliases[key]
        except KeyError:
            raise InputError(f"unknown space {value!r}; expected G3, PG3-I or PG3-II") from None

    @property
    def pseudo(self):
        return self is not Space.G3

    def __str__(self):
        return self.value


class Curve:
    """Common interface of all curve sources."""

    space: Space
    source: str
    curvature_tol: float
    mannheim_tol: float
    max_order: int | None = None

    @property
    def domain(self):
        raise NotImplementedError

    def grid(self):
        """Default evaluation points for grid-wide checks."""
        raise NotImplementedError

    def coordinate_jets(self, s, order):
        """Return jets ``(y, z, phi)`` of the given order at ``s``.

        ``phi`` is ``None`` unless the curve is a Type II pseudo-Galilean curve,
        for which ``z`` is identically zero.
        """
        raise NotImplementedError

    def accepts(self, s):
        a, b = self.domain
        slack = 1e-12 * max(1.0, abs(a), abs(b))
        s = np.asarray(s, dtype=float)
        return bool(np.all((s >= a - slack) & (s <= b + slack)))

    def positions(self, s=None):
        """Rows ``(s, x, y, z)`` with ``x = s``."""
        s = self.grid() if s is None else np.atleast_1d(np.asarray(s, dtype=float))
        y, z, _ = self.coordinate_jets(s, 1)
        return np.column_stack([s, s, y.value, z.value])

    def _check_order(self, order):
        if self.max_order is not None and order > self.max_order:
            raise InputError(
                f"{self.source} curve provides derivatives up to order "
                f"{self.max_order}, {order} requested"
            )


class ExpressionCurve(Curve):
    """Curve given by closed-form coordinate expressions."""

    source = "expressions"
    curvature_tol = JET_CURVATURE_TOL
    mannheim_tol = JET_MANNHEIM_TOL

    def __init__(self, space, y, z=None, phi=None, domain=(0.0, 1.0), n_samples=DEFAULT_SAMPLES):
        self.space = Space.parse(space)
        self.y = ex.as_expression(y)
        if self.space is Space.PG3_II:
            if phi is None:
                raise InputError("a Type II curve needs phi(s)")
            if z is not None and ex.as_expression(z).ast not in (ex.Const(0.0),):
                raise InputError("a Type II curve is planar: z must be absent or 0")
            self.z = ex.as_expression(0.0)
            self.phi = ex.as_expression(phi)
        else:
            if z is None:
                raise InputError(f"a {self.space} curve needs z(s)")
            if phi is not None:
                raise InputError("phi(s) only applies to Type II curves")
            self.z = ex.as_expression(z)
            self.phi = None
        a, b = (float(v) for v in domain)
        if not (math.isfinite(a) and math.isfinite(b)) or b <= a:
            raise InputError(f"domain must satisfy s_min < s_max, got {domain!r}")
        if int(n_samples) != n_samples or n_samples < MIN_SAMPLES:
            raise InputError(f"n_samples must be an integer >= {MIN_SAMPLES}")
        self._domain = (a, b)
        self.n_samples = int(n_samples)

    def __repr__(self):
        parts = [f"space={self.space.value!r}", f"y={str(self.y)!r}"]
        if self.phi is None:
            parts.append(f"z={str(self.z)!r}")
        else:
            parts.append(f"phi={str(self.phi)!r}")
        parts.append(f"domain={self._domain!r}")
        return f"ExpressionCurve({', '.join(parts)})"

    @property
    def domain(self):
        return self._domain

    def grid(self):
        return np.linspace(self._domain[0], self._domain[1], self.n_samples)

    def coordinate_jets(self, s, order):
        s = np.asarray(s, dtype=float)
        y = eval_jet(self.y, s, order)
        if self.phi is not None:
            return y, Jet.constant(0.0, order, s.shape), eval_jet(self.phi, s, order)
        return y, eval_jet(self.z, s, order), None


@lru_cache(maxsize=None)
def central_weights(deriv, half_width):
    """Exact central-difference weights for offsets -half_width..half_width."""
    offsets = list(range(-half_width, half_width + 1))
    n = len(offsets)
    # Solve sum_j w_j * o_j^m = m! * [m == deriv] for m = 0..n-1.
    rows = [[Fraction(o) ** m for o in offsets] + [Fraction(math.factorial(deriv) if m == deriv else 0)]
            for m in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if rows[r][col] != 0)
        rows[col], rows[piv] = rows[piv], rows[col]
        p = rows[col][col]
        rows[col] = [v / p for v in rows[col]]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[col])]
    return tuple(float(rows[i][n]) for i in range(n))


# derivative order -> stencil half width (7-point except the 5-point second derivative)
STENCIL_HALF_WIDTH = {1: 3, 2: 2, 3: 3, 4: 3}
EDGE = max(STENCIL_HALF_WIDTH.values())


class SampledCurve(Curve):
    """Curve known on a uniform grid.

    ``y_columns[k]`` holds the k-th derivative of y at the nodes (k = 0 is
    required; higher stored derivatives are optional and come from synthesis).
    A derivative of order k >= 1 is obtained by finite-differencing the stored
    column of order min(k - 1, top), so each stored column is checked against
    the next one rather than read back verbatim.
    """

    source = "samples"
    curvature_tol = SAMPLED_CURVATURE_TOL
    mannheim_tol = SAMPLED_MANNHEIM_TOL

    def __init__(self, space, s, y_columns, z_columns, origin="ingested"):
        self.space = Space.parse(space)
        if self.space is Space.PG3_II:
            raise InputError("sampled Type II curves are not supported (phi is not sampled)")
        s = np.asarray(s, dtype=float)
        self.y_columns = tuple(np.asarray(c, dtype=float) for c in y_columns)
        self.z_columns = tuple(np.asarray(c, dtype=float) for c in z_columns)
        if len(self.y_columns) != len(self.z_columns) or not self.y_columns:
            raise InputError("y and z need the same, nonzero number of columns")
        if any(c.shape != s.shape for c in self.y_columns + self.z_columns):
            raise InputError("every column must have one value per node")
        if s.ndim != 1 or s.size < MIN_SAMPLES:
            raise IngestError(f"need at least {MIN_SAMPLES} samples, got {s.size}")
        steps = np.diff(s)
        h = (s[-1] - s[0]) / (s.size - 1)
        if h <= 0 or np.max(np.abs(steps - h)) > 1e-9 * abs(h):
            raise IngestError("samples must be uniformly spaced in s (to 1e-9 relative)")
        self.s = s
        self.h = float(h)
        self.origin = origin
        self.max_order = len(self.y_columns) - 1 + 4

    def __repr__(self):
        return (f"SampledCurve(space={self.space.value!r}, n={self.s.size}, "
                f"domain={self.domain!r}, origin={self.origin!r})")

    @property
    def domain(self):
        return (float(self.s[0]), float(self.s[-1]))

    @property
    def n_samples(self):
        return self.s.size

    def grid(self):
        return self.s[EDGE:-EDGE].copy()

    def node_index(self, s):
        """Indices of interior nodes matching ``s``; raises for other points."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        idx = np.rint((s - self.s[0]) / self.h).astype(int)
        off_grid = (idx < 0) | (idx >= self.s.size)
        idx_c = np.clip(idx, 0, self.s.size - 1)
        off_grid |= np.abs(self.s[idx_c] - s) > 1e-9 * np.maximum(1.0, np.abs(s))
        if np.any(off_grid):
            bad = float(s[np.flatnonzero(off_grid)[0]])
            raise InputError(f"s={bad!r} is not a node of the sampled curve")
        outside = (idx < EDGE) | (idx > self.s.size - 1 - EDGE)
        if np.any(outside):
            bad = int(idx[np.flatnonzero(outside)[0]])
            raise InputError(
                f"row {bad} is too close to the end of the table: derivatives are only "
                f"available on interior rows {EDGE}..{self.s.size - 1 - EDGE}"
            )
        return idx_c

    def accepts(self, s):
        try:
            self.node_index(s)
        except InputError:
            return False
        return True

    def _derivative(self, columns, idx, k):
        if k == 0:
            return columns[0][idx]
        j = min(k - 1, len(columns) - 1)
        m = k - j
        hw = STENCIL_HALF_WIDTH[m]
        w = central_weights(m, hw)
        col = columns[j]
        acc = np.zeros(idx.shape)
        for o, wo in zip(range(-hw, hw + 1), w):
            if wo:
                acc = acc + wo * col[idx + o]
        return acc / self.h**m

    def coordinate_jets(self, s, order):
        self._check_order(order)
        scalar = np.ndim(s) == 0
        idx = self.node_index(s)
        ys = [self._derivative(self.y_columns, idx, k) for k in range(order + 1)]
        zs = [self._derivative(self.z_columns, idx, k) for k in range(order + 1)]
        if scalar:
            ys = [v[0] for v in ys]
            zs = [v[0] for v in zs]
        return Jet(ys), Jet(zs), None

    def sample_table(self):
        return np.column_stack([self.s, self.s, self.y_columns[0], self.z_columns[0]])


def ingest_samples(table, space=Space.G3):
    """Build a :class:`SampledCurve` from rows ``(s, x, y, z)``.

    The rows must be uniformly spaced in s with ``x = s`` (arclength normal form).
    """
    arr = np.asarray(table, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 4:
        raise IngestError("expected a table with four columns s, x, y, z")
    if arr.shape[0] < MIN_SAMPLES:
        raise IngestError(f"need at least {MIN_SAMPLES} rows, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise IngestError("table contains non-finite values")
    s, x, y, z = arr.T
    if np.max(np.abs(x - s)) > 1e-9:
        raise IngestError("column x must equal s (arclength normal form)")
    return SampledCurve(space, s, [y], [z], origin="ingested")


CSV_HEADER = ("s", "x", "y", "z")


def fmt(v):
    """Shortest round-trip decimal form of a float (at most 17 digits)."""
    return repr(float(v))


def write_table(path_or_file, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join("" if v is None else fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if hasattr(path_or_file, "write"):
        path_or_file.write(text)
    else:
        with open(path_or_file, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def read_curve_csv(path, space=Space.G3):
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    return parse_curve_csv(text, space)


def parse_curve_csv(text, space=Space.G3):
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise IngestError("empty CSV") from None
    if tuple(h.strip() for h in header) != CSV_HEADER:
        raise IngestError(f"CSV header must be {','.join(CSV_HEADER)}, got {','.join(header)}")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 4:
            raise IngestError(f"line {lineno}: expected 4 fields, got {len(row)}")
        try:
            rows.append([float(v) for v in row])
        except ValueError:
            raise IngestError(f"line {lineno}: not a number") from None
    return ingest_samples(rows, space)
