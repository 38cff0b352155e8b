"""Truncated Taylor arithmetic ("jets") and jet evaluation of expressions.

A :class:`Jet` of order K holds ``coeffs[k] = d^k f / ds^k`` at a point for
k = 0..K.  Every coefficient may be a numpy array, in which case the jet
describes a batch of points (typically a whole sampling grid) and all
operations act elementwise over the batch.
"""

from __future__ import annotations

import math

import numpy as np

from . import expr as ex
from .errors import ExpressionDomainError, JetDomainError

DEFAULT_ORDER = 4


def _factorials(order):
    return np.array([math.factorial(k) for k in range(order + 1)], dtype=float)


def _first_bad(mask):
    mask = np.asarray(mask)
    if mask.ndim == 0:
        return None
    return int(np.flatnonzero(mask.ravel())[0])


class Jet:
    """Value and derivatives of a scalar function through a fixed order."""

    __slots__ = ("coeffs",)
    __array_priority__ = 1000  # keep ndarray * Jet on our side

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=float)
        if c.ndim == 0 or c.shape[0] < 1:
            raise ValueError("a jet needs at least one coefficient")
        bad = ~np.isfinite(c)
        if np.any(bad):
            raise JetDomainError("non-finite jet coefficient", _first_bad(bad.any(axis=0)))
        c.setflags(write=False)
        self.coeffs = c

    @classmethod
    def constant(cls, value, order, shape=()):
        c = np.zeros((order + 1,) + tuple(shape))
        c[0] = value
        return cls(c)

    @classmethod
    def variable(cls, s0, order):
        s0 = np.asarray(s0, dtype=float)
        c = np.zeros((order + 1,) + s0.shape)
        c[0] = s0
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def from_taylor(cls, t):
        t = np.asarray(t, dtype=float)
        f = _factorials(t.shape[0] - 1).reshape((-1,) + (1,) * (t.ndim - 1))
        return cls(t * f)

    @property
    def order(self):
        return self.coeffs.shape[0] - 1

    @property
    def shape(self):
        return self.coeffs.shape[1:]

    @property
    def value(self):
        return self.coeffs[0]

    def taylor(self):
        f = _factorials(self.order).reshape((-1,) + (1,) * len(self.shape))
        return self.coeffs / f

    def truncate(self, order):
        if order > self.order:
            raise ValueError(f"cannot raise jet order {self.order} to {order}")
        return Jet(self.coeffs[: order + 1])

    def derivative(self):
        """Jet of f' (one order lower)."""
        if self.order == 0:
            raise ValueError("order-0 jet has no derivative information")
        return Jet(self.coeffs[1:])

    def where(self, mask, other):
        """Batchwise select: ``other`` where ``mask`` holds, else ``self``."""
        if not isinstance(other, Jet):
            other = Jet.constant(other, self.order, self.shape)
        a, b = _align(self, other)
        return Jet(np.where(mask, b.coeffs, a.coeffs))

    def __repr__(self):
        return f"Jet({self.coeffs.tolist()!r})"

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return self.coeffs.shape == other.coeffs.shape and bool(
            np.all(self.coeffs == other.coeffs)
        )

    __hash__ = None

    def __neg__(self):
        return Jet(-self.coeffs)

    def __pos__(self):
        return self

    def __add__(self, other):
        if not isinstance(other, Jet):
            shape = np.broadcast_shapes(self.shape, np.shape(other))
            other = Jet.constant(other, self.order, shape)
        a, b = _align(self, other)
        return Jet(a.coeffs + b.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.coeffs * np.asarray(other, dtype=float))
        a, b = _align(self, other)
        ta, tb = a.taylor(), b.taylor()
        out = np.zeros(np.broadcast_shapes(ta.shape, tb.shape))
        for k in range(out.shape[0]):
            acc = 0.0
            for j in range(k + 1):
                acc = acc + ta[j] * tb[k - j]
            out[k] = acc
        return Jet.from_taylor(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            other = np.asarray(other, dtype=float)
            if np.any(other == 0):
                raise JetDomainError("division by zero", _first_bad(other == 0))
            return Jet(self.coeffs / other)
        a, b = _align(self, other)
        b0 = b.coeffs[0]
        if np.any(b0 == 0):
            raise JetDomainError("division by zero", _first_bad(b0 == 0))
        ta, tb = a.taylor(), b.taylor()
        out = np.zeros(np.broadcast_shapes(ta.shape, tb.shape))
        for k in range(out.shape[0]):
            acc = ta[k]
            for j in range(k):
                acc = acc - out[j] * tb[k - j]
            out[k] = acc / tb[0]
        return Jet.from_taylor(out)

    def __rtruediv__(self, other):
        return Jet.constant(1.0, self.order, self.shape) * other / self

    def __pow__(self, p):
        if isinstance(p, Jet):
            return exp(p * log(self))
        p = float(p)
        if p == round(p) and abs(p) < 2**31:
            return ipow(self, int(p))
        return rpow(self, p)


def _align(a, b):
    if not isinstance(b, Jet):
        b = Jet.constant(b, a.order, np.shape(b))
    k = min(a.order, b.order)
    if a.order != k:
        a = a.truncate(k)
    if b.order != k:
        b = b.truncate(k)
    return a, b


def ipow(x, n):
    """Integer power by repeated multiplication; valid for any base."""
    if n == 0:
        return Jet.constant(1.0, x.order, x.shape)
    if n < 0:
        zero = x.value == 0
        if np.any(zero):
            raise JetDomainError("zero to a negative power", _first_bad(zero))
        return 1.0 / ipow(x, -n)
    result = None
    base = x
    while n:
        if n & 1:
            result = base if result is None else result * base
        n >>= 1
        if n:
            base = base * base
    return result


def rpow(x, p):
    """Real power via exp(p log x); needs a positive base."""
    bad = x.value <= 0
    if np.any(bad):
        raise JetDomainError("non-positive base for non-integer power", _first_bad(bad))
    return exp(p * log(x))


def exp(x):
    a = x.taylor()
    e = np.zeros_like(a)
    with np.errstate(over="ignore"):
        e[0] = np.exp(a[0])
    for k in range(1, a.shape[0]):
        acc = 0.0
        for j in range(1, k + 1):
            acc = acc + j * a[j] * e[k - j]
        e[k] = acc / k
    return Jet.from_taylor(e)


def log(x):
    a = x.taylor()
    bad = a[0] <= 0
    if np.any(bad):
        raise JetDomainError("log of non-positive value", _first_bad(bad))
    out = np.zeros_like(a)
    out[0] = np.log(a[0])
    for k in range(1, a.shape[0]):
        acc = 0.0
        for j in range(1, k):
            acc = acc + j * out[j] * a[k - j]
        out[k] = (a[k] - acc / k) / a[0]
    return Jet.from_taylor(out)


def _sincos(x, hyperbolic):
    a = x.taylor()
    sn = np.zeros_like(a)
    cs = np.zeros_like(a)
    with np.errstate(over="ignore"):
        sn[0] = np.sinh(a[0]) if hyperbolic else np.sin(a[0])
        cs[0] = np.cosh(a[0]) if hyperbolic else np.cos(a[0])
    sign = 1.0 if hyperbolic else -1.0
    for k in range(1, a.shape[0]):
        acc_s = 0.0
        acc_c = 0.0
        for j in range(1, k + 1):
            acc_s = acc_s + j * a[j] * cs[k - j]
            acc_c = acc_c + j * a[j] * sn[k - j]
        sn[k] = acc_s / k
        cs[k] = sign * acc_c / k
    return Jet.from_taylor(sn), Jet.from_taylor(cs)


def sin(x):
    return _sincos(x, False)[0]


def cos(x):
    return _sincos(x, False)[1]


def sinh(x):
    return _sincos(x, True)[0]


def cosh(x):
    return _sincos(x, True)[1]


def tan(x):
    sn, cs = _sincos(x, False)
    bad = np.abs(cs.value) < ex.ABS_EPS
    if np.any(bad):
        raise JetDomainError("tan pole", _first_bad(bad))
    return sn / cs


def tanh(x):
    sn, cs = _sincos(x, True)
    return sn / cs


def sqrt(x):
    a = x.taylor()
    bad = a[0] <= 0
    if np.any(bad):
        raise JetDomainError("sqrt of non-positive value", _first_bad(bad))
    r = np.zeros_like(a)
    r[0] = np.sqrt(a[0])
    for k in range(1, a.shape[0]):
        acc = a[k]
        for j in range(1, k):
            acc = acc - r[j] * r[k - j]
        r[k] = acc / (2.0 * r[0])
    return Jet.from_taylor(r)


def absolute(x):
    bad = np.abs(x.value) < ex.ABS_EPS
    if np.any(bad):
        raise JetDomainError("abs is not differentiable at a sign change", _first_bad(bad))
    return x * np.sign(x.value)


_FUNCS = {
    "sin": sin,
    "cos": cos,
    "tan": tan,
    "sinh": sinh,
    "cosh": cosh,
    "tanh": tanh,
    "exp": exp,
    "log": log,
    "sqrt": sqrt,
    "abs": absolute,
}


def eval_jet(expression, s0, order=DEFAULT_ORDER):
    """Derivatives 0..order of ``expression`` at ``s0`` (scalar or array).

    Raises :class:`ExpressionDomainError` naming the failing sub-expression.
    """
    if int(order) != order or order < 1:
        raise ValueError(f"jet order must be an integer >= 1, got {order!r}")
    expression = ex.as_expression(expression)
    s0 = np.asarray(s0, dtype=float)
    x = Jet.variable(s0, int(order))
    return _eval(expression.ast, x, s0)


def _eval(node, x, s0):
    try:
        return _eval_node(node, x, s0)
    except JetDomainError as err:
        idx = err.index if err.index is not None else 0
        where = float(s0.ravel()[idx]) if s0.ndim else float(s0)
        raise ExpressionDomainError(err.reason, ex.unparse(node), where) from None


def _eval_node(node, x, s0):
    if isinstance(node, (ex.Const, ex.NamedConst)):
        return Jet.constant(node.value, x.order, x.shape)
    if isinstance(node, ex.Var):
        return x
    if isinstance(node, ex.Neg):
        return -_eval(node.operand, x, s0)
    if isinstance(node, ex.Call):
        return _FUNCS[node.func](_eval(node.arg, x, s0))
    left = _eval(node.left, x, s0)
    if isinstance(node, ex.Pow):
        if not ex.depends_on_s(node.right):
            p = float(ex.evaluate(ex.Expression(node.right), 0.0))
            if p == round(p) and abs(p) < 2**31:
                return ipow(left, int(p))
            return rpow(left, p)
        return exp(_eval(node.right, x, s0) * log(left))
    right = _eval(node.right, x, s0)
    if isinstance(node, ex.Add):
        return left + right
    if isinstance(node, ex.Sub):
        return left - right
    if isinstance(node, ex.Mul):
        return left * right
    return left / right
