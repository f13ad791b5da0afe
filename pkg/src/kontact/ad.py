"""Forward-mode differentiation for ambient-space formulas.

Every geometric field in this package is an ordinary function of an
ambient point, written with the vector helpers below (``dot``, ``matvec``,
``sv``, ``proj_tangent`` ...).  Feeding such a function a :class:`Dual`
whose perturbation encodes a direction returns the directional derivative
alongside the value, to machine precision.  Duals nest, so second and
third derivatives come from the same code paths.  Central finite
differences are kept as an independent cross-check and are deliberately
implemented without touching the dual machinery.

Payloads (``val``/``eps``) are floats, numpy arrays, or further Duals.
Leading axes broadcast, and all contractions act on the last axis, so the
same field code evaluates one point or a batch of points.
"""

from __future__ import annotations

from typing import Callable, Sequence, Union

import numpy as np

Payload = Union[float, np.ndarray, "Dual"]


class Dual:
    """val + eps·t with t² = 0; payloads may themselves be Duals."""

    __slots__ = ("val", "eps")

    # Keep numpy from absorbing Duals into object arrays: binary ufuncs
    # with a Dual operand defer to the reflected methods below.
    __array_ufunc__ = None

    def __init__(self, val: Payload, eps: Payload):
        self.val = val
        self.eps = eps

    def __repr__(self) -> str:
        return f"Dual({self.val!r}, {self.eps!r})"

    def __add__(self, other):
        if type(other) is Dual:
            return Dual(self.val + other.val, self.eps + other.eps)
        return Dual(self.val + other, self.eps)

    __radd__ = __add__

    def __sub__(self, other):
        if type(other) is Dual:
            return Dual(self.val - other.val, self.eps - other.eps)
        return Dual(self.val - other, self.eps)

    def __rsub__(self, other):
        return Dual(other - self.val, -self.eps)

    def __neg__(self):
        return Dual(-self.val, -self.eps)

    def __mul__(self, other):
        if type(other) is Dual:
            return Dual(self.val * other.val,
                        self.val * other.eps + self.eps * other.val)
        return Dual(self.val * other, self.eps * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if type(other) is Dual:
            q = self.val / other.val
            return Dual(q, (self.eps - q * other.eps) / other.val)
        return Dual(self.val / other, self.eps / other)

    def __rtruediv__(self, other):
        q = other / self.val
        return Dual(q, -(q / self.val) * self.eps)

    def __pow__(self, exponent: float):
        return Dual(self.val ** exponent,
                    (exponent * self.val ** (exponent - 1.0)) * self.eps)

    def __getitem__(self, index):
        return Dual(self.val[index], self.eps[index])


def depth(x: Payload) -> int:
    d = 0
    while type(x) is Dual:
        d += 1
        x = x.val
    return d


def value(x: Payload):
    """Strip all dual structure, returning the underlying float/array."""
    while type(x) is Dual:
        x = x.val
    return x


def _zero(x: Payload):
    if type(x) is Dual:
        return Dual(_zero(x.val), _zero(x.eps))
    if isinstance(x, np.ndarray):
        return np.zeros_like(x)
    return 0.0


def lift(c: Payload, like: Payload) -> Payload:
    """Embed ``c`` as a constant at the dual depth of ``like``."""
    if type(like) is not Dual:
        return c
    inner = lift(c, like.val)
    return Dual(inner, _zero(inner))


def make_dual(x: Payload, d: Payload) -> Dual:
    """Pair a point with a perturbation direction of matching depth."""
    if depth(d) < depth(x):
        d = lift(d, x)
    return Dual(x, d)


def directional(f: Callable, x: Payload, d: Payload):
    """Directional derivative of ``f`` at ``x`` along ``d``.

    Exact (no truncation error) and composable: ``x`` and ``d`` may carry
    dual structure themselves, which is how second derivatives arise.
    """
    return f(make_dual(x, d)).eps


# ---------------------------------------------------------------------------
# vector helpers (last-axis semantics, dual-aware)

def dot(x, y):
    """Inner product over the last axis."""
    if type(x) is Dual:
        if type(y) is Dual:
            return Dual(dot(x.val, y.val), dot(x.val, y.eps) + dot(x.eps, y.val))
        return Dual(dot(x.val, y), dot(x.eps, y))
    if type(y) is Dual:
        return Dual(dot(x, y.val), dot(x, y.eps))
    return np.sum(x * y, axis=-1)


def matvec(mat: np.ndarray, x):
    """Apply a constant matrix to a (possibly dual, possibly batched) vector."""
    if type(x) is Dual:
        return Dual(matvec(mat, x.val), matvec(mat, x.eps))
    return x @ mat.T


def sv(s, v):
    """Scalar field times vector field (broadcasts batched scalars)."""
    if type(s) is Dual:
        if type(v) is Dual:
            return Dual(sv(s.val, v.val), sv(s.val, v.eps) + sv(s.eps, v.val))
        return Dual(sv(s.val, v), sv(s.eps, v))
    if type(v) is Dual:
        return Dual(sv(s, v.val), sv(s, v.eps))
    if np.ndim(s) > 0:
        return np.expand_dims(s, -1) * v
    return s * v


def sqrt(x):
    if type(x) is Dual:
        return x ** 0.5
    return np.sqrt(x)


def norm_sq(x):
    return dot(x, x)


def norm(x):
    return sqrt(dot(x, x))


def unit(x):
    return sv(1.0 / norm(x), x)


def stack(scalars: Sequence) -> Payload:
    """Assemble scalars into a vector along a new last axis."""
    if any(type(s) is Dual for s in scalars):
        ref = next(s for s in scalars if type(s) is Dual)
        lifted = [s if type(s) is Dual else lift(s, ref) for s in scalars]
        return Dual(stack([s.val for s in lifted]),
                    stack([s.eps for s in lifted]))
    return np.stack([np.asarray(s, dtype=float) for s in scalars], axis=-1)


def proj_tangent(x, v):
    """Component of ``v`` orthogonal to the position vector ``x``."""
    return v - sv(dot(v, x) / dot(x, x), x)


def ambient_basis(dim: int) -> np.ndarray:
    return np.eye(dim)


def jacobian_columns(f: Callable, x: Payload, dim: int) -> list:
    """Directional derivatives of ``f`` along each ambient axis."""
    eye = np.eye(dim)
    return [directional(f, x, eye[i]) for i in range(dim)]


def broadcast_batch(x: Payload, count: int) -> Payload:
    """Prepend a broadcast axis of length ``count`` to every leaf."""
    if type(x) is Dual:
        return Dual(broadcast_batch(x.val, count), broadcast_batch(x.eps, count))
    arr = np.asarray(x, dtype=float)
    return np.broadcast_to(arr, (count,) + arr.shape)


def jacobian_rows(f: Callable, x: Payload, dim: int) -> Payload:
    """All ambient directional derivatives of ``f`` at once.

    Returns a payload whose leading axis indexes the direction: row i is
    the derivative of ``f`` along ambient axis e_i.  One broadcast dual
    evaluation instead of ``dim`` separate ones.  Existing batch axes of
    ``x`` are kept distinct from the new direction axis.
    """
    lead = np.ndim(value(x)) - 1
    directions = np.eye(dim).reshape((dim,) + (1,) * lead + (dim,))
    return directional(f, broadcast_batch(x, dim), directions)


# ---------------------------------------------------------------------------
# finite-difference cross-checks (independent of the dual machinery)

def fd_directional(f: Callable, x: np.ndarray, d: np.ndarray,
                   step: float = 1e-5):
    """Central-difference directional derivative, O(step²) error."""
    return (f(x + step * d) - f(x - step * d)) / (2.0 * step)


def fd_second_directional(f: Callable, x: np.ndarray, d1: np.ndarray,
                          d2: np.ndarray, step: float = 1e-4):
    """Mixed second directional derivative by cross differences."""
    return (f(x + step * (d1 + d2)) - f(x + step * (d1 - d2))
            - f(x + step * (d2 - d1)) + f(x - step * (d1 + d2))) / (4.0 * step ** 2)


def great_circle(p: np.ndarray, u: np.ndarray, t: float) -> np.ndarray:
    """Unit-speed-scaled circle through p with initial velocity u."""
    w = float(np.linalg.norm(u))
    if w == 0.0:
        return p.copy()
    return np.cos(w * t) * p + (np.sin(w * t) / w) * u


def fd_curve_derivative(s: Callable, p: np.ndarray, u: np.ndarray,
                        step: float = 1e-5) -> float:
    """d/dt s(γ(t)) at t=0 along the great circle with velocity u."""
    return (s(great_circle(p, u, step)) - s(great_circle(p, u, -step))) / (2.0 * step)


def fd_curve_derivative_5pt(s: Callable, p: np.ndarray, u: np.ndarray,
                            step: float = 1e-3) -> float:
    """Five-point stencil along the great circle, O(step⁴) error."""
    f1 = s(great_circle(p, u, step))
    f2 = s(great_circle(p, u, 2.0 * step))
    fm1 = s(great_circle(p, u, -step))
    fm2 = s(great_circle(p, u, -2.0 * step))
    return (-f2 + 8.0 * f1 - 8.0 * fm1 + fm2) / (12.0 * step)
