"""Round unit sphere S^m embedded in R^(m+1).

Points and tangent vectors live in ambient coordinates.  Vector fields
are ambient formulas evaluated through :mod:`kontact.ad`, tangency is
enforced by projection at evaluation, and the Levi-Civita connection is
the tangential projection of the ambient directional derivative (Gauss
formula).  Curvature and Ricci come in two flavours each: the exact
constant-curvature expressions and numerical versions assembled from
covariant derivatives, kept as mutual cross-checks.

Sign conventions (frozen package-wide, pinned by tests):

* curvature  R(u,v)w = ∇_u∇_v w − ∇_v∇_u w − ∇_[u,v] w, so that
  g(R(u,v)v, u) = +1 for orthonormal u, v on the unit sphere;
* Ricci      ric(u,v) = Σ_i g(R(E_i,u)v, E_i) = (m−1)·g(u,v), which makes
  the Ricci endomorphism of any Reeb field equal (m−1)·Id = 2n·Id.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import ad
from .ad import directional, dot, matvec, proj_tangent, sv, value
from .errors import (
    BasePointMismatchError,
    DegenerateInputError,
    GeometryError,
    SamplingExhaustedError,
    TangencyError,
)

POINT_TOL = 1e-12
TANGENT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SpherePoint:
    """Unit vector in ambient coordinates."""

    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", np.asarray(self.coords, dtype=float))
        r = float(np.linalg.norm(self.coords))
        if abs(r - 1.0) > POINT_TOL:
            raise GeometryError(f"point norm {r} is not 1 within {POINT_TOL}")

    @classmethod
    def from_array(cls, arr: Iterable[float]) -> "SpherePoint":
        v = np.asarray(arr, dtype=float)
        r = np.linalg.norm(v)
        if r == 0.0:
            raise GeometryError("cannot normalize the zero vector")
        return cls(v / r)

    @property
    def ambient_dim(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        """Dimension m of the sphere itself."""
        return self.ambient_dim - 1


@dataclass(frozen=True, eq=False)
class TangentVector:
    """Ambient vector attached to a sphere point, orthogonal to it."""

    base: SpherePoint
    vec: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vec", np.asarray(self.vec, dtype=float))
        straying = abs(float(self.vec @ self.base.coords))
        if straying > TANGENT_TOL * max(1.0, float(np.linalg.norm(self.vec))):
            raise TangencyError(f"vector strays {straying} from the tangent space")

    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))

    def unit(self) -> "TangentVector":
        r = self.norm()
        if r == 0.0:
            raise GeometryError("cannot normalize a zero tangent vector")
        return TangentVector(self.base, self.vec / r)

    def __add__(self, other: "TangentVector") -> "TangentVector":
        _require_same_base(self, other)
        return TangentVector(self.base, self.vec + other.vec)

    def __sub__(self, other: "TangentVector") -> "TangentVector":
        _require_same_base(self, other)
        return TangentVector(self.base, self.vec - other.vec)

    def __mul__(self, scalar: float) -> "TangentVector":
        return TangentVector(self.base, self.vec * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "TangentVector":
        return TangentVector(self.base, -self.vec)


@dataclass(frozen=True, eq=False)
class AmbientVectorField:
    """Vector field given by an ambient formula defined near the sphere.

    ``eval`` must be written with the :mod:`kontact.ad` helpers so it
    accepts dual inputs; covariant derivatives differentiate the
    projected composite x ↦ P(x)·eval(x), so the raw formula need not be
    tangent away from the sphere.
    """

    eval: Callable
    tangent: bool = True
    label: str = ""

    def at(self, p: SpherePoint) -> TangentVector:
        raw = value(self.eval(p.coords))
        return project(p, raw)

    def raw(self, p: SpherePoint) -> np.ndarray:
        return np.asarray(value(self.eval(p.coords)), dtype=float)


def constant_field(c: np.ndarray, label: str = "") -> AmbientVectorField:
    """Projection of a constant ambient vector; tangent on the whole sphere."""
    c = np.asarray(c, dtype=float)
    return AmbientVectorField(lambda x: proj_tangent(x, ad.lift(c, x)),
                              tangent=True, label=label or "projected constant")


def linear_field(mat: np.ndarray, label: str = "") -> AmbientVectorField:
    """Field x ↦ M·x (tangent iff M is skew-symmetric)."""
    mat = np.asarray(mat, dtype=float)
    tangent = bool(np.max(np.abs(mat + mat.T)) < 1e-12)
    return AmbientVectorField(lambda x: matvec(mat, x), tangent=tangent,
                              label=label or "linear")


def extension_of(u: TangentVector, label: str = "") -> AmbientVectorField:
    """Parallel-transport-free extension: project the frozen ambient vector."""
    return constant_field(u.vec, label=label or "extension")


@dataclass(frozen=True, eq=False)
class OrthoComplexStructure:
    """Orthogonal matrix with square −1 (hence skew-symmetric)."""

    mat: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mat", np.asarray(self.mat, dtype=float))
        m = self.mat
        eye = np.eye(m.shape[0])
        if np.max(np.abs(m @ m.T - eye)) > 1e-12:
            raise GeometryError("matrix is not orthogonal")
        if np.max(np.abs(m @ m + eye)) > 1e-12:
            raise GeometryError("matrix squared is not -identity")
        if np.max(np.abs(m + m.T)) > 1e-12:
            raise GeometryError("matrix is not skew-symmetric")

    @property
    def ambient_dim(self) -> int:
        return self.mat.shape[0]


def block_diag_complex_structure(signs: Sequence[int]) -> OrthoComplexStructure:
    """Block-diagonal structure from 2x2 quarter-turn blocks s·[[0,1],[-1,0]]."""
    j = np.array([[0.0, 1.0], [-1.0, 0.0]])
    blocks = [s * j for s in signs]
    n = 2 * len(blocks)
    mat = np.zeros((n, n))
    for k, b in enumerate(blocks):
        mat[2 * k: 2 * k + 2, 2 * k: 2 * k + 2] = b
    return OrthoComplexStructure(mat)


@dataclass(frozen=True, eq=False)
class Frame:
    """Orthonormal tangent frame at a point."""

    base: SpherePoint
    vectors: tuple

    def __len__(self) -> int:
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def __getitem__(self, i: int) -> TangentVector:
        return self.vectors[i]

    @property
    def matrix(self) -> np.ndarray:
        """Row-stacked ambient components, shape (k, m+1)."""
        return np.stack([v.vec for v in self.vectors])


def _require_same_base(u: TangentVector, v: TangentVector) -> None:
    if u.base is v.base:
        return
    if not np.allclose(u.base.coords, v.base.coords, rtol=0.0, atol=POINT_TOL):
        raise BasePointMismatchError("tangent vectors live at different points")


# ---------------------------------------------------------------------------
# metric, connection, bracket

def project(p: SpherePoint, v: Iterable[float]) -> TangentVector:
    """Tangential projection v − ⟨v,p⟩p at p."""
    v = np.asarray(v, dtype=float)
    return TangentVector(p, v - (v @ p.coords) * p.coords)


def metric(u: TangentVector, v: TangentVector) -> float:
    """Round metric: the ambient dot product of tangent representatives."""
    _require_same_base(u, v)
    return float(u.vec @ v.vec)


def projected_eval(field: AmbientVectorField, x):
    """The composite x ↦ P(x)·field(x) used by all derivative formulas."""
    return proj_tangent(x, field.eval(x))


def cov_deriv(V: AmbientVectorField, u: TangentVector) -> TangentVector:
    """Levi-Civita connection ∇_u V by the Gauss formula."""
    if not V.tangent:
        raise TangencyError("covariant derivative requires a tangent-flagged field")
    p = u.base
    d = directional(lambda x: projected_eval(V, x), p.coords, u.vec)
    return project(p, value(d))


def lie_bracket(V: AmbientVectorField, W: AmbientVectorField,
                p: SpherePoint) -> TangentVector:
    """[V, W] at p, computed from the ambient extensions."""
    if not (V.tangent and W.tangent):
        raise TangencyError("lie_bracket requires tangent-flagged fields")
    vp = value(projected_eval(V, p.coords))
    wp = value(projected_eval(W, p.coords))
    dw = value(directional(lambda x: projected_eval(W, x), p.coords, vp))
    dv = value(directional(lambda x: projected_eval(V, x), p.coords, wp))
    return TangentVector(p, dw - dv)


def scalar_curve_derivative(s: Callable, p: SpherePoint, u: TangentVector) -> float:
    """u(s) computed through the great circle with velocity u (dual numbers)."""

    def along(t):
        w = float(np.linalg.norm(u.vec))
        if w == 0.0:
            return s(ad.lift(p.coords, t))
        cos_t = _cos(t * w)
        sin_t = _sin(t * w)
        return sv(cos_t, ad.lift(p.coords, t)) + sv(sin_t, ad.lift(u.vec / w, t))

    return float(value(directional(lambda t: s(along(t)), 0.0, 1.0)))


def _cos(t):
    if type(t) is ad.Dual:
        return ad.Dual(_cos(t.val), -_sin(t.val) * t.eps)
    return np.cos(t)


def _sin(t):
    if type(t) is ad.Dual:
        return ad.Dual(_sin(t.val), _cos(t.val) * t.eps)
    return np.sin(t)


# ---------------------------------------------------------------------------
# curvature and Ricci

def curvature(u: TangentVector, v: TangentVector, w: TangentVector) -> TangentVector:
    """R(u,v)w on the unit sphere: g(v,w)u − g(u,w)v."""
    _require_same_base(u, v)
    _require_same_base(u, w)
    return TangentVector(u.base, metric(v, w) * u.vec - metric(u, w) * v.vec)


def _second_cov_field(W: AmbientVectorField, V: AmbientVectorField) -> Callable:
    """Ambient formula for x ↦ P(x)·(∇_{V(x)} W), dual-evaluable."""

    def evaluator(x):
        dW = directional(lambda y: projected_eval(W, y), x, projected_eval(V, x))
        return proj_tangent(x, dW)

    return evaluator


def curvature_numeric(u: TangentVector, v: TangentVector,
                      w: TangentVector) -> TangentVector:
    """R(u,v)w from nested covariant derivatives of extension fields."""
    _require_same_base(u, v)
    _require_same_base(u, w)
    p = u.base
    U, V, W = extension_of(u), extension_of(v), extension_of(w)
    t1 = value(directional(_second_cov_field(W, V), p.coords, u.vec))
    t2 = value(directional(_second_cov_field(W, U), p.coords, v.vec))
    bracket = lie_bracket(U, V, p)
    t3 = value(directional(lambda x: projected_eval(W, x), p.coords, bracket.vec))
    raw = t1 - t2 - t3
    return project(p, raw)


def ricci(u: TangentVector, v: TangentVector) -> float:
    """Ricci tensor of the unit sphere: (m−1)·g(u,v)."""
    _require_same_base(u, v)
    return (u.base.dim - 1) * metric(u, v)


def ricci_operator(u: TangentVector) -> TangentVector:
    """Ricci endomorphism Q with ric(u,v) = g(Qu, v); here (m−1)·Id."""
    return TangentVector(u.base, (u.base.dim - 1) * u.vec)


def ricci_frame_sum(u: TangentVector, v: TangentVector,
                    curvature_fn: Callable = curvature,
                    frame: Optional[Frame] = None) -> float:
    """ric(u,v) = Σ_i g(R(E_i,u)v, E_i) over an orthonormal frame."""
    _require_same_base(u, v)
    fr = frame if frame is not None else tangent_basis(u.base)
    return float(sum(metric(curvature_fn(e, u, v), e) for e in fr))


def ricci_operator_frame_sum(u: TangentVector,
                             curvature_fn: Callable = curvature,
                             frame: Optional[Frame] = None) -> TangentVector:
    """Q(u) assembled from the frame-sum Ricci tensor."""
    fr = frame if frame is not None else tangent_basis(u.base)
    out = np.zeros_like(u.vec)
    for e in fr:
        out += ricci_frame_sum(u, e, curvature_fn, fr) * e.vec
    return TangentVector(u.base, out)


# ---------------------------------------------------------------------------
# frames

def gram_schmidt_frame(p: SpherePoint,
                       seeds: Sequence[TangentVector] = (),
                       completion: Optional[Sequence[int]] = None) -> Frame:
    """Orthonormal tangent frame whose leading vectors span the seeds.

    After the seeds, the frame is completed with projections of the
    canonical ambient basis (in ``completion`` order, default index
    order), dropping near-dependent candidates.  Deterministic given the
    seed order.
    """
    seed_vecs = []
    for s in seeds:
        _require_same_base_point(p, s)
        seed_vecs.append(proj_np(p.coords, s.vec))
    if seed_vecs:
        gram = np.array([[a @ b for b in seed_vecs] for a in seed_vecs])
        if abs(np.linalg.det(gram)) < 1e-10:
            raise DegenerateInputError("seed vectors are rank deficient")

    m = p.dim
    basis: list[np.ndarray] = []

    def push(candidate: np.ndarray, hard: bool, threshold: float) -> None:
        w = candidate.copy()
        for b in basis:
            w -= (w @ b) * b
        r = np.linalg.norm(w)
        if r < threshold:
            if hard:
                raise DegenerateInputError("seed vectors are rank deficient")
            return
        basis.append(w / r)

    for sv_ in seed_vecs:
        push(sv_, hard=True, threshold=1e-8)
    eye = np.eye(p.ambient_dim)
    order = completion if completion is not None else range(p.ambient_dim)
    for i in order:
        if len(basis) == m:
            break
        push(proj_np(p.coords, eye[i]), hard=False, threshold=1e-8)
    if len(basis) != m:
        raise DegenerateInputError("could not complete an orthonormal frame")
    return Frame(p, tuple(TangentVector(p, b) for b in basis))


def tangent_basis(p: SpherePoint) -> Frame:
    return gram_schmidt_frame(p)


def proj_np(p_coords: np.ndarray, v: np.ndarray) -> np.ndarray:
    return v - (v @ p_coords) * p_coords


def _require_same_base_point(p: SpherePoint, u: TangentVector) -> None:
    if u.base is p:
        return
    if not np.allclose(u.base.coords, p.coords, rtol=0.0, atol=POINT_TOL):
        raise BasePointMismatchError("tangent vector lives at a different point")


# ---------------------------------------------------------------------------
# sampling

def sample_points(count: int, seed: int, ambient_dim: int,
                  exclusion: Optional[Callable[[SpherePoint], bool]] = None
                  ) -> list[SpherePoint]:
    """Deterministic uniform points (normalized Gaussians), optionally filtered.

    ``exclusion`` returns True for points to reject.  Raises
    :class:`SamplingExhaustedError` when more than 99% of draws are
    rejected.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    accepted: list[SpherePoint] = []
    drawn = 0
    max_draws = max(10_000, 200 * count)
    while len(accepted) < count:
        batch = max(count - len(accepted), 64)
        g = rng.standard_normal((batch, ambient_dim))
        norms = np.linalg.norm(g, axis=1)
        for row, r in zip(g, norms):
            drawn += 1
            if r == 0.0:
                continue
            p = SpherePoint(row / r)
            if exclusion is not None and exclusion(p):
                continue
            accepted.append(p)
            if len(accepted) == count:
                break
        if drawn >= max_draws and len(accepted) < max(1, drawn // 100):
            raise SamplingExhaustedError(
                f"exclusion rejected {drawn - len(accepted)} of {drawn} draws")
        if drawn >= 100 * max_draws:
            raise SamplingExhaustedError("sampling budget exhausted")
    return accepted


def random_tangents(p: SpherePoint, rng: np.random.Generator, k: int,
                    unit: bool = True) -> list[TangentVector]:
    """k seeded pseudo-random tangent directions at p."""
    out = []
    while len(out) < k:
        v = proj_np(p.coords, rng.standard_normal(p.ambient_dim))
        r = np.linalg.norm(v)
        if r < 1e-8:
            continue
        out.append(TangentVector(p, v / r if unit else v))
    return out


def sphere_volume(m: int) -> float:
    """Riemannian volume of the unit sphere S^m."""
    from math import gamma, pi
    return 2.0 * pi ** ((m + 1) / 2.0) / gamma((m + 1) / 2.0)
