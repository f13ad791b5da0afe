# Round-sphere geometry from ambient formulas: connection, curvature, Ricci.
#
# Everything lives in ambient coordinates. A tangent field is a formula
# R^{m+1} -> R^{m+1}; the Levi-Civita connection is the tangential
# projection of the ambient directional derivative, computed exactly with
# dual numbers.

import numpy as np

import kontact as kt
from kontact.manifold import random_tangents

rng = np.random.default_rng(0)

p = kt.SpherePoint.from_array([1.0, 2.0, -1.0, 0.5])
print("point:", p.coords, "on S^%d" % p.dim)

# rotation generators give Killing fields; differentiate them
mat_a = rng.standard_normal((4, 4))
mat_b = rng.standard_normal((4, 4))
field_a = kt.linear_field(mat_a - mat_a.T)
field_b = kt.linear_field(mat_b - mat_b.T)
u, v, w = random_tangents(p, rng, 3)

du = kt.cov_deriv(field_a, u)
print("cov_deriv along u:", du.vec)

# the connection is torsion-free: cov_a b - cov_b a = [a, b]
torsion = (kt.cov_deriv(field_b, field_a.at(p))
           - kt.cov_deriv(field_a, field_b.at(p))
           - kt.project(p, kt.lie_bracket(field_a, field_b, p).vec))
print("torsion residual:", torsion.norm())

# curvature: the analytic constant-curvature formula against the numeric
# double covariant derivative
r_analytic = kt.curvature(u, v, w)
r_numeric = kt.curvature_numeric(u, v, w)
print("curvature agreement:", np.max(np.abs(r_analytic.vec - r_numeric.vec)))

# sectional curvature of any orthonormal plane is 1
v_unit = (v - kt.metric(u, v) * u).unit()
print("sectional curvature:", kt.metric(kt.curvature(u, v_unit, v_unit), u))

# Ricci: (m-1) g, so every unit vector has Ricci curvature m-1
print("ricci(u,u) =", kt.ricci(u, u), " with |u|^2 =", kt.metric(u, u))
print("frame-sum ricci matches:",
      abs(kt.ricci_frame_sum(u, v) - kt.ricci(u, v)))
