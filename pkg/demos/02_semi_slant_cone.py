"""
A semi-slant submanifold of R^7
===============================

The 3-dimensional immersion (u, t1, t2) -> (u cos t1, u sin t1, u cos t2, u sin t2, u, t1, t2)
with J = diag(sigma, sigma, sigma_bar, sigma_bar, sigma_bar, sigma, sigma_bar).
The t1/t2 directions form an invariant distribution; the radial direction
makes a constant angle with its image under J.
"""

import math

import numpy as np

from metallic_slant import builtin_example1, frame_at, induced_maps, semi_slant_check, sigma_structure, slant_test
from metallic_slant.slant import whole_tangent

s = builtin_example1(1, 1)
J, f = s.build_structure(), s.immersion
par = s.params

# Frame data at one point: orthonormal tangent frame E, normal frame N, and the
# blocks T, N, t, n of J in that frame.
fr = frame_at(f, [1.5, 0.4, 1.1])
maps = induced_maps(J, fr)
print("T =\n", np.round(maps.T, 6))

# The slant angle of the radial direction against the closed form.
ar = slant_test(J, f, s.distribution("D2"), s.plan)
closed = (par.sigma + 2 * par.sigma_bar) / math.sqrt(3 * (par.sigma ** 2 + 2 * par.sigma_bar ** 2))
print(f"D2: {ar.classification.value}, cos theta = {ar.cos:.12f} (closed form {closed:.12f})")
print(f"D1: {slant_test(J, f, s.distribution('D1'), s.plan).classification.value}")
print(f"TM: {slant_test(J, f, whole_tangent(f), s.plan).classification.value}")

# The eigenvalues of the normal block a do not depend on the normal frame chosen.
a = sigma_structure(J, fr).a
print("spectrum of a:", np.round(np.linalg.eigvalsh(a), 6),
      " expected:", np.round(sorted([par.sigma_bar, par.sigma_bar, (2 * par.sigma + par.sigma_bar) / 3, par.sigma]), 6))

print("\n".join(semi_slant_check(J, f, s.distribution("D1"), s.distribution("D2"), s.plan).summary_lines()))
