"""
Metallic numbers and structures
===============================

A metallic structure is a linear map J with J^2 = pJ + qI.  Its
eigenvalues are the two roots sigma and sigma_bar of x^2 - px - q.
"""

import numpy as np

from metallic_slant import (Branch, metallic_from_product, metallic_number, products_from_metallic, projectors,
                            random_metallic, validate_structure)

# The first few members of the family.  (1, 1) is the golden ratio,
# (2, 1) the silver mean, (1, 2) gives exactly 2.
for p, q in [(1, 1), (2, 1), (3, 1), (1, 2)]:
    par = metallic_number(p, q)
    print(f"p={p} q={q}: sigma={par.sigma:.15f} sigma_bar={par.sigma_bar:.15f}")

# A random metallic structure on R^5 that is symmetric for the Euclidean metric.
rng = np.random.default_rng(0)
par = metallic_number(2, 1)
J = random_metallic(5, par, rng, n_sigma=2)
print("\n".join(validate_structure(J).summary_lines()))

# Every metallic structure comes with two almost-product structures F = +-(2J - pI)/(2 sigma - p),
# and the plus branch recovers J from F1.
F1, F2 = products_from_metallic(J)
back = metallic_from_product(F1, par, Branch.PLUS)
print("F1^2 = I:", np.allclose(F1.matrix @ F1.matrix, np.eye(5)))
print("J recovered from F1:", np.allclose(back.matrix, J.matrix))

# The projectors onto the two eigenspaces.
P, Q = projectors(J).P, projectors(J).Q
print("rank P (sigma_bar) =", round(np.trace(P)), " rank Q (sigma) =", round(np.trace(Q)))
