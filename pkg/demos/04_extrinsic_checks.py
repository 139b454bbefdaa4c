"""
Second fundamental form and integrability
=========================================

Shape operators, the normal connection, covariant derivatives of T and N,
and the integrability tests, all on the cone family of R^{3n+1}.  We then
break parallelism of J and watch the derivative identities fail.
"""

import numpy as np

from metallic_slant import (StructureField, builtin_example2, extrinsic_at, integrability_checks,
                            mixed_geodesic_check, verify_derivative_props)

s = builtin_example2(1, 1, 1)
f, J = s.immersion, s.build_structure()
D1, D2 = s.distribution("D1"), s.distribution("D2")
plan = s.plan.with_(count=20)

E = extrinsic_at(f, [1.0, 0.5])
print("||h(d_u, d_alpha)|| =", np.linalg.norm(E.h[0, 1]), " (1/sqrt(2) at u = 1)")

for rep in (verify_derivative_props(f, J, plan), integrability_checks(f, J, D1, D2, plan),
            mixed_geodesic_check(f, J, D1, D2, plan)):
    print("\n".join(rep.summary_lines()), end="\n\n")


# A structure rotated by an angle that grows along the last ambient axis: still
# metallic at every point, no longer parallel.
def rotated(y, rate=0.3):
    c, sn = np.cos(rate * y[-1]), np.sin(rate * y[-1])
    R = np.eye(4)
    R[np.ix_([0, 3], [0, 3])] = [[c, -sn], [sn, c]]
    return R @ J.matrix @ R.T


bad = verify_derivative_props(f, StructureField(rotated, 4, s.params), plan)
print("non-parallel structure:", "PASS" if bad.passed else "FAIL",
      [c.name for c in bad.failures()])
