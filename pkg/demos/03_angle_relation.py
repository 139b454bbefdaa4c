"""
Slant angles of J and of its almost-product structure
=====================================================

Each tangent vector X has an angle theta against J and an angle vartheta
against F = (2J - pI)/(2 sigma - p).  A pointwise identity ties them together
through <JX, X>.  A simpler relation sin(theta) = (2 sigma - p)/(2 sigma) sin(vartheta)
would need F to preserve the tangent space, and it fails on the cone of the
previous demo.  The toolkit therefore reports this relation and never asserts it.
"""

import numpy as np

from metallic_slant import builtin_example1, products_from_metallic, run_suite
from metallic_slant.slant import pointwise_angle_relation, sampled_frames

s = builtin_example1(1, 1)
J = s.build_structure()
F, _ = products_from_metallic(J)

rng = np.random.default_rng(1)
worst = 0.0
for fr in sampled_frames(s.immersion, s.plan.with_(count=20)):
    X = fr.tangent_onb @ rng.standard_normal(3)
    worst = max(worst, pointwise_angle_relation(J, F, fr, X)[2])
print(f"pointwise identity, max residual over 20 points: {worst:.2e}")

s.checks = ("angle_relation",)
obs = run_suite(s).observations
print(f"sin theta observed  = {obs['angle_relation.D2.observed_sin_theta']:.6f}")
print(f"sin theta predicted = {obs['angle_relation.D2.predicted_sin_theta']:.6f}")
