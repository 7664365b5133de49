"""Exhaustive decoder analysis: failure enumerators and closed-form bounds.

Monte Carlo cannot see error floors below its sample size.  Enumerating
every pattern up to a weight cap gives exact per-weight failure and
miscorrection counts, which extrapolate to the floor; a few combinatorial
identities bound what any policy could do at all.
"""

import tempfile
import os

from synq import (TANNER_SPEC, BitFlipConfig, build_qc_ldpc, finite_horizon_q)
from synq.analysis import (bdd_fer, count_optimal_policies, enumerate_failures,
                           error_floor_estimate, write_enumeration_csv)

H = build_qc_ldpc(TANNER_SPEC)
cfg = BitFlipConfig(tau=2, max_iter=30)

# Decode all C(155,1) + C(155,2) = 12,090 patterns of weight <= 2.
enum = enumerate_failures(H, cfg, w_max=2)
print("bit flipping, tau=2:")
print(f"  failures:        {enum.failures.polynomial_str()}")
print(f"  miscorrections:  {enum.miscorrections.polynomial_str()}")

# Weight-2 failures dominate at low crossover probability; the resulting
# floor estimate sits far below anything a 10^4-frame simulation can see.
for rho in (1e-3, 1e-4):
    est = error_floor_estimate(enum.failures, rho)
    print(f"  rho={rho:g}: floor ~ {est.full:.3e}  (dominant weight {est.min_weight})"
          f"   BDD t=1: {bdd_fer(H.n, 1, rho):.3e}")

# The per-weight table serializes with its decoder parameters attached.
with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "failures.csv")
    write_enumeration_csv(enum, path)
    with open(path) as fh:
        print("\n" + fh.read().rstrip() + "\n")

# Closed forms.  A policy that corrects every error of weight <= t exists in
# astronomically many variants: any order of peeling the support works.
print(f"optimal policies for n=10, t=3: {count_optimal_policies(10, 3):.3e} "
      f"({count_optimal_policies(10, 3).bit_length()} bits)")

# And the value such a policy should assign: correcting a weight-j error in
# exactly j steps under the usual reward and discount.
for j in (1, 3, 5):
    print(f"finite-horizon value of a weight-{j} correction: "
          f"{finite_horizon_q(j):.5f}")
