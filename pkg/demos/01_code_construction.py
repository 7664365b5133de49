"""Construct quasi-cyclic LDPC codes and look at their syndrome geometry.

The running example everywhere in this package is the (155, 64) quasi-cyclic
code built from p=31 circulants with column multiplier a=2 and row multiplier
b=5: three check blocks, five variable blocks, girth 8, d_min 20.
"""

import tempfile
import os

from synq import (TANNER_SPEC, QcLdpcSpec, ball_size, build_qc_ldpc,
                  hamming_ball_syndromes, load_alist, save_alist)

H = build_qc_ldpc(TANNER_SPEC)
print(f"parity checks: {H.m} x {H.n}")
print(f"GF(2) rank:    {H.rank}  ->  k = {H.k}")
print(f"column/row weights: {H.bits.sum(axis=0).max()}, {H.bits.sum(axis=1).max()}")
print(f"code hash:     {H.code_hash[:16]}...")

# Syndromes of low-weight errors: the decoder's whole world.  |S(w)| grows
# much slower than the number of patterns because distinct errors share
# syndromes only above the minimum distance.
for w in (1, 2):
    ball = hamming_ball_syndromes(H, w)
    print(f"|S({w})| = {len(ball):>6}   (patterns of weight <= {w}: "
          f"{ball_size(H.n, w):>6})")

# Round-trip through the alist interchange format.
with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "tanner.alist")
    save_alist(H, path)
    H2 = load_alist(path)
    print("alist round-trip identical:", H == H2)

# A smaller sibling from the same construction, used by the feedback demos:
small = build_qc_ldpc(QcLdpcSpec(p=7, j=3, k_blocks=3, a=2, b=4))
print(f"small code: {small.m} x {small.n}, rank {small.rank}, k {small.k}")
