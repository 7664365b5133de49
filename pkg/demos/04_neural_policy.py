"""Replace the table with a small MLP trained by DQN.

The table from demo 02 stores one value row per visited syndrome; the network
maps the raw m-bit syndrome through one ReLU layer to n action values and
therefore generalizes across syndromes it never saw.  On a 21-bit code the
whole exercise takes seconds, which makes it easy to watch the value function
form.
"""

import tempfile
import os

import numpy as np

from synq import (DqnConfig, MdpConfig, QcLdpcSpec, SyndromeMdp, SyndromeSets,
                  build_qc_ldpc, greedy_decode, hamming_ball_syndromes,
                  load_network, save_network, train_dqn)
from synq.tabular import BallSampler

H = build_qc_ldpc(QcLdpcSpec(p=7, j=3, k_blocks=3, a=2, b=4))
ball = frozenset(hamming_ball_syndromes(H, 1))
env = SyndromeMdp(H, MdpConfig(variant="truncated", w=1), SyndromeSets(ball=ball))

singles = [H.cols_int[i] for i in range(H.n)]


def misses(net) -> int:
    picks = np.argmax(net.q_values_batch(singles), axis=1)
    return int(np.sum(picks != np.arange(H.n)))


# Poll the single-error sweep during training and stop as soon as it is clean.
history = []


def stop_when(net, ep):
    history.append((ep, misses(net)))
    return history[-1][1] == 0


cfg = DqnConfig(episodes=20_000, hidden=64, batch=64, lr=3e-4,
                sync_every=200, seed=0, check_every=500)
net = train_dqn(env, cfg, BallSampler(H, 1), stop_when=stop_when)

print(f"network sizes (m, hidden, n): {net.sizes}")
for ep, miss in history:
    print(f"  episode {ep:>6}: {miss:>2} single errors still missed")

# The greedy decoder consumes networks and tables through the same protocol.
trace = []
res = greedy_decode(net, 1 << 13, H, trace=trace)
print(f"decode single error at bit 13: converged={res.converged}, "
      f"action={trace[0][1]}, q={trace[0][2]:+.3f}")

# Persistence round-trip: bit-exact parameters, metadata intact.
with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "policy.qnet")
    save_network(net, path)
    net2 = load_network(path)
    same = all(np.array_equal(a, b) for a, b in
               zip(net.params().values(), net2.params().values()))
    print(f"qnet round-trip bit-exact: {same}, "
          f"file size {os.path.getsize(path)} bytes")
