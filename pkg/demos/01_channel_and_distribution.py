"""Walk through the two-state Markov erasure channel and the exact
erasure-count distribution.

Run:  python3 demos/01_channel_and_distribution.py
"""

import numpy as np

from burstlink import (
    ChannelParams,
    build_table,
    build_joint_table,
    derive_stats,
    interleave,
    params_from_targets,
    sample_sequence,
)

# ----------------------------------------------------------------------
# 1. A bursty reference channel: alpha = P(stay good), beta = P(stay bad)
# ----------------------------------------------------------------------
ch = ChannelParams(alpha=0.98, beta=0.92)
stats = derive_stats(ch)
print("reference channel:", ch)
print(f"  stationary erasure rate p = {stats.p:.4f}")
print(f"  mean burst length         = {stats.mean_burst_len:.2f} slots")
print(f"  correlation rho           = {ch.alpha + ch.beta - 1.0:.2f}")

# the same channel recovered from its observable targets
again = params_from_targets(p=0.2, mean_burst_len=12.5)
print("from targets (0.2, 12.5):", again)

# ----------------------------------------------------------------------
# 2. Sampled slots reproduce those statistics
# ----------------------------------------------------------------------
seq = sample_sequence(ch, n_slots=200_000, seed=42)
rate = seq.slots.mean()
# mean length of maximal runs of erased slots
flips = np.flatnonzero(np.diff(np.concatenate(([0], seq.slots.astype(int), [0]))))
runs = flips[1::2] - flips[::2]
print(f"sampled rate = {rate:.4f}, sampled mean burst = {runs.mean():.2f}")

# ----------------------------------------------------------------------
# 3. Exact erasure-count distribution P(m erasures in n slots)
# ----------------------------------------------------------------------
table = build_table(ch, n_max=51)
col30 = table.column(30)
print(f"P(m <= 20 in 30 slots) = {col30[:21].sum():.6f}")
col51 = build_table(ChannelParams(0.98, 0.93), 51).column(51)
print(f"P(m > 13 in 51 slots) at beta=0.93 = {col51[14:].sum():.5f}")

# burstiness concentrates mass in the tails compared to a memoryless
# channel with the same p
iid = ChannelParams(0.8, 0.2)  # rho = 0, same p = 0.2
iid_col = build_table(iid, 30).column(30)
print(f"tail P(m > 10 in 30): bursty={col30[11:].sum():.4f} "
      f"iid={iid_col[11:].sum():.4f}")

# ----------------------------------------------------------------------
# 4. Consecutive blocks are correlated; interleaving whitens the channel
# ----------------------------------------------------------------------
joint = build_joint_table(ch, 10, 12)
q = joint.q  # q[i, j] = P(i erasures in data part, j in repair part)
mi = np.arange(q.shape[0])
mj = np.arange(q.shape[1])
cov = (q * np.outer(mi, mj)).sum() - (q.sum(1) @ mi) * (q.sum(0) @ mj)
print(f"cov(data erasures, repair erasures) = {cov:.3f} (> 0: bursts span)")

for depth in (1, 4, 16, 64):
    folded = interleave(ch, depth)
    rho = folded.alpha + folded.beta - 1.0
    print(f"  depth {depth:3d}: rho = {rho:.4f}  "
          f"(p stays {derive_stats(folded).p:.3f})")
