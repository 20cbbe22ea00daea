"""
State counts and running time at fixed width
============================================

On partial 3-trees the tables stay far below the worst case, and the
running time doubles when the graph doubles.
"""

# %%
import math
import time

import numpy as np

from morsetw import nice_decomposition, run_dp
from morsetw.dp import state_stats
from morsetw.generators import partial_ktree

# %%
for n in (100, 200, 400, 800):
    D, td = partial_ktree(n, 3, seed=1, flip=0.2)
    ntd = nice_decomposition(D, td)
    t = time.perf_counter()
    run = run_dp(D, ntd, keep_tables=False)
    res = run.result()
    ms = (time.perf_counter() - t) * 1000
    stats = state_stats(run)
    print(f"n={n:4d} nodes={len(ntd):5d} peak={stats.peak_states:4d} "
          f"total={stats.total_states:7d} value={res.value:4d} {ms:6.0f} ms")

# %%
# Realised table sizes per bag size against the b! * 2^b bound.
counts = np.array(stats.counts)
sizes = np.array(stats.bag_sizes)
for b in range(sizes.max() + 1):
    sel = counts[sizes == b]
    if len(sel):
        print(f"bag {b}: max {sel.max():4d} mean {sel.mean():7.1f} "
              f"bound {math.factorial(b) * 2 ** b}")
