"""
Tree decompositions and the nice form the solver needs
======================================================

The solver works bottom-up over a rooted nice tree decomposition whose arcs
are introduced in a fixed place. This script builds one from a heuristic
decomposition, checks its discipline and writes a PACE ``.td`` file.
"""

# %%
from morsetw import (heuristic_td, naive_path_decomposition, read_td_pace,
                     to_nice, validate_discipline, validate_td, write_td_pace)
from morsetw.generators import partial_ktree, random_digraph

D = random_digraph(12, 0.25, seed=4)
for strategy in ("min-fill", "min-degree"):
    td = heuristic_td(D, strategy)
    print(strategy, "width", td.width, "bags", len(td.bags),
          "valid", bool(validate_td(D, td)))

# %%
ntd = to_nice(heuristic_td(D), D)
print(ntd, "discipline:", bool(validate_discipline(ntd, D)))
for kind, count in ntd.kind_counts().items():
    print(f"  {kind.name:17s}{count}")

# %%
# The first few nodes in post-order.
for t in range(8):
    print(t, ntd.describe(t, D), ntd.bags[t])

# %%
# The naive path decomposition puts every vertex in one bag.
print(naive_path_decomposition(D))

# %%
# Partial k-trees come with a decomposition of width at most k.
G, td = partial_ktree(30, 3, seed=7)
text = write_td_pace(td, G.n)
print(text.splitlines()[0])
back = read_td_pace(text, G)
print("round trip width", back.width)
