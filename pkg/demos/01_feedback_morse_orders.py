"""
Feedback Morse orders on small digraphs
=======================================

An order of the vertices is a *feedback Morse order* when its backward arcs
share no endpoint. Those arcs then form a matching, and reversing them makes
the digraph acyclic. The solver finds such an order that leaves the least
total weight unmatched.
"""

# %%
from morsetw import (Digraph, backward_edges, brute_force_matchings,
                     brute_force_orders, is_feedback_morse_matching,
                     reverse_matched, solve_fmo)

# A directed triangle: every order has at least one backward arc.
D = Digraph.from_arcs([("a", "b"), ("b", "c"), ("c", "a")])
order = tuple(D.index(x) for x in "abc")
back = backward_edges(D, order)
print("backward arcs of a<b<c:", [(D.labels[u], D.labels[v]) for u, v in back])
print("is a feedback Morse matching:", is_feedback_morse_matching(D, back))
print("after reversal:", reverse_matched(D, back).arcs)

# %%
# Solve it. With unit weights one vertex must stay unmatched.
res = solve_fmo(D)
print(res.status.value, "value", res.value,
      "order", [D.labels[v] for v in res.order])
res.check(D)

# %%
# Negative weights make leaving a vertex unmatched attractive.
W = D.with_weights([-2, 1, 1])
res = solve_fmo(W)
print("weighted value", res.value,
      "unmatched", sorted(W.labels[v] for v in res.unmatched))

# %%
# Both oracles agree with the dynamic program.
for G in (D, W):
    print(solve_fmo(G).value, brute_force_orders(G).value,
          brute_force_matchings(G).value)

# %%
# Three vertices joined by arcs in both directions: no order keeps its
# backward arcs disjoint.
K3 = Digraph(3, [(u, v) for u in range(3) for v in range(3) if u != v])
print(solve_fmo(K3).status.value, brute_force_orders(K3).feasible)
