"""
Optimal Morse matchings on simplicial complexes
===============================================

A discrete gradient field pairs cells with cofaces so that the Hasse
diagram, with the paired arcs reversed, stays acyclic. Finding a field with
the fewest critical cells is a feedback Morse matching problem on the
Hasse diagram.
"""

# %%
from morsetw import (brute_force_matchings, hasse_diagram, load_complex,
                     solve_omm, verify_gradient_field)
from morsetw.generators import cycle_complex, sphere_boundary

K = load_complex("""p sc
s a b c
""")
H = hasse_diagram(K)
print(K, "Hasse:", H.n, "vertices", H.m, "arcs")

# %%
res = solve_omm(K)
print("critical cells:", [K.labels[c] for c in sorted(res.field.critical)])
for f, c in sorted(res.field.pairs):
    print(f"  {K.labels[f]:>5} -> {K.labels[c]}")
print("gradient field:", verify_gradient_field(K, res.field))

# %%
# The alternating count of critical cells equals the Euler characteristic.
for name, X in (("sphere", sphere_boundary()), ("circle", cycle_complex(5))):
    r = solve_omm(X)
    print(name, "value", r.value, "critical by dimension",
          r.field.critical_by_dim(X), "euler", X.euler_characteristic(),
          "oracle", brute_force_matchings(hasse_diagram(X)).value)

# %%
# Weights steer which cell stays critical.
w = [1] * K.n_cells
w[K.index("c")] = 0
print("weighted:", [K.labels[c] for c in solve_omm(K, w).field.critical])
