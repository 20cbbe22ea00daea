"""
Erasibility of 2-complexes
==========================

A 2-complex is erasible when repeatedly collapsing a free edge into its only
triangle removes every triangle. The smallest number of triangles to delete
first equals the least number of critical triangles in a gradient field
that weighs only triangles.
"""

# %%
from morsetw import (ErasibilityInstance, brute_force_erasibility,
                     greedy_erase, solve_erasibility)
from morsetw.generators import (random_2_complex, sphere_boundary,
                                square_grid_complex)

square = square_grid_complex(2)
ok, steps = greedy_erase(square)
print("2x2 square erasible:", ok, "in", len(steps), "collapses")
print(solve_erasibility(ErasibilityInstance(square, 0)).answer)

# %%
# The sphere has no free edge until one triangle is removed.
S = sphere_boundary()
print("sphere, B=0:", solve_erasibility(ErasibilityInstance(S, 0)).answer)
r = solve_erasibility(ErasibilityInstance(S, 1))
print("sphere, B=1:", r.answer, "delete", [S.labels[c] for c in r.witness])

# %%
# Compare with exhaustive search on a few random complexes.
for seed in range(5):
    K = random_2_complex(6, 6, seed=seed)
    r = solve_erasibility(ErasibilityInstance(K, 0))
    print(seed, r.min_critical, brute_force_erasibility(K).value,
          greedy_erase(K, r.witness)[0])
