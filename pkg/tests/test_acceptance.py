"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Every solve in criteria 1 to 5 goes through ``_solve`` so that criterion 6
can audit the realised state counts of all of them.
"""
import gc
import itertools
import random
import statistics
import time

import pytest

from morsetw import (Digraph, ErasibilityInstance, brute_force_erasibility,
                     brute_force_matchings, brute_force_orders,
                     brute_force_states, greedy_erase, hasse_diagram,
                     heuristic_td, nice_decomposition, processed_subgraph,
                     read_td_pace, run_dp, solve_erasibility, solve_fmo,
                     solve_omm, to_nice, validate_discipline, verify_gradient_field,
                     write_td_pace)
from morsetw.generators import (cycle_complex, partial_ktree,
                                random_2_complex, random_digraph,
                                sphere_boundary, square_grid_complex,
                                triangle_closure)

# (solve count, nodes checked, violating nodes) per criterion
AUDIT = {}


def _audit(crit, stats):
    solves, nodes, bad = AUDIT.get(crit, (0, 0, 0))
    AUDIT[crit] = (solves + 1, nodes + len(stats.counts),
                   bad + len(stats.violations()))


def _solve(crit, D, source):
    res = solve_fmo(D, source)
    _audit(crit, res.stats)
    return res


def _value(res):
    return res.value if res.optimal else None


def _all_digraphs(n):
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    for bits in range(1 << len(pairs)):
        yield Digraph(n, [p for i, p in enumerate(pairs) if bits >> i & 1])


def _random_digraphs(count, n_lo, n_hi, p, seed):
    rng = random.Random(seed)
    for _ in range(count):
        yield random_digraph(rng.randint(n_lo, n_hi), p,
                             seed=rng.randrange(1 << 30), weights=(-3, 3))


def run_criterion_1():
    start = time.perf_counter()
    count = mismatches = 0
    for n in (3, 4):
        for D in _all_digraphs(n):
            for w in ([1] * n, [v - 2 for v in range(n)]):
                G = D.with_weights(w)
                expect = brute_force_orders(G).value
                for source in ("naive-path", "min-fill"):
                    count += 1
                    if _value(_solve(1, G, source)) != expect:
                        mismatches += 1
    elapsed = time.perf_counter() - start
    return mismatches == 0 and elapsed < 120, \
        f"{count} solves, {mismatches} mismatches, {elapsed:.1f}s (< 120s)"


def run_criterion_2():
    start = time.perf_counter()
    mismatches = infeasible = 0
    for D in _random_digraphs(500, 5, 9, 0.3, seed=2):
        dp = _value(_solve(2, D, "min-fill"))
        orders = brute_force_orders(D).value
        matchings = brute_force_matchings(D).value
        infeasible += orders is None
        if not dp == orders == matchings:
            mismatches += 1
    elapsed = time.perf_counter() - start
    return mismatches == 0 and elapsed < 300, \
        f"500 instances ({infeasible} infeasible), {mismatches} mismatches, " \
        f"{elapsed:.1f}s (< 300s)"


def run_criterion_3():
    states = bad_nodes = 0
    for i, D in enumerate(_random_digraphs(50, 1, 6, 0.4, seed=3)):
        source = ("min-fill", "min-degree", "naive-path")[i % 3]
        run = run_dp(D, nice_decomposition(D, source))
        _audit(3, run.result().stats)
        ntd = run.ntd
        for t in range(len(ntd)):
            sub = processed_subgraph(ntd, D, t)
            back = [D.index(lab) for lab in sub.labels]
            bag = [sub.index(D.labels[v]) for v in ntd.bags[t]]
            expect = {(tuple(back[v] for v in g),
                       frozenset(back[v] for v in u)): val
                      for (g, u), val in brute_force_states(sub, bag).items()}
            got = run.table(t)
            states += len(got)
            # equal dicts: same values, and absent states are exactly the
            # states with no compatible order
            bad_nodes += got != expect
    return bad_nodes == 0, f"{states} stored states, {bad_nodes} bad nodes"


CANONICAL = [("triangle closure", triangle_closure, 1),
             ("tetrahedron boundary", sphere_boundary, 2),
             ("3-cycle 1-complex", lambda: cycle_complex(3), 2)]


def run_criterion_4():
    notes, ok = [], True
    for name, make, frozen in CANONICAL:
        K = make()
        certified = brute_force_matchings(hasse_diagram(K)).value
        res = solve_omm(K)
        _audit(4, res.result.stats)
        crit = res.field.critical_by_dim(K)
        euler = sum((-1) ** d * c for d, c in enumerate(crit))
        good = (certified == frozen == res.value
                and euler == K.euler_characteristic()
                and verify_gradient_field(K, res.field))
        ok &= good
        notes.append(f"{name}={res.value}")
    return ok, ", ".join(notes)


def run_criterion_5():
    start = time.perf_counter()
    ok = True

    def solve(K, budget):
        r = solve_erasibility(ErasibilityInstance(K, budget))
        _audit(5, r.result.stats)
        return r

    for grid in (square_grid_complex(1), square_grid_complex(2),
                 square_grid_complex(2, 3)):
        r = solve(grid, 0)
        ok &= r.answer and r.witness == frozenset()
    S = sphere_boundary()
    ok &= not solve(S, 0).answer
    r = solve(S, 1)
    ok &= r.answer and len(r.witness) == 1 and greedy_erase(S, r.witness)[0]

    rng = random.Random(5)
    mismatches = witness_fail = 0
    for i in range(100):
        nv = rng.randint(4, 8)
        nt = rng.randint(1, min(8, nv * (nv - 1) * (nv - 2) // 6))
        K = random_2_complex(nv, nt, seed=1000 + i)
        r = solve(K, 0)
        mismatches += r.min_critical != brute_force_erasibility(K).value
        witness_fail += not greedy_erase(K, r.witness)[0]
    ok &= mismatches == 0 and witness_fail == 0
    return ok, f"anchors ok={ok}, 100 random: {mismatches} mismatches, " \
               f"{witness_fail} bad witnesses, " \
               f"{time.perf_counter() - start:.1f}s"


RUNNERS = {1: run_criterion_1, 2: run_criterion_2, 3: run_criterion_3,
           4: run_criterion_4, 5: run_criterion_5}
_RESULTS = {}


def _run(n):
    if n not in _RESULTS:
        _RESULTS[n] = RUNNERS[n]()
    return _RESULTS[n]


def _check(record, n):
    ok, detail = _run(n)
    record("detail", detail)
    assert ok, detail


@pytest.mark.criterion(1, "exhaustive 3- and 4-vertex digraphs")
def test_criterion_1_exhaustive_small_digraphs(record_property):
    _check(record_property, 1)


@pytest.mark.criterion(2, "random digraphs vs both oracles")
def test_criterion_2_random_agreement(record_property):
    _check(record_property, 2)


@pytest.mark.criterion(3, "every table entry vs restricted oracle")
def test_criterion_3_dp_invariant(record_property):
    _check(record_property, 3)


@pytest.mark.criterion(4, "canonical topology values")
def test_criterion_4_canonical_topology(record_property):
    _check(record_property, 4)


@pytest.mark.criterion(5, "erasibility anchors and random complexes")
def test_criterion_5_erasibility(record_property):
    _check(record_property, 5)


@pytest.mark.criterion(6, "state bound b!*2^b on every solve of 1-5")
def test_criterion_6_state_bound(record_property):
    for n in RUNNERS:
        _run(n)
    solves = sum(a[0] for a in AUDIT.values())
    nodes = sum(a[1] for a in AUDIT.values())
    bad = sum(a[2] for a in AUDIT.values())
    detail = f"{solves} solves, {nodes} nodes, {bad} violations"
    record_property("detail", detail)
    assert solves > 0 and bad == 0, detail


def _interleaved_medians_ms(fns, repeats=5):
    """Median wall time per callable; repetitions run round-robin so that a
    transient slowdown of the machine is spread over all sizes."""
    times = [[] for _ in fns]
    for _ in range(repeats):
        for i, fn in enumerate(fns):
            gc.collect()
            gc.disable()
            try:
                t = time.perf_counter()
                fn()
                times[i].append(time.perf_counter() - t)
            finally:
                gc.enable()
    return [statistics.median(ts) * 1000 for ts in times]


@pytest.mark.criterion(7, "linear scaling at width 3")
def test_criterion_7_linear_scaling(record_property, tmp_path):
    start = time.perf_counter()
    jobs = []
    for n in (200, 400, 800):
        D, td = partial_ktree(n, 3, seed=0)
        path = tmp_path / f"k3_{n}.td"
        path.write_text(write_td_pace(td, D.n))
        provided = read_td_pace(path.read_text(), D)
        assert provided.width <= 3
        assert solve_fmo(D, provided).optimal
        jobs.append(lambda D=D, td=provided: solve_fmo(D, td))
    medians = _interleaved_medians_ms(jobs)
    ratios = [b / a for a, b in zip(medians, medians[1:])]
    elapsed = time.perf_counter() - start
    detail = ("medians " + "/".join(f"{m:.0f}" for m in medians) + " ms, "
              "ratios " + ", ".join(f"{r:.2f}" for r in ratios)
              + f" (<= 2.5), {elapsed:.1f}s (< 180s)")
    record_property("detail", detail)
    assert all(r <= 2.5 for r in ratios) and elapsed < 180, detail


@pytest.mark.criterion(8, "to_nice discipline on random graphs")
def test_criterion_8_discipline(record_property):
    rng = random.Random(8)
    failures = []
    for i in range(200):
        D = random_digraph(rng.randint(1, 30), rng.uniform(0.03, 0.3),
                           seed=rng.randrange(1 << 30))
        for strategy in ("min-fill", "min-degree"):
            td = heuristic_td(D, strategy)
            ntd = to_nice(td, D)
            check = validate_discipline(ntd, D)
            if not check or ntd.width != td.width:
                failures.append((i, strategy, check.rule))
    detail = f"400 decompositions, {len(failures)} failures"
    record_property("detail", detail)
    assert not failures, failures[:5]


@pytest.mark.criterion(9, "decomposition independence")
def test_criterion_9_decomposition_independence(record_property):
    differ = 0
    for D in _random_digraphs(100, 2, 9, 0.3, seed=9):
        values = {_value(solve_fmo(D, s))
                  for s in ("naive-path", "min-fill", "min-degree")}
        differ += len(values) != 1
    detail = f"100 instances, {differ} with differing values"
    record_property("detail", detail)
    assert differ == 0, detail


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
