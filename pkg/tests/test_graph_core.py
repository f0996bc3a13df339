"""Cubic multigraph generation and the incremental matching reveal.

Claims covered:
- generated matchings are involutions without fixed points; bad n rejected
- is_simple detects duplicated cycle edges
- pre-sampled replay reproduces the graph exactly; X bookkeeping recounts
- first step is always forward; last step always closes the matching
- backward frequency tracks X(i-1)/(n-i+1) within binomial noise
- empirical matching distribution is uniform for n in {4, 6} (both modes)
- graph JSON round-trips; loader rejects malformed matchings
"""

import json

import pytest
from scipy import stats

from cubic_sudoku import graph_core as gc
from cubic_sudoku.rng import DeterministicRandomSource


def test_generate_validates_order():
    with pytest.raises(ValueError):
        gc.generate_graph(2, 0)
    with pytest.raises(ValueError):
        gc.generate_graph(7, 0)


def test_involution_no_fixed_points():
    for seed in range(50):
        g = gc.generate_graph(4 + 2 * (seed % 30), seed)
        for i in range(1, g.n + 1):
            assert g.partner[g.partner[i]] == i
            assert g.partner[i] != i


def test_is_simple_examples():
    g = gc.CubicMultigraph(4, [0, 3, 4, 1, 2])  # diagonals of the 4-cycle
    assert gc.is_simple(g)
    g = gc.CubicMultigraph(4, [0, 2, 1, 4, 3])  # matches cycle edges
    assert not gc.is_simple(g)
    g = gc.CubicMultigraph(6, [0, 4, 5, 6, 1, 2, 3])  # chords of length 3
    assert gc.is_simple(g)


def test_replay_reproduces_graph():
    for seed in (0, 5, 9):
        g = gc.generate_graph(40, seed)
        proc = gc.MatchingProcess(40, graph=g)
        backwards = []
        for _ in range(40):
            j = proc.reveal_step()
            if j is not None:
                backwards.append((j, proc.step))
        assert proc.as_graph().matching_pairs() == g.matching_pairs()
        assert sorted(backwards) == g.matching_pairs()


def test_reveal_step_boundaries():
    rng = DeterministicRandomSource(1)
    proc = gc.MatchingProcess(10, rng)
    assert proc.reveal_step() is None  # X(0) = 0: forward with probability 1
    proc.run_to(10)
    assert proc.x_total == 0  # the last step always closes the matching
    with pytest.raises(ValueError):
        proc.reveal_step()


def test_x_bookkeeping_recount():
    rng = DeterministicRandomSource(3)
    proc = gc.MatchingProcess(200, rng)
    for _ in range(200):
        proc.reveal_step()
        assert proc.x_total == proc.recount_unsaturated()


def test_backward_frequency_matches_conditional_probability():
    # aggregated over 100 runs at n=10^4: the backward count at each sampled
    # step stays within 3 standard deviations of the summed per-run
    # probabilities X(i-1)/(n-i+1) for >= 95% of sampled steps
    n = 10_000
    runs = 100
    sampled = list(range(100, n, 100))
    exp = {i: 0.0 for i in sampled}
    var = {i: 0.0 for i in sampled}
    obs = {i: 0 for i in sampled}
    for t in range(runs):
        proc = gc.MatchingProcess(n, DeterministicRandomSource(77, t))
        at = 0
        for i in sampled:
            while proc.step < i - 1:
                proc.reveal_step()
            p = proc.x_total / (n - proc.step)
            exp[i] += p
            var[i] += p * (1 - p)
            if proc.reveal_step() is not None:
                obs[i] += 1
    ok = sum(1 for i in sampled
             if abs(obs[i] - exp[i]) <= 3 * max(var[i], 1e-9) ** 0.5)
    assert ok >= 0.95 * len(sampled)


def _uniformity_chi2(counts, n):
    matchings = gc.enumerate_matchings(n)
    total = sum(counts.values())
    expected = total / len(matchings)
    return sum((counts.get(m, 0) - expected) ** 2 / expected for m in matchings), len(matchings) - 1


def test_matching_uniform_n4_presampled():
    counts = {}
    trials = 30_000
    for s in range(trials):
        key = gc.matching_key(gc.generate_graph(4, s))
        counts[key] = counts.get(key, 0) + 1
    assert len(counts) == 3
    for c in counts.values():
        assert abs(c / trials - 1 / 3) <= 0.02
    chi2, df = _uniformity_chi2(counts, 4)
    assert chi2 <= stats.chi2.ppf(0.99, df)


def test_matching_uniform_n6_both_modes_agree():
    trials = 30_000
    pre = {}
    fly = {}
    for s in range(trials):
        key = gc.matching_key(gc.generate_graph(6, s))
        pre[key] = pre.get(key, 0) + 1
        proc = gc.MatchingProcess(6, DeterministicRandomSource(s, 1))
        proc.run_to(6)
        key = gc.matching_key(proc.as_graph())
        fly[key] = fly.get(key, 0) + 1
    for counts in (pre, fly):
        chi2, df = _uniformity_chi2(counts, 6)
        assert chi2 <= stats.chi2.ppf(0.99, df)
    # two-sample homogeneity between the modes
    matchings = gc.enumerate_matchings(6)
    chi2 = 0.0
    for m in matchings:
        a, b = pre.get(m, 0), fly.get(m, 0)
        e = (a + b) / 2
        chi2 += (a - e) ** 2 / e + (b - e) ** 2 / e
    assert chi2 <= stats.chi2.ppf(0.99, len(matchings) - 1)


def test_graph_json_roundtrip(tmp_path):
    g = gc.generate_graph(24, 8)
    path = tmp_path / "g.json"
    gc.write_graph(g, str(path))
    loaded = gc.load_graph(str(path))
    assert loaded.matching_pairs() == g.matching_pairs()


def test_loader_rejects_bad_matchings(tmp_path):
    path = tmp_path / "bad.json"
    payload = {"version": "cubic-v1", "n": 4, "matching": [[1, 2], [2, 3]]}
    path.write_text(json.dumps(payload))
    with pytest.raises(ValueError):
        gc.load_graph(str(path))
    payload = {"version": "cubic-v0", "n": 4, "matching": [[1, 2], [3, 4]]}
    path.write_text(json.dumps(payload))
    with pytest.raises(ValueError):
        gc.load_graph(str(path))
