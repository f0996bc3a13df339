"""Monte Carlo harness: trajectory concentration, density and rate checks.

Everything is deterministic given (master seed, parameters): trial t of a
master seed uses the Philox substream (seed, t) and replica r forked from
trial t uses the substream spawned from it, so reruns reproduce CSVs
byte-identically.

The reference trajectory for the unsaturated count is x(t) = t(1-t); the
per-colour classes track x(t)/3.  The conventional-bad density target is
1 - 2t/3, integrating to 2/3 over the full time range.  Desk-scale checks
use calibrated absolute tolerances because the formal error envelope
eps(t) = log^3(n) / (n^(1/3) (1-t)^C) exceeds x(t) itself at any feasible
n; the envelope is still computed and reported.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import type_chain as tc
from . import verification as vf
from .graph_core import CubicMultigraph, MatchingProcess, generate_graph, is_simple
from .pipeline import (PipelineConfig, PipelineResult, PipelineRun, TrajectoryRecord,
                       full_pipeline, size_bound_holds)
from .rng import DeterministicRandomSource, trial_stream

trial_rng = trial_stream


def headline_config(n: int, **kwargs) -> PipelineConfig:
    """Config for density/trajectory measurements: short completion tail.

    The default tail of 20*sqrt(n) removes about 4.5% of the time range at
    n = 2e5, which alone pushes the conventional-bad density integral
    below its +/-0.015-around-1/3 target window; a 4*sqrt(n) tail keeps
    total phase overhead near 2% while leaving the completion device
    plenty of room.
    """
    kwargs.setdefault("tail", math.ceil(4 * math.sqrt(n)))
    return PipelineConfig(n=n, **kwargs)


# ---------------------------------------------------------------------------
# trajectory concentration
# ---------------------------------------------------------------------------

def trajectory_run(config: PipelineConfig,
                   rng: DeterministicRandomSource | None = None) -> TrajectoryRecord:
    """Full pipeline run, returning the sampled trajectory."""
    return full_pipeline(config, rng=rng).trajectory


def x_reference(t: float) -> float:
    return t * (1 - t)


@dataclass
class EnvelopeSpec:
    """Error envelope around n*x(t) with exponent C = 54*c_cond + 2."""

    n: int
    c_cond: float
    empirical_tol: float = 0.01

    @property
    def C(self) -> float:
        return 54 * self.c_cond + 2

    def eps(self, t: float) -> float:
        return math.log(self.n) ** 3 / (self.n ** (1.0 / 3.0) * (1 - t) ** self.C)


@dataclass(frozen=True)
class EnvelopeReport:
    max_dev_x: float
    max_dev_balance: float
    formal_envelope_holds: bool
    vacuous: bool
    empirical_ok: bool


def envelope_check(record: TrajectoryRecord, spec: EnvelopeSpec) -> EnvelopeReport:
    """Deviations of X and of the per-colour balance from the reference curve.

    ``max_dev_x`` is max over samples of |X(i)/n - x(i/n)|; the balance
    deviation is max over colours of |X_k(i) - X(i)/3| / n.  The formal
    envelope |X_k(i) - (n/3) x(i/n)| <= (n/3) eps(i/n) is evaluated as
    stated and flagged vacuous wherever eps(t) > x(t).
    """
    if not record.samples:
        raise ValueError("empty trajectory record")
    n = spec.n
    max_dev_x = 0.0
    max_dev_balance = 0.0
    formal = True
    vacuous = True
    for row in record.samples:
        step, x, x1, x2, x3 = row[:5]
        t = step / n
        xr = x_reference(t)
        max_dev_x = max(max_dev_x, abs(x / n - xr))
        eps = spec.eps(t)
        if eps <= xr:
            vacuous = False
        for xk in (x1, x2, x3):
            max_dev_balance = max(max_dev_balance, abs(xk - x / 3) / n)
            if abs(xk - (n / 3) * xr) > (n / 3) * eps:
                formal = False
    empirical_ok = max_dev_x <= spec.empirical_tol and max_dev_balance <= spec.empirical_tol
    return EnvelopeReport(max_dev_x, max_dev_balance, formal, vacuous, empirical_ok)


# ---------------------------------------------------------------------------
# window (segment) statistics
# ---------------------------------------------------------------------------

@dataclass
class WindowStats:
    """One forked window: per-colour hits, births, and endpoint counts."""

    hits: list[int]
    births: list[int]
    x_start: list[int]
    x_end: list[int]
    types: list[int]  # types of the window's vertices, offset 0 = start state

    def conserved(self) -> bool:
        return all(self.x_end[k] - self.x_start[k] == self.births[k] - self.hits[k]
                   for k in (1, 2, 3))


def _run_window(run, omega: int) -> WindowStats:
    """Advance a forked run by omega steps, recording window events."""
    proc = run.process
    i = proc.step
    col = run.colouring
    hits = [0, 0, 0, 0]
    x_start = list(run.x)
    types = [run.types[i]]
    for _ in range(omega):
        before = proc.step
        run.step()
        v = proc.step
        j = proc.partner[v] if proc.saturated[v] else 0
        if j and j < v and j <= i:
            hits[col[j]] += 1
        types.append(run.types[v])
        assert v == before + 1
    births = [0, 0, 0, 0]
    for v in range(i + 1, i + omega + 1):
        if not proc.saturated[v]:
            births[col[v]] += 1
    return WindowStats(hits, births, x_start, list(run.x), types)


@dataclass
class SegmentRates:
    hit_rate: list[float]    # index 1..3
    birth_rate: list[float]
    replicas: int
    conservation_ok: bool
    start_step: int
    omega: int


def prepare_prefix(config: PipelineConfig, step: int, trial: int = 0,
                   seed: int | None = None) -> PipelineRun:
    """Pipeline run advanced to ``step`` inside the pointer phase."""
    rng = trial_rng(config.seed if seed is None else seed, trial)
    driver = PipelineRun(config, rng=rng)
    driver.burn_in()
    driver.advance_to(step)
    return driver


def segment_stats(config: PipelineConfig, step: int, omega: int, replicas: int,
                  prefixes: int = 5) -> SegmentRates:
    """Per-colour hit and birth rates over windows [step, step+omega].

    Windows are sampled by forking the process at ``step``: each of
    ``prefixes`` independent prefixes is advanced once and then branched
    ``replicas // prefixes`` times with fresh substreams.  Conservation
    (delta X_k = births - hits, per colour) is asserted exactly on every
    replica.
    """
    if step < config.i0 or step + omega > config.i1:
        raise ValueError("window outside the pointer phase")
    per = math.ceil(replicas / prefixes)
    hit_tot = [0, 0, 0, 0]
    birth_tot = [0, 0, 0, 0]
    used = 0
    ok = True
    for p in range(prefixes):
        driver = prepare_prefix(config, step, trial=p)
        for r in range(per):
            fork = driver.run.fork(driver.rng.spawn(r))
            w = _run_window(fork, omega)
            if not w.conserved():
                ok = False
            for k in (1, 2, 3):
                hit_tot[k] += w.hits[k]
                birth_tot[k] += w.births[k]
            used += 1
    denom = used * omega
    return SegmentRates(
        hit_rate=[0.0] + [hit_tot[k] / denom for k in (1, 2, 3)],
        birth_rate=[0.0] + [birth_tot[k] / denom for k in (1, 2, 3)],
        replicas=used,
        conservation_ok=ok,
        start_step=step,
        omega=omega,
    )


@dataclass
class CouplingReport:
    omega: int
    replicas: int
    distances: list[float]          # L1 distance to the frozen forecast per offset
    tv_to_stationary: list[float]   # TV distance to the frozen chain's pi per offset
    max_l1_by_omega: dict[int, float]
    fitted_constant: float
    sampling_slack: float
    params: tc.ChainParams
    start_state: int


def segment_comparison_experiment(config: PipelineConfig, step: int, omegas,
                                  replicas: int, trial: int = 0) -> CouplingReport:
    """Empirical type distribution of forked windows vs the frozen chain.

    One shared prefix is branched ``replicas`` times for max(omegas)
    steps.  The chain is built from q_k = X_k(step) / (n - step) and
    started at the prefix's current type.  The fitted constant c is the
    smallest value with max_j L1(j <= omega) <= c * omega^2/(n - step) +
    2/sqrt(replicas) for every requested omega.
    """
    omega_max = max(omegas)
    if step + omega_max > config.i1 or step < config.i0 + 1:
        raise ValueError("window outside the pointer phase")
    driver = prepare_prefix(config, step, trial=trial)
    run = driver.run
    n = config.n
    denom = n - step
    params = tc.ChainParams(run.x[1] / denom, run.x[2] / denom, run.x[3] / denom)
    start_state = run.types[step]
    type_rows = []
    for r in range(replicas):
        fork = run.fork(driver.rng.spawn(r))
        w = _run_window(fork, omega_max)
        type_rows.append(w.types)
    max_l1, distances = tc.segment_comparison(type_rows, params, start_state)
    pi = tc.stationary(tc.build_q(params))
    rows = np.asarray(type_rows)
    tv_curve = []
    for j in range(omega_max + 1):
        emp = np.bincount(rows[:, j], minlength=tc.N_STATES) / replicas
        tv_curve.append(tc.tv_distance(emp, pi))
    slack = 2 / math.sqrt(replicas)
    by_omega = {}
    fitted = 0.0
    for om in omegas:
        worst = max(distances[: om + 1])
        by_omega[om] = worst
        scale = om * om / denom
        fitted = max(fitted, max(0.0, worst - slack) / scale)
    return CouplingReport(omega_max, replicas, distances, tv_curve, by_omega,
                          fitted, slack, params, start_state)


# ---------------------------------------------------------------------------
# conventional-bad density
# ---------------------------------------------------------------------------

def bad_density_bins(records: list[TrajectoryRecord], n: int, bins: int = 50):
    """Per-bin fraction of conventionally bad vertices, aggregated over records.

    Bins split the sampled step range evenly; each record contributes the
    increment of its cumulative bad count across the bin.  Returns a list
    of (t_mid, fraction, target) with target = 1 - 2t/3.
    """
    if len(records) < 10:
        raise ValueError("need at least 10 records")
    first = records[0].samples
    lo, hi = first[0][0], first[-1][0]
    edges = [lo + (hi - lo) * b // bins for b in range(bins + 1)]
    series = [([row[0] for row in rec.samples], [row[6] for row in rec.samples])
              for rec in records]
    out = []
    for b in range(bins):
        num = 0
        den = 0
        for steps, bc in series:
            a = _nearest_index(steps, edges[b])
            z = _nearest_index(steps, edges[b + 1])
            num += bc[z] - bc[a]
            den += steps[z] - steps[a]
        t_mid = (edges[b] + edges[b + 1]) / (2 * n)
        out.append((t_mid, num / den, 1 - 2 * t_mid / 3))
    return out


def _nearest_index(sorted_steps: list[int], target: int) -> int:
    import bisect

    idx = bisect.bisect_left(sorted_steps, target)
    if idx == 0:
        return 0
    if idx >= len(sorted_steps):
        return len(sorted_steps) - 1
    before = sorted_steps[idx - 1]
    after = sorted_steps[idx]
    return idx if after - target < target - before else idx - 1


# ---------------------------------------------------------------------------
# even-cycle interval frequency
# ---------------------------------------------------------------------------

def block_success(internal_edges: list[tuple[int, int]]) -> bool:
    """Success predicate for one block: exactly one internal matching edge,
    endpoints at odd cycle distance.

    Distance-1 pairs are excluded by construction: they duplicate a cycle
    edge and induce a doubled edge, not an even cycle of length >= 4.
    """
    if len(internal_edges) != 1:
        return False
    l, r = internal_edges[0]
    d = abs(r - l)
    return d % 2 == 1 and d >= 3


def even_cycle_frequency(n: int, trials: int, seed: int = 0) -> float:
    """Fraction of fresh sqrt(n)-length leading blocks passing :func:`block_success`."""
    if n < 10_000:
        raise ValueError("block statistics need n >= 10^4")
    m = math.isqrt(n)
    if m * m < n:
        m += 1
    successes = 0
    for t in range(trials):
        proc = MatchingProcess(n, trial_rng(seed, t))
        internal: list[tuple[int, int]] = []
        for _ in range(m):
            j = proc.reveal_step()
            if j is not None:
                internal.append((j, proc.step))
        if block_success(internal):
            successes += 1
    return successes / trials


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

SWEEP_HEADER = ["n", "trials", "s_ratio_mean", "s_ratio_min", "s_ratio_max",
                "half_bc_ratio_mean", "half_bc_ratio_min", "half_bc_ratio_max",
                "bu_weight_mean", "bu_weight_max", "completion_rate",
                "interval_rate", "discrepancy_mean", "discrepancy_max"]


def _sweep_trial(args) -> dict:
    n, seed, trial, i0, tail = args
    cfg = PipelineConfig(n=n, seed=seed, i0=i0, tail=tail)
    res = full_pipeline(cfg, rng=trial_rng(seed, trial))
    bc, buc, bud = res.counts
    if not size_bound_holds(res):
        raise RuntimeError("set-size inequality violated")  # run invariant
    return {
        "n": n,
        "s_ratio": res.s_size / n,
        "half_bc_ratio": bc / (2 * n),
        "bu_weight": buc + 2 * bud,
        "completed": res.completed,
        "interval": res.completion_mode == "EvenCycleInterval",
        "discrepancy": res.discrepancy,
    }


def sweep(ns, trials: int, seed: int = 0, jobs: int = 1,
          i0: int | None = None, tail_rule: str = "short") -> list[dict]:
    """Per-n summary of pipeline statistics over seeded trials.

    ``tail_rule``: "short" uses ceil(4*sqrt(n)) (density-faithful phase
    overhead), "default" uses the pipeline default.
    """
    rows = []
    for n in ns:
        tail = math.ceil(4 * math.sqrt(n)) if tail_rule == "short" else None
        args = [(n, seed, t, i0, tail) for t in range(trials)]
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_sweep_trial, args))
        else:
            results = [_sweep_trial(a) for a in args]
        s_ratios = [r["s_ratio"] for r in results]
        halves = [r["half_bc_ratio"] for r in results]
        bu = [r["bu_weight"] for r in results]
        disc = [r["discrepancy"] for r in results]
        rows.append({
            "n": n,
            "trials": trials,
            "s_ratio_mean": sum(s_ratios) / trials,
            "s_ratio_min": min(s_ratios),
            "s_ratio_max": max(s_ratios),
            "half_bc_ratio_mean": sum(halves) / trials,
            "half_bc_ratio_min": min(halves),
            "half_bc_ratio_max": max(halves),
            "bu_weight_mean": sum(bu) / trials,
            "bu_weight_max": max(bu),
            "completion_rate": sum(r["completed"] for r in results) / trials,
            "interval_rate": sum(r["interval"] for r in results) / trials,
            "discrepancy_mean": sum(disc) / trials,
            "discrepancy_max": max(disc),
        })
    return rows


def write_sweep_csv(rows: list[dict], path: str):
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=SWEEP_HEADER)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row[k] for k in SWEEP_HEADER})


# ---------------------------------------------------------------------------
# small-n search for short sudoku sets from decycling sets
# ---------------------------------------------------------------------------

@dataclass
class ProbeResult:
    best_size: int | None
    best_ratio: float | None
    witness: tuple[list[int], list[int]] | None  # (subset, partial colouring)
    witness_graph: vf.Graph | None
    attempts: int
    budget_exhausted: bool
    trials: int


def greedy_decycling_set(graph: vf.Graph) -> list[int]:
    """Strip degree-<=1 vertices, then repeatedly delete a max-degree vertex
    of the remaining 2-core until no cycle survives."""
    n = graph.n
    alive = [True] * (n + 1)
    deg = [0] * (n + 1)
    adj = graph.adj
    for v in range(1, n + 1):
        deg[v] = len(adj[v])
    removed: list[int] = []

    def strip():
        stack = [v for v in range(1, n + 1) if alive[v] and deg[v] <= 1]
        while stack:
            v = stack.pop()
            if not alive[v]:
                continue
            alive[v] = False
            for u in adj[v]:
                if alive[u]:
                    deg[u] -= 1
                    if deg[u] <= 1:
                        stack.append(u)

    strip()
    while True:
        core = [v for v in range(1, n + 1) if alive[v]]
        if not core:
            break
        pick = max(core, key=lambda v: (deg[v], -v))
        alive[pick] = False
        removed.append(pick)
        for u in adj[pick]:
            if alive[u]:
                deg[u] -= 1
        strip()
    return sorted(removed)


def _random_proper_partial(graph: vf.Graph, subset: list[int],
                           rng: DeterministicRandomSource) -> list[int] | None:
    """Random proper colouring of G[subset] by randomized greedy."""
    inside = set(subset)
    partial = [0] * (graph.n + 1)
    order = list(subset)
    for v in order:
        forbidden = {partial[u] for u in graph.adj[v] if u in inside and partial[u]}
        choices = [c for c in (1, 2, 3) if c not in forbidden]
        if not choices:
            return None
        partial[v] = choices[rng.randint(len(choices))]
    return partial


def _complete_partial(graph: vf.Graph, partial: list[int], k: int) -> list[int] | None:
    """Any proper completion of a partial colouring (backtracking, first hit)."""
    col = list(partial)
    adj = graph.adj

    def rec() -> bool:
        pick = 0
        best = -1
        for v in range(1, graph.n + 1):
            if col[v]:
                continue
            seen = len({col[u] for u in adj[v] if col[u]})
            if seen > best:
                best = seen
                pick = v
        if pick == 0:
            return True
        forbidden = {col[u] for u in adj[pick] if col[u]}
        for c in range(1, k + 1):
            if c in forbidden:
                continue
            col[pick] = c
            if rec():
                return True
            col[pick] = 0
        return False

    return col if rec() else None


def conjecture_probe(n: int, trials: int, budget: int, seed: int = 0) -> ProbeResult:
    """Search for short verified sudoku sets seeded by greedy decycling sets.

    For each of ``trials`` simple cubic graphs: build a greedy decycling
    set, try random proper colourings of it, and accept when the partial
    colouring propagates to a unique full colouring.  Near-misses (a stall
    with few uncoloured vertices) are retried with one extra vertex pinned
    from an explicit completion.  Only verified witnesses are reported.
    """
    if n > 200:
        raise ValueError("probe guard: n <= 200")
    attempts = 0
    best: tuple[int, list[int], list[int], vf.Graph] | None = None
    exhausted = False
    for t in range(trials):
        g = _simple_cubic(n, seed, t)
        graph = vf.graph_from_cubic(g)
        if not vf.colourable(graph, 3) or vf.colourable(graph, 2):
            continue
        base = greedy_decycling_set(graph)
        rng = DeterministicRandomSource(seed, (t << 8) | 1)
        per_trial = max(1, budget // max(trials, 1))
        for _ in range(per_trial):
            if attempts >= budget:
                exhausted = True
                break
            attempts += 1
            partial = _random_proper_partial(graph, base, rng)
            if partial is None:
                continue
            found = _verify_candidate(graph, base, partial)
            if found is None:
                # near-miss: pin one more vertex from an explicit completion
                found = _augment_candidate(graph, base, partial, rng)
            if found is not None:
                size, subset, part = found
                if best is None or size < best[0]:
                    best = (size, subset, part, graph)
                break
        if exhausted:
            break
    if best is None:
        return ProbeResult(None, None, None, None, attempts, exhausted, trials)
    return ProbeResult(best[0], best[0] / n, (best[1], best[2]), best[3],
                       attempts, exhausted, trials)


def _verify_candidate(graph, subset, partial):
    extended, res = vf.propagate_forced(graph, partial, 3)
    if res.status == vf.UNIQUE_PROPAGATION:
        return len(subset), list(subset), partial
    stalled = sum(1 for v in range(1, graph.n + 1) if not extended[v])
    if 0 < stalled <= 25:
        try:
            cnt = vf.count_extensions(graph, partial, 3, cap=2, guard=graph.n)
        except vf.GuardExceeded:
            return None
        if cnt == 1:
            return len(subset), list(subset), partial
    return None


def _augment_candidate(graph, subset, partial, rng):
    completion = _complete_partial(graph, partial, 3)
    if completion is None:
        return None
    extended, _ = vf.propagate_forced(graph, partial, 3)
    stalled = [v for v in range(1, graph.n + 1) if not extended[v]]
    if not stalled:
        return None
    v = stalled[rng.randint(len(stalled))]
    bigger = list(partial)
    bigger[v] = completion[v]
    new_subset = sorted(subset + [v])
    found = _verify_candidate(graph, new_subset, bigger)
    return found


def _simple_cubic(n: int, seed: int, trial: int) -> CubicMultigraph:
    attempt = 0
    while True:
        g = generate_graph(n, (seed << 20) ^ (trial * 1000 + attempt))
        if is_simple(g):
            return g
        attempt += 1
