"""Three-phase 3-colouring of a random cubic multigraph with a sudoku set.

Phase 1 (burn-in, vertices 1..i0): reveal the matching status of the
prefix, then colour it with a balance-seeking batch greedy so the three
colour classes hold nearly equal numbers of unsaturated vertices.  All of
[1..i0] goes into the sudoku set.

Phase 2 (vertices i0+1..i1): the pointer-driven run algorithm.  The state
alternates between runs of type A (pointer at the current vertex: every
prefix colour is already forced by the set built so far) and type B
(pointer behind).  Each step reveals one matching decision and applies one
of eight colouring rules (A1, A2a, A2b, B1, B2a..B2d); rules B2a-d move
the pointer forward and pay for it with sudoku-set insertions.

Phase 3 (completion, vertices i1+1..n): reveal the remaining matching,
look for an interval of consecutive tail vertices inducing an even cycle
(endpoints matched to each other, interior partners outside).  Colour the
rest of the tail greedily around it and 2-list-colour the interval; if no
interval exists, backtrack over the whole tail.  The whole tail joins the
sudoku set.

Case bookkeeping drives the size accounting: "conventionally bad" vertices
(cases A2a, A2b, B2a, B2b) and "unconventionally bad" ones (B2c, B2d)
bound the final set size by

    |S(i1)| <= |B_C|/2 + |B_U_c| + 2*|B_U_d| + |S0|,

which holds exactly on every run and is asserted in the tests.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

from .graph_core import CubicMultigraph, MatchingProcess, validate_even_order
from .rng import DeterministicRandomSource
from . import type_chain as tc

COLOURING_FORMAT = "colouring-v1"
SET_FORMAT = "set-v1"
TRAJECTORY_HEADER = ["step", "X", "X1", "X2", "X3", "S_size", "bc", "buc", "bud"]

CASE_LABELS = ("A1", "A2a", "A2b", "B1", "B2a", "B2b", "B2c", "B2d")
CONVENTIONAL_BAD = frozenset({"A2a", "A2b", "B2a", "B2b"})

MODE_INTERVAL = "EvenCycleInterval"
MODE_BACKTRACK = "BacktrackFallback"
MODE_FAILED = "Failed"

# the two colours different from index colour, ascending
_OTHER2 = (None, (2, 3), (1, 3), (1, 2))

_TYPE_A_B = (None, tc.a_b(1), tc.a_b(2), tc.a_b(3))
_TYPE_A_F = (None, tc.a_f(1), tc.a_f(2), tc.a_f(3))
_TYPE_B_B = [[None] * 4 for _ in range(4)]
_TYPE_B_F = [[None] * 4 for _ in range(4)]
for _r in (1, 2, 3):
    for _o in (1, 2, 3):
        if _r != _o:
            _TYPE_B_B[_r][_o] = tc.b_b(_r, _o)
            _TYPE_B_F[_r][_o] = tc.b_f(_r, _o)


class StateCorruption(RuntimeError):
    """An internal invariant of the run state was violated (a bug, not an outcome)."""


@dataclass
class PipelineConfig:
    """Run parameters.  i0/tail default to ceil(n^(2/3)) and ceil(20*sqrt(n)).

    The tail default is clamped to (n - i0) // 2 so the three phases stay
    feasible at small n.
    """

    n: int
    i0: int | None = None
    tail: int | None = None
    seed: int = 0
    sample_every: int | None = None

    def __post_init__(self):
        validate_even_order(self.n)
        if self.n < 24:
            raise ValueError("pipeline needs n >= 24")
        if self.i0 is None:
            self.i0 = max(7, math.ceil(self.n ** (2.0 / 3.0)))
        if self.tail is None:
            self.tail = min(math.ceil(20 * math.sqrt(self.n)), (self.n - self.i0) // 2)
        if self.sample_every is None:
            self.sample_every = max(1, self.n // 1000)
        if self.i0 < 7:
            raise ValueError("burn-in needs i0 >= 7 (batch structure)")
        if not (0 < self.i0 < self.i1 < self.n):
            raise ValueError(f"infeasible phase split: i0={self.i0}, i1={self.i1}, n={self.n}")
        if self.sample_every < 1:
            raise ValueError("sample_every must be >= 1")

    @property
    def i1(self) -> int:
        return self.n - self.tail


@dataclass
class TrajectoryRecord:
    """Sampled time series of the middle phase."""

    n: int
    samples: list[tuple] = field(default_factory=list)
    # each sample: (step, X, X1, X2, X3, S_size, bc, buc, bud)

    def append(self, row: tuple):
        self.samples.append(row)


@dataclass
class PipelineResult:
    colouring: list[int]
    sudoku_set: list[int]
    counts: tuple[int, int, int]  # (|B_C|, |B_U_c|, |B_U_d|)
    trajectory: TrajectoryRecord
    completed: bool
    completion_mode: str
    discrepancy: int
    graph: CubicMultigraph
    config: PipelineConfig
    s_gain: int  # |S(i1)| - |S0|, the middle-phase insertions

    @property
    def s_size(self) -> int:
        return len(self.sudoku_set)


# ---------------------------------------------------------------------------
# burn-in
# ---------------------------------------------------------------------------

def _enumerate_batch_colourings(length: int, left: int, right: int):
    """Proper colour tuples for a path of `length` vertices between fixed ends.

    ``left``/``right`` are boundary colours, 0 when unconstrained.
    """
    out: list[tuple[int, ...]] = []
    seq = [0] * length

    def rec(idx: int):
        prev = left if idx == 0 else seq[idx - 1]
        for c in (1, 2, 3):
            if c == prev:
                continue
            if idx == length - 1 and c == right:
                continue
            seq[idx] = c
            if idx == length - 1:
                out.append(tuple(seq))
            else:
                rec(idx + 1)

    rec(0)
    return out


def balanced_greedy_burn_in(process: MatchingProcess, i0: int, colouring: list[int],
                            debug: bool = False) -> tuple[int, list[int]]:
    """Reveal and colour [1..i0]; returns (discrepancy, x_counts).

    The prefix is split into batches of 7 consecutive vertices (a short
    last batch is possible).  A batch is good when all 7 partners land
    beyond i0.  Bad batches are coloured first, in index order, choosing
    among admissible colours the one whose unsaturated class is currently
    smallest.  Good batches are then coloured by enumerating every proper
    colouring compatible with both batch boundaries and picking one that
    minimizes the resulting discrepancy (ties: lexicographically smallest
    sequence).
    """
    if i0 < 7:
        raise ValueError("burn-in needs i0 >= 7")
    n = process.n
    if process.step != 0:
        raise ValueError("burn-in must start at step 0")
    for _ in range(i0):
        process.reveal_step()
    sat = process.saturated
    partner = process.partner

    batches = [(s, min(s + 6, i0)) for s in range(1, i0 + 1, 7)]
    good: list[tuple[int, int]] = []
    bad: list[tuple[int, int]] = []
    for s, e in batches:
        if e - s == 6 and all(not sat[v] for v in range(s, e + 1)):
            good.append((s, e))
        else:
            bad.append((s, e))

    x = [0, 0, 0, 0]
    for s, e in bad:
        for v in range(s, e + 1):
            forbidden = set()
            if v > 1 and colouring[v - 1]:
                forbidden.add(colouring[v - 1])
            if v < i0 and colouring[v + 1]:
                forbidden.add(colouring[v + 1])
            p = partner[v]
            if p and colouring[p]:
                forbidden.add(colouring[p])
            admissible = [c for c in (1, 2, 3) if c not in forbidden]
            if not admissible:
                raise StateCorruption(f"burn-in: no admissible colour at {v}")
            if sat[v]:
                c = admissible[0]
            else:
                c = min(admissible, key=lambda cc: (x[cc], cc))
            colouring[v] = c
            if not sat[v]:
                x[c] += 1

    for s, e in good:
        left = colouring[s - 1] if s > 1 else 0
        right = colouring[e + 1] if e + 1 <= n else 0
        best = None
        best_key = None
        for cand in _enumerate_batch_colourings(7, left, right):
            adds = [0, 0, 0, 0]
            for c in cand:
                adds[c] += 1
            tot = [x[c] + adds[c] for c in (1, 2, 3)]
            key = (max(tot) - min(tot), cand)
            if best_key is None or key < best_key:
                best_key = key
                best = cand
        for off, c in enumerate(best):
            colouring[s + off] = c
            x[c] += 1

    if debug:
        for v in range(2, i0 + 1):
            if colouring[v] == colouring[v - 1]:
                raise StateCorruption(f"burn-in produced improper cycle edge at {v}")
        for v in range(1, i0 + 1):
            p = partner[v]
            if p and p <= i0 and colouring[p] == colouring[v]:
                raise StateCorruption(f"burn-in produced improper matching edge at {v}")
        recount = [0, 0, 0, 0]
        for v in range(1, i0 + 1):
            if not sat[v]:
                recount[colouring[v]] += 1
        if recount != x:
            raise StateCorruption("burn-in unsaturated-class counts drifted")

    discrepancy = max(x[1:]) - min(x[1:])
    return discrepancy, x


# ---------------------------------------------------------------------------
# the pointer-run phase
# ---------------------------------------------------------------------------

class SudokuRun:
    """State of the pointer-run phase (the spec-level RunState).

    Attributes mirror the run-state contract: ``colouring``, ``pointer``,
    ``s_list`` (set insertions beyond S0), the ledgers ``bc``/``buc``/``bud``,
    per-vertex ``types`` and the unsaturated per-colour counts ``x``.
    """

    __slots__ = ("process", "colouring", "pointer", "s_list", "bc", "buc", "bud",
                 "types", "x", "prev_forward", "rng", "debug", "i0")

    def __init__(self, process: MatchingProcess, colouring: list[int], i0: int,
                 rng: DeterministicRandomSource, x_counts: list[int],
                 debug: bool = False):
        if process.step != i0:
            raise ValueError("run must start exactly at the end of the burn-in")
        self.process = process
        self.colouring = colouring
        self.pointer = i0
        self.i0 = i0
        self.s_list: list[int] = []
        self.bc: list[int] = []
        self.buc: list[int] = []
        self.bud: list[int] = []
        self.types: list[int] = [-1] * (process.n + 1)
        self.x = list(x_counts)
        self.prev_forward = not process.saturated[i0]
        self.rng = rng
        self.debug = debug

    @property
    def run_kind(self) -> str:
        return "A" if self.pointer == self.process.step else "B"

    @property
    def s_size_gain(self) -> int:
        return len(self.s_list)

    def step(self) -> str:
        """Process one vertex; returns the case label."""
        proc = self.process
        i = proc.step
        j = proc.reveal_step()
        v = i + 1
        col = self.colouring
        c_prev = col[i]
        backward = j is not None
        if self.pointer == i:  # run of type A
            if backward:
                cj = col[j]
                if cj != c_prev:
                    c_new = 6 - cj - c_prev
                    self.pointer = v
                    case = "A1"
                    typ = _TYPE_A_B[c_new]
                else:
                    c_new = _OTHER2[c_prev][self.rng.randint(2)]
                    case = "A2b"
                    typ = _TYPE_B_B[c_prev][c_new]
                    self.bc.append(v)
            else:
                c_new = _OTHER2[c_prev][self.rng.randint(2)]
                case = "A2a"
                typ = _TYPE_B_F[c_prev][c_new]
                self.bc.append(v)
        else:  # run of type B
            if self.prev_forward:
                ca, cb = col[i - 1], c_prev
            else:
                ca, cb = c_prev, col[proc.partner[i]]
            free = 6 - ca - cb  # the single colour outside {ca, cb}
            if backward:
                cj = col[j]
                if j <= self.pointer:
                    if cj != free:  # partner colour inside the pair set
                        c_new = free
                        case = "B1"
                        typ = _TYPE_B_B[cj][c_new]
                    else:
                        c_new = 6 - c_prev - cj
                        self.s_list.append(i)
                        self.pointer = v
                        case = "B2b"
                        typ = _TYPE_A_B[c_new]
                        self.bc.append(v)
                else:
                    # every vertex strictly between pointer and v is saturated
                    # except possibly pointer+1, so a mid-run hit must land there
                    if j != self.pointer + 1:
                        raise StateCorruption(
                            f"backward hit at {j} inside run ({self.pointer}, {i}]")
                    if cj != free:
                        c_new = free
                        self.s_list.append(v)
                        self.pointer = v
                        case = "B2c"
                        typ = _TYPE_A_B[c_new]
                        self.buc.append(v)
                    else:
                        c_new = 6 - c_prev - cj
                        self.s_list.append(i)
                        self.s_list.append(v)
                        self.pointer = v
                        case = "B2d"
                        typ = _TYPE_A_B[c_new]
                        self.bud.append(v)
            else:
                c_new = free
                self.s_list.append(v)
                self.pointer = v
                case = "B2a"
                typ = _TYPE_A_F[c_new]
                self.bc.append(v)
        col[v] = c_new
        if backward:
            self.x[col[j]] -= 1
        else:
            self.x[c_new] += 1
        self.types[v] = typ
        self.prev_forward = not backward
        if self.debug:
            self._debug_checks(v, j)
        return case

    def _debug_checks(self, v: int, j: int | None):
        col = self.colouring
        proc = self.process
        if col[v] == col[v - 1]:
            raise StateCorruption(f"improper cycle edge at {v}")
        if j is not None and col[v] == col[j]:
            raise StateCorruption(f"improper matching edge {v}-{j}")
        if not self.pointer <= v:
            raise StateCorruption("pointer ran ahead of the current vertex")
        recount = [0, 0, 0, 0]
        for u in proc.unsat:
            recount[col[u]] += 1
        if recount != self.x:
            raise StateCorruption("per-colour unsaturated counts drifted")
        if self.pointer < v:
            # every vertex after the pointer must have a coloured neighbour
            # at or before the pointer
            for u in range(self.pointer + 1, v + 1):
                p = proc.partner[u]
                ok = u == self.pointer + 1 or (0 < p <= self.pointer)
                if not ok:
                    raise StateCorruption(f"run vertex {u} has no anchor before pointer")

    def fork(self, rng: DeterministicRandomSource) -> "SudokuRun":
        """Copy sharing nothing mutable; ledgers are reset (counts irrelevant to forks)."""
        other = SudokuRun.__new__(SudokuRun)
        other.process = self.process.fork(rng)
        other.colouring = list(self.colouring)
        other.pointer = self.pointer
        other.i0 = self.i0
        other.s_list = []
        other.bc = []
        other.buc = []
        other.bud = []
        other.types = list(self.types)
        other.x = list(self.x)
        other.prev_forward = self.prev_forward
        other.rng = rng
        other.debug = False
        return other

    def sample_row(self) -> tuple:
        x1, x2, x3 = self.x[1], self.x[2], self.x[3]
        return (self.process.step, x1 + x2 + x3, x1, x2, x3,
                self.i0 + len(self.s_list), len(self.bc), len(self.buc), len(self.bud))


def classify_step(run: SudokuRun, partner: int | None) -> str:
    """Pure classification of the next vertex, given the reveal outcome.

    Mirrors the decision structure of :meth:`SudokuRun.step` without
    mutating anything; the tests cross-check the two on full traces.
    """
    i = run.process.step
    col = run.colouring
    backward = partner is not None
    if run.pointer == i:
        if not backward:
            return "A2a"
        return "A1" if col[partner] != col[i] else "A2b"
    if run.prev_forward:
        pair = {col[i - 1], col[i]}
    else:
        ref = run.process.partner[i]
        if not ref or not col[ref]:
            raise StateCorruption("reference vertex for the colour pair is uncoloured")
        pair = {col[i], col[ref]}
    if not backward:
        return "B2a"
    inside = col[partner] in pair
    if partner <= run.pointer:
        return "B1" if inside else "B2b"
    return "B2c" if inside else "B2d"


def run_sudoku(process: MatchingProcess, colouring: list[int], s0: list[int],
               i0: int, i1: int, rng: DeterministicRandomSource,
               x_counts: list[int] | None = None, debug: bool = False,
               trajectory: TrajectoryRecord | None = None,
               sample_every: int = 1) -> SudokuRun:
    """Run the pointer phase over vertices i0+1..i1 and return the final state."""
    if sorted(s0) != list(range(1, i0 + 1)):
        raise ValueError("the seed set must be exactly [1..i0]")
    if any(colouring[v] == 0 for v in range(1, i0 + 1)):
        raise ValueError("the prefix [1..i0] must be fully coloured")
    if x_counts is None:
        x_counts = [0, 0, 0, 0]
        for v in range(1, i0 + 1):
            if not process.saturated[v]:
                x_counts[colouring[v]] += 1
    run = SudokuRun(process, colouring, i0, rng, x_counts, debug=debug)
    if trajectory is not None:
        trajectory.append(run.sample_row())
    while process.step < i1:
        run.step()
        if trajectory is not None:
            offset = process.step - i0
            if offset % sample_every == 0 or process.step == i1:
                trajectory.append(run.sample_row())
    return run


# ---------------------------------------------------------------------------
# completion
# ---------------------------------------------------------------------------

def list_colour_even_cycle(cycle_length: int, lists) -> list[int]:
    """Proper colouring of an even cycle from per-vertex 2-colour lists.

    Constructive: if all lists are equal, alternate the two colours;
    otherwise start just after a boundary where consecutive lists differ
    and colour greedily around the cycle.  A backtracking fallback guards
    the (unreachable for even cycles) failure path.
    """
    L = cycle_length
    if L < 4 or L % 2:
        raise ValueError("cycle length must be even and >= 4")
    lists = [frozenset(s) for s in lists]
    if len(lists) != L or any(len(s) != 2 or not s <= {1, 2, 3} for s in lists):
        raise ValueError("each vertex needs a 2-colour list from {1,2,3}")
    start = next((r for r in range(L) if lists[r] != lists[(r + 1) % L]), None)
    if start is None:
        a, b = sorted(lists[0])
        return [a if i % 2 == 0 else b for i in range(L)]
    nxt = (start + 1) % L
    first = min(lists[nxt] - lists[start])
    out = [0] * L
    out[nxt] = first
    for off in range(1, L):
        v = (nxt + off) % L
        prev = out[(v - 1) % L]
        choice = [c for c in sorted(lists[v]) if c != prev]
        if not choice:
            break
        out[v] = choice[0]
    if all(out) and _cycle_ok(out, lists):
        return out
    out = _cycle_backtrack(L, lists)
    if out is None:
        raise StateCorruption("even cycle with 2-lists failed to colour")
    return out


def _cycle_ok(out, lists) -> bool:
    L = len(out)
    return all(out[i] in lists[i] and out[i] != out[(i + 1) % L] for i in range(L))


def _cycle_backtrack(L: int, lists) -> list[int] | None:
    out = [0] * L

    def rec(i: int):
        for c in sorted(lists[i]):
            if i > 0 and c == out[i - 1]:
                continue
            if i == L - 1 and c == out[0]:
                continue
            out[i] = c
            if i == L - 1:
                return True
            if rec(i + 1):
                return True
        out[i] = 0
        return False

    return out if rec(0) else None


def find_even_cycle_interval(partner: list[int], i1: int, n: int) -> tuple[int, int] | None:
    """First interval {l..r} in the tail with partner(l) = r, r-l odd >= 3,
    and every interior partner outside the interval."""
    for l in range(i1 + 1, n - 2):
        r = partner[l]
        if r <= l or r > n or (r - l) % 2 == 0 or r - l < 3:
            continue
        if all(not l <= partner[v] <= r for v in range(l + 1, r)):
            return l, r
    return None


def _admissible(colouring, partner, n, v) -> list[int]:
    left = n if v == 1 else v - 1
    right = 1 if v == n else v + 1
    forbidden = {colouring[left], colouring[right], colouring[partner[v]]}
    return [c for c in (1, 2, 3) if c not in forbidden]


def completion_phase(partner: list[int], colouring: list[int], i1: int, n: int,
                     budget: int = 500_000) -> str:
    """Colour the tail (i1..n]; returns the completion mode used.

    With an induced even-cycle interval: greedy forward up to it, greedy
    reverse down to it (vertex n is constrained by vertex 1), then
    2-list-colour the interval.  Without one: iterative backtracking over
    the whole tail, bounded by ``budget`` nodes.
    """
    interval = find_even_cycle_interval(partner, i1, n)
    if interval is not None:
        l, r = interval
        for v in range(i1 + 1, l):
            choice = _admissible(colouring, partner, n, v)
            if not choice:
                raise StateCorruption(f"forward greedy stuck at {v}")
            colouring[v] = choice[0]
        for v in range(n, r, -1):
            choice = _admissible(colouring, partner, n, v)
            if not choice:
                raise StateCorruption(f"reverse greedy stuck at {v}")
            colouring[v] = choice[0]
        lists = []
        for v in range(l, r + 1):
            forbidden = set()
            if v == l:
                forbidden.add(colouring[l - 1])
            elif v == r:
                forbidden.add(colouring[1] if r == n else colouring[r + 1])
            else:
                forbidden.add(colouring[partner[v]])
            lst = {1, 2, 3} - forbidden
            if len(lst) != 2:
                raise StateCorruption(f"interval vertex {v} does not have a 2-list")
            lists.append(lst)
        cycle = list_colour_even_cycle(r - l + 1, lists)
        for off, c in enumerate(cycle):
            colouring[l + off] = c
        return MODE_INTERVAL
    ok = _tail_backtrack(partner, colouring, i1, n, budget)
    return MODE_BACKTRACK if ok else MODE_FAILED


def _tail_backtrack(partner, colouring, i1, n, budget) -> bool:
    tail = list(range(i1 + 1, n + 1))
    nodes = 0
    idx = 0
    tried = {v: 0 for v in tail}  # last colour attempted (0 = none yet)
    while 0 <= idx < len(tail):
        v = tail[idx]
        if nodes >= budget:
            for u in tail[:idx + 1]:
                colouring[u] = 0
            return False
        placed = False
        for c in range(tried[v] + 1, 4):
            nodes += 1
            left = colouring[v - 1]
            right = colouring[1] if v == n else colouring[v + 1]
            p = colouring[partner[v]]
            if c != left and c != right and c != p:
                colouring[v] = c
                tried[v] = c
                placed = True
                break
        if placed:
            idx += 1
        else:
            colouring[v] = 0
            tried[v] = 0
            idx -= 1
            if idx >= 0:
                colouring[tail[idx]] = 0
    return idx == len(tail)


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------

class PipelineRun:
    """Stepwise driver over the three phases; supports forking mid-run."""

    def __init__(self, config: PipelineConfig, rng: DeterministicRandomSource | None = None,
                 graph: CubicMultigraph | None = None, debug: bool = False):
        self.config = config
        self.rng = rng if rng is not None else DeterministicRandomSource(config.seed)
        self.process = MatchingProcess(config.n, self.rng, graph=graph)
        self.colouring = [0] * (config.n + 1)
        self.debug = debug
        self.discrepancy: int | None = None
        self.run: SudokuRun | None = None
        self.trajectory = TrajectoryRecord(config.n)

    def burn_in(self) -> int:
        self.discrepancy, self._x = balanced_greedy_burn_in(
            self.process, self.config.i0, self.colouring, debug=self.debug)
        self.run = SudokuRun(self.process, self.colouring, self.config.i0,
                             self.rng, self._x, debug=self.debug)
        self.trajectory.append(self.run.sample_row())
        return self.discrepancy

    def advance_to(self, step: int) -> None:
        """Run the pointer phase up to the given process step (<= i1)."""
        if self.run is None:
            self.burn_in()
        if not self.config.i0 <= step <= self.config.i1:
            raise ValueError("step outside the pointer phase")
        cfg = self.config
        run = self.run
        proc = self.process
        every = cfg.sample_every
        while proc.step < step:
            run.step()
            offset = proc.step - cfg.i0
            if offset % every == 0 or proc.step == cfg.i1:
                self.trajectory.append(run.sample_row())

    def finish(self, completion_budget: int = 500_000) -> PipelineResult:
        cfg = self.config
        self.advance_to(cfg.i1)
        while self.process.step < cfg.n:
            self.process.reveal_step()
        graph = self.process.as_graph()
        mode = completion_phase(self.process.partner, self.colouring, cfg.i1, cfg.n,
                                budget=completion_budget)
        completed = mode != MODE_FAILED
        if completed:
            _assert_total_proper(graph, self.colouring)
        if len(set(self.run.s_list)) != len(self.run.s_list):
            raise StateCorruption("duplicate sudoku-set insertion")
        sudoku = set(range(1, cfg.i0 + 1))
        sudoku.update(self.run.s_list)
        sudoku.add(cfg.i1)
        sudoku.update(range(cfg.i1 + 1, cfg.n + 1))
        return PipelineResult(
            colouring=self.colouring,
            sudoku_set=sorted(sudoku),
            counts=(len(self.run.bc), len(self.run.buc), len(self.run.bud)),
            trajectory=self.trajectory,
            completed=completed,
            completion_mode=mode,
            discrepancy=self.discrepancy,
            graph=graph,
            config=cfg,
            s_gain=len(self.run.s_list),
        )


def _assert_total_proper(graph: CubicMultigraph, colouring: list[int]):
    n = graph.n
    for v in range(1, n + 1):
        if not 1 <= colouring[v] <= 3:
            raise StateCorruption(f"vertex {v} left uncoloured after completion")
        nxt = 1 if v == n else v + 1
        if colouring[v] == colouring[nxt]:
            raise StateCorruption(f"improper cycle edge {v}-{nxt} after completion")
        if colouring[v] == colouring[graph.partner[v]]:
            raise StateCorruption(f"improper matching edge at {v} after completion")


def full_pipeline(config: PipelineConfig, rng: DeterministicRandomSource | None = None,
                  graph: CubicMultigraph | None = None, debug: bool = False) -> PipelineResult:
    """Burn-in, pointer phase, and completion; deterministic given (seed, config)."""
    driver = PipelineRun(config, rng=rng, graph=graph, debug=debug)
    driver.burn_in()
    return driver.finish()


def size_bound_holds(result: PipelineResult) -> bool:
    """Exact integer form of the set-size inequality (valid on every run)."""
    bc, buc, bud = result.counts
    return 2 * result.s_gain <= bc + 2 * buc + 4 * bud


# ---------------------------------------------------------------------------
# artifact I/O
# ---------------------------------------------------------------------------

def write_colouring(colouring: list[int], n: int, path: str):
    payload = {"version": COLOURING_FORMAT, "n": n, "colours": list(colouring[1:n + 1])}
    with open(path, "w") as f:
        json.dump(payload, f, sort_keys=True)
        f.write("\n")


def load_colouring(path: str) -> list[int]:
    with open(path) as f:
        data = json.load(f)
    if data.get("version") != COLOURING_FORMAT:
        raise ValueError(f"unsupported colouring format: {data.get('version')!r}")
    colours = data["colours"]
    if len(colours) != data["n"]:
        raise ValueError("colour array length does not match n")
    return [0] + [int(c) for c in colours]


def write_vertex_set(vertices, path: str):
    payload = {"version": SET_FORMAT, "vertices": sorted(int(v) for v in vertices)}
    with open(path, "w") as f:
        json.dump(payload, f, sort_keys=True)
        f.write("\n")


def load_vertex_set(path: str) -> list[int]:
    with open(path) as f:
        data = json.load(f)
    if data.get("version") != SET_FORMAT:
        raise ValueError(f"unsupported set format: {data.get('version')!r}")
    return [int(v) for v in data["vertices"]]


def write_trajectory_csv(record: TrajectoryRecord, path: str):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(TRAJECTORY_HEADER)
        writer.writerows(record.samples)
