"""Random cubic multigraphs: fixed Hamilton cycle plus a uniform perfect matching.

The vertex set is [1..n] with n even.  Cycle adjacency is implicit
(i ~ i+1, wrapping n ~ 1); the matching is stored as an involution
``partner``.  A matching edge may duplicate a cycle edge (multiedge);
self-loops are impossible.

Two sampling modes produce the same distribution:

* pre-sampled: draw the whole matching by uniform random pairing, then
  replay it through :class:`MatchingProcess`;
* on-the-fly: reveal partners one vertex at a time, drawing a backward
  edge at step i with probability X(i-1)/(n-(i-1)) where X counts the
  currently unsaturated vertices, and picking the partner uniformly
  among them.

The on-the-fly mode is the canonical driver for pipeline runs; the
pre-sampled mode supports serialization round-trips.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .rng import DeterministicRandomSource

GRAPH_FORMAT = "cubic-v1"


@dataclass
class CubicMultigraph:
    """Hamilton cycle (1 2 ... n) plus a perfect matching given by ``partner``.

    ``partner`` is 1-based; index 0 is unused.
    """

    n: int
    partner: list[int]

    def __post_init__(self):
        validate_even_order(self.n)
        if len(self.partner) != self.n + 1:
            raise ValueError("partner array must have length n+1 (1-based)")
        for i in range(1, self.n + 1):
            j = self.partner[i]
            if not 1 <= j <= self.n or j == i:
                raise ValueError(f"invalid partner for vertex {i}: {j}")
            if self.partner[j] != i:
                raise ValueError(f"partner map is not an involution at {i}")

    def cycle_neighbours(self, i: int) -> tuple[int, int]:
        left = self.n if i == 1 else i - 1
        right = 1 if i == self.n else i + 1
        return left, right

    def matching_pairs(self) -> list[tuple[int, int]]:
        """Matching edges as (a, b) with a < b, sorted."""
        return [(i, self.partner[i]) for i in range(1, self.n + 1) if i < self.partner[i]]

    def edges(self) -> list[tuple[int, int]]:
        """All edges with multiplicity: n cycle edges plus n/2 matching edges."""
        cyc = [(i, i + 1) for i in range(1, self.n)] + [(1, self.n)]
        return cyc + self.matching_pairs()

    def to_json_dict(self) -> dict:
        return {"version": GRAPH_FORMAT, "n": self.n, "matching": [[a, b] for a, b in self.matching_pairs()]}


def validate_even_order(n: int):
    if n % 2 != 0 or n < 4:
        raise ValueError(f"vertex count must be even and >= 4, got {n}")


def generate_graph(n: int, seed: int) -> CubicMultigraph:
    """Uniformly random perfect matching on [1..n], deterministic given seed.

    Sampling is by uniform random pairing: shuffle [1..n] and match
    consecutive entries.  Every perfect matching arises from the same
    number of permutations, so the induced distribution is uniform.
    """
    validate_even_order(n)
    rng = DeterministicRandomSource(seed)
    perm = rng.permutation(n)
    partner = [0] * (n + 1)
    for t in range(0, n, 2):
        a = int(perm[t]) + 1
        b = int(perm[t + 1]) + 1
        partner[a] = b
        partner[b] = a
    return CubicMultigraph(n, partner)


def is_simple(graph: CubicMultigraph) -> bool:
    """True iff no matching edge duplicates a cycle edge."""
    for i in range(1, graph.n + 1):
        if graph.partner[i] in graph.cycle_neighbours(i):
            return False
    return True


def write_graph(graph: CubicMultigraph, path: str):
    with open(path, "w") as f:
        json.dump(graph.to_json_dict(), f, sort_keys=True)
        f.write("\n")


def load_graph(path: str) -> CubicMultigraph:
    with open(path) as f:
        data = json.load(f)
    return graph_from_json_dict(data)


def graph_from_json_dict(data: dict) -> CubicMultigraph:
    if data.get("version") != GRAPH_FORMAT:
        raise ValueError(f"unsupported graph format: {data.get('version')!r}")
    n = data["n"]
    validate_even_order(n)
    partner = [0] * (n + 1)
    seen = [False] * (n + 1)
    for pair in data["matching"]:
        a, b = int(pair[0]), int(pair[1])
        if not (1 <= a <= n and 1 <= b <= n) or a == b:
            raise ValueError(f"invalid matching pair {pair}")
        if seen[a] or seen[b]:
            raise ValueError(f"vertex repeated in matching: {pair}")
        seen[a] = seen[b] = True
        partner[a] = b
        partner[b] = a
    if not all(seen[1:]):
        raise ValueError("matching does not cover every vertex")
    return CubicMultigraph(n, partner)


class MatchingProcess:
    """Incremental reveal of the matching, one vertex per step.

    At step i the partner of vertex i is partially revealed: either i is
    matched backward to a uniformly random unsaturated vertex j < i
    (probability X(i-1)/(n-(i-1))), or it stays unsaturated.  In replay
    mode the outcomes come from a pre-sampled graph instead of the rng;
    both modes leave the full matching in ``partner`` once step == n.
    """

    __slots__ = ("n", "rng", "partner", "preset", "step", "saturated", "unsat", "pos")

    def __init__(self, n: int, rng: DeterministicRandomSource | None = None,
                 graph: CubicMultigraph | None = None):
        validate_even_order(n)
        if graph is None and rng is None:
            raise ValueError("on-the-fly sampling requires an rng")
        if graph is not None and graph.n != n:
            raise ValueError("graph order does not match n")
        self.n = n
        self.rng = rng
        self.preset = graph is not None
        self.partner = list(graph.partner) if graph is not None else [0] * (n + 1)
        self.step = 0
        self.saturated = bytearray(n + 1)
        self.unsat: list[int] = []
        self.pos = [0] * (n + 1)

    @property
    def x_total(self) -> int:
        """X(step): number of unsaturated vertices among the processed prefix."""
        return len(self.unsat)

    def reveal_step(self) -> int | None:
        """Advance one step; return the revealed partner j (backward) or None (forward)."""
        if self.step >= self.n:
            raise ValueError("matching process already complete")
        v = self.step + 1
        x = len(self.unsat)
        if self.preset:
            j = self.partner[v]
            backward = j < v
        else:
            # backward with probability x / (n - (v-1)), exactly
            backward = self.rng.uniform() * (self.n - self.step) < x
            j = self.unsat[self.rng.randint(x)] if backward else 0
        self.step = v
        if backward:
            if not self.preset:
                self.partner[v] = j
                self.partner[j] = v
            self._remove_unsat(j)
            self.saturated[j] = 1
            self.saturated[v] = 1
            return j
        self.pos[v] = len(self.unsat)
        self.unsat.append(v)
        return None

    def run_to(self, step: int):
        while self.step < step:
            self.reveal_step()

    def _remove_unsat(self, j: int):
        idx = self.pos[j]
        last = self.unsat[-1]
        self.unsat[idx] = last
        self.pos[last] = idx
        self.unsat.pop()

    def recount_unsaturated(self) -> int:
        """Debug cross-check for the x_total bookkeeping."""
        return sum(1 for v in range(1, self.step + 1) if not self.saturated[v])

    def as_graph(self) -> CubicMultigraph:
        if self.step < self.n:
            raise ValueError("matching not fully revealed")
        return CubicMultigraph(self.n, list(self.partner))

    def fork(self, rng: DeterministicRandomSource | None) -> "MatchingProcess":
        """Independent copy sharing the revealed prefix; new rng for the future."""
        other = MatchingProcess.__new__(MatchingProcess)
        other.n = self.n
        other.rng = rng
        other.preset = self.preset
        other.partner = list(self.partner)
        other.step = self.step
        other.saturated = bytearray(self.saturated)
        other.unsat = list(self.unsat)
        other.pos = list(self.pos)
        return other


def reveal_step(process: MatchingProcess) -> int | None:
    """Functional alias for :meth:`MatchingProcess.reveal_step`."""
    return process.reveal_step()


def enumerate_matchings(n: int) -> list[tuple[tuple[int, int], ...]]:
    """All perfect matchings on [1..n] as sorted pair tuples (small n only)."""
    validate_even_order(n)
    if n > 12:
        raise ValueError("enumeration guard: n <= 12")
    out: list[tuple[tuple[int, int], ...]] = []

    def rec(remaining: tuple[int, ...], acc: tuple[tuple[int, int], ...]):
        if not remaining:
            out.append(acc)
            return
        a = remaining[0]
        for idx in range(1, len(remaining)):
            b = remaining[idx]
            rest = remaining[1:idx] + remaining[idx + 1:]
            rec(rest, acc + ((a, b),))

    rec(tuple(range(1, n + 1)), ())
    return out


def matching_key(graph: CubicMultigraph) -> tuple[tuple[int, int], ...]:
    """Canonical hashable form of a graph's matching."""
    return tuple(graph.matching_pairs())
