"""Independent verification of colourings and sudoku (defining) sets.

Everything here is representation-generic: a :class:`Graph` is just a
vertex count plus an edge list (1-based, multiedges allowed), so both the
cubic pipeline outputs and small named graphs are handled uniformly.

Two complementary uniqueness checkers are provided and kept independent:

* ``propagate_forced`` colours locally forced vertices only (a vertex is
  forced when its coloured neighbours show k-1 distinct colours); if it
  completes, the extension is provably unique and the forcing order is a
  certificate.
* ``count_extensions`` counts proper extensions by backtracking (with
  propagation-based pruning), optionally capped.

``is_sudoku_set`` tries propagation first and falls back to exact
counting on small instances.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

ADJ_FORMAT = "adj-v1"

# VerificationResult statuses
UNIQUE_PROPAGATION = "UniqueByPropagation"
UNIQUE_EXACT = "UniqueByExactCount"
NOT_UNIQUE = "NotUnique"
CONTRADICTION = "Contradiction"
UNKNOWN = "Unknown"

UNIQUE_STATUSES = (UNIQUE_PROPAGATION, UNIQUE_EXACT)


class GuardExceeded(Exception):
    """Raised when an exact search would exceed its configured size guard."""


@dataclass(frozen=True)
class VerificationResult:
    status: str
    forced_order: tuple[int, ...] | None = None
    count: int | None = None

    @property
    def unique(self) -> bool:
        return self.status in UNIQUE_STATUSES


@dataclass
class Graph:
    """Undirected multigraph on vertices [1..n] with an explicit edge list."""

    n: int
    edges: list[tuple[int, int]]

    def __post_init__(self):
        for a, b in self.edges:
            if not (1 <= a <= self.n and 1 <= b <= self.n) or a == b:
                raise ValueError(f"invalid edge ({a}, {b})")

    @cached_property
    def adj(self) -> list[list[int]]:
        nbr: list[list[int]] = [[] for _ in range(self.n + 1)]
        for a, b in self.edges:
            nbr[a].append(b)
            nbr[b].append(a)
        return nbr

    def to_json_dict(self) -> dict:
        return {"version": ADJ_FORMAT, "n": self.n,
                "edges": [[a, b] for a, b in self.edges]}


def graph_from_cubic(g) -> Graph:
    """Generic view of a CubicMultigraph (cycle edges plus matching edges)."""
    return Graph(g.n, g.edges())


def load_adj_graph(path: str) -> Graph:
    with open(path) as f:
        data = json.load(f)
    if data.get("version") != ADJ_FORMAT:
        raise ValueError(f"unsupported graph format: {data.get('version')!r}")
    return Graph(data["n"], [(int(a), int(b)) for a, b in data["edges"]])


def write_adj_graph(graph: Graph, path: str):
    with open(path, "w") as f:
        json.dump(graph.to_json_dict(), f, sort_keys=True)
        f.write("\n")


# -- named small graphs -------------------------------------------------------

def complete_graph(k: int) -> Graph:
    return Graph(k, [(a, b) for a, b in combinations(range(1, k + 1), 2)])


def cycle_graph(k: int) -> Graph:
    return Graph(k, [(i, i + 1) for i in range(1, k)] + [(1, k)])


def path_graph(k: int) -> Graph:
    return Graph(k, [(i, i + 1) for i in range(1, k)])


def prism_graph() -> Graph:
    """Triangular prism: triangles 123 and 456 joined by the matching i ~ i+3."""
    return Graph(6, [(1, 2), (2, 3), (1, 3), (4, 5), (5, 6), (4, 6),
                     (1, 4), (2, 5), (3, 6)])


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph(a + b, [(i, a + j) for i in range(1, a + 1) for j in range(1, b + 1)])


# -- proper colourings --------------------------------------------------------

def check_proper(graph: Graph, colouring: list[int], k: int) -> bool:
    """True iff no edge is monochromatic; colouring must be total in 1..k."""
    for v in range(1, graph.n + 1):
        c = colouring[v]
        if not 1 <= c <= k:
            raise ValueError(f"vertex {v} is uncoloured or out of range: {c}")
    return all(colouring[a] != colouring[b] for a, b in graph.edges)


def check_proper_partial(graph: Graph, colouring: list[int]) -> bool:
    """Properness on the coloured subgraph only (0 = uncoloured)."""
    return all(colouring[a] == 0 or colouring[b] == 0 or colouring[a] != colouring[b]
               for a, b in graph.edges)


def propagate_forced(graph: Graph, partial: list[int], k: int):
    """Colour every locally forced vertex, repeatedly.

    A vertex is forced when its coloured neighbours span exactly k-1
    distinct colours.  Returns ``(extended, VerificationResult)`` where the
    status is UniqueByPropagation (all coloured), Contradiction (some
    vertex saw all k colours), or Unknown (stall).
    """
    col = list(partial)
    adj = graph.adj
    full = (1 << k) - 1
    masks = [0] * (graph.n + 1)
    popcnt = [bin(m).count("1") for m in range(1 << k)]
    uncoloured = 0
    for v in range(1, graph.n + 1):
        if col[v]:
            continue
        uncoloured += 1
        m = 0
        for u in adj[v]:
            if col[u]:
                m |= 1 << (col[u] - 1)
        masks[v] = m
    queue = [v for v in range(1, graph.n + 1)
             if not col[v] and popcnt[masks[v]] >= k - 1]
    order: list[int] = []
    while queue:
        v = queue.pop()
        if col[v]:
            continue
        m = masks[v]
        if m == full:
            return col, VerificationResult(CONTRADICTION, tuple(order))
        if popcnt[m] != k - 1:
            continue
        c = (full ^ m).bit_length()  # the single admissible colour
        col[v] = c
        order.append(v)
        uncoloured -= 1
        bit = 1 << (c - 1)
        for u in adj[v]:
            if col[u]:
                continue
            if masks[u] & bit:
                continue
            masks[u] |= bit
            if popcnt[masks[u]] >= k - 1:
                queue.append(u)
    if uncoloured == 0:
        return col, VerificationResult(UNIQUE_PROPAGATION, tuple(order))
    # a stalled vertex with a full mask means no admissible colour
    for v in range(1, graph.n + 1):
        if not col[v] and masks[v] == full:
            return col, VerificationResult(CONTRADICTION, tuple(order))
    return col, VerificationResult(UNKNOWN, tuple(order))


def count_extensions(graph: Graph, partial: list[int], k: int,
                     cap: int | None = None, guard: int = 60) -> int:
    """Number of proper k-colourings extending ``partial``, counted up to ``cap``.

    Backtracking with forced-vertex propagation at every node.  Raises
    :class:`GuardExceeded` when the graph is larger than ``guard``.
    """
    if graph.n > guard:
        raise GuardExceeded(f"count_extensions guard: n={graph.n} > {guard}")
    if not check_proper_partial(graph, partial):
        return 0
    adj = graph.adj
    full = (1 << k) - 1
    col = list(partial)

    def neighbour_mask(v: int) -> int:
        m = 0
        for u in adj[v]:
            if col[u]:
                m |= 1 << (col[u] - 1)
        return m

    def propagate(trail: list[int]) -> bool:
        # returns False on contradiction; coloured vertices are pushed to trail
        changed = True
        while changed:
            changed = False
            for v in range(1, graph.n + 1):
                if col[v]:
                    continue
                m = neighbour_mask(v)
                if m == full:
                    return False
                if bin(m).count("1") == k - 1:
                    col[v] = (full ^ m).bit_length()
                    trail.append(v)
                    changed = True
        return True

    def rec() -> int:
        trail: list[int] = []
        if not propagate(trail):
            for v in trail:
                col[v] = 0
            return 0
        pick = 0
        best = -1
        for v in range(1, graph.n + 1):
            if col[v]:
                continue
            deg = bin(neighbour_mask(v)).count("1")
            if deg > best:
                best = deg
                pick = v
        if pick == 0:
            for v in trail:
                col[v] = 0
            return 1
        total = 0
        m = neighbour_mask(pick)
        for c in range(1, k + 1):
            if m & (1 << (c - 1)):
                continue
            col[pick] = c
            total += rec()
            col[pick] = 0
            if cap is not None and total >= cap:
                break
        for v in trail:
            col[v] = 0
        return total if cap is None else min(total, cap)

    return rec()


def restrict_colouring(colouring: list[int], subset) -> list[int]:
    out = [0] * len(colouring)
    for v in subset:
        out[v] = colouring[v]
    return out


def is_sudoku_set(graph: Graph, colouring: list[int], subset, k: int,
                  count_guard: int = 60, cap: int = 2) -> VerificationResult:
    """Does the colouring restricted to ``subset`` extend uniquely to ``colouring``?

    Propagation first; on a stall, exact counting (capped) when the graph
    is within ``count_guard``; Unknown otherwise.
    """
    partial = restrict_colouring(colouring, subset)
    extended, res = propagate_forced(graph, partial, k)
    if res.status == UNIQUE_PROPAGATION:
        if extended != list(colouring):
            # forced values always agree with any proper extension, so a
            # mismatch means the reference colouring is not proper
            return VerificationResult(CONTRADICTION, res.forced_order)
        return res
    if res.status == CONTRADICTION:
        return res
    try:
        cnt = count_extensions(graph, partial, k, cap=cap, guard=count_guard)
    except GuardExceeded:
        return VerificationResult(UNKNOWN, res.forced_order)
    if cnt == 0:
        return VerificationResult(CONTRADICTION, res.forced_order, count=0)
    if cnt == 1:
        return VerificationResult(UNIQUE_EXACT, res.forced_order, count=1)
    return VerificationResult(NOT_UNIQUE, res.forced_order, count=cnt)


def strong_order(graph: Graph, colouring: list[int], subset,
                 k: int | None = None) -> tuple[int, ...] | None:
    """Greedy ordering of V \\ subset in which every vertex is locally forced.

    Returns the order, or None when no such greedy order completes.
    ``k`` defaults to the largest colour used.
    """
    if k is None:
        k = max(colouring[1:])
    partial = restrict_colouring(colouring, subset)
    extended, res = propagate_forced(graph, partial, k)
    if res.status == UNIQUE_PROPAGATION and extended == list(colouring):
        return res.forced_order
    return None


def is_decycling(graph: Graph, subset) -> bool:
    """True iff deleting ``subset`` leaves an acyclic (multi)graph."""
    removed = [False] * (graph.n + 1)
    for v in subset:
        removed[v] = True
    parent = list(range(graph.n + 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in graph.edges:
        if removed[a] or removed[b]:
            continue
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
    return True


# -- closed-form lower/upper bounds -------------------------------------------

@dataclass(frozen=True)
class BoundsReport:
    lb_edges: int
    lb_regular: int
    ub_independence: int | None


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def bounds_report(n_vertices: int, n_edges: int, d: int, chi: int,
                  alpha: int | None = None) -> BoundsReport:
    """Integer-exact bound calculators.

    lb_edges = ceil(n - m/(chi-1)); lb_regular applies to d-regular graphs
    with chi = d; ub_independence = (chi-1) * alpha.
    """
    if chi < 2:
        raise ValueError("chromatic number must be >= 2")
    lb_edges = n_vertices - n_edges // (chi - 1)
    lb_regular = _ceil_div((d - 2) * n_vertices + 2 + (d - 2) * (d - 3), 2 * (d - 1))
    ub = None if alpha is None else (chi - 1) * alpha
    return BoundsReport(lb_edges, lb_regular, ub)


# -- exact small-instance oracles ----------------------------------------------

def _canonical_partials(graph: Graph, subset: tuple[int, ...], k: int):
    """Proper colourings of G[subset], one representative per colour permutation.

    Canonical form: colour c may be first used only after all colours < c
    have appeared (in subset order).
    """
    adj_in = {v: [u for u in graph.adj[v] if u in set(subset)] for v in subset}
    assign: dict[int, int] = {}

    def rec(idx: int, used: int):
        if idx == len(subset):
            yield dict(assign)
            return
        v = subset[idx]
        forbidden = {assign[u] for u in adj_in[v] if u in assign}
        top = min(used + 1, k)
        for c in range(1, top + 1):
            if c in forbidden:
                continue
            assign[v] = c
            yield from rec(idx + 1, max(used, c))
            del assign[v]

    yield from rec(0, 0)


def min_sudoku_exact(graph: Graph, k: int, guard: int = 14):
    """Smallest subset admitting a partial k-colouring with a unique extension.

    Exhaustive search, sizes ascending, colourings up to global colour
    permutation.  Returns ``(size, (subset, partial))``.
    """
    if graph.n > guard:
        raise GuardExceeded(f"min_sudoku_exact guard: n={graph.n} > {guard}")
    vertices = tuple(range(1, graph.n + 1))
    for size in range(0, graph.n + 1):
        for subset in combinations(vertices, size):
            for assign in _canonical_partials(graph, subset, k):
                partial = [0] * (graph.n + 1)
                for v, c in assign.items():
                    partial[v] = c
                if count_extensions(graph, partial, k, cap=2, guard=graph.n) == 1:
                    return size, (list(subset), partial)
    raise ValueError(f"graph has no unique {k}-colouring extension from any subset")


def max_independent_exact(graph: Graph, guard: int = 40) -> int:
    """Exact independence number via branch and bound."""
    if graph.n > guard:
        raise GuardExceeded(f"max_independent_exact guard: n={graph.n} > {guard}")
    adj_sets = [set() for _ in range(graph.n + 1)]
    for a, b in graph.edges:
        adj_sets[a].add(b)
        adj_sets[b].add(a)
    order = sorted(range(1, graph.n + 1), key=lambda v: -len(adj_sets[v]))
    best = 0

    def rec(idx: int, chosen: set[int], size: int):
        nonlocal best
        if size + (len(order) - idx) <= best:
            return
        if idx == len(order):
            best = max(best, size)
            return
        v = order[idx]
        if not (adj_sets[v] & chosen):
            chosen.add(v)
            rec(idx + 1, chosen, size + 1)
            chosen.remove(v)
        rec(idx + 1, chosen, size)

    rec(0, set(), 0)
    return best


def colourable(graph: Graph, k: int, guard: int = 200) -> bool:
    """Is there any proper k-colouring?  Small-instance helper."""
    empty = [0] * (graph.n + 1)
    return count_extensions(graph, empty, k, cap=1, guard=guard) >= 1
