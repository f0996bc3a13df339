"""The 18-state vertex-type chain and its numerical diagnostics.

States encode what the colouring pipeline sees at one vertex: run kind
(A: pointer at the vertex, B: pointer behind), edge direction (b: backward,
f: forward), the vertex's own colour, and for B-states a reference colour
(the backward partner's colour for B_b, the previous vertex's colour for
B_f).  Canonical index order, shared bit-exactly with the pipeline:

    0..2   Ab1 Ab2 Ab3
    3..5   Af1 Af2 Af3
    6..11  Bb12 Bb13 Bb21 Bb23 Bb31 Bb32   (reference colour, own colour)
    12..17 Bf12 Bf13 Bf21 Bf23 Bf31 Bf32

Transition probabilities are parameterized by per-colour backward-hit
probabilities (q1, q2, q3) with q = q1+q2+q3 <= 1.  In the balanced regime
q_k = q/3 the stationary distribution has the closed form implemented by
:func:`pi_bal`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

N_STATES = 18

_PAIRS = [(1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)]
_PAIR_INDEX = {p: i for i, p in enumerate(_PAIRS)}

STATE_NAMES = (
    ["Ab1", "Ab2", "Ab3", "Af1", "Af2", "Af3"]
    + [f"Bb{l}{k}" for l, k in _PAIRS]
    + [f"Bf{l}{k}" for l, k in _PAIRS]
)


def a_b(k: int) -> int:
    return k - 1


def a_f(k: int) -> int:
    return 2 + k


def b_b(ref: int, own: int) -> int:
    return 6 + _PAIR_INDEX[(ref, own)]


def b_f(ref: int, own: int) -> int:
    return 12 + _PAIR_INDEX[(ref, own)]


BACKWARD_STATES = tuple(range(0, 3)) + tuple(range(6, 12))
FORWARD_STATES = tuple(range(3, 6)) + tuple(range(12, 18))

DEFAULT_Q_GRID = tuple(round(0.05 * i, 2) for i in range(1, 20))


@dataclass(frozen=True)
class ChainParams:
    q1: float
    q2: float
    q3: float

    def __post_init__(self):
        for qk in (self.q1, self.q2, self.q3):
            if not 0 <= qk <= 1:
                raise ValueError(f"q_k out of [0,1]: {qk}")
        if self.q > 1 + 1e-12:
            raise ValueError(f"q1+q2+q3 must be <= 1, got {self.q}")

    @property
    def q(self):
        return self.q1 + self.q2 + self.q3


def build_q_entries(q1, q2, q3):
    """Transition matrix as nested lists; exact under Fraction inputs."""
    zero = q1 - q1  # preserves the scalar type (float or Fraction)
    one = zero + 1
    q = q1 + q2 + q3
    qs = [None, q1, q2, q3]
    rows = [[zero] * N_STATES for _ in range(N_STATES)]

    def others(k):
        return [c for c in (1, 2, 3) if c != k]

    # A-rows: own colour k, either edge direction
    for k in (1, 2, 3):
        l, m = others(k)
        for s in (a_b(k), a_f(k)):
            row = rows[s]
            row[a_b(l)] = qs[m]
            row[a_b(m)] = qs[l]
            half_forward = (one - q) / 2
            row[b_f(k, l)] = half_forward
            row[b_f(k, m)] = half_forward
            row[b_b(k, l)] = qs[k] / 2
            row[b_b(k, m)] = qs[k] / 2
    # B-rows: reference colour r, own colour o, third colour m
    for r, o in _PAIRS:
        m = 6 - r - o
        for s in (b_b(r, o), b_f(r, o)):
            row = rows[s]
            row[a_b(r)] = qs[m]
            row[a_f(m)] = one - q
            row[b_b(r, m)] = qs[r]
            row[b_b(o, m)] = qs[o]
    return rows


def build_q(params: ChainParams | tuple) -> np.ndarray:
    if not isinstance(params, ChainParams):
        params = ChainParams(*params)
    return np.array(build_q_entries(params.q1, params.q2, params.q3), dtype=float)


def build_q_bal(q: float) -> np.ndarray:
    return build_q(ChainParams(q / 3, q / 3, q / 3))


def pi_bal(q: float) -> np.ndarray:
    """Closed-form stationary distribution of the balanced chain."""
    if not 0 < q < 1:
        raise ValueError("q must lie in (0,1)")
    out = np.empty(N_STATES)
    out[0:3] = q / 6
    out[3:6] = (1 - q) / 6
    out[6:12] = q / 12
    out[12:18] = (1 - q) / 12
    return out


def tv_distance(mu: np.ndarray, nu: np.ndarray) -> float:
    """Total variation distance, half the L1 norm."""
    return 0.5 * float(np.abs(np.asarray(mu) - np.asarray(nu)).sum())


def stationary(matrix: np.ndarray, tol: float = 1e-12, method: str = "solve") -> np.ndarray:
    """Stationary distribution pi with ||pi Q - pi||_1 <= tol."""
    Q = np.asarray(matrix, dtype=float)
    k = Q.shape[0]
    if method == "solve":
        A = Q.T - np.eye(k)
        A[-1, :] = 1.0
        b = np.zeros(k)
        b[-1] = 1.0
        pi = np.linalg.solve(A, b)
    elif method == "power":
        pi = np.full(k, 1.0 / k)
        for _ in range(1_000_000):
            nxt = pi @ Q
            if np.abs(nxt - pi).sum() <= tol / 4:
                pi = nxt
                break
            pi = nxt
        else:
            raise RuntimeError("power iteration did not converge")
    else:
        raise ValueError(f"unknown method {method!r}")
    pi = np.maximum(pi, 0.0)
    pi = pi / pi.sum()
    resid = float(np.abs(pi @ Q - pi).sum())
    if resid > tol:
        raise RuntimeError(f"stationary residual {resid} exceeds tol {tol}")
    return pi


def structure_check(matrix: np.ndarray) -> tuple[bool, bool]:
    """(irreducible, aperiodic) of the positive-entry digraph.

    Irreducibility via forward and backward reachability from state 0;
    aperiodicity via the gcd of return-time lengths at state 0.
    """
    Q = np.asarray(matrix)
    k = Q.shape[0]
    pos = Q > 0

    def reach(adj) -> set[int]:
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in range(k):
                if adj[u, v] and v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen

    irreducible = len(reach(pos)) == k and len(reach(pos.T)) == k
    # gcd of t <= 2k with Q^t(0,0) > 0, via boolean matrix powers
    g = 0
    power = np.eye(k, dtype=bool)
    for t in range(1, 2 * k + 1):
        power = power @ pos
        if power[0, 0]:
            g = math.gcd(g, t)
            if g == 1:
                break
    aperiodic = g == 1
    return irreducible, aperiodic


def mixing_time(matrix: np.ndarray, eps: float, max_steps: int = 200_000) -> int:
    """Smallest t with max over point-mass starts of TV(delta Q^t, pi) <= eps."""
    Q = np.asarray(matrix, dtype=float)
    pi = stationary(Q)
    dist = np.eye(Q.shape[0])
    for t in range(1, max_steps + 1):
        dist = dist @ Q
        worst = 0.5 * np.abs(dist - pi[None, :]).sum(axis=1).max()
        if worst <= eps:
            return t
    raise RuntimeError(f"mixing time exceeded budget {max_steps}")


def minorization_alpha(matrix: np.ndarray, power: int):
    """Minorization constant alpha = sum over columns of the min of Q^power.

    Returns (alpha, nu) with nu the minorizing distribution, or (0.0, None)
    when no minorization holds at this power.
    """
    if power < 1:
        raise ValueError("power must be >= 1")
    M = np.linalg.matrix_power(np.asarray(matrix, dtype=float), power)
    mins = M.min(axis=0)
    alpha = float(mins.sum())
    if alpha <= 0:
        return 0.0, None
    return alpha, mins / alpha


def expected_hitting_times(matrix: np.ndarray) -> np.ndarray:
    """H[x, y] = expected steps to first reach y from x (H[y, y] = 0)."""
    Q = np.asarray(matrix, dtype=float)
    k = Q.shape[0]
    H = np.zeros((k, k))
    idx = np.arange(k)
    for y in range(k):
        keep = idx != y
        A = np.eye(k - 1) - Q[np.ix_(keep, keep)]
        h = np.linalg.solve(A, np.ones(k - 1))
        H[keep, y] = h
    return H


def kappa_condition(matrix: np.ndarray, pi: np.ndarray | None = None,
                    hitting: np.ndarray | None = None) -> float:
    """kappa = max_y max_{x != y} pi(y) E_x[hit y]."""
    Q = np.asarray(matrix, dtype=float)
    if pi is None:
        pi = stationary(Q)
    if hitting is None:
        hitting = expected_hitting_times(Q)
    k = Q.shape[0]
    best = 0.0
    for y in range(k):
        for x in range(k):
            if x != y:
                best = max(best, pi[y] * hitting[x, y])
    return best


def transitions_ratio(q: float) -> float:
    """Worst-case ratio pi_bal(y) / (reachability mass of y) for the balanced chain.

    Backward-edge targets use the exact 6-step probability; forward-edge
    targets use the probability of hitting within 6 steps (target made
    absorbing).
    """
    Q = build_q_bal(q)
    pib = pi_bal(q)
    M6 = np.linalg.matrix_power(Q, 6)
    worst = 0.0
    for y in BACKWARD_STATES:
        worst = max(worst, pib[y] / M6[:, y].min())
    for y in FORWARD_STATES:
        B = Q.copy()
        B[y, :] = 0.0
        B[y, y] = 1.0
        P6 = np.linalg.matrix_power(B, 6)
        worst = max(worst, pib[y] / P6[:, y].min())
    return worst


def estimate_c_cond(q_grid=DEFAULT_Q_GRID) -> float:
    """Max of :func:`transitions_ratio` over the q grid."""
    return max(transitions_ratio(q) for q in q_grid)


@dataclass(frozen=True)
class HittingStats:
    expected_hitting: np.ndarray
    kappa: float
    c_cond_estimate: float


def hitting_stats(matrix: np.ndarray, pi: np.ndarray | None = None,
                  q_grid=DEFAULT_Q_GRID) -> HittingStats:
    Q = np.asarray(matrix, dtype=float)
    if pi is None:
        pi = stationary(Q)
    H = expected_hitting_times(Q)
    return HittingStats(H, kappa_condition(Q, pi, H), estimate_c_cond(q_grid))


def sample_perturbed_params(q: float, gamma: float, rng) -> ChainParams:
    """(q1,q2,q3) with sum q and each q_k within (1 +/- gamma) q/3."""
    while True:
        u1 = (2 * rng.uniform() - 1)
        u2 = (2 * rng.uniform() - 1)
        u3 = -(u1 + u2)
        if abs(u3) < 1:
            base = q / 3
            return ChainParams(base * (1 + gamma * u1),
                               base * (1 + gamma * u2),
                               base * (1 + gamma * u3))


def perturbation_check(q: float, gamma: float, trials: int, seed: int = 0,
                       c_cond: float | None = None, check: bool = True):
    """Max ||pi - pi_bal||_inf over random perturbations, with its bound.

    Returns ``(max_deviation, bound)`` where bound = 3 * c_cond * gamma * q.
    Raises RuntimeError if ``check`` and the bound is violated.
    """
    from .rng import DeterministicRandomSource

    if gamma > 0.1:
        raise ValueError("gamma must be <= 0.1")
    if c_cond is None:
        c_cond = estimate_c_cond()
    rng = DeterministicRandomSource(seed)
    pib = pi_bal(q)
    max_dev = 0.0
    for _ in range(trials):
        params = sample_perturbed_params(q, gamma, rng)
        pi = stationary(build_q(params))
        max_dev = max(max_dev, float(np.abs(pi - pib).max()))
    bound = 3 * c_cond * gamma * q
    if check and max_dev > bound + 1e-12:  # solver round-off floor
        raise RuntimeError(f"perturbation deviation {max_dev} exceeds bound {bound}")
    return max_dev, bound


def segment_comparison(type_matrix, params: ChainParams | tuple, start_state: int,
                       min_replicas: int = 200):
    """Distance between empirical type distributions and the frozen-chain forecast.

    ``type_matrix`` has one row per replica and one column per offset
    j = 0..omega; column 0 must be the shared start state.  Returns
    ``(max_l1, distances)`` with distances[j] = ||rho_hat_j - delta Q^j||_1.
    """
    T = np.asarray(type_matrix, dtype=int)
    replicas, width = T.shape
    if replicas < min_replicas:
        raise ValueError(f"insufficient replicas: {replicas} < {min_replicas}")
    if not np.all(T[:, 0] == start_state):
        raise ValueError("column 0 must equal the shared start state")
    Q = build_q(params)
    forecast = np.zeros(N_STATES)
    forecast[start_state] = 1.0
    distances = []
    for j in range(width):
        emp = np.bincount(T[:, j], minlength=N_STATES) / replicas
        distances.append(float(np.abs(emp - forecast).sum()))
        forecast = forecast @ Q
    return max(distances), distances


def colour_permutation_states(perm: dict[int, int]) -> list[int]:
    """Index permutation of the 18 states induced by a colour permutation."""
    out = [0] * N_STATES
    for k in (1, 2, 3):
        out[a_b(k)] = a_b(perm[k])
        out[a_f(k)] = a_f(perm[k])
    for r, o in _PAIRS:
        out[b_b(r, o)] = b_b(perm[r], perm[o])
        out[b_f(r, o)] = b_f(perm[r], perm[o])
    return out
