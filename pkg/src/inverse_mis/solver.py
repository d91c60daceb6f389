"""Exact maximum independent set.

``solve_exact`` is a branch-and-reduce search: degree-0/1 removal, triangle
and domination rules, degree-2 vertex folding, connected-component splitting,
and a clique-cover upper bound for pruning. ``solve_naive`` is a plain
bitmask branch-and-bound used as an oracle.
"""

from __future__ import annotations

import enum
import itertools
import time
from dataclasses import dataclass, field

from .graph import Graph

__all__ = [
    "LoopPolicy",
    "Reduction",
    "SolveResult",
    "reduce",
    "solve_exact",
    "solve_naive",
    "verify_independent",
]

NAIVE_MAX_N = 32


class LoopPolicy(enum.Enum):
    EXCLUDE_LOOP_VERTEX = "exclude"
    IGNORE_LOOPS = "ignore"


@dataclass
class SolveResult:
    n_star: int
    witness: frozenset[int]
    nodes_explored: int
    wall_time: float
    proven: bool = True
    policy: LoopPolicy = LoopPolicy.EXCLUDE_LOOP_VERTEX

    def ratio(self, n: int) -> float:
        return self.n_star / n if n else 0.0


def verify_independent(g: Graph, s, policy: LoopPolicy = LoopPolicy.EXCLUDE_LOOP_VERTEX) -> bool:
    s = set(s)
    if any(not 0 <= v < g.n for v in s):
        return False
    if policy is LoopPolicy.EXCLUDE_LOOP_VERTEX and s & g.self_loops:
        return False
    return all(not (s & g.neighbor_set(v)) for v in s)


def _initial_adjacency(g: Graph, policy: LoopPolicy) -> dict[int, set[int]]:
    adj = {v: set(g.adjacency[v]) for v in range(g.n)}
    if policy is LoopPolicy.EXCLUDE_LOOP_VERTEX:
        for v in g.self_loops:
            _remove(adj, v)
    return adj


# ---------------------------------------------------------------------------
# naive oracle


def solve_naive(g: Graph, policy: LoopPolicy = LoopPolicy.EXCLUDE_LOOP_VERTEX) -> SolveResult:
    """Exhaustive include/exclude enumeration over bitmasks with a size cut."""
    if g.n > NAIVE_MAX_N:
        raise ValueError(f"solve_naive is limited to n <= {NAIVE_MAX_N}, got {g.n}")
    t0 = time.perf_counter()
    nbr = [0] * g.n
    for u, v in g.edges():
        nbr[u] |= 1 << v
        nbr[v] |= 1 << u
    allowed = (1 << g.n) - 1
    if policy is LoopPolicy.EXCLUDE_LOOP_VERTEX:
        for v in g.self_loops:
            allowed &= ~(1 << v)

    best_mask = 0
    best_size = 0
    nodes = 0

    def rec(cand: int, chosen: int, size: int):
        nonlocal best_mask, best_size, nodes
        nodes += 1
        if cand == 0:
            if size > best_size:
                best_size, best_mask = size, chosen
            return
        if size + cand.bit_count() <= best_size:
            return
        low = cand & -cand
        v = low.bit_length() - 1
        rec(cand & ~low & ~nbr[v], chosen | low, size + 1)
        rec(cand & ~low, chosen, size)

    rec(allowed, 0, 0)
    witness = frozenset(v for v in range(g.n) if best_mask >> v & 1)
    return SolveResult(best_size, witness, nodes, time.perf_counter() - t0, True, policy)


# ---------------------------------------------------------------------------
# reductions


def _remove(adj: dict[int, set[int]], v: int) -> None:
    for u in adj.pop(v):
        adj[u].discard(v)


def _requeue(queue: set[int], adj: dict[int, set[int]], touched) -> None:
    # domination between x and y depends on both neighbourhoods, so a change
    # at x can enable a rule anywhere within two hops
    for x in touched:
        if x in adj:
            queue.add(x)
            queue |= adj[x]


def _reduce_in_place(adj: dict[int, set[int]], log: list, fresh) -> int:
    """Apply reductions until none fires. Returns the number of vertices
    committed to the solution (folds count one each); ``log`` receives the
    entries needed by ``_unfold``."""
    gain = 0
    queue = set(adj)
    while queue:
        v = min(queue)
        queue.discard(v)
        if v not in adj:
            continue
        nv = adj[v]
        d = len(nv)
        if d == 0:
            log.append(("take", v))
            del adj[v]
            gain += 1
            continue
        if d == 1:
            (u,) = nv
            touched = adj[u] - {v}
            log.append(("take", v))
            _remove(adj, v)
            _remove(adj, u)
            _requeue(queue, adj, touched)
            gain += 1
            continue
        if d == 2:
            u, w = sorted(nv)
            if w in adj[u]:
                touched = (adj[u] | adj[w]) - {u, v, w}
                log.append(("take", v))
                for x in (v, u, w):
                    _remove(adj, x)
                _requeue(queue, adj, touched)
                gain += 1
                continue
            z = next(fresh)
            new_nbrs = (adj[u] | adj[w]) - {v, u, w}
            for x in (v, u, w):
                _remove(adj, x)
            adj[z] = set(new_nbrs)
            for x in new_nbrs:
                adj[x].add(z)
            log.append(("fold", v, u, w, z))
            _requeue(queue, adj, new_nbrs | {z})
            gain += 1
            continue
        # domination: some neighbour u with N[u] contained in N[v] means an
        # optimum exists without v
        closed = nv | {v}
        for u in sorted(nv):
            nu = adj[u]
            if len(nu) <= d and nu <= closed:
                touched = set(nv)
                _remove(adj, v)
                _requeue(queue, adj, touched)
                break
    return gain


def _unfold(solution: set[int], log: list) -> set[int]:
    s = set(solution)
    for entry in reversed(log):
        if entry[0] == "take":
            s.add(entry[1])
        else:
            _, v, u, w, z = entry
            if z in s:
                s.discard(z)
                s.add(u)
                s.add(w)
            else:
                s.add(v)
    return s


@dataclass
class Reduction:
    """Result of exhaustively applying the reduction rules to a graph.

    ``graph`` is relabelled compactly; ``labels[i]`` is the internal id of
    reduced vertex ``i`` (ids ``>= original n`` are fold vertices).
    """

    graph: Graph
    gain: int
    log: list
    labels: list[int] = field(default_factory=list)

    def unfold(self, solution) -> frozenset[int]:
        """Lift an independent set of ``graph`` to one of the original graph."""
        return frozenset(_unfold({self.labels[i] for i in solution}, self.log))


def reduce(g: Graph, policy: LoopPolicy = LoopPolicy.EXCLUDE_LOOP_VERTEX) -> Reduction:
    adj = _initial_adjacency(g, policy)
    log: list = []
    gain = _reduce_in_place(adj, log, itertools.count(g.n))
    labels = sorted(adj)
    index = {v: i for i, v in enumerate(labels)}
    reduced = Graph(len(labels), [[index[u] for u in adj[v]] for v in labels])
    return Reduction(reduced, gain, log, labels)


# ---------------------------------------------------------------------------
# branch and reduce


def _clique_cover_bound(adj: dict[int, set[int]]) -> int:
    """Size of a greedy clique cover, an upper bound on the independence number."""
    left = set(adj)
    count = 0
    for v in sorted(adj, key=lambda x: (len(adj[x]), x)):
        if v not in left:
            continue
        left.discard(v)
        clique = [v]
        for u in sorted(adj[v] & left):
            if all(u in adj[c] for c in clique[1:]):
                clique.append(u)
                left.discard(u)
        count += 1
    return count


def _components(adj: dict[int, set[int]]) -> list[list[int]]:
    seen: set[int] = set()
    comps = []
    for s in sorted(adj):
        if s in seen:
            continue
        seen.add(s)
        stack, comp = [s], []
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in adj[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        comps.append(comp)
    return comps


class _Timeout(Exception):
    pass


class _Search:
    def __init__(self, first_fresh: int, deadline: float | None):
        self.fresh = itertools.count(first_fresh)
        self.deadline = deadline
        self.nodes = 0

    def solve(self, adj: dict[int, set[int]], lb: int) -> set[int] | None:
        """Maximum independent set of ``adj`` if its size exceeds ``lb``, else None.

        ``adj`` is consumed.
        """
        self.nodes += 1
        if self.deadline is not None and self.nodes % 256 == 0 and time.perf_counter() > self.deadline:
            raise _Timeout
        log: list = []
        gain = _reduce_in_place(adj, log, self.fresh)
        lb -= gain
        if not adj:
            return _unfold(set(), log) if lb < 0 else None
        comps = _components(adj)
        if len(comps) > 1:
            sub = self._solve_components(adj, comps, lb)
        else:
            if _clique_cover_bound(adj) <= lb:
                return None
            sub = self._branch(adj, lb)
        return None if sub is None else _unfold(sub, log)

    def _solve_components(self, adj, comps, lb):
        comps.sort(key=lambda c: (len(c), c[0]))
        parts = [{v: adj[v] for v in c} for c in comps]
        bounds = [_clique_cover_bound(p) for p in parts]
        remaining = sum(bounds)
        found: set[int] = set()
        for i, part in enumerate(parts):
            remaining -= bounds[i]
            if len(found) + bounds[i] + remaining <= lb:
                return None
            if i < len(parts) - 1:
                r = self.solve(part, -1)
            else:
                r = self.solve(part, lb - len(found))
                if r is None:
                    return None
            found |= r
        return found if len(found) > lb else None

    def _branch(self, adj, lb):
        v = min(adj, key=lambda x: (-len(adj[x]), x))
        best = None
        inc = {x: set(s) for x, s in adj.items()}
        for u in list(inc[v]):
            _remove(inc, u)
        _remove(inc, v)
        r = self.solve(inc, lb - 1)
        if r is not None:
            best = r | {v}
            lb = len(best)
        _remove(adj, v)
        r = self.solve(adj, lb)
        if r is not None:
            best = r
        return best


def _greedy(adj: dict[int, set[int]]) -> set[int]:
    adj = {x: set(s) for x, s in adj.items()}
    out = set()
    while adj:
        v = min(adj, key=lambda x: (len(adj[x]), x))
        out.add(v)
        for u in list(adj[v]):
            _remove(adj, u)
        _remove(adj, v)
    return out


def solve_exact(
    g: Graph,
    policy: LoopPolicy = LoopPolicy.EXCLUDE_LOOP_VERTEX,
    budget_secs: float | None = None,
) -> SolveResult:
    """Exact independence number with a witness.

    With ``budget_secs`` set and exceeded, returns the best set known at that
    point with ``proven=False``.
    """
    t0 = time.perf_counter()
    adj = _initial_adjacency(g, policy)
    incumbent = _greedy(adj)
    search = _Search(g.n, None if budget_secs is None else t0 + budget_secs)
    try:
        found = search.solve(adj, len(incumbent) - 1)
        proven = True
    except _Timeout:
        found, proven = None, False
    witness = frozenset(found if found is not None and len(found) >= len(incumbent) else incumbent)
    return SolveResult(len(witness), witness, search.nodes, time.perf_counter() - t0, proven, policy)
