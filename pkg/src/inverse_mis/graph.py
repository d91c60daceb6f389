"""Undirected simple graphs (with self-loops tracked apart), the inverse graph
construction, and DIMACS / JSON serialisation."""

from __future__ import annotations

import json
from collections.abc import Iterable, Iterator

from .numtheory import mod_inverse, require_prime

__all__ = [
    "DimacsParseError",
    "DimacsRangeError",
    "Graph",
    "InverseGraph",
    "build_inverse_graph",
    "from_dimacs",
    "from_json",
    "inverse_step",
    "to_dimacs",
    "to_json",
]


class DimacsParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


class DimacsRangeError(DimacsParseError):
    pass


class Graph:
    """Immutable undirected graph on vertices ``0..n-1``.

    ``adjacency[v]`` is the sorted tuple of neighbours of ``v`` excluding
    ``v`` itself; self-loops live in ``self_loops``.
    """

    __slots__ = ("n", "adjacency", "self_loops", "_nbr_sets")

    def __init__(self, n: int, adjacency: Iterable[Iterable[int]], self_loops: Iterable[int] = ()):
        adj = tuple(tuple(sorted(set(a))) for a in adjacency)
        if len(adj) != n:
            raise ValueError(f"adjacency has {len(adj)} rows, expected {n}")
        loops = frozenset(self_loops)
        for v, row in enumerate(adj):
            for u in row:
                if not 0 <= u < n:
                    raise ValueError(f"neighbour {u} of {v} out of range")
                if u == v:
                    raise ValueError(f"vertex {v} listed in its own adjacency")
        sets = tuple(frozenset(r) for r in adj)
        for v, row in enumerate(adj):
            for u in row:
                if v not in sets[u]:
                    raise ValueError(f"adjacency not symmetric at ({v}, {u})")
        if any(not 0 <= v < n for v in loops):
            raise ValueError("self-loop vertex out of range")
        self.n = n
        self.adjacency = adj
        self.self_loops = loops
        self._nbr_sets = sets

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        """Build from an edge list; duplicates collapse, ``(v, v)`` becomes a self-loop."""
        nbrs: list[set[int]] = [set() for _ in range(n)]
        loops = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                loops.add(u)
            else:
                nbrs[u].add(v)
                nbrs[v].add(u)
        return cls(n, nbrs, loops)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def neighbor_set(self, v: int) -> frozenset[int]:
        return self._nbr_sets[v]

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return u in self.self_loops
        return v in self._nbr_sets[u]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adjacency]

    def max_degree(self) -> int:
        return max(self.degrees(), default=0)

    def edges(self) -> Iterator[tuple[int, int]]:
        """Non-loop edges as ``(u, v)`` with ``u < v``, in lexicographic order."""
        for u, row in enumerate(self.adjacency):
            for v in row:
                if u < v:
                    yield u, v

    @property
    def n_edges(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def is_regular(self) -> bool:
        return len(set(self.degrees())) <= 1

    def subgraph_without(self, removed: Iterable[int]) -> Graph:
        """Graph with ``removed`` vertices deleted and the rest relabelled in order."""
        gone = set(removed)
        keep = [v for v in range(self.n) if v not in gone]
        index = {v: i for i, v in enumerate(keep)}
        adj = [[index[u] for u in self.adjacency[v] if u in index] for v in keep]
        return Graph(len(keep), adj, (index[v] for v in self.self_loops if v in index))

    def _key(self):
        return self.n, self.adjacency, self.self_loops

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, m={self.n_edges}, loops={sorted(self.self_loops)})"


class InverseGraph(Graph):
    """Graph on F_p with x adjacent to x+1, x-1 and -1/x (0^-1 taken as 0)."""

    __slots__ = ("p",)

    def __init__(self, p: int, adjacency, self_loops):
        super().__init__(p, adjacency, self_loops)
        self.p = p

    def __repr__(self):
        return f"InverseGraph(p={self.p}, m={self.n_edges})"


def inverse_step(x: int, p: int) -> int:
    """The R move: x -> -x^-1 mod p, with 0 -> 0."""
    return 0 if x % p == 0 else (-mod_inverse(x, p)) % p


def build_inverse_graph(p: int) -> InverseGraph:
    require_prime(p)
    nbrs: list[set[int]] = [set() for _ in range(p)]
    for x in range(p):
        for y in ((x + 1) % p, (x - 1) % p, inverse_step(x, p)):
            # R-fixed points (x^2 = -1) simply lose their third edge
            if y != x:
                nbrs[x].add(y)
                nbrs[y].add(x)
    return InverseGraph(p, nbrs, {0})


def to_dimacs(g: Graph, comment: str | None = None) -> str:
    """DIMACS edge format, 1-based, self-loops written as ``e v v``."""
    edges = sorted(list(g.edges()) + [(v, v) for v in g.self_loops])
    lines = []
    if comment:
        lines.extend(f"c {c}" for c in comment.splitlines())
    lines.append(f"p edge {g.n} {len(edges)}")
    lines.extend(f"e {u + 1} {v + 1}" for u, v in edges)
    return "\n".join(lines) + "\n"


def from_dimacs(text: str) -> Graph:
    n = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] == "c":
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None:
                raise DimacsParseError(lineno, "duplicate problem line")
            if len(parts) != 4 or parts[1] not in ("edge", "col"):
                raise DimacsParseError(lineno, f"bad problem line {line!r}")
            try:
                n, _ = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsParseError(lineno, f"bad problem line {line!r}") from None
            if n < 0:
                raise DimacsParseError(lineno, "negative vertex count")
        elif parts[0] == "e":
            if n is None:
                raise DimacsParseError(lineno, "edge before problem line")
            if len(parts) != 3:
                raise DimacsParseError(lineno, f"bad edge line {line!r}")
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise DimacsParseError(lineno, f"bad edge line {line!r}") from None
            for w in (u, v):
                if not 1 <= w <= n:
                    raise DimacsRangeError(lineno, f"vertex {w} outside 1..{n}")
            edges.append((u - 1, v - 1))
        else:
            raise DimacsParseError(lineno, f"unrecognised line {line!r}")
    if n is None:
        raise DimacsParseError(0, "missing problem line")
    return Graph.from_edges(n, edges)


def to_json(g: Graph) -> str:
    doc = {
        "n": g.n,
        "adjacency": [list(a) for a in g.adjacency],
        "self_loops": sorted(g.self_loops),
    }
    if isinstance(g, InverseGraph):
        doc["p"] = g.p
    return json.dumps(doc, sort_keys=True)


def from_json(text: str) -> Graph:
    doc = json.loads(text)
    return Graph(doc["n"], doc["adjacency"], doc.get("self_loops", ()))
