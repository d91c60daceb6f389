"""Cycle-chain refutation: certificates, their verification and search, and
the closed-form lower bound on the best bound any certificate can achieve on
an inverse graph."""

from __future__ import annotations

import itertools
import json
import math
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .graph import Graph, InverseGraph
from .numtheory import require_prime

__all__ = [
    "Certificate",
    "CertificateError",
    "EvenCycleError",
    "InvalidPieceError",
    "NonEdgeError",
    "NonUniformCoverageError",
    "RefutationBound",
    "a_of",
    "b_of",
    "bound_from_counts",
    "choose_kprime",
    "ncc_lower_bound",
    "p_threshold",
    "search_certificate",
    "trivial_certificate",
    "verify_certificate",
]

EXHAUSTIVE_MAX_N = 20
MAX_PIECES = 20000


class CertificateError(ValueError):
    pass


class NonEdgeError(CertificateError):
    def __init__(self, piece, u: int, v: int):
        super().__init__(f"{piece!r}: ({u}, {v}) is not an edge")
        self.piece, self.edge = piece, (u, v)


class NonUniformCoverageError(CertificateError):
    def __init__(self, vertex: int, coverage: int, m: int):
        super().__init__(f"vertex {vertex} covered {coverage} times, expected {m}")
        self.vertex, self.coverage, self.m = vertex, coverage, m


class EvenCycleError(CertificateError):
    """Even cycles must be split into chains before submission."""


class InvalidPieceError(CertificateError):
    pass


@dataclass(frozen=True)
class Certificate:
    odd_cycles: tuple[tuple[int, ...], ...] = ()
    chains: tuple[tuple[int, int], ...] = ()
    singles: tuple[int, ...] = ()
    m: int = 1

    def __post_init__(self):
        object.__setattr__(self, "odd_cycles", tuple(tuple(c) for c in self.odd_cycles))
        object.__setattr__(self, "chains", tuple(tuple(c) for c in self.chains))
        object.__setattr__(self, "singles", tuple(self.singles))

    def to_json(self) -> str:
        return json.dumps(
            {
                "m": self.m,
                "odd_cycles": [list(c) for c in self.odd_cycles],
                "chains": [list(c) for c in self.chains],
                "singles": list(self.singles),
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> Certificate:
        doc = json.loads(text)
        return cls(
            odd_cycles=doc.get("odd_cycles", []),
            chains=doc.get("chains", []),
            singles=doc.get("singles", []),
            m=int(doc["m"]),
        )


@dataclass(frozen=True)
class RefutationBound:
    """Upper bound floor(numerator / denominator * n) on the independence number."""

    numerator: int
    denominator: int
    n: int

    @property
    def ratio(self) -> Fraction:
        """The unfloored bound as an exact rational."""
        return Fraction(self.numerator * self.n, self.denominator)

    @property
    def bound(self) -> int:
        return math.floor(self.ratio)


def bound_from_counts(odd_counts: dict[int, int], n_chains: int, n_singles: int, n: int) -> RefutationBound:
    """Bound from piece counts alone; ``odd_counts`` maps cycle length to count."""
    num = den = 0
    for length, count in odd_counts.items():
        if length < 3 or length % 2 == 0:
            raise EvenCycleError(f"cycle length {length} is not odd")
        num += (length // 2) * count
        den += length * count
    num += n_chains + n_singles
    den += 2 * n_chains + n_singles
    if den == 0:
        raise CertificateError("empty certificate")
    return RefutationBound(num, den, n)


def verify_certificate(g: Graph, cert: Certificate) -> RefutationBound:
    if cert.m < 1:
        raise CertificateError(f"multiplicity must be positive, got {cert.m}")
    cover = Counter()

    def check_vertex(v, piece):
        if not (isinstance(v, int) and 0 <= v < g.n):
            raise InvalidPieceError(f"{piece!r}: vertex {v!r} out of range")

    for cyc in cert.odd_cycles:
        for v in cyc:
            check_vertex(v, cyc)
        if len(cyc) % 2 == 0:
            raise EvenCycleError(f"{cyc!r} has even length {len(cyc)}")
        if len(cyc) < 3:
            raise InvalidPieceError(f"{cyc!r} is too short to be a cycle")
        if len(set(cyc)) != len(cyc):
            raise InvalidPieceError(f"{cyc!r} repeats a vertex")
        for i, u in enumerate(cyc):
            w = cyc[(i + 1) % len(cyc)]
            if not g.has_edge(u, w):
                raise NonEdgeError(cyc, u, w)
        cover.update(cyc)
    for chain in cert.chains:
        if len(chain) != 2:
            raise InvalidPieceError(f"chain {chain!r} must have two vertices")
        u, w = chain
        check_vertex(u, chain)
        check_vertex(w, chain)
        if u == w or not g.has_edge(u, w):
            raise NonEdgeError(chain, u, w)
        cover.update(chain)
    for v in cert.singles:
        check_vertex(v, v)
        cover[v] += 1
    for v in range(g.n):
        if cover[v] != cert.m:
            raise NonUniformCoverageError(v, cover[v], cert.m)

    odd_counts = Counter(len(c) for c in cert.odd_cycles)
    bound = bound_from_counts(odd_counts, len(cert.chains), len(cert.singles), g.n)
    if bound.denominator != cert.m * g.n:
        raise CertificateError("internal coverage mismatch")
    return bound


def trivial_certificate(g: Graph) -> Certificate:
    return Certificate(singles=tuple(range(g.n)), m=1)


# ---------------------------------------------------------------------------
# search


def _odd_cycles(g: Graph, len_max: int, limit: int | None = None) -> tuple[list[tuple[int, ...]], bool]:
    """Odd simple cycles up to ``len_max``, shortest first, and whether the
    list was cut off at ``limit``."""
    if isinstance(g, InverseGraph) and len_max < g.p:
        from .cycle_census import census, walk

        seen = set()
        out = []
        for row in census(g.p, len_max):
            for x in row.starts:
                cyc = walk(row.sequence, x, g).path[:-1]
                key = frozenset(cyc)
                if key not in seen:
                    seen.add(key)
                    out.append(cyc)
        return sorted(out, key=lambda c: (len(c), sorted(c))), False
    from .cycle_census import simple_cycles

    odd = (c for c in simple_cycles(g, len_max) if len(c) % 2)
    out = list(itertools.islice(odd, limit + 1)) if limit is not None else list(odd)
    truncated = limit is not None and len(out) > limit
    return sorted(out[:limit], key=lambda c: (len(c), c)), truncated


def _milp_cover(g: Graph, pieces, weights, m: int, time_limit: float | None):
    from scipy.optimize import Bounds, LinearConstraint, milp

    a = np.zeros((g.n, len(pieces)))
    for j, piece in enumerate(pieces):
        for v in piece:
            a[v, j] += 1
    options = {} if time_limit is None else {"time_limit": max(time_limit, 0.1)}
    res = milp(
        np.asarray(weights, dtype=float),
        constraints=LinearConstraint(a, m, m),
        integrality=np.ones(len(pieces)),
        bounds=Bounds(0, m),
        options=options,
    )
    if res.x is None:
        return None
    return [int(round(x)) for x in res.x]


def _greedy_certificate(g: Graph, len_max: int) -> Certificate:
    import networkx as nx

    used: set[int] = set()
    cycles = []
    cycles_found, _ = _odd_cycles(g, len_max, MAX_PIECES)
    for cyc in cycles_found:
        if used.isdisjoint(cyc):
            cycles.append(cyc)
            used.update(cyc)
    rest = nx.Graph()
    rest.add_nodes_from(v for v in range(g.n) if v not in used)
    rest.add_edges_from((u, v) for u, v in g.edges() if u not in used and v not in used)
    matching = sorted(tuple(sorted(e)) for e in nx.max_weight_matching(rest, maxcardinality=True))
    matched = {v for e in matching for v in e}
    singles = [v for v in sorted(rest.nodes) if v not in matched]
    return Certificate(tuple(cycles), tuple(matching), tuple(singles), 1)


@dataclass
class SearchResult:
    certificate: Certificate
    bound: RefutationBound
    exhaustive: bool
    notes: list[str] = field(default_factory=list)


def search_certificate(
    g: Graph,
    m_max: int = 2,
    len_max: int = 9,
    budget_secs: float | None = None,
) -> SearchResult:
    """Find a certificate with a small bound.

    Graphs with at most 20 vertices are solved as an integer program over all
    odd cycles up to ``len_max``, chains and singles, for each multiplicity
    up to ``m_max``. Larger graphs get a greedy cover: vertex-disjoint short
    odd cycles, then a maximum matching, then singles.
    """
    t0 = time.perf_counter()
    best = trivial_certificate(g)
    best_bound = verify_certificate(g, best)
    notes = []
    exhaustive = False

    def consider(cert):
        nonlocal best, best_bound
        b = verify_certificate(g, cert)
        if (b.bound, b.ratio, cert.m) < (best_bound.bound, best_bound.ratio, best.m):
            best, best_bound = cert, b

    if g.n <= EXHAUSTIVE_MAX_N:
        cycles, truncated = _odd_cycles(g, len_max, MAX_PIECES)
        chains = list(g.edges())
        if truncated or len(cycles) + len(chains) + g.n > MAX_PIECES:
            notes.append("too many pieces for exact search; used greedy cover")
        else:
            exhaustive = True
            pieces = cycles + chains + [(v,) for v in range(g.n)]
            weights = [len(c) // 2 for c in cycles] + [1] * len(chains) + [1] * g.n
            for m in range(1, m_max + 1):
                remaining = None if budget_secs is None else budget_secs - (time.perf_counter() - t0)
                if remaining is not None and remaining <= 0:
                    exhaustive = False
                    notes.append(f"budget exhausted before m={m}")
                    break
                counts = _milp_cover(g, pieces, weights, m, remaining)
                if counts is None:
                    exhaustive = False
                    notes.append(f"integer program gave no solution for m={m}")
                    continue
                chosen = [(pieces[j], k) for j, k in enumerate(counts) for _ in range(k)]
                consider(Certificate(
                    odd_cycles=[p for p, _ in chosen if len(p) >= 3],
                    chains=[p for p, _ in chosen if len(p) == 2],
                    singles=[p[0] for p, _ in chosen if len(p) == 1],
                    m=m,
                ))
    if not exhaustive:
        consider(_greedy_certificate(g, len_max))
    return SearchResult(best, best_bound, exhaustive, notes)


# ---------------------------------------------------------------------------
# analytic bounds


def a_of(kp: int) -> int:
    """Most vertices that odd cycles shorter than 2*kp can cover in an inverse graph."""
    if kp < 1:
        raise ValueError("kp must be >= 1")
    return sum((2 * k + 1) * 4**k for k in range(1, kp))


def b_of(kp: int) -> int:
    if kp < 1:
        raise ValueError("kp must be >= 1")
    return sum(k * 4**k for k in range(1, kp))


def _as_fraction(eps) -> Fraction:
    if isinstance(eps, float):
        return Fraction(repr(eps))
    return Fraction(eps)


def choose_kprime(eps) -> int:
    """Least kp >= 1 with kp >= (1/eps - 1) / 2."""
    e = _as_fraction(eps)
    if not 0 < e < Fraction(1, 2):
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    return max(1, math.ceil((1 / e - 1) / 2))


def p_threshold(eps) -> int:
    """Size beyond which the certificate ratio provably exceeds 1/2 - eps."""
    e = _as_fraction(eps)
    kp = choose_kprime(e)
    a, b = a_of(kp), b_of(kp)
    return math.ceil(a + (a - 2 * b + 2) / e)


def ncc_lower_bound(p: int, kp: int) -> Fraction:
    """Lower bound on the best cycle-chain bound for the inverse graph on p vertices.

    Worst case: a(kp) vertices on short odd cycles, the rest on cycles of
    length 2*kp + 1, minus one for the floor.
    """
    require_prime(p)
    a = a_of(kp)
    if p <= a:
        raise ValueError(f"p={p} must exceed a({kp})={a}")
    return b_of(kp) + Fraction(kp * (p - a), 2 * kp + 1) - 1
