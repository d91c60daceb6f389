"""Census of short odd cycles in inverse graphs.

A directed path is a word over ``+`` (x -> x+1), ``-`` (x -> x-1) and ``R``
(x -> -1/x). Each word acts on F_p as a fractional-linear map, so the start
vertices of a closed word are the roots of a quadratic congruence. Every
algebraic root is re-checked by walking the actual graph, because the graph
sends 0 to 0 under ``R`` where the map sends it to infinity.
"""

from __future__ import annotations

import csv
import enum
import io
import itertools
from collections.abc import Iterator
from dataclasses import dataclass

from .graph import Graph, InverseGraph, build_inverse_graph, inverse_step
from .numtheory import (
    AllZeroError,
    QuadKind,
    ResidueClassification,
    require_prime,
    solve_quadratic,
    squarefree_part,
)

__all__ = [
    "CensusRow",
    "CycleSequence",
    "MobiusMap",
    "WalkResult",
    "WalkStatus",
    "canonicalize",
    "census",
    "census_to_csv",
    "cycle_readings",
    "edge_labels",
    "enumerate_sequences",
    "fixed_points",
    "mobius_of",
    "simple_cycles",
    "walk",
    "walk_census",
]

SYMBOLS = "+-R"
_FORBIDDEN = {"+-", "-+", "RR"}
_SWAP = str.maketrans("+-", "-+")


def _cyclically_legal(word: str) -> bool:
    n = len(word)
    return all(word[i] + word[(i + 1) % n] not in _FORBIDDEN for i in range(n))


def _reverse_swap(word: str) -> str:
    """The same closed path traversed backwards."""
    return word[::-1].translate(_SWAP)


def canonicalize(word: str) -> str | None:
    """Least rotation (of the word or its reversal) that starts with ``+``
    and ends with ``R``, comparing with ``+ < - < R``. None when no such
    rotation exists."""
    word = word.replace("−", "-")
    best = None
    for w in (word, _reverse_swap(word)):
        for i in range(len(w)):
            r = w[i:] + w[:i]
            if r[0] == "+" and r[-1] == "R" and (best is None or r < best):
                best = r
    return best


@dataclass(frozen=True, order=True)
class CycleSequence:
    """A closed word in the normal form ``[+ ... R]``."""

    symbols: str

    def __post_init__(self):
        s = self.symbols.strip("[]").replace("−", "-")
        object.__setattr__(self, "symbols", s)
        if not s or set(s) - set(SYMBOLS):
            raise ValueError(f"bad cycle sequence {self.symbols!r}")
        if s[0] != "+" or s[-1] != "R":
            raise ValueError(f"cycle sequence must have the form [+...R], got [{s}]")
        if not _cyclically_legal(s):
            raise ValueError(f"[{s}] contains +-, -+ or RR (cyclically)")

    @property
    def length(self) -> int:
        return len(self.symbols)

    def is_canonical(self) -> bool:
        return canonicalize(self.symbols) == self.symbols

    def __str__(self):
        return f"[{self.symbols}]"

    def __len__(self):
        return len(self.symbols)


def _legal_words(length: int) -> Iterator[str]:
    """Words of the given length starting with + and ending with R, with no
    forbidden pair (the wrap-around pair R+ is always allowed)."""

    def extend(prefix: str):
        if len(prefix) == length:
            if prefix[-1] == "R":
                yield prefix
            return
        for s in SYMBOLS:
            if prefix[-1] + s not in _FORBIDDEN:
                yield from extend(prefix + s)

    yield from extend("+")


def enumerate_sequences(max_len: int) -> list[CycleSequence]:
    """Canonical cycle sequences of every odd length 3..max_len, ordered by
    length and then lexicographically."""
    if max_len < 3 or max_len % 2 == 0:
        raise ValueError(f"max_len must be odd and >= 3, got {max_len}")
    out = []
    for length in range(3, max_len + 1, 2):
        found = {w for w in _legal_words(length) if canonicalize(w) == w}
        out.extend(CycleSequence(w) for w in sorted(found))
    return out


# ---------------------------------------------------------------------------
# fractional-linear maps

_GENERATORS = {
    "+": (1, 1, 0, 1),
    "-": (1, -1, 0, 1),
    "R": (0, -1, 1, 0),
}


@dataclass(frozen=True)
class MobiusMap:
    """x -> (a x + b) / (c x + d), over the integers (``p`` None) or F_p."""

    a: int
    b: int
    c: int
    d: int
    p: int | None = None

    @property
    def det(self) -> int:
        det = self.a * self.d - self.b * self.c
        return det % self.p if self.p else det

    def then(self, other: MobiusMap) -> MobiusMap:
        """Apply ``self`` first, then ``other``."""
        a, b, c, d = other.a, other.b, other.c, other.d
        m = (
            a * self.a + b * self.c,
            a * self.b + b * self.d,
            c * self.a + d * self.c,
            c * self.b + d * self.d,
        )
        if self.p:
            m = tuple(v % self.p for v in m)
        return MobiusMap(*m, p=self.p)

    def __call__(self, x: int) -> int | None:
        """Image of ``x``; None stands for the point at infinity."""
        if self.p is None:
            raise ValueError("evaluation needs a modulus")
        num, den = (self.a * x + self.b) % self.p, (self.c * x + self.d) % self.p
        return None if den == 0 else num * pow(den, -1, self.p) % self.p

    def fixed_point_coefficients(self) -> tuple[int, int, int]:
        """(A, B, C) with A x^2 + B x + C = 0 exactly at fixed points."""
        return self.c, self.d - self.a, -self.b

    def is_identity(self) -> bool:
        coeffs = self.fixed_point_coefficients()
        return all((v % self.p if self.p else v) == 0 for v in coeffs)


def mobius_of(seq: CycleSequence | str, p: int | None = None) -> MobiusMap:
    """Compose the per-symbol maps along ``seq`` (first symbol applied first).

    Plain strings are accepted so that single generators and non-cycle
    words can be inspected too.
    """
    word = seq.symbols if isinstance(seq, CycleSequence) else seq.strip("[]").replace("−", "-")
    m = MobiusMap(1, 0, 0, 1, p)
    for s in word:
        m = m.then(MobiusMap(*_GENERATORS[s], p=p))
    return m


# ---------------------------------------------------------------------------
# walking the graph


class WalkStatus(enum.Enum):
    SIMPLE_CYCLE = "simple"
    REVISITS = "revisits"
    NOT_CLOSED = "not-closed"
    NO_EDGE = "no-edge"


@dataclass(frozen=True)
class WalkResult:
    path: tuple[int, ...]
    status: WalkStatus

    @property
    def ok(self) -> bool:
        return self.status is WalkStatus.SIMPLE_CYCLE

    @property
    def closed(self) -> bool:
        """Returns to its start along existing edges (not necessarily simple)."""
        return self.status in (WalkStatus.SIMPLE_CYCLE, WalkStatus.REVISITS)


def _step(x: int, s: str, p: int) -> int:
    if s == "+":
        return (x + 1) % p
    if s == "-":
        return (x - 1) % p
    return inverse_step(x, p)


def walk(seq: CycleSequence | str, x0: int, g: InverseGraph) -> WalkResult:
    """Follow ``seq`` from ``x0``. The path lists every visited vertex
    including the final one."""
    p = g.p
    if not 0 <= x0 < p:
        raise ValueError(f"start vertex {x0} outside 0..{p - 1}")
    word = seq.symbols if isinstance(seq, CycleSequence) else seq
    path = [x0]
    for s in word:
        y = _step(path[-1], s, p)
        if not g.has_edge(path[-1], y):
            return WalkResult(tuple(path + [y]), WalkStatus.NO_EDGE)
        path.append(y)
    if path[-1] != x0:
        return WalkResult(tuple(path), WalkStatus.NOT_CLOSED)
    if len(set(path[:-1])) != len(word):
        return WalkResult(tuple(path), WalkStatus.REVISITS)
    return WalkResult(tuple(path), WalkStatus.SIMPLE_CYCLE)


# ---------------------------------------------------------------------------
# census


@dataclass(frozen=True)
class CensusRow:
    """One canonical sequence evaluated at one prime.

    ``solutions`` are algebraic roots whose walk closes up in the graph
    (possibly re-using a vertex); ``starts`` are those tracing a simple
    cycle, and ``count`` is their number.
    """

    sequence: CycleSequence
    p: int
    classification: ResidueClassification
    normal_form: int | None
    solutions: tuple[int, ...]
    starts: tuple[int, ...]

    @property
    def count(self) -> int:
        return len(self.starts)

    @property
    def degenerate(self) -> bool:
        return self.classification.kind is QuadKind.DEGENERATE

    def congruence(self) -> str:
        if self.normal_form is not None:
            return f"y²≡{self.normal_form} mod {self.p}"
        m = mobius_of(self.sequence)
        if m.is_identity():
            return "identity"
        return "linear" if m.c == 0 else "double root"


def _normal_form(seq: CycleSequence) -> int | None:
    """Squarefree ``a`` with the fixed-point congruence equivalent to y^2 = a,
    computed over the integers; None for linear or double-root equations."""
    A, B, C = mobius_of(seq).fixed_point_coefficients()
    if A == 0:
        return None
    disc = B * B - 4 * A * C
    return None if disc == 0 else squarefree_part(disc)


def fixed_points(seq: CycleSequence, p: int, g: InverseGraph | None = None) -> CensusRow:
    require_prime(p)
    if g is None:
        g = build_inverse_graph(p)
    A, B, C = mobius_of(seq, p).fixed_point_coefficients()
    try:
        cls = solve_quadratic(A, B, C, p)
        candidates = cls.solutions
    except AllZeroError:
        # the word acts as the identity mod p; fall back to walking every vertex
        cls = ResidueClassification(QuadKind.DEGENERATE, (), all_zero=True)
        candidates = tuple(range(p))
    walks = [(x, walk(seq, x, g)) for x in candidates]
    solutions = tuple(x for x, w in walks if w.closed)
    starts = tuple(x for x, w in walks if w.ok)
    return CensusRow(seq, p, cls, _normal_form(seq), solutions, starts)


def census(p: int, max_len: int) -> list[CensusRow]:
    g = build_inverse_graph(p)
    return [fixed_points(seq, p, g) for seq in enumerate_sequences(max_len)]


def walk_census(p: int, max_len: int) -> dict[CycleSequence, tuple[int, ...]]:
    """Brute-force start vertices per canonical sequence, by walking from
    every vertex."""
    g = build_inverse_graph(p)
    return {
        seq: tuple(x for x in range(p) if walk(seq, x, g).ok)
        for seq in enumerate_sequences(max_len)
    }


def census_to_csv(rows: list[CensusRow]) -> str:
    buf = io.StringIO()
    buf.write("#schema=census-v1\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "sequence", "length", "congruence", "classification", "solutions", "count", "starts"])
    for r in rows:
        w.writerow([
            r.p,
            str(r.sequence),
            r.sequence.length,
            r.congruence(),
            r.classification.kind.value,
            len(r.solutions),
            r.count,
            " ".join(map(str, r.starts)),
        ])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# plain cycle enumeration


def simple_cycles(g: Graph, max_len: int, min_len: int = 3) -> Iterator[tuple[int, ...]]:
    """Simple cycles with ``min_len <= length <= max_len``, each reported once:
    starting at its least vertex, oriented so the second vertex is smaller
    than the last."""
    for s in range(g.n):
        path = [s]
        on_path = {s}

        def extend():
            v = path[-1]
            for u in g.adjacency[v]:
                if u == s and len(path) >= max(min_len, 3) and path[1] < path[-1]:
                    yield tuple(path)
                elif u > s and u not in on_path and len(path) < max_len:
                    path.append(u)
                    on_path.add(u)
                    yield from extend()
                    path.pop()
                    on_path.discard(u)

        yield from extend()


def edge_labels(u: int, v: int, p: int) -> str:
    """Every symbol whose move takes u to v (several when edges coincide)."""
    return "".join(s for s in SYMBOLS if _step(u, s, p) == v)


def cycle_readings(cycle: tuple[int, ...], p: int) -> set[tuple[str, int]]:
    """All ``(canonical word, start)`` pairs whose walk traces ``cycle``."""
    out = set()
    n = len(cycle)
    for seq in (list(cycle), list(reversed(cycle))):
        for i in range(n):
            rooted = seq[i:] + seq[:i]
            choices = [edge_labels(rooted[j], rooted[(j + 1) % n], p) for j in range(n)]
            for word in map("".join, itertools.product(*choices)):
                if canonicalize(word) == word:
                    out.add((word, rooted[0]))
    return out
