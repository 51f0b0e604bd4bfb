"""Simple graphs as packed upper-triangle edge vectors.

An order-n graph has m = n(n-1)/2 potential edges.  Edge positions p in
1..m enumerate the vertex pairs (1,2),(1,3),...,(1,n),(2,3),...,(n-1,n),
i.e. the rows of the upper triangle of the adjacency matrix.

Internally a graph is one machine word whose bit (m - p) carries the
edge value at position p.  With that layout the integer order of words
coincides with the lexicographic order of edge vectors (position 1 is
most significant) and counting words upward walks the graphs in
ascending order.  The decimal *id* of a graph uses the reversed layout,
bit (p - 1) for position p; ids are the stable external names printed in
output and break files.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING, Iterator

if TYPE_CHECKING:
    from .perms import Permutation

LESS, EQUAL, GREATER = -1, 0, 1

# Brute-force guards; loops are factorial / exponential in these.
MAX_BRUTEFORCE_ORDER = 8
MAX_COUNT_ORDER = 7


def edge_count_of_order(n: int) -> int:
    """Number of vertex pairs m = n(n-1)/2."""
    if n < 1:
        raise ValueError(f"graph order must be >= 1, got {n}")
    return n * (n - 1) // 2


def pair_position(i: int, j: int, n: int) -> int:
    """1-based vector position of the pair (i, j) with 1 <= i < j <= n."""
    if not (1 <= i < j <= n):
        raise ValueError(f"need 1 <= i < j <= n, got i={i} j={j} n={n}")
    return (i - 1) * n - i * (i + 1) // 2 + j


@lru_cache(maxsize=None)
def position_pairs(n: int) -> tuple[tuple[int, int], ...]:
    """All pairs (i, j) indexed by position - 1."""
    return tuple((i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1))


def reverse_bits(value: int, width: int) -> int:
    """Reverse the low `width` bits of `value`."""
    out = 0
    for _ in range(width):
        out = (out << 1) | (value & 1)
        value >>= 1
    return out


@dataclass(frozen=True, slots=True)
class Graph:
    """An order-n simple graph packed into a single word (see module doc)."""

    order: int
    word: int

    def __post_init__(self) -> None:
        m = edge_count_of_order(self.order)
        if not 0 <= self.word < (1 << m):
            raise ValueError(f"word {self.word} out of range for order {self.order}")

    @classmethod
    def empty(cls, order: int) -> "Graph":
        return cls(order, 0)

    @classmethod
    def complete(cls, order: int) -> "Graph":
        return cls(order, (1 << edge_count_of_order(order)) - 1)

    @classmethod
    def from_bits(cls, order: int, bits: Iterator[int]) -> "Graph":
        """Build from the edge vector, position 1 first."""
        m = edge_count_of_order(order)
        seq = tuple(bits)
        if len(seq) != m:
            raise ValueError(f"expected {m} bits for order {order}, got {len(seq)}")
        word = 0
        for b in seq:
            word = (word << 1) | (1 if b else 0)
        return cls(order, word)

    @classmethod
    def from_graph_id(cls, order: int, gid: int) -> "Graph":
        m = edge_count_of_order(order)
        if not 0 <= gid < (1 << m):
            raise ValueError(f"graph id {gid} out of range for order {order}")
        return cls(order, reverse_bits(gid, m))

    @property
    def m(self) -> int:
        return edge_count_of_order(self.order)

    @property
    def graph_id(self) -> int:
        """Decimal name: edge vector read with position 1 as least significant bit."""
        return reverse_bits(self.word, self.m)

    def bit(self, position: int) -> int:
        """Edge value at 1-based vector position."""
        m = self.m
        if not 1 <= position <= m:
            raise ValueError(f"position {position} out of 1..{m}")
        return (self.word >> (m - position)) & 1

    def bits(self) -> tuple[int, ...]:
        m = self.m
        return tuple((self.word >> (m - p)) & 1 for p in range(1, m + 1))

    def vec_string(self) -> str:
        """0/1 edge vector, position 1 leftmost."""
        return format(self.word, f"0{self.m}b") if self.m else ""

    def edge_count(self) -> int:
        return bin(self.word).count("1")

    def has_edge(self, i: int, j: int) -> bool:
        if i == j:
            return False
        if i > j:
            i, j = j, i
        return bool(self.bit(pair_position(i, j, self.order)))

    def __lt__(self, other: "Graph") -> bool:
        _check_same_order(self, other)
        return self.word < other.word

    def __le__(self, other: "Graph") -> bool:
        _check_same_order(self, other)
        return self.word <= other.word

    def __repr__(self) -> str:
        return f"Graph(order={self.order}, id={self.graph_id})"


def _check_same_order(a: Graph, b: Graph) -> None:
    if a.order != b.order:
        raise ValueError(f"graph orders differ: {a.order} vs {b.order}")


def vec_compare(a: Graph, b: Graph) -> int:
    """Lexicographic comparison of edge vectors, position 1 decides first.

    Returns LESS (-1), EQUAL (0) or GREATER (1).
    """
    _check_same_order(a, b)
    if a.word == b.word:
        return EQUAL
    return LESS if a.word < b.word else GREATER


def increment(g: Graph) -> Graph:
    """Next graph in ascending vector order; raises OverflowError past all-ones."""
    limit = (1 << g.m) - 1
    if g.word >= limit:
        raise OverflowError("increment past the complete graph")
    return Graph(g.order, g.word + 1)


def all_graphs(order: int) -> Iterator[Graph]:
    """All 2^m graphs in ascending vector order."""
    for word in range(1 << edge_count_of_order(order)):
        yield Graph(order, word)


def apply_perm(pi: "Permutation", g: Graph) -> Graph:
    """Relabel vertices: the output edge at (i, j) is the input edge at (pi(i), pi(j))."""
    if pi.degree != g.order:
        raise ValueError(f"permutation degree {pi.degree} != graph order {g.order}")
    m = g.m
    pm = pi.position_map()
    word = g.word
    out = 0
    for p in range(1, m + 1):
        out |= ((word >> (m - pm[p - 1])) & 1) << (m - p)
    return Graph(g.order, out)


def is_canonical_bruteforce(g: Graph, max_order: int = MAX_BRUTEFORCE_ORDER) -> bool:
    """True iff no vertex relabeling yields a lexicographically smaller graph.

    Scans all order! permutations; guarded to small orders.
    """
    if g.order > max_order:
        raise ValueError(f"order {g.order} exceeds brute-force guard {max_order}")
    from .perms import all_permutations

    m = g.m
    word = g.word
    for pi in all_permutations(g.order):
        pm = pi.position_map()
        out = 0
        for p in range(1, m + 1):
            out |= ((word >> (m - pm[p - 1])) & 1) << (m - p)
        if out < word:
            return False
    return True


def count_canonical(n: int, max_order: int = MAX_COUNT_ORDER) -> int:
    """Number of canonical graphs of order n (= number of isomorphism classes).

    Enumerates the full 2^m space; guarded to small orders.
    """
    if n > max_order:
        raise ValueError(f"order {n} exceeds enumeration guard {max_order}")
    from .kernels import canonical_count

    return canonical_count(n)


def canonical_graph_ids(n: int, max_order: int = MAX_COUNT_ORDER) -> list[int]:
    """Sorted ids of all canonical graphs of order n."""
    if n > max_order:
        raise ValueError(f"order {n} exceeds enumeration guard {max_order}")
    from .kernels import canonical_words

    ids = sorted(Graph(n, int(w)).graph_id for w in canonical_words(n))
    return ids
