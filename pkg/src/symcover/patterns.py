"""Pattern representation of the graphs a permutation makes smaller.

A relabeling pi makes a graph smaller exactly when, for some position i,
the relabeled vector agrees with the original on positions 1..i-1, has 0
at i while the original has 1.  Unifying those equations over the edge
variables yields a *pattern*: a length-m template of constant cells and
variable classes whose instances are precisely the graphs made smaller
first at position i.  Patterns for distinct i are disjoint, so instance
counts simply add up.

Cells are printed as "0", "1" or "x<k>" where k is the smallest member
position of the variable class, e.g. "x1,1,0,x4,x5,x6".
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Union

import numpy as np

from .graphs import Graph, edge_count_of_order
from .perms import Permutation

DEFAULT_ENUM_BUDGET = 1 << 24


@dataclass(frozen=True, slots=True)
class Pattern:
    """A length-m template over {0, 1, variable class}.

    `cmask1` / `cmask0` are word masks (bit m-p for position p) of the
    constant-one / constant-zero cells.  `classes` holds the variable
    classes with two or more members as sorted tuples of 0-based
    positions; single-member classes are implicit.  `first_diff` is the
    1-based position where instances get smaller (None for parsed or
    synthetic patterns); it never takes part in equality.
    """

    order: int
    cmask1: int
    cmask0: int
    classes: tuple[tuple[int, ...], ...]
    first_diff: int | None = field(default=None, compare=False)
    class_masks: tuple[int, ...] = field(
        init=False, compare=False, repr=False, default=()
    )

    def __post_init__(self) -> None:
        m = edge_count_of_order(self.order)
        full = (1 << m) - 1
        if self.cmask1 & ~full or self.cmask0 & ~full or self.cmask1 & self.cmask0:
            raise ValueError("constant masks out of range or overlapping")
        seen = self.cmask1 | self.cmask0
        masks = []
        for cls in self.classes:
            if len(cls) < 2 or list(cls) != sorted(cls):
                raise ValueError(f"bad variable class {cls}")
            cmask = 0
            for q in cls:
                if not 0 <= q < m:
                    raise ValueError(f"class position {q} out of range")
                cmask |= 1 << (m - 1 - q)
            if cmask & seen:
                raise ValueError("variable class overlaps other cells")
            seen |= cmask
            masks.append(cmask)
        object.__setattr__(self, "class_masks", tuple(masks))

    @property
    def m(self) -> int:
        return edge_count_of_order(self.order)

    @property
    def constrained_mask(self) -> int:
        mask = self.cmask1 | self.cmask0
        for cm in self.class_masks:
            mask |= cm
        return mask

    @property
    def suffix_width(self) -> int:
        """Length of the trailing run of unconstrained single-variable cells.

        Counter bits 0..k-1 are independent free variables, so every word
        sharing the remaining high bits with an instance is an instance.
        """
        mask = self.constrained_mask
        if mask == 0:
            return self.m
        return (mask & -mask).bit_length() - 1

    @property
    def free_class_count(self) -> int:
        multi = sum(len(cls) for cls in self.classes)
        singles = self.m - bin(self.cmask1 | self.cmask0).count("1") - multi
        return singles + len(self.classes)

    def matches_word(self, word: int) -> bool:
        if (word & self.cmask1) != self.cmask1 or word & self.cmask0:
            return False
        for cm in self.class_masks:
            t = word & cm
            if t != 0 and t != cm:
                return False
        return True

    def cells(self) -> tuple[str, ...]:
        m = self.m
        rep_of = {}
        for cls in self.classes:
            for q in cls:
                rep_of[q] = cls[0]
        out = []
        for q in range(m):
            bit = 1 << (m - 1 - q)
            if self.cmask1 & bit:
                out.append("1")
            elif self.cmask0 & bit:
                out.append("0")
            else:
                out.append(f"x{rep_of.get(q, q) + 1}")
        return tuple(out)

    def text(self) -> str:
        return ",".join(self.cells())

    def __str__(self) -> str:
        return self.text()


def instance_count(pattern: Pattern) -> int:
    """Number of graphs matching the pattern: 2^(free variable classes)."""
    return 1 << pattern.free_class_count


def pattern_at(pi: Permutation, i: int) -> Pattern | None:
    """Pattern of the graphs `pi` makes smaller first at position i, or None.

    Unifies position map[j] with j for j < i, then binds map[i] to 0 and
    i to 1; None signals an unsatisfiable binding.
    """
    m = edge_count_of_order(pi.degree)
    if not 1 <= i <= m:
        raise ValueError(f"position {i} out of 1..{m}")
    pm = pi.position_map()
    parent = list(range(m))
    value: list[int | None] = [None] * m

    def find(a: int) -> int:
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    def union(a: int, b: int) -> bool:
        ra, rb = find(a), find(b)
        if ra == rb:
            return True
        if rb < ra:
            ra, rb = rb, ra
        if value[ra] is not None and value[rb] is not None and value[ra] != value[rb]:
            return False
        if value[ra] is None:
            value[ra] = value[rb]
        parent[rb] = ra
        return True

    def bind(q: int, v: int) -> bool:
        root = find(q)
        if value[root] is None:
            value[root] = v
            return True
        return value[root] == v

    for j in range(i - 1):
        if not union(pm[j] - 1, j):
            return None
    if not bind(pm[i - 1] - 1, 0) or not bind(i - 1, 1):
        return None

    cmask1 = cmask0 = 0
    groups: dict[int, list[int]] = {}
    for q in range(m):
        root = find(q)
        bit = 1 << (m - 1 - q)
        if value[root] == 1:
            cmask1 |= bit
        elif value[root] == 0:
            cmask0 |= bit
        else:
            groups.setdefault(root, []).append(q)
    classes = tuple(
        tuple(members) for _, members in sorted(groups.items()) if len(members) > 1
    )
    return Pattern(pi.degree, cmask1, cmask0, classes, first_diff=i)


@dataclass(frozen=True, slots=True)
class PatternSet:
    """Patterns of one permutation (or a merged, deduplicated collection)."""

    source: Permutation | None
    patterns: tuple[Pattern, ...]

    def __iter__(self) -> Iterator[Pattern]:
        return iter(self.patterns)

    def __len__(self) -> int:
        return len(self.patterns)


@lru_cache(maxsize=None)
def _patterns_tuple(pi: Permutation) -> tuple[Pattern, ...]:
    m = edge_count_of_order(pi.degree)
    pats = []
    for i in range(1, m + 1):
        p = pattern_at(pi, i)
        if p is not None:
            pats.append(p)
    return tuple(pats)


def patterns_of(pi: Permutation) -> PatternSet:
    """All non-empty patterns of `pi`, ascending in the first-difference position."""
    if pi.is_identity():
        warnings.warn("identity permutation covers nothing; empty pattern set")
        return PatternSet(pi, ())
    return PatternSet(pi, _patterns_tuple(pi))


PatternsLike = Union[PatternSet, Iterable[PatternSet]]


def _iter_patterns(ps: PatternsLike) -> Iterator[Pattern]:
    if isinstance(ps, PatternSet):
        yield from ps.patterns
    else:
        for sub in ps:
            yield from sub.patterns


def merge_pattern_sets(sets: Iterable[PatternSet]) -> PatternSet:
    """Union with structural deduplication, first occurrence kept."""
    seen: dict[Pattern, None] = {}
    for ps in sets:
        for p in ps.patterns:
            seen.setdefault(p)
    return PatternSet(None, tuple(seen))


def matches(pattern: Pattern, g: Graph) -> bool:
    """True iff `g` is an instance of `pattern`."""
    if pattern.order != g.order:
        raise ValueError(f"pattern order {pattern.order} != graph order {g.order}")
    return pattern.matches_word(g.word)


def covered_by_set(ps: PatternsLike, g: Graph) -> bool:
    """True iff any pattern in the set(s) matches `g`."""
    return any(matches(p, g) for p in _iter_patterns(ps))


def enumerate_instances(
    pattern: Pattern,
    predicate: Callable[[Graph], bool] | None = None,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> Iterator[Graph]:
    """All instances of `pattern` in ascending id order, optionally filtered."""
    count = instance_count(pattern)
    if count > budget:
        raise ValueError(
            f"{count} instances exceed the enumeration budget {budget}; "
            "use the SAT model enumeration instead"
        )
    m = pattern.m
    in_class = set()
    for cls in pattern.classes:
        in_class.update(cls)
    # Free dimensions keyed by representative position; weights in id space.
    dims: list[tuple[int, int]] = []
    for q in range(m):
        bit = 1 << (m - 1 - q)
        if (pattern.cmask1 | pattern.cmask0) & bit or q in in_class:
            continue
        dims.append((q, 1 << q))
    for cls in pattern.classes:
        dims.append((cls[0], sum(1 << q for q in cls)))
    dims.sort()
    base = 0
    for q in range(m):
        if pattern.cmask1 & (1 << (m - 1 - q)):
            base += 1 << q
    ids = np.full(count, base, dtype=np.uint64)
    selector = np.arange(count, dtype=np.uint64)
    for idx, (_, weight) in enumerate(dims):
        ids[((selector >> np.uint64(idx)) & np.uint64(1)) == 1] += np.uint64(weight)
    ids.sort()
    for gid in ids:
        g = Graph.from_graph_id(pattern.order, int(gid))
        if predicate is None or predicate(g):
            yield g


def parse_pattern(order: int, text: str) -> Pattern:
    """Parse the comma-separated cell form, e.g. "x1,1,0,x4,x5,x6"."""
    m = edge_count_of_order(order)
    cells = [c.strip() for c in text.split(",")]
    if len(cells) != m:
        raise ValueError(f"expected {m} cells for order {order}, got {len(cells)}")
    cmask1 = cmask0 = 0
    groups: dict[str, list[int]] = {}
    for q, cell in enumerate(cells):
        bit = 1 << (m - 1 - q)
        if cell == "1":
            cmask1 |= bit
        elif cell == "0":
            cmask0 |= bit
        elif cell.startswith("x"):
            groups.setdefault(cell, []).append(q)
        else:
            raise ValueError(f"bad pattern cell {cell!r}")
    classes = tuple(
        sorted(
            tuple(members) for members in groups.values() if len(members) > 1
        )
    )
    return Pattern(order, cmask1, cmask0, classes)
