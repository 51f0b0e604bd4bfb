"""Vertex permutations and their induced action on edge-vector positions.

Permutations are written in one-line image notation, e.g. [2,3,1] maps
1->2, 2->3, 3->1.  Enumeration of the full symmetric group is in
lexicographic order of the image sequences, which fixes every tie-break
downstream (candidate scan order, pick order, output order).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .graphs import edge_count_of_order, pair_position, position_pairs

MAX_ENUM_DEGREE = 10


@dataclass(frozen=True, slots=True)
class Permutation:
    """A bijection on {1..n}, stored as the image tuple."""

    image: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.image)
        if n < 1 or sorted(self.image) != list(range(1, n + 1)):
            raise ValueError(f"not a permutation of 1..{n}: {self.image}")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def transposition(cls, n: int, i: int, j: int) -> "Permutation":
        image = list(range(1, n + 1))
        image[i - 1], image[j - 1] = j, i
        return cls(tuple(image))

    @property
    def degree(self) -> int:
        return len(self.image)

    def __call__(self, i: int) -> int:
        return self.image[i - 1]

    def is_identity(self) -> bool:
        return all(v == i + 1 for i, v in enumerate(self.image))

    def inverse(self) -> "Permutation":
        inv = [0] * self.degree
        for i, v in enumerate(self.image):
            inv[v - 1] = i + 1
        return Permutation(tuple(inv))

    def compose(self, other: "Permutation") -> "Permutation":
        """Group operation matching nested graph actions.

        apply_perm(a, apply_perm(b, g)) == apply_perm(a.compose(b), g);
        in image terms (a.compose(b))(i) = b(a(i)).
        """
        if self.degree != other.degree:
            raise ValueError("degrees differ")
        return Permutation(tuple(other.image[v - 1] for v in self.image))

    def position_map(self) -> tuple[int, ...]:
        """Induced bijection on vector positions (1-based values).

        Entry p-1 holds the source position q with
        vec(relabeled)[p] == vec(original)[q]; the pair at p maps through
        the permutation itself, so q = pos(sorted(pi(i), pi(j))).
        """
        return _position_map(self.image)

    def __str__(self) -> str:
        return "[" + ",".join(str(v) for v in self.image) + "]"

    def __lt__(self, other: "Permutation") -> bool:
        return self.image < other.image


@lru_cache(maxsize=None)
def _position_map(image: tuple[int, ...]) -> tuple[int, ...]:
    n = len(image)
    out = []
    for i, j in position_pairs(n):
        a, b = image[i - 1], image[j - 1]
        if a > b:
            a, b = b, a
        out.append(pair_position(a, b, n))
    return tuple(out)


def parse_permutation(text: str) -> Permutation:
    """Parse one-line image notation like "[1,3,2,4]" (brackets optional)."""
    body = text.strip().strip("[]")
    if not body:
        raise ValueError(f"cannot parse permutation from {text!r}")
    try:
        image = tuple(int(part) for part in body.replace(" ", "").split(","))
    except ValueError as exc:
        raise ValueError(f"cannot parse permutation from {text!r}") from exc
    return Permutation(image)


def all_permutations(n: int) -> list[Permutation]:
    """All n! permutations in lexicographic image order, identity first."""
    if n > MAX_ENUM_DEGREE:
        raise ValueError(f"degree {n} exceeds enumeration guard {MAX_ENUM_DEGREE}")
    return [Permutation(img) for img in itertools.permutations(range(1, n + 1))]


def non_identity_permutations(n: int) -> list[Permutation]:
    return [pi for pi in all_permutations(n) if not pi.is_identity()]


def transpositions(n: int) -> list[Permutation]:
    """All n(n-1)/2 swaps of two vertices, in (i, j) lexicographic order."""
    if n < 2:
        raise ValueError("transpositions need degree >= 2")
    return [
        Permutation.transposition(n, i, j)
        for i in range(1, n + 1)
        for j in range(i + 1, n + 1)
    ]


def position_map_degree(n: int) -> int:
    return edge_count_of_order(n)
