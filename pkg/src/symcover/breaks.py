"""Persisted symmetry-break artifacts: JSON break files, CNF, verification.

A break is an ordered permutation set together with its merged pattern
set.  A graph satisfies the break exactly when it matches none of the
patterns, i.e. when no listed permutation relabels it to something
smaller.  Verification counts the satisfying graphs over the whole
space; for a complete break that count must equal the number of
isomorphism classes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, TextIO

import numpy as np

from .graphs import count_canonical, edge_count_of_order
from .kernels import cover_count_full_space, cover_mask
from .patterns import Pattern, PatternSet, merge_pattern_sets, parse_pattern, patterns_of
from .perms import Permutation, parse_permutation
from .sat import EncodingContext

MAX_VERIFY_ORDER = 7
VERIFY_CHUNK_BITS = 24


@dataclass(frozen=True)
class BreakSpec:
    """A symmetry break: permutations, their patterns, and provenance."""

    order: int
    permutations: tuple[Permutation, ...]
    patterns: PatternSet
    provenance: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_permutations(
        cls,
        order: int,
        permutations: Iterable[Permutation],
        provenance: dict | None = None,
    ) -> "BreakSpec":
        perms = tuple(permutations)
        merged = merge_pattern_sets(patterns_of(pi) for pi in perms)
        return cls(order, perms, merged, provenance or {})

    def to_json(self) -> str:
        payload = {
            "order": self.order,
            "permutations": [list(pi.image) for pi in self.permutations],
            "patterns": [p.text() for p in self.patterns],
            "provenance": self.provenance,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "BreakSpec":
        payload = json.loads(text)
        order = payload["order"]
        perms = tuple(Permutation(tuple(img)) for img in payload["permutations"])
        patterns = tuple(parse_pattern(order, t) for t in payload["patterns"])
        return cls(order, perms, PatternSet(None, patterns), payload.get("provenance", {}))

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path: str) -> "BreakSpec":
        with open(path) as fh:
            return cls.from_json(fh.read())


@dataclass(frozen=True)
class CnfStats:
    variables: int
    clauses: int
    equality_vars: int


def emit_cnf(spec: BreakSpec, sink: TextIO) -> CnfStats:
    """DIMACS encoding of the break: one negation clause per pattern plus

    the four defining clauses of every equality variable used."""
    ctx = EncodingContext(spec.order)
    for p in spec.patterns:
        ctx.add_not_covered(p)
    nvars, nclauses = ctx.export_dimacs(sink)
    return CnfStats(nvars, nclauses, ctx.equality_count())


def count_break_solutions(
    order: int, patterns: Sequence[Pattern], chunk_bits: int = VERIFY_CHUNK_BITS
) -> int:
    """Graphs matching no pattern, over the whole 2^m space."""
    m = edge_count_of_order(order)
    total_words = 1 << m
    if m <= chunk_bits:
        words = np.arange(total_words, dtype=np.uint64)
        return int((~cover_mask(list(patterns), words)).sum())
    count = 0
    step = 1 << chunk_bits
    for start in range(0, total_words, step):
        words = np.arange(start, start + step, dtype=np.uint64)
        count += int((~cover_mask(list(patterns), words)).sum())
    return count


def verify_break(
    spec: BreakSpec, max_order: int = MAX_VERIFY_ORDER, long_run: bool = False
) -> int:
    """Number of graphs satisfying the break (full-space sweep)."""
    if spec.order > max_order and not long_run:
        raise ValueError(
            f"order {spec.order} needs long_run=True (2^{edge_count_of_order(spec.order)} sweep)"
        )
    return count_break_solutions(spec.order, tuple(spec.patterns))


def redundancy_ratio(perms: Sequence[Permutation], n: int, max_order: int = MAX_VERIFY_ORDER) -> Fraction:
    """(graphs not covered) / (isomorphism classes); 1 for a complete break."""
    if n > max_order:
        raise ValueError(f"order {n} exceeds counting guard {max_order}")
    m = edge_count_of_order(n)
    active = [pi for pi in perms if not pi.is_identity()]
    pats = merge_pattern_sets(patterns_of(pi) for pi in active).patterns
    covered = cover_count_full_space(n, pats)
    return Fraction((1 << m) - covered, count_canonical(n))
