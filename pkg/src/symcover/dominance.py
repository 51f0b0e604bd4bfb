"""Symbolic dominance between permutations, modulo a backbone set.

A set Pi dominates a permutation pi when cover(pi) is a subset of
cover(Pi).  The test runs per pattern of the candidate: pi escapes
dominance exactly when some graph instantiates one of its patterns while
matching no pattern of Pi, which is one incremental SAT call on
notCovered(pats(Pi)) + covered(pattern).

Satisfiable calls return witness graphs.  A witness prunes every other
candidate that also covers it, so the scan over candidates needs SAT
calls only for the genuinely dominated ones plus one per witness class.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .kernels import PatternBank, cover_mask
from .patterns import Pattern, merge_pattern_sets, patterns_of
from .perms import Permutation
from .sat import EncodingContext

# Candidate sets at or below this size use plain per-candidate witness
# scans; larger sets get stacked mask arrays and per-witness vector updates.
BULK_THRESHOLD = 64


class CandidateSet:
    """Candidates with stacked patterns and per-candidate witness masks."""

    def __init__(self, perms: Sequence[Permutation]):
        self.perms = list(perms)
        self.pattern_lists = [patterns_of(p).patterns for p in self.perms]
        self.bank = PatternBank(self.pattern_lists)
        self.wit_masks = [0] * len(self.perms)

    def __len__(self) -> int:
        return len(self.perms)

    def note_witness(self, word: int, bit: int) -> None:
        covered = self.bank.covered_groups(word)
        for idx in np.nonzero(covered)[0]:
            self.wit_masks[idx] |= bit


class DominanceEngine:
    """Reusable dominance context over a fixed base dominator set."""

    def __init__(self, order: int, base: Sequence[Permutation]):
        self.order = order
        self.base = list(base)
        self.ctx = EncodingContext(order)
        self.base_patterns = merge_pattern_sets(
            patterns_of(pi) for pi in self.base
        ).patterns
        for p in self.base_patterns:
            self.ctx.add_not_covered(p)
        self.pool: list[int] = []  # witness words, none covered by the base

    def _pool_valid_mask(self, extra_patterns: Sequence[Pattern]) -> int:
        """Bitmask of pool entries not covered by the extra dominator."""
        if not self.pool:
            return 0
        if not extra_patterns:
            return (1 << len(self.pool)) - 1
        arr = np.array(self.pool, dtype=np.uint64)
        covered = cover_mask(extra_patterns, arr)
        valid = 0
        for idx in np.nonzero(~covered)[0]:
            valid |= 1 << int(idx)
        return valid

    def _begin_extra(
        self, extra_patterns: Sequence[Pattern]
    ) -> tuple[list[int], int | None]:
        if not extra_patterns:
            return [], None
        relax = self.ctx.new_var()
        for p in extra_patterns:
            self.ctx.add_not_covered(p, relax=relax)
        return [-relax], relax

    def _end_extra(self, relax: int | None) -> None:
        if relax is not None:
            # permanently satisfies the guarded group, retiring it
            self.ctx.solver.add_clause([relax])

    def _test_candidate(
        self, pats: Sequence[Pattern], base_assumptions: list[int]
    ) -> tuple[bool, int | None]:
        """(dominated?, witness word if not)."""
        for gamma in pats:
            assumptions = base_assumptions + list(self.ctx.assume_covered(gamma))
            if self.ctx.solve(assumptions):
                return False, self.ctx.model_word()
        return True, None

    def dominated_small(
        self,
        candidates: Sequence[Permutation],
        extra_patterns: Sequence[Pattern] = (),
    ) -> list[Permutation]:
        """Dominated subset of a small candidate list (pool scanned per candidate)."""
        base_assumptions, relax = self._begin_extra(extra_patterns)
        valid = self._pool_valid_mask(extra_patterns)
        out = []
        for pi in candidates:
            pats = patterns_of(pi).patterns
            pruned = False
            for idx, word in enumerate(self.pool):
                if (valid >> idx) & 1 and any(p.matches_word(word) for p in pats):
                    pruned = True
                    break
            if pruned:
                continue
            dominated, witness = self._test_candidate(pats, base_assumptions)
            if dominated:
                out.append(pi)
            else:
                valid |= 1 << len(self.pool)
                self.pool.append(witness)  # type: ignore[arg-type]
        self._end_extra(relax)
        return out

    def dominated_bulk(
        self,
        cset: CandidateSet,
        indices: Sequence[int],
        extra_patterns: Sequence[Pattern] = (),
    ) -> list[int]:
        """Dominated indices within a CandidateSet (vectorized witness pruning)."""
        base_assumptions, relax = self._begin_extra(extra_patterns)
        valid = self._pool_valid_mask(extra_patterns)
        out = []
        for i in indices:
            if cset.wit_masks[i] & valid:
                continue
            dominated, witness = self._test_candidate(
                cset.pattern_lists[i], base_assumptions
            )
            if dominated:
                out.append(i)
            else:
                bit = 1 << len(self.pool)
                self.pool.append(witness)  # type: ignore[arg-type]
                cset.note_witness(witness, bit)  # type: ignore[arg-type]
                valid |= bit
        self._end_extra(relax)
        return out


def _check_candidates(candidates: Iterable[Permutation]) -> list[Permutation]:
    out = list(candidates)
    for pi in out:
        if pi.is_identity():
            raise ValueError("identity permutation cannot be a dominance candidate")
    return out


def get_dominated(
    dominators: Iterable[Permutation], candidates: Iterable[Permutation]
) -> list[Permutation]:
    """All candidates whose cover is contained in the dominators' cover.

    Candidates are scanned in the given order; a fresh incremental context
    is seeded with the dominators' pattern negations once.
    """
    cand = _check_candidates(candidates)
    if not cand:
        return []
    order = cand[0].degree
    engine = DominanceEngine(order, list(dominators))
    if len(cand) <= BULK_THRESHOLD:
        return engine.dominated_small(cand)
    cset = CandidateSet(cand)
    dominated = engine.dominated_bulk(cset, range(len(cand)))
    return [cand[i] for i in dominated]


def refine(
    s: Iterable[Permutation],
    beta: Iterable[Permutation],
    engine: DominanceEngine | None = None,
) -> list[Permutation]:
    """Drop members of `s` dominated, modulo `beta`, by beta plus one other member.

    Repeatedly picks the smallest untested member pi (lexicographic image
    order) and removes everything dominated by beta + {pi}; the result is
    dominance-free and covers, together with beta, the same graphs as the
    input.  Members of beta never appear in the result.
    """
    beta = list(beta)
    beta_set = set(beta)
    perms = sorted(set(p for p in s if p not in beta_set))
    perms = _check_candidates(perms)
    if not perms:
        return []
    order = perms[0].degree
    if engine is None:
        engine = DominanceEngine(order, beta)

    if len(perms) <= BULK_THRESHOLD:
        alive = list(perms)
        queue = list(perms)
        while queue:
            pi = queue.pop(0)
            extra = patterns_of(pi).patterns
            removed = engine.dominated_small(
                [p for p in alive if p != pi], extra_patterns=extra
            )
            if removed:
                gone = set(removed)
                alive = [p for p in alive if p not in gone]
                queue = [p for p in queue if p not in gone]
        return alive

    cset = CandidateSet(perms)
    alive = list(range(len(perms)))
    queue = list(alive)
    alive_set = set(alive)
    while queue:
        i = queue.pop(0)
        if i not in alive_set:
            continue
        extra = cset.pattern_lists[i]
        removed = engine.dominated_bulk(
            cset, [j for j in alive if j != i], extra_patterns=extra
        )
        if removed:
            gone = set(removed)
            alive_set -= gone
            alive = [j for j in alive if j not in gone]
            queue = [j for j in queue if j not in gone]
    return [perms[i] for i in alive]
