"""Backbone permutations: sole coverers that belong in every optimal break.

Two detection routes.  The iterative route sweeps all graphs in
ascending vector order, asking for each uncovered graph whether exactly
one dominance-free permutation covers it; three "leap" rules skip whole
suffix blocks (covered by a backbone pattern with a free suffix,
canonical with a stable zero suffix, or hugely covered with a stable
zero suffix).  The SAT route tests one permutation at a time: pi is a
backbone within a universe iff the rest of the universe does not
dominate it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .dominance import DominanceEngine, get_dominated, refine
from .graphs import Graph, edge_count_of_order
from .kernels import PatternBank, perm_action_bank
from .patterns import patterns_of
from .perms import Permutation
from .sat import EncodingContext

MAX_SWEEP_ORDER = 8
DEFAULT_BOUND = 10
DEFAULT_LEAP_CAP = 4


@dataclass(frozen=True, slots=True)
class CoveringPerms:
    """Permutations covering one graph, possibly cut off at a bound."""

    perms: tuple[Permutation, ...]
    truncated: bool


def covering_perms(
    g: Graph, bound: int | None = None, max_order: int = MAX_SWEEP_ORDER
) -> CoveringPerms:
    """Non-identity permutations mapping `g` to a smaller graph.

    With a bound, enumeration stops once `bound` coverers are found and
    the result is marked truncated.
    """
    if g.order > max_order:
        raise ValueError(f"order {g.order} exceeds sweep guard {max_order}")
    bank = perm_action_bank(g.order)
    indices = bank.covering_indices(g.word)
    if bound is not None and len(indices) >= bound:
        return CoveringPerms(
            tuple(bank.perms[i] for i in indices[:bound]), truncated=True
        )
    return CoveringPerms(tuple(bank.perms[i] for i in indices), truncated=False)


@dataclass(frozen=True, slots=True)
class BackboneStatus:
    """Outcome of inspecting one graph during the sweep."""

    kind: str  # backbone | canonical | covered | many | ambiguous
    perms: tuple[Permutation, ...] = ()


@dataclass(slots=True)
class SweepStats:
    visited: int = 0
    leap1: int = 0
    leap2: int = 0
    leap3: int = 0
    covered_steps: int = 0
    canonical: int = 0
    many: int = 0
    ambiguous: int = 0
    covered_modulo: int = 0

    def as_dict(self) -> dict[str, int]:
        return {
            "visited": self.visited,
            "leap1": self.leap1,
            "leap2": self.leap2,
            "leap3": self.leap3,
            "covered_steps": self.covered_steps,
            "canonical": self.canonical,
            "many": self.many,
            "ambiguous": self.ambiguous,
            "covered_modulo": self.covered_modulo,
        }


@dataclass(slots=True)
class BackboneState:
    order: int
    bound: int
    beta: list[Permutation] = field(default_factory=list)
    stats: SweepStats = field(default_factory=SweepStats)
    complete: bool = True


class IterativeBackboneSearch:
    """Single sweep over all graphs of one order (see module doc)."""

    def __init__(
        self,
        n: int,
        bound: int = DEFAULT_BOUND,
        debug_rescan: bool = False,
        progress: Callable[[dict], None] | None = None,
        progress_every: int = 1 << 14,
        max_visits: int | None = None,
        leap_cap: int | None = None,
    ):
        if n > MAX_SWEEP_ORDER:
            raise ValueError(f"order {n} exceeds sweep guard {MAX_SWEEP_ORDER}")
        if bound < 1:
            raise ValueError("bound must be >= 1")
        self.n = n
        self.m = edge_count_of_order(n)
        self.bound = bound
        self.debug_rescan = debug_rescan
        self.progress = progress
        self.progress_every = progress_every
        self.max_visits = max_visits
        # Suffix-leap window cap: single-flip digit checks certify only
        # narrow blocks reliably; wider windows skip backbone graphs.
        self.leap_cap = DEFAULT_LEAP_CAP if leap_cap is None else leap_cap
        self.action = perm_action_bank(n)
        self.state = BackboneState(order=n, bound=bound)
        self._beta_bank = PatternBank([])
        self._engine = DominanceEngine(n, [])

    # -- status ----------------------------------------------------------

    def status_word(self, word: int) -> BackboneStatus:
        """Status of one graph assumed not covered by the current backbones."""
        indices = self.action.covering_indices(word)
        if len(indices) == 0:
            return BackboneStatus("canonical")
        if len(indices) >= self.bound:
            return BackboneStatus("many")
        coverers = [self.action.perms[i] for i in indices]
        survivors = refine(coverers, self.state.beta, engine=self._engine)
        if len(survivors) == 1:
            return BackboneStatus("backbone", tuple(survivors))
        if not survivors:
            return BackboneStatus("covered")
        return BackboneStatus("ambiguous", tuple(survivors))

    def _add_backbone(self, pi: Permutation) -> None:
        self.state.beta.append(pi)
        self._beta_bank = PatternBank(
            [patterns_of(p).patterns for p in self.state.beta]
        )
        new_pats = patterns_of(pi).patterns
        pool = [
            w
            for w in self._engine.pool
            if not any(p.matches_word(w) for p in new_pats)
        ]
        self._engine = DominanceEngine(self.n, self.state.beta)
        self._engine.pool = pool
        if self.progress is not None:
            self.progress(
                {"event": "backbone", "perm": str(pi), "beta": len(self.state.beta)}
            )

    # -- leap helpers ------------------------------------------------------

    def _is_canonical_word(self, word: int) -> bool:
        return len(self.action.covering_indices(word)) == 0

    def _is_many_word(self, word: int) -> bool:
        return self.action.covering_count_at_least(word, self.bound)

    def _leap_from(self, word: int, predicate: Callable[[int], bool]) -> int | None:
        """Target word after a suffix leap, or None when a digit check fails.

        `word` ends in k zero suffix positions (k capped by the leap
        window); the leap skips the 2^k block when flipping any single
        suffix zero keeps the predicate true.
        """
        tz = (word & -word).bit_length() - 1 if word else self.m
        k = min(tz, self.leap_cap)
        if k <= 0:
            return None
        for j in range(k):
            if not predicate(word | (1 << j)):
                return None
        return word + (1 << k)

    def _rescan_block(self, start: int, stop: int, leap_kind: str) -> None:
        """Debug re-scan of skipped words: no backbone may hide in a leap."""
        for w in range(start, stop):
            if leap_kind == "leap1":
                if not self._beta_bank.covers_word(w):
                    raise AssertionError(f"leap1 skipped uncovered word {w}")
                continue
            if self.state.beta and self._beta_bank.covers_word(w):
                continue
            status = self.status_word(w)
            if status.kind == "backbone":
                raise AssertionError(f"{leap_kind} skipped backbone word {w}")

    # -- sweep --------------------------------------------------------------

    def run(self) -> BackboneState:
        limit = 1 << self.m
        state = self.state
        stats = state.stats
        word = 0
        while word < limit:
            if self.max_visits is not None and stats.visited >= self.max_visits:
                state.complete = False
                break
            stats.visited += 1
            if (
                self.progress is not None
                and stats.visited % self.progress_every == 0
            ):
                self.progress(
                    {
                        "event": "progress",
                        "word": word,
                        "beta": len(state.beta),
                        **stats.as_dict(),
                    }
                )
            if state.beta:
                k = self._beta_bank.max_matching_suffix_width(word)
                if k >= 0:
                    nxt = ((word >> k) + 1) << k
                    if k > 0:
                        stats.leap1 += 1
                        if self.debug_rescan:
                            self._rescan_block(word + 1, nxt, "leap1")
                    else:
                        stats.covered_steps += 1
                    word = nxt
                    continue
            indices = self.action.covering_indices(word)
            count = len(indices)
            if count == 0:
                stats.canonical += 1
                nxt = self._leap_from(word, self._is_canonical_word)
                if nxt is not None:
                    stats.leap2 += 1
                    if self.debug_rescan:
                        self._rescan_block(word + 1, nxt, "leap2")
                    word = nxt
                else:
                    word += 1
                continue
            if count >= self.bound:
                stats.many += 1
                nxt = self._leap_from(word, self._is_many_word)
                if nxt is not None:
                    stats.leap3 += 1
                    if self.debug_rescan:
                        self._rescan_block(word + 1, nxt, "leap3")
                    word = nxt
                else:
                    word += 1
                continue
            coverers = [self.action.perms[i] for i in indices]
            survivors = refine(coverers, state.beta, engine=self._engine)
            if len(survivors) == 1:
                self._add_backbone(survivors[0])
            elif survivors:
                stats.ambiguous += 1
            else:
                stats.covered_modulo += 1
            word += 1
        return state


def find_backbones_iterative(
    n: int,
    bound: int = DEFAULT_BOUND,
    debug_rescan: bool = False,
    progress: Callable[[dict], None] | None = None,
    max_visits: int | None = None,
) -> BackboneState:
    """Run the full graph sweep and return the backbones found."""
    search = IterativeBackboneSearch(
        n,
        bound=bound,
        debug_rescan=debug_rescan,
        progress=progress,
        max_visits=max_visits,
    )
    return search.run()


def backbone_status(
    g: Graph, beta: Sequence[Permutation] = (), bound: int = DEFAULT_BOUND
) -> BackboneStatus:
    """Standalone status check for one graph (fresh dominance context)."""
    search = IterativeBackboneSearch(g.order, bound=bound)
    search.state.beta = list(beta)
    search._engine = DominanceEngine(g.order, list(beta))
    return search.status_word(g.word)


def is_backbone_sat(pi: Permutation, universe: Iterable[Permutation]) -> bool:
    """True iff some graph is covered by `pi` alone within the universe."""
    others = []
    present = False
    for sigma in universe:
        if sigma == pi:
            present = True
        else:
            others.append(sigma)
    if not present:
        raise ValueError("candidate must belong to the universe")
    return not get_dominated(others, [pi])


def batch_backbones(
    universe: Sequence[Permutation], candidates: Sequence[Permutation]
) -> list[Permutation]:
    """Backbone subset of `candidates` within `universe`, one shared context.

    Every universe member contributes its pattern negations once; the
    clauses of candidate permutations are guarded by relax literals so a
    candidate's own patterns can be switched off for its test.
    """
    if not candidates:
        return []
    order = universe[0].degree
    ctx = EncodingContext(order)
    cand_set = set(candidates)
    relax: dict[Permutation, int] = {}
    for pi in universe:
        pats = patterns_of(pi).patterns
        if pi in cand_set:
            r = ctx.new_var()
            relax[pi] = r
            for p in pats:
                ctx.add_not_covered(p, relax=r)
        else:
            for p in pats:
                ctx.add_not_covered(p)
    all_relax = [relax[pi] for pi in candidates]
    backbones = []
    for pi in candidates:
        r_self = relax[pi]
        assumptions = [r_self] + [-r for r in all_relax if r != r_self]
        for gamma in patterns_of(pi).patterns:
            if ctx.solve(assumptions + list(ctx.assume_covered(gamma))):
                backbones.append(pi)
                break
    return backbones


def find_backbones_sat(
    universe: Iterable[Permutation], seed: Iterable[Permutation] = ()
) -> list[Permutation]:
    """All backbones of the universe via per-permutation SAT tests.

    Candidates dominated by the seed set are ruled out with one shared
    incremental context before the per-candidate tests; the result does
    not depend on the seed choice.
    """
    uni = sorted(set(universe))
    for pi in uni:
        if pi.is_identity():
            raise ValueError("universe must not contain the identity")
    seed_list = sorted(set(seed))
    uni_set = set(uni)
    for pi in seed_list:
        if pi not in uni_set:
            raise ValueError("seed must be a subset of the universe")
    if seed_list:
        seed_set = set(seed_list)
        rest = [pi for pi in uni if pi not in seed_set]
        non_bb = set(get_dominated(seed_list, rest))
        candidates = [pi for pi in uni if pi not in non_bb]
    else:
        candidates = list(uni)
    return batch_backbones(uni, candidates)
