"""Minimal incremental SAT solver and the pattern CNF encodings.

The solver is a small conflict-driven engine with two-literal watching,
first-UIP learning, phase saving and activity-based decisions.  It is
built for this workload: tens of base variables, a few hundred thousand
clauses, and very many incremental `solve` calls under assumptions.
Clauses persist across calls; retraction is done with relax literals
(add clauses as `r OR C`, assume -r while the group is active, then add
the unit `r` to neutralize it).

`EncodingContext` holds the variable layout over one graph order: edge
variables x_1..x_m, on-demand Tseitin equality variables e_pq with
their four defining clauses, and cached activation literals for
assumption-guarded pattern constraints.
"""

from __future__ import annotations

import heapq
from typing import TYPE_CHECKING, Iterable, Iterator, Sequence

from .graphs import edge_count_of_order

if TYPE_CHECKING:
    from .patterns import Pattern


class Solver:
    """Incremental CDCL over signed integer literals (DIMACS convention)."""

    def __init__(self) -> None:
        self.ok = True
        self.nvars = 0
        self.assigns = [0]  # per var: +1 true, -1 false, 0 unassigned
        self.polarity = [False]
        self.activity = [0.0]
        self.level_of = [0]
        self.reason_of: list[list[int] | None] = [None]
        self.watches: list[list[list[int]]] = [[], []]
        self.clauses: list[list[int]] = []
        self.learnts: list[list[int]] = []
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.var_inc = 1.0
        self.var_decay = 1.0 / 0.95
        self.model: list[int] = []
        self._heap: list[tuple[float, int]] = []
        self._seen = bytearray(1)
        self.restart_first = 128
        self.learnt_cap = 20000
        self.solves = 0
        self.conflicts = 0
        self.propagations = 0

    # -- variables -----------------------------------------------------

    def new_var(self) -> int:
        self.nvars += 1
        v = self.nvars
        self.assigns.append(0)
        self.polarity.append(False)
        self.activity.append(0.0)
        self.level_of.append(0)
        self.reason_of.append(None)
        self.watches.append([])
        self.watches.append([])
        self._seen.append(0)
        heapq.heappush(self._heap, (0.0, v))
        return v

    @staticmethod
    def _enc(lit: int) -> int:
        return (lit << 1) if lit > 0 else ((-lit) << 1) | 1

    @staticmethod
    def _dec(enc: int) -> int:
        return -(enc >> 1) if enc & 1 else (enc >> 1)

    def _value(self, enc: int) -> int:
        a = self.assigns[enc >> 1]
        return -a if enc & 1 else a

    # -- clause management ----------------------------------------------

    def add_clause(self, lits: Iterable[int]) -> bool:
        """Add a permanent clause; returns False on a root-level conflict."""
        if not self.ok:
            return False
        if self.trail_lim:
            self._backtrack(0)
        out: list[int] = []
        seen: set[int] = set()
        for lit in lits:
            if lit == 0 or abs(lit) > self.nvars:
                raise ValueError(f"bad literal {lit}")
            enc = self._enc(lit)
            if enc in seen:
                continue
            if enc ^ 1 in seen:
                return True  # tautology
            val = self._value(enc)
            if val > 0:
                return True  # already satisfied at root
            if val < 0:
                continue  # falsified at root, drop
            seen.add(enc)
            out.append(enc)
        if not out:
            self.ok = False
            return False
        if len(out) == 1:
            self._enqueue(out[0], None)
            self.ok = self._propagate() is None
            return self.ok
        self.clauses.append(out)
        self.watches[out[0]].append(out)
        self.watches[out[1]].append(out)
        return True

    def _attach_learnt(self, clause: list[int]) -> None:
        self.learnts.append(clause)
        self.watches[clause[0]].append(clause)
        self.watches[clause[1]].append(clause)

    def _reduce_learnts(self) -> None:
        keep: list[list[int]] = []
        drop_budget = len(self.learnts) // 2
        dropped = 0
        for clause in self.learnts:
            locked = self.reason_of[clause[0] >> 1] is clause
            if dropped < drop_budget and not locked and len(clause) > 2:
                for lit in clause[:2]:
                    self.watches[lit].remove(clause)
                dropped += 1
            else:
                keep.append(clause)
        self.learnts = keep
        self.learnt_cap = int(self.learnt_cap * 1.2)

    # -- trail ----------------------------------------------------------

    def _enqueue(self, enc: int, reason: list[int] | None) -> None:
        v = enc >> 1
        self.assigns[v] = -1 if enc & 1 else 1
        self.polarity[v] = not enc & 1
        self.level_of[v] = len(self.trail_lim)
        self.reason_of[v] = reason
        self.trail.append(enc)

    def _backtrack(self, level: int) -> None:
        if len(self.trail_lim) <= level:
            return
        limit = self.trail_lim[level]
        heap_push = heapq.heappush
        for idx in range(len(self.trail) - 1, limit - 1, -1):
            v = self.trail[idx] >> 1
            self.assigns[v] = 0
            self.reason_of[v] = None
            heap_push(self._heap, (-self.activity[v], v))
        del self.trail[limit:]
        del self.trail_lim[level:]
        self.qhead = limit

    def _propagate(self) -> list[int] | None:
        trail = self.trail
        assigns = self.assigns
        watches = self.watches
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            false_lit = p ^ 1
            ws = watches[false_lit]
            i = j = 0
            end = len(ws)
            while i < end:
                clause = ws[i]
                i += 1
                if clause[0] == false_lit:
                    clause[0], clause[1] = clause[1], clause[0]
                first = clause[0]
                a = assigns[first >> 1]
                if (-a if first & 1 else a) > 0:
                    ws[j] = clause
                    j += 1
                    continue
                moved = False
                for k in range(2, len(clause)):
                    lit = clause[k]
                    a = assigns[lit >> 1]
                    if (-a if lit & 1 else a) >= 0:
                        clause[1], clause[k] = clause[k], false_lit
                        watches[clause[1]].append(clause)
                        moved = True
                        break
                if moved:
                    continue
                ws[j] = clause
                j += 1
                a = assigns[first >> 1]
                if (-a if first & 1 else a) < 0:
                    # conflict: keep remaining watchers, stop
                    while i < end:
                        ws[j] = ws[i]
                        j += 1
                        i += 1
                    del ws[j:]
                    self.qhead = len(trail)
                    return clause
                self._enqueue(first, clause)
            del ws[j:]
        return None

    # -- conflict analysis ----------------------------------------------

    def _bump_var(self, v: int) -> None:
        act = self.activity[v] + self.var_inc
        self.activity[v] = act
        if self.assigns[v] == 0:
            heapq.heappush(self._heap, (-act, v))
        if act > 1e100:
            for i in range(1, self.nvars + 1):
                self.activity[i] *= 1e-100
            self.var_inc *= 1e-100
            self._rebuild_heap()

    def _rebuild_heap(self) -> None:
        self._heap = [
            (-self.activity[v], v)
            for v in range(1, self.nvars + 1)
            if self.assigns[v] == 0
        ]
        heapq.heapify(self._heap)

    def _analyze(self, confl: list[int]) -> tuple[list[int], int]:
        seen = self._seen
        trail = self.trail
        level_of = self.level_of
        cur_level = len(self.trail_lim)
        learnt: list[int] = [0]
        path = 0
        p = -1
        index = len(trail)
        cleanup: list[int] = []
        clause = confl
        while True:
            start = 0 if p < 0 else 1
            for k in range(start, len(clause)):
                q = clause[k]
                v = q >> 1
                if not seen[v] and level_of[v] > 0:
                    seen[v] = 1
                    cleanup.append(v)
                    self._bump_var(v)
                    if level_of[v] >= cur_level:
                        path += 1
                    else:
                        learnt.append(q)
            while True:
                index -= 1
                if seen[trail[index] >> 1]:
                    break
            p = trail[index]
            clause = self.reason_of[p >> 1]  # type: ignore[assignment]
            seen[p >> 1] = 0
            path -= 1
            if path <= 0:
                break
        learnt[0] = p ^ 1

        # drop literals whose reason is fully subsumed by the rest
        kept = [learnt[0]]
        for q in learnt[1:]:
            reason = self.reason_of[q >> 1]
            if reason is None:
                kept.append(q)
                continue
            for r in reason[1:]:
                if not seen[r >> 1] and level_of[r >> 1] > 0:
                    kept.append(q)
                    break
        learnt = kept
        for v in cleanup:
            seen[v] = 0

        if len(learnt) == 1:
            return learnt, 0
        max_i = 1
        for i in range(2, len(learnt)):
            if level_of[learnt[i] >> 1] > level_of[learnt[max_i] >> 1]:
                max_i = i
        learnt[1], learnt[max_i] = learnt[max_i], learnt[1]
        return learnt, level_of[learnt[1] >> 1]

    # -- decisions --------------------------------------------------------

    def _pick_branch(self) -> int:
        heap = self._heap
        assigns = self.assigns
        activity = self.activity
        while heap:
            negact, v = heapq.heappop(heap)
            if assigns[v] != 0:
                continue
            if -negact != activity[v]:
                heapq.heappush(heap, (-activity[v], v))
                continue
            return (v << 1) | (0 if self.polarity[v] else 1)
        return 0

    # -- main solve loop ---------------------------------------------------

    def solve(self, assumptions: Sequence[int] = ()) -> bool:
        """Satisfiability under assumptions; the solver is reusable afterwards."""
        if not self.ok:
            return False
        self.solves += 1
        self._backtrack(0)
        if len(self._heap) > max(4096, 8 * self.nvars):
            self._rebuild_heap()
        if self._propagate() is not None:
            self.ok = False
            return False
        enc_assumptions = [self._enc(a) for a in assumptions]
        restart_limit = self.restart_first
        conflicts_here = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                self.conflicts += 1
                conflicts_here += 1
                if not self.trail_lim:
                    self.ok = False
                    return False
                learnt, bt = self._analyze(confl)
                self._backtrack(bt)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self._attach_learnt(learnt)
                    self._enqueue(learnt[0], learnt)
                self.var_inc *= self.var_decay
                if conflicts_here >= restart_limit:
                    restart_limit = int(restart_limit * 1.5)
                    self._backtrack(0)
                    if len(self.learnts) > self.learnt_cap:
                        self._reduce_learnts()
                continue
            level = len(self.trail_lim)
            if level < len(enc_assumptions):
                enc = enc_assumptions[level]
                val = self._value(enc)
                if val < 0:
                    self._backtrack(0)
                    return False
                self.trail_lim.append(len(self.trail))
                if val == 0:
                    self._enqueue(enc, None)
                continue
            enc = self._pick_branch()
            if enc == 0:
                self.model = self.assigns[:]
                self._backtrack(0)
                return True
            self.trail_lim.append(len(self.trail))
            self._enqueue(enc, None)

    def model_value(self, var: int) -> bool:
        return self.model[var] > 0

    # -- export -----------------------------------------------------------

    def export_dimacs(self, sink) -> tuple[int, int]:
        """Write the permanent formula in DIMACS CNF; returns (vars, clauses).

        Root-level units (added or implied) are written as unit clauses.
        """
        if self.trail_lim:
            self._backtrack(0)
        units = [self._dec(enc) for enc in self.trail]
        total = len(self.clauses) + len(units)
        sink.write(f"p cnf {self.nvars} {total}\n")
        for lit in units:
            sink.write(f"{lit} 0\n")
        for clause in self.clauses:
            sink.write(" ".join(str(self._dec(e)) for e in clause) + " 0\n")
        return self.nvars, total


class EncodingContext:
    """Variable layout and pattern encodings over one graph order."""

    def __init__(self, order: int):
        self.order = order
        self.m = edge_count_of_order(order)
        self.solver = Solver()
        for _ in range(self.m):
            self.solver.new_var()  # x vars occupy 1..m
        self._equality: dict[tuple[int, int], int] = {}
        self._activation: dict["Pattern", int] = {}
        self._clause_seen: set[frozenset[int]] = set()

    def x_var(self, q: int) -> int:
        """Edge variable for 0-based position q."""
        if not 0 <= q < self.m:
            raise ValueError(f"position {q} out of range")
        return q + 1

    def new_var(self) -> int:
        return self.solver.new_var()

    def equality_var(self, p: int, q: int) -> int:
        """Tseitin variable e with e <-> (x_p = x_q), created on first use."""
        if p == q:
            raise ValueError("equality variable needs two distinct positions")
        key = (p, q) if p < q else (q, p)
        e = self._equality.get(key)
        if e is None:
            xp, xq = self.x_var(key[0]), self.x_var(key[1])
            e = self.solver.new_var()
            self.solver.add_clause([-e, -xp, xq])
            self.solver.add_clause([-e, xp, -xq])
            self.solver.add_clause([e, xp, xq])
            self.solver.add_clause([e, -xp, -xq])
            self._equality[key] = e
        return e

    def equality_count(self) -> int:
        return len(self._equality)

    def _class_pairs(self, pattern: "Pattern") -> Iterator[tuple[int, int]]:
        for cls in pattern.classes:
            rep = cls[0]
            for member in cls[1:]:
                yield rep, member

    def not_covered_lits(self, pattern: "Pattern") -> list[int]:
        """The single clause satisfied exactly by the non-instances."""
        lits = []
        m = self.m
        for q in range(m):
            bit = 1 << (m - 1 - q)
            if pattern.cmask1 & bit:
                lits.append(-self.x_var(q))
            elif pattern.cmask0 & bit:
                lits.append(self.x_var(q))
        for rep, member in self._class_pairs(pattern):
            lits.append(-self.equality_var(rep, member))
        if not lits:
            raise ValueError("pattern matches every graph; negation unsatisfiable")
        return lits

    def add_not_covered(self, pattern: "Pattern", relax: int | None = None) -> bool:
        """Add the negation clause (optionally guarded by a relax literal)."""
        lits = self.not_covered_lits(pattern)
        if relax is not None:
            lits.append(relax)
        key = frozenset(lits)
        if key in self._clause_seen:
            return False
        self._clause_seen.add(key)
        self.solver.add_clause(lits)
        return True

    def covered_lits(self, pattern: "Pattern") -> list[int]:
        """Literal set forcing a graph to instantiate the pattern."""
        lits = []
        m = self.m
        for q in range(m):
            bit = 1 << (m - 1 - q)
            if pattern.cmask1 & bit:
                lits.append(self.x_var(q))
            elif pattern.cmask0 & bit:
                lits.append(-self.x_var(q))
        for rep, member in self._class_pairs(pattern):
            lits.append(self.equality_var(rep, member))
        return lits

    def assume_covered(self, pattern: "Pattern") -> tuple[int, ...]:
        """Activation literal (as a 1-tuple of assumptions) for covered(pattern).

        The implication clauses a -> constraint are added once per pattern;
        assuming `a` activates them, leaving the solver reusable.
        """
        a = self._activation.get(pattern)
        if a is None:
            a = self.solver.new_var()
            for lit in self.covered_lits(pattern):
                self.solver.add_clause([-a, lit])
            self._activation[pattern] = a
        return (a,)

    def solve(self, assumptions: Sequence[int] = ()) -> bool:
        return self.solver.solve(assumptions)

    def model_word(self) -> int:
        """Graph word read off the x variables of the last model."""
        word = 0
        m = self.m
        model = self.solver.model
        for q in range(m):
            if model[q + 1] > 0:
                word |= 1 << (m - 1 - q)
        return word

    def all_models_projected(
        self, assumptions: Sequence[int] = ()
    ) -> Iterator[int]:
        """Enumerate distinct x-assignments extending to models, as words.

        Blocking clauses over the projection are added permanently, so the
        context is consumed by the enumeration.
        """
        while self.solver.solve(assumptions):
            word = self.model_word()
            yield word
            model = self.solver.model
            blocking = [-(q + 1) if model[q + 1] > 0 else (q + 1) for q in range(self.m)]
            if not self.solver.add_clause(blocking):
                return

    def export_dimacs(self, sink) -> tuple[int, int]:
        return self.solver.export_dimacs(sink)
