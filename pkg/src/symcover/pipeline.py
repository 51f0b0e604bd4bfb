"""End-to-end computation of an optimal symmetry break for one order.

Phases: (1) the iterative graph sweep proposes backbones cheaply;
(2) dominance refinement alternates with SAT backbone detection until a
fixed point; (3) the surviving permutations become an explicit cover
matrix which the reductions, and if needed branch and bound, finish off.
The break is the backbones plus forced plus solver-chosen rows.

State can be checkpointed between phases and rounds, and every produced
file is byte-deterministic for a given configuration (wall-clock timings
are reported on the console only, never in files).
"""

from __future__ import annotations

import io
import json
import os
import time
from dataclasses import dataclass, field
from typing import Callable

from .backbones import (
    DEFAULT_BOUND,
    batch_backbones,
    find_backbones_iterative,
)
from .breaks import BreakSpec, count_break_solutions, emit_cnf
from .dominance import refine
from .graphs import count_canonical
from .perms import Permutation, non_identity_permutations
from .setcover import DEFAULT_COLUMN_BUDGET, build_matrix, reduce_matrix, solve_exact

MAX_DEFAULT_ORDER = 8
# The graph sweep is a cheap accelerator up to this order; above it the
# SAT route alone is the default and the sweep must be requested.
MAX_AUTO_ITERATIVE_ORDER = 7


@dataclass
class PipelineConfig:
    n: int
    bound: int = DEFAULT_BOUND
    skip_iterative: bool | None = None  # None = auto by order
    column_budget: int = DEFAULT_COLUMN_BUDGET
    workers: int = 1  # accepted for interface compatibility; runs single-threaded
    out_path: str | None = None
    report_path: str | None = None
    state_path: str | None = None
    seed: int | None = None  # only synthetic test matrices use randomness
    long_run: bool = False

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("order must be >= 2")
        if self.bound < 1:
            raise ValueError("bound must be >= 1")
        if self.n > MAX_DEFAULT_ORDER and not self.long_run:
            raise ValueError(
                f"order {self.n} needs long_run=True (expected runtime is huge)"
            )

    def run_iterative(self) -> bool:
        if self.skip_iterative is None:
            return self.n <= MAX_AUTO_ITERATIVE_ORDER
        return not self.skip_iterative


@dataclass
class RunReport:
    order: int
    bb1: int | None
    bb2: int
    rows: int
    cols: int
    cover_min: int
    cover_max: int
    opt: int
    enc_clauses: int
    enc_vars: int
    rounds: int
    verified: bool | None
    timings: dict[str, float] = field(default_factory=dict)

    def to_json(self) -> str:
        """Deterministic report text; wall-clock timings are omitted."""
        payload = {
            "order": self.order,
            "bb1": self.bb1,
            "bb2": self.bb2,
            "rows": self.rows,
            "cols": self.cols,
            "cover_min": self.cover_min,
            "cover_max": self.cover_max,
            "opt": self.opt,
            "enc_clauses": self.enc_clauses,
            "enc_vars": self.enc_vars,
            "rounds": self.rounds,
            "verified": self.verified,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _atomic_write(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _save_state(
    cfg: PipelineConfig, phase: str, beta, universe, rounds: int, bb1: int | None
) -> None:
    if not cfg.state_path:
        return
    payload = {
        "version": 1,
        "n": cfg.n,
        "bound": cfg.bound,
        "phase": phase,
        "rounds": rounds,
        "bb1": bb1,
        "beta": [list(p.image) for p in beta],
        "universe": [list(p.image) for p in universe],
    }
    _atomic_write(cfg.state_path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _load_state(cfg: PipelineConfig) -> dict | None:
    if not cfg.state_path or not os.path.exists(cfg.state_path):
        return None
    with open(cfg.state_path) as fh:
        payload = json.load(fh)
    if payload.get("n") != cfg.n or payload.get("bound") != cfg.bound:
        return None
    return payload


def run_pipeline(
    cfg: PipelineConfig, log: Callable[[str], None] | None = None
) -> tuple[BreakSpec, RunReport]:
    """Compute the optimal break for cfg.n; returns (break, report)."""

    def say(msg: str) -> None:
        if log is not None:
            log(msg)

    timings: dict[str, float] = {}
    state = _load_state(cfg)
    rounds = 0

    # phase 1: iterative backbone sweep
    t0 = time.monotonic()
    bb1: int | None = None
    if state is not None:
        beta = [Permutation(tuple(img)) for img in state["beta"]]
        universe = [Permutation(tuple(img)) for img in state["universe"]]
        rounds = state.get("rounds", 0)
        phase = state["phase"]
        bb1 = state.get("bb1")
        say(f"resumed from {cfg.state_path} at phase {phase}")
    else:
        phase = "start"
        beta = []
        universe = [p for p in non_identity_permutations(cfg.n)]
    if phase == "start":
        if cfg.run_iterative():
            sweep = find_backbones_iterative(cfg.n, bound=cfg.bound)
            beta = list(sweep.beta)
            say(
                f"sweep: {len(beta)} backbones, visited {sweep.stats.visited}"
                f" ({time.monotonic() - t0:.1f}s)"
            )
        bb1 = len(beta) if cfg.run_iterative() else None
        universe = [p for p in non_identity_permutations(cfg.n) if p not in set(beta)]
        phase = "alternation"
        _save_state(cfg, phase, beta, universe, rounds, bb1)
    timings["iterative"] = time.monotonic() - t0

    # phase 2: alternate refinement with SAT backbone detection
    t1 = time.monotonic()
    if phase == "alternation":
        while True:
            rounds += 1
            refined = refine(universe, beta)
            new = batch_backbones(beta + refined, refined)
            say(
                f"round {rounds}: universe {len(universe)} -> {len(refined)}, "
                f"+{len(new)} backbones ({time.monotonic() - t1:.1f}s)"
            )
            if not new and refined == universe:
                universe = refined
                break
            beta = beta + new
            new_set = set(new)
            universe = [p for p in refined if p not in new_set]
            _save_state(cfg, "alternation", beta, universe, rounds, bb1)
        phase = "matrix"
        _save_state(cfg, phase, beta, universe, rounds, bb1)
    timings["alternation"] = time.monotonic() - t1

    # phase 3: explicit set cover over the residue
    t2 = time.monotonic()
    forced: tuple[Permutation, ...] = ()
    residual: tuple[Permutation, ...] = ()
    rows = len(universe)
    cols = 0
    cover_min = cover_max = 0
    if universe:
        mat = build_matrix(
            universe, beta, order=cfg.n, column_budget=cfg.column_budget
        )
        cols = mat.shape[1]
        cover_min, cover_max = mat.weight_range()
        say(f"matrix {mat.shape[0]}x{cols}, weights {cover_min}-{cover_max}")
        solution = solve_exact(mat)
        forced = tuple(solution.chosen[: solution.forced_count])
        residual = tuple(solution.chosen[solution.forced_count :])
        say(
            f"cover: {solution.forced_count} forced + {len(residual)} searched "
            f"({time.monotonic() - t2:.1f}s)"
        )
    timings["matrix"] = time.monotonic() - t2

    chosen = tuple(beta) + forced + residual
    provenance = {
        "kind": "optimal",
        "order": cfg.n,
        "bound": cfg.bound,
        "bb1": bb1,
        "bb2": len(beta),
        "rows": rows,
        "cols": cols,
        "forced": len(forced),
        "searched": len(residual),
        "rounds": rounds,
    }
    spec = BreakSpec.from_permutations(cfg.n, chosen, provenance)

    buf = io.StringIO()
    stats = emit_cnf(spec, buf)

    t3 = time.monotonic()
    verified: bool | None = None
    if cfg.n <= 7:
        solutions = count_break_solutions(cfg.n, tuple(spec.patterns))
        expected = count_canonical(cfg.n)
        verified = solutions == expected
        if not verified:
            raise AssertionError(
                f"break verification failed: {solutions} solutions, expected {expected}"
            )
        say(f"verified: {solutions} solutions == {expected} classes")
    timings["verify"] = time.monotonic() - t3

    report = RunReport(
        order=cfg.n,
        bb1=bb1,
        bb2=len(beta),
        rows=rows,
        cols=cols,
        cover_min=cover_min,
        cover_max=cover_max,
        opt=len(chosen),
        enc_clauses=stats.clauses,
        enc_vars=stats.variables,
        rounds=rounds,
        verified=verified,
        timings=timings,
    )

    if cfg.out_path:
        _atomic_write(cfg.out_path, spec.to_json())
    if cfg.report_path:
        _atomic_write(cfg.report_path, report.to_json())
    if cfg.state_path:
        _save_state(cfg, "done", beta, universe, rounds, bb1)
    return spec, report
