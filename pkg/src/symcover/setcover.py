"""Explicit cover matrices, the classic reductions, and exact solving.

Rows are permutations, columns are graphs; a cell is set when the row's
permutation covers the column's graph.  Reductions run to a fixed point:
a column with a single supporter forces its row ("essential"), a row
contained in another row is discarded, and a column whose supporter set
contains another column's supporters is discarded (covering the smaller
column covers it for free).  What survives goes to a branch-and-bound
search for a minimum-cardinality row cover.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, TextIO

import numpy as np

from .graphs import Graph, edge_count_of_order
from .kernels import cover_mask
from .patterns import merge_pattern_sets, patterns_of
from .perms import Permutation, parse_permutation
from .sat import EncodingContext

DEFAULT_COLUMN_BUDGET = 1 << 24


@dataclass
class CoverMatrix:
    """Incidence of permutations (rows) over graph columns.

    `bits` is a bool matrix of shape (rows, cols); `col_ids` are graph
    ids in ascending order; `forced` collects rows committed by the
    essential-row reduction.
    """

    order: int
    row_perms: list[Permutation]
    col_ids: list[int]
    bits: np.ndarray
    forced: list[Permutation] = field(default_factory=list)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.row_perms), len(self.col_ids)

    def row_weights(self) -> list[int]:
        if not self.col_ids:
            return [0] * len(self.row_perms)
        return [int(w) for w in self.bits.sum(axis=1)]

    def weight_range(self) -> tuple[int, int]:
        weights = self.row_weights()
        if not weights:
            return (0, 0)
        return (min(weights), max(weights))

    def column_supports(self) -> list[int]:
        """Per-column supporter sets as row-index bitmasks."""
        rows, cols = self.shape
        out = []
        for c in range(cols):
            mask = 0
            col = self.bits[:, c]
            for r in np.nonzero(col)[0]:
                mask |= 1 << int(r)
            out.append(mask)
        return out

    def validate(self) -> None:
        rows, cols = self.shape
        if self.bits.shape != (rows, cols):
            raise ValueError("bit matrix shape mismatch")
        if cols and not self.bits.any(axis=0).all():
            raise ValueError("matrix has an uncoverable column")


def build_matrix(
    rows: Sequence[Permutation],
    beta: Sequence[Permutation] = (),
    order: int | None = None,
    column_budget: int = DEFAULT_COLUMN_BUDGET,
    method: str = "auto",
) -> CoverMatrix:
    """Cover matrix with columns = cover(rows) minus cover(beta).

    The full 2^m sweep enumerates columns when the space fits the budget;
    otherwise the columns come from SAT model enumeration over
    "covered by some row pattern, covered by no beta pattern".
    """
    rows = list(rows)
    beta = list(beta)
    overlap = set(rows) & set(beta)
    if overlap:
        raise ValueError(f"rows and beta overlap: {sorted(overlap)[0]}")
    if order is None:
        if not rows:
            raise ValueError("need an explicit order for an empty row set")
        order = rows[0].degree
    m = edge_count_of_order(order)
    row_patterns = [patterns_of(pi).patterns for pi in rows]
    beta_patterns = merge_pattern_sets(patterns_of(pi) for pi in beta).patterns

    if method not in ("auto", "sweep", "sat"):
        raise ValueError(f"unknown column enumeration method {method!r}")
    if method == "auto":
        method = "sweep" if (1 << m) <= column_budget else "sat"
    if method == "sweep" and (1 << m) > column_budget:
        raise ValueError(
            f"2^{m} graphs exceed the column budget {column_budget}; "
            "use the SAT enumeration (method='sat')"
        )

    if method == "sweep":
        words = np.arange(1 << m, dtype=np.uint64)
        any_row = np.zeros(len(words), dtype=bool)
        for pats in row_patterns:
            any_row |= cover_mask(pats, words)
        keep = any_row
        if beta_patterns:
            keep &= ~cover_mask(beta_patterns, words)
        col_words = words[keep]
    else:
        ctx = EncodingContext(order)
        for p in beta_patterns:
            ctx.add_not_covered(p)
        selectors = []
        for pats in row_patterns:
            for p in pats:
                (a,) = ctx.assume_covered(p)
                selectors.append(a)
        if selectors:
            ctx.solver.add_clause(selectors)
            col_words = np.array(sorted(ctx.all_models_projected()), dtype=np.uint64)
        else:
            col_words = np.zeros(0, dtype=np.uint64)

    # columns ascending by graph id
    gids = np.array(
        [Graph(order, int(w)).graph_id for w in col_words], dtype=np.uint64
    )
    by_id = np.argsort(gids, kind="stable")
    col_words = col_words[by_id]
    col_ids = [int(g) for g in gids[by_id]]

    bits = np.zeros((len(rows), len(col_ids)), dtype=bool)
    for r, pats in enumerate(row_patterns):
        bits[r] = cover_mask(pats, col_words)
    mat = CoverMatrix(order, rows, col_ids, bits)
    mat.validate()
    return mat


def _packed_rows(bits: np.ndarray) -> list[int]:
    """Row bitsets over columns, as arbitrary-precision ints."""
    out = []
    for r in range(bits.shape[0]):
        packed = np.packbits(bits[r], bitorder="little").tobytes()
        out.append(int.from_bytes(packed, "little"))
    return out


def reduce_matrix(mat: CoverMatrix) -> CoverMatrix:
    """Run the three reductions to a fixed point.

    Scan order is ascending row/column index; among equal rows or equal
    columns the lowest index survives.  Forced rows accumulate in
    `forced` and their covered columns disappear.
    """
    order = mat.order
    row_perms = list(mat.row_perms)
    col_ids = list(mat.col_ids)
    bits = mat.bits.copy()
    forced = list(mat.forced)

    changed = True
    while changed:
        changed = False

        # essential rows: a column supported by exactly one row
        while bits.shape[1]:
            supports = bits.sum(axis=0)
            singles = np.nonzero(supports == 1)[0]
            if len(singles) == 0:
                break
            col = int(singles[0])
            row = int(np.nonzero(bits[:, col])[0][0])
            forced.append(row_perms[row])
            keep_cols = ~bits[row]
            keep_rows = np.ones(bits.shape[0], dtype=bool)
            keep_rows[row] = False
            bits = bits[keep_rows][:, keep_cols]
            row_perms = [p for r, p in enumerate(row_perms) if keep_rows[r]]
            col_ids = [c for j, c in enumerate(col_ids) if keep_cols[j]]
            changed = True

        # row dominance: drop rows contained in another row
        nrows = bits.shape[0]
        if nrows > 1 and bits.shape[1]:
            packed = _packed_rows(bits)
            drop = np.zeros(nrows, dtype=bool)
            for r1 in range(nrows):
                b1 = packed[r1]
                for r2 in range(nrows):
                    if r1 == r2 or drop[r2]:
                        continue
                    b2 = packed[r2]
                    if b1 & ~b2 == 0 and (b1 != b2 or r2 < r1):
                        drop[r1] = True
                        break
            if drop.any():
                keep = ~drop
                bits = bits[keep]
                row_perms = [p for r, p in enumerate(row_perms) if keep[r]]
                changed = True
        elif nrows and bits.shape[1] == 0:
            # nothing left to cover: all remaining rows are redundant
            bits = bits[:0]
            row_perms = []
            changed = changed or True

        # column dominance: drop columns whose supporters contain
        # another column's supporters
        ncols = bits.shape[1]
        if ncols > 1:
            col_masks = []
            for c in range(ncols):
                packed_col = np.packbits(bits[:, c], bitorder="little").tobytes()
                col_masks.append(int.from_bytes(packed_col, "little"))
            order_idx = sorted(
                range(ncols), key=lambda c: (col_masks[c].bit_count(), c)
            )
            kept: list[int] = []
            kept_masks: list[int] = []
            seen_masks: set[int] = set()
            drop = np.zeros(ncols, dtype=bool)
            for c in order_idx:
                mask = col_masks[c]
                if mask in seen_masks:
                    drop[c] = True
                    continue
                dominated = False
                for km in kept_masks:
                    if km & ~mask == 0:
                        dominated = True
                        break
                if dominated:
                    drop[c] = True
                else:
                    kept.append(c)
                    kept_masks.append(mask)
                    seen_masks.add(mask)
            if drop.any():
                keep = ~drop
                bits = bits[:, keep]
                col_ids = [c for j, c in enumerate(col_ids) if keep[j]]
                changed = True

    out = CoverMatrix(order, row_perms, col_ids, bits, forced)
    out.validate()
    return out


@dataclass(frozen=True)
class CoverSolution:
    chosen: tuple[Permutation, ...]
    forced_count: int
    optimal: bool


def _greedy_disjoint_bound(col_masks: list[int]) -> int:
    """Lower bound: a set of pairwise row-disjoint columns needs one row each."""
    taken = 0
    used = 0
    for mask in col_masks:
        if mask & used == 0:
            used |= mask
            taken += 1
    return taken


def solve_exact(mat: CoverMatrix) -> CoverSolution:
    """Minimum-cardinality row cover by branch and bound.

    Branches on the lowest-support column, trying its rows in descending
    row weight; reductions rerun at every node.
    """
    reduced = reduce_matrix(mat)
    forced_count = len(reduced.forced)
    best: list[list[Permutation] | None] = [None]

    def recurse(sub: CoverMatrix, chosen: list[Permutation]) -> None:
        sub = reduce_matrix(sub)
        chosen = chosen + sub.forced
        rows, cols = sub.shape
        if cols == 0:
            if best[0] is None or len(chosen) < len(best[0]):
                best[0] = list(chosen)
            return
        col_masks = []
        for c in range(cols):
            packed_col = np.packbits(sub.bits[:, c], bitorder="little").tobytes()
            col_masks.append(int.from_bytes(packed_col, "little"))
        bound = len(chosen) + _greedy_disjoint_bound(col_masks)
        if best[0] is not None and bound >= len(best[0]):
            return
        supports = sub.bits.sum(axis=0)
        branch_col = int(np.argmin(supports))
        weights = sub.bits.sum(axis=1)
        branch_rows = sorted(
            (int(r) for r in np.nonzero(sub.bits[:, branch_col])[0]),
            key=lambda r: (-int(weights[r]), r),
        )
        for r in branch_rows:
            keep_cols = ~sub.bits[r]
            keep_rows = np.ones(rows, dtype=bool)
            keep_rows[r] = False
            child = CoverMatrix(
                sub.order,
                [p for i, p in enumerate(sub.row_perms) if keep_rows[i]],
                [c for j, c in enumerate(sub.col_ids) if keep_cols[j]],
                sub.bits[keep_rows][:, keep_cols],
            )
            recurse(child, chosen + [sub.row_perms[r]])

    recurse(
        CoverMatrix(
            reduced.order,
            list(reduced.row_perms),
            list(reduced.col_ids),
            reduced.bits.copy(),
        ),
        [],
    )
    chosen = best[0]
    assert chosen is not None  # recursion always reaches an empty matrix
    return CoverSolution(tuple(reduced.forced) + tuple(chosen), forced_count, True)


def export_opb(mat: CoverMatrix, sink: TextIO) -> None:
    """Pseudo-Boolean optimization text: minimize chosen rows, cover each column."""
    rows, cols = mat.shape
    sink.write(f"* #variable= {rows} #constraint= {cols}\n")
    for r, pi in enumerate(mat.row_perms, start=1):
        sink.write(f"* x{r} = {pi}\n")
    objective = " ".join(f"+1 x{r}" for r in range(1, rows + 1))
    sink.write(f"min: {objective} ;\n" if objective else "min: ;\n")
    for c in range(cols):
        terms = " ".join(f"+1 x{int(r) + 1}" for r in np.nonzero(mat.bits[:, c])[0])
        sink.write(f"{terms} >= 1;\n")


def dump_matrix(mat: CoverMatrix, sink: TextIO) -> None:
    """Plain-text dump: header, column id table, one row per line."""
    rows, cols = mat.shape
    sink.write(f"n={mat.order} rows={rows} cols={cols}\n")
    sink.write("cols: " + " ".join(str(c) for c in mat.col_ids) + "\n")
    for r in range(rows):
        bitstring = "".join("1" if b else "0" for b in mat.bits[r])
        sink.write(f"{mat.row_perms[r]} {bitstring}\n")
    for pi in mat.forced:
        sink.write(f"forced: {pi}\n")


def load_matrix(source: TextIO) -> CoverMatrix:
    """Inverse of dump_matrix."""
    header = source.readline().strip()
    fields = dict(part.split("=") for part in header.split())
    order, rows, cols = int(fields["n"]), int(fields["rows"]), int(fields["cols"])
    col_line = source.readline().strip()
    body = col_line[len("cols:"):].split()
    col_ids = [int(c) for c in body]
    if len(col_ids) != cols:
        raise ValueError("column table length mismatch")
    row_perms = []
    bits = np.zeros((rows, cols), dtype=bool)
    forced = []
    for line in source:
        line = line.strip()
        if not line:
            continue
        if line.startswith("forced:"):
            forced.append(parse_permutation(line[len("forced:"):].strip()))
            continue
        perm_text, bitstring = line.split()
        r = len(row_perms)
        row_perms.append(parse_permutation(perm_text))
        if len(bitstring) != cols:
            raise ValueError("row bitstring length mismatch")
        bits[r] = [ch == "1" for ch in bitstring]
    if len(row_perms) != rows:
        raise ValueError("row count mismatch")
    return CoverMatrix(order, row_perms, col_ids, bits, forced)
