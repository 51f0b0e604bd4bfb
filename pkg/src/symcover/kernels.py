"""Vectorized kernels over packed graph words.

Everything here operates on numpy arrays of graph words (see graphs.py
for the bit layout).  These kernels back the hot paths: canonical-graph
counting, bulk pattern matching, covering-permutation queries, and
full-space cover sweeps.
"""

from __future__ import annotations

from functools import lru_cache
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from .graphs import edge_count_of_order
from .perms import Permutation, non_identity_permutations

if TYPE_CHECKING:
    from .patterns import Pattern

_U1 = np.uint64(1)


def _source_bits(pi: Permutation) -> list[int]:
    """Source bit index per target bit for one relabeling.

    Target bit (m - p) of the output word is copied from source bit
    (m - map[p]) of the input word.
    """
    m = edge_count_of_order(pi.degree)
    pm = pi.position_map()
    src = [0] * m
    for p in range(1, m + 1):
        src[m - p] = m - pm[p - 1]
    return src


def byte_permute_tables(pi: Permutation) -> np.ndarray:
    """(nbytes, 256) uint64 lookup tables applying `pi` one input byte at a time."""
    m = edge_count_of_order(pi.degree)
    src = _source_bits(pi)
    nbytes = (m + 7) // 8
    tables = np.zeros((nbytes, 256), dtype=np.uint64)
    byte_vals = np.arange(256, dtype=np.uint64)
    for t in range(m):
        k, off = divmod(src[t], 8)
        tables[k] |= ((byte_vals >> np.uint64(off)) & _U1) << np.uint64(t)
    return tables


def permute_words(tables: np.ndarray, words: np.ndarray) -> np.ndarray:
    """Apply precomputed byte tables to an array of words."""
    out = tables[0][words & np.uint64(0xFF)]
    for k in range(1, tables.shape[0]):
        out |= tables[k][(words >> np.uint64(8 * k)) & np.uint64(0xFF)]
    return out


class PermActionBank:
    """The action of every non-identity permutation, queryable per word."""

    def __init__(self, n: int):
        self.n = n
        self.m = edge_count_of_order(n)
        self.perms = non_identity_permutations(n)
        src = np.array([_source_bits(pi) for pi in self.perms], dtype=np.uint64)
        self._src = src
        self._weights = (2.0 ** np.arange(self.m)).astype(np.float64)

    def permuted_words(self, word: int) -> np.ndarray:
        """Relabeled word for each permutation, as float64 (exact below 2^53)."""
        bits = ((np.uint64(word) >> self._src) & _U1).astype(np.float64)
        return bits @ self._weights

    def covering_indices(self, word: int) -> np.ndarray:
        """Indices of the permutations that map `word` to a smaller word."""
        return np.nonzero(self.permuted_words(word) < float(word))[0]

    def covering_count_at_least(self, word: int, bound: int) -> bool:
        permuted = self.permuted_words(word)
        return int((permuted < float(word)).sum()) >= bound


@lru_cache(maxsize=4)
def perm_action_bank(n: int) -> PermActionBank:
    return PermActionBank(n)


def _adjacent_transposition_tables(n: int) -> list[np.ndarray]:
    gens = [Permutation.transposition(n, i, i + 1) for i in range(1, n)]
    return [byte_permute_tables(g) for g in gens]


@lru_cache(maxsize=4)
def orbit_min_words(n: int) -> np.ndarray:
    """Per-word minimum of its isomorphism orbit, for the whole 2^m space.

    Min-label relaxation along adjacent-transposition generators until a
    fixed point; those generators reach the whole symmetric group.
    """
    m = edge_count_of_order(n)
    count = 1 << m
    dtype = np.uint32 if m <= 32 else np.uint64
    words = np.arange(count, dtype=dtype)
    tables = _adjacent_transposition_tables(n)
    neighbor = [permute_words(t, words.astype(np.uint64)).astype(dtype) for t in tables]
    minimum = words.copy()
    while True:
        changed = False
        for nb in neighbor:
            candidate = minimum[nb]
            mask = candidate < minimum
            if mask.any():
                minimum[mask] = candidate[mask]
                changed = True
        if not changed:
            return minimum


def canonical_mask(n: int) -> np.ndarray:
    """Boolean mask over all words: True where the word is its orbit minimum."""
    m = edge_count_of_order(n)
    minimum = orbit_min_words(n)
    return minimum == np.arange(1 << m, dtype=minimum.dtype)


def canonical_count(n: int) -> int:
    return int(canonical_mask(n).sum())


def canonical_words(n: int) -> np.ndarray:
    return np.nonzero(canonical_mask(n))[0].astype(np.uint64)


def pattern_match_mask(pattern: "Pattern", words: np.ndarray) -> np.ndarray:
    """Boolean mask of the words that are instances of `pattern`."""
    cm1 = np.uint64(pattern.cmask1)
    cm0 = np.uint64(pattern.cmask0)
    ok = (words & cm1) == cm1
    if pattern.cmask0:
        ok &= (words & cm0) == 0
    for cmask in pattern.class_masks:
        cm = np.uint64(cmask)
        t = words & cm
        ok &= (t == 0) | (t == cm)
    return ok


def cover_mask(patterns: Iterable["Pattern"], words: np.ndarray) -> np.ndarray:
    """Union of instance sets over `patterns`, as a mask aligned with `words`."""
    out = np.zeros(len(words), dtype=bool)
    for pattern in patterns:
        pending = ~out
        if not pending.any():
            break
        sub = words[pending]
        out[pending] = pattern_match_mask(pattern, sub)
    return out


def cover_count_full_space(n: int, patterns: Sequence["Pattern"], chunk_bits: int = 24) -> int:
    """|union of pattern instances| over the whole 2^m space, chunked."""
    m = edge_count_of_order(n)
    total = 0
    if m <= chunk_bits:
        words = np.arange(1 << m, dtype=np.uint64)
        return int(cover_mask(patterns, words).sum())
    step = 1 << chunk_bits
    for start in range(0, 1 << m, step):
        words = np.arange(start, start + step, dtype=np.uint64)
        total += int(cover_mask(patterns, words).sum())
    return total


class PatternBank:
    """Stacked mask arrays for a pattern list, for one-word bulk matching.

    Patterns are grouped contiguously by source; `group_offsets` holds the
    start index of each group (plus a final sentinel).
    """

    def __init__(self, pattern_groups: Sequence[Sequence["Pattern"]]):
        flat: list[Pattern] = []
        offsets = [0]
        for group in pattern_groups:
            flat.extend(group)
            offsets.append(len(flat))
        self.patterns = flat
        self.group_offsets = np.array(offsets, dtype=np.int64)
        count = len(flat)
        self.cm1 = np.array([p.cmask1 for p in flat], dtype=np.uint64)
        self.cm0 = np.array([p.cmask0 for p in flat], dtype=np.uint64)
        max_classes = max((len(p.class_masks) for p in flat), default=0)
        self.class_mat = np.zeros((count, max_classes), dtype=np.uint64)
        for idx, p in enumerate(flat):
            for c, cmask in enumerate(p.class_masks):
                self.class_mat[idx, c] = cmask
        self.suffix_widths = np.array([p.suffix_width for p in flat], dtype=np.int64)

    def __len__(self) -> int:
        return len(self.patterns)

    def match_word(self, word: int) -> np.ndarray:
        """Per-pattern instance test for a single word."""
        w = np.uint64(word)
        ok = (w & self.cm1) == self.cm1
        ok &= (w & self.cm0) == 0
        if self.class_mat.shape[1]:
            t = w & self.class_mat
            ok &= ((t == 0) | (t == self.class_mat)).all(axis=1)
        return ok

    def covered_groups(self, word: int) -> np.ndarray:
        """Per-group any-pattern-matches test for a single word."""
        if len(self.group_offsets) <= 1:
            return np.zeros(0, dtype=bool)
        # Pad one zero so reduceat stays in range for empty trailing groups.
        match = np.zeros(len(self.patterns) + 1, dtype=np.int32)
        match[:-1] = self.match_word(word)
        counts = np.add.reduceat(match, self.group_offsets[:-1])
        counts[self.group_offsets[:-1] == self.group_offsets[1:]] = 0
        return counts > 0

    def covers_word(self, word: int) -> bool:
        return bool(self.match_word(word).any())

    def max_matching_suffix_width(self, word: int) -> int:
        """-1 when no pattern matches, else the widest all-free suffix among

        the matching patterns (counter bits 0..k-1 unconstrained)."""
        match = self.match_word(word)
        if not match.any():
            return -1
        return int(self.suffix_widths[match].max())
