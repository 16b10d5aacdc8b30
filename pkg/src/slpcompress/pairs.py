"""Pair compression: adjacency lists, the greedy left/right split, replacement.

The alphabet is split into a left class and a right class; pairs whose
first symbol is in the left class and second in the right class cannot
overlap, so all their occurrences are replaced simultaneously.  The greedy
split guarantees the replaced occurrences number at least
``ceil((|T| - 1) / 4)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .alphabet import AlphabetMap, radix_argsort
from .grammar import Slp
from .text import StaleTextError, WorkingText


@dataclass
class PairOccurrence:
    first: int  # working id
    second: int
    pos: int  # live ordinal of the first symbol


class PairAdjacency:
    """Right/left neighbour lists with per-pair occurrence lists.

    Built from one radix sort of the (first, second, position) records;
    occurrences of a distinct pair are stored contiguously in text order.
    Positions are live ordinals (index into the live sequence), with the
    raw cell index recoverable through ``live_pos``.
    """

    def __init__(self, text: WorkingText, amap: AlphabetMap):
        self.epoch = text.epoch
        self.base = amap.alias_base
        self.width = amap.next_working - self.base
        lv = text.live()
        self.live_syms = lv
        self.live_pos = text.live_positions()
        n = len(lv)
        if n >= 2 and (lv[1:] == lv[:-1]).any():
            raise ValueError(
                "equal adjacent symbols in text: block compression must run first"
            )
        if n < 2:
            self.pair_a = self.pair_b = np.empty(0, dtype=np.int64)
            self.pair_count = np.empty(0, dtype=np.int64)
            self.occ_start = np.zeros(1, dtype=np.int64)
            self.occurrences = np.empty(0, dtype=np.int64)
            self._left_order = np.empty(0, dtype=np.int64)
            return
        a = lv[:-1]
        b = lv[1:]
        order = radix_argsort([a - self.base, b - self.base], [self.width, self.width])
        a_sorted = a[order]
        b_sorted = b[order]
        self.occurrences = order  # live ordinal of the first symbol, grouped by pair
        new_pair = np.empty(n - 1, dtype=bool)
        new_pair[0] = True
        new_pair[1:] = (a_sorted[1:] != a_sorted[:-1]) | (b_sorted[1:] != b_sorted[:-1])
        starts = np.flatnonzero(new_pair)
        self.pair_a = a_sorted[starts]
        self.pair_b = b_sorted[starts]
        self.occ_start = np.append(starts, n - 1)
        self.pair_count = np.diff(self.occ_start)
        self._left_order = radix_argsort(
            [self.pair_b - self.base, self.pair_a - self.base], [self.width, self.width]
        )

    @property
    def total_occurrences(self) -> int:
        return int(self.pair_count.sum())

    def _right_slice(self, sym: int) -> slice:
        lo = int(np.searchsorted(self.pair_a, sym, side="left"))
        hi = int(np.searchsorted(self.pair_a, sym, side="right"))
        return slice(lo, hi)

    def _left_slice(self, sym: int) -> slice:
        sorted_b = self.pair_b[self._left_order]
        lo = int(np.searchsorted(sorted_b, sym, side="left"))
        hi = int(np.searchsorted(sorted_b, sym, side="right"))
        return slice(lo, hi)

    def right_of(self, sym: int) -> list[tuple[int, list[int]]]:
        """Neighbours b with ``sym b`` occurring, with live-ordinal positions."""
        out = []
        for i in range(*self._right_slice(sym).indices(len(self.pair_a))):
            occ = self.occurrences[self.occ_start[i] : self.occ_start[i + 1]]
            out.append((int(self.pair_b[i]), sorted(int(p) for p in occ)))
        return out

    def left_of(self, sym: int) -> list[tuple[int, list[int]]]:
        """Neighbours b with ``b sym`` occurring, with live-ordinal positions."""
        out = []
        for i in self._left_order[self._left_slice(sym)]:
            occ = self.occurrences[self.occ_start[i] : self.occ_start[i + 1]]
            out.append((int(self.pair_a[i]), sorted(int(p) for p in occ)))
        return out

    def pair_occurrences(self):
        """All occurrences, grouped by distinct pair in (first, second) order."""
        for i in range(len(self.pair_a)):
            a, b = int(self.pair_a[i]), int(self.pair_b[i])
            for p in self.occurrences[self.occ_start[i] : self.occ_start[i + 1]]:
                yield PairOccurrence(a, b, int(p))


def build_adjacency(text: WorkingText, amap: AlphabetMap) -> PairAdjacency:
    """Radix-sorted neighbour lists for every adjacent pair in the text."""
    return PairAdjacency(text, amap)


@dataclass
class Partition:
    """Disjoint left/right classes over the working interval, plus coverage."""

    base: int
    in_left: np.ndarray  # bool, indexed by working id - base
    in_right: np.ndarray
    count_left: np.ndarray
    count_right: np.ndarray
    cover_pre_swap: int = 0  # occurrences covered in either direction, before the swap
    cover_chosen: int = 0  # occurrences in left-class . right-class, after the swap
    swapped: bool = False

    @classmethod
    def from_sets(cls, base: int, width: int, left, right) -> "Partition":
        in_left = np.zeros(width, dtype=bool)
        in_right = np.zeros(width, dtype=bool)
        for s in left:
            in_left[s - base] = True
        for s in right:
            in_right[s - base] = True
        if (in_left & in_right).any():
            raise ValueError("left and right classes must be disjoint")
        zeros = np.zeros(width, dtype=np.int64)
        return cls(base, in_left, in_right, zeros, zeros.copy())

    def side_of(self, sym: int) -> str | None:
        off = sym - self.base
        if not 0 <= off < len(self.in_left):
            return None  # minted after this partition was built
        if self.in_left[off]:
            return "left"
        if self.in_right[off]:
            return "right"
        return None


def greedy_partition(adj: PairAdjacency, amap: AlphabetMap) -> Partition:
    """Deterministic greedy split of the working alphabet.

    Symbols are processed in ascending id; each goes left when its
    right-class adjacency count is at least its left-class one (ties go
    left), then the counters of its neighbours are bumped.  Afterwards the
    two classes are swapped when the opposite orientation covers strictly
    more occurrences.  Covered occurrences after the swap number at least
    ``ceil((|T| - 1) / 4)``.
    """
    base, width = adj.base, adj.width
    occurring = np.unique(adj.live_syms)
    count_left = [0] * width
    count_right = [0] * width
    side = [0] * width  # 0 unassigned, 1 left, 2 right
    if len(adj.pair_a):
        # Two cursor walks over the distinct pairs, sorted by first symbol
        # (right neighbours) and by second symbol (left neighbours); the
        # ascending symbol loop advances both monotonically, so each pair is
        # touched twice in total.
        ra = (adj.pair_a - base).tolist()
        rb = (adj.pair_b - base).tolist()
        rc = adj.pair_count.tolist()
        lorder = adj._left_order
        lb = (adj.pair_b[lorder] - base).tolist()
        la = (adj.pair_a[lorder] - base).tolist()
        lc = adj.pair_count[lorder].tolist()
        n_pairs = len(ra)
        i = j = 0
        for off in (occurring - base).tolist():
            if count_right[off] >= count_left[off]:
                side[off] = 1
                target = count_left
            else:
                side[off] = 2
                target = count_right
            while i < n_pairs and ra[i] == off:
                target[rb[i]] += rc[i]
                i += 1
            while j < n_pairs and lb[j] == off:
                target[la[j]] += lc[j]
                j += 1
    side_arr = np.asarray(side, dtype=np.int64)
    part = Partition(
        base,
        side_arr == 1,
        side_arr == 2,
        np.asarray(count_left, dtype=np.int64),
        np.asarray(count_right, dtype=np.int64),
    )
    # Ids in the interval that no longer occur in the text default to the
    # left class; they have no adjacencies, so the choice is inert.
    idle = side_arr == 0
    if idle.any():
        occurring_mask = np.zeros(width, dtype=bool)
        occurring_mask[occurring - base] = True
        part.in_left |= idle & ~occurring_mask
    lr = part.in_left[adj.pair_a - base] & part.in_right[adj.pair_b - base]
    rl = part.in_right[adj.pair_a - base] & part.in_left[adj.pair_b - base]
    cover_lr = int(adj.pair_count[lr].sum())
    cover_rl = int(adj.pair_count[rl].sum())
    part.cover_pre_swap = cover_lr + cover_rl
    if cover_rl > cover_lr:
        part.in_left, part.in_right = part.in_right, part.in_left
        part.count_left, part.count_right = part.count_right, part.count_left
        part.swapped = True
        part.cover_chosen = cover_rl
    else:
        part.cover_chosen = cover_lr
    return part


class PairCompression:
    """Outcome of one pair stage."""

    def __init__(self, occurrences_replaced: int, canon_a=None, canon_b=None, rule_ids=None):
        self.occurrences_replaced = occurrences_replaced
        self._canon_a = canon_a
        self._canon_b = canon_b
        self._rule_ids = rule_ids

    @property
    def symbol_of_pair(self) -> dict[tuple[int, int], int]:
        """(canonical first, canonical second) -> fresh canonical symbol."""
        if self._canon_a is None:
            return {}
        return {
            (int(a), int(b)): int(r)
            for a, b, r in zip(self._canon_a, self._canon_b, self._rule_ids)
        }


def compress_pairs(
    text: WorkingText,
    part: Partition,
    adj: PairAdjacency,
    grammar: Slp,
    amap: AlphabetMap,
) -> PairCompression:
    """Replace every occurrence of every left.right pair with a fresh symbol."""
    if adj.epoch != text.epoch:
        raise StaleTextError("adjacency positions predate the last compaction")
    if len(adj.pair_a) == 0:
        return PairCompression(0)
    selected = np.flatnonzero(
        part.in_left[adj.pair_a - part.base] & part.in_right[adj.pair_b - part.base]
    )
    if len(selected) == 0:
        return PairCompression(0)
    canon_a = amap.canonical_of_array(adj.pair_a[selected])
    canon_b = amap.canonical_of_array(adj.pair_b[selected])
    rule_ids = grammar.emit_pair_rules(canon_a, canon_b)
    fresh = amap.allocate_working(rule_ids)
    # Gather the occurrence slices of the selected pairs in one shot.
    counts = adj.pair_count[selected]
    starts = adj.occ_start[selected]
    offsets = np.cumsum(counts) - counts
    idx = np.arange(int(counts.sum()), dtype=np.int64) - np.repeat(offsets, counts) + np.repeat(starts, counts)
    occs = adj.occurrences[idx]
    fresh_per_occ = np.repeat(fresh, counts)
    # Distinct left.right pairs never overlap (the classes are disjoint), so
    # every adjacency position takes part in at most one replacement.
    picked = np.zeros(len(adj.live_syms), dtype=bool)
    picked[occs] = True
    assert not picked[occs + 1].any(), "overlapping pair replacements selected"
    text.replace_pairs_bulk(
        adj.live_pos[occs], adj.live_pos[occs + 1], fresh_per_occ
    )
    return PairCompression(len(occs), canon_a, canon_b, rule_ids)
