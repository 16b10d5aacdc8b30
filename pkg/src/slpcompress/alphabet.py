"""Dense integer alphabets and the bounded-key record sorter.

Every stage of the compressor works on integer symbol ids, and two id
spaces coexist:

* canonical ids: ``0..sigma-1`` are the input terminals, ``sigma, sigma+1,
  ...`` are grammar rules, allocated densely in rule-emission order.
  Grammar bodies contain canonical ids only, and a canonical id never
  changes meaning.
* working ids: the symbols stored in the mutable text.  At the start of
  each phase the working alphabet is renamed onto a fresh contiguous
  interval (so records over it can be bucket sorted); fresh symbols minted
  during a phase extend that interval.  ``AlphabetMap`` keeps the alias
  table from working ids back to canonical ids.

Working ids come from a single monotone counter, so at any moment the live
working alphabet is a known interval ``[base, next_working)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .text import WorkingText

TOKEN_VALUE_CEILING = 2**32 - 1

_DIGIT_BITS = 16
_DIGIT_MASK = (1 << _DIGIT_BITS) - 1
_MAX_KEY_BITS = 48


class InputFormatError(ValueError):
    """Raised when raw input cannot be turned into a symbol sequence."""


@dataclass
class SortRecord:
    """A record with a small lexicographic key and an opaque payload."""

    key: tuple[int, ...]
    payload: object = None


def radix_argsort(columns: Sequence[np.ndarray], bounds: Sequence[int]) -> np.ndarray:
    """Stable lexicographic argsort of parallel integer key columns.

    ``columns[0]`` is the most significant key component.  Every value must
    satisfy ``0 <= value < bound`` for its column; bounds above 2**48 are
    rejected (keys are decomposed into 16-bit digits, at most three per
    component).  Runs in time linear in the number of entries plus the
    digit-bucket width.
    """
    if len(columns) != len(bounds):
        raise ValueError("one bound per key column required")
    if not columns:
        return np.empty(0, dtype=np.int64)
    n = len(columns[0])
    order = np.arange(n, dtype=np.int64)
    # Least-significant column first; within a column, least-significant
    # 16-bit digit first.  Each pass is a stable counting sort.
    for col, bound in zip(reversed(columns), reversed(bounds)):
        if bound < 1:
            raise ValueError(f"bound must be positive, got {bound}")
        if bound - 1 > (1 << _MAX_KEY_BITS) - 1:
            raise ValueError(f"key component bound {bound} wider than 48 bits")
        if len(col) != n:
            raise ValueError("key columns must have equal length")
        col = np.asarray(col, dtype=np.int64)
        if n and (col.min() < 0 or col.max() >= bound):
            raise ValueError("key component out of bound")
        digits = max(1, (int(bound - 1).bit_length() + _DIGIT_BITS - 1) // _DIGIT_BITS)
        for d in range(digits):
            digit = (col[order] >> (d * _DIGIT_BITS)) & _DIGIT_MASK
            order = order[np.argsort(digit.astype(np.uint16), kind="stable")]
    return order


def radix_sort(records: Sequence[SortRecord], bounds: Sequence[int]) -> list[SortRecord]:
    """Stable sort of ``records`` by their key tuples.

    All keys must have ``len(bounds)`` components, each below its bound.
    """
    records = list(records)
    if not records:
        return []
    width = len(bounds)
    for rec in records:
        if len(rec.key) != width:
            raise ValueError(f"key {rec.key} does not match {width} bounds")
    columns = [
        np.fromiter((rec.key[i] for rec in records), dtype=np.int64, count=len(records))
        for i in range(width)
    ]
    order = radix_argsort(columns, bounds)
    return [records[i] for i in order]


@dataclass
class AlphabetMap:
    """Terminal table plus the working-id -> canonical-id alias table.

    ``alias_base`` and ``alias_table`` together form the alias function:
    working id ``w`` (with ``alias_base <= w < next_working``) is an alias
    of canonical id ``alias_table[w - alias_base]``.  The table is total
    and injective over the current working interval; entries for dead
    intervals are dropped when the alphabet is renamed.
    """

    input_kind: str  # "bytes" | "tokens"
    terminal_of_id: list[int]
    alias_base: int = 0
    alias_table: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))

    def __post_init__(self):
        if self.input_kind not in ("bytes", "tokens"):
            raise ValueError(f"unknown input kind {self.input_kind!r}")
        if self.alias_table.size == 0 and self.terminal_of_id:
            # Fresh map: working ids coincide with the canonical terminals.
            self.alias_table = np.arange(len(self.terminal_of_id), dtype=np.int64)

    @property
    def terminal_count(self) -> int:
        return len(self.terminal_of_id)

    @property
    def next_working(self) -> int:
        return self.alias_base + len(self.alias_table)

    def canonical_of(self, working_id: int) -> int:
        off = working_id - self.alias_base
        if not 0 <= off < len(self.alias_table):
            raise ValueError(f"working id {working_id} outside current interval")
        return int(self.alias_table[off])

    def canonical_of_array(self, working_ids: np.ndarray) -> np.ndarray:
        off = np.asarray(working_ids, dtype=np.int64) - self.alias_base
        if off.size and (off.min() < 0 or off.max() >= len(self.alias_table)):
            raise ValueError("working id outside current interval")
        return self.alias_table[off]

    def allocate_working(self, canonical_ids: np.ndarray) -> np.ndarray:
        """Mint fresh working ids aliased to the given canonical ids."""
        canonical_ids = np.asarray(canonical_ids, dtype=np.int64)
        start = self.next_working
        self.alias_table = np.concatenate([self.alias_table, canonical_ids])
        return np.arange(start, start + len(canonical_ids), dtype=np.int64)

    def _rebase(self, base: int, table: np.ndarray) -> None:
        self.alias_base = base
        self.alias_table = table


def ingest(
    raw, kind: str | None = None, token_ceiling: int = TOKEN_VALUE_CEILING
) -> tuple[WorkingText, AlphabetMap]:
    """Turn raw input into a working text over dense terminal ids.

    Terminals are numbered in first-occurrence order.  ``raw`` is either a
    byte string or a sequence of unsigned token values; token values above
    ``token_ceiling`` are rejected.
    """
    if kind is None:
        kind = "bytes" if isinstance(raw, (bytes, bytearray, memoryview)) else "tokens"
    if kind == "bytes":
        arr = np.frombuffer(bytes(raw), dtype=np.uint8).astype(np.int64)
        ids, terminals = _first_occurrence_ids(arr, domain=256)
    elif kind == "tokens":
        arr = np.asarray(list(raw), dtype=np.int64) if not isinstance(raw, np.ndarray) else raw.astype(np.int64)
        if arr.size and (arr.min() < 0 or arr.max() > token_ceiling):
            raise InputFormatError(
                f"token values must lie in [0, {token_ceiling}]"
            )
        ids, terminals = _first_occurrence_ids(arr, domain=None)
    else:
        raise ValueError(f"unknown input kind {kind!r}")
    return WorkingText(ids), AlphabetMap(input_kind=kind, terminal_of_id=terminals)


def _first_occurrence_order(first_pos: np.ndarray) -> np.ndarray:
    """Offsets of occurring symbols, ordered by their (distinct) first position.

    Scatters each offset into a position-indexed table and compacts, so the
    ordering costs O(text length + table width) without a sort.
    """
    occurring = np.flatnonzero(first_pos >= 0)
    by_position = np.full(int(first_pos.max()) + 1 if len(occurring) else 0, -1, dtype=np.int64)
    by_position[first_pos[occurring]] = occurring
    return by_position[by_position >= 0]


def _first_occurrence_ids(arr: np.ndarray, domain: int | None) -> tuple[np.ndarray, list[int]]:
    """Renumber values to 0..k-1 in order of first occurrence."""
    n = len(arr)
    if n == 0:
        return np.empty(0, dtype=np.int64), []
    if domain is not None:
        # Bounded domain: direct position table.  Writing positions in
        # reverse makes the surviving entry the first occurrence.
        first_pos = np.full(domain, -1, dtype=np.int64)
        first_pos[arr[::-1]] = np.arange(n - 1, -1, -1, dtype=np.int64)
        values = _first_occurrence_order(first_pos)
        lut = np.empty(domain, dtype=np.int64)
        lut[values] = np.arange(len(values), dtype=np.int64)
        return lut[arr], [int(v) for v in values]
    uniq, first_idx = np.unique(arr, return_index=True)
    order = np.argsort(first_idx, kind="stable")
    rank_to_id = np.empty(len(uniq), dtype=np.int64)
    rank_to_id[order] = np.arange(len(uniq), dtype=np.int64)
    ids = rank_to_id[np.searchsorted(uniq, arr)]
    return ids, [int(v) for v in uniq[order]]


def rename_dense(text: WorkingText, amap: AlphabetMap) -> None:
    """Rename the symbols occurring in ``text`` onto a fresh dense interval.

    Symbols are numbered in first-occurrence order, alias entries are
    carried over so canonical ids stay recoverable, and the dead part of
    the alias table is dropped.  Runs in time linear in the text length
    plus the width of the current working interval.
    """
    live = text.live()
    if len(live) == 0:
        return
    base = amap.alias_base
    width = amap.next_working - base
    off = live - base
    if off.min() < 0 or off.max() >= width:
        raise ValueError("text symbol outside the current working interval")
    first_pos = np.full(width, -1, dtype=np.int64)
    first_pos[off[::-1]] = np.arange(len(off) - 1, -1, -1, dtype=np.int64)
    old_offsets = _first_occurrence_order(first_pos)
    new_base = amap.next_working
    new_table = amap.alias_table[old_offsets].copy()
    lut = np.full(width, -1, dtype=np.int64)
    lut[old_offsets] = np.arange(new_base, new_base + len(old_offsets), dtype=np.int64)
    text._remap_live(lut, base)
    amap._rebase(new_base, new_table)
