"""The mutable working string: tombstone deletion, per-phase compaction.

Replacements mark trailing cells dead instead of shifting the array; one
compaction per phase removes the tombstones.  Positions are raw indices
into the cell array and are only valid until the next compaction, which is
enforced with an epoch counter.
"""

from __future__ import annotations

import numpy as np

TOMBSTONE = -1


class StaleTextError(RuntimeError):
    """A position from before the last compaction was used."""


class WorkingText:
    def __init__(self, symbols):
        self.cells = np.asarray(symbols, dtype=np.int64).copy()
        if self.cells.ndim != 1:
            raise ValueError("working text must be one-dimensional")
        if self.cells.size and self.cells.min() < 0:
            raise ValueError("symbols must be non-negative")
        self.live_count = int(self.cells.size)
        self.epoch = 0

    def __len__(self) -> int:
        return self.live_count

    def live(self) -> np.ndarray:
        """The live symbol sequence, in order."""
        if self.live_count == len(self.cells):
            return self.cells
        return self.cells[self.cells != TOMBSTONE]

    def live_positions(self) -> np.ndarray:
        """Raw indices of the live cells, in order."""
        if self.live_count == len(self.cells):
            return np.arange(len(self.cells), dtype=np.int64)
        return np.flatnonzero(self.cells != TOMBSTONE)

    def to_list(self) -> list[int]:
        return [int(s) for s in self.live()]

    def _check_live(self, at: int) -> None:
        if not 0 <= at < len(self.cells) or self.cells[at] == TOMBSTONE:
            raise ValueError(f"position {at} is not a live cell")

    def _next_live(self, at: int) -> int:
        j = at + 1
        while j < len(self.cells) and self.cells[j] == TOMBSTONE:
            j += 1
        if j >= len(self.cells):
            raise ValueError(f"no live cell after position {at}")
        return j

    def replace_pair(self, at: int, fresh: int) -> None:
        """Replace the live cell at ``at`` and the next live cell by ``fresh``."""
        self._check_live(at)
        j = self._next_live(at)
        self.cells[at] = fresh
        self.cells[j] = TOMBSTONE
        self.live_count -= 1

    def replace_run(self, at: int, length: int, fresh: int) -> None:
        """Replace ``length`` equal consecutive live cells starting at ``at``."""
        if length < 2:
            raise ValueError("runs shorter than 2 are never replaced")
        self._check_live(at)
        sym = self.cells[at]
        pos = at
        tail = []
        for _ in range(length - 1):
            pos = self._next_live(pos)
            if self.cells[pos] != sym:
                raise ValueError(f"cells from {at} do not hold a uniform run of {length}")
            tail.append(pos)
        self.cells[at] = fresh
        self.cells[tail] = TOMBSTONE
        self.live_count -= length - 1

    def compact(self) -> None:
        """Drop tombstones; invalidates all outstanding positions."""
        if self.live_count != len(self.cells):
            self.cells = self.cells[self.cells != TOMBSTONE]
        self.epoch += 1

    # Bulk variants used by the phase pipeline.  Semantically these equal a
    # sequence of the scalar calls above (property-tested); they exist so a
    # phase costs a handful of vector operations instead of |T| Python ones.

    def replace_runs_bulk(self, starts: np.ndarray, lengths: np.ndarray, fresh: np.ndarray) -> None:
        """Replace disjoint uniform runs of contiguous live cells.

        Requires a compacted layout under each run (no tombstones inside
        ``[start, start+length)``), which holds during the block stage.
        """
        starts = np.asarray(starts, dtype=np.int64)
        lengths = np.asarray(lengths, dtype=np.int64)
        fresh = np.asarray(fresh, dtype=np.int64)
        if len(starts) == 0:
            return
        if lengths.min() < 2:
            raise ValueError("runs shorter than 2 are never replaced")
        ends = starts + lengths
        if ends.max() > len(self.cells):
            raise ValueError("run extends past the end of the text")
        # Mark cells strictly inside each run dead via a difference array.
        dead = np.zeros(len(self.cells) + 1, dtype=np.int64)
        np.add.at(dead, starts + 1, 1)
        np.add.at(dead, ends, -1)
        inside = np.cumsum(dead[:-1]) > 0
        if (self.cells[inside] == TOMBSTONE).any() or (self.cells[starts] == TOMBSTONE).any():
            raise ValueError("bulk run replacement over non-contiguous live cells")
        self.cells[inside] = TOMBSTONE
        self.cells[starts] = fresh
        self.live_count -= int((lengths - 1).sum())

    def replace_pairs_bulk(self, firsts: np.ndarray, seconds: np.ndarray, fresh: np.ndarray) -> None:
        """Replace disjoint live pairs given raw positions of both cells."""
        firsts = np.asarray(firsts, dtype=np.int64)
        seconds = np.asarray(seconds, dtype=np.int64)
        fresh = np.asarray(fresh, dtype=np.int64)
        if len(firsts) == 0:
            return
        if (self.cells[firsts] == TOMBSTONE).any() or (self.cells[seconds] == TOMBSTONE).any():
            raise ValueError("bulk pair replacement touching dead cells")
        self.cells[firsts] = fresh
        self.cells[seconds] = TOMBSTONE
        self.live_count -= len(firsts)

    def _remap_live(self, lut: np.ndarray, base: int) -> None:
        """Apply ``sym -> lut[sym - base]`` to every live cell."""
        if self.live_count == len(self.cells):
            self.cells = lut[self.cells - base]
        else:
            mask = self.cells != TOMBSTONE
            self.cells[mask] = lut[self.cells[mask] - base]
