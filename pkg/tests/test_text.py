import random

import numpy as np
import pytest

from slpcompress.text import TOMBSTONE, WorkingText


class TestReplacePair:
    def test_basic(self):
        t = WorkingText([0, 1, 2])
        t.replace_pair(0, 9)
        assert t.to_list() == [9, 2]
        assert len(t) == 2

    def test_adjacency_skips_tombstones(self):
        # Build [0, dead, 1, 2], then the pair at position 2 is (1, 2).
        t = WorkingText([0, 5, 1, 2])
        t.replace_pair(0, 0)
        assert t.cells[1] == TOMBSTONE
        t.replace_pair(2, 9)
        assert t.to_list() == [0, 9]

    def test_disjoint_replacements_commute(self):
        a = WorkingText([0, 1, 2, 3])
        b = WorkingText([0, 1, 2, 3])
        a.replace_pair(0, 8)
        a.replace_pair(2, 9)
        b.replace_pair(2, 9)
        b.replace_pair(0, 8)
        assert a.to_list() == b.to_list() == [8, 9]

    def test_dead_position_rejected(self):
        t = WorkingText([0, 1, 2])
        t.replace_pair(1, 9)
        with pytest.raises(ValueError):
            t.replace_pair(2, 5)  # tombstone
        with pytest.raises(ValueError):
            t.replace_pair(1, 5)  # last live cell, no successor


class TestReplaceRun:
    def test_basic(self):
        t = WorkingText([3, 3, 3, 5])
        t.replace_run(0, 3, 8)
        assert t.to_list() == [8, 5]

    def test_full_text_run(self):
        t = WorkingText([4, 4])
        t.replace_run(0, 2, 8)
        assert t.to_list() == [8]

    def test_length_one_rejected(self):
        t = WorkingText([4, 4])
        with pytest.raises(ValueError):
            t.replace_run(0, 1, 8)

    def test_non_uniform_rejected(self):
        t = WorkingText([4, 5, 4])
        with pytest.raises(ValueError):
            t.replace_run(0, 2, 8)

    def test_run_too_short_rejected(self):
        t = WorkingText([4, 4])
        with pytest.raises(ValueError):
            t.replace_run(0, 3, 8)


class TestCompact:
    def test_removes_tombstones_preserves_order(self):
        t = WorkingText([0, 1, 2, 2, 3])
        t.replace_pair(0, 9)
        t.replace_run(2, 2, 7)
        t.compact()
        assert t.to_list() == [9, 7, 3]
        assert len(t.cells) == 3

    def test_bumps_epoch(self):
        t = WorkingText([0, 1])
        e = t.epoch
        t.compact()
        assert t.epoch == e + 1


def _random_script(rng, oracle):
    """Pick a valid op against the plain-list oracle."""
    ops = []
    if len(oracle) >= 2:
        ops.append("pair")
        runs = [
            (i, length)
            for i in range(len(oracle))
            for length in (2, 3)
            if i + length <= len(oracle) and len(set(oracle[i : i + length])) == 1
        ]
        if runs:
            ops.append("run")
    if not ops:
        return None
    op = rng.choice(ops)
    if op == "pair":
        i = rng.randrange(len(oracle) - 1)
        return ("pair", i)
    i, length = runs[rng.randrange(len(runs))]
    return ("run", i, length)


def test_mixed_ops_match_list_oracle():
    rng = random.Random(1234)
    for _ in range(60):
        n = rng.randrange(2, 40)
        syms = [rng.randrange(4) for _ in range(n)]
        text = WorkingText(syms)
        oracle = list(syms)
        fresh = 100
        for _ in range(rng.randrange(1, 12)):
            script = _random_script(rng, oracle)
            if script is None:
                break
            positions = text.live_positions()
            if script[0] == "pair":
                i = script[1]
                text.replace_pair(int(positions[i]), fresh)
                oracle[i : i + 2] = [fresh]
            else:
                i, length = script[1], script[2]
                text.replace_run(int(positions[i]), length, fresh)
                oracle[i : i + length] = [fresh]
            fresh += 1
            assert text.to_list() == oracle
        text.compact()
        assert text.to_list() == oracle


def test_bulk_runs_equal_scalar_sequence():
    rng = np.random.default_rng(5)
    for _ in range(30):
        n = int(rng.integers(2, 60))
        syms = rng.integers(0, 3, n)
        a = WorkingText(syms)
        b = WorkingText(syms)
        # maximal runs of length >= 2
        starts, lengths = [], []
        i = 0
        lst = list(map(int, syms))
        while i < n:
            j = i
            while j < n and lst[j] == lst[i]:
                j += 1
            if j - i >= 2:
                starts.append(i)
                lengths.append(j - i)
            i = j
        fresh = [1000 + k for k in range(len(starts))]
        a.replace_runs_bulk(np.array(starts, dtype=np.int64), np.array(lengths, dtype=np.int64), np.array(fresh, dtype=np.int64))
        for s, l, f in zip(starts, lengths, fresh):
            b.replace_run(s, l, f)
        assert a.to_list() == b.to_list()


def test_bulk_pairs_equal_scalar_sequence():
    syms = [0, 1, 2, 3, 4, 5]
    a = WorkingText(syms)
    b = WorkingText(syms)
    firsts = np.array([0, 2, 4], dtype=np.int64)
    seconds = firsts + 1
    fresh = np.array([10, 11, 12], dtype=np.int64)
    a.replace_pairs_bulk(firsts, seconds, fresh)
    for f, s in zip(firsts, fresh):
        b.replace_pair(int(f), int(s))
    assert a.to_list() == b.to_list() == [10, 11, 12]
