"""Shared generators and string-level oracles for the rewriting-lab tests."""

import random

from slpcompress.rewriting import Ref, Run, RunSlp


def random_runslp(rng: random.Random, max_rules=30, alphabet=4, expansion_cap=10**6,
                  big_runs=False) -> RunSlp:
    """A random valid run-length SLP with bounded expansion.

    Rules mostly chain onto their predecessor (the natural SLP shape), so
    instances are deep; references that would push a rule past the
    expansion cap degrade to runs.  Every nonterminal is reachable from the
    start, so string-level oracles on the derived word see the same
    occurrences the rewrites touch.
    """
    m = rng.randrange(1, max_rules + 1)
    bodies: list[list] = []
    lengths: list[int] = []
    for i in range(m):
        body: list = []
        refs = 0
        total = 0
        # Chain onto the predecessor most of the time so instances are deep.
        want_refs = []
        if i > 0 and rng.random() < 0.9:
            want_refs.append(i - 1 if rng.random() < 0.75 else rng.randrange(i))
            if rng.random() < 0.35:
                want_refs.append(rng.randrange(i))
        for _ in range(rng.randrange(1, 6)):
            if want_refs and refs < 2 and rng.random() < 0.5:
                j = want_refs.pop()
                # keep headroom for the trailing runs of this body
                if total + lengths[j] <= expansion_cap - 256:
                    body.append(Ref(j))
                    refs += 1
                    total += lengths[j]
                    continue
            mult = rng.randrange(1, 4)
            if big_runs and rng.random() < 0.15:
                mult = rng.randrange(4, 40)
            body.append(Run(rng.randrange(alphabet), mult))
            total += mult
        while want_refs and refs < 2:
            j = want_refs.pop()
            if total + lengths[j] <= expansion_cap - 256:
                body.append(Ref(j))
                refs += 1
                total += lengths[j]
        bodies.append(body)
        lengths.append(total)
    slp = RunSlp(_reachable_only(bodies), alphabet_size=alphabet)
    assert slp.eval_lengths()[slp.start] <= expansion_cap
    slp.validate()
    return slp


def _reachable_only(bodies):
    m = len(bodies)
    keep = [False] * m
    keep[m - 1] = True
    for i in range(m - 1, -1, -1):
        if keep[i]:
            for item in bodies[i]:
                if isinstance(item, Ref):
                    keep[item.index] = True
    new_index = {}
    out = []
    for i in range(m):
        if keep[i]:
            new_index[i] = len(out)
            out.append(
                [Ref(new_index[it.index]) if isinstance(it, Ref) else it for it in bodies[i]]
            )
    return out


def pair_oracle(symbols: list[int], a: int, b: int, c: int) -> list[int]:
    """Replace every occurrence of ab by c, scanning left to right."""
    out = []
    i = 0
    while i < len(symbols):
        if i + 1 < len(symbols) and symbols[i] == a and symbols[i + 1] == b:
            out.append(c)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return out


def block_oracle(symbols: list[int], letter: int, fresh: dict[int, int]) -> list[int]:
    """Replace every maximal run letter^len (len >= 2) by fresh[len]."""
    out = []
    i = 0
    while i < len(symbols):
        j = i
        while j < len(symbols) and symbols[j] == symbols[i]:
            j += 1
        if symbols[i] == letter and j - i >= 2:
            out.append(fresh[j - i])
        else:
            out.extend(symbols[i:j])
        i = j
    return out


def maximal_block_lengths(symbols: list[int], letter: int) -> list[int]:
    """Distinct lengths >= 2 of maximal runs of ``letter``, ascending."""
    lengths = set()
    i = 0
    while i < len(symbols):
        j = i
        while j < len(symbols) and symbols[j] == symbols[i]:
            j += 1
        if symbols[i] == letter and j - i >= 2:
            lengths.add(j - i)
        i = j
    return sorted(lengths)
