"""Executable lab for rewriting arbitrary SLPs under compression steps.

The text-level compressor replaces pairs and blocks in a string; the same
replacements can be mirrored in any straight-line program generating that
string, provided the occurrences that straddle a nonterminal boundary
("crossing" occurrences) are first pushed into rule bodies.  This module
implements those rewrites on run-length SLPs and meters the credit they
issue, so the bookkeeping can be machine-checked on random instances:

* ``pop_letters`` uncrosses every left-class/right-class pair by popping a
  single boundary letter per rule end, preserving the derived string.
* ``compress_noncrossing_pair`` replaces explicit occurrences of a
  non-crossing pair.
* ``pop_boundary_runs`` pops entire uniform prefixes/suffixes so no letter
  has a crossing block afterwards.
* ``compress_noncrossing_blocks`` replaces explicit maximal runs of one
  letter.

Rule bodies store terminal runs ``(symbol, multiplicity)``, so popped
prefixes of exponential length stay a single item.  Nonterminals whose
derivation becomes empty are unlinked from every body and marked removed;
indices are never renumbered.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

MAX_NONTERMINALS = 10**4
MAX_EVAL_LENGTH = 10**9
DEFAULT_EXPAND_CAP = 10**6


@dataclass(frozen=True)
class Run:
    sym: int
    mult: int


@dataclass(frozen=True)
class Ref:
    index: int


Item = Run | Ref


class RunSlpError(ValueError):
    pass


def _merge_append(items: list[Item], item: Item) -> None:
    """Append keeping runs maximal (adjacent items never share a symbol)."""
    if isinstance(item, Run):
        if item.mult <= 0:
            return
        if items and isinstance(items[-1], Run) and items[-1].sym == item.sym:
            items[-1] = Run(item.sym, items[-1].mult + item.mult)
            return
    items.append(item)


def _normalized(items: Iterable[Item]) -> list[Item]:
    out: list[Item] = []
    for item in items:
        _merge_append(out, item)
    return out


class RunSlp:
    """Run-length SLP: bodies of (symbol, multiplicity) runs and references.

    Nonterminals are indexed ``0..m-1``; references point strictly downward
    and the last nonterminal is the start (it is never popped or removed).
    """

    def __init__(self, bodies: Iterable[Iterable[Item]], alphabet_size: int | None = None):
        self.bodies: list[list[Item]] = [_normalized(b) for b in bodies]
        self.removed: list[bool] = [False] * len(self.bodies)
        if alphabet_size is None:
            alphabet_size = 0
            for body in self.bodies:
                for item in body:
                    if isinstance(item, Run):
                        alphabet_size = max(alphabet_size, item.sym + 1)
        self.alphabet_size = alphabet_size

    @property
    def start(self) -> int:
        return len(self.bodies) - 1

    def copy(self) -> "RunSlp":
        dup = RunSlp.__new__(RunSlp)
        dup.bodies = [list(b) for b in self.bodies]
        dup.removed = list(self.removed)
        dup.alphabet_size = self.alphabet_size
        return dup

    def validate(self) -> None:
        m = len(self.bodies)
        if m > MAX_NONTERMINALS:
            raise RunSlpError(f"too many nonterminals ({m} > {MAX_NONTERMINALS})")
        for i, body in enumerate(self.bodies):
            refs = 0
            prev_run_sym = None
            for item in body:
                if isinstance(item, Run):
                    if item.mult < 1:
                        raise RunSlpError(f"rule {i}: run multiplicity below 1")
                    if not 0 <= item.sym < self.alphabet_size:
                        raise RunSlpError(f"rule {i}: letter {item.sym} outside alphabet")
                    if prev_run_sym == item.sym:
                        raise RunSlpError(f"rule {i}: adjacent runs share symbol {item.sym}")
                    prev_run_sym = item.sym
                else:
                    prev_run_sym = None
                    refs += 1
                    if not 0 <= item.index < i:
                        raise RunSlpError(f"rule {i}: reference {item.index} not strictly below")
                    if self.removed[item.index]:
                        raise RunSlpError(f"rule {i}: reference to removed nonterminal {item.index}")
                    if not self.bodies[item.index]:
                        raise RunSlpError(f"rule {i}: reference to empty nonterminal {item.index}")
            if refs > 2:
                raise RunSlpError(f"rule {i}: more than two nonterminals in body")
        if self.removed and self.removed[self.start]:
            raise RunSlpError("start nonterminal is removed")
        self.eval_lengths()

    def eval_lengths(self) -> list[int]:
        lengths = []
        for i, body in enumerate(self.bodies):
            total = 0
            for item in body:
                total += item.mult if isinstance(item, Run) else lengths[item.index]
            if total > MAX_EVAL_LENGTH:
                raise RunSlpError(f"rule {i} derives more than {MAX_EVAL_LENGTH} letters")
            lengths.append(total)
        return lengths

    def eval(self, index: int | None = None, cap: int = DEFAULT_EXPAND_CAP) -> list[int]:
        """The derived letter sequence of a nonterminal (default: start)."""
        if index is None:
            index = self.start
        if index < 0:
            return []
        lengths = self.eval_lengths()
        if lengths[index] > cap:
            raise RunSlpError(f"expansion of {index} exceeds cap {cap}")
        memo: dict[int, list[int]] = {}

        def flat(i: int) -> list[int]:
            work = [i]
            while work:
                t = work[-1]
                if t in memo:
                    work.pop()
                    continue
                missing = [
                    it.index
                    for it in self.bodies[t]
                    if isinstance(it, Ref) and it.index not in memo
                ]
                if missing:
                    work.extend(missing)
                    continue
                out: list[int] = []
                for it in self.bodies[t]:
                    if isinstance(it, Run):
                        out.extend([it.sym] * it.mult)
                    else:
                        out.extend(memo[it.index])
                memo[t] = out
                work.pop()
            return memo[i]

        return flat(index)


def first_last_letters(slp: RunSlp) -> tuple[list[int | None], list[int | None], list[bool]]:
    """Bottom-up (first letter, last letter, derives-empty) per nonterminal."""
    first: list[int | None] = []
    last: list[int | None] = []
    empty: list[bool] = []
    for body in slp.bodies:
        f = l = None
        for item in body:
            sym = item.sym if isinstance(item, Run) else first[item.index]
            if sym is not None:
                f = sym
                break
        for item in reversed(body):
            sym = item.sym if isinstance(item, Run) else last[item.index]
            if sym is not None:
                l = sym
                break
        first.append(f)
        last.append(l)
        empty.append(f is None)
    return first, last, empty


@dataclass
class CreditMeter:
    """Counts credit issued/released by rewriting operations.

    Two units of credit ride on every explicit letter occurrence; popped
    run items likewise carry two units each (a popped run is compressed to
    a single letter immediately after).  ``per_rule`` holds the new
    letter-occurrence (or run-item) counts of the most recent operation.
    """

    issued: int = 0
    released: int = 0
    per_rule: dict[int, int] = field(default_factory=dict)

    def begin_op(self) -> None:
        self.per_rule = {}

    def issue_into(self, rule: int, items: int = 1) -> None:
        self.issued += 2 * items
        self.per_rule[rule] = self.per_rule.get(rule, 0) + items

    def release(self, letters: int) -> None:
        self.released += 2 * letters


@dataclass(frozen=True)
class CrossingWitness:
    """One reason a pair (or block, when left == right) is crossing.

    ``kind`` is ``"prefix"`` (letter before a nonterminal whose derivation
    starts with the right letter), ``"suffix"`` (nonterminal deriving the
    left letter followed by an explicit letter) or ``"bridge"`` (two
    adjacent nonterminals).
    """

    kind: str
    rule: int
    item_index: int
    left: int
    right: int


def _boundary_witnesses(slp: RunSlp) -> Iterable[CrossingWitness]:
    """All (left letter, right letter) boundaries that involve a reference."""
    first, last, _ = first_last_letters(slp)
    for j, body in enumerate(slp.bodies):
        if slp.removed[j]:
            continue
        for k in range(len(body) - 1):
            a, b = body[k], body[k + 1]
            if isinstance(a, Run) and isinstance(b, Ref):
                if first[b.index] is not None:
                    yield CrossingWitness("prefix", j, k, a.sym, first[b.index])
            elif isinstance(a, Ref) and isinstance(b, Run):
                if last[a.index] is not None:
                    yield CrossingWitness("suffix", j, k, last[a.index], b.sym)
            elif isinstance(a, Ref) and isinstance(b, Ref):
                if last[a.index] is not None and first[b.index] is not None:
                    yield CrossingWitness("bridge", j, k, last[a.index], first[b.index])


def crossing_report(slp: RunSlp, left_set, right_set) -> list[CrossingWitness]:
    """Witnesses of crossing pairs ab with a in the left set, b in the right."""
    left_set, right_set = set(left_set), set(right_set)
    return [
        w
        for w in _boundary_witnesses(slp)
        if w.left in left_set and w.right in right_set
    ]


def crossing_blocks_report(slp: RunSlp) -> list[CrossingWitness]:
    """Witnesses of letters whose maximal blocks straddle a reference."""
    return [w for w in _boundary_witnesses(slp) if w.left == w.right]


def _replace_ref(
    slp: RunSlp,
    target: int,
    before: Run | None,
    after: Run | None,
    delete: bool,
    meter: CreditMeter | None,
    count_items: bool,
) -> None:
    """Rewrite every ``Ref(target)`` as ``before Ref(target) after``.

    With ``delete`` the reference itself is dropped (its derivation became
    empty).  ``count_items`` selects whether the meter counts inserted run
    items (block popping) or individual letters (single-letter popping).
    """
    for j in range(target + 1, len(slp.bodies)):
        if slp.removed[j]:
            continue
        body = slp.bodies[j]
        if not any(isinstance(it, Ref) and it.index == target for it in body):
            continue
        out: list[Item] = []
        inserted = 0
        for item in body:
            if isinstance(item, Ref) and item.index == target:
                if before is not None:
                    _merge_append(out, before)
                    inserted += 1 if count_items else before.mult
                if not delete:
                    out.append(item)
                if after is not None:
                    _merge_append(out, after)
                    inserted += 1 if count_items else after.mult
            else:
                _merge_append(out, item)
        slp.bodies[j] = out
        if meter is not None and inserted:
            meter.issue_into(j, inserted)


def pop_letters(slp: RunSlp, left_set, right_set, meter: CreditMeter | None = None) -> RunSlp:
    """Pop one boundary letter per rule end so no left.right pair crosses.

    First pass: every nonterminal (except the start) whose body begins with
    a right-class letter loses that letter, which reappears before each of
    its occurrences.  Second pass mirrors it for left-class suffix letters.
    The derived string of the start nonterminal is unchanged, and at most
    four new letter occurrences land in any rule.
    """
    left_set, right_set = set(left_set), set(right_set)
    if left_set & right_set:
        raise ValueError("left and right classes must be disjoint")
    g = slp.copy()
    if meter is not None:
        meter.begin_op()
    for i in range(g.start):
        if g.removed[i] or not g.bodies[i]:
            continue
        head = g.bodies[i][0]
        if isinstance(head, Run) and head.sym in right_set:
            g.bodies[i][0] = Run(head.sym, head.mult - 1)
            if g.bodies[i][0].mult == 0:
                g.bodies[i].pop(0)
            if meter is not None:
                meter.release(1)
            emptied = not g.bodies[i]
            _replace_ref(g, i, Run(head.sym, 1), None, emptied, meter, count_items=False)
            if emptied:
                g.removed[i] = True
    for i in range(g.start):
        if g.removed[i] or not g.bodies[i]:
            continue
        tail = g.bodies[i][-1]
        if isinstance(tail, Run) and tail.sym in left_set:
            g.bodies[i][-1] = Run(tail.sym, tail.mult - 1)
            if g.bodies[i][-1].mult == 0:
                g.bodies[i].pop()
            if meter is not None:
                meter.release(1)
            emptied = not g.bodies[i]
            _replace_ref(g, i, None, Run(tail.sym, 1), emptied, meter, count_items=False)
            if emptied:
                g.removed[i] = True
    return g


def compress_noncrossing_pair(
    slp: RunSlp, a: int, b: int, c: int, meter: CreditMeter | None = None
) -> RunSlp:
    """Replace every explicit occurrence of the non-crossing pair ab by c."""
    if a == b:
        raise ValueError("pair letters must differ")
    if c in (a, b):
        raise ValueError("replacement letter must be fresh")
    witnesses = crossing_report(slp, {a}, {b})
    if witnesses:
        raise ValueError(f"pair ({a}, {b}) is crossing: {witnesses[0]}")
    g = slp.copy()
    if meter is not None:
        meter.begin_op()
    replaced = 0
    for j, body in enumerate(g.bodies):
        if g.removed[j]:
            continue
        out: list[Item] = []
        for item in body:
            if (
                isinstance(item, Run)
                and item.sym == b
                and out
                and isinstance(out[-1], Run)
                and out[-1].sym == a
            ):
                # Exactly one ab sits at the boundary of maximal runs.
                head = out.pop()
                if head.mult > 1:
                    out.append(Run(a, head.mult - 1))
                _merge_append(out, Run(c, 1))
                if item.mult > 1:
                    _merge_append(out, Run(b, item.mult - 1))
                replaced += 1
            else:
                _merge_append(out, item)
        g.bodies[j] = out
    if meter is not None:
        meter.release(2 * replaced)  # four units per occurrence; two stay on c
    g.alphabet_size = max(g.alphabet_size, c + 1)
    return g


def _first_letter(slp: RunSlp, index: int) -> int | None:
    body = slp.bodies[index]
    while body:
        item = body[0]
        if isinstance(item, Run):
            return item.sym
        body = slp.bodies[item.index]
    return None


def _last_letter(slp: RunSlp, index: int) -> int | None:
    body = slp.bodies[index]
    while body:
        item = body[-1]
        if isinstance(item, Run):
            return item.sym
        body = slp.bodies[item.index]
    return None


def pop_boundary_runs(slp: RunSlp, meter: CreditMeter | None = None) -> RunSlp:
    """Pop the whole uniform prefix and suffix of every non-start nonterminal.

    Afterwards no letter has a crossing block.  Each popped run reappears
    as a single run item around the occurrences, so at most four new run
    items land in any rule.  A nonterminal deriving a uniform string loses
    its entire body and is removed.
    """
    g = slp.copy()
    if meter is not None:
        meter.begin_op()
    for i in range(g.start):
        if g.removed[i] or not g.bodies[i]:
            continue
        body = g.bodies[i]
        # Once nonterminals below i have popped, the uniform prefix and
        # suffix of the derivation sit explicitly at the body's ends.
        head = body[0]
        assert isinstance(head, Run), "prefix not explicit when popping runs"
        a = head.sym
        prefix = 0
        while body and isinstance(body[0], Run) and body[0].sym == a:
            prefix += body.pop(0).mult
        if body and isinstance(body[0], Ref):
            assert _first_letter(g, body[0].index) != a, "prefix extends into a reference"
        suffix = 0
        b = None
        if body:
            tail = body[-1]
            assert isinstance(tail, Run), "suffix not explicit when popping runs"
            b = tail.sym
            while body and isinstance(body[-1], Run) and body[-1].sym == b:
                suffix += body.pop().mult
            if body and isinstance(body[-1], Ref):
                assert _last_letter(g, body[-1].index) != b, "suffix extends into a reference"
        if meter is not None:
            meter.release(prefix + suffix)
        emptied = not body
        _replace_ref(
            g,
            i,
            Run(a, prefix) if prefix else None,
            Run(b, suffix) if suffix else None,
            emptied,
            meter,
            count_items=True,
        )
        if emptied:
            g.removed[i] = True
    return g


def explicit_block_lengths(slp: RunSlp, letter: int) -> list[int]:
    """Distinct lengths (>= 2) of explicit runs of ``letter``, ascending."""
    lengths = set()
    for j, body in enumerate(slp.bodies):
        if slp.removed[j]:
            continue
        for item in body:
            if isinstance(item, Run) and item.sym == letter and item.mult >= 2:
                lengths.add(item.mult)
    return sorted(lengths)


def compress_noncrossing_blocks(
    slp: RunSlp,
    letter: int,
    fresh: Mapping[int, int],
    meter: CreditMeter | None = None,
) -> RunSlp:
    """Replace every explicit maximal run ``letter^len`` (len >= 2) by
    ``fresh[len]``.  The letter must have no crossing blocks; symbols
    introduced here are not themselves compressed.
    """
    bad = [w for w in crossing_blocks_report(slp) if w.left == letter]
    if bad:
        raise ValueError(f"letter {letter} has a crossing block: {bad[0]}")
    g = slp.copy()
    if meter is not None:
        meter.begin_op()
    top = g.alphabet_size
    for j, body in enumerate(g.bodies):
        if g.removed[j]:
            continue
        out: list[Item] = []
        for item in body:
            if isinstance(item, Run) and item.sym == letter and item.mult >= 2:
                try:
                    sym = fresh[item.mult]
                except KeyError:
                    raise ValueError(
                        f"no fresh symbol supplied for block length {item.mult}"
                    ) from None
                if meter is not None:
                    meter.release(item.mult)
                _merge_append(out, Run(sym, 1))
                top = max(top, sym + 1)
            else:
                _merge_append(out, item)
        g.bodies[j] = out
    g.alphabet_size = top
    return g


def serialize_runslp(slp: RunSlp) -> str:
    """Text form: the grammar format with run items rendered ``sym^mult``.

    Removed nonterminals are compacted away (they occur in no body, so the
    derived string is unchanged)."""
    live = [i for i in range(len(slp.bodies)) if not slp.removed[i]]
    new_index = {old: new for new, old in enumerate(live)}
    sigma = slp.alphabet_size
    lines = ["SLP 1", f"terminals {sigma} tokens"]
    if sigma:
        lines.append(" ".join(str(v) for v in range(sigma)))
    lines.append(f"rules {len(live)}")
    for old in live:
        parts = []
        for item in slp.bodies[old]:
            if isinstance(item, Run):
                parts.append(str(item.sym) if item.mult == 1 else f"{item.sym}^{item.mult}")
            else:
                parts.append(str(sigma + new_index[item.index]))
        lines.append(f"{len(parts)} " + " ".join(parts))
    lines.append("start empty" if not live else f"start {sigma + new_index[live[-1]]}")
    return "\n".join(lines) + "\n"


def deserialize_runslp(data: str) -> RunSlp:
    lines = data.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    it = iter(lines)

    def next_line(what: str) -> str:
        try:
            return next(it)
        except StopIteration:
            raise RunSlpError(f"truncated run-SLP file: missing {what}") from None

    def to_int(tok: str, what: str) -> int:
        try:
            return int(tok)
        except ValueError:
            raise RunSlpError(f"non-numeric {what}: {tok!r}") from None

    if next_line("header") != "SLP 1":
        raise RunSlpError("bad header: expected 'SLP 1'")
    parts = next_line("terminals line").split()
    if len(parts) != 3 or parts[0] != "terminals" or parts[2] != "tokens":
        raise RunSlpError("bad terminals line")
    sigma = to_int(parts[1], "terminal count")
    if sigma:
        values = next_line("terminal values").split()
        if values != [str(v) for v in range(sigma)]:
            raise RunSlpError("run-SLP terminals must be the identity alphabet")
    parts = next_line("rules line").split()
    if len(parts) != 2 or parts[0] != "rules":
        raise RunSlpError("bad rules line")
    count = to_int(parts[1], "rule count")
    bodies: list[list[Item]] = []
    for i in range(count):
        fields = next_line("rule body").split()
        if not fields or to_int(fields[0], "item count") != len(fields) - 1:
            raise RunSlpError("rule item-count prefix mismatch")
        body: list[Item] = []
        for tok in fields[1:]:
            if "^" in tok:
                sym_s, mult_s = tok.split("^", 1)
                sym = to_int(sym_s, "run symbol")
                mult = to_int(mult_s, "run multiplicity")
                if sym >= sigma:
                    raise RunSlpError("references cannot carry a multiplicity")
                if mult < 1:
                    raise RunSlpError(f"run multiplicity {mult} below 1")
                body.append(Run(sym, mult))
            else:
                v = to_int(tok, "symbol")
                if v < 0:
                    raise RunSlpError(f"negative symbol {v}")
                body.append(Run(v, 1) if v < sigma else Ref(v - sigma))
        bodies.append(body)
    fields = next_line("start line").split()
    if len(fields) != 2 or fields[0] != "start":
        raise RunSlpError("bad start line")
    if fields[1] == "empty":
        if count:
            raise RunSlpError("empty start with rules present")
    elif to_int(fields[1], "start symbol") != sigma + count - 1:
        raise RunSlpError("start must be the last nonterminal")
    slp = RunSlp(bodies, alphabet_size=sigma)
    slp.validate()
    return slp
