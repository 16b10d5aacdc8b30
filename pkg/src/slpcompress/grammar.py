"""The output straight-line program: storage, expansion, (de)serialization.

Rule bodies are arbitrary non-empty sequences of symbol ids (not forced
binary: power-chain and snapshot rules are naturally n-ary).  Ids are
topological: terminals are ``0..terminal_count-1`` and rule ``i`` has id
``terminal_count + i`` with every body symbol strictly smaller, so exactly
one string is derived.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_EXPANSION = 2**63 - 1
_CHUNK = 1 << 16  # rules expanding to at most this many symbols are memoized


class GrammarError(ValueError):
    """Structurally invalid or malformed grammar."""


class ExpansionOverflow(GrammarError):
    """Expansion length does not fit in an unsigned 63-bit count."""


class Slp:
    """A straight-line program over byte or token terminals.

    ``start`` is a symbol id, or ``None`` for the reserved empty-string
    grammar.  Instances are append-only while being built (``emit_rule``)
    and treated as immutable afterwards.
    """

    def __init__(self, kind: str, terminals: list[int], rules=None, start: int | None = None):
        if kind not in ("bytes", "tokens"):
            raise GrammarError(f"unknown terminal kind {kind!r}")
        self.kind = kind
        self.terminals = list(terminals)
        self.rules: list[tuple[int, ...]] = (
            [body if isinstance(body, tuple) else tuple(body) for body in rules]
            if rules
            else []
        )
        self.start = start
        self.size = sum(len(body) for body in self.rules)

    @property
    def terminal_count(self) -> int:
        return len(self.terminals)

    @property
    def symbol_count(self) -> int:
        return self.terminal_count + len(self.rules)

    def emit_rule(self, body) -> int:
        """Append a rule; returns its id.  Body symbols must already exist."""
        body = tuple(int(s) for s in body)
        if not body:
            raise GrammarError("empty rule body")
        rule_id = self.symbol_count
        for s in body:
            if not 0 <= s < rule_id:
                raise GrammarError(f"rule {rule_id} references undefined symbol {s}")
        self.rules.append(body)
        self.size += len(body)
        return rule_id

    def emit_pair_rules(self, firsts: np.ndarray, seconds: np.ndarray) -> np.ndarray:
        """Append one two-symbol rule per (first, second); returns the ids.

        Bulk equivalent of ``emit_rule((a, b))`` per pair.
        """
        firsts = np.asarray(firsts, dtype=np.int64)
        seconds = np.asarray(seconds, dtype=np.int64)
        base = self.symbol_count
        if len(firsts) and (
            firsts.min() < 0 or seconds.min() < 0
            or firsts.max() >= base or seconds.max() >= base
        ):
            raise GrammarError("pair rule references an undefined symbol")
        self.rules.extend(zip(firsts.tolist(), seconds.tolist()))
        self.size += 2 * len(firsts)
        return np.arange(base, base + len(firsts), dtype=np.int64)

    def emit_rule_array(self, body: np.ndarray) -> int:
        """``emit_rule`` for a long numpy body (vectorized bounds check)."""
        body = np.asarray(body, dtype=np.int64)
        if body.size == 0:
            raise GrammarError("empty rule body")
        rule_id = self.symbol_count
        if body.min() < 0 or body.max() >= rule_id:
            raise GrammarError(f"rule {rule_id} references an undefined symbol")
        self.rules.append(tuple(body.tolist()))
        self.size += len(body)
        return rule_id

    def body_of(self, symbol: int) -> tuple[int, ...]:
        return self.rules[symbol - self.terminal_count]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Slp)
            and self.kind == other.kind
            and self.terminals == other.terminals
            and self.rules == other.rules
            and self.start == other.start
        )


def validate(slp: Slp) -> None:
    """Raise ``GrammarError`` unless the grammar is sound.

    Checks topological ids, non-empty bodies, the start symbol, and that
    the length table is computable without 63-bit overflow.
    """
    check_structure(slp)
    symbol_lengths(slp)  # raises ExpansionOverflow on unrepresentable lengths


def check_structure(slp: Slp) -> None:
    """Structural soundness only; expansion lengths may still overflow."""
    if slp.kind == "bytes":
        for v in slp.terminals:
            if not 0 <= v <= 255:
                raise GrammarError(f"byte terminal {v} out of range")
    else:
        for v in slp.terminals:
            if not 0 <= v:
                raise GrammarError(f"negative token terminal {v}")
    sigma = slp.terminal_count
    for i, body in enumerate(slp.rules):
        rule_id = sigma + i
        if not body:
            raise GrammarError(f"rule {rule_id} has an empty body")
        for s in body:
            if not 0 <= s < rule_id:
                raise GrammarError(f"rule {rule_id} references symbol {s} (not yet defined)")
    if slp.start is not None and not 0 <= slp.start < slp.symbol_count:
        raise GrammarError(f"start symbol {slp.start} out of range")


def symbol_lengths(slp: Slp) -> list[int]:
    """Expansion length of every symbol; raises on 63-bit overflow."""
    lengths = [1] * slp.terminal_count
    for i, body in enumerate(slp.rules):
        total = 0
        for s in body:
            total += lengths[s]
        if total > MAX_EXPANSION:
            raise ExpansionOverflow(
                f"rule {slp.terminal_count + i} expands to more than 2**63-1 symbols"
            )
        lengths.append(total)
    return lengths


def expansion_length(slp: Slp) -> int:
    """Length of the derived string, from the length table alone."""
    if slp.start is None:
        return 0
    return symbol_lengths(slp)[slp.start]


def expand_ids(slp: Slp, symbol: int | None = None) -> np.ndarray:
    """Derive the terminal-id sequence of ``symbol`` (default: start).

    Iterative (no recursion-depth limit); rules with small expansions are
    memoized so the work is linear in the output.
    """
    if symbol is None:
        symbol = slp.start
    if symbol is None:
        return np.empty(0, dtype=np.int64)
    lengths = symbol_lengths(slp)
    sigma = slp.terminal_count
    rules = slp.rules
    memo: dict[int, list[int]] = {}

    def small(sym: int) -> list[int]:
        # Mark the needed small rules by one downward sweep, then fill the
        # memo in ascending id order (bodies reference smaller ids only).
        if sym < sigma:
            return [sym]
        needed = {sym}
        stack = [sym]
        while stack:
            for s in rules[stack.pop() - sigma]:
                if s >= sigma and s not in needed and s not in memo:
                    needed.add(s)
                    stack.append(s)
        for t in sorted(needed):
            flat: list[int] = []
            for s in rules[t - sigma]:
                if s < sigma:
                    flat.append(s)
                else:
                    flat += memo[s]
            memo[t] = flat
        return memo[sym]

    out: list[int] = []
    stack = [symbol]
    while stack:
        s = stack.pop()
        if s < sigma:
            out.append(s)
        elif lengths[s] <= _CHUNK:
            out += memo[s] if s in memo else small(s)
        else:
            stack.extend(reversed(rules[s - sigma]))
    return np.asarray(out, dtype=np.int64) if out else np.empty(0, dtype=np.int64)


def expand(slp: Slp, symbol: int | None = None):
    """Derive the raw byte string or token list of ``symbol``."""
    ids = expand_ids(slp, symbol)
    if slp.kind == "bytes":
        lut = np.asarray(slp.terminals, dtype=np.uint8)
        return lut[ids].tobytes() if len(ids) else b""
    lut = np.asarray(slp.terminals, dtype=np.int64)
    return [int(v) for v in lut[ids]] if len(ids) else []


def grammar_depth(slp: Slp) -> int:
    """Longest rule chain from the start symbol (terminals have depth 0)."""
    if slp.start is None:
        return 0
    depth = [0] * slp.terminal_count
    for body in slp.rules:
        depth.append(1 + max(depth[s] for s in body))
    return depth[slp.start]


def prune_unreachable(slp: Slp) -> Slp:
    """Keep exactly the rules reachable from the start symbol."""
    sigma = slp.terminal_count
    keep = np.zeros(len(slp.rules), dtype=bool)
    if slp.start is not None and slp.start >= sigma:
        # Bodies reference smaller ids, so one descending sweep suffices.
        keep[slp.start - sigma] = True
        for i in range(slp.start - sigma, -1, -1):
            if keep[i]:
                for s in slp.rules[i]:
                    if s >= sigma:
                        keep[s - sigma] = True
    if keep.all():
        return Slp(slp.kind, slp.terminals, slp.rules, slp.start)
    new_id = np.full(slp.symbol_count, -1, dtype=np.int64)
    new_id[:sigma] = np.arange(sigma)
    next_id = sigma
    for i in range(len(slp.rules)):
        if keep[i]:
            new_id[sigma + i] = next_id
            next_id += 1
    rules = [
        tuple(int(new_id[s]) for s in body)
        for i, body in enumerate(slp.rules)
        if keep[i]
    ]
    start = None if slp.start is None else int(new_id[slp.start])
    return Slp(slp.kind, slp.terminals, rules, start)


def serialize(slp: Slp) -> str:
    """Render the grammar in the line-oriented text format (LF endings)."""
    lines = ["SLP 1", f"terminals {slp.terminal_count} {slp.kind}"]
    if slp.terminal_count:
        lines.append(" ".join(str(v) for v in slp.terminals))
    lines.append(f"rules {len(slp.rules)}")
    for body in slp.rules:
        lines.append(f"{len(body)} " + " ".join(str(s) for s in body))
    lines.append("start empty" if slp.start is None else f"start {slp.start}")
    return "\n".join(lines) + "\n"


def deserialize(data: str) -> Slp:
    """Parse the text format; raises ``GrammarError`` on any malformation."""
    lines = data.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    it = iter(lines)

    def next_line(what: str) -> str:
        try:
            return next(it)
        except StopIteration:
            raise GrammarError(f"truncated grammar file: missing {what}") from None

    if next_line("header") != "SLP 1":
        raise GrammarError("bad header: expected 'SLP 1'")
    parts = next_line("terminals line").split()
    if len(parts) != 3 or parts[0] != "terminals":
        raise GrammarError("bad terminals line")
    try:
        sigma = int(parts[1])
    except ValueError:
        raise GrammarError("bad terminal count") from None
    kind = parts[2]
    if kind not in ("bytes", "tokens") or sigma < 0:
        raise GrammarError("bad terminals line")
    terminals: list[int] = []
    if sigma:
        try:
            terminals = [int(v) for v in next_line("terminal values").split()]
        except ValueError:
            raise GrammarError("non-numeric terminal value") from None
        if len(terminals) != sigma:
            raise GrammarError(f"expected {sigma} terminal values, got {len(terminals)}")
    parts = next_line("rules line").split()
    if len(parts) != 2 or parts[0] != "rules":
        raise GrammarError("bad rules line")
    try:
        rule_count = int(parts[1])
    except ValueError:
        raise GrammarError("bad rule count") from None
    if rule_count < 0:
        raise GrammarError("bad rule count")
    rules = []
    for _ in range(rule_count):
        fields = next_line("rule body").split()
        try:
            nums = [int(v) for v in fields]
        except ValueError:
            raise GrammarError("non-numeric rule body") from None
        if not nums or nums[0] != len(nums) - 1:
            raise GrammarError("rule body length prefix mismatch")
        rules.append(tuple(nums[1:]))
    fields = next_line("start line").split()
    if len(fields) != 2 or fields[0] != "start":
        raise GrammarError("bad start line")
    if fields[1] == "empty":
        start = None
    else:
        try:
            start = int(fields[1])
        except ValueError:
            raise GrammarError("bad start symbol") from None
    try:
        next(it)
    except StopIteration:
        pass
    else:
        raise GrammarError("trailing data after start line")
    slp = Slp(kind, terminals, rules, start)
    check_structure(slp)
    return slp


def dump(slp: Slp, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize(slp))


def load(path) -> Slp:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return deserialize(fh.read())


@dataclass
class GrammarStats:
    """Size accounting for one compression run."""

    input_length: int
    terminal_count: int
    rule_count: int
    size: int
    phase_count: int
    # (live symbols, cumulative representation cost) at the top of each
    # phase, plus a final row after the loop; row i is the cost of stopping
    # at phase i and emitting the remaining text verbatim.
    phase_table: list[tuple[int, int]] = field(default_factory=list)
