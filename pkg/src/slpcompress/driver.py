"""Phase orchestration: plain and improved (min-over-phases) compression.

A phase renames the alphabet onto a dense interval, compresses all maximal
blocks, then compresses the pairs selected by the greedy split; the text
shrinks to at most ``3/4 |T| + 1/4`` per phase, so the total work is linear
in the input.  Improved mode additionally prices stopping at each phase
(remaining text emitted verbatim plus the rules so far) and returns the
cheapest snapshot.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .alphabet import AlphabetMap, ingest, rename_dense
from .blocks import compress_blocks, scan_blocks
from .grammar import GrammarStats, Slp, prune_unreachable
from .pairs import build_adjacency, compress_pairs, greedy_partition
from .text import WorkingText


@dataclass
class PhaseTrace:
    phase: int
    live_before: int
    live_after_blocks: int
    blocks_compressed: int
    pairs_compressed: int
    cover_pre_swap: int
    cover_chosen: int
    live_after: int
    rules_before: int
    size_before: int
    rules_after: int
    size_after: int

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class BestSnapshot:
    size: int
    phase: int
    text_canonical: np.ndarray  # live text at the snapshot, as canonical ids
    rule_watermark: int


@dataclass
class CompressionResult:
    slp: Slp
    stats: GrammarStats
    traces: list[PhaseTrace]
    mode: str
    best_phase: int | None = None
    snapshot_copy_work: int = 0


def run_phase(
    text: WorkingText, amap: AlphabetMap, grammar: Slp, phase_index: int
) -> PhaseTrace:
    """Execute one block-then-pair compression phase over the text."""
    if len(text) < 2:
        raise ValueError("phases need at least two live symbols")
    live_before = len(text)
    rules_before = len(grammar.rules)
    size_before = grammar.size
    rename_dense(text, amap)
    scan = scan_blocks(text, amap)
    blocks = compress_blocks(text, scan, grammar, amap)
    live_after_blocks = len(text)
    adj = build_adjacency(text, amap)
    part = greedy_partition(adj, amap)
    pairs = compress_pairs(text, part, adj, grammar, amap)
    text.compact()
    return PhaseTrace(
        phase=phase_index,
        live_before=live_before,
        live_after_blocks=live_after_blocks,
        blocks_compressed=blocks.blocks_replaced,
        pairs_compressed=pairs.occurrences_replaced,
        cover_pre_swap=part.cover_pre_swap,
        cover_chosen=part.cover_chosen,
        live_after=len(text),
        rules_before=rules_before,
        size_before=size_before,
        rules_after=len(grammar.rules),
        size_after=grammar.size,
    )


def compress(data, mode: str = "improved", kind: str | None = None) -> CompressionResult:
    """Compress bytes or a token sequence into a straight-line program.

    ``mode`` is ``"plain"`` (run to a single symbol, emit everything) or
    ``"improved"`` (also track the cost of stopping at every phase and
    return the cheapest snapshot grammar).
    """
    if mode not in ("plain", "improved"):
        raise ValueError(f"unknown mode {mode!r}")
    text, amap = ingest(data, kind=kind)
    grammar = Slp(kind=amap.input_kind, terminals=amap.terminal_of_id)
    input_length = len(text)
    traces: list[PhaseTrace] = []
    phase_table: list[tuple[int, int]] = []
    best: BestSnapshot | None = None
    copy_work = 0
    while len(text) > 1:
        phase_table.append((len(text), grammar.size))
        if mode == "improved":
            candidate = len(text) + grammar.size
            if best is None or candidate < best.size:
                snapshot = amap.canonical_of_array(text.live()).copy()
                best = BestSnapshot(candidate, len(traces), snapshot, len(grammar.rules))
                copy_work += len(snapshot)
        traces.append(run_phase(text, amap, grammar, len(traces) + 1))
    phase_table.append((len(text), grammar.size))
    final_canonical = amap.canonical_of_array(text.live()).copy()
    if mode == "improved":
        candidate = len(text) + grammar.size
        if best is None or candidate < best.size:
            best = BestSnapshot(candidate, len(traces), final_canonical, len(grammar.rules))
            copy_work += len(final_canonical)
        slp = _snapshot_grammar(grammar, best)
        best_phase = best.phase
    else:
        if len(final_canonical):
            grammar.start = grammar.emit_rule_array(final_canonical)
        slp = grammar
        best_phase = None
    stats = GrammarStats(
        input_length=input_length,
        terminal_count=slp.terminal_count,
        rule_count=len(slp.rules),
        size=slp.size,
        phase_count=len(traces),
        phase_table=phase_table,
    )
    return CompressionResult(slp, stats, traces, mode, best_phase, copy_work)


def _snapshot_grammar(grammar: Slp, best: BestSnapshot) -> Slp:
    """Materialize the grammar for a snapshot: truncated rules + text rule."""
    slp = Slp(grammar.kind, grammar.terminals, grammar.rules[: best.rule_watermark])
    if len(best.text_canonical):
        slp.start = slp.emit_rule_array(best.text_canonical)
    return prune_unreachable(slp)
