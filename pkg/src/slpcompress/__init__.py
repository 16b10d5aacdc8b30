"""Grammar-based compression via iterated block and pair compression.

Builds a straight-line program of size O(g log(N/g)) for an input string
in linear time, plus a verification lab for rewriting arbitrary SLPs under
the same compression steps.
"""

from .alphabet import AlphabetMap, InputFormatError, SortRecord, ingest, radix_sort, rename_dense
from .driver import CompressionResult, PhaseTrace, compress, run_phase
from .grammar import (
    ExpansionOverflow,
    GrammarError,
    GrammarStats,
    Slp,
    deserialize,
    dump,
    expand,
    expansion_length,
    load,
    prune_unreachable,
    serialize,
    validate,
)
from .text import WorkingText

__all__ = [
    "AlphabetMap",
    "CompressionResult",
    "ExpansionOverflow",
    "GrammarError",
    "GrammarStats",
    "InputFormatError",
    "PhaseTrace",
    "Slp",
    "SortRecord",
    "WorkingText",
    "compress",
    "deserialize",
    "dump",
    "expand",
    "expansion_length",
    "ingest",
    "load",
    "prune_unreachable",
    "radix_sort",
    "rename_dense",
    "run_phase",
    "serialize",
    "validate",
]
