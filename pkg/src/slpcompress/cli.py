"""Command-line front end: compress, decompress, stats, verify."""

from __future__ import annotations

import argparse
import json
import sys

from . import grammar as gr
from .alphabet import InputFormatError
from .driver import compress

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_BAD_INPUT = 2
EXIT_WRITE_FAILURE = 3
EXIT_OVERFLOW = 4


def _read_bytes(path: str) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


def _parse_tokens(data: bytes) -> list[int]:
    tokens = []
    for tok in data.split():
        try:
            tokens.append(int(tok))
        except ValueError:
            raise InputFormatError(f"non-numeric token {tok[:20]!r}") from None
        if tokens[-1] < 0:
            raise InputFormatError("negative token value")
    return tokens


def cmd_compress(args) -> int:
    try:
        raw = _read_bytes(args.input)
        data = raw if args.input_kind == "bytes" else _parse_tokens(raw)
        result = compress(data, mode=args.mode, kind=args.input_kind)
    except (OSError, InputFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    try:
        gr.dump(result.slp, args.output)
        if args.trace:
            with open(args.trace, "w", encoding="utf-8") as fh:
                for trace in result.traces:
                    fh.write(json.dumps(trace.as_dict()) + "\n")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_WRITE_FAILURE
    st = result.stats
    ratio = st.input_length / st.size if st.size else 1.0
    print(
        f"N={st.input_length} sigma={st.terminal_count} phases={st.phase_count} "
        f"rules={st.rule_count} size={st.size} ratio={ratio:.3f}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_decompress(args) -> int:
    try:
        slp = gr.load(args.input)
        data = gr.expand(slp)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except gr.ExpansionOverflow as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    except gr.GrammarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    try:
        with open(args.output, "wb") as fh:
            if slp.kind == "bytes":
                fh.write(data)
            elif data:
                fh.write((" ".join(str(v) for v in data) + "\n").encode("ascii"))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_WRITE_FAILURE
    return EXIT_OK


def cmd_stats(args) -> int:
    try:
        slp = gr.load(args.input)
    except (OSError, gr.GrammarError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    try:
        length = str(gr.expansion_length(slp))
    except gr.ExpansionOverflow:
        length = ">=2^63"
    print(f"rules {len(slp.rules)}")
    print(f"size {slp.size}")
    print(f"depth {gr.grammar_depth(slp)}")
    print(f"expansion {length}")
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        slp = gr.load(args.grammar)
        raw = _read_bytes(args.original)
        original = raw if slp.kind == "bytes" else _parse_tokens(raw)
        derived = gr.expand(slp)
    except (OSError, gr.GrammarError, InputFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    if derived == original:
        return EXIT_OK
    print("mismatch: expansion differs from original", file=sys.stderr)
    return EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slpcompress",
        description="Grammar-based compression into straight-line programs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compress", help="compress a file into a grammar")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--mode", choices=["plain", "improved"], default="improved")
    p.add_argument(
        "--input", dest="input_kind", choices=["bytes", "tokens"], default="bytes",
        help="treat the file as raw bytes or whitespace-separated unsigned tokens",
    )
    p.add_argument("--trace", default=None, help="write per-phase JSON lines here")
    p.add_argument(
        "--seed", type=int, default=None,
        help="reserved; the algorithm is deterministic and ignores it",
    )
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("decompress", help="expand a grammar back to the input")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_decompress)

    p = sub.add_parser("stats", help="print grammar statistics")
    p.add_argument("input")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("verify", help="check a grammar against the original file")
    p.add_argument("grammar")
    p.add_argument("original")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
