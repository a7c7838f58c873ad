"""Map raw records to integer items in a declared domain.

Modes:

``text-prefix``
    Lower-cased alphabetic words; the first ``prefix`` letters in base 26
    (lexicographic order). Words shorter than ``prefix`` are skipped.
``ipv4-prefix``
    Dotted quads; the first ``prefix`` bytes as a big-endian integer.
``decimal-bucket``
    Numbers rounded to the nearest ``step`` inside ``[lo, hi]``.
``timestamp-tuple``
    ISO timestamps as (weekday, hour, minute, second), Monday midnight first.

Text is tokenised per line; other modes read one record per line from
``column`` of a ``delimiter``-separated line. Blank lines and lines starting
with ``#`` are ignored.
"""
from __future__ import annotations

import re
from datetime import datetime

import numpy as np

from .errors import BadParams, ParseError
from .stream import ArrayStream, write_stream

MODES = ("text-prefix", "ipv4-prefix", "decimal-bucket", "timestamp-tuple")
_WORD = re.compile(r"[a-z]+")


def text_item(word: str, prefix: int = 3) -> int | None:
    w = word.lower()
    if len(w) < prefix or not w[:prefix].isascii() or not w[:prefix].isalpha():
        return None
    v = 0
    for ch in w[:prefix]:
        v = v * 26 + (ord(ch) - 97)
    return v + 1


def ipv4_item(text: str, prefix: int = 3) -> int:
    parts = text.strip().split(".")
    if len(parts) != 4:
        raise ValueError(f"not a dotted quad: {text!r}")
    octets = [int(p) for p in parts]
    if any(not 0 <= o <= 255 for o in octets):
        raise ValueError(f"octet out of range in {text!r}")
    v = 0
    for o in octets[:prefix]:
        v = v * 256 + o
    return v + 1


def decimal_item(text: str, step: float, lo: float, hi: float) -> int:
    value = float(text)
    steps = round(value / step)
    lo_steps = round(lo / step)
    hi_steps = round(hi / step)
    if not lo_steps <= steps <= hi_steps:
        raise ValueError(f"value {value} outside [{lo}, {hi}]")
    return steps - lo_steps + 1


def timestamp_item(text: str) -> int:
    ts = datetime.fromisoformat(text.strip())
    return ((ts.weekday() * 24 + ts.hour) * 60 + ts.minute) * 60 + ts.second + 1


def domain_size(mode: str, prefix: int = 3, step: float = 0.01, lo: float = -90.0, hi: float = 90.0) -> int:
    if mode == "text-prefix":
        return 26**prefix
    if mode == "ipv4-prefix":
        return 256**prefix
    if mode == "decimal-bucket":
        return round(hi / step) - round(lo / step) + 1
    if mode == "timestamp-tuple":
        return 7 * 24 * 3600
    raise BadParams(f"unknown ingest mode {mode!r}")


def ingest(raw_path, mode: str, out_path=None, prefix: int = 3, step: float = 0.01,
           lo: float = -90.0, hi: float = 90.0, column: int = 0, delimiter: str = ",",
           skip_header: bool = False) -> ArrayStream:
    """Parse ``raw_path`` into an insertion-only stream; optionally write it out."""
    if mode not in MODES:
        raise BadParams(f"unknown ingest mode {mode!r}")
    if mode in ("text-prefix", "ipv4-prefix") and not 1 <= prefix <= (4 if mode == "ipv4-prefix" else 6):
        raise BadParams("prefix length out of range")
    if mode == "decimal-bucket" and (step <= 0 or hi < lo):
        raise BadParams("need step > 0 and lo <= hi")
    n = domain_size(mode, prefix, step, lo, hi)
    items: list[int] = []
    with open(raw_path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            if skip_header and lineno == 1:
                continue
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if mode == "text-prefix":
                for w in _WORD.findall(line.lower()):
                    x = text_item(w, prefix)
                    if x is not None:
                        items.append(x)
                continue
            fields = line.split(delimiter) if delimiter else [line]
            if column >= len(fields):
                raise ParseError(f"no column {column}", lineno)
            field_ = fields[column].strip()
            try:
                if mode == "ipv4-prefix":
                    items.append(ipv4_item(field_, prefix))
                elif mode == "decimal-bucket":
                    items.append(decimal_item(field_, step, lo, hi))
                else:
                    items.append(timestamp_item(field_))
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
    stream = ArrayStream(n, np.array(items, dtype=np.int64))
    if out_path is not None:
        write_stream(out_path, stream)
    return stream
