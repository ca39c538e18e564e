"""Serialization: PGM images, PBM watermarks, scenario documents and reports.

Writers emit one canonical ASCII form (P2/P1, single spaces, one row per
line, trailing newline) so that equal values give byte-identical output.
Readers also accept binary P5 and netpbm ``#`` comments.  Every parse
failure raises a ``FormatError`` subclass carrying a line and/or offset.
"""

from __future__ import annotations

import re
from typing import Iterator

from .core import MAX_DEPTH, BitMatrix, CheckBit, PixelImage
from .errors import (
    DimensionMismatch,
    GrammarError,
    InvariantViolation,
    MalformedHeader,
    MalformedPayload,
    MissingSection,
    NonBinaryDigit,
    PixelOutOfRange,
    TrailingData,
    TruncatedPayload,
)
from .harness import COMPONENTS, CounterexampleReport, Scenario, SweepReport
from .scheme import EmbedRule

_WS = b" \t\r\n\v\f"


def _line_of(data: bytes, offset: int) -> int:
    return data.count(b"\n", 0, offset) + 1


class _Tokens:
    """Whitespace/comment tokenizer over netpbm bytes that remembers offsets."""

    def __init__(self, data: bytes, pos: int = 0):
        self.data = data
        self.pos = pos

    def _skip(self) -> None:
        data, n = self.data, len(self.data)
        while self.pos < n:
            c = data[self.pos]
            if c in _WS:
                self.pos += 1
            elif c == 0x23:  # '#'
                nl = data.find(b"\n", self.pos)
                self.pos = n if nl < 0 else nl + 1
            else:
                return

    def next(self, single_char: bool = False) -> tuple[bytes, int] | None:
        self._skip()
        start = self.pos
        if start >= len(self.data):
            return None
        if single_char:
            self.pos += 1
        else:
            while self.pos < len(self.data) and self.data[self.pos] not in _WS and self.data[self.pos] != 0x23:
                self.pos += 1
        return self.data[start:self.pos], start

    def at_end(self) -> bool:
        self._skip()
        return self.pos >= len(self.data)


def _dec(text: bytes | str) -> int:
    # Caps absurdly long numerals instead of tripping the int/str digit limit.
    digits = text.lstrip(b"0" if isinstance(text, bytes) else "0")
    return int(digits or b"0") if len(digits) <= 18 else 10**18


def _header_int(tok: _Tokens, what: str, exc=MalformedHeader) -> int:
    got = tok.next()
    if got is None:
        raise exc(f"missing {what}", offset=tok.pos, line=_line_of(tok.data, tok.pos))
    text, off = got
    if not text.isdigit():
        raise exc(f"{what} is not a decimal integer: {text[:16]!r}", offset=off, line=_line_of(tok.data, off))
    return _dec(text)


def _magic(data: bytes, allowed: tuple[bytes, ...]) -> bytes:
    if not isinstance(data, (bytes, bytearray, memoryview)):
        raise TypeError("expected bytes")
    head = bytes(data[:2])
    if head not in allowed or (len(data) > 2 and data[2] not in _WS and data[2] != 0x23):
        raise MalformedHeader(f"bad magic {bytes(data[:3])!r}, expected one of {allowed}", offset=0, line=1)
    return head


def _dims(tok: _Tokens) -> tuple[int, int]:
    start = tok.pos
    width = _header_int(tok, "width")
    height = _header_int(tok, "height")
    if width < 1 or height < 1:
        raise MalformedHeader(f"dimensions {width}x{height} must be positive", offset=start, line=_line_of(tok.data, start))
    return width, height


# ---------------------------------------------------------------------- PGM


def depth_for_maxval(maxval: int) -> int:
    """Smallest d with 2**d - 1 >= maxval."""
    return max(1, maxval.bit_length())


def read_pgm(data: bytes) -> PixelImage:
    data = bytes(data)
    magic = _magic(data, (b"P2", b"P5"))
    tok = _Tokens(data, 2)
    width, height = _dims(tok)
    moff = tok.pos
    maxval = _header_int(tok, "maxval")
    if not 1 <= maxval <= (1 << MAX_DEPTH) - 1:
        raise MalformedHeader(f"maxval {maxval} outside [1, 65535]", offset=moff, line=_line_of(data, moff))
    n = width * height
    pixels: list[int] = []

    if magic == b"P2":
        for _ in range(n):
            got = tok.next()
            if got is None:
                raise TruncatedPayload(
                    f"expected {n} pixels, found {len(pixels)}", offset=len(data), line=_line_of(data, len(data))
                )
            text, off = got
            if not text.isdigit():
                raise MalformedPayload(f"pixel {text[:16]!r} is not a decimal integer", offset=off, line=_line_of(data, off))
            v = _dec(text)
            if v > maxval:
                raise PixelOutOfRange(f"pixel {v} exceeds maxval {maxval}", offset=off, line=_line_of(data, off))
            pixels.append(v)
        if not tok.at_end():
            raise TrailingData("data after the last pixel", offset=tok.pos, line=_line_of(data, tok.pos))
    else:
        # Exactly one whitespace byte separates maxval from the raster.
        start = tok.pos + 1
        if tok.pos >= len(data) or data[tok.pos] not in _WS:
            raise MalformedHeader("maxval not followed by whitespace", offset=tok.pos, line=_line_of(data, tok.pos))
        size = 1 if maxval < 256 else 2
        end = start + n * size
        if end > len(data):
            raise TruncatedPayload(f"raster needs {n * size} bytes, found {len(data) - start}", offset=len(data))
        if end < len(data):
            raise TrailingData(f"{len(data) - end} bytes after the raster", offset=end)
        raster = data[start:end]
        for k in range(n):
            v = raster[k] if size == 1 else (raster[2 * k] << 8) | raster[2 * k + 1]
            if v > maxval:
                raise PixelOutOfRange(f"pixel {v} exceeds maxval {maxval}", offset=start + k * size)
            pixels.append(v)

    return PixelImage(width, height, depth_for_maxval(maxval), tuple(pixels))


def write_pgm(img: PixelImage) -> bytes:
    lines = ["P2", f"{img.width} {img.height}", str(img.max_value)]
    lines += [" ".join(map(str, row)) for row in img.rows()]
    return ("\n".join(lines) + "\n").encode("ascii")


# ---------------------------------------------------------------------- PBM


def read_pbm(data: bytes) -> BitMatrix:
    data = bytes(data)
    _magic(data, (b"P1",))
    tok = _Tokens(data, 2)
    cols, rows = _dims(tok)
    bits: list[int] = []
    for _ in range(rows * cols):
        got = tok.next(single_char=True)
        if got is None:
            raise TruncatedPayload(
                f"expected {rows * cols} bits, found {len(bits)}", offset=len(data), line=_line_of(data, len(data))
            )
        ch, off = got
        if ch not in (b"0", b"1"):
            raise NonBinaryDigit(f"{ch!r} is not 0 or 1", offset=off, line=_line_of(data, off))
        bits.append(ch[0] - 0x30)
    if not tok.at_end():
        raise TrailingData("data after the last bit", offset=tok.pos, line=_line_of(data, tok.pos))
    return BitMatrix(rows, cols, tuple(bits))


def write_pbm(m: BitMatrix) -> bytes:
    lines = ["P1", f"{m.cols} {m.rows}"] + [" ".join(map(str, row)) for row in m.to_rows()]
    return ("\n".join(lines) + "\n").encode("ascii")


# ---------------------------------------------------------------- scenario v1

SCENARIO_MAGIC = "scenario v1"
_INT = re.compile(r"[0-9]+")


def _significant_lines(text: str) -> Iterator[tuple[int, str]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line


def read_scenario(text: str | bytes) -> Scenario:
    """Parse a ``scenario v1`` document.

    Grammar: ``scenario v1``, ``depth <d>``, ``rule complement|parity``, then
    the four labelled grids (any order), each row space-separated integers.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise GrammarError(f"not UTF-8 text: {exc.reason}", offset=exc.start) from None
    lines = list(_significant_lines(text))

    def expect(k: int, what: str) -> tuple[int, str]:
        if k >= len(lines):
            raise GrammarError(f"expected {what}, found end of document", line=len(text.splitlines()) + 1)
        return lines[k]

    number, line = expect(0, repr(SCENARIO_MAGIC))
    if line != SCENARIO_MAGIC:
        raise GrammarError(f"expected {SCENARIO_MAGIC!r}, found {line[:32]!r}", line=number)

    number, line = expect(1, "'depth <d>'")
    parts = line.split()
    if len(parts) != 2 or parts[0] != "depth" or not _INT.fullmatch(parts[1]):
        raise GrammarError(f"expected 'depth <d>', found {line[:32]!r}", line=number)
    depth = _dec(parts[1])
    if not 1 <= depth <= MAX_DEPTH:
        raise InvariantViolation(f"depth {depth} outside [1, {MAX_DEPTH}]", line=number)

    number, line = expect(2, "'rule complement|parity'")
    parts = line.split()
    if len(parts) != 2 or parts[0] != "rule" or parts[1] not in {r.value for r in EmbedRule}:
        raise GrammarError(f"expected 'rule complement|parity', found {line[:32]!r}", line=number)
    rule = EmbedRule(parts[1])

    sections: dict[str, tuple[int, list[list[int]]]] = {}
    current: list[list[int]] | None = None
    for number, line in lines[3:]:
        if line in COMPONENTS:
            if line in sections:
                raise GrammarError(f"duplicate section {line!r}", line=number)
            current = []
            sections[line] = (number, current)
            continue
        if current is None:
            raise GrammarError(f"expected a section label, found {line[:32]!r}", line=number)
        tokens = line.split()
        if not all(_INT.fullmatch(t) for t in tokens):
            raise GrammarError(f"grid row must be non-negative integers: {line[:32]!r}", line=number)
        row = [_dec(t) for t in tokens]
        if current and len(row) != len(current[0]):
            raise GrammarError(f"row has {len(row)} entries, expected {len(current[0])}", line=number)
        current.append(row)

    for name in COMPONENTS:
        if name not in sections:
            raise MissingSection(f"missing section {name!r}", line=len(text.splitlines()) + 1)
        number, grid = sections[name]
        if not grid:
            raise GrammarError(f"section {name!r} has no rows", line=number)

    parsed = {}
    for name in COMPONENTS:
        number, grid = sections[name]
        try:
            if name.endswith("host"):
                parsed[name] = PixelImage.from_rows(grid, depth)
            else:
                parsed[name] = BitMatrix.from_rows(grid)
        except InvariantViolation as exc:
            raise InvariantViolation(f"{name}: {exc.message}", line=number) from None
    try:
        return Scenario(depth=depth, rule=rule, **parsed)
    except DimensionMismatch as exc:
        raise DimensionMismatch(exc.message, line=sections["watermark"][0]) from None


def _grid_lines(rows: list[list[int]]) -> list[str]:
    return [" ".join(map(str, r)) for r in rows]


def write_scenario(s: Scenario) -> str:
    out = [SCENARIO_MAGIC, f"depth {s.depth}", f"rule {s.rule.value}"]
    for name in COMPONENTS:
        value = getattr(s, name)
        out += ["", name] + _grid_lines(value.rows() if isinstance(value, PixelImage) else value.to_rows())
    return "\n".join(out) + "\n"


# ------------------------------------------------------------------- reports
#
# Reports are flat "key value" lines.  Grids are rendered inline as
# "[[0,1],[1,0]]" so each artifact stays on a single line.


def format_grid(x: PixelImage | BitMatrix) -> str:
    rows = x.rows() if isinstance(x, PixelImage) else x.to_rows()
    return "[" + ",".join("[" + ",".join(map(str, r)) + "]" for r in rows) + "]"


def format_counterexample_report(r: CounterexampleReport) -> str:
    s = r.scenario
    lines = [
        "report v1",
        f"rule {s.rule.value}",
        f"depth {s.depth}",
        f"host {format_grid(s.host)}",
        f"watermark {format_grid(s.watermark)}",
        f"attacker_host {format_grid(s.attacker_host)}",
        f"attacker_watermark {format_grid(s.attacker_watermark)}",
        f"b {int(r.b)}",
        f"b_tilde {int(r.b_tilde)}",
        f"watermarked {format_grid(r.watermarked)}",
        f"attacker_watermarked {format_grid(r.attacker_watermarked)}",
        f"action {r.action.value}",
        f"attacked {format_grid(r.attacked)}",
        f"extracted {format_grid(r.extracted)}",
        f"attacker_extracted {format_grid(r.attacker_extracted)}",
        f"extracted_equals_watermark {_yes(r.extracted == s.watermark)}",
        f"extracted_equals_attacker_watermark {_yes(r.extracted == s.attacker_watermark)}",
        f"verdict {r.verdict.verdict.value}",
    ]
    lines += [f"paper_match.{key} {_yes(ok)}" for key, ok in r.paper_match.items()]
    return "\n".join(lines) + "\n"


def format_sweep_report(r: SweepReport) -> str:
    n = r.total_instances
    lines = [
        "sweep v1",
        f"width {r.width}",
        f"height {r.height}",
        f"depth {r.depth}",
        f"rule {r.rule.value}",
        f"watermark_shape {r.wm_rows}x{r.wm_cols}",
        f"fixed {','.join(r.fixed) if r.fixed else '-'}",
        f"total {n}",
        f"replaced {r.replaced_count} / {n}",
        f"survives {r.survives_count} / {n}",
        f"neither {r.neither_count} / {n}",
        f"identical_watermarks {r.identical_watermark_count}",
        f"success_rate {r.success_rate.numerator}/{r.success_rate.denominator}",
    ]
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> dict[str, str]:
    """Split a report into an ordered key -> value mapping."""
    out: dict[str, str] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        key, sep, value = line.partition(" ")
        if key in out:
            raise GrammarError(f"duplicate key {key!r}", line=number)
        out[key] = value
    return out


def _yes(flag: bool) -> str:
    return "true" if flag else "false"


# ------------------------------------------------------------------ check bit


def format_check_bit(b: int) -> str:
    return f"b {int(b)}\n"


def read_check_bit(text: str | bytes) -> CheckBit:
    if isinstance(text, (bytes, bytearray)):
        text = bytes(text).decode("ascii", errors="replace")
    lines = list(_significant_lines(text))
    if len(lines) != 1:
        raise GrammarError("check-bit file must hold exactly one 'b <0|1>' line", line=lines[1][0] if lines[1:] else 1)
    number, line = lines[0]
    parts = line.split()
    if len(parts) != 2 or parts[0] != "b" or parts[1] not in ("0", "1"):
        raise GrammarError(f"expected 'b 0' or 'b 1', found {line[:32]!r}", line=number)
    return CheckBit(int(parts[1]))

