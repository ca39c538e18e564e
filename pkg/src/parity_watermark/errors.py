"""Exception hierarchy.

Two families matter to callers: ``FormatError`` for bytes/text that cannot be
parsed, and ``ValidationError`` for well-formed values that break a domain
invariant (out-of-range pixels, incompatible shapes, oversized sweeps).
"""

from __future__ import annotations


class WatermarkError(Exception):
    """Base class. Carries an optional position (1-based line, 0-based byte offset)."""

    def __init__(self, message: str, *, line: int | None = None, offset: int | None = None):
        self.message = message
        self.line = line
        self.offset = offset
        where = []
        if line is not None:
            where.append(f"line {line}")
        if offset is not None:
            where.append(f"offset {offset}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class ValidationError(WatermarkError, ValueError):
    pass


class DimensionMismatch(ValidationError):
    pass


class InvariantViolation(ValidationError):
    pass


class IntractableDomain(ValidationError):
    pass


class FormatError(WatermarkError, ValueError):
    pass


class MalformedHeader(FormatError):
    pass


class MalformedPayload(FormatError):
    pass


class PixelOutOfRange(FormatError):
    pass


class TruncatedPayload(FormatError):
    pass


class TrailingData(FormatError):
    pass


class NonBinaryDigit(FormatError):
    pass


class GrammarError(FormatError):
    pass


class MissingSection(FormatError):
    pass
