"""Embedding and extraction for the block-parity binary watermark.

The embedding step of the underlying scheme is only known second-hand, so two
reconstructions are provided:

``EmbedRule.COMPLEMENT``
    Compute the global check bit ``b`` of the host.  A block whose watermark
    bit differs from ``b`` is replaced by its complement; the rest are copied.
    Extraction is informed: it compares each block with the registered host.

``EmbedRule.PARITY_ADJUST``
    Force each block's own parity to its watermark bit by toggling the least
    significant bit of the block's first pixel when needed.  At most one pixel
    per block changes, by exactly one grey level.  Extraction is blind.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .core import BitMatrix, CheckBit, PixelImage, check_bit, make_grid, same_geometry
from .errors import DimensionMismatch


class EmbedRule(enum.Enum):
    COMPLEMENT = "complement"
    PARITY_ADJUST = "parity"

    @classmethod
    def parse(cls, token: str) -> EmbedRule:
        try:
            return cls(token)
        except ValueError:
            raise ValueError(f"unknown rule {token!r}; expected 'complement' or 'parity'") from None


@dataclass(frozen=True)
class EmbeddingResult:
    watermarked: PixelImage
    check_bit: CheckBit
    rule: EmbedRule


def embed(host: PixelImage, wm: BitMatrix, rule: EmbedRule = EmbedRule.COMPLEMENT) -> EmbeddingResult:
    grid = make_grid(host, wm)
    b = check_bit(host)
    out = list(host.pixels)
    if rule is EmbedRule.COMPLEMENT:
        top = host.max_value
        for bit, idx in zip(wm.bits, grid.block_indices()):
            if bit ^ b:
                for k in idx:
                    out[k] = top - out[k]
    elif rule is EmbedRule.PARITY_ADJUST:
        for bit, idx in zip(wm.bits, grid.block_indices()):
            if sum(out[k] for k in idx) & 1 != bit:
                out[idx[0]] ^= 1
    else:
        raise TypeError(f"not an EmbedRule: {rule!r}")
    watermarked = PixelImage._trusted(host.width, host.height, host.bit_depth, tuple(out))
    return EmbeddingResult(watermarked, b, rule)


def _check_dims(wm_dims: tuple[int, int]) -> tuple[int, int]:
    rows, cols = wm_dims
    if type(rows) is not int or type(cols) is not int:
        raise DimensionMismatch(f"watermark dimensions must be integers, got {wm_dims!r}")
    return rows, cols


def extract_informed(
    watermarked: PixelImage,
    reference_host: PixelImage,
    b: int,
    wm_dims: tuple[int, int],
) -> BitMatrix:
    """Bit (i, j) is ``b`` if block (i, j) still equals the host block, else ``1 - b``."""
    same_geometry(watermarked, reference_host)
    rows, cols = _check_dims(wm_dims)
    b = CheckBit(b)
    grid = make_grid(watermarked, (rows, cols))
    got, ref = watermarked.pixels, reference_host.pixels
    bits = []
    for idx in grid.block_indices():
        changed = any(got[k] != ref[k] for k in idx)
        bits.append(b ^ changed)
    return BitMatrix(rows, cols, tuple(bits))


def extract_blind_parity(watermarked: PixelImage, wm_dims: tuple[int, int]) -> BitMatrix:
    rows, cols = _check_dims(wm_dims)
    grid = make_grid(watermarked, (rows, cols))
    px = watermarked.pixels
    return BitMatrix(rows, cols, tuple(sum(px[k] for k in idx) & 1 for idx in grid.block_indices()))


def extract(
    watermarked: PixelImage,
    rule: EmbedRule,
    wm_dims: tuple[int, int],
    reference_host: PixelImage | None = None,
    b: int | None = None,
) -> BitMatrix:
    """Dispatch to the extractor that pairs with ``rule``."""
    if rule is EmbedRule.COMPLEMENT:
        if reference_host is None or b is None:
            raise ValueError("complement rule needs the reference host and the embed-time check bit")
        return extract_informed(watermarked, reference_host, b, wm_dims)
    return extract_blind_parity(watermarked, wm_dims)
