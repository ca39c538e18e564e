"""Pixel images, bit matrices, block grids and the parity/complement primitives."""

from __future__ import annotations

import operator
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence, Union

from .errors import DimensionMismatch, InvariantViolation

MAX_DEPTH = 16


@dataclass(frozen=True, slots=True)
class PixelImage:
    """Single-band raster of unsigned integers, stored row-major."""

    width: int
    height: int
    bit_depth: int
    pixels: tuple[int, ...]

    def __post_init__(self) -> None:
        for name in ("width", "height"):
            value = getattr(self, name)
            if type(value) is not int or value < 1:
                raise InvariantViolation(f"{name} must be a positive integer, got {value!r}")
        if type(self.bit_depth) is not int or not 1 <= self.bit_depth <= MAX_DEPTH:
            raise InvariantViolation(f"bit depth must be in [1, {MAX_DEPTH}], got {self.bit_depth!r}")
        try:
            pixels = tuple(operator.index(v) for v in self.pixels)
        except TypeError as exc:
            raise InvariantViolation(f"pixels must be integers: {exc}") from None
        if len(pixels) != self.width * self.height:
            raise InvariantViolation(
                f"expected {self.width * self.height} pixels for {self.width}x{self.height}, got {len(pixels)}"
            )
        top = self.max_value
        for k, v in enumerate(pixels):
            if not 0 <= v <= top:
                raise InvariantViolation(
                    f"pixel ({k // self.width}, {k % self.width}) = {v} outside [0, {top}] at depth {self.bit_depth}"
                )
        object.__setattr__(self, "pixels", pixels)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], bit_depth: int) -> PixelImage:
        if not rows or not rows[0]:
            raise InvariantViolation("image must have at least one row and one column")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise InvariantViolation("ragged rows")
        return cls(width, len(rows), bit_depth, tuple(v for r in rows for v in r))

    @classmethod
    def _trusted(cls, width: int, height: int, bit_depth: int, pixels: tuple[int, ...]) -> PixelImage:
        # Skips validation; only for pixels derived from an already-valid image.
        obj = object.__new__(cls)
        object.__setattr__(obj, "width", width)
        object.__setattr__(obj, "height", height)
        object.__setattr__(obj, "bit_depth", bit_depth)
        object.__setattr__(obj, "pixels", pixels)
        return obj

    @property
    def max_value(self) -> int:
        return (1 << self.bit_depth) - 1

    @property
    def shape(self) -> tuple[int, int]:
        """(height, width), numpy order."""
        return (self.height, self.width)

    def rows(self) -> list[list[int]]:
        w = self.width
        return [list(self.pixels[r * w:(r + 1) * w]) for r in range(self.height)]

    def __getitem__(self, rc: tuple[int, int]) -> int:
        r, c = rc
        return self.pixels[r * self.width + c]


@dataclass(frozen=True, slots=True)
class BitMatrix:
    rows: int
    cols: int
    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        for name in ("rows", "cols"):
            value = getattr(self, name)
            if type(value) is not int or value < 1:
                raise InvariantViolation(f"{name} must be a positive integer, got {value!r}")
        try:
            bits = tuple(operator.index(b) for b in self.bits)
        except TypeError as exc:
            raise InvariantViolation(f"bits must be integers: {exc}") from None
        if len(bits) != self.rows * self.cols:
            raise InvariantViolation(f"expected {self.rows * self.cols} bits, got {len(bits)}")
        for k, b in enumerate(bits):
            if b not in (0, 1):
                raise InvariantViolation(f"entry ({k // self.cols}, {k % self.cols}) = {b} is not a bit")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> BitMatrix:
        if not rows or not rows[0]:
            raise InvariantViolation("matrix must have at least one row and one column")
        cols = len(rows[0])
        if any(len(r) != cols for r in rows):
            raise InvariantViolation("ragged rows")
        return cls(len(rows), cols, tuple(b for r in rows for b in r))

    @classmethod
    def filled(cls, rows: int, cols: int, bit: int) -> BitMatrix:
        return cls(rows, cols, (bit,) * (rows * cols))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def to_rows(self) -> list[list[int]]:
        c = self.cols
        return [list(self.bits[r * c:(r + 1) * c]) for r in range(self.rows)]

    def inverted(self) -> BitMatrix:
        return BitMatrix(self.rows, self.cols, tuple(b ^ 1 for b in self.bits))

    def __xor__(self, other: BitMatrix) -> BitMatrix:
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot xor {self.shape} with {other.shape}")
        return BitMatrix(self.rows, self.cols, tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    def __getitem__(self, rc: tuple[int, int]) -> int:
        r, c = rc
        return self.bits[r * self.cols + c]


class CheckBit(int):
    """An int restricted to 0 or 1."""

    def __new__(cls, value: int) -> CheckBit:
        v = operator.index(value)
        if v not in (0, 1):
            raise InvariantViolation(f"check bit must be 0 or 1, got {value!r}")
        return super().__new__(cls, v)

    def __repr__(self) -> str:
        return f"CheckBit({int(self)})"


@dataclass(frozen=True, slots=True)
class BlockGrid:
    """Equal-size tiling of an image; block (i, j) carries watermark bit (i, j)."""

    block_width: int
    block_height: int
    rows: int
    cols: int

    @property
    def image_width(self) -> int:
        return self.block_width * self.cols

    @property
    def image_height(self) -> int:
        return self.block_height * self.rows

    @property
    def block_size(self) -> int:
        return self.block_width * self.block_height

    def block_indices(self) -> tuple[tuple[int, ...], ...]:
        """Flat pixel indices for each block; blocks and pixels both row-major."""
        return _block_indices(self.block_width, self.block_height, self.rows, self.cols)


@lru_cache(maxsize=256)
def _block_indices(bw: int, bh: int, rows: int, cols: int) -> tuple[tuple[int, ...], ...]:
    width = bw * cols
    out = []
    for i in range(rows):
        for j in range(cols):
            top, left = i * bh, j * bw
            out.append(tuple((top + y) * width + left + x for y in range(bh) for x in range(bw)))
    return tuple(out)


def make_grid(img: PixelImage, wm: BitMatrix | tuple[int, int]) -> BlockGrid:
    """Tile ``img`` so that each watermark bit owns one block.

    ``wm`` may be a BitMatrix or a bare ``(rows, cols)`` pair.
    """
    rows, cols = wm.shape if isinstance(wm, BitMatrix) else wm
    if rows < 1 or cols < 1 or img.width % cols or img.height % rows:
        raise DimensionMismatch(
            f"{rows}x{cols} watermark does not tile a {img.height}x{img.width} image"
        )
    return BlockGrid(img.width // cols, img.height // rows, rows, cols)


def check_bit(region: Union[PixelImage, Iterable[int]]) -> CheckBit:
    """Parity of the pixel sum of an image or of any block view."""
    pixels = region.pixels if isinstance(region, PixelImage) else tuple(region)
    if not pixels:
        raise InvariantViolation("check bit of an empty region")
    return CheckBit(sum(pixels) & 1)


def complement_image(img: PixelImage) -> PixelImage:
    top = img.max_value
    return PixelImage._trusted(img.width, img.height, img.bit_depth, tuple(top - v for v in img.pixels))


def same_geometry(*images: PixelImage) -> None:
    """Raise DimensionMismatch unless all images share width, height and depth."""
    first = images[0]
    for other in images[1:]:
        if (other.width, other.height, other.bit_depth) != (first.width, first.height, first.bit_depth):
            raise DimensionMismatch(
                f"{other.height}x{other.width}@{other.bit_depth} differs from "
                f"{first.height}x{first.width}@{first.bit_depth}"
            )
