"""Binary images, filtrations of them, windows, and window patches.

Pixels are addressed as ``(x, y)`` with ``x`` the column and ``y`` the row,
origin in the top-left corner. Arrays handed to or returned from numpy are
indexed ``[y, x]``.

File conventions:

* PBM (P1 ascii, P4 binary): 1 = black, as in netpbm.
* CSV of 0/1: 0 = black, matching images whose pixel value 0 is black.
* PGM (P2 ascii, P5 binary): grayscale input for ``threshold``; heat maps
  are written as P2.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import HypothesisViolation, NestednessViolation, ParseError, ValidationError

Pixel = tuple[int, int]
FORMATS = ("pbm", "pbm-binary", "csv")

_NEIGHBORHOOD = tuple((dx, dy) for dy in (-1, 0, 1) for dx in (-1, 0, 1))


@dataclass(frozen=True)
class BinaryImage:
    width: int
    height: int
    black: frozenset[Pixel]

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValidationError(f"image must be at least 1x1, got {self.width}x{self.height}")
        black = frozenset((int(x), int(y)) for x, y in self.black)
        for x, y in black:
            if not (0 <= x < self.width and 0 <= y < self.height):
                raise ValidationError(f"black pixel {(x, y)} outside {self.width}x{self.height}")
        object.__setattr__(self, "black", black)

    @classmethod
    def from_array(cls, mask) -> BinaryImage:
        """Build from a 2-D array indexed ``[y, x]`` where truthy means black."""
        mask = np.asarray(mask, dtype=bool)
        if mask.ndim != 2:
            raise ValidationError(f"expected a 2-D array, got shape {mask.shape}")
        ys, xs = np.nonzero(mask)
        return cls(mask.shape[1], mask.shape[0], frozenset(zip(xs.tolist(), ys.tolist())))

    @classmethod
    def from_strings(cls, rows: Sequence[str], black: str = "#") -> BinaryImage:
        """Build from ascii art; ``black`` marks black pixels, anything else is white."""
        width = max(len(r) for r in rows)
        pixels = {(x, y) for y, row in enumerate(rows) for x, ch in enumerate(row) if ch == black}
        return cls(width, len(rows), frozenset(pixels))

    def to_array(self) -> np.ndarray:
        mask = np.zeros((self.height, self.width), dtype=bool)
        for x, y in self.black:
            mask[y, x] = True
        return mask

    def with_black(self, pixels: Iterable[Pixel]) -> BinaryImage:
        return BinaryImage(self.width, self.height, frozenset(pixels))


def _tokens(data: bytes) -> Iterable[bytes]:
    for line in data.split(b"\n"):
        yield from line.split(b"#", 1)[0].split()


def _read_netpbm_header(data: bytes, fields: int) -> tuple[bytes, list[int], int]:
    """Parse magic number plus ``fields`` integers; return the byte offset after them."""
    pos = 0
    values: list[int] = []
    magic = None
    n = len(data)
    while len(values) < fields or magic is None:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        token = data[start:pos]
        if not token:
            raise ParseError("truncated netpbm header")
        if magic is None:
            magic = token
            continue
        try:
            values.append(int(token))
        except ValueError:
            raise ParseError(f"bad header field {token!r}") from None
    # exactly one whitespace byte separates the header from binary rasters
    return magic, values, pos + 1


def parse_pbm(data: bytes) -> BinaryImage:
    magic, (width, height), offset = _read_netpbm_header(data, 2)
    if width < 1 or height < 1:
        raise ParseError(f"bad dimensions {width}x{height}")
    if magic == b"P1":
        body = data[offset - 1 :]
        digits = [c for tok in _tokens(body) for c in tok.decode("ascii", "replace")]
        if any(c not in "01" for c in digits):
            raise ParseError("P1 raster may only contain 0 and 1")
        if len(digits) != width * height:
            raise ParseError(f"expected {width * height} pixels, found {len(digits)}")
        grid = np.array([c == "1" for c in digits], dtype=bool).reshape(height, width)
    elif magic == b"P4":
        stride = (width + 7) // 8
        raster = data[offset : offset + stride * height]
        if len(raster) != stride * height:
            raise ParseError(f"expected {stride * height} raster bytes, found {len(raster)}")
        packed = np.frombuffer(raster, dtype=np.uint8).reshape(height, stride)
        grid = np.unpackbits(packed, axis=1)[:, :width].astype(bool)
    else:
        raise ParseError(f"not a PBM file (magic {magic!r})")
    return BinaryImage.from_array(grid)


def parse_csv(text: str) -> BinaryImage:
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError("empty CSV")
    width = len(rows[0])
    grid = np.zeros((len(rows), width), dtype=bool)
    for y, row in enumerate(rows):
        if len(row) != width:
            raise ParseError(f"row {y} has {len(row)} values, expected {width}")
        for x, cell in enumerate(row):
            cell = cell.strip()
            if cell not in ("0", "1"):
                raise ParseError(f"value {cell!r} at ({x}, {y}) is not 0 or 1")
            grid[y, x] = cell == "0"
    return BinaryImage.from_array(grid)


def parse_pgm(data: bytes) -> np.ndarray:
    """Grayscale raster as an int array indexed ``[y, x]``."""
    magic, (width, height, maxval), offset = _read_netpbm_header(data, 3)
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise ParseError(f"bad PGM header {width}x{height} maxval {maxval}")
    if magic == b"P2":
        try:
            values = [int(t) for t in _tokens(data[offset - 1 :])]
        except ValueError:
            raise ParseError("non-integer PGM sample") from None
        if len(values) != width * height:
            raise ParseError(f"expected {width * height} samples, found {len(values)}")
        gray = np.array(values, dtype=np.int64).reshape(height, width)
    elif magic == b"P5":
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype(np.uint8)
        count = width * height
        raster = data[offset : offset + count * dtype.itemsize]
        if len(raster) != count * dtype.itemsize:
            raise ParseError("truncated P5 raster")
        gray = np.frombuffer(raster, dtype=dtype).astype(np.int64).reshape(height, width)
    else:
        raise ParseError(f"not a PGM file (magic {magic!r})")
    if gray.min() < 0 or gray.max() > maxval:
        raise ParseError(f"sample outside 0..{maxval}")
    return gray


def load_image(path, format: str = "pbm") -> BinaryImage:
    """Read a binary image. ``format`` is ``pbm`` (P1 or P4, auto-detected) or ``csv``."""
    path = Path(path)
    if format in ("pbm", "pbm-binary"):
        return parse_pbm(path.read_bytes())
    if format == "csv":
        return parse_csv(path.read_text())
    raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")


def load_gray(path) -> np.ndarray:
    return parse_pgm(Path(path).read_bytes())


def format_pbm(image: BinaryImage, binary: bool = False) -> bytes:
    grid = image.to_array()
    header = f"P{4 if binary else 1}\n{image.width} {image.height}\n".encode()
    if binary:
        return header + np.packbits(grid.astype(np.uint8), axis=1).tobytes()
    lines = [" ".join("1" if v else "0" for v in row) for row in grid]
    return header + ("\n".join(lines) + "\n").encode()


def format_csv(image: BinaryImage) -> str:
    grid = image.to_array()
    return "".join(",".join("0" if v else "1" for v in row) + "\n" for row in grid)


def save_image(image: BinaryImage, path, format: str = "pbm") -> None:
    path = Path(path)
    if format == "pbm":
        path.write_bytes(format_pbm(image))
    elif format == "pbm-binary":
        path.write_bytes(format_pbm(image, binary=True))
    elif format == "csv":
        path.write_text(format_csv(image))
    else:
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")


def format_pgm(values, maxval: int = 255) -> str:
    values = np.asarray(values)
    height, width = values.shape
    lines = [f"P2\n{width} {height}\n{maxval}"]
    lines += [" ".join(str(int(v)) for v in row) for row in values]
    return "\n".join(lines) + "\n"


def threshold(gray, mode: str | int = "mean") -> BinaryImage:
    """Binarize a grayscale grid: a pixel is black iff its value is below the threshold.

    ``mode`` is ``"mean"`` (integer mean of all pixels, rounded toward zero)
    or an integer threshold.
    """
    gray = np.asarray(gray)
    if gray.ndim != 2 or gray.size == 0:
        raise ValidationError("threshold needs a non-empty 2-D grid")
    if not np.issubdtype(gray.dtype, np.integer):
        raise ValidationError(f"grayscale values must be integers, got {gray.dtype}")
    if mode == "mean":
        t = int(gray.astype(np.int64).sum()) // gray.size
    elif isinstance(mode, (int, np.integer)) and not isinstance(mode, bool):
        t = int(mode)
    else:
        raise ValueError(f"threshold mode must be 'mean' or an int, got {mode!r}")
    return BinaryImage.from_array(gray < t)


@dataclass(frozen=True)
class ImageFiltration:
    """Nested binary images ``levels[0] ⊆ levels[1] ⊆ ...``; the empty level is implicit."""

    levels: tuple[BinaryImage, ...]

    def __len__(self) -> int:
        return len(self.levels)

    def pixel_sets(self) -> list[frozenset[Pixel]]:
        return [img.black for img in self.levels]


def build_filtration(images: Sequence[BinaryImage]) -> ImageFiltration:
    """Validate and wrap a nested sequence of images.

    Raises NestednessViolation naming the first (1-based) level that is not
    contained in its successor.
    """
    images = tuple(images)
    if not images:
        raise ValidationError("a filtration needs at least one level")
    shape = (images[0].width, images[0].height)
    for i, img in enumerate(images, start=1):
        if (img.width, img.height) != shape:
            raise ValidationError(f"level {i} is {img.width}x{img.height}, expected {shape[0]}x{shape[1]}")
    for i in range(len(images) - 1):
        missing = images[i].black - images[i + 1].black
        if missing:
            raise NestednessViolation(i + 1, min(missing))
    return ImageFiltration(images)


@dataclass(frozen=True)
class Window:
    """Inclusive pixel rectangle ``[x0, x1] x [y0, y1]``."""

    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self):
        if self.x0 > self.x1 or self.y0 > self.y1:
            raise ValidationError(f"empty window {self}")

    @property
    def width(self) -> int:
        return self.x1 - self.x0 + 1

    @property
    def height(self) -> int:
        return self.y1 - self.y0 + 1

    def __contains__(self, p: Pixel) -> bool:
        x, y = p
        return self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1

    def on_boundary(self, p: Pixel) -> bool:
        x, y = p
        return x in (self.x0, self.x1) or y in (self.y0, self.y1)

    def inside(self, image: BinaryImage) -> bool:
        return self.x0 >= 0 and self.y0 >= 0 and self.x1 < image.width and self.y1 < image.height


def window_starts(length: int, size: int, stride: int) -> list[int]:
    """Start offsets along one axis; the last window is the first one reaching the edge."""
    if size < 1 or stride < 1:
        raise ValidationError("window size and stride must be positive")
    starts = []
    s = 0
    while s < length:
        starts.append(s)
        if s + size >= length:
            break
        s += stride
    return starts


def windows(width: int, height: int, size: int, stride: int | None = None) -> list[Window]:
    """Square windows of side ``size`` in row-major order, clipped to the image.

    ``stride=None`` tiles the image (stride equal to the window size).
    """
    stride = size if stride is None else stride
    return [
        Window(x0, y0, min(x0 + size, width) - 1, min(y0 + size, height) - 1)
        for y0 in window_starts(height, size, stride)
        for x0 in window_starts(width, size, stride)
    ]


def closure_disjoint(a: Iterable[Pixel], b: Iterable[Pixel]) -> bool:
    """True iff no pixel of ``a`` equals or is 8-adjacent to a pixel of ``b``.

    For unions of closed unit squares this is exactly disjointness of the
    two closed sets.
    """
    b = b if isinstance(b, (set, frozenset)) else set(b)
    return not any((x + dx, y + dy) in b for x, y in a for dx, dy in _NEIGHBORHOOD)


@dataclass(frozen=True)
class Patch:
    """Two black-pixel sets whose closed squares do not touch."""

    x1set: frozenset[Pixel]
    x2set: frozenset[Pixel]

    def __post_init__(self):
        object.__setattr__(self, "x1set", frozenset(self.x1set))
        object.__setattr__(self, "x2set", frozenset(self.x2set))
        if not closure_disjoint(self.x1set, self.x2set):
            raise HypothesisViolation("patch pieces touch: their closures intersect")

    def swapped(self) -> Patch:
        return Patch(self.x2set, self.x1set)


def extract_patch(image: BinaryImage, w: Window) -> Patch:
    """Split the black pixels of ``image`` by window ``w``.

    The first piece is the window content with all four boundary rows and
    columns removed; the second piece is every black pixel outside the
    window. The removed ring keeps the two pieces at distance two.
    """
    if not w.inside(image):
        raise ValidationError(f"{w} is not inside the {image.width}x{image.height} image")
    content = {p for p in image.black if p in w}
    inner = frozenset(p for p in content if not w.on_boundary(p))
    return Patch(inner, image.black - content)
