"""The diffusive lattice: arena geometry, habitable mask, trail diffusion and sampling.

Fields are float64 arrays indexed ``[y, x]`` with shape (height, width).
"""
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import InvalidArgument, InvalidGeometry

WINDOW_SIZE = 20


@dataclass(frozen=True)
class ArenaGeometry:
    lattice_width: int = 360
    lattice_height: int = 66
    habitable_width: int = 300
    habitable_height: int = 20
    fraction: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.fraction <= 1.0:
            raise InvalidGeometry(f"fraction must lie in (0, 1], got {self.fraction}")
        if self.habitable_width > self.lattice_width or self.habitable_height > self.lattice_height:
            raise InvalidGeometry("habitable rect does not fit inside the lattice")
        if self.habitable_width < 1 or self.habitable_height < 1:
            raise InvalidGeometry("habitable rect must be non-empty")
        if self.constrained_width < 1:
            raise InvalidGeometry(f"fraction {self.fraction} leaves no habitable columns")

    @property
    def shape(self):
        return (self.lattice_height, self.lattice_width)

    @property
    def origin(self):
        """Top-left (x, y) of the habitable rect, centred in the lattice."""
        return ((self.lattice_width - self.habitable_width) // 2,
                (self.lattice_height - self.habitable_height) // 2)

    @property
    def constrained_width(self):
        return int(round(self.fraction * self.habitable_width))

    def habitable_rect(self, fraction=None):
        """(x0, y0, width, height) of the region open at ``fraction`` (default: own fraction)."""
        f = self.fraction if fraction is None else fraction
        x0, y0 = self.origin
        return (x0, y0, int(round(f * self.habitable_width)), self.habitable_height)

    @property
    def window(self):
        """The 20x20 sampling window at the left end of the habitable rect."""
        x0, y0 = self.origin
        return (x0, y0, min(WINDOW_SIZE, self.habitable_width), min(WINDOW_SIZE, self.habitable_height))

    def with_fraction(self, fraction):
        return ArenaGeometry(self.lattice_width, self.lattice_height,
                             self.habitable_width, self.habitable_height, fraction)


def build_mask(geometry, fraction=None):
    """Boolean mask, True on the leftmost ``round(fraction * width)`` columns of the habitable rect."""
    if fraction is not None and not 0.0 < fraction <= 1.0:
        raise InvalidGeometry(f"fraction must lie in (0, 1], got {fraction}")
    x0, y0, w, h = geometry.habitable_rect(fraction)
    if w < 1:
        raise InvalidGeometry(f"fraction {fraction} leaves no habitable columns")
    mask = np.zeros(geometry.shape, dtype=bool)
    mask[y0:y0 + h, x0:x0 + w] = True
    return mask


def new_field(geometry):
    return np.zeros(geometry.shape, dtype=np.float64)


@njit(cache=True)
def _diffuse_into(field, mask, damping, out):
    h, w = field.shape
    for y in range(h):
        for x in range(w):
            if not mask[y, x]:
                out[y, x] = 0.0
                continue
            acc = 0.0
            for yy in range(max(y - 1, 0), min(y + 2, h)):
                for xx in range(max(x - 1, 0), min(x + 2, w)):
                    acc += field[yy, xx]
            # off-lattice neighbours count as zero; divisor stays 9
            out[y, x] = acc / 9.0 * damping
    return out


def diffuse(field, mask, damping=0.99, out=None):
    """One damped 3x3 mean-filter pass; trail outside ``mask`` is deleted.

    Returns a new array unless ``out`` is given (``out`` must not alias ``field``).
    """
    if field.shape != mask.shape:
        raise InvalidArgument(f"field {field.shape} and mask {mask.shape} differ in shape")
    if out is None:
        out = np.empty_like(field)
    elif out is field:
        raise InvalidArgument("out must not alias field")
    return _diffuse_into(field, mask, float(damping), out)


def deposit(field, cell, amount):
    """Add ``amount`` at ``cell = (x, y)`` in place and return the field."""
    x, y = cell
    h, w = field.shape
    if not (0 <= x < w and 0 <= y < h):
        raise InvalidArgument(f"cell {cell} lies outside the {w}x{h} lattice")
    if amount < 0:
        raise InvalidArgument("deposit amount must be non-negative")
    field[y, x] += amount
    return field


def mean_in_window(field, window):
    x0, y0, w, h = window
    H, W = field.shape
    if x0 < 0 or y0 < 0 or x0 + w > W or y0 + h > H or w < 1 or h < 1:
        raise InvalidArgument(f"window {window} exceeds the {W}x{H} lattice")
    return float(field[y0:y0 + h, x0:x0 + w].mean())


def save_grid_text(path, field):
    with open(path, "w") as fh:
        for row in field:
            fh.write(" ".join(repr(float(v)) for v in row))
            fh.write("\n")


def load_grid_text(path):
    return np.loadtxt(path, ndmin=2)


def save_pgm(path, field):
    """16-bit binary PGM scaled linearly between the field min and max.

    The scaling is recorded in a header comment so values can be recovered:
    ``value = min + pixel / 65535 * (max - min)``.
    """
    lo, hi = float(field.min()), float(field.max())
    span = hi - lo
    if span > 0:
        pix = np.rint((field - lo) / span * 65535.0)
    else:
        pix = np.zeros(field.shape)
    pix = pix.astype(">u2")
    h, w = field.shape
    header = f"P5\n# min={lo!r} max={hi!r}\n{w} {h}\n65535\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(pix.tobytes())


def load_pgm(path):
    """Read a PGM written by :func:`save_pgm`; returns (pixels, min, max)."""
    with open(path, "rb") as fh:
        data = fh.read()
    lines, pos = [], 0
    lo = hi = None
    while len(lines) < 3:
        end = data.index(b"\n", pos)
        line = data[pos:end].decode("ascii")
        pos = end + 1
        if line.startswith("#"):
            for tok in line[1:].split():
                k, v = tok.split("=")
                if k == "min":
                    lo = float(v)
                elif k == "max":
                    hi = float(v)
            continue
        lines.append(line)
    if lines[0] != "P5":
        raise ValueError("not a binary PGM")
    w, h = map(int, lines[1].split())
    pix = np.frombuffer(data[pos:pos + 2 * w * h], dtype=">u2").reshape(h, w)
    return pix, lo, hi
