"""Particle agents: three-sensor chemotaxis followed by a one-pixel forward move.

Positions are continuous; a particle occupies cell ``(floor(x), floor(y))``.
Headings are degrees in [0, 360), measured from +x towards +y (row index).
The population is stored as parallel arrays so the numba kernels can walk it.

All randomness in a step comes from the numpy ``Generator`` passed in, in a
fixed order: shuffle of the sense order, the per-particle tie coins (only
drawn when both side sensors beat the front one), optional reorientation
draws, then the shuffle of the move order.
"""
import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import CapacityError, InvalidArgument
from .lattice import _diffuse_into

SENSOR_MODES = {"zero": 0, "clamp": 1}


@dataclass(frozen=True)
class ModelParams:
    sensor_angle: float = 90.0
    rotation_angle: float = 22.5
    sensor_offset: float = 15.0
    deposit: float = 5.0
    damping: float = 0.99
    sample_interval: int = 5
    population: int = 5000
    # off-lattice/off-habitat sensor behaviour: "zero" reads 0 beyond the
    # lattice edge, "clamp" pulls sensor points back onto the habitable rect
    sensor_mode: str = "zero"
    # per-step probability of picking a fresh random heading (0 disables)
    reorient_prob: float = 0.0

    def __post_init__(self):
        if not self.sensor_offset >= 1:
            raise InvalidArgument("sensor_offset must be >= 1")
        if not 0.0 < self.damping < 1.0:
            raise InvalidArgument("damping must lie in (0, 1)")
        if self.deposit < 0:
            raise InvalidArgument("deposit must be non-negative")
        if int(self.sample_interval) != self.sample_interval or self.sample_interval < 1:
            raise InvalidArgument("sample_interval must be a positive integer")
        if int(self.population) != self.population or self.population < 0:
            raise InvalidArgument("population must be a non-negative integer")
        if self.sensor_mode not in SENSOR_MODES:
            raise InvalidArgument(f"sensor_mode must be one of {sorted(SENSOR_MODES)}")
        if not 0.0 <= self.reorient_prob <= 1.0:
            raise InvalidArgument("reorient_prob must lie in [0, 1]")


@dataclass
class Population:
    x: np.ndarray
    y: np.ndarray
    heading: np.ndarray
    frozen: np.ndarray

    @classmethod
    def empty(cls):
        return cls(np.zeros(0), np.zeros(0), np.zeros(0), np.zeros(0, dtype=bool))

    @classmethod
    def from_arrays(cls, x, y, heading, frozen=None):
        x = np.array(x, dtype=np.float64)
        y = np.array(y, dtype=np.float64)
        h = np.mod(np.array(heading, dtype=np.float64), 360.0)
        fz = np.zeros(x.size, dtype=bool) if frozen is None else np.array(frozen, dtype=bool)
        if not (x.shape == y.shape == h.shape == fz.shape) or x.ndim != 1:
            raise InvalidArgument("particle arrays must be 1-d and equally long")
        return cls(x, y, h, fz)

    def __len__(self):
        return self.x.size

    def cells(self):
        return np.floor(self.x).astype(np.int64), np.floor(self.y).astype(np.int64)

    def live(self):
        return np.flatnonzero(~self.frozen)

    def copy(self):
        return Population(self.x.copy(), self.y.copy(), self.heading.copy(), self.frozen.copy())


def occupancy_grid(pop, shape):
    """Grid holding the index of the particle in each cell, -1 where empty."""
    occ = np.full(shape, -1, dtype=np.int64)
    if len(pop) == 0:
        return occ
    cx, cy = pop.cells()
    h, w = shape
    if cx.min() < 0 or cy.min() < 0 or cx.max() >= w or cy.max() >= h:
        raise InvalidArgument("particle outside the lattice")
    flat = cy * w + cx
    if np.unique(flat).size != flat.size:
        raise CapacityError("two particles share a cell")
    occ[cy, cx] = np.arange(len(pop))
    return occ


@njit(cache=True)
def _read(field, x, y, mode, x0, y0, x1, y1):
    if mode == 1:
        x = min(max(x, float(x0)), x1 - 1e-9)
        y = min(max(y, float(y0)), y1 - 1e-9)
    ix = int(math.floor(x))
    iy = int(math.floor(y))
    if ix < 0 or iy < 0 or iy >= field.shape[0] or ix >= field.shape[1]:
        return 0.0
    return field[iy, ix]


@njit(cache=True)
def _wrap(h):
    h = h % 360.0
    if h >= 360.0:  # -tiny % 360 rounds up to 360
        h = 0.0
    return h


@njit(cache=True)
def _sense_one(field, x, y, h, sa, ra, so, mode, x0, y0, x1, y1, rng):
    hr = math.radians(h)
    s = math.radians(sa)
    fl = _read(field, x + so * math.cos(hr - s), y + so * math.sin(hr - s), mode, x0, y0, x1, y1)
    f = _read(field, x + so * math.cos(hr), y + so * math.sin(hr), mode, x0, y0, x1, y1)
    fr = _read(field, x + so * math.cos(hr + s), y + so * math.sin(hr + s), mode, x0, y0, x1, y1)
    if f > fl and f > fr:
        pass
    elif f < fl and f < fr:
        if rng.random() < 0.5:
            h += ra
        else:
            h -= ra
    elif fl < fr:
        h += ra
    elif fr < fl:
        h -= ra
    return _wrap(h)


@njit(cache=True)
def _move_one(i, px, py, ph, occ, mask, field, dep):
    hr = math.radians(ph[i])
    nx = px[i] + math.cos(hr)
    ny = py[i] + math.sin(hr)
    cx = int(math.floor(px[i]))
    cy = int(math.floor(py[i]))
    tx = int(math.floor(nx))
    ty = int(math.floor(ny))
    if tx < 0 or ty < 0 or ty >= mask.shape[0] or tx >= mask.shape[1] or not mask[ty, tx]:
        return False
    if tx != cx or ty != cy:
        if occ[ty, tx] >= 0:
            return False
        occ[cy, cx] = -1
        occ[ty, tx] = i
    px[i] = nx
    py[i] = ny
    field[ty, tx] += dep
    return True


@njit(cache=True)
def _step(px, py, ph, live, field, tmp, occ, mask, sa, ra, so, dep, damp, mode,
          reorient, x0, y0, x1, y1, rng):
    order = live.copy()
    rng.shuffle(order)
    for k in range(order.size):
        i = order[k]
        ph[i] = _sense_one(field, px[i], py[i], ph[i], sa, ra, so, mode, x0, y0, x1, y1, rng)
        if reorient > 0.0 and rng.random() < reorient:
            ph[i] = _wrap(rng.random() * 360.0)
    order = live.copy()
    rng.shuffle(order)
    moved = 0
    for k in range(order.size):
        if _move_one(order[k], px, py, ph, occ, mask, field, dep):
            moved += 1
    _diffuse_into(field, mask, damp, tmp)
    field[:, :] = tmp
    return moved


def _rect_of(mask):
    ys, xs = np.nonzero(mask)
    if ys.size == 0:
        return 0, 0, mask.shape[1], mask.shape[0]
    return int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1


def sense(x, y, heading, field, params, rng, mask=None):
    """New heading for one particle at (x, y) given the current field."""
    x0, y0, x1, y1 = _rect_of(mask) if mask is not None else (0, 0, field.shape[1], field.shape[0])
    return _sense_one(field, float(x), float(y), float(heading), params.sensor_angle,
                      params.rotation_angle, params.sensor_offset,
                      SENSOR_MODES[params.sensor_mode], x0, y0, x1, y1, rng)


def attempt_move(pop, i, occ, mask, field, params):
    """Move particle ``i`` one pixel forward if the target cell is free and habitable."""
    if pop.frozen[i]:
        raise InvalidArgument(f"particle {i} is frozen")
    return bool(_move_one(int(i), pop.x, pop.y, pop.heading, occ, mask, field, float(params.deposit)))


class StepContext:
    """Scratch buffers and cached per-run constants for :func:`population_step`."""

    def __init__(self, pop, mask, params):
        self.live = pop.live()
        self.tmp = np.empty(mask.shape, dtype=np.float64)
        self.rect = _rect_of(mask)
        self.mode = SENSOR_MODES[params.sensor_mode]


def population_step(pop, field, occ, mask, params, rng, ctx=None):
    """Sense (all live particles, shuffled), move (reshuffled), then diffuse.

    ``field`` and ``occ`` are updated in place.  Returns the number of
    successful moves.  Pass a :class:`StepContext` to avoid per-step setup;
    it must be rebuilt if the frozen set changes.
    """
    if ctx is None:
        ctx = StepContext(pop, mask, params)
    x0, y0, x1, y1 = ctx.rect
    return int(_step(pop.x, pop.y, pop.heading, ctx.live, field, ctx.tmp, occ, mask,
                     float(params.sensor_angle), float(params.rotation_angle),
                     float(params.sensor_offset), float(params.deposit), float(params.damping),
                     ctx.mode, float(params.reorient_prob), x0, y0, x1, y1, rng))
