"""Experiment driver: inoculate, constrain, step, sample the window flux, sweep."""
import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import CapacityError, InvalidArgument
from .lattice import ArenaGeometry, build_mask, new_field
from .particles import ModelParams, Population, StepContext, occupancy_grid, population_step
from .spectral import dominant_frequency, periodogram

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    geometry: ArenaGeometry = field(default_factory=ArenaGeometry)
    params: ModelParams = field(default_factory=ModelParams)
    fraction: float = 1.0
    seed: int = 0
    total_steps: int = 12000
    warmup_steps: int = 2000
    constraint_step: int = 0

    def __post_init__(self):
        geo = self.constrained_geometry  # validates the fraction
        if self.total_steps < 1:
            raise InvalidArgument("total_steps must be positive")
        if not 0 <= self.warmup_steps < self.total_steps:
            raise InvalidArgument("warmup_steps must lie in [0, total_steps)")
        if not 0 <= self.constraint_step <= self.total_steps:
            raise InvalidArgument("constraint_step must lie in [0, total_steps]")
        x0, y0, w, h = geo.window
        if w > geo.constrained_width:
            raise InvalidArgument("sampling window is wider than the constrained region")

    @property
    def constrained_geometry(self):
        return self.geometry.with_fraction(self.fraction)


@dataclass
class FluxSeries:
    steps: np.ndarray
    values: np.ndarray
    sample_interval: int = 5
    snapshots: dict = field(default_factory=dict)  # step -> field copy

    def __len__(self):
        return self.steps.size

    def after(self, warmup_steps):
        """Values sampled strictly after ``warmup_steps``."""
        return self.values[self.steps > warmup_steps]


def inoculate(geometry, params, rng):
    """Place particles on distinct random cells of the full habitable rect."""
    x0, y0, w, h = geometry.habitable_rect(1.0)
    n = params.population
    if n > w * h:
        raise CapacityError(f"{n} particles do not fit in {w * h} habitable cells")
    if n == 0:
        return Population.empty()
    cells = rng.choice(w * h, size=n, replace=False)
    x = x0 + (cells % w) + 0.5
    y = y0 + (cells // w) + 0.5
    heading = rng.random(n) * 360.0
    return Population.from_arrays(x, y, heading)


def apply_constraint(pop, mask):
    """Freeze every particle whose cell lies outside ``mask`` (in place)."""
    if len(pop):
        cx, cy = pop.cells()
        pop.frozen |= ~mask[cy, cx]
    return pop


class Simulation:
    """Step-by-step run state; :func:`run_experiment` drives one to completion."""

    def __init__(self, config):
        self.config = config
        self.rng = np.random.default_rng(config.seed)
        geo = config.geometry
        self.full_mask = build_mask(geo, 1.0)
        self.mask = build_mask(geo, config.fraction)
        self.pop = inoculate(geo, config.params, self.rng)
        self.field = new_field(geo)
        self.occ = occupancy_grid(self.pop, geo.shape)
        self.t = 0
        self.constrained = False
        self._active_mask = self.full_mask
        if config.constraint_step == 0:
            self.constrain()
        else:
            self._ctx = StepContext(self.pop, self._active_mask, config.params)

    def constrain(self):
        apply_constraint(self.pop, self.mask)
        self._active_mask = self.mask
        self.constrained = True
        self._ctx = StepContext(self.pop, self._active_mask, self.config.params)

    @property
    def active_mask(self):
        return self._active_mask

    def step(self):
        moved = population_step(self.pop, self.field, self.occ, self._active_mask,
                                self.config.params, self.rng, self._ctx)
        self.t += 1
        if not self.constrained and self.t == self.config.constraint_step:
            self.constrain()
        return moved

    def window_flux(self):
        x0, y0, w, h = self.config.geometry.window
        return float(self.field[y0:y0 + h, x0:x0 + w].mean())


def run_experiment(config, snapshot_steps=()):
    sim = Simulation(config)
    every = config.params.sample_interval
    n = config.total_steps // every
    steps = np.arange(1, n + 1, dtype=np.int64) * every
    values = np.empty(n)
    wanted = set(int(s) for s in snapshot_steps)
    snaps = {}
    k = 0
    for t in range(1, config.total_steps + 1):
        sim.step()
        if t % every == 0:
            values[k] = sim.window_flux()
            k += 1
        if t in wanted:
            snaps[t] = sim.field.copy()
    return FluxSeries(steps, values, every, snaps)


def dominant_flux_frequency(series, warmup_steps, window="hann", pad=1, min_frequency=None):
    """Dominant frequency (cycles per scheduler step) of the post-warmup flux."""
    spec = flux_spectrum(series, warmup_steps, window, pad)
    return dominant_frequency(spec, min_frequency)


def flux_spectrum(series, warmup_steps, window="hann", pad=1):
    return periodogram(series.after(warmup_steps), dt=series.sample_interval,
                       window=window, pad=pad, time_unit="step")


@dataclass
class SweepRun:
    fraction: float
    seed: int
    series: FluxSeries


def _run_one(cfg):
    return run_experiment(cfg)


def sweep(fractions, runs_per_fraction, base_config, workers=1):
    """Run every fraction at seeds ``base_config.seed + i`` for i < runs_per_fraction.

    Results come back in (fraction order, seed order) whatever ``workers`` is.
    """
    if runs_per_fraction < 1:
        raise InvalidArgument("runs_per_fraction must be at least 1")
    configs = [replace(base_config, fraction=float(f), seed=base_config.seed + i)
               for f in fractions for i in range(runs_per_fraction)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            series = list(ex.map(_run_one, configs))
    else:
        series = []
        for c in configs:
            log.info("run fraction=%g seed=%d", c.fraction, c.seed)
            series.append(run_experiment(c))
    return [SweepRun(c.fraction, c.seed, s) for c, s in zip(configs, series)]


def write_flux_csv(path, series):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "mean_flux"])
        for t, v in zip(series.steps, series.values):
            w.writerow([int(t), repr(float(v))])


def read_flux_csv(path, sample_interval=5):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return FluxSeries(data[:, 0].astype(np.int64), data[:, 1], sample_interval)


def write_manifest_csv(path, rows):
    """``rows``: iterables of (fraction, seed, series_path, dominant_frequency)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["fraction", "seed", "series_path", "dominant_frequency"])
        for frac, seed, p, f in rows:
            w.writerow([repr(float(frac)), int(seed), p, repr(float(f))])
