"""Bit-count encoding of full-adder inputs and the frequency-threshold decoder.

A full adder's outputs depend only on how many of (X, Y, Cin) are 1, and
that count read as a two-bit number is exactly (Cout, S).  The physical
route turns the count into an arena fraction, measures the oscillation
frequency of the simulated plasmodium, and thresholds it back to a bin.
"""
import csv
from collections import Counter
from dataclasses import dataclass, replace

import numpy as np

from .errors import CalibrationFailure, FormatError, InvalidArgument

# bit count -> arena length fraction; frequency rises as the arena shrinks,
# so bin index rises with bit count
FRACTION_MAP = {0: 1.0, 1: 0.75, 2: 0.5, 3: 0.25}


def _bit(v, name):
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (int, np.integer)) and v in (0, 1):
        return int(v)
    raise InvalidArgument(f"{name} must be 0 or 1, got {v!r}")


@dataclass(frozen=True)
class AdderInput:
    x: int
    y: int
    cin: int

    def __post_init__(self):
        for name in ("x", "y", "cin"):
            object.__setattr__(self, name, _bit(getattr(self, name), name))

    @property
    def bit_count(self):
        return self.x + self.y + self.cin

    @property
    def decimal(self):
        return 4 * self.x + 2 * self.y + self.cin


@dataclass(frozen=True)
class AdderOutput:
    s: int
    cout: int

    @property
    def decimal(self):
        return 2 * self.cout + self.s

    def __str__(self):
        return f"S={self.s} Cout={self.cout}"


def all_inputs():
    """The eight inputs in truth-table order (decimal 0..7)."""
    return [AdderInput((d >> 2) & 1, (d >> 1) & 1, d & 1) for d in range(8)]


def _as_input(inp):
    return inp if isinstance(inp, AdderInput) else AdderInput(*inp)


def encode_bit_count(inp):
    return _as_input(inp).bit_count


def decode_bin(b):
    if isinstance(b, (bool, np.bool_)) or not isinstance(b, (int, np.integer)) or not 0 <= b <= 3:
        raise InvalidArgument(f"bin must be an integer in 0..3, got {b!r}")
    return AdderOutput(s=int(b) & 1, cout=int(b) >> 1)


def logical_full_add(inp):
    return decode_bin(encode_bit_count(inp))


def ripple_add(a, b, width):
    """Add two ``width``-bit words by chaining full adders; returns the (width+1)-bit sum."""
    if width < 1:
        raise InvalidArgument("width must be at least 1")
    for name, v in (("a", a), ("b", b)):
        if not 0 <= v < (1 << width):
            raise InvalidArgument(f"{name}={v} does not fit in {width} bits")
    carry, total = 0, 0
    for i in range(width):
        out = logical_full_add(AdderInput((a >> i) & 1, (b >> i) & 1, carry))
        total |= out.s << i
        carry = out.cout
    return total | (carry << width)


def truth_table_rows():
    """(decimal, bit count, input, output) for every input, in truth-table order."""
    return [(i.decimal, i.bit_count, i, logical_full_add(i)) for i in all_inputs()]


def format_truth_table():
    lines = ["dec bits | X Y Cin | Cout S | out"]
    for dec, bits, i, o in truth_table_rows():
        lines.append(f"{dec:>3} {bits:>4} | {i.x} {i.y} {i.cin} | {o.cout} {o.s} | {o.decimal}")
    return "\n".join(lines)


@dataclass(frozen=True)
class CalibrationTable:
    fractions: tuple      # arena fraction measured for bins 0..3
    means: tuple          # mean dominant frequency per bin
    thresholds: tuple     # three ascending frequencies separating the bins
    runs: tuple = ()      # runs contributing to each mean

    @property
    def low_confidence(self):
        return bool(self.runs) and min(self.runs) < 2


def calibrate(results, fraction_map=None, min_runs=2):
    """Thresholds at the midpoints of adjacent per-bin mean frequencies.

    ``results`` is an iterable of (fraction, dominant frequency) pairs.  Means
    must rise strictly with bin index or :class:`CalibrationFailure` is raised.
    """
    fmap = dict(FRACTION_MAP if fraction_map is None else fraction_map)
    by_fraction = {}
    for frac, f in results:
        by_fraction.setdefault(float(frac), []).append(float(f))
    means, runs, fracs = [], [], []
    for b in range(4):
        frac = float(fmap[b])
        fs = by_fraction.get(frac)
        if not fs:
            raise CalibrationFailure(f"no runs at fraction {frac} (bin {b})")
        if len(fs) < min_runs:
            raise CalibrationFailure(f"bin {b} has {len(fs)} run(s), need {min_runs}")
        fracs.append(frac)
        means.append(float(np.mean(fs)))
        runs.append(len(fs))
    if not all(a < b for a, b in zip(means, means[1:])):
        raise CalibrationFailure(
            "mean frequencies do not rise with bin index: "
            + ", ".join(f"bin {b} ({fracs[b]}): {m:.6g}" for b, m in enumerate(means)),
            means=means)
    thresholds = tuple((a + b) / 2.0 for a, b in zip(means, means[1:]))
    return CalibrationTable(tuple(fracs), tuple(means), thresholds, tuple(runs))


def classify_frequency(f, cal):
    """Number of thresholds strictly below ``f``; a frequency on a threshold takes the lower bin."""
    return sum(1 for t in cal.thresholds if t < f)


def write_calibration_csv(path, cal):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["bin", "fraction", "mean_frequency"])
        for b, (frac, m) in enumerate(zip(cal.fractions, cal.means)):
            w.writerow([b, repr(frac), repr(m)])
        w.writerow(["threshold_index", "frequency"])
        for i, t in enumerate(cal.thresholds):
            w.writerow([i, repr(t)])


def read_calibration_csv(path):
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    try:
        split = rows.index(["threshold_index", "frequency"])
    except ValueError:
        raise FormatError(f"{path}: missing 'threshold_index,frequency' section") from None
    if not rows or rows[0] != ["bin", "fraction", "mean_frequency"]:
        raise FormatError(f"{path}: missing 'bin,fraction,mean_frequency' header")
    try:
        bins = sorted((int(b), float(fr), float(m)) for b, fr, m in rows[1:split])
        ths = sorted((int(i), float(t)) for i, t in rows[split + 1:])
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    if [b[0] for b in bins] != [0, 1, 2, 3] or [t[0] for t in ths] != [0, 1, 2]:
        raise FormatError(f"{path}: expected bins 0..3 and thresholds 0..2")
    thresholds = tuple(t[1] for t in ths)
    if not all(a < b for a, b in zip(thresholds, thresholds[1:])):
        raise FormatError(f"{path}: thresholds are not ascending")
    return CalibrationTable(tuple(b[1] for b in bins), tuple(b[2] for b in bins), thresholds)


@dataclass
class PhysicalResult:
    output: AdderOutput
    fraction: float
    seeds: list
    frequencies: list
    bins: list


def physical_full_add(inp, cal, config, seed, votes=1, fraction_map=None):
    """Evaluate the adder by simulation: fraction -> flux oscillation -> bin -> bits.

    With ``votes > 1`` the run is repeated at seeds ``seed, seed+1, ...`` and
    the most common bin wins (ties go to the lower bin).
    """
    from .engine import dominant_flux_frequency, run_experiment

    if votes < 1:
        raise InvalidArgument("votes must be at least 1")
    fmap = FRACTION_MAP if fraction_map is None else fraction_map
    frac = fmap[encode_bit_count(inp)]
    seeds, freqs, bins = [], [], []
    for k in range(votes):
        cfg = replace(config, fraction=frac, seed=seed + k)
        series = run_experiment(cfg)
        f = dominant_flux_frequency(series, cfg.warmup_steps).frequency
        seeds.append(seed + k)
        freqs.append(f)
        bins.append(classify_frequency(f, cal))
    counts = Counter(bins)
    best = max(counts.values())
    winner = min(b for b, c in counts.items() if c == best)
    return PhysicalResult(decode_bin(winner), frac, seeds, freqs, bins)
