"""Frequency-versus-length regression for logged voltage traces.

Trace files hold one or more blocks, each introduced by a header line
``# trace,<length_cm>,<sample_rate_hz>`` and followed by one voltage per line.
Blank lines are ignored.
"""
import csv
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFit, FormatError, InsufficientData, ParseError
from .spectral import MIN_SAMPLES, dominant_frequency, periodogram

log = logging.getLogger(__name__)


@dataclass
class VoltageTrace:
    length_cm: float
    sample_rate: float
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r2: float
    n: int
    degenerate: bool = False


@dataclass
class LengthSummary:
    length_cm: float
    mean_freq_hz: float
    std_freq_hz: float
    n: int


@dataclass
class StudyResult:
    fit: LinearFit
    summary: list
    frequencies: list  # (length_cm, frequency_hz) per surviving trace
    excluded: list = field(default_factory=list)  # (trace index, reason)


def _parse_header(text, lineno):
    parts = [p.strip() for p in text.lstrip("#").split(",")]
    if len(parts) != 3 or parts[0] != "trace":
        raise ParseError(f"expected '# trace,<length_cm>,<sample_rate_hz>', got {text!r}", lineno)
    try:
        length, rate = float(parts[1]), float(parts[2])
    except ValueError:
        raise ParseError(f"non-numeric trace header {text!r}", lineno) from None
    if not rate > 0:
        raise ParseError("sample rate must be positive", lineno)
    return length, rate


def parse_traces(lines):
    traces = []
    current = None
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text:
            continue
        if text.startswith("#"):
            length, rate = _parse_header(text, lineno)
            current = VoltageTrace(length, rate, [])
            current.samples = []
            traces.append(current)
            continue
        if current is None:
            raise FormatError(f"line {lineno}: sample before any '# trace' header")
        try:
            current.samples.append(float(text))
        except ValueError:
            raise ParseError(f"non-numeric voltage {text!r}", lineno) from None
    if not traces:
        raise FormatError("no '# trace' header found")
    for t in traces:
        t.samples = np.asarray(t.samples, dtype=float)
    return traces


def load_traces(path):
    with open(path) as fh:
        return parse_traces(fh)


def write_traces(path, traces):
    with open(path, "w") as fh:
        for t in traces:
            fh.write(f"# trace,{t.length_cm!r},{t.sample_rate!r}\n")
            for v in t.samples:
                fh.write(f"{float(v)!r}\n")


def linear_fit(xs, ys):
    """Ordinary least squares y = slope*x + intercept with R^2 = 1 - SSres/SStot.

    When every y is equal the fit is flagged degenerate and R^2 is reported as 0.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("xs and ys must be 1-d and equally long")
    if x.size < 2 or np.all(x == x[0]):
        raise DegenerateFit("need at least two distinct x values")
    xm, ym = x.mean(), y.mean()
    dx = x - xm
    slope = float(np.dot(dx, y - ym) / np.dot(dx, dx))
    intercept = float(ym - slope * xm)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.dot(y - ym, y - ym))
    if ss_tot == 0.0:
        return LinearFit(slope, intercept, 0.0, x.size, degenerate=True)
    r2 = 1.0 - float(np.dot(resid, resid)) / ss_tot
    return LinearFit(slope, intercept, r2, x.size)


def trace_frequency(trace, window="hann", min_frequency=None):
    if trace.samples.size < MIN_SAMPLES:
        raise InsufficientData(f"trace has {trace.samples.size} samples, need {MIN_SAMPLES}")
    spec = periodogram(trace.samples, dt=1.0 / trace.sample_rate, window=window, time_unit="s")
    return dominant_frequency(spec, min_frequency).frequency


def length_frequency_study(traces, window="hann", min_frequency=None):
    """Fit per-trace dominant frequency against tube length.

    Traces that fail spectral preconditions are logged and left out.
    """
    points, excluded = [], []
    for i, t in enumerate(traces):
        try:
            points.append((t.length_cm, trace_frequency(t, window, min_frequency)))
        except InsufficientData as exc:
            log.warning("trace %d (%g cm) excluded: %s", i, t.length_cm, exc)
            excluded.append((i, str(exc)))
    lengths = sorted({p[0] for p in points})
    if len(lengths) < 2:
        raise DegenerateFit(f"need at least two distinct lengths, have {len(lengths)}")
    fit = linear_fit([p[0] for p in points], [p[1] for p in points])
    summary = []
    for length in lengths:
        fs = np.array([f for l, f in points if l == length])
        std = float(fs.std(ddof=1)) if fs.size > 1 else 0.0
        summary.append(LengthSummary(length, float(fs.mean()), std, int(fs.size)))
    return StudyResult(fit, summary, points, excluded)


def write_summary_csv(path, summary):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["length_cm", "mean_freq_hz", "std_freq_hz", "n"])
        for s in summary:
            w.writerow([repr(s.length_cm), repr(s.mean_freq_hz), repr(s.std_freq_hz), s.n])


def write_fit_csv(path, fit):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["slope", "intercept", "r2"])
        w.writerow([repr(fit.slope), repr(fit.intercept), repr(fit.r2)])
