"""SVG line plots for the CLI reports.

Figures are built without pyplot and saved with a fixed hash salt and no
date stamp, so reruns give identical files.
"""
import matplotlib

matplotlib.use("Agg")
from matplotlib.figure import Figure  # noqa: E402

_RC = {"svg.hashsalt": "physarum-adder", "svg.fonttype": "none"}


def _save(fig, path):
    with matplotlib.rc_context(_RC):
        fig.savefig(path, format="svg", metadata={"Date": None})


def plot_flux(path, series, warmup_steps=None, title="window flux"):
    fig = Figure(figsize=(8, 3))
    ax = fig.add_subplot()
    ax.plot(series.steps, series.values, lw=0.8)
    if warmup_steps:
        ax.axvline(warmup_steps, color="grey", ls="--", lw=0.8)
    ax.set_xlabel("scheduler step")
    ax.set_ylabel("mean flux")
    ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)


def plot_calibration(path, fractions, means, stds, thresholds=()):
    fig = Figure(figsize=(5, 4))
    ax = fig.add_subplot()
    ax.errorbar(fractions, means, yerr=stds, marker="o", capsize=3)
    for t in thresholds:
        ax.axhline(t, color="grey", ls=":", lw=0.8)
    ax.set_xlabel("arena length fraction")
    ax.set_ylabel("dominant frequency (cycles/step)")
    fig.tight_layout()
    _save(fig, path)


def plot_length_fit(path, points, summary, fit):
    fig = Figure(figsize=(5, 4))
    ax = fig.add_subplot()
    ax.plot([p[0] for p in points], [p[1] for p in points], ".", color="lightgrey")
    ax.errorbar([s.length_cm for s in summary], [s.mean_freq_hz for s in summary],
                yerr=[s.std_freq_hz for s in summary], fmt="o", capsize=3)
    xs = [min(s.length_cm for s in summary), max(s.length_cm for s in summary)]
    ax.plot(xs, [fit.slope * x + fit.intercept for x in xs], "-",
            label=f"y = {fit.slope:.4g}x + {fit.intercept:.4g}, R² = {fit.r2:.4f}")
    ax.set_xlabel("length (cm)")
    ax.set_ylabel("frequency (Hz)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)
