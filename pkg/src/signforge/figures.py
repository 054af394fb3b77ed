"""Matplotlib renderings for the report paths (written next to the delimited
output, never shown interactively)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .animation import Animation, sample_curve

# Keep emitted PNGs free of run-dependent metadata.
_PNG_METADATA = {"Software": None}


def recognition_figure(rows, path, p0: float = 0.25) -> None:
    """Bar chart of recognition rates with the chance level and audit flags."""
    labels = [r.sign for r in rows]
    rates = [r.rate_percent for r in rows]
    colors = ["#2a7fb8" if r.significant_at_05 else "#b0b0b0" for r in rows]

    fig, ax = plt.subplots(figsize=(max(6.0, 0.6 * len(rows)), 4.0))
    bars = ax.bar(range(len(rows)), rates, color=colors)
    for bar, row in zip(bars, rows):
        if row.mismatch:
            bar.set_hatch("//")
            bar.set_edgecolor("#8b1a1a")
    ax.axhline(100.0 * p0, color="#444444", linestyle="--", linewidth=1,
               label=f"chance ({100.0 * p0:.0f}%)")
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("recognition rate [%]")
    ax.set_ylim(0, 105)
    ax.legend(loc="upper right", fontsize=8)
    ax.set_title("recognition rates (hatched = reported p disagrees with exact tail)")
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_METADATA)
    plt.close(fig)


def curves_figure(animation: Animation, path, samples_per_frame: int = 4) -> None:
    """Sampled actuator curves over the animation span, keys marked."""
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    last = animation.last_frame
    steps = max(2, last * samples_per_frame + 1)
    xs = [last * i / (steps - 1) for i in range(steps)]
    for curve in animation.curves:
        ys = [sample_curve(curve, x) for x in xs]
        (line,) = ax.plot(xs, ys, linewidth=1.2, label=curve.actuator)
        ax.plot(
            [k.frame for k in curve.keys],
            [k.value for k in curve.keys],
            linestyle="none",
            marker="o",
            markersize=3,
            color=line.get_color(),
        )
    ax.set_xlabel(f"frame ({animation.fps} fps)")
    ax.set_ylabel("value [degree]")
    ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_METADATA)
    plt.close(fig)


def build_figure(batch_report, path) -> None:
    """Per-gloss compile outcome summary for a lexicon build."""
    order = {"Automated": 0, "Failed": 1, "Skipped": 2}
    color = {"Automated": "#2a7fb8", "Failed": "#c23b22", "Skipped": "#b0b0b0"}
    reports = list(batch_report.reports)
    fig, ax = plt.subplots(figsize=(max(6.0, 0.5 * max(1, len(reports))), 3.0))
    ax.bar(
        range(len(reports)),
        [1] * len(reports),
        color=[color[r.status] for r in reports],
    )
    ax.set_xticks(range(len(reports)))
    ax.set_xticklabels([r.gloss for r in reports], rotation=45, ha="right", fontsize=8)
    ax.set_yticks([])
    counts = batch_report.counts
    ax.set_title(
        f"lexicon build: {counts['Automated']} automated, "
        f"{counts['Failed']} failed, {counts['Skipped']} skipped"
    )
    handles = [plt.Rectangle((0, 0), 1, 1, color=color[s]) for s in order]
    ax.legend(handles, list(order), fontsize=8, loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_METADATA)
    plt.close(fig)
