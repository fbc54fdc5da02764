"""Matplotlib renderings of report objects, written straight to files.

matplotlib is imported lazily inside each function with the Agg backend
so library users who never render pay no import cost and no display is
required.
"""

from __future__ import annotations


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


_DPI = 150


def save_normality_figure(report, path: str) -> None:
    """Block discrepancy against prefix length, one curve per block size."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    for k in range(1, report.k_max + 1):
        pts = [(n, float(d)) for kk, n, d in report.rows if kk == k]
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=f"k={k}")
    ax.set_xscale("log")
    ax.set_xlabel("prefix length n")
    ax.set_ylabel("discrepancy")
    ax.set_title(f"{report.spec_string} (base {report.base})")
    ax.legend()
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)


def save_profile_figure(series_list, path: str) -> None:
    """Complexity profiles against the full-length reference line."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    n_all = []
    for series in series_list:
        ns = [e.n for e in series.entries]
        ax.plot(ns, [e.value for e in series.entries], marker="o", label=series.label)
        n_all.extend(ns)
    if n_all:
        lim = sorted(set(n_all))
        ax.plot(lim, lim, linestyle="--", color="gray", label="value = n")
    ax.set_xlabel("precision n")
    ax.set_ylabel("shortest name length")
    ax.legend(fontsize=8)
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)


def save_capital_figure(profile, path: str) -> None:
    """log2 capital along the stream with the comparison lines drawn in."""
    import math

    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    ns = [n for n, _ in profile.samples]
    ax.plot(ns, [v for _, v in profile.samples], label="log2 capital")
    for entry in profile.entries:
        if entry.threshold == "sqrt(n)":
            ax.plot(ns, [math.sqrt(n) for n in ns], linestyle=":", label="sqrt(n)")
        elif entry.threshold.endswith("*n"):
            eps = float(entry.threshold[:-2])
            ax.plot(ns, [eps * n for n in ns], linestyle="--", label=entry.threshold)
    ax.set_xlabel("prefix length n")
    ax.set_ylabel("log2 capital")
    ax.set_title(f"{profile.spec_string} (base {profile.base})")
    ax.legend(fontsize=8)
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)


def save_dim_figure(profile, path: str) -> None:
    """Per-codec cost ratios against prefix length."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    for name in profile.codec_names:
        pts = [(n, costs[name] / n) for n, costs in profile.rows]
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=name)
    ax.axhline(1.0, linestyle="--", color="gray", linewidth=0.8)
    ax.set_xscale("log")
    ax.set_xlabel("prefix length n")
    ax.set_ylabel("k_m / n")
    ax.set_title(f"{profile.spec_string} (base {profile.base})")
    ax.legend(fontsize=8)
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
