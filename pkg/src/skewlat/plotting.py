"""Figures written next to the CSV output. Uses the non-interactive Agg backend."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def new_figure(width: float = 6.0, height: float | None = None):
    golden = (5**0.5 - 1.0) / 2.0
    fig, ax = plt.subplots(figsize=(width, height or width * golden))
    ax.grid(True, which="both", alpha=0.3)
    return fig, ax


def save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata={"Software": None} if path.suffix == ".png" else None)
    plt.close(fig)
    return path


def plot_curves(
    x: Sequence[float],
    curves: Mapping[str, Sequence[float]],
    path,
    xlabel: str = "x",
    ylabel: str = "",
    title: str = "",
    logx: bool = False,
    logy: bool = False,
    markers: Mapping[str, Sequence[bool]] | None = None,
) -> Path:
    """Line plot of several curves over a shared grid.

    ``markers`` optionally flags points per curve (e.g. capped bounds),
    drawn as open circles.
    """
    fig, ax = new_figure()
    for label, y in curves.items():
        (line,) = ax.plot(x, y, label=label, lw=1.5)
        flags = (markers or {}).get(label)
        if flags is not None:
            fx = [a for a, f in zip(x, flags) if f]
            fy = [b for b, f in zip(y, flags) if f]
            if fx:
                ax.plot(fx, fy, "o", mfc="none", color=line.get_color(), ms=4)
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    return save(fig, path)


def plot_psi_comparison(x, psi_orth, psi_skew, path, orth_label="orthogonal", skew_label="skewed") -> Path:
    return plot_curves(
        x,
        {orth_label: psi_orth, skew_label: psi_skew},
        path,
        xlabel="x",
        ylabel=r"$\psi(x)$",
        logx=True,
        logy=True,
    )


def plot_estimates(sigmas, estimates, stderrs, path, bound=None, ylabel="probability") -> Path:
    fig, ax = new_figure()
    ax.errorbar(sigmas, estimates, yerr=[3 * s for s in stderrs], fmt="o-", ms=3, capsize=2,
                label="Monte Carlo (3 s.e.)")
    if bound is not None:
        ax.plot(sigmas, bound, "--", label="bound")
    ax.set_xlabel(r"$\sigma$")
    ax.set_ylabel(ylabel)
    ax.legend(frameon=False)
    return save(fig, path)
