"""Render posterior curves to an image file next to the CSV output."""
from __future__ import annotations

from typing import Mapping

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_posterior_figure(
    xs: np.ndarray,
    curves: Mapping[float, np.ndarray],
    path: str,
    title: str | None = None,
) -> None:
    """One axes, one labelled curve per observed value."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for v in sorted(curves):
        ax.plot(xs, curves[v], label=f"v = {v:g}", linewidth=1.4)
    ax.set_xlabel("m")
    ax.set_ylabel("posterior density")
    if title:
        ax.set_title(title)
    if curves:
        ax.legend(frameon=False)
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
