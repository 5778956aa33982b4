"""Static PNG figures: time-scale heatmaps and level-scan line plots."""

from __future__ import annotations

from typing import IO, Mapping, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import LinearSegmentedColormap  # noqa: E402

from .export import IoFailure  # noqa: E402

RAMP = LinearSegmentedColormap.from_list("blue_yellow_red", ["#0000ff", "#ffff00", "#ff0000"])
PNG_METADATA = {"Software": None}


def heatmap_figure(field: np.ndarray, coi: np.ndarray, mask: Optional[np.ndarray] = None,
                   scales: Optional[np.ndarray] = None, title: str = "",
                   figsize=(8.0, 4.5), dpi: int = 100):
    """Draw a [0, 1] field on a log2 scale axis that increases downward.

    Cells are painted nearest-neighbour on a blue-yellow-red ramp; the cone
    of influence is a white curve and the mask, if any, a black contour.
    Returns ``(fig, ax)``.
    """
    field = np.clip(np.nan_to_num(np.asarray(field, dtype=float), nan=0.0), 0.0, 1.0)
    rows, n = field.shape
    if scales is None:
        scales = 2.0 ** np.arange(rows)
    ly = np.log2(np.asarray(scales, dtype=float))
    step = ly[1] - ly[0] if rows > 1 else 1.0
    top, bottom = ly[0] - step / 2, ly[-1] + step / 2

    fig, ax = plt.subplots(figsize=figsize, dpi=dpi)
    im = ax.imshow(field, cmap=RAMP, vmin=0.0, vmax=1.0, interpolation="nearest",
                   aspect="auto", origin="upper", extent=(-0.5, n - 0.5, bottom, top))
    coi = np.asarray(coi, dtype=float)
    with np.errstate(divide="ignore"):
        coi_y = np.clip(np.log2(np.maximum(coi, 2.0 ** (top - 1))), top, bottom)
    ax.plot(np.arange(n), coi_y, color="white", linewidth=2.0)
    if mask is not None and rows > 1 and n > 1 and np.any(mask):
        ax.contour(np.arange(n), ly, np.asarray(mask, dtype=float), levels=[0.5],
                   colors="black", linewidths=1.5)
    ax.set_ylim(bottom, top)
    ax.set_xlim(-0.5, n - 0.5)
    ticks = np.arange(np.ceil(ly[0]), np.floor(ly[-1]) + 1)
    ax.set_yticks(ticks)
    ax.set_yticklabels([f"{2 ** t:g}" for t in ticks])
    ax.set_ylabel("scale")
    ax.set_xlabel("time index")
    if title:
        ax.set_title(title)
    fig.colorbar(im, ax=ax, fraction=0.04, pad=0.02)
    return fig, ax


def _save(fig, sink: IO, dpi: int) -> None:
    try:
        fig.savefig(sink, format="png", dpi=dpi, metadata=PNG_METADATA)
    except (OSError, ValueError) as exc:
        raise IoFailure(str(exc)) from exc
    finally:
        plt.close(fig)


def render_heatmap(field: np.ndarray, coi: np.ndarray, mask: Optional[np.ndarray],
                   sink: IO, scales: Optional[np.ndarray] = None, title: str = "",
                   dpi: int = 100) -> None:
    """Render :func:`heatmap_figure` as PNG into ``sink``."""
    fig, _ = heatmap_figure(field, coi, mask, scales, title, dpi=dpi)
    _save(fig, sink, dpi)


def render_level_scan(levels: Sequence[int], curves: Mapping[str, Sequence[float]],
                      sink: IO, ylabel: str = "WEEM", title: str = "", dpi: int = 100) -> None:
    """Line plot of a measure against decomposition level, one curve per label."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=dpi)
    for label, ys in curves.items():
        ax.plot(list(levels), list(ys), marker="o", label=label)
    ax.axhline(0.0, color="0.6", linewidth=0.8)
    ax.set_xlabel("level J")
    ax.set_ylabel(ylabel)
    ax.set_xticks(list(levels))
    if title:
        ax.set_title(title)
    if len(curves) > 1:
        ax.legend()
    fig.tight_layout()
    _save(fig, sink, dpi)


def render_series(series: Mapping[str, np.ndarray], sink: IO, dpi: int = 100) -> None:
    fig, axes = plt.subplots(len(series), 1, figsize=(8.0, 2.2 * len(series)), dpi=dpi,
                             squeeze=False, sharex=True)
    for ax, (label, values) in zip(axes[:, 0], series.items()):
        ax.plot(np.asarray(values), color="k", linewidth=0.9)
        ax.set_ylabel(label)
    axes[-1, 0].set_xlabel("time index")
    fig.tight_layout()
    _save(fig, sink, dpi)
