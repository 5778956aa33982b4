"""Delimited text output for grids, phase arrows and summary tables."""

from __future__ import annotations

import io
from typing import IO, Iterable, Optional, Sequence

import numpy as np

from .coherence import classify_phase_field, phase_class_from_code
from .cwt import ScaleGrid
from .errors import GridMismatch, WaveletError


class IoFailure(WaveletError):
    pass


def _fmt(v: float) -> str:
    return "nan" if not np.isfinite(v) else format(float(v), ".12g")


def _write(sink, text: str) -> None:
    try:
        if isinstance(sink, io.TextIOBase):
            sink.write(text)
        else:
            sink.write(text.encode("utf-8"))
    except (OSError, ValueError) as exc:
        raise IoFailure(str(exc)) from exc


def grid_csv(field: np.ndarray, grid: ScaleGrid, coi: np.ndarray,
             mask: Optional[np.ndarray] = None) -> str:
    field = np.asarray(field)
    rows, n = field.shape
    if rows != grid.num_scales or np.asarray(coi).shape != (n,):
        raise GridMismatch(f"field {field.shape} does not match grid ({grid.num_scales} scales) "
                           f"and cone of influence ({np.asarray(coi).shape})")
    if mask is not None and np.shape(mask) != field.shape:
        raise GridMismatch("significance mask shape differs from the field")
    header = "time_index,scale,value" + (",significant" if mask is not None else "")
    out = [header]
    for j, s in enumerate(grid.scales):
        sc = format(float(s), ".9g")
        if mask is None:
            out.extend(f"{i},{sc},{_fmt(v)}" for i, v in enumerate(field[j]))
        else:
            out.extend(f"{i},{sc},{_fmt(v)},{int(bool(m))}"
                       for i, (v, m) in enumerate(zip(field[j], mask[j])))
    return "\n".join(out) + "\n"


def export_grid(field: np.ndarray, grid: ScaleGrid, coi: np.ndarray,
                mask: Optional[np.ndarray], sink: IO) -> None:
    """Write a (scale, time) field as long-format CSV, scale-major then time.

    Columns are ``time_index,scale,value`` plus ``significant`` (0/1) when a
    mask is given. Scales carry 9 significant digits.
    """
    _write(sink, grid_csv(field, grid, coi, mask))


def coi_csv(coi: np.ndarray) -> str:
    lines = ["time_index,coi_scale"]
    lines.extend(f"{i},{format(float(c), '.9g')}" for i, c in enumerate(coi))
    return "\n".join(lines) + "\n"


def phase_arrows_csv(phase: np.ndarray, grid: ScaleGrid, region: np.ndarray,
                     time_step: int = 8, scale_step: int = 6,
                     mask: Optional[np.ndarray] = None) -> str:
    """Subsampled (time, scale, theta, class) tuples for drawing phase arrows.

    Only points unaffected by edge effects are listed; with a mask, only
    significant ones.
    """
    codes = classify_phase_field(phase)
    lines = ["time_index,scale,theta,class,arrow"]
    for j in range(0, grid.num_scales, max(scale_step, 1)):
        sc = format(float(grid.scales[j]), ".9g")
        for i in range(0, phase.shape[1], max(time_step, 1)):
            if not region[j, i] or codes[j, i] < 0:
                continue
            if mask is not None and not mask[j, i]:
                continue
            cls = phase_class_from_code(codes[j, i])
            lines.append(f"{i},{sc},{_fmt(phase[j, i])},{cls.label},{cls.glyph}")
    return "\n".join(lines) + "\n"


def table_csv(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    def cell(v):
        if v is None:
            return ""
        if isinstance(v, bool):
            return str(int(v))
        if isinstance(v, (float, np.floating)):
            return _fmt(v)
        return str(v)

    lines = [",".join(columns)]
    lines.extend(",".join(cell(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"
