"""Command-line entry point: ``wavecomove <command> [flags]``.

Commands write CSV tables or grids and, unless ``--format csv`` is given, PNG
figures into ``--out``. Outputs are staged as temporary files and renamed
into place only after every output of the command has been produced.
Exit status: 0 success, 1 data or numerical error, 2 usage error.
"""

from __future__ import annotations

import argparse
import io
import os
import sys
import tempfile
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import __version__
from .coherence import coherence, partial_coherence
from .cwt import build_grid, cwt, power, reliable_region
from .dwt import SCALING_FILTERS
from .entropy import cweem, weem
from .errors import InvalidSeries, WaveletError
from .export import coi_csv, grid_csv, phase_arrows_csv, table_csv
from .series import TimeSeries, align_many, describe, load_csv
from .significance import coherence_significance, partial_coherence_significance

COMMANDS = ("stats", "cwt", "coherence", "pcoh", "weem", "cweem")
NEEDS = {"stats": ("x",), "cwt": ("x",), "coherence": ("x", "y"),
         "pcoh": ("x", "y", "z"), "weem": ("x",), "cweem": ("x", "y")}


class UsageError(Exception):
    pass


def _levels(text: str) -> tuple[int, int]:
    try:
        a, b = (int(p) for p in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A:B, got {text!r}") from None
    if a < 1 or b < a:
        raise argparse.ArgumentTypeError(f"need 1 <= A <= B, got {text!r}")
    return a, b


def _formats(text: str) -> frozenset:
    parts = {p.strip() for p in text.split(",") if p.strip()}
    bad = parts - {"csv", "image"}
    if bad or not parts:
        raise argparse.ArgumentTypeError(f"formats must be csv and/or image, got {text!r}")
    return frozenset(parts)


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("inputs")
    g.add_argument("--x", help="CSV file of the first series")
    g.add_argument("--y", help="CSV file of the second series")
    g.add_argument("--z", help="CSV file of the control series (pcoh)")
    g.add_argument("--date-col", default="date")
    g.add_argument("--value-col", default=None,
                   help="value column; defaults to the only non-date column")
    g.add_argument("--transform", choices=("none", "log", "diff", "logdiff"), default="none",
                   help="apply to every input before analysis")
    g = p.add_argument_group("continuous transform")
    g.add_argument("--s0", type=float, default=None, help="smallest scale (default 2*dt)")
    g.add_argument("--dj", type=float, default=1.0 / 12.0)
    g.add_argument("--omega0", type=float, default=6.0)
    g.add_argument("--squared", action="store_true", help="export R^2 instead of R")
    g.add_argument("--pcoh-form", choices=("standard", "printed"), default="standard")
    g.add_argument("--arrow-step", type=int, default=8, help="time subsampling of phase arrows")
    g = p.add_argument_group("significance")
    g.add_argument("--alpha", type=float, default=0.05)
    g.add_argument("--runs", type=int, default=300, help="Monte Carlo runs; 0 disables")
    g.add_argument("--seed", type=int, default=0)
    g = p.add_argument_group("entropy")
    g.add_argument("--levels", type=_levels, default=None, metavar="A:B")
    g.add_argument("--filter", choices=sorted(SCALING_FILTERS), default="la8")
    g.add_argument("--base", choices=("e", "2"), default=None)
    g.add_argument("--wn", choices=("analytic", "mc"), default="analytic")
    g.add_argument("--mc-runs", type=int, default=100)
    g.add_argument("--lb-lag", type=int, default=1, help="Ljung-Box lag (stats)")
    g = p.add_argument_group("output")
    g.add_argument("--out", default=".")
    g.add_argument("--format", type=_formats, default=frozenset({"csv", "image"}),
                   help="comma list of csv,image")
    g.add_argument("--config", default=None, help="flat key=value file; flags override")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wavecomove",
        description="Wavelet coherence and wavelet-entropy predictability of time series.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True
    common = _common_parser()
    helps = {
        "stats": "descriptive statistics of each input",
        "cwt": "wavelet power spectrum of --x",
        "coherence": "wavelet coherence and phase of --x and --y",
        "pcoh": "partial coherence of --x and --y given --z",
        "weem": "wavelet energy entropy measure of --x over levels",
        "cweem": "cross wavelet energy entropy measure of --x and --y over levels",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name], description=helps[name])
    return parser


def _read_config(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            k, v = (s.strip() for s in line.split("=", 1))
            out[k.lstrip("-").replace("-", "_")] = v
    return out


def _apply_config(sub: argparse.ArgumentParser, values: dict) -> None:
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, raw in values.items():
        act = actions.get(key)
        if act is None or key in ("config", "help"):
            raise UsageError(f"unknown config key {key!r}")
        if isinstance(act, argparse._StoreTrueAction):
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
            continue
        try:
            val = act.type(raw) if act.type else raw
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"config key {key!r}: {exc}") from None
        if act.choices is not None and val not in act.choices:
            raise UsageError(f"config key {key!r}: {val!r} not in {sorted(act.choices)}")
        defaults[key] = val
    sub.set_defaults(**defaults)


def parse_args(argv) -> argparse.Namespace:
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        try:
            values = _read_config(known.config)
        except OSError as exc:
            parser.error(f"--config: {exc}")
        sub = parser._subparsers._group_actions[0]
        try:
            for sp in sub.choices.values():
                _apply_config(sp, values)
        except UsageError as exc:
            parser.error(f"--config: {exc}")
    args = parser.parse_args(argv)
    _validate(parser, args)
    return args


def _validate(parser, args) -> None:
    for name in NEEDS[args.command]:
        if getattr(args, name) is None:
            parser.error(f"--{name} is required for {args.command}")
    if not 0.0 < args.alpha < 1.0:
        parser.error(f"--alpha must lie strictly between 0 and 1, got {args.alpha}")
    if args.runs != 0 and args.runs < 100:
        parser.error(f"--runs must be 0 or at least 100, got {args.runs}")
    if not args.dj > 0:
        parser.error(f"--dj must be positive, got {args.dj}")
    if args.s0 is not None and not args.s0 > 0:
        parser.error(f"--s0 must be positive, got {args.s0}")
    if args.omega0 < 5:
        parser.error(f"--omega0 must be at least 5, got {args.omega0}")
    if args.mc_runs < 1:
        parser.error(f"--mc-runs must be positive, got {args.mc_runs}")
    if args.lb_lag < 1:
        parser.error(f"--lb-lag must be positive, got {args.lb_lag}")
    if args.arrow_step < 1:
        parser.error(f"--arrow-step must be positive, got {args.arrow_step}")


# -- outputs -----------------------------------------------------------------

class Outputs:
    """Collects named outputs in memory and commits them atomically."""

    def __init__(self, out_dir: str):
        self.out_dir = Path(out_dir)
        self.items: list[tuple[str, bytes, str]] = []

    def text(self, name: str, text: str, note: str = "") -> None:
        rows = text.count("\n") - 1
        self.items.append((name, text.encode("utf-8"), note or f"{rows} rows"))

    def figure(self, name: str, render: Callable[[io.BytesIO], None], note: str = "image") -> None:
        buf = io.BytesIO()
        render(buf)
        self.items.append((name, buf.getvalue(), note))

    def commit(self) -> list[str]:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        staged = []
        try:
            for name, data, _ in self.items:
                fd, tmp = tempfile.mkstemp(prefix=f".{name}.", dir=self.out_dir)
                staged.append(tmp)
                with os.fdopen(fd, "wb") as fh:
                    fh.write(data)
            for tmp, (name, _, _) in zip(staged, self.items):
                os.replace(tmp, self.out_dir / name)
        except BaseException:
            for tmp in staged:
                if os.path.exists(tmp):
                    os.unlink(tmp)
            raise
        return [f"wrote {self.out_dir / name} ({note}, {len(data)} bytes)"
                for name, data, note in self.items]


def _transform(s: TimeSeries, how: str) -> TimeSeries:
    v = s.values
    if how == "none":
        return s
    if how in ("log", "logdiff"):
        if np.any(v <= 0):
            raise InvalidSeries(f"series {s.name!r} has non-positive values; cannot take logs")
        v = np.log(v)
    if how in ("diff", "logdiff"):
        return TimeSeries(s.timestamps[1:], np.diff(v), s.dt, s.unit, s.name)
    return s.with_values(v)


def _load(args) -> dict:
    names = [n for n in ("x", "y", "z") if getattr(args, n) is not None
             and (n in NEEDS[args.command] or args.command == "stats")]
    loaded = {}
    for n in names:
        path = getattr(args, n)
        with open(path, "rb") as fh:
            s = load_csv(fh, args.value_col, args.date_col, name=Path(path).stem)
        loaded[n] = _transform(s, args.transform)
    if len(loaded) > 1 and args.command != "stats":
        aligned = align_many(*loaded.values())
        loaded = dict(zip(loaded.keys(), aligned))
    return loaded


def _grid(args, s: TimeSeries):
    return build_grid(s.n, s.dt, args.s0, args.dj, args.omega0)


def _level_range(args, n: int) -> range:
    if args.levels is not None:
        a, b = args.levels
    else:
        a, b = 2, max(2, min(7, n.bit_length() - 1))
    return range(a, b + 1)


def _cmd_stats(args, data, out: Outputs) -> None:
    cols = ["series", "n", "mean", "std_dev", "min", "max", "skewness", "excess_kurtosis",
            "jarque_bera", "jarque_bera_pvalue", "ljung_box", "ljung_box_lag",
            "ljung_box_pvalue", "degenerate"]
    rows = []
    for s in data.values():
        st = describe(s, args.lb_lag)
        rows.append([s.name, st.n, st.mean, st.std_dev, st.min, st.max, st.skewness,
                     st.excess_kurtosis, st.jarque_bera, st.jarque_bera_pvalue, st.ljung_box,
                     st.ljung_box_lag, st.ljung_box_pvalue, st.degenerate])
    if "csv" in args.format:
        out.text("stats.csv", table_csv(cols, rows))
    if "image" in args.format:
        from .plotting import render_series
        out.figure("series.png", lambda b: render_series({s.name: s.values for s in data.values()}, b))


def _cmd_cwt(args, data, out: Outputs) -> None:
    x = data["x"]
    grid = _grid(args, x)
    w = cwt(x, grid)
    p = power(w)
    if "csv" in args.format:
        out.text("power.csv", grid_csv(p, grid, w.coi))
        out.text("coi.csv", coi_csv(w.coi))
    if "image" in args.format:
        from .plotting import render_heatmap
        peak = float(p.max())
        scaled = p / peak if peak > 0 else p
        out.figure("power.png", lambda b: render_heatmap(
            scaled, w.coi, None, b, grid.scales, title=f"wavelet power of {x.name} (normalised)"))


def _grid_outputs(args, out, res, sig_mask, stem, phase_stem, title) -> None:
    grid = res.grid
    value = res.magnitude ** 2 if args.squared else res.magnitude
    region = reliable_region(grid.scales, res.coi)
    if "csv" in args.format:
        out.text(f"{stem}.csv", grid_csv(value, grid, res.coi, sig_mask))
        out.text(f"{phase_stem}.csv", grid_csv(res.phase, grid, res.coi, sig_mask))
        out.text(f"{phase_stem}_arrows.csv",
                 phase_arrows_csv(res.phase, grid, region, args.arrow_step,
                                  max(1, round(0.5 / grid.dj)), sig_mask))
        out.text("coi.csv", coi_csv(res.coi))
    if "image" in args.format:
        from .plotting import render_heatmap
        out.figure(f"{stem}.png", lambda b: render_heatmap(
            value, res.coi, sig_mask, b, grid.scales, title=title))


def _cmd_coherence(args, data, out: Outputs) -> None:
    x, y = data["x"], data["y"]
    grid = _grid(args, x)
    res = coherence(x, y, grid)
    mask = None
    if args.runs:
        mask = coherence_significance(x, y, grid, args.alpha, args.runs, args.seed,
                                      observed=res.magnitude).mask
    _grid_outputs(args, out, res, mask, "coherence", "phase",
                  f"wavelet coherence {x.name} / {y.name}")


def _cmd_pcoh(args, data, out: Outputs) -> None:
    x, y, z = data["x"], data["y"], data["z"]
    grid = _grid(args, x)
    res = partial_coherence(x, y, z, grid, form=args.pcoh_form)
    if bool(np.all(res.degenerate)):
        from .errors import DegenerateControl
        raise DegenerateControl(f"{z.name} explains {x.name} or {y.name} completely at every point")
    mask = None
    if args.runs:
        mask = partial_coherence_significance(x, y, z, grid, args.alpha, args.runs, args.seed,
                                              observed=res.magnitude).mask
    _grid_outputs(args, out, res, mask, "pcoh", "pphase",
                  f"partial coherence {x.name} / {y.name} | {z.name}")


def _cmd_weem(args, data, out: Outputs) -> None:
    x = data["x"]
    base = args.base or "e"
    wn = "montecarlo" if args.wn == "mc" else "analytic"
    reps = [weem(x, J, args.filter, base, wn, args.mc_runs, args.seed)
            for J in _level_range(args, x.n)]
    if "csv" in args.format:
        out.text("weem.csv", table_csv(
            ["J", "WE", "WE_wn", "WEEM", "base", "wn_mode", "filter"],
            [[r.J, r.we, r.we_wn, r.measure, r.base, r.wn_mode, r.filter] for r in reps]))
    if "image" in args.format:
        from .plotting import render_level_scan
        out.figure("weem.png", lambda b: render_level_scan(
            [r.J for r in reps], {x.name: [r.measure for r in reps]}, b, "WEEM"))


def _cmd_cweem(args, data, out: Outputs) -> None:
    x, y = data["x"], data["y"]
    base = args.base or "2"
    wn = "montecarlo" if args.wn == "mc" else "analytic"
    rows, curves = [], {}
    for src, dst in ((x, y), (y, x)):
        label = f"{src.name}->{dst.name}"
        vals = []
        for J in _level_range(args, x.n):
            r = cweem(src, dst, J, args.filter, base, wn, args.mc_runs, args.seed)
            rows.append([r.J, label, r.we, r.we_wn, r.measure, r.negative, r.smoothed,
                         r.base, r.wn_mode, r.filter])
            vals.append(r.measure)
        curves[label] = vals
    rows.sort(key=lambda r: (r[0], r[1] != f"{x.name}->{y.name}"))
    if "csv" in args.format:
        out.text("cweem.csv", table_csv(
            ["J", "direction", "WE_kl", "WE_wn", "CWEEM", "negative", "smoothed", "base",
             "wn_mode", "filter"], rows))
    if "image" in args.format:
        from .plotting import render_level_scan
        levels = list(_level_range(args, x.n))
        out.figure("cweem.png", lambda b: render_level_scan(levels, curves, b, "CWEEM"))


HANDLERS = {"stats": _cmd_stats, "cwt": _cmd_cwt, "coherence": _cmd_coherence,
            "pcoh": _cmd_pcoh, "weem": _cmd_weem, "cweem": _cmd_cweem}


def run(argv: Optional[list] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = Outputs(args.out)
    try:
        data = _load(args)
        HANDLERS[args.command](args, data, out)
        lines = out.commit()
    except (WaveletError, OSError, ValueError) as exc:
        print(f"wavecomove {args.command}: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    for line in lines:
        print(line)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
