"""Result tables, delimited output, and figure rendering.

Experiments emit long-format ResultTables; the CLI writes them as CSV with
a JSON metadata sidecar and optionally renders a matplotlib figure next to
the CSV.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


@dataclass
class ResultTable:
    """Rectangular experiment output with config metadata."""

    columns: list
    rows: list
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ValueError("rows must match the column count")

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])

    def filtered(self, **match) -> "ResultTable":
        idx = [self.columns.index(k) for k in match]
        keep = [r for r in self.rows if all(r[i] == v for i, v in zip(idx, match.values()))]
        return ResultTable(self.columns, keep, self.metadata)

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        lines += [",".join(_fmt(v) for v in r) for r in self.rows]
        return "\n".join(lines) + "\n"

    def write(self, path: Path, plot: bool = False, experiment: Optional[str] = None) -> list:
        """Write CSV + JSON sidecar (and a PNG when plot is set); returns paths."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_csv())
        sidecar = path.with_suffix(".json")
        sidecar.write_text(json.dumps(self.metadata, indent=2, sort_keys=True, default=str) + "\n")
        written = [path, sidecar]
        if plot:
            fig_path = path.with_suffix(".png")
            render_figure(experiment or self.metadata.get("experiment", ""), self, fig_path)
            written.append(fig_path)
        return written


def make_metadata(experiment: str, config: dict, started: float) -> dict:
    from . import __version__

    return {
        "experiment": experiment,
        "config": config,
        "toolkit_version": __version__,
        "wall_time_s": round(time.time() - started, 3),
    }


def render_figure(experiment: str, table: ResultTable, path: Path) -> None:
    """Render the experiment's standard figure to a file."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    plotter = _PLOTTERS.get(experiment, _plot_generic)
    plotter(ax, table)
    ax.set_title(experiment)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def _plot_generic(ax, table: ResultTable):
    numeric = [c for c in table.columns if isinstance(table.rows[0][table.columns.index(c)], (int, float, np.integer, np.floating))]
    if len(numeric) >= 2:
        x, y = numeric[0], numeric[1]
        ax.plot(table.column(x), table.column(y), "o-")
        ax.set_xlabel(x)
        ax.set_ylabel(y)
    ax.grid(alpha=0.3)


def _plot_by_series(ax, table, x, y, series, logx=False, xlabel=None, ylabel=None):
    for s in dict.fromkeys(table.column(series).tolist()):
        sub = table.filtered(**{series: s})
        ax.plot(sub.column(x), sub.column(y), "o-", label=str(s))
    if logx:
        ax.set_xscale("log")
    ax.set_xlabel(xlabel or x)
    ax.set_ylabel(ylabel or y)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)


def _plot_ordering(ax, table):
    _plot_by_series(ax, table, "n", "mean_eig_snr_db", "strategy",
                    xlabel="permutations n", ylabel="eigenvalue SNR (dB)")


def _plot_pase(ax, table):
    _plot_by_series(ax, table, "n", "mean_eig_snr_db", "M",
                    xlabel="group elements n", ylabel="eigenvalue SNR (dB)")


def _plot_chirp(ax, table):
    sub = table.filtered(section="psi_curve")
    if sub.rows:
        ax.plot(sub.column("mu"), sub.column("psi"), "-")
        ax.set_xlabel("candidate chirp rate mu")
        ax.set_ylabel("spectral concentration psi")
    ax.grid(alpha=0.3)


def _plot_mimo(ax, table):
    for method in dict.fromkeys(table.column("method").tolist()):
        sub = table.filtered(method=method)
        ax.plot(sub.column("M"), sub.column("effective"), "o-", label=method)
    ax.set_xlabel("antennas M")
    ax.set_ylabel("effective throughput (bits/s/Hz)")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)


def _plot_music(ax, table):
    sub = table.filtered(section="pseudospectrum")
    if sub.rows:
        for method in dict.fromkeys(sub.column("method").tolist()):
            s2 = sub.filtered(method=method)
            ax.semilogy(s2.column("angle_deg"), s2.column("value"), label=method)
        ax.set_xlabel("angle (deg)")
        ax.set_ylabel("pseudospectrum")
        ax.legend(fontsize=8)
    ax.grid(alpha=0.3)


def _plot_metrics_sweep(ax, table):
    sub = table.filtered(section="rho_sweep")
    if sub.rows:
        ax.plot(sub.column("rho"), sub.column("alpha"), "o-", label="alpha")
        ax.plot(sub.column("rho"), sub.column("delta"), "s-", label="delta (Z_M)")
        ax2 = ax.twinx()
        ax2.plot(sub.column("rho"), sub.column("delta_abs"), "^--", color="tab:green", label="delta_abs")
        ax.set_xlabel("AR(1) rho")
        ax.legend(fontsize=8, loc="upper left")
    ax.grid(alpha=0.3)


def _plot_gaat(ax, table):
    sub = table.filtered(section="variance_scaling")
    if sub.rows:
        for k in dict.fromkeys(sub.column("moment").tolist()):
            s2 = sub.filtered(moment=k)
            ax.loglog(s2.column("M"), s2.column("variance"), "o-", label=f"moment {k}")
        ax.set_xlabel("dimension M")
        ax.set_ylabel("Var of group-averaged moment")
        ax.legend(fontsize=8)
    ax.grid(alpha=0.3, which="both")


_PLOTTERS = {
    "ordering": _plot_ordering,
    "pase_curve": _plot_pase,
    "chirp_suite": _plot_chirp,
    "mimo": _plot_mimo,
    "music_compare": _plot_music,
    "metrics_sweep": _plot_metrics_sweep,
    "gaat_moments": _plot_gaat,
}
