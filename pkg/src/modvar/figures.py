"""Figure data generation: deterministic CSV emission for the four standard
panels.

Schema: first column t (or x for density grids), one column per series,
'#'-prefixed header echoing the resolved configuration.  Values printed
with %.15g and '\n' line endings, so re-runs are byte-identical.
"""

from __future__ import annotations

import math
import os

import numpy as np

from .caldeira_leggett import (
    cl_bohmian_trajectory,
    cl_density,
    cl_local_modular_on_trajectory,
    cl_modular_closed,
)
from .config import ConfigError, RunConfig
from .params import TimeGrid
from .schrodinger import (
    bohmian_trajectory,
    local_modular_on_trajectory,
    modular_expectation,
    superposed_density_and_current,
)
from .two_particle import reduced_modular_common_bath
from .windows import two_particle_window

_FIG1_XGRID = (-40.0, 40.0, 401)
_FIG1_TSAMPLES = 41


def _write_csv(path: str, cfg: RunConfig, extra_header: list, colnames: list, columns: list) -> str:
    rows = len(columns[0])
    for col in columns:
        assert len(col) == rows
    lines = []
    lines.extend(cfg.header_lines())
    lines.extend("# %s" % text for text in extra_header)
    lines.append("# columns: %s" % ",".join(colnames))
    for i in range(rows):
        lines.append(",".join("%.15g" % col[i] for col in columns))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def _frameworks(cfg: RunConfig) -> list:
    return ["schrodinger", "cl"] if cfg.framework == "both" else [cfg.framework]


def _fig1(cfg: RunConfig, outdir: str) -> list:
    c = cfg.constants()
    spec = cfg.superposition(cfg.alphas[0])
    bath = cfg.bath()
    grid = TimeGrid(cfg.t_start, cfg.tmax, cfg.samples)
    xs = np.linspace(*_FIG1_XGRID)
    ts_density = np.linspace(cfg.t_start, cfg.tmax, _FIG1_TSAMPLES)
    written = []
    for fw in _frameworks(cfg):
        density_cols = [xs]
        names = ["x"]
        for t in ts_density:
            if fw == "schrodinger":
                rho, _ = superposed_density_and_current(spec, c, xs, float(t))
            else:
                rho = cl_density(spec, bath, c, xs, float(t))
            density_cols.append(np.asarray(rho))
            names.append("t=%.15g" % t)
        path = os.path.join(outdir, "fig1_density_%s.csv" % fw)
        written.append(
            _write_csv(path, cfg, ["figure: fig1 density grid, framework=%s" % fw], names, density_cols)
        )

        traj_cols = [grid.times()]
        names = ["t"]
        for off in cfg.x0_offsets:
            X0 = spec.packetA.x0 + off * cfg.sigma0
            if fw == "schrodinger":
                traj = bohmian_trajectory(spec.packetA, c, X0, grid)
            else:
                traj = cl_bohmian_trajectory(spec.packetA, bath, c, X0, grid)
            traj_cols.append(traj.X)
            names.append("X0_offset=%.15g" % off)
        path = os.path.join(outdir, "fig1_trajectories_%s.csv" % fw)
        written.append(
            _write_csv(path, cfg, ["figure: fig1 trajectories, framework=%s" % fw], names, traj_cols)
        )
    return written


def _fig2(cfg: RunConfig, outdir: str) -> list:
    c = cfg.constants()
    alpha = cfg.alphas[0]
    spec = cfg.superposition(alpha)
    bath = cfg.bath()
    grid = TimeGrid(cfg.t_start, cfg.tmax, cfg.samples)
    cols = [grid.times()]
    names = ["t"]
    for fw in _frameworks(cfg):
        for off in cfg.x0_offsets:
            X0 = spec.packetA.x0 + off * cfg.sigma0
            if fw == "schrodinger":
                series = local_modular_on_trajectory(spec, c, X0, grid, cfg.support_factor)
            else:
                series = cl_local_modular_on_trajectory(
                    spec, bath, c, X0, grid, cfg.support_factor
                )
            cols.append(series.values)
            names.append("%s_offset=%.15g" % (fw, off))
    path = os.path.join(outdir, "fig2_local_modular.csv")
    return [_write_csv(path, cfg, ["figure: fig2 local modular values"], names, cols)]


def _fig3(cfg: RunConfig, outdir: str) -> list:
    c = cfg.constants()
    grid = TimeGrid(cfg.t_start, cfg.tmax, cfg.samples)
    ts = grid.times()
    cols = [ts]
    names = ["t"]
    for alpha in cfg.alphas:
        spec = cfg.superposition(alpha)
        cols.append(np.array([modular_expectation(spec, c, t) for t in ts]))
        names.append("alpha=%.15g_schrodinger" % alpha)
        for T in cfg.temperatures:
            bath = cfg.bath(T)
            cols.append(np.array([cl_modular_closed(spec, bath, c, t) for t in ts]))
            names.append("alpha=%.15g_cl_T=%.15g" % (alpha, T))
    path = os.path.join(outdir, "fig3_modular.csv")
    return [_write_csv(path, cfg, ["figure: fig3 global modular signals"], names, cols)]


def _fig4(cfg: RunConfig, outdir: str) -> list:
    c = cfg.constants()
    spec0 = cfg.superposition(cfg.alphas[0])
    windows = [
        two_particle_window(spec0, cfg.bath(T), c, cfg.support_factor).t_max
        for T in cfg.temperatures
    ]
    t_end = min([cfg.tmax] + windows)
    grid = TimeGrid(cfg.t_start, t_end, cfg.samples)
    ts = grid.times()
    cols = [ts]
    names = ["t"]
    for alpha in cfg.alphas:
        spec = cfg.superposition(alpha)
        for T in cfg.temperatures:
            bath = cfg.bath(T)
            cols.append(np.array([reduced_modular_common_bath(spec, bath, c, t) for t in ts]))
            names.append("alpha=%.15g_T=%.15g" % (alpha, T))
    header = [
        "figure: fig4 common-bath reduced modular signals",
        "two-particle windows: %s" % ",".join("%.6f" % w for w in windows),
    ]
    path = os.path.join(outdir, "fig4_common_bath.csv")
    return [_write_csv(path, cfg, header, names, cols)]


_FIGURES = {"fig1": _fig1, "fig2": _fig2, "fig3": _fig3, "fig4": _fig4}


def generate_figure(name: str, cfg: RunConfig) -> list:
    """Emit the CSV files for one figure; returns the written paths."""
    if name not in _FIGURES:
        raise ConfigError("unknown figure %r (choose fig1..fig4)" % (name,))
    outdir = cfg.out
    os.makedirs(outdir, exist_ok=True)
    return _FIGURES[name](cfg, outdir)
