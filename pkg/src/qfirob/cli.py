"""Command-line front end: qfirob <subcommand> --config <path> [--seed] [--out].

Exit codes: 0 success, 2 configuration error, 3 numerical failure (the
originating error class is named on stderr).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import EXPERIMENTS, RunConfig, load_config
from .errors import ConfigError, QfirobError
from .expansion import predicted_marker, robustness_report
from .kitaev import plane_scan
from .montecarlo import crossover_scan, marker_sweep, quenched_qfi
from .reporting import (
    emit_curve,
    emit_plane,
    emit_report,
    emit_sweep,
    emit_validation,
    plot_curve,
    plot_plane,
    plot_report,
    plot_sweep,
    plot_validation,
)
from .single_qubit import beta_optima, c2_closed_form, crossover_marker_model, SingleQubitParams


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="qfirob",
                                     description="robustness of metrology probes under quenched disorder")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="INI run file")
        p.add_argument("--seed", type=int, default=None, help="override the master seed")
        p.add_argument("--out", default=None, help="override the output directory")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config, args.experiment, seed_override=args.seed,
                          out_override=args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        cfg.output_dir.mkdir(parents=True, exist_ok=True)
        runner = _RUNNERS[cfg.experiment]
        summary = runner(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except QfirobError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    print(summary)
    return 0


def _labels(cfg: RunConfig) -> list[str]:
    return [t.label or f"term{i + 1}" for i, t in enumerate(cfg.spec.disorder_terms)]


def _run_report(cfg: RunConfig) -> str:
    report = robustness_report(cfg.spec, order=cfg.order)
    emit_report(report, cfg.output_dir / "report.json", probe_echo=cfg.probe_echo, seed=cfg.seed)
    plot_report(report, _labels(cfg), cfg.output_dir / "report.png")
    smax = f"{report.sigma_max:.6g}" if report.sigma_max is not None else "na"
    return f"classification={report.classification} c2_total={report.c2_total:.6g} sigma_max={smax}"


def _run_sweep(cfg: RunConfig) -> str:
    if cfg.mc is None:
        raise ConfigError("sweep-sigma needs an [mc] section")
    result = marker_sweep(cfg.spec, cfg.mc)
    report = robustness_report(cfg.spec, order=2)
    emit_sweep(result, cfg.output_dir / "sweep.csv")
    plot_sweep(result, cfg.output_dir / "sweep.png", predicted_c2=report.c2_total)
    smax = f"{result.sigma_max_fit:.6g}" if result.sigma_max_fit is not None else "na"
    summary = f"slope={result.slope:.4f} sigma_max_fit={smax}"
    if report.sigma_max is not None:
        summary += f" sigma_max_direct={report.sigma_max:.6g}"
    return summary


def _run_mc_validate(cfg: RunConfig) -> str:
    if cfg.mc is None:
        raise ConfigError("mc-validate needs an [mc] section")
    report = robustness_report(cfg.spec, order=2)
    sigmas = cfg.mc.sigma_grid
    ratios = cfg.mc.sigma_ratios if cfg.mc.sigma_ratios is not None else np.ones(cfg.spec.n_terms)
    g_mc = np.empty(len(sigmas))
    g_se = np.empty(len(sigmas))
    g_pred = np.empty(len(sigmas))
    for i, s in enumerate(sigmas):
        mean, stderr = quenched_qfi(cfg.spec, s * ratios, cfg.mc)
        g_mc[i] = mean / report.f0 - 1.0
        g_se[i] = stderr / report.f0
        g_pred[i] = predicted_marker(report, s * ratios)
    emit_validation(sigmas, g_mc, g_se, g_pred, cfg.output_dir / "validate.csv")
    plot_validation(sigmas, g_mc, g_se, g_pred, cfg.output_dir / "validate.png")
    zmax = float(np.max(np.abs((g_mc - g_pred) / np.where(g_se > 0, g_se, 1.0))))
    return f"points={len(sigmas)} max|z|={zmax:.3f}"


def _run_single_qubit(cfg: RunConfig) -> str:
    if cfg.single_qubit is None:
        raise ConfigError("the single-qubit experiment needs probe type single-qubit")
    p = cfg.single_qubit
    betas = np.linspace(-np.pi, np.pi, 721)
    cx = np.array([c2_closed_form(SingleQubitParams(p.h0z, p.t, b), "x") for b in betas])
    cy = np.array([c2_closed_form(SingleQubitParams(p.h0z, p.t, b), "y") for b in betas])
    lines = ["beta,c2_x,c2_y"]
    for b, vx, vy in zip(betas, cx, cy):
        lines.append(f"{b:.12g},{vx:.12g},{vy:.12g}")
    (cfg.output_dir / "single_qubit.csv").write_text("\n".join(lines) + "\n")
    plt_path = cfg.output_dir / "single_qubit.png"
    _plot_beta_landscape(betas, cx, cy, plt_path)
    bx, by = beta_optima(p)
    return f"beta_x_m={bx:.6g} beta_y_m={by:.6g}"


def _plot_beta_landscape(betas, cx, cy, path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(betas, cx, "-", label=r"$C^{(2)}_x$")
    ax.plot(betas, cy, "--", label=r"$C^{(2)}_y$")
    ax.set_xlabel(r"$\beta$")
    ax.set_ylabel(r"$C^{(2)}_n$")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _run_kitaev_plane(cfg: RunConfig) -> str:
    if cfg.kitaev is None:
        raise ConfigError("the kitaev-plane experiment needs probe type kitaev")
    plane = cfg.plane or {"tau_min": 1.0, "tau_max": 6.0, "eta_min": 1.0,
                          "eta_max": 6.0, "points": 40}
    taus = np.linspace(plane["tau_min"], plane["tau_max"], plane["points"])
    etas = np.linspace(plane["eta_min"], plane["eta_max"], plane["points"])
    c2 = plane_scan(cfg.kitaev.n, cfg.kitaev.mu, cfg.kitaev.t, taus, etas)
    emit_plane(taus, etas, c2, cfg.output_dir / "plane.csv")
    plot_plane(taus, etas, c2, cfg.output_dir / "plane.png")
    dep = int(np.sum(c2 > 0))
    dsp = int(np.sum(c2 < 0))
    return f"cells={c2.size} dep={dep} dsp={dsp}"


def _run_crossover(cfg: RunConfig) -> str:
    if cfg.single_qubit is None:
        raise ConfigError("the crossover experiment needs probe type single-qubit")
    co = cfg.crossover or {"t_min": 0.1, "t_max": 2.0, "points": 100, "sigma": 0.1}
    marker = crossover_marker_model(cfg.single_qubit.h0z, co["sigma"])
    ts = np.linspace(co["t_min"], co["t_max"], co["points"])
    vals = np.array([marker(float(t)) for t in ts])
    emit_curve(ts, vals, "t,marker", cfg.output_dir / "crossover.csv")
    plot_curve(ts, vals, "t", "marker", cfg.output_dir / "crossover.png", mark_zero=True)
    tau = crossover_scan(marker, ts)
    return f"tau={tau:.6g}"


_RUNNERS = {
    "report": _run_report,
    "sweep-sigma": _run_sweep,
    "single-qubit": _run_single_qubit,
    "kitaev-plane": _run_kitaev_plane,
    "crossover": _run_crossover,
    "mc-validate": _run_mc_validate,
}


if __name__ == "__main__":
    sys.exit(main())
