"""Output artifacts: JSON report, sweep/plane/crossover CSVs and figures.

CSV numbers carry 12 significant digits, JSON numbers full round-trip
precision. Figures are rendered headlessly next to the delimited files.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .expansion import RobustnessReport
from .montecarlo import McSweepResult


def _g(x: float) -> str:
    return f"{x:.12g}"


def emit_report(report: RobustnessReport, path, probe_echo: Optional[dict] = None,
                seed: int = 0) -> None:
    """Serialize a robustness report as JSON."""
    payload = {
        "f0": report.f0,
        "c2_per_term": [float(v) for v in report.c2_per_term],
        "c2_total": report.c2_total,
        "c3_per_term": [float(v) for v in report.c3_per_term] if report.c3_per_term is not None else None,
        "c3_total": report.c3_total,
        "c32": report.c32,
        "sigma_max": report.sigma_max,
        "classification": report.classification,
        "probe_echo": probe_echo or {},
        "tool_version": __version__,
        "seed": seed,
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=False) + "\n")


def load_report(path) -> dict:
    return json.loads(Path(path).read_text())


def emit_sweep(result: McSweepResult, path) -> None:
    """Sweep CSV: header row, one line per sigma, one trailing fit comment."""
    lines = ["sigma,g_mean,g_stderr,f_mean,n_realizations"]
    for i in range(len(result.sigmas)):
        lines.append(",".join([
            _g(result.sigmas[i]),
            _g(result.g_means[i]),
            _g(result.g_stderrs[i]),
            _g(result.f_means[i]),
            str(result.n_realizations),
        ]))
    smax = _g(result.sigma_max_fit) if result.sigma_max_fit is not None else "na"
    lines.append(f"# fit: slope={_g(result.slope)} intercept={_g(result.intercept)} sigma_max={smax}")
    Path(path).write_text("\n".join(lines) + "\n")


def emit_plane(tau_values, eta_values, c2, path) -> None:
    """Plane-scan CSV with one (tau0, eta0, c2) row per grid cell."""
    lines = ["tau0,eta0,c2"]
    for i, tau in enumerate(tau_values):
        for j, eta in enumerate(eta_values):
            lines.append(f"{_g(tau)},{_g(eta)},{_g(c2[i, j])}")
    Path(path).write_text("\n".join(lines) + "\n")


def emit_curve(xs, ys, header: str, path) -> None:
    lines = [header]
    for x, y in zip(xs, ys):
        lines.append(f"{_g(x)},{_g(y)}")
    Path(path).write_text("\n".join(lines) + "\n")


def emit_validation(sigmas, g_mc, g_stderr, g_pred, path) -> None:
    lines = ["sigma,g_mc,g_stderr,g_pred,z"]
    for i in range(len(sigmas)):
        z = (g_mc[i] - g_pred[i]) / g_stderr[i] if g_stderr[i] > 0 else 0.0
        lines.append(",".join([_g(sigmas[i]), _g(g_mc[i]), _g(g_stderr[i]), _g(g_pred[i]), _g(z)]))
    Path(path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Figures
# ---------------------------------------------------------------------------

def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_report(report: RobustnessReport, labels: Sequence[str], path) -> None:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 3.5))
    idx = np.arange(len(report.c2_per_term))
    ax.bar(idx, report.c2_per_term, color="#3465a4")
    ax.axhline(0, color="k", lw=0.8)
    ax.set_xticks(idx)
    ax.set_xticklabels(labels, rotation=60, fontsize=7)
    ax.set_ylabel(r"$C^{(2)}_n$")
    title = f"{report.classification}, $C^{{(2)}}$ = {report.c2_total:.4g}"
    if report.sigma_max is not None:
        title += rf", $\sigma_{{\max}}$ = {report.sigma_max:.4g}"
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_sweep(result: McSweepResult, path, predicted_c2: Optional[float] = None) -> None:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(5, 4))
    g = np.abs(result.g_means)
    ax.loglog(result.sigmas, g, "o", ms=4, label=r"$|g|$ (quenched average)")
    xs = np.geomspace(result.sigmas[0], result.sigmas[-1], 100)
    ax.loglog(xs, np.exp(result.intercept) * xs**result.slope, "-",
              lw=1, label=f"fit slope {result.slope:.3f}")
    if predicted_c2 is not None:
        ax.loglog(xs, abs(predicted_c2) * xs**2, "--", lw=1, label=r"$\sigma^2|C^{(2)}|$")
    if result.sigma_max_fit is not None:
        ax.axvline(result.sigma_max_fit, color="gray", ls=":",
                   label=rf"$\sigma_{{\max}}$ = {result.sigma_max_fit:.4g}")
    ax.set_xlabel(r"$\sigma$")
    ax.set_ylabel(r"$|g|$")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_plane(tau_values, eta_values, c2, path) -> None:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(5, 4))
    vmax = np.abs(c2).max()
    mesh = ax.pcolormesh(eta_values, tau_values, c2, cmap="RdBu_r", vmin=-vmax, vmax=vmax,
                         shading="nearest")
    try:
        ax.contour(eta_values, tau_values, c2, levels=[0.0], colors="k", linewidths=1.2)
    except Exception:
        pass  # constant-sign planes have no zero contour
    fig.colorbar(mesh, ax=ax, label=r"$C^{(2)}$")
    ax.set_xlabel(r"$\eta_0$")
    ax.set_ylabel(r"$\tau_0$")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_curve(xs, ys, xlabel, ylabel, path, mark_zero: bool = False) -> None:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(xs, ys, "-", lw=1.2)
    if mark_zero:
        ax.axhline(0, color="gray", lw=0.8, ls=":")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_validation(sigmas, g_mc, g_stderr, g_pred, path) -> None:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.errorbar(sigmas, g_mc, yerr=g_stderr, fmt="o", ms=4, capsize=2, label="quenched average")
    ax.plot(sigmas, g_pred, "--", lw=1, label="moment expansion")
    ax.set_xlabel(r"$\sigma$")
    ax.set_ylabel(r"$g$")
    ax.set_xscale("log")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
