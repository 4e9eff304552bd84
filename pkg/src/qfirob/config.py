"""INI run configurations and the plain-text matrix interchange format.

A run file has [probe], [mc] and [output] sections plus per-experiment
extras; see README for the full key list. Matrix files carry the dimension
on the first line followed by rows of whitespace-separated ``re,im`` pairs;
vector files carry one ``re,im`` pair per line.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError, QfirobError
from .kitaev import KitaevParams, kitaev_spec
from .montecarlo import FIT_CAP, McConfig
from .probes import DisorderDistribution, DisorderTerm, DisorderedProbeSpec
from .qfi import optimal_state, qfig_exact
from .single_qubit import SingleQubitParams, single_qubit_spec

EXPERIMENTS = ("report", "sweep-sigma", "single-qubit", "kitaev-plane", "crossover", "mc-validate")


def read_matrix(path: Path) -> np.ndarray:
    """Dense complex matrix from the ``dim`` + re,im rows format."""
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise ConfigError(f"{path}: empty matrix file")
    try:
        dim = int(lines[0])
    except ValueError as exc:
        raise ConfigError(f"{path}: first line must be the dimension") from exc
    if len(lines) != dim + 1:
        raise ConfigError(f"{path}: expected {dim} rows, found {len(lines) - 1}")
    out = np.empty((dim, dim), dtype=complex)
    for i, line in enumerate(lines[1:]):
        tokens = line.split()
        if len(tokens) != dim:
            raise ConfigError(f"{path}: row {i + 1} has {len(tokens)} entries, expected {dim}")
        for j, tok in enumerate(tokens):
            out[i, j] = _parse_re_im(tok, path, i + 1)
    return out


def read_vector(path: Path) -> np.ndarray:
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise ConfigError(f"{path}: empty vector file")
    try:
        dim = int(lines[0])
    except ValueError as exc:
        raise ConfigError(f"{path}: first line must be the dimension") from exc
    if len(lines) != dim + 1:
        raise ConfigError(f"{path}: expected {dim} entries, found {len(lines) - 1}")
    return np.array([_parse_re_im(ln, path, k + 1) for k, ln in enumerate(lines[1:])])


def write_matrix(path: Path, matrix: np.ndarray) -> None:
    m = np.asarray(matrix, dtype=complex)
    rows = [str(m.shape[0])]
    for row in m:
        rows.append(" ".join(f"{v.real:.17g},{v.imag:.17g}" for v in row))
    Path(path).write_text("\n".join(rows) + "\n")


def _parse_re_im(token: str, path, where) -> complex:
    parts = token.split(",")
    if len(parts) != 2:
        raise ConfigError(f"{path}: entry {token!r} at row {where} is not 're,im'")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise ConfigError(f"{path}: non-numeric entry {token!r} at row {where}") from exc


@dataclass
class RunConfig:
    """Validated run description assembled from one INI file."""

    experiment: str
    seed: int
    probe_kind: str
    spec: DisorderedProbeSpec
    probe_echo: dict
    mc: Optional[McConfig]
    output_dir: Path
    order: int = 2
    single_qubit: Optional[SingleQubitParams] = None
    sq_sigmas: Optional[tuple[float, float, float]] = None
    kitaev: Optional[KitaevParams] = None
    plane: dict = field(default_factory=dict)
    crossover: dict = field(default_factory=dict)


def _get(section, key, conv, default=None, required=False, name=""):
    if key not in section:
        if required:
            raise ConfigError(f"[{name}] missing required key '{key}'")
        return default
    raw = section[key]
    try:
        return conv(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{name}] key '{key}' has invalid value {raw!r}") from exc


def load_config(path, experiment: str, seed_override: Optional[int] = None,
                out_override: Optional[str] = None) -> RunConfig:
    """Parse and validate a run file for the given experiment."""
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"{path}: no such config file")
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    run = parser["run"] if parser.has_section("run") else {}
    cfg_exp = run.get("experiment") if run else None
    if cfg_exp is not None and cfg_exp != experiment:
        raise ConfigError(f"[run] experiment = {cfg_exp!r} does not match subcommand {experiment!r}")
    seed = seed_override if seed_override is not None else int(run.get("seed", 0) if run else 0)

    if not parser.has_section("probe"):
        raise ConfigError("missing [probe] section")
    probe = parser["probe"]
    kind = _get(probe, "type", str, required=True, name="probe")
    base = path.parent

    sq = kit = None
    sq_sigmas = None
    try:
        if kind == "single-qubit":
            sq = SingleQubitParams(
                h0z=_get(probe, "h0z", float, required=True, name="probe"),
                t=_get(probe, "time", float, default=1.0, name="probe"),
                beta=_get(probe, "beta", float, default=0.0, name="probe"),
            )
            sq_sigmas = (
                _get(probe, "sigma_x", float, default=0.0, name="probe"),
                _get(probe, "sigma_y", float, default=0.0, name="probe"),
                _get(probe, "sigma_z", float, default=0.0, name="probe"),
            )
            spec = single_qubit_spec(sq, *sq_sigmas)
        elif kind == "kitaev":
            kit = KitaevParams(
                n=_get(probe, "sites", int, required=True, name="probe"),
                mu=_get(probe, "mu", float, required=True, name="probe"),
                tau0=_parse_couplings(probe, "tau0", _get(probe, "sites", int, name="probe")),
                eta0=_parse_couplings(probe, "eta0", _get(probe, "sites", int, name="probe")),
                sigma_tau=_get(probe, "sigma_tau", float, default=1.0, name="probe"),
                sigma_eta=_get(probe, "sigma_eta", float, default=1.0, name="probe"),
                t=_get(probe, "time", float, default=1.0, name="probe"),
            )
            spec = kitaev_spec(kit)
        elif kind == "generic":
            spec = _generic_spec(probe, base)
        else:
            raise ConfigError(f"[probe] type must be single-qubit, kitaev or generic, got {kind!r}")
    except ConfigError:
        raise
    except (ValueError, QfirobError) as exc:
        # construction-time validation failures are configuration problems
        raise ConfigError(f"[probe] {exc}") from exc

    mc = None
    if parser.has_section("mc"):
        mc_sec = parser["mc"]
        grid = _parse_grid(mc_sec)
        try:
            mc = McConfig(
                n_realizations=_get(mc_sec, "n_realizations", int, default=1000, name="mc"),
                master_seed=seed,
                sigma_grid=grid,
                fit_cap=_get(mc_sec, "fit_cap", float, default=FIT_CAP, name="mc"),
            )
        except ValueError as exc:
            raise ConfigError(f"[mc] {exc}") from exc

    out_dir = Path(out_override) if out_override is not None else Path(
        parser["output"]["dir"] if parser.has_section("output") and "dir" in parser["output"] else "out")

    plane = {}
    if parser.has_section("plane"):
        sec = parser["plane"]
        plane = {
            "tau_min": _get(sec, "tau_min", float, default=1.0, name="plane"),
            "tau_max": _get(sec, "tau_max", float, default=6.0, name="plane"),
            "eta_min": _get(sec, "eta_min", float, default=1.0, name="plane"),
            "eta_max": _get(sec, "eta_max", float, default=6.0, name="plane"),
            "points": _get(sec, "points", int, default=40, name="plane"),
        }
    crossover = {}
    if parser.has_section("crossover"):
        sec = parser["crossover"]
        crossover = {
            "t_min": _get(sec, "t_min", float, default=0.1, name="crossover"),
            "t_max": _get(sec, "t_max", float, default=2.0, name="crossover"),
            "points": _get(sec, "points", int, default=100, name="crossover"),
            "sigma": _get(sec, "sigma", float, default=0.1, name="crossover"),
        }

    order = 2
    if parser.has_section("report"):
        order = _get(parser["report"], "order", int, default=2, name="report")
        if order not in (2, 3):
            raise ConfigError("[report] order must be 2 or 3")

    echo = {k: v for k, v in probe.items()}
    return RunConfig(
        experiment=experiment,
        seed=seed,
        probe_kind=kind,
        spec=spec,
        probe_echo=echo,
        mc=mc,
        output_dir=out_dir,
        order=order,
        single_qubit=sq,
        sq_sigmas=sq_sigmas,
        kitaev=kit,
        plane=plane,
        crossover=crossover,
    )


def _parse_couplings(section, key, sites):
    raw = section.get(key)
    if raw is None:
        raise ConfigError(f"[probe] missing required key '{key}'")
    values = [float(v) for v in raw.split(",")]
    if len(values) == 1:
        return values[0]
    if sites is not None and len(values) != sites - 1:
        raise ConfigError(f"[probe] key '{key}' needs 1 or sites-1 values, got {len(values)}")
    return np.array(values)


def _parse_grid(section) -> np.ndarray:
    if "sigma_grid" in section:
        try:
            grid = np.array([float(v) for v in section["sigma_grid"].split(",")])
        except ValueError as exc:
            raise ConfigError("[mc] key 'sigma_grid' has non-numeric entries") from exc
    else:
        start = _get(section, "grid_start", float, name="mc")
        stop = _get(section, "grid_stop", float, name="mc")
        points = _get(section, "grid_points", int, name="mc")
        if start is None or stop is None or points is None:
            raise ConfigError("[mc] needs sigma_grid or grid_start/grid_stop/grid_points")
        if start <= 0 or stop <= start:
            raise ConfigError("[mc] grid_start must be positive and below grid_stop")
        grid = np.geomspace(start, stop, points)
    if grid.size == 0 or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ConfigError("[mc] key 'sigma_grid' must be positive and strictly ascending")
    return grid


def _generic_spec(probe, base: Path) -> DisorderedProbeSpec:
    h_theta = read_matrix(base / _get(probe, "h_theta", str, required=True, name="probe"))
    dtheta = read_matrix(base / _get(probe, "dtheta_h", str, required=True, name="probe"))
    rest_path = _get(probe, "clean_rest", str, name="probe")
    clean_rest = read_matrix(base / rest_path) if rest_path else np.zeros_like(h_theta)
    time = _get(probe, "time", float, default=1.0, name="probe")

    terms = []
    idx = 1
    while f"term{idx}_operator" in probe:
        op = read_matrix(base / probe[f"term{idx}_operator"])
        kind = probe.get(f"term{idx}_kind", "gaussian")
        sigma = _get(probe, f"term{idx}_sigma", float, default=0.0, name="probe")
        skew = _get(probe, f"term{idx}_skewness", float, default=0.0, name="probe")
        mean = _get(probe, f"term{idx}_mean", float, default=0.0, name="probe")
        label = probe.get(f"term{idx}_label", f"term{idx}")
        try:
            dist = DisorderDistribution(kind=kind, mean=mean, sigma=sigma, skewness=skew)
        except ValueError as exc:
            raise ConfigError(f"[probe] term{idx}: {exc}") from exc
        terms.append(DisorderTerm(operator=op, distribution=dist, label=label))
        idx += 1
    if not terms:
        raise ConfigError("[probe] generic probe needs at least term1_operator")

    state_path = _get(probe, "initial_state", str, name="probe")
    if state_path:
        state = read_vector(base / state_path)
        norm = math.sqrt(float(np.vdot(state, state).real))
        if norm == 0:
            raise ConfigError(f"[probe] initial_state {state_path!r} is a zero vector")
        state = state / norm
    else:
        beta = _get(probe, "beta", float, default=0.0, name="probe")
        g = qfig_exact(h_theta + clean_rest, dtheta, time)
        state = optimal_state(g, beta)

    return DisorderedProbeSpec(
        h_theta=h_theta,
        dtheta_h=dtheta,
        clean_rest=clean_rest,
        disorder_terms=tuple(terms),
        encoding_time=time,
        initial_state=state,
    )
