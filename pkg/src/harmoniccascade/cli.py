"""Command-line front end: config parsing, run orchestration, CSV artifacts.

Configuration sources combine in a fixed precedence: built-in defaults
(regime-1 parameters), then the ``--config`` file, then flags.  A regime
selection (file key or ``--regime``, flag winning) bases all six system
parameters on that preset; combining it with explicit rate keys is rejected
so a chosen regime always means exactly its parameter set.  Only the pump
may be overridden on top (``--epsilon`` first, then a file key).

Artifacts are deterministic by construction: no timestamps, fixed column
order, 17-significant-digit floats, LF line endings.  Identical
configuration (including the seed in stochastic mode) yields byte-identical
files.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import REGIME_PRESETS, __version__
from .correlations import OBR_ORDER, PAIR_ORDER, TRIPLE_ORDER, evaluate_grid
from .linearized import DriftDiffusion, spectrum_grid
from .model import NonPositiveRate, SystemParams, validate_params
from .semiclassical import NotStationary, pulsing_threshold, require_steady_state
from .stochastic import run_ensemble

__all__ = [
    "MODES",
    "ConfigParse",
    "IoError",
    "RunConfig",
    "parse_config_file",
    "build_config",
    "run",
    "main",
]

MODES = ("steady", "spectra", "correlations", "stochastic", "threshold",
         "figures")

_PARAM_KEYS = ("kappa1", "kappa2", "epsilon", "gamma1", "gamma2", "gamma3")
_FLOAT_KEYS = {"omega_min", "omega_max", "dt", "t_end"}
_INT_KEYS = {"omega_steps", "seed", "n_traj", "regime"}
_STR_KEYS = {"mode", "out"}

# Scan window for threshold mode; wide enough to bracket the instability of
# both presets with room to spare.
_THRESHOLD_RANGE = (100.0, 3000.0)


class ConfigParse(ValueError):
    """Configuration file or flag could not be interpreted."""


class IoError(RuntimeError):
    """An artifact could not be written."""


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run description; validates itself on construction."""

    params: SystemParams
    mode: str
    omega_min: float = -20.0
    omega_max: float = 20.0
    omega_steps: int = 801
    output_path: str = "."
    seed: int = 0
    dt: float = 1e-3
    t_end: float = 50.0
    n_traj: int = 1000
    regime: int | None = None
    gnuplot: bool = False

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ConfigParse(f"unknown mode {self.mode!r}; "
                              f"choose one of {', '.join(MODES)}")
        if not self.omega_min < self.omega_max:
            raise ConfigParse("omega_min must be below omega_max")
        if self.omega_steps < 2:
            raise ConfigParse("omega_steps must be at least 2")
        if self.dt <= 0 or self.t_end <= 0:
            raise ConfigParse("dt and t_end must be positive")
        if self.n_traj < 1:
            raise ConfigParse("n_traj must be at least 1")
        if self.regime not in (None, 1, 2):
            raise ConfigParse("regime must be 1 or 2")
        try:
            validate_params(self.params)
        except NonPositiveRate as exc:
            raise ConfigParse(str(exc)) from exc

    def omega_grid(self) -> np.ndarray:
        """Analysis frequencies; always contains 0 when the range straddles it.

        The point nearest zero is snapped onto it, preserving the requested
        count, so zero-frequency criteria are always evaluated exactly.
        """
        g = np.linspace(self.omega_min, self.omega_max, self.omega_steps)
        if self.omega_min < 0.0 < self.omega_max and not np.any(g == 0.0):
            g[np.abs(g).argmin()] = 0.0
        return g


def parse_config_file(path: str | Path) -> dict:
    """Read key = value lines; ``#`` starts a comment, blank lines ignored."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigParse(f"cannot read config file {path}: {exc}") from exc
    entries: dict = {}
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParse(f"{path}:{ln}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            if key in _PARAM_KEYS or key in _FLOAT_KEYS:
                entries[key] = float(value)
            elif key in _INT_KEYS:
                entries[key] = int(value)
            elif key in _STR_KEYS:
                entries[key] = value
            else:
                raise ConfigParse(f"{path}:{ln}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigParse):
                raise
            raise ConfigParse(f"{path}:{ln}: bad value for {key}: "
                              f"{value!r}") from exc
    return entries


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would sys.exit; we raise
        raise ConfigParse(message)


def _make_parser() -> _Parser:
    parser = _Parser(prog="harmoniccascade",
                     description="Cascaded harmonic generation analysis")
    parser.add_argument("mode_pos", nargs="?", choices=MODES, metavar="MODE",
                        help="one of: " + ", ".join(MODES))
    parser.add_argument("--mode", choices=MODES, dest="mode_flag")
    parser.add_argument("--config", metavar="PATH")
    parser.add_argument("--regime", type=int, choices=(1, 2))
    parser.add_argument("--epsilon", type=float)
    parser.add_argument("--omega-range", metavar="MIN:MAX:STEPS")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", metavar="DIR")
    parser.add_argument("--dt", type=float)
    parser.add_argument("--t-end", type=float)
    parser.add_argument("--n-traj", type=int)
    parser.add_argument("--gnuplot", action="store_true",
                        help="also emit a gnuplot script plotting the CSVs")
    parser.add_argument("--version", action="version",
                        version=f"harmoniccascade {__version__}")
    return parser


def _join_omega_range(argv: list[str]) -> list[str]:
    # A range like -20:20:801 starts with a dash, which argparse would read
    # as another flag; fold the value into --omega-range=... form.
    out: list[str] = []
    it = iter(argv)
    for token in it:
        if token == "--omega-range":
            value = next(it, None)
            out.append(token if value is None else f"{token}={value}")
        else:
            out.append(token)
    return out


def build_config(argv: list[str]) -> RunConfig:
    """Resolve flags plus optional config file into a validated RunConfig."""
    ns = _make_parser().parse_args(_join_omega_range(argv))
    if ns.mode_pos and ns.mode_flag and ns.mode_pos != ns.mode_flag:
        raise ConfigParse(f"mode given twice: {ns.mode_pos!r} and "
                          f"{ns.mode_flag!r}")
    entries = parse_config_file(ns.config) if ns.config else {}
    mode = ns.mode_flag or ns.mode_pos or entries.get("mode")
    if mode is None:
        raise ConfigParse("mode is required (positional or --mode)")

    regime = ns.regime if ns.regime is not None else entries.get("regime")
    if regime not in (None, 1, 2):
        raise ConfigParse("regime must be 1 or 2")
    base = REGIME_PRESETS[regime if regime is not None else 1]
    values = {key: getattr(base, key) for key in _PARAM_KEYS}
    for key in _PARAM_KEYS:
        if regime is None and key in entries:
            values[key] = entries[key]
    if ns.epsilon is not None:
        values["epsilon"] = ns.epsilon
    # With an explicit regime the preset is authoritative except for the
    # epsilon flag, keeping --regime an exact encoding of each parameter set.
    if regime is not None:
        for key in _PARAM_KEYS:
            if key != "epsilon" and key in entries:
                raise ConfigParse(f"config key {key} conflicts with --regime")
        if "epsilon" in entries and ns.epsilon is None:
            values["epsilon"] = entries["epsilon"]

    omega_min = entries.get("omega_min", -20.0)
    omega_max = entries.get("omega_max", 20.0)
    omega_steps = entries.get("omega_steps", 801)
    if ns.omega_range is not None:
        fields = ns.omega_range.split(":")
        if len(fields) != 3:
            raise ConfigParse("--omega-range expects MIN:MAX:STEPS")
        try:
            omega_min, omega_max = float(fields[0]), float(fields[1])
            omega_steps = int(fields[2])
        except ValueError as exc:
            raise ConfigParse(f"bad --omega-range: {ns.omega_range!r}") from exc

    return RunConfig(
        params=SystemParams(**values),
        mode=mode,
        omega_min=omega_min,
        omega_max=omega_max,
        omega_steps=omega_steps,
        output_path=ns.out if ns.out is not None else entries.get("out", "."),
        seed=ns.seed if ns.seed is not None else entries.get("seed", 0),
        dt=ns.dt if ns.dt is not None else entries.get("dt", 1e-3),
        t_end=ns.t_end if ns.t_end is not None else entries.get("t_end", 50.0),
        n_traj=(ns.n_traj if ns.n_traj is not None
                else entries.get("n_traj", 1000)),
        regime=regime,
        gnuplot=ns.gnuplot,
    )


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def _param_lines(p: SystemParams) -> list[str]:
    return [f"{key} = {_fmt(getattr(p, key))}" for key in _PARAM_KEYS]


def _write_csv(path: Path, meta: list[str], columns: list[str], rows,
               footer: list[str] | None = None) -> Path:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(f"# harmoniccascade {__version__}\n")
            for line in meta:
                fh.write(f"# {line}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_fmt(x) for x in row])
            for line in footer or ():
                fh.write(f"# {line}\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    return path


def _grid_meta(config: RunConfig) -> list[str]:
    return [f"omega_min = {_fmt(config.omega_min)}",
            f"omega_max = {_fmt(config.omega_max)}",
            f"omega_steps = {config.omega_steps}"]


def _spectra_for(p: SystemParams, config: RunConfig):
    ss = require_steady_state(p)
    dd = DriftDiffusion.from_steady_state(p, ss.state)
    return spectrum_grid(p, dd, config.omega_grid())


def _run_steady(config: RunConfig, out: Path) -> list[Path]:
    ss = require_steady_state(config.params)
    v = ss.state.doubled()
    columns = ["alpha1_re", "alpha1_im", "alpha2_re", "alpha2_im",
               "alpha3_re", "alpha3_im", "residual"]
    row = [v[0].real, v[0].imag, v[2].real, v[2].imag, v[4].real, v[4].imag,
           ss.residual]
    meta = ["mode = steady"] + _param_lines(config.params)
    return [_write_csv(out / "steady.csv", meta, columns, [row])]


def _run_spectra(config: RunConfig, out: Path) -> list[Path]:
    spectra = _spectra_for(config.params, config)
    columns = ["omega", "vx1", "vy1", "vx2", "vy2", "vx3", "vy3"]
    rows = [[s.omega] + [s.s_quad.variance(q, m) for m in (1, 2, 3)
                         for q in ("X", "Y")]
            for s in spectra]
    meta = (["mode = spectra"] + _param_lines(config.params)
            + _grid_meta(config))
    return [_write_csv(out / "spectra.csv", meta, columns, rows)]


def _correlation_row(report) -> list[float]:
    row = [report.omega]
    for pair in PAIR_ORDER:
        row += [report.v_pair[pair], report.gains[pair]]
    row += [report.v_triple[t] for t in TRIPLE_ORDER]
    row += [report.obr[t] for t in OBR_ORDER]
    row += [report.sum_v_pair, report.sum_obr]
    return row


_CORRELATION_COLUMNS = (
    ["omega"]
    + [name for i, j in PAIR_ORDER for name in (f"v_{i}{j}", f"gain_{i}{j}")]
    + [f"v_{i}{j}{k}" for i, j, k in TRIPLE_ORDER]
    + [f"obr_{i}{j}{k}" for i, j, k in OBR_ORDER]
    + ["sum_v_pair", "sum_obr"]
)


def _run_correlations(config: RunConfig, out: Path) -> list[Path]:
    reports = evaluate_grid(_spectra_for(config.params, config))
    rows = [_correlation_row(r) for r in reports]
    meta = (["mode = correlations"] + _param_lines(config.params)
            + _grid_meta(config))
    return [_write_csv(out / "correlations.csv", meta, _CORRELATION_COLUMNS,
                       rows)]


def _run_stochastic(config: RunConfig, out: Path) -> list[Path]:
    m = run_ensemble(config.params, dt=config.dt, t_end=config.t_end,
                     n_traj=config.n_traj, seed=config.seed, strict=False)
    columns = ["time", "moment", "real", "imag", "stderr"]
    names = ["mean_a1", "mean_a1p", "mean_a2", "mean_a2p", "mean_a3",
             "mean_a3p"]
    rows = []
    for t_index, t in enumerate(m.t_grid):
        for slot, name in enumerate(names):
            val = m.means[t_index, slot]
            se = m.means_stderr[t_index, slot]
            rows.append([t, name, val.real, val.imag,
                         np.hypot(se.real, se.imag)])
        for i in (1, 2, 3):
            for j in (1, 2, 3):
                val = m.second_doubled[t_index, 2 * (i - 1) + 1, 2 * (j - 1)]
                se = m.second_doubled_stderr[t_index, 2 * (i - 1) + 1,
                                             2 * (j - 1)]
                rows.append([t, f"n_{i}{j}", val.real, val.imag,
                             np.hypot(se.real, se.imag)])
        for i in (1, 2, 3):
            for j in (1, 2, 3):
                if j < i:
                    continue
                val = m.second_doubled[t_index, 2 * (i - 1), 2 * (j - 1)]
                se = m.second_doubled_stderr[t_index, 2 * (i - 1),
                                             2 * (j - 1)]
                rows.append([t, f"anom_{i}{j}", val.real, val.imag,
                             np.hypot(se.real, se.imag)])
    meta = (["mode = stochastic"] + _param_lines(config.params)
            + [f"seed = {config.seed}", f"dt = {_fmt(config.dt)}",
               f"t_end = {_fmt(config.t_end)}", f"n_traj = {config.n_traj}",
               "stderr combines the real and imaginary standard errors "
               "in quadrature"])
    footer = [f"divergent = {m.divergent} of {m.n_traj}"]
    if not m.reliable:
        footer.append("unreliable: divergence budget exceeded")
    return [_write_csv(out / "stochastic.csv", meta, columns, rows, footer)]


def _run_threshold(config: RunConfig, out: Path) -> list[Path]:
    result = pulsing_threshold(config.params, _THRESHOLD_RANGE)
    columns = ["epsilon", "min_real_eigenvalue"]
    rows = list(zip(result.scan_eps, result.scan_stability))
    meta = (["mode = threshold"] + _param_lines(config.params)
            + [f"scan = {_fmt(_THRESHOLD_RANGE[0])} .. "
               f"{_fmt(_THRESHOLD_RANGE[1])}"])
    footer = [f"eps_critical = {_fmt(result.eps_critical)}",
              f"bracket = {_fmt(result.bracket[0])} .. "
              f"{_fmt(result.bracket[1])}"]
    return [_write_csv(out / "threshold.csv", meta, columns, rows, footer)]


def _run_figures(config: RunConfig, out: Path) -> list[Path]:
    regimes = (config.regime,) if config.regime is not None else (1, 2)
    written: list[Path] = []
    for regime in regimes:
        p = REGIME_PRESETS[regime]
        reports = evaluate_grid(_spectra_for(p, config))
        meta = [f"regime = {regime}"] + _param_lines(p) + _grid_meta(config)
        obr_rows = [[r.omega] + [r.obr[t] for t in OBR_ORDER] + [r.sum_obr]
                    for r in reports]
        obr_cols = (["omega"] + [f"obr_{i}{j}{k}" for i, j, k in OBR_ORDER]
                    + ["sum_obr"])
        if regime == 2:
            written.append(_write_csv(
                out / "vij_regime2.csv", meta,
                ["omega"] + [f"v_{i}{j}" for i, j in PAIR_ORDER],
                [[r.omega] + [r.v_pair[pr] for pr in PAIR_ORDER]
                 for r in reports]))
            written.append(_write_csv(
                out / "vijk_regime2.csv", meta,
                ["omega"] + [f"v_{i}{j}{k}" for i, j, k in TRIPLE_ORDER],
                [[r.omega] + [r.v_triple[t] for t in TRIPLE_ORDER]
                 for r in reports]))
        written.append(_write_csv(out / f"obr_regime{regime}.csv", meta,
                                  obr_cols, obr_rows))
    return written


_RUNNERS = {
    "steady": _run_steady,
    "spectra": _run_spectra,
    "correlations": _run_correlations,
    "stochastic": _run_stochastic,
    "threshold": _run_threshold,
    "figures": _run_figures,
}


def _write_gnuplot(paths: list[Path], out: Path) -> Path:
    lines = ["set datafile separator ','", "set key outside", ""]
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if not line.startswith("#"):
                    columns = line.rstrip("\n").split(",")
                    break
        plot = ", ".join(
            f"'{path.name}' using 1:{idx + 2} with lines title "
            f"'{name}'" for idx, name in enumerate(columns[1:]))
        lines += [f"set xlabel '{columns[0]}'", f"plot {plot}", "pause -1", ""]
    script = out / "plots.gp"
    try:
        script.write_text("\n".join(lines), encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write {script}: {exc}") from exc
    return script


def run(config: RunConfig) -> list[Path]:
    """Execute one mode and return the artifact paths it wrote."""
    out = Path(config.output_path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create output directory {out}: {exc}") from exc
    paths = _RUNNERS[config.mode](config, out)
    if config.gnuplot and config.mode != "stochastic":
        paths.append(_write_gnuplot(paths, out))
    return paths


def main(argv: list[str] | None = None) -> int:
    try:
        config = build_config(sys.argv[1:] if argv is None else argv)
    except ConfigParse as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        for path in run(config):
            print(path)
    except NotStationary as exc:
        # The message names the self-pulsing regime explicitly.
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except IoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    return 0
