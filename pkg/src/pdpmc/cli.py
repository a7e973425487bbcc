"""Batch front end: config parsing, the four pipelines and CSV output.

Configuration is a JSON document::

    {
      "model": {"delta_e": 1.0, "delta_eps": 0.31, "n1": 200, "n2": 200,
                "lambda": 0.001},
      "run":   {"coupling": "weak", "convention": "hazard_consistent",
                "trajectories": 5000, "t_max": null, "n_points": 200,
                "seed": 12345},
      "output": {"path": "compare.csv"}
    }

Only ``model.lambda`` is required; every other key has the default shown
above (``t_max`` null means 6/(g1+g2) for weak and 60/delta_eps for
strong coupling).  Unknown keys are rejected.  Command-line flags
override config keys.  Exit codes: 0 success, 1 configuration error,
2 numerical failure, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import subprocess
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .engine import ComponentState, EngineError
from .ensemble import run_ensemble
from .exact import build_sector_hamiltonian, evolve_exact, initial_sector_state, upper_population
from .numerics import NonConvergenceError
from .two_band import (
    SamplerConvention,
    TwoBandParams,
    build_strong_model,
    build_weak_model,
    relaxation_rates,
    tcl2_population,
    tcl2t_population,
)

__all__ = ["ConfigError", "RunConfig", "parse_config", "run_compare", "main"]

_COMPARE_COLUMNS = ["t", "rho11_mc", "stderr_mc", "rho11_tcl2", "rho11_tcl2t", "rho11_exact"]


class ConfigError(ValueError):
    """Invalid configuration; the message carries the offending key path."""


@dataclass(frozen=True)
class RunConfig:
    params: TwoBandParams
    coupling: str
    convention: SamplerConvention
    n_traj: int
    t_max: float
    n_points: int
    out: str | None


def _take(section: dict, path: str, key: str, default, kind, required=False):
    if key in section:
        value = section.pop(key)
    elif required:
        raise ConfigError(f"{path}.{key}: missing")
    else:
        return default
    try:
        if kind is float:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise TypeError
            return float(value)
        if kind is int:
            if isinstance(value, bool) or not isinstance(value, int):
                raise TypeError
            return int(value)
        if kind is str:
            if not isinstance(value, str):
                raise TypeError
            return value
    except TypeError:
        raise ConfigError(f"{path}.{key}: expected {kind.__name__}, got {value!r}") from None
    raise AssertionError(kind)


def _section(doc: dict, name: str) -> dict:
    section = doc.pop(name, {})
    if not isinstance(section, dict):
        raise ConfigError(f"{name}: expected an object")
    return dict(section)


def parse_config(doc: dict) -> RunConfig:
    """Validate a configuration document and fill in defaults.

    Raises `ConfigError` with the key path for malformed, out-of-range or
    unknown entries.
    """
    if not isinstance(doc, dict):
        raise ConfigError("top level: expected an object")
    doc = dict(doc)
    model = _section(doc, "model")
    run = _section(doc, "run")
    output = _section(doc, "output")
    if doc:
        raise ConfigError(f"{sorted(doc)[0]}: unknown key")

    lam = _take(model, "model", "lambda", None, float, required=True)
    delta_e = _take(model, "model", "delta_e", 1.0, float)
    delta_eps = _take(model, "model", "delta_eps", 0.31, float)
    n1 = _take(model, "model", "n1", 200, int)
    n2 = _take(model, "model", "n2", 200, int)
    if model:
        raise ConfigError(f"model.{sorted(model)[0]}: unknown key")

    coupling = _take(run, "run", "coupling", "weak", str)
    convention_name = _take(run, "run", "convention", "hazard_consistent", str)
    n_traj = _take(run, "run", "trajectories", 5000, int)
    t_max = run.pop("t_max", None)
    if t_max is not None:
        if isinstance(t_max, bool) or not isinstance(t_max, (int, float)):
            raise ConfigError(f"run.t_max: expected number or null, got {t_max!r}")
        t_max = float(t_max)
    n_points = _take(run, "run", "n_points", 200, int)
    seed = _take(run, "run", "seed", 12345, int)
    if run:
        raise ConfigError(f"run.{sorted(run)[0]}: unknown key")

    out = output.pop("path", None)
    if out is not None and not isinstance(out, str):
        raise ConfigError(f"output.path: expected string, got {out!r}")
    if output:
        raise ConfigError(f"output.{sorted(output)[0]}: unknown key")

    try:
        params = TwoBandParams(lam=lam, delta_e=delta_e, delta_eps=delta_eps,
                               n1=n1, n2=n2, seed=seed)
    except ValueError as exc:
        raise ConfigError(f"model: {exc}") from None

    if coupling not in ("weak", "strong"):
        raise ConfigError(f"run.coupling: must be 'weak' or 'strong', got {coupling!r}")
    try:
        convention = SamplerConvention(convention_name)
    except ValueError:
        raise ConfigError(
            f"run.convention: must be 'hazard_consistent' or 'printed_f', got {convention_name!r}"
        ) from None
    if n_traj < 1:
        raise ConfigError(f"run.trajectories: must be >= 1, got {n_traj}")
    if n_points < 2:
        raise ConfigError(f"run.n_points: must be >= 2, got {n_points}")

    if t_max is None:
        rates = relaxation_rates(params)
        if coupling == "weak":
            if rates.total == 0.0:
                raise ConfigError("run.t_max: required when the relaxation rates vanish")
            t_max = 6.0 / rates.total
        else:
            t_max = 60.0 / params.delta_eps
    if not (t_max > 0.0 and math.isfinite(t_max)):
        raise ConfigError(f"run.t_max: must be positive and finite, got {t_max}")

    return RunConfig(params=params, coupling=coupling, convention=convention,
                     n_traj=n_traj, t_max=t_max, n_points=n_points, out=out)


def config_document(config: RunConfig) -> dict:
    """Fully resolved document; `parse_config` of it reproduces `config`."""
    return {
        "model": {
            "lambda": config.params.lam,
            "delta_e": config.params.delta_e,
            "delta_eps": config.params.delta_eps,
            "n1": config.params.n1,
            "n2": config.params.n2,
        },
        "run": {
            "coupling": config.coupling,
            "convention": config.convention.value,
            "trajectories": config.n_traj,
            "t_max": config.t_max,
            "n_points": config.n_points,
            "seed": config.params.seed,
        },
        "output": {"path": config.out},
    }


# ---------------------------------------------------------------------------
# Pipelines
# ---------------------------------------------------------------------------


def _grid(config: RunConfig) -> np.ndarray:
    return np.linspace(0.0, config.t_max, config.n_points)


def _initial_state() -> ComponentState:
    psi = np.zeros((2, 2), dtype=complex)
    psi[0, 0] = 1.0  # component 0 in |e>, component 1 empty
    return ComponentState(psi, 0.0)


def _build_model(config: RunConfig):
    if config.coupling == "weak":
        return build_weak_model(config.params)
    return build_strong_model(config.params, config.convention, t_max=config.t_max)


def run_mc(config: RunConfig, n_workers: int = 1):
    grid = _grid(config)
    est = run_ensemble(_build_model(config), _initial_state(), grid,
                       config.n_traj, config.params.seed, n_workers=n_workers,
                       metadata={"convention": config.convention.value})
    weights = np.real(np.trace(est.rho, axis1=2, axis2=3))
    return grid, {
        "t": grid,
        "rho11_mc": est.mean,
        "stderr_mc": est.stderr,
        "trace_rho1": weights[:, 0],
        "trace_rho2": weights[:, 1],
    }


def run_tcl(config: RunConfig):
    grid = _grid(config)
    return grid, {
        "t": grid,
        "rho11_tcl2": tcl2_population(grid, config.params),
        "rho11_tcl2t": tcl2t_population(grid, config.params),
    }


def run_exact(config: RunConfig):
    grid = _grid(config)
    ham = build_sector_hamiltonian(config.params)
    psi0 = initial_sector_state(config.params)
    amplitudes = evolve_exact(ham, psi0, grid)
    return grid, {
        "t": grid,
        "rho11_exact": upper_population(amplitudes, config.params.n1),
    }


def run_compare(config: RunConfig, n_workers: int = 1):
    """All four methods on one shared grid, in the compare CSV layout."""
    grid, mc = run_mc(config, n_workers=n_workers)
    _, tcl = run_tcl(config)
    _, exact = run_exact(config)
    return grid, {
        "t": grid,
        "rho11_mc": mc["rho11_mc"],
        "stderr_mc": mc["stderr_mc"],
        "rho11_tcl2": tcl["rho11_tcl2"],
        "rho11_tcl2t": tcl["rho11_tcl2t"],
        "rho11_exact": exact["rho11_exact"],
    }


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _version_string() -> str:
    try:
        rev = subprocess.run(
            ["git", "-C", str(Path(__file__).resolve().parent), "rev-parse", "--short", "HEAD"],
            capture_output=True, text=True, timeout=5,
        )
        if rev.returncode == 0:
            return f"{__version__}+g{rev.stdout.strip()}"
    except Exception:
        pass
    return __version__


def write_csv(path: str, columns: dict) -> None:
    """Fixed 17-significant-digit CSV so that doubles round-trip losslessly."""
    names = list(columns)
    arrays = [np.asarray(columns[name], dtype=float) for name in names]
    length = len(arrays[0])
    lines = [",".join(names)]
    for k in range(length):
        lines.append(",".join(f"{a[k]:.17g}" for a in arrays))
    Path(path).write_text("\n".join(lines) + "\n")


def write_metadata(path: str, config: RunConfig, subcommand: str) -> None:
    doc = {
        "command": subcommand,
        "version": _version_string(),
        "seed": config.params.seed,
        "convention": config.convention.value,
        "config": config_document(config),
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simulate",
        description="Monte Carlo, TCL and exact pipelines for the two-band model",
    )
    parser.add_argument("subcommand", choices=["mc", "tcl", "exact", "compare"])
    parser.add_argument("--config", help="path to a JSON configuration document")
    parser.add_argument("--out", help="output CSV path (default <subcommand>.csv)")
    parser.add_argument("--seed", type=int, help="override run.seed")
    parser.add_argument("--coupling", choices=["weak", "strong"], help="override run.coupling")
    parser.add_argument("--convention", choices=["printed", "hazard"],
                        help="override run.convention")
    parser.add_argument("--workers", type=int, default=1, help="trajectory worker processes")
    return parser


def _load_document(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: malformed JSON in {path}: {exc}") from None
    return doc


def _apply_overrides(doc: dict, args) -> dict:
    doc = json.loads(json.dumps(doc))  # deep copy
    run = doc.setdefault("run", {})
    if args.seed is not None:
        run["seed"] = args.seed
    if args.coupling is not None:
        run["coupling"] = args.coupling
    if args.convention is not None:
        run["convention"] = {"printed": "printed_f", "hazard": "hazard_consistent"}[args.convention]
    if args.out is not None:
        doc.setdefault("output", {})["path"] = args.out
    return doc


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = parse_config(_apply_overrides(_load_document(args.config), args))
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1

    out = config.out or f"{args.subcommand}.csv"
    try:
        if args.subcommand == "mc":
            _, columns = run_mc(config, n_workers=args.workers)
        elif args.subcommand == "tcl":
            _, columns = run_tcl(config)
        elif args.subcommand == "exact":
            _, columns = run_exact(config)
        else:
            _, columns = run_compare(config, n_workers=args.workers)
    except (EngineError, NonConvergenceError, FloatingPointError, ValueError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2

    try:
        write_csv(out, columns)
        write_metadata(out + ".meta.json", config, args.subcommand)
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
