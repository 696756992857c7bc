"""Command-line front end.

Subcommands mirror the library surface: ``synth`` generates measurements,
``anm``/``ram`` solve them, ``music`` computes the baseline pseudospectrum,
``decompose`` factors a Toeplitz parameter, and ``phase-transition``/``doa``
drive the Monte-Carlo studies.  Exit codes: 0 success, 1 configuration or
usage error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from .experiments import (
    DoaConfig,
    PhaseTransitionConfig,
    export_manifest,
    run_doa,
    run_phase_transition,
)
from .music import music_pseudospectrum, pick_peaks, sample_covariance
from .ram import RamConfig, anm_solve, ram_solve
from .retrieval import (
    FullRankError,
    ReconstructionError,
    numerical_rank,
    vandermonde_decompose,
)
from .signal import (
    FeasibleDomain,
    FrequencyMixture,
    MeasurementSet,
    SamplingPattern,
    add_noise,
    draw_mixture,
    noise_ball_radius,
    subsample,
    synthesize,
)
from .solver import InfeasibleDomainError, SolverOptions
from .toeplitz import toeplitz_lift

__all__ = ["cli", "main"]

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2


class ConfigError(Exception):
    """Bad configuration file or option combination."""


class _Parser(argparse.ArgumentParser):
    """Argument parser that exits with the configuration error code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)


def _build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="master seed override")
    common.add_argument("--config", type=Path, default=None,
                        help="JSON configuration file")
    common.add_argument("--out", type=Path, default=Path("."),
                        help="output directory")
    common.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="tabular output format")
    parser = _Parser(prog="gridless", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)
    sub.add_parser("synth", parents=[common],
                   help="generate a measurement set")
    sub.add_parser("anm", parents=[common], help="atomic-norm minimization")
    sub.add_parser("ram", parents=[common],
                   help="reweighted atomic-norm minimization")
    sub.add_parser("music", parents=[common],
                   help="subspace pseudospectrum baseline")
    sub.add_parser("decompose", parents=[common],
                   help="Toeplitz Vandermonde decomposition")
    pt = sub.add_parser("phase-transition", parents=[common],
                        help="success-rate grid sweep")
    pt.add_argument("--method", choices=("anm", "ram", "both"), default="both")
    sub.add_parser("doa", parents=[common],
                   help="sparse-array localization study")
    return parser


def _load_config(path: Path | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    return doc


def _dataclass_from(cls, doc: dict, **overrides):
    allowed = {f.name for f in fields(cls)}
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"unknown {cls.__name__} fields: {sorted(unknown)}")
    merged = {**doc, **overrides}
    # nested option blocks arrive as plain dicts
    if "solver" in merged and isinstance(merged["solver"], dict):
        merged["solver"] = _dataclass_from(SolverOptions, merged["solver"])
    if "ram" in merged and isinstance(merged["ram"], dict):
        merged["ram"] = _dataclass_from(RamConfig, merged["ram"])
    for key in ("k_grid", "sep_grid", "omega", "freqs", "powers"):
        if key in merged and isinstance(merged[key], list):
            merged[key] = tuple(merged[key])
    try:
        return cls(**merged)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid {cls.__name__}: {exc}") from exc


def _check_keys(cfg: dict, allowed: set, command: str) -> None:
    unknown = set(cfg) - allowed
    if unknown:
        raise ConfigError(f"unknown {command} config keys: {sorted(unknown)}")


def _measurement_from(doc: dict, base: Path | None) -> MeasurementSet:
    if "measurement_path" in doc:
        rel = Path(doc["measurement_path"])
        path = rel if rel.is_absolute() or base is None else base / rel
        try:
            return MeasurementSet.from_json(path.read_text())
        except (OSError, KeyError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot load measurement from {path}: {exc}") from exc
    if "measurement" in doc:
        try:
            return MeasurementSet.from_json(json.dumps(doc["measurement"]))
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad inline measurement: {exc}") from exc
    raise ConfigError("config needs 'measurement' or 'measurement_path'")


def _complex_list(pairs) -> np.ndarray:
    return np.array([complex(re, im) for re, im in pairs])


def _write_spectrum(spectrum, out: Path, fmt: str) -> None:
    if fmt == "json":
        (out / "spectrum.json").write_text(spectrum.to_json())
    else:
        spectrum.to_csv(out / "spectrum.csv")


def _cmd_synth(args, cfg: dict) -> int:
    _check_keys(cfg, {"seed", "n", "l", "freqs", "coeffs", "k", "min_sep",
                      "omega", "m", "sigma2", "domain", "eta"}, "synth")
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    rng = np.random.default_rng(seed)
    n = int(cfg.get("n", 64))
    l = int(cfg.get("l", 1))
    if "freqs" in cfg:
        coeffs = _complex_list(
            [p for row in cfg["coeffs"] for p in row]
        ).reshape(len(cfg["freqs"]), -1) if "coeffs" in cfg else np.ones(
            (len(cfg["freqs"]), l), dtype=complex
        )
        mix = FrequencyMixture(np.asarray(cfg["freqs"], dtype=float), coeffs)
    else:
        mix = draw_mixture(
            int(cfg.get("k", 3)), float(cfg.get("min_sep", 0.0)), l, rng
        )
    if "omega" in cfg:
        pattern = SamplingPattern(np.asarray(cfg["omega"], dtype=int), n)
    elif "m" in cfg:
        omega = np.sort(rng.choice(n, size=int(cfg["m"]), replace=False)) + 1
        pattern = SamplingPattern(omega, n)
    else:
        pattern = SamplingPattern.full(n)
    y_obs = subsample(synthesize(mix, n), pattern)
    sigma2 = float(cfg.get("sigma2", 0.0))
    if sigma2 > 0:
        y_obs = add_noise(y_obs, sigma2, rng)
    if cfg.get("domain", "equality") == "ball":
        eta = cfg.get("eta", "auto")
        if eta == "auto":
            eta = noise_ball_radius(pattern.m, l, sigma2)
        domain = FeasibleDomain.ball(float(eta))
    else:
        domain = FeasibleDomain.equality()
    meas = MeasurementSet(pattern, y_obs, domain)
    (args.out / "measurement.json").write_text(meas.to_json())
    truth = {
        "freqs": list(mix.freqs),
        "coeffs": [[[z.real, z.imag] for z in row] for row in mix.coeffs],
    }
    (args.out / "truth.json").write_text(json.dumps(truth))
    print(f"wrote measurement.json (n={n}, m={pattern.m}, l={l}) to {args.out}")
    return EXIT_OK


def _cmd_solve(args, cfg: dict, reweighted: bool) -> int:
    allowed = {"measurement_path", "measurement", "solver", "rank_tol",
               "recon_tol"}
    if reweighted:
        allowed.add("ram")
    _check_keys(cfg, allowed, "ram" if reweighted else "anm")
    meas = _measurement_from(cfg, args.config.parent if args.config else None)
    solver = _dataclass_from(SolverOptions, cfg.get("solver", {}))
    rank_tol = float(cfg.get("rank_tol", 1e-6 if reweighted else 1e-3))
    recon_tol = float(cfg.get("recon_tol", 1e-2))
    if reweighted:
        ram_cfg = _dataclass_from(RamConfig, cfg.get("ram", {}), solver=solver)
        sol, trace = ram_solve(meas, ram_cfg)
        trace.to_csv(args.out / "trace.csv")
    else:
        sol = anm_solve(meas, solver)
    (args.out / "solution.json").write_text(json.dumps(sol.to_json_dict()))
    k_hat = min(numerical_rank(toeplitz_lift(sol.u_star), rank_tol),
                meas.n - 1)
    spectrum = vandermonde_decompose(sol.u_star, k_hat, recon_tol)
    _write_spectrum(spectrum, args.out, args.format)
    status = "converged" if sol.converged else "NOT converged"
    print(f"{'ram' if reweighted else 'anm'}: objective {sol.objective:.6g}, "
          f"{sol.iterations} iterations ({status}); "
          f"{spectrum.order} components retrieved")
    if not sol.converged:
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_music(args, cfg: dict) -> int:
    _check_keys(cfg, {"measurement_path", "measurement", "k", "grid_size"},
                "music")
    meas = _measurement_from(cfg, args.config.parent if args.config else None)
    k = cfg.get("k")
    if k is None:
        raise ConfigError("music requires the model order 'k'")
    ps = music_pseudospectrum(
        sample_covariance(meas.y_obs), int(k), meas.pattern,
        int(cfg.get("grid_size", 8192)),
    )
    ps.to_csv(args.out / "pseudospectrum.csv")
    freqs, complete = pick_peaks(ps, int(k))
    doc = {"freqs": list(freqs), "found_all": bool(complete)}
    (args.out / "peaks.json").write_text(json.dumps(doc))
    print(f"music: {freqs.size} peaks -> {args.out / 'peaks.json'}")
    return EXIT_OK


def _cmd_decompose(args, cfg: dict) -> int:
    _check_keys(cfg, {"u", "k", "rank_tol", "recon_tol"}, "decompose")
    if "u" not in cfg:
        raise ConfigError("decompose requires 'u' as [re, im] pairs")
    u = _complex_list(cfg["u"])
    if "k" in cfg:
        k_hat = int(cfg["k"])
    else:
        k_hat = numerical_rank(toeplitz_lift(u), float(cfg.get("rank_tol", 1e-6)))
    spectrum = vandermonde_decompose(u, k_hat, float(cfg.get("recon_tol", 1e-6)))
    _write_spectrum(spectrum, args.out, args.format)
    print(f"decompose: order {spectrum.order} -> {args.out}")
    return EXIT_OK


def _cmd_phase(args, cfg: dict) -> int:
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    pt_cfg = _dataclass_from(PhaseTransitionConfig, cfg, **overrides)
    result = run_phase_transition(pt_cfg, args.method)
    result.to_csv(args.out / "grid.csv")
    result.runs_to_csv(args.out / "runs.csv")
    export_manifest(result.manifest(), args.out / "manifest.json")
    print(result.to_csv())
    return EXIT_OK


def _cmd_doa(args, cfg: dict) -> int:
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    doa_cfg = _dataclass_from(DoaConfig, cfg, **overrides)
    result = run_doa(doa_cfg)
    result.to_csv(args.out / "doa_runs.csv")
    export_manifest(result.manifest(), args.out / "manifest.json")
    n_err = sum(bool(r.error) for r in result.records)
    print(f"doa: {doa_cfg.runs} runs x 3 methods -> {args.out / 'doa_runs.csv'}"
          f" ({n_err} logged failures)")
    return EXIT_OK


def cli(argv=None) -> int:
    """Run the command line; returns the process exit code."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        args.out.mkdir(parents=True, exist_ok=True)
        if args.command == "synth":
            return _cmd_synth(args, cfg)
        if args.command == "anm":
            return _cmd_solve(args, cfg, reweighted=False)
        if args.command == "ram":
            return _cmd_solve(args, cfg, reweighted=True)
        if args.command == "music":
            return _cmd_music(args, cfg)
        if args.command == "decompose":
            return _cmd_decompose(args, cfg)
        if args.command == "phase-transition":
            return _cmd_phase(args, cfg)
        if args.command == "doa":
            return _cmd_doa(args, cfg)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, OSError) as exc:
        print(f"gridless: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InfeasibleDomainError, FullRankError, ReconstructionError) as exc:
        print(f"gridless: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"gridless: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main() -> None:
    sys.exit(cli())


if __name__ == "__main__":
    main()
