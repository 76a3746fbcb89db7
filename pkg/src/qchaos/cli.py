"""Command-line front end.

    qchaos spectrum  --config run.json --out out/
    qchaos borders   --config run.json --E 0.6
    qchaos ensemble  --config run.json --seed 7
    qchaos tunnel    --config run.json
    qchaos classical --K 5

Exit codes: 0 ok, 2 configuration, 3 computation, 4 I/O.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from . import borders, classical, ensemble, tunnelling
from .config import ConfigError, RunConfig, SweepSpec, load_config, with_overrides
from .realisations import RealisationSet, build_jump_realisations
from .spectrum import BoundStateError, solve_bound_states, write_levels_csv

log = logging.getLogger("qchaos")

EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE, EXIT_IO = 0, 2, 3, 4


class ComputeError(RuntimeError):
    pass


def _dump(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _spectrum(cfg: RunConfig, params=None):
    params = cfg.system if params is None else params
    try:
        return solve_bound_states(cfg.potential, params, cfg.n_levels,
                                  reference_index=cfg.reference_index,
                                  star_phase=cfg.star_phase, richardson=cfg.richardson)
    except (BoundStateError, ValueError) as exc:
        raise ComputeError(f"spectrum: {exc}") from exc


def cmd_spectrum(cfg: RunConfig, out: Path) -> None:
    spec = _spectrum(cfg)
    write_levels_csv(spec, out / "levels.csv")
    _dump(spec.to_dict(), out / "spectrum.json")


def cmd_borders(cfg: RunConfig, out: Path) -> None:
    eps_s = cfg.eps_s
    if cfg.mode == "above_barrier" and eps_s is None:
        eps_s = cfg.potential.amplitude
    if cfg.sweep is not None:
        reports = borders.sweep(cfg.sweep.variable, cfg.sweep.values(), cfg.energy,
                                cfg.system, lambda p: _spectrum(cfg, p), mode=cfg.mode,
                                eps_s=eps_s, workers=cfg.threads)
        borders.write_sweep_csv(reports, out / "sweep.csv")
        _dump([r.to_dict() for r in reports], out / "sweep.json")
        return
    if cfg.energy is None:
        raise ConfigError("energy: required for a single-point borders run")
    spec = _spectrum(cfg)
    try:
        rep = borders.classify(cfg.energy, spec, cfg.system, mode=cfg.mode, eps_s=eps_s)
    except ValueError as exc:
        raise ComputeError(f"borders: {exc}") from exc
    _dump(rep.to_dict(), out / "report.json")


def _realisations(cfg: RunConfig) -> RealisationSet:
    es = cfg.ensemble
    try:
        return build_jump_realisations(cfg.potential, cfg.system, es.n_p,
                                       energy=cfg.energy, laddered=es.laddered,
                                       level_index=es.level_index)
    except ValueError as exc:
        raise ComputeError(f"realisations: {exc}") from exc


def cmd_ensemble(cfg: RunConfig, out: Path) -> None:
    rs = _realisations(cfg)
    es = cfg.ensemble
    try:
        trace = ensemble.run(rs, cfg.noise, es.t_max, es.dt, cfg.seed)
    except ValueError as exc:
        raise ComputeError(f"ensemble: {exc}") from exc
    _dump(rs.to_dict(), out / "realisations.json")
    ensemble.write_trace_csv(trace, out / "trace.csv")
    ensemble.write_pdd_csv(trace, out / "pdd.csv")
    _dump({"seed": trace.seed, "jump_count": trace.jump_count,
           "alphas": list(rs.alphas),
           "occupancy_freq": trace.occupancy_freq.tolist()}, out / "ensemble.json")


def cmd_tunnel(cfg: RunConfig, out: Path, base: Path) -> None:
    tc = cfg.tunnel
    src = tc.realisations
    if src is None:
        rs = _realisations(cfg)
    else:
        if isinstance(src, str):
            path = Path(src) if Path(src).is_absolute() else base / src
            try:
                src = json.loads(path.read_text())
            except FileNotFoundError as exc:
                raise ConfigError(f"tunnel.realisations: file not found: {path}") from exc
            except json.JSONDecodeError as exc:
                raise ConfigError(f"tunnel.realisations: invalid JSON ({exc})") from exc
        try:
            rs = RealisationSet.from_dict(src)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"tunnel.realisations: {exc}") from exc
    for name in ("eps_s", "unperturbed_height", "delta_eps_s"):
        if getattr(tc, name) is None:
            raise ConfigError(f"tunnel.{name}: required")
    try:
        rep = tunnelling.tunnelling_report(rs, tc.beta, tc.eps_s, tc.unperturbed_height,
                                           tc.delta_eps_s)
    except (IndexError, ValueError) as exc:
        raise ComputeError(f"tunnel: {exc}") from exc
    _dump(rep.to_dict(), out / "tunnel.json")


def cmd_classical(cfg: RunConfig, out: Path) -> None:
    cc = cfg.classical
    params = dataclasses.replace(cfg.system, lambda_anh=cc.lambda_anh)
    K_c = borders.critical_K(params)
    if cc.K is not None:
        res = classical.iterate_standard_map(
            classical.MapParams(cc.K, cc.n_orbits, cc.n_steps, cfg.seed), workers=cfg.threads)
        lo, hi = classical.FUZZ_BAND
        agrees = None if lo <= cc.K / K_c <= hi else (not res.bounded) == (cc.K > K_c)
        verdict = {"K": cc.K, "K_c": K_c, "D_est": res.D_est, "bounded": res.bounded,
                   "agrees": agrees}
    else:
        if cfg.energy is None:
            raise ConfigError("classical.K or energy: one is required")
        spec = _spectrum(cfg, params)
        v = classical.correspondence_check(spec, params, cfg.energy, cc.n_orbits,
                                           cc.n_steps, cfg.seed, workers=cfg.threads)
        res = classical.iterate_standard_map(
            classical.MapParams(v.K, cc.n_orbits, cc.n_steps, cfg.seed), workers=cfg.threads)
        verdict = v.to_dict()
    verdict["motion"] = "bounded" if res.bounded else "diffusive"
    classical.write_variance_csv(res, out / "variance.csv")
    _dump(verdict, out / "verdict.json")


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", default=d, help="JSON run configuration")
    parser.add_argument("--seed", type=int, default=d)
    parser.add_argument("--out", default=d, help="output directory")
    parser.add_argument("--threads", type=int, default=d)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qchaos", description=__doc__.split("\n")[0])
    _global_flags(parser, suppress=False)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="bound-state levels")
    _global_flags(p, suppress=True)
    p.add_argument("--n-levels", type=int)

    p = sub.add_parser("borders", help="chaos borders and regime")
    _global_flags(p, suppress=True)
    p.add_argument("--E", type=float, dest="energy")
    p.add_argument("--mode", choices=borders.MODES)
    p.add_argument("--n-levels", type=int)
    p.add_argument("--sweep", dest="sweep_var", choices=borders.SWEEP_VARIABLES)
    p.add_argument("--sweep-min", type=float)
    p.add_argument("--sweep-max", type=float)
    p.add_argument("--sweep-n", type=int)
    p.add_argument("--log", action="store_true", default=None)

    p = sub.add_parser("ensemble", help="noise-driven realisation jumps")
    _global_flags(p, suppress=True)
    p.add_argument("--E", type=float, dest="energy")
    p.add_argument("--n-p", type=int)
    p.add_argument("--t-max", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--rate0", type=float)
    p.add_argument("--noise-mode", choices=("threshold", "activated"))

    p = sub.add_parser("tunnel", help="chaotic jump tunnelling probabilities")
    _global_flags(p, suppress=True)
    p.add_argument("--realisations", help="RealisationSet JSON file")
    p.add_argument("--beta", type=int)
    p.add_argument("--eps-s", type=float)
    p.add_argument("--unperturbed-height", type=float)
    p.add_argument("--delta-eps-s", type=float)

    p = sub.add_parser("classical", help="standard-map correspondence check")
    _global_flags(p, suppress=True)
    p.add_argument("--K", type=float)
    p.add_argument("--E", type=float, dest="energy")
    p.add_argument("--n-orbits", type=int)
    p.add_argument("--n-steps", type=int)
    return parser


def _resolve(args) -> tuple[RunConfig, Path]:
    if args.config is not None:
        cfg = load_config(args.config)
        base = Path(args.config).parent
    else:
        cfg, base = RunConfig(), Path(".")
    a = vars(args)
    over = {
        "seed": a.get("seed"),
        "threads": a.get("threads"),
        "output_dir": a.get("out"),
        "n_levels": a.get("n_levels"),
        "energy": a.get("energy"),
        "mode": a.get("mode"),
        "ensemble.n_p": a.get("n_p"),
        "ensemble.t_max": a.get("t_max"),
        "ensemble.dt": a.get("dt"),
        "noise.sigma": a.get("sigma"),
        "noise.rate0": a.get("rate0"),
        "noise.mode": a.get("noise_mode"),
        "tunnel.realisations": a.get("realisations"),
        "tunnel.beta": a.get("beta"),
        "tunnel.eps_s": a.get("eps_s"),
        "tunnel.unperturbed_height": a.get("unperturbed_height"),
        "tunnel.delta_eps_s": a.get("delta_eps_s"),
        "classical.K": a.get("K"),
        "classical.n_orbits": a.get("n_orbits"),
        "classical.n_steps": a.get("n_steps"),
    }
    if a.get("realisations") is not None:
        over["tunnel.realisations"] = str(Path(a["realisations"]).resolve())
    cfg = with_overrides(cfg, **over)
    if a.get("sweep_var") is not None:
        try:
            sweep = SweepSpec(a["sweep_var"], a["sweep_min"], a["sweep_max"],
                              a["sweep_n"] or 100, bool(a.get("log")))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"sweep: {exc}") from exc
        cfg = dataclasses.replace(cfg, sweep=sweep)
    return cfg, base


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg, base = _resolve(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(cfg.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        _dump(cfg.to_dict(), out / "config.echo.json")
        if args.command == "spectrum":
            cmd_spectrum(cfg, out)
        elif args.command == "borders":
            cmd_borders(cfg, out)
        elif args.command == "ensemble":
            cmd_ensemble(cfg, out)
        elif args.command == "tunnel":
            cmd_tunnel(cfg, out, base)
        else:
            cmd_classical(cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ComputeError, BoundStateError) as exc:
        print(f"compute error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    log.info("wrote %s", out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
