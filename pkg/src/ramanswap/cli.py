"""Command-line entry point: ``ramanswap <battery> [--config ...] [--out ...]``.

Exit codes: 0 success, 2 configuration error, 3 impedance match failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import experiments as ex
from .config import ConfigError, ExperimentConfig
from .model import MatchError
from .qmath import CARDINAL_NAMES, cardinal_states
from .signal import read_waveform_csv

EXIT_OK, EXIT_CONFIG, EXIT_MATCH = 0, 2, 3

COMMANDS = {
    "match": ex.cmd_match,
    "levels": ex.cmd_levels,
    "reflectance": ex.cmd_reflectance,
    "p2a": ex.cmd_p2a,
    "a2p": ex.cmd_a2p,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config",
                        help="INI experiment file (defaults: photon->atom device values)")
    common.add_argument("--out", help="output directory (overrides [run] out_dir)")
    common.add_argument("--seed", type=int, help="RNG seed for finite-shot readout")
    common.add_argument("--threads", type=int, help="worker processes for battery items")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="ramanswap", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=f"run the {name} battery")
    est = sub.add_parser("estimate", parents=[common],
                         help="reconstruct states from measurement CSVs")
    est.add_argument("--tomography", help="CSV with columns alpha_sq,p1..p6")
    est.add_argument("--waveforms", nargs=4, metavar=("ZETA_L", "ZETA_H", "XI_L", "XI_H"),
                     help="four waveform CSVs for the overlap-matrix estimate")
    est.add_argument("--target", choices=CARDINAL_NAMES,
                     help="cardinal state to report the fidelity against")
    return ap


def load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    kw = {}
    if args.out is not None:
        kw["out_dir"] = args.out
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be non-negative")
        kw["seed"] = args.seed
    if args.threads is not None:
        kw["threads"] = args.threads
    return cfg.replace(**kw) if kw else cfg


def run_estimate(args, out_dir: str) -> dict:
    if bool(args.tomography) == bool(args.waveforms):
        raise ConfigError("estimate needs exactly one of --tomography or --waveforms")
    target = None
    if args.target:
        idx = CARDINAL_NAMES.index(args.target)
        target = cardinal_states("photon" if args.tomography else "atom")[idx]
    try:
        if args.tomography:
            result = ex.estimate_from_tomography(ex.read_tomography_csv(args.tomography), target)
        else:
            result = ex.estimate_from_waveforms(*(read_waveform_csv(p) for p in args.waveforms),
                                                target=target)
    except (OSError, ValueError) as e:
        raise ConfigError(f"cannot read measurement data: {e}") from e
    with open(os.path.join(out_dir, "estimate.json"), "w") as f:
        json.dump(result, f, indent=2, sort_keys=True)
    return result


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args)
        os.makedirs(cfg.out_dir, exist_ok=True)
        if args.command == "estimate":
            result = run_estimate(args, cfg.out_dir)
            print(json.dumps(result, sort_keys=True))
            return EXIT_OK
        rec = COMMANDS[args.command](cfg, cfg.out_dir)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except MatchError as e:
        r = e.result
        print(f"impedance match failed: {e}\n  drive: Omega={r.drive.rabi:.6g} rad/ns "
              f"omega_d={r.drive.omega_d:.6g} rad/ns, mismatch={r.mismatch:.3g}", file=sys.stderr)
        return EXIT_MATCH
    summary = {k: v for k, v in rec.results.items() if not isinstance(v, dict)}
    print(json.dumps(dict(experiment=rec.experiment, out_dir=cfg.out_dir, **summary),
                     sort_keys=True, default=float))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
