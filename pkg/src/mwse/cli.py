"""Command line interface: NMSE sweeps, CRB reports and trial replay.

Verbosity is controlled by the MWSE_LOG environment variable
(error | info | debug, default info).
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import crb as crb_mod
from .channel import build_stacked_matrix, synthesize_channel
from .config import load_config
from .frontend import comb_pattern, noise_var_for_snr
from .harness import config_hash, replay_row, sweep, trial_seed
from .scene import generate_scene, true_path_params

log = logging.getLogger("mwse.cli")

_LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


def _setup_logging() -> None:
    level = os.environ.get("MWSE_LOG", "info").lower()
    if level not in _LOG_LEVELS:
        print(f"warning: unknown MWSE_LOG value {level!r}, using info", file=sys.stderr)
        level = "info"
    logging.basicConfig(level=_LOG_LEVELS[level], format="%(levelname)s %(name)s: %(message)s")


def _parse_snr_grid(text: str) -> tuple[float, ...]:
    """Parse 'a:b:step' (inclusive) or a comma-separated list of dB values."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError("expected a:b:step")
        a, b, step = (float(p) for p in parts)
        if step <= 0:
            raise argparse.ArgumentTypeError("step must be positive")
        n = int(math.floor((b - a) / step + 1e-9)) + 1
        return tuple(a + i * step for i in range(n))
    return tuple(float(p) for p in text.split(","))


def _apply_overrides(cfg, args):
    updates = {}
    if args.snr is not None:
        updates["snr_grid_db"] = args.snr
    if args.trials is not None:
        updates["trials"] = args.trials
    if args.seed is not None:
        updates["master_seed"] = args.seed
    if args.estimators is not None:
        updates["estimators"] = tuple(args.estimators.split(","))
    return replace(cfg, **updates) if updates else cfg


def _cmd_simulate(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    print(
        f"config {config_hash(cfg)}: pilot overhead "
        f"{cfg.pilot_overhead_percent} "
        f"({len(range(cfg.comb_offset, cfg.ofdm.fft_size, cfg.comb_size))}/{cfg.ofdm.fft_size})"
    )
    produced = sweep(cfg, args.out, svg=args.svg, workers=args.workers)
    for kind, path in produced.items():
        print(f"{kind}: {path}")
    return 0


def _cmd_crb(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "crb.csv"
    trials = min(cfg.trials, args.max_scenarios)
    with path.open("w") as fh:
        fh.write(
            "scenario,snr_db,trial,path,crb_theta,crb_alpha,identifiable,"
            "cond_theta,cond_alpha,dictionary_rank\n"
        )
        for snr_db in cfg.snr_grid_db:
            for trial in range(trials):
                rng = np.random.default_rng(trial_seed(cfg.master_seed, snr_db, trial))
                scene = generate_scene(cfg.scene, rng)
                paths = true_path_params(scene)
                ch = synthesize_channel(paths, cfg.array_cfg, cfg.ofdm)
                noise_var = noise_var_for_snr(ch, snr_db)
                pilots = comb_pattern(cfg.ofdm.fft_size, cfg.comb_size, cfg.comb_offset)
                angles = np.array([p.aoa for p in paths])
                delays = np.array([p.delay for p in paths])
                # dictionary gains absorb the sqrt(M / L) channel scale
                gain_var = cfg.array_cfg.num_antennas / len(paths)
                inp = crb_mod.FimInput(
                    angles=angles,
                    delays=delays,
                    gamma_hat=np.full(len(paths), 1.0 / gain_var),
                    zeta_hat=1.0 / noise_var,
                    pilot_subcarriers=pilots.indices,
                    array_cfg=cfg.array_cfg,
                    ofdm_cfg=cfg.ofdm,
                )
                fim = crb_mod.assemble_fim(crb_mod.fim_blocks(inp))
                res = crb_mod.crb_theta_alpha(fim, len(paths))
                omega = build_stacked_matrix(angles, delays, pilots.indices, cfg.array_cfg, cfg.ofdm)
                rank = crb_mod.dictionary_rank(omega)
                scenario = f"snr{snr_db:g}_t{trial}"
                for i in range(len(paths)):
                    ct = res.crb_theta[i] if res.crb_theta is not None else float("nan")
                    ca = res.crb_alpha[i] if res.crb_alpha is not None else float("nan")
                    fh.write(
                        f"{scenario},{snr_db!r},{trial},{i},{ct!r},{ca!r},"
                        f"{int(res.identifiable)},{res.cond_theta_pivot!r},"
                        f"{res.cond_alpha_pivot!r},{rank}\n"
                    )
    print(f"crb: {path}")
    return 0


def _cmd_replay(args) -> int:
    cfg = load_config(args.config)
    original, replayed = replay_row(cfg, args.row)
    same = (
        original.nmse == replayed.nmse
        or (math.isnan(original.nmse) and math.isnan(replayed.nmse))
    )
    print(f"original : nmse={original.nmse!r} seed={original.seed}")
    print(f"replayed : nmse={replayed.nmse!r} seed={replayed.seed}")
    print("match" if same else "MISMATCH")
    return 0 if same else 1


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = argparse.ArgumentParser(
        prog="mwse",
        description="Sensing-aided wideband mmWave MIMO channel estimation simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run an NMSE-vs-SNR Monte-Carlo sweep")
    sim.add_argument("--config", default=None, help="TOML config (defaults shipped)")
    sim.add_argument("--snr", type=_parse_snr_grid, default=None, metavar="A:B:STEP")
    sim.add_argument("--trials", type=int, default=None)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--estimators", default=None, help="comma-separated estimator names")
    sim.add_argument("--out", default="out", help="output directory")
    sim.add_argument("--svg", action="store_true", help="also write an SVG chart")
    sim.add_argument("--workers", type=int, default=1)
    sim.set_defaults(func=_cmd_simulate)

    crb_p = sub.add_parser("crb", help="emit CRB diagonals and identifiability flags")
    crb_p.add_argument("--config", default=None)
    crb_p.add_argument("--out", default="out")
    crb_p.add_argument("--snr", type=_parse_snr_grid, default=None, metavar="A:B:STEP")
    crb_p.add_argument("--trials", type=int, default=None)
    crb_p.add_argument("--seed", type=int, default=None)
    crb_p.add_argument("--estimators", default=None, help=argparse.SUPPRESS)
    crb_p.add_argument("--max-scenarios", type=int, default=10, help="scenarios per SNR point")
    crb_p.set_defaults(func=_cmd_crb)

    rep = sub.add_parser("replay", help="re-run the trial behind one result CSV row")
    rep.add_argument("--config", default=None)
    rep.add_argument("--row", required=True, help="one row-level CSV line")
    rep.set_defaults(func=_cmd_replay)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
