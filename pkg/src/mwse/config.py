"""TOML configuration loading for the sweep harness.

The file mirrors :class:`mwse.harness.SweepConfig`; every key is optional and
falls back to the shipped defaults (the simulation parameters of the default
experiment).  All quantities are SI: radians, seconds, meters.
"""

from __future__ import annotations

from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .channel import ArrayConfig, OfdmConfig
from .estimators import SblHyperprior
from .harness import SweepConfig, default_config
from .scene import SceneConfig


def _section(data: dict, name: str) -> dict:
    value = data.get(name, {})
    if not isinstance(value, dict):
        raise ValueError(f"config section [{name}] must be a table")
    return value


def load_config(path: str | Path | None = None) -> SweepConfig:
    """Build a SweepConfig from a TOML file layered over the defaults."""
    base = default_config()
    if path is None:
        return base
    with open(path, "rb") as fh:
        data = tomllib.load(fh)

    ofdm_t = _section(data, "ofdm")
    ofdm = OfdmConfig(
        fft_size=int(ofdm_t.get("fft_size", base.ofdm.fft_size)),
        num_taps=int(ofdm_t.get("num_taps", base.ofdm.num_taps)),
        sample_period=float(ofdm_t.get("sample_period", base.ofdm.sample_period)),
        cp_len=int(ofdm_t.get("cp_len", base.ofdm.cp_len)),
    )

    scene_t = _section(data, "scene")
    region = scene_t.get("scatter_region", list(base.scene.scatter_region))
    scene = SceneConfig(
        num_scatterers=int(scene_t.get("num_scatterers", base.scene.num_scatterers)),
        num_active=int(scene_t.get("num_active", base.scene.num_active)),
        ue_distance=float(scene_t.get("ue_distance", base.scene.ue_distance)),
        scatter_region=tuple(float(v) for v in region),
        gain_model=scene_t.get("gain_model", base.scene.gain_model),
        seed=int(scene_t.get("seed", base.scene.seed)),
        max_delay=float(scene_t.get("max_delay", ofdm.num_taps * ofdm.sample_period)),
        min_clearance=float(scene_t.get("min_clearance", base.scene.min_clearance)),
    )

    array_t = _section(data, "array")
    array_cfg = ArrayConfig(num_antennas=int(array_t.get("num_antennas", base.array_cfg.num_antennas)))

    pilot_t = _section(data, "pilot")
    sensing_t = _section(data, "sensing")
    est_t = _section(data, "estimation")
    hyper = SblHyperprior(
        a=float(est_t.get("hyper_a", 1.0)),
        b=float(est_t.get("hyper_b", 0.0)),
        c=float(est_t.get("hyper_c", 1.0)),
        d=float(est_t.get("hyper_d", 0.0)),
        noise_denominator=est_t.get("noise_denominator", "d"),
    )
    sweep_t = _section(data, "sweep")
    return SweepConfig(
        scene=scene,
        array_cfg=array_cfg,
        ofdm=ofdm,
        comb_size=int(pilot_t.get("comb_size", base.comb_size)),
        comb_offset=int(pilot_t.get("offset", base.comb_offset)),
        sigma_theta=float(sensing_t.get("sigma_theta", base.sigma_theta)),
        sigma_tau=float(sensing_t.get("sigma_tau", base.sigma_tau)),
        d_theta=int(est_t.get("d_theta", base.d_theta)),
        d_tau=int(est_t.get("d_tau", base.d_tau)),
        hyper=hyper,
        sbl_tol=float(est_t.get("sbl_tol", base.sbl_tol)),
        sbl_max_iter=int(est_t.get("sbl_max_iter", base.sbl_max_iter)),
        gamma_prune=float(est_t.get("gamma_prune", base.gamma_prune)),
        stop_scale=float(est_t.get("stop_scale", base.stop_scale)),
        wb_grid_atoms=int(est_t.get("wb_grid_atoms", base.wb_grid_atoms)),
        snr_grid_db=tuple(float(v) for v in sweep_t.get("snr_grid_db", base.snr_grid_db)),
        trials=int(sweep_t.get("trials", base.trials)),
        estimators=tuple(sweep_t.get("estimators", base.estimators)),
        master_seed=int(sweep_t.get("master_seed", base.master_seed)),
    )
