"""Monte-Carlo sweep orchestration: SNR grid x trials x estimators.

Every (snr, trial) cell derives its own random stream from the master seed
and the cell coordinates, so results are byte-identical regardless of
execution order or worker count, and any row can be replayed from its seed
alone.  Estimator failures are recorded as NaN rows and never abort a sweep.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from multiprocessing import get_context
from pathlib import Path

import numpy as np

from .channel import ArrayConfig, OfdmConfig, synthesize_channel
from .estimators import (
    DEFAULT_GAMMA_PRUNE,
    DEFAULT_MAX_ITER,
    DEFAULT_STOP_SCALE,
    DEFAULT_TOL,
    SblHyperprior,
    ideal_sensing_ls,
    nmse,
    swomp_sbl_estimate,
    wideband_ls,
    wideband_swomp,
)
from .frontend import comb_pattern, draw_noise, noise_var_for_snr, observation_from_noise
from .scene import SceneConfig, generate_scene, sense, true_path_params

log = logging.getLogger("mwse.harness")

SAMPLE_PERIOD_DEFAULT = 1.0 / 30.72e6  # 30.72 MHz sampling
ESTIMATOR_NAMES = ("swomp-sbl", "ideal-ls", "wb-ls", "wb-swomp")
CSV_FIELDS = ("snr_db", "estimator", "trial", "nmse", "seconds", "seed")


@dataclass(frozen=True)
class SweepConfig:
    scene: SceneConfig
    array_cfg: ArrayConfig
    ofdm: OfdmConfig
    comb_size: int = 16
    comb_offset: int = 0
    sigma_theta: float = np.deg2rad(3.0)
    sigma_tau: float = SAMPLE_PERIOD_DEFAULT / 6.0
    d_theta: int = 500
    d_tau: int = 50
    hyper: SblHyperprior = field(default_factory=SblHyperprior)
    sbl_tol: float = DEFAULT_TOL
    sbl_max_iter: int = DEFAULT_MAX_ITER
    gamma_prune: float = DEFAULT_GAMMA_PRUNE
    stop_scale: float = DEFAULT_STOP_SCALE
    wb_grid_atoms: int = 500
    snr_grid_db: tuple[float, ...] = (-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0)
    trials: int = 100
    estimators: tuple[str, ...] = ESTIMATOR_NAMES
    master_seed: int = 0

    def __post_init__(self) -> None:
        if not self.snr_grid_db:
            raise ValueError("snr_grid_db must be non-empty")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.estimators:
            raise ValueError("estimator list must be non-empty")
        unknown = set(self.estimators) - set(ESTIMATOR_NAMES)
        if unknown:
            raise ValueError(f"unknown estimators: {sorted(unknown)}")

    @property
    def pilot_overhead(self) -> float:
        num_pilots = len(range(self.comb_offset, self.ofdm.fft_size, self.comb_size))
        return num_pilots / self.ofdm.fft_size

    @property
    def pilot_overhead_percent(self) -> str:
        return f"{100.0 * self.pilot_overhead:.4g}%"


@dataclass(frozen=True)
class ResultRow:
    snr_db: float
    estimator: str
    trial: int
    nmse: float
    seconds: float
    seed: int


def default_config() -> SweepConfig:
    """The shipped defaults: 28 GHz numerology, 32-antenna ULA, 16-pilot comb."""
    ofdm = OfdmConfig(
        fft_size=256, num_taps=34, sample_period=SAMPLE_PERIOD_DEFAULT, cp_len=34
    )
    scene = SceneConfig(
        num_scatterers=10,
        num_active=6,
        ue_distance=100.0,
        scatter_region=(-80.0, 10.0, 80.0, 120.0),
        max_delay=ofdm.num_taps * ofdm.sample_period,
    )
    return SweepConfig(scene=scene, array_cfg=ArrayConfig(num_antennas=32), ofdm=ofdm)


def trial_seed(master_seed: int, snr_db: float, trial: int) -> int:
    """128-bit per-cell seed derived from (master seed, snr value bits, trial)."""
    snr_bits = int(np.float64(snr_db).view(np.uint64))
    ss = np.random.SeedSequence(entropy=(int(master_seed), snr_bits, int(trial)))
    s = ss.generate_state(2, np.uint64)
    return int(s[0]) | (int(s[1]) << 64)


def run_trial(
    cfg: SweepConfig,
    snr_db: float,
    trial: int,
    estimators: tuple[str, ...] | None = None,
    seed: int | None = None,
) -> list[ResultRow]:
    """One Monte-Carlo cell: scene -> channel -> report -> observation -> estimators.

    The wideband baselines see a full-band observation that reuses the pilot
    subcarriers' noise realization (fresh noise elsewhere), so all estimators
    face the same data on the comb.
    """
    if seed is None:
        seed = trial_seed(cfg.master_seed, snr_db, trial)
    rng = np.random.default_rng(seed)

    scene = generate_scene(cfg.scene, rng)
    paths = true_path_params(scene)
    ch = synthesize_channel(paths, cfg.array_cfg, cfg.ofdm)
    report = sense(scene, cfg.sigma_theta, cfg.sigma_tau, rng)
    noise_var = noise_var_for_snr(ch, snr_db)
    noise = draw_noise((cfg.ofdm.fft_size, cfg.array_cfg.num_antennas), noise_var, rng)

    comb = comb_pattern(cfg.ofdm.fft_size, cfg.comb_size, cfg.comb_offset)
    full = comb_pattern(cfg.ofdm.fft_size, 1, 0)
    pilot_obs = observation_from_noise(ch, comb, noise_var, noise)
    full_obs = observation_from_noise(ch, full, noise_var, noise)

    rows = []
    for name in estimators if estimators is not None else cfg.estimators:
        t0 = time.perf_counter()
        try:
            if name == "swomp-sbl":
                est = swomp_sbl_estimate(
                    pilot_obs,
                    report,
                    cfg.array_cfg,
                    cfg.ofdm,
                    d_theta=cfg.d_theta,
                    d_tau=cfg.d_tau,
                    hyper=cfg.hyper,
                    tol=cfg.sbl_tol,
                    max_iter=cfg.sbl_max_iter,
                    gamma_prune=cfg.gamma_prune,
                    stop_scale=cfg.stop_scale,
                )
            elif name == "ideal-ls":
                est = ideal_sensing_ls(pilot_obs, paths, cfg.array_cfg, cfg.ofdm)
            elif name == "wb-ls":
                est = wideband_ls(full_obs)
            elif name == "wb-swomp":
                est = wideband_swomp(
                    full_obs, cfg.array_cfg, num_atoms=cfg.wb_grid_atoms,
                    stop_scale=cfg.stop_scale,
                )
            else:
                raise ValueError(f"unknown estimator {name!r}")
            value = nmse(est, ch)
        except Exception:
            log.warning(
                "estimator %s failed at snr=%s trial=%d", name, snr_db, trial,
                exc_info=True,
            )
            value = float("nan")
        rows.append(
            ResultRow(
                snr_db=float(snr_db),
                estimator=name,
                trial=int(trial),
                nmse=value,
                seconds=time.perf_counter() - t0,
                seed=seed,
            )
        )
    return rows


def _run_cell(args) -> list[ResultRow]:
    cfg, snr_db, trial = args
    return run_trial(cfg, snr_db, trial)


def config_hash(cfg: SweepConfig) -> str:
    blob = json.dumps(asdict(cfg), sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def rows_to_csv(cfg: SweepConfig, rows: list[ResultRow]) -> str:
    """Row-level CSV with a comment header carrying the config hash."""
    buf = io.StringIO()
    buf.write(f"# mwse config_hash={config_hash(cfg)} pilot_overhead={cfg.pilot_overhead_percent}\n")
    buf.write(",".join(CSV_FIELDS) + "\n")
    for r in rows:
        buf.write(
            f"{r.snr_db!r},{r.estimator},{r.trial},{r.nmse!r},{r.seconds:.6f},{r.seed}\n"
        )
    return buf.getvalue()


def parse_row(line: str) -> ResultRow:
    parts = next(csv.reader([line.strip()]))
    if len(parts) != len(CSV_FIELDS):
        raise ValueError(f"expected {len(CSV_FIELDS)} CSV fields, got {len(parts)}")
    return ResultRow(
        snr_db=float(parts[0]),
        estimator=parts[1],
        trial=int(parts[2]),
        nmse=float(parts[3]),
        seconds=float(parts[4]),
        seed=int(parts[5]),
    )


def aggregate(rows: list[ResultRow]) -> list[dict]:
    """Mean and standard error of NMSE per (snr, estimator); NaN rows counted apart."""
    cells: dict[tuple[float, str], list[float]] = {}
    for r in rows:
        cells.setdefault((r.snr_db, r.estimator), []).append(r.nmse)
    out = []
    for (snr_db, estimator), values in sorted(cells.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        arr = np.array(values)
        ok = arr[~np.isnan(arr)]
        mean = float(np.mean(ok)) if ok.size else float("nan")
        stderr = float(np.std(ok, ddof=1) / np.sqrt(ok.size)) if ok.size > 1 else float("nan")
        out.append(
            {
                "snr_db": snr_db,
                "estimator": estimator,
                "trials": int(arr.size),
                "failed": int(arr.size - ok.size),
                "nmse_mean": mean,
                "nmse_stderr": stderr,
                "nmse_mean_db": 10.0 * np.log10(mean) if mean > 0 else float("-inf"),
            }
        )
    return out


def aggregate_to_csv(agg: list[dict]) -> str:
    buf = io.StringIO()
    cols = ["snr_db", "estimator", "trials", "failed", "nmse_mean", "nmse_stderr", "nmse_mean_db"]
    buf.write(",".join(cols) + "\n")
    for row in agg:
        buf.write(",".join(str(row[c]) for c in cols) + "\n")
    return buf.getvalue()


def sweep(
    cfg: SweepConfig,
    out_dir: str | Path,
    svg: bool = False,
    workers: int = 1,
) -> dict[str, Path]:
    """Run every (snr, trial) cell and write row-level / aggregated CSVs.

    Output files are opened up front so an unwritable destination fails
    before any computation starts.  Rows are sorted by (snr, trial) with the
    configured estimator order inside each cell, making the row CSV
    independent of scheduling.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows_path = out / "results.csv"
    agg_path = out / "results_aggregated.csv"
    svg_path = out / "nmse_vs_snr.svg"
    handles = [rows_path.open("w"), agg_path.open("w")]
    if svg:
        handles.append(svg_path.open("w"))

    log.info(
        "sweep: %d SNR points x %d trials, estimators=%s, pilot overhead %s",
        len(cfg.snr_grid_db), cfg.trials, ",".join(cfg.estimators),
        cfg.pilot_overhead_percent,
    )
    cells = [
        (cfg, snr_db, trial)
        for snr_db in cfg.snr_grid_db
        for trial in range(cfg.trials)
    ]
    t0 = time.perf_counter()
    if workers <= 1:
        results = [_run_cell(c) for c in cells]
    else:
        with ProcessPoolExecutor(
            max_workers=workers, mp_context=get_context("spawn")
        ) as pool:
            results = list(pool.map(_run_cell, cells, chunksize=1))
    rows = [r for cell_rows in results for r in cell_rows]
    order = {name: i for i, name in enumerate(cfg.estimators)}
    rows.sort(key=lambda r: (r.snr_db, r.trial, order[r.estimator]))
    log.info("sweep finished in %.1f s (%d rows)", time.perf_counter() - t0, len(rows))

    handles[0].write(rows_to_csv(cfg, rows))
    agg = aggregate(rows)
    handles[1].write(aggregate_to_csv(agg))
    produced = {"rows": rows_path, "aggregated": agg_path}
    if svg:
        handles[2].write(render_svg(agg))
        produced["svg"] = svg_path
    for h in handles:
        h.close()
    return produced


def replay_row(cfg: SweepConfig, line: str) -> tuple[ResultRow, ResultRow]:
    """Re-run the trial behind one CSV row; returns (original, replayed)."""
    row = parse_row(line)
    rows = run_trial(cfg, row.snr_db, row.trial, estimators=(row.estimator,), seed=row.seed)
    return row, rows[0]


# ---------------------------------------------------------------------------
# SVG chart
# ---------------------------------------------------------------------------

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2")


def render_svg(agg: list[dict], width: int = 640, height: int = 420) -> str:
    """Minimal line chart: mean NMSE in dB against SNR in dB, one polyline per estimator."""
    series: dict[str, list[tuple[float, float]]] = {}
    for row in agg:
        if np.isfinite(row["nmse_mean_db"]):
            series.setdefault(row["estimator"], []).append(
                (row["snr_db"], row["nmse_mean_db"])
            )
    if not series:
        return "<svg xmlns='http://www.w3.org/2000/svg'/>"
    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts]
    x0, x1 = min(xs), max(xs) or 1.0
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    pad = 50.0
    sx = lambda x: pad + (x - x0) / (x1 - x0) * (width - 2 * pad)
    sy = lambda y: height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

    parts = [
        f"<svg xmlns='http://www.w3.org/2000/svg' width='{width}' height='{height}' "
        f"viewBox='0 0 {width} {height}' font-family='sans-serif' font-size='11'>",
        f"<rect width='{width}' height='{height}' fill='white'/>",
        f"<line x1='{pad}' y1='{height - pad}' x2='{width - pad}' y2='{height - pad}' stroke='black'/>",
        f"<line x1='{pad}' y1='{pad}' x2='{pad}' y2='{height - pad}' stroke='black'/>",
        f"<text x='{width / 2:.1f}' y='{height - 12}' text-anchor='middle'>SNR [dB]</text>",
        f"<text x='14' y='{height / 2:.1f}' text-anchor='middle' "
        f"transform='rotate(-90 14 {height / 2:.1f})'>NMSE [dB]</text>",
    ]
    for x in sorted(set(xs)):
        parts.append(
            f"<text x='{sx(x):.1f}' y='{height - pad + 16:.1f}' text-anchor='middle'>{x:g}</text>"
        )
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = y0 + frac * (y1 - y0)
        parts.append(
            f"<text x='{pad - 6:.1f}' y='{sy(y) + 4:.1f}' text-anchor='end'>{y:.1f}</text>"
        )
    for i, (name, pts) in enumerate(sorted(series.items())):
        color = _PALETTE[i % len(_PALETTE)]
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in sorted(pts))
        parts.append(
            f"<polyline fill='none' stroke='{color}' stroke-width='1.5' points='{coords}'/>"
        )
        parts.append(
            f"<text x='{width - pad + 4:.1f}' y='{pad + 14 * i + 10:.1f}' fill='{color}'>{name}</text>"
        )
    parts.append("</svg>")
    return "\n".join(parts)
