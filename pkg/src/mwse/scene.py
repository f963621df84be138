"""Scene geometry, ground-truth path parameters and erroneous sensing reports.

The scene is two-dimensional: the base station (gNB) sits at the origin with
its antenna array along the x-axis, the user (UE) is placed on the broadside
direction, and scatterers are drawn uniformly inside a rectangle in the upper
half plane.  Angles of arrival are measured against the array axis, so they
always lie in (0, pi) and broadside is pi/2.  All quantities are SI
(meters, seconds, radians).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 299792458.0

# open-interval clamp bounds for reported angles
_ANGLE_LO = np.nextafter(0.0, 1.0)
_ANGLE_HI = np.nextafter(np.pi, 0.0)


@dataclass(frozen=True)
class SceneConfig:
    """Parameters of the random scatterer scene.

    ``scatter_region`` is an axis-aligned rectangle ``(xmin, ymin, xmax, ymax)``
    in meters; it must lie strictly in the upper half plane so every angle of
    arrival falls in (0, pi).  ``max_delay`` bounds the bistatic propagation
    delay of every scatterer path (scatterers violating it are resampled) so
    that all channel taps stay inside the cyclic prefix.
    """

    num_scatterers: int
    num_active: int
    ue_distance: float
    scatter_region: tuple[float, float, float, float]
    gain_model: str = "cn01"
    seed: int = 0
    max_delay: float | None = None
    min_clearance: float = 1.0
    min_angle_separation: float = np.deg2rad(10.0)

    def __post_init__(self) -> None:
        if self.num_scatterers < 1:
            raise ValueError("num_scatterers must be positive")
        if not 1 <= self.num_active <= self.num_scatterers:
            raise ValueError("need 1 <= num_active <= num_scatterers")
        if self.ue_distance <= 0:
            raise ValueError("ue_distance must be positive")
        xmin, ymin, xmax, ymax = self.scatter_region
        if xmin >= xmax or ymin >= ymax:
            raise ValueError("scatter_region must be a nonempty rectangle")
        if ymin <= 0:
            raise ValueError("scatter_region must lie in the upper half plane")
        if self.gain_model != "cn01":
            raise ValueError(f"unknown gain_model {self.gain_model!r}")


@dataclass(frozen=True)
class Scene:
    """A realized scene: positions, the active subset and the path gains.

    Scatterers are indexed 1..L_r (index 0 is reserved for the line of sight);
    ``scatterers[i - 1]`` is the position of scatterer ``i``.  ``active_set``
    holds the indices of the scatterers that actually reflect into the
    communication channel.  ``gains`` has one entry per active path with the
    LoS gain first.
    """

    gnb_position: np.ndarray
    ue_position: np.ndarray
    scatterers: np.ndarray
    active_set: tuple[int, ...]
    gains: np.ndarray
    speed_of_light: float = SPEED_OF_LIGHT

    @property
    def num_scatterers(self) -> int:
        return self.scatterers.shape[0]

    @property
    def num_active(self) -> int:
        return len(self.active_set)


@dataclass(frozen=True)
class PathParams:
    """Gain, propagation delay and angle of arrival of one channel path."""

    gain: complex
    delay: float
    aoa: float


@dataclass(frozen=True)
class SensingReport:
    """Noisy monostatic radar view of all L_r scatterers.

    ``delays`` are round-trip delays gNB->scatterer->gNB plus Gaussian error;
    ``angles`` are scatterer angles plus Gaussian error, clamped to (0, pi).
    The LoS anchors ``los_delay``/``los_aoa`` are reported exactly.  Every
    scatterer appears, whether or not it is active in the channel.
    """

    los_delay: float
    los_aoa: float
    delays: np.ndarray
    angles: np.ndarray
    sigma_theta: float
    sigma_tau: float

    @property
    def num_scatterers(self) -> int:
        return self.delays.shape[0]


def _aoa(point: np.ndarray) -> float:
    """Angle of the origin->point ray against the +x array axis."""
    return float(np.arctan2(point[1], point[0]))


def generate_scene(config: SceneConfig, rng: np.random.Generator | None = None) -> Scene:
    """Draw a random scene.

    Scatterers are uniform over the rectangle, resampled (up to 100 attempts
    each, with up to 100 whole-scene restarts) if they come within
    ``min_clearance`` of the gNB or UE, if their bistatic delay exceeds
    ``max_delay``, or if their angle from the gNB comes within
    ``min_angle_separation`` of an already placed scatterer or of the UE
    direction.  The separation keeps scatterers resolvable by the array and
    makes nearest-angle path association meaningful under the sensing error
    level; set it to zero for plain i.i.d. placement.  The active subset is
    a uniformly random choice of ``num_active`` scatterer indices; path
    gains (LoS plus actives) are i.i.d. standard complex Gaussian.
    Deterministic for a fixed seed.
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)
    gnb = np.zeros(2)
    ue = np.array([0.0, config.ue_distance])
    xmin, ymin, xmax, ymax = config.scatter_region

    points = np.empty((config.num_scatterers, 2))
    for restart in range(100):
        angles: list[float] = [_aoa(ue - gnb)]
        placed = 0
        for i in range(config.num_scatterers):
            for attempt in range(100):
                p = np.array([rng.uniform(xmin, xmax), rng.uniform(ymin, ymax)])
                if min(np.linalg.norm(p - gnb), np.linalg.norm(p - ue)) < config.min_clearance:
                    continue
                if config.max_delay is not None:
                    delay = (np.linalg.norm(p - gnb) + np.linalg.norm(p - ue)) / SPEED_OF_LIGHT
                    if delay >= config.max_delay:
                        continue
                ang = _aoa(p - gnb)
                if config.min_angle_separation > 0 and any(
                    abs(ang - a) < config.min_angle_separation for a in angles
                ):
                    continue
                points[i] = p
                angles.append(ang)
                placed += 1
                break
            else:
                break
        if placed == config.num_scatterers:
            break
    else:
        raise ValueError(
            "could not place scatterers with the required clearance/delay/"
            "separation; enlarge scatter_region or relax the constraints"
        )

    active = rng.choice(config.num_scatterers, size=config.num_active, replace=False)
    active_set = tuple(sorted(int(a) + 1 for a in active))
    n_paths = config.num_active + 1
    gains = (rng.standard_normal(n_paths) + 1j * rng.standard_normal(n_paths)) / np.sqrt(2.0)
    return Scene(
        gnb_position=gnb,
        ue_position=ue,
        scatterers=points,
        active_set=active_set,
        gains=gains,
    )


def true_path_params(scene: Scene) -> list[PathParams]:
    """Ground-truth (gain, delay, AoA) of the LoS and every active path.

    Index 0 is the LoS path; reflected paths follow in ``active_set`` order
    with delay (|gNB->s| + |s->UE|) / c and the AoA of the gNB->s ray.
    """
    c = scene.speed_of_light
    gnb, ue = scene.gnb_position, scene.ue_position
    out = [
        PathParams(
            gain=complex(scene.gains[0]),
            delay=float(np.linalg.norm(ue - gnb)) / c,
            aoa=_aoa(ue - gnb),
        )
    ]
    for rank, idx in enumerate(scene.active_set, start=1):
        s = scene.scatterers[idx - 1]
        delay = (np.linalg.norm(s - gnb) + np.linalg.norm(s - ue)) / c
        out.append(PathParams(gain=complex(scene.gains[rank]), delay=float(delay), aoa=_aoa(s - gnb)))
    return out


def sense(
    scene: Scene,
    sigma_theta: float,
    sigma_tau: float,
    rng: np.random.Generator,
) -> SensingReport:
    """Produce the gNB's erroneous radar report of all scatterers.

    Per scatterer the round-trip delay 2|gNB->s|/c and the angle each get an
    independent N(0, sigma^2) perturbation; perturbed angles are clamped to
    the open interval (0, pi).  LoS delay/angle are exact.
    """
    if sigma_theta < 0 or sigma_tau < 0:
        raise ValueError("error standard deviations must be nonnegative")
    c = scene.speed_of_light
    gnb, ue = scene.gnb_position, scene.ue_position
    dist = np.linalg.norm(scene.scatterers - gnb, axis=1)
    true_angles = np.arctan2(
        scene.scatterers[:, 1] - gnb[1], scene.scatterers[:, 0] - gnb[0]
    )
    n = scene.num_scatterers
    delays = 2.0 * dist / c + sigma_tau * rng.standard_normal(n)
    angles = np.clip(true_angles + sigma_theta * rng.standard_normal(n), _ANGLE_LO, _ANGLE_HI)
    return SensingReport(
        los_delay=float(np.linalg.norm(ue - gnb)) / c,
        los_aoa=_aoa(ue - gnb),
        delays=delays,
        angles=angles,
        sigma_theta=float(sigma_theta),
        sigma_tau=float(sigma_tau),
    )


def translate_delay(tau_rad: float, theta: float, tau0: float, theta0: float) -> float:
    """Convert a monostatic round-trip delay into the bistatic path delay.

    Law of cosines on the triangle gNB-scatterer-UE expressed in delays: the
    scatterer sits tau_rad/2 from the gNB at angle ``theta``, the UE sits
    tau0 at angle ``theta0``, and the returned delay is the full
    gNB->scatterer->UE propagation time.  A radicand more negative than
    -1e-18 s^2 signals inconsistent inputs and raises; tinier negatives are
    rounding dust and clamp to zero.
    """
    if tau_rad < 0:
        raise ValueError("round-trip delay must be nonnegative")
    if tau0 <= 0:
        raise ValueError("LoS delay must be positive")
    half = 0.5 * tau_rad
    radicand = tau0 * tau0 + half * half - tau0 * tau_rad * np.cos(theta - theta0)
    if radicand < -1e-18:
        raise ValueError(f"inconsistent delay geometry (radicand {radicand:.3e})")
    return float(half + np.sqrt(max(radicand, 0.0)))


def translated_delays(report: SensingReport) -> np.ndarray:
    """Bistatic delay estimate of every sensed path, LoS (exact) first.

    Negative reported round-trip delays (possible under heavy sensing noise)
    are clamped to zero before translation.
    """
    out = np.empty(report.num_scatterers + 1)
    out[0] = report.los_delay
    for i in range(report.num_scatterers):
        out[i + 1] = translate_delay(
            max(float(report.delays[i]), 0.0),
            float(report.angles[i]),
            report.los_delay,
            report.los_aoa,
        )
    return out


# --- JSON round trip (harness replay format) -------------------------------

def scene_to_json(scene: Scene) -> str:
    return json.dumps(
        {
            "gnb_position": scene.gnb_position.tolist(),
            "ue_position": scene.ue_position.tolist(),
            "scatterers": scene.scatterers.tolist(),
            "active_set": list(scene.active_set),
            "gains": [[z.real, z.imag] for z in scene.gains],
            "speed_of_light": scene.speed_of_light,
        }
    )


def scene_from_json(text: str) -> Scene:
    d = json.loads(text)
    gains = np.array([complex(re, im) for re, im in d["gains"]])
    return Scene(
        gnb_position=np.array(d["gnb_position"], dtype=float),
        ue_position=np.array(d["ue_position"], dtype=float),
        scatterers=np.array(d["scatterers"], dtype=float),
        active_set=tuple(int(i) for i in d["active_set"]),
        gains=gains,
        speed_of_light=float(d["speed_of_light"]),
    )


def report_to_json(report: SensingReport) -> str:
    return json.dumps(
        {
            "los_delay": report.los_delay,
            "los_aoa": report.los_aoa,
            "entries": [[float(t), float(a)] for t, a in zip(report.delays, report.angles)],
            "sigma_theta": report.sigma_theta,
            "sigma_tau": report.sigma_tau,
        }
    )


def report_from_json(text: str) -> SensingReport:
    d = json.loads(text)
    entries = np.array(d["entries"], dtype=float).reshape(-1, 2)
    return SensingReport(
        los_delay=float(d["los_delay"]),
        los_aoa=float(d["los_aoa"]),
        delays=entries[:, 0].copy(),
        angles=entries[:, 1].copy(),
        sigma_theta=float(d["sigma_theta"]),
        sigma_tau=float(d["sigma_tau"]),
    )
