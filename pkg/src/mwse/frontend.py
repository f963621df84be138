"""Pilot scheduling, noise calibration and received pilot synthesis.

The received signal model is post-correlation: each pilot subcarrier carries
the channel vector plus circularly-symmetric complex Gaussian noise, so no
pilot sequence values appear anywhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, complex64_dump


@dataclass(frozen=True)
class PilotPattern:
    """Comb of pilot subcarriers: offset, offset + comb_size, ..."""

    comb_size: int
    offset: int
    indices: np.ndarray
    fft_size: int

    @property
    def num_pilots(self) -> int:
        return self.indices.shape[0]

    @property
    def overhead(self) -> float:
        """Fraction of subcarriers spent on pilots."""
        return self.num_pilots / self.fft_size


@dataclass(frozen=True)
class PilotObservation:
    """Received pilot vectors y[k] (one row per pilot subcarrier) plus noise variance."""

    y: np.ndarray
    pattern: PilotPattern
    noise_var: float

    @property
    def stacked(self) -> np.ndarray:
        """Concatenation of the y[k] blocks in pattern order (length M*P)."""
        return self.y.reshape(-1)

    @property
    def num_antennas(self) -> int:
        return self.y.shape[1]


def comb_pattern(fft_size: int, comb_size: int, offset: int = 0) -> PilotPattern:
    """Pilot comb {offset, offset + comb_size, ...} below ``fft_size``."""
    if comb_size < 1 or comb_size > fft_size:
        raise ValueError("comb_size must lie in [1, fft_size]")
    if not 0 <= offset < comb_size:
        raise ValueError("offset must lie in [0, comb_size)")
    indices = np.arange(offset, fft_size, comb_size)
    return PilotPattern(comb_size=comb_size, offset=offset, indices=indices, fft_size=fft_size)


def noise_var_for_snr(ch: ChannelRealization, snr_db: float) -> float:
    """Per-element noise variance hitting a target average SNR in dB.

    SNR is the channel power per antenna over the noise variance, averaged
    over all K subcarriers, so a wideband estimator that just reads the noisy
    observation lands at NMSE = 1/SNR.
    """
    power = float(np.mean(np.abs(ch.freq_response) ** 2))
    if power == 0.0:
        raise ValueError("channel is identically zero")
    return power / 10.0 ** (snr_db / 10.0)


def draw_noise(
    shape: tuple[int, ...], noise_var: float, rng: np.random.Generator
) -> np.ndarray:
    """Circularly-symmetric complex Gaussian noise, variance per complex element."""
    scale = np.sqrt(noise_var / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def observe(
    ch: ChannelRealization,
    pattern: PilotPattern,
    noise_var: float,
    rng: np.random.Generator,
) -> PilotObservation:
    """y[k] = h[k] + n[k] on the pilot subcarriers, n ~ CN(0, noise_var * I)."""
    if noise_var < 0:
        raise ValueError("noise variance must be nonnegative")
    h = ch.freq_response[pattern.indices]
    noise = draw_noise(h.shape, noise_var, rng) if noise_var > 0 else 0.0
    return PilotObservation(y=h + noise, pattern=pattern, noise_var=float(noise_var))


def observation_from_noise(
    ch: ChannelRealization,
    pattern: PilotPattern,
    noise_var: float,
    noise: np.ndarray,
) -> PilotObservation:
    """Observation with a caller-supplied full-K noise matrix.

    Lets several pilot patterns (e.g. a sparse comb and the full wideband
    grid) share one noise realization on their common subcarriers.
    """
    y = ch.freq_response[pattern.indices] + noise[pattern.indices]
    return PilotObservation(y=y, pattern=pattern, noise_var=float(noise_var))


def observation_dump(obs: PilotObservation) -> bytes:
    """JSON pattern header, newline, then the complex64 dump of the y blocks."""
    header = json.dumps(
        {
            "comb_size": obs.pattern.comb_size,
            "offset": obs.pattern.offset,
            "fft_size": obs.pattern.fft_size,
            "num_pilots": obs.pattern.num_pilots,
            "num_antennas": obs.num_antennas,
            "noise_var": obs.noise_var,
        }
    )
    return header.encode() + b"\n" + complex64_dump(obs.y)
