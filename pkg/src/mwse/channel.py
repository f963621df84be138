"""Parametric wideband channel math for a half-wavelength ULA receiver.

Builds steering vectors, pulse-shaped per-subcarrier delay responses, the
delay-tap and frequency-domain channel of a path list, and the per-subcarrier
/ stacked-pilot dictionary matrices used by the estimators.  Steering vectors
are unnormalized (unit-modulus entries); the sqrt(M / num_paths) power scale
lives only in :func:`synthesize_channel` so dictionaries stay scale free.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .scene import PathParams

PulseFn = Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class ArrayConfig:
    """Uniform linear array with fixed half-wavelength element spacing."""

    num_antennas: int
    spacing_wavelengths: float = 0.5

    def __post_init__(self) -> None:
        if self.num_antennas < 1:
            raise ValueError("num_antennas must be >= 1")


@dataclass(frozen=True)
class OfdmConfig:
    """OFDM numerology: FFT size, channel tap count, sample period, CP length."""

    fft_size: int
    num_taps: int
    sample_period: float
    cp_len: int

    def __post_init__(self) -> None:
        if not (1 <= self.num_taps <= self.cp_len <= self.fft_size):
            raise ValueError("need 1 <= num_taps <= cp_len <= fft_size")
        if self.sample_period <= 0:
            raise ValueError("sample_period must be positive")


@dataclass(frozen=True)
class ChannelRealization:
    """Frequency response h[k] (K x M) and delay-tap response h_d (N_c x M).

    The frequency response is the K-point DFT of the taps over the tap index;
    both views are populated at construction and kept consistent.
    """

    freq_response: np.ndarray
    tap_response: np.ndarray


def steering_vector(theta, num_antennas: int) -> np.ndarray:
    """ULA steering vector(s) with element m = exp(j*pi*m*cos(theta)).

    Scalar ``theta`` gives shape (M,); an array of N angles gives (M, N).
    """
    theta_arr = np.asarray(theta, dtype=float)
    m = np.arange(num_antennas)
    phase = np.multiply.outer(m, np.cos(theta_arr))
    a = np.exp(1j * np.pi * phase)
    return a


def steering_derivative(theta, num_antennas: int) -> np.ndarray:
    """d a(theta) / d theta, element m = -j*pi*m*sin(theta)*exp(j*pi*m*cos(theta))."""
    theta_arr = np.asarray(theta, dtype=float)
    m = np.arange(num_antennas)
    a = steering_vector(theta_arr, num_antennas)
    return -1j * np.pi * np.multiply.outer(m, np.sin(theta_arr)) * a


def sinc_pulse(t, sample_period: float):
    """Normalized sinc pulse sin(pi t/T)/(pi t/T) with value 1 at t = 0."""
    return np.sinc(np.asarray(t, dtype=float) / sample_period)


def sinc_pulse_derivative(t, sample_period: float):
    """Analytic time derivative of :func:`sinc_pulse`.

    In u = t/T the derivative is (cos(pi u)/u - sin(pi u)/(pi u^2)) / T, with
    the u -> 0 limit -pi^2 u / (3 T) substituted near the origin.
    """
    u = np.asarray(t, dtype=float) / sample_period
    small = np.abs(u) < 1e-7
    us = np.where(small, 1.0, u)
    main = np.cos(np.pi * us) / us - np.sin(np.pi * us) / (np.pi * us * us)
    taylor = -(np.pi ** 2) * u / 3.0
    return np.where(small, taylor, main) / sample_period


def raised_cosine_pulse(t, sample_period: float, rolloff: float = 0.4):
    """Raised-cosine pulse (time domain) for robustness experiments.

    Keeps the sinc's nulls at nonzero integer multiples of the sample period;
    the removable singularity at |t| = T/(2*rolloff) is filled analytically.
    """
    u = np.asarray(t, dtype=float) / sample_period
    denom = 1.0 - (2.0 * rolloff * u) ** 2
    singular = np.abs(denom) < 1e-9
    safe = np.where(singular, 1.0, denom)
    val = np.sinc(u) * np.cos(np.pi * rolloff * u) / safe
    limit = (np.pi / 4.0) * np.sinc(1.0 / (2.0 * rolloff))
    return np.where(singular, limit, val)


def delay_response(k: int, tau, cfg: OfdmConfig, pulse: PulseFn = sinc_pulse):
    """Per-subcarrier complex response of a delay through the pulse filter.

    Returns sum_d pulse(d*T_s - tau) * exp(-j*2*pi*k*d / K) over the N_c taps.
    ``tau`` may be a scalar or an array (elementwise result).  The d-sum is
    accumulated in fixed order so scalar and vectorized calls agree bitwise.
    """
    if not 0 <= k < cfg.fft_size:
        raise ValueError("subcarrier index out of range")
    tau_arr = np.asarray(tau, dtype=float)
    acc = np.zeros(tau_arr.shape, dtype=complex)
    for d in range(cfg.num_taps):
        phase = np.exp(-2j * np.pi * k * d / cfg.fft_size)
        acc = acc + pulse(d * cfg.sample_period - tau_arr, cfg.sample_period) * phase
    return acc if tau_arr.shape else complex(acc)


def delay_response_derivative(k: int, tau, cfg: OfdmConfig):
    """d(delay_response)/d tau for the sinc pulse.

    Equals -sum_d p'(d*T_s - tau) * exp(-j*2*pi*k*d / K).
    """
    if not 0 <= k < cfg.fft_size:
        raise ValueError("subcarrier index out of range")
    tau_arr = np.asarray(tau, dtype=float)
    acc = np.zeros(tau_arr.shape, dtype=complex)
    for d in range(cfg.num_taps):
        phase = np.exp(-2j * np.pi * k * d / cfg.fft_size)
        acc = acc - sinc_pulse_derivative(d * cfg.sample_period - tau_arr, cfg.sample_period) * phase
    return acc if tau_arr.shape else complex(acc)


def delay_response_matrix(
    ks: np.ndarray, taus: np.ndarray, cfg: OfdmConfig, pulse: PulseFn = sinc_pulse
) -> np.ndarray:
    """delay_response on a grid: entry (i, j) is subcarrier ks[i], delay taus[j]."""
    ks = np.asarray(ks)
    taus = np.asarray(taus, dtype=float)
    d = np.arange(cfg.num_taps)
    pmat = pulse(
        d[:, None] * cfg.sample_period - taus[None, :], cfg.sample_period
    )  # (N_c, N)
    phases = np.exp(-2j * np.pi * np.multiply.outer(ks, d) / cfg.fft_size)  # (P, N_c)
    return phases @ pmat.astype(complex)


def synthesize_channel(
    paths: Sequence[PathParams],
    arr: ArrayConfig,
    cfg: OfdmConfig,
    pulse: PulseFn = sinc_pulse,
) -> ChannelRealization:
    """Build the delay-tap and frequency-domain channel of a path list.

    Tap d is sqrt(M/L) * sum_l gain_l * pulse(d*T_s - tau_l) * a(theta_l); the
    frequency response is assembled directly from the per-subcarrier delay
    responses, which makes it equal to the K-point DFT of the taps by
    construction (up to rounding).
    """
    if not paths:
        raise ValueError("need at least one path")
    taus = np.array([p.delay for p in paths])
    if np.any(taus < 0) or np.any(taus >= cfg.num_taps * cfg.sample_period):
        raise ValueError("path delays must lie in [0, num_taps * sample_period)")
    thetas = np.array([p.aoa for p in paths])
    gains = np.array([p.gain for p in paths])
    scale = np.sqrt(arr.num_antennas / len(paths))

    a_mat = steering_vector(thetas, arr.num_antennas)  # (M, L)
    d = np.arange(cfg.num_taps)
    pmat = pulse(d[:, None] * cfg.sample_period - taus[None, :], cfg.sample_period)  # (N_c, L)
    taps = scale * (pmat * gains) @ a_mat.T  # (N_c, M)

    dft = np.exp(
        -2j * np.pi * np.multiply.outer(np.arange(cfg.fft_size), d) / cfg.fft_size
    )  # (K, N_c)
    bmat = dft @ pmat.astype(complex)  # (K, L)
    freq = scale * (bmat * gains) @ a_mat.T  # (K, M)
    return ChannelRealization(freq_response=freq, tap_response=taps.astype(complex))


def build_subcarrier_matrix(
    angles, delays, k: int, arr: ArrayConfig, cfg: OfdmConfig, pulse: PulseFn = sinc_pulse
) -> np.ndarray:
    """Dictionary block for one subcarrier: column i = a(angles[i]) * delay_response(k, delays[i])."""
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    delays = np.atleast_1d(np.asarray(delays, dtype=float))
    if angles.size == 0:
        raise ValueError("need at least one (angle, delay) pair")
    if angles.shape != delays.shape:
        raise ValueError("angles and delays must have the same length")
    a_mat = steering_vector(angles, arr.num_antennas)
    b = delay_response(k, delays, cfg, pulse)
    return a_mat * b[None, :]


def build_stacked_matrix(
    angles,
    delays,
    pilot_ks: Sequence[int],
    arr: ArrayConfig,
    cfg: OfdmConfig,
    pulse: PulseFn = sinc_pulse,
) -> np.ndarray:
    """Vertical stack of :func:`build_subcarrier_matrix` over the pilot subcarriers."""
    pilot_ks = list(pilot_ks)
    if not pilot_ks:
        raise ValueError("pilot subcarrier list is empty")
    if any(b <= a for a, b in zip(pilot_ks, pilot_ks[1:])):
        raise ValueError("pilot subcarriers must be strictly increasing")
    blocks = [build_subcarrier_matrix(angles, delays, k, arr, cfg, pulse) for k in pilot_ks]
    return np.vstack(blocks)


def complex64_dump(a: np.ndarray) -> bytes:
    """Row-major complex64 byte dump, the cross-implementation diff format."""
    return np.ascontiguousarray(a, dtype=np.complex64).tobytes()


def complex64_load(buf: bytes, shape: tuple[int, ...]) -> np.ndarray:
    return np.frombuffer(buf, dtype=np.complex64).reshape(shape)
