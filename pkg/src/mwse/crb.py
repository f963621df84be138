"""Fisher information blocks and Cramer-Rao bounds for angles and gains.

The estimation model treats the gains as complex Gaussian hidden variables
with per-path precisions, the noise precision as Gamma-distributed, and the
angles/delays as deterministic unknowns.  Information about the random
parameters is evaluated with plug-in expectations at the supplied precision
estimates.

Two sign/structure conventions are available:

* ``negated-hessian`` (default): every block is the negated expected Hessian
  of the joint log density, which makes the assembled matrix Hermitian
  positive semidefinite and agrees with finite differences of the expected
  log density.  Under the independent-gain prior the angle and delay blocks
  come out diagonal and the angle-noise / delay-noise couplings vanish.
* ``as-printed``: the literal block formulas with their published signs and
  powers, kept for side-by-side comparison; the result is generally
  indefinite and the full (non-diagonal) angle block makes duplicated paths
  detectably singular.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import (
    ArrayConfig,
    OfdmConfig,
    delay_response,
    delay_response_derivative,
    steering_derivative,
    steering_vector,
)

CONVENTIONS = ("negated-hessian", "as-printed")
COND_LIMIT = 1e12


@dataclass(frozen=True)
class FimInput:
    """Evaluation point for the information blocks.

    ``gamma_hat`` and ``zeta_hat`` are the plug-in values of the gain
    precisions and noise precision; ``hyper_a``/``hyper_c`` are the Gamma
    shape constants of their priors.
    """

    angles: np.ndarray
    delays: np.ndarray
    gamma_hat: np.ndarray
    zeta_hat: float
    pilot_subcarriers: np.ndarray
    array_cfg: ArrayConfig
    ofdm_cfg: OfdmConfig
    hyper_a: float = 1.0
    hyper_c: float = 1.0

    def __post_init__(self) -> None:
        if np.any(np.asarray(self.gamma_hat) <= 0) or self.zeta_hat <= 0:
            raise ValueError("plug-in precisions must be strictly positive")
        if len(self.angles) != len(self.delays) or len(self.angles) != len(self.gamma_hat):
            raise ValueError("angles, delays and gamma_hat must have equal length")

    @property
    def num_paths(self) -> int:
        return len(self.angles)


@dataclass(frozen=True)
class FimBlocks:
    """All information blocks, including the analytically zero ones."""

    j_theta_theta: np.ndarray  # (L, L)
    j_theta_zeta: np.ndarray   # (L,)
    j_theta_tau: np.ndarray    # (L, L)
    j_gamma_gamma: np.ndarray  # (L, L)
    j_zeta_zeta: float
    j_alpha_alpha: np.ndarray  # (L, L) complex
    j_zeta_tau: np.ndarray     # (L,)
    j_tau_tau: np.ndarray      # (L, L)
    j_theta_alpha: np.ndarray  # (L, L) zeros
    j_theta_gamma: np.ndarray  # (L, L) zeros
    j_alpha_gamma: np.ndarray  # (L, L) zeros
    j_alpha_zeta: np.ndarray   # (L,) zeros
    j_alpha_tau: np.ndarray    # (L, L) zeros
    j_gamma_zeta: np.ndarray   # (L,) zeros
    j_gamma_tau: np.ndarray    # (L, L) zeros
    convention: str
    num_paths: int
    num_pilot_elements: int    # M * P


@dataclass(frozen=True)
class CrbResult:
    """Schur-complement variance bounds for angles and gains."""

    crb_theta: np.ndarray | None
    crb_alpha: np.ndarray | None
    identifiable: bool
    cond_theta_pivot: float
    cond_alpha_pivot: float


def fim_blocks(inp: FimInput, convention: str = "negated-hessian") -> FimBlocks:
    """Evaluate the information blocks at the plug-in point.

    Per-subcarrier contributions are summed over the pilot comb (information
    is additive across independent pilot subcarriers); prior contributions
    enter once.
    """
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}")
    L = inp.num_paths
    m_ant = inp.array_cfg.num_antennas
    gamma = np.asarray(inp.gamma_hat, dtype=float)
    inv_gamma = 1.0 / gamma
    zeta = float(inp.zeta_hat)
    ks = np.asarray(inp.pilot_subcarriers, dtype=int)
    mp = m_ant * ks.size

    a_mat = steering_vector(inp.angles, m_ant)        # (M, L)
    d_mat = steering_derivative(inp.angles, m_ant)    # (M, L)
    gram_dd = d_mat.conj().T @ d_mat
    gram_aa = a_mat.conj().T @ a_mat
    gram_da = d_mat.conj().T @ a_mat
    gram_ad = a_mat.conj().T @ d_mat

    # per-pilot beta vectors and their tau-derivatives, stacked (P, L)
    betas = np.stack([delay_response(k, inp.delays, inp.ofdm_cfg) for k in ks])
    dbetas = np.stack([delay_response_derivative(k, inp.delays, inp.ofdm_cfg) for k in ks])

    # sum_k of the per-path quadratic beta forms
    bb = betas.conj().T @ betas            # sum_k outer(conj(beta_k), beta_k)
    db_db = dbetas.conj().T @ dbetas       # same with derivatives
    b_db = betas.conj().T @ dbetas         # conj(beta) x dbeta cross terms
    db_b = dbetas.conj().T @ betas         # conj(dbeta) x beta cross terms

    # theta-zeta uses the printed diag(Re{.}) extraction in both conventions;
    # for the half-wavelength ULA the diagonal of D^H A is purely imaginary,
    # so this block is numerically zero either way.
    j_theta_zeta = np.real(np.diag(gram_da)) * np.real(np.diag(bb)) * inv_gamma

    zeros_mat = np.zeros((L, L))
    zeros_vec = np.zeros(L)

    if convention == "negated-hessian":
        j_theta_theta = np.diag(
            2.0 * zeta * np.real(np.diag(gram_dd)) * np.real(np.diag(bb)) * inv_gamma
        )
        j_tau_tau = np.diag(
            2.0 * zeta * np.real(np.diag(gram_aa)) * np.real(np.diag(db_db)) * inv_gamma
        )
        j_theta_tau = np.diag(
            2.0 * zeta * np.real(np.diag(gram_da) * np.diag(b_db)) * inv_gamma
        )
        j_alpha_alpha = np.diag(gamma.astype(complex)) + zeta * (gram_aa * bb)
        j_gamma_gamma = np.diag(inp.hyper_a * inv_gamma**2)
        j_zeta_zeta = (mp + inp.hyper_c - 1.0) / zeta**2
        j_zeta_tau = zeros_vec.astype(complex)
    else:
        j_theta_theta = zeta * (gram_dd * bb) * inv_gamma[None, :]
        j_tau_tau = zeta * (gram_aa * db_db) * inv_gamma[None, :]
        j_theta_tau = zeta * (gram_ad * db_b) * inv_gamma[None, :]
        j_alpha_alpha = -np.diag(gamma.astype(complex)) - zeta * (gram_aa * bb)
        j_gamma_gamma = np.diag((inp.hyper_a - 2.0) * inv_gamma)
        j_zeta_zeta = -mp / zeta**2 + (inp.hyper_c - 1.0) / zeta
        j_zeta_tau = np.diag(gram_aa).real * np.diag(db_b) * inv_gamma

    return FimBlocks(
        j_theta_theta=j_theta_theta,
        j_theta_zeta=j_theta_zeta,
        j_theta_tau=j_theta_tau,
        j_gamma_gamma=j_gamma_gamma,
        j_zeta_zeta=float(j_zeta_zeta),
        j_alpha_alpha=j_alpha_alpha,
        j_zeta_tau=j_zeta_tau,
        j_tau_tau=j_tau_tau,
        j_theta_alpha=zeros_mat.copy(),
        j_theta_gamma=zeros_mat.copy(),
        j_alpha_gamma=zeros_mat.copy(),
        j_alpha_zeta=zeros_vec.copy(),
        j_alpha_tau=zeros_mat.copy(),
        j_gamma_zeta=zeros_vec.copy(),
        j_gamma_tau=zeros_mat.copy(),
        convention=convention,
        num_paths=L,
        num_pilot_elements=mp,
    )


def assemble_fim(blocks: FimBlocks) -> np.ndarray:
    """Place the blocks in the [theta, alpha, gamma, zeta, tau] layout and symmetrize."""
    L = blocks.num_paths
    n = 4 * L + 1
    s_theta = slice(0, L)
    s_alpha = slice(L, 2 * L)
    s_gamma = slice(2 * L, 3 * L)
    i_zeta = 3 * L
    s_tau = slice(3 * L + 1, n)

    for name in ("j_theta_theta", "j_theta_tau", "j_gamma_gamma", "j_alpha_alpha", "j_tau_tau"):
        if getattr(blocks, name).shape != (L, L):
            raise ValueError(f"block {name} has inconsistent dimensions")
    if blocks.j_theta_zeta.shape != (L,) or blocks.j_zeta_tau.shape != (L,):
        raise ValueError("vector blocks have inconsistent dimensions")

    fim = np.zeros((n, n), dtype=complex)
    fim[s_theta, s_theta] = blocks.j_theta_theta
    fim[s_theta, i_zeta] = blocks.j_theta_zeta
    fim[i_zeta, s_theta] = np.conj(blocks.j_theta_zeta)
    fim[s_theta, s_tau] = blocks.j_theta_tau
    fim[s_tau, s_theta] = blocks.j_theta_tau.conj().T
    fim[s_alpha, s_alpha] = blocks.j_alpha_alpha
    fim[s_gamma, s_gamma] = blocks.j_gamma_gamma
    fim[i_zeta, i_zeta] = blocks.j_zeta_zeta
    fim[i_zeta, s_tau] = blocks.j_zeta_tau
    fim[s_tau, i_zeta] = np.conj(blocks.j_zeta_tau)
    fim[s_tau, s_tau] = blocks.j_tau_tau
    return 0.5 * (fim + fim.conj().T)


def _cond(mat: np.ndarray) -> float:
    try:
        return float(np.linalg.cond(mat))
    except np.linalg.LinAlgError:
        return float("inf")


def crb_theta_alpha(fim: np.ndarray, num_paths: int) -> CrbResult:
    """Bounds on angle and gain variances via the block Schur complement.

    The angle bound removes the nuisance coupling to the noise precision and
    the delays; the gain bound is the inverse of the gain block.  When either
    pivot (or the nuisance pivot itself) is numerically singular the result
    is flagged non-identifiable and the bounds are left unset.
    """
    L = num_paths
    n = 4 * L + 1
    if fim.shape != (n, n):
        raise ValueError("FIM shape does not match num_paths")
    s_theta = slice(0, L)
    s_alpha = slice(L, 2 * L)
    nuis = np.r_[3 * L, np.arange(3 * L + 1, n)]  # zeta then taus

    j_tt = fim[s_theta, s_theta]
    j_aa = fim[s_alpha, s_alpha]
    b_mat = fim[s_theta, :][:, nuis]
    f_mat = fim[np.ix_(nuis, nuis)]

    cond_f = _cond(f_mat)
    if not np.isfinite(cond_f) or cond_f >= COND_LIMIT:
        return CrbResult(None, None, False, float("inf"), _cond(j_aa))

    schur = j_tt - b_mat @ np.linalg.solve(f_mat, b_mat.conj().T)
    cond_theta = _cond(schur)
    cond_alpha = _cond(j_aa)
    identifiable = (
        np.isfinite(cond_theta)
        and np.isfinite(cond_alpha)
        and cond_theta < COND_LIMIT
        and cond_alpha < COND_LIMIT
    )
    if not identifiable:
        return CrbResult(None, None, False, cond_theta, cond_alpha)
    crb_theta = np.real(np.diag(np.linalg.inv(schur)))
    crb_alpha = np.real(np.diag(np.linalg.inv(j_aa)))
    return CrbResult(crb_theta, crb_alpha, True, cond_theta, cond_alpha)


def dictionary_rank(omega: np.ndarray) -> int:
    """Numerical rank of a stacked dictionary (identifiability diagnostic)."""
    return int(np.linalg.matrix_rank(omega))
