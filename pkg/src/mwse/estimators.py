"""Two-stage greedy + Bayesian channel estimator and the wideband baselines.

Stage one runs a simultaneous-weighting orthogonal matching pursuit (SWOMP)
over an angle dictionary built from the sensing report: each sensed path
contributes a fine local grid of steering atoms around its reported angle.
Stage two refines delays and gains by sparse Bayesian learning (SBL): the
selected angles get per-path delay grids centered on the translated radar
delays, and an EM loop learns per-column precisions, the noise precision and
the posterior over the stacked-pilot dictionary.

Baselines: least squares on the true path parameters (``ideal-ls``),
per-subcarrier readout of a full-band observation (``wb-ls``), and SWOMP with
a uniform angle dictionary on the full band (``wb-swomp``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .channel import (
    ArrayConfig,
    ChannelRealization,
    OfdmConfig,
    build_stacked_matrix,
    delay_response_matrix,
    steering_vector,
)
from .frontend import PilotObservation
from .scene import PathParams, SensingReport, translate_delay

_ANGLE_LO = np.nextafter(0.0, 1.0)
_ANGLE_HI = np.nextafter(np.pi, 0.0)

DEFAULT_STOP_SCALE = 1.0
DEFAULT_GAMMA_PRUNE = 1e8
DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 200


# ---------------------------------------------------------------------------
# angle dictionaries
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AngleGrid:
    """Flattened angle dictionary with per-atom parent-path bookkeeping."""

    angles: np.ndarray       # (n_atoms,) grid angles in (0, pi)
    atom_paths: np.ndarray   # (n_atoms,) index of the sensed path that owns the atom
    atoms: np.ndarray        # (M, n_atoms) steering matrix
    path_angles: np.ndarray  # (n_paths,) sensed center angles, LoS first
    grid_size: int

    @property
    def num_atoms(self) -> int:
        return self.angles.shape[0]

    @property
    def num_paths(self) -> int:
        return self.path_angles.shape[0]


def _local_grid(center: float, sigma: float, size: int) -> np.ndarray:
    """size points from center - 2*sigma stepping 4*sigma/size (degenerate: the center)."""
    if sigma == 0.0 or size == 1:
        return np.array([center])
    step = 4.0 * sigma / size
    return center - 2.0 * sigma + step * np.arange(size)


def sensing_angle_grid(report: SensingReport, grid_size: int, arr: ArrayConfig) -> AngleGrid:
    """Angle dictionary around every sensed path (LoS included), clamped to (0, pi).

    With a zero angle error the per-path window collapses to a single atom at
    the reported angle.
    """
    if grid_size < 1:
        raise ValueError("grid_size must be >= 1")
    centers = np.concatenate(([report.los_aoa], report.angles))
    pieces = [
        np.clip(_local_grid(float(c), report.sigma_theta, grid_size), _ANGLE_LO, _ANGLE_HI)
        for c in centers
    ]
    angles = np.concatenate(pieces)
    atom_paths = np.concatenate([np.full(len(p), i) for i, p in enumerate(pieces)])
    return AngleGrid(
        angles=angles,
        atom_paths=atom_paths,
        atoms=steering_vector(angles, arr.num_antennas),
        path_angles=centers,
        grid_size=grid_size,
    )


def uniform_angle_grid(num_atoms: int, arr: ArrayConfig) -> AngleGrid:
    """Uniform dictionary over (0, pi): midpoints with spacing pi/num_atoms."""
    if num_atoms < 1:
        raise ValueError("num_atoms must be >= 1")
    angles = (np.arange(num_atoms) + 0.5) * np.pi / num_atoms
    return AngleGrid(
        angles=angles,
        atom_paths=np.arange(num_atoms),
        atoms=steering_vector(angles, arr.num_antennas),
        path_angles=angles,
        grid_size=1,
    )


# ---------------------------------------------------------------------------
# stage one: SWOMP
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SwompResult:
    selected_angles: np.ndarray  # (L',) refined angles in selection order
    atom_indices: np.ndarray     # (L',) dictionary columns selected
    path_indices: np.ndarray     # (L',) nearest sensed path per selected angle
    residual_energy: float       # total squared residual after the last projection
    iterations: int

    @property
    def num_selected(self) -> int:
        return self.atom_indices.shape[0]


def swomp_select(
    obs: PilotObservation, grid: AngleGrid, stop_scale: float = DEFAULT_STOP_SCALE
) -> SwompResult:
    """Greedy multiple-measurement-vector pursuit over the angle dictionary.

    Each iteration picks the unselected atom with the largest correlation
    energy summed across the pilot subcarriers, jointly least-squares-projects
    every y[k] onto the selected atoms and updates the residuals.  Stops once
    the residual mean square per element drops to ``stop_scale`` times the
    noise variance, or after one iteration per sensed path.  Selected angles
    are then associated with their nearest sensed angle.
    """
    y_mat = obs.y.T  # (M, n_k)
    n_elems = y_mat.size
    sigma2 = obs.noise_var
    cap = grid.num_paths

    residual = y_mat
    res_energy = float(np.sum(np.abs(residual) ** 2))
    selected: list[int] = []
    while len(selected) < cap and res_energy / n_elems > stop_scale * sigma2:
        corr = grid.atoms.conj().T @ residual  # (n_atoms, n_k)
        scores = np.sum(np.abs(corr) ** 2, axis=1)
        scores[selected] = -1.0
        best = int(np.argmax(scores))
        selected.append(best)
        sub = grid.atoms[:, selected]
        coef, *_ = np.linalg.lstsq(sub, y_mat, rcond=None)
        residual = y_mat - sub @ coef
        res_energy = float(np.sum(np.abs(residual) ** 2))

    idx = np.array(selected, dtype=int)
    angles = grid.angles[idx] if idx.size else np.empty(0)
    assoc = np.array(
        [int(np.argmin(np.abs(grid.path_angles - ang))) for ang in angles], dtype=int
    )
    return SwompResult(
        selected_angles=angles,
        atom_indices=idx,
        path_indices=assoc,
        residual_energy=res_energy,
        iterations=len(selected),
    )


# ---------------------------------------------------------------------------
# delay refinement dictionary
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StackedDictionary:
    """Stacked-pilot dictionary plus the (angle, delay) metadata per column."""

    omega: np.ndarray            # (M*P, N) stacked dictionary
    col_angles: np.ndarray       # (N,)
    col_delays: np.ndarray       # (N,)
    col_paths: np.ndarray        # (N,) index into the selected-path list
    delay_grids: list[np.ndarray] = field(repr=False, default_factory=list)
    pilot_subcarriers: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=int))

    @property
    def num_columns(self) -> int:
        return self.omega.shape[1]


def delay_refinement_dictionary(
    result: SwompResult,
    report: SensingReport,
    grid_size: int,
    pilot_ks,
    arr: ArrayConfig,
    cfg: OfdmConfig,
) -> StackedDictionary:
    """Per selected path, a local delay grid around its translated radar delay.

    The LoS path uses the exact LoS delay as its center; scatterer paths
    translate their sensed round-trip delay through the law of cosines using
    the refined angle SWOMP produced for them (the refined angle keeps the
    translation error on the order of the radar delay error, which the
    +-2 sigma_tau grid window is sized for).  Each path block repeats the
    refined angle over its delay grid; negative reported round-trip delays
    and negative grid delays clamp to zero.  With zero delay error the grid
    collapses to the center point.
    """
    if result.num_selected < 1:
        raise ValueError("need at least one selected path")
    angles, delays, owners, grids = [], [], [], []
    for i in range(result.num_selected):
        path = result.path_indices[i]
        if path == 0:
            center = report.los_delay
        else:
            center = translate_delay(
                max(float(report.delays[path - 1]), 0.0),
                float(result.selected_angles[i]),
                report.los_delay,
                report.los_aoa,
            )
        grid = np.maximum(_local_grid(float(center), report.sigma_tau, grid_size), 0.0)
        grids.append(grid)
        angles.append(np.full(grid.size, result.selected_angles[i]))
        delays.append(grid)
        owners.append(np.full(grid.size, i))
    col_angles = np.concatenate(angles)
    col_delays = np.concatenate(delays)
    omega = build_stacked_matrix(col_angles, col_delays, list(pilot_ks), arr, cfg)
    return StackedDictionary(
        omega=omega,
        col_angles=col_angles,
        col_delays=col_delays,
        col_paths=np.concatenate(owners),
        delay_grids=grids,
        pilot_subcarriers=np.asarray(list(pilot_ks), dtype=int),
    )


# ---------------------------------------------------------------------------
# stage two: SBL via EM
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SblHyperprior:
    """Gamma hyperprior constants for the precisions and the noise precision.

    ``noise_denominator`` picks which constant enters the noise update's
    denominator offset; the Gamma-prior pattern implies the rate constant
    ``d`` and that is the default (under the uninformative defaults the two
    choices coincide).
    """

    a: float = 1.0
    b: float = 0.0
    c: float = 1.0
    d: float = 0.0
    noise_denominator: str = "d"

    def __post_init__(self) -> None:
        if 2 * self.a - 1 <= 0 or 2 * self.c - 1 <= 0:
            raise ValueError("need a > 1/2 and c > 1/2 for positive precisions")
        if self.noise_denominator not in ("c", "d"):
            raise ValueError("noise_denominator must be 'c' or 'd'")


@dataclass
class EmIteration:
    """Snapshot of one EM iteration (hyperparameters entering its E-step)."""

    gamma: np.ndarray
    zeta: float
    mean: np.ndarray
    sigma_diag: np.ndarray
    log_evidence: float
    sigma: np.ndarray | None = None


@dataclass
class SblPosterior:
    mean: np.ndarray          # posterior mean, pruned columns zeroed
    covariance: np.ndarray    # posterior covariance of the final E-step
    gamma: np.ndarray         # final per-column precisions
    zeta: float               # final noise precision
    hyper: SblHyperprior
    log_evidence: list[float]
    iterations: int
    pruned: np.ndarray        # boolean mask of zeroed columns
    history: list[EmIteration] | None = None


def _chol_with_jitter(c_mat: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor, retrying once with trace-scaled jitter."""
    try:
        return sla.cholesky(c_mat, lower=True, check_finite=False)
    except sla.LinAlgError:
        n = c_mat.shape[0]
        jitter = 1e-12 * float(np.real(np.trace(c_mat))) / n
        bumped = c_mat + jitter * np.eye(n)
        try:
            return sla.cholesky(bumped, lower=True, check_finite=False)
        except sla.LinAlgError as exc:
            raise np.linalg.LinAlgError(
                "posterior covariance solve failed even with jitter"
            ) from exc


def _tri_inv(chol: np.ndarray) -> np.ndarray:
    """Inverse of a lower-triangular Cholesky factor via LAPACK trtri."""
    (trtri,) = sla.get_lapack_funcs(("trtri",), (chol,))
    inv, info = trtri(chol, lower=1)
    if info != 0:
        raise np.linalg.LinAlgError("triangular inversion failed")
    return inv


def _regularized_ls(gram: np.ndarray, g_vec: np.ndarray) -> np.ndarray:
    """Ridge-regularized least squares initializer for the EM mean."""
    n = gram.shape[0]
    lam = 1e-6 * float(np.real(np.trace(gram))) / max(n, 1)
    return np.linalg.solve(gram + lam * np.eye(n), g_vec)


def _regularized_ls_thin(thin: np.ndarray, g_vec: np.ndarray) -> np.ndarray:
    """Same initializer evaluated through a thin Gram factor (T^H Tized)."""
    r, n = thin.shape
    lam = 1e-6 * float(np.sum(np.abs(thin) ** 2)) / max(n, 1)
    core = lam * np.eye(r) + thin @ thin.conj().T
    return (g_vec - thin.conj().T @ np.linalg.solve(core, thin @ g_vec)) / lam


def _thin_gram_factor(dictionary: StackedDictionary) -> np.ndarray:
    """Exact thin factor T with T^H T = Omega^H Omega, one row per (pilot, path).

    Every column of a path block is that path's steering vector scaled by a
    per-subcarrier delay response, so per pilot k the block Psi_k factors as
    A_u B_k with A_u holding the distinct path steering vectors.  A reduced
    QR of A_u replaces it by its triangular factor, shrinking the row count
    from M*P to P * num_paths without changing the Gram matrix.  The delay
    responses are read off the dictionary itself: the first ULA element is
    exactly 1, so row k*M of Omega is the beta vector of pilot block k.
    """
    n_paths = int(dictionary.col_paths.max()) + 1
    first_cols = [int(np.argmax(dictionary.col_paths == p)) for p in range(n_paths)]
    path_angles = dictionary.col_angles[first_cols]
    num_pilots = len(dictionary.pilot_subcarriers)
    m_ant = dictionary.omega.shape[0] // num_pilots
    a_u = steering_vector(path_angles, m_ant)
    r_fac = np.linalg.qr(a_u, mode="r")
    blocks = r_fac[:, dictionary.col_paths]
    pieces = [
        blocks * dictionary.omega[i * m_ant, :][None, :] for i in range(num_pilots)
    ]
    return np.vstack(pieces)


def sbl_em(
    obs,
    dictionary,
    hyper: SblHyperprior = SblHyperprior(),
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    gamma_prune: float = DEFAULT_GAMMA_PRUNE,
    noise_var: float | None = None,
    record_history: bool = False,
    method: str = "auto",
) -> SblPosterior:
    """Type-II maximum-likelihood estimation of the sparse gain vector.

    Each EM iteration evaluates the Gaussian posterior at the current
    hyperparameters,

        Sigma_y = (1/zeta) I + Omega Gamma^{-1} Omega^H,
        Sigma   = Gamma^{-1} - Gamma^{-1} Omega^H Sigma_y^{-1} Omega Gamma^{-1},
        mean    = zeta * Sigma Omega^H y,

    then re-estimates the hyperparameters from posterior second moments:
    gamma_i = (2a-1) / (|mean_i|^2 + Sigma_ii + 2b), and the noise precision
    zeta from the expected residual power per element (residual norm plus
    trace(Omega Sigma Omega^H)).  The log evidence at the parameters entering
    each E-step is recorded; EM makes that sequence non-decreasing.
    Iteration stops when the relative mean change falls below ``tol`` or at
    ``max_iter``.  Columns whose final precision exceeds ``gamma_prune`` are
    zeroed in the returned mean.

    ``method`` picks the factorization: ``"primal"`` factors Sigma_y (the
    update as written above, with one jitter retry on numerical singularity);
    ``"dual"`` factors the identity-equivalent Gram form
    Sigma = (Gamma + zeta Omega^H Omega)^{-1}, cheaper when the column count
    is comparable to the observation length; ``"block"`` (stacked
    dictionaries only) additionally exploits that every path block repeats
    one steering vector over its delay grid, replacing the dictionary by an
    exact thin factor with one row per (pilot, path) pair.  ``"auto"``
    chooses by size.  All routes produce the same iterates up to rounding.

    ``obs`` may be a :class:`PilotObservation` or a plain stacked vector (pass
    ``noise_var`` for the latter); ``dictionary`` may be a
    :class:`StackedDictionary` or a plain matrix.
    """
    y = obs.stacked if isinstance(obs, PilotObservation) else np.asarray(obs)
    omega = dictionary.omega if isinstance(dictionary, StackedDictionary) else np.asarray(dictionary)
    if noise_var is None:
        noise_var = obs.noise_var if isinstance(obs, PilotObservation) else 0.0
    mp, n_cols = omega.shape
    if y.shape != (mp,):
        raise ValueError("observation length does not match dictionary rows")
    if not np.any(omega):
        raise ValueError("dictionary is identically zero")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if method not in ("auto", "primal", "dual", "block"):
        raise ValueError("method must be auto, primal, dual or block")
    thin = None
    if method in ("auto", "block") and isinstance(dictionary, StackedDictionary):
        thin = _thin_gram_factor(dictionary)
        if method == "auto" and thin.shape[0] >= min(mp, n_cols):
            thin = None
    if method == "block" and thin is None:
        raise ValueError("block method needs a StackedDictionary")
    if method == "auto":
        if thin is not None:
            method = "block"
        else:
            method = "dual" if n_cols <= 2 * mp else "primal"

    omega_h = np.ascontiguousarray(omega.conj().T)
    gram = None if method == "block" else omega_h @ omega
    g_vec = omega_h @ y
    y_norm2 = float(np.sum(np.abs(y) ** 2))

    gamma = np.ones(n_cols)
    zeta = 1.0 / noise_var if noise_var > 0 else 1.0
    if method == "block":
        mean_prev = _regularized_ls_thin(thin, g_vec)
    else:
        mean_prev = _regularized_ls(gram, g_vec)

    num_a = 2.0 * hyper.a - 1.0
    num_c = 2.0 * hyper.c - 1.0
    denom_const = 2.0 * (hyper.d if hyper.noise_denominator == "d" else hyper.c)

    evidence: list[float] = []
    history: list[EmIteration] | None = [] if record_history else None
    mean = mean_prev
    inv_gamma = 1.0 / gamma
    sigma_factor = None  # enough state to rebuild the posterior covariance
    iterations = 0

    for _ in range(max_iter):
        iterations += 1
        inv_gamma = 1.0 / gamma

        if method == "primal":
            w_mat = omega * inv_gamma[None, :]
            c_mat = w_mat @ omega_h + (1.0 / zeta) * np.eye(mp)
            chol = _chol_with_jitter(c_mat)
            v_mat = sla.solve_triangular(chol, w_mat, lower=True, check_finite=False)
            sigma_diag = inv_gamma - np.sum(np.abs(v_mat) ** 2, axis=0)
            mean = zeta * (inv_gamma * g_vec - v_mat.conj().T @ (v_mat @ g_vec))
            sigma_factor = ("primal", inv_gamma, v_mat)

            ly = sla.solve_triangular(chol, y, lower=True, check_finite=False)
            logdet_cov = 2.0 * float(np.sum(np.log(np.real(np.diag(chol)))))
            quad = float(np.sum(np.abs(ly) ** 2))
            trace_os = mp / zeta - float(np.sum(np.abs(_tri_inv(chol)) ** 2)) / zeta**2
        elif method == "dual":
            s_mat = zeta * gram + np.diag(gamma.astype(complex))
            chol = _chol_with_jitter(s_mat)
            linv = _tri_inv(chol)
            sigma_diag = np.sum(np.abs(linv) ** 2, axis=0)
            z_vec = sla.solve_triangular(chol, g_vec, lower=True, check_finite=False)
            mean = zeta * sla.solve_triangular(
                chol, z_vec, trans="C", lower=True, check_finite=False
            )
            sigma_factor = ("dual", linv)

            # matrix determinant lemma and the matched quadratic form
            logdet_cov = (
                -mp * np.log(zeta)
                - float(np.sum(np.log(gamma)))
                + 2.0 * float(np.sum(np.log(np.real(np.diag(chol)))))
            )
            quad = zeta * y_norm2 - zeta * float(np.real(np.vdot(g_vec, mean)))
            trace_os = (n_cols - float(gamma @ sigma_diag)) / zeta
        else:  # block: thin factor T with T^H T = Omega^H Omega
            w_thin = thin * inv_gamma[None, :]
            c_r = zeta * (w_thin @ thin.conj().T)
            c_r.flat[:: c_r.shape[0] + 1] += 1.0
            chol = _chol_with_jitter(c_r)
            v_thin = sla.solve_triangular(chol, w_thin, lower=True, check_finite=False)
            sigma_diag = inv_gamma - zeta * np.einsum(
                "ij,ij->j", v_thin.conj(), v_thin
            ).real
            mean = zeta * (
                inv_gamma * g_vec - zeta * (v_thin.conj().T @ (v_thin @ g_vec))
            )
            sigma_factor = ("block", inv_gamma, zeta, v_thin)

            logdet_cov = (
                -mp * np.log(zeta)
                + 2.0 * float(np.sum(np.log(np.real(np.diag(chol)))))
            )
            quad = zeta * y_norm2 - zeta * float(np.real(np.vdot(g_vec, mean)))
            trace_os = (n_cols - float(gamma @ sigma_diag)) / zeta

        ll = -mp * np.log(np.pi) - logdet_cov - quad
        evidence.append(ll)

        if history is not None:
            history.append(
                EmIteration(
                    gamma=gamma.copy(),
                    zeta=zeta,
                    mean=mean.copy(),
                    sigma_diag=np.asarray(sigma_diag).copy(),
                    log_evidence=ll,
                    sigma=_covariance_from_factor(sigma_factor),
                )
            )

        # M-step
        second_moment = np.abs(mean) ** 2 + np.maximum(sigma_diag, 0.0)
        gamma = num_a / np.maximum(second_moment + 2.0 * hyper.b, 1e-300)

        rss = float(np.sum(np.abs(y - omega @ mean) ** 2))
        expected_rss = rss + trace_os
        zeta = num_c / max(expected_rss / mp + denom_const, 1e-300)

        delta = np.linalg.norm(mean - mean_prev) / max(np.linalg.norm(mean_prev), 1e-12)
        mean_prev = mean
        if delta < tol:
            break

    covariance = _covariance_from_factor(sigma_factor)
    pruned = gamma > gamma_prune
    mean_out = np.where(pruned, 0.0, mean)
    return SblPosterior(
        mean=mean_out,
        covariance=covariance,
        gamma=gamma,
        zeta=zeta,
        hyper=hyper,
        log_evidence=evidence,
        iterations=iterations,
        pruned=pruned,
        history=history,
    )


def _covariance_from_factor(factor) -> np.ndarray:
    if factor[0] == "primal":
        _, inv_gamma, v_mat = factor
        return np.diag(inv_gamma.astype(complex)) - v_mat.conj().T @ v_mat
    if factor[0] == "block":
        _, inv_gamma, zeta, v_thin = factor
        return np.diag(inv_gamma.astype(complex)) - zeta * (v_thin.conj().T @ v_thin)
    _, linv = factor
    return linv.conj().T @ linv


# ---------------------------------------------------------------------------
# reconstruction and scoring
# ---------------------------------------------------------------------------

@dataclass
class ChannelEstimate:
    h_hat: np.ndarray  # (K, M)
    estimator: str
    elapsed: float = float("nan")


def reconstruct_channel(
    dictionary: StackedDictionary,
    alpha: np.ndarray,
    arr: ArrayConfig,
    cfg: OfdmConfig,
    estimator: str = "swomp-sbl",
) -> ChannelEstimate:
    """Rebuild the channel on every subcarrier from dictionary metadata and gains."""
    alpha = np.asarray(alpha)
    if alpha.shape != (dictionary.num_columns,):
        raise ValueError("gain vector length does not match dictionary columns")
    bmat = delay_response_matrix(np.arange(cfg.fft_size), dictionary.col_delays, cfg)
    a_mat = steering_vector(dictionary.col_angles, arr.num_antennas)
    h_hat = (bmat * alpha) @ a_mat.T
    return ChannelEstimate(h_hat=h_hat, estimator=estimator)


def nmse(est, truth) -> float:
    """Total squared error over total channel energy, both summed over k."""
    h_hat = est.h_hat if isinstance(est, ChannelEstimate) else np.asarray(est)
    h = truth.freq_response if isinstance(truth, ChannelRealization) else np.asarray(truth)
    if h_hat.shape != h.shape:
        raise ValueError("estimate and truth dimensions differ")
    denom = float(np.sum(np.abs(h) ** 2))
    if denom == 0.0:
        raise ValueError("true channel is identically zero")
    return float(np.sum(np.abs(h_hat - h) ** 2)) / denom


# ---------------------------------------------------------------------------
# full estimators
# ---------------------------------------------------------------------------

def swomp_sbl_estimate(
    obs: PilotObservation,
    report: SensingReport,
    arr: ArrayConfig,
    cfg: OfdmConfig,
    d_theta: int = 500,
    d_tau: int = 50,
    hyper: SblHyperprior = SblHyperprior(),
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    gamma_prune: float = DEFAULT_GAMMA_PRUNE,
    stop_scale: float = DEFAULT_STOP_SCALE,
) -> ChannelEstimate:
    """The full two-stage pipeline: SWOMP angle refinement, then SBL gains."""
    grid = sensing_angle_grid(report, d_theta, arr)
    selection = swomp_select(obs, grid, stop_scale=stop_scale)
    if selection.num_selected == 0:
        return ChannelEstimate(
            h_hat=np.zeros((cfg.fft_size, arr.num_antennas), dtype=complex),
            estimator="swomp-sbl",
        )
    dictionary = delay_refinement_dictionary(
        selection, report, d_tau, obs.pattern.indices, arr, cfg
    )
    posterior = sbl_em(
        obs, dictionary, hyper=hyper, tol=tol, max_iter=max_iter, gamma_prune=gamma_prune
    )
    return reconstruct_channel(dictionary, posterior.mean, arr, cfg, estimator="swomp-sbl")


def ideal_sensing_ls(
    obs: PilotObservation,
    paths: list[PathParams],
    arr: ArrayConfig,
    cfg: OfdmConfig,
) -> ChannelEstimate:
    """Least squares on the dictionary built from the true path parameters."""
    angles = [p.aoa for p in paths]
    delays = [p.delay for p in paths]
    omega = build_stacked_matrix(angles, delays, list(obs.pattern.indices), arr, cfg)
    alpha, *_ = np.linalg.lstsq(omega, obs.stacked, rcond=None)
    dictionary = StackedDictionary(
        omega=omega,
        col_angles=np.asarray(angles, dtype=float),
        col_delays=np.asarray(delays, dtype=float),
        col_paths=np.arange(len(paths)),
        pilot_subcarriers=np.asarray(obs.pattern.indices, dtype=int),
    )
    return reconstruct_channel(dictionary, alpha, arr, cfg, estimator="ideal-ls")


def wideband_ls(obs: PilotObservation) -> ChannelEstimate:
    """Per-subcarrier least squares on a full-band observation (the readout)."""
    if obs.pattern.num_pilots != obs.pattern.fft_size:
        raise ValueError("wideband LS needs an observation on every subcarrier")
    return ChannelEstimate(h_hat=obs.y.copy(), estimator="wb-ls")


def wideband_swomp(
    obs: PilotObservation,
    arr: ArrayConfig,
    num_atoms: int = 500,
    stop_scale: float = DEFAULT_STOP_SCALE,
) -> ChannelEstimate:
    """SWOMP over a uniform angle dictionary on all subcarriers, then LS projection."""
    if obs.pattern.num_pilots != obs.pattern.fft_size:
        raise ValueError("wideband SWOMP needs an observation on every subcarrier")
    grid = uniform_angle_grid(num_atoms, arr)
    selection = swomp_select(obs, grid, stop_scale=stop_scale)
    if selection.num_selected == 0:
        return ChannelEstimate(h_hat=np.zeros_like(obs.y), estimator="wb-swomp")
    sub = grid.atoms[:, selection.atom_indices]
    coef, *_ = np.linalg.lstsq(sub, obs.y.T, rcond=None)
    return ChannelEstimate(h_hat=(sub @ coef).T, estimator="wb-swomp")
