"""Sensing-aided uplink channel estimation for wideband mmWave MIMO.

A library plus CLI simulator: geometric scenes with erroneous radar-style
scatterer reports, a parametric wideband channel model, a two-stage
SWOMP + SBL estimator against wideband baselines, Fisher-information-based
Cramer-Rao bounds, and a deterministic Monte-Carlo sweep harness.
"""

from .channel import (
    ArrayConfig,
    ChannelRealization,
    OfdmConfig,
    build_stacked_matrix,
    build_subcarrier_matrix,
    delay_response,
    delay_response_derivative,
    raised_cosine_pulse,
    sinc_pulse,
    steering_vector,
    synthesize_channel,
)
from .config import load_config
from .crb import CrbResult, FimBlocks, FimInput, assemble_fim, crb_theta_alpha, fim_blocks
from .estimators import (
    AngleGrid,
    ChannelEstimate,
    SblHyperprior,
    SblPosterior,
    StackedDictionary,
    SwompResult,
    delay_refinement_dictionary,
    ideal_sensing_ls,
    nmse,
    reconstruct_channel,
    sbl_em,
    sensing_angle_grid,
    swomp_sbl_estimate,
    swomp_select,
    uniform_angle_grid,
    wideband_ls,
    wideband_swomp,
)
from .frontend import (
    PilotObservation,
    PilotPattern,
    comb_pattern,
    noise_var_for_snr,
    observe,
)
from .harness import (
    ResultRow,
    SweepConfig,
    default_config,
    run_trial,
    sweep,
    trial_seed,
)
from .scene import (
    PathParams,
    Scene,
    SceneConfig,
    SensingReport,
    generate_scene,
    sense,
    translate_delay,
    translated_delays,
    true_path_params,
)

__version__ = "0.1.0"
