"""KL-divergence metrics, constellation shaping, and Pareto beamforming
for an integrated sensing-and-communication link."""

from .scenario import (ScenarioParams, CommChannel, TargetResponse, steering,
                       db_to_linear, dbm_to_watts, derive_rng,
                       gen_comm_channel, gen_target_response)
from .kld import (KldValue, kld_comm, kld_comm_scalar, kld_radar_full,
                  kld_radar_woodbury, kld_radar_scalar, kld_unified, kld_new)
from .constellation import (Constellation, OptimizerOptions, make_psk, make_qam,
                            make_apsk, optimize_constellation, assign_labels,
                            min_pair_distance, avg_power)
from .beamforming import (Beamformer, QuadraticPair, ParetoPoint,
                          sensing_beamformer, comm_beamformer,
                          correlation_coefficient, pareto_beamformer, pareto_sweep)
from .simulate import (DetectorSpec, TrialResult, simulate_ber, np_threshold,
                       np_detection_probability, simulate_detection_cfar,
                       cfar_detect)
from .records import TradeoffRecord, write_records, CSV_COLUMNS
from .config import ExperimentConfig, ConstellationSource, MonteCarloConfig

__version__ = "0.1.0"

__all__ = [
    "ScenarioParams", "CommChannel", "TargetResponse", "steering",
    "db_to_linear", "dbm_to_watts", "derive_rng", "gen_comm_channel",
    "gen_target_response",
    "KldValue", "kld_comm", "kld_comm_scalar", "kld_radar_full",
    "kld_radar_woodbury", "kld_radar_scalar", "kld_unified", "kld_new",
    "Constellation", "OptimizerOptions", "make_psk", "make_qam", "make_apsk",
    "optimize_constellation", "assign_labels", "min_pair_distance", "avg_power",
    "Beamformer", "QuadraticPair", "ParetoPoint", "sensing_beamformer",
    "comm_beamformer", "correlation_coefficient", "pareto_beamformer",
    "pareto_sweep",
    "DetectorSpec", "TrialResult", "simulate_ber", "np_threshold",
    "np_detection_probability", "simulate_detection_cfar", "cfar_detect",
    "TradeoffRecord", "write_records", "CSV_COLUMNS",
    "ExperimentConfig", "ConstellationSource", "MonteCarloConfig",
]
