from .training_service import (
    BeamTrainingService, SingleBeamTraining, MultiBeamTraining, RandomHashTraining, TrainingOutcome,
    ObservationLog, IdentificationState, ProtocolError,
    observe_symbol, received_powers, run_single_beam, run_multi_beam_sweep, identify_multi_beam, run_rh,
    vote_random_hash, render_identification_trace,
)
from .metrics_service import power_for_snr, snr_for_power, achievable_rate, reference_gain
