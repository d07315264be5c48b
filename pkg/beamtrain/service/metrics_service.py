from typing import Sequence

import numpy as np

from beamtrain.channel import ChannelRealization, ScenarioConfig, ap_irs_distance, path_gain
from beamtrain.codebook import Codebook
from beamtrain.utils import db_to_linear, linear_to_db


def reference_gain(cfg: ScenarioConfig) -> float:
    """
    (xi0 D_AI^-g_AI)(xi0 D_IU^-g_IU) N_x^2 N_A: the aligned LoS power gain behind the SNR definition.
    """
    return (path_gain(cfg.xi0_db, ap_irs_distance(cfg), cfg.gamma_ai)
            * path_gain(cfg.xi0_db, cfg.user_ring_radius, cfg.gamma_iu)
            * cfg.n_x ** 2 * cfg.n_a)


def power_for_snr(snr_db: float, cfg: ScenarioConfig) -> float:
    """ Transmit power P_A (W) that yields the given average SNR. """
    return db_to_linear(snr_db) * cfg.noise_power / reference_gain(cfg)


def snr_for_power(p_a: float, cfg: ScenarioConfig) -> float:
    return linear_to_db(p_a * reference_gain(cfg) / cfg.noise_power)


def achievable_rate(identified: Sequence[int], realization: ChannelRealization, p_a: float,
                    cfg: ScenarioConfig, codebook: Codebook = None) -> np.ndarray:
    """
    R_k = log2(1 + P_A |f_k^H w(I_k)|^2 / (Gamma sigma^2)) in bits/s/Hz, evaluated on the realized
    channel with the single-beam codeword of each user's identified direction.
    """
    codebook = codebook or Codebook(realization.n_x)
    identified = np.asarray(identified, dtype=int)
    beams = codebook.matrix[identified - 1]
    gains = np.abs(np.einsum("kn,kn->k", realization.channels.conj(), beams)) ** 2
    gap = db_to_linear(cfg.gamma_gap_db)
    return np.log2(1.0 + p_a * gains / (gap * realization.noise_power))
