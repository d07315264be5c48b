"""
    Effective horizontal cascaded channels of the AP -> IRS -> user links.

    Geometry follows the IRS frame: users sit on a ring around the IRS in its horizontal plane,
    the AP is fixed, direct AP-user links are blocked.
"""

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np
from biothings.utils.configuration import ConfigurationError

from beamtrain.codebook import center_directions
from beamtrain.utils import InvalidArgumentError, db_to_linear, dbm_to_watts, steering_vector, wrap_direction

log = logging.getLogger("beamtrain")

USER_LAYOUTS = ("random", "uniform")
# "link": one Rician coefficient per link scales the LoS array response.
# "element": independent Rician entries per IRS element.
FADING_MODELS = ("link", "element")


@dataclass(frozen=True)
class ScenarioConfig:
    """ Defaults reproduce the 30 GHz, 160-element reference deployment. """
    n_x: int = 160
    n_z: int = 1
    n_a: int = 64
    d_i_over_lambda: float = 0.25
    k_users: int = 5
    ap_position: Tuple[float, float, float] = (0.0, 16.0, 0.0)
    irs_position: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    user_ring_radius: float = 2.0
    user_layout: str = "random"
    xi0_db: float = -62.0
    gamma_ai: float = 2.3
    gamma_iu: float = 2.0
    kappa_ai_db: float = 5.0
    kappa_iu_db: float = 10.0
    noise_power_dbm: float = -109.0
    gamma_gap_db: float = 9.0
    fading: str = "link"
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "ap_position", tuple(float(x) for x in self.ap_position))
        object.__setattr__(self, "irs_position", tuple(float(x) for x in self.irs_position))

    @classmethod
    def from_dict(cls, dic: dict) -> "ScenarioConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(dic) - known)
        if unknown:
            raise ConfigurationError(f"Unknown scenario key(s): {', '.join(unknown)}.")
        try:
            scenario = cls(**dic)
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(f"Invalid scenario: {exc}")
        scenario.validate()
        return scenario

    def to_dict(self) -> dict:
        dic = dataclasses.asdict(self)
        dic["ap_position"] = list(self.ap_position)
        dic["irs_position"] = list(self.irs_position)
        return dic

    def validate(self):
        if len(self.ap_position) != 3 or len(self.irs_position) != 3:
            raise ConfigurationError("Positions must be 3-vectors in meters.")
        for name in ("n_x", "n_z", "n_a", "k_users"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ConfigurationError(f"'{name}' must be a positive integer. Got {value!r}.")
        if self.n_x < 2:
            raise ConfigurationError(f"'n_x' must be at least 2. Got {self.n_x}.")
        if not 0 < self.d_i_over_lambda <= 1:
            raise ConfigurationError(f"'d_i_over_lambda' must be in (0, 1]. Got {self.d_i_over_lambda}.")
        if self.user_ring_radius < 1:
            raise ConfigurationError(
                f"'user_ring_radius' must be at least the 1 m reference distance. Got {self.user_ring_radius}.")
        if ap_irs_distance(self) < 1:
            raise ConfigurationError("AP-IRS distance must be at least the 1 m reference distance.")
        if self.gamma_ai <= 0 or self.gamma_iu <= 0:
            raise ConfigurationError("Path-loss exponents must be positive.")
        if self.user_layout not in USER_LAYOUTS:
            raise ConfigurationError(f"'user_layout' must be one of {USER_LAYOUTS}. Got {self.user_layout!r}.")
        if self.fading not in FADING_MODELS:
            raise ConfigurationError(f"'fading' must be one of {FADING_MODELS}. Got {self.fading!r}.")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigurationError(f"'seed' must be a non-negative integer. Got {self.seed!r}.")
        return self

    @property
    def noise_power(self) -> float:
        """ sigma^2 in Watts """
        return dbm_to_watts(self.noise_power_dbm)


@dataclass
class UserChannel:
    effective_channel: np.ndarray
    los_direction: float
    optimal_index: int
    effective_scalar_gain: complex


@dataclass
class ChannelRealization:
    """
    Channels of all users for one fading draw. Row k of `channels` is f_k, so that the received
    amplitude under horizontal reflection vector v is f_k^H v.
    """
    channels: np.ndarray
    los_directions: np.ndarray
    optimal_indices: np.ndarray
    scalar_gains: np.ndarray
    amplitude_scale: float
    noise_power: float
    azimuths: np.ndarray = field(default=None)

    @property
    def k_users(self) -> int:
        return self.channels.shape[0]

    @property
    def n_x(self) -> int:
        return self.channels.shape[1]

    def __len__(self):
        return self.k_users

    def __getitem__(self, k) -> UserChannel:
        return UserChannel(
            effective_channel=self.channels[k],
            los_direction=float(self.los_directions[k]),
            optimal_index=int(self.optimal_indices[k]),
            effective_scalar_gain=complex(self.scalar_gains[k]),
        )

    def amplitudes(self, codewords: np.ndarray) -> np.ndarray:
        """
        f_k^H v for every user k and every row v of `codewords` -> K-by-T matrix.
        """
        return self.channels.conj() @ np.atleast_2d(codewords).T


def ap_irs_distance(cfg: ScenarioConfig) -> float:
    return float(np.linalg.norm(np.subtract(cfg.ap_position, cfg.irs_position)))


def arrival_direction(cfg: ScenarioConfig) -> Tuple[float, float]:
    """
    Horizontal and vertical spatial directions (phi_r, psi_r) of the AP signal arriving at the IRS.

    (2d/lambda) cos(theta) sin(vartheta) reduces to (2d/lambda) dx / D, and (2d/lambda) cos(vartheta)
    to (2d/lambda) dz / D.
    """
    dx, _, dz = np.subtract(cfg.ap_position, cfg.irs_position)
    distance = ap_irs_distance(cfg)
    scale = 2.0 * cfg.d_i_over_lambda
    return scale * dx / distance, scale * dz / distance


def vertical_factor(cfg: ScenarioConfig) -> int:
    """ |u^H(chi, N_z) v_z| with the vertical beam aligned. """
    return cfg.n_z


def los_direction_for_user(user_azimuth: float, cfg: ScenarioConfig) -> float:
    """
    Effective cascaded direction wrap((2d/lambda) cos(theta) - phi_r) of a user at azimuth theta
    (elevation pi/2: users share the IRS altitude).
    """
    if not 0.0 <= user_azimuth <= math.pi:
        raise InvalidArgumentError(f"User azimuth must be in [0, pi]. Got {user_azimuth}.")
    phi_r, _ = arrival_direction(cfg)
    return wrap_direction(2.0 * cfg.d_i_over_lambda * math.cos(user_azimuth) - phi_r)


def path_gain(xi0_db: float, distance_m: float, gamma: float) -> float:
    """
    Large-scale power gain xi0 * d^-gamma, with xi0 the gain at the 1 m reference distance.
    """
    if distance_m < 1.0:
        raise InvalidArgumentError(f"Distance must be at least the 1 m reference. Got {distance_m}.")
    return db_to_linear(xi0_db) * distance_m ** (-gamma)


def draw_rician_vector(n: int, kappa_db: float, los: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """
    sqrt(k/(1+k)) los + sqrt(1/(1+k)) w, w ~ CN(0, I). kappa_db = +inf is pure LoS,
    kappa_db = -inf is pure Rayleigh.
    """
    los = np.asarray(los, dtype=complex)
    if los.size != n:
        raise InvalidArgumentError(f"LoS component has {los.size} entries, expected {n}.")
    if math.isinf(kappa_db) and kappa_db > 0:
        return los.copy()
    kappa = db_to_linear(kappa_db)
    scattered = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2.0)
    return math.sqrt(kappa / (1.0 + kappa)) * los + math.sqrt(1.0 / (1.0 + kappa)) * scattered


def draw_faded_response(n: int, kappa_db: float, los: np.ndarray, rng: np.random.Generator,
                        fading: str = "link") -> np.ndarray:
    """
    Small-scale fading around a LoS array response.

    "link" multiplies the whole response by one unit-power Rician coefficient, so scattering
    changes the link gain but not the direction the response points to. "element" is
    draw_rician_vector() with independent scattering on every element.
    """
    los = np.asarray(los, dtype=complex)
    if los.size != n:
        raise InvalidArgumentError(f"LoS component has {los.size} entries, expected {n}.")
    if fading == "element":
        return draw_rician_vector(n, kappa_db, los, rng)
    if fading != "link":
        raise InvalidArgumentError(f"Unknown fading model {fading!r}.")
    coefficient = draw_rician_vector(1, kappa_db, np.ones(1), rng)[0]
    return coefficient * los


def ap_link_kappa_db(cfg: ScenarioConfig) -> float:
    """
    Rician factor of the AP-IRS link seen through the AP transmit beam: the n_a-antenna beam
    combines the LoS path coherently and the scattered paths incoherently.
    """
    return cfg.kappa_ai_db + 10.0 * math.log10(cfg.n_a)


def optimal_index(los_direction: float, n_x: int) -> int:
    """
    I = argmin_j |phi - alpha(j)|; an exact tie goes to the smaller j.
    """
    distances = np.abs(center_directions(n_x) - los_direction)
    return int(np.argmin(distances)) + 1


def draw_user_azimuths(cfg: ScenarioConfig, rng: np.random.Generator) -> np.ndarray:
    if cfg.user_layout == "uniform":
        return math.pi * (np.arange(cfg.k_users) + 0.5) / cfg.k_users
    return rng.uniform(0.0, math.pi, size=cfg.k_users)


def amplitude_scale(cfg: ScenarioConfig) -> float:
    """
    sqrt(xi0 D_AI^-g_AI) sqrt(xi0 D_IU^-g_IU) sqrt(N_A) N_z
    """
    return math.sqrt(
        path_gain(cfg.xi0_db, ap_irs_distance(cfg), cfg.gamma_ai)
        * path_gain(cfg.xi0_db, cfg.user_ring_radius, cfg.gamma_iu)
        * cfg.n_a
    ) * vertical_factor(cfg)


def realize_channels(cfg: ScenarioConfig, user_azimuths: Sequence[float], rng: np.random.Generator) -> ChannelRealization:
    """
    Draw one fading realization for users at the given azimuths.

    The AP-IRS vector h and each IRS-user vector g_k are independently faded (cfg.fading) around
    their LoS steering vectors, with uniformly random global phases. f_k = scale * g_k ⊙ conj(h),
    so that f_k^H v = scale * sum_n conj(g_kn) h_n v_n. The AP-IRS link uses ap_link_kappa_db().
    """
    user_azimuths = np.asarray(user_azimuths, dtype=float)
    if user_azimuths.shape != (cfg.k_users,):
        raise ConfigurationError(f"Expected {cfg.k_users} user azimuths. Got {user_azimuths.size}.")

    phi_r, _ = arrival_direction(cfg)
    scale = amplitude_scale(cfg)

    phase_h = rng.uniform(0.0, 2.0 * math.pi)
    h = draw_faded_response(cfg.n_x, ap_link_kappa_db(cfg), np.exp(1j * phase_h) * steering_vector(phi_r, cfg.n_x),
                            rng, cfg.fading)

    channels = np.empty((cfg.k_users, cfg.n_x), dtype=complex)
    los_directions = np.empty(cfg.k_users)
    optimal_indices = np.empty(cfg.k_users, dtype=int)
    scalar_gains = np.empty(cfg.k_users, dtype=complex)
    for k, theta in enumerate(user_azimuths):
        phi_t = 2.0 * cfg.d_i_over_lambda * math.cos(theta)
        phase_g = rng.uniform(0.0, 2.0 * math.pi)
        g = draw_faded_response(cfg.n_x, cfg.kappa_iu_db, np.exp(1j * phase_g) * steering_vector(phi_t, cfg.n_x),
                                rng, cfg.fading)
        channels[k] = scale * g * h.conj()
        los_directions[k] = los_direction_for_user(theta, cfg)
        optimal_indices[k] = optimal_index(los_directions[k], cfg.n_x)
        # received LoS amplitude is zeta_k u^H(phi_k) v
        scalar_gains[k] = scale * np.exp(-1j * (phase_g - phase_h))

    return ChannelRealization(
        channels=channels,
        los_directions=los_directions,
        optimal_indices=optimal_indices,
        scalar_gains=scalar_gains,
        amplitude_scale=scale,
        noise_power=cfg.noise_power,
        azimuths=user_azimuths,
    )
