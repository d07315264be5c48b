import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np

from beamtrain.channel import ChannelRealization
from beamtrain.codebook import Codebook, CodebookGeometry
from beamtrain.sweep import SweepPlan, build_rh_plan, build_sweep_plan, training_symbols
from beamtrain.templates import render
from beamtrain.utils import InvalidArgumentError, as_codeword

log = logging.getLogger("beamtrain")


class ProtocolError(RuntimeError):
    """
    Raised when an observation log does not match the sweep plan it claims to record.
    """
    pass


def received_powers(codewords: np.ndarray, realization: ChannelRealization, p_a: float,
                    rng: Optional[np.random.Generator], noiseless: bool = False) -> np.ndarray:
    """
    |sqrt(p_a) f_k^H v_t + n_kt|^2 for every user k and codeword row v_t (unit-magnitude symbols),
    n ~ CN(0, sigma^2). Returns a K-by-T matrix.
    """
    amplitudes = np.sqrt(p_a) * realization.amplitudes(codewords)
    if not noiseless:
        noise = rng.standard_normal((2,) + amplitudes.shape)
        amplitudes = amplitudes + np.sqrt(realization.noise_power / 2.0) * (noise[0] + 1j * noise[1])
    return np.abs(amplitudes) ** 2


def observe_symbol(v_x: np.ndarray, realization: ChannelRealization, p_a: float,
                   rng: Optional[np.random.Generator], noiseless: bool = False) -> np.ndarray:
    """ Per-user received power of one training symbol reflected with v_x. """
    v_x = as_codeword(v_x)
    if v_x.size != realization.n_x:
        raise InvalidArgumentError(f"Reflection vector must have {realization.n_x} entries. Got {v_x.size}.")
    return received_powers(v_x[None, :], realization, p_a, rng, noiseless)[:, 0]


class ObservationLog:
    """
    Received powers P_k(r, b) of every user for every training symbol of a plan, stored as a
    K-by-T matrix in transmission order.
    """

    def __init__(self, plan: SweepPlan, powers: np.ndarray):
        self.plan = plan
        self.powers = np.asarray(powers, dtype=float)
        self._offsets = np.concatenate(([0], np.cumsum([len(_round) for _round in plan]))).astype(int)

    @classmethod
    def from_records(cls, plan: SweepPlan, records: dict, k_users: int = 1) -> "ObservationLog":
        """
        Build from {(r, b): power or per-user powers}. Missing symbols raise ProtocolError.
        """
        powers = np.empty((k_users, plan.total_symbols))
        for t, _bin in enumerate(plan.symbols()):
            try:
                powers[:, t] = records[(_bin.round, _bin.slot)]
            except KeyError:
                raise ProtocolError(f"No received power recorded for B({_bin.round},{_bin.slot}).")
        return cls(plan, powers)

    @property
    def k_users(self) -> int:
        return self.powers.shape[0]

    def check(self):
        if self.powers.ndim != 2 or self.powers.shape[1] != self.plan.total_symbols:
            raise ProtocolError(
                f"Observation log holds {self.powers.shape[-1] if self.powers.ndim else 0} symbols "
                f"per user; the plan has {self.plan.total_symbols}.")
        if not np.all(np.isfinite(self.powers)) or np.any(self.powers < 0):
            raise ProtocolError("Received powers must be finite and non-negative.")
        return self

    def round_powers(self, r: int) -> np.ndarray:
        """ K-by-(bins of round r) """
        return self.powers[:, self._offsets[r - 1]:self._offsets[r]]

    def power(self, r: int, b: int) -> np.ndarray:
        return self.powers[:, self._offsets[r - 1] + b - 1]


@dataclass
class IdentificationState:
    user: int
    best_slot: int
    threshold: float
    candidates: List[Tuple[int, ...]] = field(default_factory=list)
    # (round, inspected slot, received power, bin kept)
    decisions: List[Tuple[int, int, float, bool]] = field(default_factory=list)

    @property
    def identified(self) -> Union[int, Tuple[int, ...]]:
        final = self.candidates[-1]
        return final[0] if len(final) == 1 else final


def identify_multi_beam(observations: ObservationLog, plan: SweepPlan) -> List[IdentificationState]:
    """
    Per-user threshold identification over the rounds of a multi-beam sweep.

    Round 1 picks the strongest bin b* (ties to the smaller slot) and sets the threshold to half
    its power. Each later round inspects the single bin that intersects B(1, b*) and keeps either
    its intersection with the candidates (power >= threshold) or the complement.
    """
    observations.check()
    if observations.plan is not plan and observations.plan.symbols() != plan.symbols():
        raise ProtocolError("Observation log was recorded under a different plan.")

    first_round = observations.round_powers(1)
    states = []
    for k in range(observations.k_users):
        best = int(np.argmax(first_round[k]))
        state = IdentificationState(user=k, best_slot=best + 1, threshold=first_round[k, best] / 2.0)
        candidates = set(plan.bin(1, state.best_slot).directions)
        state.candidates.append(tuple(sorted(candidates)))
        for r in range(2, len(plan) + 1):
            slot = plan.intersecting_slot(r, state.best_slot)
            inspected = set(plan.bin(r, slot).directions)
            power = float(observations.power(r, slot)[k])
            keep = power >= state.threshold
            candidates = candidates & inspected if keep else candidates - inspected
            state.decisions.append((r, slot, power, keep))
            state.candidates.append(tuple(sorted(candidates)))
        if len(candidates) != 1:
            log.warning("User %d left with %d candidate directions.", k, len(candidates))
        states.append(state)
    return states


def vote_random_hash(observations: ObservationLog, plan: SweepPlan) -> np.ndarray:
    """
    Each round, the strongest bin gives one vote to each of its directions. The most voted
    direction wins; ties go to the larger power accumulated over winning bins, then the smaller index.
    """
    observations.check()
    n_x = plan.geometry.n_x
    index = np.arange(n_x)
    identified = np.empty(observations.k_users, dtype=int)
    for k in range(observations.k_users):
        votes = np.zeros(n_x, dtype=int)
        energy = np.zeros(n_x)
        for r, _round in enumerate(plan, start=1):
            powers = observations.round_powers(r)[k]
            winner = int(np.argmax(powers))
            members = np.array(_round[winner].directions) - 1
            votes[members] += 1
            energy[members] += powers[winner]
        # lexsort: last key is primary
        identified[k] = np.lexsort((index, -energy, -votes))[0] + 1
    return identified


def run_single_beam(realization: ChannelRealization, p_a: float, rng, noiseless: bool = False,
                    codebook: Optional[Codebook] = None) -> np.ndarray:
    """
    Exhaustive sweep over the n_x single-beam codewords; returns I^(ex) per user.
    """
    codebook = codebook or Codebook(realization.n_x)
    powers = received_powers(codebook.matrix, realization, p_a, rng, noiseless)
    return np.argmax(powers, axis=1) + 1


def run_multi_beam_sweep(plan: SweepPlan, realization: ChannelRealization, p_a: float, rng,
                         noiseless: bool = False, codebook: Optional[Codebook] = None) -> ObservationLog:
    codebook = codebook or Codebook(plan.geometry.n_x)
    powers = received_powers(plan.codewords(codebook), realization, p_a, rng, noiseless)
    return ObservationLog(plan, powers)


def run_rh(plan_rh: SweepPlan, realization: ChannelRealization, p_a: float, rng,
           noiseless: bool = False, codebook: Optional[Codebook] = None) -> np.ndarray:
    observations = run_multi_beam_sweep(plan_rh, realization, p_a, rng, noiseless, codebook)
    return vote_random_hash(observations, plan_rh)


def render_identification_trace(observations: ObservationLog, states: List[IdentificationState]) -> str:
    symbols = [
        {"round": _bin.round, "slot": _bin.slot, "powers": observations.powers[:, t].tolist()}
        for t, _bin in enumerate(observations.plan.symbols())
    ]
    return render("identification.txt", symbols=symbols, states=states)


@dataclass
class TrainingOutcome:
    identified: np.ndarray
    training_symbols: int
    states: Optional[List[IdentificationState]] = None
    observations: Optional[ObservationLog] = None


class BeamTrainingService(ABC):
    """
    One training protocol bound to a codebook (and a sweep plan where it needs one).
    """
    name = None

    def __init__(self, codebook: Codebook):
        self.codebook = codebook

    @property
    def m(self) -> int:
        return 1

    @property
    @abstractmethod
    def training_symbols(self) -> int:
        raise NotImplementedError

    @abstractmethod
    def train(self, realization: ChannelRealization, p_a: float, rng, noiseless: bool = False) -> TrainingOutcome:
        raise NotImplementedError


class SingleBeamTraining(BeamTrainingService):
    name = "single"

    @property
    def training_symbols(self):
        return self.codebook.n_x

    def train(self, realization, p_a, rng, noiseless=False):
        identified = run_single_beam(realization, p_a, rng, noiseless, self.codebook)
        return TrainingOutcome(identified=identified, training_symbols=self.training_symbols)


class MultiBeamTraining(BeamTrainingService):
    name = "multi"

    def __init__(self, codebook: Codebook, plan: SweepPlan):
        super().__init__(codebook)
        self.plan = plan

    @classmethod
    def for_subarrays(cls, codebook: Codebook, m: int) -> "MultiBeamTraining":
        return cls(codebook, build_sweep_plan(CodebookGeometry(codebook.n_x, m)))

    @property
    def m(self):
        return self.plan.geometry.m

    @property
    def training_symbols(self):
        return self.plan.total_symbols

    def train(self, realization, p_a, rng, noiseless=False):
        observations = run_multi_beam_sweep(self.plan, realization, p_a, rng, noiseless, self.codebook)
        states = identify_multi_beam(observations, self.plan)
        # an unresolved candidate set falls back to its smallest direction
        identified = np.array([
            state.identified if isinstance(state.identified, int) else state.identified[0]
            for state in states
        ])
        return TrainingOutcome(identified=identified, training_symbols=self.training_symbols,
                               states=states, observations=observations)


class RandomHashTraining(BeamTrainingService):
    name = "rh"

    def __init__(self, codebook: Codebook, plan: SweepPlan):
        super().__init__(codebook)
        self.plan = plan

    @classmethod
    def for_subarrays(cls, codebook: Codebook, m: int, seed, budget: Optional[int] = None) -> "RandomHashTraining":
        """ The budget defaults to the multi-beam symbol count for the same geometry. """
        geo = CodebookGeometry(codebook.n_x, m)
        budget = training_symbols(geo) if budget is None else budget
        return cls(codebook, build_rh_plan(geo, seed, budget))

    @property
    def m(self):
        return self.plan.geometry.m

    @property
    def training_symbols(self):
        return self.plan.total_symbols

    def train(self, realization, p_a, rng, noiseless=False):
        observations = run_multi_beam_sweep(self.plan, realization, p_a, rng, noiseless, self.codebook)
        identified = vote_random_hash(observations, self.plan)
        return TrainingOutcome(identified=identified, training_symbols=self.training_symbols,
                               observations=observations)
