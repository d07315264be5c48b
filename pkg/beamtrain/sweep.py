"""
    Beam-sweeping schedules.

    A plan is a list of rounds; each round is a list of bins; each bin is one training symbol
    during which sub-array m steers the m-th smallest direction of the bin.
"""

import itertools
import logging
from collections import UserList
from dataclasses import dataclass
from typing import Iterable, List, Tuple

import numpy as np

from beamtrain.codebook import Codebook, CodebookGeometry
from beamtrain.templates import render
from beamtrain.utils import InvalidArgumentError

log = logging.getLogger("beamtrain")


@dataclass(frozen=True)
class Bin:
    round: int
    slot: int
    directions: Tuple[int, ...]

    def __post_init__(self):
        dirs = tuple(int(j) for j in self.directions)
        if any(q <= p for p, q in zip(dirs, dirs[1:])):
            raise InvalidArgumentError(f"Bin directions must be strictly ascending. Got {dirs}.")
        object.__setattr__(self, "directions", dirs)

    def __iter__(self):
        return iter(self.directions)

    def __len__(self):
        return len(self.directions)

    def to_dict(self):
        return {"round": self.round, "slot": self.slot, "directions": list(self.directions)}


class SweepPlan(UserList):
    """
    Rounds of bins, round r held at index r-1. Immutable by convention once built.
    """

    def __init__(self, geometry: CodebookGeometry, rounds: Iterable[Iterable[Bin]] = ()):
        super().__init__(list(_round) for _round in rounds)
        self.geometry = geometry
        self._codewords = None

    @property
    def total_symbols(self) -> int:
        return sum(len(_round) for _round in self.data)

    def bin(self, r: int, b: int) -> Bin:
        if not 1 <= r <= len(self.data) or not 1 <= b <= len(self.data[r - 1]):
            raise InvalidArgumentError(f"No bin B({r},{b}) in this plan.")
        return self.data[r - 1][b - 1]

    def symbols(self) -> List[Bin]:
        """ Bins in transmission order. """
        return list(itertools.chain.from_iterable(self.data))

    def intersecting_slot(self, r: int, b: int) -> int:
        """
        The unique slot of round r whose bin shares a direction with B(1, b).
        """
        reference = set(self.bin(1, b).directions)
        slots = [_bin.slot for _bin in self.data[r - 1] if reference.intersection(_bin.directions)]
        if len(slots) != 1:
            raise InvalidArgumentError(
                f"Round {r} has {len(slots)} bins intersecting B(1,{b}); expected exactly one.")
        return slots[0]

    def codewords(self, codebook: Codebook) -> np.ndarray:
        """
        T-by-n_x matrix; row t is the composite codeword of the t-th training symbol.
        """
        if self._codewords is None:
            m = self.geometry.m
            matrix = np.stack([codebook.composite(_bin.directions, m) for _bin in self.symbols()])
            matrix.setflags(write=False)
            self._codewords = matrix
        return self._codewords

    def dump(self) -> str:
        """ One line per training symbol: r,b,j_1,...,j_M """
        return render("plan.txt", bins=self.symbols())


def training_symbols(geo: CodebookGeometry) -> int:
    """
    T = L + L*log2(M)/2
    """
    return geo.l + geo.l * (geo.rounds - 1) // 2


def intra_set_distance(directions: Iterable[int]) -> int:
    """
    d_s(A) = min over p != q in A of |p - q|
    """
    values = sorted(set(directions))
    if len(values) < 2:
        raise InvalidArgumentError(f"Intra-set distance needs at least two directions. Got {values}.")
    return min(q - p for p, q in zip(values, values[1:]))


def round1_bin(b: int, geo: CodebookGeometry) -> Bin:
    """
    B(1, b) = {b, b+L, ..., b+(M-1)L}
    """
    if not 1 <= b <= geo.l:
        raise InvalidArgumentError(f"Round-1 slot must be in 1..{geo.l}. Got {b}.")
    return Bin(1, b, tuple(b + k * geo.l for k in range(geo.m)))


def later_round_bin(r: int, b: int, geo: CodebookGeometry) -> Bin:
    """
    B(r, b) for r >= 2: alternate segments of length u(r) = M / 2^(r-1), taken from B(1, b)
    and B(1, b + L/2) in turn.
    """
    if not 2 <= r <= geo.rounds:
        raise InvalidArgumentError(f"Later-round index must be in 2..{geo.rounds}. Got {r}.")
    if not 1 <= b <= geo.l // 2:
        raise InvalidArgumentError(f"Round-{r} slot must be in 1..{geo.l // 2}. Got {b}.")
    u = geo.m >> (r - 1)
    first = round1_bin(b, geo).directions
    second = round1_bin(b + geo.l // 2, geo).directions
    directions = []
    for s in range(geo.m // (2 * u)):
        directions.extend(first[2 * s * u:(2 * s + 1) * u])
        directions.extend(second[(2 * s + 1) * u:(2 * s + 2) * u])
    return Bin(r, b, tuple(sorted(directions)))


def build_sweep_plan(geo: CodebookGeometry) -> SweepPlan:
    rounds = [[round1_bin(b, geo) for b in range(1, geo.l + 1)]]
    for r in range(2, geo.rounds + 1):
        rounds.append([later_round_bin(r, b, geo) for b in range(1, geo.l // 2 + 1)])
    plan = SweepPlan(geo, rounds)
    assert plan.total_symbols == training_symbols(geo)
    log.debug("Built sweep plan for %r: %d symbols.", geo, plan.total_symbols)
    return plan


def max_min_intra_bin_distance(plan: SweepPlan, r: int) -> int:
    """
    Smallest intra-bin distance over the bins of round r. Single-direction bins (m = 1) have no
    competing beam and count as n_x.
    """
    if plan.geometry.m == 1:
        return plan.geometry.n_x
    return min(intra_set_distance(_bin.directions) for _bin in plan[r - 1])


def build_rh_plan(geo: CodebookGeometry, seed, budget: int) -> SweepPlan:
    """
    Random-hashing schedule: round 1 as in build_sweep_plan(), then rounds that each place a
    seeded random permutation of the n_x directions into l bins of m directions, until exactly
    `budget` symbols are scheduled (the last round is truncated).
    """
    if budget < geo.l:
        raise InvalidArgumentError(f"Random-hashing budget must be at least l={geo.l}. Got {budget}.")
    rng = np.random.default_rng(seed)
    rounds = [[round1_bin(b, geo) for b in range(1, geo.l + 1)]]
    remaining = budget - geo.l
    r = 1
    while remaining > 0:
        r += 1
        permutation = rng.permutation(geo.n_x) + 1
        slots = min(geo.l, remaining)
        rounds.append([
            Bin(r, b, tuple(sorted(int(j) for j in permutation[(b - 1) * geo.m: b * geo.m])))
            for b in range(1, slots + 1)
        ])
        remaining -= slots
    return SweepPlan(geo, rounds)
