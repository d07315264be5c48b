"""
    Single-beam and sub-array (multi-beam) reflection codebooks.

    Direction indices are 1-based throughout, j in {1, ..., J} with J = n_x.
"""

import logging
from functools import cached_property
from typing import Sequence

import numpy as np

from beamtrain.templates import render
from beamtrain.utils import InvalidArgumentError, InvalidSizeError, steering_vector, beam_gain

log = logging.getLogger("beamtrain")


def _is_power_of_two(value: int) -> bool:
    return value >= 1 and (value & (value - 1)) == 0


class CodebookGeometry:
    """
    Horizontal IRS elements split into m sub-arrays of l = n_x / m adjacent elements.
    """

    def __init__(self, n_x: int, m: int = 1):
        if isinstance(n_x, bool) or not isinstance(n_x, (int, np.integer)) or n_x < 1:
            raise InvalidSizeError('n_x', n_x)
        if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or not _is_power_of_two(m):
            raise InvalidArgumentError(f"Sub-array count must be a power of two. Got m={m}.")
        if n_x % m:
            raise InvalidArgumentError(f"Sub-array count m={m} does not divide n_x={n_x}.")
        if m > 1 and (n_x // m) % 2:
            raise InvalidArgumentError(f"Sub-array size l=n_x/m must be even. Got l={n_x // m}.")
        self._n_x = int(n_x)
        self._m = int(m)

    @property
    def n_x(self):
        return self._n_x

    @property
    def m(self):
        return self._m

    @property
    def l(self):  # noqa: E743
        return self._n_x // self._m

    @property
    def rounds(self):
        """ 1 + log2(m) sweeping rounds. """
        return self._m.bit_length()

    def check_direction(self, j):
        if isinstance(j, bool) or not isinstance(j, (int, np.integer)) or not 1 <= j <= self._n_x:
            raise InvalidArgumentError(f"Direction index must be in 1..{self._n_x}. Got {j!r}.")

    def __eq__(self, other):
        return isinstance(other, CodebookGeometry) and (self.n_x, self.m) == (other.n_x, other.m)

    def __hash__(self):
        return hash((self.n_x, self.m))

    def __repr__(self):
        return f"CodebookGeometry(n_x={self.n_x}, m={self.m}, l={self.l})"


def center_direction(j: int, n_x: int) -> float:
    """
    alpha(j) = -1 + (2j - 1) / n_x
    """
    CodebookGeometry(n_x).check_direction(j)
    return -1.0 + (2 * j - 1) / n_x


def center_directions(n_x: int) -> np.ndarray:
    """ alpha(1), ..., alpha(n_x) as an array. """
    CodebookGeometry(n_x)
    return -1.0 + (2.0 * np.arange(1, n_x + 1) - 1.0) / n_x


def single_beam_codeword(j: int, n_x: int) -> np.ndarray:
    return steering_vector(center_direction(j, n_x), n_x)


def subarray_codeword(m_idx: int, j: int, geo: CodebookGeometry) -> np.ndarray:
    """
    Codeword of sub-array m_idx steering alpha(j): elements (m_idx-1)*l+1 .. m_idx*l of w(j).

    Built as a slice of the full-array codeword so that sub-arrays steering a common direction
    concatenate back to the full-array codeword exactly.
    """
    if isinstance(m_idx, bool) or not isinstance(m_idx, (int, np.integer)) or not 1 <= m_idx <= geo.m:
        raise InvalidArgumentError(f"Sub-array index must be in 1..{geo.m}. Got {m_idx!r}.")
    full = single_beam_codeword(j, geo.n_x)
    return full[(m_idx - 1) * geo.l: m_idx * geo.l]


def composite_codeword(direction_assignment: Sequence[int], geo: CodebookGeometry) -> np.ndarray:
    """
    [w_1(j_1); w_2(j_2); ...; w_M(j_M)] where sub-array m steers direction_assignment[m-1].
    """
    if len(direction_assignment) != geo.m:
        raise InvalidArgumentError(
            f"Expected {geo.m} directions, one per sub-array. Got {len(direction_assignment)}.")
    return np.concatenate([
        subarray_codeword(m_idx, j, geo)
        for m_idx, j in enumerate(direction_assignment, start=1)
    ])


class Codebook:
    """
    The J = n_x codewords of the single-beam codebook, kept as a J-by-n_x matrix.
    Row j-1 holds w(j). Immutable after construction.
    """

    def __init__(self, n_x: int):
        self.geometry = CodebookGeometry(n_x)

    @property
    def n_x(self):
        return self.geometry.n_x

    @cached_property
    def directions(self) -> np.ndarray:
        return center_directions(self.n_x)

    @cached_property
    def matrix(self) -> np.ndarray:
        matrix = np.stack([single_beam_codeword(j, self.n_x) for j in range(1, self.n_x + 1)])
        matrix.setflags(write=False)
        return matrix

    def codeword(self, j: int) -> np.ndarray:
        self.geometry.check_direction(j)
        return self.matrix[j - 1]

    def composite(self, direction_assignment: Sequence[int], m: int) -> np.ndarray:
        """
        Same as composite_codeword(), sliced out of the cached matrix rows.
        """
        geo = CodebookGeometry(self.n_x, m)
        if len(direction_assignment) != m:
            raise InvalidArgumentError(f"Expected {m} directions, one per sub-array. Got {len(direction_assignment)}.")
        parts = []
        for m_idx, j in enumerate(direction_assignment, start=1):
            geo.check_direction(j)
            parts.append(self.matrix[j - 1, (m_idx - 1) * geo.l: m_idx * geo.l])
        return np.concatenate(parts)

    def beam_pattern(self, j: int, grid: Sequence[float]) -> np.ndarray:
        """
        Sample A(w(j), phi) over a grid of spatial directions.
        """
        w = self.codeword(j)
        return np.array([beam_gain(w, phi) for phi in grid])

    def dump(self) -> str:
        """
        Text listing: j, alpha(j), then per-element phases in turns (phase / pi), in [-1, 1).
        """
        rows = []
        for j in range(1, self.n_x + 1):
            turns = np.angle(self.matrix[j - 1]) / np.pi
            turns = np.where(turns >= 1.0, turns - 2.0, turns)
            rows.append({"j": j, "alpha": self.directions[j - 1], "turns": turns.tolist()})
        return render("codebook.txt", n_x=self.n_x, rows=rows)
