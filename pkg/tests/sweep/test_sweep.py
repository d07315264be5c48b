import numpy as np
import pytest

from beamtrain.codebook import Codebook, CodebookGeometry, composite_codeword
from beamtrain.service import ObservationLog, identify_multi_beam
from beamtrain.sweep import (
    Bin, build_rh_plan, build_sweep_plan, intra_set_distance, later_round_bin,
    max_min_intra_bin_distance, round1_bin, training_symbols,
)
from beamtrain.utils import InvalidArgumentError

GEO_32_4 = CodebookGeometry(32, 4)


def test_01_intra_set_distance():
    assert intra_set_distance({1, 9, 17, 25}) == 8
    assert intra_set_distance({3, 4}) == 1
    assert intra_set_distance({5, 13, 21, 29}) == 8
    with pytest.raises(InvalidArgumentError):
        intra_set_distance({3})


def test_02_bin_goldens():
    assert round1_bin(1, GEO_32_4).directions == (1, 9, 17, 25)
    assert round1_bin(5, GEO_32_4).directions == (5, 13, 21, 29)
    assert round1_bin(8, GEO_32_4).directions == (8, 16, 24, 32)
    assert later_round_bin(2, 1, GEO_32_4).directions == (1, 9, 21, 29)
    assert later_round_bin(3, 1, GEO_32_4).directions == (1, 13, 17, 29)
    with pytest.raises(InvalidArgumentError):
        round1_bin(9, GEO_32_4)
    with pytest.raises(InvalidArgumentError):
        later_round_bin(2, 5, GEO_32_4)
    with pytest.raises(InvalidArgumentError):
        later_round_bin(4, 1, GEO_32_4)


def test_03_bin_ordering():
    with pytest.raises(InvalidArgumentError):
        Bin(1, 1, (9, 1))
    _bin = Bin(2, 3, (4, 12))
    assert 12 in _bin and 5 not in _bin
    assert len(_bin) == 2
    assert _bin.to_dict() == {"round": 2, "slot": 3, "directions": [4, 12]}


@pytest.mark.parametrize("n_x,m,expected", [(160, 2, 120), (160, 4, 80), (160, 8, 50), (32, 4, 16), (32, 1, 32)])
def test_04_training_symbols(n_x, m, expected):
    geo = CodebookGeometry(n_x, m)
    assert training_symbols(geo) == expected
    assert build_sweep_plan(geo).total_symbols == expected


def test_05_plan_shape():
    plan = build_sweep_plan(GEO_32_4)
    assert len(plan) == 3
    assert [len(_round) for _round in plan] == [8, 4, 4]
    for _round in plan:
        assert all(len(_bin) == 4 for _bin in _round)
    assert plan.bin(2, 1).directions == (1, 9, 21, 29)
    assert plan.bin(3, 1).directions == (1, 13, 17, 29)
    with pytest.raises(InvalidArgumentError):
        plan.bin(2, 5)


@pytest.mark.parametrize("n_x,m", [(32, 4), (160, 2), (160, 8), (8, 2)])
def test_06_round1_coverage(n_x, m):
    plan = build_sweep_plan(CodebookGeometry(n_x, m))
    directions = sorted(j for _bin in plan[0] for j in _bin)
    assert directions == list(range(1, n_x + 1))


def test_07_intra_bin_distances():
    """ Follows the bin formula: for two sub-arrays round 2 keeps a distance of 3L/2, not L. """
    plan = build_sweep_plan(GEO_32_4)
    assert [max_min_intra_bin_distance(plan, r) for r in (1, 2, 3)] == [8, 8, 4]
    assert max_min_intra_bin_distance(build_sweep_plan(CodebookGeometry(160, 8)), 1) == 20
    # with two sub-arrays a round-2 bin is {b, b + 3L/2}
    assert max_min_intra_bin_distance(build_sweep_plan(CodebookGeometry(160, 2)), 2) == 120
    for m in (4, 8):
        plan = build_sweep_plan(CodebookGeometry(160, m))
        assert max_min_intra_bin_distance(plan, 2) == 160 // m
    assert max_min_intra_bin_distance(build_sweep_plan(CodebookGeometry(32)), 1) == 32


def _pairings(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for i, other in enumerate(rest):
        for tail in _pairings(rest[:i] + rest[i + 1:]):
            yield [(first, other)] + tail


def test_08_round1_partition_is_max_min():
    """ No partition of 1..8 into pairs beats the round-1 bins. """
    best = max(min(q - p for p, q in pairing) for pairing in _pairings(list(range(1, 9))))
    plan = build_sweep_plan(CodebookGeometry(8, 2))
    assert max_min_intra_bin_distance(plan, 1) == best == 4


@pytest.mark.parametrize("n_x,m", [(32, 4), (32, 2), (160, 8), (160, 4)])
def test_09_every_direction_identifiable(n_x, m):
    """ Ideal decisions (power above threshold iff the bin holds the direction) isolate every direction. """
    geo = CodebookGeometry(n_x, m)
    plan = build_sweep_plan(geo)
    for b in range(1, geo.l + 1):
        for r in range(2, geo.rounds + 1):
            plan.intersecting_slot(r, b)
    for j in range(1, n_x + 1):
        records = {(_bin.round, _bin.slot): float(j in _bin) for _bin in plan.symbols()}
        state, = identify_multi_beam(ObservationLog.from_records(plan, records), plan)
        assert state.identified == j
        assert [len(c) for c in state.candidates] == [m >> (r - 1) for r in range(1, geo.rounds + 1)]


def test_10_codewords():
    plan = build_sweep_plan(GEO_32_4)
    codebook = Codebook(32)
    codewords = plan.codewords(codebook)
    assert codewords.shape == (16, 32)
    np.testing.assert_allclose(codewords[0], composite_codeword((1, 9, 17, 25), GEO_32_4), rtol=0, atol=1e-15)
    assert plan.codewords(codebook) is codewords


def test_11_dump():
    lines = build_sweep_plan(GEO_32_4).dump().splitlines()
    assert len(lines) == 16
    assert lines[0] == "1,1,1,9,17,25"
    assert lines[4] == "1,5,5,13,21,29"
    assert lines[8] == "2,1,1,9,21,29"
    assert lines[12] == "3,1,1,13,17,29"


def test_12_rh_plan():
    geo = CodebookGeometry(160, 2)
    plan = build_rh_plan(geo, seed=3, budget=120)
    assert plan.total_symbols == 120
    assert [len(_round) for _round in plan] == [80, 40]
    assert plan[0] == build_sweep_plan(geo)[0]
    assert plan.symbols() == build_rh_plan(geo, seed=3, budget=120).symbols()
    assert plan.symbols() != build_rh_plan(geo, seed=4, budget=120).symbols()
    truncated = [j for _bin in plan[1] for j in _bin]
    assert len(truncated) == len(set(truncated)) == 80


def test_13_rh_plan_coverage():
    geo = CodebookGeometry(32, 4)
    plan = build_rh_plan(geo, seed=0, budget=3 * geo.l + 3)
    assert [len(_round) for _round in plan] == [8, 8, 8, 3]
    for _round in plan[1:3]:
        assert sorted(j for _bin in _round for j in _bin) == list(range(1, 33))
    with pytest.raises(InvalidArgumentError):
        build_rh_plan(geo, seed=0, budget=7)
