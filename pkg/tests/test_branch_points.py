"""Tests for exclusion zones and branching-point detection."""

import numpy as np
import pytest

from storysphere.branch_points import (
    TimeInterval,
    detect_branching_points,
    exclusion_zones,
)
from storysphere.errors import ContractError
from storysphere.ingest import LoudnessSeries, TranscriptSegment


def speech(start, end):
    return TranscriptSegment(start=start, end=end, text="x")


def quiet(n=100, rate=10.0):
    return LoudnessSeries(sample_rate=rate, values=np.full(n, 0.1))


# ---- exclusion zones -----------------------------------------------------


def test_no_zones_for_silence():
    assert exclusion_zones([], quiet()) == []


def test_speech_passes_through():
    zones = exclusion_zones([speech(35, 45)], quiet())
    assert zones == [TimeInterval(35.0, 45.0, "speech")]


def test_loud_music_run():
    values = np.full(200, 0.1)
    values[100:120] = 0.9  # 10.0 s to 12.0 s at 10 samples/s
    zones = exclusion_zones([], LoudnessSeries(sample_rate=10.0, values=values))
    assert zones == [TimeInterval(10.0, 12.0, "loud_music")]


def test_threshold_is_strict():
    values = np.full(50, 0.8)
    assert exclusion_zones([], LoudnessSeries(sample_rate=10.0, values=values)) == []
    values = np.full(50, 0.8001)
    zones = exclusion_zones([], LoudnessSeries(sample_rate=10.0, values=values))
    assert len(zones) == 1 and zones[0].kind == "loud_music"


def test_same_kind_zones_coalesce():
    zones = exclusion_zones([speech(1, 5), speech(4, 9)], quiet())
    assert zones == [TimeInterval(1.0, 9.0, "speech")]


def test_mixed_kinds_stay_separate():
    values = np.full(100, 0.1)
    values[20:40] = 0.95
    zones = exclusion_zones([speech(1, 3)], LoudnessSeries(sample_rate=10.0, values=values))
    assert [z.kind for z in zones] == ["speech", "loud_music"]


# ---- branching points ----------------------------------------------------


def test_simple_sweep():
    points = detect_branching_points([0.0, 40.0, 80.0], [], 30.0)
    assert [(p.time, p.source) for p in points] == [(40.0, "scene_cut"), (80.0, "scene_cut")]
    assert [p.id for p in points] == [0, 1]


def test_merge_keeps_earlier():
    points = detect_branching_points([0.0, 10.0, 25.0, 70.0], [], 30.0)
    assert [p.time for p in points] == [10.0, 70.0]
    assert points[0].source == "merged"  # absorbed the 25 s candidate
    assert points[1].source == "scene_cut"


def test_exactly_min_interval_merges():
    points = detect_branching_points([0.0, 10.0, 40.0], [], 30.0)
    assert [p.time for p in points] == [10.0]


def test_shift_out_of_speech():
    zones = [TimeInterval(35.0, 45.0, "speech")]
    points = detect_branching_points([0.0, 40.0], zones, 30.0)
    assert [(p.time, p.source) for p in points] == [(45.0, "shifted")]


def test_shift_chains_across_zones():
    zones = [TimeInterval(35.0, 45.0, "speech"), TimeInterval(45.0, 50.0, "loud_music")]
    points = detect_branching_points([0.0, 40.0], zones, 30.0)
    assert [p.time for p in points] == [50.0]


def test_zone_end_is_allowed():
    zones = [TimeInterval(35.0, 45.0, "speech")]
    points = detect_branching_points([0.0, 45.0], zones, 30.0)
    assert [(p.time, p.source) for p in points] == [(45.0, "scene_cut")]


def test_zero_never_a_point():
    assert detect_branching_points([0.0], [], 30.0) == []
    assert detect_branching_points([], [], 30.0) == []


def test_unsorted_boundaries_rejected():
    with pytest.raises(ContractError):
        detect_branching_points([40.0, 10.0], [], 30.0)


def _hand_sweep(candidates, min_interval):
    """Independent oracle: keep the earlier candidate of any pair closer
    than the interval."""
    kept = []
    for t in candidates:
        if not kept or t - kept[-1] > min_interval:
            kept.append(t)
    return kept


def test_random_sets_match_hand_sweep_and_invariants():
    rng = np.random.RandomState(42)
    for trial in range(200):
        n = rng.randint(1, 15)
        boundaries = sorted(set(np.round(rng.uniform(0, 300, size=n), 1)))
        n_zones = rng.randint(0, 4)
        zones = []
        for _ in range(n_zones):
            start = round(rng.uniform(0, 280), 1)
            zones.append(
                TimeInterval(start, start + round(rng.uniform(1, 20), 1), "speech")
            )
        points = detect_branching_points(boundaries, zones, 30.0)
        times = [p.time for p in points]

        # spacing strictly greater than the interval
        assert all(b - a > 30.0 for a, b in zip(times, times[1:]))
        # never strictly inside a zone
        for t in times:
            assert not any(z.start < t < z.end for z in zones)
        # t = 0 never appears
        assert 0.0 not in times
        # oracle: shift each candidate by hand, then sweep by hand
        shifted = []
        for t in boundaries:
            if t <= 0:
                continue
            moved = True
            while moved:
                moved = False
                for z in zones:
                    if z.start <= t < z.end:
                        t = z.end
                        moved = True
            shifted.append(t)
        assert times == _hand_sweep(sorted(shifted), 30.0)

        # determinism
        again = detect_branching_points(boundaries, zones, 30.0)
        assert again == points


def test_branch_point_ids_and_order():
    points = detect_branching_points([0.0, 31.0, 62.0, 93.0, 124.0], [], 30.0)
    assert [p.id for p in points] == [0, 1, 2, 3]
    assert points == sorted(points, key=lambda p: p.time)
