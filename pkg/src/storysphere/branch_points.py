"""Turn scene boundaries, speech, and loudness into ordered branching points.

Candidates come from scene cuts. Any candidate that lands during speech or
loud music is shifted to the end of that region, then candidates closer
than the minimum interval are merged into the earlier one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from .ingest import LoudnessSeries, TranscriptSegment

SPEECH = "speech"
LOUD_MUSIC = "loud_music"

SOURCE_SCENE_CUT = "scene_cut"
SOURCE_MERGED = "merged"
SOURCE_SHIFTED = "shifted"


@dataclass(frozen=True)
class TimeInterval:
    start: float
    end: float
    kind: str

    def __post_init__(self):
        if not self.start < self.end:
            raise ContractError(f"interval start {self.start} must precede end {self.end}")

    def contains(self, t: float) -> bool:
        """Half-open containment: the region ends the instant `end` is reached."""
        return self.start <= t < self.end


@dataclass(frozen=True)
class BranchPoint:
    id: int
    time: float
    source: str


def _coalesce(intervals: list[TimeInterval], kind: str) -> list[TimeInterval]:
    merged: list[list[float]] = []
    for iv in sorted(intervals, key=lambda i: (i.start, i.end)):
        if merged and iv.start <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], iv.end)
        else:
            merged.append([iv.start, iv.end])
    return [TimeInterval(a, b, kind) for a, b in merged]


def exclusion_zones(
    transcript: list[TranscriptSegment],
    loudness: LoudnessSeries,
    rms_threshold: float = 0.8,
) -> list[TimeInterval]:
    """Regions unsuitable for branching: speech plus loud-music runs.

    Loud music is any maximal run of loudness samples above the RMS
    threshold. Overlapping intervals of the same kind are coalesced.
    """
    speech = _coalesce(
        [TimeInterval(seg.start, seg.end, SPEECH) for seg in transcript], SPEECH
    )
    loud: list[TimeInterval] = []
    values = loudness.values
    if len(values):
        above = values > rms_threshold
        edges = np.flatnonzero(np.diff(np.concatenate([[False], above, [False]])))
        for lo, hi in zip(edges[::2], edges[1::2]):
            loud.append(
                TimeInterval(
                    float(lo / loudness.sample_rate), float(hi / loudness.sample_rate), LOUD_MUSIC
                )
            )
    return sorted(speech + loud, key=lambda i: (i.start, i.end, i.kind))


def _shift_out_of_zones(t: float, zones: list[TimeInterval]) -> float:
    """Move a time to the end of whatever zone covers it, repeating if the
    landing spot falls inside another zone."""
    moved = True
    while moved:
        moved = False
        for zone in zones:
            if zone.contains(t):
                t = zone.end
                moved = True
    return t


def detect_branching_points(
    scene_boundaries: list[float],
    zones: list[TimeInterval],
    min_interval: float = 30.0,
) -> list[BranchPoint]:
    """Final ordered branching points from scene-cut candidates.

    Candidates inside an exclusion zone shift to the zone end; the
    remaining candidates are swept in time order, dropping any candidate no
    more than `min_interval` after the last kept one. t = 0 is the playback
    start and never a branching point.
    """
    if list(scene_boundaries) != sorted(scene_boundaries):
        raise ContractError("scene boundaries must be sorted ascending")
    candidates = []
    for t in scene_boundaries:
        if t <= 0.0:
            continue
        shifted = _shift_out_of_zones(t, zones)
        candidates.append((shifted, shifted != t))
    candidates.sort()

    points: list[BranchPoint] = []
    last_kept: float | None = None
    last_source: str | None = None
    for t, was_shifted in candidates:
        if last_kept is not None and t - last_kept <= min_interval:
            # Merged into the earlier point; upgrade its source unless shifted.
            if last_source == SOURCE_SCENE_CUT:
                last_source = SOURCE_MERGED
                points[-1] = BranchPoint(points[-1].id, points[-1].time, SOURCE_MERGED)
            continue
        source = SOURCE_SHIFTED if was_shifted else SOURCE_SCENE_CUT
        points.append(BranchPoint(id=len(points), time=t, source=source))
        last_kept = t
        last_source = source
    return points
