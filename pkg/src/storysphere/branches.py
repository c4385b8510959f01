"""Generate candidate branches between consecutive branching points.

Per frame: threshold the saliency map, take weighted centroids of the
connected salient regions (the map wraps horizontally), and merge nearby
centroids by agglomerative clustering. Per segment: link directions across
frames into viewing paths, smooth them, and attach viewports and caption
embeddings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import ContractError
from .geometry import (
    Direction,
    ViewingPath,
    Viewport,
    angular_distance,
    dir_from_angles,
    smooth_path,
)
from .ingest import CaptionEntry, SaliencyFrame

DUPLICATE_PATH_ANGLE_DEG = 1.0


@dataclass(frozen=True)
class SceneSegment:
    """Frames between two branching points (or video start/end)."""

    index: int
    start_point_id: int | None
    end_point_id: int | None
    first_frame: int
    last_frame: int

    def __post_init__(self):
        if self.last_frame < self.first_frame:
            raise ContractError(
                f"segment [{self.first_frame}, {self.last_frame}] has no frames"
            )

    @property
    def n_frames(self) -> int:
        return self.last_frame - self.first_frame + 1

    @property
    def start_s(self) -> float:
        return float(self.first_frame)

    @property
    def end_s(self) -> float:
        return float(self.last_frame + 1)


@dataclass
class CandidateBranch:
    """A smoothed viewing path with its viewport track and caption data."""

    path: ViewingPath
    h_fov_deg: float = 120.0
    v_fov_deg: float = 90.0
    captions: list[str | None] = field(default_factory=list)
    embeddings: np.ndarray | None = None  # (n_frames, dim) unit rows
    seed_index: int = 0
    degenerate: bool = False

    def viewport_at(self, frame: int) -> Viewport:
        return Viewport(self.path.direction_at(frame), self.h_fov_deg, self.v_fov_deg)

    @property
    def viewport_track(self) -> list[Viewport]:
        return [Viewport(d, self.h_fov_deg, self.v_fov_deg) for d in self.path.directions()]


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def extract_viewing_directions(
    frame: SaliencyFrame,
    region_threshold: float = 0.5,
    min_area_fraction: float = 0.001,
) -> list[Direction]:
    """Saliency-weighted centroid direction of each salient region.

    Regions are 4-connected components of pixels at or above
    `region_threshold` times the frame maximum; the component search wraps
    across the left/right image seam. Components smaller than
    `min_area_fraction` of the frame are noise and dropped. The x centroid
    uses the circular mean so wrapped regions center correctly.
    """
    grid = frame.grid
    height, width = grid.shape
    peak = float(grid.max())
    if peak <= 0.0:
        return []
    mask = grid >= region_threshold * peak
    labels, n_labels = ndimage.label(mask)
    if n_labels == 0:
        return []
    uf = _UnionFind(n_labels + 1)
    left, right = labels[:, 0], labels[:, -1]
    for a, b in zip(left, right):
        if a and b:
            uf.union(int(a), int(b))
    roots = np.array([uf.find(i) for i in range(n_labels + 1)])
    labels = roots[labels]

    min_area = min_area_fraction * width * height
    ys, xs = np.nonzero(labels)
    weights = grid[ys, xs]
    comp = labels[ys, xs]
    directions = []
    for label_id in sorted(set(comp.tolist())):
        sel = comp == label_id
        if sel.sum() < min_area:
            continue
        w = weights[sel]
        total = w.sum()
        y_c = float((w * ys[sel]).sum() / total)
        theta = (xs[sel] + 0.5) / width * 2.0 * math.pi
        x_angle = math.atan2(float((w * np.sin(theta)).sum()), float((w * np.cos(theta)).sum()))
        yaw = (x_angle / (2.0 * math.pi)) % 1.0
        yaw = (yaw - 0.5) * 360.0
        pitch = (0.5 - (y_c + 0.5) / height) * 180.0
        directions.append(dir_from_angles(yaw, pitch))
    return directions


def _agglomerate(vectors: np.ndarray, merge_angle_deg: float) -> tuple[np.ndarray, np.ndarray]:
    """Agglomerative merge with centroid linkage on the sphere.

    Repeatedly merges the closest pair of clusters whose centroids are no
    more than `merge_angle_deg` apart; a cluster centroid is the
    renormalized mean of its member unit vectors. Returns (centroids,
    labels); ties resolve to the lowest cluster indices for determinism.
    """
    n = len(vectors)
    if n == 0:
        return np.zeros((0, 3)), np.zeros(0, dtype=int)
    members: list[list[int]] = [[i] for i in range(n)]
    centroids: list[np.ndarray] = [np.asarray(v, dtype=float) for v in vectors]

    def centroid_of(idx: list[int]) -> np.ndarray:
        mean = vectors[idx].mean(axis=0)
        norm = np.linalg.norm(mean)
        return vectors[idx[0]] if norm < 1e-12 else mean / norm

    while len(members) > 1:
        best = None
        best_angle = None
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                dot = float(np.clip(np.dot(centroids[i], centroids[j]), -1.0, 1.0))
                angle = math.degrees(math.acos(dot))
                if best_angle is None or angle < best_angle:
                    best_angle = angle
                    best = (i, j)
        if best is None or best_angle > merge_angle_deg:
            break
        i, j = best
        members[i] = members[i] + members[j]
        centroids[i] = centroid_of(members[i])
        del members[j]
        del centroids[j]

    labels = np.zeros(n, dtype=int)
    for cluster_id, idx in enumerate(members):
        labels[idx] = cluster_id
    return np.array(centroids), labels


def cluster_directions(
    directions: list[Direction], merge_angle_deg: float = 30.0
) -> list[Direction]:
    """Merge directions closer than `merge_angle_deg` into their centroids."""
    if not directions:
        return []
    vectors = np.array([d.as_array() for d in directions])
    centroids, _ = _agglomerate(vectors, merge_angle_deg)
    return [Direction.from_array(c) for c in centroids]


def _nearest(target: np.ndarray, options: list[Direction]) -> Direction:
    best = options[0]
    best_dot = -2.0
    for d in options:
        dot = float(np.dot(target, d.as_array()))
        if dot > best_dot + 1e-15:
            best_dot = dot
            best = d
    return best


def link_paths(
    per_frame: list[list[Direction]], segment: SceneSegment
) -> tuple[list[ViewingPath], bool]:
    """Link per-frame directions into full-segment viewing paths.

    Seeds one path per direction at the frame with the most directions
    (earliest frame on ties) and propagates forward and backward, always
    stepping to the adjacent frame's direction nearest the path's current
    end. Frames with no directions hold the previous direction. A segment
    with no directions anywhere yields one degenerate path at yaw 0,
    pitch 0.
    """
    if len(per_frame) != segment.n_frames:
        raise ContractError(
            f"per-frame directions ({len(per_frame)}) must cover segment frames ({segment.n_frames})"
        )
    counts = [len(dirs) for dirs in per_frame]
    if max(counts, default=0) == 0:
        flat = np.tile(dir_from_angles(0.0, 0.0).as_array(), (segment.n_frames, 1))
        return [ViewingPath(segment.first_frame, flat)], True

    seed = int(np.argmax(counts))  # argmax takes the earliest frame on ties
    n = segment.n_frames
    tracks = [np.empty((n, 3)) for _ in per_frame[seed]]
    for track, d in zip(tracks, per_frame[seed]):
        track[seed] = d.as_array()
    for f in range(seed + 1, n):
        for track in tracks:
            prev = track[f - 1]
            track[f] = _nearest(prev, per_frame[f]).as_array() if per_frame[f] else prev
    for f in range(seed - 1, -1, -1):
        for track in tracks:
            nxt = track[f + 1]
            track[f] = _nearest(nxt, per_frame[f]).as_array() if per_frame[f] else nxt
    return [ViewingPath(segment.first_frame, t) for t in tracks], False


def _dedupe(paths: list[ViewingPath]) -> list[tuple[int, ViewingPath]]:
    """Drop paths that track an earlier one within 1 degree at every frame."""
    kept: list[tuple[int, ViewingPath]] = []
    for seed_index, path in enumerate(paths):
        duplicate = False
        for _, other in kept:
            dots = np.clip(np.einsum("ij,ij->i", path.vectors, other.vectors), -1.0, 1.0)
            if np.all(np.degrees(np.arccos(dots)) < DUPLICATE_PATH_ANGLE_DEG):
                duplicate = True
                break
        if not duplicate:
            kept.append((seed_index, path))
    return kept


def attach_captions(
    path: ViewingPath,
    captions_by_frame: dict[int, list[CaptionEntry]],
    embedding_dim: int,
) -> tuple[list[str | None], np.ndarray | None]:
    """Per-frame caption and embedding from the nearest manifest entry.

    For each frame, candidates are the entries at that frame, falling back
    to the nearest frame that has any; among them the entry whose direction
    is closest to the path direction wins. With no entries at all, captions
    stay None and embeddings are absent.
    """
    if not captions_by_frame:
        return [None] * len(path), None
    frames_with_entries = sorted(captions_by_frame)
    captions: list[str | None] = []
    embeddings = np.empty((len(path), embedding_dim))
    for offset, frame in enumerate(range(path.start_frame, path.end_frame + 1)):
        if frame in captions_by_frame:
            entries = captions_by_frame[frame]
        else:
            nearest_frame = min(frames_with_entries, key=lambda f: (abs(f - frame), f))
            entries = captions_by_frame[nearest_frame]
        direction = path.direction_at(frame)
        entry = min(entries, key=lambda e: angular_distance(direction, e.direction))
        captions.append(entry.caption)
        embeddings[offset] = entry.embedding
    return captions, embeddings


def build_candidates(
    segment: SceneSegment,
    saliency: list[SaliencyFrame],
    captions_by_frame: dict[int, list[CaptionEntry]],
    embedding_dim: int,
    region_threshold: float = 0.5,
    min_area_fraction: float = 0.001,
    merge_angle_deg: float = 30.0,
    smoothing_window: int = 5,
    h_fov_deg: float = 120.0,
    v_fov_deg: float = 90.0,
) -> list[CandidateBranch]:
    """Full candidate generation for one segment: extract, cluster, link,
    smooth, dedupe, and attach viewports and captions."""
    per_frame = []
    for frame in range(segment.first_frame, segment.last_frame + 1):
        dirs = extract_viewing_directions(saliency[frame], region_threshold, min_area_fraction)
        per_frame.append(cluster_directions(dirs, merge_angle_deg))
    paths, degenerate = link_paths(per_frame, segment)
    smoothed = [smooth_path(p, smoothing_window) for p in paths]
    candidates = []
    for seed_index, path in _dedupe(smoothed):
        captions, embeddings = attach_captions(path, captions_by_frame, embedding_dim)
        candidates.append(
            CandidateBranch(
                path=path,
                h_fov_deg=h_fov_deg,
                v_fov_deg=v_fov_deg,
                captions=captions,
                embeddings=embeddings,
                seed_index=seed_index,
                degenerate=degenerate,
            )
        )
    return candidates
