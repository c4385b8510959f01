"""Score candidate branches on three diversity axes and greedily select.

Spatial diversity compares viewing directions, semantic diversity compares
caption embeddings, and social diversity aggregates saliency inside each
branch viewport. Selection starts from the branch with the highest social
score and keeps adding the branch that maximizes overall diversity until
the score would drop below a fraction of its previous value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .branches import CandidateBranch
from .errors import ContractError
from .geometry import Viewport, pixel_direction_grid, viewport_mask
from .ingest import SaliencyFrame

WEIGHT_SUM_TOL = 1e-9
MINMAX_DEGENERATE_SCORE = 0.5


@dataclass(frozen=True)
class DiversityWeights:
    w_spa: float = 1.0 / 3.0
    w_sem: float = 1.0 / 3.0
    w_soc: float = 1.0 / 3.0

    def __post_init__(self):
        for name, w in (("w_spa", self.w_spa), ("w_sem", self.w_sem), ("w_soc", self.w_soc)):
            if w < 0:
                raise ContractError(f"{name} must be non-negative, got {w}")
        total = self.w_spa + self.w_sem + self.w_soc
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ContractError(f"diversity weights must sum to 1, got {total!r}")

    @classmethod
    def from_raw(cls, w_spa: float, w_sem: float, w_soc: float) -> "DiversityWeights":
        """Normalize raw non-negative weights; equal scaling never changes selection."""
        total = w_spa + w_sem + w_soc
        if total <= 0:
            raise ContractError("diversity weights must not all be zero")
        return cls(w_spa / total, w_sem / total, w_soc / total)


@dataclass(frozen=True)
class DiversityBreakdown:
    d_spa: float
    d_sem: float
    d_soc: float
    overall: float


@dataclass
class SelectionStep:
    step: int
    candidate: int
    diversity: float
    stopped: bool = False

    def to_dict(self) -> dict:
        return {
            "step": int(self.step),
            "candidate": int(self.candidate),
            "diversity": float(self.diversity),
            "stopped": bool(self.stopped),
        }


@dataclass
class BranchSet:
    branches: list[CandidateBranch]
    order: list[int]  # candidate indices in selection order
    breakdown: DiversityBreakdown
    selection_trace: list[SelectionStep]
    social_scores: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __len__(self) -> int:
        return len(self.branches)


def _check_spans(a: CandidateBranch, b: CandidateBranch) -> None:
    if a.path.start_frame != b.path.start_frame or len(a.path) != len(b.path):
        raise ContractError(
            f"branch spans differ: [{a.path.start_frame}, {a.path.end_frame}] vs "
            f"[{b.path.start_frame}, {b.path.end_frame}]"
        )


def spatial_diversity(a: CandidateBranch, b: CandidateBranch) -> float:
    """Mean over frames of 0.5 * (1 - cos angle) between the two paths."""
    _check_spans(a, b)
    s = np.clip(np.einsum("ij,ij->i", a.path.vectors, b.path.vectors), -1.0, 1.0)
    return float(np.mean(0.5 * (1.0 - s)))


def semantic_diversity(a: CandidateBranch, b: CandidateBranch) -> float:
    """Mean over frames of (1 - embedding cosine similarity), clamped per frame."""
    _check_spans(a, b)
    if a.embeddings is None or b.embeddings is None:
        raise ContractError("semantic diversity needs caption embeddings on both branches")
    s = np.einsum("ij,ij->i", a.embeddings, b.embeddings)
    return float(np.mean(np.clip(1.0 - s, 0.0, 1.0)))


def social_scores(
    candidates: list[CandidateBranch], saliency: list[SaliencyFrame]
) -> np.ndarray:
    """Per-branch social score: viewport-aggregated saliency, min-max
    normalized across branches at each frame, then averaged over frames.

    Pixel contributions are weighted by cos(pitch) to undo equirectangular
    pole oversampling. A frame where every branch aggregates the same
    saliency gives every branch the neutral 0.5.
    """
    if not candidates:
        raise ContractError("social scores need at least one candidate")
    for other in candidates[1:]:
        _check_spans(candidates[0], other)
    first = candidates[0].path.start_frame
    n_frames = len(candidates[0].path)
    by_index = {f.frame_index: f for f in saliency}

    per_frame = np.empty((n_frames, len(candidates)))
    for offset in range(n_frames):
        frame_index = first + offset
        if frame_index not in by_index:
            raise ContractError(f"no saliency frame at index {frame_index}")
        grid = by_index[frame_index].grid
        height, width = grid.shape
        dirs = pixel_direction_grid(width, height)
        pitch_w = np.cos(np.radians((0.5 - (np.arange(height) + 0.5) / height) * 180.0))
        weighted = grid * pitch_w[:, None]
        raw = np.empty(len(candidates))
        for c, cand in enumerate(candidates):
            vp = Viewport(
                cand.path.direction_at(frame_index), cand.h_fov_deg, cand.v_fov_deg
            )
            raw[c] = weighted[viewport_mask(dirs, vp)].sum()
        lo, hi = raw.min(), raw.max()
        if hi - lo <= 1e-9 * max(1.0, abs(hi)):
            per_frame[offset] = MINMAX_DEGENERATE_SCORE
        else:
            per_frame[offset] = (raw - lo) / (hi - lo)
    return per_frame.mean(axis=0)


def _pair_mean(matrix: np.ndarray, members: list[int]) -> float:
    if len(members) < 2:
        return 0.0
    total = 0.0
    count = 0
    for i, a in enumerate(members):
        for b in members[i + 1 :]:
            total += matrix[a, b]
            count += 1
    return total / count


def overall_diversity(
    branches: list[CandidateBranch],
    weights: DiversityWeights,
    saliency: list[SaliencyFrame] | None = None,
    social: np.ndarray | None = None,
) -> DiversityBreakdown:
    """Weighted diversity of a branch set.

    Pairwise metrics average over unordered pairs (0 for a singleton);
    the social term is the mean per-branch score, taken from `social` when
    the caller already normalized against a wider candidate pool.
    """
    if not branches:
        raise ContractError("overall diversity needs a non-empty branch set")
    n = len(branches)
    spa = np.zeros((n, n))
    sem = np.zeros((n, n))
    have_embeddings = all(b.embeddings is not None for b in branches)
    for i in range(n):
        for j in range(i + 1, n):
            spa[i, j] = spa[j, i] = spatial_diversity(branches[i], branches[j])
            if have_embeddings:
                sem[i, j] = sem[j, i] = semantic_diversity(branches[i], branches[j])
            elif weights.w_sem > 0:
                raise ContractError("semantic diversity needs caption embeddings on both branches")
    members = list(range(n))
    d_spa = _pair_mean(spa, members)
    d_sem = _pair_mean(sem, members)
    if social is not None:
        d_soc = float(np.mean(social))
    else:
        if saliency is None:
            raise ContractError("overall diversity needs saliency frames or social scores")
        d_soc = float(np.mean(social_scores(branches, saliency)))
    overall = weights.w_spa * d_spa + weights.w_sem * d_sem + weights.w_soc * d_soc
    return DiversityBreakdown(d_spa=d_spa, d_sem=d_sem, d_soc=d_soc, overall=overall)


def set_diversity(
    members: list[int],
    spa: np.ndarray,
    sem: np.ndarray,
    soc: np.ndarray,
    weights: DiversityWeights,
) -> float:
    """Overall diversity of a member subset from precomputed metrics."""
    return (
        weights.w_spa * _pair_mean(spa, members)
        + weights.w_sem * _pair_mean(sem, members)
        + weights.w_soc * float(np.mean(soc[members]))
    )


def greedy_select(
    spa: np.ndarray,
    sem: np.ndarray,
    soc: np.ndarray,
    weights: DiversityWeights,
    lambda_: float = 0.75,
    max_options: int = 5,
) -> tuple[list[int], list[SelectionStep]]:
    """Greedy diversity-maximizing selection over precomputed metrics.

    Starts from the highest social score, then repeatedly adds the
    candidate maximizing set diversity; stops when the next addition would
    drop diversity below `lambda_` times its current value, at
    `max_options`, or when candidates run out. Ties resolve to the lowest
    candidate index.
    """
    n = len(soc)
    if n == 0:
        raise ContractError("selection needs at least one candidate")
    first = int(np.argmax(soc))  # argmax takes the lowest index on ties
    selected = [first]
    current = set_diversity(selected, spa, sem, soc, weights)
    trace = [SelectionStep(step=0, candidate=first, diversity=current)]
    remaining = [i for i in range(n) if i != first]
    while remaining and len(selected) < max_options:
        best = None
        best_score = -math.inf
        for c in remaining:
            score = set_diversity(selected + [c], spa, sem, soc, weights)
            if score > best_score:
                best_score = score
                best = c
        if best_score < lambda_ * current:
            trace.append(
                SelectionStep(
                    step=len(selected), candidate=best, diversity=best_score, stopped=True
                )
            )
            break
        selected.append(best)
        current = best_score
        remaining.remove(best)
        trace.append(SelectionStep(step=len(selected) - 1, candidate=best, diversity=current))
    return selected, trace


def pairwise_metrics(
    candidates: list[CandidateBranch],
    saliency: list[SaliencyFrame],
    weights: DiversityWeights,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Precompute the spatial/semantic matrices and pooled social vector."""
    n = len(candidates)
    spa = np.zeros((n, n))
    sem = np.zeros((n, n))
    need_sem = weights.w_sem > 0
    have_embeddings = all(c.embeddings is not None for c in candidates)
    for i in range(n):
        for j in range(i + 1, n):
            spa[i, j] = spa[j, i] = spatial_diversity(candidates[i], candidates[j])
            if have_embeddings:
                sem[i, j] = sem[j, i] = semantic_diversity(candidates[i], candidates[j])
            elif need_sem:
                raise ContractError("semantic diversity needs caption embeddings on both branches")
    soc = social_scores(candidates, saliency)
    return spa, sem, soc


def select_branches(
    candidates: list[CandidateBranch],
    weights: DiversityWeights,
    saliency: list[SaliencyFrame],
    lambda_: float = 0.75,
    max_options: int = 5,
) -> BranchSet:
    """Diversity-optimized, ordered branch set for one segment."""
    if not candidates:
        raise ContractError("selection needs at least one candidate")
    spa, sem, soc = pairwise_metrics(candidates, saliency, weights)
    order, trace = greedy_select(spa, sem, soc, weights, lambda_, max_options)
    breakdown = DiversityBreakdown(
        d_spa=_pair_mean(spa, order),
        d_sem=_pair_mean(sem, order),
        d_soc=float(np.mean(soc[order])),
        overall=set_diversity(order, spa, sem, soc, weights),
    )
    return BranchSet(
        branches=[candidates[i] for i in order],
        order=order,
        breakdown=breakdown,
        selection_trace=trace,
        social_scores=soc[order],
    )
