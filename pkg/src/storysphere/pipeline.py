"""End-to-end compilation: feature inputs in, branch graph document out.

GraphCompiler follows the scikit-learn estimator protocol: constructor
parameters mirror CompileConfig, fit() runs the pipeline and exposes the
result as fitted attributes, and get_params/set_params make the whole
pipeline configurable like any other estimator.
"""

from __future__ import annotations

import math

from sklearn.base import BaseEstimator

from .branch_points import BranchPoint, detect_branching_points, exclusion_zones
from .branches import CandidateBranch, SceneSegment, build_candidates
from .config import CompileConfig
from .diversity import DiversityWeights, select_branches
from .errors import ProviderError
from .graph import BranchGraph, GraphBranch, GraphScene
from .ingest import CaptionEntry, ProjectInputs, detect_scene_boundaries
from .narration import fill_descriptions, make_provider, narration_slot
from .geometry import vectors_to_angles


class _UnavailableProvider:
    """Stands in when provider construction fails; every request degrades."""

    def __init__(self, reason: str):
        self.reason = reason

    def generate(self, kind, key, request):
        raise ProviderError(f"provider unavailable: {self.reason}")


def plan_segments(
    branch_points: list[BranchPoint], n_frames: int
) -> tuple[list[BranchPoint], list[SceneSegment]]:
    """Scene segments tiling the frame grid between branching points.

    A point whose first scene frame would fall past the grid cannot open a
    scene and is dropped (ids reassigned). Frame f covers [f, f+1) s, so a
    point at time t opens the scene at frame ceil(t).
    """
    usable = []
    for p in branch_points:
        first = int(math.ceil(p.time))
        if 1 <= first <= n_frames - 1:
            usable.append(BranchPoint(id=len(usable), time=p.time, source=p.source))
    segments = []
    start_frame = 0
    for p in usable:
        first = int(math.ceil(p.time))
        segments.append(
            SceneSegment(
                index=len(segments),
                start_point_id=None if not segments else usable[len(segments) - 1].id,
                end_point_id=p.id,
                first_frame=start_frame,
                last_frame=first - 1,
            )
        )
        start_frame = first
    segments.append(
        SceneSegment(
            index=len(segments),
            start_point_id=usable[-1].id if usable else None,
            end_point_id=None,
            first_frame=start_frame,
            last_frame=n_frames - 1,
        )
    )
    return usable, segments


def _captions_by_frame(captions: list[CaptionEntry]) -> dict[int, list[CaptionEntry]]:
    by_frame: dict[int, list[CaptionEntry]] = {}
    for entry in captions:
        by_frame.setdefault(entry.frame_index, []).append(entry)
    return by_frame


def _graph_branch(
    index: int, cand: CandidateBranch, social: float, slot
) -> GraphBranch:
    yaw, pitch = vectors_to_angles(cand.path.vectors)
    path = [
        (cand.path.start_frame + k, float(yaw[k]), float(pitch[k]))
        for k in range(len(cand.path))
    ]
    captions = [
        (cand.path.start_frame + k, c) for k, c in enumerate(cand.captions) if c is not None
    ]
    return GraphBranch(
        index=index,
        title="",
        seed_index=cand.seed_index,
        degenerate=cand.degenerate,
        social_score=social,
        h_fov_deg=cand.h_fov_deg,
        v_fov_deg=cand.v_fov_deg,
        path=path,
        captions=captions,
        narration=slot,
    )


class GraphCompiler(BaseEstimator):
    """Compile validated project inputs into a branch graph.

    Parameters mirror CompileConfig and default to the documented pipeline
    constants, so `GraphCompiler().fit(inputs)` reproduces the reference
    configuration.
    """

    def __init__(
        self,
        rms_threshold=0.8,
        min_interval_s=30.0,
        merge_angle_deg=30.0,
        smoothing_window=5,
        h_fov_deg=120.0,
        v_fov_deg=90.0,
        region_threshold=0.5,
        min_area_fraction=0.001,
        scene_threshold=0.11,
        w_spa=1.0 / 3.0,
        w_sem=1.0 / 3.0,
        w_soc=1.0 / 3.0,
        diversity_lambda=0.75,
        max_options=5,
        words_per_second=3.0,
        provider="stub",
        provider_file=None,
        title_word_budget=8,
    ):
        self.rms_threshold = rms_threshold
        self.min_interval_s = min_interval_s
        self.merge_angle_deg = merge_angle_deg
        self.smoothing_window = smoothing_window
        self.h_fov_deg = h_fov_deg
        self.v_fov_deg = v_fov_deg
        self.region_threshold = region_threshold
        self.min_area_fraction = min_area_fraction
        self.scene_threshold = scene_threshold
        self.w_spa = w_spa
        self.w_sem = w_sem
        self.w_soc = w_soc
        self.diversity_lambda = diversity_lambda
        self.max_options = max_options
        self.words_per_second = words_per_second
        self.provider = provider
        self.provider_file = provider_file
        self.title_word_budget = title_word_budget

    @classmethod
    def from_config(cls, config: CompileConfig) -> "GraphCompiler":
        return cls(**config.to_dict())

    def config(self) -> CompileConfig:
        """Validated configuration from the current parameters."""
        return CompileConfig(**self.get_params())

    def fit(self, inputs: ProjectInputs, y=None):
        """Run the full pipeline; exposes graph_, report_, and warnings_."""
        cfg = self.config()
        weights = DiversityWeights.from_raw(cfg.w_spa, cfg.w_sem, cfg.w_soc)
        n_frames = inputs.n_frames

        boundaries = detect_scene_boundaries(inputs.frames, cfg.scene_threshold, inputs.fps)
        zones = exclusion_zones(inputs.transcript, inputs.loudness, cfg.rms_threshold)
        points = detect_branching_points(boundaries, zones, cfg.min_interval_s)
        points, segments = plan_segments(points, n_frames)

        captions_by_frame = _captions_by_frame(inputs.captions)
        warnings: list[str] = []
        scenes: list[GraphScene] = []
        scene_reports = []
        for segment in segments:
            candidates = build_candidates(
                segment,
                inputs.saliency,
                captions_by_frame,
                inputs.embedding_dim,
                region_threshold=cfg.region_threshold,
                min_area_fraction=cfg.min_area_fraction,
                merge_angle_deg=cfg.merge_angle_deg,
                smoothing_window=cfg.smoothing_window,
                h_fov_deg=cfg.h_fov_deg,
                v_fov_deg=cfg.v_fov_deg,
            )
            if any(c.degenerate for c in candidates):
                warnings.append(f"scene {segment.index}: no salient regions, degenerate branch")
            branch_set = select_branches(
                candidates,
                weights,
                inputs.saliency,
                lambda_=cfg.diversity_lambda,
                max_options=cfg.max_options,
            )
            slot_proto = narration_slot(
                (segment.start_s, segment.end_s), inputs.transcript, cfg.words_per_second
            )
            if not slot_proto.placeable:
                warnings.append(f"scene {segment.index}: narration slot unplaceable")
            branches = []
            for b, cand in enumerate(branch_set.branches):
                slot = narration_slot(
                    (segment.start_s, segment.end_s), inputs.transcript, cfg.words_per_second
                )
                branches.append(
                    _graph_branch(b, cand, float(branch_set.social_scores[b]), slot)
                )
            scenes.append(
                GraphScene(
                    index=segment.index,
                    start_point=segment.start_point_id,
                    end_point=segment.end_point_id,
                    frame_range=(segment.first_frame, segment.last_frame),
                    title="",
                    default_branch=0,  # selection puts the max-social branch first
                    branches=branches,
                    diversity={
                        "d_spa": branch_set.breakdown.d_spa,
                        "d_sem": branch_set.breakdown.d_sem,
                        "d_soc": branch_set.breakdown.d_soc,
                        "overall": branch_set.breakdown.overall,
                    },
                    selection_trace=[s.to_dict() for s in branch_set.selection_trace],
                )
            )
            scene_reports.append(
                {
                    "scene": segment.index,
                    "frames": [segment.first_frame, segment.last_frame],
                    "candidates": len(candidates),
                    "selected": len(branch_set),
                    "selection_trace": [s.to_dict() for s in branch_set.selection_trace],
                }
            )

        graph = BranchGraph(
            duration_s=inputs.duration_s,
            fps=inputs.fps,
            config=cfg.to_dict(),
            branch_points=points,
            scenes=scenes,
        )
        try:
            provider = make_provider(cfg.provider, cfg.provider_file)
        except ProviderError as exc:
            provider = _UnavailableProvider(str(exc))
        text_warnings, provider_failures = fill_descriptions(
            graph,
            provider,
            title_word_budget=cfg.title_word_budget,
        )
        warnings.extend(text_warnings)

        self.graph_ = graph
        self.warnings_ = warnings
        self.report_ = {
            "scene_boundaries_s": boundaries,
            "exclusion_zones": [
                {"start": z.start, "end": z.end, "kind": z.kind} for z in zones
            ],
            "branch_points": [
                {"id": p.id, "time_s": p.time, "source": p.source} for p in points
            ],
            "scenes": scene_reports,
            "warnings": warnings,
            "provider_failures": provider_failures,
        }
        return self

    def compile(self, inputs: ProjectInputs) -> BranchGraph:
        return self.fit(inputs).graph_
