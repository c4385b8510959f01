"""The serializable branch graph document: the contract between the
compile pipeline and any player.

One self-contained JSON file holds the branching points, every scene's
ordered branch set (paths, viewports, diversity, narration, captions),
and the navigation-cue table. Serialization is canonical: sorted keys,
floats at 9 significant digits, newline-terminated, byte-identical across
platforms for identical graphs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .branch_points import BranchPoint
from .errors import ContractError, GraphValidationError
from .narration import NarrationSlot, NavigationCue

VERSION = "branchgraph/1"

FLOAT_SIG_DIGITS = 9
# Document-level tolerance: 9-significant-digit rounding perturbs the
# weighted-sum identity by a few 1e-9 at most.
DOC_TOL = 1e-8


@dataclass
class GraphBranch:
    index: int
    title: str
    seed_index: int
    degenerate: bool
    social_score: float
    h_fov_deg: float
    v_fov_deg: float
    path: list[tuple[int, float, float]]  # (frame, yaw_deg, pitch_deg)
    captions: list[tuple[int, str]]
    narration: NarrationSlot


@dataclass
class GraphScene:
    index: int
    start_point: int | None
    end_point: int | None
    frame_range: tuple[int, int]
    title: str
    default_branch: int
    branches: list[GraphBranch]
    diversity: dict
    selection_trace: list[dict]

    @property
    def start_s(self) -> float:
        return float(self.frame_range[0])

    @property
    def end_s(self) -> float:
        return float(self.frame_range[1] + 1)


@dataclass
class BranchGraph:
    duration_s: float
    fps: float
    config: dict
    branch_points: list[BranchPoint]
    scenes: list[GraphScene]
    cues: list[NavigationCue] = field(default_factory=list)
    version: str = VERSION

    def branch_point_times(self) -> list[float]:
        return [p.time for p in self.branch_points]

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "video": {"duration_s": float(self.duration_s), "fps": float(self.fps)},
            "config": self.config,
            "branch_points": [
                {"id": p.id, "time_s": float(p.time), "source": p.source}
                for p in self.branch_points
            ],
            "scenes": [
                {
                    "index": scene.index,
                    "start_point": scene.start_point,
                    "end_point": scene.end_point,
                    "frame_range": [scene.frame_range[0], scene.frame_range[1]],
                    "title": scene.title,
                    "default_branch": scene.default_branch,
                    "diversity": {k: float(v) for k, v in scene.diversity.items()},
                    "selection_trace": scene.selection_trace,
                    "branches": [
                        {
                            "index": br.index,
                            "title": br.title,
                            "seed_index": br.seed_index,
                            "degenerate": br.degenerate,
                            "social_score": float(br.social_score),
                            "viewport": {
                                "h_fov_deg": float(br.h_fov_deg),
                                "v_fov_deg": float(br.v_fov_deg),
                            },
                            "path": [[f, float(y), float(p)] for f, y, p in br.path],
                            "captions": [[f, c] for f, c in br.captions],
                            "narration": {
                                "start_s": float(br.narration.start_s),
                                "end_s": float(br.narration.end_s),
                                "word_budget": br.narration.word_budget,
                                "text": br.narration.text,
                                "placeable": br.narration.placeable,
                                "overrun": br.narration.overrun,
                                "speech_rate": [
                                    float(br.narration.speech_rate[0]),
                                    float(br.narration.speech_rate[1]),
                                ],
                            },
                        }
                        for br in scene.branches
                    ],
                }
                for scene in self.scenes
            ],
            "cues": [
                {
                    "scene_index": c.scene_index,
                    "scene_count": c.scene_count,
                    "branch_index": c.branch_index,
                    "branch_count": c.branch_count,
                    "scene_title": c.scene_title,
                    "branch_title": c.branch_title,
                    "recap": c.recap,
                }
                for c in self.cues
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BranchGraph":
        scenes = []
        for sc in data["scenes"]:
            branches = []
            for br in sc["branches"]:
                nr = br["narration"]
                branches.append(
                    GraphBranch(
                        index=br["index"],
                        title=br["title"],
                        seed_index=br["seed_index"],
                        degenerate=br["degenerate"],
                        social_score=br["social_score"],
                        h_fov_deg=br["viewport"]["h_fov_deg"],
                        v_fov_deg=br["viewport"]["v_fov_deg"],
                        path=[(int(f), float(y), float(p)) for f, y, p in br["path"]],
                        captions=[(int(f), str(c)) for f, c in br["captions"]],
                        narration=NarrationSlot(
                            start_s=nr["start_s"],
                            end_s=nr["end_s"],
                            word_budget=nr["word_budget"],
                            text=nr["text"],
                            placeable=nr["placeable"],
                            overrun=nr["overrun"],
                            speech_rate=(nr["speech_rate"][0], nr["speech_rate"][1]),
                        ),
                    )
                )
            scenes.append(
                GraphScene(
                    index=sc["index"],
                    start_point=sc["start_point"],
                    end_point=sc["end_point"],
                    frame_range=(sc["frame_range"][0], sc["frame_range"][1]),
                    title=sc["title"],
                    default_branch=sc["default_branch"],
                    branches=branches,
                    diversity=dict(sc["diversity"]),
                    selection_trace=list(sc["selection_trace"]),
                )
            )
        return cls(
            duration_s=data["video"]["duration_s"],
            fps=data["video"]["fps"],
            config=dict(data["config"]),
            branch_points=[
                BranchPoint(id=p["id"], time=p["time_s"], source=p["source"])
                for p in data["branch_points"]
            ],
            scenes=scenes,
            cues=[
                NavigationCue(
                    scene_index=c["scene_index"],
                    scene_count=c["scene_count"],
                    branch_index=c["branch_index"],
                    branch_count=c["branch_count"],
                    scene_title=c["scene_title"],
                    branch_title=c["branch_title"],
                    recap=c["recap"],
                )
                for c in data["cues"]
            ],
            version=data["version"],
        )


def _canonical(value, path="$"):
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise GraphValidationError([f"{path}: non-finite number"])
        if value == 0.0:
            return 0.0  # collapse -0.0
        return float(f"{value:.{FLOAT_SIG_DIGITS}g}")
    if isinstance(value, dict):
        return {str(k): _canonical(v, f"{path}.{k}") for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_canonical(v, f"{path}[{i}]") for i, v in enumerate(value)]
    raise GraphValidationError([f"{path}: unserializable value of type {type(value).__name__}"])


def emit(graph: BranchGraph) -> bytes:
    """Canonical document bytes; raises GraphValidationError on an invalid graph."""
    doc = graph.to_dict()
    errors = validate_document(doc)
    if errors:
        raise GraphValidationError(errors)
    canonical = _canonical(doc)
    return (json.dumps(canonical, sort_keys=True, indent=2, allow_nan=False) + "\n").encode(
        "utf-8"
    )


def parse(data: bytes | str) -> BranchGraph:
    """Parse and validate a document; raises GraphValidationError on errors."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise GraphValidationError([f"document is not valid JSON: {exc}"])
    errors = validate_document(doc)
    if errors:
        raise GraphValidationError(errors)
    return BranchGraph.from_dict(doc)


def _num(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def validate_document(doc) -> list[str]:
    """Structural validation; returns error strings with document paths."""
    errors: list[str] = []
    if not isinstance(doc, dict):
        return ["document must be a JSON object"]
    if doc.get("version") != VERSION:
        errors.append(f"version: expected {VERSION!r}, got {doc.get('version')!r}")

    video = doc.get("video")
    if not isinstance(video, dict) or not _num(video.get("duration_s")) or not _num(video.get("fps")):
        errors.append("video: needs numeric duration_s and fps")
        return errors
    duration, fps = video["duration_s"], video["fps"]
    if duration <= 0 or fps <= 0:
        errors.append("video: duration_s and fps must be positive")
        return errors
    n_frames = int(round(duration * fps))

    config = doc.get("config")
    if not isinstance(config, dict):
        errors.append("config: missing")
        config = {}

    points = doc.get("branch_points")
    if not isinstance(points, list):
        errors.append("branch_points: missing list")
        points = []
    point_ids = set()
    last_time = 0.0
    for i, p in enumerate(points):
        loc = f"branch_points[{i}]"
        if not isinstance(p, dict) or not _num(p.get("time_s")):
            errors.append(f"{loc}: malformed")
            continue
        if p.get("id") != i:
            errors.append(f"{loc}: id must be {i}, got {p.get('id')}")
        point_ids.add(p.get("id"))
        if p["time_s"] <= last_time and i > 0:
            errors.append(f"{loc}: times must be strictly increasing")
        if not 0.0 < p["time_s"] < duration:
            errors.append(f"{loc}: time {p['time_s']} outside (0, {duration})")
        last_time = p["time_s"]

    scenes = doc.get("scenes")
    if not isinstance(scenes, list) or not scenes:
        errors.append("scenes: no scenes")
        return errors
    if len(scenes) != len(points) + 1:
        errors.append(
            f"scenes: {len(scenes)} scenes but {len(points)} branch points (want points + 1)"
        )

    weights = None
    raw = [config.get("w_spa"), config.get("w_sem"), config.get("w_soc")]
    if all(_num(w) for w in raw) and sum(raw) > 0:
        total = sum(raw)
        weights = [w / total for w in raw]

    next_frame = 0
    for s, sc in enumerate(scenes):
        loc = f"scenes[{s}]"
        if not isinstance(sc, dict):
            errors.append(f"{loc}: malformed")
            continue
        if sc.get("index") != s:
            errors.append(f"{loc}: index must be {s}")
        fr = sc.get("frame_range")
        if not (isinstance(fr, list) and len(fr) == 2 and all(isinstance(v, int) for v in fr)):
            errors.append(f"{loc}.frame_range: malformed")
            continue
        first, last = fr
        if first != next_frame:
            errors.append(f"{loc}.frame_range: starts at {first}, expected {next_frame}")
        if last < first:
            errors.append(f"{loc}.frame_range: empty range [{first}, {last}]")
        next_frame = last + 1

        expected_start = None if s == 0 else s - 1
        expected_end = None if s == len(scenes) - 1 else s
        for key, expected in (("start_point", expected_start), ("end_point", expected_end)):
            got = sc.get(key)
            if got != expected:
                if got is not None and got not in point_ids:
                    errors.append(f"{loc}.{key}: dangling branch-point id {got}")
                else:
                    errors.append(f"{loc}.{key}: expected {expected}, got {got}")

        branches = sc.get("branches")
        if not isinstance(branches, list) or not branches:
            errors.append(f"{loc}.branches: must be a non-empty list")
            continue
        default = sc.get("default_branch")
        if not isinstance(default, int) or not 0 <= default < len(branches):
            errors.append(
                f"{loc}.default_branch: {default} outside [0, {len(branches)})"
            )
        for b, br in enumerate(branches):
            bloc = f"{loc}.branches[{b}]"
            if not isinstance(br, dict):
                errors.append(f"{bloc}: malformed")
                continue
            if br.get("index") != b:
                errors.append(f"{bloc}: index must be {b}")
            path = br.get("path")
            if not isinstance(path, list) or len(path) != last - first + 1:
                errors.append(
                    f"{bloc}.path: must cover frames {first}..{last} "
                    f"({last - first + 1} entries, got {0 if not isinstance(path, list) else len(path)})"
                )
            else:
                for k, entry in enumerate(path):
                    if not (isinstance(entry, list) and len(entry) == 3):
                        errors.append(f"{bloc}.path[{k}]: malformed")
                        break
                    frame, yaw, pitch = entry
                    if frame != first + k:
                        errors.append(f"{bloc}.path[{k}]: frame {frame}, expected {first + k}")
                        break
                    if not (_num(yaw) and -180.0 <= yaw < 180.0):
                        errors.append(f"{bloc}.path[{k}]: yaw {yaw} outside [-180, 180)")
                        break
                    if not (_num(pitch) and -90.0 <= pitch <= 90.0):
                        errors.append(f"{bloc}.path[{k}]: pitch {pitch} outside [-90, 90]")
                        break
            if _num(br.get("social_score")) and not -DOC_TOL <= br["social_score"] <= 1.0 + DOC_TOL:
                errors.append(f"{bloc}.social_score: {br['social_score']} outside [0, 1]")
            vp = br.get("viewport")
            if not isinstance(vp, dict) or not _num(vp.get("h_fov_deg")) or not _num(vp.get("v_fov_deg")):
                errors.append(f"{bloc}.viewport: malformed")
            elif not (0 < vp["h_fov_deg"] <= 360 and 0 < vp["v_fov_deg"] <= 180):
                errors.append(f"{bloc}.viewport: fov outside range")
            nr = br.get("narration")
            if not isinstance(nr, dict) or not _num(nr.get("start_s")) or not _num(nr.get("end_s")):
                errors.append(f"{bloc}.narration: malformed")
            else:
                if nr["start_s"] > nr["end_s"]:
                    errors.append(f"{bloc}.narration: inverted interval")
                if nr["end_s"] > last + 1 + DOC_TOL or nr["start_s"] < first - DOC_TOL:
                    errors.append(f"{bloc}.narration: interval outside scene time range")
                budget = nr.get("word_budget")
                if not isinstance(budget, int) or budget < 0:
                    errors.append(f"{bloc}.narration.word_budget: malformed")
                elif isinstance(nr.get("text"), str) and len(nr["text"].split()) > budget:
                    errors.append(f"{bloc}.narration.text: exceeds word budget {budget}")
            caps = br.get("captions")
            if not isinstance(caps, list):
                errors.append(f"{bloc}.captions: malformed")
            else:
                for k, cap in enumerate(caps):
                    if not (isinstance(cap, list) and len(cap) == 2 and isinstance(cap[0], int)):
                        errors.append(f"{bloc}.captions[{k}]: malformed")
                        break
                    if not first <= cap[0] <= last:
                        errors.append(f"{bloc}.captions[{k}]: frame {cap[0]} outside scene")
                        break

        div = sc.get("diversity")
        if not isinstance(div, dict) or not all(
            _num(div.get(k)) for k in ("d_spa", "d_sem", "d_soc", "overall")
        ):
            errors.append(f"{loc}.diversity: malformed")
        else:
            for k in ("d_spa", "d_sem", "d_soc", "overall"):
                if not -DOC_TOL <= div[k] <= 1.0 + DOC_TOL:
                    errors.append(f"{loc}.diversity.{k}: {div[k]} outside [0, 1]")
            if weights is not None:
                expected = (
                    weights[0] * div["d_spa"] + weights[1] * div["d_sem"] + weights[2] * div["d_soc"]
                )
                if abs(expected - div["overall"]) > DOC_TOL:
                    errors.append(
                        f"{loc}.diversity.overall: {div['overall']} != weighted sum {expected}"
                    )

    if next_frame != n_frames and not any(e.startswith("scenes") and "frame_range" in e for e in errors):
        errors.append(
            f"scenes: frame ranges end at {next_frame - 1}, video has frames 0..{n_frames - 1}"
        )

    cues = doc.get("cues")
    if not isinstance(cues, list):
        errors.append("cues: missing list")
    else:
        seen = set()
        for i, cue in enumerate(cues):
            cloc = f"cues[{i}]"
            if not isinstance(cue, dict):
                errors.append(f"{cloc}: malformed")
                continue
            key = (cue.get("scene_index"), cue.get("branch_index"))
            if key in seen:
                errors.append(f"{cloc}: duplicate cue for scene {key[0]} branch {key[1]}")
            seen.add(key)
            s_idx = cue.get("scene_index")
            if not isinstance(s_idx, int) or not 1 <= s_idx <= len(scenes):
                errors.append(f"{cloc}.scene_index: {s_idx} outside 1..{len(scenes)}")
                continue
            scene = scenes[s_idx - 1]
            n_branches = len(scene.get("branches") or [])
            if cue.get("scene_count") != len(scenes):
                errors.append(f"{cloc}.scene_count: expected {len(scenes)}")
            if cue.get("branch_count") != n_branches:
                errors.append(f"{cloc}.branch_count: expected {n_branches}")
            b_idx = cue.get("branch_index")
            if not isinstance(b_idx, int) or not 1 <= b_idx <= max(n_branches, 1):
                errors.append(f"{cloc}.branch_index: {b_idx} outside 1..{n_branches}")
        expected_cues = sum(len(sc.get("branches") or []) for sc in scenes if isinstance(sc, dict))
        if cues and len(seen) != expected_cues and not errors:
            errors.append(f"cues: {len(seen)} cues for {expected_cues} (scene, branch) pairs")
        elif cues == [] and expected_cues:
            errors.append(f"cues: empty table for {expected_cues} (scene, branch) pairs")

    return errors


def validate(data) -> list[str]:
    """Validate a document given as bytes, str, dict, or BranchGraph."""
    if isinstance(data, BranchGraph):
        return validate_document(data.to_dict())
    if isinstance(data, (bytes, str)):
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            return [f"document is not valid JSON: {exc}"]
    return validate_document(data)


def jaccard_matching(
    a: list[float], b: list[float], tol: float = 5.0
) -> list[tuple[float, float]]:
    """Greedy one-to-one matching of two strictly increasing time lists.

    Sweeps both lists in time order, pairing the earliest compatible
    timestamps; a timestamp that cannot match anything ahead is skipped.
    For sorted lists this yields a maximum matching.
    """
    for name, values in (("a", a), ("b", b)):
        if any(y <= x for x, y in zip(values, values[1:])):
            raise ContractError(f"timestamp list {name} must be strictly increasing")
    matches = []
    i = j = 0
    while i < len(a) and j < len(b):
        if abs(a[i] - b[j]) <= tol:
            matches.append((a[i], b[j]))
            i += 1
            j += 1
        elif a[i] < b[j]:
            i += 1
        else:
            j += 1
    return matches


def jaccard_agreement(a: list[float], b: list[float], tol: float = 5.0) -> float:
    """Jaccard index of two branching-point lists under a time tolerance.

    Two points within `tol` seconds count as equivalent; matching is
    one-to-one so a single point never absorbs several. Two empty lists
    agree perfectly by convention.
    """
    matches = len(jaccard_matching(a, b, tol))
    denom = len(a) + len(b) - matches
    return 1.0 if denom == 0 else matches / denom
