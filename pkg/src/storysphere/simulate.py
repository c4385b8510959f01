"""Deterministic playthrough traversal of a branch graph.

A trace records which branch played in every scene and why; replaying a
trace as a script reproduces it byte-identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ContractError
from .graph import BranchGraph, _canonical

POLICIES = ("default_only", "script", "social_argmax")

CAUSE_USER = "user_choice"
CAUSE_TIMEOUT = "default_timeout"
CAUSE_NAVIGATION = "navigation_jump"


@dataclass
class TraceEvent:
    time_s: float
    scene: int
    branch: int
    cause: str
    requested: int | None = None  # raw script entry, kept so replays are exact
    cue: str = ""
    recap: str = ""
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "time_s": self.time_s,
            "scene": self.scene,
            "branch": self.branch,
            "cause": self.cause,
            "requested": self.requested,
            "cue": self.cue,
            "recap": self.recap,
            "error": self.error,
        }


@dataclass
class PlaythroughTrace:
    events: list[TraceEvent] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"events": [e.to_dict() for e in self.events]}

    def emit(self) -> bytes:
        doc = _canonical(self.to_dict())
        return (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode("utf-8")

    def script(self) -> list[int | None]:
        """Script that reproduces this trace: one entry per branching point."""
        return [e.requested for e in self.events[1:]]

    @classmethod
    def from_dict(cls, data: dict) -> "PlaythroughTrace":
        return cls(
            events=[
                TraceEvent(
                    time_s=e["time_s"],
                    scene=e["scene"],
                    branch=e["branch"],
                    cause=e["cause"],
                    requested=e.get("requested"),
                    cue=e.get("cue", ""),
                    recap=e.get("recap", ""),
                    error=e.get("error"),
                )
                for e in data["events"]
            ]
        )


def _cue_lookup(graph: BranchGraph) -> dict[tuple[int, int], tuple[str, str]]:
    table = {}
    for cue in graph.cues:
        table[(cue.scene_index - 1, cue.branch_index - 1)] = (
            cue.announcement(),
            cue.recap_line(),
        )
    return table


def simulate(
    graph: BranchGraph, policy: str, script: list[int | None] | None = None
) -> PlaythroughTrace:
    """Traverse the graph under a policy and record the playthrough.

    Playback always opens on scene 0's default branch; script entries are
    consumed one per branching point. A script entry naming a nonexistent
    branch records an error event and falls back to the default branch.
    """
    if policy not in POLICIES:
        raise ContractError(f"policy must be one of {POLICIES}, got {policy!r}")
    if not graph.scenes:
        raise ContractError("cannot simulate an empty graph")
    if policy == "script" and script is None:
        raise ContractError("script policy needs a script")
    script = list(script or [])
    cues = _cue_lookup(graph)

    def max_social(scene) -> int:
        best, best_score = 0, -1.0
        for b, branch in enumerate(scene.branches):
            if branch.social_score > best_score:
                best, best_score = b, branch.social_score
        return best

    trace = PlaythroughTrace()
    scene0 = graph.scenes[0]
    cue, recap = cues.get((0, scene0.default_branch), ("", ""))
    trace.events.append(
        TraceEvent(
            time_s=0.0,
            scene=0,
            branch=scene0.default_branch,
            cause=CAUSE_TIMEOUT,
            cue=cue,
            recap=recap,
        )
    )
    for k, point in enumerate(graph.branch_points):
        scene = graph.scenes[k + 1]
        requested: int | None = None
        error = None
        if policy == "script":
            requested = script[k] if k < len(script) else None
        elif policy == "social_argmax":
            requested = max_social(scene)
        if requested is None:
            branch, cause = scene.default_branch, CAUSE_TIMEOUT
        elif not 0 <= requested < len(scene.branches):
            branch, cause = scene.default_branch, CAUSE_TIMEOUT
            error = f"script chose branch {requested} of {len(scene.branches)}; using default"
        else:
            branch, cause = requested, CAUSE_USER
        cue, recap = cues.get((k + 1, branch), ("", ""))
        trace.events.append(
            TraceEvent(
                time_s=point.time,
                scene=k + 1,
                branch=branch,
                cause=cause,
                requested=requested,
                cue=cue,
                recap=recap,
                error=error,
            )
        )
    return trace


def load_script(data: bytes | str) -> list[int | None]:
    """Read a script file: either a JSON list of choices or a full trace."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        parsed = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ContractError(f"script is not valid JSON: {exc}")
    if isinstance(parsed, dict) and "events" in parsed:
        return PlaythroughTrace.from_dict(parsed).script()
    if not isinstance(parsed, list) or not all(
        e is None or isinstance(e, int) for e in parsed
    ):
        raise ContractError("script must be a JSON list of branch indices (or null)")
    return parsed
