"""Plan narration slots, word budgets, titles, and navigation cues.

Slot placement and budgets are computed locally; the text itself comes
from a pluggable description provider (deterministic stub, pre-authored
file, or remote HTTP service). Provider failures degrade to placeholders
and warnings, never to a hard failure.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING

from .config import word_budget
from .errors import ContractError, ProviderError
from .ingest import TranscriptSegment

if TYPE_CHECKING:
    from .graph import BranchGraph

# Playback renders narration slightly fast to fit the interval.
PLAYBACK_SPEECH_RATE = (1.1, 1.2)

ENDPOINT_ENV_VAR = "STORYSPHERE_PROVIDER_URL"

DEFAULT_DIRECTIVES = (
    "Describe essential visual content objectively.",
    "Narrate in a second-person perspective.",
    "Generate descriptions that are coherent with previous content.",
)


@dataclass
class NarrationSlot:
    """Where a branch narration may play and how many words fit."""

    start_s: float
    end_s: float
    word_budget: int
    text: str | None = None
    placeable: bool = True
    overrun: bool = False
    speech_rate: tuple[float, float] = PLAYBACK_SPEECH_RATE

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


@dataclass(frozen=True)
class NavigationCue:
    """Numbered location identifier plus the recap line that re-orients a viewer."""

    scene_index: int  # 1-based
    scene_count: int
    branch_index: int  # 1-based
    branch_count: int
    scene_title: str
    branch_title: str
    recap: str = ""  # previous scene title; empty for the first scene

    def __post_init__(self):
        if not 1 <= self.scene_index <= self.scene_count:
            raise ContractError(f"scene_index {self.scene_index} outside 1..{self.scene_count}")
        if not 1 <= self.branch_index <= self.branch_count:
            raise ContractError(
                f"branch_index {self.branch_index} outside 1..{self.branch_count}"
            )

    def announcement(self) -> str:
        return (
            f"[Scene {self.scene_index} of {self.scene_count}] {self.scene_title}; "
            f"[Branch {self.branch_index} of {self.branch_count}] {self.branch_title}"
        )

    def recap_line(self) -> str:
        return f"[Previously] {self.recap}" if self.recap else ""


@dataclass
class DescriptionRequest:
    """Everything a provider needs to write one piece of text."""

    captions: list[str]
    preceding_narrations: list[str]
    directives: list[str]
    word_budget: int

    def to_dict(self) -> dict:
        return {
            "captions": self.captions,
            "preceding_narrations": self.preceding_narrations,
            "directives": self.directives,
            "word_budget": self.word_budget,
        }


def narration_slot(
    interval: tuple[float, float],
    transcript: list[TranscriptSegment],
    words_per_second: float = 3.0,
) -> NarrationSlot:
    """Longest speech-free sub-interval of a branch, earliest on ties.

    A branch fully covered by speech yields a zero-length slot flagged
    unplaceable rather than dropping the branch.
    """
    start, end = interval
    if end < start:
        raise ContractError(f"branch interval [{start}, {end}] is inverted")
    speech: list[list[float]] = []
    for seg in sorted(transcript, key=lambda s: (s.start, s.end)):
        lo, hi = max(seg.start, start), min(seg.end, end)
        if lo >= hi:
            continue
        if speech and lo <= speech[-1][1]:
            speech[-1][1] = max(speech[-1][1], hi)
        else:
            speech.append([lo, hi])
    edges = [start]
    for lo, hi in speech:
        edges.extend((lo, hi))
    edges.append(end)
    best_lo, best_hi = start, start
    for lo, hi in zip(edges[::2], edges[1::2]):
        if hi - lo > best_hi - best_lo:
            best_lo, best_hi = lo, hi
    if best_hi - best_lo <= 0.0:
        return NarrationSlot(start_s=start, end_s=start, word_budget=0, placeable=False)
    return NarrationSlot(
        start_s=best_lo,
        end_s=best_hi,
        word_budget=word_budget(best_hi - best_lo, words_per_second),
    )


def trim_to_budget(text: str, budget: int) -> tuple[str, bool]:
    """Cut overlong provider text at a word boundary; returns (text, overran)."""
    words = text.split()
    if len(words) <= budget:
        return text, False
    return " ".join(words[:budget]), True


class StubProvider:
    """Deterministic template texts for tests and offline runs."""

    def generate(self, kind: str, key: str, request: DescriptionRequest) -> str:
        subject = request.captions[0] if request.captions else "the scene"
        if kind == "branch_title":
            return f"Follow {subject}"
        if kind == "scene_title":
            return f"Around {subject}"
        continuation = " Continuing the story." if request.preceding_narrations else ""
        return f"You watch {subject}.{continuation}"


class FileProvider:
    """Pre-authored texts keyed by slot (narration:i:j, branch_title:i:j, scene_title:i)."""

    def __init__(self, texts: dict[str, str] | str | Path):
        if isinstance(texts, (str, Path)):
            path = Path(texts)
            if not path.is_file():
                raise ProviderError(f"provider file not found: {path}")
            try:
                texts = json.loads(path.read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise ProviderError(f"provider file {path} is not valid JSON: {exc}")
        if not isinstance(texts, dict):
            raise ProviderError("provider file must hold a JSON object of key -> text")
        self.texts = dict(texts)

    def generate(self, kind: str, key: str, request: DescriptionRequest) -> str:
        if key not in self.texts:
            raise ProviderError(f"provider file has no text for {key!r}")
        return str(self.texts[key])


class HttpProvider:
    """Remote description service speaking the request/response JSON documents."""

    def __init__(self, endpoint: str | None = None, timeout_s: float = 30.0):
        self.endpoint = endpoint or os.environ.get(ENDPOINT_ENV_VAR)
        self.timeout_s = timeout_s
        if not self.endpoint:
            raise ProviderError(
                f"no provider endpoint; set {ENDPOINT_ENV_VAR} or pass endpoint="
            )

    def generate(self, kind: str, key: str, request: DescriptionRequest) -> str:
        import requests

        body = request.to_dict()
        body["directives"] = [*body["directives"], f"task: {kind}", f"slot: {key}"]
        try:
            response = requests.post(self.endpoint, json=body, timeout=self.timeout_s)
            response.raise_for_status()
            text = response.json()["text"]
        except Exception as exc:  # network and schema failures degrade identically
            raise ProviderError(f"provider request for {key!r} failed: {exc}")
        if not isinstance(text, str):
            raise ProviderError(f"provider response for {key!r} lacks a text field")
        return text


def make_provider(name: str, provider_file: str | None = None):
    if name == "stub":
        return StubProvider()
    if name == "file":
        if not provider_file:
            raise ProviderError("file provider needs provider_file in the config")
        return FileProvider(provider_file)
    if name == "http":
        return HttpProvider()
    raise ProviderError(f"unknown provider {name!r}")


def plan_cues(graph: "BranchGraph") -> list[NavigationCue]:
    """One cue per (scene, branch) with numbered identifiers and scene recaps."""
    cues = []
    scene_count = len(graph.scenes)
    for s, scene in enumerate(graph.scenes):
        recap = graph.scenes[s - 1].title if s > 0 else ""
        for b, branch in enumerate(scene.branches):
            cues.append(
                NavigationCue(
                    scene_index=s + 1,
                    scene_count=scene_count,
                    branch_index=b + 1,
                    branch_count=len(scene.branches),
                    scene_title=scene.title,
                    branch_title=branch.title,
                    recap=recap,
                )
            )
    return cues


def _dedupe_captions(captions: list[str | None]) -> list[str]:
    """Keyframe captions: consecutive duplicates collapse, Nones drop."""
    out: list[str] = []
    for c in captions:
        if c is not None and (not out or out[-1] != c):
            out.append(c)
    return out


def fill_descriptions(
    graph: "BranchGraph",
    provider,
    directives: list[str] | None = None,
    title_word_budget: int = 8,
) -> tuple[list[str], int]:
    """Fill narration texts and scene/branch titles through the provider.

    Branches are processed in deterministic scene/branch order; each
    narration request carries the narrations of the default branches of all
    earlier scenes so texts continue the story. Returns (warnings,
    provider_failures); the graph always comes back usable, with
    placeholders where text is missing.
    """
    directives = list(directives) if directives is not None else list(DEFAULT_DIRECTIVES)
    warnings: list[str] = []
    preceding: list[str] = []
    failures = 0

    def ask(kind: str, key: str, request: DescriptionRequest) -> str | None:
        nonlocal failures
        try:
            return provider.generate(kind, key, request)
        except ProviderError as exc:
            failures += 1
            warnings.append(str(exc))
            return None

    for s, scene in enumerate(graph.scenes):
        for b, branch in enumerate(scene.branches):
            slot = branch.narration
            captions = _dedupe_captions([c for _, c in branch.captions])
            if not slot.placeable or slot.word_budget < 1:
                warnings.append(
                    f"scene {s} branch {b}: no usable narration interval; narration skipped"
                )
            else:
                text = ask(
                    "narration",
                    f"narration:{s}:{b}",
                    DescriptionRequest(
                        captions=captions,
                        preceding_narrations=list(preceding),
                        directives=directives,
                        word_budget=slot.word_budget,
                    ),
                )
                if text is not None:
                    slot.text, slot.overrun = trim_to_budget(text, slot.word_budget)
                    if slot.overrun:
                        warnings.append(
                            f"scene {s} branch {b}: narration overran its "
                            f"{slot.word_budget}-word budget and was trimmed"
                        )
            title = ask(
                "branch_title",
                f"branch_title:{s}:{b}",
                DescriptionRequest(
                    captions=[slot.text] if slot.text else captions,
                    preceding_narrations=[],
                    directives=["Generate a summary for each branch."],
                    word_budget=title_word_budget,
                ),
            )
            branch.title = (
                trim_to_budget(title, title_word_budget)[0] if title else f"Branch {b + 1}"
            )
        narrations = [br.narration.text for br in scene.branches if br.narration.text]
        fallback = [t for br in scene.branches for t in _dedupe_captions([c for _, c in br.captions])]
        title = ask(
            "scene_title",
            f"scene_title:{s}",
            DescriptionRequest(
                captions=narrations or fallback,
                preceding_narrations=[],
                directives=["Generate a summary for all the branches."],
                word_budget=title_word_budget,
            ),
        )
        scene.title = trim_to_budget(title, title_word_budget)[0] if title else f"Scene {s + 1}"
        default = scene.branches[scene.default_branch]
        if default.narration.text:
            preceding.append(default.narration.text)
    graph.cues = plan_cues(graph)
    return warnings, failures
