"""Load and validate feature inputs onto the common 1 fps time grid.

A project is described by a JSON manifest mapping input names to paths
plus grid metadata. All heavy model outputs (saliency, captions,
embeddings) arrive as files; nothing here runs inference.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import LoadError
from .geometry import Direction, dir_from_angles

DEFAULT_LOUDNESS_RATE = 10.0
EMBEDDING_NORM_TOL = 1e-6


@dataclass
class SaliencyFrame:
    """Per-pixel attention for one frame, values in [0, 1], width = 2 * height."""

    frame_index: int
    grid: np.ndarray

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        if self.grid.ndim != 2:
            raise LoadError(f"saliency frame {self.frame_index}: grid must be 2-D")
        h, w = self.grid.shape
        if w != 2 * h:
            raise LoadError(
                f"saliency aspect: frame {self.frame_index} is {w}x{h}, want width = 2*height"
            )
        if self.grid.min() < 0.0 or self.grid.max() > 1.0:
            raise LoadError(f"saliency frame {self.frame_index}: values outside [0, 1]")


@dataclass(frozen=True)
class TranscriptSegment:
    start: float
    end: float
    text: str

    def __post_init__(self):
        if not self.start < self.end:
            raise LoadError(f"transcript: segment start {self.start} must precede end {self.end}")


@dataclass
class LoudnessSeries:
    """Trailing one-second RMS of normalized amplitude, sampled uniformly."""

    sample_rate: float = DEFAULT_LOUDNESS_RATE
    values: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.sample_rate <= 0:
            raise LoadError(f"loudness: sample rate must be positive, got {self.sample_rate}")
        if self.values.size and (self.values.min() < 0.0 or self.values.max() > 1.0):
            raise LoadError("loudness: values outside [0, 1]")

    def __len__(self) -> int:
        return len(self.values)


@dataclass
class FrameDescriptor:
    """Downsampled HSV image for scene detection plus optional caption data."""

    frame_index: int
    hsv: np.ndarray  # (h, w, 3) in [0, 1]
    caption: str | None = None
    embedding: np.ndarray | None = None


@dataclass
class CaptionEntry:
    """A caption and its unit embedding for one viewing direction at one frame."""

    frame_index: int
    direction: Direction
    caption: str
    embedding: np.ndarray


@dataclass
class ProjectInputs:
    fps: float
    duration_s: float
    embedding_dim: int
    saliency: list[SaliencyFrame]
    transcript: list[TranscriptSegment]
    loudness: LoudnessSeries
    frames: list[FrameDescriptor]
    captions: list[CaptionEntry]

    @property
    def n_frames(self) -> int:
        return len(self.saliency)

    def to_dict(self) -> dict:
        return {
            "fps": self.fps,
            "duration_s": self.duration_s,
            "embedding_dim": self.embedding_dim,
            "saliency": [
                {"frame_index": s.frame_index, "grid": s.grid.tolist()} for s in self.saliency
            ],
            "transcript": [
                {"start": t.start, "end": t.end, "text": t.text} for t in self.transcript
            ],
            "loudness": {
                "sample_rate": self.loudness.sample_rate,
                "values": self.loudness.values.tolist(),
            },
            "frames": [
                {
                    "frame_index": f.frame_index,
                    "hsv": f.hsv.tolist(),
                    "caption": f.caption,
                    "embedding": None if f.embedding is None else f.embedding.tolist(),
                }
                for f in self.frames
            ],
            "captions": [
                {
                    "frame_index": c.frame_index,
                    "yaw_deg": c.direction.yaw_deg,
                    "pitch_deg": c.direction.pitch_deg,
                    "caption": c.caption,
                    "embedding": c.embedding.tolist(),
                }
                for c in self.captions
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ProjectInputs":
        return cls(
            fps=data["fps"],
            duration_s=data["duration_s"],
            embedding_dim=data["embedding_dim"],
            saliency=[
                SaliencyFrame(frame_index=s["frame_index"], grid=np.array(s["grid"]))
                for s in data["saliency"]
            ],
            transcript=[
                TranscriptSegment(start=t["start"], end=t["end"], text=t["text"])
                for t in data["transcript"]
            ],
            loudness=LoudnessSeries(
                sample_rate=data["loudness"]["sample_rate"],
                values=np.array(data["loudness"]["values"]),
            ),
            frames=[
                FrameDescriptor(
                    frame_index=f["frame_index"],
                    hsv=np.array(f["hsv"]),
                    caption=f["caption"],
                    embedding=None if f["embedding"] is None else np.array(f["embedding"]),
                )
                for f in data["frames"]
            ],
            captions=[
                CaptionEntry(
                    frame_index=c["frame_index"],
                    direction=dir_from_angles(c["yaw_deg"], c["pitch_deg"]),
                    caption=c["caption"],
                    embedding=np.array(c["embedding"]),
                )
                for c in data["captions"]
            ],
        )


def compute_loudness(
    samples, audio_rate: float, series_rate: float = DEFAULT_LOUDNESS_RATE
) -> LoudnessSeries:
    """RMS over a trailing one-second window, emitted at `series_rate`.

    Windows at the stream head shorter than one second use the samples
    available so far. Empty audio yields an empty series.
    """
    samples = np.asarray(samples, dtype=float)
    if audio_rate <= 0:
        raise LoadError(f"audio: sample rate must be positive, got {audio_rate}")
    if samples.size == 0:
        return LoudnessSeries(sample_rate=series_rate, values=np.zeros(0))
    if np.abs(samples).max() > 1.0 + 1e-12:
        raise LoadError("audio: amplitudes must be normalized to [-1, 1]")
    n_out = int(math.ceil(samples.size * series_rate / audio_rate))
    window = int(round(audio_rate))
    sq = np.concatenate([[0.0], np.cumsum(samples * samples)])
    values = np.empty(n_out)
    for k in range(n_out):
        end = min(samples.size, int(round((k + 1) * audio_rate / series_rate)))
        start = max(0, end - window)
        count = end - start
        values[k] = 0.0 if count == 0 else math.sqrt((sq[end] - sq[start]) / count)
    return LoudnessSeries(sample_rate=series_rate, values=np.clip(values, 0.0, 1.0))


def detect_scene_boundaries(
    frames: list[FrameDescriptor], threshold: float = 0.11, fps: float = 1.0
) -> list[float]:
    """Timestamps where adjacent frames differ sharply in HSV.

    The score is the mean absolute per-channel difference in [0, 1] units,
    with hue compared on the circular metric. t = 0 always opens the first
    scene.
    """
    if len(frames) < 2:
        raise LoadError("scene detection needs at least 2 frames")
    boundaries = [0.0]
    for prev, cur in zip(frames, frames[1:]):
        if prev.hsv.shape != cur.hsv.shape:
            raise LoadError(
                f"frames: shape mismatch between frames {prev.frame_index} and {cur.frame_index}"
            )
        dh = np.abs(cur.hsv[..., 0] - prev.hsv[..., 0])
        dh = np.minimum(dh, 1.0 - dh)
        ds = np.abs(cur.hsv[..., 1] - prev.hsv[..., 1])
        dv = np.abs(cur.hsv[..., 2] - prev.hsv[..., 2])
        score = (dh.mean() + ds.mean() + dv.mean()) / 3.0
        if score > threshold:
            boundaries.append(cur.frame_index / fps)
    return boundaries


def _require(manifest: dict, key: str, manifest_path: Path):
    if key not in manifest:
        raise LoadError(f"{key}: missing from manifest {manifest_path}")
    return manifest[key]


def _load_image_series(directory: Path, label: str) -> list[tuple[int, Path]]:
    if not directory.is_dir():
        raise LoadError(f"{label}: directory not found: {directory}")
    entries = []
    for p in sorted(directory.iterdir()):
        if p.suffix.lower() not in (".png", ".bmp", ".tif", ".tiff"):
            continue
        try:
            entries.append((int(p.stem), p))
        except ValueError:
            raise LoadError(f"{label}: filename {p.name} is not a zero-padded frame index")
    if not entries:
        raise LoadError(f"{label}: no image files in {directory}")
    entries.sort()
    indices = [i for i, _ in entries]
    if indices != list(range(indices[0], indices[0] + len(indices))):
        raise LoadError(f"{label}: frame indices not contiguous in {directory}")
    if indices[0] != 0:
        raise LoadError(f"{label}: frame indices must start at 0, got {indices[0]}")
    return entries


def _load_saliency(directory: Path, size: tuple[int, int]) -> list[SaliencyFrame]:
    width, height = size
    frames = []
    for index, path in _load_image_series(directory, "saliency"):
        with Image.open(path) as img:
            if img.mode in ("I;16", "I;16B", "I"):
                arr = np.asarray(img.convert("I"))
                scale = 65535.0
            else:
                arr = np.asarray(img.convert("L"))
                scale = 255.0
        if arr.shape != (height, width):
            raise LoadError(
                f"saliency: frame {index} is {arr.shape[1]}x{arr.shape[0]}, "
                f"manifest declares {width}x{height}"
            )
        frames.append(SaliencyFrame(frame_index=index, grid=arr.astype(float) / scale))
    return frames


def _load_frames(directory: Path, thumb_size: tuple[int, int] = (32, 16)) -> list[FrameDescriptor]:
    frames = []
    for index, path in _load_image_series(directory, "frames"):
        with Image.open(path) as img:
            rgb = img.convert("RGB")
            if rgb.width > thumb_size[0] or rgb.height > thumb_size[1]:
                rgb = rgb.resize(thumb_size, Image.BILINEAR)
            hsv = np.asarray(rgb.convert("HSV"), dtype=float) / 255.0
        frames.append(FrameDescriptor(frame_index=index, hsv=hsv))
    return frames


def _load_transcript(path: Path) -> list[TranscriptSegment]:
    if not path.is_file():
        raise LoadError(f"transcript: file not found: {path}")
    try:
        records = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise LoadError(f"transcript: {path} is not valid JSON: {exc}")
    if not isinstance(records, list):
        raise LoadError(f"transcript: {path} must hold a JSON list of segments")
    segments = []
    for i, rec in enumerate(records):
        try:
            segments.append(
                TranscriptSegment(start=float(rec["start"]), end=float(rec["end"]), text=str(rec["text"]))
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise LoadError(f"transcript: record {i} malformed: {exc}")
    for a, b in zip(segments, segments[1:]):
        if b.start < a.end:
            raise LoadError(
                f"transcript: segments must be sorted and non-overlapping "
                f"({a.start}-{a.end} vs {b.start}-{b.end})"
            )
    return segments


def _load_wav(path: Path) -> tuple[np.ndarray, float]:
    from scipy.io import wavfile

    try:
        rate, raw = wavfile.read(path)
    except (ValueError, FileNotFoundError) as exc:
        raise LoadError(f"audio: cannot read {path}: {exc}")
    data = np.asarray(raw, dtype=float)
    if np.issubdtype(raw.dtype, np.integer):
        data = data / float(np.iinfo(raw.dtype).max + 1)
    if data.ndim == 2:
        data = data.mean(axis=1)
    if data.size:
        peak = np.abs(data).max()
        if peak > 1.0:
            data = data / peak
    return data, float(rate)


def _load_loudness_records(path: Path) -> LoudnessSeries:
    try:
        records = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise LoadError(f"loudness: {path} is not valid JSON: {exc}")
    if isinstance(records, dict):
        try:
            return LoudnessSeries(
                sample_rate=float(records["sample_rate"]),
                values=np.asarray(records["values"], dtype=float),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise LoadError(f"loudness: {path} malformed: {exc}")
    if not isinstance(records, list) or not records:
        raise LoadError(f"loudness: {path} must hold (time, value) records or a series object")
    times = np.array([float(r[0]) for r in records])
    values = np.array([float(r[1]) for r in records])
    steps = np.diff(times)
    if times[0] != 0.0 or (len(steps) and np.abs(steps - steps[0]).max() > 1e-6):
        raise LoadError(f"loudness: {path} times must start at 0 and be uniformly spaced")
    rate = 1.0 / steps[0] if len(steps) else DEFAULT_LOUDNESS_RATE
    return LoudnessSeries(sample_rate=rate, values=values)


def _load_captions(path: Path, dim: int, n_frames: int) -> list[CaptionEntry]:
    if not path.is_file():
        raise LoadError(f"embeddings: file not found: {path}")
    try:
        records = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise LoadError(f"embeddings: {path} is not valid JSON: {exc}")
    if not isinstance(records, list):
        raise LoadError(f"embeddings: {path} must hold a JSON list of entries")
    entries = []
    for i, rec in enumerate(records):
        try:
            vec = np.asarray(rec["embedding"], dtype=float)
            entry = CaptionEntry(
                frame_index=int(rec["frame"]),
                direction=dir_from_angles(float(rec["yaw_deg"]), float(rec["pitch_deg"])),
                caption=str(rec["caption"]),
                embedding=vec,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise LoadError(f"embeddings: record {i} malformed: {exc}")
        if vec.shape != (dim,):
            raise LoadError(
                f"embeddings: record {i} has dimension {vec.shape}, manifest declares {dim}"
            )
        if abs(float(np.linalg.norm(vec)) - 1.0) > EMBEDDING_NORM_TOL:
            raise LoadError(f"embeddings: record {i} is not unit-normalized")
        if not 0 <= entry.frame_index < n_frames:
            raise LoadError(f"embeddings: record {i} frame {entry.frame_index} outside grid")
        entries.append(entry)
    return entries


def load_project(manifest_path: str | Path) -> ProjectInputs:
    """Load every input the manifest references and align it to the 1 fps grid.

    Raises LoadError naming the offending input on any missing file, grid
    mismatch, or malformed record.
    """
    manifest_path = Path(manifest_path)
    if not manifest_path.is_file():
        raise LoadError(f"manifest: file not found: {manifest_path}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise LoadError(f"manifest: {manifest_path} is not valid JSON: {exc}")
    root = manifest_path.parent

    fps = float(manifest.get("fps", 1.0))
    if fps != 1.0:
        raise LoadError(f"manifest: only the 1 fps grid is supported, got fps={fps}")
    duration_s = float(_require(manifest, "duration_s", manifest_path))
    embedding_dim = int(_require(manifest, "embedding_dim", manifest_path))
    size = _require(manifest, "saliency_size", manifest_path)
    if not (isinstance(size, list) and len(size) == 2):
        raise LoadError("manifest: saliency_size must be [width, height]")
    width, height = int(size[0]), int(size[1])
    if width != 2 * height:
        raise LoadError(f"saliency aspect: declared {width}x{height}, want width = 2*height")

    saliency = _load_saliency(root / _require(manifest, "saliency_dir", manifest_path), (width, height))
    frames = _load_frames(root / _require(manifest, "frames_dir", manifest_path))
    transcript = _load_transcript(root / _require(manifest, "transcript", manifest_path))
    captions = _load_captions(
        root / _require(manifest, "embeddings", manifest_path), embedding_dim, len(saliency)
    )

    if "loudness" in manifest:
        loudness = _load_loudness_records(root / manifest["loudness"])
    elif "audio" in manifest:
        samples, rate = _load_wav(root / manifest["audio"])
        loudness = compute_loudness(samples, rate)
    else:
        raise LoadError(f"audio: manifest {manifest_path} names neither 'audio' nor 'loudness'")

    expected = int(round(duration_s * fps))
    for label, count in (("saliency", len(saliency)), ("frames", len(frames))):
        if abs(count - expected) > 1:
            raise LoadError(
                f"{label}: {count} frames but the manifest declares {duration_s} s at {fps} fps"
            )
    if len(saliency) != len(frames):
        raise LoadError(
            f"frames: saliency has {len(saliency)} frames but frames dir has {len(frames)}"
        )
    for seg in transcript:
        if seg.end > duration_s + 1.0:
            raise LoadError(f"transcript: segment ends at {seg.end} s beyond {duration_s} s video")

    return ProjectInputs(
        fps=fps,
        duration_s=duration_s,
        embedding_dim=embedding_dim,
        saliency=saliency,
        transcript=transcript,
        loudness=loudness,
        frames=frames,
        captions=captions,
    )
