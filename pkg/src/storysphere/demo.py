"""Generate a small synthetic project for demos and end-to-end tests.

The project is 120 s at 1 fps with two blobs drifting sinusoidally near
yaw -90 (full brightness) and yaw +90 (85% brightness), hard scene cuts at
40 s and 80 s, speech at 35-45 s, and orthogonal caption embeddings per
blob. Compiling it yields three scenes with branching points at 45 s
(shifted out of the speech) and 80 s.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import numpy as np
from PIL import Image

WIDTH, HEIGHT = 64, 32
N_FRAMES = 120
BLOB_SIGMA_PX = 2.5

SCENE_COLORS = ((20, 30, 120), (200, 40, 40), (40, 180, 60))

CAPTION_A = "a hot-air balloon drifting"
CAPTION_B = "a street performer juggling"


def blob_drift_deg(frame: int) -> float:
    return 8.0 * math.sin(2.0 * math.pi * frame / N_FRAMES)


def yaw_to_px(yaw_deg: float) -> float:
    return (yaw_deg / 360.0 + 0.5) * WIDTH - 0.5


def gaussian_blob(cx: float, cy: float, amplitude: float) -> np.ndarray:
    ys, xs = np.mgrid[0:HEIGHT, 0:WIDTH].astype(float)
    dx = np.abs(xs - cx)
    dx = np.minimum(dx, WIDTH - dx)  # equirectangular maps wrap horizontally
    r2 = dx**2 + (ys - cy) ** 2
    return amplitude * np.exp(-r2 / (2.0 * BLOB_SIGMA_PX**2))


def saliency_frame(frame: int) -> np.ndarray:
    drift = blob_drift_deg(frame)
    blob_a = gaussian_blob(yaw_to_px(-90.0 + drift), 15.5, 1.0)
    blob_b = gaussian_blob(yaw_to_px(90.0 + drift), 15.5, 0.85)
    return np.clip(blob_a + blob_b, 0.0, 1.0)


def scene_of_frame(frame: int) -> int:
    return 0 if frame < 40 else (1 if frame < 80 else 2)


def video_frame(frame: int) -> np.ndarray:
    """Renderable RGB frame: scene background with the blobs painted in."""
    rgb = np.empty((HEIGHT, WIDTH, 3), dtype=float)
    rgb[:] = np.array(SCENE_COLORS[scene_of_frame(frame)], dtype=float)
    glow = saliency_frame(frame)[..., None]
    return np.clip(rgb * (1.0 - glow) + 255.0 * glow, 0, 255).astype(np.uint8)


def build_demo_project(root: str | Path) -> Path:
    """Write the full project under `root`; returns the manifest path."""
    root = Path(root)
    (root / "saliency").mkdir(parents=True, exist_ok=True)
    (root / "frames").mkdir(parents=True, exist_ok=True)
    for f in range(N_FRAMES):
        sal = (saliency_frame(f) * 255).astype(np.uint8)
        Image.fromarray(sal, mode="L").save(root / "saliency" / f"{f:06d}.png")
        Image.fromarray(video_frame(f), mode="RGB").save(root / "frames" / f"{f:06d}.png")

    transcript = [{"start": 35.0, "end": 45.0, "text": "A narrator explains the setting."}]
    (root / "transcript.json").write_text(json.dumps(transcript))

    loudness = [[round(k / 10.0, 3), 0.1] for k in range(N_FRAMES * 10)]
    (root / "loudness.json").write_text(json.dumps(loudness))

    entries = []
    for f in range(N_FRAMES):
        drift = blob_drift_deg(f)
        entries.append(
            {
                "frame": f,
                "yaw_deg": -90.0 + drift,
                "pitch_deg": 0.0,
                "caption": CAPTION_A,
                "embedding": [1.0, 0.0, 0.0, 0.0],
            }
        )
        entries.append(
            {
                "frame": f,
                "yaw_deg": 90.0 + drift,
                "pitch_deg": 0.0,
                "caption": CAPTION_B,
                "embedding": [0.0, 1.0, 0.0, 0.0],
            }
        )
    (root / "embeddings.json").write_text(json.dumps(entries))

    manifest_path = root / "manifest.json"
    manifest = {
        "fps": 1.0,
        "duration_s": 120.0,
        "embedding_dim": 4,
        "saliency_size": [WIDTH, HEIGHT],
        "saliency_dir": "saliency",
        "frames_dir": "frames",
        "transcript": "transcript.json",
        "loudness": "loudness.json",
        "embeddings": "embeddings.json",
    }
    manifest_path.write_text(json.dumps(manifest, indent=2))
    return manifest_path


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: python -m storysphere.demo <output-dir>", file=sys.stderr)
        return 1
    manifest = build_demo_project(argv[0])
    print(manifest)
    return 0


if __name__ == "__main__":
    sys.exit(main())
