"""Tests for input loading, loudness analysis, and scene-cut detection."""

import json
import math

import numpy as np
import pytest
from PIL import Image

from storysphere.errors import LoadError
from storysphere.ingest import (
    FrameDescriptor,
    LoudnessSeries,
    ProjectInputs,
    SaliencyFrame,
    TranscriptSegment,
    compute_loudness,
    detect_scene_boundaries,
    load_project,
)


# ---- loudness ----------------------------------------------------------


def test_loudness_all_zero():
    series = compute_loudness(np.zeros(44100), 44100.0)
    assert len(series) == 10
    assert np.all(series.values == 0.0)


def test_loudness_square_wave_is_one():
    samples = np.tile([1.0, -1.0], 8000)
    series = compute_loudness(samples, 16000.0)
    np.testing.assert_allclose(series.values, 1.0, atol=1e-12)


def test_loudness_unit_sine_rms():
    rate = 8000.0
    t = np.arange(int(rate) * 3) / rate
    samples = np.sin(2 * math.pi * 5.0 * t)
    series = compute_loudness(samples, rate)
    # closed form: RMS of a unit sine over full cycles is 1/sqrt(2)
    after_first_window = series.values[10:]
    np.testing.assert_allclose(after_first_window, 1 / math.sqrt(2), atol=1e-3)


def test_loudness_empty_audio():
    series = compute_loudness(np.zeros(0), 44100.0)
    assert len(series) == 0


def test_loudness_scaling_is_exact():
    rng = np.random.RandomState(0)
    samples = rng.uniform(-1, 1, size=4410)
    base = compute_loudness(samples, 4410.0)
    for c in (0.5, 0.125, 0.99):
        scaled = compute_loudness(c * samples, 4410.0)
        np.testing.assert_allclose(scaled.values, c * base.values, atol=1e-9)


def test_loudness_rejects_unnormalized():
    with pytest.raises(LoadError):
        compute_loudness(np.array([0.0, 2.0]), 10.0)


# ---- scene boundaries --------------------------------------------------


def _hsv_frame(index, h, s, v, shape=(4, 8)):
    hsv = np.zeros(shape + (3,))
    hsv[..., 0] = h
    hsv[..., 1] = s
    hsv[..., 2] = v
    return FrameDescriptor(frame_index=index, hsv=hsv)


def test_identical_frames_only_t0():
    frames = [_hsv_frame(i, 0.3, 0.5, 0.5) for i in range(50)]
    assert detect_scene_boundaries(frames, 0.11) == [0.0]


def test_hard_cut_black_to_white():
    frames = [_hsv_frame(i, 0.0, 0.0, 0.0) for i in range(40)]
    frames += [_hsv_frame(40 + i, 0.0, 0.0, 1.0) for i in range(10)]
    assert detect_scene_boundaries(frames, 0.11) == [0.0, 40.0]


def test_slow_fade_below_threshold():
    # 10-step fade, each step changes value by 0.05 -> mean diff 0.0167 < 0.11
    frames = [_hsv_frame(i, 0.0, 0.0, min(1.0, 0.05 * i)) for i in range(12)]
    assert detect_scene_boundaries(frames, 0.11) == [0.0]


def test_hue_wraparound_is_circular():
    # hue 0.02 vs 0.98 differ by 0.04 on the circle, not 0.96
    frames = [_hsv_frame(0, 0.02, 1.0, 1.0), _hsv_frame(1, 0.98, 1.0, 1.0)]
    assert detect_scene_boundaries(frames, 0.11) == [0.0]
    assert detect_scene_boundaries(frames, 0.01) == [0.0, 1.0]


def test_boundaries_strictly_increasing_on_grid():
    rng = np.random.RandomState(2)
    frames = [
        _hsv_frame(i, rng.uniform(), rng.uniform(), rng.uniform()) for i in range(30)
    ]
    cuts = detect_scene_boundaries(frames, 0.11)
    assert cuts[0] == 0.0
    assert all(b > a for a, b in zip(cuts, cuts[1:]))
    assert all(t == int(t) and 0 <= t < 30 for t in cuts)


def test_detect_needs_two_frames():
    with pytest.raises(LoadError):
        detect_scene_boundaries([_hsv_frame(0, 0, 0, 0)], 0.11)


# ---- domain type invariants --------------------------------------------


def test_saliency_frame_aspect_enforced():
    with pytest.raises(LoadError, match="aspect"):
        SaliencyFrame(frame_index=0, grid=np.zeros((4, 4)))
    with pytest.raises(LoadError):
        SaliencyFrame(frame_index=0, grid=np.full((4, 8), 2.0))


def test_transcript_segment_ordering():
    with pytest.raises(LoadError):
        TranscriptSegment(start=5.0, end=5.0, text="x")


def test_loudness_series_range():
    with pytest.raises(LoadError):
        LoudnessSeries(sample_rate=10.0, values=np.array([0.5, 1.5]))


# ---- project loading ----------------------------------------------------


def test_load_project_complete_fixture(project_dir):
    inputs = load_project(project_dir / "manifest.json")
    assert inputs.n_frames == 120
    assert len(inputs.frames) == 120
    assert inputs.duration_s == 120.0
    assert len(inputs.transcript) == 1
    assert inputs.transcript[0].start == 35.0
    assert len(inputs.captions) == 240  # two entries per frame
    assert inputs.loudness.sample_rate == 10.0


def test_load_project_reserialization_is_lossless(project_dir):
    inputs = load_project(project_dir / "manifest.json")
    round_tripped = ProjectInputs.from_dict(json.loads(json.dumps(inputs.to_dict())))
    assert round_tripped.duration_s == inputs.duration_s
    assert round_tripped.embedding_dim == inputs.embedding_dim
    np.testing.assert_array_equal(round_tripped.saliency[5].grid, inputs.saliency[5].grid)
    np.testing.assert_array_equal(round_tripped.frames[7].hsv, inputs.frames[7].hsv)
    np.testing.assert_array_equal(
        round_tripped.loudness.values, inputs.loudness.values
    )
    assert round_tripped.transcript == inputs.transcript
    assert [c.caption for c in round_tripped.captions] == [c.caption for c in inputs.captions]
    np.testing.assert_allclose(
        [c.direction.as_array() for c in round_tripped.captions],
        [c.direction.as_array() for c in inputs.captions],
        atol=1e-12,
    )


def test_load_project_missing_transcript(project_dir):
    manifest = json.loads((project_dir / "manifest.json").read_text())
    del manifest["transcript"]
    broken = project_dir / "broken.json"
    broken.write_text(json.dumps(manifest))
    with pytest.raises(LoadError, match="transcript"):
        load_project(broken)


def test_load_project_saliency_aspect_violation(project_dir, tmp_path):
    manifest = json.loads((project_dir / "manifest.json").read_text())
    manifest["saliency_size"] = [48, 32]
    broken = project_dir / "broken_aspect.json"
    broken.write_text(json.dumps(manifest))
    with pytest.raises(LoadError, match="saliency aspect"):
        load_project(broken)


def test_load_project_missing_manifest(tmp_path):
    with pytest.raises(LoadError, match="manifest"):
        load_project(tmp_path / "nope.json")


def test_load_project_bad_embedding_norm(project_dir):
    manifest = json.loads((project_dir / "manifest.json").read_text())
    records = json.loads((project_dir / manifest["embeddings"]).read_text())
    records[0]["embedding"] = [0.5, 0.0, 0.0, 0.0]
    bad = project_dir / "bad_embeddings.json"
    bad.write_text(json.dumps(records))
    manifest["embeddings"] = "bad_embeddings.json"
    broken = project_dir / "broken_norm.json"
    broken.write_text(json.dumps(manifest))
    with pytest.raises(LoadError, match="unit-normalized"):
        load_project(broken)


def test_load_wav_audio(tmp_path, project_dir):
    from scipy.io import wavfile

    manifest = json.loads((project_dir / "manifest.json").read_text())
    rate = 8000
    t = np.arange(rate * 120) / rate
    quiet = (0.05 * np.sin(2 * math.pi * 3.0 * t) * 32767).astype(np.int16)
    wavfile.write(project_dir / "audio.wav", rate, quiet)
    del manifest["loudness"]
    manifest["audio"] = "audio.wav"
    alt = project_dir / "manifest_wav.json"
    alt.write_text(json.dumps(manifest))
    inputs = load_project(alt)
    assert len(inputs.loudness) == 1200
    assert inputs.loudness.values.max() < 0.1


def test_saliency_16bit_normalization(tmp_path):
    arr = np.zeros((4, 8), dtype=np.uint16)
    arr[2, 3] = 65535
    img = Image.fromarray(arr)
    sal_dir = tmp_path / "sal"
    sal_dir.mkdir()
    img.save(sal_dir / "000000.png")
    from storysphere.ingest import _load_saliency

    frames = _load_saliency(sal_dir, (8, 4))
    assert frames[0].grid.max() == pytest.approx(1.0)
