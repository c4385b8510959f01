"""Spherical direction math shared by every pipeline stage.

Coordinate convention (fixed once for the whole package): z points up,
yaw rotates counterclockwise about z with yaw 0 along +x, pitch grows
toward +z. A direction is a unit 3-vector; equirectangular images map
x to yaw and y to pitch with pixel centers at half-integer offsets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigError, DomainError

UNIT_NORM_TOL = 1e-9


def normalize_yaw(yaw_deg: float) -> float:
    """Wrap a yaw angle into [-180, 180)."""
    return (yaw_deg + 180.0) % 360.0 - 180.0


@dataclass(frozen=True)
class Direction:
    """A unit vector on the sphere."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        norm = math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)
        if abs(norm - 1.0) > UNIT_NORM_TOL:
            raise DomainError(f"direction must be a unit vector, norm={norm!r}")

    @classmethod
    def from_array(cls, v) -> "Direction":
        v = np.asarray(v, dtype=float)
        norm = float(np.linalg.norm(v))
        if norm == 0.0:
            raise DomainError("cannot normalize a zero vector")
        v = v / norm
        return cls(float(v[0]), float(v[1]), float(v[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @property
    def yaw_deg(self) -> float:
        return normalize_yaw(math.degrees(math.atan2(self.y, self.x)))

    @property
    def pitch_deg(self) -> float:
        return math.degrees(math.asin(min(1.0, max(-1.0, self.z))))


def dir_from_angles(yaw_deg: float, pitch_deg: float) -> Direction:
    """Build a unit direction from yaw/pitch in degrees.

    Pitch outside [-90, 90] has no meaning on the sphere and raises.
    """
    if not -90.0 <= pitch_deg <= 90.0:
        raise DomainError(f"pitch must be in [-90, 90], got {pitch_deg}")
    yaw = math.radians(normalize_yaw(yaw_deg))
    pitch = math.radians(pitch_deg)
    return Direction(
        math.cos(pitch) * math.cos(yaw),
        math.cos(pitch) * math.sin(yaw),
        math.sin(pitch),
    )


def angles_to_vectors(yaw_deg, pitch_deg) -> np.ndarray:
    """Vectorized yaw/pitch (degrees) to unit-vector rows."""
    yaw = np.radians(np.asarray(yaw_deg, dtype=float))
    pitch = np.radians(np.asarray(pitch_deg, dtype=float))
    return np.stack(
        [np.cos(pitch) * np.cos(yaw), np.cos(pitch) * np.sin(yaw), np.sin(pitch)],
        axis=-1,
    )


def vectors_to_angles(vectors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized unit-vector rows to (yaw, pitch) in degrees, yaw in [-180, 180)."""
    v = np.asarray(vectors, dtype=float)
    yaw = np.degrees(np.arctan2(v[..., 1], v[..., 0]))
    yaw = (yaw + 180.0) % 360.0 - 180.0
    pitch = np.degrees(np.arcsin(np.clip(v[..., 2], -1.0, 1.0)))
    return yaw, pitch


def angular_distance(a: Direction, b: Direction) -> float:
    """Great-circle angle between two directions, in degrees within [0, 180]."""
    dot = a.x * b.x + a.y * b.y + a.z * b.z
    return math.degrees(math.acos(min(1.0, max(-1.0, dot))))


def angular_distances(vectors: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Angles in degrees between each row of `vectors` and `reference`."""
    dots = np.clip(np.asarray(vectors, dtype=float) @ np.asarray(reference, dtype=float), -1.0, 1.0)
    return np.degrees(np.arccos(dots))


def pixel_to_direction(x: float, y: float, width: int, height: int) -> Direction:
    """Map an equirectangular pixel (center at x+0.5, y+0.5) to a direction.

    Accepts fractional coordinates so weighted centroids map exactly.
    """
    if width <= 0 or height <= 0:
        raise DomainError(f"image size must be positive, got {width}x{height}")
    if not (0 <= x < width and 0 <= y < height):
        raise DomainError(f"pixel ({x}, {y}) outside {width}x{height} image")
    yaw = ((x + 0.5) / width - 0.5) * 360.0
    pitch = (0.5 - (y + 0.5) / height) * 180.0
    return dir_from_angles(yaw, pitch)


def direction_to_pixel(d: Direction, width: int, height: int) -> tuple[float, float]:
    """Inverse of pixel_to_direction; returns fractional pixel coordinates."""
    if width <= 0 or height <= 0:
        raise DomainError(f"image size must be positive, got {width}x{height}")
    x = (d.yaw_deg / 360.0 + 0.5) * width - 0.5
    y = (0.5 - d.pitch_deg / 180.0) * height - 0.5
    return x, y


@lru_cache(maxsize=8)
def pixel_direction_grid(width: int, height: int) -> np.ndarray:
    """Unit direction of every pixel center, shape (height, width, 3)."""
    xs = (np.arange(width) + 0.5) / width
    ys = (np.arange(height) + 0.5) / height
    yaw = (xs - 0.5) * 360.0
    pitch = (0.5 - ys) * 180.0
    return angles_to_vectors(yaw[None, :].repeat(height, 0), pitch[:, None].repeat(width, 1))


@dataclass(frozen=True)
class Viewport:
    """A field of view centered on a direction."""

    center: Direction
    h_fov_deg: float = 120.0
    v_fov_deg: float = 90.0

    def __post_init__(self):
        if not 0.0 < self.h_fov_deg <= 360.0:
            raise DomainError(f"h_fov must be in (0, 360], got {self.h_fov_deg}")
        if not 0.0 < self.v_fov_deg <= 180.0:
            raise DomainError(f"v_fov must be in (0, 180], got {self.v_fov_deg}")


def _local_rotation(center: Direction) -> np.ndarray:
    """Rotation taking `center` to (1, 0, 0): undo yaw about z, then pitch about y."""
    yaw = math.atan2(center.y, center.x)
    pitch = math.asin(min(1.0, max(-1.0, center.z)))
    cz, sz = math.cos(-yaw), math.sin(-yaw)
    rot_z = np.array([[cz, -sz, 0.0], [sz, cz, 0.0], [0.0, 0.0, 1.0]])
    cy, sy = math.cos(pitch), math.sin(pitch)
    rot_y = np.array([[cy, 0.0, sy], [0.0, 1.0, 0.0], [-sy, 0.0, cy]])
    return rot_y @ rot_z


def viewport_mask(vectors: np.ndarray, vp: Viewport) -> np.ndarray:
    """Containment test for an array of unit vectors, any leading shape.

    The test runs in the viewport-local frame so it stays correct near
    the poles where raw yaw/pitch offsets distort.
    """
    rot = _local_rotation(vp.center)
    local = np.asarray(vectors, dtype=float) @ rot.T
    local_yaw = np.degrees(np.arctan2(local[..., 1], local[..., 0]))
    local_pitch = np.degrees(np.arcsin(np.clip(local[..., 2], -1.0, 1.0)))
    return (np.abs(local_yaw) <= vp.h_fov_deg / 2.0) & (
        np.abs(local_pitch) <= vp.v_fov_deg / 2.0
    )


def in_viewport(d: Direction, vp: Viewport) -> bool:
    """True iff direction `d` falls inside the viewport."""
    return bool(viewport_mask(d.as_array(), vp))


@dataclass
class ViewingPath:
    """A direction per frame on the 1 fps grid, starting at `start_frame`."""

    start_frame: int
    vectors: np.ndarray  # (n_frames, 3) unit rows

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=float)
        if self.vectors.ndim != 2 or self.vectors.shape[1] != 3 or len(self.vectors) == 0:
            raise DomainError("viewing path needs a non-empty (n, 3) vector array")
        norms = np.linalg.norm(self.vectors, axis=1)
        if np.any(np.abs(norms - 1.0) > UNIT_NORM_TOL):
            raise DomainError("viewing path rows must be unit vectors")

    def __len__(self) -> int:
        return len(self.vectors)

    @property
    def end_frame(self) -> int:
        return self.start_frame + len(self.vectors) - 1

    def direction_at(self, frame: int) -> Direction:
        if not self.start_frame <= frame <= self.end_frame:
            raise DomainError(f"frame {frame} outside path [{self.start_frame}, {self.end_frame}]")
        v = self.vectors[frame - self.start_frame]
        return Direction(float(v[0]), float(v[1]), float(v[2]))

    def directions(self) -> list[Direction]:
        return [Direction(float(v[0]), float(v[1]), float(v[2])) for v in self.vectors]


def smooth_path(path: ViewingPath, window: int = 5) -> ViewingPath:
    """Moving-average smoothing of a viewing path on the sphere.

    Each output direction is the renormalized mean of the unit vectors in a
    centered window; the window truncates at the path ends rather than
    padding. Length and start frame are preserved.
    """
    if window < 1 or window % 2 == 0:
        raise ConfigError(f"smoothing window must be odd and >= 1, got {window}")
    n = len(path.vectors)
    half = window // 2
    out = np.empty_like(path.vectors)
    for i in range(n):
        lo = max(0, i - half)
        hi = min(n, i + half + 1)
        mean = path.vectors[lo:hi].mean(axis=0)
        norm = np.linalg.norm(mean)
        # Antipodal cancellation can zero the mean; keep the raw direction then.
        out[i] = path.vectors[i] if norm < 1e-12 else mean / norm
    return ViewingPath(start_frame=path.start_frame, vectors=out)
