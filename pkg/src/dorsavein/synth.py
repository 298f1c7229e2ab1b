"""Seeded generator of vein-like trees rendered as hand rasters, with exact
branch-point ground truth, plus rigid+noise perturbation of the rasters.

Stands in for a real capture database: a bright elliptical hand silhouette on
a black surround, with dark vein strokes grown as jittered random walks.
"""

import math
import struct
import zlib
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .exceptions import FormatError, InvalidParameter
from .validation import check_color_image

SURROUND_LEVEL = 0
SILHOUETTE_LEVEL = 200
VEIN_LEVEL = 110
_MARGIN = 28          # keep veins this far inside the silhouette, px
_STEP = 3.0           # random-walk step length, px
_MIN_ARM = 30.0       # minimum accepted branch arm length, px
_MIN_BRANCH_GAP = 18.0


@dataclass(frozen=True)
class SynthParams:
    seed: int = 0
    width: int = 480
    height: int = 640
    branch_count: int = 7
    wander: float = 8.0      # angular jitter per walk step, degrees
    vein_thickness: int = 2  # stroke width, px

    def validate(self):
        if self.width < 64 or self.height < 64:
            raise InvalidParameter("raster must be at least 64x64")
        if not 4 <= self.branch_count <= 12:
            raise InvalidParameter("branch_count must be in [4, 12]")
        if self.wander < 0:
            raise InvalidParameter("wander must be >= 0")
        if not 2 <= self.vein_thickness <= 5:
            raise InvalidParameter("vein_thickness must be in [2, 5]")


@dataclass(frozen=True)
class GroundTruth:
    branch_points: tuple  # of (x, y)
    tree_edges: tuple     # of polylines, each a tuple of (x, y)


def _walk(rng, start, heading, wander, inside, max_len, occupied=None,
          clearance=10.0, ignore_radius=12.0):
    """Mean-reverting jittered walk from `start` along `heading`.

    Stops at the silhouette margin or when the next point would come within
    `clearance` of already-drawn strokes (except near its own origin), so
    strokes only meet at deliberate branch points.
    """
    start = np.asarray(start, dtype=np.float64)
    pts = [start]
    length = 0.0
    jitter = 0.0
    while length < max_len:
        jitter = 0.9 * jitter + rng.normal(0.0, wander)
        rad = math.radians(heading + jitter)
        nxt = pts[-1] + _STEP * np.array([math.cos(rad), math.sin(rad)])
        if not inside(nxt):
            break
        if occupied is not None and len(occupied):
            d = np.hypot(occupied[:, 0] - nxt[0], occupied[:, 1] - nxt[1])
            if d.min() < clearance and math.hypot(*(nxt - start)) > ignore_radius:
                break
        pts.append(nxt)
        length += _STEP
    return np.array(pts)


def generate_identity(params):
    """Grow one random venal tree and render it; deterministic per seed.

    Returns the color raster and the exact branch-point ground truth. Every
    branch point is a mid-path vertex of an existing edge with one new arm
    spawned from it, so it lies on >= 3 tree edges.
    """
    params.validate()
    rng = np.random.default_rng(np.random.SeedSequence(params.seed))
    w, h = params.width, params.height
    cx, cy = w / 2.0, h / 2.0
    rx = 0.36 * w * (1.0 + rng.uniform(-0.05, 0.05))
    ry = 0.42 * h * (1.0 + rng.uniform(-0.05, 0.05))
    irx, iry = rx - _MARGIN, ry - _MARGIN

    def inside(pt):
        return ((pt[0] - cx) / irx) ** 2 + ((pt[1] - cy) / iry) ** 2 <= 1.0

    for _trunk_try in range(50):
        trunk_start = np.array([cx + rng.uniform(-30.0, 30.0), cy + 0.7 * iry])
        trunk = _walk(rng, trunk_start, -90.0 + rng.uniform(-10.0, 10.0),
                      params.wander, inside, max_len=1.6 * iry)
        if (len(trunk) - 1) * _STEP >= 0.9 * iry:
            break
    edges = [trunk]
    branch_points = []

    for _ in range(params.branch_count):
        placed = False
        for _attempt in range(400):
            weights = np.array([max(len(e) - 8, 0) for e in edges], dtype=np.float64)
            if weights.sum() == 0:
                break
            edge_idx = rng.choice(len(edges), p=weights / weights.sum())
            edge = edges[edge_idx]
            vi = int(rng.integers(4, len(edge) - 4))
            bp = edge[vi]
            if any(math.hypot(bp[0] - q[0], bp[1] - q[1]) < _MIN_BRANCH_GAP
                   for q in branch_points):
                continue
            local = math.degrees(math.atan2(edge[vi + 1][1] - edge[vi - 1][1],
                                            edge[vi + 1][0] - edge[vi - 1][0]))
            side = 1.0 if rng.random() < 0.5 else -1.0
            occupied = np.concatenate(edges)
            arm = _walk(rng, bp, local + side * rng.uniform(60.0, 85.0),
                        params.wander, inside, max_len=rng.uniform(60.0, 150.0),
                        occupied=occupied, clearance=10.0, ignore_radius=20.0)
            if (len(arm) - 1) * _STEP < _MIN_ARM:
                continue
            edges[edge_idx] = edge[:vi + 1]
            edges.append(edge[vi:])
            edges.append(arm)
            branch_points.append((float(bp[0]), float(bp[1])))
            placed = True
            break
        if not placed:
            raise InvalidParameter("could not place the requested branch count; "
                                   "enlarge the raster or reduce branch_count")

    gray = np.full((h, w), float(SURROUND_LEVEL))
    yy, xx = np.mgrid[0:h, 0:w]
    silhouette = ((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2 <= 1.0
    gray[silhouette] = float(SILHOUETTE_LEVEL)
    radius = params.vein_thickness / 2.0
    offs = [(dy, dx) for dy in range(-3, 4) for dx in range(-3, 4)
            if dy * dy + dx * dx <= radius * radius]
    for edge in edges:
        _stroke(gray, edge, offs, float(VEIN_LEVEL))

    img = np.repeat(gray.astype(np.uint8)[:, :, None], 3, axis=2)
    gt = GroundTruth(branch_points=tuple(branch_points),
                     tree_edges=tuple(tuple((float(x), float(y)) for x, y in e)
                                      for e in edges))
    return img, gt


def _stroke(canvas, polyline, offsets, value):
    h, w = canvas.shape
    samples = [polyline[0]]
    for a, b in zip(polyline[:-1], polyline[1:]):
        seg = b - a
        n = max(int(math.ceil(math.hypot(*seg) / 0.7)), 1)
        for t in range(1, n + 1):
            samples.append(a + seg * (t / n))
    pts = np.array(samples)
    px = np.rint(pts[:, 0]).astype(int)
    py = np.rint(pts[:, 1]).astype(int)
    for dy, dx in offsets:
        xs = np.clip(px + dx, 0, w - 1)
        ys = np.clip(py + dy, 0, h - 1)
        canvas[ys, xs] = value


def _perturb_rng(img, rotation, translation, noise_p):
    """Deterministic noise stream derived from the image and the parameters."""
    entropy = [zlib.crc32(np.ascontiguousarray(img).tobytes())]
    for v in (rotation, translation[0], translation[1], noise_p):
        entropy.append(struct.unpack("<Q", struct.pack("<d", float(v)))[0])
    return np.random.default_rng(np.random.SeedSequence(entropy))


def perturb(img, rotation=0.0, translation=(0.0, 0.0), noise_p=0.0):
    """Rigid rotate+translate about the image center (bilinear), then flip
    pixels to salt or pepper with probability noise_p."""
    img = check_color_image(img)
    if abs(rotation) > 30.0:
        raise InvalidParameter("|rotation| must be <= 30 degrees")
    if not 0.0 <= noise_p <= 0.05:
        raise InvalidParameter("noise_p must be in [0, 0.05]")
    tx, ty = float(translation[0]), float(translation[1])

    if rotation == 0.0 and tx == 0.0 and ty == 0.0 and noise_p == 0.0:
        return img.copy()

    h, w = img.shape[:2]
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    rad = math.radians(rotation)
    cos_r, sin_r = math.cos(rad), math.sin(rad)
    # Inverse map in (row, col) coordinates: in = M @ (out - c - t) + c.
    m = np.array([[cos_r, -sin_r], [sin_r, cos_r]])
    center = np.array([cy, cx])
    shift = np.array([ty, tx])
    offset = center - m @ (center + shift)
    out = np.empty_like(img)
    for c in range(3):
        chan = ndimage.affine_transform(img[..., c].astype(np.float64), m,
                                        offset=offset, order=1, mode="constant",
                                        cval=float(SURROUND_LEVEL))
        out[..., c] = np.clip(np.rint(chan), 0, 255).astype(np.uint8)

    if noise_p > 0.0:
        rng = _perturb_rng(img, rotation, (tx, ty), noise_p)
        flips = rng.random((h, w)) < noise_p
        values = rng.integers(0, 2, size=(h, w)).astype(np.uint8) * 255
        out[flips] = values[flips][:, None]
    return out


def transform_points(points, rotation=0.0, translation=(0.0, 0.0),
                     width=480, height=640):
    """Apply the perturbation's rigid motion to ground-truth coordinates."""
    pts = np.asarray(points, dtype=np.float64)
    cx, cy = (width - 1) / 2.0, (height - 1) / 2.0
    rad = math.radians(rotation)
    cos_r, sin_r = math.cos(rad), math.sin(rad)
    x = pts[:, 0] - cx
    y = pts[:, 1] - cy
    return np.column_stack([cos_r * x - sin_r * y + cx + translation[0],
                            sin_r * x + cos_r * y + cy + translation[1]])


# ---------------------------------------------------------------------------
# Ground-truth sidecar files
# ---------------------------------------------------------------------------

def save_ground_truth(points, path):
    lines = ["GT 1", f"branches {len(points)}"]
    for x, y in points:
        lines.append(f"{x:.6f} {y:.6f}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_ground_truth(path):
    try:
        with open(path, "r") as fh:
            lines = fh.read().split("\n")
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    if len(lines) < 2 or lines[0] != "GT 1" or not lines[1].startswith("branches "):
        raise FormatError(f"{path}: not a GT 1 sidecar")
    try:
        count = int(lines[1][len("branches "):])
        points = [tuple(float(v) for v in line.split(" "))
                  for line in lines[2:2 + count]]
    except ValueError as exc:
        raise FormatError(f"{path}: malformed branch line") from exc
    if len(points) != count or any(len(p) != 2 for p in points):
        raise FormatError(f"{path}: branch count mismatch")
    return points
